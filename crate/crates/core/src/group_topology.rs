//! Neighbourhood filters of the identity in finite groups, the left and right
//! uniformities they induce, and translation-invariant bases.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rel::{BitRelation, RelationFilter};
use crate::uniform::is_compatible_uniformity;

/// A finite algebra with one binary, one unary and one nullary operation
/// satisfying the group laws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    algebra: FiniteAlgebra,
    mul: usize,
    inv: usize,
    e: usize,
}

impl FiniteGroup {
    pub fn new(algebra: FiniteAlgebra) -> Result<Self> {
        let pick = |ar: usize| -> Result<usize> {
            let found: Vec<usize> = algebra
                .operations()
                .iter()
                .enumerate()
                .filter(|(_, o)| o.arity() == ar)
                .map(|(i, _)| i)
                .collect();
            match found.as_slice() {
                [i] => Ok(*i),
                _ => Err(Error::NotGroup(format!("expected exactly one operation of arity {ar}"))),
            }
        };
        if algebra.operations().len() != 3 {
            return Err(Error::NotGroup("signature must be (mul/2, inv/1, e/0)".into()));
        }
        let (mul, inv, e_op) = (pick(2)?, pick(1)?, pick(0)?);
        let e = algebra.operations()[e_op].table()[0];
        let n = algebra.size();
        let g = FiniteGroup { algebra, mul, inv, e };
        for x in 0..n {
            if g.mul(x, e) != x || g.mul(e, x) != x {
                return Err(Error::NotGroup(format!("{e} is not an identity at {x}")));
            }
            if g.mul(x, g.inv(x)) != e || g.mul(g.inv(x), x) != e {
                return Err(Error::NotGroup(format!("inverse law fails at {x}")));
            }
            for y in 0..n {
                for z in 0..n {
                    if g.mul(g.mul(x, y), z) != g.mul(x, g.mul(y, z)) {
                        return Err(Error::NotGroup(format!("associativity fails at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.algebra.size()
    }

    pub fn identity(&self) -> usize {
        self.e
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.algebra.apply(self.mul, &[x, y])
    }

    pub fn inv(&self, x: usize) -> usize {
        self.algebra.apply(self.inv, &[x])
    }

    /// `a⁻¹Na`.
    pub fn conjugate(&self, set: &Subset, a: usize) -> Subset {
        let ai = self.inv(a);
        Subset(set.0.iter().map(|&x| self.mul(self.mul(ai, x), a)).collect())
    }

    pub fn product(&self, a: &Subset, b: &Subset) -> Subset {
        Subset(a.0.iter().flat_map(|&x| b.0.iter().map(move |&y| (x, y))).map(|(x, y)| self.mul(x, y)).collect())
    }

    pub fn inverse_set(&self, a: &Subset) -> Subset {
        Subset(a.0.iter().map(|&x| self.inv(x)).collect())
    }

    /// Subgroup generated by `gens` (closure under products suffices in a
    /// finite group).
    pub fn generate(&self, gens: &[usize]) -> Subset {
        let mut s: BTreeSet<usize> = BTreeSet::from([self.e]);
        let mut frontier: Vec<usize> = gens.to_vec();
        while let Some(x) = frontier.pop() {
            if !s.insert(x) {
                continue;
            }
            for &g in gens {
                let y = self.mul(x, g);
                if !s.contains(&y) {
                    frontier.push(y);
                }
            }
        }
        Subset(s)
    }

    /// All subgroups, smallest first.
    pub fn subgroups(&self) -> Vec<Subset> {
        let cyclic: Vec<Subset> = (0..self.order()).map(|g| self.generate(&[g])).collect();
        let mut all: Vec<Subset> = vec![Subset(BTreeSet::from([self.e]))];
        for c in &cyclic {
            let mut fresh = Vec::new();
            for h in &all {
                let gens: Vec<usize> = h.0.iter().chain(c.0.iter()).copied().collect();
                let j = self.generate(&gens);
                if !all.contains(&j) && !fresh.contains(&j) {
                    fresh.push(j);
                }
            }
            all.extend(fresh);
        }
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
        all
    }

    pub fn is_normal(&self, h: &Subset) -> bool {
        (0..self.order()).all(|a| self.conjugate(h, a) == *h)
    }

    /// `[M, N]`, generated by all `m⁻¹n⁻¹mn`.
    pub fn commutator_subgroup(&self, m: &Subset, n: &Subset) -> Subset {
        let mut gens = Vec::new();
        for &x in &m.0 {
            for &y in &n.0 {
                gens.push(self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y)));
            }
        }
        self.generate(&gens)
    }

    /// Left cosets of a normal subgroup as a partition.
    pub fn coset_partition(&self, n: &Subset) -> Partition {
        let labels: Vec<usize> = (0..self.order())
            .map(|x| n.0.iter().map(|&h| self.mul(x, h)).min().expect("nonempty subgroup"))
            .collect();
        Partition::from_labels(&labels)
    }

    /// The block of the identity.
    pub fn normal_subgroup_of(&self, p: &Partition) -> Subset {
        Subset((0..self.order()).filter(|&x| p.related(x, self.e)).collect())
    }
}

/// A subset of the carrier; literal form `{0 3 5}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub BTreeSet<usize>);

impl Subset {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(&x)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset(self.0.intersection(&other.0).copied().collect())
    }

    /// Parses a `|`-separated list such as `{0}|{0 3}`.
    pub fn parse_list(s: &str) -> Result<Vec<Subset>> {
        s.split('|').map(str::parse).collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", items.join(" "))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let body = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::parse(1, 1, format!("expected `{{...}}`, found `{t}`")))?;
        let mut set = BTreeSet::new();
        for tok in body.split_whitespace() {
            let x: usize = tok.parse().map_err(|_| Error::parse(1, 1, format!("`{tok}` is not an element")))?;
            set.insert(x);
        }
        Ok(Subset(set))
    }
}

#[derive(Clone, Debug)]
pub struct NeighborhoodBase {
    group: FiniteGroup,
    sets: Vec<Subset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupAxiomReport {
    pub g3: bool,
    pub g4: bool,
    pub g5: bool,
    pub g5_prime: bool,
}

impl NeighborhoodBase {
    pub fn new(group: &FiniteGroup, sets: Vec<Subset>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Invalid("a neighbourhood base must be nonempty".into()));
        }
        for s in &sets {
            if let Some(&x) = s.0.iter().find(|&&x| x >= group.order()) {
                return Err(Error::OutOfRange {
                    elem: x,
                    size: group.order(),
                });
            }
            if !s.contains(group.identity()) {
                return Err(Error::Invalid(format!("{s} does not contain the identity")));
            }
        }
        Ok(NeighborhoodBase {
            group: group.clone(),
            sets,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    /// Least member of the neighbourhood filter.
    pub fn meet(&self) -> Subset {
        let mut it = self.sets.iter();
        let first = it.next().expect("nonempty").clone();
        it.fold(first, |acc, s| acc.intersection(s))
    }
}

pub fn check_group_axioms(nb: &NeighborhoodBase) -> GroupAxiomReport {
    let g = &nb.group;
    let b = nb.meet();
    let bb = g.product(&b, &b);
    let conj_meet = |n: &Subset| {
        (0..g.order()).map(|a| g.conjugate(n, a)).reduce(|x, y| x.intersection(&y)).expect("nonempty group")
    };
    GroupAxiomReport {
        g3: nb.sets.iter().all(|n| bb.is_subset(n)),
        g4: nb.sets.iter().all(|n| b.is_subset(&g.inverse_set(n))),
        g5: nb.sets.iter().all(|n| (0..g.order()).all(|a| b.is_subset(&g.conjugate(n, a)))),
        g5_prime: nb.sets.iter().all(|n| b.is_subset(&conj_meet(n))),
    }
}

/// `N_l = {(x,y) : y ∈ xN}`.
pub fn left_relation(g: &FiniteGroup, n: &Subset) -> BitRelation {
    let k = g.order();
    let mut r = BitRelation::empty(k);
    for x in 0..k {
        for y in 0..k {
            if n.contains(g.mul(g.inv(x), y)) {
                r.insert(x, y);
            }
        }
    }
    r
}

/// `N_r = {(x,y) : y ∈ Nx}`.
pub fn right_relation(g: &FiniteGroup, n: &Subset) -> BitRelation {
    let k = g.order();
    let mut r = BitRelation::empty(k);
    for x in 0..k {
        for y in 0..k {
            if n.contains(g.mul(y, g.inv(x))) {
                r.insert(x, y);
            }
        }
    }
    r
}

pub fn left_relations(nb: &NeighborhoodBase) -> RelationFilter {
    let base = nb.sets.iter().map(|n| left_relation(&nb.group, n)).collect();
    RelationFilter::new(nb.group.order(), base).expect("nonempty base")
}

pub fn right_relations(nb: &NeighborhoodBase) -> RelationFilter {
    let base = nb.sets.iter().map(|n| right_relation(&nb.group, n)).collect();
    RelationFilter::new(nb.group.order(), base).expect("nonempty base")
}

/// The six statements, in order: `U_r ≤ U_l`, `U_l ≤ U_r`, `U_l = U_r`,
/// `U_l` compatible, `U_r` compatible, (G5′).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupEquivalenceReport {
    pub values: [bool; 6],
}

impl GroupEquivalenceReport {
    pub const LABELS: [&'static str; 6] = [
        "U_r <= U_l",
        "U_l <= U_r",
        "U_l = U_r",
        "U_l compatible",
        "U_r compatible",
        "G5'",
    ];

    pub fn consistent(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

/// Requires (G3) and (G4), which make `U_l` and `U_r` uniformities. (G5) is
/// deliberately not required: it is equivalent to item (6) here, so
/// demanding it would leave only the all-true case to check.
pub fn equivalence_theorem_check(nb: &NeighborhoodBase) -> Result<GroupEquivalenceReport> {
    let ax = check_group_axioms(nb);
    if !(ax.g3 && ax.g4) {
        return Err(Error::Invalid("the base must satisfy (G3) and (G4)".into()));
    }
    let ul = left_relations(nb);
    let ur = right_relations(nb);
    let alg = nb.group.algebra();
    Ok(GroupEquivalenceReport {
        values: [
            ur.leq(&ul),
            ul.leq(&ur),
            ul.equivalent(&ur),
            alg.is_compatible_relation(&ul.base_meet()),
            alg.is_compatible_relation(&ur.base_meet()),
            ax.g5_prime,
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A base of translation-invariant relations for a compatible uniformity.
pub fn invariant_base(g: &FiniteGroup, u: &RelationFilter, side: Side) -> Result<RelationFilter> {
    if !is_compatible_uniformity(g.algebra(), u) {
        return Err(Error::NotUniformity("expected a compatible uniformity".into()));
    }
    let k = g.order();
    // The base meet lies inside every member, so it serves as U′ for all U.
    let inner = u.base_meet();
    let delta: BTreeSet<usize> = inner
        .pairs()
        .map(|(b, c)| match side {
            Side::Left => g.mul(g.inv(b), c),
            Side::Right => g.mul(c, g.inv(b)),
        })
        .collect();
    let delta = Subset(delta);
    let v = match side {
        Side::Left => left_relation(g, &delta),
        Side::Right => right_relation(g, &delta),
    };
    RelationFilter::new(k, vec![v])
}

/// `δ(U) = {x⁻¹y : x U y}`.
pub fn delta_of(g: &FiniteGroup, u: &BitRelation) -> Subset {
    Subset(u.pairs().map(|(x, y)| g.mul(g.inv(x), y)).collect())
}
