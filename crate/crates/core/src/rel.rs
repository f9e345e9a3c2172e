//! Dense binary relations on `{0..n-1}` and filters of relations given by
//! finite bases.
//!
//! A [`RelationFilter`] stands for the filter of all relations that contain
//! some finite intersection of base elements. On a finite carrier the
//! intersection of the whole base is the least member, so membership,
//! order, and equality all reduce to comparisons against that meet.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRelation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitRelation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitRelation {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn diagonal(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn full(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            for e in [i, j] {
                if e >= n {
                    return Err(Error::OutOfRange { elem: e, size: n });
                }
            }
            r.insert(i, j);
        }
        Ok(r)
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Iterates pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.contains(i, j)).map(move |j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::CarrierMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut r = self.clone();
        r.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        Ok(r)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut r = self.clone();
        r.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a &= b);
        Ok(r)
    }

    /// Relational product: `i (r∘s) k` iff `i r j` and `j s k` for some `j`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.contains(i, j) {
                    let w = self.words;
                    let src = other.row(j).to_vec();
                    out.bits[i * w..(i + 1) * w].iter_mut().zip(&src).for_each(|(a, b)| *a |= b);
                }
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Self {
        let mut out = Self::empty(self.n);
        for (i, j) in self.pairs() {
            out.insert(j, i);
        }
        out
    }

    /// `self ∘ self ∘ … ∘ self` with `k ≥ 1` factors.
    pub fn power(&self, k: usize) -> Self {
        assert!(k >= 1, "relational power needs at least one factor");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.compose(self).expect("same carrier");
        }
        acc
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(i, j)| self.contains(j, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).map(|c| c.is_subset(self)).unwrap_or(false)
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Image under a map of the carrier into `{0..target-1}`.
    pub fn image(&self, map: &[usize], target: usize) -> Result<Self> {
        if map.len() != self.n {
            return Err(Error::CarrierMismatch(map.len(), self.n));
        }
        Self::from_pairs(target, self.pairs().map(|(i, j)| (map[i], map[j])))
    }

    /// `{(i,j) : map(i) R map(j)}` where `self` lives on the codomain.
    pub fn preimage(&self, map: &[usize]) -> Result<Self> {
        let m = map.len();
        let mut out = Self::empty(m);
        for i in 0..m {
            for j in 0..m {
                let (a, b) = (map[i], map[j]);
                if a >= self.n || b >= self.n {
                    return Err(Error::OutOfRange {
                        elem: a.max(b),
                        size: self.n,
                    });
                }
                if self.contains(a, b) {
                    out.insert(i, j);
                }
            }
        }
        Ok(out)
    }

    /// Renders the literal; pairs of the diagonal are folded into `+diag`
    /// when the relation is reflexive.
    pub fn to_literal(&self) -> String {
        let diag = self.n > 0 && self.is_reflexive();
        let mut s = format!("rel {}", self.n);
        if diag {
            s.push_str(" +diag");
        }
        s.push_str(" {");
        for (i, j) in self.pairs() {
            if diag && i == j {
                continue;
            }
            s.push_str(&format!(" ({i},{j})"));
        }
        s.push_str(" }");
        s
    }
}

impl fmt::Debug for BitRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl fmt::Display for BitRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// Parses `rel <n> [+diag] { (i,j) (k,l) ... }`.
impl FromStr for BitRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |col: usize, msg: &str| Error::parse(1, col + 1, msg);
        let rest = s.trim_start();
        let off = s.len() - rest.len();
        let rest = rest
            .strip_prefix("rel")
            .ok_or_else(|| err(off, "expected `rel`"))?;
        let open = rest.find('{').ok_or_else(|| err(s.len(), "expected `{`"))?;
        let header: Vec<&str> = rest[..open].split_whitespace().collect();
        let (n, diag) = match header.as_slice() {
            [n] => (*n, false),
            [n, "+diag"] => (*n, true),
            _ => return Err(err(off + 3, "expected `<n> [+diag]`")),
        };
        let n: usize = n.parse().map_err(|_| err(off + 3, "carrier size must be a natural number"))?;
        if n == 0 {
            return Err(err(off + 3, "carrier size must be positive"));
        }
        let body_start = off + 3 + open + 1;
        let body = &s[body_start..];
        let close = body.rfind('}').ok_or_else(|| err(s.len(), "expected `}`"))?;
        if !s[body_start + close + 1..].trim().is_empty() {
            return Err(err(body_start + close + 1, "trailing input after `}`"));
        }
        let body = &body[..close];
        let mut r = if diag { BitRelation::diagonal(n) } else { BitRelation::empty(n) };
        let mut pos = 0;
        let bytes = body.as_bytes();
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            if bytes[pos] != b'(' {
                return Err(err(body_start + pos, "expected `(`"));
            }
            let end = body[pos..]
                .find(')')
                .ok_or_else(|| err(body_start + pos, "unterminated pair"))?;
            let inner = &body[pos + 1..pos + end];
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(err(body_start + pos, "a pair needs exactly two indices"));
            }
            let mut idx = [0usize; 2];
            for (k, p) in parts.iter().enumerate() {
                idx[k] = p.parse().map_err(|_| err(body_start + pos, "index must be a natural number"))?;
                if idx[k] >= n {
                    return Err(err(body_start + pos, "index out of range"));
                }
            }
            r.insert(idx[0], idx[1]);
            pos += end + 1;
        }
        Ok(r)
    }
}

/// Which of the uniformity axioms a filter satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomReport {
    pub u1: bool,
    pub u2: bool,
    pub u3: bool,
    pub u4: bool,
    pub u5: bool,
}

impl AxiomReport {
    pub fn is_semiuniformity(&self) -> bool {
        self.u1 && self.u2 && self.u3 && self.u4
    }

    pub fn is_uniformity(&self) -> bool {
        self.is_semiuniformity() && self.u5
    }
}

/// Filter of relations presented by a nonempty finite base.
#[derive(Clone, Debug)]
pub struct RelationFilter {
    n: usize,
    base: Vec<BitRelation>,
}

impl RelationFilter {
    pub fn new(n: usize, base: Vec<BitRelation>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::Invalid("a filter base must be nonempty".into()));
        }
        for b in &base {
            if b.carrier_size() != n {
                return Err(Error::CarrierMismatch(n, b.carrier_size()));
            }
        }
        Ok(RelationFilter { n, base })
    }

    /// `Fg{r}`.
    pub fn principal(r: BitRelation) -> Self {
        RelationFilter {
            n: r.carrier_size(),
            base: vec![r],
        }
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &[BitRelation] {
        &self.base
    }

    /// Intersection of the whole base: the least member of the filter.
    pub fn base_meet(&self) -> BitRelation {
        let mut it = self.base.iter();
        let mut acc = it.next().expect("nonempty base").clone();
        for b in it {
            acc = acc.intersection(b).expect("same carrier");
        }
        acc
    }

    pub fn contains(&self, u: &BitRelation) -> bool {
        u.carrier_size() == self.n && self.base_meet().is_subset(u)
    }

    /// Filter order (reverse inclusion): `self ≤ other` iff every member of
    /// `other` is a member of `self`.
    pub fn leq(&self, other: &Self) -> bool {
        self.n == other.n && {
            let meet = self.base_meet();
            other.base.iter().all(|b| meet.is_subset(b))
        }
    }

    /// Equality of the generated filters (mutual cofinality of the bases).
    pub fn equivalent(&self, other: &Self) -> bool {
        self.leq(other) && other.leq(self)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::CarrierMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let meet = self.base_meet();
        AxiomReport {
            u1: true,
            u2: true,
            u3: self.base.iter().all(BitRelation::is_reflexive),
            u4: self.base.iter().all(|b| meet.is_subset(&b.inverse())),
            u5: {
                let sq = meet.compose(&meet).expect("same carrier");
                self.base.iter().all(|b| sq.is_subset(b))
            },
        }
    }

    /// `Fg(f ∪ g)`, based on pairwise intersections.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let base = self
            .base
            .iter()
            .flat_map(|u| other.base.iter().map(move |v| u.intersection(v).expect("same carrier")))
            .collect();
        Ok(RelationFilter { n: self.n, base })
    }

    /// `f ∩ g`, based on pairwise unions.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let base = self
            .base
            .iter()
            .flat_map(|u| other.base.iter().map(move |v| u.union(v).expect("same carrier")))
            .collect();
        Ok(RelationFilter { n: self.n, base })
    }

    /// `f ∘ g`, based on pairwise relational products.
    pub fn circ(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let base = self
            .base
            .iter()
            .flat_map(|u| other.base.iter().map(move |v| u.compose(v).expect("same carrier")))
            .collect();
        Ok(RelationFilter { n: self.n, base })
    }

    pub fn inverse(&self) -> Self {
        RelationFilter {
            n: self.n,
            base: self.base.iter().map(BitRelation::inverse).collect(),
        }
    }

    /// Least uniformity on the bare set above this filter: generated by
    /// the equivalence closure of the base meet.
    pub fn uniformity_closure(&self) -> Self {
        let meet = self.base_meet();
        Self::principal(crate::partition::Partition::equivalence_closure(&meet).to_relation())
    }

    /// Some member `V` with `Vⁿ ⊆ u`. Single base elements are tried first
    /// in base order, then the intersection of the whole base.
    pub fn nth_root(&self, u: &BitRelation, k: usize) -> Result<BitRelation> {
        if k == 0 {
            return Err(Error::Invalid("root index must be positive".into()));
        }
        if !self.contains(u) {
            return Err(Error::NotInFilter);
        }
        for b in &self.base {
            if b.power(k).is_subset(u) {
                return Ok(b.clone());
            }
        }
        let meet = self.base_meet();
        if meet.power(k).is_subset(u) {
            Ok(meet)
        } else {
            Err(Error::NotUniformity("no member of the filter is a root (U5 fails)".into()))
        }
    }
}

/// Decides `f ∨ g = f ∘ g  ⇔  g ∘ f ≤ f ∘ g` for two uniformities on a set
/// and reports whether the biconditional holds.
pub fn semipermute_join_check(f: &RelationFilter, g: &RelationFilter) -> Result<bool> {
    for (name, h) in [("first", f), ("second", g)] {
        if !h.check_axioms().is_uniformity() {
            return Err(Error::NotUniformity(format!("{name} argument")));
        }
    }
    let fg = f.circ(g)?;
    let gf = g.circ(f)?;
    let join = f.join(g)?.uniformity_closure();
    let lhs = join.equivalent(&fg);
    let rhs = gf.leq(&fg);
    Ok(lhs == rhs)
}
