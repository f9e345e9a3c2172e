//! Congruence generation, the congruence lattice, quotients, and kernels.

use std::collections::HashSet;

use crate::algebra::{all_tuples, FiniteAlgebra, Homomorphism, Operation};
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};

/// Calls `f(x, y)` for every basic translation image of the pair `(a, b)`:
/// one coordinate of an operation gets `a` resp. `b`, the rest are fixed.
fn for_each_translate(alg: &FiniteAlgebra, a: usize, b: usize, mut f: impl FnMut(usize, usize) -> bool) -> bool {
    let n = alg.size();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, op) in alg.operations().iter().enumerate() {
        let r = op.arity();
        if r == 0 {
            continue;
        }
        xs.resize(r, 0);
        ys.resize(r, 0);
        for q in 0..r {
            for consts in all_tuples(n, r - 1) {
                let mut it = consts.iter();
                for p in 0..r {
                    if p == q {
                        xs[p] = a;
                        ys[p] = b;
                    } else {
                        let c = *it.next().expect("r-1 constants");
                        xs[p] = c;
                        ys[p] = c;
                    }
                }
                if !f(alg.apply(k, &xs), alg.apply(k, &ys)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Least congruence containing `pairs`.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Partition> {
    cg_from(alg, &Partition::bottom(alg.size()), pairs)
}

/// Least congruence containing the equivalence `start` and `pairs`.
/// `start` is assumed compatible only through its own translations, so it is
/// fed through the worklist like any other generator.
pub fn cg_from(alg: &FiniteAlgebra, start: &Partition, pairs: &[(usize, usize)]) -> Result<Partition> {
    let n = alg.size();
    if start.size() != n {
        return Err(Error::CarrierMismatch(start.size(), n));
    }
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= n {
                return Err(Error::OutOfRange { elem: x, size: n });
            }
        }
    }
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = Vec::new();
    let seeds = (0..n).map(|i| (start.repr(i), i)).chain(pairs.iter().copied());
    for (a, b) in seeds {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    // Only merging pairs are queued: translating a chain of generators
    // yields a chain, so the classes stay compatible.
    while let Some((a, b)) = work.pop() {
        for_each_translate(alg, a, b, |x, y| {
            if uf.union(x, y) {
                work.push((x, y));
            }
            true
        });
    }
    Ok(uf.into_partition())
}

pub fn is_congruence(alg: &FiniteAlgebra, p: &Partition) -> bool {
    if p.size() != alg.size() {
        return false;
    }
    (0..p.size())
        .filter(|&x| p.repr(x) != x)
        .all(|x| for_each_translate(alg, p.repr(x), x, |u, v| p.related(u, v)))
}

fn require_congruence(alg: &FiniteAlgebra, p: &Partition) -> Result<()> {
    if p.size() != alg.size() {
        return Err(Error::CarrierMismatch(p.size(), alg.size()));
    }
    if !is_congruence(alg, p) {
        return Err(Error::NotCongruence(p.to_string()));
    }
    Ok(())
}

pub fn meet(p: &Partition, q: &Partition) -> Result<Partition> {
    p.meet(q)
}

/// Join in `Con A`; for congruences this is the equivalence join.
pub fn join(alg: &FiniteAlgebra, p: &Partition, q: &Partition) -> Result<Partition> {
    require_congruence(alg, p)?;
    require_congruence(alg, q)?;
    p.join(q)
}

/// `A/α` and the natural map; blocks are numbered by least element.
pub fn quotient(alg: &FiniteAlgebra, alpha: &Partition) -> Result<(FiniteAlgebra, Homomorphism)> {
    require_congruence(alg, alpha)?;
    let idx = alpha.block_index();
    let reps: Vec<usize> = alpha.blocks().iter().map(|b| b[0]).collect();
    let m = reps.len();
    let ops = alg
        .operations()
        .iter()
        .map(|op| {
            let table = all_tuples(m, op.arity())
                .map(|args| {
                    let orig: Vec<usize> = args.iter().map(|&a| reps[a]).collect();
                    idx[op.apply(&orig)]
                })
                .collect();
            Operation::new(op.name(), op.arity(), table)
        })
        .collect();
    let q = FiniteAlgebra::new(format!("{}/({alpha})", alg.name()), m, ops)?;
    let f = Homomorphism::new(alg.clone(), q.clone(), idx)?;
    Ok((q, f))
}

pub fn kernel(f: &Homomorphism) -> Partition {
    f.kernel()
}

/// `Con A` with its order. Elements are sorted by descending block count,
/// then by canonical representative vector, so `Δ` is first and `∇` last.
#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    algebra: FiniteAlgebra,
    elements: Vec<Partition>,
    leq: Vec<Vec<bool>>,
}

pub fn con_all(alg: &FiniteAlgebra) -> Result<CongruenceLattice> {
    let n = alg.size();
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen_p = HashSet::new();
    for x in 0..n {
        for y in x + 1..n {
            let p = cg(alg, &[(x, y)])?;
            if seen_p.insert(p.clone()) {
                principals.push(p);
            }
        }
    }
    // All joins of subsets of principal congruences.
    let mut elements = vec![Partition::bottom(n)];
    let mut seen: HashSet<Partition> = elements.iter().cloned().collect();
    for p in &principals {
        let mut fresh = Vec::new();
        for e in &elements {
            let j = e.join(p)?;
            if seen.insert(j.clone()) {
                fresh.push(j);
            }
        }
        elements.extend(fresh);
    }
    elements.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
    let leq = elements
        .iter()
        .map(|a| elements.iter().map(|b| a.leq(b)).collect())
        .collect();
    let lat = CongruenceLattice {
        algebra: alg.clone(),
        elements,
        leq,
    };
    for i in 0..lat.len() {
        for j in 0..lat.len() {
            let m = lat.elements[i].meet(&lat.elements[j])?;
            if lat.index_of(&m).is_none() {
                return Err(Error::Verification(format!("Con A not closed under meet at {m}")));
            }
        }
    }
    Ok(lat)
}

impl CongruenceLattice {
    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.elements.iter().position(|e| e == p)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn bottom(&self) -> &Partition {
        &self.elements[0]
    }

    pub fn top(&self) -> &Partition {
        &self.elements[self.len() - 1]
    }

    pub fn meet_idx(&self, i: usize, j: usize) -> usize {
        let m = self.elements[i].meet(&self.elements[j]).expect("same carrier");
        self.index_of(&m).expect("closed under meet")
    }

    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        let m = self.elements[i].join(&self.elements[j]).expect("same carrier");
        self.index_of(&m).expect("closed under join")
    }

    /// Least member containing every pair, if any.
    pub fn least_containing(&self, pairs: &[(usize, usize)]) -> Option<&Partition> {
        // Members are sorted so that every proper refinement comes first.
        self.elements.iter().find(|p| pairs.iter().all(|&(a, b)| p.related(a, b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeLaws {
    pub modular: bool,
    pub distributive: bool,
}

/// Exhaustive modular and distributive law check over all triples.
pub fn lattice_law_check(l: &CongruenceLattice) -> LatticeLaws {
    let k = l.len();
    let meet: Vec<Vec<usize>> = (0..k).map(|i| (0..k).map(|j| l.meet_idx(i, j)).collect()).collect();
    let join: Vec<Vec<usize>> = (0..k).map(|i| (0..k).map(|j| l.join_idx(i, j)).collect()).collect();
    let mut laws = LatticeLaws {
        modular: true,
        distributive: true,
    };
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]] {
                    laws.distributive = false;
                }
                if l.leq(a, c) && join[a][meet[b][c]] != meet[join[a][b]][c] {
                    laws.modular = false;
                }
            }
        }
    }
    laws
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    /// All set partitions of `0..n` via restricted growth strings.
    fn all_partitions(n: usize) -> Vec<Partition> {
        fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if cur.len() == n {
                out.push(Partition::from_labels(cur));
                return;
            }
            let next = cur.iter().max().map_or(0, |m| m + 1);
            for l in 0..=next {
                cur.push(l);
                go(n, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, &mut Vec::new(), &mut out);
        out
    }

    /// Compatibility by the definition: all tuples of related pairs.
    fn compatible_brute(alg: &FiniteAlgebra, p: &Partition) -> bool {
        alg.is_compatible_relation(&p.to_relation())
    }

    fn cg_oracle(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Partition {
        all_partitions(alg.size())
            .into_iter()
            .filter(|p| compatible_brute(alg, p) && pairs.iter().all(|&(a, b)| p.related(a, b)))
            .min_by_key(|p| std::cmp::Reverse(p.num_blocks()))
            .unwrap()
    }

    #[test]
    fn cg_examples() {
        let z4 = catalog::cyclic_group(4);
        assert!(cg(&z4, &[]).unwrap().is_bottom());
        assert_eq!(all_partitions(4).len(), 15);
        assert_eq!(cg(&z4, &[(0, 2)]).unwrap().to_string(), "0 2|1 3");
        assert_eq!(cg_oracle(&z4, &[(0, 2)]).to_string(), "0 2|1 3");
        let s3 = catalog::symmetric_group_3();
        // (123) is element 3 in the lexicographic encoding
        assert_eq!(cg(&s3, &[(0, 3)]).unwrap().to_string(), "0 3 4|1 2 5");
        assert!(cg(&s3, &[(0, 1)]).unwrap().is_top());
        assert!(matches!(cg(&z4, &[(0, 9)]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn cg_matches_brute_force_on_small_algebras() {
        let algs = [
            catalog::cyclic_group(4),
            catalog::cyclic_ring(4),
            catalog::chain_lattice(2),
            catalog::square_lattice(),
            catalog::klein_group(),
            catalog::empty_signature(4),
        ];
        for alg in &algs {
            let n = alg.size();
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(cg(alg, &[(x, y)]).unwrap(), cg_oracle(alg, &[(x, y)]), "{}", alg.name());
                }
            }
            let all: Vec<Partition> =
                all_partitions(n).into_iter().filter(|p| compatible_brute(alg, p)).collect();
            let lat = con_all(alg).unwrap();
            assert_eq!(lat.len(), all.len(), "{}", alg.name());
            for p in &all {
                assert!(is_congruence(alg, p));
                assert!(lat.index_of(p).is_some());
            }
            for p in all_partitions(n) {
                assert_eq!(is_congruence(alg, &p), compatible_brute(alg, &p));
            }
        }
    }

    #[test]
    fn con_examples() {
        for p in [2, 3, 5, 7] {
            assert_eq!(con_all(&catalog::cyclic_group(p)).unwrap().len(), 2);
        }
        let lat = con_all(&catalog::cyclic_group(4)).unwrap();
        let names: Vec<String> = lat.elements().iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["0|1|2|3", "0 2|1 3", "0 1 2 3"]);
        assert!(lat.bottom().is_bottom() && lat.top().is_top());
        assert_eq!(con_all(&catalog::chain_lattice(2)).unwrap().len(), 2);
    }

    #[test]
    fn meet_join_quotient_kernel() {
        let z6 = catalog::cyclic_group(6);
        let m2 = cg(&z6, &[(0, 2)]).unwrap();
        let m3 = cg(&z6, &[(0, 3)]).unwrap();
        assert!(join(&z6, &m2, &m3).unwrap().is_top());
        assert!(meet(&m2, &m3).unwrap().is_bottom());
        assert_eq!(join(&z6, &m2, &Partition::bottom(6)).unwrap(), m2);
        assert_eq!(meet(&m2, &Partition::top(6)).unwrap(), m2);

        let z4 = catalog::cyclic_group(4);
        let (q, f) = quotient(&z4, &Partition::bottom(4)).unwrap();
        assert_eq!(q.operations(), z4.operations());
        assert!(kernel(&f).is_bottom());
        let (q, f) = quotient(&z4, &Partition::top(4)).unwrap();
        assert_eq!(q.size(), 1);
        assert!(kernel(&f).is_top());
        let (q, _) = quotient(&z4, &"0 2|1 3".parse().unwrap()).unwrap();
        assert_eq!(q.operations(), catalog::cyclic_group(2).operations());
        assert!(matches!(quotient(&z4, &"0 1|2 3".parse().unwrap()), Err(Error::NotCongruence(_))));
        assert!(matches!(quotient(&z4, &"0 3|1|2".parse().unwrap()), Err(Error::NotCongruence(_))));

        let z2 = catalog::cyclic_group(2);
        let aa = crate::algebra::a_alpha(&z2, &Partition::top(2)).unwrap();
        let k = kernel(&aa.pi);
        assert_eq!(k.num_blocks(), 2);
        assert!(k.blocks().iter().all(|b| b.len() == 2));
    }

    #[test]
    fn lattice_laws() {
        let laws = lattice_law_check(&con_all(&catalog::cyclic_group(8)).unwrap());
        assert!(laws.modular);
        assert!(lattice_law_check(&con_all(&catalog::chain_lattice(2)).unwrap()).distributive);
        let k = con_all(&catalog::klein_group()).unwrap();
        assert_eq!(k.len(), 5);
        let laws = lattice_law_check(&k);
        assert!(laws.modular && !laws.distributive);
    }

    #[test]
    fn least_containing_agrees_with_cg() {
        let s3 = catalog::symmetric_group_3();
        let lat = con_all(&s3).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(lat.least_containing(&[(x, y)]).unwrap(), &cg(&s3, &[(x, y)]).unwrap());
            }
        }
    }
}
