#![allow(dead_code)]

use unifcomm::catalog;
use unifcomm::group_topology::{FiniteGroup, Subset};
use unifcomm::terms::discover_day;
use unifcomm::{FiniteAlgebra, Limits, Partition, TermWitness};

/// Groups, rings, S₃ and the two small lattices.
pub fn route_catalog() -> Vec<FiniteAlgebra> {
    let mut v: Vec<FiniteAlgebra> = [2, 3, 4, 6, 8].into_iter().map(catalog::cyclic_group).collect();
    v.extend([2, 4, 6].into_iter().map(catalog::cyclic_ring));
    v.push(catalog::symmetric_group_3());
    v.push(catalog::chain_lattice(2));
    v.push(catalog::square_lattice());
    v
}

pub fn group_catalog() -> Vec<FiniteAlgebra> {
    let mut v: Vec<FiniteAlgebra> = [2, 3, 4, 6, 8].into_iter().map(catalog::cyclic_group).collect();
    v.push(catalog::klein_group());
    v.push(catalog::symmetric_group_3());
    v.push(catalog::dihedral_group_4());
    v
}

pub fn lattice_catalog() -> Vec<FiniteAlgebra> {
    vec![
        catalog::chain_lattice(2),
        catalog::chain_lattice(3),
        catalog::chain_lattice(4),
        catalog::square_lattice(),
    ]
}

pub fn abelian_catalog() -> Vec<FiniteAlgebra> {
    let mut v: Vec<FiniteAlgebra> = [1, 2, 3, 4, 5, 6, 8].into_iter().map(catalog::cyclic_group).collect();
    v.push(catalog::klein_group());
    v
}

pub fn day(alg: &FiniteAlgebra) -> TermWitness {
    discover_day(alg, &Limits::default())
        .expect("search within budget")
        .found()
        .unwrap_or_else(|| panic!("no Day terms for {}", alg.name()))
}

pub fn normal_subgroups(g: &FiniteGroup) -> Vec<Subset> {
    g.subgroups().into_iter().filter(|h| g.is_normal(h)).collect()
}

/// `x ≡ y (mod d)` on ℤ_n.
pub fn ideal_congruence(n: usize, d: usize) -> Partition {
    let labels: Vec<usize> = (0..n).map(|x| x % d).collect();
    Partition::from_labels(&labels)
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All set partitions of `0..n` by restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Partition> {
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
