//! Small named algebras used throughout the tests and the command line.

use crate::algebra::{all_tuples, FiniteAlgebra, Operation};

type OpSpec<'a> = (&'a str, usize, &'a dyn Fn(&[usize]) -> usize);

fn build(name: &str, n: usize, ops: Vec<OpSpec<'_>>) -> FiniteAlgebra {
    let ops = ops
        .into_iter()
        .map(|(op, arity, f)| Operation::new(op, arity, all_tuples(n, arity).map(|t| f(&t)).collect()))
        .collect();
    FiniteAlgebra::new(name, n, ops).expect("catalog algebras are well formed")
}

/// ℤ_n as a group: `add/2`, `neg/1`, `zero/0`.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    build(
        &format!("z{n}"),
        n,
        vec![
            ("add", 2, &|t| (t[0] + t[1]) % n),
            ("neg", 1, &|t| (n - t[0]) % n),
            ("zero", 0, &|_| 0),
        ],
    )
}

/// ℤ_n as a ring with unit: group operations plus `mul/2`, `one/0`.
pub fn cyclic_ring(n: usize) -> FiniteAlgebra {
    build(
        &format!("z{n}ring"),
        n,
        vec![
            ("add", 2, &|t| (t[0] + t[1]) % n),
            ("neg", 1, &|t| (n - t[0]) % n),
            ("zero", 0, &|_| 0),
            ("mul", 2, &|t| (t[0] * t[1]) % n),
            ("one", 0, &|_| 1 % n),
        ],
    )
}

/// ℤ₂ × ℤ₂ as a group; element `i` is the bit pair of `i`.
pub fn klein_group() -> FiniteAlgebra {
    build(
        "klein",
        4,
        vec![("add", 2, &|t| t[0] ^ t[1]), ("neg", 1, &|t| t[0]), ("zero", 0, &|_| 0)],
    )
}

/// Closure of `gens` under composition, as a group `mul/2`, `inv/1`, `e/0`
/// on permutations sorted lexicographically (so the identity is 0).
/// `(σ·τ)(i) = σ(τ(i))`.
pub fn permutation_group(name: &str, degree: usize, gens: &[Vec<usize>]) -> FiniteAlgebra {
    let id: Vec<usize> = (0..degree).collect();
    let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { t.iter().map(|&i| s[i]).collect() };
    let mut elems = vec![id.clone()];
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(&x, g);
            if !elems.contains(&y) {
                elems.push(y.clone());
                frontier.push(y);
            }
        }
    }
    elems.sort();
    let index = |p: &[usize]| elems.iter().position(|e| e == p).expect("closed");
    let n = elems.len();
    let mul = |t: &[usize]| index(&compose(&elems[t[0]], &elems[t[1]]));
    let inv = |t: &[usize]| {
        let p = &elems[t[0]];
        let mut q = vec![0; degree];
        for (i, &v) in p.iter().enumerate() {
            q[v] = i;
        }
        index(&q)
    };
    build(name, n, vec![("mul", 2, &mul), ("inv", 1, &inv), ("e", 0, &|_| 0)])
}

/// S₃: element `i` is the `i`-th permutation of `{0,1,2}` in lexicographic
/// order, so 0 = id, 1 = (1 2), 2 = (0 1), 3 = (0 1 2), 4 = (0 2 1), 5 = (0 2).
pub fn symmetric_group_3() -> FiniteAlgebra {
    permutation_group("s3", 3, &[vec![1, 0, 2], vec![1, 2, 0]])
}

/// The symmetries of a square (order 8) acting on its vertices.
pub fn dihedral_group_4() -> FiniteAlgebra {
    permutation_group("d4", 4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])
}

/// The chain `0 < 1 < ... < n-1` with `meet`, `join`.
pub fn chain_lattice(n: usize) -> FiniteAlgebra {
    build(
        &format!("chain{n}"),
        n,
        vec![("meet", 2, &|t| t[0].min(t[1])), ("join", 2, &|t| t[0].max(t[1]))],
    )
}

/// The four-element Boolean lattice 2×2; element `i` is the bit pair of `i`.
pub fn square_lattice() -> FiniteAlgebra {
    build(
        "square",
        4,
        vec![("meet", 2, &|t| t[0] & t[1]), ("join", 2, &|t| t[0] | t[1])],
    )
}

/// A bare `n`-element set.
pub fn empty_signature(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(format!("set{n}"), n, Vec::new()).expect("nonempty")
}

/// The one-element group.
pub fn trivial() -> FiniteAlgebra {
    cyclic_group(1).with_name("trivial")
}

/// Looks up a catalog algebra by the names used above, e.g. `z4`,
/// `z6ring`, `s3`, `d4`, `klein`, `chain2`, `square`, `set2`.
pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    let num = |prefix: &str, suffix: &str| -> Option<usize> {
        name.strip_prefix(prefix)?.strip_suffix(suffix)?.parse().ok().filter(|&n| n >= 1)
    };
    match name {
        "s3" => Some(symmetric_group_3()),
        "d4" => Some(dihedral_group_4()),
        "klein" => Some(klein_group()),
        "square" => Some(square_lattice()),
        "trivial" => Some(trivial()),
        _ => num("z", "ring")
            .map(cyclic_ring)
            .or_else(|| num("z", "").map(cyclic_group))
            .or_else(|| num("chain", "").map(chain_lattice))
            .or_else(|| num("set", "").map(empty_signature)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_encoding() {
        let s3 = symmetric_group_3();
        assert_eq!(s3.size(), 6);
        let mul = s3.operation("mul").unwrap();
        assert_eq!(mul.apply(&[0, 4]), 4);
        assert_eq!(mul.apply(&[3, 4]), 0);
        assert_eq!(mul.apply(&[3, 3]), 4);
        assert_ne!(mul.apply(&[1, 2]), mul.apply(&[2, 1]));
    }

    #[test]
    fn lookup() {
        assert_eq!(by_name("z4").unwrap(), cyclic_group(4));
        assert_eq!(by_name("z6ring").unwrap(), cyclic_ring(6));
        assert_eq!(by_name("chain2").unwrap(), chain_lattice(2));
        assert_eq!(dihedral_group_4().size(), 8);
        assert!(by_name("z0").is_none());
        assert!(by_name("nope").is_none());
    }
}
