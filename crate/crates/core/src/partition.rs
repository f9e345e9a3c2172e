//! Equivalence relations in canonical union-find form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rel::BitRelation;

/// Union-find with path halving. Roots are arbitrary until
/// [`UnionFind::into_partition`] canonicalizes them.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn from_partition(p: &Partition) -> Self {
        UnionFind {
            parent: p.repr.clone(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when two distinct classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller root so canonicalization is cheap
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let repr = (0..n).map(|i| self.find(i)).collect();
        Partition { repr }
    }
}

/// An equivalence relation on `{0..n-1}`; `repr[i]` is the least element of
/// the block of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    repr: Vec<usize>,
}

impl Partition {
    /// The identity relation Δ.
    pub fn bottom(n: usize) -> Self {
        Partition {
            repr: (0..n).collect(),
        }
    }

    /// The full relation ∇.
    pub fn top(n: usize) -> Self {
        Partition { repr: vec![0; n] }
    }

    /// Kernel of a labelling: `i ~ j` iff `labels[i] == labels[j]`.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut first = std::collections::HashMap::new();
        let repr = labels
            .iter()
            .enumerate()
            .map(|(i, l)| *first.entry(l).or_insert(i))
            .collect();
        Partition { repr }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut uf = UnionFind::new(n);
        for b in blocks {
            for &x in b {
                if x >= n {
                    return Err(Error::OutOfRange { elem: x, size: n });
                }
                if seen[x] {
                    return Err(Error::Invalid(format!("element {x} appears twice")));
                }
                seen[x] = true;
                uf.union(b[0], x);
            }
        }
        if let Some(miss) = seen.iter().position(|s| !s) {
            return Err(Error::Invalid(format!("element {miss} is not covered")));
        }
        Ok(uf.into_partition())
    }

    /// Least equivalence relation containing `r`.
    pub fn equivalence_closure(r: &BitRelation) -> Self {
        let mut uf = UnionFind::new(r.carrier_size());
        for (i, j) in r.pairs() {
            uf.union(i, j);
        }
        uf.into_partition()
    }

    pub fn size(&self) -> usize {
        self.repr.len()
    }

    pub fn repr(&self, i: usize) -> usize {
        self.repr[i]
    }

    pub fn reprs(&self) -> &[usize] {
        &self.repr
    }

    #[inline]
    pub fn related(&self, i: usize, j: usize) -> bool {
        self.repr[i] == self.repr[j]
    }

    pub fn num_blocks(&self) -> usize {
        self.repr.iter().enumerate().filter(|(i, r)| *i == **r).count()
    }

    /// Blocks sorted by least element, elements ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.size()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, &r) in self.repr.iter().enumerate() {
            if index[r] == usize::MAX {
                index[r] = out.len();
                out.push(Vec::new());
            }
            out[index[r]].push(i);
        }
        out
    }

    /// Block number of each element, numbering blocks by least element.
    pub fn block_index(&self) -> Vec<usize> {
        let mut index = vec![usize::MAX; self.size()];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.size());
        for &r in &self.repr {
            if index[r] == usize::MAX {
                index[r] = next;
                next += 1;
            }
            out.push(index[r]);
        }
        out
    }

    pub fn is_bottom(&self) -> bool {
        self.repr.iter().enumerate().all(|(i, &r)| i == r)
    }

    pub fn is_top(&self) -> bool {
        self.repr.iter().all(|&r| r == 0)
    }

    /// `self ⊆ other` as relations.
    pub fn leq(&self, other: &Self) -> bool {
        self.size() == other.size() && (0..self.size()).all(|i| other.related(i, self.repr[i]))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::CarrierMismatch(self.size(), other.size()));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let labels: Vec<(usize, usize)> = self.repr.iter().copied().zip(other.repr.iter().copied()).collect();
        Ok(Self::from_labels(&labels))
    }

    /// Join in the lattice of equivalence relations (transitive closure of
    /// the union).
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut uf = UnionFind::from_partition(self);
        for (i, &r) in other.repr.iter().enumerate() {
            uf.union(i, r);
        }
        Ok(uf.into_partition())
    }

    pub fn to_relation(&self) -> BitRelation {
        let n = self.size();
        let mut r = BitRelation::empty(n);
        for b in self.blocks() {
            for &i in &b {
                for &j in &b {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    /// `{(i,j) : map(i) ~ map(j)}` for `self` on the codomain of `map`.
    pub fn preimage(&self, map: &[usize]) -> Self {
        let labels: Vec<usize> = map.iter().map(|&x| self.repr[x]).collect();
        Self::from_labels(&labels)
    }

    /// Do `self ∘ other` and `other ∘ self` coincide?
    pub fn permutes_with(&self, other: &Self) -> bool {
        let (a, b) = (self.to_relation(), other.to_relation());
        a.compose(&b).ok() == b.compose(&a).ok()
    }

    /// Parses a block literal and checks it lives on `n` elements.
    pub fn parse_sized(s: &str, n: usize) -> Result<Self> {
        let p: Partition = s.parse()?;
        if p.size() != n {
            return Err(Error::CarrierMismatch(n, p.size()));
        }
        Ok(p)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self.blocks();
        for (k, b) in blocks.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            for (m, x) in b.iter().enumerate() {
                if m > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// Parses `b0|b1|...` where each block is a whitespace-separated list of
/// indices; the blocks must cover `0..n-1` exactly once.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut col = 0;
        for part in s.split('|') {
            let mut block = Vec::new();
            let mut c = col;
            for tok in part.split_whitespace() {
                let at = part.find(tok).unwrap_or(0) + c;
                let x: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(1, at + 1, format!("`{tok}` is not an element index")))?;
                block.push(x);
            }
            c += part.len() + 1;
            if block.is_empty() {
                return Err(Error::parse(1, col + 1, "empty block"));
            }
            blocks.push(block);
            col = c;
        }
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, &blocks).map_err(|e| Error::parse(1, 1, e.to_string()))
    }
}
