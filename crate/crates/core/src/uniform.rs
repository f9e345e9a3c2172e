//! Congruential uniformities on finite algebras: filters in `Con A`
//! presented by finite bases of congruences, their commutator, and the
//! compatible closure `Ug` of a relation filter.

use crate::algebra::FiniteAlgebra;
use crate::commutator::c_commutator;
use crate::congruence::{cg, is_congruence};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rel::{BitRelation, RelationFilter};

#[derive(Clone, Debug)]
pub struct CongruenceFilter {
    algebra: FiniteAlgebra,
    base: Vec<Partition>,
}

impl CongruenceFilter {
    pub fn new(algebra: &FiniteAlgebra, base: Vec<Partition>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::Invalid("a filter base must be nonempty".into()));
        }
        for p in &base {
            if p.size() != algebra.size() {
                return Err(Error::CarrierMismatch(p.size(), algebra.size()));
            }
            if !is_congruence(algebra, p) {
                return Err(Error::NotCongruence(p.to_string()));
            }
        }
        Ok(CongruenceFilter {
            algebra: algebra.clone(),
            base,
        })
    }

    pub fn principal(algebra: &FiniteAlgebra, p: Partition) -> Result<Self> {
        Self::new(algebra, vec![p])
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn base(&self) -> &[Partition] {
        &self.base
    }

    /// The meet of the base; the filter is `Fg{generator}`.
    pub fn generator(&self) -> Partition {
        let mut it = self.base.iter();
        let first = it.next().expect("nonempty base").clone();
        it.fold(first, |acc, p| acc.meet(p).expect("same carrier"))
    }

    /// Reverse inclusion of member sets.
    pub fn leq(&self, other: &Self) -> bool {
        let g = self.generator();
        other.base.iter().all(|b| g.leq(b))
    }

    pub fn equivalent(&self, other: &Self) -> bool {
        self.leq(other) && other.leq(self)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::Invalid("filters live on different algebras".into()));
        }
        Ok(())
    }

    fn pairwise(&self, other: &Self, f: impl Fn(&Partition, &Partition) -> Result<Partition>) -> Result<Self> {
        self.check_same(other)?;
        let mut base = Vec::new();
        for a in &self.base {
            for b in &other.base {
                let p = f(a, b)?;
                if !base.contains(&p) {
                    base.push(p);
                }
            }
        }
        Ok(CongruenceFilter {
            algebra: self.algebra.clone(),
            base,
        })
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.pairwise(other, |a, b| a.meet(b))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.pairwise(other, |a, b| a.join(b))
    }

    /// `Ug F` as a relation filter: the base relations themselves.
    pub fn to_relation_filter(&self) -> RelationFilter {
        RelationFilter::new(self.algebra.size(), self.base.iter().map(Partition::to_relation).collect())
            .expect("nonempty base of matching size")
    }
}

/// `[F, F′]` with base `{[α,β] : α ∈ base F, β ∈ base F′}`.
pub fn filter_commutator(f: &CongruenceFilter, g: &CongruenceFilter) -> Result<CongruenceFilter> {
    f.pairwise(g, |a, b| c_commutator(&f.algebra, a, b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuCommuReport {
    /// `[⋀ base F, ⋀ base F′]`, generating `[Ug F, Ug F′]`.
    pub left: Partition,
    /// `⋀ [α,β]` over base pairs, generating `Ug [F, F′]`.
    pub right: Partition,
    pub holds: bool,
    pub strict: bool,
}

/// `[Ug F, Ug F′] ≤ Ug [F, F′]`, both sides being principal here.
pub fn cucommu_inequality_check(f: &CongruenceFilter, g: &CongruenceFilter) -> Result<CuCommuReport> {
    f.check_same(g)?;
    let left = c_commutator(&f.algebra, &f.generator(), &g.generator())?;
    let right = filter_commutator(f, g)?.generator();
    let holds = left.leq(&right);
    Ok(CuCommuReport {
        strict: holds && left != right,
        left,
        right,
        holds,
    })
}

/// Least compatible uniformity above `f`: `Fg{Cg(⋂ base)}`.
pub fn ug_closure(alg: &FiniteAlgebra, f: &RelationFilter) -> Result<RelationFilter> {
    if f.carrier_size() != alg.size() {
        return Err(Error::CarrierMismatch(f.carrier_size(), alg.size()));
    }
    let pairs: Vec<(usize, usize)> = f.base_meet().pairs().collect();
    Ok(RelationFilter::principal(cg(alg, &pairs)?.to_relation()))
}

/// Is `f` a compatible uniformity? On a finite carrier this means the
/// uniformity axioms plus compatibility of the base meet.
pub fn is_compatible_uniformity(alg: &FiniteAlgebra, f: &RelationFilter) -> bool {
    f.carrier_size() == alg.size() && f.check_axioms().is_uniformity() && alg.is_compatible_relation(&f.base_meet())
}

/// `Ug{ρ}` for a single relation.
pub fn ug_of_relation(alg: &FiniteAlgebra, rho: &BitRelation) -> Result<RelationFilter> {
    ug_closure(alg, &RelationFilter::principal(rho.clone()))
}
