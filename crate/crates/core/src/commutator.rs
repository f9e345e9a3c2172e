//! Term-condition centralization and the commutator of congruences, by four
//! independent routes:
//!
//! * `TermCondition` — least δ with C(α,β;δ), as a finite fixpoint;
//! * `WeakTermCondition` — Cg of the `u21,u22` pairs of matrices with `u11 = u12`;
//! * `Xm` — Cg of the pairs extracted from matrices by Day terms;
//! * `Delta` — via the congruence Δ_{α,β} on A(α).
//!
//! The last three agree with the first on algebras in congruence-modular
//! varieties; `Delta` checks its own projection and fails loudly otherwise.

use std::ops::ControlFlow;

use crate::algebra::{a_alpha_with, checked_pow, AAlpha, FiniteAlgebra, Homomorphism};
use crate::closure::close_tuples;
use crate::congruence::{self, cg, cg_from, con_all, CongruenceLattice};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rel::BitRelation;
use crate::terms::{TermWitness, WitnessKind};
use crate::Limits;

/// A 2×2 matrix `(u11 u12; u21 u22)` stored as `[u11, u12, u21, u22]`.
pub type Matrix = [usize; 4];

/// M(α,β): the subalgebra of A⁴ generated by the α-rows `(a,a,a′,a′)` and
/// β-columns `(b,b′,b,b′)`.
#[derive(Clone, Debug)]
pub struct MatrixSubalgebra {
    base_algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    /// Sorted lexicographically.
    elements: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralizationReport {
    pub holds: bool,
    /// Lexicographically least matrix violating the implication.
    pub witness: Option<Matrix>,
}

fn require_congruences(alg: &FiniteAlgebra, ps: &[&Partition]) -> Result<()> {
    for p in ps {
        if p.size() != alg.size() {
            return Err(Error::CarrierMismatch(p.size(), alg.size()));
        }
        if !congruence::is_congruence(alg, p) {
            return Err(Error::NotCongruence(p.to_string()));
        }
    }
    Ok(())
}

pub fn m_matrices(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<MatrixSubalgebra> {
    m_matrices_with(alg, alpha, beta, &Limits::default())
}

pub fn m_matrices_with(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    limits: &Limits,
) -> Result<MatrixSubalgebra> {
    require_congruences(alg, &[alpha, beta])?;
    let n = alg.size();
    if checked_pow(n, 4).is_none_or(|m| m > limits.max_power) {
        return Err(Error::CapExceeded {
            what: "A^4",
            needed: (n as u128).pow(4),
            cap: limits.max_power as u128,
        });
    }
    let mut gens = Vec::new();
    for a in 0..n {
        for a2 in 0..n {
            if alpha.related(a, a2) {
                gens.push(vec![a, a, a2, a2]);
            }
            if beta.related(a, a2) {
                gens.push(vec![a, a2, a, a2]);
            }
        }
    }
    let cl = close_tuples(alg, 4, &gens, usize::MAX, |_, _| ControlFlow::Continue(()))?;
    let mut elements: Vec<Matrix> = cl.iter().map(|t| [t[0], t[1], t[2], t[3]]).collect();
    elements.sort_unstable();
    Ok(MatrixSubalgebra {
        base_algebra: alg.clone(),
        alpha: alpha.clone(),
        beta: beta.clone(),
        elements,
    })
}

impl MatrixSubalgebra {
    pub fn base_algebra(&self) -> &FiniteAlgebra {
        &self.base_algebra
    }

    pub fn alpha(&self) -> &Partition {
        &self.alpha
    }

    pub fn beta(&self) -> &Partition {
        &self.beta
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    /// C(α,β;δ): `u11 δ u12` implies `u21 δ u22`.
    pub fn centralizes(&self, delta: &Partition) -> CentralizationReport {
        let witness = self
            .elements
            .iter()
            .find(|u| delta.related(u[0], u[1]) && !delta.related(u[2], u[3]))
            .copied();
        CentralizationReport {
            holds: witness.is_none(),
            witness,
        }
    }

    /// C̃(α,β;δ): `u11 = u12` implies `u21 δ u22`.
    pub fn weak_centralizes(&self, delta: &Partition) -> CentralizationReport {
        let witness = self.elements.iter().find(|u| u[0] == u[1] && !delta.related(u[2], u[3])).copied();
        CentralizationReport {
            holds: witness.is_none(),
            witness,
        }
    }

    /// Least δ with C(α,β;δ).
    pub fn c_commutator(&self) -> Result<Partition> {
        let alg = &self.base_algebra;
        let mut delta = Partition::bottom(alg.size());
        loop {
            let pairs: Vec<(usize, usize)> = self
                .elements
                .iter()
                .filter(|u| delta.related(u[0], u[1]))
                .map(|u| (u[2], u[3]))
                .collect();
            let next = cg_from(alg, &delta, &pairs)?;
            if next == delta {
                return Ok(delta);
            }
            delta = next;
        }
    }

    pub fn weak_c_commutator(&self) -> Result<Partition> {
        let pairs: Vec<(usize, usize)> =
            self.elements.iter().filter(|u| u[0] == u[1]).map(|u| (u[2], u[3])).collect();
        cg(&self.base_algebra, &pairs)
    }

    /// Pairs `(m_i(a,b,d,c), m_i(a,a,c,c))` over the chain and all matrices
    /// `(a b; c d)`.
    pub fn x_m_extract(&self, witness: &TermWitness) -> Result<BitRelation> {
        let alg = &self.base_algebra;
        if witness.kind() != WitnessKind::Day {
            return Err(Error::Verification("x_m needs a Day chain".into()));
        }
        witness.reverify(alg)?;
        let n = alg.size();
        let at = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let mut r = BitRelation::empty(n);
        for m in witness.chain() {
            for &[a, b, c, d] in &self.elements {
                r.insert(m.table[at(a, b, d, c)], m.table[at(a, a, c, c)]);
            }
        }
        Ok(r)
    }
}

pub fn centralizes(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    delta: &Partition,
) -> Result<CentralizationReport> {
    require_congruences(alg, &[delta])?;
    Ok(m_matrices(alg, alpha, beta)?.centralizes(delta))
}

pub fn weak_centralizes(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    delta: &Partition,
) -> Result<CentralizationReport> {
    require_congruences(alg, &[delta])?;
    Ok(m_matrices(alg, alpha, beta)?.weak_centralizes(delta))
}

pub fn c_commutator(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<Partition> {
    m_matrices(alg, alpha, beta)?.c_commutator()
}

pub fn weak_c_commutator(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<Partition> {
    m_matrices(alg, alpha, beta)?.weak_c_commutator()
}

pub fn x_m_extract(witness: &TermWitness, m: &MatrixSubalgebra) -> Result<BitRelation> {
    m.x_m_extract(witness)
}

pub fn commutator_via_xm(
    alg: &FiniteAlgebra,
    witness: &TermWitness,
    alpha: &Partition,
    beta: &Partition,
) -> Result<Partition> {
    let x = m_matrices(alg, alpha, beta)?.x_m_extract(witness)?;
    let pairs: Vec<(usize, usize)> = x.pairs().collect();
    cg(alg, &pairs)
}

/// Δ_{α,β}: the congruence of A(α) generated by `((a,a),(b,b))`, `a β b`.
pub fn delta_alpha_beta(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<(AAlpha, Partition)> {
    delta_alpha_beta_with(alg, alpha, beta, &Limits::default())
}

pub fn delta_alpha_beta_with(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    limits: &Limits,
) -> Result<(AAlpha, Partition)> {
    require_congruences(alg, &[beta])?;
    let aa = a_alpha_with(alg, alpha, limits)?;
    let n = alg.size();
    let diag: Vec<usize> = (0..n).map(|x| aa.delta.apply(x)).collect();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if beta.related(a, b) {
                pairs.push((diag[a], diag[b]));
            }
        }
    }
    let d = cg(&aa.algebra, &pairs)?;
    Ok((aa, d))
}

/// `[α,β]` read off `(Δ_{α,β} ∧ ker π) ∨ ker π′` through π′.
pub fn commutator_via_delta(alg: &FiniteAlgebra, alpha: &Partition, beta: &Partition) -> Result<Partition> {
    let (aa, d) = delta_alpha_beta(alg, alpha, beta)?;
    let ker_pi = aa.pi.kernel();
    let ker_pi2 = aa.pi_prime.kernel();
    let kappa = d.meet(&ker_pi)?.join(&ker_pi2)?;
    if !ker_pi2.leq(&kappa) {
        return Err(Error::Verification("kappa does not contain ker pi'".into()));
    }
    let n = alg.size();
    let labels: Vec<usize> = (0..n).map(|x| kappa.repr(aa.delta.apply(x))).collect();
    let result = Partition::from_labels(&labels);
    if result.preimage(aa.pi_prime.map()) != kappa {
        return Err(Error::Verification("projection through pi' is not well defined".into()));
    }
    if !congruence::is_congruence(alg, &result) {
        return Err(Error::Verification(format!(
            "projected relation {result} is not a congruence; the algebra is likely not congruence modular"
        )));
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    TermCondition,
    WeakTermCondition,
    Xm,
    Delta,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::TermCondition, Route::WeakTermCondition, Route::Xm, Route::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Route::TermCondition => "tc",
            Route::WeakTermCondition => "weak",
            Route::Xm => "xm",
            Route::Delta => "delta",
        }
    }
}

/// `day` is required for [`Route::Xm`] and ignored otherwise.
pub fn commutator(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    route: Route,
    day: Option<&TermWitness>,
) -> Result<Partition> {
    match route {
        Route::TermCondition => c_commutator(alg, alpha, beta),
        Route::WeakTermCondition => weak_c_commutator(alg, alpha, beta),
        Route::Xm => {
            let w = day.ok_or_else(|| Error::Invalid("the xm route needs Day terms".into()))?;
            commutator_via_xm(alg, w, alpha, beta)
        }
        Route::Delta => commutator_via_delta(alg, alpha, beta),
    }
}

/// Truth values of X_m(α,β) ⊆ δ, X_m(β,α) ⊆ δ, C(α,β;δ), C(β,α;δ),
/// C̃(α,β;δ), C̃(β,α;δ), in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub values: [bool; 6],
}

impl EquivalenceReport {
    pub const LABELS: [&'static str; 6] = [
        "X_m(a,b) <= d",
        "X_m(b,a) <= d",
        "C(a,b;d)",
        "C(b,a;d)",
        "weak C(a,b;d)",
        "weak C(b,a;d)",
    ];

    pub fn consistent(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

pub fn equivalence_suite(
    alg: &FiniteAlgebra,
    witness: &TermWitness,
    alpha: &Partition,
    beta: &Partition,
    delta: &Partition,
) -> Result<EquivalenceReport> {
    require_congruences(alg, &[delta])?;
    let mab = m_matrices(alg, alpha, beta)?;
    let mba = m_matrices(alg, beta, alpha)?;
    let inside = |x: BitRelation| x.pairs().all(|(a, b)| delta.related(a, b));
    Ok(EquivalenceReport {
        values: [
            inside(mab.x_m_extract(witness)?),
            inside(mba.x_m_extract(witness)?),
            mab.centralizes(delta).holds,
            mba.centralizes(delta).holds,
            mab.weak_centralizes(delta).holds,
            mba.weak_centralizes(delta).holds,
        ],
    })
}

/// Commutator of every ordered pair of congruences, by the term condition.
#[derive(Debug, Clone)]
pub struct CommutatorTable {
    pub lattice: CongruenceLattice,
    /// `table[i][j]` is the lattice index of `[θ_i, θ_j]`.
    pub table: Vec<Vec<usize>>,
}

impl CommutatorTable {
    pub fn new(alg: &FiniteAlgebra) -> Result<Self> {
        let lattice = con_all(alg)?;
        let k = lattice.len();
        let mut table = vec![vec![0; k]; k];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let c = c_commutator(alg, lattice.get(i), lattice.get(j))?;
                *slot = lattice
                    .index_of(&c)
                    .ok_or_else(|| Error::Verification(format!("commutator {c} is not in Con A")))?;
            }
        }
        Ok(CommutatorTable { lattice, table })
    }

    pub fn get(&self, alpha: &Partition, beta: &Partition) -> Option<&Partition> {
        let i = self.lattice.index_of(alpha)?;
        let j = self.lattice.index_of(beta)?;
        Some(self.lattice.get(self.table[i][j]))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Symmetry, monotonicity, `[α,β] ≤ α∧β`, additivity over permuting
/// congruences, agreement with the x_m route, and for each `hom` into `alg`
/// the preimage inequality `[f⁻¹α, f⁻¹β] ≤ f⁻¹[α,β]`.
pub fn property_suite(alg: &FiniteAlgebra, witness: &TermWitness, homs: &[Homomorphism]) -> Result<PropertyReport> {
    let t = CommutatorTable::new(alg)?;
    let l = &t.lattice;
    let k = l.len();
    let mut rep = PropertyReport::default();
    let name = |i: usize| l.get(i).to_string();
    for i in 0..k {
        for j in 0..k {
            let c = t.table[i][j];
            rep.check(c == t.table[j][i], || format!("symmetry fails at ({}, {})", name(i), name(j)));
            rep.check(l.leq(c, l.meet_idx(i, j)), || {
                format!("[{}, {}] is not below the meet", name(i), name(j))
            });
            let xm = commutator_via_xm(alg, witness, l.get(i), l.get(j))?;
            rep.check(&xm == l.get(c), || format!("x_m route disagrees at ({}, {})", name(i), name(j)));
            for i2 in 0..k {
                if l.leq(i, i2) {
                    rep.check(l.leq(c, t.table[i2][j]), || {
                        format!("monotonicity fails: {} <= {} with {}", name(i), name(i2), name(j))
                    });
                }
                if l.get(i).permutes_with(l.get(i2)) {
                    let lhs = t.table[l.join_idx(i, i2)][j];
                    let rhs = l.join_idx(c, t.table[i2][j]);
                    rep.check(lhs == rhs, || {
                        format!("additivity fails for {} v {} against {}", name(i), name(i2), name(j))
                    });
                }
            }
        }
    }
    for f in homs {
        if f.target() != alg {
            return Err(Error::Invalid("homomorphism must map into the suite's algebra".into()));
        }
        let src = f.source();
        for i in 0..k {
            for j in 0..k {
                let pa = l.get(i).preimage(f.map());
                let pb = l.get(j).preimage(f.map());
                let lhs = c_commutator(src, &pa, &pb)?;
                let rhs = l.get(t.table[i][j]).preimage(f.map());
                rep.check(lhs.leq(&rhs), || {
                    format!("preimage inequality fails along {} at ({}, {})", src.name(), name(i), name(j))
                });
            }
        }
    }
    Ok(rep)
}
