//! Clones of term operations and searches for Mal'tsev, Day, and Jónsson
//! witnesses.
//!
//! All identities are checked on the given finite algebra. Since identities
//! holding in an algebra hold throughout the variety it generates, a verified
//! chain is a valid chain for that variety.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use crate::algebra::{checked_pow, FiniteAlgebra, Term};
use crate::closure::{close_tuples, Origin, TupleClosure};
use crate::error::{Error, Result};
use crate::Limits;

/// A `k`-ary term operation with a term producing it.
#[derive(Clone, PartialEq, Eq)]
pub struct CloneElement {
    pub arity: usize,
    /// Values on all `k`-tuples in lexicographic order.
    pub table: Vec<usize>,
    pub witness: Term,
}

impl CloneElement {
    pub fn from_term(alg: &FiniteAlgebra, arity: usize, witness: Term) -> Result<Self> {
        let table = witness.table(alg, arity)?;
        Ok(CloneElement { arity, table, witness })
    }

    /// Does the witness still evaluate to the stored table?
    pub fn reverify(&self, alg: &FiniteAlgebra) -> bool {
        self.witness.table(alg, self.arity).is_ok_and(|t| t == self.table)
    }
}

impl fmt::Debug for CloneElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.witness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Maltsev,
    Day,
    Jonsson,
}

/// A chain of term operations whose identities were verified exhaustively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermWitness {
    kind: WitnessKind,
    chain: Vec<CloneElement>,
}

impl TermWitness {
    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn chain(&self) -> &[CloneElement] {
        &self.chain
    }

    pub fn terms(&self) -> Vec<&Term> {
        self.chain.iter().map(|c| &c.witness).collect()
    }

    fn new(alg: &FiniteAlgebra, kind: WitnessKind, chain: Vec<CloneElement>) -> Result<Self> {
        let w = TermWitness { kind, chain };
        w.reverify(alg)?;
        Ok(w)
    }

    pub fn maltsev(alg: &FiniteAlgebra, p: Term) -> Result<Self> {
        Self::new(alg, WitnessKind::Maltsev, vec![CloneElement::from_term(alg, 3, p)?])
    }

    pub fn day(alg: &FiniteAlgebra, terms: Vec<Term>) -> Result<Self> {
        let chain = terms
            .into_iter()
            .map(|t| CloneElement::from_term(alg, 4, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alg, WitnessKind::Day, chain)
    }

    pub fn jonsson(alg: &FiniteAlgebra, terms: Vec<Term>) -> Result<Self> {
        let chain = terms
            .into_iter()
            .map(|t| CloneElement::from_term(alg, 3, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alg, WitnessKind::Jonsson, chain)
    }

    /// Re-evaluates every witness term and re-checks the identities.
    pub fn reverify(&self, alg: &FiniteAlgebra) -> Result<()> {
        for c in &self.chain {
            if !c.reverify(alg) {
                return Err(Error::Verification(format!("term {} does not match its table", c.witness)));
            }
        }
        let tables: Vec<&[usize]> = self.chain.iter().map(|c| c.table.as_slice()).collect();
        let n = alg.size();
        let res = match self.kind {
            WitnessKind::Maltsev => {
                if tables.len() == 1 && is_maltsev(n, tables[0]) {
                    Ok(())
                } else {
                    Err("Mal'tsev identities fail".to_string())
                }
            }
            WitnessKind::Day => check_day(n, &tables),
            WitnessKind::Jonsson => check_jonsson(n, &tables),
        };
        res.map_err(Error::Verification)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// `exhaustive` means the whole search space was explored, so no
    /// witness exists at any length.
    NotFound { exhaustive: bool },
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

#[inline]
fn idx(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

pub fn is_maltsev(n: usize, t: &[usize]) -> bool {
    (0..n).all(|x| (0..n).all(|y| t[idx(n, &[x, x, y])] == y && t[idx(n, &[x, y, y])] == x))
}

fn day_d1(n: usize, t: &[usize]) -> bool {
    (0..n).all(|x| (0..n).all(|y| t[idx(n, &[x, y, y, x])] == x))
}

fn day_even_key(n: usize, t: &[usize]) -> Vec<usize> {
    let mut k = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            k.push(t[idx(n, &[x, x, y, y])]);
        }
    }
    k
}

fn day_odd_key(n: usize, t: &[usize]) -> Vec<usize> {
    let mut k = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                k.push(t[idx(n, &[x, y, y, z])]);
            }
        }
    }
    k
}

fn jonsson_j3(n: usize, t: &[usize]) -> bool {
    (0..n).all(|x| (0..n).all(|y| t[idx(n, &[x, y, x])] == x))
}

fn jonsson_even_key(n: usize, t: &[usize]) -> Vec<usize> {
    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| t[idx(n, &[x, x, y])]).collect()
}

fn jonsson_odd_key(n: usize, t: &[usize]) -> Vec<usize> {
    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| t[idx(n, &[x, y, y])]).collect()
}

fn projection(n: usize, k: usize, i: usize) -> Vec<usize> {
    let len = checked_pow(n, k).expect("fits");
    let shift = checked_pow(n, k - 1 - i).expect("fits");
    (0..len).map(|t| t / shift % n).collect()
}

/// Day identities on a chain of quaternary tables.
pub fn check_day(n: usize, chain: &[&[usize]]) -> std::result::Result<(), String> {
    let k = chain.len().checked_sub(1).ok_or("empty chain")?;
    if chain[0] != projection(n, 4, 0).as_slice() {
        return Err("m_0 is not the first projection".into());
    }
    if chain[k] != projection(n, 4, 3).as_slice() {
        return Err(format!("m_{k} is not the last projection"));
    }
    for (i, t) in chain.iter().enumerate() {
        if !day_d1(n, t) {
            return Err(format!("m_{i}(x,y,y,x) = x fails"));
        }
    }
    for i in 0..k {
        let (a, b) = (chain[i], chain[i + 1]);
        let ok = if i % 2 == 0 {
            day_even_key(n, a) == day_even_key(n, b)
        } else {
            day_odd_key(n, a) == day_odd_key(n, b)
        };
        if !ok {
            return Err(format!("linking identity between m_{i} and m_{} fails", i + 1));
        }
    }
    Ok(())
}

/// Jónsson identities on a chain of ternary tables.
pub fn check_jonsson(n: usize, chain: &[&[usize]]) -> std::result::Result<(), String> {
    let k = chain.len().checked_sub(1).ok_or("empty chain")?;
    if chain[0] != projection(n, 3, 0).as_slice() {
        return Err("d_0 is not the first projection".into());
    }
    if chain[k] != projection(n, 3, 2).as_slice() {
        return Err(format!("d_{k} is not the last projection"));
    }
    for (i, t) in chain.iter().enumerate() {
        if !jonsson_j3(n, t) {
            return Err(format!("d_{i}(x,y,x) = x fails"));
        }
    }
    for i in 0..k {
        let (a, b) = (chain[i], chain[i + 1]);
        let ok = if i % 2 == 0 {
            jonsson_even_key(n, a) == jonsson_even_key(n, b)
        } else {
            jonsson_odd_key(n, a) == jonsson_odd_key(n, b)
        };
        if !ok {
            return Err(format!("linking identity between d_{i} and d_{} fails", i + 1));
        }
    }
    Ok(())
}

fn origin_term(alg: &FiniteAlgebra, cl: &TupleClosure, i: usize, memo: &mut HashMap<usize, Term>) -> Term {
    if let Some(t) = memo.get(&i) {
        return t.clone();
    }
    let t = match &cl.origin[i] {
        Origin::Generator(g) => Term::Var(*g),
        Origin::Op { op, args } => Term::op(
            alg.operations()[*op].name(),
            args.iter().map(|&a| origin_term(alg, cl, a, memo)).collect(),
        ),
    };
    memo.insert(i, t.clone());
    t
}

fn run_clone<F>(alg: &FiniteAlgebra, k: usize, limits: &Limits, visit: F) -> Result<TupleClosure>
where
    F: FnMut(usize, &[usize]) -> ControlFlow<()>,
{
    if k == 0 {
        return Err(Error::Invalid("clone arity must be positive".into()));
    }
    let width = checked_pow(alg.size(), k).filter(|&w| w <= limits.max_power).ok_or(Error::CapExceeded {
        what: "clone table width",
        needed: (alg.size() as u128).saturating_pow(k as u32),
        cap: limits.max_power as u128,
    })?;
    let _ = width;
    let gens: Vec<Vec<usize>> = (0..k).map(|i| projection(alg.size(), k, i)).collect();
    close_tuples(alg, gens[0].len(), &gens, limits.clone_budget, visit)
}

/// All `k`-ary term operations, each with a minimal-depth witness term.
pub fn clone_generate(alg: &FiniteAlgebra, k: usize, limits: &Limits) -> Result<Vec<CloneElement>> {
    let cl = run_clone(alg, k, limits, |_, _| ControlFlow::Continue(()))?;
    let mut memo = HashMap::new();
    Ok((0..cl.len())
        .map(|i| CloneElement {
            arity: k,
            table: cl.get(i).to_vec(),
            witness: origin_term(alg, &cl, i, &mut memo),
        })
        .collect())
}

/// Breadth-first scan of the ternary clone for a Mal'tsev operation.
pub fn find_maltsev(alg: &FiniteAlgebra, limits: &Limits) -> Result<SearchOutcome<TermWitness>> {
    let n = alg.size();
    let mut hit = None;
    let cl = run_clone(alg, 3, limits, |id, t| {
        if is_maltsev(n, t) {
            hit = Some(id);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    match hit {
        Some(id) => {
            let term = origin_term(alg, &cl, id, &mut HashMap::new());
            Ok(SearchOutcome::Found(TermWitness::maltsev(alg, term)?))
        }
        None => Ok(SearchOutcome::NotFound { exhaustive: true }),
    }
}

/// Tries the group-shaped candidates `b(b(x,u(y)),z)`, `b(x,b(u(y),z))` and
/// every ternary basic operation before any clone enumeration.
pub fn guess_maltsev(alg: &FiniteAlgebra) -> Option<TermWitness> {
    let ops = alg.operations();
    let (x, y, z) = (Term::Var(0), Term::Var(1), Term::Var(2));
    let mut cands = Vec::new();
    for t in ops.iter().filter(|o| o.arity() == 3) {
        cands.push(Term::op(t.name(), vec![x.clone(), y.clone(), z.clone()]));
    }
    for b in ops.iter().filter(|o| o.arity() == 2) {
        for u in ops.iter().filter(|o| o.arity() == 1) {
            let uy = Term::op(u.name(), vec![y.clone()]);
            cands.push(Term::op(b.name(), vec![Term::op(b.name(), vec![x.clone(), uy.clone()]), z.clone()]));
            cands.push(Term::op(b.name(), vec![x.clone(), Term::op(b.name(), vec![uy, z.clone()])]));
        }
    }
    cands.into_iter().find_map(|t| TermWitness::maltsev(alg, t).ok())
}

/// `m_0 = x`, `m_1 = p(x, p(x,y,z), w)`, `m_2 = w`.
pub fn day_from_maltsev(alg: &FiniteAlgebra, p: &CloneElement) -> Result<TermWitness> {
    if !is_maltsev(alg.size(), &p.table) || !p.reverify(alg) {
        return Err(Error::Verification(format!("{} is not a Mal'tsev term", p.witness)));
    }
    let (x, y, z, w) = (Term::Var(0), Term::Var(1), Term::Var(2), Term::Var(3));
    let inner = p.witness.substitute(&[x.clone(), y, z])?;
    let m1 = p.witness.substitute(&[x.clone(), inner, w.clone()])?;
    TermWitness::day(alg, vec![x, m1, w])
}

struct ChainSpec {
    arity: usize,
    node: fn(usize, &[usize]) -> bool,
    even_key: fn(usize, &[usize]) -> Vec<usize>,
    odd_key: fn(usize, &[usize]) -> Vec<usize>,
}

/// Shortest path from the first to the last projection through nodes
/// satisfying the per-term identity, alternating the linking identities.
fn chain_search(
    alg: &FiniteAlgebra,
    spec: &ChainSpec,
    max_len: usize,
    limits: &Limits,
) -> Result<SearchOutcome<Vec<CloneElement>>> {
    let n = alg.size();
    let elems = clone_generate(alg, spec.arity, limits)?;
    let first = projection(n, spec.arity, 0);
    let last = projection(n, spec.arity, spec.arity - 1);
    let nodes: Vec<usize> = (0..elems.len()).filter(|&i| (spec.node)(n, &elems[i].table)).collect();
    let start = nodes.iter().copied().find(|&i| elems[i].table == first);
    let goal = nodes.iter().copied().find(|&i| elems[i].table == last);
    let (Some(start), Some(goal)) = (start, goal) else {
        return Ok(SearchOutcome::NotFound { exhaustive: true });
    };
    let keys: [Vec<Vec<usize>>; 2] = [
        elems.iter().map(|e| (spec.even_key)(n, &e.table)).collect(),
        elems.iter().map(|e| (spec.odd_key)(n, &e.table)).collect(),
    ];
    let mut buckets: [HashMap<&[usize], Vec<usize>>; 2] = [HashMap::new(), HashMap::new()];
    for &v in &nodes {
        for par in 0..2 {
            buckets[par].entry(keys[par][v].as_slice()).or_default().push(v);
        }
    }
    // state = (node, parity of the step leaving it)
    let mut prev: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut dist: HashMap<(usize, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert((start, 0), 0);
    queue.push_back((start, 0));
    let mut truncated = false;
    while let Some((v, par)) = queue.pop_front() {
        let d = dist[&(v, par)];
        if v == goal {
            let mut path = vec![v];
            let mut cur = (v, par);
            while let Some(&p) = prev.get(&cur) {
                path.push(p.0);
                cur = p;
            }
            path.reverse();
            return Ok(SearchOutcome::Found(path.into_iter().map(|i| elems[i].clone()).collect()));
        }
        for &u in &buckets[par][keys[par][v].as_slice()] {
            let next = (u, 1 - par);
            if dist.contains_key(&next) {
                continue;
            }
            if d + 1 > max_len {
                truncated = true;
                continue;
            }
            dist.insert(next, d + 1);
            prev.insert(next, (v, par));
            queue.push_back(next);
        }
    }
    Ok(SearchOutcome::NotFound { exhaustive: !truncated })
}

/// Searches the quaternary clone for Day terms `m_0..m_k` with `k ≤ max_len`.
pub fn find_day(alg: &FiniteAlgebra, max_len: usize, limits: &Limits) -> Result<SearchOutcome<TermWitness>> {
    let spec = ChainSpec {
        arity: 4,
        node: day_d1,
        even_key: day_even_key,
        odd_key: day_odd_key,
    };
    Ok(match chain_search(alg, &spec, max_len, limits)? {
        SearchOutcome::Found(chain) => {
            SearchOutcome::Found(TermWitness::new(alg, WitnessKind::Day, chain)?)
        }
        SearchOutcome::NotFound { exhaustive } => SearchOutcome::NotFound { exhaustive },
    })
}

/// Searches the ternary clone for Jónsson terms `d_0..d_k` with `k ≤ max_len`.
pub fn find_jonsson(alg: &FiniteAlgebra, max_len: usize, limits: &Limits) -> Result<SearchOutcome<TermWitness>> {
    let spec = ChainSpec {
        arity: 3,
        node: jonsson_j3,
        even_key: jonsson_even_key,
        odd_key: jonsson_odd_key,
    };
    Ok(match chain_search(alg, &spec, max_len, limits)? {
        SearchOutcome::Found(chain) => {
            SearchOutcome::Found(TermWitness::new(alg, WitnessKind::Jonsson, chain)?)
        }
        SearchOutcome::NotFound { exhaustive } => SearchOutcome::NotFound { exhaustive },
    })
}

/// Day terms for `alg`: from a Mal'tsev term when one is at hand, otherwise
/// by chain search.
pub fn discover_day(alg: &FiniteAlgebra, limits: &Limits) -> Result<SearchOutcome<TermWitness>> {
    if let Some(p) = guess_maltsev(alg) {
        return Ok(SearchOutcome::Found(day_from_maltsev(alg, &p.chain()[0])?));
    }
    let maltsev = find_maltsev(alg, limits);
    if let Ok(SearchOutcome::Found(p)) = maltsev {
        return Ok(SearchOutcome::Found(day_from_maltsev(alg, &p.chain()[0])?));
    }
    find_day(alg, 8, limits)
}

/// Parses a chain file: one term per line, `#` comments, and
/// `def <name> = <term>` lines defining macros usable in later lines.
pub fn parse_term_chain(text: &str) -> Result<Vec<Term>> {
    let mut macros: HashMap<String, Term> = HashMap::new();
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let relocate = |e: Error| match e {
            Error::Parse { col, msg, .. } => Error::parse(ln + 1, col, msg),
            other => other,
        };
        if let Some(rest) = line.strip_prefix("def ") {
            let (name, body) = rest
                .split_once('=')
                .ok_or_else(|| Error::parse(ln + 1, 1, "expected `def <name> = <term>`"))?;
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::parse(ln + 1, 5, "bad macro name"));
            }
            let t = Term::parse_with_macros(body.trim(), &macros).map_err(relocate)?;
            macros.insert(name.to_string(), t);
        } else {
            out.push(Term::parse_with_macros(line, &macros).map_err(relocate)?);
        }
    }
    if out.is_empty() {
        return Err(Error::parse(1, 1, "no terms in chain"));
    }
    Ok(out)
}
