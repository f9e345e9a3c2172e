//! Worklist closure of a set of tuples under componentwise application of
//! the basic operations of an algebra.
//!
//! Rounds are semi-naive: round `d` applies every operation to argument
//! tuples that use at least one element discovered in round `d-1`, so an
//! element first appearing in round `d` has a generating term of minimal
//! depth `d`. Enumeration order is fixed, which makes witnesses
//! reproducible.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Origin {
    Generator(usize),
    Op { op: usize, args: Vec<usize> },
}

#[derive(Debug, Clone)]
pub(crate) struct TupleClosure {
    pub width: usize,
    comps: Vec<usize>,
    pub index: HashMap<Vec<usize>, usize>,
    pub origin: Vec<Origin>,
    pub depth: Vec<usize>,
    /// `false` when the visitor stopped the run early.
    pub complete: bool,
}

impl TupleClosure {
    pub fn len(&self) -> usize {
        self.origin.len()
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.comps[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.comps.chunks(self.width.max(1)).take(self.len())
    }

    fn push(&mut self, t: Vec<usize>, origin: Origin, depth: usize) -> Option<usize> {
        if self.index.contains_key(&t) {
            return None;
        }
        let id = self.len();
        self.comps.extend_from_slice(&t);
        self.index.insert(t, id);
        self.origin.push(origin);
        self.depth.push(depth);
        Some(id)
    }
}

/// Closes `gens` (tuples of length `width` over the carrier of `alg`).
///
/// Nullary operations contribute their constant tuple at depth 1. `budget`
/// bounds the number of tuples; `visit` sees each new tuple and may stop the
/// run.
pub(crate) fn close_tuples<F>(
    alg: &FiniteAlgebra,
    width: usize,
    gens: &[Vec<usize>],
    budget: usize,
    mut visit: F,
) -> Result<TupleClosure>
where
    F: FnMut(usize, &[usize]) -> ControlFlow<()>,
{
    let mut cl = TupleClosure {
        width,
        comps: Vec::new(),
        index: HashMap::new(),
        origin: Vec::new(),
        depth: Vec::new(),
        complete: true,
    };
    macro_rules! add {
        ($t:expr, $origin:expr, $depth:expr) => {{
            let t: Vec<usize> = $t;
            if let Some(id) = cl.push(t, $origin, $depth) {
                if cl.len() > budget {
                    return Err(Error::BudgetExhausted(budget));
                }
                if visit(id, cl.get(id)).is_break() {
                    cl.complete = false;
                    return Ok(cl);
                }
            }
        }};
    }

    for (g, t) in gens.iter().enumerate() {
        debug_assert_eq!(t.len(), width);
        add!(t.clone(), Origin::Generator(g), 0);
    }
    for (op_idx, op) in alg.operations().iter().enumerate() {
        if op.arity() == 0 {
            add!(vec![op.table()[0]; width], Origin::Op { op: op_idx, args: vec![] }, 1);
        }
    }

    let mut lo = 0;
    let mut depth = 1;
    loop {
        let hi = cl.len();
        if lo == hi {
            break;
        }
        for (op_idx, op) in alg.operations().iter().enumerate() {
            let r = op.arity();
            if r == 0 {
                continue;
            }
            // Tuples over 0..hi whose first index >= lo sits at position p:
            // positions before p range over 0..lo, p over lo..hi, after p over 0..hi.
            let mut args = vec![0usize; r];
            let mut vals = vec![0usize; r];
            let mut out = vec![0usize; width];
            for p in 0..r {
                let ranges: Vec<(usize, usize)> =
                    (0..r).map(|q| if q < p { (0, lo) } else if q == p { (lo, hi) } else { (0, hi) }).collect();
                if ranges.iter().any(|(a, b)| a >= b) {
                    continue;
                }
                for (q, rg) in ranges.iter().enumerate() {
                    args[q] = rg.0;
                }
                loop {
                    for (c, slot) in out.iter_mut().enumerate() {
                        for q in 0..r {
                            vals[q] = cl.comps[args[q] * width + c];
                        }
                        *slot = op.apply(&vals);
                    }
                    add!(out.clone(), Origin::Op { op: op_idx, args: args.clone() }, depth);
                    // odometer, last position fastest
                    let mut done = true;
                    for q in (0..r).rev() {
                        args[q] += 1;
                        if args[q] < ranges[q].1 {
                            done = false;
                            break;
                        }
                        args[q] = ranges[q].0;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
        lo = hi;
        depth += 1;
    }
    Ok(cl)
}
