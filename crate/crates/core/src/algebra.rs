//! Finite algebras given by operation tables, terms, homomorphisms, and the
//! constructions built from them: powers, generated subalgebras, `A(α)`,
//! preimages of relation filters, and compatible pushforwards.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use crate::closure::close_tuples;
use crate::congruence;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rel::{BitRelation, RelationFilter};
use crate::Limits;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Operation {
    name: String,
    arity: usize,
    table: Vec<usize>,
    radix: usize,
}

impl Operation {
    pub fn new(name: impl Into<String>, arity: usize, table: Vec<usize>) -> Self {
        let radix = integer_root(table.len(), arity);
        Operation {
            name: name.into(),
            arity,
            table,
            radix,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Row-major table: the first argument is the most significant digit.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        let idx = args.iter().fold(0, |acc, &a| acc * self.radix + a);
        self.table[idx]
    }
}

/// Largest `r` with `r^k <= len` (exact for well-formed tables).
fn integer_root(len: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    let mut r = (len as f64).powf(1.0 / k as f64).round() as usize;
    while r > 0 && checked_pow(r, k).is_none_or(|v| v > len) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|v| v <= len) {
        r += 1;
    }
    r
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Signature {
    pub ops: Vec<(String, usize)>,
}

impl Signature {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|(n, _)| n == name)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<Operation>,
}

pub(crate) fn checked_pow(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc.checked_mul(n)?;
    }
    Some(acc)
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::Invalid("carrier must be nonempty".into()));
        }
        for (i, op) in ops.iter().enumerate() {
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::Invalid(format!("duplicate operation name `{}`", op.name)));
            }
            let expected = checked_pow(size, op.arity).ok_or(Error::CapExceeded {
                what: "operation table",
                needed: u128::MAX,
                cap: usize::MAX as u128,
            })?;
            if op.table.len() != expected {
                return Err(Error::Invalid(format!(
                    "operation `{}` has {} entries, expected {expected}",
                    op.name,
                    op.table.len()
                )));
            }
            if let Some(&bad) = op.table.iter().find(|&&v| v >= size) {
                return Err(Error::OutOfRange { elem: bad, size });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            ops,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn signature(&self) -> Signature {
        Signature {
            ops: self.ops.iter().map(|o| (o.name.clone(), o.arity)).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let idx = args.iter().fold(0, |acc, &a| acc * self.size + a);
        self.ops[op].table[idx]
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_elem(&self, e: usize) -> Result<()> {
        if e >= self.size {
            return Err(Error::OutOfRange { elem: e, size: self.size });
        }
        Ok(())
    }

    /// `A^k` with componentwise operations, elements indexed
    /// lexicographically (first coordinate most significant).
    pub fn power(&self, k: usize) -> Result<Self> {
        self.power_with(k, &Limits::default())
    }

    pub fn power_with(&self, k: usize, limits: &Limits) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("power exponent must be positive".into()));
        }
        let n = self.size;
        let cap = limits.max_power;
        let too_big = |needed: u128| Error::CapExceeded {
            what: "power",
            needed,
            cap: cap as u128,
        };
        let big = checked_pow(n, k).filter(|&m| m <= cap).ok_or_else(|| too_big((n as u128).saturating_pow(k as u32)))?;
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let entries = checked_pow(big, op.arity)
                .filter(|&m| m <= cap)
                .ok_or_else(|| too_big((big as u128).saturating_pow(op.arity as u32)))?;
            let mut table = Vec::with_capacity(entries);
            let mut comp = vec![0; op.arity];
            for args in all_tuples(big, op.arity) {
                let mut out = 0;
                for c in 0..k {
                    let shift = checked_pow(n, k - 1 - c).expect("fits");
                    for (slot, &a) in comp.iter_mut().zip(&args) {
                        *slot = a / shift % n;
                    }
                    out = out * n + op.apply(&comp);
                }
                table.push(out);
            }
            ops.push(Operation::new(op.name.clone(), op.arity, table));
        }
        Self::new(format!("{}^{k}", self.name), big, ops)
    }

    /// Least subset containing `gens` closed under every operation.
    pub fn subalgebra_generate(&self, gens: &[usize]) -> Result<Vec<usize>> {
        for &g in gens {
            self.check_elem(g)?;
        }
        if gens.is_empty() && self.ops.iter().all(|o| o.arity != 0) {
            return Err(Error::EmptyGeneration);
        }
        let gens: Vec<Vec<usize>> = gens.iter().map(|&g| vec![g]).collect();
        let cl = close_tuples(self, 1, &gens, usize::MAX, |_, _| ControlFlow::Continue(()))?;
        let mut out: Vec<usize> = cl.iter().map(|t| t[0]).collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Restriction to a subset closed under the operations, re-indexed in
    /// ascending order of the original elements.
    pub fn subalgebra(&self, elems: &[usize]) -> Result<Self> {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let pos: HashMap<usize, usize> = sorted.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let m = sorted.len();
        let mut ops = Vec::new();
        for op in &self.ops {
            let mut table = Vec::new();
            for args in all_tuples(m, op.arity) {
                let orig: Vec<usize> = args.iter().map(|&a| sorted[a]).collect();
                let v = op.apply(&orig);
                table.push(*pos.get(&v).ok_or_else(|| Error::Invalid("subset is not closed".into()))?);
            }
            ops.push(Operation::new(op.name.clone(), op.arity, table));
        }
        Self::new(format!("sub({})", self.name), m, ops)
    }

    /// Is `r` closed under every operation applied componentwise?
    pub fn is_compatible_relation(&self, r: &BitRelation) -> bool {
        if r.carrier_size() != self.size {
            return false;
        }
        let pairs: Vec<(usize, usize)> = r.pairs().collect();
        for (k, op) in self.ops.iter().enumerate() {
            let mut xs = vec![0; op.arity];
            let mut ys = vec![0; op.arity];
            for choice in all_tuples(pairs.len(), op.arity) {
                for (q, &c) in choice.iter().enumerate() {
                    xs[q] = pairs[c].0;
                    ys[q] = pairs[c].1;
                }
                if !r.contains(self.apply(k, &xs), self.apply(k, &ys)) {
                    return false;
                }
            }
        }
        true
    }

    /// Serializes in the line-oriented algebra file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("algebra {}\ncarrier {}\n", self.name, self.size);
        for op in &self.ops {
            s.push_str(&format!("op {}/{}\n", op.name, op.arity));
            if op.arity == 0 {
                s.push_str(&format!("{}\n", op.table[0]));
            } else {
                for row in op.table.chunks(self.size) {
                    let line: Vec<String> = row.iter().map(usize::to_string).collect();
                    s.push_str(&line.join(" "));
                    s.push('\n');
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, &Limits::default())
    }

    pub fn parse_with(text: &str, limits: &Limits) -> Result<Self> {
        let toks = tokenize(text);
        let mut it = toks.iter().peekable();
        let expect_kw = |kw: &str, it: &mut std::iter::Peekable<std::slice::Iter<'_, Tok>>| -> Result<Tok> {
            let t = it.next().ok_or_else(|| Error::parse(0, 0, format!("unexpected end of input, expected `{kw}`")))?;
            if t.text != kw {
                return Err(Error::parse(t.line, t.col, format!("expected `{kw}`, found `{}`", t.text)));
            }
            it.next()
                .cloned()
                .ok_or_else(|| Error::parse(t.line, t.col, format!("`{kw}` needs an argument")))
        };
        let name = expect_kw("algebra", &mut it)?.text;
        let ctok = expect_kw("carrier", &mut it)?;
        let n: usize = ctok
            .text
            .parse()
            .map_err(|_| Error::parse(ctok.line, ctok.col, "carrier size must be a natural number"))?;
        if n == 0 {
            return Err(Error::parse(ctok.line, ctok.col, "carrier must be nonempty"));
        }
        if n > limits.max_carrier {
            return Err(Error::CapExceeded {
                what: "carrier",
                needed: n as u128,
                cap: limits.max_carrier as u128,
            });
        }
        let mut ops = Vec::new();
        while it.peek().is_some() {
            let head = expect_kw("op", &mut it)?;
            let (oname, ar) = head
                .text
                .split_once('/')
                .ok_or_else(|| Error::parse(head.line, head.col, "expected `<name>/<arity>`"))?;
            if oname.is_empty() || !oname.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::parse(head.line, head.col, format!("bad operation name `{oname}`")));
            }
            let arity: usize = ar
                .parse()
                .map_err(|_| Error::parse(head.line, head.col, "arity must be a natural number"))?;
            let len = checked_pow(n, arity).filter(|&m| m <= limits.max_power).ok_or(Error::CapExceeded {
                what: "operation table",
                needed: (n as u128).saturating_pow(arity as u32),
                cap: limits.max_power as u128,
            })?;
            let mut table = Vec::with_capacity(len);
            for _ in 0..len {
                let t = it.next().ok_or_else(|| {
                    Error::parse(head.line, head.col, format!("operation `{oname}` needs {len} entries"))
                })?;
                let v: usize = t
                    .text
                    .parse()
                    .map_err(|_| Error::parse(t.line, t.col, format!("`{}` is not a table entry", t.text)))?;
                if v >= n {
                    return Err(Error::parse(t.line, t.col, format!("entry {v} out of range for carrier {n}")));
                }
                table.push(v);
            }
            ops.push(Operation::new(oname, arity, table));
        }
        Self::new(name, n, ops)
    }
}

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut start = None;
        for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push(Tok {
                        text: line[s..i].to_string(),
                        line: ln + 1,
                        col: s + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
    }
    out
}

/// All `k`-tuples over `0..n` in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if n == 0 && k > 0 { 0 } else { checked_pow(n, k).expect("tuple space fits in usize") };
    (0..total).map(move |mut idx| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % n.max(1);
            idx /= n.max(1);
        }
        t
    })
}

/// Term over a signature: a variable `x<i>` or an operation applied to
/// subterms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Op { name: String, args: Vec<Term> },
}

impl Term {
    pub fn op(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Op {
            name: name.into(),
            args,
        }
    }

    /// One more than the largest variable index (0 for ground terms).
    pub fn arity(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Op { args, .. } => args.iter().map(Term::arity).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Op { args, .. } => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, alg: &FiniteAlgebra, env: &[usize]) -> Result<usize> {
        match self {
            Term::Var(i) => env
                .get(*i)
                .copied()
                .ok_or(Error::VariableOutOfRange { var: *i, len: env.len() }),
            Term::Op { name, args } => {
                let idx = alg
                    .ops
                    .iter()
                    .position(|o| &o.name == name)
                    .ok_or_else(|| Error::UnknownOp(name.clone()))?;
                let op = &alg.ops[idx];
                if op.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: name.clone(),
                        expected: op.arity,
                        got: args.len(),
                    });
                }
                let vals = args.iter().map(|a| a.eval(alg, env)).collect::<Result<Vec<_>>>()?;
                Ok(alg.apply(idx, &vals))
            }
        }
    }

    /// The `k`-ary term operation as a table over all `k`-tuples.
    pub fn table(&self, alg: &FiniteAlgebra, k: usize) -> Result<Vec<usize>> {
        let n = alg.size();
        let len = checked_pow(n, k).ok_or(Error::CapExceeded {
            what: "term table",
            needed: u128::MAX,
            cap: usize::MAX as u128,
        })?;
        match self {
            Term::Var(i) => {
                if *i >= k {
                    return Err(Error::VariableOutOfRange { var: *i, len: k });
                }
                let shift = checked_pow(n, k - 1 - i).expect("fits");
                Ok((0..len).map(|t| t / shift % n).collect())
            }
            Term::Op { name, args } => {
                let idx = alg
                    .ops
                    .iter()
                    .position(|o| &o.name == name)
                    .ok_or_else(|| Error::UnknownOp(name.clone()))?;
                let op = &alg.ops[idx];
                if op.arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: name.clone(),
                        expected: op.arity,
                        got: args.len(),
                    });
                }
                let subs = args.iter().map(|a| a.table(alg, k)).collect::<Result<Vec<_>>>()?;
                let mut vals = vec![0; args.len()];
                Ok((0..len)
                    .map(|t| {
                        for (v, s) in vals.iter_mut().zip(&subs) {
                            *v = s[t];
                        }
                        alg.apply(idx, &vals)
                    })
                    .collect())
            }
        }
    }

    /// Replaces every variable `x<i>` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Result<Term> {
        match self {
            Term::Var(i) => subst
                .get(*i)
                .cloned()
                .ok_or(Error::VariableOutOfRange { var: *i, len: subst.len() }),
            Term::Op { name, args } => Ok(Term::Op {
                name: name.clone(),
                args: args.iter().map(|a| a.substitute(subst)).collect::<Result<_>>()?,
            }),
        }
    }

    /// Parses prefix notation `(op t1 t2 ...)`, variables `x0`, `x1`, ...;
    /// a nullary operation may be written bare. Names found in `macros`
    /// are expanded by substitution.
    pub fn parse_with_macros(s: &str, macros: &HashMap<String, Term>) -> Result<Term> {
        let mut p = TermParser {
            src: s,
            pos: 0,
            macros,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(Error::parse(1, p.pos + 1, "trailing input after term"));
        }
        Ok(t)
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        Term::parse_with_macros(s, &HashMap::new())
    }
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
    macros: &'a HashMap<String, Term>,
}

impl TermParser<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(Error::parse(1, start + 1, "expected a name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn apply(&self, name: String, args: Vec<Term>, at: usize) -> Result<Term> {
        if let Some(body) = self.macros.get(&name) {
            if body.arity() > args.len() {
                return Err(Error::parse(
                    1,
                    at + 1,
                    format!("`{name}` uses {} variables but got {} arguments", body.arity(), args.len()),
                ));
            }
            return body.substitute(&args);
        }
        Ok(Term::Op { name, args })
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let at = self.pos;
        if self.src[self.pos..].starts_with('(') {
            self.pos += 1;
            self.skip_ws();
            let name = self.ident()?;
            let mut args = Vec::new();
            loop {
                self.skip_ws();
                if self.pos >= self.src.len() {
                    return Err(Error::parse(1, at + 1, "unclosed `(`"));
                }
                if self.src[self.pos..].starts_with(')') {
                    self.pos += 1;
                    break;
                }
                args.push(self.term()?);
            }
            self.apply(name, args, at)
        } else if self.src[self.pos..].starts_with(')') {
            Err(Error::parse(1, at + 1, "unexpected `)`"))
        } else {
            let name = self.ident()?;
            if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                return Ok(Term::Var(idx));
            }
            self.apply(name, Vec::new(), at)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Op { name, args } if args.is_empty() => f.write_str(name),
            Term::Op { name, args } => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A verified homomorphism between two algebras of the same signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteAlgebra,
    target: FiniteAlgebra,
    map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(source: FiniteAlgebra, target: FiniteAlgebra, map: Vec<usize>) -> Result<Self> {
        if source.signature() != target.signature() {
            return Err(Error::SignatureMismatch);
        }
        if map.len() != source.size() {
            return Err(Error::CarrierMismatch(map.len(), source.size()));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.size()) {
            return Err(Error::OutOfRange {
                elem: bad,
                size: target.size(),
            });
        }
        for (k, op) in source.operations().iter().enumerate() {
            for args in all_tuples(source.size(), op.arity()) {
                let lhs = map[source.apply(k, &args)];
                let img: Vec<usize> = args.iter().map(|&a| map[a]).collect();
                let rhs = target.apply(k, &img);
                if lhs != rhs {
                    return Err(Error::NotHomomorphism(format!(
                        "`{}` at {:?}: f(ω(a)) = {lhs} but ω(f(a)) = {rhs}",
                        op.name(),
                        args
                    )));
                }
            }
        }
        Ok(Homomorphism { source, target, map })
    }

    pub fn identity(a: &FiniteAlgebra) -> Self {
        Homomorphism {
            source: a.clone(),
            target: a.clone(),
            map: (0..a.size()).collect(),
        }
    }

    pub fn source(&self) -> &FiniteAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FiniteAlgebra {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn compose_after(&self, first: &Homomorphism) -> Result<Homomorphism> {
        if first.target.size() != self.source.size() {
            return Err(Error::CarrierMismatch(first.target.size(), self.source.size()));
        }
        Ok(Homomorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            map: first.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    /// Fibers of the map.
    pub fn kernel(&self) -> Partition {
        Partition::from_labels(&self.map)
    }

    /// `f⁻¹(U)` with base `{f⁻¹(U) : U in the base of u}`.
    pub fn preimage_filter(&self, u: &RelationFilter) -> Result<RelationFilter> {
        if u.carrier_size() != self.target.size() {
            return Err(Error::CarrierMismatch(u.carrier_size(), self.target.size()));
        }
        let base = u.base().iter().map(|b| b.preimage(&self.map)).collect::<Result<Vec<_>>>()?;
        RelationFilter::new(self.source.size(), base)
    }

    /// Least reflexive compatible relation on the target containing `f(u)`:
    /// all pairs `(t(b, f(a)), t(b, f(a')))` with `a u a'` componentwise.
    pub fn l_f_base(&self, u: &BitRelation) -> Result<BitRelation> {
        if u.carrier_size() != self.source.size() {
            return Err(Error::CarrierMismatch(u.carrier_size(), self.source.size()));
        }
        if !u.is_reflexive() {
            return Err(Error::NotReflexive);
        }
        let m = self.target.size();
        let mut gens: Vec<Vec<usize>> = (0..m).map(|b| vec![b, b]).collect();
        gens.extend(u.pairs().map(|(a, b)| vec![self.map[a], self.map[b]]));
        let cl = close_tuples(&self.target, 2, &gens, usize::MAX, |_, _| ControlFlow::Continue(()))?;
        BitRelation::from_pairs(m, cl.iter().map(|t| (t[0], t[1])))
    }

    /// Pushforward of a compatible uniformity along the map.
    ///
    /// With `compatible` set this is the least compatible uniformity `v` on
    /// the target with `u ≤ f⁻¹(v)`; otherwise the least uniformity on the
    /// bare target set with that property.
    pub fn pushforward(&self, u: &RelationFilter, compatible: bool) -> Result<RelationFilter> {
        if u.carrier_size() != self.source.size() {
            return Err(Error::CarrierMismatch(u.carrier_size(), self.source.size()));
        }
        if !u.check_axioms().is_uniformity() {
            return Err(Error::NotUniformity("pushforward source filter".into()));
        }
        let meet = u.base_meet();
        if !congruence::is_congruence(&self.source, &Partition::equivalence_closure(&meet))
            || !self.source.is_compatible_relation(&meet)
        {
            return Err(Error::NotUniformity("source filter is not compatible".into()));
        }
        let push = |r: &BitRelation| -> Result<BitRelation> {
            if compatible {
                let l = self.l_f_base(r)?;
                let pairs: Vec<(usize, usize)> = l.pairs().collect();
                Ok(congruence::cg(&self.target, &pairs)?.to_relation())
            } else {
                Ok(Partition::equivalence_closure(&r.image(&self.map, self.target.size())?).to_relation())
            }
        };
        // The meet goes first so the base stays cofinal with the pushforward
        // of the whole filter, not just of its individual base elements.
        let mut base = vec![push(&meet)?];
        for b in u.base() {
            let p = push(b)?;
            if !base.contains(&p) {
                base.push(p);
            }
        }
        RelationFilter::new(self.target.size(), base)
    }
}

/// `A(α)`: the subalgebra of `A²` of α-related pairs with its projections
/// and diagonal embedding.
#[derive(Clone, Debug)]
pub struct AAlpha {
    pub algebra: FiniteAlgebra,
    /// Element `i` of `A(α)` is the pair `pairs[i]`, lexicographically sorted.
    pub pairs: Vec<(usize, usize)>,
    pub pi: Homomorphism,
    pub pi_prime: Homomorphism,
    pub delta: Homomorphism,
}

impl AAlpha {
    pub fn index_of(&self, a: usize, b: usize) -> Option<usize> {
        self.pairs.binary_search(&(a, b)).ok()
    }
}

pub fn a_alpha(a: &FiniteAlgebra, alpha: &Partition) -> Result<AAlpha> {
    a_alpha_with(a, alpha, &Limits::default())
}

pub fn a_alpha_with(a: &FiniteAlgebra, alpha: &Partition, limits: &Limits) -> Result<AAlpha> {
    if alpha.size() != a.size() {
        return Err(Error::CarrierMismatch(alpha.size(), a.size()));
    }
    if !congruence::is_congruence(a, alpha) {
        return Err(Error::NotCongruence(alpha.to_string()));
    }
    let n = a.size();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| alpha.related(x, y)).collect();
    let m = pairs.len();
    let pos: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut ops = Vec::new();
    for (k, op) in a.operations().iter().enumerate() {
        let entries = checked_pow(m, op.arity()).filter(|&e| e <= limits.max_power).ok_or(Error::CapExceeded {
            what: "A(alpha) operation table",
            needed: (m as u128).saturating_pow(op.arity() as u32),
            cap: limits.max_power as u128,
        })?;
        let mut table = Vec::with_capacity(entries);
        let mut xs = vec![0; op.arity()];
        let mut ys = vec![0; op.arity()];
        for args in all_tuples(m, op.arity()) {
            for (q, &e) in args.iter().enumerate() {
                xs[q] = pairs[e].0;
                ys[q] = pairs[e].1;
            }
            table.push(pos[&(a.apply(k, &xs), a.apply(k, &ys))]);
        }
        ops.push(Operation::new(op.name(), op.arity(), table));
    }
    let aa = FiniteAlgebra::new(format!("{}({alpha})", a.name()), m, ops)?;
    let pi = Homomorphism::new(aa.clone(), a.clone(), pairs.iter().map(|p| p.0).collect())?;
    let pi_prime = Homomorphism::new(aa.clone(), a.clone(), pairs.iter().map(|p| p.1).collect())?;
    let delta = Homomorphism::new(a.clone(), aa.clone(), (0..n).map(|x| pos[&(x, x)]).collect())?;
    Ok(AAlpha {
        algebra: aa,
        pairs,
        pi,
        pi_prime,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn eval_examples() {
        let z4 = catalog::cyclic_group(4);
        assert_eq!(Term::Var(0).eval(&z4, &[3]).unwrap(), 3);
        let t: Term = "(add (add x0 (neg x1)) x2)".parse().unwrap();
        assert_eq!(t.eval(&z4, &[1, 2, 3]).unwrap(), 2);
        assert_eq!(t.eval(&z4, &[]), Err(Error::VariableOutOfRange { var: 0, len: 0 }));
        let bad: Term = "(add x0)".parse().unwrap();
        assert!(matches!(bad.eval(&z4, &[0]), Err(Error::ArityMismatch { .. })));
        let unk: Term = "(foo x0)".parse().unwrap();
        assert_eq!(unk.eval(&z4, &[0]), Err(Error::UnknownOp("foo".into())));
        let zero: Term = "zero".parse().unwrap();
        assert_eq!(zero.eval(&z4, &[]).unwrap(), 0);
        assert_eq!("(zero)".parse::<Term>().unwrap(), zero);
    }

    #[test]
    fn depth_one_terms_match_tables() {
        for alg in [catalog::cyclic_group(3), catalog::cyclic_ring(4), catalog::chain_lattice(2)] {
            for op in alg.operations() {
                let t = Term::op(op.name(), (0..op.arity()).map(Term::Var).collect());
                assert_eq!(t.table(&alg, op.arity()).unwrap(), op.table());
                for args in all_tuples(alg.size(), op.arity()) {
                    assert_eq!(t.eval(&alg, &args).unwrap(), op.apply(&args));
                }
            }
        }
    }

    #[test]
    fn term_literal_round_trip_and_macros() {
        let s = "(p x0 (p x0 x1 x2) x3)";
        let t: Term = s.parse().unwrap();
        assert_eq!(t.to_string(), s);
        let mut macros = HashMap::new();
        macros.insert("p".to_string(), "(add (add x0 (neg x1)) x2)".parse::<Term>().unwrap());
        let e = Term::parse_with_macros(s, &macros).unwrap();
        assert_eq!(e.arity(), 4);
        assert!(!e.to_string().contains('p'));
        assert!("(add x0".parse::<Term>().is_err());
        assert!("add x0)".parse::<Term>().is_err());
    }

    #[test]
    fn powers() {
        let z2 = catalog::cyclic_group(2);
        let p1 = z2.power(1).unwrap();
        assert_eq!(p1.operations()[0].table(), z2.operations()[0].table());
        let p2 = z2.power(2).unwrap();
        assert_eq!(p2.size(), 4);
        // (0,1) + (1,1) = (1,0): indices 1 + 3 = 2
        assert_eq!(p2.apply(0, &[1, 3]), 2);
        let z3 = catalog::cyclic_group(3);
        let limits = Limits { max_power: 100, ..Limits::default() };
        assert!(matches!(z3.power_with(4, &limits), Err(Error::CapExceeded { .. })));
        let small = catalog::empty_signature(3);
        assert_eq!(small.power(4).unwrap().size(), 81);
    }

    #[test]
    fn subalgebra_generation() {
        let z4 = catalog::cyclic_group(4);
        assert_eq!(z4.subalgebra_generate(&[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(z4.subalgebra_generate(&[2]).unwrap(), vec![0, 2]);
        assert_eq!(z4.subalgebra_generate(&[1]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(z4.subalgebra_generate(&[]).unwrap(), vec![0]);
        let bare = catalog::empty_signature(2);
        assert_eq!(bare.subalgebra_generate(&[]), Err(Error::EmptyGeneration));
        assert!(matches!(z4.subalgebra_generate(&[7]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn a_alpha_examples() {
        let z2 = catalog::cyclic_group(2);
        let aa = a_alpha(&z2, &Partition::bottom(2)).unwrap();
        assert_eq!(aa.algebra.size(), 2);
        let aa = a_alpha(&z2, &Partition::top(2)).unwrap();
        assert_eq!(aa.algebra.size(), 4);
        let s3 = catalog::symmetric_group_3();
        let a3: Partition = "0 3 4|1 2 5".parse().unwrap();
        let aa = a_alpha(&s3, &a3).unwrap();
        assert_eq!(aa.algebra.size(), 18);
        let idem = aa.pi.compose_after(&aa.delta).unwrap();
        assert_eq!(idem.map(), &(0..6).collect::<Vec<_>>()[..]);
        let idem = aa.pi_prime.compose_after(&aa.delta).unwrap();
        assert_eq!(idem.map(), &(0..6).collect::<Vec<_>>()[..]);
        assert!(aa.pi.kernel().meet(&aa.pi_prime.kernel()).unwrap().is_bottom());
        let not_cong: Partition = "0 1|2 3 4 5".parse().unwrap();
        assert!(matches!(a_alpha(&s3, &not_cong), Err(Error::NotCongruence(_))));
    }

    #[test]
    fn text_round_trip() {
        let z3 = catalog::cyclic_ring(3);
        let text = z3.to_text();
        let back = FiniteAlgebra::parse(&text).unwrap();
        assert_eq!(back, z3);
        assert_eq!(back.to_text(), text);
        let messy = "# comment\nalgebra  t\ncarrier 2 # two\nop f/1\n1\n  0\nop c/0 1\n";
        let a = FiniteAlgebra::parse(messy).unwrap();
        assert_eq!(a.to_text(), "algebra t\ncarrier 2\nop f/1\n1 0\nop c/0\n1\n");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = FiniteAlgebra::parse("algebra t\ncarrier 2\nop f/1\n1 5\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 4,
                col: 3,
                msg: "entry 5 out of range for carrier 2".into()
            }
        );
        assert!(matches!(FiniteAlgebra::parse("algebra t\ncarrier 2\nop f/1\n1\n"), Err(Error::Parse { .. })));
        assert!(matches!(FiniteAlgebra::parse("carrier 2\n"), Err(Error::Parse { line: 1, col: 1, .. })));
        assert!(matches!(
            FiniteAlgebra::parse("algebra t\ncarrier 100\n"),
            Err(Error::CapExceeded { what: "carrier", .. })
        ));
    }

    #[test]
    fn homomorphism_checks() {
        let z4 = catalog::cyclic_group(4);
        let z2 = catalog::cyclic_group(2);
        assert!(Homomorphism::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).is_ok());
        assert!(matches!(
            Homomorphism::new(z4.clone(), z2.clone(), vec![0, 1, 1, 0]),
            Err(Error::NotHomomorphism(_))
        ));
        assert_eq!(
            Homomorphism::new(z4, catalog::cyclic_ring(2), vec![0, 1, 0, 1]),
            Err(Error::SignatureMismatch)
        );
    }

    #[test]
    fn preimage_and_l_f() {
        let z4 = catalog::cyclic_group(4);
        let z2 = catalog::cyclic_group(2);
        let f = Homomorphism::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        let disc = RelationFilter::principal(BitRelation::diagonal(2));
        let pre = f.preimage_filter(&disc).unwrap();
        let mod2: Partition = "0 2|1 3".parse().unwrap();
        assert!(pre.equivalent(&RelationFilter::principal(mod2.to_relation())));
        let id = Homomorphism::identity(&z4);
        assert!(id.preimage_filter(&pre).unwrap().equivalent(&pre));

        assert_eq!(id.l_f_base(&BitRelation::diagonal(4)).unwrap(), BitRelation::diagonal(4));
        // The kernel collapses to the diagonal of the quotient; ∇ maps onto ∇.
        assert_eq!(f.l_f_base(&mod2.to_relation()).unwrap(), BitRelation::diagonal(2));
        assert_eq!(f.l_f_base(&BitRelation::full(4)).unwrap(), BitRelation::full(2));
        assert_eq!(f.l_f_base(&BitRelation::empty(4)), Err(Error::NotReflexive));
    }
}
