//! Filters of ideals of ℤ as cap maps `prime → ℕ ∪ {∞}`.
//!
//! An ideal `(d)` belongs to the filter iff `v_p(d) ≤ cap(p)` for every
//! prime `p`. Meet takes pointwise maxima, join pointwise minima, and the
//! commutator pointwise sums (the ideal product on bases).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cap {
    Finite(u64),
    Infinite,
}

impl Add for Cap {
    type Output = Cap;

    fn add(self, other: Cap) -> Cap {
        match (self, other) {
            (Cap::Finite(a), Cap::Finite(b)) => Cap::Finite(a.saturating_add(b)),
            _ => Cap::Infinite,
        }
    }
}

impl Cap {
    fn is_zero(self) -> bool {
        self == Cap::Finite(0)
    }
}

impl fmt::Display for Cap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cap::Finite(c) => write!(f, "{c}"),
            Cap::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ZIdealFilter {
    caps: BTreeMap<u64, Cap>,
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn is_prime(p: u64) -> bool {
    p >= 2 && factorize(p) == [(p, 1)]
}

impl ZIdealFilter {
    /// `Fg{(1)}`: only the whole ring.
    pub fn trivial() -> Self {
        Self::default()
    }

    /// `Fg{(n)}`.
    pub fn principal(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("expected a nonzero natural number".into()));
        }
        Ok(ZIdealFilter {
            caps: factorize(n).into_iter().map(|(p, e)| (p, Cap::Finite(e))).collect(),
        })
    }

    /// `(m^∞) = Fg{(m^k) : k ∈ ℕ}`; depends only on the primes dividing `m`.
    pub fn power_inf(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("expected a nonzero natural number".into()));
        }
        Ok(ZIdealFilter {
            caps: factorize(m).into_iter().map(|(p, _)| (p, Cap::Infinite)).collect(),
        })
    }

    /// Zero caps are dropped; keys must be prime.
    pub fn from_caps(caps: impl IntoIterator<Item = (u64, Cap)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (p, c) in caps {
            if !is_prime(p) {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            if !c.is_zero() {
                out.insert(p, c);
            }
        }
        Ok(ZIdealFilter { caps: out })
    }

    pub fn caps(&self) -> &BTreeMap<u64, Cap> {
        &self.caps
    }

    pub fn cap(&self, p: u64) -> Cap {
        self.caps.get(&p).copied().unwrap_or(Cap::Finite(0))
    }

    /// Is the ideal `(d)`, `d ≠ 0`, a member?
    pub fn contains_ideal(&self, d: u64) -> bool {
        d != 0
            && factorize(d)
                .into_iter()
                .all(|(p, e)| Cap::Finite(e) <= self.cap(p))
    }

    /// Filter order: `self ≤ other` iff `other ⊆ self`, i.e. caps of
    /// `self` dominate pointwise.
    pub fn leq(&self, other: &Self) -> bool {
        other.caps.iter().all(|(&p, &c)| c <= self.cap(p))
    }

    fn combine(&self, other: &Self, f: impl Fn(Cap, Cap) -> Cap) -> Self {
        let caps = self
            .caps
            .keys()
            .chain(other.caps.keys())
            .map(|&p| (p, f(self.cap(p), other.cap(p))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        ZIdealFilter { caps }
    }

    pub fn meet(&self, other: &Self) -> Self {
        self.combine(other, Cap::max)
    }

    pub fn join(&self, other: &Self) -> Self {
        self.combine(other, Cap::min)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.combine(other, Cap::add)
    }

    /// `(n)&m^inf` style: the finite part as a principal ideal, the
    /// unbounded primes as one `m^inf` atom.
    pub fn pretty(&self) -> String {
        let mut finite: u128 = 1;
        let mut overflow = false;
        let mut inf: u128 = 1;
        for (&p, &c) in &self.caps {
            match c {
                Cap::Finite(e) => {
                    for _ in 0..e {
                        match finite.checked_mul(p as u128) {
                            Some(v) => finite = v,
                            None => overflow = true,
                        }
                    }
                }
                Cap::Infinite => inf *= p as u128,
            }
        }
        let mut parts = Vec::new();
        if overflow {
            // fall back to one atom per prime power
            for (&p, &c) in &self.caps {
                if let Cap::Finite(e) = c {
                    parts.push(format!("({p}^{e})"));
                }
            }
        } else if finite > 1 {
            parts.push(format!("({finite})"));
        }
        if inf > 1 {
            parts.push(format!("{inf}^inf"));
        }
        if parts.is_empty() {
            "(1)".into()
        } else {
            parts.join("&")
        }
    }
}

impl fmt::Display for ZIdealFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("caps{")?;
        for (k, (p, c)) in self.caps.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}:{c}")?;
        }
        f.write_str("}")
    }
}

fn parse_nat(s: &str, col: usize) -> Result<u64> {
    let v: u64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(1, col, format!("`{}` is not a natural number", s.trim())))?;
    if v == 0 {
        return Err(Error::parse(1, col, "expected a nonzero natural number"));
    }
    Ok(v)
}

fn parse_atom(atom: &str, col: usize) -> Result<ZIdealFilter> {
    let a = atom.trim();
    if a.is_empty() {
        return Err(Error::parse(1, col, "empty atom"));
    }
    if let Some(inner) = a.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        // `(n)` or `(p^e)`
        if let Some((b, e)) = inner.split_once('^') {
            let b = parse_nat(b, col)?;
            let e: u64 = e
                .trim()
                .parse()
                .map_err(|_| Error::parse(1, col, format!("bad exponent in `{a}`")))?;
            let caps = factorize(b).into_iter().map(|(p, k)| (p, Cap::Finite(k.saturating_mul(e))));
            return ZIdealFilter::from_caps(caps).map_err(|e| Error::parse(1, col, e.to_string()));
        }
        return ZIdealFilter::principal(parse_nat(inner, col)?);
    }
    if let Some(m) = a.strip_suffix("^inf") {
        return ZIdealFilter::power_inf(parse_nat(m, col)?);
    }
    Err(Error::parse(1, col, format!("expected `(n)` or `m^inf`, found `{a}`")))
}

fn parse_caps(body: &str) -> Result<ZIdealFilter> {
    let mut caps = Vec::new();
    for (k, entry) in body.split(',').enumerate() {
        let entry = entry.trim();
        if entry.is_empty() {
            if k == 0 && body.trim().is_empty() {
                break;
            }
            return Err(Error::parse(1, 6, "empty cap entry"));
        }
        let (p, c) = entry
            .split_once(':')
            .ok_or_else(|| Error::parse(1, 6, format!("expected `p:cap`, found `{entry}`")))?;
        let p: u64 = p.trim().parse().map_err(|_| Error::parse(1, 6, format!("bad prime `{p}`")))?;
        let c = match c.trim() {
            "inf" => Cap::Infinite,
            v => Cap::Finite(v.parse().map_err(|_| Error::parse(1, 6, format!("bad cap `{v}`")))?),
        };
        caps.push((p, c));
    }
    ZIdealFilter::from_caps(caps).map_err(|e| Error::parse(1, 1, e.to_string()))
}

/// Accepts the canonical `caps{2:3,5:inf}` form or `&`-joined atoms
/// `(n)` / `m^inf`, combined by meet.
impl FromStr for ZIdealFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(body) = t.strip_prefix("caps{").and_then(|r| r.strip_suffix('}')) {
            return parse_caps(body);
        }
        let mut acc: Option<ZIdealFilter> = None;
        let mut col = 1;
        for atom in s.split('&') {
            let f = parse_atom(atom, col)?;
            col += atom.len() + 1;
            acc = Some(match acc {
                Some(a) => a.meet(&f),
                None => f,
            });
        }
        acc.ok_or_else(|| Error::parse(1, 1, "empty filter expression"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(s: &str) -> ZIdealFilter {
        s.parse().unwrap()
    }

    #[test]
    fn meet_join_examples() {
        assert_eq!(z("2^inf").meet(&z("3^inf")), z("6^inf"));
        assert_eq!(z("2^inf").meet(&z("3^inf")).to_string(), "caps{2:inf,3:inf}");
        assert_eq!(z("(12)").meet(&ZIdealFilter::trivial()), z("(12)"));
        assert_eq!(z("(4)").meet(&z("(6)")), z("(12)"));
        assert_eq!(z("2^inf").join(&z("3^inf")), ZIdealFilter::trivial());
        assert_eq!(z("(4)").join(&z("(6)")), z("(2)"));
        assert_eq!(z("(4)&3^inf").join(&z("(4)&3^inf")), z("(4)&3^inf"));
    }

    #[test]
    fn commutator_examples() {
        for (p, q) in [(2, 3), (3, 5), (2, 7)] {
            let c = ZIdealFilter::power_inf(p).unwrap().commutator(&ZIdealFilter::power_inf(q).unwrap());
            assert_eq!(c, ZIdealFilter::power_inf(p * q).unwrap());
        }
        assert_eq!(z("(4)").commutator(&z("(6)")), z("(24)"));
        assert_eq!(z("(4)&3^inf").commutator(&z("(1)")), z("(4)&3^inf"));
    }

    #[test]
    fn parsing_and_printing() {
        assert_eq!(z("12^inf"), z("6^inf"));
        assert_eq!(z("12^inf").to_string(), "caps{2:inf,3:inf}");
        assert_eq!(z("(8)").to_string(), "caps{2:3}");
        assert_eq!(z("(4) & 3^inf").to_string(), "caps{2:2,3:inf}");
        assert_eq!(z("(4) & 3^inf").pretty(), "(4)&3^inf");
        assert_eq!(ZIdealFilter::trivial().pretty(), "(1)");
        assert_eq!(ZIdealFilter::trivial().to_string(), "caps{}");
        assert_eq!(z("caps{}"), ZIdealFilter::trivial());
        assert_eq!(z("caps{2:3,5:inf}").to_string(), "caps{2:3,5:inf}");
        assert_eq!(z("caps{2:0}"), ZIdealFilter::trivial());
        assert!("(0)".parse::<ZIdealFilter>().is_err());
        assert!("0^inf".parse::<ZIdealFilter>().is_err());
        assert!("caps{4:1}".parse::<ZIdealFilter>().is_err());
        assert!("(4) &".parse::<ZIdealFilter>().is_err());
        assert!("x".parse::<ZIdealFilter>().is_err());
    }

    #[test]
    fn membership() {
        let f = z("(4)&3^inf");
        assert!(f.contains_ideal(4 * 81));
        assert!(f.contains_ideal(1));
        assert!(!f.contains_ideal(8));
        assert!(!f.contains_ideal(5));
        assert!(z("(12)").leq(&z("(4)")));
        assert!(!z("(4)").leq(&z("(12)")));
    }
}
