//! Command-line front end: argument parsing and text reports.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use unifcomm::commutator::{self, equivalence_suite, EquivalenceReport};
use unifcomm::congruence::{cg, con_all, lattice_law_check, quotient};
use unifcomm::group_topology::{
    check_group_axioms, equivalence_theorem_check, FiniteGroup, GroupEquivalenceReport, NeighborhoodBase, Subset,
};
use unifcomm::terms::{discover_day, find_jonsson, find_maltsev, parse_term_chain};
use unifcomm::{catalog, Error, FiniteAlgebra, Limits, Partition, RelationFilter, Route, SearchOutcome, TermWitness, ZIdealFilter};

#[derive(Parser, Debug)]
#[command(name = "unifcomm", version, about = "Congruences, commutators and uniformities on finite algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List every congruence, finest first.
    Con {
        algebra: String,
        /// Also report modularity and distributivity of the lattice.
        #[arg(long)]
        laws: bool,
    },
    /// Congruence generated by pairs, e.g. `--pairs "0,2 1,3"`.
    Cg {
        algebra: String,
        #[arg(long, default_value = "")]
        pairs: String,
    },
    /// The commutator [α,β].
    Commutator {
        algebra: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, value_enum, default_value_t = Method::Tc)]
        method: Method,
        /// Day term chain to use instead of searching for one.
        #[arg(long)]
        day_terms: Option<String>,
    },
    /// Does α centralize β modulo δ?
    Centralizes {
        algebra: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        delta: String,
        /// Use the weak term condition.
        #[arg(long)]
        weak: bool,
    },
    /// Search for Mal'tsev, Day or Jónsson terms.
    Maltsev {
        algebra: String,
        #[arg(long, value_enum, default_value_t = TermKind::Maltsev)]
        kind: TermKind,
        /// Longest chain to try for Day and Jónsson searches.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Evaluate the six equivalent centrality statements.
    Equivsuite {
        algebra: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        day_terms: Option<String>,
    },
    /// Arithmetic of ideal filters on the integers.
    Zfilter {
        #[arg(value_enum)]
        op: ZOp,
        left: String,
        right: String,
    },
    /// Check a neighbourhood base of the identity in a finite group.
    GroupTop {
        algebra: String,
        /// Subsets separated by `|`, e.g. `"{0}|{0 3}"`.
        #[arg(long)]
        base: String,
    },
    /// Push the filter with the given congruence base along A → A/β.
    Pushforward {
        algebra: String,
        #[arg(long)]
        beta: String,
        /// Base congruences separated by `;`.
        #[arg(long)]
        base: String,
        /// Least uniformity on the bare set instead of the least compatible one.
        #[arg(long)]
        set: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Tc,
    Weak,
    Xm,
    Delta,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TermKind {
    Maltsev,
    Day,
    Jonsson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ZOp {
    Meet,
    Join,
    Commutator,
}

/// Exit status plus the text to print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub code: u8,
    pub text: String,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { code: 0, text }
    }

    fn verdict(holds: bool, text: String) -> Self {
        Report {
            code: if holds { 0 } else { 1 },
            text,
        }
    }
}

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            return Report { code, text: e.to_string() };
        }
    };
    match execute(cli.command) {
        Ok(r) => r,
        Err(e) => Report {
            code: EXIT_INPUT,
            text: describe(&e),
        },
    }
}

fn describe(e: &Error) -> String {
    match e {
        Error::CapExceeded { .. } | Error::BudgetExhausted(_) => format!("resource limit: {e}\n"),
        _ => format!("error: {e}\n"),
    }
}

/// A path to an algebra file, or a built-in name such as `z4` or `s3`.
fn load_algebra(arg: &str) -> unifcomm::Result<FiniteAlgebra> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?;
        return FiniteAlgebra::parse(&text);
    }
    catalog::by_name(arg).ok_or_else(|| Error::Invalid(format!("{arg}: no such file or built-in algebra")))
}

fn partition(alg: &FiniteAlgebra, s: &str) -> unifcomm::Result<Partition> {
    Partition::parse_sized(s, alg.size())
}

fn parse_pairs(s: &str) -> unifcomm::Result<Vec<(usize, usize)>> {
    s.split_whitespace()
        .map(|tok| {
            let (a, b) = tok
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("`{tok}` is not a pair `a,b`")))?;
            let num = |x: &str| x.parse::<usize>().map_err(|_| Error::Invalid(format!("`{x}` is not an element")));
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn day_witness(alg: &FiniteAlgebra, file: Option<&str>) -> unifcomm::Result<TermWitness> {
    match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
            TermWitness::day(alg, parse_term_chain(&text)?)
        }
        None => discover_day(alg, &Limits::default())?
            .found()
            .ok_or_else(|| Error::Invalid(format!("no Day terms found for {}; supply --day-terms", alg.name()))),
    }
}

fn matrix(m: &[usize; 4]) -> String {
    format!("({} {}; {} {})", m[0], m[1], m[2], m[3])
}

fn flags(labels: &[&str], values: &[bool]) -> String {
    labels.iter().zip(values).map(|(l, v)| format!("{l}: {v}\n")).collect()
}

fn execute(cmd: Command) -> unifcomm::Result<Report> {
    match cmd {
        Command::Con { algebra, laws } => {
            let alg = load_algebra(&algebra)?;
            let l = con_all(&alg)?;
            let mut out: String = l.elements().iter().map(|p| format!("{p}\n")).collect();
            if laws {
                let laws = lattice_law_check(&l);
                let _ = writeln!(out, "modular: {}\ndistributive: {}", laws.modular, laws.distributive);
            }
            Ok(Report::ok(out))
        }
        Command::Cg { algebra, pairs } => {
            let alg = load_algebra(&algebra)?;
            Ok(Report::ok(format!("{}\n", cg(&alg, &parse_pairs(&pairs)?)?)))
        }
        Command::Commutator {
            algebra,
            alpha,
            beta,
            method,
            day_terms,
        } => {
            let alg = load_algebra(&algebra)?;
            let (a, b) = (partition(&alg, &alpha)?, partition(&alg, &beta)?);
            let routes: Vec<Route> = match method {
                Method::Tc => vec![Route::TermCondition],
                Method::Weak => vec![Route::WeakTermCondition],
                Method::Xm => vec![Route::Xm],
                Method::Delta => vec![Route::Delta],
                Method::All => Route::ALL.to_vec(),
            };
            let day = if routes.contains(&Route::Xm) {
                Some(day_witness(&alg, day_terms.as_deref())?)
            } else {
                None
            };
            let mut vals = Vec::new();
            for r in &routes {
                vals.push(commutator::commutator(&alg, &a, &b, *r, day.as_ref())?);
            }
            if routes.len() == 1 {
                return Ok(Report::ok(format!("{}\n", vals[0])));
            }
            let mut out: String = routes.iter().zip(&vals).map(|(r, v)| format!("{}: {v}\n", r.name())).collect();
            let agree = vals.iter().all(|v| v == &vals[0]);
            let _ = writeln!(out, "agree: {agree}");
            Ok(Report::verdict(agree, out))
        }
        Command::Centralizes {
            algebra,
            alpha,
            beta,
            delta,
            weak,
        } => {
            let alg = load_algebra(&algebra)?;
            let (a, b, d) = (partition(&alg, &alpha)?, partition(&alg, &beta)?, partition(&alg, &delta)?);
            let rep = if weak {
                commutator::weak_centralizes(&alg, &a, &b, &d)?
            } else {
                commutator::centralizes(&alg, &a, &b, &d)?
            };
            let mut out = format!("holds: {}\n", rep.holds);
            if let Some(w) = &rep.witness {
                let _ = writeln!(out, "witness: {}", matrix(w));
            }
            Ok(Report::verdict(rep.holds, out))
        }
        Command::Maltsev { algebra, kind, max_len } => {
            let alg = load_algebra(&algebra)?;
            let limits = Limits::default();
            let outcome = match kind {
                TermKind::Maltsev => find_maltsev(&alg, &limits)?,
                TermKind::Day => discover_day(&alg, &limits)?,
                TermKind::Jonsson => find_jonsson(&alg, max_len, &limits)?,
            };
            Ok(match outcome {
                SearchOutcome::Found(w) => Report::ok(w.terms().iter().map(|t| format!("{t}\n")).collect()),
                SearchOutcome::NotFound { exhaustive } => Report::verdict(
                    false,
                    if exhaustive {
                        "none: search space exhausted\n".into()
                    } else {
                        "none found within the budget\n".into()
                    },
                ),
            })
        }
        Command::Equivsuite {
            algebra,
            alpha,
            beta,
            delta,
            day_terms,
        } => {
            let alg = load_algebra(&algebra)?;
            let (a, b, d) = (partition(&alg, &alpha)?, partition(&alg, &beta)?, partition(&alg, &delta)?);
            let w = day_witness(&alg, day_terms.as_deref())?;
            let rep = equivalence_suite(&alg, &w, &a, &b, &d)?;
            let mut out = flags(&EquivalenceReport::LABELS, &rep.values);
            let _ = writeln!(out, "consistent: {}", rep.consistent());
            Ok(Report::verdict(rep.consistent(), out))
        }
        Command::Zfilter { op, left, right } => {
            let (f, g): (ZIdealFilter, ZIdealFilter) = (left.parse()?, right.parse()?);
            let r = match op {
                ZOp::Meet => f.meet(&g),
                ZOp::Join => f.join(&g),
                ZOp::Commutator => f.commutator(&g),
            };
            Ok(Report::ok(format!("{r}\n{}\n", r.pretty())))
        }
        Command::GroupTop { algebra, base } => {
            let g = FiniteGroup::new(load_algebra(&algebra)?)?;
            let nb = NeighborhoodBase::new(&g, Subset::parse_list(&base)?)?;
            let ax = check_group_axioms(&nb);
            let mut out = flags(&["G3", "G4", "G5", "G5'"], &[ax.g3, ax.g4, ax.g5, ax.g5_prime]);
            if !(ax.g3 && ax.g4) {
                out.push_str("not a uniformity base\n");
                return Ok(Report::verdict(false, out));
            }
            let rep = equivalence_theorem_check(&nb)?;
            for (i, (l, v)) in GroupEquivalenceReport::LABELS.iter().zip(rep.values).enumerate() {
                let _ = writeln!(out, "({}) {l}: {v}", i + 1);
            }
            let _ = writeln!(out, "consistent: {}", rep.consistent());
            Ok(Report::verdict(rep.consistent(), out))
        }
        Command::Pushforward {
            algebra,
            beta,
            base,
            set,
        } => {
            let alg = load_algebra(&algebra)?;
            let (q, f) = quotient(&alg, &partition(&alg, &beta)?)?;
            let rels = base
                .split(';')
                .map(|s| partition(&alg, s.trim()).map(|p| p.to_relation()))
                .collect::<unifcomm::Result<Vec<_>>>()?;
            let u = RelationFilter::new(alg.size(), rels)?;
            let v = f.pushforward(&u, !set)?;
            let mut out = format!("quotient: {} elements, blocks {}\n", q.size(), f.kernel());
            for r in v.base() {
                let _ = writeln!(out, "{}", Partition::equivalence_closure(r));
            }
            Ok(Report::ok(out))
        }
    }
}
