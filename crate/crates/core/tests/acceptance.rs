//! Acceptance checks. Prints one PASS/FAIL line per criterion; exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use unifcomm::catalog;
use unifcomm::commutator::{c_commutator, commutator, property_suite};
use unifcomm::congruence::{cg, con_all, quotient};
use unifcomm::group_topology::{equivalence_theorem_check, FiniteGroup, NeighborhoodBase, Subset};
use unifcomm::rel::semipermute_join_check;
use unifcomm::terms::{day_from_maltsev, find_day, find_jonsson, find_maltsev};
use unifcomm::uniform::{cucommu_inequality_check, ug_of_relation};
use unifcomm::{
    BitRelation, Cap, CongruenceFilter, FiniteAlgebra, Homomorphism, Limits, Partition, RelationFilter, Route,
    SearchOutcome, ZIdealFilter,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{:.2?}", t))
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn route_agreement() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for alg in route_catalog() {
        let w = day(&alg);
        let l = con_all(&alg).map_err(|e| e.to_string())?;
        for a in l.elements() {
            for b in l.elements() {
                let vals: Vec<Partition> = Route::ALL
                    .iter()
                    .map(|&r| commutator(&alg, a, b, r, Some(&w)))
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("{}: {e}", alg.name()))?;
                ensure!(
                    vals.iter().all(|v| v == &vals[0]),
                    "{}: routes disagree on ({a}, {b}): {vals:?}",
                    alg.name()
                );
                pairs += 1;
            }
        }
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("{pairs} pairs, {t}"))
}

fn group_oracle() -> Outcome {
    let mut pairs = 0;
    for alg in group_catalog() {
        let g = FiniteGroup::new(alg.clone()).map_err(|e| e.to_string())?;
        let normals = normal_subgroups(&g);
        for m in &normals {
            for n in &normals {
                let got = c_commutator(&alg, &g.coset_partition(m), &g.coset_partition(n)).map_err(|e| e.to_string())?;
                let want = g.coset_partition(&g.commutator_subgroup(m, n));
                ensure!(got == want, "{}: [{m},{n}] gave {got}, expected {want}", alg.name());
                pairs += 1;
            }
        }
    }
    let s3 = catalog::symmetric_group_3();
    let top = Partition::top(6);
    let c = c_commutator(&s3, &top, &top).map_err(|e| e.to_string())?;
    ensure!(c.to_string() == "0 3 4|1 2 5", "S3 [top,top] = {c}");
    Ok(format!("{pairs} normal pairs; S3 [top,top] = {c}"))
}

fn ring_oracle() -> Outcome {
    let mut pairs = 0;
    for n in 2..=8usize {
        let ring = catalog::cyclic_ring(n);
        let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
        let l = con_all(&ring).map_err(|e| e.to_string())?;
        ensure!(l.len() == divisors.len(), "Z{n}: {} congruences, {} ideals", l.len(), divisors.len());
        for &d in &divisors {
            for &e in &divisors {
                let got = c_commutator(&ring, &ideal_congruence(n, d), &ideal_congruence(n, e))
                    .map_err(|e| e.to_string())?;
                let want = ideal_congruence(n, gcd(d * e, n));
                ensure!(got == want, "Z{n}: [({d}),({e})] gave {got}, expected {want}");
                pairs += 1;
            }
        }
    }
    let z4 = catalog::cyclic_ring(4);
    let two = ideal_congruence(4, 2);
    let c = c_commutator(&z4, &two, &two).map_err(|e| e.to_string())?;
    ensure!(c.is_bottom(), "Z4 [(2),(2)] = {c}");
    Ok(format!("{pairs} ideal pairs; Z4 [(2),(2)] = {c}"))
}

fn distributive_collapse() -> Outcome {
    let mut pairs = 0;
    for alg in lattice_catalog() {
        let l = con_all(&alg).map_err(|e| e.to_string())?;
        for a in l.elements() {
            for b in l.elements() {
                let got = c_commutator(&alg, a, b).map_err(|e| e.to_string())?;
                let want = a.meet(b).map_err(|e| e.to_string())?;
                ensure!(got == want, "{}: [{a},{b}] = {got}, meet is {want}", alg.name());
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn random_caps(rng: &mut ChaCha8Rng) -> Vec<(u64, Cap)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11] {
        if rng.gen_bool(0.3) {
            continue;
        }
        let c = if rng.gen_bool(0.2) {
            Cap::Infinite
        } else {
            Cap::Finite(rng.gen_range(0..12))
        };
        out.push((p, c));
    }
    out
}

fn z_filters() -> Outcome {
    let start = Instant::now();
    let primes = [2u64, 3, 5, 7];
    for &p in &primes {
        for &q in &primes {
            if p == q {
                continue;
            }
            let fp = ZIdealFilter::power_inf(p).map_err(|e| e.to_string())?;
            let fq = ZIdealFilter::power_inf(q).map_err(|e| e.to_string())?;
            let want = ZIdealFilter::power_inf(p * q).map_err(|e| e.to_string())?;
            let got = fp.commutator(&fq);
            ensure!(got == want, "({p}^inf)({q}^inf) = {got}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let (a, b, c) = (random_caps(&mut rng), random_caps(&mut rng), random_caps(&mut rng));
        let f1 = ZIdealFilter::from_caps(a).map_err(|e| e.to_string())?;
        let f2 = ZIdealFilter::from_caps(b).map_err(|e| e.to_string())?;
        let g = ZIdealFilter::from_caps(c).map_err(|e| e.to_string())?;
        for p in [2u64, 3, 5, 7, 11] {
            let (c1, c2, c3) = (f1.cap(p), f2.cap(p), g.cap(p));
            ensure!(
                c1.min(c2) + c3 == (c1 + c3).min(c2 + c3),
                "cap additivity fails at {p}: {c1} {c2} {c3}"
            );
        }
        let lhs = f1.join(&f2).commutator(&g);
        let rhs = f1.commutator(&g).join(&f2.commutator(&g));
        ensure!(lhs == rhs, "[{f1} v {f2}, {g}] = {lhs}, expected {rhs}");
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("12 prime pairs, 1000 random cap maps, {t}"))
}

fn term_machinery() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let z2 = catalog::cyclic_group(2);
    let p = match find_maltsev(&z2, &limits).map_err(|e| e.to_string())? {
        SearchOutcome::Found(p) => p,
        other => return Err(format!("no Mal'tsev term for Z2: {other:?}")),
    };
    let d = day_from_maltsev(&z2, &p.chain()[0]).map_err(|e| e.to_string())?;
    d.reverify(&z2).map_err(|e| format!("Day chain: {e}"))?;

    let c2 = catalog::chain_lattice(2);
    let j = find_jonsson(&c2, 4, &limits)
        .map_err(|e| e.to_string())?
        .found()
        .ok_or("no Jónsson chain for the 2-element lattice")?;
    j.reverify(&c2).map_err(|e| format!("Jónsson chain: {e}"))?;
    let tables: Vec<&[usize]> = j.chain().iter().map(|c| c.table.as_slice()).collect();
    ensure!(tables.len() == 3, "Jónsson chain of length {}", tables.len());
    let majority = unifcomm::algebra::all_tuples(2, 3)
        .map(|t| usize::from(t.iter().sum::<usize>() >= 2))
        .collect::<Vec<_>>();
    let proj = |i: usize| unifcomm::algebra::all_tuples(2, 3).map(|t| t[i]).collect::<Vec<_>>();
    ensure!(tables[0] == proj(0).as_slice(), "d0 is not x");
    ensure!(tables[1] == majority.as_slice(), "d1 is not the majority");
    ensure!(tables[2] == proj(2).as_slice(), "d2 is not z");

    let set2 = catalog::empty_signature(2);
    match find_day(&set2, 8, &limits).map_err(|e| e.to_string())? {
        SearchOutcome::NotFound { exhaustive: true } => {}
        other => return Err(format!("set2 Day search: {other:?}")),
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("Mal'tsev {}, Jónsson (x, maj, z), set2 exhausted; {t}", p.terms()[0]))
}

fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> BitRelation {
    let density = rng.gen_range(0.0..0.4);
    let mut r = BitRelation::empty(n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                r.insert(i, j);
            }
        }
    }
    r
}

fn uniformities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut algs = route_catalog();
    algs.push(catalog::klein_group());
    algs.push(catalog::dihedral_group_4());
    algs.push(catalog::chain_lattice(3));
    for alg in &algs {
        let n = alg.size();
        let l = con_all(alg).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let rho = random_relation(&mut rng, n);
            let pairs: Vec<(usize, usize)> = rho.pairs().collect();
            let cg_rho = cg(alg, &pairs).map_err(|e| e.to_string())?;
            let u = ug_of_relation(alg, &rho).map_err(|e| e.to_string())?;
            let v = ug_of_relation(alg, &cg_rho.to_relation()).map_err(|e| e.to_string())?;
            ensure!(u.equivalent(&v), "{}: Ug differs for {}", alg.name(), rho.to_literal());
            let oracle = l.least_containing(&pairs).ok_or("no congruence contains ρ")?;
            ensure!(
                u.base_meet() == oracle.to_relation(),
                "{}: Ug generator is not the least congruence above {}",
                alg.name(),
                rho.to_literal()
            );
        }
    }
    let eqs = all_partitions(4);
    let mut checked = 0;
    for a in &eqs {
        for b in &eqs {
            let f = RelationFilter::principal(a.to_relation());
            let g = RelationFilter::principal(b.to_relation());
            ensure!(semipermute_join_check(&f, &g).map_err(|e| e.to_string())?, "falsified for {a} and {b}");
            checked += 1;
        }
    }
    Ok(format!("{} algebras x 100 relations; {checked} principal pairs", algs.len()))
}

fn quotient_maps() -> Result<Vec<(FiniteAlgebra, Homomorphism)>, String> {
    let mut out = Vec::new();
    let mut algs = route_catalog();
    algs.push(catalog::klein_group());
    algs.push(catalog::chain_lattice(3));
    for alg in algs {
        let l = con_all(&alg).map_err(|e| e.to_string())?;
        for beta in l.elements() {
            out.push((alg.clone(), quotient(&alg, beta).map_err(|e| e.to_string())?.1));
        }
    }
    Ok(out)
}

fn pushforward() -> Outcome {
    let mut cases = 0;
    for (alg, f) in quotient_maps()? {
        let target = f.target().clone();
        let lt = con_all(&target).map_err(|e| e.to_string())?;
        for alpha in con_all(&alg).map_err(|e| e.to_string())?.elements() {
            let u = RelationFilter::principal(alpha.to_relation());
            let pushed = f.pushforward(&u, true).map_err(|e| e.to_string())?;
            let l = f.l_f_base(&alpha.to_relation()).map_err(|e| e.to_string())?;
            let lpairs: Vec<(usize, usize)> = l.pairs().collect();
            let ug_l = cg(&target, &lpairs).map_err(|e| e.to_string())?;
            let image: Vec<(usize, usize)> = alpha.to_relation().pairs().map(|(a, b)| (f.apply(a), f.apply(b))).collect();
            let least = lt.least_containing(&image).ok_or("no congruence contains f(α)")?;
            let ctx = || format!("{} -> {}, α = {alpha}", alg.name(), target.name());
            ensure!(pushed.base_meet() == ug_l.to_relation(), "{}: pushforward ≠ Ug(L_f)", ctx());
            ensure!(&ug_l == least, "{}: Ug(L_f) = {ug_l}, least is {least}", ctx());
            ensure!(u.leq(&f.preimage_filter(&pushed).map_err(|e| e.to_string())?), "{}: u ≰ f⁻¹(v)", ctx());
            cases += 1;
        }
    }
    Ok(format!("{cases} (map, congruence) cases"))
}

fn group_equivalence() -> Outcome {
    let mut bases = 0;
    for alg in [catalog::symmetric_group_3(), catalog::dihedral_group_4()] {
        let g = FiniteGroup::new(alg.clone()).map_err(|e| e.to_string())?;
        let subs = g.subgroups();
        let mut all: Vec<Vec<Subset>> = subs.iter().map(|s| vec![s.clone()]).collect();
        for (i, a) in subs.iter().enumerate() {
            for b in &subs[i + 1..] {
                all.push(vec![a.clone(), b.clone()]);
            }
        }
        for sets in all {
            let nb = NeighborhoodBase::new(&g, sets.clone()).map_err(|e| e.to_string())?;
            let rep = equivalence_theorem_check(&nb).map_err(|e| e.to_string())?;
            let normal = g.is_normal(&nb.meet());
            ensure!(rep.consistent(), "{}: base {sets:?} inconsistent: {:?}", alg.name(), rep.values);
            ensure!(rep.values[0] == normal, "{}: base {sets:?} gives {} but meet normal = {normal}", alg.name(), rep.values[0]);
            bases += 1;
        }
    }
    Ok(format!("{bases} subgroup bases"))
}

fn property_suites() -> Outcome {
    let mut checks = 0;
    let mut algs = route_catalog();
    algs.extend([catalog::klein_group(), catalog::chain_lattice(3), catalog::dihedral_group_4()]);
    for alg in &algs {
        let rep = property_suite(alg, &day(alg), &[Homomorphism::identity(alg)]).map_err(|e| e.to_string())?;
        ensure!(rep.holds(), "{}: {:?}", alg.name(), rep.failures);
        checks += rep.checks;
    }
    for (alg, f) in quotient_maps()? {
        let q = f.target().clone();
        let rep = property_suite(&q, &day(&q), &[f]).map_err(|e| e.to_string())?;
        ensure!(rep.holds(), "{} quotient {}: {:?}", alg.name(), q.name(), rep.failures);
        checks += rep.checks;
    }
    let z8 = catalog::cyclic_group(8);
    let l = con_all(&z8).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random_base = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..=3);
        (0..k).map(|_| l.get(rng.gen_range(0..l.len())).clone()).collect::<Vec<_>>()
    };
    let mut strict = 0;
    for _ in 0..200 {
        let f = CongruenceFilter::new(&z8, random_base(&mut rng)).map_err(|e| e.to_string())?;
        let g = CongruenceFilter::new(&z8, random_base(&mut rng)).map_err(|e| e.to_string())?;
        let rep = cucommu_inequality_check(&f, &g).map_err(|e| e.to_string())?;
        ensure!(rep.holds, "[Ug F, Ug G] ≤ Ug [F, G] fails: {} vs {}", rep.left, rep.right);
        strict += usize::from(rep.strict);
    }
    Ok(format!("{checks} property checks; 200 filter pairs ({strict} strict)"))
}

fn abelian() -> Outcome {
    let mut algs = abelian_catalog();
    algs.push(catalog::trivial());
    for alg in &algs {
        let top = Partition::top(alg.size());
        let c = c_commutator(alg, &top, &top).map_err(|e| e.to_string())?;
        ensure!(c.is_bottom(), "{}: [top,top] = {c}", alg.name());
    }
    Ok(format!("{} abelian algebras", algs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("route agreement", route_agreement),
        ("group oracle", group_oracle),
        ("ring oracle", ring_oracle),
        ("distributive collapse", distributive_collapse),
        ("Z filter layer", z_filters),
        ("term machinery", term_machinery),
        ("uniformities and joins", uniformities),
        ("pushforward", pushforward),
        ("group equivalence", group_equivalence),
        ("property suites", property_suites),
        ("abelian", abelian),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
