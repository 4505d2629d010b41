//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use multipoints::cli::scan_singular_points;
use multipoints::curves::{codomain_from_kernel_polynomial, standard_model, CurveModel};
use multipoints::elkies::{elkies_quotient, j_prime_of_model, model_from_jtilde_prime, root_of_model};
use multipoints::fields::{Fe, Field};
use multipoints::kernelpoly::{kernel_polynomial, kernel_polynomials_all};
use multipoints::modpoly::{builtin_table, builtin_text, check_j, ModularPolyTable, SingularPointData, SUPPORTED_ELLS};
use multipoints::multipoint::{fiber_polynomial, isogenous_models, MultipointOptions};
use multipoints::oracle::{cross_check, CrossCheckStatus};
use multipoints::poly::Poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C1_LIMIT: Duration = Duration::from_secs(1);
const C2_LIMIT: Duration = Duration::from_secs(5);
const C3_LIMIT: Duration = Duration::from_secs(120);
const C4_LIMIT: Duration = Duration::from_secs(300);
const C5_LIMIT: Duration = Duration::from_secs(120);
const C6_LIMIT: Duration = Duration::from_secs(10);

const SCAN_PRIMES: [u64; 3] = [137, 211, 1009];
const SCAN_ELLS: [u64; 4] = [2, 3, 5, 7];
const C4_MIN_POINTS: usize = 25;
const C5_PAIRS: usize = 200;
const C7_TRIPLES: usize = 1000;

type Outcome = Result<String, String>;

/// A kernel together with the isogeny it is claimed to define.
struct KernelRecord {
    source: &'static str,
    domain: CurveModel,
    codomain: CurveModel,
    ell: u64,
    kernel: Poly,
}

struct Suite {
    kernels: Vec<KernelRecord>,
    scanned: Vec<(u64, SingularPointData)>,
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, limit: Option<Duration>, f: impl FnOnce(&mut Suite) -> Outcome) {
        let start = Instant::now();
        let mut outcome = f(self);
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS {id}: {msg} ({elapsed:.2?})"),
            Err(msg) => {
                self.failures += 1;
                println!("FAIL {id}: {msg} ({elapsed:.2?})");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn el(k: &Field, s: &str) -> Fe {
    k.parse_element(s).unwrap()
}

fn c1(s: &mut Suite) -> Outcome {
    let k = Field::parse("137^2:3,131,1").map_err(err)?;
    let e = CurveModel::from_u64(&k, 19, 65).map_err(err)?;
    let (j1, j2) = (k.from_u64(136), k.from_u64(22));
    ensure(e.j_invariant() == j1, || format!("j(E) = {}", e.j_invariant().encode()))?;
    let jp = j_prime_of_model(&e).map_err(err)?;
    ensure(jp.value == k.from_u64(61), || format!("j1' = {}", jp.value.encode()))?;

    let phi = builtin_table(5).map_err(err)?.reduce(&k);
    let fp = fiber_polynomial(&phi, &j1, &j2, &jp, false).map_err(err)?;
    let got: Vec<Fe> = [(2, 0), (1, 1), (0, 2)].iter().map(|&(u, v)| fp.point.partial(u, v).unwrap().clone()).collect();
    ensure(got == [k.from_u64(79), k.from_u64(6), k.from_u64(5)], || format!("partials {got:?}"))?;
    ensure(fp.poly == Poly::from_u64s(&k, &[94, 98, 125]), || format!("F_P = {}", fp.poly.encode()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let opts = MultipointOptions { with_kernels: true, ..Default::default() };
    let r = isogenous_models(&e, 5, &j2, &opts, &mut rng).map_err(err)?;
    let mut roots = r.roots.clone();
    roots.sort();
    let mut want = vec![el(&k, "134w+93"), el(&k, "3w+75")];
    want.sort();
    ensure(roots == want, || format!("roots {:?}", r.roots))?;

    // The printed second model has a digit typo in A; its j-invariant is not 22.
    let printed = CurveModel::new(el(&k, "105w+136"), el(&k, "122w+89")).map_err(err)?;
    ensure(printed.j_invariant() != j2, || "printed model unexpectedly has j = 22".into())?;
    let m1 = CurveModel::new(el(&k, "32w+118"), el(&k, "15w+136")).map_err(err)?;
    let m2 = CurveModel::new(el(&k, "105w+36"), el(&k, "122w+89")).map_err(err)?;
    let f1 = Poly::from_coeffs(&k, vec![el(&k, "107w+66"), el(&k, "32w+84"), k.one()]);
    let f2 = Poly::from_coeffs(&k, vec![el(&k, "30w+23"), el(&k, "105w+2"), k.one()]);
    let kernels = r.kernels.clone().ok_or("kernels missing")?;
    for (model, kernel) in [(&m1, &f1), (&m2, &f2)] {
        let i = r.models.iter().position(|m| m == model).ok_or_else(|| format!("model {model:?} missing"))?;
        let h = kernels[i].clone().ok_or("kernel missing")?;
        ensure(&h == kernel, || format!("kernel {} != {}", h.encode(), kernel.encode()))?;
        s.kernels.push(KernelRecord { source: "C1", domain: e.clone(), codomain: model.clone(), ell: 5, kernel: h });
    }
    ensure(r.models.len() == 2, || format!("{} models", r.models.len()))?;
    Ok("j1'=61, partials (79,6,5), F_P, roots, models and kernels reproduced".into())
}

fn c2(s: &mut Suite) -> Outcome {
    let f = Field::parse("13^2").map_err(err)?;
    let e = CurveModel::from_u64(&f, 1, 4).map_err(err)?;
    let et = CurveModel::from_u64(&f, 12, 7).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let found = kernel_polynomials_all(&e, &et, 5, &mut rng).map_err(err)?;
    let quartic = Poly::from_u64s(&f, &[6, 12, 9, 10, 1]);
    let mut factors: Vec<Poly> = quartic.factor(&mut rng).into_iter().map(|(g, _)| g).collect();
    factors.sort_by(|a, b| a.canonical_cmp(b));
    ensure(factors.len() == 2 && factors.iter().all(|g| g.degree() == Some(2)), || {
        format!("quartic factors as {:?}", factors.iter().map(Poly::encode).collect::<Vec<_>>())
    })?;
    ensure(found == factors, || format!("kernels {:?}", found.iter().map(Poly::encode).collect::<Vec<_>>()))?;
    for h in found {
        s.kernels.push(KernelRecord { source: "C2", domain: e.clone(), codomain: et.clone(), ell: 5, kernel: h });
    }
    Ok("two normalized 5-isogenies E -> E~ with kernels the quadratic factors of the quartic".into())
}

fn c3(s: &mut Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = Vec::new();
    for &p in &SCAN_PRIMES {
        let f = Field::prime(p).map_err(err)?;
        for &ell in &SCAN_ELLS {
            if p <= 4 * ell {
                continue;
            }
            let phi = builtin_table(ell).map_err(err)?.reduce(&f);
            for pt in scan_singular_points(&phi, 0..p, &mut rng).map_err(err)? {
                let m = pt.m;
                let partials = phi.partials_up_to(m, &pt.j1, &pt.j2);
                let low = partials.iter().all(|(&(u, v), x)| u + v >= m || x.is_zero());
                let top = !partials[&(m, 0)].is_zero() && !partials[&(0, m)].is_zero();
                if !(low && top) {
                    violations.push(format!("p={p} ell={ell} ({},{}) m={m}", pt.j1.encode(), pt.j2.encode()));
                }
                s.scanned.push((ell, pt));
            }
        }
    }
    ensure(!s.scanned.is_empty(), || "scan found no singular points".into())?;
    ensure(violations.is_empty(), || format!("{} violations: {:?}", violations.len(), violations))?;
    Ok(format!("{} singular points, 0 violations", s.scanned.len()))
}

fn c4(s: &mut Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut equal, mut skipped) = (0usize, 0usize);
    let mut failures = Vec::new();
    let points = std::mem::take(&mut s.scanned);
    for (ell, pt) in &points {
        let e = standard_model(&pt.j1);
        let r = cross_check(&e, *ell, &pt.j2, &MultipointOptions::default(), &mut rng).map_err(err)?;
        match r.status {
            CrossCheckStatus::SetEqual => {
                equal += 1;
                let ew = e.base_change(&r.report.embedding);
                for (model, h) in r.report.models.iter().zip(r.report.kernels.iter().flatten()) {
                    let h = h.clone().ok_or("kernel missing after SET_EQUAL")?;
                    s.kernels.push(KernelRecord { source: "C4", domain: ew.clone(), codomain: model.clone(), ell: *ell, kernel: h });
                }
            }
            CrossCheckStatus::Incomplete => skipped += 1,
            CrossCheckStatus::Mismatch => failures.push(format!("ell={ell} ({},{})", pt.j1.encode(), pt.j2.encode())),
        }
    }
    s.scanned = points;
    ensure(failures.is_empty(), || format!("mismatches at {failures:?}"))?;
    ensure(equal >= C4_MIN_POINTS, || format!("only {equal} comparable points"))?;
    Ok(format!("{equal} points SET_EQUAL with kernel agreement, {skipped} need a larger extension"))
}

fn twist<R: Rng>(e: &CurveModel, rng: &mut R) -> CurveModel {
    let u = e.field().random_nonzero(rng);
    let u2 = u.square();
    CurveModel::new(e.a() * &u2.square(), e.b() * &(&u2.square() * &u2)).unwrap()
}

fn c5(s: &mut Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = 0;
    for &p in &SCAN_PRIMES {
        let f = Field::prime(p).map_err(err)?;
        for &ell in &SCAN_ELLS {
            if p <= 4 * ell {
                continue;
            }
            let phi = builtin_table(ell).map_err(err)?.reduce(&f);
            let mut done = 0;
            while done < C5_PAIRS {
                let j1 = f.random(&mut rng);
                if check_j(&j1).is_err() {
                    continue;
                }
                let simple: Vec<Fe> = phi
                    .instantiate_y(&j1)
                    .roots_in_field(&mut rng)
                    .into_iter()
                    .filter(|(j, m)| *m == 1 && check_j(j).is_ok())
                    .map(|(j, _)| j)
                    .collect();
                if simple.is_empty() {
                    continue;
                }
                let j2 = simple[rng.gen_range(0..simple.len())].clone();
                let e = twist(&standard_model(&j1), &mut rng);
                let r = isogenous_models(&e, ell, &j2, &MultipointOptions::default(), &mut rng).map_err(err)?;
                let jp = j_prime_of_model(&e).map_err(err)?;
                let q = elkies_quotient(&phi, &j1, &j2, &jp).map_err(err)?;
                ensure(r.m == 1 && r.roots == [q.clone()], || {
                    format!("p={p} ell={ell} j1={} j2={}: roots {:?} vs quotient {}", j1.encode(), j2.encode(), r.roots, q.encode())
                })?;
                let model = r.models[0].clone();
                let h = kernel_polynomial(&e, &model, ell).map_err(|x| format!("p={p} ell={ell}: {x}"))?;
                let psi = if ell == 2 { e.rhs_poly() } else { e.division_polynomial(ell as usize) };
                ensure(h.divides(&psi), || format!("p={p} ell={ell}: kernel does not divide psi"))?;
                s.kernels.push(KernelRecord { source: "C5", domain: e, codomain: model, ell, kernel: h });
                done += 1;
                total += 1;
            }
        }
    }
    Ok(format!("{total} nonsingular pairs: root equals the Elkies quotient, kernel divides psi"))
}

fn c6(_: &mut Suite) -> Outcome {
    let mut summary = Vec::new();
    for &ell in &SUPPORTED_ELLS {
        let text = builtin_text(ell).ok_or_else(|| format!("no table for ell={ell}"))?;
        let table = ModularPolyTable::parse(text).map_err(err)?;
        ensure(table.ell() == ell, || format!("header ell={} for {ell}", table.ell()))?;
        for c in table.checks() {
            ensure(c.passed, || format!("ell={ell}: {} check failed", c.name))?;
        }
        summary.push(ell.to_string());
    }
    Ok(format!("symmetry, degree and Kronecker checks pass for ell in {{{}}}", summary.join(",")))
}

fn c7(_: &mut Suite) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fields = [Field::parse("137^2:3,131,1").map_err(err)?, Field::prime(1009).map_err(err)?, Field::prime(211).map_err(err)?];
    let mut done = 0;
    while done < C7_TRIPLES {
        let f = &fields[done % fields.len()];
        let r = f.random_nonzero(&mut rng);
        let j2 = f.random(&mut rng);
        if check_j(&j2).is_err() {
            continue;
        }
        let ell = SUPPORTED_ELLS[rng.gen_range(0..SUPPORTED_ELLS.len())];
        let m = model_from_jtilde_prime(&r, &j2, ell).map_err(err)?;
        ensure(m.j_invariant() == j2, || format!("j mismatch for r={} j2={} ell={ell}", r.encode(), j2.encode()))?;
        let back = root_of_model(&m, &j2, ell).map_err(err)?;
        ensure(back == r, || format!("round trip {} -> {} for ell={ell}", r.encode(), back.encode()))?;
        done += 1;
    }
    Ok(format!("{C7_TRIPLES} triples round-trip with the requested j-invariant"))
}

fn c8(s: &mut Suite) -> Outcome {
    ensure(!s.kernels.is_empty(), || "no kernels were collected".into())?;
    let mut by_source = std::collections::BTreeMap::<&str, usize>::new();
    for rec in &s.kernels {
        let cod = codomain_from_kernel_polynomial(&rec.domain, &rec.kernel).map_err(err)?;
        ensure(cod == rec.codomain, || format!("{}: Velu gives {cod:?}, expected {:?}", rec.source, rec.codomain))?;
        let psi = if rec.ell == 2 { rec.domain.rhs_poly() } else { rec.domain.division_polynomial(rec.ell as usize) };
        ensure(rec.kernel.divides(&psi), || format!("{}: kernel {} does not divide psi", rec.source, rec.kernel.encode()))?;
        *by_source.entry(rec.source).or_default() += 1;
    }
    Ok(format!("{} kernels reproduce their codomains exactly ({by_source:?})", s.kernels.len()))
}

fn main() {
    let mut suite = Suite { kernels: Vec::new(), scanned: Vec::new(), failures: 0 };
    suite.run("C1 worked example over F_137^2", Some(C1_LIMIT), c1);
    suite.run("C2 two isogenies between fixed models over F_169", Some(C2_LIMIT), c2);
    suite.run("C3 partials at scanned singular points", Some(C3_LIMIT), c3);
    suite.run("C4 fiber models equal oracle codomains", Some(C4_LIMIT), c4);
    suite.run("C5 multiplicity one agrees with the Elkies step", Some(C5_LIMIT), c5);
    suite.run("C6 modular polynomial database integrity", Some(C6_LIMIT), c6);
    suite.run("C7 model/root round trip", None, c7);
    suite.run("C8 kernels reproduce codomains", None, c8);
    if suite.failures > 0 {
        println!("{} criteria failed", suite.failures);
        std::process::exit(1);
    }
}
