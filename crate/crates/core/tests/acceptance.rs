//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness so the lines
//! always reach the output.
//!
//! Criteria 4 and 10 are not met by any correct implementation. For them the harness prints FAIL
//! together with counterexamples, and each counterexample is confirmed by an independent brute
//! force. The process exits nonzero when an attainable criterion fails or when a reported
//! counterexample stops reproducing.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use cdga::quant::{finite_to_one_bound, four_lemma_fuzz, four_lemma_verify, random_diagram, CellComplex, LemmaKind, DEFAULT_WINDOW};
use cdga::rational::{max_abs, q, qf};
use cdga::repro::{density_brute_force, example1, example2, example3, Check};
use cdga::zoo::{builtin_model, builtin_pair, MODEL_IDS, PAIR_IDS};
use cdga::{
    cohomology, construct_w, extend_with_primitive, homotope_into_w, is_homotopy, obstruction, solve_primitive, weight_scaling, Interval,
    IntervalElement, QMatrix, Q,
};
use common::*;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};

/// Outcome of one criterion.
enum Verdict {
    Pass(String),
    /// Not attainable; the detail names counterexamples that were confirmed independently.
    Unattainable(String),
    Fail(String),
}

fn from_checks(checks: &[&Check]) -> Verdict {
    let detail = checks.iter().map(|c| format!("{}: {}", c.name, if c.pass { "ok" } else { &c.detail })).collect::<Vec<_>>().join(" | ");
    if checks.iter().all(|c| c.pass) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn c1_stokes() -> Verdict {
    let start = Instant::now();
    let mut rng = seeded(1);
    let mut n_checked = 0;
    for a in all_models() {
        let iv = Interval::new(&a);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=a.truncation());
            let u = random_interval(&mut rng, &a, n);
            let eq1 = iv.d(&iv.int_0_t(&u).unwrap()).unwrap().add(&iv.int_0_t(&iv.d(&u).unwrap()).unwrap());
            if eq1 != u.sub(&IntervalElement::constant(&iv.restrict(&u, 0).unwrap())) {
                return Verdict::Fail(format!("first identity fails on {u:?}"));
            }
            let eq2 = &a.d(&iv.int_0_1(&u).unwrap()).unwrap() + &iv.int_0_1(&iv.d(&u).unwrap()).unwrap();
            if eq2 != &iv.restrict(&u, 1).unwrap() - &iv.restrict(&u, 0).unwrap() {
                return Verdict::Fail(format!("second identity fails on {u:?}"));
            }
            n_checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("{n_checked} elements over {} models in {secs:.2} s", MODEL_IDS.len());
    if secs < 10.0 { Verdict::Pass(detail) } else { Verdict::Fail(detail) }
}

fn c2_sphere() -> Verdict {
    let dims: Vec<usize> = (0..=8).map(|n| cohomology(&s4(), n).unwrap().dimension()).collect();
    if dims == [1, 0, 0, 0, 1, 0, 0, 0, 0] { Verdict::Pass(format!("{dims:?}")) } else { Verdict::Fail(format!("{dims:?}")) }
}

fn c3_torsion() -> Verdict {
    let r = example1().unwrap();
    from_checks(&r.checks.iter().collect::<Vec<_>>())
}

fn c4_density(report: &cdga::repro::ReproReport) -> Verdict {
    let window = &report.checks[0];
    let oracle = &report.checks[1];
    if !oracle.pass {
        return Verdict::Fail(oracle.detail.clone());
    }
    if window.pass {
        return Verdict::Pass(format!("{}; {}", window.detail, oracle.detail));
    }
    // recount independently: the window misses only for |α₁| = |α₂| = 1, where the values fill [-2R, 2R]
    for a1 in -10i64..=10 {
        for a2 in -10i64..=10 {
            if num_integer::Integer::gcd(&a1, &a2) != 1 {
                continue;
            }
            let max = a1.abs().max(a2.abs());
            for r in [10i64, 20, 50] {
                let c = density_brute_force(a1, a2, r) as i64;
                let inside = 2 * max * r <= c && c <= 4 * max * r;
                let unit = a1.abs() == 1 && a2.abs() == 1;
                if inside == unit || (unit && c != 4 * r + 1) {
                    return Verdict::Fail(window.detail.clone());
                }
            }
        }
    }
    Verdict::Unattainable(format!(
        "{}; brute force confirms count = 4R+1 > 4R for |α₁| = |α₂| = 1, all other coprime directions inside; {}",
        window.detail, oracle.detail
    ))
}

fn c5_line(report: &cdga::repro::ReproReport) -> Verdict {
    from_checks(&[&report.checks[2]])
}

fn c6_c7(report: &cdga::repro::ReproReport) -> (Verdict, Verdict) {
    (from_checks(&[&report.checks[0], &report.checks[1], &report.checks[2]]), from_checks(&[&report.checks[3]]))
}

fn c7_direct_spot_check() -> bool {
    // second route: #{gcd = g} = ⌊N/g⌋² minus the counts for proper multiples of g
    let n = 10_000u64;
    let mut exact = vec![0u128; (n + 1) as usize];
    for g in (1..=n).rev() {
        let m = (n / g) as u128;
        let mut c = m * m;
        let mut j = 2 * g;
        while j <= n {
            c -= exact[j as usize];
            j += g;
        }
        exact[g as usize] = c;
    }
    (1..=100u64).all(|k| {
        let r = cdga::growth::gcd_proportion_bounds(n, k).unwrap();
        r.observed == Q::new(BigInt::from(exact[k as usize]), BigInt::from(n as u128 * n as u128))
    })
}

fn c8_obstruction() -> Verdict {
    let mut rng = seeded(2024);
    let (mut zero, mut nonzero) = (0, 0);
    for i in 0..200 {
        let p = random_problem(&mut rng);
        let o = obstruction(&p).unwrap();
        if o.is_zero() != direct_extension_exists(&p) {
            return Verdict::Fail(format!("problem {i}: class zero = {}, direct solve disagrees", o.is_zero()));
        }
        if o.is_zero() {
            zero += 1;
            let (ft, ht) = extend_with_primitive(&p, &solve_primitive(&o).unwrap()).unwrap();
            if !ft.is_valid() || !is_homotopy(&ht, &p.g, &p.h.compose(&ft).unwrap()) {
                return Verdict::Fail(format!("problem {i}: extension fails its checks"));
            }
        } else {
            nonzero += 1;
        }
    }
    Verdict::Pass(format!("200 problems, {zero} extendable, {nonzero} obstructed"))
}

fn c9_into_w() -> Verdict {
    let mut rng = seeded(8);
    let mut stages = 0;
    for id in PAIR_IDS {
        let pair = builtin_pair(id).unwrap();
        let (y, x) = (pair.y.algebra, pair.x.algebra);
        let w = construct_w(&x, &y).unwrap();
        let mut done = 0;
        while done < 100 {
            let Some(phi) = random_map(&mut rng, &y, &x) else { continue };
            let out = homotope_into_w(&phi, &w, false).unwrap();
            if !out.map.images().iter().all(|e| w.contains(e).unwrap()) {
                return Verdict::Fail(format!("{id}: output leaves Q[W]"));
            }
            if !is_homotopy(&out.homotopy, &phi, &out.map) {
                return Verdict::Fail(format!("{id}: homotopy check fails"));
            }
            if homotope_into_w(&out.map, &w, false).unwrap().map.images() != out.map.images() {
                return Verdict::Fail(format!("{id}: not idempotent"));
            }
            stages += out.trace.len();
            done += 1;
        }
    }
    Verdict::Pass(format!("100 maps for each of {} pairs, {stages} stage norms traced", PAIR_IDS.len()))
}

/// Most points of h(ℤⁿ), |z| ≤ 8, in one closed unit ball; a best ball slides until each lower face meets a point.
fn ball_count_oracle(m: &QMatrix) -> u64 {
    let n = m.ncols();
    let axis: Vec<i64> = (-8..=8).collect();
    let zs: Vec<Vec<i64>> = (0..n).fold(vec![vec![]], |acc, _| acc.iter().flat_map(|p| axis.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect());
    let pts: Vec<Vec<Q>> = zs.iter().map(|z| m.mul_vec(&z.iter().map(|&c| q(c)).collect::<Vec<_>>())).collect();
    let faces: Vec<Vec<Q>> = (0..m.nrows()).map(|i| pts.iter().map(|p| &p[i] + q(1)).collect::<HashSet<_>>().into_iter().collect()).collect();
    let centers = faces.iter().fold(vec![vec![]], |acc: Vec<Vec<Q>>, ax| acc.iter().flat_map(|p| ax.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect());
    centers
        .iter()
        .map(|c| pts.iter().filter(|p| max_abs(p.iter().zip(c).map(|(a, b)| a - b).collect::<Vec<_>>().iter()) <= q(1)).count() as u64)
        .max()
        .unwrap_or(1)
}

fn c10_four_lemmas() -> Verdict {
    let runs = 500;
    let sur = four_lemma_fuzz(LemmaKind::Surjective, runs, 0, DEFAULT_WINDOW);
    let inj = four_lemma_fuzz(LemmaKind::Injective, runs, 0, DEFAULT_WINDOW);
    let inconclusive_ok = sur.inconclusive * 20 < runs && inj.inconclusive * 20 < runs;
    // replay the injective runs and confirm each violation by brute force
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut confirmed = Vec::new();
    for i in 0..runs {
        let d = random_diagram(&mut rng);
        let Ok(r) = four_lemma_verify(&d, LemmaKind::Injective, DEFAULT_WINDOW) else { continue };
        if r.ok {
            continue;
        }
        let predicted = cdga::rational::parse_q(&r.predicted).unwrap();
        let oracle = ball_count_oracle(&d.phi[2]);
        if q(oracle as i64) <= predicted || r.measured != oracle.to_string() {
            return Verdict::Fail(format!("run {i}: violation not confirmed (measured {}, oracle {oracle}, predicted {})", r.measured, r.predicted));
        }
        confirmed.push(format!("run {i}: τ={} C={:?} predicted {} measured {}", r.tau, r.constants, r.predicted, r.measured));
    }
    let detail = format!(
        "surjective {}/{} ok, {} violations, {} inconclusive; injective {}/{} ok, {} violations ({} even with constants floored at 1), {} inconclusive",
        sur.ok,
        runs,
        sur.violations.len(),
        sur.inconclusive,
        inj.ok,
        runs,
        inj.violations.len(),
        inj.unit_floor_violations,
        inj.inconclusive
    );
    if !sur.violations.is_empty() || !inconclusive_ok || confirmed.len() != inj.violations.len() {
        return Verdict::Fail(detail);
    }
    if confirmed.is_empty() {
        return Verdict::Pass(detail);
    }
    Verdict::Unattainable(format!("{detail}; brute force confirms: {}", confirmed.join("; ")))
}

fn c11_weights() -> Verdict {
    let mut rng = seeded(11);
    for id in MODEL_IDS {
        let a = builtin_model(id).unwrap().algebra;
        for _ in 0..20 {
            let mut nz = || loop {
                let x = qf(rng.gen_range(-9..=9), rng.gen_range(1..=5));
                if x != q(0) {
                    return x;
                }
            };
            let (s, t) = (nz(), nz());
            let (fs, ft, fst) = (weight_scaling(&a, &s).unwrap(), weight_scaling(&a, &t).unwrap(), weight_scaling(&a, &(&s * &t)).unwrap());
            if !fs.is_valid() || !ft.is_valid() {
                return Verdict::Fail(format!("{id}: scaling by {s} or {t} is not a DGA map"));
            }
            if fs.compose(&ft).unwrap().images() != fst.images() {
                return Verdict::Fail(format!("{id}: composition fails for ({s}, {t})"));
            }
        }
    }
    Verdict::Pass(format!("{} models, 20 pairs each", MODEL_IDS.len()))
}

fn c12_finite_to_one() -> Verdict {
    let s1 = CellComplex::new(vec![1, 1], vec![vec![], vec![vec![0]]]).unwrap();
    let s2 = CellComplex::new(vec![1, 0, 1], vec![vec![], vec![vec![]], vec![]]).unwrap();
    let rp2 = CellComplex::new(vec![1, 1, 1], vec![vec![], vec![vec![0]], vec![vec![2]]]).unwrap();
    let torus = CellComplex::new(vec![1, 2, 1], vec![vec![], vec![vec![0, 0]], vec![vec![0], vec![0]]]).unwrap();
    let a = finite_to_one_bound(&s1, &[vec![], vec![3]]).unwrap();
    let b = finite_to_one_bound(&s2, &[vec![], vec![], vec![2]]).unwrap();
    if a != BigInt::from(3) || b != BigInt::from(2) {
        return Verdict::Fail(format!("circle {a}, sphere {b}"));
    }
    let coeffs = [vec![], vec![2, 3], vec![2, 4]];
    let xs = [&s1, &s2, &rp2, &torus];
    for x in xs {
        for y in xs {
            let both = finite_to_one_bound(&x.disjoint_union(y), &coeffs).unwrap();
            if both != finite_to_one_bound(x, &coeffs).unwrap() * finite_to_one_bound(y, &coeffs).unwrap() {
                return Verdict::Fail("not multiplicative on a disjoint union".into());
            }
        }
    }
    Verdict::Pass("|H¹(S¹;Z/3)| = 3, |H²(S²;Z/2)| = 2, multiplicative on 16 unions".into())
}

fn main() -> ExitCode {
    let ex2 = example2().unwrap();
    let ex3 = example3().unwrap();
    let (c6, mut c7) = c6_c7(&ex3);
    if matches!(c7, Verdict::Pass(_)) && !c7_direct_spot_check() {
        c7 = Verdict::Fail("totient route disagrees with the inclusion-exclusion count".into());
    }
    let results: Vec<(u32, &str, Verdict)> = vec![
        (1, "Stokes identities", c1_stokes()),
        (2, "sphere cohomology", c2_sphere()),
        (3, "torsion growth", c3_torsion()),
        (4, "density growth", c4_density(&ex2)),
        (5, "homotopy line", c5_line(&ex2)),
        (6, "growth function", c6),
        (7, "gcd proportions", c7),
        (8, "obstruction vs extension", c8_obstruction()),
        (9, "homotope into W", c9_into_w()),
        (10, "quantitative four lemmas", c10_four_lemmas()),
        (11, "positive weights", c11_weights()),
        (12, "finite-to-one bound", c12_finite_to_one()),
    ];
    let mut broken = false;
    let mut passed = 0;
    for (n, name, v) in &results {
        match v {
            Verdict::Pass(d) => {
                passed += 1;
                println!("PASS criterion {n} ({name}): {d}");
            }
            Verdict::Unattainable(d) => println!("FAIL criterion {n} ({name}): unattainable, {d}"),
            Verdict::Fail(d) => {
                broken = true;
                println!("FAIL criterion {n} ({name}): {d}");
            }
        }
    }
    println!("acceptance: {passed} of {} criteria pass", results.len());
    if broken { ExitCode::FAILURE } else { ExitCode::SUCCESS }
}
