//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! nonzero status if any criterion fails.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use cf_lattice::diophantine::{bareiss_determinant, hnf_solve};
use cf_lattice::fading::{ida_decode, LikelihoodGeometry, ScaledObservation};
use cf_lattice::gaussian::{build_sum_codebook, map_metric, mmse_gdfe_filters, pairwise_error_prob, union_bound, GaussianReceiver};
use cf_lattice::lattice::{closest_point, minimum_distance, IntegerBox};
use cf_lattice::selection::{optimal_alpha, optimal_coefficients};
use cf_lattice::sim::config::{GaussianPlan, SimConfig};
use cf_lattice::sim::profile::likelihood_profile_for;
use cf_lattice::sim::{run_gaussian_trial, sweep_fading, sweep_gaussian, ErrorRateCurve, FadingDecoder, FadingPlan};
use cf_lattice::{ChannelRealization, GaussianDecoder, LatticeError, NestedLatticeCode, NoiseRatio};
use common::{brute_cvp, brute_ida, cube_code, eleven_point_code, random_basis};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SEED: u64 = 20_240_601;
const TIE_REL: f64 = 1e-3;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn curve<'a>(curves: &'a [ErrorRateCurve], name: &str) -> &'a ErrorRateCurve {
    curves.iter().find(|c| c.decoder == name).unwrap()
}

fn pe_at(c: &ErrorRateCurve, snr: f64) -> &cf_lattice::sim::RatePoint {
    c.points.iter().find(|p| (p.snr_db - snr).abs() < 1e-9).unwrap()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |x| format!("{x:.3}"))
}

fn cvp_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0;
    let instances = 1000;
    for _ in 0..instances {
        let n = rng.random_range(1..=4);
        let lat = random_basis(&mut rng, n);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let b = IntegerBox::symmetric(n, 5);
        let got = closest_point(&lat, &y, Some(&b)).unwrap();
        if got.coeffs != brute_cvp(&lat, &y, &b).0 {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("{instances} instances, {mismatches} mismatches"))
}

fn ida_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let s = 5;
    let power = (s * (s + 1)) as f64 / 3.0;
    let (mut checked, mut mismatches, mut degenerate) = (0, 0, 0);
    while checked < 1000 {
        let h = [normal(&mut rng), normal(&mut rng)];
        let snr_db = rng.random_range(0.0..50.0);
        let ch = ChannelRealization::from_snr_db(h.to_vec(), snr_db, power).unwrap();
        let a = optimal_coefficients(&ch).unwrap();
        let alpha = optimal_alpha(&ch, &a).unwrap();
        let x = [rng.random_range(-s..=s), rng.random_range(-s..=s)];
        let y = h[0] * x[0] as f64 + h[1] * x[1] as f64 + ch.noise_var().sqrt() * normal(&mut rng);
        let obs = ScaledObservation::new(y, h, ch.noise_var(), alpha);
        let geom = LikelihoodGeometry::new(&obs, &a, s).unwrap();
        match ida_decode(&obs, &geom) {
            Ok(d) => {
                checked += 1;
                let want = brute_ida(&geom, &obs);
                if (d.t, d.k) != (want.t, want.k) {
                    mismatches += 1;
                }
            }
            Err(LatticeError::DegenerateGeometry(_)) => degenerate += 1,
            Err(e) => panic!("{e}"),
        }
    }
    verdict(mismatches == 0, format!("{checked} trials, {mismatches} mismatches, {degenerate} degenerate skipped"))
}

fn fading_sweep(s_m: i64) -> Vec<ErrorRateCurve> {
    let plan = FadingPlan {
        s_m,
        seed: SEED + 2,
        snr_db: (0..=5).map(|i| 20.0 + 5.0 * i as f64).collect(),
        max_trials: 100_000,
        target_errors: 0,
        batch: 2048,
        decoders: vec![FadingDecoder::Conventional, FadingDecoder::Ida],
        fixed_h: None,
        a_bound: None,
    };
    sweep_fading(&plan)
}

fn describe(c: &ErrorRateCurve) -> String {
    c.points.iter().map(|p| format!("{}:{:.2e}", p.snr_db, p.pe)).collect::<Vec<_>>().join(" ")
}

fn fading_floor(curves: &[ErrorRateCurve]) -> Verdict {
    let conv = curve(curves, "conventional");
    let ida = curve(curves, "ida");
    let low = pe_at(conv, 20.0).interval().overlaps(&pe_at(ida, 20.0).interval());
    let drop = |c: &ErrorRateCurve| pe_at(c, 35.0).pe / pe_at(c, 45.0).pe;
    let (dc, di) = (drop(conv), drop(ida));
    verdict(
        low && dc < 2.0 && di > 5.0,
        format!(
            "CIs overlap at 20 dB: {low}; 35->45 dB drop conventional x{dc:.2} (< 2), ida x{di:.2} (> 5); conventional [{}]; ida [{}]",
            describe(conv),
            describe(ida)
        ),
    )
}

fn fading_slope(s5: &[ErrorRateCurve], s10: &[ErrorRateCurve]) -> Verdict {
    let d5 = curve(s5, "ida").diversity(30.0);
    let d10 = curve(s10, "ida").diversity(30.0);
    let ok5 = d5.is_some_and(|d| (d - 1.0).abs() <= 0.3);
    let ok10 = d10.is_some_and(|d| (d - 0.5).abs() <= 0.2);
    verdict(
        ok5 && ok10,
        format!("ida diversity over 30-45 dB: S=5 {} (1.0 +- 0.3), S=10 {} (0.5 +- 0.2); S=10 ida [{}]", fmt_opt(d5), fmt_opt(d10), describe(curve(s10, "ida"))),
    )
}

fn gaussian_plan(code: NestedLatticeCode, snr_db: Vec<f64>, decoders: Vec<GaussianDecoder>, max_trials: u64, target: u64) -> GaussianPlan {
    let sum = build_sum_codebook(&code, 2).unwrap();
    GaussianPlan { code, sum, seed: SEED + 3, snr_db, max_trials, target_errors: target, batch: 2048, decoders }
}

fn map_equivalence() -> Verdict {
    let code = eleven_point_code();
    let snr: Vec<f64> = (0..=20).map(f64::from).collect();
    let plan = gaussian_plan(code, snr.clone(), vec![GaussianDecoder::Map, GaussianDecoder::MapGdfe], 0, 0);
    let mut disagree = 0;
    let mut trials = 0;
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for (i, &db) in snr.iter().enumerate() {
        let rx = GaussianReceiver::new(&plan.code, &plan.sum, plan.noise_var(db)).unwrap();
        for t in 0..500 {
            let r = run_gaussian_trial(&plan, &rx, i as u32, t);
            trials += 1;
            if r.outcomes[0].decision != r.outcomes[1].decision {
                disagree += 1;
            }
            let y: Vec<f64> = (0..2).map(|_| rng.random_range(-30.0..30.0)).collect();
            let lambda = &plan.sum.points()[rng.random_range(0..plan.sum.len())];
            let f = rx.filters();
            let n = map_metric(lambda, &y, rx.beta());
            let rel = (n - f.filtered_distance(&y, lambda) - f.offset(&y)).abs() / n;
            worst = worst.max(rel);
        }
    }
    verdict(
        disagree == 0 && worst < 1e-9,
        format!("{trials} trials, {disagree} disagreements; worst relative residual {worst:.2e} (< 1e-9)"),
    )
}

fn filter_identities() -> Verdict {
    let code = eleven_point_code();
    let sum = build_sum_codebook(&code, 2).unwrap();
    let s2 = sum.sigma_s2();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let samples = 10_000;
    let mut ok = true;
    let mut notes = Vec::new();
    for beta in [0.1, 0.5, 1.0, 2.0] {
        let f = mmse_gdfe_filters(NoiseRatio::new(beta).unwrap(), 2);
        let i = DMatrix::<f64>::identity(2, 2);
        let e1 = (f.backward.transpose() * &f.backward - &i * (1.0 + beta * beta)).abs().max();
        let e2 = (f.forward.transpose() * &f.backward - &i).abs().max();
        let sigma = beta * s2.sqrt();
        let draws: Vec<f64> = (0..samples)
            .map(|_| {
                let lambda = &sum.points()[sample_index(&mut rng, sum.pmf())];
                let z = [sigma * normal(&mut rng), sigma * normal(&mut rng)];
                f.effective_noise(lambda, &z)
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / samples as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let se = (var / samples as f64).sqrt();
        let want = s2 * beta * beta;
        let within = (mean - want).abs() <= 3.0 * se;
        ok &= e1 < 1e-12 && e2 < 1e-12 && within;
        notes.push(format!("beta={beta}: {mean:.4} vs {want:.4} ({:.2} se)", (mean - want).abs() / se));
    }
    verdict(ok, notes.join("; "))
}

fn sample_index(rng: &mut ChaCha8Rng, pmf: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    pmf.len() - 1
}

/// Horizontal distance at every error rate measured on `a` that `b` also covers.
fn max_horizontal_gap(a: &ErrorRateCurve, b: &ErrorRateCurve) -> f64 {
    a.points
        .iter()
        .filter(|p| p.errors > 0)
        .filter_map(|p| b.snr_at(p.pe).map(|s| (s - p.snr_db).abs()))
        .fold(0.0, f64::max)
}

fn small_code_curves() -> (GaussianPlan, Vec<ErrorRateCurve>) {
    let plan = gaussian_plan(
        eleven_point_code(),
        (0..=20).map(f64::from).collect(),
        vec![GaussianDecoder::Map, GaussianDecoder::ExhaustiveMap, GaussianDecoder::Conventional],
        200_000,
        400,
    );
    let curves = sweep_gaussian(&plan).unwrap();
    (plan, curves)
}

fn small_code_gap(curves: &[ErrorRateCurve]) -> Verdict {
    let map = curve(curves, "map");
    let conv = curve(curves, "conventional");
    let exh = curve(curves, "exhaustive-map");
    let gap = conv.snr_at(0.1).zip(map.snr_at(0.1)).map(|(c, m)| c - m);
    let exact = max_horizontal_gap(map, exh);
    verdict(
        gap.is_some_and(|g| (g - 0.5).abs() <= 0.3) && exact < 0.2,
        format!("conventional - MAP at Pe=1e-1: {} dB (0.5 +- 0.3); max |MAP - exhaustive MAP| {exact:.3} dB (< 0.2)", fmt_opt(gap)),
    )
}

fn cube_code_gap() -> Verdict {
    let plan = gaussian_plan(
        cube_code(),
        (0..=10).map(|i| 12.0 + 0.5 * i as f64).collect(),
        vec![GaussianDecoder::Map, GaussianDecoder::Conventional],
        1_000_000,
        300,
    );
    let curves = sweep_gaussian(&plan).unwrap();
    let gap = curve(&curves, "conventional").snr_at(1e-3).zip(curve(&curves, "map").snr_at(1e-3)).map(|(c, m)| c - m);
    verdict(
        gap.is_some_and(|g| (g - 1.0).abs() <= 0.5),
        format!("conventional - MAP at Pe=1e-3: {} dB (1.0 +- 0.5)", fmt_opt(gap)),
    )
}

fn union_bound_check(plan: &GaussianPlan, curves: &[ErrorRateCurve]) -> Verdict {
    let d_min = minimum_distance(plan.code.fine()).unwrap();
    let mut violations = Vec::new();
    let mut compared = 0;
    for name in ["map", "exhaustive-map"] {
        for p in &curve(curves, name).points {
            let ub = union_bound(&plan.sum, d_min, plan.noise_var(p.snr_db).sqrt());
            if ub <= 1.0 {
                compared += 1;
                if ub < p.pe {
                    violations.push(format!("{name}@{}dB {ub:.3e} < {:.3e}", p.snr_db, p.pe));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let samples = 1_000_000u64;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let i = rng.random_range(0..plan.sum.len());
        let lambda = &plan.sum.points()[i];
        let near: Vec<usize> = (0..plan.sum.len())
            .filter(|&j| j != i && dist(lambda, &plan.sum.points()[j]) <= 2.5 * d_min)
            .collect();
        let j = near[rng.random_range(0..near.len())];
        let hat = &plan.sum.points()[j];
        let d = dist(lambda, hat);
        let sigma = d / (2.0 * rng.random_range(0.5..2.0));
        let (p, ph) = (plan.sum.pmf()[i], plan.sum.pmf()[j]);
        let want = pairwise_error_prob(lambda, hat, sigma, p, ph).unwrap();
        let thr = 2.0 * sigma * sigma * (ph / p).ln();
        let mut hits = 0u64;
        for _ in 0..samples {
            let z = [sigma * normal(&mut rng), sigma * normal(&mut rng)];
            let to_hat: f64 = (0..2).map(|k| (lambda[k] + z[k] - hat[k]).powi(2)).sum();
            let to_true = z[0] * z[0] + z[1] * z[1];
            if to_hat - to_true < thr {
                hits += 1;
            }
        }
        let mc = hits as f64 / samples as f64;
        let se = (want * (1.0 - want) / samples as f64).sqrt();
        worst = worst.max((mc - want).abs() / se);
    }
    verdict(
        violations.is_empty() && worst <= 3.0,
        format!(
            "{compared} points with bound <= 1, {} below simulation {violations:?}; worst pairwise deviation {worst:.2} se (<= 3) over 20 pairs",
            violations.len()
        ),
    )
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn hnf_exact() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut failures = 0;
    let systems = 1000;
    for _ in 0..systems {
        let n = rng.random_range(1..=3);
        let sources = rng.random_range(1..=3);
        let m: Vec<Vec<i64>> = loop {
            let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-5..=5)).collect()).collect();
            let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            if !bareiss_determinant(&big).is_zero() {
                break m;
            }
        };
        let a: Vec<i64> = loop {
            let a: Vec<i64> = (0..sources).map(|_| rng.random_range(-5..=5)).collect();
            if a.iter().any(|&v| v != 0) {
                break a;
            }
        };
        let mut t = vec![0i64; n];
        for &ai in &a {
            let s: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
            for (r, tj) in t.iter_mut().enumerate() {
                *tj += ai * (0..n).map(|c| m[r][c] * s[c]).sum::<i64>();
            }
        }
        let Ok(sol) = hnf_solve(&m, &a, &t) else {
            failures += 1;
            continue;
        };
        let dec = &sol.decomposition;
        let w_cols = n * (sources - 1);
        let layout = dec.product().iter().all(|r| r[..w_cols].iter().all(Zero::is_zero));
        let unimodular = bareiss_determinant(&dec.u).abs() == BigInt::one();
        let mut rebuilt = true;
        for _ in 0..5 {
            let w: Vec<BigInt> = (0..sol.free_dim()).map(|_| BigInt::from(rng.random_range(-10..=10))).collect();
            let x = sol.solution(&w);
            for j in 0..n {
                let s = a.iter().zip(&x).fold(BigRational::zero(), |acc, (ai, xi)| acc + BigRational::from_integer(BigInt::from(*ai)) * &xi[j]);
                rebuilt &= s == BigRational::from_integer(BigInt::from(t[j]));
            }
        }
        if !(layout && unimodular && rebuilt) {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("{systems} systems, {failures} failures"))
}

fn profiles() -> Verdict {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let expect: [(&str, Vec<i64>); 3] =
        [("profile-peaked.toml", vec![1]), ("profile-aligned.toml", vec![5, 6]), ("profile-wide.toml", vec![2, 3])];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, want) in expect {
        let cfg = SimConfig::load(&dir.join(name)).unwrap();
        let p = likelihood_profile_for(cfg.profile.as_ref().unwrap()).unwrap();
        let ties = p.near_ties(TIE_REL);
        ok &= ties == want;
        notes.push(format!("{name}: top {ties:?} (want {want:?}), gap {}", fmt_opt(p.top_gap())));
    }
    verdict(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |id: u32, v: Verdict| {
        println!("criterion {id:>2}: {} ({:.0}s) {}", if v.pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64(), v.detail);
        if !v.pass {
            failed += 1;
        }
    };
    report(1, cvp_oracle());
    report(2, ida_oracle());
    let s5 = fading_sweep(5);
    report(3, fading_floor(&s5));
    let s10 = fading_sweep(10);
    report(4, fading_slope(&s5, &s10));
    report(5, map_equivalence());
    report(6, filter_identities());
    let (plan, curves) = small_code_curves();
    report(7, small_code_gap(&curves));
    report(8, cube_code_gap());
    report(9, union_bound_check(&plan, &curves));
    report(10, hnf_exact());
    report(11, profiles());
    println!("{failed} of 11 criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
