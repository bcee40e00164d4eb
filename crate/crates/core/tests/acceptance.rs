//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line. Run with
//! `cargo test -p sturmlab --test acceptance -- --nocapture --test-threads 1`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use sturmlab::approx::{contents_report, gray_fan, verify_identities, Approx};
use sturmlab::exactlin::wedge;
use sturmlab::exponents::{closed_form, delta_threshold, empirical, empirical_abscissas, gamma, omega2_sweep, recipe_triples, ExponentInputs};
use sturmlab::matseq::{delta_estimate, roy_brackets, Anchor, MatrixSeed, MatrixSequence};
use sturmlab::paramgeo::{
    compare, duality_check, log_content_bound, minima_bruteforce, minima_enumerated, minima_on_grid, predicted_system,
    sequence_candidates_below, working_precision, DeltaChoice, MinimaSample, SystemBreakpoints, LINE_CAP,
};
use sturmlab::sturm::words::spectrum_endpoints;
use sturmlab::sturm::{ProgramSpec, SturmianProgram};
use sturmlab::xi::xi_value;
use sturmlab::{BigReal, SymVec};

// Tolerances and budgets, one per number quoted by the criteria.
const C1_K_MAX: usize = 14;
const C1_RUNTIME: Duration = Duration::from_secs(60);
const C2_K_MAX: usize = 14;
const C3_K_MAX: usize = 18;
const C3_INCREMENT_TOL: f64 = 1e-3;
const C4_EXTREMAL_TOL: f64 = 1e-10;
const C4_IDENTITY_TOL: f64 = 1e-30;
const C4_GRID_POINTS: usize = 1000;
const C5_ENDPOINT_TOL: f64 = 1e-10;
const C6_K: (usize, usize) = (3, 14);
const C6_TOL: f64 = 1e-9;
const C6_BITS: usize = 256;
const C6_FORCED_DELTA: f64 = 0.5;
const C7_EARLY: (usize, usize) = (4, 8);
const C7_LATE: (usize, usize) = (9, 14);
const C7_REFINE: usize = 60;
const C7_GROWTH_FACTOR: f64 = 2.0;
const C8_Q_MAX: f64 = 12.0;
const C8_POINTS: usize = 13;
const C9_WINDOW: (usize, usize) = (4, 14);
const C9_TOL: f64 = 0.02;
const C9_RUNTIME: Duration = Duration::from_secs(600);
const C10_DIGITS: u32 = 50;
const C11_I: (i64, i64) = (3, 12);
const C12_Q_MAX: f64 = 12.0;
const C12_POINTS: usize = 20;
const SWEEP_K_MAX: u32 = 10;
const SWEEP_MAX_GAP: f64 = 0.15;
const SWEEP_K_CHECK: usize = 18;
const PREC: usize = 256;

fn report(n: &str, ok: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn period_two() -> SturmianProgram {
    SturmianProgram::build(&ProgramSpec { prefix: vec![-1, 1], period: vec![2] }).unwrap()
}

/// The four test configurations named by the identity criterion.
fn test_seeds() -> Vec<(&'static str, Approx)> {
    let fib = SturmianProgram::fibonacci;
    vec![
        ("roy(2,1,2)", Approx::new(MatrixSeed::roy(2, 1, 2).unwrap(), fib())),
        ("roy(3,1,3)", Approx::new(MatrixSeed::roy(3, 1, 3).unwrap(), fib())),
        ("bl(1,2)", Approx::new(MatrixSeed::bl(1, 2, 1).unwrap(), fib())),
        ("roy(2,1,2)/period 2", Approx::new(MatrixSeed::roy(2, 1, 2).unwrap(), period_two())),
    ]
}

fn bl() -> Approx {
    Approx::new(MatrixSeed::bl(1, 2, 1).unwrap(), SturmianProgram::fibonacci())
}

#[test]
fn criterion_01_exact_identities() {
    let start = Instant::now();
    let required = [
        "commutation",
        "y_step",
        "y_power_form",
        "y_psi_step",
        "y_bracket",
        "trace_recurrence",
        "trace_congruence",
        "y_recurrence",
        "y_recurrence_boundary",
        "z_recurrence_boundary",
        "det_triple",
        "z_wedge",
    ];
    let mut bad = Vec::new();
    for (name, mut ap) in test_seeds() {
        let i_max = ap.prog().t(C1_K_MAX);
        let r = verify_identities(&mut ap, i_max).unwrap();
        for id in required {
            match r.get(id) {
                Some(c) if c.passed() && c.checked > 0 => {}
                Some(c) => bad.push(format!("{name}/{id} fails at {:?}", c.failures)),
                None => bad.push(format!("{name}/{id} missing")),
            }
        }
        if !r.all_pass() {
            bad.push(format!("{name}: some identity failed"));
        }
    }
    let t = start.elapsed();
    report("1", bad.is_empty() && t < C1_RUNTIME, format!("(4 seeds, indices up to t_{C1_K_MAX}, {t:.1?}) {bad:?}"));
}

#[test]
fn criterion_02_contents() {
    let mut bad = Vec::new();
    for (name, mut ap) in test_seeds() {
        let i_max = ap.prog().t(C2_K_MAX);
        let r = contents_report(&mut ap, i_max).unwrap();
        // Independent recomputation of the divisibilities from the raw vectors.
        let det_n = ap.seed().det_n.clone();
        let bound = ap.content_bound().unwrap();
        let det_w2 = ap.det_w(2).unwrap();
        for i in -2..=i_max {
            let y = ap.y_at(i).unwrap();
            let c = gcd3(&y);
            if !(&det_n % &c).is_zero() {
                bad.push(format!("{name}: content(y_{i}) = {c} does not divide det N = {det_n}"));
            }
            if i >= -1 {
                let z = ap.z_at(i).unwrap();
                let zi = z.scale_to_int(&det_w2);
                match zi {
                    None => bad.push(format!("{name}: det(w2) z_{i} not integral")),
                    Some(v) if !v.is_zero() && !bound.is_zero() && !(&bound % gcd3(&v)).is_zero() => {
                        bad.push(format!("{name}: content(det(w2) z_{i}) does not divide {bound}"))
                    }
                    _ => {}
                }
            }
        }
        if !r.all_pass() {
            bad.push(format!("{name}: content report fails"));
        }
    }
    report("2", bad.is_empty(), format!("(4 seeds, indices up to t_{C2_K_MAX}) {bad:?}"));
}

fn gcd3(v: &SymVec) -> BigInt {
    use num_integer::Integer;
    v.x0.gcd(&v.x1).gcd(&v.x2)
}

#[test]
fn criterion_03_delta_certification() {
    let mut seq = MatrixSequence::new(MatrixSeed::roy(2, 1, 2).unwrap(), SturmianProgram::fibonacci());
    let r = delta_estimate(&mut seq, C3_K_MAX).unwrap();
    let (_, certified) = roy_brackets(2, 1, 2, PREC);
    let inside = r.rows.iter().all(|row| row.delta >= certified.0 && row.delta <= certified.1);
    let inc = (&r.rows[C3_K_MAX].delta - &r.rows[C3_K_MAX - 1].delta).abs().to_f64();
    let mut bl_seq = MatrixSequence::new(MatrixSeed::bl(1, 2, 1).unwrap(), SturmianProgram::fibonacci());
    let b = delta_estimate(&mut bl_seq, C3_K_MAX).unwrap();
    let bl_zero = b.exact_zero && b.estimate.is_zero();
    report(
        "3",
        inside && inc < C3_INCREMENT_TOL && bl_zero,
        format!(
            "(certified bracket [{:.6}, {:.6}], delta_18 = {:.6}, |delta_18 - delta_17| = {inc:.2e}, BL exact zero {bl_zero})",
            certified.0.to_f64(),
            certified.1.to_f64(),
            r.estimate.to_f64()
        ),
    );
}

/// The bracket exactly as the criterion states it. It cannot hold: δ_k converges to
/// about 0.394, above log 2 / log 8 = 1/3 (see the decisions ledger).
#[test]
#[ignore = "stated Roy (2,1,2) bracket [log2/log12, log2/log8] excludes the limit delta ~ 0.394"]
fn criterion_03_stated_bracket() {
    let mut seq = MatrixSequence::new(MatrixSeed::roy(2, 1, 2).unwrap(), SturmianProgram::fibonacci());
    let r = delta_estimate(&mut seq, C3_K_MAX).unwrap();
    let lo = 2f64.ln() / 12f64.ln();
    let hi = 2f64.ln() / 8f64.ln();
    let outside: Vec<(usize, f64)> = r.rows.iter().map(|row| (row.k, row.delta.to_f64())).filter(|(_, d)| *d < lo || *d > hi).collect();
    report("3 (stated bracket)", outside.is_empty(), format!("outside [{lo:.6}, {hi:.6}]: {outside:?}"));
}

#[test]
fn criterion_04_closed_forms() {
    let g = gamma(PREC);
    let sigma = g.recip();
    let inp = ExponentInputs { sigma: sigma.clone(), delta: BigReal::zero(PREC), tau: sigma.clone(), sigma_prime: None };
    let set = closed_form(&inp).unwrap();
    let w_hat = set.omega2_hat.as_ref().unwrap().exact().unwrap().clone();
    let l_hat = set.lambda2_hat.as_ref().unwrap().exact().unwrap().clone();
    let e1 = (&w_hat - &(&g * &g)).abs().to_f64();
    let e2 = (&l_hat - &sigma).abs().to_f64();

    let one = BigReal::one(PREC);
    let side = (C4_GRID_POINTS as f64).sqrt().ceil() as usize;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for a in 0..side {
        for b in 0..side {
            if count == C4_GRID_POINTS {
                break;
            }
            let s = &sigma * &BigReal::from_f64((a as f64 + 1.0) / side as f64, PREC);
            let thr = delta_threshold(&s);
            let d = &thr * &BigReal::from_f64(b as f64 / side as f64, PREC);
            let inp = ExponentInputs { sigma: s.clone(), delta: d, tau: s, sigma_prime: None };
            let set = closed_form(&inp).unwrap();
            let lh = set.lambda2_hat.as_ref().unwrap().exact().unwrap();
            let wh = set.omega2_hat.as_ref().unwrap().exact().unwrap();
            let p1 = set.psi1_inf.as_ref().unwrap().exact().unwrap();
            let w2 = set.omega2.as_ref().unwrap().exact().unwrap();
            let r1 = (lh - &(&one - &wh.recip())).abs();
            let r2 = (&(&p1.recip() - &one) - w2).abs();
            worst = worst.max(r1.to_f64()).max(r2.to_f64());
            count += 1;
        }
    }
    report(
        "4",
        e1 < C4_EXTREMAL_TOL && e2 < C4_EXTREMAL_TOL && worst < C4_IDENTITY_TOL && count == C4_GRID_POINTS,
        format!("(|w2hat - gamma^2| = {e1:.1e}, |l2hat - 1/gamma| = {e2:.1e}, max identity residual {worst:.1e} over {count} points)"),
    );
}

#[test]
fn criterion_05_spectrum_endpoints() {
    let t = spectrum_endpoints(PREC);
    let get = |l: &str| t.endpoints.iter().find(|e| e.label == l).unwrap().value.to_f64();
    let want = [
        ("delta_1_1", 1.0 + 5f64.sqrt()),
        ("delta_2_2", 2.0 + 2.0 * 2f64.sqrt()),
        ("delta_3_3", 3.0 + 13f64.sqrt()),
    ];
    let errs: Vec<f64> = want.iter().map(|(l, v)| (get(l) - v).abs()).collect();
    let iv: Vec<(String, Option<String>)> = t.intervals.iter().map(|(a, b)| (a.label.clone(), b.as_ref().map(|b| b.label.clone()))).collect();
    let union_ok = t.intervals.len() == 3
        && iv[0].0 == "delta_1_1"
        && iv[1].0 == "delta_2_2"
        && iv[2].0 == "delta_3_3"
        && iv[2].1.is_none()
        && (t.intervals[0].1.as_ref().unwrap().value.to_f64() - (2.0 + 5f64.sqrt())).abs() < C5_ENDPOINT_TOL
        && (t.intervals[1].1.as_ref().unwrap().value.to_f64() - (3.0 + 2.0 * 3f64.sqrt())).abs() < C5_ENDPOINT_TOL;
    report("5", errs.iter().all(|e| *e < C5_ENDPOINT_TOL) && union_ok, format!("(endpoint errors {errs:.1?}, intervals {iv:?})"));
}

fn bl_system(k: (usize, usize), delta: DeltaChoice) -> (Approx, SystemBreakpoints) {
    let mut ap = Approx::from_sequence(MatrixSequence::with_precision(MatrixSeed::bl(1, 2, 1).unwrap(), SturmianProgram::fibonacci(), C6_BITS));
    let sys = predicted_system(&mut ap, k.0, k.1, delta, Anchor::Auto).unwrap();
    (ap, sys)
}

#[test]
fn criterion_06_three_system_validity() {
    let tol = BigReal::from_f64(C6_TOL, C6_BITS);
    let (_, sys) = bl_system(C6_K, DeltaChoice::Auto);
    let v = sys.validate(&tol);
    let c = &v.conditions;
    let conditions = c.ordering_and_sum && c.one_slope && c.switch_equalities;
    let (_, forced) = bl_system(C6_K, DeltaChoice::Forced(BigReal::from_f64(C6_FORCED_DELTA, C6_BITS)));
    let f = forced.validate(&tol);
    report(
        "6",
        conditions && v.valid && !f.valid,
        format!("(k {:?}: three conditions {conditions}, valid {}; forced delta {C6_FORCED_DELTA}: valid {} {:?})", C6_K, v.valid, f.valid, f.diagnostic),
    );
}

#[test]
fn criterion_07_prediction_vs_minima() {
    let (mut ap, sys) = bl_system((C7_EARLY.0 - 1, C7_LATE.1), DeltaChoice::Auto);
    let grid = sys.sample_grid(C7_REFINE);
    let (_, minima) = minima_on_grid(&mut ap, &grid).unwrap();
    let samples: Vec<MinimaSample> = minima.into_iter().map(|c| c.sample).collect();
    let r = compare(&sys, &samples, C7_EARLY, C7_LATE).unwrap();
    let item1 = r.item1_late <= C7_GROWTH_FACTOR * r.item1_early;
    let item2 = r.item2_late <= C7_GROWTH_FACTOR * r.item2_early;
    let item3 = r.item3_c.is_finite() && r.item3_ordered;
    // The reported C must actually bracket L₂, L₃ on gray samples.
    let bracket = r.rows.iter().filter(|s| s.gray).all(|s| s.l[1] >= s.p[1] - r.item3_c - 1e-9 && s.l[2] <= s.p[2] + r.item3_c + 1e-9);
    report(
        "7",
        item1 && item2 && item3 && bracket && r.item1_ok && r.item2_ok,
        format!(
            "({} samples; |L1-P1| {:.3} -> {:.3}; |L2,3-P2,3| {:.3} -> {:.3}; gray C = {:.3})",
            r.rows.len(),
            r.item1_early,
            r.item1_late,
            r.item2_early,
            r.item2_late,
            r.item3_c
        ),
    );
}

#[test]
fn criterion_08_mahler_duality() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, mut ap) in test_seeds() {
        let (bits, p) = working_precision(C8_Q_MAX);
        let xi = xi_value(&mut ap, bits).unwrap();
        let hints = sequence_candidates_below(&mut ap, C8_Q_MAX + 8.0).unwrap();
        let grid: Vec<BigReal> = (0..C8_POINTS).map(|j| BigReal::from_f64(C8_Q_MAX * j as f64 / (C8_POINTS - 1) as f64, p)).collect();
        let r = duality_check(&xi, &grid, &hints, p).unwrap();
        let finite = r.max.iter().all(|m| m.is_finite());
        ok &= finite && r.non_growing;
        lines.push(format!("{name}: max {:.3?} early {:.3?} late {:.3?}", r.max, r.early_max, r.late_max));
    }
    report("8", ok, format!("({})", lines.join("; ")));
}

#[test]
fn criterion_09_empirical_exponents() {
    let start = Instant::now();
    let (mut ap, sys) = bl_system((C9_WINDOW.0, C9_WINDOW.1 + 1), DeltaChoice::Auto);
    let qs = empirical_abscissas(&sys, C9_WINDOW).unwrap();
    let (_, minima) = minima_on_grid(&mut ap, &qs).unwrap();
    let samples: Vec<MinimaSample> = minima.into_iter().map(|c| c.sample).collect();
    let e = empirical(&sys, &samples, C9_WINDOW).unwrap();
    // Closed forms at σ = 1/γ, δ = 0 written out directly.
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let s = 1.0 / g;
    let expected = [
        ("psi1_inf", s / (2.0 * (1.0 + s))),
        ("psi1_sup", 1.0 / ((1.0 + s) + 2.0)),
        ("psi2_inf", 1.0 / ((1.0 + s) + 2.0)),
        ("psi2_sup", 1.0 / (2.0 + s)),
        ("psi3_inf", (1.0 + s) / (1.0 + 2.0 * (1.0 + s))),
        ("psi3_sup", 0.5),
    ];
    let errs: Vec<(&str, f64)> = expected.iter().map(|(n, v)| (*n, (e.set.get(n).unwrap().lo() - v).abs())).collect();
    let t = start.elapsed();
    report(
        "9",
        errs.iter().all(|(_, x)| *x < C9_TOL) && t < C9_RUNTIME,
        format!("(window {:?}, errors {errs:.4?}, {t:.1?})", C9_WINDOW),
    );
}

/// Fibonacci word on {1, 2} by the substitution 1 → 12, 2 → 1.
fn fibonacci_word(n: usize) -> Vec<u32> {
    let mut w = vec![1u32];
    while w.len() < n {
        w = w.iter().flat_map(|&c| if c == 1 { vec![1, 2] } else { vec![1] }).collect();
    }
    w.truncate(n);
    w
}

#[test]
fn criterion_10_xi_cross_check() {
    let mut ap = bl();
    let bits = (C10_DIGITS as f64 * std::f64::consts::LOG2_10) as usize + 64;
    let xi = xi_value(&mut ap, bits).unwrap();
    let c = xi.center();
    // [0; m_φ] from consecutive convergents, far beyond 10⁻⁵⁰.
    let (mut p0, mut p1) = (BigInt::one(), BigInt::zero());
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
    for a in fibonacci_word(200) {
        let a = BigInt::from(a);
        let p = &a * &p1 + &p0;
        let q = &a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p);
        q0 = std::mem::replace(&mut q1, q);
    }
    let cf = BigRational::new(p1, q1);
    let diff = (&c - &cf).abs();
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(C10_DIGITS));
    report("10", diff < tol, format!("(|xi - [0; m_phi]| < 1e-{C10_DIGITS}: {})", diff < tol));
}

/// Gray-fan checks at Roy (2,1,2). `literal` demands `c_m c_(m+1) | d_i`; otherwise the
/// divisor is `d_i content(z_(i+1))`, which is what `x_m ∧ x_(m+1) = ±d_i z_(i+1)` gives.
fn gray_failures(literal: bool) -> Vec<String> {
    use num_integer::Integer;
    let mut ap = Approx::new(MatrixSeed::roy(2, 1, 2).unwrap(), SturmianProgram::fibonacci());
    let mut bad = Vec::new();
    for i in C11_I.0..=C11_I.1 {
        let fan = gray_fan(&mut ap, i).unwrap();
        let yi = ap.y_at(i).unwrap();
        let yn = ap.y_at(i + 1).unwrap();
        let first = &fan.points.first().unwrap().x;
        let last = &fan.points.last().unwrap().x;
        if *first != yi || (*last != yn && *last != yn.scale(&BigInt::from(-1))) {
            bad.push(format!("i={i}: endpoints"));
        }
        let dz = ap.z_at(i + 1).unwrap().scale_to_int(&fan.d_i).expect("d_i z_(i+1) integral");
        let divisor = if literal { fan.d_i.clone() } else { &fan.d_i * gcd3(&dz) };
        for w in fan.points.windows(2) {
            let x = wedge(&w[0].x, &w[1].x);
            if x != dz && x != dz.scale(&BigInt::from(-1)) {
                bad.push(format!("i={i}, m={}: wedge is not +-d_i z_(i+1)", w[0].m));
            }
            let (c0, c1) = (gcd3(&w[0].x), gcd3(&w[1].x));
            if !(&divisor % (&c0 * &c1)).is_zero() {
                bad.push(format!("i={i}, m={}: c_m c_(m+1) = {} does not divide {divisor}", w[0].m, &c0 * &c1));
            }
            if !(&gcd3(&yi) % c0.gcd(&c1)).is_zero() {
                bad.push(format!("i={i}, m={}: gcd(c_m, c_(m+1)) does not divide content(y_i)", w[0].m));
            }
        }
        let c = &fan.checks;
        let lib = if literal { c.content_product_divides_d } else { c.content_product_divides_dz };
        if !(c.starts_at_y_i && c.ends_at_y_next && c.wedge_is_dz && lib && c.content_gcd_divides_y) {
            bad.push(format!("i={i}: library checks {c:?}"));
        }
    }
    bad
}

#[test]
fn criterion_11_gray_areas() {
    let bad = gray_failures(false);
    report("11", bad.is_empty(), format!("(i in {:?}, products divide d_i content(z_(i+1))) {bad:?}", C11_I));
}

/// `c_m c_(m+1) | d_i` as stated. At i = 3, z_4 has content 2 and c_2 c_3 = 16 while d_3 = 8.
#[test]
#[ignore = "c_m c_(m+1) | d_i needs z_(i+1) primitive; Roy (2,1,2) at i = 3 has c_2 c_3 = 16, d_3 = 8"]
fn criterion_11_stated_divisibility() {
    let bad = gray_failures(true);
    report("11 (stated divisibility)", bad.is_empty(), format!("(i in {:?}) {bad:?}", C11_I));
}

#[test]
fn criterion_12_oracle_agreement() {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, mut ap) in test_seeds() {
        let (bits, p) = working_precision(C12_Q_MAX);
        let xi = xi_value(&mut ap, bits).unwrap();
        let hints = sequence_candidates_below(&mut ap, C12_Q_MAX + 8.0).unwrap();
        let slack = log_content_bound(&mut ap).unwrap().max(0.0) + 1e-9;
        // Gray intervals where the predicted system covers the range.
        let sys = (2..6).find_map(|k| predicted_system(&mut ap, k, k + 6, DeltaChoice::Auto, Anchor::Auto).ok());
        let mut used = 0;
        let mut worst: f64 = 0.0;
        let mut j = 0;
        while used < C12_POINTS {
            let q = BigReal::from_f64(C12_Q_MAX * (j as f64 + 0.5) / (2 * C12_POINTS) as f64, p);
            j += 1;
            assert!(j <= 2 * C12_POINTS, "{name}: not enough non-gray points");
            if sys.as_ref().is_some_and(|s| s.gray_index(&q).is_some()) {
                continue;
            }
            let cand = minima_enumerated(&xi, &q, None, &hints, LINE_CAP, p).unwrap().sample;
            let brute = minima_bruteforce(&xi, &q, &hints, 1_000_000, p).unwrap();
            for k in 0..3 {
                let d = (&cand.l[k] - &brute.l[k]).to_f64();
                ok &= d >= -1e-9;
                worst = worst.max(d.abs());
            }
            used += 1;
        }
        ok &= worst <= slack;
        lines.push(format!("{name}: max |cand - brute| {worst:.2e} (allowed {slack:.2})"));
    }
    report("12", ok, format!("({C12_POINTS} non-gray points each; {})", lines.join("; ")));
}

#[test]
fn criterion_sweep_density() {
    let prog = SturmianProgram::fibonacci();
    let triples = recipe_triples(SWEEP_K_MAX);
    let r = omega2_sweep(&prog, &triples, SWEEP_K_CHECK, PREC).unwrap();
    let all_inside = r.rows.iter().all(|row| row.inside);
    // Recipe triples are (2^l, 2^(k-l) - 1, 2^(k-l)): the bracket is [α, l/k] with α ≥ l/(k+2).
    let mut beta_ok = true;
    for row in &r.rows {
        let (a, _, c) = row.abc;
        let (l, k) = (a.trailing_zeros(), a.trailing_zeros() + c.trailing_zeros());
        beta_ok &= (row.bracket.1.to_f64() - l as f64 / k as f64).abs() < 1e-12;
        beta_ok &= row.bracket.0.to_f64() >= l as f64 / (k as f64 + 2.0) - 1e-12;
    }
    report(
        "sweep",
        r.delta_gap < SWEEP_MAX_GAP && all_inside && beta_ok,
        format!("({} recipe triples with k <= {SWEEP_K_MAX}; max gap {:.4} of [0, {:.4}])", r.rows.len(), r.delta_gap, r.threshold.to_f64()),
    );
}
