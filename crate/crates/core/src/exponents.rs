//! Diophantine exponents of `ξ`: closed forms in `(σ, δ, τ, σ′)`, the
//! parametric/standard dictionary, empirical estimates from minima samples and
//! the ω₂ sweep over Roy seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::BigReal;
use crate::matseq::{delta_estimate, roy_brackets, MatrixSeed, MatrixSequence};
use crate::paramgeo::{MinimaSample, SystemBreakpoints};
use crate::sturm::{h_of_sigma, CFQuantities, SturmianProgram};

/// One exponent value.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exponent {
    Exact { value: BigReal },
    Interval { lo: BigReal, hi: BigReal },
    Empirical { estimate: f64, window: (usize, usize), low_confidence: bool },
}

impl Exponent {
    pub fn lo(&self) -> f64 {
        match self {
            Exponent::Exact { value } => value.to_f64(),
            Exponent::Interval { lo, .. } => lo.to_f64(),
            Exponent::Empirical { estimate, .. } => *estimate,
        }
    }

    pub fn hi(&self) -> f64 {
        match self {
            Exponent::Exact { value } => value.to_f64(),
            Exponent::Interval { hi, .. } => hi.to_f64(),
            Exponent::Empirical { estimate, .. } => *estimate,
        }
    }

    /// The exact value, if any.
    pub fn exact(&self) -> Option<&BigReal> {
        match self {
            Exponent::Exact { value } => Some(value),
            _ => None,
        }
    }

    /// Endpoints as big reals (`Empirical` is widened to a point).
    fn bounds(&self, p: usize) -> (BigReal, BigReal) {
        match self {
            Exponent::Exact { value } => (value.clone(), value.clone()),
            Exponent::Interval { lo, hi } => (lo.clone(), hi.clone()),
            Exponent::Empirical { estimate, .. } => (BigReal::from_f64(*estimate, p), BigReal::from_f64(*estimate, p)),
        }
    }

    fn map_monotone(&self, f: impl Fn(&BigReal) -> BigReal, increasing: bool) -> Exponent {
        match self {
            Exponent::Exact { value } => Exponent::Exact { value: f(value) },
            Exponent::Interval { lo, hi } => {
                let (a, b) = (f(lo), f(hi));
                if increasing {
                    Exponent::Interval { lo: a, hi: b }
                } else {
                    Exponent::Interval { lo: b, hi: a }
                }
            }
            Exponent::Empirical { estimate, window, low_confidence } => {
                let v = f(&BigReal::from_f64(*estimate, 128)).to_f64();
                Exponent::Empirical { estimate: v, window: *window, low_confidence: *low_confidence }
            }
        }
    }

    fn interval_or_exact(lo: BigReal, hi: BigReal) -> Exponent {
        if lo == hi {
            Exponent::Exact { value: lo }
        } else {
            Exponent::Interval { lo, hi }
        }
    }
}

/// The data the closed forms depend on. `sigma_prime = None` stands for `+∞`.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentInputs {
    pub sigma: BigReal,
    pub delta: BigReal,
    pub tau: BigReal,
    pub sigma_prime: Option<BigReal>,
}

impl ExponentInputs {
    pub fn from_quantities(q: &CFQuantities, delta: BigReal) -> Self {
        ExponentInputs { sigma: q.sigma.clone(), delta, tau: q.tau.clone(), sigma_prime: q.sigma_prime.clone() }
    }
}

/// Parametric exponents `ψ̲_j, ψ̄_j` and standard exponents `ω₂, ω̂₂, λ₂, λ̂₂`.
#[derive(Clone, Debug, Serialize, Default)]
pub struct ExponentSet {
    pub inputs: Option<ExponentInputs>,
    pub psi1_inf: Option<Exponent>,
    pub psi1_sup: Option<Exponent>,
    pub psi2_inf: Option<Exponent>,
    pub psi2_sup: Option<Exponent>,
    pub psi3_inf: Option<Exponent>,
    pub psi3_sup: Option<Exponent>,
    pub omega2: Option<Exponent>,
    pub omega2_hat: Option<Exponent>,
    pub lambda2: Option<Exponent>,
    pub lambda2_hat: Option<Exponent>,
    /// δ below which the lower bound for `ψ̲₂` meets `θ(δ)`.
    pub psi2_crossover: Option<BigReal>,
}

impl ExponentSet {
    /// `(name, value)` in a fixed order, skipping absent entries.
    pub fn entries(&self) -> Vec<(&'static str, &Exponent)> {
        [
            ("psi1_inf", &self.psi1_inf),
            ("psi1_sup", &self.psi1_sup),
            ("psi2_inf", &self.psi2_inf),
            ("psi2_sup", &self.psi2_sup),
            ("psi3_inf", &self.psi3_inf),
            ("psi3_sup", &self.psi3_sup),
            ("omega2", &self.omega2),
            ("omega2_hat", &self.omega2_hat),
            ("lambda2", &self.lambda2),
            ("lambda2_hat", &self.lambda2_hat),
        ]
        .into_iter()
        .filter_map(|(n, e)| e.as_ref().map(|e| (n, e)))
        .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Exponent> {
        self.entries().into_iter().find(|(n, _)| *n == name).map(|(_, e)| e)
    }
}

/// `σ/(1+σ)`.
pub fn delta_threshold(sigma: &BigReal) -> BigReal {
    sigma / &(&BigReal::one(sigma.precision()) + sigma)
}

/// Golden ratio γ.
pub fn gamma(p: usize) -> BigReal {
    &(&BigReal::one(p) + &BigReal::from_i64(5, p).sqrt()) / &BigReal::from_i64(2, p)
}

fn psi2_terms(inp: &ExponentInputs, delta: &BigReal) -> (BigReal, BigReal) {
    let p = inp.sigma.precision();
    let one = BigReal::one(p);
    let two = BigReal::from_i64(2, p);
    let s1 = &one + &inp.sigma;
    let od = &one - delta;
    let td = &two - delta;
    let first = &(&od * &s1) / &(&(&td * &s1) + &one);
    let a = match &inp.sigma_prime {
        Some(sp) => &(&one + sp) / &(&td * &(&two + sp)),
        None => td.recip(),
    };
    let b = (&two + &(&od * &(&one + &inp.tau))).recip();
    (first, a.min(b))
}

/// `θ(δ) = min((1+σ′)/((2−δ)(2+σ′)), 1/(2+(1−δ)(1+τ)))`.
pub fn theta(inp: &ExponentInputs, delta: &BigReal) -> BigReal {
    psi2_terms(inp, delta).1
}

/// Smallest δ in `[0, σ/(1+σ)]` at which `(1−δ)(1+σ)/((2−δ)(1+σ)+1)` drops below `θ(δ)`,
/// located on a grid and refined by bisection; the threshold itself when it never does.
pub fn psi2_crossover(inp: &ExponentInputs) -> BigReal {
    let p = inp.sigma.precision();
    let thr = delta_threshold(&inp.sigma);
    let below = |d: &BigReal| {
        let (f, t) = psi2_terms(inp, d);
        f < t
    };
    const GRID: i64 = 2000;
    let step = &thr / &BigReal::from_i64(GRID, p);
    let mut prev = BigReal::zero(p);
    if below(&prev) {
        return prev;
    }
    for j in 1..=GRID {
        let d = &step * &BigReal::from_i64(j, p);
        if below(&d) {
            let (mut lo, mut hi) = (prev, d);
            let half = BigReal::from_f64(0.5, p);
            for _ in 0..(p.min(200)) {
                let mid = &(&lo + &hi) * &half;
                if below(&mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return lo;
        }
        prev = d;
    }
    thr
}

/// Closed forms of all ten exponents.
pub fn closed_form(inp: &ExponentInputs) -> Result<ExponentSet> {
    let p = inp.sigma.precision();
    let (sigma, delta) = (&inp.sigma, &inp.delta);
    let one = BigReal::one(p);
    let two = BigReal::from_i64(2, p);
    if !sigma.is_positive() || *sigma > gamma(p).recip() + BigReal::from_f64(1e-30, p) {
        return Err(Error::OutOfRange(format!("sigma = {} is outside (0, 1/gamma]", sigma.to_decimal(12))));
    }
    let thr = delta_threshold(sigma);
    if delta.is_negative() || *delta >= thr {
        return Err(Error::ImproperDelta(format!("{} (threshold {})", delta.to_decimal(12), thr.to_decimal(12))));
    }
    let s1 = &one + sigma;
    let od = &one - delta;
    let td = &two - delta;
    let ods = &od * &s1;
    let h = h_of_sigma(sigma);
    let ex = |v: BigReal| Some(Exponent::Exact { value: v });

    let psi3_sup = {
        let base = &od / &td;
        if *delta <= h {
            Exponent::Exact { value: base }
        } else {
            let alt = (&td + sigma).recip();
            Exponent::interval_or_exact(base.clone(), base.max(alt))
        }
    };
    let (first, th) = psi2_terms(inp, delta);
    let psi2_inf = if first >= th { Exponent::Exact { value: th } } else { Exponent::Interval { lo: first, hi: th } };
    let lambda2 = if *delta <= h {
        Exponent::Exact { value: od.clone() }
    } else {
        let alt = (&od + sigma).recip();
        Exponent::interval_or_exact(od.clone(), od.clone().max(alt))
    };
    Ok(ExponentSet {
        inputs: Some(inp.clone()),
        psi1_inf: ex(sigma / &(&td * &s1)),
        psi1_sup: ex((&ods + &two).recip()),
        psi2_inf: Some(psi2_inf),
        psi2_sup: ex((&two + sigma).recip()),
        psi3_inf: ex(&ods / &(&one + &(&two * &ods))),
        psi3_sup: Some(psi3_sup),
        omega2: ex(&(&td / sigma) + &od),
        omega2_hat: ex(&one + &ods),
        lambda2: Some(lambda2),
        lambda2_hat: ex(&ods / &(&one + &ods)),
        psi2_crossover: Some(psi2_crossover(inp)),
    })
}

/// `2ψ̲₃ + 2ψ̄₁ − 3ψ̲₃ψ̄₁ − 1`.
pub fn jarnik_parametric_residual(psi3_inf: &BigReal, psi1_sup: &BigReal) -> BigReal {
    let p = psi3_inf.precision();
    let two = BigReal::from_i64(2, p);
    let three = BigReal::from_i64(3, p);
    &(&(&(&two * psi3_inf) + &(&two * psi1_sup)) - &(&three * &(psi3_inf * psi1_sup))) - &BigReal::one(p)
}

/// `λ̂₂ + 1/ω̂₂ − 1`.
pub fn jarnik_residual(lambda2_hat: &BigReal, omega2_hat: &BigReal) -> BigReal {
    &(lambda2_hat + &omega2_hat.recip()) - &BigReal::one(lambda2_hat.precision())
}

fn tol(p: usize) -> BigReal {
    BigReal::from_f64(2f64.powi(-((p.min(1000) as i32) - 24)), p)
}

fn check_range(name: &str, e: &Exponent, lo: &BigReal, hi: Option<&BigReal>, p: usize) -> Result<()> {
    let (a, b) = e.bounds(p);
    let t = tol(p);
    let low_ok = a >= lo - &t;
    let high_ok = hi.is_none_or(|h| b <= h + &t);
    if low_ok && high_ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = [{}, {}] is outside its admissible range", a.to_decimal(12), b.to_decimal(12))))
    }
}

fn check_standard(s: &ExponentSet, p: usize) -> Result<()> {
    let two = BigReal::from_i64(2, p);
    let half = BigReal::from_f64(0.5, p);
    let g = gamma(p);
    let g2 = &g * &g;
    let ginv = g.recip();
    if let Some(e) = &s.omega2 {
        check_range("omega2", e, &two, None, p)?;
    }
    if let Some(e) = &s.omega2_hat {
        check_range("omega2_hat", e, &two, Some(&g2), p)?;
    }
    if let Some(e) = &s.lambda2 {
        check_range("lambda2", e, &half, None, p)?;
    }
    if let Some(e) = &s.lambda2_hat {
        check_range("lambda2_hat", e, &half, Some(&ginv), p)?;
    }
    Ok(())
}

/// `(ψ̲₁, ψ̄₁, ψ̲₃, ψ̄₃) = (1/(ω₂+1), 1/(ω̂₂+1), λ̂₂/(λ̂₂+1), λ₂/(λ₂+1))`.
pub fn parametric_from_standard(s: &ExponentSet, p: usize) -> Result<ExponentSet> {
    check_standard(s, p)?;
    let one = BigReal::one(p);
    let inv1 = |x: &BigReal| (x + &one).recip();
    let frac = |x: &BigReal| x / &(x + &one);
    let need = |e: &Option<Exponent>, n: &str| e.clone().ok_or_else(|| Error::OutOfRange(format!("{n} is missing")));
    let mut out = s.clone();
    out.psi1_inf = Some(need(&s.omega2, "omega2")?.map_monotone(inv1, false));
    out.psi1_sup = Some(need(&s.omega2_hat, "omega2_hat")?.map_monotone(inv1, false));
    out.psi3_inf = Some(need(&s.lambda2_hat, "lambda2_hat")?.map_monotone(frac, true));
    out.psi3_sup = Some(need(&s.lambda2, "lambda2")?.map_monotone(frac, true));
    Ok(out)
}

/// Inverse of [`parametric_from_standard`].
pub fn standard_from_parametric(s: &ExponentSet, p: usize) -> Result<ExponentSet> {
    let one = BigReal::one(p);
    let inv = |x: &BigReal| &x.recip() - &one;
    let odds = |x: &BigReal| x / &(&one - x);
    let need = |e: &Option<Exponent>, n: &str| e.clone().ok_or_else(|| Error::OutOfRange(format!("{n} is missing")));
    for (n, e) in [("psi1_inf", &s.psi1_inf), ("psi1_sup", &s.psi1_sup)] {
        if let Some(e) = e {
            if e.bounds(p).0.is_negative() || !e.bounds(p).0.is_positive() {
                return Err(Error::OutOfRange(format!("{n} must be positive")));
            }
        }
    }
    let mut out = s.clone();
    out.omega2 = Some(need(&s.psi1_inf, "psi1_inf")?.map_monotone(inv, false));
    out.omega2_hat = Some(need(&s.psi1_sup, "psi1_sup")?.map_monotone(inv, false));
    out.lambda2_hat = Some(need(&s.psi3_inf, "psi3_inf")?.map_monotone(odds, true));
    out.lambda2 = Some(need(&s.psi3_sup, "psi3_sup")?.map_monotone(odds, true));
    check_standard(&out, p)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// empirical

/// Empirical estimates with the extremal abscissas used for each.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalReport {
    pub window: (usize, usize),
    pub set: ExponentSet,
    /// `ψ̲₃` from `ψ̄₁` through Jarník's identity.
    pub psi3_inf_jarnik: f64,
    pub low_confidence: bool,
}

fn lookup<'a>(samples: &'a [MinimaSample], q: &BigReal, what: &str) -> Result<&'a MinimaSample> {
    let qf = q.to_f64();
    let t = 1e-9 * qf.abs().max(1.0);
    samples
        .iter()
        .find(|s| (s.q.to_f64() - qf).abs() <= t)
        .ok_or_else(|| Error::BadWindow(format!("no sample at {what} = {}", q.to_decimal(6))))
}

/// Late-window extrema of `L_j(q)/q` at the abscissas where the predicted system attains them.
fn walk_abscissas(
    sys: &SystemBreakpoints,
    window: (usize, usize),
    ratio: &mut dyn FnMut(&BigReal, usize, &str) -> Result<f64>,
) -> Result<[f64; 6]> {
    let (k_lo, k_hi) = window;
    if k_lo > k_hi || k_lo < sys.k_lo || k_hi > sys.k_hi {
        return Err(Error::BadWindow(format!("window {k_lo}:{k_hi} is outside the system's {}:{}", sys.k_lo, sys.k_hi)));
    }
    let prog = sys.program().clone();
    let row = |i: i64, what: &str| sys.row(i).cloned().ok_or_else(|| Error::BadWindow(format!("{what}: index {i} outside the system")));
    let mut psi1_inf = f64::INFINITY;
    let mut psi1_sup = f64::NEG_INFINITY;
    let mut psi2_sup = f64::NEG_INFINITY;
    let mut psi2_inf = f64::INFINITY;
    let mut psi3_inf = f64::INFINITY;
    let mut psi3_sup = f64::NEG_INFINITY;
    for k in k_lo..=k_hi {
        let tk = prog.t(k);
        let tk1 = prog.t(k + 1);
        let r = row(tk, "q_t")?;
        let d = &sys.d.iter().find(|(kk, _)| *kk == k).ok_or_else(|| Error::BadWindow(format!("no d_{k}")))?.1.value;
        psi1_inf = psi1_inf.min(ratio(&r.q.value, 0, "q_t")?);
        psi1_sup = psi1_sup.max(ratio(d, 0, "d_k")?);
        psi2_sup = psi2_sup.max(ratio(&r.a.value, 1, "a_t")?);
        psi3_inf = psi3_inf.min(ratio(&r.b.value, 2, "b_t")?);
        psi2_inf = psi2_inf.min(ratio(&r.c.value, 1, "c_t")?).min(ratio(d, 1, "d_k")?);
        if prog.s(k + 1) > 1 {
            psi2_inf = psi2_inf.min(ratio(&row(tk + 1, "q_t+1")?.q.value, 1, "q_t+1")?);
        }
        for i in tk..tk1 {
            psi3_sup = psi3_sup.max(ratio(&row(i, "q_i")?.q.value, 2, "q_i")?);
        }
        psi3_sup = psi3_sup.max(ratio(&row(tk1 - 1, "c")?.c.value, 2, "c")?);
    }
    Ok([psi1_inf, psi1_sup, psi2_inf, psi2_sup, psi3_inf, psi3_sup])
}

/// The abscissas at which `empirical` reads the minima, sorted and deduplicated.
pub fn empirical_abscissas(sys: &SystemBreakpoints, window: (usize, usize)) -> Result<Vec<BigReal>> {
    let mut qs: Vec<BigReal> = Vec::new();
    walk_abscissas(sys, window, &mut |q, _, _| {
        qs.push(q.clone());
        Ok(0.0)
    })?;
    qs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    qs.dedup_by(|a, b| (&*a - &*b).abs().to_f64() <= 1e-9 * b.to_f64().abs().max(1.0));
    Ok(qs)
}

/// Empirical exponents over `window` from minima sampled at `empirical_abscissas`.
pub fn empirical(sys: &SystemBreakpoints, samples: &[MinimaSample], window: (usize, usize)) -> Result<EmpiricalReport> {
    let [psi1_inf, psi1_sup, psi2_inf, psi2_sup, psi3_inf, psi3_sup] = walk_abscissas(sys, window, &mut |q, j, what| {
        let s = lookup(samples, q, what)?;
        Ok(s.l[j].to_f64() / q.to_f64())
    })?;
    let low_confidence = window.0 == window.1;
    let e = |v: f64| Some(Exponent::Empirical { estimate: v, window, low_confidence });
    let set = ExponentSet {
        psi1_inf: e(psi1_inf),
        psi1_sup: e(psi1_sup),
        psi2_inf: e(psi2_inf),
        psi2_sup: e(psi2_sup),
        psi3_inf: e(psi3_inf),
        psi3_sup: e(psi3_sup),
        ..Default::default()
    };
    Ok(EmpiricalReport { window, set, psi3_inf_jarnik: (1.0 - 2.0 * psi1_sup) / (2.0 - 3.0 * psi1_sup), low_confidence })
}

// ---------------------------------------------------------------------------
// curves and sweeps

/// `(x, 1 − 1/(1+(1+σ)x), (1+(1+σ)x)/σ, 1+(1+σ)x)` for `x` on a uniform grid of `[c_lo, 1]`.
pub fn joint_curve(sigma: &BigReal, c_lo: &BigReal, grid_n: usize) -> Result<Vec<[BigReal; 4]>> {
    let p = sigma.precision();
    let one = BigReal::one(p);
    if c_lo.is_negative() || *c_lo >= one || grid_n < 2 {
        return Err(Error::OutOfRange("joint curve needs 0 <= c_lo < 1 and at least two points".into()));
    }
    let s1 = &one + sigma;
    let n = (grid_n - 1) as i64;
    Ok((0..=n)
        .map(|j| {
            let x = if j == n {
                one.clone()
            } else {
                c_lo + &(&(&one - c_lo) * &(&BigReal::from_i64(j, p) / &BigReal::from_i64(n, p)))
            };
            let w = &one + &(&s1 * &x);
            [x, &one - &w.recip(), &w / sigma, w]
        })
        .collect())
}

/// `(a, b, c) = (2^l, 2^{k−l} − 1, 2^{k−l})` for `2 ≤ k ≤ k_max`, `1 ≤ l < k`.
pub fn recipe_triples(k_max: u32) -> Vec<(u64, u64, u64)> {
    let mut v = Vec::new();
    for k in 2..=k_max {
        for l in 1..k {
            v.push((1u64 << l, (1u64 << (k - l)) - 1, 1u64 << (k - l)));
        }
    }
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub abc: (u64, u64, u64),
    /// Certified `[α, β]` with `δ ∈ [α, β]`.
    pub bracket: (BigReal, BigReal),
    /// `δ_{k}` at the last computed `k`.
    pub delta_k: BigReal,
    pub inside: bool,
    pub proper_capable: bool,
    /// Whole bracket below `σ/(1+σ)`.
    pub proper: bool,
    /// `ω₂` over the part of the bracket below the threshold, when nonempty.
    pub omega2: Option<(BigReal, BigReal)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub sigma: BigReal,
    pub threshold: BigReal,
    pub rows: Vec<SweepRow>,
    /// Largest gap of `[0, σ/(1+σ)]` not met by any bracket.
    pub delta_gap: f64,
    /// Largest gap of `[2/σ, 1+2/σ]` not met by any ω₂ interval.
    pub omega2_gap: f64,
}

fn max_gap(lo: f64, hi: f64, mut iv: Vec<(f64, f64)>) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = lo;
    let mut gap: f64 = 0.0;
    for (a, b) in iv {
        let (a, b) = (a.max(lo), b.min(hi));
        if a > b {
            continue;
        }
        gap = gap.max(a - reach);
        reach = reach.max(b);
    }
    gap.max(hi - reach)
}

/// Certified δ brackets and closed-form `ω₂` ranges for Roy seeds on one program.
pub fn omega2_sweep(prog: &SturmianProgram, triples: &[(u64, u64, u64)], k_check: usize, p: usize) -> Result<SweepReport> {
    let q = prog.quantities(64, p)?;
    let sigma = q.sigma.clone();
    let thr = delta_threshold(&sigma);
    let one = BigReal::one(p);
    let two = BigReal::from_i64(2, p);
    let omega = |d: &BigReal| &(&(&two - d) / &sigma) + &(&one - d);
    let rows: Vec<SweepRow> = triples
        .par_iter()
        .map(|&(a, b, c)| -> Result<SweepRow> {
            let seed = MatrixSeed::roy(a, b, c)?;
            let proper_capable = seed.proper_capable();
            let (_, (alpha, beta)) = roy_brackets(a, b, c, p);
            let mut seq = MatrixSequence::with_precision(seed, prog.clone(), p);
            let dr = delta_estimate(&mut seq, k_check)?;
            let inside = dr.rows.iter().skip(1).all(|r| r.delta >= alpha && r.delta <= beta);
            let proper = proper_capable && beta < thr;
            let omega2 = (alpha < thr).then(|| (omega(&beta.clone().min(thr.clone())), omega(&alpha)));
            Ok(SweepRow { abc: (a, b, c), bracket: (alpha, beta), delta_k: dr.estimate, inside, proper_capable, proper, omega2 })
        })
        .collect::<Result<_>>()?;
    let delta_gap = max_gap(0.0, thr.to_f64(), rows.iter().map(|r| (r.bracket.0.to_f64(), r.bracket.1.to_f64())).collect());
    let s = sigma.to_f64();
    let omega2_gap = max_gap(2.0 / s, 1.0 + 2.0 / s, rows.iter().filter_map(|r| r.omega2.as_ref()).map(|(a, b)| (a.to_f64(), b.to_f64())).collect());
    Ok(SweepReport { sigma, threshold: thr, rows, delta_gap, omega2_gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(p: usize, delta: f64) -> ExponentInputs {
        let g = gamma(p);
        ExponentInputs { sigma: g.recip(), delta: BigReal::from_f64(delta, p), tau: g.recip(), sigma_prime: None }
    }

    #[test]
    fn extremal_values() {
        let p = 256;
        let s = closed_form(&golden(p, 0.0)).unwrap();
        let g = gamma(p);
        let d = |e: &Option<Exponent>, v: &BigReal| (&e.as_ref().unwrap().exact().unwrap().clone() - v).abs().to_f64();
        assert!(d(&s.omega2_hat, &(&g * &g)) < 1e-60);
        assert!(d(&s.lambda2_hat, &g.recip()) < 1e-60);
        assert!(d(&s.omega2, &(&BigReal::from_i64(2, p) + &BigReal::from_i64(5, p).sqrt())) < 1e-60);
        assert!(d(&s.psi3_sup, &BigReal::from_f64(0.5, p)) < 1e-60);
    }

    #[test]
    fn lambda2_interval_above_h() {
        let p = 256;
        let mut inp = golden(p, 0.0);
        inp.delta = &BigReal::one(p) / &BigReal::from_i64(3, p);
        let s = closed_form(&inp).unwrap();
        let Some(Exponent::Interval { lo, hi }) = &s.lambda2 else { panic!("{:?}", s.lambda2) };
        let two3 = 2.0 / 3.0;
        assert!((lo.to_f64() - two3).abs() < 1e-15);
        assert!((hi.to_f64() - two3.max(1.0 / (two3 + 1.0 / 1.618_033_988_749_895))).abs() < 1e-12);
        inp.delta = BigReal::from_f64(0.4, p);
        assert!(matches!(closed_form(&inp), Err(Error::ImproperDelta(_))));
    }

    #[test]
    fn dictionary_round_trip() {
        let p = 256;
        let s = closed_form(&golden(p, 0.1)).unwrap();
        let par = parametric_from_standard(&s, p).unwrap();
        for (a, b) in [(&par.psi1_inf, &s.psi1_inf), (&par.psi1_sup, &s.psi1_sup), (&par.psi3_inf, &s.psi3_inf)] {
            assert!((a.as_ref().unwrap().lo() - b.as_ref().unwrap().lo()).abs() < 1e-14);
        }
        let back = standard_from_parametric(&par, p).unwrap();
        assert!((back.omega2.unwrap().lo() - s.omega2.as_ref().unwrap().lo()).abs() < 1e-14);
        let bad = ExponentSet { omega2: Some(Exponent::Exact { value: BigReal::from_f64(1.5, p) }), ..s.clone() };
        assert!(matches!(parametric_from_standard(&bad, p), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn curve_endpoint() {
        let p = 256;
        let g = gamma(p);
        let c = joint_curve(&g.recip(), &BigReal::from_f64(0.25, p), 4).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[0][0].to_f64(), 0.25);
        let last = &c[3];
        assert_eq!(last[0].to_f64(), 1.0);
        assert!((last[1].to_f64() - 0.618_033_988_749_895).abs() < 1e-15);
        assert!((last[2].to_f64() - (2.0 + 5f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn gaps() {
        assert_eq!(max_gap(0.0, 1.0, vec![]), 1.0);
        assert!((max_gap(0.0, 1.0, vec![(0.1, 0.4), (0.3, 0.6), (0.9, 2.0)]) - 0.3).abs() < 1e-15);
    }
}
