//! Parametric geometry of numbers for `u = (1, ξ, ξ²)`: trajectories, successive
//! minima, the predicted 3-system and its checks.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::Approx;
use crate::error::{Error, Result};
use crate::exactlin::{det3, BigReal, SymVec};
use crate::matseq::{delta_estimate, hat_w_fit, Anchor, HatW};
use crate::xi::{xi_value, XiValue, INDEX_BUDGET};

/// Default cap on the sup-norm search radius of the primal brute force.
pub const R_MAX: u64 = 10_000;
/// Default cap on `|x₀|` in the dual brute force.
pub const R_MAX_DUAL: u64 = 10_000_000;
/// Default cap on the number of lattice lines scanned per `q` by [`minima_enumerated`].
pub const LINE_CAP: usize = 4096;
/// Safety factor applied to the candidate bound before enumerating.
pub const SAFETY: f64 = 2.0;

// ---------------------------------------------------------------------------
// trajectories

/// A nonzero integer point with cached `log‖x‖`, `log|x·u|`, `log‖x∧u‖`.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub x: SymVec,
    pub ln_norm: BigReal,
    pub ln_dot: BigReal,
    pub ln_wedge: BigReal,
    /// `|x·u|` is certified against the rounding of ξ.
    pub certified: bool,
}

impl Trajectory {
    pub fn new(x: &SymVec, xi: &XiValue, p: usize) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroObject);
        }
        Ok(Trajectory {
            x: x.clone(),
            ln_norm: x.ln_norm(p),
            ln_dot: xi.ln_dot(x, p),
            ln_wedge: xi.ln_wedge(x, p),
            certified: xi.dot_certified(x, 8),
        })
    }

    /// `L_x(q) = max(log‖x‖, log|x·u| + q)`.
    pub fn l(&self, q: &BigReal) -> BigReal {
        self.ln_norm.clone().max(&self.ln_dot + q)
    }

    /// `L*_x(q) = max(log‖x∧u‖, log‖x‖ − q)`.
    pub fn l_star(&self, q: &BigReal) -> BigReal {
        self.ln_wedge.clone().max(&self.ln_norm - q)
    }
}

/// `(L_x(q), L*_x(q))`.
pub fn traj_eval(x: &SymVec, xi: &XiValue, q: &BigReal, p: usize) -> Result<(BigReal, BigReal)> {
    let t = Trajectory::new(x, xi, p)?;
    Ok((t.l(q), t.l_star(q)))
}

// ---------------------------------------------------------------------------
// successive minima

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bruteforce,
    Candidate,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaSample {
    pub q: BigReal,
    pub l: [BigReal; 3],
    pub points: [SymVec; 3],
    pub method: Method,
}

impl MinimaSample {
    pub fn l_f64(&self) -> [f64; 3] {
        [self.l[0].to_f64(), self.l[1].to_f64(), self.l[2].to_f64()]
    }
}

/// Greedy choice of three independent points by increasing value.
fn greedy3(mut scored: Vec<(BigReal, SymVec)>) -> Option<([BigReal; 3], [SymVec; 3])> {
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut chosen: Vec<(BigReal, SymVec)> = Vec::with_capacity(3);
    for (v, x) in scored {
        let independent = match chosen.len() {
            0 => !x.is_zero(),
            1 => !chosen[0].1.wedge(&x).is_zero(),
            _ => !det3(&chosen[0].1, &chosen[1].1, &x).is_zero(),
        };
        if independent {
            chosen.push((v, x));
            if chosen.len() == 3 {
                break;
            }
        }
    }
    if chosen.len() < 3 {
        return None;
    }
    let mut it = chosen.into_iter();
    let (a, b, c) = (it.next()?, it.next()?, it.next()?);
    Some(([a.0, b.0, c.0], [a.1, b.1, c.1]))
}

/// Upper bounds for `L₁, L₂, L₃` from the best independent candidates.
pub fn minima_candidates(q: &BigReal, candidates: &[Trajectory]) -> Result<MinimaSample> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let scored = candidates.iter().map(|t| (t.l(q), t.x.clone())).collect();
    let (l, points) = greedy3(scored).ok_or(Error::NoCandidates)?;
    Ok(MinimaSample { q: q.clone(), l, points, method: Method::Candidate })
}

/// Dual counterpart of [`minima_candidates`] for `L*₁, L*₂, L*₃`.
pub fn dual_minima_candidates(q: &BigReal, candidates: &[Trajectory]) -> Result<MinimaSample> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let scored = candidates.iter().map(|t| (t.l_star(q), t.x.clone())).collect();
    let (l, points) = greedy3(scored).ok_or(Error::NoCandidates)?;
    Ok(MinimaSample { q: q.clone(), l, points, method: Method::Candidate })
}

fn unit_vectors() -> [SymVec; 3] {
    [SymVec::from_i64(1, 0, 0), SymVec::from_i64(0, 1, 0), SymVec::from_i64(0, 0, 1)]
}

/// LLL reduction of ℤ³ for the quadratic form `‖x‖² + e^{2q}(x·u)²`, optionally warm-started.
pub fn reduced_basis(xi: &XiValue, q: &BigReal, start: Option<&[SymVec; 3]>, p: usize) -> [SymVec; 3] {
    let nb = BodyNorm::new(xi, q, p);
    let mut b: Vec<SymVec> = start.map(|s| s.to_vec()).unwrap_or_else(|| unit_vectors().to_vec());
    let delta = BigReal::from_f64(0.99, p);
    let half = BigReal::from_f64(0.5, p);
    let mut k = 1usize;
    let mut guard = 0usize;
    while k < 3 {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
                // Gram–Schmidt
        let mut mu = vec![vec![BigReal::zero(p); 3]; 3];
        let mut bb: Vec<BigReal> = Vec::with_capacity(3);
        for i in 0..3 {
            let mut bi = nb.gram(&b[i], &b[i]);
            for j in 0..i {
                let mut m = nb.gram(&b[i], &b[j]);
                for t in 0..j {
                    m = &m - &(&(&mu[j][t] * &mu[i][t]) * &bb[t]);
                }
                mu[i][j] = &m / &bb[j];
                bi = &bi - &(&(&mu[i][j] * &mu[i][j]) * &bb[j]);
            }
            bb.push(bi);
        }
        let mut changed = false;
        for j in (0..k).rev() {
            let r = (&mu[k][j] + &half).floor().to_int();
            if !r.is_zero() {
                b[k] = &b[k] - &b[j].scale(&r);
                changed = true;
                break;
            }
        }
        if changed {
            continue;
        }
        let lhs = &bb[k];
        let rhs = &(&delta - &(&mu[k][k - 1] * &mu[k][k - 1])) * &bb[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    [b[0].clone(), b[1].clone(), b[2].clone()]
}

/// Nonzero combinations `Σ cⱼ bⱼ` with `cⱼ ∈ {−1, 0, 1}`, one per sign class.
pub fn small_combinations(b: &[SymVec; 3]) -> Vec<SymVec> {
    let mut out = Vec::with_capacity(13);
    for c0 in -1i64..=1 {
        for c1 in -1i64..=1 {
            for c2 in -1i64..=1 {
                let first = if c0 != 0 { c0 } else if c1 != 0 { c1 } else { c2 };
                if first <= 0 {
                    continue;
                }
                let v = &(&b[0].scale(&c0.into()) + &b[1].scale(&c1.into())) + &b[2].scale(&c2.into());
                out.push(v);
            }
        }
    }
    out
}

/// Squared body norm `N(x)² = max(‖x‖², e^{2q}(x·u)²)`, so that `L_x(q) = ½ log N(x)²`.
pub struct BodyNorm<'a> {
    xi: &'a XiValue,
    c2: BigReal,
    p: usize,
}

impl<'a> BodyNorm<'a> {
    pub fn new(xi: &'a XiValue, q: &BigReal, p: usize) -> Self {
        let q2 = &xi.q * &xi.q;
        let c2 = (&(q + q).with_precision(p).exp() / &BigReal::from_int(&(&q2 * &q2), p)).with_precision(p);
        BodyNorm { xi, c2, p }
    }

    pub fn sq(&self, x: &SymVec) -> BigReal {
        let a = BigReal::from_int(&x.norm2(), self.p);
        let d = BigReal::from_int(&self.xi.dot_scaled(x), self.p);
        a.max(&self.c2 * &(&d * &d))
    }

    /// Inner product of the quadratic form `‖x‖² + e^{2q}(x·u)²`.
    fn gram(&self, x: &SymVec, y: &SymVec) -> BigReal {
        let dx = BigReal::from_int(&self.xi.dot_scaled(x), self.p);
        let dy = BigReal::from_int(&self.xi.dot_scaled(y), self.p);
        &BigReal::from_int(&x.dot(y), self.p) + &(&self.c2 * &(&dx * &dy))
    }
}

/// Candidate minima at one `q`.
#[derive(Clone, Debug)]
pub struct CandidateMinima {
    pub sample: MinimaSample,
    /// Reduced basis, reusable as a warm start at a nearby `q`.
    pub basis: [SymVec; 3],
    /// Every lattice point that could beat the returned values was examined.
    pub exhaustive: bool,
}

/// Minimum of a convex function on the integers of `[lo, hi]`.
fn convex_argmin(lo: i64, hi: i64, f: impl Fn(i64) -> BigReal) -> i64 {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 2 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        match f(m1).partial_cmp(&f(m2)) {
            Some(Ordering::Less) => hi = m2 - 1,
            Some(Ordering::Greater) => lo = m1 + 1,
            _ => {
                lo = m1;
                hi = m2;
            }
        }
    }
    (lo..=hi).min_by(|a, b| f(*a).partial_cmp(&f(*b)).unwrap_or(Ordering::Equal)).unwrap_or(lo)
}

/// Candidate minima: LLL basis for the body's inscribed ellipsoid, then every line
/// `c₀b₀ + c₁b₁ + c₂b₂` meeting twice that ellipsoid at the candidate `λ₃`, each
/// minimized over `c₀`. Falls back to small combinations when more than `line_cap`
/// lines would be needed.
pub fn minima_enumerated(
    xi: &XiValue,
    q: &BigReal,
    start: Option<&[SymVec; 3]>,
    fixed: &[SymVec],
    line_cap: usize,
    p: usize,
) -> Result<CandidateMinima> {
    let b = reduced_basis(xi, q, start, p);
    let nb = BodyNorm::new(xi, q, p);
    let mut pts = small_combinations(&b);
    pts.extend(unit_vectors());
    pts.extend(fixed.iter().filter(|x| !x.is_zero()).cloned());
    let mut scored: Vec<(BigReal, SymVec)> = pts.into_iter().map(|x| (nb.sq(&x), x)).collect();
    let (up, _) = greedy3(scored.clone()).ok_or(Error::NoCandidates)?;
    let u2 = &up[2];
    let g = |i: usize, j: usize| (&nb.gram(&b[i], &b[j]) / u2).to_f64();
    let b0 = g(0, 0);
    let mu10 = g(1, 0) / b0;
    let b1 = g(1, 1) - mu10 * mu10 * b0;
    let mu20 = g(2, 0) / b0;
    let mu21 = (g(2, 1) - mu20 * mu10 * b0) / b1;
    let b2 = g(2, 2) - mu20 * mu20 * b0 - mu21 * mu21 * b1;
    // N ≤ λ₃ forces Q ≤ 2λ₃²
    let r2 = 2.0 * (1.0 + 1e-9);
    let mut lines: Vec<(i64, i64, f64)> = Vec::new();
    let mut exhaustive = [b0, b1, b2, mu10, mu20, mu21].iter().all(|v| v.is_finite()) && b0 > 0.0 && b1 > 0.0 && b2 > 0.0;
    if exhaustive {
        let c2max = (r2 / b2).sqrt().floor();
        if c2max > line_cap as f64 {
            exhaustive = false;
        }
        let c2max = if exhaustive { c2max as i64 } else { -1 };
        'outer: for c2 in 0..=c2max {
            let rest2 = r2 - (c2 * c2) as f64 * b2;
            if rest2 < 0.0 {
                continue;
            }
            let centre = -mu21 * c2 as f64;
            let h = (rest2 / b1).sqrt();
            if 2.0 * h > line_cap as f64 {
                exhaustive = false;
                lines.clear();
                break;
            }
            for c1 in (centre - h).ceil() as i64..=(centre + h).floor() as i64 {
                if c2 == 0 && c1 <= 0 {
                    continue;
                }
                let e = c1 as f64 + mu21 * c2 as f64;
                let rest = rest2 - e * e * b1;
                if rest < 0.0 {
                    continue;
                }
                lines.push((c1, c2, rest));
                if lines.len() > line_cap {
                    exhaustive = false;
                    lines.clear();
                    break 'outer;
                }
            }
        }
    }
    let per_line: Vec<(Vec<SymVec>, bool)> = lines
        .par_iter()
        .map(|&(c1, c2, rest)| {
            let v = &b[1].scale(&c1.into()) + &b[2].scale(&c2.into());
            let t = -(mu10 * c1 as f64 + mu20 * c2 as f64);
            let h = (rest / b0).sqrt();
            let at = |c0: i64| &b[0].scale(&c0.into()) + &v;
            if t.abs() + h > 1e15 {
                let m = t.round() as i64;
                return (vec![at(m - 1), at(m), at(m + 1)], false);
            }
            let m = convex_argmin((t - h).floor() as i64, (t + h).ceil() as i64, |c0| nb.sq(&at(c0)));
            (vec![at(m - 1), at(m), at(m + 1)], true)
        })
        .collect();
    exhaustive &= per_line.iter().all(|(_, ok)| *ok);
    let found = per_line.into_iter().flat_map(|(v, _)| v);
    scored.extend(found.filter(|x| !x.is_zero()).map(|x| (nb.sq(&x), x)));
    let (n2, points) = greedy3(scored).ok_or(Error::NoCandidates)?;
    let half = BigReal::from_f64(0.5, p);
    let l = n2.map(|v| &v.ln() * &half);
    Ok(CandidateMinima { sample: MinimaSample { q: q.clone(), l, points, method: Method::Candidate }, basis: b, exhaustive })
}

fn xi_f64(xi: &XiValue) -> (f64, f64) {
    let x = xi.value.to_f64();
    (x, x * x)
}

/// Exact successive minima over integer points, by enumeration inside a radius
/// certified by a candidate upper bound on `λ₃`.
pub fn minima_bruteforce(xi: &XiValue, q: &BigReal, hints: &[SymVec], r_max: u64, p: usize) -> Result<MinimaSample> {
    let up = minima_enumerated(xi, q, None, hints, LINE_CAP, p)?.sample;
    let lam3 = up.l[2].to_f64().exp();
    let radius = (SAFETY * lam3).ceil();
    if !radius.is_finite() || radius > r_max as f64 {
        return Err(Error::TooLarge { radius: radius.min(u64::MAX as f64) as u64, cap: r_max });
    }
    let r = radius as i64;
    let (xf, xf2) = xi_f64(xi);
    let qf = q.to_f64();
    let slack = lam3 * (-qf).exp() * (1.0 + 1e-6) + 1e-9;
    let bound = lam3 * (1.0 + 1e-6) + 1e-9;
    let found: Vec<SymVec> = (0..=r)
        .into_par_iter()
        .flat_map_iter(|x2| {
            let mut v = Vec::new();
            for x1 in -r..=r {
                if x2 == 0 && x1 < 0 {
                    continue;
                }
                let c = x1 as f64 * xf + x2 as f64 * xf2;
                let lo = (-c - slack).ceil() as i64;
                let hi = (-c + slack).floor() as i64;
                for x0 in lo..=hi {
                    if x2 == 0 && x1 == 0 && x0 <= 0 {
                        continue;
                    }
                    let n = ((x0 * x0 + x1 * x1 + x2 * x2) as f64).sqrt();
                    if n <= bound {
                        v.push(SymVec::from_i64(x0, x1, x2));
                    }
                }
            }
            v
        })
        .collect();
    let traj: Vec<Trajectory> = found.iter().filter_map(|x| Trajectory::new(x, xi, p).ok()).collect();
    let mut s = minima_candidates(q, &traj)?;
    s.method = Method::Bruteforce;
    Ok(s)
}

/// f64 value of `max(‖x∧u‖, ‖x‖e^{−q})` for `u = (1, ξ, ξ²)`.
fn dual_score(x0: i64, x1: i64, x2: i64, xf: f64, xf2: f64, eq: f64) -> f64 {
    let (x0, x1, x2) = (x0 as f64, x1 as f64, x2 as f64);
    let (a, b) = (x0 * xf - x1, x0 * xf2 - x2);
    let c = xf * (b - a * xf);
    (a * a + b * b + c * c).sqrt().max((x0 * x0 + x1 * x1 + x2 * x2).sqrt() * eq)
}

/// Third independent value in a list sorted by score, if any.
fn third_independent(sorted: &[(f64, SymVec)]) -> Option<f64> {
    let mut basis: Vec<&SymVec> = Vec::with_capacity(3);
    for (v, x) in sorted {
        let independent = match basis.len() {
            0 => true,
            1 => !basis[0].wedge(x).is_zero(),
            _ => !det3(basis[0], basis[1], x).is_zero(),
        };
        if independent {
            basis.push(x);
            if basis.len() == 3 {
                return Some(*v);
            }
        }
    }
    None
}

/// Exact dual minima `L*₁, L*₂, L*₃` by enumeration along the direction of `u`.
///
/// The search runs over `|x₀| ≤ r` with `r` doubling; each pass tightens the bound on
/// `L*₃` and stops once `r` covers the radius that bound requires.
pub fn dual_minima_bruteforce(xi: &XiValue, q: &BigReal, hints: &[SymVec], r_max: u64, p: usize) -> Result<MinimaSample> {
    let all: Vec<Trajectory> = unit_vectors().iter().chain(hints).filter_map(|x| Trajectory::new(x, xi, p).ok()).collect();
    let up = dual_minima_candidates(q, &all)?;
    let mut lam3 = up.l[2].to_f64().exp();
    let qf = q.to_f64();
    let eq = (-qf).exp();
    let (xf, xf2) = xi_f64(xi);
    let mut r: i64 = 64;
    loop {
        let radius = (SAFETY * lam3 / eq).ceil();
        if !radius.is_finite() || radius > r_max as f64 {
            return Err(Error::TooLarge { radius: radius.min(u64::MAX as f64) as u64, cap: r_max });
        }
        let last = r as f64 >= radius;
        if last {
            r = radius as i64;
        }
        // Rounding of the f64 scores is below this margin for |x₀| ≤ r.
        let margin = 16.0 * (r as f64 + 1.0) * f64::EPSILON * (1.0 + xf2) + lam3 * 1e-9;
        let bound = lam3 * (1.0 + 1e-6) + margin;
        let mut found: Vec<(f64, SymVec)> = (0..=r)
            .into_par_iter()
            .flat_map_iter(|x0| {
                let mut v = Vec::new();
                let a = x0 as f64 * xf;
                let b = x0 as f64 * xf2;
                for x1 in (a - bound).ceil() as i64..=(a + bound).floor() as i64 {
                    for x2 in (b - bound).ceil() as i64..=(b + bound).floor() as i64 {
                        if x0 == 0 && (x2 < 0 || (x2 == 0 && x1 <= 0)) {
                            continue;
                        }
                        let s = dual_score(x0, x1, x2, xf, xf2, eq);
                        if s <= bound {
                            v.push((s, SymVec::from_i64(x0, x1, x2)));
                        }
                    }
                }
                v
            })
            .collect();
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        if let Some(t) = third_independent(&found) {
            lam3 = lam3.min(t * (1.0 + 1e-6) + margin);
        }
        if last {
            let third = third_independent(&found).ok_or(Error::NoCandidates)?;
            let traj: Vec<Trajectory> = found
                .iter()
                .take_while(|(v, _)| *v <= third + 2.0 * margin)
                .filter_map(|(_, x)| Trajectory::new(x, xi, p).ok())
                .collect();
            let mut s = dual_minima_candidates(q, &traj)?;
            s.method = Method::Bruteforce;
            return Ok(s);
        }
        r = r.saturating_mul(4);
    }
}

// ---------------------------------------------------------------------------
// exact-log forms

/// `a·A + b·B + δ(a′·A + b′·B)` with `A = log Ŵ_{k₀−1}`, `B = log Ŵ_{k₀}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LogForm {
    pub a: i128,
    pub b: i128,
    pub da: i128,
    pub db: i128,
}

impl LogForm {
    pub fn w(c: (i128, i128)) -> Self {
        LogForm { a: c.0, b: c.1, da: 0, db: 0 }
    }

    /// Multiplies the non-δ part by δ.
    pub fn times_delta(self) -> Self {
        assert!(self.da == 0 && self.db == 0, "δ² terms are not representable");
        LogForm { a: 0, b: 0, da: self.a, db: self.b }
    }

    pub fn scale(self, k: i128) -> Self {
        LogForm { a: self.a * k, b: self.b * k, da: self.da * k, db: self.db * k }
    }

    pub fn is_zero(&self) -> bool {
        *self == LogForm::default()
    }

    pub fn eval(&self, basis: &LogBasis) -> BigReal {
        let p = basis.a.precision();
        let f = |c: i128| BigReal::from_i128(c, p);
        let plain = &(&basis.a * &f(self.a)) + &(&basis.b * &f(self.b));
        let dl = &(&basis.a * &f(self.da)) + &(&basis.b * &f(self.db));
        &plain + &(&basis.delta * &dl)
    }
}

impl Add for LogForm {
    type Output = LogForm;
    fn add(self, o: LogForm) -> LogForm {
        LogForm { a: self.a + o.a, b: self.b + o.b, da: self.da + o.da, db: self.db + o.db }
    }
}

impl Sub for LogForm {
    type Output = LogForm;
    fn sub(self, o: LogForm) -> LogForm {
        self + (-o)
    }
}

impl Neg for LogForm {
    type Output = LogForm;
    fn neg(self) -> LogForm {
        self.scale(-1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LogBasis {
    pub a: BigReal,
    pub b: BigReal,
    pub delta: BigReal,
}

/// A breakpoint quantity in exact form and numerically.
#[derive(Clone, Debug, Serialize)]
pub struct Val {
    pub form: LogForm,
    pub value: BigReal,
}

// ---------------------------------------------------------------------------
// predicted system

/// Hat quantities at one index `i = t_k + l`.
#[derive(Clone, Debug, Serialize)]
pub struct IndexData {
    pub i: i64,
    pub k: usize,
    pub l: i64,
    pub log_y: Val,
    pub log_z: Val,
    pub log_e: Val,
    pub log_e_star: Val,
    pub q: Val,
    pub c: Val,
    /// `I_i = [a_i, b_i]`.
    pub a: Val,
    pub b: Val,
}

/// How δ was chosen for the predicted system.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSource {
    /// All `|det w_k| = 1`.
    ExactZero,
    /// `δ̂ = δ_{k_max}` from the determinant growth.
    Estimate { k_max: usize },
    Forced,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemBreakpoints {
    pub k_lo: usize,
    pub k_hi: usize,
    pub k0: usize,
    pub delta: BigReal,
    pub delta_source: DeltaSource,
    pub threshold: BigReal,
    /// `δ < σ/(1+σ)`; when false the structure is still built but is not expected to be a 3-system.
    pub hypothesis: bool,
    pub basis: LogBasis,
    pub rows: Vec<IndexData>,
    /// `(k, d_k)`.
    pub d: Vec<(usize, Val)>,
    #[serde(skip)]
    hat: HatW,
    #[serde(skip)]
    w_back: LogForm,
    #[serde(skip)]
    prog: crate::sturm::SturmianProgram,
    #[serde(skip)]
    first_index: i64,
}

/// Which δ the predicted system should use.
#[derive(Clone, Debug)]
pub enum DeltaChoice {
    /// δ = 0 when every determinant is ±1, otherwise the estimate at `k_max`.
    Auto,
    Forced(BigReal),
}

fn fval(f: LogForm, basis: &LogBasis) -> Val {
    Val { value: f.eval(basis), form: f }
}

/// Breakpoint data for `k ∈ [k_lo, k_hi]` and the map
/// `P = Φ₃(hatL_{t_{k+1}}, −hatL*_{i+1}, hatL_{i+1})` on `[c_i, c_{i+1})`.
pub fn predicted_system(ap: &mut Approx, k_lo: usize, k_hi: usize, delta: DeltaChoice, anchor: Anchor) -> Result<SystemBreakpoints> {
    if k_lo > k_hi {
        return Err(Error::BadWindow(format!("empty k-window {k_lo}:{k_hi}")));
    }
    let p = ap.precision();
    let prog = ap.prog().clone();
    let q = prog.quantities(64, p)?;
    let threshold = &q.sigma / &(&BigReal::one(p) + &q.sigma);
    let hat = hat_w_fit(&mut ap.seq, k_hi + 2, anchor)?;
    let k0 = hat.k0;
    if k_lo < k0 {
        return Err(Error::BadWindow(format!("k_lo = {k_lo} is below the anchor k0 = {k0}")));
    }
    let (delta, delta_source) = match delta {
        DeltaChoice::Forced(d) => (d, DeltaSource::Forced),
        DeltaChoice::Auto => {
            let kd = k_hi.max(12);
            let dr = delta_estimate(&mut ap.seq, kd)?;
            if dr.exact_zero {
                (BigReal::zero(p), DeltaSource::ExactZero)
            } else {
                (dr.estimate, DeltaSource::Estimate { k_max: kd })
            }
        }
    };
    let hypothesis = delta < threshold;
    let basis = LogBasis { a: hat.a.clone(), b: hat.b.clone(), delta: delta.clone() };
    // log Ŵ_{k₀−2} = B − s_{k₀} A
    let w_back = LogForm { a: -(prog.s(k0) as i128), b: 1, da: 0, db: 0 };
    let mut sys = SystemBreakpoints {
        k_lo,
        k_hi,
        k0,
        delta,
        delta_source,
        threshold,
        hypothesis,
        basis,
        rows: Vec::new(),
        d: Vec::new(),
        hat,
        w_back,
        prog: prog.clone(),
        first_index: prog.t(k_lo) - 1,
    };
    let last = prog.t(k_hi + 1);
    for i in sys.first_index..=last {
        let row = sys.index_data(i);
        sys.rows.push(row);
    }
    for k in k_lo..=k_hi {
        let f = sys.w(k).scale(3) - sys.w(k).times_delta() + sys.w(k - 1) - sys.w(k - 1).times_delta();
        let v = fval(f, &sys.basis);
        sys.d.push((k, v));
    }
    Ok(sys)
}

impl SystemBreakpoints {
    /// `log Ŵ_k` as a form, for `k ≥ k₀ − 2`.
    pub fn w(&self, k: usize) -> LogForm {
        if k + 2 == self.k0 {
            self.w_back
        } else {
            LogForm::w(self.hat.coeff(k))
        }
    }

    fn index_data(&self, i: i64) -> IndexData {
        let (k, l) = self.prog.decompose(i);
        let (wk, wk1) = (self.w(k), self.w(k - 1));
        let log_y = wk.scale(l as i128 + 1) + wk1;
        let log_z = wk.scale(l as i128) + wk1;
        let log_e_star = log_y.times_delta() - log_y;
        // ((δ−1)(l+1) − 1) Ŵ_k + (δ−1) Ŵ_{k−1}
        let log_e = wk.scale(l as i128 + 1).times_delta() - wk.scale(l as i128 + 2) + wk1.times_delta() - wk1;
        let q = log_y.scale(2) - log_y.times_delta();
        let c = q + wk;
        // I_i: −hatL*_i meets the top of hatL_{t_{k+1}}, hatL_i, then hatL_i overtakes it
        let top = if l == 0 { wk } else { log_z };
        let a = log_y + top;
        let b = -log_e_star - log_e;
        let v = |f| fval(f, &self.basis);
        IndexData {
            i,
            k,
            l,
            log_y: v(log_y),
            log_z: v(log_z),
            log_e: v(log_e),
            log_e_star: v(log_e_star),
            q: v(q),
            c: v(c),
            a: v(a),
            b: v(b),
        }
    }

    pub fn row(&self, i: i64) -> Option<&IndexData> {
        let j = i - self.first_index;
        (j >= 0).then(|| self.rows.get(j as usize)).flatten()
    }

    fn row_or(&self, i: i64) -> IndexData {
        self.row(i).cloned().unwrap_or_else(|| self.index_data(i))
    }

    /// `hatL_i(q) = max(log Ẑ_i, log E_i + q)`.
    pub fn hat_l(&self, i: i64, q: &BigReal) -> BigReal {
        let r = self.row_or(i);
        r.log_z.value.max(&r.log_e.value + q)
    }

    /// `hatL*_i(q) = max(log E*_i, log Ŷ_i − q)`.
    pub fn hat_l_star(&self, i: i64, q: &BigReal) -> BigReal {
        let r = self.row_or(i);
        r.log_e_star.value.max(&r.log_y.value - q)
    }

    /// Covered span `[c_{t_{k_lo}−1}, c_{t_{k_hi+1}−1}]`.
    pub fn span(&self) -> (BigReal, BigReal) {
        let lo = self.row(self.first_index).expect("first row").c.value.clone();
        let hi = self.row(self.prog.t(self.k_hi + 1) - 1).expect("last row").c.value.clone();
        (lo, hi)
    }

    /// Index `i` with `c_i ≤ q < c_{i+1}`.
    pub fn piece(&self, q: &BigReal) -> Option<i64> {
        let last = self.prog.t(self.k_hi + 1) - 1;
        (self.first_index..last).find(|&i| {
            let lo = &self.row(i).expect("row").c.value;
            let hi = &self.row(i + 1).expect("row").c.value;
            lo <= q && q < hi
        })
    }

    fn piece_funcs(&self, i: i64) -> [Func; 3] {
        let (k, _) = self.prog.decompose(i + 1);
        let top = self.row_or(self.prog.t(k + 1));
        let nx = self.row_or(i + 1);
        let zero = BigReal::zero(self.delta.precision());
        let one = BigReal::one(self.delta.precision());
        let aff = |s: &BigReal, c: &BigReal| Affine { slope: s.clone(), icpt: c.clone() };
        [
            Func::Max(vec![aff(&zero, &top.log_z.value), aff(&one, &top.log_e.value)]),
            Func::Min(vec![aff(&zero, &-&nx.log_e_star.value), aff(&one, &-&nx.log_y.value)]),
            Func::Max(vec![aff(&zero, &nx.log_z.value), aff(&one, &nx.log_e.value)]),
        ]
    }

    /// `P(q)`, or `None` outside the span.
    pub fn p(&self, q: &BigReal) -> Option<[BigReal; 3]> {
        let i = self.piece(q)?;
        let f = self.piece_funcs(i);
        let mut v = [f[0].eval(q), f[1].eval(q), f[2].eval(q)];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Some(v)
    }

    /// The map as a piecewise system for [`validate_3system`].
    pub fn as_system(&self) -> PiecewiseSystem {
        let last = self.prog.t(self.k_hi + 1) - 1;
        let pieces = (self.first_index..last)
            .map(|i| Piece {
                lo: self.row(i).expect("row").c.value.clone(),
                hi: self.row(i + 1).expect("row").c.value.clone(),
                funcs: self.piece_funcs(i).to_vec(),
            })
            .collect();
        PiecewiseSystem { pieces }
    }

    /// `I′_i = [b_i, a_{i+1}]` containing `q`, by index `i`.
    pub fn gray_index(&self, q: &BigReal) -> Option<i64> {
        self.rows.windows(2).find(|w| &w[0].b.value <= q && q <= &w[1].a.value).map(|w| w[0].i)
    }

    /// `I_i = [a_i, b_i]` containing `q`, by index `i`.
    pub fn bright_index(&self, q: &BigReal) -> Option<i64> {
        self.rows.iter().find(|r| &r.a.value <= q && q <= &r.b.value).map(|r| r.i)
    }

    /// `q_{t_k}` when available.
    pub fn q_t(&self, k: usize) -> Option<BigReal> {
        self.row(self.prog.t(k)).map(|r| r.q.value.clone())
    }

    pub fn program(&self) -> &crate::sturm::SturmianProgram {
        &self.prog
    }

    /// Exact identity `P₁+P₂+P₃ = q` at every `q_{t_k}`, in the log basis.
    pub fn sum_rule_symbolic(&self) -> bool {
        (self.k_lo..=self.k_hi).all(|k| {
            let r = self.row_or(self.prog.t(k));
            let top = self.row_or(self.prog.t(k + 1));
            (r.log_z.form + top.log_z.form - r.log_e_star.form - r.q.form).is_zero()
        })
    }

    /// Exact values at `c_i`: `−hatL*_i(c_i) = −hatL*_{i+1}(c_i) = −log E*_i` and
    /// `log E_i + c_i = log Ẑ_{ψ⁻¹(i)}`.
    pub fn c_values_symbolic(&self) -> bool {
        let last = self.prog.t(self.k_hi + 1) - 1;
        (self.first_index.max(0)..last).all(|i| {
            let r = self.row_or(i);
            let n = self.row_or(i + 1);
            let pi = self.row_or(self.prog.psi_inv(i));
            (n.log_y.form - r.c.form - r.log_e_star.form).is_zero()
                && (r.log_y.form - r.q.form - r.log_e_star.form).is_zero()
                && (r.log_e.form + r.c.form - pi.log_z.form).is_zero()
        })
    }

    /// `q_i < c_i < q_{i+1} < c_{i+1}` along the rows.
    pub fn ordering(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].q.value < w[0].c.value && w[0].c.value < w[1].q.value && w[1].q.value < w[1].c.value)
    }

    /// `−hatL*_i(q_i) − max(hatL_i(q_i), hatL_{t_{k+1}}(q_i))` along the rows (from index 0).
    pub fn growth_gaps(&self) -> Vec<(i64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.i >= 0 && r.k >= self.k_lo && r.k <= self.k_hi)
            .map(|r| {
                let q = &r.q.value;
                let top = self.hat_l(self.prog.t(r.k + 1), q);
                let g = &(-&self.hat_l_star(r.i, q)) - &self.hat_l(r.i, q).max(top);
                (r.i, g.to_f64())
            })
            .collect()
    }

    /// Shape of the combined graph on each piece (the inequalities behind the two pictures).
    pub fn shape_check(&self) -> Vec<(i64, bool)> {
        let last = self.prog.t(self.k_hi + 1) - 1;
        let tol = BigReal::from_f64(1e-9, self.delta.precision());
        (self.first_index..last)
            .map(|i| {
                let (k, l) = self.prog.decompose(i + 1);
                let tk1 = self.prog.t(k + 1);
                let ci = &self.row_or(i).c.value;
                let ci1 = &self.row_or(i + 1).c.value;
                let up = |x: &BigReal, y: &BigReal| x <= &(y + &tol);
                let ok = if l == 0 {
                    up(&self.hat_l(i + 1, ci), &-&self.hat_l_star(i + 1, ci))
                        && up(&-&self.hat_l_star(i + 1, ci), &self.hat_l(tk1, ci))
                } else {
                    let qi1 = &self.row_or(i + 1).q.value;
                    self.hat_l(i + 1, qi1) < -&self.hat_l_star(i + 1, qi1)
                        && up(&-&self.hat_l_star(i + 1, ci), &self.hat_l(i + 1, ci))
                        && up(&-&self.hat_l_star(i + 1, ci1), &self.hat_l(i + 1, ci1))
                        && self.hat_l(tk1, ci) < -&self.hat_l_star(i + 1, ci)
                };
                (i, ok)
            })
            .collect()
    }

    /// Full verdict: the three conditions on the sorted map over `[q_{t_{k_lo}}, span end)`,
    /// the breakpoint ordering, the shape of the hat functions and the δ hypothesis.
    pub fn validate(&self, tol: &BigReal) -> SystemValidity {
        let (lo, hi) = self.span();
        let lo = match self.q_t(self.k_lo) {
            Some(q) if q > lo => q,
            _ => lo,
        };
        let conditions = validate_3system(&self.as_system(), &lo, &hi, tol);
        let ordering = self.ordering();
        let bad: Vec<i64> = self.shape_check().into_iter().filter(|(_, ok)| !ok).map(|(i, _)| i).collect();
        let shape = bad.is_empty();
        let valid = conditions.valid && ordering && shape && self.hypothesis;
        let mut diagnostic = Vec::new();
        if !self.hypothesis {
            diagnostic.push(format!(
                "not a 3-system: delta = {} is not below sigma/(1+sigma) = {}",
                self.delta.to_decimal(6),
                self.threshold.to_decimal(6)
            ));
        }
        if !shape {
            diagnostic.push(format!("hat functions out of order on the pieces starting at c_i for i in {bad:?}"));
        }
        if !ordering {
            diagnostic.push("q_i < c_i < q_(i+1) fails".into());
        }
        diagnostic.extend(conditions.failures.iter().cloned());
        SystemValidity { conditions, ordering, shape, hypothesis: self.hypothesis, valid, diagnostic }
    }

    /// All breakpoint abscissas in the span plus `refine` uniform points, sorted and deduplicated.
    pub fn sample_grid(&self, refine: usize) -> Vec<BigReal> {
        let (lo, hi) = self.span();
        let mut v: Vec<BigReal> = Vec::new();
        for r in &self.rows {
            for x in [&r.q.value, &r.c.value, &r.a.value, &r.b.value] {
                v.push(x.clone());
            }
        }
        for (_, d) in &self.d {
            v.push(d.value.clone());
        }
        let p = lo.precision();
        let step = &(&hi - &lo) / &BigReal::from_i64(refine.max(1) as i64, p);
        for j in 0..=refine {
            v.push(&lo + &(&step * &BigReal::from_i64(j as i64, p)));
        }
        v.retain(|x| x >= &lo && x < &hi);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let eps = BigReal::from_f64(1e-12, p);
        v.dedup_by(|a, b| (&*a - &*b).abs() < eps);
        v
    }
}

// ---------------------------------------------------------------------------
// 3-system validation

#[derive(Clone, Debug, Serialize)]
pub struct Affine {
    pub slope: BigReal,
    pub icpt: BigReal,
}

impl Affine {
    fn at(&self, q: &BigReal) -> BigReal {
        &(&self.slope * q) + &self.icpt
    }
}

/// Max or min of affine functions.
#[derive(Clone, Debug, Serialize)]
pub enum Func {
    Max(Vec<Affine>),
    Min(Vec<Affine>),
}

impl Func {
    fn parts(&self) -> &[Affine] {
        match self {
            Func::Max(v) | Func::Min(v) => v,
        }
    }

    fn active(&self, q: &BigReal) -> &Affine {
        let it = self.parts().iter();
        let cmp = |a: &&Affine, b: &&Affine| a.at(q).partial_cmp(&b.at(q)).unwrap_or(Ordering::Equal);
        match self {
            Func::Max(_) => it.max_by(cmp),
            Func::Min(_) => it.min_by(cmp),
        }
        .expect("nonempty function")
    }

    pub fn eval(&self, q: &BigReal) -> BigReal {
        self.active(q).at(q)
    }
}

/// A map `q ↦ Φ₃(f₁(q), f₂(q), f₃(q))` given piecewise on `[lo, hi)`.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseSystem {
    pub pieces: Vec<Piece>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Piece {
    pub lo: BigReal,
    pub hi: BigReal,
    pub funcs: Vec<Func>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub ordering_and_sum: bool,
    pub one_slope: bool,
    pub switch_equalities: bool,
    pub continuous: bool,
    pub valid: bool,
    pub intervals_checked: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemValidity {
    pub conditions: ValidityReport,
    pub ordering: bool,
    pub shape: bool,
    pub hypothesis: bool,
    pub valid: bool,
    pub diagnostic: Vec<String>,
}

fn sorted_with_slopes(funcs: &[Func], q: &BigReal) -> (Vec<BigReal>, Vec<BigReal>) {
    let mut v: Vec<(BigReal, BigReal)> = funcs
        .iter()
        .map(|f| {
            let a = f.active(q);
            (a.at(q), a.slope.clone())
        })
        .collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    v.into_iter().unzip()
}

/// Checks the three defining conditions of a 3-system on `[lo, hi]`, plus continuity.
pub fn validate_3system(sys: &PiecewiseSystem, lo: &BigReal, hi: &BigReal, tol: &BigReal) -> ValidityReport {
    let mut rep = ValidityReport {
        ordering_and_sum: true,
        one_slope: true,
        switch_equalities: true,
        continuous: true,
        valid: false,
        intervals_checked: 0,
        failures: Vec::new(),
    };
    let fail = |rep: &mut ValidityReport, what: &str, q: &BigReal| {
        if rep.failures.len() < 20 {
            rep.failures.push(format!("{what} at q = {}", q.to_decimal(9)));
        }
    };
    let zero = BigReal::zero(tol.precision());
    let one = BigReal::one(tol.precision());
    let near = |a: &BigReal, b: &BigReal| (a - b).abs() <= *tol;
    // (slope-one position on the previous interval, P at its right end)
    let mut prev: Option<(Option<usize>, Vec<BigReal>)> = None;
    for piece in &sys.pieces {
        let a = if &piece.lo > lo { piece.lo.clone() } else { lo.clone() };
        let b = if &piece.hi < hi { piece.hi.clone() } else { hi.clone() };
        if a >= b {
            continue;
        }
        let mut xs = vec![a.clone(), b.clone()];
        let parts: Vec<&Affine> = piece.funcs.iter().flat_map(|f| f.parts()).collect();
        for (m, f) in parts.iter().enumerate() {
            for g in &parts[m + 1..] {
                let ds = &f.slope - &g.slope;
                if ds.abs() > *tol {
                    let x = &(&g.icpt - &f.icpt) / &ds;
                    if x > a && x < b {
                        xs.push(x);
                    }
                }
            }
        }
        xs.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        xs.dedup_by(|x, y| (&*x - &*y).abs() <= *tol);
        if xs.len() < 2 {
            continue;
        }
        for (j, x) in xs.iter().enumerate() {
            let (vals, _) = sorted_with_slopes(&piece.funcs, x);
            if vals[0] < &zero - tol {
                rep.ordering_and_sum = false;
                fail(&mut rep, "negative P1", x);
            }
            let s = vals.iter().fold(zero.clone(), |acc, v| &acc + v);
            if !near(&s, x) {
                rep.ordering_and_sum = false;
                fail(&mut rep, "sum differs from q", x);
            }
            if j == 0 {
                if let Some((r, pv)) = &prev {
                    if pv.iter().zip(&vals).any(|(u, v)| !near(u, v)) {
                        rep.continuous = false;
                        fail(&mut rep, "discontinuity", x);
                    }
                    if let Some(r) = r {
                        prev = Some((Some(*r), vals.clone()));
                    }
                }
            }
            if j + 1 == xs.len() {
                break;
            }
            let y = &xs[j + 1];
            let mid = &(x + y) * &BigReal::from_f64(0.5, tol.precision());
            let (mv, ms) = sorted_with_slopes(&piece.funcs, &mid);
            rep.intervals_checked += 1;
            let ones: Vec<usize> = (0..ms.len()).filter(|&r| near(&ms[r], &one)).collect();
            let zeros = ms.iter().filter(|s| near(s, &zero)).count();
            let here = if ones.len() == 1 && zeros + 1 == ms.len() {
                Some(ones[0])
            } else {
                rep.one_slope = false;
                fail(&mut rep, "slopes are not one 1 and the rest 0", &mid);
                None
            };
            // switch condition at x (left interval → this one)
            if let (Some((Some(r), _)), Some(s)) = (&prev, here) {
                let (r, s) = (*r, s);
                if r < s {
                    let (vals, _) = sorted_with_slopes(&piece.funcs, x);
                    if (r..s).any(|m| !near(&vals[m], &vals[m + 1])) {
                        rep.switch_equalities = false;
                        fail(&mut rep, "switch without equality", x);
                    }
                }
            }
            let (endv, _) = sorted_with_slopes(&piece.funcs, y);
            let _ = mv;
            prev = Some((here, endv));
        }
    }
    rep.valid = rep.ordering_and_sum && rep.one_slope && rep.switch_equalities && rep.continuous && rep.intervals_checked > 0;
    rep
}

// ---------------------------------------------------------------------------
// empirical minima along the predicted system

/// Fixed candidates from the approximation sequence: primitive `y_i` and `z_j` for `i, j ≤ i_max`.
pub fn sequence_candidates(ap: &mut Approx, i_max: i64) -> Result<Vec<SymVec>> {
    let mut pts = Vec::new();
    for i in -2..=i_max {
        pts.push(ap.y_at(i)?.primitive()?);
    }
    for j in -1..=i_max {
        let z = ap.z_at(j)?;
        if !z.is_zero() {
            pts.push(z.primitive()?);
        }
    }
    Ok(pts)
}

/// Candidate minima on an increasing grid, warm-starting the lattice reduction.
pub fn minima_along(xi: &XiValue, grid: &[BigReal], fixed: &[SymVec], p: usize) -> Result<Vec<CandidateMinima>> {
    let mut basis: Option<[SymVec; 3]> = None;
    let mut out = Vec::with_capacity(grid.len());
    for q in grid {
        let c = minima_enumerated(xi, q, basis.as_ref(), fixed, LINE_CAP, p)?;
        basis = Some(c.basis.clone());
        out.push(c);
    }
    Ok(out)
}

/// Bits of ξ and working precision for trajectories up to `q_max`.
pub fn working_precision(q_max: f64) -> (usize, usize) {
    let bits = (q_max.max(0.0) / std::f64::consts::LN_2 * 1.6) as usize + 256;
    (bits, 2 * bits + 256)
}

/// Primitive `y_i`, `z_j` whose log-norm stays below `ln_bound`, always including `i = −2..=2`.
pub fn sequence_candidates_below(ap: &mut Approx, ln_bound: f64) -> Result<Vec<SymVec>> {
    let mut i_max = 2;
    while i_max < INDEX_BUDGET && ap.y_at(i_max + 1)?.ln_norm(64).to_f64() <= ln_bound {
        i_max += 1;
    }
    sequence_candidates(ap, i_max + 1)
}

/// ξ to the precision the grid needs, then candidate minima at every grid point.
pub fn minima_on_grid(ap: &mut Approx, grid: &[BigReal]) -> Result<(XiValue, Vec<CandidateMinima>)> {
    let q_max = grid.iter().map(|q| q.to_f64()).fold(0.0, f64::max);
    let (bits, p) = working_precision(q_max);
    let xi = xi_value(ap, bits)?;
    let fixed = sequence_candidates_below(ap, q_max + 8.0)?;
    let grid: Vec<BigReal> = grid.iter().map(|q| q.clone().with_precision(p)).collect();
    let c = minima_along(&xi, &grid, &fixed, p)?;
    Ok((xi, c))
}

/// One row of the comparison table.
#[derive(Clone, Debug, Serialize)]
pub struct ComparedSample {
    pub q: f64,
    pub l: [f64; 3],
    pub p: [f64; 3],
    pub gray: bool,
    pub bright: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub early: (usize, usize),
    pub late: (usize, usize),
    pub item1_early: f64,
    pub item1_late: f64,
    pub item1_ok: bool,
    pub item2_early: f64,
    pub item2_late: f64,
    pub item2_ok: bool,
    /// Smallest `C` with `P₂ − C ≤ L₂ ≤ L₃ ≤ P₃ + C` on the gray samples.
    pub item3_c: f64,
    pub item3_ordered: bool,
    pub rows: Vec<ComparedSample>,
}

/// Prediction versus empirical minima; boundedness as non-growth between two k-windows.
pub fn compare(sys: &SystemBreakpoints, samples: &[MinimaSample], early: (usize, usize), late: (usize, usize)) -> Result<ComparisonReport> {
    let win = |w: (usize, usize)| -> Result<(f64, f64)> {
        let a = sys.q_t(w.0).ok_or_else(|| Error::BadWindow(format!("k = {} outside the system", w.0)))?;
        let b = sys.q_t(w.1).ok_or_else(|| Error::BadWindow(format!("k = {} outside the system", w.1)))?;
        Ok((a.to_f64(), b.to_f64()))
    };
    let (e0, e1) = win(early)?;
    let (l0, l1) = win(late)?;
    let mut rows = Vec::new();
    for s in samples {
        let Some(pv) = sys.p(&s.q) else { continue };
        rows.push(ComparedSample {
            q: s.q.to_f64(),
            l: s.l_f64(),
            p: [pv[0].to_f64(), pv[1].to_f64(), pv[2].to_f64()],
            gray: sys.gray_index(&s.q).is_some(),
            bright: sys.bright_index(&s.q).is_some(),
        });
    }
    let wmax = |lo: f64, hi: f64, f: &dyn Fn(&ComparedSample) -> Option<f64>| -> f64 {
        rows.iter().filter(|r| r.q >= lo && r.q <= hi).filter_map(f).fold(0.0, f64::max)
    };
    let d1 = |r: &ComparedSample| Some((r.l[0] - r.p[0]).abs());
    let d23 = |r: &ComparedSample| r.bright.then(|| (r.l[1] - r.p[1]).abs().max((r.l[2] - r.p[2]).abs()));
    let item1_early = wmax(e0, e1, &d1);
    let item1_late = wmax(l0, l1, &d1);
    let item2_early = wmax(e0, e1, &d23);
    let item2_late = wmax(l0, l1, &d23);
    let gray: Vec<&ComparedSample> = rows.iter().filter(|r| r.gray).collect();
    let item3_c = gray.iter().map(|r| (r.p[1] - r.l[1]).max(r.l[2] - r.p[2]).max(0.0)).fold(0.0, f64::max);
    let item3_ordered = gray.iter().all(|r| r.l[1] <= r.l[2] + 1e-12);
    Ok(ComparisonReport {
        early,
        late,
        item1_early,
        item1_late,
        item1_ok: item1_late <= 2.0 * item1_early + 1e-9,
        item2_early,
        item2_late,
        item2_ok: item2_late <= 2.0 * item2_early + 1e-9,
        item3_c,
        item3_ordered,
        rows,
    })
}

// ---------------------------------------------------------------------------
// duality

#[derive(Clone, Debug, Serialize)]
pub struct DualityRow {
    pub q: f64,
    /// `|L_j(q) + L*_{4−j}(q)|` for `j = 1, 2, 3`.
    pub dev: [f64; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub rows: Vec<DualityRow>,
    pub max: [f64; 3],
    pub early_max: [f64; 3],
    pub late_max: [f64; 3],
    pub non_growing: bool,
}

/// Brute-force primal and dual minima on `q_grid` and the deviations from duality.
pub fn duality_check(xi: &XiValue, q_grid: &[BigReal], hints: &[SymVec], p: usize) -> Result<DualityReport> {
    let mut rows = Vec::new();
    for q in q_grid {
        let a = minima_bruteforce(xi, q, hints, R_MAX, p)?;
        let b = dual_minima_bruteforce(xi, q, hints, R_MAX_DUAL, p)?;
        let dev = std::array::from_fn(|j| (&a.l[j] + &b.l[2 - j]).abs().to_f64());
        rows.push(DualityRow { q: q.to_f64(), dev });
    }
    let half = rows.len() / 2;
    let mx = |rs: &[DualityRow]| -> [f64; 3] { std::array::from_fn(|j| rs.iter().map(|r| r.dev[j]).fold(0.0, f64::max)) };
    let max = mx(&rows);
    let early_max = mx(&rows[..half]);
    let late_max = mx(&rows[half..]);
    let non_growing = (0..3).all(|j| late_max[j] <= 2.0 * early_max[j] + 1e-9 || late_max[j] <= 1.0);
    Ok(DualityReport { rows, max, early_max, late_max, non_growing })
}

// ---------------------------------------------------------------------------
// export

/// CSV rows `(q, L1, L2, L3, P1, P2, P3, gray_flag)`.
pub fn to_csv(rep: &ComparisonReport, header: &str) -> String {
    let mut s = String::new();
    for line in header.lines() {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str("q,L1,L2,L3,P1,P2,P3,gray_flag\n");
    for r in &rep.rows {
        let _ = writeln!(
            s,
            "{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{}",
            r.q, r.l[0], r.l[1], r.l[2], r.p[0], r.p[1], r.p[2], r.gray as u8
        );
    }
    s
}

/// Self-contained SVG of the combined graph: `P` as lines, samples as dots, gray intervals shaded.
pub fn to_svg(sys: &SystemBreakpoints, rep: &ComparisonReport, title: &str) -> String {
    let (lo, hi) = sys.span();
    let (x0, x1) = (lo.to_f64(), hi.to_f64());
    let mut ymax = 1.0f64;
    for r in &rep.rows {
        ymax = ymax.max(r.p[2]).max(r.l[2]);
    }
    let (w, h, m) = (900.0, 560.0, 50.0);
    let sx = |x: f64| m + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / ymax * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" style="fill:#ffffff"/>"#);
    let _ = writeln!(s, r#"<text x="{m}" y="24" style="font-family:monospace;font-size:13px">{}</text>"#, xml_escape(title));
    for wnd in sys.rows.windows(2) {
        let (a, b) = (wnd[0].b.value.to_f64(), wnd[1].a.value.to_f64());
        if b > a && a >= x0 && b <= x1 {
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{m}" width="{:.2}" height="{:.2}" style="fill:#d0d0d0;fill-opacity:0.6"/>"#,
                sx(a),
                sx(b) - sx(a),
                h - 2.0 * m
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{y}" x2="{x}" y2="{y}" style="stroke:#000000"/><line x1="{m}" y1="{m}" x2="{m}" y2="{y}" style="stroke:#000000"/>"#,
        y = h - m,
        x = w - m
    );
    let colors = ["#1f5fbf", "#bf1f1f", "#1f8f3f"];
    for (j, color) in colors.iter().enumerate() {
        let pts: Vec<String> = rep.rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.q), sy(r.p[j]))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" style="fill:none;stroke:{};stroke-width:1.5"/>"#, pts.join(" "), color);
        for r in &rep.rows {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" style="fill:{}"/>"#, sx(r.q), sy(r.l[j]), color);
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" style="font-family:monospace;font-size:12px">q</text>"#, w - m + 8.0, h - m + 4.0);
    s.push_str("</svg>\n");
    s
}

fn xml_escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Integer content bound used for oracle comparisons: `log` of the largest content seen.
pub fn log_content_bound(ap: &mut Approx) -> Result<f64> {
    let b = ap.content_bound()?;
    Ok(BigReal::ln_int(&b.abs().max(BigInt::one()), 64).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matseq::MatrixSeed;
    use crate::sturm::SturmianProgram;
    use crate::xi::xi_value;

    fn bl() -> Approx {
        Approx::new(MatrixSeed::bl(1, 2, 1).unwrap(), SturmianProgram::fibonacci())
    }

    #[test]
    fn trajectory_basics() {
        let mut ap = bl();
        let xi = xi_value(&mut ap, 200).unwrap();
        let e3 = SymVec::from_i64(0, 0, 1);
        let (l, _) = traj_eval(&e3, &xi, &BigReal::zero(256), 256).unwrap();
        assert!(l.to_f64().abs() < 1e-30);
        assert_eq!(traj_eval(&SymVec::zero(), &xi, &BigReal::zero(256), 256).unwrap_err(), Error::ZeroObject);
    }

    #[test]
    fn forms() {
        let f = LogForm::w((2, 3));
        assert!((f - f).is_zero());
        let basis = LogBasis { a: BigReal::from_i64(2, 128), b: BigReal::from_i64(5, 128), delta: BigReal::from_f64(0.5, 128) };
        assert_eq!((f + f.times_delta()).eval(&basis).to_f64(), 19.0 * 1.5);
    }

    #[test]
    fn bl_system_valid() {
        let mut ap = bl();
        let sys = predicted_system(&mut ap, 3, 10, DeltaChoice::Auto, Anchor::Auto).unwrap();
        assert!(sys.hypothesis && sys.sum_rule_symbolic() && sys.c_values_symbolic() && sys.ordering());
        let tol = BigReal::from_f64(1e-9, 256);
        let (lo, hi) = sys.span();
        let lo = lo.max(sys.q_t(3).unwrap());
        let rep = validate_3system(&sys.as_system(), &lo, &hi, &tol);
        assert!(rep.valid, "{:?}", rep.failures);
        assert!(sys.validate(&tol).valid);
        let forced = predicted_system(&mut ap, 3, 10, DeltaChoice::Forced(BigReal::from_f64(0.5, 256)), Anchor::Auto).unwrap();
        
        let v = forced.validate(&tol);
        assert!(!forced.hypothesis && !v.shape && !v.valid);
    }

    #[test]
    fn flat_triple_invalid() {
        let p = 128;
        let third = Affine { slope: BigReal::from_f64(1.0 / 3.0, p), icpt: BigReal::zero(p) };
        let sys = PiecewiseSystem {
            pieces: vec![Piece {
                lo: BigReal::zero(p),
                hi: BigReal::from_i64(10, p),
                funcs: vec![Func::Max(vec![third.clone()]), Func::Max(vec![third.clone()]), Func::Max(vec![third])],
            }],
        };
        let r = validate_3system(&sys, &BigReal::zero(p), &BigReal::from_i64(10, p), &BigReal::from_f64(1e-9, p));
        assert!(!r.valid && !r.one_slope);
    }

    #[test]
    fn brute_matches_candidates() {
        let mut ap = bl();
        let xi = xi_value(&mut ap, 300).unwrap();
        let p = 320;
        let fixed = sequence_candidates(&mut ap, 12).unwrap();
        for qf in [0.0, 3.0, 7.5, 12.0] {
            let q = BigReal::from_f64(qf, p);
            let b = minima_bruteforce(&xi, &q, &fixed, R_MAX, p).unwrap();
            let c = minima_along(&xi, std::slice::from_ref(&q), &fixed, p).unwrap().remove(0).sample;
            for j in 0..3 {
                assert!((b.l[j].to_f64() - c.l[j].to_f64()).abs() < 1e-9, "q={qf} j={j}");
            }
            let sum: f64 = b.l_f64().iter().sum();
            assert!((sum - qf).abs() < 3.0);
        }
    }
}
