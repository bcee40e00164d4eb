//! The limit ξ of `[y_i]`, properness and the norm-estimate diagnostics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::approx::Approx;
use crate::error::{Error, Result};
use crate::exactlin::{BigReal, SymVec};
use crate::matseq::{delta_estimate, Family};
use crate::sturm::words::characteristic_word;

/// Largest index examined before giving up on contraction.
pub const INDEX_BUDGET: i64 = 4096;

/// One nested enclosure `[lo, hi]` of ξ produced at index `i`.
#[derive(Clone, Debug, Serialize)]
pub struct Enclosure {
    pub i: i64,
    #[serde(skip)]
    pub lo: BigRational,
    #[serde(skip)]
    pub hi: BigRational,
    /// `log₂` of the width, for reports.
    pub log2_width: f64,
}

/// ξ as an exact rational centre `p/q` with a certified radius.
#[derive(Clone, Debug, Serialize)]
pub struct XiValue {
    /// Index of the `y` whose ratio is the centre.
    pub index: i64,
    #[serde(skip)]
    pub p: BigInt,
    #[serde(skip)]
    pub q: BigInt,
    #[serde(skip)]
    pub radius: BigRational,
    pub precision_bits: usize,
    pub enclosures: Vec<Enclosure>,
    pub nested: bool,
    pub value: BigReal,
    pub u: [BigReal; 3],
}

fn log2_rat(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let n = r.numer().abs();
    let d = r.denom();
    let sh = |x: &BigInt| {
        let b = x.bits() as i64;
        let s = (b - 60).max(0);
        ((x >> s as usize).to_string().parse::<f64>().expect("float")).log2() + s as f64
    };
    sh(&n) - sh(d)
}

fn ratio(y: &SymVec) -> Option<BigRational> {
    (!y.x0.is_zero()).then(|| BigRational::new(y.x1.clone(), y.x0.clone()))
}

/// ξ from the ratios `y_{i,1}/y_{i,0}`, advanced until the enclosure width is below `2^{−bits}`.
///
/// At index `i` with `Δ_i = |r_{i+1} − r_i|` and `Δ_i ≤ Δ_{i−1}/2`, the enclosure is
/// `[r_{i+1} − Δ_i, r_{i+1} + Δ_i]`; successive enclosures nest as long as the contraction persists.
pub fn xi_value(ap: &mut Approx, bits: usize) -> Result<XiValue> {
    if !ap.seed().proper_capable() {
        return Err(Error::NoConvergence("Tr(JN) = 0, the y_i stay in a plane".into()));
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut enclosures: Vec<Enclosure> = Vec::new();
    let mut nested = true;
    let mut prev_delta: Option<BigRational> = None;
    let mut r = None;
    let mut i = 0i64;
    while i < INDEX_BUDGET {
        let y = ap.y_at(i)?;
        let y1 = ap.y_at(i + 1)?;
        let (Some(ri), Some(ri1)) = (ratio(&y), ratio(&y1)) else {
            i += 1;
            continue;
        };
        let delta = (&ri1 - &ri).abs();
        let contracting = prev_delta.as_ref().map(|pd| &delta * BigRational::from_integer(2.into()) <= *pd).unwrap_or(false);
        if contracting {
            let lo = &ri1 - &delta;
            let hi = &ri1 + &delta;
            if let Some(last) = enclosures.last() {
                if lo < last.lo || hi > last.hi {
                    nested = false;
                }
            }
            let w = &hi - &lo;
            enclosures.push(Enclosure { i, lo, hi, log2_width: log2_rat(&w) });
            if w < target {
                r = Some((i + 1, ri1, delta));
                break;
            }
        } else if !enclosures.is_empty() {
            nested = false;
        }
        prev_delta = Some(delta);
        i += 1;
    }
    let Some((index, c, radius)) = r else {
        return Err(Error::NoConvergence(format!("width 2^-{bits} not reached by index {INDEX_BUDGET}")));
    };
    let p = bits + 64;
    let value = BigReal::from_ratio(&c, p);
    let u = [BigReal::one(p), value.clone(), &value * &value];
    Ok(XiValue { index, p: c.numer().clone(), q: c.denom().clone(), radius, precision_bits: bits, enclosures, nested, value, u })
}

impl XiValue {
    pub fn center(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    /// `x · (q², pq, p²)`, i.e. `q² (x · ũ)` for `ũ = (1, ξ̃, ξ̃²)`.
    pub fn dot_scaled(&self, x: &SymVec) -> BigInt {
        let (p, q) = (&self.p, &self.q);
        &x.x0 * q * q + &x.x1 * p * q + &x.x2 * p * p
    }

    /// `x ∧ (q², pq, p²)`.
    fn wedge_scaled(&self, x: &SymVec) -> SymVec {
        let (p, q) = (&self.p, &self.q);
        x.wedge(&SymVec::new(q * q, p * q, p * p))
    }

    /// Upper bound on the change of `x·u` between `ũ` and the true `u`.
    fn dot_error(&self, x: &SymVec) -> BigRational {
        let r = &self.radius;
        let xi = BigRational::new(self.p.abs(), self.q.clone()) + r;
        let a1 = BigRational::from_integer(x.x1.abs());
        let a2 = BigRational::from_integer(x.x2.abs());
        (&a1 + &a2 * (&xi + &xi)) * r + &a2 * r * r
    }

    /// True when `|x·ũ|` dominates the rounding of ξ by at least `2^{margin}`.
    pub fn dot_certified(&self, x: &SymVec, margin: u32) -> bool {
        let v = BigRational::new(self.dot_scaled(x).abs(), &self.q * &self.q);
        v > self.dot_error(x) * BigRational::from_integer(BigInt::one() << margin)
    }

    /// `log|x·u|` from exact integers.
    pub fn ln_dot(&self, x: &SymVec, p: usize) -> BigReal {
        let n = self.dot_scaled(x);
        &BigReal::ln_int(&n, p) - &(&BigReal::ln_int(&self.q, p) * &BigReal::from_i64(2, p))
    }

    /// `log‖x ∧ u‖` (Euclidean, `u = (1, ξ, ξ²)` unnormalized) from exact integers.
    pub fn ln_wedge(&self, x: &SymVec, p: usize) -> BigReal {
        let w = self.wedge_scaled(x);
        let half = BigReal::from_f64(0.5, p + 8);
        (&(&BigReal::ln_int(&w.norm2(), p + 8) * &half) - &(&BigReal::ln_int(&self.q, p + 8) * &BigReal::from_i64(2, p + 8)))
            .with_precision(p)
    }

    /// `log|x·u|` for a rational point `num/den`.
    pub fn ln_dot_rat(&self, num: &SymVec, den: &BigInt, p: usize) -> BigReal {
        &self.ln_dot(num, p) - &BigReal::ln_int(den, p)
    }
}

/// Bits of ξ needed so that `x·u` is certified for every `x` with `log₂‖x‖ ≤ log2_norm`.
pub fn bits_for(log2_norm: f64) -> usize {
    (4.0 * log2_norm.max(1.0)) as usize + 128
}

/// Exact enclosure of `[0; m_φ′]` from the letters of the characteristic word,
/// extended until the width is below `2^{−bits}`.
pub fn bl_continued_fraction(a: u64, b: u64, s_prime: impl Fn(usize) -> u64, bits: usize) -> (BigRational, BigRational) {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut n = 64;
    loop {
        let word = characteristic_word(&s_prime, a, b, n);
        let (mut p1, mut p2) = (BigInt::zero(), BigInt::one());
        let (mut q1, mut q2) = (BigInt::one(), BigInt::zero());
        let mut conv: Vec<BigRational> = Vec::new();
        for &l in &word {
            let l = BigInt::from(l);
            let pn = &l * &p1 + &p2;
            let qn = &l * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, pn);
            q2 = std::mem::replace(&mut q1, qn);
            conv.push(BigRational::new(p1.clone(), q1.clone()));
        }
        let (x, y) = (&conv[conv.len() - 2], &conv[conv.len() - 1]);
        let (lo, hi) = if x < y { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) };
        if &hi - &lo < target {
            return (lo, hi);
        }
        n *= 2;
    }
}

/// Properness verdict: δ̂ against σ/(1+σ), bounded contents and `Tr(JN) ≠ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Properness {
    pub delta_hat: BigReal,
    pub threshold: BigReal,
    pub delta_ok: bool,
    /// Upper end of the certified Roy bracket, when available, and whether it is below the threshold.
    pub bracket_hi: Option<BigReal>,
    pub bracket_ok: Option<bool>,
    pub max_content: String,
    pub contents_bounded: bool,
    pub tr_jn_nonzero: bool,
    pub proper: bool,
}

/// Properness over `k ≤ k_max` and indices `i ≤ t_{k_max}`.
pub fn properness_check(ap: &mut Approx, k_max: usize) -> Result<Properness> {
    let p = ap.precision();
    let q = ap.prog().quantities(64, p)?;
    let one = BigReal::one(p);
    let threshold = &q.sigma / &(&one + &q.sigma);
    let dr = delta_estimate(&mut ap.seq, k_max)?;
    let delta_hat = dr.estimate.clone();
    let delta_ok = delta_hat < threshold;
    let (bracket_hi, bracket_ok) = match &dr.bracket_certified {
        Some((_, hi)) => (Some(hi.clone()), Some(*hi < threshold)),
        None => (None, None),
    };
    let i_max = ap.prog().t(k_max);
    let det_n = ap.seed().det_n.abs();
    let mut max_content = BigInt::zero();
    let mut bounded = true;
    for i in -2..=i_max {
        let c = ap.y_at(i)?.content()?;
        bounded &= (&det_n % &c).is_zero();
        if c > max_content {
            max_content = c;
        }
    }
    let tr_jn_nonzero = ap.seed().proper_capable();
    let proper = delta_ok && bounded && tr_jn_nonzero;
    Ok(Properness {
        delta_hat,
        threshold,
        delta_ok,
        bracket_hi,
        bracket_ok,
        max_content: max_content.to_string(),
        contents_bounded: bounded,
        tr_jn_nonzero,
        proper,
    })
}

/// The five norm-estimate ratios at one index, as natural logs.
#[derive(Clone, Debug, Serialize)]
pub struct DiagRow {
    pub i: i64,
    /// `log` of `‖y_i∧u‖·‖y_i‖/|det y_i|`, `‖y_{i+1}‖·‖y_{ψ(i)}‖/‖y_i‖²`, `‖z_i‖/‖y_{ψ(i)}‖`,
    /// `|⟨z_i,y_{i+1}⟩|/|det y_i|`, `|⟨z_i,u⟩|·‖y_{i+1}‖/|det y_i|`.
    pub log_ratios: [f64; 5],
    /// `log` of `(‖y_i∧y_{i+1}‖/|det y_{i+1}|) / ‖y_i y_{i+1}⁻¹‖`.
    pub log_triple: f64,
    /// `|⟨z_{t_k+l}, y_{t_k+l+1}⟩| = |det w_k|^{l−1} |det(y_{t_k−1}, y_{t_k}, y_{t_k+1})|` holds exactly.
    pub exact_item4: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsTable {
    pub rows: Vec<DiagRow>,
    /// Per ratio family: min and max of the ratio and `max/min`.
    pub min: [f64; 5],
    pub max: [f64; 5],
    pub spread: [f64; 5],
    pub triple_spread: f64,
    pub all_exact: bool,
}

fn ln_rat_norm(v: &crate::exactlin::RatVec, p: usize) -> BigReal {
    &v.numer().ln_norm(p) - &BigReal::ln_int(v.denom(), p)
}

/// Tabulates the norm-estimate ratios for `i ∈ [i_lo, i_hi]`.
pub fn norm_diagnostics(ap: &mut Approx, xi: &XiValue, i_lo: i64, i_hi: i64) -> Result<DiagnosticsTable> {
    let p = ap.precision();
    let prog = ap.prog().clone();
    let mut rows = Vec::new();
    for i in i_lo.max(0)..=i_hi {
        let y = ap.y_at(i)?;
        let y1 = ap.y_at(i + 1)?;
        let yp = ap.y_at(prog.psi(i))?;
        let z = ap.z_at(i)?;
        let ldet = BigReal::ln_int(&y.det(), p);
        let (ln_y, ln_y1, ln_yp) = (y.ln_norm(p), y1.ln_norm(p), yp.ln_norm(p));
        let r1 = &(&xi.ln_wedge(&y, p) + &ln_y) - &ldet;
        let r2 = &(&ln_y1 + &ln_yp) - &(&ln_y * &BigReal::from_i64(2, p));
        let r3 = &ln_rat_norm(&z, p) - &ln_yp;
        let zy = BigRational::new(z.numer().dot(&y1), z.denom().clone());
        let r4 = &(&BigReal::ln_int(zy.numer(), p) - &BigReal::ln_int(zy.denom(), p)) - &ldet;
        let r5 = &(&xi.ln_dot_rat(z.numer(), z.denom(), p) + &ln_y1) - &ldet;
        let adj = y1.to_mat().adj();
        let prod = &y.to_mat() * &adj;
        let triple = &y.wedge(&y1).ln_norm(p) - &BigReal::ln_int(&prod.norm_max(), p);
        let (k, l) = prog.decompose(i);
        let tk = prog.t(k);
        let dk = ap.det_w(k)?;
        let d3 = crate::exactlin::det3(&ap.y_at(tk - 1)?, &ap.y_at(tk)?, &ap.y_at(tk + 1)?).abs();
        let exact_item4 = if l >= 1 {
            zy.numer().abs() == num_traits::pow::pow(dk.abs(), (l - 1) as usize) * &d3 && zy.denom().is_one()
        } else {
            // l = 0: |det w_k|·|⟨z, y⟩| = |det3|
            BigRational::from_integer(dk.abs()) * zy.abs() == BigRational::from_integer(d3)
        };
        rows.push(DiagRow {
            i,
            log_ratios: [r1.to_f64(), r2.to_f64(), r3.to_f64(), r4.to_f64(), r5.to_f64()],
            log_triple: triple.to_f64(),
            exact_item4,
        });
    }
    let mut min = [f64::INFINITY; 5];
    let mut max = [f64::NEG_INFINITY; 5];
    let (mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &rows {
        for j in 0..5 {
            min[j] = min[j].min(r.log_ratios[j]);
            max[j] = max[j].max(r.log_ratios[j]);
        }
        tmin = tmin.min(r.log_triple);
        tmax = tmax.max(r.log_triple);
    }
    let spread = std::array::from_fn(|j| (max[j] - min[j]).exp());
    Ok(DiagnosticsTable {
        all_exact: rows.iter().all(|r| r.exact_item4),
        rows,
        min: min.map(f64::exp),
        max: max.map(f64::exp),
        spread,
        triple_spread: (tmax - tmin).exp(),
    })
}

/// First index `b ≤ i_max − 1` from which `‖y_i‖ < ‖y_{i+1}‖` and `‖y_{i+1}∧u‖ < ‖y_i∧u‖` hold through `i_max`.
pub fn monotone_from(ap: &mut Approx, xi: &XiValue, i_max: i64) -> Result<Option<i64>> {
    let p = ap.precision();
    let mut from = None;
    for i in (0..i_max).rev() {
        let (y, y1) = (ap.y_at(i)?, ap.y_at(i + 1)?);
        let ok = y.norm2() < y1.norm2() && xi.ln_wedge(&y1, p) < xi.ln_wedge(&y, p);
        if ok {
            from = Some(i);
        } else {
            break;
        }
    }
    Ok(from)
}

/// Every nonzero `v` with sup-norm ≤ `bound` has `⟨v, y_i⟩ ≠ 0` for some `i ≤ i_max`.
pub fn independence_proxy(ap: &mut Approx, bound: i64, i_max: i64) -> Result<bool> {
    let ys: Vec<SymVec> = (0..=i_max).map(|i| ap.y_at(i)).collect::<Result<_>>()?;
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                if a == 0 && b == 0 && c == 0 {
                    continue;
                }
                let v = SymVec::from_i64(a, b, c);
                if ys.iter().all(|y| y.dot(&v).is_zero()) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// For a BL seed, the word-based oracle enclosure of ξ.
pub fn bl_oracle(ap: &Approx, bits: usize) -> Option<(BigRational, BigRational)> {
    match ap.seed().family {
        Family::Bl { a, b, s1 } => {
            let prog = ap.prog().clone();
            let sp = move |k: usize| if k == 1 { s1 } else { prog.s(k) as u64 };
            Some(bl_continued_fraction(a, b, sp, bits))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matseq::MatrixSeed;
    use crate::sturm::SturmianProgram;

    #[test]
    fn bl_matches_word() {
        let mut ap = Approx::new(MatrixSeed::bl(1, 2, 1).unwrap(), SturmianProgram::fibonacci());
        let xi = xi_value(&mut ap, 200).unwrap();
        let (lo, hi) = bl_oracle(&ap, 220).unwrap();
        let c = xi.center();
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 190);
        assert!(c > &lo - &tol && c < &hi + &tol);
        assert!(xi.nested);
    }

    #[test]
    fn coarse() {
        let mut ap = Approx::new(MatrixSeed::roy(2, 1, 2).unwrap(), SturmianProgram::fibonacci());
        let xi = xi_value(&mut ap, 8).unwrap();
        let v = xi.value.to_f64();
        assert!(v.is_finite());
        let r = &xi.u[1] * &xi.u[1] - xi.u[2].clone();
        assert!(r.abs().to_f64() < 1e-30);
    }
}
