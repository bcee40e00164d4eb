//! Sturmian programs `(s_k)`, the function ψ and continued-fraction functionals.
//!
//! A program has `s₀ = −1`, `s₁ = 1` and `s_k ≥ 1` afterwards; `t_k` are the
//! partial sums `s₀ + … + s_k`, so `t₀ = −1` and `t₁ = 0`. ψ sends `t_k` to
//! `t_{k−1} − 1` and every other `i` to `i − 1`.

pub mod surd;
pub mod words;

pub use words::{cassaigne_member, characteristic_word, spectrum_endpoints, SpectrumTable};

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::BigReal;
use surd::{cmp_cf, finite_cf, EventuallyPeriodic};

/// Textual/JSON description `prefix=[-1,1,…];period=[…]` of an eventually periodic program.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramSpec {
    pub prefix: Vec<i64>,
    pub period: Vec<i64>,
}

impl fmt::Display for ProgramSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "prefix=[{}];period=[{}]", j(&self.prefix), j(&self.period))
    }
}

fn parse_list(s: &str) -> Result<Vec<i64>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..], got {s:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad integer {t:?}"))))
        .collect()
}

impl FromStr for ProgramSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let mut prefix = None;
        let mut period = None;
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("missing '=' in {part:?}")))?;
            match k.trim() {
                "prefix" => prefix = Some(parse_list(v)?),
                "period" => period = Some(parse_list(v)?),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        Ok(ProgramSpec {
            prefix: prefix.unwrap_or_else(|| vec![-1, 1]),
            period: period.ok_or_else(|| Error::Parse("missing period=[..]".into()))?,
        })
    }
}

type Gen = Arc<dyn Fn(usize) -> u64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Periodic { prefix: Vec<i64>, period: Vec<u64> },
    Generator { f: Gen, bound: Option<u64> },
}

/// The sequence `(s_k)`, with `t_k` and ψ derived from it.
#[derive(Clone)]
pub struct SturmianProgram {
    src: Source,
    t: Arc<RwLock<Vec<i64>>>,
}

impl fmt::Debug for SturmianProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.src {
            Source::Periodic { .. } => write!(f, "SturmianProgram({})", self.spec().expect("periodic")),
            Source::Generator { bound, .. } => write!(f, "SturmianProgram(generator, bound={bound:?})"),
        }
    }
}

impl SturmianProgram {
    /// Builds an eventually periodic program. The prefix holds `s₀, s₁, …`.
    pub fn build(spec: &ProgramSpec) -> Result<Self> {
        if spec.period.is_empty() {
            return Err(Error::BadSequence("empty period".into()));
        }
        if spec.period.iter().any(|&x| x < 1) {
            return Err(Error::BadSequence("period entries must be >= 1".into()));
        }
        let period: Vec<u64> = spec.period.iter().map(|&x| x as u64).collect();
        let prog = SturmianProgram {
            src: Source::Periodic { prefix: spec.prefix.clone(), period },
            t: Arc::new(RwLock::new(vec![-1])),
        };
        prog.validate(spec.prefix.len() + spec.period.len() + 2)?;
        Ok(prog)
    }

    /// Program given by a function `k ↦ s_k` for `k ≥ 2`; `bound` marks it bounded.
    pub fn from_fn(f: impl Fn(usize) -> u64 + Send + Sync + 'static, bound: Option<u64>) -> Result<Self> {
        let prog = SturmianProgram {
            src: Source::Generator { f: Arc::new(f), bound },
            t: Arc::new(RwLock::new(vec![-1])),
        };
        prog.validate(64)?;
        Ok(prog)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Source::Periodic { prefix, .. } = &self.src {
            if prefix.first() != Some(&-1) {
                return Err(Error::BadSequence("s0 must be -1".into()));
            }
        }
        for k in 0..n {
            let s = self.s(k);
            let ok = match k {
                0 => s == -1,
                1 => s == 1,
                _ => s >= 1,
            };
            if !ok {
                return Err(Error::BadSequence(format!("s_{k} = {s} violates s0=-1, s1=1, s_k>=1")));
            }
        }
        Ok(())
    }

    /// The all-ones (Fibonacci) program.
    pub fn fibonacci() -> Self {
        Self::constant_tail(1)
    }

    /// `s = (−1, 1, v, v, v, …)`.
    pub fn constant_tail(v: u64) -> Self {
        Self::build(&ProgramSpec { prefix: vec![-1, 1], period: vec![v as i64] }).expect("valid constant program")
    }

    pub fn spec(&self) -> Option<ProgramSpec> {
        match &self.src {
            Source::Periodic { prefix, period } => Some(ProgramSpec {
                prefix: prefix.clone(),
                period: period.iter().map(|&x| x as i64).collect(),
            }),
            Source::Generator { .. } => None,
        }
    }

    /// `s_k`.
    pub fn s(&self, k: usize) -> i64 {
        match &self.src {
            Source::Periodic { prefix, period } => {
                if k < prefix.len() {
                    prefix[k]
                } else {
                    period[(k - prefix.len()) % period.len()] as i64
                }
            }
            Source::Generator { f, .. } => match k {
                0 => -1,
                1 => 1,
                _ => f(k) as i64,
            },
        }
    }

    /// `s_k` for `k ≥ 1` as an unsigned exponent.
    pub fn su(&self, k: usize) -> u32 {
        assert!(k >= 1, "s_0 is not an exponent");
        self.s(k) as u32
    }

    pub fn is_bounded(&self) -> bool {
        match &self.src {
            Source::Periodic { .. } => true,
            Source::Generator { bound, .. } => bound.is_some(),
        }
    }

    /// True when `s_k = 1` for every `k ≥ 1`.
    pub fn is_fibonacci(&self) -> bool {
        match &self.src {
            Source::Periodic { prefix, period } => {
                prefix.iter().skip(1).all(|&x| x == 1) && period.iter().all(|&x| x == 1)
            }
            Source::Generator { .. } => false,
        }
    }

    fn ensure_t(&self, k: usize) {
        if self.t.read().expect("t cache").len() > k {
            return;
        }
        let mut t = self.t.write().expect("t cache");
        while t.len() <= k {
            let j = t.len();
            let next = t[j - 1] + self.s(j);
            t.push(next);
        }
    }

    /// `t_k = s₀ + … + s_k`.
    pub fn t(&self, k: usize) -> i64 {
        self.ensure_t(k);
        self.t.read().expect("t cache")[k]
    }

    /// `Some(k)` when `n = t_k`.
    pub fn t_index(&self, n: i64) -> Option<usize> {
        if n < -1 {
            return None;
        }
        let (k, l) = self.decompose(n);
        (l == 0).then_some(k)
    }

    /// `(k, l)` with `i = t_k + l` and `0 ≤ l < s_{k+1}`, for `i ≥ −1`.
    pub fn decompose(&self, i: i64) -> (usize, i64) {
        assert!(i >= -1, "decompose needs i >= -1");
        loop {
            let len = {
                let t = self.t.read().expect("t cache");
                if *t.last().expect("t0") > i {
                    let k = t.partition_point(|&x| x <= i) - 1;
                    return (k, i - t[k]);
                }
                t.len()
            };
            self.ensure_t(len * 2);
        }
    }

    /// ψ(i) for `i ≥ 0`.
    pub fn psi(&self, i: i64) -> i64 {
        assert!(i >= 0, "psi is defined for i >= 0");
        match self.t_index(i) {
            Some(k) if k >= 1 => self.t(k - 1) - 1,
            _ => i - 1,
        }
    }

    /// Partial inverse: ψ⁻¹(t_{k+1} − 1) = t_{k+2}, otherwise `i + 1`; defined for `i ≥ −2`.
    pub fn psi_inv(&self, i: i64) -> i64 {
        assert!(i >= -2, "psi_inv is defined for i >= -2");
        match self.t_index(i + 1) {
            Some(m) => self.t(m + 1),
            None => i + 1,
        }
    }

    /// `[s_{k+1}; s_k, …, s_1]` as an exact rational.
    pub fn cf_backward_exact(&self, k: usize) -> BigRational {
        assert!(k >= 1, "cf_backward needs k >= 1");
        let terms: Vec<i64> = (1..=k + 1).rev().map(|j| self.s(j)).collect();
        finite_cf(&terms)
    }

    /// `[s_{k+1}; s_k, …, s_1]` rounded to `prec` bits.
    pub fn cf_backward(&self, k: usize, prec: usize) -> BigReal {
        BigReal::from_ratio(&self.cf_backward_exact(k), prec)
    }

    /// σ, τ and σ′; exact for periodic programs, windowed over `[K/2, K]` otherwise.
    pub fn quantities(&self, window: usize, prec: usize) -> Result<CFQuantities> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        match &self.src {
            Source::Periodic { period, .. } => Ok(self.exact_quantities(period, prec)),
            Source::Generator { .. } => Ok(self.windowed_quantities(window.max(4), prec)),
        }
    }

    fn exact_quantities(&self, period: &[u64], prec: usize) -> CFQuantities {
        let n = period.len();
        // phase j: backward expansion [p_j; p_{j−1}, …] repeating
        let phases: Vec<EventuallyPeriodic> = (0..n)
            .map(|j| EventuallyPeriodic::new(Vec::new(), (0..n).map(|i| period[(j + n - i) % n]).collect()))
            .collect();
        let pick = |ix: &mut dyn Iterator<Item = usize>, want_max: bool| -> Option<usize> {
            ix.fold(None, |best: Option<usize>, j| match best {
                None => Some(j),
                Some(b) => {
                    let c = cmp_cf(&phases[j], &phases[b]);
                    let better = if want_max { c.is_gt() } else { c.is_lt() };
                    Some(if better { j } else { b })
                }
            })
        };
        let jmax = pick(&mut (0..n), true).expect("nonempty period");
        let jmin = pick(&mut (0..n), false).expect("nonempty period");
        let jsp = pick(&mut (0..n).filter(|&j| period[(j + 1) % n] > 1), true);
        let sigma_s = phases[jmax].cf_value().recip();
        let tau_s = phases[jmin].cf_value().recip();
        let sp_s = jsp.map(|j| phases[j].cf_value().recip());
        CFQuantities {
            sigma: sigma_s.value(prec),
            tau: tau_s.value(prec),
            sigma_prime: sp_s.as_ref().map(|s| s.value(prec)),
            sigma_form: Some(sigma_s.render()),
            tau_form: Some(tau_s.render()),
            sigma_prime_form: sp_s.map(|s| s.render()),
            exact: true,
            window: None,
        }
    }

    fn windowed_quantities(&self, window: usize, prec: usize) -> CFQuantities {
        let lo = (window / 2).max(2);
        let one = BigReal::one(prec);
        let mut sig: Option<BigReal> = None;
        let mut tau: Option<BigReal> = None;
        let mut sp: Option<BigReal> = None;
        for k in lo..=window {
            let fwd = self.cf_backward(k, prec);
            sig = Some(match sig {
                Some(s) => s.max(fwd),
                None => fwd,
            });
            let inv = &one / &self.cf_backward(k - 1, prec);
            tau = Some(match tau {
                Some(t) => t.max(inv.clone()),
                None => inv.clone(),
            });
            if self.s(k + 1) > 1 {
                sp = Some(match sp {
                    Some(s) => s.min(inv),
                    None => inv,
                });
            }
        }
        CFQuantities {
            sigma: &one / &sig.expect("window"),
            tau: tau.expect("window"),
            sigma_prime: sp,
            sigma_form: None,
            tau_form: None,
            sigma_prime_form: None,
            exact: false,
            window: Some((lo, window)),
        }
    }
}

/// σ, τ, σ′ of a program. `sigma_prime = None` stands for `+∞`.
#[derive(Clone, Debug, Serialize)]
pub struct CFQuantities {
    pub sigma: BigReal,
    pub tau: BigReal,
    pub sigma_prime: Option<BigReal>,
    pub sigma_form: Option<String>,
    pub tau_form: Option<String>,
    pub sigma_prime_form: Option<String>,
    pub exact: bool,
    pub window: Option<(usize, usize)>,
}

/// `h(σ) = σ/2 + 1 − √((σ/2)² + 1)`.
pub fn h_of_sigma(sigma: &BigReal) -> BigReal {
    let p = sigma.precision();
    let half = sigma * &BigReal::from_f64(0.5, p);
    let one = BigReal::one(p);
    &(&half + &one) - &(&(&half * &half) + &one).sqrt()
}

/// `[s_{k+1}; …; s_1]` as a big rational, exposed for oracle tests.
pub fn cf_backward(prog: &SturmianProgram, k: usize, prec: usize) -> BigReal {
    prog.cf_backward(k, prec)
}

/// Convenience: the exact rational `p/q` of a backward expansion.
pub fn cf_backward_ratio(prog: &SturmianProgram, k: usize) -> (BigInt, BigInt) {
    let r = prog.cf_backward_exact(k);
    (r.numer().clone(), r.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_shape() {
        let p = SturmianProgram::fibonacci();
        for k in 0..20 {
            assert_eq!(p.t(k), k as i64 - 1);
        }
        for n in 2..50 {
            assert_eq!(p.psi(n), n - 2);
        }
        assert_eq!(p.psi(0), -2);
        assert_eq!(p.psi(1), -1);
    }

    #[test]
    fn period_two() {
        let p = SturmianProgram::constant_tail(2);
        assert_eq!((0..5).map(|k| p.t(k)).collect::<Vec<_>>(), vec![-1, 0, 2, 4, 6]);
        assert_eq!(p.psi(2), -1);
        assert_eq!(p.psi(1), 0);
        assert_eq!(p.decompose(3), (2, 1));
        assert_eq!(p.decompose(-1), (0, 0));
        assert_eq!(p.decompose(0), (1, 0));
    }

    #[test]
    fn bad_sequences() {
        let spec: ProgramSpec = "prefix=[-1,2];period=[1]".parse().unwrap();
        assert!(matches!(SturmianProgram::build(&spec), Err(Error::BadSequence(_))));
        let spec: ProgramSpec = "prefix=[-1,1];period=[0]".parse().unwrap();
        assert!(SturmianProgram::build(&spec).is_err());
        assert!("prefix=[-1,1]".parse::<ProgramSpec>().is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec: ProgramSpec = "prefix=[-1,1,3];period=[2,1]".parse().unwrap();
        assert_eq!(spec.to_string(), "prefix=[-1,1,3];period=[2,1]");
        let j: ProgramSpec = r#"{"prefix":[-1,1],"period":[2]}"#.parse().unwrap();
        assert_eq!(j.period, vec![2]);
    }

    #[test]
    fn sigma_values() {
        let q = SturmianProgram::fibonacci().quantities(64, 256).unwrap();
        assert!((q.sigma.to_f64() - 0.6180339887498949).abs() < 1e-15);
        assert!(q.sigma_prime.is_none());
        let q3 = SturmianProgram::constant_tail(3).quantities(64, 256).unwrap();
        assert!((q3.sigma.to_f64() - (13f64.sqrt() - 3.0) / 2.0).abs() < 1e-15);
        assert!(q3.sigma_prime.is_some());
    }

    #[test]
    fn alternating_sigma() {
        let (a, n) = (1.0f64, 2.0f64);
        let spec = ProgramSpec { prefix: vec![-1, 1], period: vec![2, 1] };
        let q = SturmianProgram::build(&spec).unwrap().quantities(64, 256).unwrap();
        let want = 2.0 * a / (a * n + ((a * n).powi(2) + 4.0 * a * n).sqrt());
        assert!((q.sigma.to_f64() - want).abs() < 1e-14);
        assert!(q.sigma <= q.tau);
    }

    #[test]
    fn generator_program() {
        let g = SturmianProgram::from_fn(|_| 1, Some(1)).unwrap();
        let q = g.quantities(64, 128).unwrap();
        assert!((q.sigma.to_f64() - 0.6180339887498949).abs() < 1e-12);
        let u = SturmianProgram::from_fn(|k| k as u64, None).unwrap();
        assert_eq!(u.quantities(64, 128).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn h_values() {
        let s = BigReal::from_f64(0.6180339887498949, 256);
        assert!((h_of_sigma(&s).to_f64() - 0.26235969477181276).abs() < 1e-12);
        assert!(h_of_sigma(&BigReal::zero(64)).is_zero());
    }
}
