//! Quadratic surds and exact comparison of eventually periodic continued fractions.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exactlin::BigReal;

/// The real number `(p + q·√d) / r` with `r > 0` and `d ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    pub p: BigInt,
    pub q: BigInt,
    pub d: BigInt,
    pub r: BigInt,
}

impl QuadSurd {
    pub fn rational(x: BigRational) -> Self {
        QuadSurd { p: x.numer().clone(), q: BigInt::zero(), d: BigInt::zero(), r: x.denom().clone() }
    }

    pub(crate) fn normalized(mut self) -> Self {
        if self.r.is_negative() {
            self.p = -self.p;
            self.q = -self.q;
            self.r = -self.r;
        }
        let g = self.p.gcd(&self.q).gcd(&self.r);
        if !g.is_zero() && !g.is_one() {
            self.p /= &g;
            self.q /= &g;
            self.r /= &g;
        }
        self
    }

    /// Value of the purely periodic continued fraction `[a0; a1, …, a_{n−1}, a0, …]`.
    pub fn periodic_cf(period: &[u64]) -> Self {
        assert!(!period.is_empty() && period.iter().all(|&a| a >= 1), "positive period");
        let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
        let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
        for &a in period {
            let a = BigInt::from(a);
            let p = &a * &p1 + &p2;
            let q = &a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p);
            q2 = std::mem::replace(&mut q1, q);
        }
        // x = (p1 x + p2) / (q1 x + q2)  =>  q1 x² + (q2 − p1) x − p2 = 0
        let b = &q2 - &p1;
        let disc = &b * &b + BigInt::from(4) * &q1 * &p2;
        QuadSurd { p: -b, q: BigInt::one(), d: disc, r: BigInt::from(2) * q1 }.normalized()
    }

    /// `1 / self`, rationalized.
    pub fn recip(&self) -> Self {
        // r / (p + q√d) = r (p − q√d) / (p² − q² d)
        let den = &self.p * &self.p - &self.q * &self.q * &self.d;
        assert!(!den.is_zero(), "reciprocal of zero");
        QuadSurd { p: &self.r * &self.p, q: -(&self.r * &self.q), d: self.d.clone(), r: den }.normalized()
    }

    pub fn value(&self, prec: usize) -> BigReal {
        let w = prec + 32;
        let s = BigReal::from_int(&self.d, w).sqrt();
        let num = BigReal::from_int(&self.p, w) + BigReal::from_int(&self.q, w) * s;
        (num / BigReal::from_int(&self.r, w)).with_precision(prec)
    }

    /// Human-readable closed form.
    pub fn render(&self) -> String {
        if self.q.is_zero() || self.d.is_zero() {
            return if self.r.is_one() { self.p.to_string() } else { format!("{}/{}", self.p, self.r) };
        }
        let sign = if self.q.is_negative() { "-" } else { "+" };
        let qa = self.q.abs();
        let root = if qa.is_one() { format!("sqrt({})", self.d) } else { format!("{}*sqrt({})", qa, self.d) };
        if self.r.is_one() {
            format!("{} {} {}", self.p, sign, root)
        } else {
            format!("({} {} {})/{}", self.p, sign, root, self.r)
        }
    }
}

/// An eventually periodic sequence of positive integers `pre · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub pre: Vec<u64>,
    pub period: Vec<u64>,
}

impl EventuallyPeriodic {
    pub fn new(pre: Vec<u64>, period: Vec<u64>) -> Self {
        assert!(!period.is_empty(), "empty period");
        EventuallyPeriodic { pre, period }
    }

    pub fn at(&self, i: usize) -> u64 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    /// The shifted sequence `T^k b`.
    pub fn shift(&self, k: usize) -> Self {
        if k <= self.pre.len() {
            EventuallyPeriodic::new(self.pre[k..].to_vec(), self.period.clone())
        } else {
            let n = self.period.len();
            let off = (k - self.pre.len()) % n;
            let mut per = self.period[off..].to_vec();
            per.extend_from_slice(&self.period[..off]);
            EventuallyPeriodic::new(Vec::new(), per)
        }
    }

    /// Exact value `[b0; b1, b2, …]` as a quadratic surd.
    pub fn cf_value(&self) -> QuadSurd {
        let tail = QuadSurd::periodic_cf(&self.period);
        self.pre.iter().rev().fold(tail, |x, &a| {
            let inv = x.recip();
            QuadSurd { p: &inv.p + BigInt::from(a) * &inv.r, q: inv.q, d: inv.d, r: inv.r }.normalized()
        })
    }
}

/// Exact order of two infinite continued fractions given by their partial quotients.
pub fn cmp_cf(a: &EventuallyPeriodic, b: &EventuallyPeriodic) -> Ordering {
    let n = a.pre.len().max(b.pre.len()) + a.period.len() * b.period.len() + 1;
    for i in 0..n {
        let (x, y) = (a.at(i), b.at(i));
        if x != y {
            let c = x.cmp(&y);
            return if i % 2 == 0 { c } else { c.reverse() };
        }
    }
    Ordering::Equal
}

/// Value of the finite continued fraction `[a0; a1, …, an]`.
pub fn finite_cf(terms: &[i64]) -> BigRational {
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    for &a in terms {
        let a = BigInt::from(a);
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    BigRational::new(p1, q1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio() {
        let g = QuadSurd::periodic_cf(&[1]);
        assert_eq!(g.render(), "(1 + sqrt(5))/2");
        let s = g.recip();
        let v = s.value(128).to_f64();
        assert!((v - 0.6180339887498949).abs() < 1e-15);
    }

    #[test]
    fn period_three() {
        let x = QuadSurd::periodic_cf(&[3]).recip();
        let want = (13f64.sqrt() - 3.0) / 2.0;
        assert!((x.value(128).to_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn alternating_order() {
        let a = EventuallyPeriodic::new(vec![], vec![1, 2]);
        let b = a.shift(1);
        assert_eq!(cmp_cf(&a, &b), Ordering::Less);
        assert_eq!(cmp_cf(&a, &a.shift(2)), Ordering::Equal);
        let c = EventuallyPeriodic::new(vec![1], vec![3]);
        let d = EventuallyPeriodic::new(vec![1], vec![2]);
        assert_eq!(cmp_cf(&c, &d), Ordering::Less);
    }

    #[test]
    fn eventually_periodic_value() {
        let x = EventuallyPeriodic::new(vec![0, 2], vec![1]).cf_value();
        let want = 1.0 / (2.0 + 1.0 / 1.618033988749895);
        assert!((x.value(128).to_f64() - want).abs() < 1e-15);
    }
}
