//! Characteristic Sturmian words, Cassaigne's shift test and the ω₂ spectrum endpoints.

use serde::Serialize;

use super::surd::{cmp_cf, EventuallyPeriodic, QuadSurd};
use crate::exactlin::BigReal;

/// Length-`n` prefix of `m_φ` with `m₀ = b`, `m₁ = b^{s′₁−1}a`, `m_{k+1} = m_k^{s′_{k+1}} m_{k−1}`.
///
/// `s_prime(k)` gives `s′_k` for `k ≥ 1`.
pub fn characteristic_word<T: Clone>(s_prime: impl Fn(usize) -> u64, a: T, b: T, n: usize) -> Vec<T> {
    let s1 = s_prime(1).max(1) as usize;
    let mut prev = vec![b.clone()];
    let mut cur: Vec<T> = std::iter::repeat_n(b, s1 - 1).chain(std::iter::once(a)).collect();
    let mut k = 1;
    while cur.len() < n {
        let e = s_prime(k + 1) as usize;
        let mut next = Vec::with_capacity(cur.len() * e + prev.len());
        for _ in 0..e {
            next.extend_from_slice(&cur);
        }
        next.extend_from_slice(&prev);
        prev = std::mem::replace(&mut cur, next);
        k += 1;
    }
    cur.truncate(n);
    cur
}

/// True when `[b] ≥ [T^k b]` for every `k ≤ depth`, compared exactly.
pub fn cassaigne_member(b: &EventuallyPeriodic, depth: usize) -> bool {
    (0..=depth).all(|k| cmp_cf(b, &b.shift(k)).is_ge())
}

/// One labelled endpoint of the spectrum table.
#[derive(Clone, Debug, Serialize)]
pub struct Endpoint {
    pub label: String,
    pub form: String,
    pub value: BigReal,
}

/// δ_{a,n} values and the three closure intervals of the ω₂ spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumTable {
    pub endpoints: Vec<Endpoint>,
    /// `(lo, hi)` with `hi = None` for an unbounded interval.
    pub intervals: Vec<(Endpoint, Option<Endpoint>)>,
}

/// `δ_{a,n} = 2[n; a, n, a, …] = n + n√(1 + 4/(an))` as an exact surd.
pub fn delta_an(a: u64, n: u64) -> QuadSurd {
    let x = EventuallyPeriodic::new(Vec::new(), vec![n, a]).cf_value();
    QuadSurd { p: x.p * 2, q: x.q * 2, d: x.d, r: x.r }.normalized()
}

impl QuadSurd {
    fn plus_int(&self, k: i64) -> QuadSurd {
        QuadSurd { p: &self.p + &self.r * k, q: self.q.clone(), d: self.d.clone(), r: self.r.clone() }
    }
}

fn endpoint(label: &str, s: &QuadSurd, prec: usize) -> Endpoint {
    Endpoint { label: label.to_string(), form: s.render(), value: s.value(prec) }
}

/// The endpoint table: δ_{1,1}, δ_{1,2}, δ_{2,2}, δ_{3,3} and the intervals
/// `[δ_{1,1}, δ_{1,1}+1] ∪ [δ_{2,2}, δ_{1,2}+1] ∪ [δ_{3,3}, ∞)`.
pub fn spectrum_endpoints(prec: usize) -> SpectrumTable {
    let d11 = delta_an(1, 1);
    let d12 = delta_an(1, 2);
    let d22 = delta_an(2, 2);
    let d33 = delta_an(3, 3);
    let endpoints = vec![
        endpoint("delta_1_1", &d11, prec),
        endpoint("delta_1_2", &d12, prec),
        endpoint("delta_2_2", &d22, prec),
        endpoint("delta_3_3", &d33, prec),
    ];
    let intervals = vec![
        (endpoint("delta_1_1", &d11, prec), Some(endpoint("delta_1_1+1", &d11.plus_int(1), prec))),
        (endpoint("delta_2_2", &d22, prec), Some(endpoint("delta_1_2+1", &d12.plus_int(1), prec))),
        (endpoint("delta_3_3", &d33, prec), None),
    ];
    SpectrumTable { endpoints, intervals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_word() {
        let w: String = characteristic_word(|_| 1, 'a', 'b', 6).into_iter().collect();
        assert_eq!(w, "abaaba");
        let w: String = characteristic_word(|k| if k == 1 { 3 } else { 1 }, 'a', 'b', 3).into_iter().collect();
        assert_eq!(w, "bba");
        assert_eq!(characteristic_word(|_| 1, 'a', 'b', 1), vec!['a']);
    }

    #[test]
    fn cassaigne() {
        assert!(cassaigne_member(&EventuallyPeriodic::new(vec![], vec![3, 2]), 20));
        assert!(!cassaigne_member(&EventuallyPeriodic::new(vec![], vec![1, 2]), 20));
        assert!(cassaigne_member(&EventuallyPeriodic::new(vec![], vec![4]), 20));
    }

    #[test]
    fn endpoints() {
        let t = spectrum_endpoints(256);
        let v: Vec<f64> = t.endpoints.iter().map(|e| e.value.to_f64()).collect();
        assert!((v[0] - (1.0 + 5f64.sqrt())).abs() < 1e-12);
        assert!((v[1] - (2.0 + 2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((v[2] - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((v[3] - (3.0 + 13f64.sqrt())).abs() < 1e-12);
    }
}
