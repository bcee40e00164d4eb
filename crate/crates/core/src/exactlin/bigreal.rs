//! High-precision reals backed by `astro-float`.
//!
//! Precision travels with each value; binary operations use the larger of the
//! two operand precisions. Logarithms of integers are taken from the top
//! `P + 64` bits of the exact value, so the only rounding happens in the final
//! transcendental step.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as BSign};
use num_rational::BigRational;
use num_traits::Zero;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary floating value with a per-value precision in bits.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    p: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, p: usize) -> Self {
        BigReal { v, p }
    }

    pub fn zero(p: usize) -> Self {
        Self::wrap(BigFloat::from_word(0, p), p)
    }

    pub fn one(p: usize) -> Self {
        Self::wrap(BigFloat::from_word(1, p), p)
    }

    pub fn from_i64(x: i64, p: usize) -> Self {
        Self::wrap(BigFloat::from_i64(x, p), p)
    }

    pub fn from_i128(x: i128, p: usize) -> Self {
        Self::from_int(&BigInt::from(x), p)
    }

    pub fn from_f64(x: f64, p: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, p), p)
    }

    pub fn inf(p: usize) -> Self {
        Self::wrap(astro_float::INF_POS, p)
    }

    pub fn neg_inf(p: usize) -> Self {
        Self::wrap(astro_float::INF_NEG, p)
    }

    /// Converts an integer, exactly when it fits in `p` bits.
    pub fn from_uint(n: &BigUint, p: usize) -> Self {
        Self::from_parts(n, false, p)
    }

    pub fn from_int(n: &BigInt, p: usize) -> Self {
        Self::from_parts(n.magnitude(), n.sign() == BSign::Minus, p)
    }

    fn from_parts(n: &BigUint, negative: bool, p: usize) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let words = n.to_u64_digits();
        let keep = p / 64 + 2;
        let start = words.len().saturating_sub(keep);
        let bits = words.len() * 64;
        let sign = if negative { Sign::Neg } else { Sign::Pos };
        let mut v = BigFloat::from_words(&words[start..], sign, bits as i32);
        v.set_precision(p, RM).expect("precision");
        Self::wrap(v, p)
    }

    pub fn from_ratio(r: &BigRational, p: usize) -> Self {
        let n = Self::from_int(r.numer(), p + 64);
        let d = Self::from_int(r.denom(), p + 64);
        (&n / &d).with_precision(p)
    }

    /// Natural logarithm of `|n|` for a nonzero integer, `-inf` for zero.
    pub fn ln_int(n: &BigInt, p: usize) -> Self {
        Self::ln_uint(n.magnitude(), p)
    }

    pub fn ln_uint(n: &BigUint, p: usize) -> Self {
        if n.is_zero() {
            return Self::neg_inf(p);
        }
        let bits = n.bits() as usize;
        let q = p + 64;
        if bits <= q {
            return Self::from_uint(n, q).ln().with_precision(p);
        }
        let shift = bits - q;
        let top = n >> shift;
        let head = Self::from_uint(&top, q).ln();
        let tail = Self::ln2(q) * Self::from_i64(shift as i64, q);
        (head + tail).with_precision(p)
    }

    pub fn ln2(p: usize) -> Self {
        Self::wrap(with_cc(|cc| cc.ln_2(p, RM)), p)
    }

    pub fn pi(p: usize) -> Self {
        Self::wrap(with_cc(|cc| cc.pi(p, RM)), p)
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn with_precision(mut self, p: usize) -> Self {
        if self.v.is_inf() || self.v.is_nan() {
            self.p = p;
            return self;
        }
        let _ = self.v.set_precision(p, RM);
        self.p = p;
        self
    }

    pub fn ln(&self) -> Self {
        let p = self.p;
        Self::wrap(with_cc(|cc| self.v.ln(p, RM, cc)), p)
    }

    pub fn exp(&self) -> Self {
        let p = self.p;
        Self::wrap(with_cc(|cc| self.v.exp(p, RM, cc)), p)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.p)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.p, RM), self.p)
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.v.floor(), self.p)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.p, RM), self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_inf() && !self.v.is_nan()
    }

    pub fn is_nan(&self) -> bool {
        self.v.is_nan()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }

    pub fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }

    pub fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }

    /// Nearest `f64`; infinities map to infinities.
    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.v.is_zero() {
            return 0.0;
        }
        let (m, _, s, e, _) = self.v.as_raw_parts().expect("finite value");
        let top = *m.last().expect("mantissa") as f64;
        let second = if m.len() > 1 { m[m.len() - 2] as f64 } else { 0.0 };
        let mant = (top + second / 18446744073709551616.0) / 18446744073709551616.0;
        let x = mant * 2f64.powi(e.clamp(-1100, 1100));
        if s == Sign::Neg {
            -x
        } else {
            x
        }
    }

    /// Decimal rendering with `digits` significant digits after the point
    /// (scientific notation is avoided when the exponent is moderate).
    pub fn to_decimal(&self, digits: usize) -> String {
        if !self.is_finite() {
            return if self.v.is_nan() {
                "NaN".into()
            } else if self.v.is_inf_pos() {
                "inf".into()
            } else {
                "-inf".into()
            };
        }
        let neg = self.is_negative();
        let a = self.abs();
        let p = self.p.max(digits * 4 + 64);
        let scale = BigReal::from_i64(10, p).powi(digits);
        let scaled = (&a.clone().with_precision(p) * &scale).floor();
        let n = scaled.to_int();
        let mut s = n.to_string();
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        let (ip, fp) = s.split_at(s.len() - digits);
        let body = if digits == 0 { ip.to_string() } else { format!("{ip}.{fp}") };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Truncates toward zero to an integer; panics on non-finite input.
    pub fn to_int(&self) -> BigInt {
        assert!(self.is_finite(), "to_int on non-finite value");
        if self.v.is_zero() {
            return BigInt::zero();
        }
        let t = self.v.int();
        if t.is_zero() {
            return BigInt::zero();
        }
        let (m, _, s, e, _) = t.as_raw_parts().expect("finite");
        let mut digits = BigUint::zero();
        for w in m.iter().rev() {
            digits = (digits << 64u32) + BigUint::from(*w);
        }
        let total = (m.len() * 64) as i64;
        let shift = e as i64 - total;
        let mag = if shift >= 0 {
            digits << (shift as u64)
        } else {
            digits >> ((-shift) as u64)
        };
        let b = BigInt::from(mag);
        if s == Sign::Neg {
            -b
        } else {
            b
        }
    }

    fn cmp_inner(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.cmp_inner(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.cmp_inner(o)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        if !self.is_finite() {
            return f.write_str(&self.to_decimal(0));
        }
        let x = self.to_f64().abs();
        if x != 0.0 && !(1e-6..1e30).contains(&x) {
            let s = with_cc(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "?".into());
            return f.write_str(&s);
        }
        f.write_str(&self.to_decimal(digits))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, o: &BigReal) -> BigReal {
                let p = self.p.max(o.p);
                BigReal::wrap(self.v.$inner(&o.v, p, RM), p)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, o: BigReal) -> BigReal {
                (&self).$m(&o)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, o: &BigReal) -> BigReal {
                (&self).$m(o)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, o: BigReal) -> BigReal {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.v.neg(), self.p)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.v.clone().neg(), self.p)
    }
}

impl serde::Serialize for BigReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal(30))
    }
}
