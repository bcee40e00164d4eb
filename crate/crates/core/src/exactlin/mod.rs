//! Exact 2×2 integer matrices, symmetric 3-vectors and their algebra.
//!
//! A [`SymVec`] `(x0, x1, x2)` is identified with the symmetric matrix
//! `[[x0, x1], [x1, x2]]`. Norms come in two flavours: the max-coefficient
//! norm used for matrix growth and the Euclidean norm used for trajectories.

mod bigreal;

pub use bigreal::{BigReal, DEFAULT_PRECISION};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

fn gcd_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// 2×2 matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat2 {
    pub a11: BigInt,
    pub a12: BigInt,
    pub a21: BigInt,
    pub a22: BigInt,
}

impl IntMat2 {
    pub fn new(a11: BigInt, a12: BigInt, a21: BigInt, a22: BigInt) -> Self {
        IntMat2 { a11, a12, a21, a22 }
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        IntMat2::new(m[0][0].into(), m[0][1].into(), m[1][0].into(), m[1][1].into())
    }

    pub fn identity() -> Self {
        Self::from_i64([[1, 0], [0, 1]])
    }

    /// `J = [[0, 1], [-1, 0]]`.
    pub fn j() -> Self {
        Self::from_i64([[0, 1], [-1, 0]])
    }

    pub fn det(&self) -> BigInt {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn tr(&self) -> BigInt {
        &self.a11 + &self.a22
    }

    pub fn transpose(&self) -> Self {
        IntMat2::new(self.a11.clone(), self.a21.clone(), self.a12.clone(), self.a22.clone())
    }

    /// Adjugate, so that `m · adj(m) = det(m) · I`.
    pub fn adj(&self) -> Self {
        IntMat2::new(self.a22.clone(), -&self.a12, -&self.a21, self.a11.clone())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMat2::new(c * &self.a11, c * &self.a12, c * &self.a21, c * &self.a22)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = IntMat2::identity();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.a12 == self.a21
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn content(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Err(Error::ZeroObject);
        }
        Ok(gcd_all(self.entries()))
    }

    /// Max-coefficient norm.
    pub fn norm_max(&self) -> BigInt {
        self.entries().iter().map(|x| x.abs()).max().expect("four entries")
    }

    /// The symmetric vector of a symmetric matrix.
    pub fn to_symvec(&self) -> Option<SymVec> {
        self.is_symmetric()
            .then(|| SymVec::new(self.a11.clone(), self.a12.clone(), self.a22.clone()))
    }
}

impl Mul<&IntMat2> for &IntMat2 {
    type Output = IntMat2;
    fn mul(self, o: &IntMat2) -> IntMat2 {
        IntMat2::new(
            &self.a11 * &o.a11 + &self.a12 * &o.a21,
            &self.a11 * &o.a12 + &self.a12 * &o.a22,
            &self.a21 * &o.a11 + &self.a22 * &o.a21,
            &self.a21 * &o.a12 + &self.a22 * &o.a22,
        )
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;
    fn mul(self, o: IntMat2) -> IntMat2 {
        &self * &o
    }
}

impl Add<&IntMat2> for &IntMat2 {
    type Output = IntMat2;
    fn add(self, o: &IntMat2) -> IntMat2 {
        IntMat2::new(&self.a11 + &o.a11, &self.a12 + &o.a12, &self.a21 + &o.a21, &self.a22 + &o.a22)
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

impl Serialize for IntMat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [self.a11.to_string(), self.a12.to_string()],
            [self.a21.to_string(), self.a22.to_string()],
        ];
        rows.serialize(s)
    }
}

fn parse_big<E: serde::de::Error>(v: &serde_json::Value) -> std::result::Result<BigInt, E> {
    match v {
        serde_json::Value::String(s) => s.trim().parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| E::custom(format!("bad integer {n}"))),
        _ => Err(E::custom("expected integer or decimal string")),
    }
}

impl<'de> Deserialize<'de> for IntMat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(D::Error::custom("expected a 2x2 array"));
        }
        Ok(IntMat2::new(
            parse_big(&rows[0][0])?,
            parse_big(&rows[0][1])?,
            parse_big(&rows[1][0])?,
            parse_big(&rows[1][1])?,
        ))
    }
}

/// Integer 3-vector, read as the symmetric matrix `[[x0, x1], [x1, x2]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymVec {
    pub x0: BigInt,
    pub x1: BigInt,
    pub x2: BigInt,
}

impl SymVec {
    pub fn new(x0: BigInt, x1: BigInt, x2: BigInt) -> Self {
        SymVec { x0, x1, x2 }
    }

    pub fn from_i64(x0: i64, x1: i64, x2: i64) -> Self {
        SymVec::new(x0.into(), x1.into(), x2.into())
    }

    pub fn zero() -> Self {
        Self::from_i64(0, 0, 0)
    }

    pub fn coords(&self) -> [&BigInt; 3] {
        [&self.x0, &self.x1, &self.x2]
    }

    pub fn to_mat(&self) -> IntMat2 {
        IntMat2::new(self.x0.clone(), self.x1.clone(), self.x1.clone(), self.x2.clone())
    }

    pub fn from_mat(m: &IntMat2) -> Option<Self> {
        m.to_symvec()
    }

    /// `x0·x2 − x1²`.
    pub fn det(&self) -> BigInt {
        &self.x0 * &self.x2 - &self.x1 * &self.x1
    }

    pub fn tr(&self) -> BigInt {
        &self.x0 + &self.x2
    }

    pub fn dot(&self, o: &SymVec) -> BigInt {
        &self.x0 * &o.x0 + &self.x1 * &o.x1 + &self.x2 * &o.x2
    }

    pub fn wedge(&self, o: &SymVec) -> SymVec {
        wedge(self, o)
    }

    pub fn scale(&self, c: &BigInt) -> SymVec {
        SymVec::new(c * &self.x0, c * &self.x1, c * &self.x2)
    }

    /// Exact division by a common divisor; returns `None` if some entry is not divisible.
    pub fn div_exact(&self, c: &BigInt) -> Option<SymVec> {
        let parts: Vec<BigInt> = self
            .coords()
            .iter()
            .map(|x| {
                let (q, r) = x.div_rem(c);
                r.is_zero().then_some(q)
            })
            .collect::<Option<_>>()?;
        let [a, b, d]: [BigInt; 3] = parts.try_into().ok()?;
        Some(SymVec::new(a, b, d))
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|x| x.is_zero())
    }

    pub fn content(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Err(Error::ZeroObject);
        }
        Ok(gcd_all(self.coords()))
    }

    /// The vector divided by its content, sign kept.
    pub fn primitive(&self) -> Result<SymVec> {
        let c = self.content()?;
        Ok(self.div_exact(&c).expect("content divides every entry"))
    }

    /// Squared Euclidean norm.
    pub fn norm2(&self) -> BigInt {
        self.dot(self)
    }

    /// Max-coefficient norm.
    pub fn norm_max(&self) -> BigInt {
        self.coords().iter().map(|x| x.abs()).max().expect("three entries")
    }

    /// Natural log of the Euclidean norm.
    pub fn ln_norm(&self, p: usize) -> BigReal {
        let h = BigReal::ln_int(&self.norm2(), p + 8);
        (h * BigReal::from_f64(0.5, p + 8)).with_precision(p)
    }

    /// Euclidean norm as a high-precision real.
    pub fn norm(&self, p: usize) -> BigReal {
        BigReal::from_int(&self.norm2(), p).sqrt()
    }
}

impl Add<&SymVec> for &SymVec {
    type Output = SymVec;
    fn add(self, o: &SymVec) -> SymVec {
        SymVec::new(&self.x0 + &o.x0, &self.x1 + &o.x1, &self.x2 + &o.x2)
    }
}

impl Sub<&SymVec> for &SymVec {
    type Output = SymVec;
    fn sub(self, o: &SymVec) -> SymVec {
        SymVec::new(&self.x0 - &o.x0, &self.x1 - &o.x1, &self.x2 - &o.x2)
    }
}

impl Neg for &SymVec {
    type Output = SymVec;
    fn neg(self) -> SymVec {
        SymVec::new(-&self.x0, -&self.x1, -&self.x2)
    }
}

impl fmt::Display for SymVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x0, self.x1, self.x2)
    }
}

impl Serialize for SymVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x0.to_string(), self.x1.to_string(), self.x2.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<serde_json::Value> = Vec::deserialize(d)?;
        if v.len() != 3 {
            return Err(D::Error::custom("expected three coordinates"));
        }
        Ok(SymVec::new(parse_big(&v[0])?, parse_big(&v[1])?, parse_big(&v[2])?))
    }
}

/// Cross product of the underlying ℝ³ vectors.
pub fn wedge(x: &SymVec, y: &SymVec) -> SymVec {
    SymVec::new(
        &x.x1 * &y.x2 - &x.x2 * &y.x1,
        &x.x2 * &y.x0 - &x.x0 * &y.x2,
        &x.x0 * &y.x1 - &x.x1 * &y.x0,
    )
}

/// 3×3 determinant with rows `x`, `y`, `z`.
pub fn det3(x: &SymVec, y: &SymVec, z: &SymVec) -> BigInt {
    x.dot(&wedge(y, z))
}

/// `Tr(J x J y J z)` on symmetric matrices, which equals `−det3(x, y, z)` for `J = [[0,1],[−1,0]]`.
pub fn det3_trace(x: &SymVec, y: &SymVec, z: &SymVec) -> BigInt {
    let j = IntMat2::j();
    let m = &(&(&(&(&j * &x.to_mat()) * &j) * &y.to_mat()) * &j) * &z.to_mat();
    m.tr()
}

/// Content of a vector, an error for the zero vector.
pub fn content(v: &SymVec) -> Result<BigInt> {
    v.content()
}

/// Rational symmetric vector `num / den`, always in lowest terms with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatVec {
    num: SymVec,
    den: BigInt,
}

impl RatVec {
    /// Builds and reduces `num / den`. Panics on a zero denominator.
    pub fn new(num: SymVec, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut g = gcd_all(num.coords()).gcd(&den);
        if den.is_negative() {
            g = -g;
        }
        RatVec { num: num.div_exact(&g).expect("gcd divides"), den: den / g }
    }

    pub fn from_int(v: SymVec) -> Self {
        RatVec { num: v, den: BigInt::one() }
    }

    pub fn numer(&self) -> &SymVec {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_integral(&self) -> Option<SymVec> {
        self.is_integral().then(|| self.num.clone())
    }

    /// `c · self` when the product is integral.
    pub fn scale_to_int(&self, c: &BigInt) -> Option<SymVec> {
        self.num.scale(c).div_exact(&self.den)
    }

    pub fn scale(&self, c: &BigInt) -> RatVec {
        RatVec::new(self.num.scale(c), self.den.clone())
    }

    pub fn wedge(&self, o: &RatVec) -> RatVec {
        RatVec::new(wedge(&self.num, &o.num), &self.den * &o.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerator divided by its content: the primitive integer point on the same line.
    pub fn primitive(&self) -> Result<SymVec> {
        self.num.primitive()
    }
}

impl Add<&RatVec> for &RatVec {
    type Output = RatVec;
    fn add(self, o: &RatVec) -> RatVec {
        RatVec::new(&self.num.scale(&o.den) + &o.num.scale(&self.den), &self.den * &o.den)
    }
}

impl Sub<&RatVec> for &RatVec {
    type Output = RatVec;
    fn sub(self, o: &RatVec) -> RatVec {
        RatVec::new(&self.num.scale(&o.den) - &o.num.scale(&self.den), &self.den * &o.den)
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for RatVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct R<'a> {
            num: &'a SymVec,
            den: String,
        }
        R { num: &self.num, den: self.den.to_string() }.serialize(s)
    }
}
