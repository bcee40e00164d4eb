//! The approximation sequences `y_i`, `z_j`, their exact identities, contents and gray fans.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{det3_trace, BigReal, IntMat2, RatVec, SymVec};
use crate::matseq::{ser_big, MatrixSeed, MatrixSequence};
use crate::sturm::SturmianProgram;

/// Memoized `y_i` (`i ≥ −2`) and `z_j` (`j ≥ −1`) over a matrix sequence.
#[derive(Clone, Debug)]
pub struct Approx {
    pub seq: MatrixSequence,
    y: Vec<SymVec>,
    z: Vec<RatVec>,
}

fn sym(m: &IntMat2) -> Result<SymVec> {
    m.to_symvec().ok_or_else(|| Error::BadSequence(format!("non-symmetric product {m}")))
}

impl Approx {
    pub fn new(seed: MatrixSeed, prog: SturmianProgram) -> Self {
        Self::from_sequence(MatrixSequence::new(seed, prog))
    }

    pub fn from_sequence(seq: MatrixSequence) -> Self {
        Approx { seq, y: Vec::new(), z: Vec::new() }
    }

    pub fn prog(&self) -> &SturmianProgram {
        &self.seq.prog
    }

    pub fn seed(&self) -> &MatrixSeed {
        &self.seq.seed
    }

    pub fn precision(&self) -> usize {
        self.seq.precision
    }

    /// `det w_k`.
    pub fn det_w(&mut self, k: usize) -> Result<BigInt> {
        Ok(self.seq.w(k)?.det())
    }

    /// `Tr w_k`.
    pub fn tr_w(&mut self, k: usize) -> Result<BigInt> {
        Ok(self.seq.w(k)?.tr())
    }

    fn compute_y(&mut self, i: i64) -> Result<SymVec> {
        let seed = &self.seq.seed;
        match i {
            -2 => sym(&(&seed.w0 * &seed.n.transpose())),
            -1 => sym(&(&seed.w1 * &seed.n)),
            _ => {
                let (k, l) = self.seq.prog.decompose(i);
                let nk = self.seq.n_k(k);
                let r = self.seq.rung(k, (l + 1) as usize)?;
                sym(&(r * &nk))
            }
        }
    }

    /// `y_i = w_k^{l+1} w_{k−1} N_k` for `i = t_k + l`, plus the two seeds at `−2`, `−1`.
    pub fn y_at(&mut self, i: i64) -> Result<SymVec> {
        if i < -2 {
            return Err(Error::BadIndex(i));
        }
        while (self.y.len() as i64) - 2 <= i {
            let next = self.y.len() as i64 - 2;
            let v = self.compute_y(next)?;
            self.y.push(v);
        }
        Ok(self.y[(i + 2) as usize].clone())
    }

    /// `z_{t_k+l} = y_{ψ(t_{k+1})} ∧ y_{t_k+l} / det w_k`, for `j ≥ −1`.
    pub fn z_at(&mut self, j: i64) -> Result<RatVec> {
        if j < -1 {
            return Err(Error::BadIndex(j));
        }
        while (self.z.len() as i64) - 1 <= j {
            let jj = self.z.len() as i64 - 1;
            let (k, _) = self.seq.prog.decompose(jj);
            let a = self.prog().psi(self.prog().t(k + 1));
            let ya = self.y_at(a)?;
            let yj = self.y_at(jj)?;
            let d = self.det_w(k)?;
            self.z.push(RatVec::new(ya.wedge(&yj), d));
        }
        Ok(self.z[(j + 1) as usize].clone())
    }

    /// `det(w₂)·z_j`, integral under the content hypotheses.
    pub fn z_int(&mut self, j: i64) -> Result<Option<SymVec>> {
        let d2 = self.det_w(2)?;
        Ok(self.z_at(j)?.scale_to_int(&d2))
    }

    /// `det(w₂)² det(N)² |Tr(JN)|`.
    pub fn content_bound(&mut self) -> Result<BigInt> {
        let d2 = self.det_w(2)?;
        let s = self.seed();
        Ok(&d2 * &d2 * &s.det_n * &s.det_n * s.tr_jn.abs())
    }
}

/// Pass/fail of one identity family over its index range.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub checked: usize,
    /// Indices at which the identity failed.
    pub failures: Vec<i64>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub seed: String,
    pub program: String,
    pub i_max: i64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed() && c.checked > 0)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    checks: Vec<IdentityCheck>,
}

impl Tally {
    fn rec(&mut self, name: &'static str, idx: i64, ok: bool) {
        let c = match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c,
            None => {
                self.checks.push(IdentityCheck { name, checked: 0, failures: Vec::new() });
                self.checks.last_mut().expect("pushed")
            }
        };
        c.checked += 1;
        if !ok {
            c.failures.push(idx);
        }
    }
}

fn mat_eq_sym(m: &IntMat2, v: &SymVec) -> bool {
    m.to_symvec().as_ref() == Some(v)
}

/// Checks every exact identity of the sequences on indices up to `i_max`.
pub fn verify_identities(ap: &mut Approx, i_max: i64) -> Result<IdentityReport> {
    let prog = ap.prog().clone();
    let mut k_top = 1;
    while prog.t(k_top + 1) <= i_max {
        k_top += 1;
    }
    let mut t = Tally { checks: Vec::new() };

    for i in -2..=i_max {
        let y = ap.y_at(i)?;
        t.rec("symmetric", i, y.to_mat().is_symmetric());
    }

    for k in 1..=k_top {
        // w_{k−1} w_k N_{k+1} = w_k w_{k−1} N_k
        let wk = ap.seq.w(k)?.clone();
        let wk1 = ap.seq.w(k - 1)?.clone();
        let lhs = &(&wk1 * &wk) * &ap.seq.n_k(k + 1);
        let rhs = &(&wk * &wk1) * &ap.seq.n_k(k);
        t.rec("commutation", k as i64, lhs == rhs);

        let s = prog.s(k + 1) as usize;
        let (trk, dk) = (wk.tr(), wk.det());
        let tr_rung = |ap: &mut Approx, l: usize| -> Result<BigInt> { Ok(ap.seq.rung(k, l)?.tr()) };
        let tr1 = tr_rung(ap, 1)?;
        for l in 2..=s + 1 {
            let lhs = tr_rung(ap, l)?;
            let rhs = &trk * tr_rung(ap, l - 1)? - &dk * tr_rung(ap, l - 2)?;
            t.rec("trace_recurrence", k as i64, lhs == rhs);
            let pw = num_traits::pow::pow(trk.clone(), l - 1);
            let cong = if dk.is_zero() { true } else { (&lhs - &pw * &tr1).mod_floor(&dk.abs()).is_zero() };
            t.rec("trace_congruence", k as i64, cong);
        }
    }

    // items of the basic y properties
    for k in 0..=k_top {
        let tk = prog.t(k);
        let s = prog.s(k + 1);
        let wk = ap.seq.w(k)?.clone();
        for l in 0..s {
            let j = tk + l;
            if j + 1 > i_max || j < -1 {
                continue;
            }
            let yj = ap.y_at(j)?;
            let yj1 = ap.y_at(j + 1)?;
            t.rec("y_step", j, mat_eq_sym(&(&wk * &yj.to_mat()), &yj1));
        }
        if k == 0 {
            continue;
        }
        let ypt = ap.y_at(prog.psi(tk))?;
        for l in 0..=s {
            let j = tk + l;
            if j > i_max {
                break;
            }
            let pw = wk.pow((l + 1) as u32);
            t.rec("y_power_form", j, mat_eq_sym(&(&pw * &ypt.to_mat()), &ap.y_at(j)?));
            if l < s {
                let yps = ap.y_at(prog.psi(j))?;
                t.rec("y_psi_step", j, mat_eq_sym(&(&wk * &yps.to_mat()), &ap.y_at(j)?));
            }
        }
    }

    // y_{j+1} = y_j y_{ψ(j)}⁻¹ y_j, cleared of denominators
    for j in 0..i_max {
        let yj = ap.y_at(j)?.to_mat();
        let yp = ap.y_at(prog.psi(j))?.to_mat();
        let lhs = ap.y_at(j + 1)?.to_mat().scale(&yp.det());
        let rhs = &(&yj * &yp.adj()) * &yj;
        t.rec("y_bracket", j, lhs == rhs);
    }

    for k in 0..=k_top {
        let tk = prog.t(k);
        let s = prog.s(k + 1);
        let (trk, dk) = (ap.tr_w(k)?, ap.det_w(k)?);
        let ytk = ap.y_at(tk)?;
        // y recurrence and wedge chain
        if k >= 1 {
            let base = ap.y_at(prog.psi(tk))?.wedge(&ytk);
            for l in 0..s {
                let j = tk + l;
                if j + 1 > i_max {
                    break;
                }
                let rhs = &ap.y_at(j)?.scale(&trk) - &ap.y_at(prog.psi(j))?.scale(&dk);
                t.rec("y_recurrence", j + 1, rhs == ap.y_at(j + 1)?);
                let chain = ap.y_at(j)?.wedge(&ap.y_at(j + 1)?);
                t.rec("y_wedge_chain", j, chain == base.scale(&num_traits::pow::pow(dk.clone(), (l + 1) as usize)));
            }
        }
        if k >= 2 && tk <= i_max {
            let (tr1, d1) = (ap.tr_w(k - 1)?, ap.det_w(k - 1)?);
            let rhs = &ap.y_at(tk - 1)?.scale(&tr1) - &ap.y_at(prog.psi(tk - 1))?.scale(&d1);
            t.rec("y_recurrence_boundary", tk, rhs == ytk);
        }
        // determinant identity, in the trace form Tr(JxJyJz)
        if tk < i_max {
            let lhs = det3_trace(&ap.y_at(tk - 1)?, &ytk, &ap.y_at(tk + 1)?);
            let tjn = (&IntMat2::j() * &ap.seq.n_k(k + 1)).tr();
            let rhs = -(&dk * ytk.det() * tjn);
            t.rec("det_triple", tk, lhs == rhs);
        }
        // z wedge identity
        let tk1 = prog.t(k + 1);
        if tk1 <= i_max {
            let zt = ap.z_at(tk1)?;
            let tjn = (&IntMat2::j() * &ap.seq.n_k(k + 1)).tr();
            let c = ap.seq.n_k(k).det() * tjn;
            for l in 0..s {
                let j = tk + l;
                // with the standard cross product the identity carries a minus sign
                let lhs = zt.wedge(&ap.z_at(j)?).scale(&-BigInt::one());
                t.rec("z_wedge", j, lhs == RatVec::from_int(ap.y_at(j)?.scale(&c)));
            }
        }
        // z recurrences
        if k >= 1 {
            let a = ap.y_at(prog.psi(tk1))?;
            for l in 0..s - 1 {
                let j = tk + l;
                if j + 1 > i_max {
                    break;
                }
                let w = RatVec::from_int(a.wedge(&ap.y_at(prog.psi(j))?));
                let rhs = &ap.z_at(j)?.scale(&trk) - &w;
                t.rec("z_recurrence", j + 1, rhs == ap.z_at(j + 1)?);
            }
        }
        if k >= 2 && tk1 <= i_max {
            let tr1 = ap.tr_w(k - 1)?;
            let w = RatVec::from_int(ap.y_at(prog.psi(tk))?.wedge(&ap.y_at(prog.psi(tk - 1))?));
            let rhs = &ap.z_at(tk - 1)?.scale(&tr1) - &w;
            t.rec("z_recurrence_boundary", tk1, rhs == ap.z_at(tk1)?);
        }
    }

    Ok(IdentityReport {
        seed: ap.seed().label(),
        program: prog.spec().map(|s| s.to_string()).unwrap_or_else(|| "generator".into()),
        i_max,
        checks: t.checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContentRow {
    pub i: i64,
    #[serde(serialize_with = "ser_big")]
    pub content_y: BigInt,
    pub y_divides_det_n: bool,
    /// Content of `det(w₂)·z_i`, `None` when it is not integral.
    pub content_z: Option<String>,
    pub z_integral: bool,
    /// `None` when the bound is zero (`Tr(JN) = 0`).
    pub z_divides_bound: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContentReport {
    pub rows: Vec<ContentRow>,
    #[serde(serialize_with = "ser_big")]
    pub det_n: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub det_w2: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub bound: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub max_content_y: BigInt,
    /// Coprimality of `Tr` and `det` on the first ladder, the hypothesis of the content results.
    pub hypothesis: bool,
    /// `gcd(Tr, det) = 1` and primitivity of every rung `w_k^l w_{k−1}` checked, when the hypothesis holds.
    pub rungs_coprime: Option<bool>,
    pub rungs_primitive: Option<bool>,
}

impl ContentReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.y_divides_det_n && r.z_integral && r.z_divides_bound != Some(false))
            && self.rungs_coprime != Some(false)
            && self.rungs_primitive != Some(false)
    }
}

fn divides(a: &BigInt, b: &BigInt) -> bool {
    if a.is_zero() {
        return b.is_zero();
    }
    (b % a).is_zero()
}

/// Contents of `y_i` and `det(w₂) z_i` for `−2 ≤ i ≤ i_max` and the rung coprimality checks.
pub fn contents_report(ap: &mut Approx, i_max: i64) -> Result<ContentReport> {
    let det_n = ap.seed().det_n.clone();
    let det_w2 = ap.det_w(2)?;
    let bound = ap.content_bound()?;
    let mut rows = Vec::new();
    let mut max_content_y = BigInt::zero();
    for i in -2..=i_max {
        let y = ap.y_at(i)?;
        let cy = y.content()?;
        if cy > max_content_y {
            max_content_y = cy.clone();
        }
        let (content_z, z_integral, z_div) = if i >= -1 {
            match ap.z_int(i)? {
                Some(zi) if zi.is_zero() => (Some("0".into()), true, None),
                Some(zi) => {
                    let cz = zi.content()?;
                    let dv = if bound.is_zero() { None } else { Some(divides(&cz, &bound)) };
                    (Some(cz.to_string()), true, dv)
                }
                None => (None, false, None),
            }
        } else {
            (None, true, None)
        };
        rows.push(ContentRow { i, y_divides_det_n: divides(&cy, &det_n), content_y: cy, content_z, z_integral, z_divides_bound: z_div });
    }

    let prog = ap.prog().clone();
    let coprime = |m: &IntMat2| m.tr().gcd(&m.det()).is_one();
    let s2 = prog.s(2) as usize;
    let mut hypothesis = coprime(ap.seq.w(1)?);
    for l in 0..=s2 + 1 {
        hypothesis &= coprime(ap.seq.rung(1, l)?);
    }
    let (mut rungs_coprime, mut rungs_primitive) = (None, None);
    if hypothesis {
        let mut k_top = 1;
        while prog.t(k_top + 1) <= i_max {
            k_top += 1;
        }
        let (mut c, mut p) = (true, true);
        for k in 1..=k_top {
            for l in 0..=prog.s(k + 1) as usize + 1 {
                let r = ap.seq.rung(k, l)?;
                c &= coprime(r);
                p &= r.content()?.is_one();
            }
        }
        rungs_coprime = Some(c);
        rungs_primitive = Some(p);
    }
    Ok(ContentReport { rows, det_n, det_w2, bound, max_content_y, hypothesis, rungs_coprime, rungs_primitive })
}

/// One point `x_m^{(i)} = p_m y_i − q_m y_{i−2}` of a gray fan.
#[derive(Clone, Debug, Serialize)]
pub struct GrayPoint {
    pub m: i64,
    /// Partial quotient `a_m`, absent for `m = −1`.
    pub a: Option<String>,
    #[serde(serialize_with = "ser_big")]
    pub p: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub q: BigInt,
    pub x: SymVec,
    #[serde(serialize_with = "ser_big")]
    pub content: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub alpha: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub beta: BigInt,
    pub log_norm: BigReal,
}

/// Exact checks attached to a fan.
#[derive(Clone, Debug, Serialize, Default)]
pub struct GrayChecks {
    pub starts_at_y_i: bool,
    pub ends_at_y_next: bool,
    pub recurrence: bool,
    pub decomposition: bool,
    pub wedge_is_dz: bool,
    /// `c_m c_{m+1} | d_i`. Fails when `z_{i+1}` is not primitive, e.g. Roy (2,1,2) at `i = 3`.
    pub content_product_divides_d: bool,
    /// `c_m c_{m+1} | d_i content(z_{i+1})`, what the wedge identity actually gives.
    pub content_product_divides_dz: bool,
    pub content_gcd_divides_y: bool,
    pub lambda_integral: bool,
}

impl GrayChecks {
    pub fn all(&self) -> bool {
        self.starts_at_y_i
            && self.ends_at_y_next
            && self.recurrence
            && self.decomposition
            && self.wedge_is_dz
            && self.content_product_divides_dz
            && self.content_gcd_divides_y
            && self.lambda_integral
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrayFan {
    pub i: i64,
    /// `Tr w_{i+1}` and `det w_{i+1}`.
    #[serde(serialize_with = "ser_big")]
    pub t_next: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub d_next: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub d_i: BigInt,
    /// `det(w₂)² det(N)² |Tr(JN)|`.
    #[serde(serialize_with = "ser_big")]
    pub lambda: BigInt,
    pub points: Vec<GrayPoint>,
    pub checks: GrayChecks,
}

/// Floor-based partial quotients of `n/d`, `d ≠ 0`.
pub fn partial_quotients(n: &BigInt, d: &BigInt) -> Vec<BigInt> {
    let (mut n, mut d) = (n.clone(), d.clone());
    let mut out = Vec::new();
    while !d.is_zero() {
        let (q, r) = n.div_mod_floor(&d);
        out.push(q);
        n = d;
        d = r;
    }
    out
}

/// The gray fan at index `i ≥ 2` in the Fibonacci case.
pub fn gray_fan(ap: &mut Approx, i: i64) -> Result<GrayFan> {
    if !ap.prog().is_fibonacci() {
        return Err(Error::FibonacciOnly);
    }
    if i < 2 {
        return Err(Error::BadIndex(i));
    }
    let p = ap.precision();
    let iu = i as usize;
    let t_next = ap.tr_w(iu + 1)?;
    let d_next = ap.det_w(iu + 1)?;
    let d_i = ap.det_w(iu)?;
    let d_i2 = ap.det_w(iu + 2)?;
    let lambda = ap.content_bound()?;
    let (yi, yim2, yi1) = (ap.y_at(i)?, ap.y_at(i - 2)?, ap.y_at(i + 1)?);
    let z = ap.z_at(i + 1)?;

    let quots = partial_quotients(&t_next, &d_next);
    let (mut p1, mut p2) = (BigInt::one(), BigInt::zero());
    let (mut q1, mut q2) = (BigInt::zero(), BigInt::one());
    let mut rows: Vec<(Option<BigInt>, BigInt, BigInt)> = vec![(None, p1.clone(), q1.clone())];
    for a in &quots {
        let pn = a * &p1 + &p2;
        let qn = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, pn);
        q2 = std::mem::replace(&mut q1, qn);
        rows.push((Some(a.clone()), p1.clone(), q1.clone()));
    }
    let mut points = Vec::with_capacity(rows.len());
    for (idx, (a, pm, qm)) in rows.into_iter().enumerate() {
        let x = &yi.scale(&pm) - &yim2.scale(&qm);
        let alpha = &d_i * (&d_next * &pm - &t_next * &qm);
        let beta = &d_i * &qm;
        points.push(GrayPoint {
            m: idx as i64 - 1,
            a: a.map(|v| v.to_string()),
            content: x.content()?,
            log_norm: x.ln_norm(p),
            x,
            p: pm,
            q: qm,
            alpha,
            beta,
        });
    }

    let mut ch = GrayChecks { starts_at_y_i: points[0].x == yi, ..Default::default() };
    let g = t_next.gcd(&d_next);
    let last = &points.last().expect("nonempty").x;
    let sign = if d_next.is_negative() { -BigInt::one() } else { BigInt::one() };
    ch.ends_at_y_next = yi1.div_exact(&g).map(|v| v.scale(&sign)).as_ref() == Some(last);
    ch.recurrence = (2..points.len()).all(|j| {
        let a: BigInt = points[j].a.as_ref().expect("quotient").parse().expect("int");
        points[j].x == &points[j - 1].x.scale(&a) + &points[j - 2].x
    });
    ch.decomposition = points.iter().all(|pt| &yi.scale(&pt.alpha) + &yi1.scale(&pt.beta) == pt.x.scale(&d_i2));
    let dz = z.scale(&d_i);
    let neg = dz.scale(&-BigInt::one());
    ch.wedge_is_dz = points.windows(2).all(|w| {
        let v = RatVec::from_int(w[0].x.wedge(&w[1].x));
        v == dz || v == neg
    });
    let cy = yi.content()?;
    let dzc = match dz.scale_to_int(&BigInt::one()) {
        Some(v) => v.content()?,
        None => d_i.clone(),
    };
    ch.content_product_divides_d = points.windows(2).all(|w| divides(&(&w[0].content * &w[1].content), &d_i));
    ch.content_product_divides_dz = points.windows(2).all(|w| divides(&(&w[0].content * &w[1].content), &dzc));
    ch.content_gcd_divides_y = points.windows(2).all(|w| divides(&w[0].content.gcd(&w[1].content), &cy));
    ch.lambda_integral = points.iter().all(|pt| {
        divides(&pt.content, &(&lambda * &pt.alpha)) && divides(&pt.content, &(&lambda * &pt.beta))
    });
    Ok(GrayFan { i, t_next, d_next, d_i, lambda, points, checks: ch })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roy() -> Approx {
        Approx::new(MatrixSeed::roy(2, 1, 2).unwrap(), SturmianProgram::fibonacci())
    }

    #[test]
    fn roy_values() {
        let mut ap = roy();
        assert_eq!(ap.y_at(0).unwrap(), SymVec::from_i64(1, -2, -4));
        assert_eq!(ap.y_at(1).unwrap(), SymVec::from_i64(-3, -10, -28));
        assert_eq!(ap.y_at(-2).unwrap(), SymVec::from_i64(5, -2, 0));
        assert_eq!(ap.y_at(-1).unwrap(), SymVec::from_i64(3, -2, 0));
        assert_eq!(ap.z_at(0).unwrap(), RatVec::from_int(SymVec::from_i64(4, 6, -2)));
        assert_eq!(ap.z_int(0).unwrap().unwrap(), SymVec::from_i64(16, 24, -8));
        assert_eq!(ap.content_bound().unwrap(), BigInt::from(128));
        assert_eq!(ap.y_at(-3).unwrap_err(), Error::BadIndex(-3));
    }

    #[test]
    fn identities_hold() {
        let mut ap = roy();
        let r = verify_identities(&mut ap, 13).unwrap();
        for c in &r.checks {
            assert!(c.passed(), "{} failed at {:?}", c.name, c.failures);
        }
        assert!(r.all_pass());
    }

    #[test]
    fn quotients() {
        let q = partial_quotients(&BigInt::from(-7), &BigInt::from(3));
        assert_eq!(q, vec![BigInt::from(-3), BigInt::from(1), BigInt::from(2)]);
    }

    #[test]
    fn fan() {
        let mut ap = roy();
        let f = gray_fan(&mut ap, 4).unwrap();
        assert!(f.checks.all(), "{:?}", f.checks);
        let mut other = Approx::new(MatrixSeed::roy(2, 1, 2).unwrap(), SturmianProgram::constant_tail(2));
        assert_eq!(gray_fan(&mut other, 4).unwrap_err(), Error::FibonacciOnly);
    }
}
