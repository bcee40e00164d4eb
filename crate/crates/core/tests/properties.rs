//! Property tests for the algebraic invariants the library relies on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use sturmlab::approx::{verify_identities, Approx};
use sturmlab::exactlin::{det3, det3_trace, wedge};
use sturmlab::exponents::{closed_form, delta_threshold, jarnik_residual, parametric_from_standard, standard_from_parametric, ExponentInputs, ExponentSet};
use sturmlab::matseq::{is_admissible, MatrixSeed};
use sturmlab::sturm::{ProgramSpec, SturmianProgram};
use sturmlab::{BigReal, IntMat2, SymVec};

const P: usize = 192;
const REL_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-40;

fn symvec() -> impl Strategy<Value = SymVec> {
    (-10_000i64..=10_000, -10_000i64..=10_000, -10_000i64..=10_000).prop_map(|(a, b, c)| SymVec::from_i64(a, b, c))
}

fn norm(v: &SymVec) -> f64 {
    let f = |x: &BigInt| x.to_string().parse::<f64>().unwrap();
    (f(&v.x0).powi(2) + f(&v.x1).powi(2) + f(&v.x2).powi(2)).sqrt()
}

fn periodic_program() -> impl Strategy<Value = SturmianProgram> {
    prop::collection::vec(1i64..=5, 1..=4)
        .prop_map(|period| SturmianProgram::build(&ProgramSpec { prefix: vec![-1, 1], period }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetric_sandwich_is_det_j(x in symvec()) {
        let m = x.to_mat();
        let j = IntMat2::j();
        prop_assert_eq!(&(&m * &j) * &m, j.scale(&x.det()));
    }

    #[test]
    fn double_wedge(x in symvec(), y in symvec(), z in symvec()) {
        let lhs = wedge(&wedge(&x, &y), &wedge(&y, &z));
        prop_assert_eq!(lhs, y.scale(&det3(&x, &y, &z)));
        prop_assert_eq!(det3_trace(&x, &y, &z), -det3(&x, &y, &z));
    }

    #[test]
    fn wedge_is_orthogonal(x in symvec(), y in symvec()) {
        let w = wedge(&x, &y);
        prop_assert!(w.dot(&x).is_zero());
        prop_assert!(w.dot(&y).is_zero());
    }

    #[test]
    fn wedge_inequalities(x in symvec(), y in symvec(), z in symvec()) {
        // ‖(x·z)y − (x·y)z‖ ≤ 2‖x‖‖y∧z‖, compared exactly after squaring.
        let v = &y.scale(&x.dot(&z)) - &z.scale(&x.dot(&y));
        let four = BigInt::from(4);
        prop_assert!(v.norm2() <= four * x.norm2() * wedge(&y, &z).norm2());
        // ‖y‖‖x∧z‖ ≤ ‖z‖‖x∧y‖ + 2‖x‖‖y∧z‖
        let lhs = norm(&y) * norm(&wedge(&x, &z));
        let rhs = norm(&z) * norm(&wedge(&x, &y)) + 2.0 * norm(&x) * norm(&wedge(&y, &z));
        prop_assert!(lhs <= rhs * (1.0 + REL_TOL) + REL_TOL);
    }

    #[test]
    fn psi_is_a_bijection(prog in periodic_program(), i in -2i64..2_000) {
        prop_assert_eq!(prog.psi(prog.psi_inv(i)), i);
        if i >= 0 {
            prop_assert_eq!(prog.psi_inv(prog.psi(i)), i);
            prop_assert!(prog.psi(i) < i);
        }
    }

    #[test]
    fn cf_backward_recurrence(prog in periodic_program(), k in 2usize..40) {
        let prev = prog.cf_backward_exact(k - 1);
        let want = BigRational::from_integer(BigInt::from(prog.s(k + 1))) + prev.recip();
        prop_assert_eq!(prog.cf_backward_exact(k), want);
    }
}

#[test]
fn fibonacci_psi_inverse_long_range() {
    let prog = SturmianProgram::fibonacci();
    for i in -2..10_000 {
        assert_eq!(prog.psi(prog.psi_inv(i)), i, "i = {i}");
    }
    for i in 0..10_000 {
        assert_eq!(prog.psi_inv(prog.psi(i)), i, "i = {i}");
    }
}

fn inputs(sigma: f64, frac: f64) -> ExponentInputs {
    let s = BigReal::from_f64(sigma, P);
    let d = &delta_threshold(&s) * &BigReal::from_f64(frac, P);
    ExponentInputs { sigma: s.clone(), delta: d, tau: s, sigma_prime: None }
}

fn exact(set: &ExponentSet, name: &str) -> BigReal {
    set.get(name).unwrap().exact().unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jarnik_and_omega_identities(sigma in 0.05f64..0.618, frac in 0.0f64..0.999) {
        let set = closed_form(&inputs(sigma, frac)).unwrap();
        let r = jarnik_residual(&exact(&set, "lambda2_hat"), &exact(&set, "omega2_hat"));
        prop_assert!(r.abs().to_f64() < IDENTITY_TOL);
        let one = BigReal::one(P);
        let r2 = &(&exact(&set, "psi1_inf").recip() - &one) - &exact(&set, "omega2");
        prop_assert!(r2.abs().to_f64() < IDENTITY_TOL);
    }

    #[test]
    fn omega2_hat_decreases_in_delta(sigma in 0.05f64..0.618, a in 0.0f64..0.999, b in 0.0f64..0.999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let w_lo = exact(&closed_form(&inputs(sigma, lo)).unwrap(), "omega2_hat");
        let w_hi = exact(&closed_form(&inputs(sigma, hi)).unwrap(), "omega2_hat");
        prop_assert!(w_hi <= w_lo);
    }

    #[test]
    fn dictionary_round_trip(sigma in 0.05f64..0.618, frac in 0.0f64..0.999) {
        let set = closed_form(&inputs(sigma, frac)).unwrap();
        let back = parametric_from_standard(&standard_from_parametric(&set, P).unwrap(), P).unwrap();
        for name in ["psi1_inf", "psi1_sup", "psi3_inf", "psi3_sup"] {
            let (a, b) = (set.get(name).unwrap(), back.get(name).unwrap());
            let d = (a.lo() - b.lo()).abs().max((a.hi() - b.hi()).abs());
            prop_assert!(d < REL_TOL, "{} differs by {}", name, d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roy_seeds_are_admissible_and_satisfy_identities(a in 2u64..8, b in 1u64..6, extra in 0u64..6) {
        let c = b + extra;
        let seed = MatrixSeed::roy(a, b, c).unwrap();
        prop_assert!(is_admissible(&seed.w0, &seed.w1, &seed.n));
        prop_assert_eq!(seed.w0.det(), BigInt::from(a));
        prop_assert_eq!(seed.w1.det(), BigInt::from(a));
        let mut ap = Approx::new(seed, SturmianProgram::fibonacci());
        let i_max = ap.prog().t(7);
        let r = verify_identities(&mut ap, i_max).unwrap();
        prop_assert!(r.all_pass(), "({}, {}, {}) fails", a, b, c);
    }
}

#[test]
fn j_squares_to_minus_identity() {
    let j = IntMat2::j();
    assert_eq!(&j * &j, IntMat2::identity().scale(&-BigInt::one()));
}
