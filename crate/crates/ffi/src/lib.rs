//! C interface to `sturmlab`.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible function returns a `SturmlabStatus`;
//! the message of the last failure on the calling thread is available through
//! `sturmlab_last_error`. Strings are written into caller buffers as
//! NUL-terminated UTF-8; when the buffer is too small the call fails with
//! `STURMLAB_STATUS_BUFFER_TOO_SMALL` and `needed` receives the required size.
//!
//! # Safety
//!
//! Every pointer argument must be NULL or valid for the access its function
//! describes: handles must come from the matching `*_new` and not be freed yet,
//! buffers must hold `len` bytes, strings must be NUL-terminated. NULL where a
//! value is required gives `STURMLAB_STATUS_NULL_POINTER`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sturmlab::approx::{contents_report, verify_identities, Approx};
use sturmlab::exponents::{closed_form, ExponentInputs};
use sturmlab::matseq::{delta_estimate, Anchor, MatrixSeed, MatrixSequence};
use sturmlab::paramgeo::{predicted_system, DeltaChoice, SystemBreakpoints};
use sturmlab::sturm::{ProgramSpec, SturmianProgram};
use sturmlab::xi::xi_value;
use sturmlab::{BigReal, Error};

/// Result codes. Values are stable.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SturmlabStatus {
    Ok = 0,
    NullPointer = 1,
    BufferTooSmall = 2,
    InvalidArgument = 3,
    Panic = 4,
    ZeroObject = 10,
    BadSequence = 11,
    Unbounded = 12,
    BadRoyTriple = 13,
    EqualLetters = 14,
    NoAdmissibleN = 15,
    DegenerateSeed = 16,
    SingularN = 17,
    DegenerateGrowth = 18,
    Capacity = 19,
    BadIndex = 20,
    NoConvergence = 21,
    TooLarge = 22,
    NoCandidates = 23,
    ImproperDelta = 24,
    OutOfRange = 25,
    FibonacciOnly = 26,
    BadWindow = 27,
    Parse = 28,
}

fn code(e: &Error) -> SturmlabStatus {
    use SturmlabStatus as S;
    match e {
        Error::ZeroObject => S::ZeroObject,
        Error::BadSequence(_) => S::BadSequence,
        Error::Unbounded => S::Unbounded,
        Error::BadRoyTriple(_) => S::BadRoyTriple,
        Error::EqualLetters => S::EqualLetters,
        Error::NoAdmissibleN => S::NoAdmissibleN,
        Error::DegenerateSeed(_) => S::DegenerateSeed,
        Error::SingularN => S::SingularN,
        Error::DegenerateGrowth(_) => S::DegenerateGrowth,
        Error::Capacity { .. } => S::Capacity,
        Error::BadIndex(_) => S::BadIndex,
        Error::NoConvergence(_) => S::NoConvergence,
        Error::TooLarge { .. } => S::TooLarge,
        Error::NoCandidates => S::NoCandidates,
        Error::ImproperDelta(_) => S::ImproperDelta,
        Error::OutOfRange(_) => S::OutOfRange,
        Error::FibonacciOnly => S::FibonacciOnly,
        Error::BadWindow(_) => S::BadWindow,
        Error::Parse(_) => S::Parse,
    }
}

thread_local! {
    static LAST: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last(msg: String) {
    LAST.with(|l| *l.borrow_mut() = msg);
}

fn fail(s: SturmlabStatus, msg: impl Into<String>) -> SturmlabStatus {
    set_last(msg.into());
    s
}

/// Runs `f`, converting library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SturmlabStatus>) -> SturmlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SturmlabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(SturmlabStatus::Panic, "internal panic"),
    }
}

fn lib(e: Error) -> SturmlabStatus {
    let s = code(&e);
    fail(s, e.to_string())
}

fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), SturmlabStatus> {
    let n = s.len() + 1;
    if !needed.is_null() {
        // SAFETY: caller passes a valid pointer or NULL.
        unsafe { *needed = n };
    }
    if buf.is_null() || len < n {
        // The last error message is left alone so `sturmlab_last_error` can be sized first.
        return Err(SturmlabStatus::BufferTooSmall);
    }
    // SAFETY: `buf` holds at least `n` bytes.
    unsafe {
        ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
        *buf.add(s.len()) = 0;
    }
    Ok(())
}

fn program_from(spec: *const c_char) -> Result<SturmianProgram, SturmlabStatus> {
    if spec.is_null() {
        return Ok(SturmianProgram::fibonacci());
    }
    // SAFETY: non-null, NUL-terminated by contract.
    let text = unsafe { CStr::from_ptr(spec) }.to_str().map_err(|_| fail(SturmlabStatus::InvalidArgument, "program is not UTF-8"))?;
    let spec: ProgramSpec = text.parse().map_err(lib)?;
    SturmianProgram::build(&spec).map_err(lib)
}

macro_rules! deref {
    ($p:expr) => {{
        if $p.is_null() {
            return Err(fail(SturmlabStatus::NullPointer, concat!(stringify!($p), " is NULL")));
        }
        // SAFETY: handles come from `Box::into_raw` in this crate and are not aliased across threads.
        unsafe { &mut *$p }
    }};
}

macro_rules! out {
    ($p:expr, $v:expr) => {{
        if $p.is_null() {
            return Err(fail(SturmlabStatus::NullPointer, concat!(stringify!($p), " is NULL")));
        }
        // SAFETY: checked non-null; caller owns the storage.
        unsafe { *$p = $v };
    }};
}

/// A seed, a program and the sequences built from them.
pub struct SturmlabApprox {
    ap: Approx,
}

/// A predicted 3-system over a window of `k`.
pub struct SturmlabSystem {
    sys: SystemBreakpoints,
    precision: usize,
}

/// Closed-form exponents. Interval-valued entries have `lo < hi`; exact ones have `lo == hi`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SturmlabExponents {
    pub psi1_inf: [f64; 2],
    pub psi1_sup: [f64; 2],
    pub psi2_inf: [f64; 2],
    pub psi2_sup: [f64; 2],
    pub psi3_inf: [f64; 2],
    pub psi3_sup: [f64; 2],
    pub omega2: [f64; 2],
    pub omega2_hat: [f64; 2],
    pub lambda2: [f64; 2],
    pub lambda2_hat: [f64; 2],
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sturmlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sturmlab_status_name(status: SturmlabStatus) -> *const c_char {
    use SturmlabStatus as S;
    let s: &'static str = match status {
        S::Ok => "ok\0",
        S::NullPointer => "null pointer\0",
        S::BufferTooSmall => "buffer too small\0",
        S::InvalidArgument => "invalid argument\0",
        S::Panic => "internal panic\0",
        S::ZeroObject => "zero object\0",
        S::BadSequence => "bad sequence\0",
        S::Unbounded => "unbounded program\0",
        S::BadRoyTriple => "bad Roy triple\0",
        S::EqualLetters => "equal letters\0",
        S::NoAdmissibleN => "no admissible N\0",
        S::DegenerateSeed => "degenerate seed\0",
        S::SingularN => "singular N\0",
        S::DegenerateGrowth => "degenerate growth\0",
        S::Capacity => "capacity exceeded\0",
        S::BadIndex => "bad index\0",
        S::NoConvergence => "no convergence\0",
        S::TooLarge => "search radius too large\0",
        S::NoCandidates => "no candidates\0",
        S::ImproperDelta => "improper delta\0",
        S::OutOfRange => "out of range\0",
        S::FibonacciOnly => "all-ones program only\0",
        S::BadWindow => "bad window\0",
        S::Parse => "parse error\0",
    };
    s.as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> SturmlabStatus {
    let msg = LAST.with(|l| l.borrow().clone());
    guard(|| write_str(&msg, buf, len, needed))
}

fn new_approx(seed: Result<MatrixSeed, Error>, program: *const c_char, precision: u32, out: *mut *mut SturmlabApprox) -> SturmlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(SturmlabStatus::NullPointer, "out is NULL"));
        }
        let seed = seed.map_err(lib)?;
        let prog = program_from(program)?;
        let p = if precision == 0 { 256 } else { precision.max(64) as usize };
        let h = Box::new(SturmlabApprox { ap: Approx::from_sequence(MatrixSequence::with_precision(seed, prog, p)) });
        out!(out, Box::into_raw(h));
        Ok(())
    })
}

/// Roy seed `(a, b, c)` on `program` (NULL for the all-ones program). `precision` 0 means 256 bits.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_approx_new_roy(a: u64, b: u64, c: u64, program: *const c_char, precision: u32, out: *mut *mut SturmlabApprox) -> SturmlabStatus {
    new_approx(MatrixSeed::roy(a, b, c), program, precision, out)
}

/// Bugeaud–Laurent seed with letters `a ≠ b` and first exponent `s1`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_approx_new_bl(a: u64, b: u64, s1: u64, program: *const c_char, precision: u32, out: *mut *mut SturmlabApprox) -> SturmlabStatus {
    new_approx(MatrixSeed::bl(a, b, s1), program, precision, out)
}

/// Releases a handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_approx_free(h: *mut SturmlabApprox) {
    if !h.is_null() {
        // SAFETY: created by `Box::into_raw` above and freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Checks every exact identity and content divisibility for indices up to `t_k`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_verify(h: *mut SturmlabApprox, k: u32, all_pass: *mut bool) -> SturmlabStatus {
    guard(|| {
        let h = deref!(h);
        let i_max = h.ap.prog().t(k as usize);
        let ids = verify_identities(&mut h.ap, i_max).map_err(lib)?;
        let c = contents_report(&mut h.ap, i_max).map_err(lib)?;
        out!(all_pass, ids.all_pass() && c.all_pass());
        Ok(())
    })
}

/// `y_i` as `"(x0, x1, x2)"`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_y(h: *mut SturmlabApprox, i: i64, buf: *mut c_char, len: usize, needed: *mut usize) -> SturmlabStatus {
    guard(|| {
        let h = deref!(h);
        let y = h.ap.y_at(i).map_err(lib)?;
        write_str(&y.to_string(), buf, len, needed)
    })
}

/// `δ_k = log|det w_k| / log‖w_k‖` at `k = k_max`; `exact_zero` tells whether every `|det w_k| = 1`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_delta(h: *mut SturmlabApprox, k_max: u32, delta: *mut f64, exact_zero: *mut bool) -> SturmlabStatus {
    guard(|| {
        let h = deref!(h);
        let r = delta_estimate(&mut h.ap.seq, k_max as usize).map_err(lib)?;
        out!(delta, r.estimate.to_f64());
        if !exact_zero.is_null() {
            out!(exact_zero, r.exact_zero);
        }
        Ok(())
    })
}

/// `digits` decimal digits of ξ.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_xi_digits(h: *mut SturmlabApprox, digits: u32, buf: *mut c_char, len: usize, needed: *mut usize) -> SturmlabStatus {
    guard(|| {
        let h = deref!(h);
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
        let xi = xi_value(&mut h.ap, bits).map_err(lib)?;
        write_str(&xi.value.with_precision(bits + 64).to_decimal(digits as usize), buf, len, needed)
    })
}

/// Closed-form exponents at `(σ, δ, τ, σ′)`; pass `σ′ = +∞` for an unbounded `σ′`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_exponents(sigma: f64, delta: f64, tau: f64, sigma_prime: f64, out: *mut SturmlabExponents) -> SturmlabStatus {
    guard(|| {
        if ![sigma, delta, tau].iter().all(|x| x.is_finite()) || sigma_prime.is_nan() {
            return Err(fail(SturmlabStatus::InvalidArgument, "non-finite input"));
        }
        let p = 256;
        let inp = ExponentInputs {
            sigma: BigReal::from_f64(sigma, p),
            delta: BigReal::from_f64(delta, p),
            tau: BigReal::from_f64(tau, p),
            sigma_prime: sigma_prime.is_finite().then(|| BigReal::from_f64(sigma_prime, p)),
        };
        let set = closed_form(&inp).map_err(lib)?;
        let pair = |name: &str| set.get(name).map(|e| [e.lo(), e.hi()]).unwrap_or([f64::NAN; 2]);
        out!(
            out,
            SturmlabExponents {
                psi1_inf: pair("psi1_inf"),
                psi1_sup: pair("psi1_sup"),
                psi2_inf: pair("psi2_inf"),
                psi2_sup: pair("psi2_sup"),
                psi3_inf: pair("psi3_inf"),
                psi3_sup: pair("psi3_sup"),
                omega2: pair("omega2"),
                omega2_hat: pair("omega2_hat"),
                lambda2: pair("lambda2"),
                lambda2_hat: pair("lambda2_hat"),
            }
        );
        Ok(())
    })
}

/// The predicted 3-system for `k_lo ≤ k ≤ k_hi`; a NaN `delta` uses the estimate.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_system_new(h: *mut SturmlabApprox, k_lo: u32, k_hi: u32, delta: f64, out: *mut *mut SturmlabSystem) -> SturmlabStatus {
    guard(|| {
        let h = deref!(h);
        if out.is_null() {
            return Err(fail(SturmlabStatus::NullPointer, "out is NULL"));
        }
        let p = h.ap.precision();
        let choice = if delta.is_nan() { DeltaChoice::Auto } else { DeltaChoice::Forced(BigReal::from_f64(delta, p)) };
        let sys = predicted_system(&mut h.ap, k_lo as usize, k_hi as usize, choice, Anchor::Auto).map_err(lib)?;
        out!(out, Box::into_raw(Box::new(SturmlabSystem { sys, precision: p })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sturmlab_system_free(s: *mut SturmlabSystem) {
    if !s.is_null() {
        // SAFETY: created by `Box::into_raw` above and freed once.
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Full validity verdict (3-system conditions, ordering, shape and the δ hypothesis).
#[no_mangle]
pub unsafe extern "C" fn sturmlab_system_validate(s: *mut SturmlabSystem, tol: f64, valid: *mut bool) -> SturmlabStatus {
    guard(|| {
        let s = deref!(s);
        let v = s.sys.validate(&BigReal::from_f64(tol, s.precision));
        if let Some(d) = v.diagnostic.first() {
            set_last(d.clone());
        }
        out!(valid, v.valid);
        Ok(())
    })
}

/// `[lo, hi]` of the q-range covered by the system.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_system_span(s: *mut SturmlabSystem, lo: *mut f64, hi: *mut f64) -> SturmlabStatus {
    guard(|| {
        let s = deref!(s);
        let (a, b) = s.sys.span();
        out!(lo, a.to_f64());
        out!(hi, b.to_f64());
        Ok(())
    })
}

/// `(P₁, P₂, P₃)(q)` into `out[0..3]`.
#[no_mangle]
pub unsafe extern "C" fn sturmlab_system_eval(s: *mut SturmlabSystem, q: f64, out: *mut f64) -> SturmlabStatus {
    guard(|| {
        let s = deref!(s);
        if out.is_null() {
            return Err(fail(SturmlabStatus::NullPointer, "out is NULL"));
        }
        let v = s
            .sys
            .p(&BigReal::from_f64(q, s.precision))
            .ok_or_else(|| fail(SturmlabStatus::OutOfRange, format!("q = {q} outside the system")))?;
        for (j, x) in v.iter().enumerate() {
            // SAFETY: caller provides room for three doubles.
            unsafe { *out.add(j) = x.to_f64() };
        }
        Ok(())
    })
}
