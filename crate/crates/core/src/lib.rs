//! Exact arithmetic for ψ-Sturmian matrix sequences.
//!
//! The crate builds admissible sequences of 2×2 integer matrices, the
//! approximation vectors `y_i` and `z_j` they generate, the number ξ they
//! converge to, and the parametric geometry of numbers attached to
//! `u = (1, ξ, ξ²)`: successive minima, the predicted 3-system and the
//! closed-form exponents.
//!
//! ```
//! use sturmlab::{matseq::MatrixSeed, sturm::SturmianProgram, approx::Approx};
//! let seed = MatrixSeed::roy(2, 1, 2).unwrap();
//! let mut ap = Approx::new(seed, SturmianProgram::fibonacci());
//! assert_eq!(ap.y_at(0).unwrap().to_string(), "(1, -2, -4)");
//! ```

pub mod approx;
pub mod error;
pub mod exactlin;
pub mod exponents;
pub mod matseq;
pub mod paramgeo;
pub mod sturm;
pub mod xi;

pub use error::{Error, Result};
pub use exactlin::{BigReal, IntMat2, RatVec, SymVec};
