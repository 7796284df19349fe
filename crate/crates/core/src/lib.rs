//! Finite-truncation laboratory for operator algebras of the discrete
//! Heisenberg semigroup.
//!
//! Every operator is an explicit dense complex matrix acting on a finite
//! window of the basis `w^n u^k v^m`. Identities that are exact in infinite
//! dimensions are checked on interior vectors, where the truncation cannot
//! be seen; hull computations are one-sided sampling oracles.

pub mod averaging;
pub mod error;
pub mod fibers;
pub mod hgroup;
pub mod hulls;
pub mod linalg;
pub mod ops;
pub mod reps;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
