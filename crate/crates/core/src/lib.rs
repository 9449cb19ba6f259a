//! Circular Bargmann transforms.
//!
//! Coherent-state transforms that map square-integrable functions on the unit
//! circle, weighted by `sin^γ(θ/2)`, isometrically into the weighted Bergman
//! space `A^γ(D)` and, more generally, into the eigenspaces `A_m^γ(D)` of the
//! magnetic Laplacian on the Poincaré disk (hyperbolic Landau levels
//! `ε_m = 4m(γ−m)`).
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-gamma, Pochhammer symbols, terminating ₂F₁, Jacobi polynomials.
//! * [`quadrature`]: tanh-sinh rules on the circle and Gauss–Jacobi × trapezoid rules on the disk.
//! * [`bases`]: the Bergman basis, the eigenspace basis and the circular Jacobi kets.
//! * [`coherent`]: reproducing kernels and coherent states (series and closed form).
//! * [`transforms`]: the transforms themselves, plus isometry evaluation.
//! * [`verify`]: the identity-certification harness.
//! * [`cli`]: argument parsing and CSV/JSON emission for the command-line tool.

// Guards are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bases;
pub mod cli;
pub mod coherent;
mod error;
pub mod quadrature;
pub mod specfun;
pub mod transforms;
pub mod verify;

pub use bases::ModelParams;
pub use error::{Error, Result};
pub use num_complex::Complex64;
