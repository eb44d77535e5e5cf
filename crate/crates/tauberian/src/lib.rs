//! Numerical toolkit for effective Wiener-Ikehara error bounds.
//!
//! The crate evaluates, for concrete Dirichlet series and summatory
//! functions, the explicit error terms that effective Tauberian theorems
//! attach to the asymptotic `A(x) ~ main term`. It is organized around:
//!
//! - [`kernels`]: Fejer kernels, the tail integral `I_q`, the vertical-line
//!   integrals `W_m` and `Z_m`, the function `beta(omega, t)`, and the Gamma
//!   function.
//! - [`dirichlet`]: coefficient series, summatory functions `A(x)`,
//!   Mellin-Stieltjes transforms (closed-form via Euler-Maclaurin zeta, or
//!   truncated sums with rigorous tail bounds), and the exponential-scale
//!   functions `h_sigma`, `g_sigma`.
//! - [`decrease`]: estimators for the decrease characteristics
//!   `nu_bar(lambda)`, `nu(lambda)`, moderate-decrease checks, and two
//!   explicit constructions separating the decrease classes.
//! - [`tauber`]: the G-function with boundary poles, the boundary integral
//!   `eta(sigma, T)`, pole-order diagnostics, the explicit error factors
//!   `rho_T(x)`, T-optimization, and end-to-end bound verification.
//! - [`lemmas`]: numeric verification harness for the Ganelius/Tenenbaum
//!   style lemmas on spectrum-gapped test functions.
//! - [`cli`]: config ingestion and the command runners behind the `tauberian`
//!   binary.

pub mod cli;
pub mod decrease;
pub mod dirichlet;
pub mod error;
pub mod kernels;
pub mod lemmas;
pub mod quad;
pub mod tauber;
pub mod util;

pub use error::{Error, Result};
pub use num_complex::Complex64;
