//! Shared numerical kernels: simultaneous root finding for complex-coefficient
//! univariate polynomials and adaptive Gauss-Kronrod quadrature.

mod quadrature;
mod roots;

pub use quadrature::{integrate_adaptive, QuadResult};
pub use roots::{all_roots, polish_root, poly_eval, poly_eval_deriv, RootError};
