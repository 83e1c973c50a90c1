//! Symbolic-numeric toolkit for constant-coefficient partial differential
//! operators with a single characteristic direction.
//!
//! The crate is organized around five subsystems:
//!
//! - [`polyalg`]: sparse multivariate polynomial arithmetic (exact rational or
//!   binary64 coefficients), the `D = -i∂` operator convention, slab
//!   decomposition `P = Σ Q_k(x') x_d^k`, and structural hypothesis checks.
//! - [`funcdata`]: boundary-datum representations closed under
//!   constant-coefficient operators, truncated-Taylor (jet) arithmetic, and
//!   compactly supported Gevrey-class cutoff construction.
//! - [`cauchy`]: the power-series solver for the non-characteristic Cauchy
//!   problem: recursive coefficient operators, their explicit multinomial
//!   form, series assembly, boundary-trace identities, and tail bounds.
//! - [`nullsol`]: numerical construction of null solutions: the
//!   contour-integral solution supported in a half-space and the slab-supported
//!   solution obtained by solving a Cauchy problem with cutoff data.
//! - [`domains`]: rasterized-domain geometry: distance fields, slice component
//!   analysis, Runge-pair and P-convexity verdicts.
//!
//! All symbolic values are immutable after construction and all operations are
//! pure, so everything here can be shared freely across threads.

pub mod cauchy;
pub mod domains;
pub mod funcdata;
pub mod nullsol;
pub mod numeric;
pub mod polyalg;
