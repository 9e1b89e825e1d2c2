//! Numerical laboratory for two-dimensional degenerate oscillatory integrals.
//!
//! The crate studies integrals of the form
//!
//! ```text
//! T(lambda1, mu1, mu2) = iint exp(i*(lambda1*S(x,y) + mu1*x + mu2*y)) phi(x,y) dx dy
//! ```
//!
//! where `S` is a real polynomial vanishing to order >= 2 at the origin and `phi`
//! is a smooth radial bump supported near the origin. Three routes to the decay
//! rate of such integrals are implemented and cross-checked against each other:
//!
//! * combinatorial prediction from the Newton polygon of `S` ([`newton`]),
//! * direct evaluation by oscillation-adaptive Gauss-Kronrod quadrature ([`quad`])
//!   followed by log-log fitting of the decay law ([`fitter`]),
//! * sublevel-set measurements `|{ |S| < r }|` whose small-`r` growth carries the
//!   same exponent pair ([`sublevel`]).
//!
//! On top of these sit verification predicates for the monomialization step that
//! reduces a general phase to `d * x^alpha * y^beta` on curved wedges
//! ([`resolution`]), and spectral Fourier-multiplier evolutions that track how the
//! decay of the underlying kernel turns into `L^p -> L^q` mapping bounds for
//! dispersive, dissipative and fractional-inverse flows ([`spectral`]).
//!
//! All parallel code paths reduce over a fixed tree so results are byte-identical
//! regardless of thread count.

pub mod bump;
pub mod error;
pub mod fitter;
pub mod newton;
pub mod phase;
pub mod quad;
pub mod resolution;
pub mod spectral;
pub mod stats;
pub mod sublevel;

pub use bump::BumpSpec;
pub use error::Error;
pub use newton::{DecayLaw, NewtonPolygon};
pub use phase::Phase;
pub use quad::{Quad2DResult, QuadConfig};

/// Crate version recorded in output artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
