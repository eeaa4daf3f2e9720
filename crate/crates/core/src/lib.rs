//! Probability distributions on counts and compositions.
//!
//! The crate covers three connected pieces:
//!
//! * push-forward densities of a Dirichlet vector under the ratio map
//!   `y = x[..n-1] / x[n-1]` (Inverted Dirichlet) and the additive log-ratio
//!   map (ALR-Dirichlet), with closed-form Jacobians ([`simplex`]);
//! * the chain from counts to compositions: Poisson-Gamma mixtures give a
//!   Negative Binomial total, the counts given the total are
//!   Dirichlet-Multinomial, and one merged category is Beta-Binomial
//!   ([`dist`]);
//! * an oracle harness that re-derives every identity above by enumeration,
//!   quadrature, finite differences or simulation ([`verify`]).
//!
//! All densities are evaluated in the log domain first.

pub mod dist;
pub mod error;
pub mod numeric;
pub mod rng;
pub mod simplex;
pub mod verify;

pub use error::{Error, Result};
pub use rng::RngStream;
