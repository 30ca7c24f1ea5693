//! Two-dimensional acoustic transmission scattering by a rough interface
//! `x2 = f(x1)`, solved with boundary integral equations on half-plane
//! impedance Green's functions.

pub mod bie;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod halfplane_green;
pub mod par;
pub mod quadrature;
pub mod solve;
pub mod specfun;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
pub use specfun::Point2;
