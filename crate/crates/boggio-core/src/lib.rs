//! Boggio Green kernels for the fractional polyharmonic Dirichlet problem
//! on the unit ball, with quadrature, conformal-map, and verification tools.

pub mod error;
pub mod exec;
pub mod fraclap;
pub mod kernel;
pub mod mobius;
pub mod quadrature;
pub mod solver;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{BallPoint, GreenKernel, RadialGreenProfile};
pub use quadrature::{IntegralResult, QuadratureSpec};
pub use specfun::FracOrder;
