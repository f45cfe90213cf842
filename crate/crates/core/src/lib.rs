//! Selberg trace formula for the weighted Dirac operator on compact
//! hyperbolic surfaces.

pub mod error;
pub mod fuchsian;
pub mod kernels;
pub mod moebius;
pub mod operators;
pub mod quadrature;
pub mod specfun;
pub mod testfn;
pub mod traceformula;
pub mod zeta;

pub use error::{Error, Result};
