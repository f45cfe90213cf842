//! Special functions and the Green's kernel.

pub mod barnes;
pub mod gamma;
pub mod green;
pub mod hyp2f1;

pub use barnes::{barnes_g, barnes_g_zero_order, ln_barnes_g};
pub use gamma::{digamma, gamma, ln_gamma, EULER_GAMMA};
pub use green::{green_free, greenh_residual, h_kernel, h_kernel_sm1, Representation};
pub use hyp2f1::{hyp2f1, hyp2f1_euler};
