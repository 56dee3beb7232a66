//! Bilinear intertwining differential operators for tensor products of
//! spherical principal series of `SO0(n,1)`.
//!
//! * [`ratfun`]: exact rational functions in `alpha, beta, d` with factored
//!   linear denominators.
//! * [`kernel_cas`]: the term algebra over `r = |x|^2`, `s = |y|^2`,
//!   `t = <x,y>` and the chain-rule forms of the two Laplacians and of the
//!   mixed operator `grad_x . grad_y`.
//! * [`operators`]: the families `M`, `E`, `D`, their Fourier symbols, pole
//!   audit and exact identity checks.
//! * [`numerics`]: grid functions, complementary-series norms, Knapp-Stein
//!   constants, the boundedness experiment and the Monte Carlo estimate of the
//!   symbol integral.
//! * [`spectrum`]: parameter tables and discrete-component predicates.

pub mod error;
pub mod kernel_cas;
pub mod numerics;
pub mod operators;
pub mod ratfun;
pub mod spectrum;

pub use error::{Error, Result};
