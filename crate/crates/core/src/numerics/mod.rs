//! Grid realizations of complementary-series norms, the Knapp-Stein constant,
//! the action of the affine group and inversion, the bilinear operators on
//! grids, the boundedness experiment and the Monte Carlo symbol integral.

pub mod bilinear;
pub mod experiment;
pub mod grid;
pub mod group;
pub mod mixture;
pub mod montecarlo;
pub mod norms;
pub mod quadrature;
pub mod special;
pub mod suites;

pub use bilinear::{apply_d_grid, numeric_symbol, SeparableField};
pub use experiment::{bound_experiment, bound_ratio, BoundParams, BoundReport};
pub use grid::{GridFunction, Spectrum};
pub use group::{group_action, tensor_action, GroupElement};
pub use mixture::{Gaussian, GaussianMixture, MixtureSpec};
pub use montecarlo::{a_integral_mc, homogeneity_check, HomogeneityReport, MCEstimate, McParams};
pub use norms::{frac_norm, frac_norm_with, tensor_norm, NormRule};
pub use special::{knapp_stein_constant, ln_gamma_signed, KnappSteinConstant};
