//! Exact finite-n averages of `prod_j |det(H - mu_j)|^{2 alpha_j}` over GUE
//! matrices, computed as ratios of singular Hankel determinants at extended
//! precision, together with their closed-form large-n asymptotics.

pub mod asymptotics;
pub mod complex;
pub mod error;
pub mod hankel;
pub mod mc_gue;
pub mod orthopoly;
pub mod precision;
pub mod quadrature;
pub mod specfun;
pub mod weights;

pub use error::{LabError, Result};
pub use rug::Float;
