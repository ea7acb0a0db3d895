//! Special functions, quadrature and root finding shared by the analytic
//! modules. Everything here is a pure function of its inputs.

mod gamma;
mod pchip;
mod quadrature;
mod roots;

pub use gamma::{inv_reg_lower_gamma, log_gamma, reg_lower_gamma, reg_upper_gamma};
pub use quadrature::{integrate, integrate_with_breakpoints, QuadratureSpec};
pub use roots::{find_root, RootSpec};

pub(crate) use gamma::{incomplete_gamma, ln_binomial, ln_gamma};
pub(crate) use pchip::UniformPchip;

/// Two-sided standard-normal quantile `z` with `P(|Z| ≤ z) = confidence`,
/// via the chi-square(1) relation `P(1/2, z²/2) = confidence`.
pub fn normal_two_sided_quantile(confidence: f64) -> crate::Result<f64> {
    crate::error::ensure_probability_open("confidence", confidence)?;
    Ok((2.0 * inv_reg_lower_gamma(0.5, confidence)?).sqrt())
}
