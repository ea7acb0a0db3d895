//! Smallest common server rate meeting an outage target.

use serde::Serialize;

use crate::arrivals::{ArrivalModel, ArrivalShape};
use crate::error::{ensure_positive, ensure_probability_open, Error, Result};
use crate::numerics::{inv_reg_lower_gamma, ln_binomial};

/// Which necessary condition sets the minimum rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingBound {
    /// The delay must beat the deadline (`min(d, 1/η)` for deterministic arrivals).
    Deadline,
    /// The delay must beat the next interarrival.
    Interarrival,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ServerRateDesign {
    /// Minimum per-server bit rate `μ̄` (bits/s).
    pub mu_bar_bps: f64,
    pub binding: BindingBound,
    pub deadline_bound_bps: f64,
    /// Absent for deterministic and non-integer-shape arrivals.
    pub interarrival_bound_bps: Option<f64>,
}

/// Necessary per-server rate for `N` equal-rate servers to reach `target_pe`.
///
/// Deadline bound: `μ̄ ≥ (B/d)·P⁻¹(N, 1 − p)`, exact for deterministic
/// arrivals with `d` replaced by `min(d, 1/η)`. Interarrival bound (integer
/// gamma shape `M`, Poisson being `M = 1`):
/// `μ̄ ≥ MηB·s / (C(M+N−1, N)^{1/N} − s)` with `s = (1 − p)^{1/N}`.
pub fn min_server_rate(
    servers: usize,
    arrivals: &ArrivalModel,
    packet_bits: f64,
    deadline: f64,
    target_pe: f64,
) -> Result<ServerRateDesign> {
    if servers == 0 {
        return Err(crate::error::domain("servers", "need at least one server"));
    }
    ensure_positive("packet size", packet_bits)?;
    ensure_positive("deadline", deadline)?;
    ensure_probability_open("target outage", target_pe)?;
    let n = servers as f64;
    let eta = arrivals.rate();

    let horizon = match arrivals.shape() {
        ArrivalShape::Deterministic => deadline.min(1.0 / eta),
        _ => deadline,
    };
    let deadline_bound = packet_bits / horizon * inv_reg_lower_gamma(n, 1.0 - target_pe)?;

    let interarrival_bound = match arrivals.gamma_shape() {
        Some(m) if m.fract() == 0.0 => {
            let ln_binom = ln_binomial(m + n - 1.0, n);
            let s = ((1.0 - target_pe).ln() / n).exp();
            let denominator = (ln_binom / n).exp() - s;
            if denominator <= 0.0 {
                return Err(Error::Infeasible(format!(
                    "outage {target_pe} is below what M = {m}, N = {servers} allows at any rate"
                )));
            }
            Some(m * eta * packet_bits * s / denominator)
        }
        _ => None,
    };

    let (mu_bar_bps, binding) = match interarrival_bound {
        Some(b) if b > deadline_bound => (b, BindingBound::Interarrival),
        _ => (deadline_bound, BindingBound::Deadline),
    };
    Ok(ServerRateDesign {
        mu_bar_bps,
        binding,
        deadline_bound_bps: deadline_bound,
        interarrival_bound_bps: interarrival_bound,
    })
}
