//! Wireless signaling: the overhead packet crosses a channel of bandwidth
//! `W` with delay `D = B / (W log₂(1 + SIR))`, so `D ≤ x` exactly when
//! `SIR ≥ β(x) = 2^{B/(Wx)} − 1`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::arrivals::{ArrivalModel, ArrivalShape};
use crate::error::{domain, ensure_positive, ensure_probability_open, Error, ErrorSlot, Result};
use crate::numerics::{find_root, integrate_with_breakpoints, QuadratureSpec, RootSpec};
use crate::sir::{z_function, zeta, SirDistribution};

/// Overhead channel bandwidth and packet size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWireless")]
pub struct WirelessConfig {
    bandwidth_hz: f64,
    packet_bits: f64,
}

#[derive(Deserialize)]
struct RawWireless {
    bandwidth_hz: f64,
    packet_bits: f64,
}

impl TryFrom<RawWireless> for WirelessConfig {
    type Error = Error;

    fn try_from(r: RawWireless) -> Result<Self> {
        WirelessConfig::new(r.bandwidth_hz, r.packet_bits)
    }
}

impl WirelessConfig {
    pub fn new(bandwidth_hz: f64, packet_bits: f64) -> Result<Self> {
        ensure_positive("bandwidth", bandwidth_hz)?;
        ensure_positive("packet size", packet_bits)?;
        Ok(Self {
            bandwidth_hz,
            packet_bits,
        })
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn packet_bits(&self) -> f64 {
        self.packet_bits
    }

    /// SIR needed to deliver the packet within `x` seconds.
    pub fn beta_of_deadline(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(domain("deadline", format!("must be > 0, got {x}")));
        }
        Ok(self.beta_unchecked(x))
    }

    fn beta_unchecked(&self, x: f64) -> f64 {
        (self.packet_bits * LN_2 / (self.bandwidth_hz * x)).exp_m1()
    }

    /// Air time `x` at which `β(x) = 1`; the SIR law turns over near here.
    fn unit_sir_time(&self) -> f64 {
        self.packet_bits / self.bandwidth_hz
    }
}

/// Outage `1 − P(D ≤ T, D ≤ d)` for a neighbor whose SIR law is `sir`.
pub fn outage<D: SirDistribution + ?Sized>(
    sir: &D,
    w: &WirelessConfig,
    arrivals: &ArrivalModel,
    d: f64,
) -> Result<f64> {
    check_deadline(d)?;
    let pe = match arrivals.gamma_shape() {
        None => sir.cdf(w.beta_unchecked(d.min(arrivals.mean_interarrival())))?,
        Some(_) => {
            let tail = arrivals.survival_unchecked(d) * sir.cdf(w.beta_unchecked(d))?;
            tail + expected_outage_over(sir, w, arrivals, d)?
        }
    };
    Ok(pe.clamp(0.0, 1.0))
}

/// `(lower, upper)` with `max(q{β(d)}, E[q{β(T)}]) ≤ p_e ≤ P(T ≥ d)q{β(d)} + P(T ≤ d)`.
pub fn outage_bounds<D: SirDistribution + ?Sized>(
    sir: &D,
    w: &WirelessConfig,
    arrivals: &ArrivalModel,
    d: f64,
) -> Result<(f64, f64)> {
    check_deadline(d)?;
    let at_deadline = sir.cdf(w.beta_unchecked(d))?;
    let over_arrivals = match arrivals.shape() {
        ArrivalShape::Deterministic => sir.cdf(w.beta_unchecked(arrivals.mean_interarrival()))?,
        _ => expected_outage_over(sir, w, arrivals, f64::INFINITY)?,
    };
    let lower = at_deadline.max(over_arrivals);
    let upper = arrivals.survival_unchecked(d) * at_deadline + arrivals.cdf_unchecked(d);
    Ok((lower.clamp(0.0, 1.0), upper.clamp(0.0, 1.0)))
}

/// `∫₀^{end} q{β(x)} f_T(x) dx` for continuous interarrivals.
fn expected_outage_over<D: SirDistribution + ?Sized>(
    sir: &D,
    w: &WirelessConfig,
    arrivals: &ArrivalModel,
    end: f64,
) -> Result<f64> {
    let density = arrivals
        .density()
        .ok_or_else(|| domain("interarrival density", "deterministic arrivals"))?;
    let m = arrivals.gamma_shape().unwrap_or(1.0);
    let r = m * arrivals.rate();
    let mut points = vec![0.0];
    for p in [
        1.0 / r,
        (m - 1.0) / r,
        arrivals.mean_interarrival(),
        w.unit_sir_time(),
    ] {
        if p > 0.0 && p < end {
            points.push(p);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points.push(end);
    let slot = ErrorSlot::default();
    let integrand = |x: f64| {
        let f = density(x);
        if f == 0.0 {
            0.0
        } else {
            f * slot.take_value(sir.cdf(w.beta_unchecked(x)))
        }
    };
    let r = integrate_with_breakpoints(integrand, &points, &QuadratureSpec::default());
    slot.finish(r)
}

fn check_deadline(d: f64) -> Result<()> {
    if d.is_nan() || d <= 0.0 {
        return Err(domain("deadline", format!("must be > 0, got {d}")));
    }
    Ok(())
}

/// Bandwidth design rule for a common path-loss exponent:
/// `W ≥ B / (d log₂(1 + ζ(α)/(1 − p)^{α/2}))`.
///
/// It follows from a lower bound on `Z`, so it is a necessary condition:
/// the actual outage at this bandwidth is at least `target_pe`.
pub fn min_bandwidth(alpha: f64, packet_bits: f64, d: f64, target_pe: f64) -> Result<f64> {
    ensure_positive("packet size", packet_bits)?;
    ensure_positive("deadline", d)?;
    ensure_probability_open("target outage", target_pe)?;
    let z = zeta(alpha)?;
    let inflate = (-alpha / 2.0 * (-target_pe).ln_1p()).exp();
    Ok(packet_bits * LN_2 / (d * (z * inflate).ln_1p()))
}

/// Exact bandwidth at which deterministic arrivals with rate `eta` reach
/// `target_pe` under a common exponent `alpha`: solves
/// `Z(β*, α) = p/(1 − p)` and sets `β(min(d, 1/η)) = β*`.
pub fn min_bandwidth_deterministic(
    alpha: f64,
    packet_bits: f64,
    d: f64,
    eta: f64,
    target_pe: f64,
) -> Result<f64> {
    ensure_positive("packet size", packet_bits)?;
    ensure_positive("deadline", d)?;
    ensure_positive("arrival rate", eta)?;
    ensure_probability_open("target outage", target_pe)?;
    let ln_target = target_pe.ln() - (-target_pe).ln_1p();
    let slot = ErrorSlot::default();
    let f = |s: f64| slot.take_value(z_function(s.exp(), alpha)).ln() - ln_target;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(lo) > 0.0 && lo > -700.0 {
        lo *= 2.0;
    }
    while f(hi) < 0.0 && hi < 700.0 {
        hi *= 2.0;
    }
    let r = find_root(&f, lo, hi, &RootSpec::default());
    let s = slot.finish(r)?;
    let horizon = d.min(1.0 / eta);
    Ok(packet_bits / (horizon * s.exp().ln_1p() / LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sir::{EqualAlphaSir, HcnConfig, TierParams, TierSir};

    fn w50k() -> WirelessConfig {
        WirelessConfig::new(50_000.0, 30.0).unwrap()
    }

    fn table1(k: usize) -> HcnConfig {
        HcnConfig::new(
            vec![
                TierParams::new(5e-7, 40.0, 3.0, 1.0).unwrap(),
                TierParams::new(5e-6, 1.0, 3.5, 1.0).unwrap(),
                TierParams::new(5e-5, 0.2, 4.0, crate::sir::wall_loss_from_db(5.0)).unwrap(),
            ],
            k,
        )
        .unwrap()
    }

    #[test]
    fn beta_examples() {
        let w = w50k();
        assert!((w.beta_of_deadline(0.001).unwrap() - (2f64.powf(0.6) - 1.0)).abs() < 1e-14);
        assert!((w.beta_of_deadline(0.001).unwrap() - 0.5157).abs() < 1e-4);
        assert!((w.beta_of_deadline(30.0 / 50_000.0).unwrap() - 1.0).abs() < 1e-14);
        let tiny = w.beta_of_deadline(1e9).unwrap();
        assert!((tiny - 30.0 * LN_2 / 5e13).abs() < 1e-25);
        assert!(w.beta_of_deadline(0.0).is_err());
    }

    #[test]
    fn deterministic_equal_alpha_example() {
        let sir = EqualAlphaSir::new(4.0).unwrap();
        let det = ArrivalModel::deterministic(100.0).unwrap();
        let beta = 2f64.powf(0.2) - 1.0;
        let z = beta.sqrt() * beta.sqrt().atan();
        let want = 1.0 - 1.0 / (1.0 + z);
        let got = outage(&sir, &w50k(), &det, 0.003).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.124_28).abs() < 1e-5);
        let (lo, hi) = outage_bounds(&sir, &w50k(), &det, 0.003).unwrap();
        assert!((lo - got).abs() < 1e-15 && hi >= got);
    }

    #[test]
    fn slow_poisson_reduces_to_deadline_term() {
        let sir = TierSir::new(&table1(1), 1).unwrap();
        let slow = ArrivalModel::poisson(1e-9).unwrap();
        let got = outage(&sir, &w50k(), &slow, 0.003).unwrap();
        let want = sir.cdf(w50k().beta_of_deadline(0.003).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-8);
        let (lo, hi) = outage_bounds(&sir, &w50k(), &slow, 0.003).unwrap();
        assert!((lo - want).abs() < 1e-8 && (hi - want).abs() < 1e-8);
    }

    #[test]
    fn poisson_matches_explicit_exponential_form() {
        let sir = TierSir::new(&table1(0), 0).unwrap();
        let (eta, d) = (100.0, 0.003);
        let poi = ArrivalModel::poisson(eta).unwrap();
        let w = w50k();
        let direct = crate::numerics::integrate(
            |x: f64| sir.cdf(w.beta_unchecked(x)).unwrap() * eta * (-eta * x).exp(),
            0.0,
            d,
            &QuadratureSpec::tight(),
        )
        .unwrap();
        let want = (-eta * d).exp() * sir.cdf(w.beta_unchecked(d)).unwrap() + direct;
        assert!((outage(&sir, &w, &poi, d).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn large_shape_approaches_deterministic() {
        let sir = EqualAlphaSir::new(3.5).unwrap();
        let w = w50k();
        let det = ArrivalModel::deterministic(100.0).unwrap();
        let g = ArrivalModel::gamma(100.0, 1024.0).unwrap();
        for d in [0.001, 0.003, 0.006, 0.012, 0.03] {
            let diff =
                (outage(&sir, &w, &g, d).unwrap() - outage(&sir, &w, &det, d).unwrap()).abs();
            assert!(diff < 5e-3, "d={d}: {diff}");
        }
    }

    #[test]
    fn sandwich_on_table1() {
        let w = w50k();
        for k in 0..3 {
            let sir = TierSir::new(&table1(k), k).unwrap();
            for eta in [10.0, 100.0, 1000.0] {
                for a in [
                    ArrivalModel::poisson(eta).unwrap(),
                    ArrivalModel::gamma(eta, 4.0).unwrap(),
                ] {
                    let d = 0.3 / eta;
                    let pe = outage(&sir, &w, &a, d).unwrap();
                    let (lo, hi) = outage_bounds(&sir, &w, &a, d).unwrap();
                    assert!(
                        lo <= pe + 1e-9 && pe <= hi + 1e-9,
                        "k={k} η={eta}: {lo} {pe} {hi}"
                    );
                }
            }
        }
    }

    #[test]
    fn min_bandwidth_example() {
        let w = min_bandwidth(4.0, 30.0, 0.001, 0.1).unwrap();
        let z = (std::f64::consts::PI / 2.0).powi(-2);
        let want = 30.0 / (0.001 * (1.0 + z / 0.81).log2());
        assert!((w - want).abs() < 1e-8 * want);
        assert!((w - 51_255.7).abs() < 0.1);
        assert!(min_bandwidth(4.0, 30.0, 0.001, 1.0 - 1e-12).unwrap() < 1e3);
        assert!(min_bandwidth(4.0, 30.0, 0.001, 1.5).is_err());
        assert!(min_bandwidth(2.0, 30.0, 0.001, 0.1).is_err());
    }

    #[test]
    fn design_rule_is_necessary() {
        let sir = EqualAlphaSir::new(4.0).unwrap();
        let det = ArrivalModel::deterministic(1000.0).unwrap();
        let w = min_bandwidth(4.0, 30.0, 0.001, 0.1).unwrap();
        let pe = outage(&sir, &WirelessConfig::new(w, 30.0).unwrap(), &det, 0.001).unwrap();
        assert!(pe >= 0.1);
        assert!((pe - 0.3034).abs() < 1e-3, "{pe}");
    }

    #[test]
    fn exact_bandwidth_round_trip() {
        let sir = EqualAlphaSir::new(3.5).unwrap();
        for (d, eta, p) in [
            (0.001, 1000.0, 0.1),
            (0.003, 100.0, 0.01),
            (0.02, 100.0, 0.3),
        ] {
            let w = min_bandwidth_deterministic(3.5, 30.0, d, eta, p).unwrap();
            let det = ArrivalModel::deterministic(eta).unwrap();
            let pe = outage(&sir, &WirelessConfig::new(w, 30.0).unwrap(), &det, d).unwrap();
            assert!(((pe - p) / p).abs() < 1e-8, "{pe} vs {p}");
            assert!(w > min_bandwidth(3.5, 30.0, d.min(1.0 / eta), p).unwrap());
        }
    }
}
