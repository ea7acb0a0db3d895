//! Backhaul signaling over `N` tandem exponential servers.
//!
//! The end-to-end delay `D = Σ D_i` with `D_i ~ Exp(μ_i/B)` is
//! hypoexponential for pairwise distinct rates and Erlang for equal rates.
//! Mixed near-equal clusters have no stable representation and are rejected.

mod design;

pub use design::{min_server_rate, BindingBound, ServerRateDesign};

use serde::{Deserialize, Serialize};

use crate::arrivals::{ArrivalModel, ArrivalShape};
use crate::error::{domain, ensure_positive, Error, Result};
use crate::numerics::{incomplete_gamma, integrate_with_breakpoints, ln_gamma, QuadratureSpec};

/// Relative gap below which two server rates count as equal.
pub const RATE_EQUALITY_TOL: f64 = 1e-9;

/// How the server rates are spread, which selects the delay representation.
#[derive(Debug, Clone, PartialEq)]
pub enum RateProfile {
    /// Erlang delay: `n` servers at common service rate `rate` (1/s).
    Equal { n: usize, rate: f64 },
    /// Hypoexponential delay with its expansion coefficients.
    Distinct {
        rates: Vec<f64>,
        coefficients: Vec<f64>,
    },
}

/// `N` tandem servers with overhead bit rates `μ_i` carrying `B`-bit packets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBackhaul")]
pub struct BackhaulConfig {
    rates_mu: Vec<f64>,
    packet_bits: f64,
    #[serde(skip_serializing)]
    profile: RateProfile,
}

#[derive(Deserialize)]
struct RawBackhaul {
    rates_mu: Vec<f64>,
    packet_bits: f64,
}

impl TryFrom<RawBackhaul> for BackhaulConfig {
    type Error = Error;

    fn try_from(raw: RawBackhaul) -> Result<Self> {
        BackhaulConfig::new(raw.rates_mu, raw.packet_bits)
    }
}

impl BackhaulConfig {
    pub fn new(rates_mu: Vec<f64>, packet_bits: f64) -> Result<Self> {
        ensure_positive("packet size", packet_bits)?;
        if rates_mu.is_empty() {
            return Err(domain("backhaul", "need at least one server"));
        }
        for &mu in &rates_mu {
            ensure_positive("server rate", mu)?;
        }
        let profile = classify(&rates_mu, packet_bits)?;
        Ok(Self {
            rates_mu,
            packet_bits,
            profile,
        })
    }

    /// `n` servers sharing the bit rate `mu_bar`.
    pub fn equal(n: usize, mu_bar: f64, packet_bits: f64) -> Result<Self> {
        Self::new(vec![mu_bar; n], packet_bits)
    }

    /// Servers whose overhead rates are what each scheduling policy leaves.
    pub fn from_policies(policies: &[SchedulingPolicy], packet_bits: f64) -> Result<Self> {
        let rates = policies
            .iter()
            .map(SchedulingPolicy::effective_rate)
            .collect::<Result<_>>()?;
        Self::new(rates, packet_bits)
    }

    pub fn rates_mu(&self) -> &[f64] {
        &self.rates_mu
    }

    pub fn packet_bits(&self) -> f64 {
        self.packet_bits
    }

    pub fn servers(&self) -> usize {
        self.rates_mu.len()
    }

    pub fn profile(&self) -> &RateProfile {
        &self.profile
    }

    /// Per-server service rates `μ_i/B` in packets per second.
    pub fn service_rates(&self) -> Vec<f64> {
        self.rates_mu
            .iter()
            .map(|mu| mu / self.packet_bits)
            .collect()
    }

    /// `E[D] = Σ B/μ_i`.
    pub fn mean_delay(&self) -> f64 {
        self.rates_mu.iter().map(|mu| self.packet_bits / mu).sum()
    }

    /// Same servers with every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ensure_positive("rate scale", factor)?;
        Self::new(
            self.rates_mu.iter().map(|mu| mu * factor).collect(),
            self.packet_bits,
        )
    }

    /// `P(D ≤ d)`.
    pub fn delay_cdf(&self, d: f64) -> Result<f64> {
        check_time(d)?;
        Ok(self.profile.cdf(d))
    }

    /// `P(D > d)`.
    pub fn delay_survival(&self, d: f64) -> Result<f64> {
        check_time(d)?;
        Ok(self.profile.survival(d))
    }

    /// Outage `1 − P(D ≤ T, D ≤ d)` for the given arrival process.
    pub fn outage(&self, arrivals: &ArrivalModel, d: f64) -> Result<f64> {
        check_deadline(d)?;
        let eta = arrivals.rate();
        let pe = match arrivals.shape() {
            ArrivalShape::Deterministic => self.profile.survival(d.min(1.0 / eta)),
            ArrivalShape::Poisson => poisson_outage(&self.profile, eta, d),
            ArrivalShape::Gamma(m) => gamma_outage(&self.profile, m, eta, d)?,
        };
        Ok(pe.clamp(0.0, 1.0))
    }

    /// The two outage lower bounds: deadline-only and interarrival-only.
    pub fn outage_lower_bounds(&self, arrivals: &ArrivalModel, d: f64) -> Result<(f64, f64)> {
        check_deadline(d)?;
        let eta = arrivals.rate();
        let deadline_only = self.profile.survival(d);
        let arrival_only = match arrivals.shape() {
            ArrivalShape::Deterministic => self.profile.survival(1.0 / eta),
            ArrivalShape::Poisson => -self.profile.ln_laplace(eta).exp_m1(),
            ArrivalShape::Gamma(m) => prob_interarrival_first(&self.profile, m, eta)?,
        };
        Ok((deadline_only.clamp(0.0, 1.0), arrival_only.clamp(0.0, 1.0)))
    }

    /// Larger of the two lower bounds; tight for deterministic arrivals.
    pub fn outage_lower_bound(&self, arrivals: &ArrivalModel, d: f64) -> Result<f64> {
        let (a, b) = self.outage_lower_bounds(arrivals, d)?;
        Ok(a.max(b))
    }

    /// Constant-delay model: outage 0 iff `Σ B/μ_i ≤ min(d, 1/η)`.
    ///
    /// The comparison allows one part in 10¹² so that a deadline computed as
    /// `ρ/η` lands on the step exactly where the arithmetic says it should.
    pub fn legacy_outage(&self, eta: f64, d: f64) -> Result<f64> {
        ensure_positive("arrival rate", eta)?;
        check_deadline(d)?;
        let budget = d.min(1.0 / eta);
        Ok(if self.mean_delay() <= budget * (1.0 + 1e-12) {
            0.0
        } else {
            1.0
        })
    }
}

/// `a_i = ∏_{j≠i} μ_j/(μ_j − μ_i)` for pairwise distinct rates.
pub fn hypoexp_coefficients(config: &BackhaulConfig) -> Result<Vec<f64>> {
    match &config.profile {
        RateProfile::Equal { n: 1, .. } => Ok(vec![1.0]),
        RateProfile::Equal { .. } => Err(Error::UseErlangPath),
        RateProfile::Distinct { coefficients, .. } => Ok(coefficients.clone()),
    }
}

fn coefficients(rates: &[f64]) -> Vec<f64> {
    rates
        .iter()
        .enumerate()
        .map(|(i, &ri)| {
            rates
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &rj)| rj / (rj - ri))
                .product()
        })
        .collect()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

fn classify(rates_mu: &[f64], packet_bits: f64) -> Result<RateProfile> {
    let n = rates_mu.len();
    let lo = rates_mu.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rates_mu.iter().copied().fold(0.0, f64::max);
    if relative_gap(lo, hi) < RATE_EQUALITY_TOL {
        let mean = rates_mu.iter().sum::<f64>() / n as f64;
        return Ok(RateProfile::Equal {
            n,
            rate: mean / packet_bits,
        });
    }
    let mut sorted = rates_mu.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted
        .windows(2)
        .any(|w| relative_gap(w[0], w[1]) < RATE_EQUALITY_TOL)
    {
        return Err(Error::DegenerateRates(rates_mu.to_vec()));
    }
    let rates: Vec<f64> = rates_mu.iter().map(|mu| mu / packet_bits).collect();
    let coefficients = coefficients(&rates);
    Ok(RateProfile::Distinct {
        rates,
        coefficients,
    })
}

impl RateProfile {
    pub fn servers(&self) -> usize {
        match self {
            Self::Equal { n, .. } => *n,
            Self::Distinct { rates, .. } => rates.len(),
        }
    }

    fn cdf(&self, d: f64) -> f64 {
        match self {
            Self::Equal { n, rate } => incomplete_gamma(*n as f64, rate * d).lower(),
            Self::Distinct {
                rates,
                coefficients,
            } => {
                let v: f64 = rates
                    .iter()
                    .zip(coefficients)
                    .map(|(c, a)| -a * (-c * d).exp_m1())
                    .sum();
                v.clamp(0.0, 1.0)
            }
        }
    }

    fn survival(&self, d: f64) -> f64 {
        match self {
            Self::Equal { n, rate } => incomplete_gamma(*n as f64, rate * d).upper(),
            Self::Distinct {
                rates,
                coefficients,
            } => {
                let v: f64 = rates
                    .iter()
                    .zip(coefficients)
                    .map(|(c, a)| a * (-c * d).exp())
                    .sum();
                v.clamp(0.0, 1.0)
            }
        }
    }

    /// `ln E[e^{−sD}] = Σ ln(c_i/(c_i + s))`.
    fn ln_laplace(&self, s: f64) -> f64 {
        match self {
            Self::Equal { n, rate } => -(*n as f64) * (s / rate).ln_1p(),
            Self::Distinct { rates, .. } => rates.iter().map(|c| -(s / c).ln_1p()).sum(),
        }
    }

    /// The same delay law with every service rate increased by `s`.
    fn shifted(&self, s: f64) -> Self {
        match self {
            Self::Equal { n, rate } => Self::Equal {
                n: *n,
                rate: rate + s,
            },
            Self::Distinct { rates, .. } => {
                let rates: Vec<f64> = rates.iter().map(|c| c + s).collect();
                let coefficients = coefficients(&rates);
                Self::Distinct {
                    rates,
                    coefficients,
                }
            }
        }
    }

    /// Erlang density, for the quadrature paths.
    fn erlang_density(n: usize, rate: f64) -> impl Fn(f64) -> f64 {
        let k = n as f64;
        let ln_norm = k * rate.ln() - ln_gamma(k);
        move |x: f64| {
            if x <= 0.0 {
                if n == 1 {
                    rate
                } else {
                    0.0
                }
            } else {
                (ln_norm + (k - 1.0) * x.ln() - rate * x).exp()
            }
        }
    }
}

fn poisson_outage(profile: &RateProfile, eta: f64, d: f64) -> f64 {
    1.0 - profile.ln_laplace(eta).exp() * profile.shifted(eta).cdf(d)
}

/// `(r/(r + c))^M` evaluated as `exp(−M·ln(1 + c/r))`.
fn ratio_pow(r: f64, c: f64, m: f64) -> f64 {
    (-m * (c / r).ln_1p()).exp()
}

fn gamma_outage(profile: &RateProfile, m: f64, eta: f64, d: f64) -> Result<f64> {
    let r = m * eta;
    match profile {
        RateProfile::Distinct {
            rates,
            coefficients,
        } => {
            let tail = incomplete_gamma(m, r * d).upper();
            Ok(rates
                .iter()
                .zip(coefficients)
                .map(|(&c, &a)| {
                    a * (tail * (-c * d).exp()
                        + ratio_pow(r, c, m) * incomplete_gamma(m, (r + c) * d).lower())
                })
                .sum())
        }
        RateProfile::Equal { n, rate } => {
            // P(D > d) + ∫₀^d P(T < x) f_D(x) dx
            let density = RateProfile::erlang_density(*n, *rate);
            let integrand = |x: f64| incomplete_gamma(m, r * x).lower() * density(x);
            let mut points = vec![0.0, d];
            for p in [1.0 / eta, (*n as f64 - 1.0) / rate] {
                if p > 0.0 && p < d {
                    points.push(p);
                }
            }
            points.sort_by(f64::total_cmp);
            let body = integrate_with_breakpoints(integrand, &points, &QuadratureSpec::tight())?;
            Ok(profile.survival(d) + body)
        }
    }
}

/// `P(T < D)`.
fn prob_interarrival_first(profile: &RateProfile, m: f64, eta: f64) -> Result<f64> {
    let r = m * eta;
    match profile {
        RateProfile::Distinct {
            rates,
            coefficients,
        } => Ok(rates
            .iter()
            .zip(coefficients)
            .map(|(&c, &a)| a * ratio_pow(r, c, m))
            .sum()),
        RateProfile::Equal { n, rate } => {
            let density = RateProfile::erlang_density(*n, *rate);
            let integrand = |x: f64| incomplete_gamma(m, r * x).lower() * density(x);
            let mut points = vec![0.0, 1.0 / eta, (*n as f64 - 1.0) / rate];
            points.sort_by(f64::total_cmp);
            points.dedup();
            points.push(f64::INFINITY);
            integrate_with_breakpoints(integrand, &points, &QuadratureSpec::tight())
        }
    }
}

fn check_time(d: f64) -> Result<()> {
    if d.is_nan() || d < 0.0 {
        return Err(domain("delay", format!("must be >= 0, got {d}")));
    }
    Ok(())
}

fn check_deadline(d: f64) -> Result<()> {
    if d.is_nan() || d <= 0.0 {
        return Err(domain("deadline", format!("must be > 0, got {d}")));
    }
    Ok(())
}

/// How a server splits its capacity between overhead and other traffic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Overhead preempts everything else.
    Preemptive,
    /// Real-time traffic at `real_time_rate` bits/s is served first.
    HighPriority { real_time_rate: f64 },
    /// Data traffic at `data_rate` bits/s shares the server equally.
    EqualPriority { data_rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulingPolicy {
    pub kind: PolicyKind,
    /// Server capacity in bits/s.
    pub total_rate: f64,
}

impl SchedulingPolicy {
    /// Bit rate left for overhead packets.
    pub fn effective_rate(&self) -> Result<f64> {
        let cross = match self.kind {
            PolicyKind::Preemptive => 0.0,
            PolicyKind::HighPriority { real_time_rate } => real_time_rate,
            PolicyKind::EqualPriority { data_rate } => data_rate,
        };
        let residual = self.total_rate - cross;
        if residual > 0.0 && residual.is_finite() && cross >= 0.0 {
            Ok(residual)
        } else {
            Err(Error::InfeasiblePolicy {
                residual_bps: residual,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(rate_per_s: f64) -> BackhaulConfig {
        BackhaulConfig::equal(1, rate_per_s * 30.0, 30.0).unwrap()
    }

    #[test]
    fn policies() {
        let p = SchedulingPolicy {
            kind: PolicyKind::Preemptive,
            total_rate: 1e6,
        };
        assert_eq!(p.effective_rate().unwrap(), 1e6);
        let p = SchedulingPolicy {
            kind: PolicyKind::HighPriority {
                real_time_rate: 2e5,
            },
            total_rate: 1e6,
        };
        assert_eq!(p.effective_rate().unwrap(), 8e5);
        let p = SchedulingPolicy {
            kind: PolicyKind::EqualPriority { data_rate: 1e5 },
            total_rate: 1e5,
        };
        assert!(matches!(
            p.effective_rate(),
            Err(Error::InfeasiblePolicy { .. })
        ));
    }

    #[test]
    fn coefficient_examples() {
        let c = BackhaulConfig::new(vec![2.0, 1.0], 1.0).unwrap();
        assert_eq!(hypoexp_coefficients(&c).unwrap(), vec![-1.0, 2.0]);
        let c = BackhaulConfig::new(vec![3.0, 2.0, 1.0], 1.0).unwrap();
        let a = hypoexp_coefficients(&c).unwrap();
        for (x, y) in a.iter().zip([1.0, -3.0, 3.0]) {
            assert!((x - y).abs() < 1e-14, "{a:?}");
        }
        let c = BackhaulConfig::new(vec![5.0], 1.0).unwrap();
        assert_eq!(hypoexp_coefficients(&c).unwrap(), vec![1.0]);
        let c = BackhaulConfig::equal(3, 5.0, 1.0).unwrap();
        assert_eq!(hypoexp_coefficients(&c), Err(Error::UseErlangPath));
    }

    #[test]
    fn classification() {
        assert!(matches!(
            BackhaulConfig::new(vec![1.0, 1.0 + 1e-12], 1.0)
                .unwrap()
                .profile(),
            RateProfile::Equal { n: 2, .. }
        ));
        assert!(matches!(
            BackhaulConfig::new(vec![1.0, 1.0 + 1e-12, 2.0], 1.0),
            Err(Error::DegenerateRates(_))
        ));
        assert!(BackhaulConfig::new(vec![], 1.0).is_err());
        assert!(BackhaulConfig::new(vec![1.0, -1.0], 1.0).is_err());
        assert!(BackhaulConfig::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn delay_cdf_examples() {
        let c = single(1000.0);
        assert!((c.delay_cdf(0.001).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-14);
        assert_eq!(c.delay_cdf(0.0).unwrap(), 0.0);
        let c = BackhaulConfig::equal(22, 30_000.0, 30.0).unwrap();
        assert!((c.delay_cdf(0.03).unwrap() - 0.945_556_595_8).abs() < 1e-9);
        let c = BackhaulConfig::new(vec![3.0, 2.0, 1.0], 1.0).unwrap();
        assert_eq!(c.delay_cdf(0.0).unwrap(), 0.0);
        assert!(c.delay_cdf(-1.0).is_err());
    }

    #[test]
    fn outage_examples() {
        let c = single(1000.0);
        let det = ArrivalModel::deterministic(100.0).unwrap();
        assert!((c.outage(&det, 0.003).unwrap() - (-3f64).exp()).abs() < 1e-14);
        let poi = ArrivalModel::poisson(100.0).unwrap();
        let oracle = 1.0 - (1000.0 / 1100.0) * (1.0 - (-3.3f64).exp());
        assert!((c.outage(&poi, 0.003).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 0.1244).abs() < 1e-4);
        assert!(c.outage(&poi, 0.0).is_err());
    }

    #[test]
    fn gamma_one_matches_poisson_for_distinct_rates() {
        let c = BackhaulConfig::new(vec![30_000.0, 45_000.0, 90_000.0], 30.0).unwrap();
        let poi = ArrivalModel::poisson(80.0).unwrap();
        // Bypass the Gamma(1) normalization to exercise the general formula.
        let direct = gamma_outage(c.profile(), 1.0, 80.0, 0.004).unwrap();
        assert!((direct - c.outage(&poi, 0.004).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn gamma_one_matches_poisson_for_equal_rates() {
        let c = BackhaulConfig::equal(5, 30_000.0, 30.0).unwrap();
        let poi = ArrivalModel::poisson(80.0).unwrap();
        let direct = gamma_outage(c.profile(), 1.0, 80.0, 0.004).unwrap();
        assert!((direct - c.outage(&poi, 0.004).unwrap()).abs() < 1e-10);
    }

    /// `1 − Σ_{k<M} C(k+N−1, N−1) p^k (1−p)^N P(k+N, (r+c)d)`, `p = r/(r+c)`:
    /// condition on how many Exp(r) phases of `T` finish before `D`.
    fn negative_binomial_oracle(n: usize, c: f64, m: usize, eta: f64, d: f64) -> f64 {
        let r = m as f64 * eta;
        let p = r / (r + c);
        let mut success = 0.0;
        for k in 0..m {
            let ln_binom =
                ln_gamma((k + n) as f64) - ln_gamma((n) as f64) - ln_gamma((k + 1) as f64);
            let weight = (ln_binom + k as f64 * p.ln() + n as f64 * (1.0 - p).ln()).exp();
            success += weight * incomplete_gamma((k + n) as f64, (r + c) * d).lower();
        }
        1.0 - success
    }

    #[test]
    fn equal_rate_gamma_quadrature_matches_oracle() {
        for (n, m, eta) in [(3, 4, 10.0), (22, 4, 100.0), (1, 2, 50.0), (5, 8, 200.0)] {
            let c = BackhaulConfig::equal(n, 30_000.0, 30.0).unwrap();
            let d = 0.3 / eta;
            let a = ArrivalModel::gamma(eta, m as f64).unwrap();
            let got = c.outage(&a, d).unwrap();
            let want = negative_binomial_oracle(n, 1000.0, m, eta, d);
            assert!((got - want).abs() < 1e-10, "N={n} M={m}: {got} vs {want}");
            let lb = prob_interarrival_first(c.profile(), m as f64, eta).unwrap();
            let want_lb = negative_binomial_oracle(n, 1000.0, m, eta, 1e6);
            assert!(
                (lb - want_lb).abs() < 1e-10,
                "N={n} M={m}: {lb} vs {want_lb}"
            );
        }
    }

    #[test]
    fn distinct_rate_gamma_matches_quadrature() {
        let c = BackhaulConfig::new(vec![20_000.0, 30_000.0, 60_000.0], 30.0).unwrap();
        let (eta, m, d) = (60.0, 3.0, 0.004);
        let a = ArrivalModel::gamma(eta, m).unwrap();
        let RateProfile::Distinct {
            rates,
            coefficients,
        } = c.profile()
        else {
            unreachable!()
        };
        let f = |x: f64| {
            let density: f64 = rates
                .iter()
                .zip(coefficients)
                .map(|(c, a)| a * c * (-c * x).exp())
                .sum();
            incomplete_gamma(m, m * eta * x).upper() * density
        };
        let success = crate::numerics::integrate(f, 0.0, d, &QuadratureSpec::tight()).unwrap();
        assert!((c.outage(&a, d).unwrap() - (1.0 - success)).abs() < 1e-10);
    }

    #[test]
    fn deterministic_is_tight_lower_bound() {
        let c = BackhaulConfig::equal(3, 30_000.0, 30.0).unwrap();
        let det = ArrivalModel::deterministic(100.0).unwrap();
        for d in [0.001, 0.003, 0.01, 0.05] {
            let pe = c.outage(&det, d).unwrap();
            assert!((pe - c.outage_lower_bound(&det, d).unwrap()).abs() < 1e-12);
        }
        let c = single(1000.0);
        assert!((c.outage_lower_bound(&det, 0.003).unwrap() - 0.0498).abs() < 1e-4);
    }

    #[test]
    fn lower_bound_limits() {
        let c = BackhaulConfig::new(vec![30_000.0, 45_000.0], 30.0).unwrap();
        let slow = ArrivalModel::gamma(1e-9, 3.0).unwrap();
        let lb = c.outage_lower_bound(&slow, 0.002).unwrap();
        assert!((lb - c.delay_survival(0.002).unwrap()).abs() < 1e-12);
        let a = ArrivalModel::gamma(100.0, 3.0).unwrap();
        let (_, arrival_only) = c.outage_lower_bounds(&a, 1e9).unwrap();
        assert!((c.outage_lower_bound(&a, 1e9).unwrap() - arrival_only).abs() < 1e-15);
        assert!((c.outage(&a, 1e9).unwrap() - arrival_only).abs() < 1e-12);
    }

    #[test]
    fn legacy_examples() {
        let c = single(1000.0);
        assert_eq!(c.legacy_outage(100.0, 0.001).unwrap(), 0.0);
        assert_eq!(c.legacy_outage(100.0, 0.0005).unwrap(), 1.0);
        assert_eq!(c.legacy_outage(300.0, 0.3 / 300.0).unwrap(), 0.0);
        assert_eq!(c.legacy_outage(300.5, 0.3 / 300.5).unwrap(), 1.0);
        assert_eq!(c.legacy_outage(299.5, 0.3 / 299.5).unwrap(), 0.0);
    }

    #[test]
    fn large_shape_approaches_deterministic() {
        let c = BackhaulConfig::new(vec![30_000.0, 45_000.0, 60_000.0], 30.0).unwrap();
        let g = ArrivalModel::gamma(100.0, 1024.0).unwrap();
        let det = ArrivalModel::deterministic(100.0).unwrap();
        for d in [0.001, 0.003, 0.005, 0.008, 0.012, 0.02, 0.05] {
            if (d * 100.0 - 1.0f64).abs() > 0.1 {
                let diff = (c.outage(&g, d).unwrap() - c.outage(&det, d).unwrap()).abs();
                assert!(diff < 5e-3, "d={d}: {diff}");
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let c = BackhaulConfig::new(vec![30_000.0, 45_000.0], 30.0).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"rates_mu":[30000.0,45000.0],"packet_bits":30.0}"#);
        assert_eq!(serde_json::from_str::<BackhaulConfig>(&json).unwrap(), c);
    }
}
