//! Monte Carlo estimators for the analytic engines.
//!
//! Work is split into fixed batches; batch `i` draws from a ChaCha8 stream
//! seeded by `(seed, i)`, so results depend on the seed and settings only,
//! never on the number of worker threads.
//!
//! PPP fields are generated per tier as ordered distances from the receiver
//! (`r_n² = (E_1 + … + E_n)/(πλ)`) inside a disc of radius
//! `field_radius_factor/√λ_j`; interference beyond the disc is replaced by
//! its mean.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrivals::ArrivalModel;
use crate::backhaul::BackhaulConfig;
use crate::error::{domain, Error, Result};
use crate::numerics::normal_two_sided_quantile;
use crate::sir::HcnConfig;
use crate::wireless::WirelessConfig;

const BATCH: u64 = 10_000;
/// Acceptance rate below which conditioned sampling gives up.
const MIN_ACCEPTANCE: f64 = 1e-3;
const MAX_DOUBLINGS: u32 = 3;

/// Sample count, seed and reporting options for every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSettings")]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    /// Two-sided confidence level of the reported interval.
    pub confidence: f64,
    /// PPP window radius in units of each tier's `1/√λ`.
    pub field_radius_factor: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSettings {
    samples: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_confidence")]
    confidence: f64,
    #[serde(default = "default_factor")]
    field_radius_factor: f64,
}

fn default_confidence() -> f64 {
    0.99
}

fn default_factor() -> f64 {
    15.0
}

impl TryFrom<RawSettings> for McSettings {
    type Error = Error;

    fn try_from(r: RawSettings) -> Result<Self> {
        McSettings::new(r.samples, r.seed, r.confidence, r.field_radius_factor)
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            confidence: default_confidence(),
            field_radius_factor: default_factor(),
        }
    }
}

impl McSettings {
    pub fn new(samples: u64, seed: u64, confidence: f64, field_radius_factor: f64) -> Result<Self> {
        let s = Self {
            samples,
            seed,
            confidence,
            field_radius_factor,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_samples(samples: u64, seed: u64) -> Result<Self> {
        Self::new(samples, seed, default_confidence(), default_factor())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1_000 {
            return Err(domain(
                "samples",
                format!("need at least 1000, got {}", self.samples),
            ));
        }
        if !(self.confidence > 0.5 && self.confidence < 1.0) {
            return Err(domain(
                "confidence",
                format!("must lie in (0.5, 1), got {}", self.confidence),
            ));
        }
        if !(self.field_radius_factor.is_finite() && self.field_radius_factor > 0.0) {
            return Err(domain(
                "field radius factor",
                format!("must be > 0, got {}", self.field_radius_factor),
            ));
        }
        Ok(())
    }
}

/// Sample mean with its standard error and normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl McEstimate {
    /// Binomial proportion `hits/n` with a normal interval.
    pub fn from_counts(hits: u64, n: u64, confidence: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Infeasible(
                "no Monte Carlo samples were accepted".into(),
            ));
        }
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let z = normal_two_sided_quantile(confidence)?;
        // The normal interval collapses to a point at 0 or n hits; use the
        // exact one-sided Clopper-Pearson limit there.
        let edge = ((1.0 - confidence) / 2.0).powf(1.0 / n as f64);
        let (ci_low, ci_high) = match hits {
            0 => (0.0, 1.0 - edge),
            h if h == n => (edge, 1.0),
            _ => ((p - z * se).max(0.0), (p + z * se).min(1.0)),
        };
        Ok(Self {
            mean: p,
            std_error: se,
            n,
            ci_low,
            ci_high,
        })
    }

    /// Mean of real samples from their sum and sum of squares.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64, confidence: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Infeasible(
                "need at least two Monte Carlo samples".into(),
            ));
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        let se = (var / nf).sqrt();
        let z = normal_two_sided_quantile(confidence)?;
        Ok(Self {
            mean,
            std_error: se,
            n,
            ci_low: mean - z * se,
            ci_high: mean + z * se,
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Estimate from rejection sampling, with its efficiency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionedEstimate {
    pub estimate: McEstimate,
    pub attempts: u64,
    pub acceptance_rate: f64,
    /// Set when sampling stopped early because acceptance fell below 1e-3.
    pub warning: Option<String>,
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

fn batch_sizes(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(BATCH))
        .map(|i| (i, BATCH.min(total - i * BATCH)))
        .collect()
}

/// Proportion of `samples` independent draws for which `event` is true.
pub fn estimate_probability<F>(settings: &McSettings, event: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    settings.validate()?;
    let hits: u64 = batch_sizes(settings.samples)
        .into_par_iter()
        .map(|(i, size)| {
            let mut rng = batch_rng(settings.seed, i);
            (0..size).filter(|_| event(&mut rng)).count() as u64
        })
        .sum();
    McEstimate::from_counts(hits, settings.samples, settings.confidence)
}

/// `D = Σ D_i` with `D_i ~ Exp(μ_i/B)`.
pub fn sample_backhaul_delay<R: Rng + ?Sized>(c: &BackhaulConfig, rng: &mut R) -> f64 {
    c.rates_mu()
        .iter()
        .map(|mu| exp1(rng) * c.packet_bits() / mu)
        .sum::<f64>()
}

/// Outage `P(D > min(T, d))` with `D` and `T` independent.
pub fn estimate_backhaul_outage(
    c: &BackhaulConfig,
    a: &ArrivalModel,
    d: f64,
    settings: &McSettings,
) -> Result<McEstimate> {
    let t_sampler = a.sampler();
    let scales: Vec<f64> = c.rates_mu().iter().map(|mu| c.packet_bits() / mu).collect();
    estimate_probability(settings, |rng| {
        let delay: f64 = scales.iter().map(|s| s * exp1(&mut *rng)).sum::<f64>();
        let t = t_sampler.sample(rng);
        delay > t.min(d)
    })
}

/// Empirical `P(D ≤ x)`.
pub fn estimate_delay_cdf(c: &BackhaulConfig, x: f64, settings: &McSettings) -> Result<McEstimate> {
    estimate_probability(settings, |rng| sample_backhaul_delay(c, rng) <= x)
}

/// One SIR draw: the neighbor's tier and its SIR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSample {
    pub tier: usize,
    pub sir: f64,
}

#[derive(Debug, Clone, Copy)]
struct TierField {
    pi_lambda: f64,
    power: f64,
    half_alpha: f64,
    /// Squared window radius for the base factor.
    radius2: f64,
    alpha: f64,
    lambda: f64,
}

impl TierField {
    fn received(&self, r2: f64, fading: f64) -> f64 {
        self.power * fading * (-self.half_alpha * r2.ln()).exp()
    }

    /// Squared radius and mean outside interference `2πλPL R^{2−α}/(α − 2)`
    /// for the window scaled by `scale`.
    fn window(&self, scale: f64) -> (f64, f64) {
        let r2 = self.radius2 * scale * scale;
        let tail = 2.0 * PI * self.lambda * self.power * r2.powf(1.0 - self.half_alpha)
            / (self.alpha - 2.0);
        (r2, tail)
    }
}

/// Draws receiver-centered PPP fields for a fixed network.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    tiers: Vec<TierField>,
}

impl FieldSampler {
    pub fn new(h: &HcnConfig, field_radius_factor: f64) -> Result<Self> {
        if !(field_radius_factor.is_finite() && field_radius_factor > 0.0) {
            return Err(domain(
                "field radius factor",
                format!("must be > 0, got {field_radius_factor}"),
            ));
        }
        let tiers = h
            .tiers()
            .iter()
            .map(|t| TierField {
                pi_lambda: PI * t.density_lambda,
                power: t.effective_power(),
                half_alpha: t.alpha / 2.0,
                radius2: field_radius_factor * field_radius_factor / t.density_lambda,
                alpha: t.alpha,
                lambda: t.density_lambda,
            })
            .collect();
        Ok(Self { tiers })
    }

    /// SIR at the receiver, or `None` when `want` is given and the strongest
    /// neighbor belongs to another tier. Rejection happens before the far
    /// field is drawn.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        want: Option<usize>,
    ) -> Result<Option<SirSample>> {
        // One child stream per tier: distances and fadings interleave, so a
        // larger window extends the same realization.
        let seeds: Vec<u64> = self.tiers.iter().map(|_| rng.random()).collect();
        for doubling in 0..=MAX_DOUBLINGS {
            let scale = f64::from(1u32 << doubling);
            if let Some(out) = self.sample_window(&seeds, scale, want) {
                return Ok(out);
            }
        }
        Err(Error::EmptyField {
            doublings: MAX_DOUBLINGS,
        })
    }

    /// `None` when every tier is empty inside the window.
    fn sample_window(
        &self,
        seeds: &[u64],
        scale: f64,
        want: Option<usize>,
    ) -> Option<Option<SirSample>> {
        let mut streams: Vec<ChaCha8Rng> = seeds
            .iter()
            .map(|&s| ChaCha8Rng::seed_from_u64(s))
            .collect();
        let windows: Vec<(f64, f64)> = self.tiers.iter().map(|t| t.window(scale)).collect();
        let mut nearest = Vec::with_capacity(self.tiers.len());
        let mut best: Option<(usize, f64)> = None;
        for (j, (tier, rng)) in self.tiers.iter().zip(streams.iter_mut()).enumerate() {
            let cum: f64 = exp1(rng);
            let r2 = cum / tier.pi_lambda;
            let fading: f64 = exp1(rng);
            nearest.push((cum, r2, fading));
            if r2 <= windows[j].0 {
                let long_term = tier.power * (-tier.half_alpha * r2.ln()).exp();
                if best.is_none_or(|(_, p)| long_term > p) {
                    best = Some((j, long_term));
                }
            }
        }
        let (serving, _) = best?;
        if want.is_some_and(|k| k != serving) {
            return Some(None);
        }
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (j, (tier, rng)) in self.tiers.iter().zip(streams.iter_mut()).enumerate() {
            let (limit, tail) = windows[j];
            let (mut cum, r2, fading) = nearest[j];
            if r2 > limit {
                interference += tail;
                continue;
            }
            let p = tier.received(r2, fading);
            if j == serving {
                signal = p;
            } else {
                interference += p;
            }
            loop {
                cum += exp1(&mut *rng);
                let r2 = cum / tier.pi_lambda;
                let fading: f64 = exp1(&mut *rng);
                if r2 > limit {
                    break;
                }
                interference += tier.received(r2, fading);
            }
            interference += tail;
        }
        Some(Some(SirSample {
            tier: serving,
            sir: signal / interference,
        }))
    }

    /// Tier of the strongest neighbor only.
    pub fn sample_tier<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.tiers
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let r2 = exp1(&mut *rng) / t.pi_lambda;
                (j, t.power * (-t.half_alpha * f64::ln(r2)).exp())
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j)
            .expect("at least one tier")
    }
}

/// Unconditioned SIR draw for the network.
pub fn sample_sir<R: Rng + ?Sized>(
    h: &HcnConfig,
    settings: &McSettings,
    rng: &mut R,
) -> Result<SirSample> {
    let sampler = FieldSampler::new(h, settings.field_radius_factor)?;
    Ok(sampler
        .sample(rng, None)?
        .expect("unconditioned draws are never rejected"))
}

/// Runs `event` on `settings.samples` SIR draws conditioned on the neighbor
/// being in tier `k`.
fn estimate_conditioned<F>(
    h: &HcnConfig,
    k: usize,
    settings: &McSettings,
    event: F,
) -> Result<ConditionedEstimate>
where
    F: Fn(f64, &mut ChaCha8Rng) -> bool + Sync,
{
    settings.validate()?;
    if k >= h.tiers().len() {
        return Err(domain(
            "tier index",
            format!("{k} is out of range for {} tiers", h.tiers().len()),
        ));
    }
    let sampler = FieldSampler::new(h, settings.field_radius_factor)?;
    let batches: Vec<(u64, u64, u64, bool)> = batch_sizes(settings.samples)
        .into_par_iter()
        .map(|(i, quota)| {
            let mut rng = batch_rng(settings.seed, i);
            let max_attempts = (quota as f64 / MIN_ACCEPTANCE).ceil() as u64;
            let (mut accepted, mut attempts, mut hits) = (0, 0, 0);
            while accepted < quota && attempts < max_attempts {
                attempts += 1;
                if let Some(s) = sampler.sample(&mut rng, Some(k))? {
                    accepted += 1;
                    hits += u64::from(event(s.sir, &mut rng));
                }
            }
            Ok((hits, accepted, attempts, accepted < quota))
        })
        .collect::<Result<_>>()?;
    let hits = batches.iter().map(|b| b.0).sum();
    let accepted = batches.iter().map(|b| b.1).sum();
    let attempts: u64 = batches.iter().map(|b| b.2).sum();
    let acceptance_rate = accepted as f64 / attempts as f64;
    let warning = batches.iter().any(|b| b.3).then(|| {
        format!(
            "tier {k} accepted {accepted} of {attempts} field draws (rate {acceptance_rate:.2e} < {MIN_ACCEPTANCE:e}); \
             returning partial results"
        )
    });
    Ok(ConditionedEstimate {
        estimate: McEstimate::from_counts(hits, accepted, settings.confidence)?,
        attempts,
        acceptance_rate,
        warning,
    })
}

/// Wireless outage: `D = B/(W log₂(1 + SIR)) > min(T, d)` with the SIR
/// conditioned on the neighbor tier.
pub fn estimate_wireless_outage(
    h: &HcnConfig,
    w: &WirelessConfig,
    a: &ArrivalModel,
    d: f64,
    settings: &McSettings,
) -> Result<ConditionedEstimate> {
    let t_sampler = a.sampler();
    estimate_conditioned(h, h.neighbor_tier(), settings, |sir, rng| {
        let delay = w.packet_bits() * std::f64::consts::LN_2 / (w.bandwidth_hz() * sir.ln_1p());
        delay > t_sampler.sample(rng).min(d)
    })
}

/// Empirical `P(SIR ≤ β | neighbor in tier k)`.
pub fn estimate_sir_cdf(
    h: &HcnConfig,
    k: usize,
    beta: f64,
    settings: &McSettings,
) -> Result<ConditionedEstimate> {
    estimate_conditioned(h, k, settings, |sir, _| sir <= beta)
}

/// Empirical tier-selection frequencies, one estimate per tier.
pub fn estimate_association(h: &HcnConfig, settings: &McSettings) -> Result<Vec<McEstimate>> {
    settings.validate()?;
    let sampler = FieldSampler::new(h, settings.field_radius_factor)?;
    let k = h.tiers().len();
    let counts = batch_sizes(settings.samples)
        .into_par_iter()
        .map(|(i, size)| {
            let mut rng = batch_rng(settings.seed, i);
            let mut c = vec![0u64; k];
            for _ in 0..size {
                c[sampler.sample_tier(&mut rng)] += 1;
            }
            c
        })
        .reduce(
            || vec![0; k],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    counts
        .iter()
        .map(|&c| McEstimate::from_counts(c, settings.samples, settings.confidence))
        .collect()
}

/// Empirical `E[log₂(1 + SIR) | neighbor in tier k]`.
pub fn estimate_mean_log_efficiency(
    h: &HcnConfig,
    k: usize,
    settings: &McSettings,
) -> Result<McEstimate> {
    settings.validate()?;
    let sampler = FieldSampler::new(h, settings.field_radius_factor)?;
    let parts: Vec<(f64, f64, u64)> = batch_sizes(settings.samples)
        .into_par_iter()
        .map(|(i, quota)| {
            let mut rng = batch_rng(settings.seed, i);
            let (mut sum, mut sum_sq, mut n) = (0.0, 0.0, 0);
            let max_attempts = (quota as f64 / MIN_ACCEPTANCE).ceil() as u64;
            let mut attempts = 0;
            while n < quota && attempts < max_attempts {
                attempts += 1;
                if let Some(s) = sampler.sample(&mut rng, Some(k))? {
                    let v = s.sir.ln_1p() / std::f64::consts::LN_2;
                    sum += v;
                    sum_sq += v * v;
                    n += 1;
                }
            }
            Ok((sum, sum_sq, n))
        })
        .collect::<Result<_>>()?;
    let (sum, sum_sq, n) = parts
        .iter()
        .fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    McEstimate::from_moments(sum, sum_sq, n, settings.confidence)
}
