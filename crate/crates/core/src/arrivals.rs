//! Renewal models of the overhead interarrival time `T`.
//!
//! `T ~ Gamma(M, 1/(Mη))` has mean `1/η` for every shape `M`. Shape 1 is
//! the Poisson process; the deterministic process is its own variant rather
//! than a large-`M` approximation.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_positive, Result};
use crate::numerics::{incomplete_gamma, ln_gamma};

/// Shape family of the interarrival distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalShape {
    /// Gamma interarrivals with shape `M ≥ 1`.
    Gamma(f64),
    Poisson,
    Deterministic,
}

/// Overhead arrival process: rate `η` (packets/s) and interarrival shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArrival")]
pub struct ArrivalModel {
    rate_eta: f64,
    shape: ArrivalShape,
}

#[derive(Deserialize)]
struct RawArrival {
    rate_eta: f64,
    shape: ArrivalShape,
}

impl TryFrom<RawArrival> for ArrivalModel {
    type Error = crate::Error;

    fn try_from(raw: RawArrival) -> Result<Self> {
        ArrivalModel::new(raw.rate_eta, raw.shape)
    }
}

impl ArrivalModel {
    /// Validates `η > 0` and `M ≥ 1`. `Gamma(1)` is stored as `Poisson`.
    pub fn new(rate_eta: f64, shape: ArrivalShape) -> Result<Self> {
        ensure_positive("arrival rate", rate_eta)?;
        let shape = match shape {
            ArrivalShape::Gamma(m) if !(m.is_finite() && m >= 1.0) => {
                return Err(domain(
                    "gamma shape",
                    format!("M must be finite and >= 1, got {m}"),
                ));
            }
            ArrivalShape::Gamma(1.0) => ArrivalShape::Poisson,
            other => other,
        };
        Ok(Self { rate_eta, shape })
    }

    pub fn poisson(rate_eta: f64) -> Result<Self> {
        Self::new(rate_eta, ArrivalShape::Poisson)
    }

    pub fn deterministic(rate_eta: f64) -> Result<Self> {
        Self::new(rate_eta, ArrivalShape::Deterministic)
    }

    pub fn gamma(rate_eta: f64, m: f64) -> Result<Self> {
        Self::new(rate_eta, ArrivalShape::Gamma(m))
    }

    pub fn rate(&self) -> f64 {
        self.rate_eta
    }

    pub fn shape(&self) -> ArrivalShape {
        self.shape
    }

    /// Same process with a different rate.
    pub fn with_rate(&self, rate_eta: f64) -> Result<Self> {
        Self::new(rate_eta, self.shape)
    }

    /// Gamma shape `M`: 1 for Poisson, `None` for deterministic arrivals.
    pub fn gamma_shape(&self) -> Option<f64> {
        match self.shape {
            ArrivalShape::Gamma(m) => Some(m),
            ArrivalShape::Poisson => Some(1.0),
            ArrivalShape::Deterministic => None,
        }
    }

    pub fn mean_interarrival(&self) -> f64 {
        1.0 / self.rate_eta
    }

    /// `P(T ≥ t)`.
    pub fn survival(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(domain("survival", format!("t must be >= 0, got {t}")));
        }
        Ok(self.survival_unchecked(t))
    }

    pub(crate) fn survival_unchecked(&self, t: f64) -> f64 {
        match self.shape {
            ArrivalShape::Poisson => (-self.rate_eta * t).exp(),
            ArrivalShape::Gamma(m) => incomplete_gamma(m, m * self.rate_eta * t).upper(),
            ArrivalShape::Deterministic => {
                if t <= 1.0 / self.rate_eta {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `P(T ≤ t)` with the deterministic step taken right-continuous at `1/η`.
    pub(crate) fn cdf_unchecked(&self, t: f64) -> f64 {
        match self.shape {
            ArrivalShape::Poisson => -(-self.rate_eta * t).exp_m1(),
            ArrivalShape::Gamma(m) => incomplete_gamma(m, m * self.rate_eta * t).lower(),
            ArrivalShape::Deterministic => {
                if self.rate_eta * t >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Density of `T` for the continuous shapes; `None` when deterministic.
    pub(crate) fn density(&self) -> Option<impl Fn(f64) -> f64> {
        let m = self.gamma_shape()?;
        let r = m * self.rate_eta;
        let ln_norm = m * r.ln() - ln_gamma(m);
        Some(move |t: f64| {
            if t <= 0.0 {
                if m == 1.0 {
                    r
                } else {
                    0.0
                }
            } else {
                (ln_norm + (m - 1.0) * t.ln() - r * t).exp()
            }
        })
    }

    /// Reusable sampler for many draws.
    pub fn sampler(&self) -> InterarrivalSampler {
        match self.shape {
            ArrivalShape::Poisson => {
                InterarrivalSampler::Exponential(Exp::new(self.rate_eta).expect("validated rate"))
            }
            ArrivalShape::Gamma(m) => InterarrivalSampler::Gamma(
                Gamma::new(m, 1.0 / (m * self.rate_eta)).expect("validated shape"),
            ),
            ArrivalShape::Deterministic => InterarrivalSampler::Constant(1.0 / self.rate_eta),
        }
    }

    /// One interarrival draw.
    pub fn sample_interarrival<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// Interarrival-time distribution ready for repeated sampling.
#[derive(Debug, Clone, Copy)]
pub enum InterarrivalSampler {
    Exponential(Exp<f64>),
    Gamma(Gamma<f64>),
    Constant(f64),
}

impl Distribution<f64> for InterarrivalSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential(d) => d.sample(rng),
            Self::Gamma(d) => d.sample(rng),
            Self::Constant(t) => *t,
        }
    }
}
