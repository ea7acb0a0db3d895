//! JSON run configuration and flag overrides, resolved into core types.

use std::path::Path;

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use oqc_core::scenarios::{table1_hcn, Scenario, ScenarioId};
use oqc_core::sir::wall_loss_from_db;
use oqc_core::{
    ArrivalModel, ArrivalShape, BackhaulConfig, HcnConfig, McSettings, TierParams, WirelessConfig,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hcn: Option<HcnSection>,
    pub backhaul: Option<BackhaulSection>,
    pub overhead: Option<OverheadSection>,
    pub wireless: Option<WirelessSection>,
    pub deadline: Option<DeadlineSection>,
    pub mc: Option<McSettings>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HcnSection {
    pub tiers: Vec<TierSection>,
    /// 1-based.
    #[serde(default = "one")]
    pub neighbor_tier: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSection {
    pub lambda_per_m2: f64,
    pub power_w: f64,
    pub alpha: f64,
    #[serde(default)]
    pub wall_loss_db: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BackhaulSection {
    Scenario {
        scenario: Scenario,
        #[serde(default)]
        n_cn: Option<usize>,
        #[serde(default)]
        n_ip: Option<usize>,
        mu_bar_bps: f64,
    },
    Rates {
        rates_bps: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverheadSection {
    #[serde(rename = "B_bits")]
    pub b_bits: Option<f64>,
    pub arrival: Option<ArrivalSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalSection {
    pub eta_per_s: Option<f64>,
    pub shape: Option<ArrivalShape>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WirelessSection {
    pub bandwidth_hz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum DeadlineSection {
    #[serde(rename = "seconds")]
    Seconds(f64),
    #[serde(rename = "ratio")]
    Ratio(f64),
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Parses `deterministic`, `poisson`, `gamma:M` (or `gammaM`).
pub fn parse_shape(s: &str) -> anyhow::Result<ArrivalShape> {
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "deterministic" | "det" => Ok(ArrivalShape::Deterministic),
        "poisson" => Ok(ArrivalShape::Poisson),
        other => {
            let Some(m) = other.strip_prefix("gamma") else {
                bail!("unknown arrival {s:?}; expected deterministic, poisson or gamma:M");
            };
            let m: f64 = m
                .trim_start_matches([':', '='])
                .parse()
                .with_context(|| format!("gamma shape in {s:?}"))?;
            Ok(ArrivalShape::Gamma(m))
        }
    }
}

/// Flags shared by the model-driven commands. Each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Backhaul scenario: I, II or III.
    #[arg(long)]
    pub scenario: Option<Scenario>,
    /// Core-network servers (scenarios I and III).
    #[arg(long)]
    pub n_cn: Option<usize>,
    /// IP-access servers (scenario III).
    #[arg(long)]
    pub n_ip: Option<usize>,
    /// Number of equal-rate backhaul servers; overrides the scenario.
    #[arg(long = "N")]
    pub servers: Option<usize>,
    /// Per-server rate in packets/s (μ̄/B).
    #[arg(long, conflicts_with = "mu_bar_bps")]
    pub mu_bar_pkts: Option<f64>,
    /// Per-server rate in bits/s (μ̄).
    #[arg(long)]
    pub mu_bar_bps: Option<f64>,
    /// Explicit per-server rates in bits/s, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["servers", "mu_bar_pkts", "mu_bar_bps"])]
    pub rates_bps: Option<Vec<f64>>,
    /// Overhead packet size in bits.
    #[arg(long = "B")]
    pub packet_bits: Option<f64>,
    /// Overhead arrival rate η (packets/s).
    #[arg(long)]
    pub eta: Option<f64>,
    /// deterministic, poisson or gamma:M.
    #[arg(long, value_parser = parse_shape)]
    pub arrival: Option<ArrivalShape>,
    /// Deadline in seconds.
    #[arg(long, conflicts_with = "deadline_ratio")]
    pub deadline: Option<f64>,
    /// Deadline as a fraction of the mean interarrival time 1/η.
    #[arg(long)]
    pub deadline_ratio: Option<f64>,
    /// Wireless overhead bandwidth in Hz.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Set every tier's path-loss exponent to this value.
    #[arg(long)]
    pub equal_alpha: Option<f64>,
    /// Tier of the coordinating neighbor, 1-based.
    #[arg(long)]
    pub tier: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct McArgs {
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Confidence level of the reported intervals.
    #[arg(long)]
    pub confidence: Option<f64>,
}

impl McArgs {
    pub fn resolve(&self, cfg: &RunConfig) -> anyhow::Result<McSettings> {
        let mut s = cfg.mc.unwrap_or_default();
        if let Some(n) = self.samples {
            s.samples = n;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(c) = self.confidence {
            s.confidence = c;
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Deadline {
    Seconds(f64),
    Ratio(f64),
}

/// Everything a point query needs, after defaults and overrides.
#[derive(Debug, Clone)]
pub struct Model {
    pub servers: usize,
    pub rates_bps: Vec<f64>,
    pub packet_bits: f64,
    pub eta: f64,
    pub shape: ArrivalShape,
    pub deadline: Deadline,
    pub hcn: HcnConfig,
    pub bandwidth_hz: f64,
}

impl Model {
    pub fn resolve(args: &ModelArgs, cfg: &RunConfig) -> anyhow::Result<Self> {
        let overhead = cfg.overhead.as_ref();
        let packet_bits = args
            .packet_bits
            .or(overhead.and_then(|o| o.b_bits))
            .unwrap_or(oqc_core::scenarios::PACKET_BITS);
        let arrival = overhead.and_then(|o| o.arrival.as_ref());
        let eta = args
            .eta
            .or(arrival.and_then(|a| a.eta_per_s))
            .unwrap_or(100.0);
        let shape = args
            .arrival
            .or(arrival.and_then(|a| a.shape))
            .unwrap_or(ArrivalShape::Poisson);

        let deadline = match (args.deadline, args.deadline_ratio, &cfg.deadline) {
            (Some(d), _, _) => Deadline::Seconds(d),
            (_, Some(r), _) => Deadline::Ratio(r),
            (_, _, Some(DeadlineSection::Seconds(d))) => Deadline::Seconds(*d),
            (_, _, Some(DeadlineSection::Ratio(r))) => Deadline::Ratio(*r),
            _ => Deadline::Ratio(oqc_core::scenarios::DEFAULT_DEADLINE_RATIO),
        };

        let rates_bps = match (&args.rates_bps, &cfg.backhaul) {
            (Some(r), _) => r.clone(),
            (None, Some(BackhaulSection::Rates { rates_bps }))
                if args.servers.is_none()
                    && args.scenario.is_none()
                    && args.mu_bar_bps.is_none()
                    && args.mu_bar_pkts.is_none() =>
            {
                rates_bps.clone()
            }
            _ => {
                let (mut id, mut mu_bps) = match &cfg.backhaul {
                    Some(BackhaulSection::Scenario {
                        scenario,
                        n_cn,
                        n_ip,
                        mu_bar_bps,
                    }) => {
                        let mut id = ScenarioId::new(*scenario);
                        id.n_cn = n_cn.unwrap_or(id.n_cn);
                        id.n_ip = n_ip.unwrap_or(id.n_ip);
                        (id, *mu_bar_bps)
                    }
                    _ => (ScenarioId::new(Scenario::II), 1000.0 * packet_bits),
                };
                if let Some(s) = args.scenario {
                    id.variant = s;
                }
                id.n_cn = args.n_cn.unwrap_or(id.n_cn);
                id.n_ip = args.n_ip.unwrap_or(id.n_ip);
                if let Some(p) = args.mu_bar_pkts {
                    mu_bps = p * packet_bits;
                }
                if let Some(b) = args.mu_bar_bps {
                    mu_bps = b;
                }
                vec![mu_bps; args.servers.unwrap_or(id.servers())]
            }
        };
        if rates_bps.is_empty() {
            bail!("backhaul needs at least one server");
        }

        let mut hcn = match &cfg.hcn {
            Some(section) => {
                let tiers = section
                    .tiers
                    .iter()
                    .map(|t| {
                        TierParams::new(
                            t.lambda_per_m2,
                            t.power_w,
                            t.alpha,
                            wall_loss_from_db(t.wall_loss_db),
                        )
                    })
                    .collect::<oqc_core::Result<Vec<_>>>()?;
                HcnConfig::new(tiers, zero_based(section.neighbor_tier)?)?
            }
            None => table1_hcn(0)?,
        };
        if let Some(k) = args.tier {
            hcn = hcn.with_neighbor_tier(zero_based(k)?)?;
        }
        if let Some(alpha) = args.equal_alpha {
            hcn = hcn.with_common_alpha(alpha)?;
        }
        let bandwidth_hz = args
            .bandwidth
            .or(cfg.wireless.as_ref().map(|w| w.bandwidth_hz))
            .unwrap_or(50e3);

        Ok(Self {
            servers: rates_bps.len(),
            rates_bps,
            packet_bits,
            eta,
            shape,
            deadline,
            hcn,
            bandwidth_hz,
        })
    }

    pub fn arrivals(&self) -> anyhow::Result<ArrivalModel> {
        Ok(ArrivalModel::new(self.eta, self.shape)?)
    }

    pub fn deadline_seconds(&self) -> f64 {
        match self.deadline {
            Deadline::Seconds(d) => d,
            Deadline::Ratio(r) => r / self.eta,
        }
    }

    pub fn backhaul(&self) -> anyhow::Result<BackhaulConfig> {
        Ok(BackhaulConfig::new(
            self.rates_bps.clone(),
            self.packet_bits,
        )?)
    }

    pub fn wireless(&self) -> anyhow::Result<WirelessConfig> {
        Ok(WirelessConfig::new(self.bandwidth_hz, self.packet_bits)?)
    }

    /// Common per-server rate, if all servers share one.
    pub fn common_rate_bps(&self) -> Option<f64> {
        let r = self.rates_bps[0];
        self.rates_bps.iter().all(|&x| x == r).then_some(r)
    }
}

fn zero_based(k: usize) -> anyhow::Result<usize> {
    if k == 0 {
        bail!("tier indices are 1-based");
    }
    Ok(k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_parse() {
        assert_eq!(
            parse_shape("Deterministic").unwrap(),
            ArrivalShape::Deterministic
        );
        assert_eq!(parse_shape("gamma:4").unwrap(), ArrivalShape::Gamma(4.0));
        assert_eq!(parse_shape("gamma2.5").unwrap(), ArrivalShape::Gamma(2.5));
        assert!(parse_shape("uniform").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let ok: RunConfig = serde_json::from_str(
            r#"{"backhaul":{"scenario":"III","mu_bar_bps":30000},"deadline":{"ratio":0.3},
                "overhead":{"B_bits":30,"arrival":{"eta_per_s":10,"shape":"poisson"}}}"#,
        )
        .unwrap();
        let m = Model::resolve(&ModelArgs::default(), &ok).unwrap();
        assert_eq!(m.servers, 22);
        assert!((m.deadline_seconds() - 0.03).abs() < 1e-15);
        assert!(serde_json::from_str::<RunConfig>(r#"{"overhead":{"bits":30}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"extra":1}"#).is_err());
    }

    #[test]
    fn flags_override_config() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"backhaul":{"rates_bps":[1000,2000]}}"#).unwrap();
        let m = Model::resolve(&ModelArgs::default(), &cfg).unwrap();
        assert_eq!(m.rates_bps, [1000.0, 2000.0]);
        let args = ModelArgs {
            servers: Some(3),
            mu_bar_pkts: Some(10.0),
            ..Default::default()
        };
        let m = Model::resolve(&args, &cfg).unwrap();
        assert_eq!(m.rates_bps, [300.0; 3]);
        let args = ModelArgs {
            tier: Some(3),
            equal_alpha: Some(4.0),
            ..Default::default()
        };
        let m = Model::resolve(&args, &RunConfig::default()).unwrap();
        assert_eq!(m.hcn.neighbor_tier(), 2);
        assert_eq!(m.hcn.common_alpha(), Some(4.0));
        let bad = ModelArgs {
            tier: Some(0),
            ..Default::default()
        };
        assert!(Model::resolve(&bad, &RunConfig::default()).is_err());
    }
}
