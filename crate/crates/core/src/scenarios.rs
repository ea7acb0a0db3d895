//! Presets, backhaul topologies, channel comparison and the standard
//! parameter sweeps.
//!
//! Sweep output is a flat table: one [`SweepRow`] per (series, x) pair.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrivals::{ArrivalModel, ArrivalShape};
use crate::backhaul::BackhaulConfig;
use crate::error::{domain, ensure_positive, Error, Result};
use crate::numerics::{find_root, RootSpec};
use crate::simulate::{estimate_backhaul_outage, estimate_wireless_outage, McEstimate, McSettings};
use crate::sir::{
    mean_log_spectral_efficiency, wall_loss_from_db, HcnConfig, SirCache, SirDistribution,
    TierParams,
};
use crate::wireless::{self, WirelessConfig};

/// Overhead packet size used throughout the presets (bits).
pub const PACKET_BITS: f64 = 30.0;
/// Default deadline as a fraction of the mean interarrival time.
pub const DEFAULT_DEADLINE_RATIO: f64 = 0.3;
/// Exponent shared by all tiers in the equal-exponent series of figure 7.
pub const FIG7_COMMON_ALPHA: f64 = 4.0;

/// Macro, pico and femto tiers with the femto tier behind a 5 dB wall.
pub fn table1_hcn(neighbor_tier: usize) -> Result<HcnConfig> {
    HcnConfig::new(
        vec![
            TierParams::new(5e-7, 40.0, 3.0, 1.0)?,
            TierParams::new(5e-6, 1.0, 3.5, 1.0)?,
            TierParams::new(5e-5, 0.2, 4.0, wall_loss_from_db(5.0))?,
        ],
        neighbor_tier,
    )
}

/// Backhaul topology of the link to the neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Through the core network: `N = N_CN + 1`.
    I,
    /// Direct link: `N = 1`.
    II,
    /// Femto through IP access and core: `N = 2 + N_CN + N_IP`.
    III,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
        })
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Self::I),
            "II" | "2" => Ok(Self::II),
            "III" | "3" => Ok(Self::III),
            _ => Err(domain(
                "scenario",
                format!("expected I, II or III, got {s:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScenarioId {
    pub variant: Scenario,
    /// Core-network servers.
    pub n_cn: usize,
    /// IP-access servers.
    pub n_ip: usize,
}

impl ScenarioId {
    /// Table 1 server counts (10 core, 10 IP access).
    pub fn new(variant: Scenario) -> Self {
        Self {
            variant,
            n_cn: 10,
            n_ip: 10,
        }
    }

    pub fn servers(&self) -> usize {
        match self.variant {
            Scenario::I => self.n_cn + 1,
            Scenario::II => 1,
            Scenario::III => 2 + self.n_cn + self.n_ip,
        }
    }
}

/// Equal-rate backhaul for a scenario; `mu_bar` in bits/s.
pub fn scenario_backhaul(id: ScenarioId, mu_bar: f64, packet_bits: f64) -> Result<BackhaulConfig> {
    BackhaulConfig::equal(id.servers(), mu_bar, packet_bits)
}

/// Backhaul overhead capacity `1/E[D] = μ̄/(NB)` in packets/s.
pub fn backhaul_capacity(b: &BackhaulConfig) -> f64 {
    1.0 / b.mean_delay()
}

/// Wireless overhead capacity `(W/B)·E[log₂(1 + SIR)]` in packets/s.
pub fn wireless_capacity<D: SirDistribution + ?Sized>(sir: &D, w: &WirelessConfig) -> Result<f64> {
    Ok(w.bandwidth_hz() / w.packet_bits() * mean_log_spectral_efficiency(sir)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Backhaul,
    Wireless,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelChoice {
    pub channel: Channel,
    pub backhaul_pe: f64,
    pub wireless_pe: f64,
}

/// The channel with strictly lower outage; ties go to the backhaul.
pub fn preferred_channel<D: SirDistribution + ?Sized>(
    b: &BackhaulConfig,
    sir: &D,
    w: &WirelessConfig,
    a: &ArrivalModel,
    d: f64,
) -> Result<ChannelChoice> {
    let backhaul_pe = b.outage(a, d)?;
    let wireless_pe = wireless::outage(sir, w, a, d)?;
    let channel = if wireless_pe < backhaul_pe {
        Channel::Wireless
    } else {
        Channel::Backhaul
    };
    Ok(ChannelChoice {
        channel,
        backhaul_pe,
        wireless_pe,
    })
}

/// Arrival rate at which wireless starts to beat a backhaul whose capacity
/// is `ratio` times the wireless one, searched on `[lo, hi]`.
///
/// Arrival rate `η` changes the deadline `d = ρ/η` as well. Returns `None`
/// when one channel wins over the whole range.
pub fn choice_boundary<D: SirDistribution + ?Sized>(
    id: ScenarioId,
    ratio: f64,
    sir: &D,
    w: &WirelessConfig,
    shape: ArrivalShape,
    deadline_ratio: f64,
    (lo, hi): (f64, f64),
) -> Result<Option<f64>> {
    ensure_positive("capacity ratio", ratio)?;
    let r_wi = wireless_capacity(sir, w)?;
    let b = scenario_backhaul(
        id,
        ratio * r_wi * id.servers() as f64 * w.packet_bits(),
        w.packet_bits(),
    )?;
    let gap = |ln_eta: f64| -> Result<f64> {
        let eta = ln_eta.exp();
        let a = ArrivalModel::new(eta, shape)?;
        let d = deadline_ratio / eta;
        Ok(wireless::outage(sir, w, &a, d)? - b.outage(&a, d)?)
    };
    let (g_lo, g_hi) = (gap(lo.ln())?, gap(hi.ln())?);
    if g_lo.signum() == g_hi.signum() {
        return Ok(None);
    }
    let slot = crate::error::ErrorSlot::default();
    let f = |x: f64| slot.take_value(gap(x));
    let r = find_root(&f, lo.ln(), hi.ln(), &RootSpec::default());
    slot.finish(r).map(|x| Some(x.exp()))
}

/// Association-weighted outage when the neighbor's tier is not fixed.
pub fn unconditioned_wireless_outage(
    cache: &SirCache,
    w: &WirelessConfig,
    a: &ArrivalModel,
    d: f64,
) -> Result<f64> {
    (0..cache.hcn().tiers().len())
        .map(|k| {
            let weight = crate::sir::association_probability(cache.hcn(), k)?;
            Ok(weight * wireless::outage(cache.tier(k)?, w, a, d)?)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Arrival rate `η` (packets/s).
    Eta,
    /// Per-server packet rate `μ̄/B` (packets/s).
    MuBar,
    /// Wireless bandwidth `W` (Hz).
    W,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eta" => Ok(Self::Eta),
            "mu_bar" | "mu-bar" | "mubar" => Ok(Self::MuBar),
            "w" | "bandwidth" => Ok(Self::W),
            _ => Err(domain(
                "sweep parameter",
                format!("expected eta, mu_bar or W, got {s:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub range: (f64, f64),
    pub points: usize,
    pub scale: Scale,
    pub deadline_ratio: f64,
    /// Arrival laws, one curve family each. Only the shape is used; the rate
    /// comes from the sweep or the fixed context.
    pub arrivals: Vec<ArrivalShape>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo > 0.0) {
            return Err(domain(
                "sweep range",
                format!("need 0 < lo < hi, got ({lo}, {hi})"),
            ));
        }
        if self.points < 2 {
            return Err(domain("sweep points", "need at least two points"));
        }
        ensure_positive("deadline ratio", self.deadline_ratio)?;
        if self.arrivals.is_empty() {
            return Err(domain("sweep arrivals", "need at least one arrival law"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if i == 0 {
                    return lo;
                }
                if i == n - 1 {
                    return hi;
                }
                match self.scale {
                    Scale::Linear => lo + t * (hi - lo),
                    Scale::Log => 10f64.powf(lo.log10() + t * (hi.log10() - lo.log10())),
                }
            })
            .collect()
    }
}

/// Optional replacements for a figure's default sweep.
#[derive(Debug, Clone, Default)]
pub struct SweepOverrides {
    pub range: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub scale: Option<Scale>,
    pub deadline_ratio: Option<f64>,
    pub arrivals: Option<Vec<ArrivalShape>>,
    /// Adds Monte Carlo columns when set.
    pub mc: Option<McSettings>,
}

/// One CSV line: `x, series, pe_analytic, pe_lb, pe_mc, mc_ci_low, mc_ci_high`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub series: String,
    pub pe_analytic: f64,
    pub pe_lb: Option<f64>,
    pub pe_mc: Option<f64>,
    pub mc_ci_low: Option<f64>,
    pub mc_ci_high: Option<f64>,
}

pub const CSV_HEADER: [&str; 7] = [
    "x",
    "series",
    "pe_analytic",
    "pe_lb",
    "pe_mc",
    "mc_ci_low",
    "mc_ci_high",
];

/// Lower-case label used in series names.
pub fn arrival_label(shape: ArrivalShape) -> String {
    match shape {
        ArrivalShape::Deterministic => "deterministic".into(),
        ArrivalShape::Poisson => "poisson".into(),
        ArrivalShape::Gamma(m) => format!("gamma{m}"),
    }
}

/// Fixed quantities for a free-form sweep.
#[derive(Debug, Clone)]
pub struct SweepContext {
    pub channel: Channel,
    /// Equal-rate backhaul servers `N`.
    pub servers: usize,
    /// Per-server packet rate `μ̄/B` (packets/s).
    pub mu_bar_pkts: f64,
    pub packet_bits: f64,
    pub hcn: HcnConfig,
    pub bandwidth_hz: f64,
    pub eta: f64,
}

impl Default for SweepContext {
    fn default() -> Self {
        Self {
            channel: Channel::Backhaul,
            servers: 1,
            mu_bar_pkts: 1000.0,
            packet_bits: PACKET_BITS,
            hcn: table1_hcn(0).expect("preset is valid"),
            bandwidth_hz: 50e3,
            eta: 100.0,
        }
    }
}

/// How one curve turns a sweep value into a point.
#[derive(Clone)]
enum Curve<'a> {
    Backhaul {
        servers: usize,
        param: SweepParameter,
        mu_bar_pkts: f64,
        eta: f64,
    },
    Legacy {
        servers: usize,
        mu_bar_pkts: f64,
    },
    Wireless {
        cache: &'a SirCache,
        tier: usize,
        param: SweepParameter,
        bandwidth_hz: f64,
        eta: f64,
    },
}

struct Series<'a> {
    label: String,
    shape: ArrivalShape,
    curve: Curve<'a>,
}

struct Point {
    pe: f64,
    lb: Option<f64>,
    mc: Option<McEstimate>,
}

fn eval_point(
    s: &Series,
    x: f64,
    rho: f64,
    packet_bits: f64,
    mc: Option<&McSettings>,
) -> Result<Point> {
    match &s.curve {
        Curve::Backhaul {
            servers,
            param,
            mu_bar_pkts,
            eta,
        } => {
            let (mu_pkts, eta) = match param {
                SweepParameter::Eta => (*mu_bar_pkts, x),
                SweepParameter::MuBar => (x, *eta),
                SweepParameter::W => {
                    return Err(domain("sweep parameter", "W does not apply to backhaul"))
                }
            };
            let b = BackhaulConfig::equal(*servers, mu_pkts * packet_bits, packet_bits)?;
            let a = ArrivalModel::new(eta, s.shape)?;
            let d = rho / eta;
            let mc = mc
                .map(|m| estimate_backhaul_outage(&b, &a, d, m))
                .transpose()?;
            Ok(Point {
                pe: b.outage(&a, d)?,
                lb: Some(b.outage_lower_bound(&a, d)?),
                mc,
            })
        }
        Curve::Legacy {
            servers,
            mu_bar_pkts,
        } => {
            let b = BackhaulConfig::equal(*servers, mu_bar_pkts * packet_bits, packet_bits)?;
            Ok(Point {
                pe: b.legacy_outage(x, rho / x)?,
                lb: None,
                mc: None,
            })
        }
        Curve::Wireless {
            cache,
            tier,
            param,
            bandwidth_hz,
            eta,
        } => {
            let (bw, eta) = match param {
                SweepParameter::Eta => (*bandwidth_hz, x),
                SweepParameter::W => (x, *eta),
                SweepParameter::MuBar => {
                    return Err(domain(
                        "sweep parameter",
                        "mu_bar does not apply to wireless",
                    ))
                }
            };
            let w = WirelessConfig::new(bw, packet_bits)?;
            let a = ArrivalModel::new(eta, s.shape)?;
            let d = rho / eta;
            let sir = cache.tier(*tier)?;
            let mc = match mc {
                Some(m) => {
                    let h = cache.hcn().with_neighbor_tier(*tier)?;
                    Some(estimate_wireless_outage(&h, &w, &a, d, m)?.estimate)
                }
                None => None,
            };
            let pe = wireless::outage(sir, &w, &a, d)?;
            Ok(Point {
                pe,
                lb: Some(wireless::outage_bounds(sir, &w, &a, d)?.0),
                mc,
            })
        }
    }
}

fn run(
    series: &[Series],
    spec: &SweepSpec,
    packet_bits: f64,
    mc: Option<&McSettings>,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid();
    let jobs: Vec<(usize, usize)> = (0..series.len())
        .flat_map(|s| (0..grid.len()).map(move |i| (s, i)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(s, i)| {
            let x = grid[i];
            let point_mc = mc.map(|m| McSettings {
                seed: m.seed.wrapping_add(
                    ((s * grid.len() + i) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                ),
                ..*m
            });
            let p = eval_point(
                &series[s],
                x,
                spec.deadline_ratio,
                packet_bits,
                point_mc.as_ref(),
            )?;
            Ok(SweepRow {
                x,
                series: series[s].label.clone(),
                pe_analytic: p.pe,
                pe_lb: p.lb,
                pe_mc: p.mc.map(|e| e.mean),
                mc_ci_low: p.mc.map(|e| e.ci_low),
                mc_ci_high: p.mc.map(|e| e.ci_high),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.series.cmp(&b.series).then(a.x.total_cmp(&b.x)));
    Ok(rows)
}

/// Sweep of `spec.parameter` with everything else fixed by `ctx`.
///
/// `W` always sweeps the wireless channel and `mu_bar` the backhaul; `eta`
/// uses `ctx.channel`. Series are labeled by arrival law.
pub fn sweep(
    spec: &SweepSpec,
    ctx: &SweepContext,
    mc: Option<&McSettings>,
) -> Result<Vec<SweepRow>> {
    let channel = match spec.parameter {
        SweepParameter::Eta => ctx.channel,
        SweepParameter::MuBar => Channel::Backhaul,
        SweepParameter::W => Channel::Wireless,
    };
    let cache = SirCache::new(ctx.hcn.clone());
    let series: Vec<Series> = spec
        .arrivals
        .iter()
        .map(|&shape| Series {
            label: arrival_label(shape),
            shape,
            curve: match channel {
                Channel::Backhaul => Curve::Backhaul {
                    servers: ctx.servers,
                    param: spec.parameter,
                    mu_bar_pkts: ctx.mu_bar_pkts,
                    eta: ctx.eta,
                },
                Channel::Wireless => Curve::Wireless {
                    cache: &cache,
                    tier: ctx.hcn.neighbor_tier(),
                    param: spec.parameter,
                    bandwidth_hz: ctx.bandwidth_hz,
                    eta: ctx.eta,
                },
            },
        })
        .collect();
    run(&series, spec, ctx.packet_bits, mc)
}

/// Backhaul capacity ratios (relative to the wireless capacity) drawn in
/// the channel-choice figure.
pub const FIG8_RATIOS: [f64; 6] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0];

fn default_spec(fig: u32) -> Result<SweepSpec> {
    let both = vec![ArrivalShape::Deterministic, ArrivalShape::Poisson];
    let (parameter, range) = match fig {
        2 | 4 | 5 | 7 | 8 => (SweepParameter::Eta, (1.0, 1000.0)),
        3 => (SweepParameter::MuBar, (100.0, 10_000.0)),
        6 => (SweepParameter::W, (1e4, 1e6)),
        _ => return Err(Error::UnknownFigure(fig)),
    };
    Ok(SweepSpec {
        parameter,
        range,
        points: 31,
        scale: Scale::Log,
        deadline_ratio: DEFAULT_DEADLINE_RATIO,
        arrivals: both,
    })
}

/// Rows reproducing one of the standard figures (2 to 8).
///
/// * 2: `p_e` vs `η`, scenarios I–III, `μ̄/B = 1000`.
/// * 3: `p_e` vs `μ̄/B`, scenarios I–III, `η = 50`.
/// * 4: `p_e` vs `η`, scenario II, plus the constant-delay `legacy` step.
/// * 5: wireless `p_e` vs `η` per neighbor tier, `W = 50 kHz`.
/// * 6: wireless `p_e` vs `W` per neighbor tier, `η = 100`.
/// * 7: wireless `p_e` vs `η` for a pico neighbor, Table 1 exponents vs a
///   common exponent of 4.
/// * 8: scenario I backhaul at several capacity ratios against wireless
///   (macro neighbor, 50 kHz); series `<arrival>/wireless` and
///   `<arrival>/backhaul@<ratio>`.
pub fn figure_sweep(fig: u32, overrides: &SweepOverrides) -> Result<Vec<SweepRow>> {
    let mut spec = default_spec(fig)?;
    if let Some(r) = overrides.range {
        spec.range = r;
    }
    if let Some(p) = overrides.points {
        spec.points = p;
    }
    if let Some(s) = overrides.scale {
        spec.scale = s;
    }
    if let Some(r) = overrides.deadline_ratio {
        spec.deadline_ratio = r;
    }
    if let Some(a) = &overrides.arrivals {
        spec.arrivals = a.clone();
    }
    spec.validate()?;

    let table1 = SirCache::new(table1_hcn(0)?);
    let common = SirCache::new(table1_hcn(0)?.with_common_alpha(FIG7_COMMON_ALPHA)?);
    let scenarios = [Scenario::I, Scenario::II, Scenario::III].map(ScenarioId::new);
    let mut series: Vec<Series<'_>> = Vec::new();
    for &shape in &spec.arrivals {
        let arr = arrival_label(shape);
        let mut push = |label: String, curve| {
            series.push(Series {
                label,
                shape,
                curve,
            })
        };
        match fig {
            2 | 3 => {
                for id in scenarios {
                    let curve = Curve::Backhaul {
                        servers: id.servers(),
                        param: spec.parameter,
                        mu_bar_pkts: 1000.0,
                        eta: 50.0,
                    };
                    push(format!("{}/{arr}", id.variant), curve);
                }
            }
            4 => {
                push(
                    arr.clone(),
                    Curve::Backhaul {
                        servers: 1,
                        param: SweepParameter::Eta,
                        mu_bar_pkts: 1000.0,
                        eta: 0.0,
                    },
                );
            }
            5 | 6 => {
                for tier in 0..3 {
                    let curve = Curve::Wireless {
                        cache: &table1,
                        tier,
                        param: spec.parameter,
                        bandwidth_hz: 50e3,
                        eta: 100.0,
                    };
                    push(format!("tier{}/{arr}", tier + 1), curve);
                }
            }
            7 => {
                for (name, cache) in [("table1", &table1), ("equal", &common)] {
                    let curve = Curve::Wireless {
                        cache,
                        tier: 1,
                        param: SweepParameter::Eta,
                        bandwidth_hz: 50e3,
                        eta: 0.0,
                    };
                    push(format!("{name}/{arr}"), curve);
                }
            }
            8 => {
                let w = WirelessConfig::new(50e3, PACKET_BITS)?;
                let r_wi = wireless_capacity(table1.tier(0)?, &w)?;
                let id = ScenarioId::new(Scenario::I);
                push(
                    format!("{arr}/wireless"),
                    Curve::Wireless {
                        cache: &table1,
                        tier: 0,
                        param: SweepParameter::Eta,
                        bandwidth_hz: 50e3,
                        eta: 0.0,
                    },
                );
                for ratio in FIG8_RATIOS {
                    let curve = Curve::Backhaul {
                        servers: id.servers(),
                        param: SweepParameter::Eta,
                        mu_bar_pkts: ratio * r_wi * id.servers() as f64,
                        eta: 0.0,
                    };
                    push(format!("{arr}/backhaul@{ratio:.2}"), curve);
                }
            }
            _ => unreachable!("checked by default_spec"),
        }
    }
    if fig == 4 {
        series.push(Series {
            label: "legacy".into(),
            shape: ArrivalShape::Deterministic,
            curve: Curve::Legacy {
                servers: 1,
                mu_bar_pkts: 1000.0,
            },
        });
    }
    run(&series, &spec, PACKET_BITS, overrides.mc.as_ref())
}

/// Shortest round-trip text, in exponent form for very small or large values.
fn number(x: f64) -> String {
    if x != 0.0 && !(1e-4..1e15).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Writes rows as CSV with [`CSV_HEADER`]; missing values are empty fields.
pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(number).unwrap_or_default();
    for r in rows {
        w.write_record([
            number(r.x),
            r.series.clone(),
            number(r.pe_analytic),
            opt(r.pe_lb),
            opt(r.pe_mc),
            opt(r.mc_ci_low),
            opt(r.mc_ci_high),
        ])?;
    }
    w.flush()?;
    Ok(())
}
