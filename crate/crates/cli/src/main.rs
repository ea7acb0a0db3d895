//! `oqc`: point queries, design solvers, sweeps, figures, Monte Carlo checks.
//!
//! Data goes to stdout (JSON or CSV); diagnostics go to stderr. Exit codes:
//! 0 success, 1 failed validation, 2 usage or configuration error,
//! 3 numerical failure.

mod config;
mod validate;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use oqc_core::backhaul::{min_server_rate, BindingBound};
use oqc_core::scenarios::{
    self, figure_sweep, Channel, Scale, SweepContext, SweepOverrides, SweepParameter, SweepSpec,
};
use oqc_core::simulate;
use oqc_core::wireless::{self, min_bandwidth, min_bandwidth_deterministic};
use oqc_core::{ArrivalModel, ArrivalShape, Error};

use config::{parse_shape, McArgs, Model, ModelArgs, RunConfig};

#[derive(Parser)]
#[command(
    name = "oqc",
    version,
    about = "Overhead outage analysis for inter-cell signaling"
)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true, env = "OQC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic outage of one channel.
    Outage {
        channel: ChannelArg,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Smallest server rate or bandwidth meeting a target outage.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Free-form sweep of one parameter, as CSV.
    Sweep {
        /// eta, mu_bar (packets/s) or W (Hz).
        #[arg(long)]
        param: SweepParameter,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Log-spaced grid.
        #[arg(long)]
        log: bool,
        /// Channel for an eta sweep.
        #[arg(long, value_enum, default_value = "backhaul")]
        channel: ChannelArg,
        /// Arrival laws, comma separated; defaults to the --arrival value.
        #[arg(long, value_delimiter = ',', value_parser = parse_shape)]
        arrivals: Option<Vec<ArrivalShape>>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rows reproducing one of the standard figures (2 to 8), as CSV.
    Figure {
        id: u32,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, conflicts_with = "linear")]
        log: bool,
        #[arg(long)]
        linear: bool,
        #[arg(long)]
        deadline_ratio: Option<f64>,
        #[arg(long, value_delimiter = ',', value_parser = parse_shape)]
        arrivals: Option<Vec<ArrivalShape>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate next to the analytic value.
    Simulate {
        target: SimTarget,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte Carlo versus analytic grid plus identity and invariant checks.
    Validate {
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Per-server rate for N equal-rate servers.
    Backhaul {
        #[arg(long)]
        target_pe: f64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Bandwidth for a common path-loss exponent.
    Wireless {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        target_pe: f64,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Backhaul,
    Wireless,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimTarget {
    Backhaul,
    Wireless,
    Association,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Append Monte Carlo columns.
    #[arg(long)]
    mc: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn settings(&self, cfg: &RunConfig) -> anyhow::Result<Option<oqc_core::McSettings>> {
        if !self.mc {
            return Ok(None);
        }
        let args = McArgs {
            samples: self.samples,
            seed: self.seed,
            confidence: None,
        };
        Ok(Some(args.resolve(cfg)?))
    }

    fn write(&self, rows: &[scenarios::SweepRow]) -> anyhow::Result<()> {
        match &self.output {
            Some(path) => {
                let file =
                    File::create(path).with_context(|| format!("creating {}", path.display()))?;
                scenarios::write_csv(rows, file)?;
            }
            None => scenarios::write_csv(rows, io::stdout().lock())?,
        }
        Ok(())
    }
}

/// Problems that are the caller's fault, as opposed to numerical failures.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

/// Validation ran and found failures.
#[derive(Debug, thiserror::Error)]
#[error("{0} check(s) failed")]
struct ChecksFailed(usize);

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ChecksFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::NoConvergence { .. }
            | Error::Accuracy { .. }
            | Error::Bracket { .. }
            | Error::EmptyField { .. }
            | Error::UseErlangPath,
        ) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// A closed stdout (e.g. piping into `head`) is not an error.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    let pipe = Some(io::ErrorKind::BrokenPipe);
    err.chain().any(|c| {
        c.downcast_ref::<io::Error>().map(io::Error::kind) == pipe
            || c.downcast_ref::<serde_json::Error>()
                .and_then(serde_json::Error::io_error_kind)
                == pipe
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Usage("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| Usage(format!("{e:#}")))?;
    match cli.command {
        Command::Outage { channel, model } => outage(channel, &Model::resolve(&model, &cfg)?),
        Command::Design(d) => design(d, &cfg),
        Command::Sweep {
            param,
            from,
            to,
            points,
            log,
            channel,
            arrivals,
            model,
            out,
        } => {
            let m = Model::resolve(&model, &cfg)?;
            let Some(mu_bps) = m.common_rate_bps() else {
                return Err(Usage("sweeps need equal server rates".into()).into());
            };
            let spec = SweepSpec {
                parameter: param,
                range: (from, to),
                points,
                scale: if log { Scale::Log } else { Scale::Linear },
                deadline_ratio: match m.deadline {
                    config::Deadline::Ratio(r) => r,
                    config::Deadline::Seconds(_) => {
                        return Err(
                            Usage("sweeps take --deadline-ratio, not --deadline".into()).into()
                        )
                    }
                },
                arrivals: arrivals.unwrap_or_else(|| vec![m.shape]),
            };
            let ctx = SweepContext {
                channel: match channel {
                    ChannelArg::Backhaul => Channel::Backhaul,
                    ChannelArg::Wireless => Channel::Wireless,
                },
                servers: m.servers,
                mu_bar_pkts: mu_bps / m.packet_bits,
                packet_bits: m.packet_bits,
                hcn: m.hcn.clone(),
                bandwidth_hz: m.bandwidth_hz,
                eta: m.eta,
            };
            let rows = scenarios::sweep(&spec, &ctx, out.settings(&cfg)?.as_ref())?;
            out.write(&rows)
        }
        Command::Figure {
            id,
            from,
            to,
            points,
            log,
            linear,
            deadline_ratio,
            arrivals,
            out,
        } => {
            let range = match (from, to) {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => return Err(Usage("--from and --to go together".into()).into()),
            };
            let overrides = SweepOverrides {
                range,
                points,
                scale: if log {
                    Some(Scale::Log)
                } else if linear {
                    Some(Scale::Linear)
                } else {
                    None
                },
                deadline_ratio,
                arrivals,
                mc: out.settings(&cfg)?,
            };
            let rows = figure_sweep(id, &overrides)?;
            out.write(&rows)
        }
        Command::Simulate { target, model, mc } => {
            simulate_cmd(target, &Model::resolve(&model, &cfg)?, &mc.resolve(&cfg)?)
        }
        Command::Validate { mc } => {
            let mut settings = mc.resolve(&cfg)?;
            if mc.samples.is_none() && cfg.mc.is_none() {
                settings.samples = 100_000;
            }
            let report = validate::run(&Model::resolve(&ModelArgs::default(), &cfg)?, &settings)?;
            print_json(&report)?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: {}", c.name, c.detail);
            }
            if failed > 0 {
                return Err(ChecksFailed(failed).into());
            }
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn inputs(m: &Model) -> serde_json::Value {
    json!({
        "servers": m.servers,
        "rates_bps": m.rates_bps,
        "B_bits": m.packet_bits,
        "eta_per_s": m.eta,
        "arrival": m.shape,
        "deadline_s": m.deadline_seconds(),
        "bandwidth_hz": m.bandwidth_hz,
        "neighbor_tier": m.hcn.neighbor_tier() + 1,
        "common_alpha": m.hcn.common_alpha(),
    })
}

fn outage(channel: ChannelArg, m: &Model) -> anyhow::Result<()> {
    let a = m.arrivals()?;
    let d = m.deadline_seconds();
    let record = match channel {
        ChannelArg::Backhaul => {
            let b = m.backhaul()?;
            let (lb_deadline, lb_arrival) = b.outage_lower_bounds(&a, d)?;
            json!({
                "channel": "backhaul",
                "p_e": b.outage(&a, d)?,
                "lower_bound": lb_deadline.max(lb_arrival),
                "lower_bound_deadline": lb_deadline,
                "lower_bound_interarrival": lb_arrival,
                "legacy_p_e": b.legacy_outage(m.eta, d)?,
                "inputs": inputs(m),
            })
        }
        ChannelArg::Wireless => {
            let sir = m.hcn.sir_model()?;
            let w = m.wireless()?;
            let (lower, upper) = wireless::outage_bounds(&sir, &w, &a, d)?;
            json!({
                "channel": "wireless",
                "p_e": wireless::outage(&sir, &w, &a, d)?,
                "lower_bound": lower,
                "upper_bound": upper,
                "inputs": inputs(m),
            })
        }
    };
    print_json(&record)
}

fn design(cmd: DesignCommand, cfg: &RunConfig) -> anyhow::Result<()> {
    match cmd {
        DesignCommand::Backhaul { target_pe, model } => {
            let m = Model::resolve(&model, cfg)?;
            let a = m.arrivals()?;
            let d = m.deadline_seconds();
            let record = match min_server_rate(m.servers, &a, m.packet_bits, d, target_pe) {
                Ok(r) => json!({
                    "status": "ok",
                    "mu_bar_bps": r.mu_bar_bps,
                    "mu_bar_pkts": r.mu_bar_bps / m.packet_bits,
                    "binding": r.binding,
                    "deadline_bound_bps": r.deadline_bound_bps,
                    "interarrival_bound_bps": r.interarrival_bound_bps,
                    "exact_for_this_arrival": matches!(a.shape(), ArrivalShape::Deterministic)
                        && r.binding == BindingBound::Deadline,
                    "inputs": inputs(&m),
                }),
                Err(Error::Infeasible(reason)) => json!({
                    "status": "infeasible",
                    "reason": reason,
                    "inputs": inputs(&m),
                }),
                Err(e) => return Err(e.into()),
            };
            print_json(&record)
        }
        DesignCommand::Wireless {
            alpha,
            target_pe,
            model,
        } => {
            let m = Model::resolve(&model, cfg)?;
            let d = m.deadline_seconds();
            let necessary = min_bandwidth(alpha, m.packet_bits, d, target_pe)?;
            let exact = min_bandwidth_deterministic(alpha, m.packet_bits, d, m.eta, target_pe)?;
            print_json(&json!({
                "status": "ok",
                "bandwidth_hz": necessary,
                "bound": "necessary",
                "deterministic_exact_hz": exact,
                "alpha": alpha,
                "B_bits": m.packet_bits,
                "deadline_s": d,
                "eta_per_s": m.eta,
                "target_pe": target_pe,
            }))
        }
    }
}

fn simulate_cmd(target: SimTarget, m: &Model, s: &oqc_core::McSettings) -> anyhow::Result<()> {
    let d = m.deadline_seconds();
    let record = match target {
        SimTarget::Backhaul => {
            let (b, a) = (m.backhaul()?, m.arrivals()?);
            let pe = b.outage(&a, d)?;
            let est = simulate::estimate_backhaul_outage(&b, &a, d, s)?;
            json!({
                "target": "backhaul",
                "analytic": pe,
                "mc": est,
                "inside_ci": est.contains(pe),
                "seed": s.seed,
                "inputs": inputs(m),
            })
        }
        SimTarget::Wireless => {
            let (w, a): (_, ArrivalModel) = (m.wireless()?, m.arrivals()?);
            let sir = m.hcn.sir_model()?;
            let pe = wireless::outage(&sir, &w, &a, d)?;
            let est = simulate::estimate_wireless_outage(&m.hcn, &w, &a, d, s)?;
            if let Some(warn) = &est.warning {
                eprintln!("warning: {warn}");
            }
            json!({
                "target": "wireless",
                "analytic": pe,
                "mc": est.estimate,
                "attempts": est.attempts,
                "acceptance_rate": est.acceptance_rate,
                "inside_ci": est.estimate.contains(pe),
                "seed": s.seed,
                "inputs": inputs(m),
            })
        }
        SimTarget::Association => {
            let est = simulate::estimate_association(&m.hcn, s)?;
            let tiers: Vec<_> = est
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let p = oqc_core::sir::association_probability(&m.hcn, k)?;
                    Ok(json!({"tier": k + 1, "analytic": p, "mc": e, "inside_ci": e.contains(p)}))
                })
                .collect::<oqc_core::Result<_>>()?;
            json!({"target": "association", "tiers": tiers, "seed": s.seed})
        }
    };
    print_json(&record)
}
