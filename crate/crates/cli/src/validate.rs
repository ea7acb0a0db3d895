//! Self-check: Monte Carlo against the closed forms, then identities and
//! ordering invariants.
//!
//! Every Monte Carlo comparison uses confidence `1 − (1 − c)/m` for `m`
//! comparisons, so a correct build fails the whole run with probability
//! at most `1 − c`.

use serde::Serialize;

use oqc_core::backhaul::{hypoexp_coefficients, min_server_rate};
use oqc_core::numerics::{inv_reg_lower_gamma, reg_lower_gamma};
use oqc_core::simulate::{
    estimate_association, estimate_backhaul_outage, estimate_wireless_outage,
};
use oqc_core::sir::{association_probability, z_function, SirCache};
use oqc_core::wireless;
use oqc_core::{ArrivalModel, ArrivalShape, BackhaulConfig, McSettings};

use crate::config::Model;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub samples: u64,
    pub seed: u64,
    pub family_confidence: f64,
    pub per_check_confidence: f64,
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

const SHAPES: [ArrivalShape; 3] = [
    ArrivalShape::Deterministic,
    ArrivalShape::Poisson,
    ArrivalShape::Gamma(4.0),
];
const BACKHAUL_SERVERS: [usize; 3] = [1, 3, 22];
const ETAS: [f64; 2] = [10.0, 100.0];

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

pub fn run(model: &Model, settings: &McSettings) -> anyhow::Result<Report> {
    let hcn = &model.hcn;
    let tiers = hcn.tiers().len();
    let b_bits = model.packet_bits;
    let mc_checks = BACKHAUL_SERVERS.len() * SHAPES.len() * ETAS.len() + 2 * tiers + tiers;
    let per_check = 1.0 - (1.0 - settings.confidence) / mc_checks as f64;
    let mut s = *settings;
    s.confidence = per_check;
    let mut checks = Vec::new();

    for (i, &n) in BACKHAUL_SERVERS.iter().enumerate() {
        let c = BackhaulConfig::equal(n, 1000.0 * b_bits, b_bits)?;
        for (j, &shape) in SHAPES.iter().enumerate() {
            for (l, &eta) in ETAS.iter().enumerate() {
                let a = ArrivalModel::new(eta, shape)?;
                let d = 0.3 / eta;
                let pe = c.outage(&a, d)?;
                s.seed = settings.seed.wrapping_add((i * 100 + j * 10 + l) as u64);
                let e = estimate_backhaul_outage(&c, &a, d, &s)?;
                checks.push(check(
                    format!("backhaul_mc N={n} {shape:?} eta={eta}"),
                    e.contains(pe),
                    format!(
                        "analytic {pe:.6}, mc {:.6} [{:.6}, {:.6}]",
                        e.mean, e.ci_low, e.ci_high
                    ),
                ));
            }
        }
    }

    let w = model.wireless()?;
    let cache = SirCache::new(hcn.clone());
    for k in 0..tiers {
        let h = hcn.with_neighbor_tier(k)?;
        for (j, shape) in [ArrivalShape::Deterministic, ArrivalShape::Poisson]
            .into_iter()
            .enumerate()
        {
            let a = ArrivalModel::new(100.0, shape)?;
            let d = 0.003;
            let pe = wireless::outage(cache.tier(k)?, &w, &a, d)?;
            s.seed = settings.seed.wrapping_add(1000 + (k * 10 + j) as u64);
            let e = estimate_wireless_outage(&h, &w, &a, d, &s)?;
            checks.push(check(
                format!("wireless_mc tier={} {shape:?}", k + 1),
                e.estimate.contains(pe) && e.warning.is_none(),
                format!(
                    "analytic {pe:.6}, mc {:.6} [{:.6}, {:.6}], acceptance {:.3}",
                    e.estimate.mean, e.estimate.ci_low, e.estimate.ci_high, e.acceptance_rate
                ),
            ));
        }
    }

    s.seed = settings.seed.wrapping_add(2000);
    let freqs = estimate_association(hcn, &s)?;
    let mut total = 0.0;
    for (k, e) in freqs.iter().enumerate() {
        let p = association_probability(hcn, k)?;
        total += p;
        checks.push(check(
            format!("association_mc tier={}", k + 1),
            e.contains(p),
            format!(
                "analytic {p:.5}, mc {:.5} [{:.5}, {:.5}]",
                e.mean, e.ci_low, e.ci_high
            ),
        ));
    }
    checks.push(check(
        "association_sum",
        (total - 1.0).abs() < 1e-6,
        format!("sum {total:.10}"),
    ));

    let rate_sets: [&[f64]; 3] = [
        &[1000.0, 2000.0],
        &[3000.0, 2000.0, 1000.0],
        &[500.0, 800.0, 1300.0, 2100.0],
    ];
    let worst = rate_sets
        .iter()
        .map(|r| {
            let c = BackhaulConfig::new(r.iter().map(|x| x * b_bits).collect(), b_bits)?;
            Ok((hypoexp_coefficients(&c)?.iter().sum::<f64>() - 1.0).abs())
        })
        .collect::<oqc_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(check(
        "coefficients_sum_to_one",
        worst < 1e-9,
        format!("worst |sum - 1| {worst:.1e}"),
    ));

    let mut worst = 0.0f64;
    for shape in [0.5, 1.0, 4.0, 22.0] {
        for x in [1e-3, 0.1, 1.0, 5.0, 20.0] {
            let back = inv_reg_lower_gamma(shape, reg_lower_gamma(shape, x)?)?;
            worst = worst.max(((back - x) / x).abs());
        }
    }
    checks.push(check(
        "gamma_round_trip",
        worst < 1e-8,
        format!("worst relative error {worst:.1e}"),
    ));

    let mut worst = 0.0f64;
    for beta in [1e-4f64, 0.01, 0.5, 1.0, 3.0, 100.0, 1e6] {
        let closed = beta.sqrt() * beta.sqrt().atan();
        worst = worst.max(((z_function(beta, 4.0)? - closed) / closed).abs());
    }
    checks.push(check(
        "z_alpha4_closed_form",
        worst < 1e-9,
        format!("worst relative error {worst:.1e}"),
    ));

    let mut violations = Vec::new();
    for &n in &BACKHAUL_SERVERS {
        let c = BackhaulConfig::equal(n, 1000.0 * b_bits, b_bits)?;
        for &eta in &ETAS {
            let d = 0.3 / eta;
            let det = c.outage(&ArrivalModel::deterministic(eta)?, d)?;
            for m in [1.0, 2.0, 4.0, 8.0] {
                let a = ArrivalModel::gamma(eta, m)?;
                let pe = c.outage(&a, d)?;
                if det > pe + 1e-12 {
                    violations.push(format!("N={n} eta={eta} M={m}: {det} > {pe}"));
                }
                if c.outage_lower_bound(&a, d)? > pe + 1e-12 {
                    violations.push(format!("lower bound above outage at N={n} eta={eta} M={m}"));
                }
            }
        }
    }
    for k in 0..tiers {
        let sir = cache.tier(k)?;
        for &eta in &ETAS {
            let d = 0.3 / eta;
            let det = wireless::outage(sir, &w, &ArrivalModel::deterministic(eta)?, d)?;
            for m in [1.0, 2.0, 4.0, 8.0] {
                let a = ArrivalModel::gamma(eta, m)?;
                let pe = wireless::outage(sir, &w, &a, d)?;
                let (lo, hi) = wireless::outage_bounds(sir, &w, &a, d)?;
                if det > pe + 1e-9 || lo > pe + 1e-9 || pe > hi + 1e-9 {
                    violations.push(format!(
                        "wireless tier={} eta={eta} M={m}: det {det} bounds {lo} {pe} {hi}",
                        k + 1
                    ));
                }
            }
        }
    }
    checks.push(check(
        "ordering_and_bounds",
        violations.is_empty(),
        format!("{violations:?}"),
    ));

    let mut misses = Vec::new();
    for (n, eta, d, p) in [
        (1, 100.0, 0.003, 0.0498),
        (3, 50.0, 0.006, 0.1),
        (22, 10.0, 0.03, 0.05),
    ] {
        let a = ArrivalModel::deterministic(eta)?;
        let r = min_server_rate(n, &a, b_bits, d, p)?;
        let pe = BackhaulConfig::equal(n, r.mu_bar_bps, b_bits)?.outage(&a, d)?;
        if ((pe - p) / p).abs() > 1e-6 {
            misses.push(format!("N={n}: {pe} vs {p}"));
        }
    }
    checks.push(check(
        "server_rate_round_trip",
        misses.is_empty(),
        format!("{misses:?}"),
    ));

    Ok(Report {
        samples: settings.samples,
        seed: settings.seed,
        family_confidence: settings.confidence,
        per_check_confidence: per_check,
        all_pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
