use proptest::prelude::*;

use oqc_core::backhaul::hypoexp_coefficients;
use oqc_core::numerics::{inv_reg_lower_gamma, reg_lower_gamma, reg_upper_gamma};
use oqc_core::sir::{z_function, EqualAlphaSir};
use oqc_core::wireless;
use oqc_core::{ArrivalModel, ArrivalShape, BackhaulConfig, WirelessConfig};

const B: f64 = 30.0;

fn shape() -> impl Strategy<Value = ArrivalShape> {
    prop_oneof![
        Just(ArrivalShape::Deterministic),
        Just(ArrivalShape::Poisson),
        (2u32..=8).prop_map(|m| ArrivalShape::Gamma(m as f64)),
        (1.5f64..6.0).prop_map(ArrivalShape::Gamma),
    ]
}

fn distinct_rates() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(100.0f64..5000.0, 1..=5).prop_filter(
        "rates must be well separated",
        |r| {
            r.iter()
                .enumerate()
                .all(|(i, a)| r[i + 1..].iter().all(|b| (a - b).abs() > 1e-3 * a.max(*b)))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficients_sum_to_one(rates in distinct_rates()) {
        let c = BackhaulConfig::new(rates.iter().map(|r| r * B).collect(), B).unwrap();
        let a = hypoexp_coefficients(&c).unwrap();
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_round_trip(s in 0.3f64..80.0, x in 1e-3f64..100.0) {
        prop_assume!(reg_upper_gamma(s, x).unwrap() >= 1e-6);
        let back = inv_reg_lower_gamma(s, reg_lower_gamma(s, x).unwrap()).unwrap();
        prop_assert!(((back - x) / x).abs() < 1e-8, "{back} vs {x}");
    }

    #[test]
    fn backhaul_outage_is_monotone(
        n in 1usize..=12,
        mu_pkts in 200.0f64..5000.0,
        eta in 5.0f64..300.0,
        rho in 0.1f64..2.0,
        shape in shape(),
    ) {
        let c = BackhaulConfig::equal(n, mu_pkts * B, B).unwrap();
        let a = ArrivalModel::new(eta, shape).unwrap();
        let d = rho / eta;
        let pe = c.outage(&a, d).unwrap();
        prop_assert!((0.0..=1.0).contains(&pe));
        prop_assert!(c.outage(&a, 1.2 * d).unwrap() <= pe + 1e-9);
        prop_assert!(c.outage(&a.with_rate(1.2 * eta).unwrap(), d).unwrap() >= pe - 1e-9);
        let faster = BackhaulConfig::equal(n, 1.2 * mu_pkts * B, B).unwrap();
        prop_assert!(faster.outage(&a, d).unwrap() <= pe + 1e-9);
        prop_assert!(c.outage_lower_bound(&a, d).unwrap() <= pe + 1e-9);
    }

    // Holds while the deadline is within the mean interarrival time, where
    // the deterministic outage equals the `P(D > d)` lower bound.
    #[test]
    fn deterministic_arrivals_are_best(
        rates in distinct_rates(),
        eta in 5.0f64..300.0,
        rho in 0.05f64..=1.0,
        m in 1.0f64..10.0,
    ) {
        let c = BackhaulConfig::new(rates.iter().map(|r| r * B).collect(), B).unwrap();
        let d = rho / eta;
        let det = c.outage(&ArrivalModel::deterministic(eta).unwrap(), d).unwrap();
        let gam = c.outage(&ArrivalModel::gamma(eta, m).unwrap(), d).unwrap();
        prop_assert!(det <= gam + 1e-9, "{det} > {gam}");

        let sir = EqualAlphaSir::new(4.0).unwrap();
        let w = WirelessConfig::new(5e4, B).unwrap();
        let det = wireless::outage(&sir, &w, &ArrivalModel::deterministic(eta).unwrap(), d).unwrap();
        let gam = wireless::outage(&sir, &w, &ArrivalModel::gamma(eta, m).unwrap(), d).unwrap();
        prop_assert!(det <= gam + 1e-9, "wireless {det} > {gam}");
    }

    #[test]
    fn equal_allocation_is_best(
        weights in prop::collection::vec(0.2f64..1.0, 2..=5),
        shape in shape(),
        rho in 0.1f64..1.0,
    ) {
        let n = weights.len();
        let total = n as f64 * 1000.0 * B;
        let sum: f64 = weights.iter().sum();
        let rates: Vec<f64> = weights.iter().map(|w| total * w / sum).collect();
        let unequal = match BackhaulConfig::new(rates, B) {
            Ok(c) => c,
            Err(_) => return Ok(()),
        };
        let equal = BackhaulConfig::equal(n, total / n as f64, B).unwrap();
        let a = ArrivalModel::new(100.0, shape).unwrap();
        let d = rho / 100.0;
        match unequal.outage(&a, d) {
            Ok(u) => prop_assert!(equal.outage(&a, d).unwrap() <= u + 1e-9),
            Err(oqc_core::Error::DegenerateRates(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn wireless_bounds_and_bandwidth(
        alpha in 2.5f64..5.0,
        w_hz in 1e4f64..1e6,
        eta in 5.0f64..500.0,
        shape in shape(),
    ) {
        let sir = EqualAlphaSir::new(alpha).unwrap();
        let w = WirelessConfig::new(w_hz, B).unwrap();
        let a = ArrivalModel::new(eta, shape).unwrap();
        let d = 0.3 / eta;
        let pe = wireless::outage(&sir, &w, &a, d).unwrap();
        let (lo, hi) = wireless::outage_bounds(&sir, &w, &a, d).unwrap();
        prop_assert!(lo <= pe + 1e-9 && pe <= hi + 1e-9, "{lo} {pe} {hi}");
        let wider = WirelessConfig::new(1.5 * w_hz, B).unwrap();
        prop_assert!(wireless::outage(&sir, &wider, &a, d).unwrap() <= pe + 1e-9);
    }

    #[test]
    fn z_lower_bound(ln_beta in -12.0f64..12.0, alpha in 2.05f64..8.0) {
        let beta = ln_beta.exp();
        let x = 2.0 * std::f64::consts::PI / alpha;
        let bound = beta.powf(2.0 / alpha) * x / x.sin() - 1.0;
        let z = z_function(beta, alpha).unwrap();
        prop_assert!(z >= bound - 1e-12 * bound.abs().max(1.0));
        prop_assert!(z >= 0.0);
    }
}

#[test]
fn deterministic_arrivals_can_lose_past_the_mean_interarrival() {
    let c = BackhaulConfig::new(vec![100.0 * B, 335.5 * B, 231.2 * B], B).unwrap();
    let (eta, d) = (209.4, 1.68 / 209.4);
    let det = c
        .outage(&ArrivalModel::deterministic(eta).unwrap(), d)
        .unwrap();
    let poi = c.outage(&ArrivalModel::poisson(eta).unwrap(), d).unwrap();
    assert!(poi < det, "{poi} vs {det}");
}
