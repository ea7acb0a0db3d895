//! Fixtures shared by the benchmarks.

use oqc_core::scenarios::{scenario_backhaul, table1_hcn, Scenario, ScenarioId, PACKET_BITS};
use oqc_core::{ArrivalModel, BackhaulConfig, HcnConfig};

/// Backhaul for a scenario at 1000 packets/s per server.
pub fn backhaul(variant: Scenario) -> BackhaulConfig {
    scenario_backhaul(ScenarioId::new(variant), 1000.0 * PACKET_BITS, PACKET_BITS)
        .expect("valid scenario")
}

pub fn hcn() -> HcnConfig {
    table1_hcn(0).expect("valid network")
}

pub fn arrivals() -> [ArrivalModel; 3] {
    [
        ArrivalModel::deterministic(100.0).unwrap(),
        ArrivalModel::poisson(100.0).unwrap(),
        ArrivalModel::gamma(100.0, 4.0).unwrap(),
    ]
}
