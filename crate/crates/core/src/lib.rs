//! Overhead quality contours for inter-cell coordination signaling in
//! K-tier heterogeneous cellular networks.
//!
//! An overhead packet of `B` bits is generated by a renewal process with rate
//! `η`; it succeeds when its delay `D` is below both the next interarrival
//! time `T` and a hard deadline `d`. The crate computes the outage
//! probability `p_e = 1 − P(D ≤ T, D ≤ d)` for
//!
//! * backhaul signaling over `N` tandem exponential servers ([`backhaul`]),
//! * wireless signaling over a PPP interference field ([`sir`], [`wireless`]),
//!
//! checks every closed form against Monte Carlo ([`simulate`]), sizes server
//! rates and channel bandwidth for a target outage, and reproduces the
//! standard scenario sweeps ([`scenarios`]).

pub mod arrivals;
pub mod backhaul;
mod error;
pub mod numerics;
pub mod scenarios;
pub mod simulate;
pub mod sir;
pub mod wireless;

pub use arrivals::{ArrivalModel, ArrivalShape};
pub use backhaul::{BackhaulConfig, RateProfile, SchedulingPolicy};
pub use error::{Error, Result};
pub use simulate::{McEstimate, McSettings};
pub use sir::{HcnConfig, SirDistribution, TierParams};
pub use wireless::WirelessConfig;
