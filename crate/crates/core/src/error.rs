use thiserror::Error;

/// Errors produced by the analytic engines, solvers and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// Adaptive quadrature ran out of refinement budget.
    #[error("quadrature did not converge (best estimate {estimate:e}, error estimate {error_estimate:e})")]
    Accuracy { estimate: f64, error_estimate: f64 },

    /// The root bracket does not contain a sign change.
    #[error("no sign change on [{lo:e}, {hi:e}] (f = {f_lo:e}, {f_hi:e})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An iterative method hit its iteration cap.
    #[error("{what} did not converge after {iterations} iterations (best {best:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        best: f64,
    },

    /// The inverse of a distribution function is unbounded at p = 1.
    #[error("inverse is unbounded at probability 1")]
    Unbounded,

    /// The requested design target cannot be met.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A scheduling policy leaves no residual rate for overhead packets.
    #[error("scheduling policy leaves {residual_bps} bits/s for overhead")]
    InfeasiblePolicy { residual_bps: f64 },

    /// Rates are neither all equal nor all pairwise distinct.
    #[error("server rates mix near-equal and distinct values; equalize or perturb them: {0:?}")]
    DegenerateRates(Vec<f64>),

    /// Hypoexponential coefficients requested for an equal-rate chain.
    #[error("equal server rates have no hypoexponential expansion; use the Erlang path")]
    UseErlangPath,

    /// The PPP window stayed empty after repeated doubling.
    #[error("empty field after {doublings} radius doublings")]
    EmptyField { doublings: u32 },

    /// Unknown figure identifier.
    #[error("unknown figure {0}; expected 2..=8")]
    UnknownFigure(u32),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(domain(what, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_probability_open(what: &'static str, p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(domain(what, format!("must lie in (0, 1), got {p}")))
    }
}

/// Carries the first error out of an infallible closure handed to a
/// quadrature or root finder; the closure returns NaN in its place.
#[derive(Default)]
pub(crate) struct ErrorSlot(std::cell::RefCell<Option<Error>>);

impl ErrorSlot {
    pub(crate) fn take_value(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    /// The stored error wins over whatever the outer routine reported.
    pub(crate) fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}
