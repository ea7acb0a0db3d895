//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Semi-infinite ranges `[a, ∞)` are mapped onto `[0, 1)` with
//! `t = a + u / (1 − u)`; the Kronrod rule never samples the endpoint `u = 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Upper bound on the number of live subintervals.
const MAX_SEGMENTS: usize = 5_000;

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 50,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Tolerances used where results feed a later subtraction.
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_depth: 50,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_depth >= 10) {
            return Err(domain(
                "QuadratureSpec",
                format!("need abs_tol > 0, rel_tol > 0, max_depth >= 10: {self:?}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `t = origin + u / (1 − u)` on `u ∈ [0, 1)`.
    HalfLine {
        origin: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
    depth: u32,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval_mapped<F: FnMut(f64) -> f64>(f: &mut F, map: Map, u: f64) -> Result<f64> {
    let y = match map {
        Map::Identity => f(u),
        Map::HalfLine { origin } => {
            let w = 1.0 - u;
            if w <= 0.0 {
                // The panel has shrunk onto the point at infinity.
                return Err(Error::Accuracy {
                    estimate: f64::NAN,
                    error_estimate: f64::INFINITY,
                });
            }
            let fx = f(origin + u / w);
            if fx == 0.0 {
                0.0
            } else {
                fx / (w * w)
            }
        }
    };
    if y.is_finite() {
        Ok(y)
    } else {
        Err(domain(
            "integrate",
            format!("integrand is not finite ({y}) at mapped point {u}"),
        ))
    }
}

/// One Gauss–Kronrod 7/15 panel with the QUADPACK error heuristic.
fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, map: Map, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = eval_mapped(f, map, center)?;
    let mut gauss = f_center * WG[3];
    let mut kronrod = f_center * WGK[7];
    let mut abs_sum = kronrod.abs();
    let mut left = [0.0; 7];
    let mut right = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fl = eval_mapped(f, map, center - dx)?;
        let fr = eval_mapped(f, map, center + dx)?;
        left[j] = fl;
        right[j] = fr;
        kronrod += WGK[j] * (fl + fr);
        abs_sum += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((left[j] - mean).abs() + (right[j] - mean).abs());
    }
    let width = half.abs();
    let result = kronrod * half;
    let abs_sum = abs_sum * width;
    let asc = asc * width;
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    Ok((result, err))
}

/// Integrates `f` over `[a, b]`; `b` may be `+∞`.
///
/// The estimate satisfies `error ≤ max(abs_tol, rel_tol·|result|)` or an
/// [`Error::Accuracy`] carrying the best estimate is returned.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a.is_infinite() {
        return Err(domain(
            "integrate",
            format!("unsupported interval [{a}, {b}]"),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, spec).map(|v| -v);
    }
    integrate_with_breakpoints(f, &[a, b], spec)
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], …`; the last
/// point may be `+∞`. Breakpoints mark kinks or peaks of the integrand.
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(domain("integrate", "need at least two points"));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !(lo.is_finite() && hi >= lo) || hi.is_nan() {
            return Err(domain(
                "integrate",
                format!("breakpoints must be finite and ascending, got {points:?}"),
            ));
        }
        if hi == lo {
            continue;
        }
        let (map, ulo, uhi) = if hi.is_infinite() {
            (Map::HalfLine { origin: lo }, 0.0, 1.0)
        } else {
            (Map::Identity, lo, hi)
        };
        let (value, error) = kronrod15(&mut f, map, ulo, uhi)?;
        heap.push(Segment {
            map,
            lo: ulo,
            hi: uhi,
            depth: 0,
            value,
            error,
        });
    }

    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    loop {
        let (live_value, live_error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s: &Segment| (v + s.value, e + s.error));
        let total = frozen_value + live_value;
        let error = frozen_error + live_error;
        if error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Accuracy {
                estimate: total,
                error_estimate: error,
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let splittable = worst.depth < spec.max_depth
            && mid > worst.lo
            && mid < worst.hi
            && heap.len() < MAX_SEGMENTS;
        if !splittable {
            if heap.len() >= MAX_SEGMENTS {
                return Err(Error::Accuracy {
                    estimate: total,
                    error_estimate: error,
                });
            }
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        let halves = [(worst.lo, mid), (mid, worst.hi)].map(|(lo, hi)| {
            kronrod15(&mut f, worst.map, lo, hi).map(|(value, error)| Segment {
                map: worst.map,
                lo,
                hi,
                depth: worst.depth + 1,
                value,
                error,
            })
        });
        match halves {
            [Ok(left), Ok(right)] => {
                heap.push(left);
                heap.push(right);
            }
            [Err(Error::Accuracy { .. }), _] | [_, Err(Error::Accuracy { .. })] => {
                frozen_value += worst.value;
                frozen_error += worst.error;
            }
            [Err(e), _] | [_, Err(e)] => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::reg_lower_gamma;
    use std::f64::consts::PI;

    #[test]
    fn exponential_on_half_line() {
        let v = integrate(
            |t| (-t).exp(),
            0.0,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cauchy_on_half_line() {
        let v = integrate(
            |u| 1.0 / (1.0 + u * u),
            0.0,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((v - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn matches_incomplete_gamma() {
        let ln_g22 = crate::numerics::log_gamma(22.0).unwrap();
        let v = integrate(
            |t| (21.0 * t.ln() - t - ln_g22).exp(),
            0.0,
            1.0,
            &QuadratureSpec::tight(),
        )
        .unwrap();
        let expected = reg_lower_gamma(22.0, 1.0).unwrap();
        assert!(
            ((v - expected) / expected).abs() < 1e-9,
            "{v} vs {expected}"
        );
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let spec = QuadratureSpec::default();
        assert_eq!(integrate(|t| t, 1.0, 1.0, &spec).unwrap(), 0.0);
        let v = integrate(|t| t, 1.0, 0.0, &spec).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }

    #[test]
    fn divergent_integral_reports_accuracy_error() {
        let err = integrate(|_| 1.0, 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }), "{err:?}");
    }

    #[test]
    fn breakpoints_handle_a_kink() {
        let spec = QuadratureSpec::tight();
        let v =
            integrate_with_breakpoints(|t: f64| (t - 0.3).abs(), &[0.0, 0.3, 1.0], &spec).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 20).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-8, 5).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-8, 10).is_ok());
    }
}
