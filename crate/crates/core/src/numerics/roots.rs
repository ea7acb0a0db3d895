//! Bracketed scalar root finding (Brent's method).

use crate::error::{domain, Error, Result};

/// Stopping rule for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    /// Absolute bracket width at which iteration stops.
    pub x_tol: f64,
    /// Residual magnitude accepted as a root.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            f_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl RootSpec {
    /// Default tolerances with `x_tol` proportional to the problem scale.
    pub fn scaled(scale: f64) -> Self {
        Self {
            x_tol: 1e-12 * scale.abs().max(f64::MIN_POSITIVE),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_tol > 0.0 && self.f_tol > 0.0 && self.max_iter > 0) {
            return Err(domain(
                "RootSpec",
                format!("tolerances must be > 0: {self:?}"),
            ));
        }
        Ok(())
    }
}

/// Finds `x` in `[lo, hi]` with `f(x) ≈ 0`, given `f(lo)·f(hi) ≤ 0`.
///
/// Inverse quadratic interpolation and secant steps are used when they stay
/// inside the bracket and shrink it fast enough; otherwise the step falls
/// back to bisection, so convergence is guaranteed for continuous `f`.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, spec: &RootSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(domain(
            "find_root",
            format!("bracket must be finite, got [{lo}, {hi}]"),
        ));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(domain("find_root", "function is NaN at a bracket end"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb.abs() <= spec.f_tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(domain("find_root", format!("function is NaN at {b}")));
        }
    }
    Err(Error::NoConvergence {
        what: "find_root",
        iterations: spec.max_iter,
        best: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::reg_lower_gamma;

    #[test]
    fn linear_root() {
        let x = find_root(|x| x - 2.0, 0.0, 10.0, &RootSpec::default()).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_quantile() {
        let x = find_root(|x| -(-x).exp_m1() - 0.95, 0.0, 100.0, &RootSpec::default()).unwrap();
        assert!((x - 20f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn gamma_median() {
        let x = find_root(
            |x| reg_lower_gamma(3.0, x).unwrap() - 0.5,
            0.0,
            50.0,
            &RootSpec::default(),
        )
        .unwrap();
        assert!((x - 2.674_060_313_7).abs() < 1e-9, "{x}");
    }

    #[test]
    fn missing_sign_change_is_reported() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, &RootSpec::default()).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = RootSpec {
            x_tol: 0.0,
            ..RootSpec::default()
        };
        assert!(matches!(
            find_root(|x| x, -1.0, 1.0, &spec),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn discontinuous_step_still_converges() {
        let x = find_root(
            |x| if x < 0.3 { -1.0 } else { 1.0 },
            0.0,
            1.0,
            &RootSpec::default(),
        )
        .unwrap();
        assert!((x - 0.3).abs() < 1e-11);
    }
}
