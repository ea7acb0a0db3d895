//! Shape-preserving piecewise cubic Hermite interpolation on a uniform grid.

/// Fritsch–Carlson interpolant through `(x0 + i·h, y_i)`.
#[derive(Debug, Clone)]
pub(crate) struct UniformPchip {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl UniformPchip {
    pub(crate) fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        assert!(
            y.len() >= 2 && h > 0.0,
            "need two points and a positive step"
        );
        let n = y.len();
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let mut slopes = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            slopes[i] = if a * b <= 0.0 {
                0.0
            } else {
                2.0 * a * b / (a + b)
            };
        }
        slopes[0] = end_slope(delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        slopes[n - 1] = end_slope(
            delta[n - 2],
            if n > 2 { delta[n - 3] } else { delta[n - 2] },
        );
        Self { x0, h, y, slopes }
    }

    pub(crate) fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    /// `None` outside the tabulated range.
    pub(crate) fn eval(&self, x: f64) -> Option<f64> {
        if !(x >= self.x0 && x <= self.x_max()) {
            return None;
        }
        let pos = (x - self.x0) / self.h;
        let i = (pos.floor() as usize).min(self.y.len() - 2);
        let t = pos - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Some(
            h00 * self.y[i]
                + h10 * self.h * self.slopes[i]
                + h01 * self.y[i + 1]
                + h11 * self.h * self.slopes[i + 1],
        )
    }
}

/// One-sided three-point end slope, limited to keep monotonicity.
fn end_slope(d0: f64, d1: f64) -> f64 {
    let s = (3.0 * d0 - d1) / 2.0;
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}
