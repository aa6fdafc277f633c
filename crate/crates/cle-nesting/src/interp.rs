//! Monotone cubic Hermite interpolation with Fritsch-Carlson slopes.
//!
//! Used for the precomputed CDF tables of the radius jump law. The slope
//! limiter guarantees the interpolant is monotone whenever the data are,
//! which keeps the inverse well defined everywhere on the table.

#[derive(Clone)]
pub(crate) struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl MonotoneCubic {
    /// Build the interpolant. `xs` must be strictly increasing and `ys`
    /// nondecreasing; both are invariants of the CDF table construction.
    pub(crate) fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 2, "need at least two knots");
        let n = xs.len();
        let mut d = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let h = xs[i + 1] - xs[i];
            debug_assert!(h > 0.0, "knots must be strictly increasing");
            d[i] = (ys[i + 1] - ys[i]) / h;
            debug_assert!(d[i] >= 0.0, "data must be nondecreasing");
        }
        let mut ms = vec![0.0; n];
        ms[0] = d[0];
        ms[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            ms[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                0.5 * (d[i - 1] + d[i])
            };
        }
        // Fritsch-Carlson limiter: pull slopes into the monotone region.
        for i in 0..n - 1 {
            if d[i] == 0.0 {
                ms[i] = 0.0;
                ms[i + 1] = 0.0;
            } else {
                let a = ms[i] / d[i];
                let b = ms[i + 1] / d[i];
                let s = a * a + b * b;
                if s > 9.0 {
                    let t = 3.0 / s.sqrt();
                    ms[i] = t * a * d[i];
                    ms[i + 1] = t * b * d[i];
                }
            }
        }
        MonotoneCubic { xs, ys, ms }
    }

    pub(crate) fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub(crate) fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub(crate) fn y_min(&self) -> f64 {
        self.ys[0]
    }

    pub(crate) fn y_max(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    #[cfg(test)]
    fn segment_of_x(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    fn hermite(&self, i: usize, t: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.ms[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.ms[i + 1]
    }

    fn hermite_dt(&self, i: usize, t: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) * self.ys[i]
            + (3.0 * t2 - 4.0 * t + 1.0) * h * self.ms[i]
            + (-6.0 * t2 + 6.0 * t) * self.ys[i + 1]
            + (3.0 * t2 - 2.0 * t) * h * self.ms[i + 1]
    }

    /// Evaluate at `x`, clamping outside the knot range.
    #[cfg(test)]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        if x <= self.x_min() {
            return self.y_min();
        }
        if x >= self.x_max() {
            return self.y_max();
        }
        let i = self.segment_of_x(x);
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.hermite(i, t)
    }

    /// Invert the (monotone) interpolant: find `x` with `eval(x) = y`,
    /// clamping `y` into the table range. Newton on the local Hermite
    /// segment with a bisection safeguard.
    pub(crate) fn invert(&self, y: f64) -> f64 {
        if y <= self.y_min() {
            return self.x_min();
        }
        if y >= self.y_max() {
            return self.x_max();
        }
        // Locate the segment whose y-range contains y.
        let i = match self
            .ys
            .binary_search_by(|v| v.partial_cmp(&y).unwrap())
        {
            Ok(i) => i.min(self.ys.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.ys.len() - 2),
        };
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        if y1 <= y0 {
            return self.xs[i];
        }
        let mut t = ((y - y0) / (y1 - y0)).clamp(0.0, 1.0);
        let (mut t_lo, mut t_hi) = (0.0f64, 1.0f64);
        for _ in 0..40 {
            let val = self.hermite(i, t) - y;
            if val > 0.0 {
                t_hi = t;
            } else {
                t_lo = t;
            }
            let dv = self.hermite_dt(i, t);
            let mut next = if dv > 0.0 { t - val / dv } else { 0.5 * (t_lo + t_hi) };
            if !(t_lo..=t_hi).contains(&next) {
                next = 0.5 * (t_lo + t_hi);
            }
            if (next - t).abs() < 1e-15 {
                t = next;
                break;
            }
            t = next;
        }
        self.xs[i] + t * (self.xs[i + 1] - self.xs[i])
    }
}
