//! Uniform-grid quadrature, finite differences and interpolation.

/// Composite Simpson weights for `n` uniformly spaced nodes with spacing `h`.
///
/// An even node count (odd number of intervals) closes the last three
/// intervals with Simpson's 3/8 rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 4, "simpson needs at least 4 nodes");
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
    let mut j = 0;
    while j < simpson_end {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
        j += 2;
    }
    if simpson_end != n - 1 {
        let k = simpson_end;
        let c = 3.0 * h / 8.0;
        w[k] += c;
        w[k + 1] += 3.0 * c;
        w[k + 2] += 3.0 * c;
        w[k + 3] += c;
    }
    w
}

pub fn simpson(values: &[f64], h: f64) -> f64 {
    simpson_weights(values.len(), h)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Fourth-order first derivative: centered in the interior, one-sided at both ends.
pub fn derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "derivative4 needs at least 5 nodes");
    let c = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for j in 2..n - 2 {
        d[j] = c * (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]);
    }
    let m = n - 1;
    d[m] = -c * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
    d[m - 1] = -c * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
    d
}

/// Fourth-order second derivative with the same closure pattern as [`derivative4`].
pub fn second_derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6, "second_derivative4 needs at least 6 nodes");
    let c = 1.0 / (12.0 * h * h);
    let mut d = vec![0.0; n];
    let one_sided = |g: [f64; 6]| {
        c * (45.0 * g[0] - 154.0 * g[1] + 214.0 * g[2] - 156.0 * g[3] + 61.0 * g[4] - 10.0 * g[5])
    };
    let near_edge =
        |g: [f64; 6]| c * (10.0 * g[0] - 15.0 * g[1] - 4.0 * g[2] + 14.0 * g[3] - 6.0 * g[4] + g[5]);
    d[0] = one_sided([f[0], f[1], f[2], f[3], f[4], f[5]]);
    d[1] = near_edge([f[0], f[1], f[2], f[3], f[4], f[5]]);
    for j in 2..n - 2 {
        d[j] = c * (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]);
    }
    let m = n - 1;
    d[m] = one_sided([f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4], f[m - 5]]);
    d[m - 1] = near_edge([f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4], f[m - 5]]);
    d
}

/// Cubic Lagrange interpolation on a uniform grid starting at 0 with spacing `h`.
///
/// `even` mirrors the samples through the origin (radial profiles), otherwise
/// the stencil is shifted inward near the left end. Outside `[0, (n-1)h]`
/// the result is 0.
pub fn cubic_uniform(values: &[f64], h: f64, x: f64, even: bool) -> f64 {
    let n = values.len();
    let last = (n - 1) as f64 * h;
    if x < 0.0 || x > last || !x.is_finite() {
        return 0.0;
    }
    let s = x / h;
    let mut i = s.floor() as isize;
    if i as usize >= n - 1 {
        return values[n - 1];
    }
    // stencil i-1 .. i+2
    if i + 2 > n as isize - 1 {
        i = n as isize - 3;
    }
    if !even && i < 1 {
        i = 1;
    }
    let at = |j: isize| -> f64 {
        let j = if j < 0 { -j } else { j };
        values[j as usize]
    };
    let t = s - i as f64;
    let (f0, f1, f2, f3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    // Lagrange basis on nodes -1, 0, 1, 2
    let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3
}

/// Monotone piecewise-cubic Hermite interpolant through `(x_i, y_i)`, `x` increasing.
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `flat_start` pins the slope at the first node to zero.
    pub fn new(x: Vec<f64>, y: Vec<f64>, flat_start: bool) -> Self {
        let n = x.len();
        assert_eq!(n, y.len());
        assert!(n >= 1);
        let mut slopes = vec![0.0; n];
        if n >= 2 {
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
            for i in 1..n - 1 {
                // three-point derivative on a nonuniform stencil
                slopes[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
            }
            slopes[0] = if flat_start { 0.0 } else { delta[0] };
            slopes[n - 1] = delta[n - 2];
            // Fritsch–Carlson limiter
            for i in 0..n - 1 {
                if delta[i] == 0.0 {
                    slopes[i] = 0.0;
                    slopes[i + 1] = 0.0;
                    continue;
                }
                if slopes[i] * delta[i] < 0.0 {
                    slopes[i] = 0.0;
                }
                if slopes[i + 1] * delta[i] < 0.0 {
                    slopes[i + 1] = 0.0;
                }
                let a = slopes[i] / delta[i];
                let b = slopes[i + 1] / delta[i];
                let s = a * a + b * b;
                if s > 9.0 {
                    let tau = 3.0 / s.sqrt();
                    slopes[i] = tau * a * delta[i];
                    slopes[i + 1] = tau * b * delta[i];
                }
            }
        }
        MonotoneCubic { x, y, slopes }
    }

    /// Clamped to the end values outside the node range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}
