//! Fixed-step Dormand–Prince fifth-order stepping for small first-order systems.
//!
//! Fixed steps keep the global error a smooth function of the abscissa, which
//! matters when the output is differentiated numerically afterwards.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
type State = [f64; 2];

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn step(f: &impl Fn(f64, &State) -> State, t: f64, y: &State, h: f64) -> State {
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, &[(A21, &k1)], h));
    let k3 = f(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
    let k4 = f(t + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(
        t + C5 * h,
        &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    );
    let k6 = f(
        t + h,
        &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
    );
    axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h)
}

/// Integrates from `t0` to `t1` in `steps` equal steps.
pub fn integrate(f: &impl Fn(f64, &State) -> State, t0: f64, t1: f64, y0: State, steps: usize) -> State {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        y = step(f, t0 + i as f64 * h, &y, h);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &State| [y[1], -y[0]];
        let y = integrate(&f, 0.0, 10.0, [1.0, 0.0], 4000);
        assert!((y[0] - 10f64.cos()).abs() < 1e-10);
        assert!((y[1] + 10f64.sin()).abs() < 1e-10);
    }
}
