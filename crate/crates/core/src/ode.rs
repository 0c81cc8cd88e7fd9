//! Dormand–Prince 5(4) stepping and cubic Hermite interpolation.

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
// 5th-order weights minus the embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Result of one trial step.
pub(crate) struct Trial<const N: usize> {
    pub y: [f64; N],
    /// Derivative at the new point (FSAL stage).
    pub dy: [f64; N],
    /// Scaled error norm; the step is acceptable when `<= 1`.
    pub err: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        *o += h * acc;
    }
    out
}

/// One Dormand–Prince trial step from `(t, y)` with slope `k1 = f(t, y)`.
pub(crate) fn trial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    tol: Tolerance,
) -> Trial<N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(t + h, &y_new);

    let mut err: f64 = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = tol.atol + tol.rtol * libm::fabs(y[i]).max(libm::fabs(y_new[i]));
        let ratio = libm::fabs(e) / scale;
        // NaN propagates as a rejection.
        err = if ratio.is_nan() { f64::INFINITY } else { err.max(ratio) };
    }
    if !y_new.iter().chain(k7.iter()).all(|v| v.is_finite()) {
        err = f64::INFINITY;
    }
    Trial { y: y_new, dy: k7, err }
}

/// Step-size factor suggested by an error norm.
pub(crate) fn step_scale(err: f64) -> f64 {
    if err == 0.0 {
        return MAX_SCALE;
    }
    if !err.is_finite() {
        return MIN_SCALE;
    }
    (SAFETY * libm::pow(err, -0.2)).clamp(MIN_SCALE, MAX_SCALE)
}

/// Cubic Hermite interpolant on `[x0, x1]` from values and slopes.
#[inline]
pub(crate) fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Fritsch–Carlson limiting of endpoint slopes so the Hermite cubic stays
/// monotone whenever the data are. Intervals holding an extremum (slopes of
/// opposite sign, or disagreeing with the secant) keep the exact slopes.
#[inline]
pub(crate) fn limit_slopes(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let secant = (y1 - y0) / (x1 - x0);
    if secant == 0.0 || d0 * secant < 0.0 || d1 * secant < 0.0 {
        return (d0, d1);
    }
    let a = d0 / secant;
    let b = d1 / secant;
    let norm = a * a + b * b;
    if norm > 9.0 {
        let tau = 3.0 / libm::sqrt(norm);
        return (tau * a * secant, tau * b * secant);
    }
    (d0, d1)
}

/// Linear interpolation in a sorted abscissa table. Values outside the table
/// are clamped to the end points.
pub(crate) fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate<F>(mut f: F, t0: f64, t1: f64, y0: [f64; 2], tol: Tolerance) -> [f64; 2]
    where
        F: FnMut(f64, &[f64; 2]) -> [f64; 2],
    {
        let (mut t, mut y) = (t0, y0);
        let mut k = f(t, &y);
        let mut h: f64 = 1e-3;
        while t < t1 {
            h = h.min(t1 - t);
            let trial = trial_step(&mut f, t, &y, &k, h, tol);
            if trial.err <= 1.0 {
                t += h;
                y = trial.y;
                k = trial.dy;
            }
            h *= step_scale(trial.err);
        }
        y
    }

    #[test]
    fn harmonic_oscillator_period() {
        let tol = Tolerance {
            rtol: 1e-10,
            atol: 1e-12,
        };
        let y = integrate(|_, y| [y[1], -y[0]], 0.0, 2.0 * core::f64::consts::PI, [1.0, 0.0], tol);
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8, "{y:?}");
    }

    #[test]
    fn error_estimate_vanishes_on_quartic() {
        // The embedded pair integrates polynomials of degree <= 4 exactly.
        let tol = Tolerance {
            rtol: 1e-12,
            atol: 1e-12,
        };
        let mut f = |t: f64, _: &[f64; 2]| [4.0 * t * t * t, 0.0];
        let k = f(0.0, &[0.0, 0.0]);
        let trial = trial_step(&mut f, 0.0, &[0.0, 0.0], &k, 0.5, tol);
        assert!((trial.y[0] - 0.0625).abs() < 1e-15);
        assert!(trial.err < 1e-2);
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let p = |x: f64| x * x * x - 2.0 * x + 1.0;
        let dp = |x: f64| 3.0 * x * x - 2.0;
        for x in [0.3, 0.5, 0.9] {
            let v = hermite(0.2, 1.1, p(0.2), p(1.1), dp(0.2), dp(1.1), x);
            assert!((v - p(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn limiter_keeps_monotone_data_monotone() {
        let (d0, d1) = limit_slopes(0.0, 1.0, 0.0, 1.0, 10.0, 10.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=100 {
            let v = hermite(0.0, 1.0, 0.0, 1.0, d0, d1, i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn linear_interp_clamps() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 2.0, 3.0];
        assert_eq!(interp_linear(&xs, &ys, -1.0), 0.0);
        assert_eq!(interp_linear(&xs, &ys, 1.5), 2.5);
        assert_eq!(interp_linear(&xs, &ys, 5.0), 3.0);
    }
}
