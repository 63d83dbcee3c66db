//! Small numerical building blocks: compensated summation, cumulative
//! Simpson quadrature, classical RK4 stepping and cubic Hermite evaluation.

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Compensated arithmetic mean; `0.0` for an empty input.
pub fn compensated_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Running integral of uniformly spaced samples, starting at zero.
///
/// Even nodes get the composite Simpson value. Odd nodes add a four-point
/// rule over the preceding half panel, so every node is exact on cubics.
pub fn cumulative_simpson(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * dx * (values[0] + values[1]);
        return out;
    }
    let f = values;
    // integral over [x_k, x_{k+1}]
    let half = |k: usize| -> f64 {
        if n < 4 {
            dx / 12.0 * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2])
        } else if k + 3 < n {
            dx / 24.0 * (9.0 * f[k] + 19.0 * f[k + 1] - 5.0 * f[k + 2] + f[k + 3])
        } else if k + 2 < n && k >= 1 {
            dx / 24.0 * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2])
        } else {
            dx / 24.0 * (f[k - 2] - 5.0 * f[k - 1] + 19.0 * f[k] + 9.0 * f[k + 1])
        }
    };
    let mut k = 0;
    while k + 2 < n {
        out[k + 1] = out[k] + half(k);
        out[k + 2] = out[k] + dx / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
        k += 2;
    }
    if k + 1 < n {
        out[k + 1] = out[k] + half(k);
    }
    out
}

/// Composite Simpson integral of `f` over `[a, b]` with `panels` (rounded up
/// to even) subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let dx = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * dx);
    }
    acc * dx / 3.0
}

/// One classical fourth-order Runge-Kutta step for an autonomous system.
pub fn rk4_step<const N: usize, F>(rhs: &F, y: &[f64; N], dt: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let axpy = |base: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *base;
        for (o, kv) in out.iter_mut().zip(k) {
            *o += s * kv;
        }
        out
    };
    let k1 = rhs(y);
    let k2 = rhs(&axpy(y, &k1, 0.5 * dt));
    let k3 = rhs(&axpy(y, &k2, 0.5 * dt));
    let k4 = rhs(&axpy(y, &k3, dt));
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Cubic Hermite interpolant on `[x0, x1]` from values and slopes.
pub fn hermite(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
}
