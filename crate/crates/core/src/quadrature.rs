//! Finite differences and cumulative quadrature on nonuniform grids.

/// Fornberg weights: `w[k][j]` is the weight of `f(x[j])` in the `k`-th
/// derivative at `z`, for `k = 0..=m`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Start of a window of `width` consecutive nodes centred on `i`.
fn window(i: usize, n: usize, width: usize) -> usize {
    let w = width.min(n);
    i.saturating_sub(w / 2).min(n - w)
}

/// `order`-th derivative at every node from a `stencil`-point local
/// polynomial (shifted one-sided near the ends).
pub fn derivative(t: &[f64], f: &[f64], order: usize, stencil: usize) -> Vec<f64> {
    let n = t.len().min(f.len());
    if n <= order {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let s = window(i, n, stencil);
            let e = (s + stencil).min(n);
            let w = fornberg_weights(t[i], &t[s..e], order);
            w[order].iter().zip(&f[s..e]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Running integral `∫_{t[0]}^{t[i]} f` with the quintic through the six
/// nodes around each interval (fewer when the series is short).
pub fn cumulative_integral(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len().min(f.len());
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let width = n.min(6);
    // Three-point Gauss-Legendre is exact for the local quintic.
    let gx = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
    let gw = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    for i in 0..n - 1 {
        let h = t[i + 1] - t[i];
        let s = (i + 1).saturating_sub(width / 2).min(n - width);
        let nodes = &t[s..s + width];
        let mid = 0.5 * (t[i] + t[i + 1]);
        let mut acc = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            let c = fornberg_weights(mid + 0.5 * h * x, nodes, 0);
            acc += w * c[0].iter().zip(&f[s..s + width]).map(|(a, b)| a * b).sum::<f64>();
        }
        out[i + 1] = out[i] + 0.5 * h * acc;
    }
    out
}

/// Trapezoidal running integral, used as a low-order reference.
pub fn cumulative_trapezoid(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len().min(f.len());
    let mut out = vec![0.0; n];
    for i in 1..n {
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    }
    out
}

/// Linear interpolation of `(t, f)` at `z`, clamped to the end values.
pub fn interp_linear(t: &[f64], f: &[f64], z: f64) -> f64 {
    let n = t.len().min(f.len());
    match n {
        0 => f64::NAN,
        1 => f[0],
        _ => {
            if z <= t[0] {
                return f[0];
            }
            if z >= t[n - 1] {
                return f[n - 1];
            }
            let k = t.partition_point(|&x| x <= z).clamp(1, n - 1);
            let (t0, t1) = (t[k - 1], t[k]);
            let w = (z - t0) / (t1 - t0);
            f[k - 1] * (1.0 - w) + f[k] * w
        }
    }
}

/// Evenly spaced grid from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
            v[n - 1] = b;
            v
        }
    }
}
