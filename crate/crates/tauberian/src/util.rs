//! Small shared helpers: grids, deterministic float formatting, least squares.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `n` geometrically spaced points from `a` to `b` inclusive (`a`, `b` > 0).
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0 && n >= 2, "geomspace needs a,b>0 and n>=2");
    let la = a.ln();
    let lb = b.ln();
    let step = (lb - la) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| (la + step * i as f64).exp()).collect();
    // pin the endpoints exactly
    out[0] = a;
    out[n - 1] = b;
    out
}

/// `n` linearly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    out[0] = a;
    out[n - 1] = b;
    out
}

/// Deterministic 15-significant-digit formatting used by every CSV/plot writer.
pub fn fmt_g15(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v }; // normalize -0.0
    format!("{:.14e}", v)
}

/// Solve the square system `a x = b` by Gaussian elimination with partial
/// pivoting. `a` is row-major `n x n`. Used for the tiny Vandermonde systems
/// of the Laurent-coefficient fit.
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::argument("solve_dense: shape mismatch"));
    }
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_abs < 1e-300 {
            return Err(Error::precision("solve_dense: singular system", None));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Ok(x)
}

/// Least-squares polynomial fit `y ~ sum_k c_k x^k`, degree `deg`, via normal
/// equations. Returns coefficients `c_0..c_deg`.
pub fn polyfit(xs: &[f64], ys: &[f64], deg: usize) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.len() <= deg {
        return Err(Error::argument("polyfit: need more points than degree"));
    }
    let n = deg + 1;
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![0.0; n];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut pows = vec![1.0; 2 * n - 1];
        for k in 1..2 * n - 1 {
            pows[k] = pows[k - 1] * x;
        }
        for i in 0..n {
            atb[i] += pows[i] * y;
            for j in 0..n {
                ata[i][j] += pows[i + j];
            }
        }
    }
    solve_dense(&mut ata, &mut atb)
}

/// Slope and intercept of the least-squares line through `(x_i, y_i)`,
/// plus the coefficient of determination R^2.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::argument("linear_fit: need at least 2 points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::argument("linear_fit: degenerate abscissas"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, intercept, r2))
}
