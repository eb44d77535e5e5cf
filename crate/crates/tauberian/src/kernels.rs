//! Special functions and kernel integrals.
//!
//! - Fejer kernels `chi(u) = (1/2pi) (sin(u/2)/(u/2))^2`, `chi_T(u) = T chi(Tu)`,
//!   their triangular Fourier transform, and the tail mass
//!   `I_q = int_{|u|>q} chi`.
//! - The vertical-line integrals
//!   `W_m(sigma,T) = int_0^T dt/|sigma+it|^m` and
//!   `Z_m(sigma,T) = int_0^T dt/(|sigma+it|^m |1+sigma+it|)`.
//! - `beta(omega,t) = t^omega e^{-t}(1-e^{-t})/Gamma(omega+1)` for `t>0`.
//! - A Lanczos Gamma function (reflection below 1/2).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const TWO_PI: f64 = 2.0 * PI;

/// Fejer kernel `chi(u)`; even, nonnegative, total mass 1, `chi(0) = 1/(2pi)`.
pub fn fejer_chi(u: f64) -> f64 {
    let half = 0.5 * u;
    let sinc = if half.abs() < 1e-8 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    sinc * sinc / TWO_PI
}

/// Scaled kernel `chi_T(u) = T chi(T u)`.
pub fn fejer_chi_t(t_scale: f64, u: f64) -> Result<f64> {
    if !(t_scale > 0.0) {
        return Err(Error::domain(format!("fejer_chi_t: T = {t_scale} must be positive")));
    }
    Ok(t_scale * fejer_chi(t_scale * u))
}

/// Fourier transform of `chi_T`: the triangle `(1 - |tau|/T)_+`.
pub fn fejer_hat(t_scale: f64, tau: f64) -> Result<f64> {
    if !(t_scale > 0.0) {
        return Err(Error::domain(format!("fejer_hat: T = {t_scale} must be positive")));
    }
    Ok((1.0 - tau.abs() / t_scale).max(0.0))
}

// Asymptotic tail of the sine integral: int_x^inf sin t / t dt for large x,
// computed as cos(x)/x * P(x) + sin(x)/x^2 * Q(x) with
// P = 1 - 2!/x^2 + 4!/x^4 - ..., Q = 1 - 3!/x^2 + 5!/x^4 - ...
fn si_tail_large(x: f64) -> f64 {
    let ix2 = 1.0 / (x * x);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut even_fact = 1.0; // (2k)!
    let mut pw = 1.0;
    for k in 0..9 {
        let odd_fact = even_fact * (2 * k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        p += sign * even_fact * pw;
        q += sign * odd_fact * pw;
        pw *= ix2;
        even_fact = odd_fact * (2 * k + 2) as f64;
    }
    (x.cos() / x) * p + (x.sin() / (x * x)) * q
}

/// Tail mass `I_q = int_{|u|>q} chi(u) du`; strictly decreasing in `q`,
/// bounded by `min(1, 4/(pi q))`.
pub fn fejer_tail(q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::domain(format!("fejer_tail: q = {q} must be positive")));
    }
    if q >= 50.0 {
        // chi(u) = (1 - cos u)/(pi u^2); integrating by parts,
        // int_q^inf chi = (1/pi) [ (1-cos q)/q + int_q^inf sin u / u du ].
        let v = (2.0 / PI) * ((1.0 - q.cos()) / q + si_tail_large(q));
        return Ok(v.clamp(0.0, 1.0));
    }
    let inner = quad::integrate_oscillatory(fejer_chi, 0.0, q, 1.0, Tolerance::new(1e-13, 1e-12))?;
    Ok((1.0 - 2.0 * inner.value).clamp(0.0, 1.0))
}

/// Parameters of the vertical-line integrals `W_m` and `Z_m`.
///
/// `t_upper` may be `f64::INFINITY` for the improper variants.
#[derive(Debug, Clone, Copy)]
pub struct WallisQuery {
    pub m: f64,
    pub sigma: f64,
    pub t_upper: f64,
}

impl WallisQuery {
    pub fn new(m: f64, sigma: f64, t_upper: f64) -> Result<Self> {
        if !(m >= 0.0) {
            return Err(Error::domain(format!("wallis: m = {m} must be >= 0")));
        }
        if !(sigma >= 0.0) {
            return Err(Error::domain(format!("wallis: sigma = {sigma} must be >= 0")));
        }
        if !(t_upper >= 0.0) {
            return Err(Error::domain(format!("wallis: T = {t_upper} must be >= 0")));
        }
        Ok(WallisQuery { m, sigma, t_upper })
    }
}

// Shared tail: int_X^T dt / (|sigma+it|^m |1+sigma+it|^e) with e in {0, 1},
// via u = 1/t. The transformed integrand is
// u^{m+e-2} (1+sigma^2 u^2)^{-m/2} (1+(1+sigma)^2 u^2)^{-e/2}.
fn wallis_tail(
    m: f64,
    sigma: f64,
    extra: f64,
    x_cut: f64,
    t_upper: f64,
    tol: Tolerance,
) -> Result<f64> {
    let alpha = m + extra - 2.0;
    let g = move |u: f64| {
        let a = (1.0 + sigma * sigma * u * u).powf(-0.5 * m);
        let b = if extra == 0.0 {
            1.0
        } else {
            let s1 = 1.0 + sigma;
            (1.0 + s1 * s1 * u * u).powf(-0.5 * extra)
        };
        a * b
    };
    let hi = 1.0 / x_cut;
    if t_upper.is_infinite() {
        if alpha <= -1.0 {
            return Err(Error::domain(
                "wallis: improper integral diverges at infinity".to_string(),
            ));
        }
        if alpha < 0.0 {
            return Ok(quad::integrate_power_endpoint(g, alpha, hi, tol)?.value);
        }
        return Ok(quad::integrate(|u| u.powf(alpha) * g(u), 0.0, hi, tol)?.value);
    }
    let lo = 1.0 / t_upper;
    Ok(quad::integrate(|u| u.powf(alpha) * g(u), lo, hi, tol)?.value)
}

// Breakpoints concentrating panels at the scale of the peak near t = 0.
fn peak_breakpoints(sigma: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut s = sigma.max(1e-6);
    while s < upper {
        pts.push(s);
        s *= 4.0;
    }
    pts.push(upper);
    pts.dedup();
    pts
}

/// `W_m(sigma, T) = int_0^T dt / |sigma + it|^m`.
///
/// Satisfies the scaling law `W_m(sigma,T) = sigma^{1-m} W_m(1, T/sigma)`
/// for `sigma > 0`, and `W_m(1, inf) < m/(m-1)` for `m > 1`. The integral is
/// evaluated in the original coordinates so the scaling law stays an
/// independent check.
pub fn wallis_w(q: &WallisQuery) -> Result<f64> {
    let tol = Tolerance::new(1e-12, 1e-11);
    let WallisQuery { m, sigma, t_upper } = *q;
    if t_upper == 0.0 {
        return Ok(0.0);
    }
    if sigma == 0.0 {
        if m >= 1.0 {
            return Err(Error::domain(
                "wallis_w: sigma = 0 with m >= 1 diverges at 0".to_string(),
            ));
        }
        if t_upper.is_infinite() {
            return Err(Error::domain(
                "wallis_w: m < 1 with T = inf diverges at infinity".to_string(),
            ));
        }
        // exact: int_0^T t^{-m} dt
        return Ok(t_upper.powf(1.0 - m) / (1.0 - m));
    }
    if t_upper.is_infinite() && m <= 1.0 {
        return Err(Error::domain(
            "wallis_w: m <= 1 with T = inf diverges at infinity".to_string(),
        ));
    }
    let integrand = move |t: f64| (sigma * sigma + t * t).powf(-0.5 * m);
    let x_cut = 4.0 * sigma.max(1.0);
    if t_upper <= x_cut {
        let mut pts = peak_breakpoints(sigma, t_upper);
        pts.retain(|&p| p <= t_upper);
        if *pts.last().unwrap() < t_upper {
            pts.push(t_upper);
        }
        return Ok(quad::integrate_with_breakpoints(integrand, &pts, tol)?.value);
    }
    let head = quad::integrate_with_breakpoints(integrand, &peak_breakpoints(sigma, x_cut), tol)?;
    let tail = wallis_tail(m, sigma, 0.0, x_cut, t_upper, tol)?;
    Ok(head.value + tail)
}

/// `Z_m(sigma, T) = int_0^T dt / (|sigma+it|^m |1+sigma+it|)`.
pub fn wallis_z(q: &WallisQuery) -> Result<f64> {
    let tol = Tolerance::new(1e-12, 1e-11);
    let WallisQuery { m, sigma, t_upper } = *q;
    if t_upper == 0.0 {
        return Ok(0.0);
    }
    if sigma == 0.0 && m >= 1.0 {
        return Err(Error::domain(
            "wallis_z: sigma = 0 with m >= 1 diverges at 0".to_string(),
        ));
    }
    if t_upper.is_infinite() && m == 0.0 {
        return Err(Error::domain(
            "wallis_z: m = 0 with T = inf diverges at infinity".to_string(),
        ));
    }
    let s1 = 1.0 + sigma;
    let smooth = move |t: f64| (s1 * s1 + t * t).powf(-0.5);
    let x_cut = 4.0 * sigma.max(1.0);
    let head_upper = t_upper.min(x_cut);
    let head = if sigma == 0.0 {
        // integrable t^{-m} singularity at 0 (m < 1 here)
        quad::integrate_power_endpoint(smooth, -m, head_upper, tol)?.value
    } else {
        let integrand = move |t: f64| (sigma * sigma + t * t).powf(-0.5 * m) * smooth(t);
        let mut pts = peak_breakpoints(sigma, head_upper);
        pts.retain(|&p| p <= head_upper);
        if *pts.last().unwrap() < head_upper {
            pts.push(head_upper);
        }
        quad::integrate_with_breakpoints(integrand, &pts, tol)?.value
    };
    if t_upper <= x_cut {
        return Ok(head);
    }
    let tail = wallis_tail(m, sigma, 1.0, x_cut, t_upper, tol)?;
    Ok(head + tail)
}

/// Arguments of `beta`.
#[derive(Debug, Clone, Copy)]
pub struct BetaQuery {
    pub omega: f64,
    pub t: f64,
}

impl BetaQuery {
    pub fn new(omega: f64, t: f64) -> Result<Self> {
        if !(omega > -1.0) {
            return Err(Error::domain(format!("beta: omega = {omega} must exceed -1")));
        }
        Ok(BetaQuery { omega, t })
    }
}

/// `beta(omega, t)`: zero for `t <= 0`, else
/// `t^omega e^{-t} (1 - e^{-t}) / Gamma(omega+1)`; bounded by `1/sqrt(pi)`.
///
/// Evaluated in log space so large `omega ln t` cannot overflow.
pub fn beta(q: &BetaQuery) -> Result<f64> {
    let BetaQuery { omega, t } = *q;
    if !(omega > -1.0) {
        return Err(Error::domain(format!("beta: omega = {omega} must exceed -1")));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    let log_mag = omega * t.ln() - ln_gamma(omega + 1.0)? - t;
    Ok(log_mag.exp() * (-(-t).exp_m1()))
}

/// Signed margin of the difference bound
/// `|beta(omega,x+y) - beta(omega,x)| <= y^{omega+1} + 2y/sqrt(pi)`;
/// nonnegative when the bound holds.
pub fn beta_diff_bound_margin(omega: f64, x: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain(format!(
            "beta difference bound: y = {y} must be positive"
        )));
    }
    let b1 = beta(&BetaQuery::new(omega, x + y)?)?;
    let b0 = beta(&BetaQuery::new(omega, x)?)?;
    Ok(y.powf(omega + 1.0) + 2.0 * y / SQRT_PI - (b1 - b0).abs())
}

/// True iff the difference bound holds at `(omega, x, y)` (up to rounding).
pub fn beta_diff_bound_check(omega: f64, x: f64, y: f64) -> Result<bool> {
    Ok(beta_diff_bound_margin(omega, x, y)? >= -1e-12)
}

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_series(z: f64) -> f64 {
    let mut a = LANCZOS_P[0];
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        a += p / (z + i as f64);
    }
    a
}

/// Gamma function for real `x` away from the poles `0, -1, -2, ...`.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::domain(format!("gamma: pole at x = {x}")));
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(TWO_PI.sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_series(z))
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("ln_gamma: x = {x} must be positive")));
    }
    if x < 0.5 {
        return Ok(PI.ln() - (PI * x).sin().ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * TWO_PI.ln() + (z + 0.5) * t.ln() - t + lanczos_series(z).ln())
}
