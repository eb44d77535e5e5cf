//! The boundary integral `eta(sigma, T)` and its diagnostics.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use super::SingularStructure;
use crate::dirichlet::CoefficientSeries;
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::util;

type GFn<'a> = &'a dyn Fn(Complex64) -> Result<Complex64>;

// Wrap a fallible integrand for the real-valued quadrature engine: the first
// error is parked and re-raised after the integration call.
struct ErrTrap {
    slot: RefCell<Option<Error>>,
}

impl ErrTrap {
    fn new() -> Self {
        ErrTrap {
            slot: RefCell::new(None),
        }
    }

    fn guard(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.slot.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self.slot.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn eta_integrand<'a>(g: GFn<'a>, sigma: f64) -> impl Fn(f64) -> Result<f64> + 'a {
    move |tau: f64| {
        let a = g(Complex64::new(2.0 * sigma, tau))?;
        let b = g(Complex64::new(sigma, tau))?;
        Ok((a - b).norm())
    }
}

// Panel seeds: the integrand varies on scale `sigma` near every boundary
// ordinate, so panels are concentrated there before refinement starts.
fn eta_breakpoints(lo: f64, hi: f64, sigma: f64, ordinates: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let mut push = |v: f64| {
        if v > lo && v < hi {
            pts.push(v);
        }
    };
    let mut centers = vec![0.0];
    centers.extend(ordinates.iter().copied());
    centers.extend(ordinates.iter().map(|b| -b));
    for &c in &centers {
        push(c);
        for k in [1.0, 4.0, 16.0, 64.0] {
            push(c + k * sigma);
            push(c - k * sigma);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `eta(sigma, T)` for an arbitrary `G`-type function; `symmetric` means the
/// integrand is even in `tau` (real-coefficient series), in which case the
/// integral runs over `[0, T]` and is doubled.
pub fn eta_g(
    g: GFn,
    sigma: f64,
    t_upper: f64,
    ordinates: &[f64],
    tol: Tolerance,
    symmetric: bool,
) -> Result<(f64, f64)> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("eta: sigma = {sigma} must be positive")));
    }
    if !(t_upper > 0.0) {
        return Err(Error::domain(format!("eta: T = {t_upper} must be positive")));
    }
    let trap = ErrTrap::new();
    let f = eta_integrand(g, sigma);
    let wrapped = |tau: f64| trap.guard(f(tau));
    let lo = if symmetric { 0.0 } else { -t_upper };
    let pts = eta_breakpoints(lo, t_upper, sigma, ordinates);
    let out = quad::integrate_with_breakpoints(wrapped, &pts, tol);
    trap.check()?;
    let out = out?;
    let factor = if symmetric { 2.0 } else { 1.0 };
    Ok((factor * out.value, factor * out.error))
}

/// `eta(sigma, T)` for a series with its declared singular structure.
pub fn eta(
    series: &CoefficientSeries,
    singular: &SingularStructure,
    sigma: f64,
    t_upper: f64,
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let g = |s: Complex64| super::g_eval(series, singular, s);
    let ordinates: Vec<f64> = singular.poles().iter().map(|p| p.b).collect();
    eta_g(&g, sigma, t_upper, &ordinates, tol, series.is_real())
}

/// Cumulative `eta` sample at one `T`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaPoint {
    pub t_upper: f64,
    pub value: f64,
    pub quad_error: f64,
}

/// `eta(sigma, T_j)` for an ascending grid of `T_j`, sharing one quadrature
/// sweep: the integrand is integrated segment by segment and accumulated.
/// Requires the even-integrand case (real coefficients).
pub fn eta_profile(
    series: &CoefficientSeries,
    singular: &SingularStructure,
    sigma: f64,
    t_grid: &[f64],
    tol: Tolerance,
) -> Result<Vec<EtaPoint>> {
    if t_grid.is_empty() {
        return Err(Error::argument("eta_profile: empty T grid"));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) || t_grid[0] <= 0.0 {
        return Err(Error::argument("eta_profile: T grid must be positive ascending"));
    }
    if !series.is_real() {
        // fall back to independent evaluations
        let mut out = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let (v, e) = eta(series, singular, sigma, t, tol)?;
            out.push(EtaPoint {
                t_upper: t,
                value: v,
                quad_error: e,
            });
        }
        return Ok(out);
    }
    let g = |s: Complex64| super::g_eval(series, singular, s);
    let trap = ErrTrap::new();
    let f = eta_integrand(&g, sigma);
    let wrapped = |tau: f64| trap.guard(f(tau));
    let ordinates: Vec<f64> = singular.poles().iter().map(|p| p.b).collect();

    let mut out = Vec::with_capacity(t_grid.len());
    let mut acc = 0.0;
    let mut acc_err = 0.0;
    let mut lo = 0.0;
    for &t in t_grid {
        let pts = eta_breakpoints(lo, t, sigma, &ordinates);
        let seg = quad::integrate_with_breakpoints(&wrapped, &pts, tol);
        trap.check()?;
        let seg = seg?;
        acc += seg.value;
        acc_err += seg.error;
        out.push(EtaPoint {
            t_upper: t,
            value: 2.0 * acc,
            quad_error: 2.0 * acc_err,
        });
        lo = t;
    }
    Ok(out)
}

/// One point of a sigma-sweep at fixed `T`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaSample {
    pub sigma: f64,
    pub value: f64,
    pub quad_error: f64,
}

/// Tabulated `eta(sigma, T)` over a sigma grid at fixed `T`.
#[derive(Debug, Clone, Serialize)]
pub struct EtaCurve {
    pub t_upper: f64,
    pub series_label: String,
    pub singular_label: String,
    pub samples: Vec<EtaSample>,
}

/// Sweep `eta` over a sigma grid at fixed `T`.
pub fn eta_curve(
    series: &CoefficientSeries,
    singular: &SingularStructure,
    sigmas: &[f64],
    t_upper: f64,
    tol: Tolerance,
) -> Result<EtaCurve> {
    let mut samples = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let (value, quad_error) = eta(series, singular, sigma, t_upper, tol)?;
        samples.push(EtaSample {
            sigma,
            value,
            quad_error,
        });
    }
    Ok(EtaCurve {
        t_upper,
        series_label: series.label().to_string(),
        singular_label: format!("{} terms", singular.term_count()),
        samples,
    })
}

/// Same sweep for a raw `G` closure (synthetic diagnostics).
pub fn eta_curve_g(
    g: GFn,
    label: &str,
    sigmas: &[f64],
    t_upper: f64,
    ordinates: &[f64],
    tol: Tolerance,
    symmetric: bool,
) -> Result<EtaCurve> {
    let mut samples = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let (value, quad_error) = eta_g(g, sigma, t_upper, ordinates, tol, symmetric)?;
        samples.push(EtaSample {
            sigma,
            value,
            quad_error,
        });
    }
    Ok(EtaCurve {
        t_upper,
        series_label: label.to_string(),
        singular_label: String::new(),
        samples,
    })
}

/// Pole-order diagnostic from the sigma-scaling of `eta`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoleOrderEstimate {
    pub m_hat: u32,
    /// R^2 of the log-log fit (1.0 for the degenerate all-zero curve)
    pub fit_quality: f64,
    pub slope: f64,
}

/// Least-squares slope `p` of `log eta` against `log sigma`;
/// `m_hat = round(1 - p)` clamped at 0, with `m_hat = 0` when the curve
/// vanishes.
pub fn estimate_pole_order(curve: &EtaCurve) -> Result<PoleOrderEstimate> {
    if curve.samples.len() < 4 {
        return Err(Error::argument(format!(
            "pole-order estimate needs >= 4 samples (got {})",
            curve.samples.len()
        )));
    }
    let scale = curve
        .samples
        .iter()
        .map(|s| s.value)
        .fold(0.0f64, f64::max);
    if scale <= 1e-12 {
        return Ok(PoleOrderEstimate {
            m_hat: 0,
            fit_quality: 1.0,
            slope: 0.0,
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &curve.samples {
        if s.value > 1e-300 {
            xs.push(s.sigma.ln());
            ys.push(s.value.ln());
        }
    }
    let (slope, _, r2) = util::linear_fit(&xs, &ys)?;
    let m = (1.0 - slope).round().max(0.0) as u32;
    Ok(PoleOrderEstimate {
        m_hat: m,
        fit_quality: r2,
        slope,
    })
}

/// Explicit ledger bound for the principal part's contribution to `eta`:
/// each singular term `a/(s-ib)^j` contributes at most
/// `2 |a| (j+1) sigma^{-(j-1)}`. Terms at `b = 0` combine conjugates into a
/// single coefficient `2 Re c`; terms at `b > 0` count twice, once per
/// conjugate ordinate.
pub fn eta_principal_split(singular: &SingularStructure, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!(
            "eta_principal_split: sigma = {sigma} must be positive"
        )));
    }
    let mut bound = 0.0;
    for (b, omega, c) in singular.terms() {
        let j = omega + 1.0;
        let per_term = |a: f64| 2.0 * a * (j + 1.0) * sigma.powf(-(j - 1.0));
        if b == 0.0 {
            bound += per_term((2.0 * c.re).abs());
        } else {
            bound += 2.0 * per_term(c.norm());
        }
    }
    Ok(bound)
}

/// Leading Laurent coefficients of `f` at the boundary point `s = -i b`:
/// returns `[c_m, c_{m-1}, ..., c_1]` where
/// `f(-i b + sigma) = c_m/sigma^m + ... + c_1/sigma + O(1)`.
///
/// Contour-free: fit `f(-ib + sigma) sigma^m` by a polynomial on a shrinking
/// geometric sigma-grid until the leading coefficients stabilize.
pub fn laurent_coefficients(
    f: GFn,
    b: f64,
    order: usize,
    tol: f64,
) -> Result<Vec<Complex64>> {
    if order == 0 {
        return Err(Error::argument("laurent_coefficients: order must be >= 1"));
    }
    let deg = order + 4;
    let n_pts = 2 * deg + 10;
    let fit_at = |sigma_hi: f64| -> Result<Vec<Complex64>> {
        let sigmas = util::geomspace(sigma_hi / 24.0, sigma_hi, n_pts);
        let mut re = Vec::with_capacity(n_pts);
        let mut im = Vec::with_capacity(n_pts);
        for &s in &sigmas {
            let v = f(Complex64::new(s, -b))? * s.powi(order as i32);
            re.push(v.re);
            im.push(v.im);
        }
        let cr = util::polyfit(&sigmas, &re, deg)?;
        let ci = util::polyfit(&sigmas, &im, deg)?;
        // coefficient of sigma^k is c_{m-k}
        Ok((0..order)
            .map(|k| Complex64::new(cr[k], ci[k]))
            .collect())
    };
    let mut sigma_hi = 0.5;
    let mut best = fit_at(sigma_hi)?;
    for _ in 0..8 {
        sigma_hi /= 2.0;
        let next = fit_at(sigma_hi)?;
        let diff: f64 = best
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale: f64 = next.iter().map(|c| c.norm()).fold(1.0, f64::max);
        best = next;
        if diff <= tol * scale {
            return Ok(best);
        }
    }
    Err(Error::precision(
        "laurent_coefficients did not stabilize".to_string(),
        best.first().map(|c| c.re),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::{zeta_pair, CatalogKind};
    use crate::tauber::catalog_singular;

    fn pow_g(m: i32) -> impl Fn(Complex64) -> Result<Complex64> {
        move |s: Complex64| Ok(s.powi(-m))
    }

    #[test]
    fn eta_zero_for_constant_g() {
        let g = pow_g(0); // G = 1
        let (v, _) = eta_g(&g, 0.1, 5.0, &[], Tolerance::default(), true).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn eta_double_pole_scaling_against_oracle() {
        // G = 1/s^2: eta(sigma,1) * sigma stays within fixed bounds, and the
        // value matches a fine Riemann sum
        let g = pow_g(2);
        let mut ratios = Vec::new();
        for &sigma in &[1e-3, 1e-2, 1e-1] {
            let (v, _) = eta_g(&g, sigma, 1.0, &[], Tolerance::default(), true).unwrap();
            ratios.push(v * sigma);
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        assert!(lo > 0.5 && hi < 4.0, "ratios: {ratios:?}");

        // brute-force oracle at sigma = 0.1
        let sigma = 0.1;
        let n = 800_000;
        let h = 2.0 / n as f64;
        let f = |t: f64| {
            let a = Complex64::new(2.0 * sigma, t).powi(-2);
            let b = Complex64::new(sigma, t).powi(-2);
            (a - b).norm()
        };
        let mut oracle = 0.0;
        for i in 0..n {
            let t = -1.0 + (i as f64 + 0.5) * h;
            oracle += f(t) * h;
        }
        let (v, err) = eta_g(&g, sigma, 1.0, &[], Tolerance::default(), true).unwrap();
        assert!((v - oracle).abs() < 1e-5 + 10.0 * err, "{v} vs {oracle}");
    }

    #[test]
    fn eta_symmetric_equals_full_range() {
        let series = CoefficientSeries::catalog(CatalogKind::VonMangoldt, 10_000).unwrap();
        let singular = catalog_singular(CatalogKind::VonMangoldt);
        let sigma = 0.2;
        let g = |s: Complex64| super::super::g_eval(&series, &singular, s);
        let (half, _) = eta_g(&g, sigma, 6.0, &[0.0], Tolerance::default(), true).unwrap();
        let (full, _) = eta_g(&g, sigma, 6.0, &[0.0], Tolerance::default(), false).unwrap();
        assert!((half - full).abs() < 1e-8, "half {half} vs full {full}");
    }

    #[test]
    fn eta_vanishes_with_sigma_for_analytic_g() {
        // entire function: eta(sigma,T) -> 0 as sigma -> 0
        let g = |s: Complex64| Ok((s * 0.7).exp());
        let mut prev = f64::INFINITY;
        for j in 1..=5 {
            let sigma = 2.0f64.powi(-(2 * j));
            let (v, _) = eta_g(&g, sigma, 2.0, &[], Tolerance::default(), true).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn eta_profile_cumulative_matches_pointwise() {
        let series = CoefficientSeries::catalog(CatalogKind::Unit, 1000).unwrap();
        let singular = catalog_singular(CatalogKind::Unit);
        let sigma = 0.15;
        let grid = [1.0, 3.0, 9.0];
        let prof = eta_profile(&series, &singular, sigma, &grid, Tolerance::default()).unwrap();
        for (i, &t) in grid.iter().enumerate() {
            let (v, _) = eta(&series, &singular, sigma, t, Tolerance::default()).unwrap();
            assert!(
                (prof[i].value - v).abs() < 1e-7,
                "T={t}: {} vs {v}",
                prof[i].value
            );
        }
        // nondecreasing in T
        assert!(prof[0].value <= prof[1].value && prof[1].value <= prof[2].value);
        assert!(eta_profile(&series, &singular, sigma, &[], Tolerance::default()).is_err());
        assert!(eta_profile(&series, &singular, sigma, &[3.0, 1.0], Tolerance::default()).is_err());
    }

    #[test]
    fn pole_order_round_trip() {
        let sigmas = util::geomspace(1e-4, 1e-1, 10);
        for m in 0..=3i32 {
            let g = pow_g(m);
            let curve = eta_curve_g(
                &g,
                &format!("s^-{m}"),
                &sigmas,
                1.0,
                &[],
                Tolerance::default(),
                true,
            )
            .unwrap();
            let est = estimate_pole_order(&curve).unwrap();
            assert_eq!(est.m_hat, m as u32, "m={m}: slope {}", est.slope);
        }
    }

    #[test]
    fn pole_order_needs_samples() {
        let curve = EtaCurve {
            t_upper: 1.0,
            series_label: "x".into(),
            singular_label: String::new(),
            samples: vec![
                EtaSample { sigma: 0.1, value: 1.0, quad_error: 0.0 },
                EtaSample { sigma: 0.01, value: 1.0, quad_error: 0.0 },
            ],
        };
        assert!(estimate_pole_order(&curve).is_err());
    }

    #[test]
    fn principal_split_values() {
        // single simple pole with 2 Re c = 1: 2 * 1 * 2 = 4, sigma-free
        let s = SingularStructure::single(0.0, Complex64::new(0.5, 0.0)).unwrap();
        assert!((eta_principal_split(&s, 0.3).unwrap() - 4.0).abs() < 1e-12);
        assert!((eta_principal_split(&s, 0.01).unwrap() - 4.0).abs() < 1e-12);
        // empty principal part
        assert_eq!(eta_principal_split(&SingularStructure::empty(), 0.1).unwrap(), 0.0);
        // a = 2, j = 2 at sigma = 0.1: 2*2*3/0.1 = 120
        let s2 = SingularStructure::single(1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((eta_principal_split(&s2, 0.1).unwrap() - 120.0).abs() < 1e-9);
    }

    #[test]
    fn principal_split_majorizes_measured_eta() {
        let s = SingularStructure::single(1.0, Complex64::new(1.0, 0.0)).unwrap();
        let g = {
            let s = s.clone();
            move |z: Complex64| Ok(-s.singular_sum(z))
        };
        // |eta of the pure principal part| <= ledger bound
        for &sigma in &[0.05, 0.2] {
            let (v, _) = eta_g(&g, sigma, 50.0, &[0.0], Tolerance::default(), true).unwrap();
            assert!(v <= eta_principal_split(&s, sigma).unwrap());
        }
    }

    #[test]
    fn laurent_fit_simple_and_double_pole() {
        // f = 3/s + analytic
        let f = |s: Complex64| Ok(3.0 / s + s.exp());
        let c = laurent_coefficients(&f, 0.0, 1, 1e-8).unwrap();
        assert!((c[0] - Complex64::new(3.0, 0.0)).norm() < 1e-7, "{:?}", c);

        // divisor transform: zeta^2(s+1)/(s+1) = 1/s^2 + (2 gamma - 1)/s + ...
        let f2 = |s: Complex64| {
            let (z, _) = zeta_pair(s + 1.0)?;
            Ok(z * z / (s + 1.0))
        };
        let c2 = laurent_coefficients(&f2, 0.0, 2, 1e-8).unwrap();
        assert!((c2[0] - Complex64::new(1.0, 0.0)).norm() < 1e-6, "c2 = {:?}", c2);
        let expected = 2.0 * util::EULER_GAMMA - 1.0;
        assert!((c2[1] - Complex64::new(expected, 0.0)).norm() < 1e-6, "c1 = {:?}", c2);
    }

    #[test]
    fn laurent_fit_off_axis_pole() {
        // residue 1/(1-i) at s = -i, as for the cosine-twisted series
        let f = |s: Complex64| {
            let (z, zd) = zeta_pair(s + Complex64::new(1.0, 1.0))?;
            let (z2, zd2) = zeta_pair(s + Complex64::new(1.0, -1.0))?;
            Ok((-(zd / z) - (zd2 / z2)) / (s + 1.0))
        };
        let c = laurent_coefficients(&f, 1.0, 1, 1e-8).unwrap();
        let expected = Complex64::new(0.5, 0.5); // 1/(1-i)
        assert!((c[0] - expected).norm() < 1e-6, "{:?}", c);
    }
}
