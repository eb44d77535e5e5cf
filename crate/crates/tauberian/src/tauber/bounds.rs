//! Hypothesis checks, growth checks, and end-to-end bound verification.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use super::eta::{eta_profile, EtaPoint};
use super::rho::{
    optimize_t, rho_increasing, rho_moderate, rho_slow, rho_slow_cor_form, x0_moderate, x0_slow,
    ModerateBoundParams, SlowBoundParams,
};
use super::{main_term, SingularStructure};
use crate::dirichlet::CoefficientSeries;
use crate::error::{Error, Result};
use crate::kernels::{self, WallisQuery};
use crate::quad::{self, Tolerance};

/// One sigma row of the transform-integral comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralBoundRow {
    pub sigma: f64,
    pub integral: f64,
    pub comparator: f64,
    pub ratio: f64,
}

/// Comparison of `int_0^T |A(1+sigma+it)| / |1+sigma+it| dt` against the
/// vertical-line model `Z_m(sigma, inf)` (or `Z_0(sigma, T)` when `m = 0`).
#[derive(Debug, Clone, Serialize)]
pub struct IntegralBoundReport {
    pub m: f64,
    pub t_upper: f64,
    pub rows: Vec<IntegralBoundRow>,
    /// smallest admissible constant `K1`
    pub k1_min: f64,
}

/// Per-sigma comparison of the transform line integral against the model;
/// reports the smallest admissible `K1`.
pub fn check_transform_integral_bound(
    series: &CoefficientSeries,
    m: f64,
    t_upper: f64,
    sigmas: &[f64],
    tol: Tolerance,
) -> Result<IntegralBoundReport> {
    if !(m >= 0.0) {
        return Err(Error::argument(format!("m = {m} must be >= 0")));
    }
    if sigmas.is_empty() {
        return Err(Error::argument("empty sigma grid"));
    }
    let mut rows = Vec::with_capacity(sigmas.len());
    let mut k1_min: f64 = 0.0;
    for &sigma in sigmas {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::argument(format!("sigma = {sigma} must lie in (0,1)")));
        }
        let err_slot: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |t: f64| {
            let s = Complex64::new(1.0 + sigma, t);
            match series.transform_closed(s) {
                Ok(a) => a.norm() / s.norm(),
                Err(e) => {
                    err_slot.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let mut pts: Vec<f64> = [0.0, sigma, 4.0 * sigma, 1.0, t_upper]
            .into_iter()
            .filter(|&p| p <= t_upper)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let out = quad::integrate_with_breakpoints(integrand, &pts, tol);
        if let Some(e) = err_slot.into_inner() {
            return Err(e);
        }
        let integral = out?.value;
        let comparator = if m > 0.0 {
            kernels::wallis_z(&WallisQuery::new(m, sigma, f64::INFINITY)?)?
        } else {
            kernels::wallis_z(&WallisQuery::new(0.0, sigma, t_upper)?)?
        };
        let ratio = integral / comparator;
        k1_min = k1_min.max(ratio);
        rows.push(IntegralBoundRow {
            sigma,
            integral,
            comparator,
            ratio,
        });
    }
    Ok(IntegralBoundReport {
        m,
        t_upper,
        rows,
        k1_min,
    })
}

/// Smallest constant in the growth conclusion `|A(x)| <= C x ln^{(m-1)_+} x`
/// (or `C x ln ln x` when `m = 1`, for `x >= e^e`).
#[derive(Debug, Clone, Serialize)]
pub struct GrowthBoundReport {
    pub m: f64,
    pub c_min: f64,
    pub envelope: &'static str,
}

pub fn check_summatory_growth(
    series: &CoefficientSeries,
    m: f64,
    x_grid: &[f64],
) -> Result<GrowthBoundReport> {
    let one = m == 1.0;
    let floor_x = if one {
        std::f64::consts::E.powf(std::f64::consts::E)
    } else {
        std::f64::consts::E
    };
    let mut c_min: f64 = 0.0;
    let mut seen = false;
    for &x in x_grid.iter().filter(|&&x| x >= floor_x) {
        seen = true;
        let denom = if one {
            x * x.ln().ln()
        } else {
            x * x.ln().powf((m - 1.0).max(0.0))
        };
        c_min = c_min.max(series.summatory(x)?.abs() / denom);
    }
    if !seen {
        return Err(Error::argument(format!(
            "growth check: no grid point at or beyond {floor_x}"
        )));
    }
    Ok(GrowthBoundReport {
        m,
        c_min,
        envelope: if one { "x lnln x" } else { "x ln^{(m-1)+} x" },
    })
}

/// Extra data required by the `mu = 0` branch of the eta-to-integral
/// transfer: the transform value at 2, the decrease constant `k*`, and the
/// log-power offset `mu0`.
#[derive(Debug, Clone, Copy)]
pub struct GrowthChainParams {
    pub a_at_two: f64,
    pub k_star: f64,
    pub mu0: f64,
}

/// Convert an `eta(sigma,T) <= k sigma^{-mu}` bound into the constant `K'`
/// of the transform-integral comparison: `k/(1 - 2^{-mu})` for `mu > 0`, and
/// `(2/ln 2)(K* T + k)` with `K* = A(2)/2 + 2 e Gamma(2 + mu0) k*` for
/// `mu = 0`.
pub fn eta_to_integral_constant(
    k: f64,
    mu: f64,
    t_upper: f64,
    chain: Option<GrowthChainParams>,
) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::argument(format!("k = {k} must be >= 0")));
    }
    if mu > 0.0 {
        return Ok(k / (1.0 - 2.0f64.powf(-mu)));
    }
    if mu < 0.0 {
        return Err(Error::argument(format!("mu = {mu} must be >= 0")));
    }
    let chain = chain.ok_or_else(|| {
        Error::argument(
            "mu = 0 requires the decrease-condition parameters (A(2), k*, mu0)".to_string(),
        )
    })?;
    let k_star_cap = chain.a_at_two / 2.0
        + 2.0 * std::f64::consts::E * kernels::gamma(2.0 + chain.mu0)? * chain.k_star;
    Ok(2.0 / std::f64::consts::LN_2 * (k_star_cap * t_upper + k))
}

/// Regime selector for [`verify_bound`].
#[derive(Clone)]
pub enum Regime {
    Moderate(ModerateBoundParams),
    Increasing,
    Slow(SlowBoundParams),
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Moderate(_) => "moderate",
            Regime::Increasing => "increasing",
            Regime::Slow(_) => "slow",
        }
    }

    fn x0(&self, t: f64) -> f64 {
        match self {
            Regime::Moderate(_) | Regime::Increasing => x0_moderate(t),
            Regime::Slow(_) => {
                if t >= 1.0 {
                    std::f64::consts::E.max((17.0 / t.sqrt()).exp())
                } else {
                    x0_slow(t)
                }
            }
        }
    }

    fn rho(
        &self,
        x: f64,
        t: f64,
        singular: &SingularStructure,
        eta_value: f64,
    ) -> Result<f64> {
        match self {
            Regime::Moderate(p) => rho_moderate(x, t, singular, p, eta_value),
            Regime::Increasing => rho_increasing(x, t, singular, eta_value),
            Regime::Slow(p) => {
                if t >= 1.0 {
                    rho_slow_cor_form(x, t, singular, p, eta_value)
                } else {
                    rho_slow(x, t, singular, p, eta_value)
                }
            }
        }
    }
}

/// Options for the end-to-end verification sweep.
#[derive(Debug, Clone)]
pub struct VerifyOpts {
    /// ascending candidate T values
    pub t_grid: Vec<f64>,
    pub eta_tol: Tolerance,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts {
            t_grid: super::rho::default_t_grid(1.0, 1024.0, 8),
            eta_tol: Tolerance::new(1e-8, 1e-7),
        }
    }
}

/// Per-x verification record.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub x: f64,
    pub a_of_x: f64,
    pub main_term: f64,
    pub rho: f64,
    pub t_used: f64,
    /// `|A(x) - main| / (x rho)`; the row passes at `<= 1`
    pub residual_ratio: f64,
    pub x0_check: bool,
}

/// Feasible row or an explicitly infeasible one (never silently re-scoped).
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundRow {
    Feasible(BoundReport),
    Infeasible { x: f64, reason: String },
}

impl BoundRow {
    pub fn report(&self) -> Option<&BoundReport> {
        match self {
            BoundRow::Feasible(r) => Some(r),
            BoundRow::Infeasible { .. } => None,
        }
    }

    pub fn passes(&self) -> Option<bool> {
        self.report().map(|r| r.residual_ratio <= 1.0)
    }
}

/// For each `x`: measure `eta(1/ln x, T)` over the feasible T grid, optimize
/// `T`, assemble the regime's `rho`, and compare against `|A(x) - main|`.
pub fn verify_bound(
    series: &CoefficientSeries,
    singular: &SingularStructure,
    regime: &Regime,
    x_grid: &[f64],
    opts: &VerifyOpts,
) -> Result<Vec<BoundRow>> {
    if x_grid.is_empty() {
        return Err(Error::argument("verify_bound: empty x grid"));
    }
    let mut t_grid = opts.t_grid.clone();
    t_grid.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if !(x > 1.0) {
            rows.push(BoundRow::Infeasible {
                x,
                reason: "x must exceed 1".to_string(),
            });
            continue;
        }
        let sigma = 1.0 / x.ln();
        let feasible: Vec<f64> = t_grid
            .iter()
            .copied()
            .filter(|&t| x >= regime.x0(t))
            .collect();
        if feasible.is_empty() {
            rows.push(BoundRow::Infeasible {
                x,
                reason: format!(
                    "no feasible T in the grid (x0 at T_max is {:.3})",
                    regime.x0(*t_grid.last().unwrap())
                ),
            });
            continue;
        }
        let profile = eta_profile(series, singular, sigma, &feasible, opts.eta_tol)?;
        let eta_at = |t: f64| -> f64 {
            profile
                .iter()
                .find(|p| p.t_upper == t)
                .map(|p| p.value)
                .unwrap_or(f64::NAN)
        };
        let (t_star, rho_star) = optimize_t(
            &feasible,
            |_| true,
            |t| regime.rho(x, t, singular, eta_at(t)),
        )?;
        let a_of_x = series.summatory(x)?;
        let main = main_term(singular, x)?;
        let residual_ratio = (a_of_x - main).abs() / (x * rho_star);
        rows.push(BoundRow::Feasible(BoundReport {
            x,
            a_of_x,
            main_term: main,
            rho: rho_star,
            t_used: t_star,
            residual_ratio,
            x0_check: true,
        }));
    }
    Ok(rows)
}

/// Combined row of the majorized-series bound: `A(x) = alpha x + O(x rho)`
/// with `rho = inf_{T >= 64} (1/T + eta_a + eta_b)`.
#[derive(Debug, Clone, Serialize)]
pub struct MajorizedRow {
    pub x: f64,
    pub a_of_x: f64,
    pub alpha_x: f64,
    pub rho: f64,
    pub t_used: f64,
    pub residual_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorizedReport {
    pub checked_n: usize,
    pub alpha: f64,
    /// verification rows of the derived nonnegative series `Re a + b`
    pub derived_rows: Vec<BoundRow>,
    pub combined_rows: Vec<MajorizedRow>,
}

fn merge_singular(a: &SingularStructure, b: &SingularStructure) -> Result<SingularStructure> {
    use super::{BoundaryPole, SingularTerm};
    let mut poles: Vec<BoundaryPole> = Vec::new();
    for (ord, omega, c) in a.terms().chain(b.terms()) {
        match poles.iter_mut().find(|p| p.b == ord) {
            Some(p) => match p.terms.iter_mut().find(|t| t.omega == omega) {
                Some(t) => t.c += c,
                None => p.terms.push(SingularTerm { omega, c }),
            },
            None => poles.push(BoundaryPole {
                b: ord,
                terms: vec![SingularTerm { omega, c }],
            }),
        }
    }
    SingularStructure::new(poles)
}

/// Majorized-series verification: check `|a_n| <= b_n` on the sampled
/// indices, verify the derived nonnegative series `a + b` in the increasing
/// regime, and check the combined bound with `rho = 1/T + eta_a + eta_b`
/// over `T >= 64`.
///
/// Restricted to real-coefficient `series_a` (all catalog entries); the
/// imaginary split would need its own transform model.
pub fn bound_majorized(
    series_a: &CoefficientSeries,
    singular_a: &SingularStructure,
    series_b: &CoefficientSeries,
    singular_b: &SingularStructure,
    x_grid: &[f64],
    sample_n: &[u64],
    opts: &VerifyOpts,
) -> Result<MajorizedReport> {
    if !series_a.is_real() {
        return Err(Error::argument(
            "bound_majorized: complex series need an explicit real/imaginary split".to_string(),
        ));
    }
    let mut bad: Vec<u64> = Vec::new();
    for &n in sample_n {
        let a = series_a.coefficient(n).norm();
        let b = series_b.coefficient(n).re;
        if a > b + 1e-12 * (1.0 + b.abs()) {
            bad.push(n);
        }
    }
    if !bad.is_empty() {
        bad.truncate(8);
        return Err(Error::argument(format!(
            "majorization |a_n| <= b_n fails at n = {bad:?}"
        )));
    }
    // alpha: combined simple-pole residue of the a-series at the origin
    let alpha: f64 = singular_a
        .terms()
        .filter(|&(b, omega, _)| b == 0.0 && omega == 0.0)
        .map(|(_, _, c)| 2.0 * c.re)
        .sum();

    // derived run: a + b is nonnegative and nondecreasing
    let combo = CoefficientSeries::combination(
        format!("{}+{}", series_a.label(), series_b.label()),
        vec![
            (1.0, std::sync::Arc::new(series_a.clone())),
            (1.0, std::sync::Arc::new(series_b.clone())),
        ],
    )?;
    let merged = merge_singular(singular_a, singular_b)?;
    let derived_rows = verify_bound(&combo, &merged, &Regime::Increasing, x_grid, opts)?;

    // combined conclusion over T >= 64
    let t_grid: Vec<f64> = opts.t_grid.iter().copied().filter(|&t| t >= 64.0).collect();
    if t_grid.is_empty() {
        return Err(Error::argument(
            "bound_majorized: the T grid must reach 64".to_string(),
        ));
    }
    let mut combined_rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if !(x > 1.0) {
            continue;
        }
        let sigma = 1.0 / x.ln();
        let prof_a = eta_profile(series_a, singular_a, sigma, &t_grid, opts.eta_tol)?;
        let prof_b = eta_profile(series_b, singular_b, sigma, &t_grid, opts.eta_tol)?;
        let lookup = |prof: &[EtaPoint], t: f64| {
            prof.iter()
                .find(|p| p.t_upper == t)
                .map(|p| p.value)
                .unwrap_or(f64::NAN)
        };
        let (t_star, rho_star) = optimize_t(
            &t_grid,
            |_| true,
            |t| Ok(1.0 / t + lookup(&prof_a, t) + lookup(&prof_b, t)),
        )?;
        let a_of_x = series_a.summatory(x)?;
        combined_rows.push(MajorizedRow {
            x,
            a_of_x,
            alpha_x: alpha * x,
            rho: rho_star,
            t_used: t_star,
            residual_ratio: (a_of_x - alpha * x).abs() / (x * rho_star),
        });
    }
    Ok(MajorizedReport {
        checked_n: sample_n.len(),
        alpha,
        derived_rows,
        combined_rows,
    })
}
