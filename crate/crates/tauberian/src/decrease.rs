//! Decrease characteristics and controlled-decrease diagnostics.
//!
//! For `f` on `[a, infinity)` define
//!
//! - `nu_bar(lambda) = -inf { f(y) - f(x) : a <= x <= y <= lambda x }`
//! - `nu(lambda)     = -lim_{z->inf} inf { f(y) - f(x) : z <= x <= y <= lambda x }`
//!
//! Both are sampled here over finite grids, so every estimate is a *lower*
//! bound of the true quantity; the divergence scan distinguishes genuinely
//! unbounded behavior from slow growth without claiming a proof. `f` is
//! *boundedly decreasing* when `nu_bar` is finite, *slowly decreasing* when
//! `nu(lambda) -> 0` as `lambda -> 1`, *very slowly* when `nu` vanishes
//! identically, and *moderately decreasing* when
//! `F(u+v) - F(u) >= -B1 v - B2 max(1,u) phi(u)` with `phi` nonincreasing
//! to 0.
//!
//! Two explicit constructions separate the classes: a nondecreasing `q` with
//! `q = O(x omega(x))` whose quotient `q/x` is not boundedly decreasing, and
//! a slowly decreasing `f` on dyadic blocks whose `F = x f(x)` is not
//! moderately decreasing.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::dirichlet::SummatoryFunction;

/// Sampled abscissas plus the per-`x` pair enumeration density.
///
/// For each grid point `x` and window factor `lambda`, the candidate `y`
/// values are a geometric sub-grid of `[x, lambda x]` of size `pair_steps`,
/// augmented with any registered snap points (block boundaries of the
/// constructions, where the extrema live).
#[derive(Debug, Clone)]
pub struct SampleGrid {
    pub points: Vec<f64>,
    pub pair_steps: usize,
    snaps: Vec<f64>,
}

impl SampleGrid {
    /// Geometric grid of `n` points on `[a, b]`.
    pub fn geometric(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > a) {
            return Err(Error::argument(format!("sample grid: bad range [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::argument("sample grid: need at least 2 points"));
        }
        Ok(SampleGrid {
            points: crate::util::geomspace(a, b, n),
            pair_steps: 64,
            snaps: Vec::new(),
        })
    }

    pub fn with_pair_steps(mut self, steps: usize) -> Self {
        self.pair_steps = steps.max(2);
        self
    }

    /// Register snap points; each is inserted into the abscissas together
    /// with tight geometric neighbors (ratio 1.001) and participates in the
    /// `y` enumeration of every window containing it.
    pub fn with_snap_points(mut self, pts: &[f64]) -> Self {
        let (lo, hi) = (self.points[0], *self.points.last().unwrap());
        for &p in pts {
            if p >= lo && p <= hi {
                self.snaps.push(p);
                for q in [p / 1.001, p * 1.001] {
                    if q >= lo && q <= hi {
                        self.points.push(q);
                    }
                }
                self.points.push(p);
            }
        }
        self.points.sort_by(f64::total_cmp);
        self.points.dedup();
        self.snaps.sort_by(f64::total_cmp);
        self.snaps.dedup();
        self
    }

    fn y_candidates(&self, x: f64, lambda: f64, out: &mut Vec<f64>) {
        out.clear();
        let top = lambda * x;
        if lambda <= 1.0 {
            out.push(x);
            return;
        }
        let ratio = (top / x).powf(1.0 / (self.pair_steps - 1) as f64);
        let mut y = x;
        for _ in 0..self.pair_steps - 1 {
            out.push(y);
            y *= ratio;
        }
        out.push(top);
        for &s in &self.snaps {
            if s > x && s < top {
                out.push(s);
            }
        }
    }
}

/// Sampled lower bound for `nu_bar(f; lambda)`.
pub fn estimate_nu_bar(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    lambda: f64,
    grid: &SampleGrid,
) -> Result<f64> {
    estimate_nu_inner(f, a, lambda, a, grid)
}

/// A `nu` estimate together with the finite-z cutoff that stands in for the
/// limit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NuEstimate {
    pub value: f64,
    pub z_cutoff: f64,
}

/// Sampled lower bound for `nu(f; lambda)`: pairs restricted to `x >= z`.
pub fn estimate_nu(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    lambda: f64,
    z_cutoff: f64,
    grid: &SampleGrid,
) -> Result<NuEstimate> {
    if z_cutoff < a {
        return Err(Error::argument(format!(
            "estimate_nu: z cutoff {z_cutoff} below support start {a}"
        )));
    }
    let value = estimate_nu_inner(f, a, lambda, z_cutoff, grid)?;
    Ok(NuEstimate { value, z_cutoff })
}

fn estimate_nu_inner(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    lambda: f64,
    x_min: f64,
    grid: &SampleGrid,
) -> Result<f64> {
    if !(lambda >= 1.0) {
        return Err(Error::argument(format!("lambda = {lambda} must be >= 1")));
    }
    let xs: Vec<f64> = grid.points.iter().copied().filter(|&x| x >= x_min && x >= a).collect();
    if xs.is_empty() {
        return Err(Error::argument(format!(
            "no grid points at or beyond {x_min} (grid ends at {})",
            grid.points.last().copied().unwrap_or(f64::NAN)
        )));
    }
    let mut worst = 0.0f64;
    let mut ys = Vec::with_capacity(grid.pair_steps + 8);
    for &x in &xs {
        let fx = f(x);
        grid.y_candidates(x, lambda, &mut ys);
        for &y in &ys {
            let drop = fx - f(y);
            if drop > worst {
                worst = drop;
            }
        }
    }
    Ok(worst)
}

/// Outcome of re-running `estimate_nu` on successively doubled grids
/// (log-range and point count both double each step).
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceScan {
    pub estimates: Vec<f64>,
    pub divergent: bool,
}

/// Divergence heuristic: the base grid spans `[a, a e^span]`; three doubled
/// grids follow. Flagged divergent when every step at least doubles the
/// estimate (a zero estimate followed by a positive one counts as doubling).
pub fn divergence_scan(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    lambda: f64,
    base_log_span: f64,
    base_points: usize,
) -> Result<DivergenceScan> {
    let mut estimates = Vec::with_capacity(4);
    let mut span = base_log_span;
    let mut n = base_points;
    for _ in 0..4 {
        let grid = SampleGrid::geometric(a, a * span.exp(), n)?;
        let z = a * (span / 2.0).exp();
        estimates.push(estimate_nu(f, a, lambda, z, &grid)?.value);
        span *= 2.0;
        n *= 2;
    }
    let divergent = estimates.windows(2).all(|w| {
        if w[0] <= 1e-12 {
            w[1] > 1e-9
        } else {
            w[1] >= 2.0 * w[0]
        }
    });
    Ok(DivergenceScan { estimates, divergent })
}

/// Empirical nonincreasing majorant for
/// `f(y) - f(x) >= -nu_limit - Psi_lambda(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct PsiMajorant {
    pub xs: Vec<f64>,
    pub vals: Vec<f64>,
}

impl PsiMajorant {
    pub fn at(&self, x: f64) -> f64 {
        match self.xs.iter().rposition(|&p| p <= x) {
            Some(i) => self.vals[i],
            None => self.vals.first().copied().unwrap_or(0.0),
        }
    }
}

/// Tabulate the smallest nonincreasing excess over `nu_limit` of the sampled
/// decrements with base point at or beyond each grid abscissa.
pub fn empirical_psi(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    lambda: f64,
    nu_limit: f64,
    grid: &SampleGrid,
) -> Result<PsiMajorant> {
    let xs = grid.points.clone();
    let mut excess = vec![0.0f64; xs.len()];
    let mut ys = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        if x < a {
            continue;
        }
        let fx = f(x);
        grid.y_candidates(x, lambda, &mut ys);
        for &y in &ys {
            excess[i] = excess[i].max(fx - f(y) - nu_limit);
        }
    }
    // suffix maximum makes it a nonincreasing envelope
    for i in (0..excess.len().saturating_sub(1)).rev() {
        excess[i] = excess[i].max(excess[i + 1]);
    }
    Ok(PsiMajorant { xs, vals: excess })
}

/// One profiled window factor.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub lambda: f64,
    pub nu_bar_est: f64,
    pub nu_est: f64,
    pub z_cutoff: f64,
    /// `nu` estimates at three increasing z-cutoffs (trend data).
    pub nu_z_trend: Vec<f64>,
    pub divergent: bool,
}

/// Sampled decrease profile over a `lambda` grid.
#[derive(Debug, Clone, Serialize)]
pub struct DecreaseProfile {
    pub a: f64,
    pub rows: Vec<ProfileRow>,
}

/// Grid parameters for a profile sweep.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSpec {
    /// log-length of the abscissa range `[a, a e^span]`
    pub log_span: f64,
    pub points: usize,
    pub pair_steps: usize,
    /// run the divergence scan per row
    pub scan_divergence: bool,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec {
            log_span: 24.0,
            points: 1200,
            pair_steps: 64,
            scan_divergence: false,
        }
    }
}

/// Compute a decrease profile; `snaps` mark construction breakpoints.
pub fn profile(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    lambdas: &[f64],
    spec: &ProfileSpec,
    snaps: &[f64],
) -> Result<DecreaseProfile> {
    if lambdas.is_empty() {
        return Err(Error::argument("profile: empty lambda grid"));
    }
    let grid = SampleGrid::geometric(a, a * spec.log_span.exp(), spec.points)?
        .with_pair_steps(spec.pair_steps)
        .with_snap_points(snaps);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let nu_bar_est = estimate_nu_bar(f, a, lambda, &grid)?;
        let cuts = [
            a * (spec.log_span / 8.0).exp(),
            a * (spec.log_span / 2.0).exp(),
            a * (3.0 * spec.log_span / 4.0).exp(),
        ];
        let trend: Vec<f64> = cuts
            .iter()
            .map(|&z| estimate_nu(f, a, lambda, z, &grid).map(|e| e.value))
            .collect::<Result<_>>()?;
        let divergent = if spec.scan_divergence {
            divergence_scan(f, a, lambda, spec.log_span / 4.0, spec.points / 4)?.divergent
        } else {
            false
        };
        rows.push(ProfileRow {
            lambda,
            nu_bar_est,
            nu_est: trend[1],
            z_cutoff: cuts[1],
            nu_z_trend: trend,
            divergent,
        });
    }
    Ok(DecreaseProfile { a, rows })
}

/// Diagnostic label; sampled evidence, not a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecreaseClass {
    Boundedly,
    Slowly,
    VerySlowly,
    NoneDetected,
}

/// Thresholds for [`classify_decrease`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifyThresholds {
    /// the "small" window is the row closest to `1 + lambda_small`
    pub lambda_small: f64,
    /// slowly when `nu(1+lambda_small) <= ratio * nu(lambda_ref)`
    pub ratio: f64,
    pub lambda_ref: f64,
    pub zero_tol: f64,
    /// very slowly when the z-trend decays below this factor at every lambda
    pub very_slow_decay: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            lambda_small: 1e-3,
            ratio: 1e-2,
            lambda_ref: 2.0,
            zero_tol: 1e-9,
            very_slow_decay: 0.85,
        }
    }
}

/// Label a profile. Divergence dominates; then the z-trend at every lambda
/// (vanishing limit for all window factors = very slowly); then the
/// lambda-trend near 1 (slowly); else boundedly.
pub fn classify_decrease(profile: &DecreaseProfile, th: &ClassifyThresholds) -> DecreaseClass {
    if profile.rows.iter().any(|r| r.divergent) {
        return DecreaseClass::NoneDetected;
    }
    let very_slow = profile.rows.iter().all(|r| {
        let t = &r.nu_z_trend;
        let last = *t.last().unwrap_or(&r.nu_est);
        last <= th.zero_tol
            || (t.windows(2).all(|w| w[1] <= w[0] + th.zero_tol)
                && last <= th.very_slow_decay * t[0])
    });
    if very_slow {
        return DecreaseClass::VerySlowly;
    }
    let near = |target: f64| {
        profile
            .rows
            .iter()
            .min_by(|a, b| (a.lambda - target).abs().total_cmp(&(b.lambda - target).abs()))
            .unwrap()
    };
    let small = near(1.0 + th.lambda_small);
    let reference = near(th.lambda_ref);
    if small.nu_est <= th.ratio * reference.nu_est + th.zero_tol {
        return DecreaseClass::Slowly;
    }
    DecreaseClass::Boundedly
}

/// Moderate-decrease parameters: `F(u+v) - F(u) >= -B1 v - B2 max(1,u) phi(u)`
/// on `[a, infinity)`, with `phi` nonincreasing, 1 on `[a, max(1,a)]`, and
/// tending to 0.
#[derive(Clone)]
pub struct ModerateDecreaseParams {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ModerateDecreaseParams {
    pub fn new(
        a: f64,
        b1: f64,
        b2: f64,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(b1 >= 0.0 && b2 >= 0.0) {
            return Err(Error::argument("moderate decrease: B1, B2 must be nonnegative"));
        }
        Ok(ModerateDecreaseParams {
            a,
            b1,
            b2,
            phi: Arc::new(phi),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModerateViolation {
    pub u: f64,
    pub v: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModerateReport {
    pub violations: Vec<ModerateViolation>,
    pub min_margin: f64,
}

/// Check the moderate-decrease inequality at the supplied `(u, v)` pairs.
pub fn check_moderate(
    f: &SummatoryFunction,
    params: &ModerateDecreaseParams,
    pairs: &[(f64, f64)],
) -> Result<ModerateReport> {
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for &(u, v) in pairs {
        if u < params.a || v < 0.0 {
            return Err(Error::argument(format!(
                "check_moderate: pair (u={u}, v={v}) outside u >= {} and v >= 0",
                params.a
            )));
        }
        let margin = f.eval(u + v)? - f.eval(u)?
            + params.b1 * v
            + params.b2 * u.max(1.0) * (params.phi)(u);
        min_margin = min_margin.min(margin);
        if margin < -1e-12 * (1.0 + u.abs()) {
            violations.push(ModerateViolation { u, v, margin });
        }
    }
    Ok(ModerateReport {
        violations,
        min_margin,
    })
}

/// Lower-envelope variants.
#[derive(Debug, Clone, Copy)]
pub enum LowerEnvelope {
    /// `F(y) >= -M y (1 + ln y - ln a)` (boundedly decreasing `F(x)/x`)
    SlowDecrease { m: f64 },
    /// `F(x) >= -B x` (moderately decreasing `F`)
    Moderate { b: f64 },
}

/// True iff the envelope holds at every grid point at or beyond `a`.
pub fn lower_bound_check(
    f: &SummatoryFunction,
    a: f64,
    envelope: LowerEnvelope,
    xs: &[f64],
) -> Result<bool> {
    for &x in xs.iter().filter(|&&x| x >= a) {
        let floor = match envelope {
            LowerEnvelope::SlowDecrease { m } => -m * x * (1.0 + x.ln() - a.ln()),
            LowerEnvelope::Moderate { b } => -b * x,
        };
        if f.eval(x)? < floor - 1e-12 * (1.0 + floor.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferRow {
    pub lambda: f64,
    pub quotient_nu: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub rows: Vec<TransferRow>,
}

/// Verify, per window factor, the divide-by-`ell` transfer
/// `nu(q/ell; lambda) <= nu(q; lambda)/ell(a) + C (lambda - 1)`.
///
/// Preconditions checked on the grid before any estimate: `ell > 0`
/// nondecreasing, `ell'/ell` nonincreasing, and
/// `q(x) x ell'(x) / ell(x)^2 <= C`.
pub fn divide_by_ell_transfer(
    q: &dyn Fn(f64) -> f64,
    ell: &dyn Fn(f64) -> f64,
    ell_prime: &dyn Fn(f64) -> f64,
    a: f64,
    c_bound: f64,
    lambdas: &[f64],
    grid: &SampleGrid,
) -> Result<TransferReport> {
    let mut prev_ratio = f64::INFINITY;
    for &x in &grid.points {
        let l = ell(x);
        if !(l > 0.0) {
            return Err(Error::argument(format!("ell not positive at x = {x}")));
        }
        let lp = ell_prime(x);
        if lp < -1e-12 {
            return Err(Error::argument(format!("ell decreasing at x = {x}")));
        }
        let ratio = lp / l;
        if ratio > prev_ratio + 1e-12 {
            return Err(Error::argument(format!(
                "ell'/ell increasing at x = {x}"
            )));
        }
        prev_ratio = ratio;
        let growth = q(x) * x * lp / (l * l);
        if growth > c_bound + 1e-9 * (1.0 + c_bound.abs()) {
            return Err(Error::argument(format!(
                "growth bound violated: q(x) x ell'/ell^2 = {growth} > C = {c_bound} at x = {x}"
            )));
        }
    }
    let ell_a = ell(a);
    let quotient = |x: f64| q(x) / ell(x);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let lhs = estimate_nu_bar(&quotient, a, lambda, grid)?;
        let rhs = estimate_nu_bar(q, a, lambda, grid)? / ell_a + c_bound * (lambda - 1.0);
        rows.push(TransferRow {
            lambda,
            quotient_nu: lhs,
            bound: rhs,
            margin: rhs - lhs,
        });
    }
    Ok(TransferReport { rows })
}

// ---------------------------------------------------------------------------
// Construction 1: nondecreasing q with q = O(x omega(x)) whose quotient q/x
// fails bounded decrease. q(x) = e^{floor(ln x)} s(x) where s is built from
// s0(x) = inf_{x' >= x} omega(x') by the block recursion
// s(x) = min(s0(x), s(e^n) + 1) on (e^n, e^{n+1}].
// ---------------------------------------------------------------------------

/// The staircase construction behind the divide-by-x counterexample.
pub struct Cor23Construction {
    omega: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// s at e^n for n = 0..=max_block
    s_block: Vec<f64>,
    /// sampled running minimum of omega from the right (upper bound of s0)
    s0_grid: Vec<(f64, f64)>,
    max_block: usize,
}

impl Cor23Construction {
    pub fn build(
        omega: impl Fn(f64) -> f64 + Send + Sync + 'static,
        max_block: usize,
    ) -> Result<Self> {
        let max_block = max_block.min(700); // e^700 is the f64 ceiling
        let omega = Arc::new(omega);
        // sampled inf of omega over [x, top]: geometric grid, suffix minimum
        let n_grid = 16 * (max_block + 1);
        let top = ((max_block + 1) as f64).exp();
        let pts = crate::util::geomspace(1.0, top, n_grid);
        let mut s0_grid: Vec<(f64, f64)> = pts.iter().map(|&x| (x, (omega)(x))).collect();
        for i in (0..s0_grid.len() - 1).rev() {
            s0_grid[i].1 = s0_grid[i].1.min(s0_grid[i + 1].1);
        }
        let s0_at = |x: f64, grid: &[(f64, f64)], om: &dyn Fn(f64) -> f64| -> f64 {
            let i = grid.partition_point(|&(p, _)| p < x);
            let tail_min = if i < grid.len() { grid[i].1 } else { f64::INFINITY };
            om(x).min(tail_min)
        };
        let mut s_block = vec![0.0f64; max_block + 1];
        for n in 1..=max_block {
            let x = (n as f64).exp();
            s_block[n] = s0_at(x, &s0_grid, omega.as_ref()).min(s_block[n - 1] + 1.0);
        }
        Ok(Cor23Construction {
            omega,
            s_block,
            s0_grid,
            max_block,
        })
    }

    pub fn max_block(&self) -> usize {
        self.max_block
    }

    pub fn omega_at(&self, x: f64) -> f64 {
        (self.omega)(x)
    }

    /// Sampled `s0(x) = inf_{x' >= x} omega(x')` (exact when omega is
    /// nondecreasing).
    pub fn s0_at(&self, x: f64) -> f64 {
        let i = self.s0_grid.partition_point(|&(p, _)| p < x);
        let tail_min = if i < self.s0_grid.len() {
            self.s0_grid[i].1
        } else {
            f64::INFINITY
        };
        (self.omega)(x).min(tail_min)
    }

    pub fn s_at_block(&self, n: usize) -> f64 {
        self.s_block[n.min(self.max_block)]
    }

    /// The block-recursive `s(x)`; nondecreasing, unbounded, `<= s0 <= omega`.
    pub fn s_at(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 0.0;
        }
        let l = x.ln();
        // x lies in (e^k, e^{k+1}]
        let k = ((l - 1e-12).ceil() - 1.0).max(0.0) as usize;
        let base = self.s_block[k.min(self.max_block)];
        self.s0_at(x).min(base + 1.0)
    }

    /// `q(x) = e^{floor(ln x)} s(x)`; nondecreasing, `O(x omega(x))`.
    pub fn q_at(&self, x: f64) -> f64 {
        if x < 1.0 {
            return 0.0;
        }
        (x.ln().floor()).exp() * self.s_at(x)
    }

    /// The witness decrement at block `n`:
    /// `q(lambda e^n)/(lambda e^n) - q(e^n)/e^n <= (2 + (1-lambda) s(e^n))/lambda`.
    pub fn witness_decrement(&self, n: usize, lambda: f64) -> f64 {
        let x = (n as f64).exp();
        self.q_at(lambda * x) / (lambda * x) - self.q_at(x) / x
    }
}

// ---------------------------------------------------------------------------
// Construction 2: slowly decreasing f on dyadic blocks, F = x f(x), with
// explicit moderate-decrease violations. On [2^n, 2^{n+1}) the function
// descends linearly with slope -sqrt(m_n)/2^n over the first 1/m_n of the
// block and stays at -1/sqrt(m_n) after.
// ---------------------------------------------------------------------------

/// Block exponent sequence; every integer >= 2 should appear infinitely
/// often for the full counterexample strength.
#[derive(Debug, Clone)]
pub enum MSeq {
    /// groups (2), (2,3), (2,3,4), ...: every m appears infinitely often
    Diagonal,
    /// cycle 2..=max
    Cycle(u32),
    /// explicit list, repeated cyclically
    Custom(Vec<u32>),
}

impl MSeq {
    fn at(&self, n: usize) -> u32 {
        match self {
            MSeq::Diagonal => {
                let mut g = 1usize;
                let mut start = 0usize;
                while start + g <= n {
                    start += g;
                    g += 1;
                }
                (2 + (n - start)) as u32
            }
            MSeq::Cycle(max) => 2 + (n as u32) % (max - 1),
            MSeq::Custom(v) => v[n % v.len()],
        }
    }
}

/// The slowly-decreasing-but-not-moderate construction.
pub struct Prop25Construction {
    m_seq: MSeq,
}

/// A moderate-decrease violation pair produced by [`Prop25Construction`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Prop25Witness {
    pub block: usize,
    pub x: f64,
    pub y: f64,
    /// guaranteed ceiling for `F(x+y) - F(x) + C y`
    pub margin_bound: f64,
}

impl Prop25Construction {
    pub fn new(m_seq: MSeq) -> Result<Self> {
        if let MSeq::Custom(v) = &m_seq {
            if v.is_empty() || v.iter().any(|&m| m < 2) {
                return Err(Error::argument("m sequence entries must be >= 2"));
            }
        }
        if let MSeq::Cycle(max) = m_seq {
            if max < 2 {
                return Err(Error::argument("cycle maximum must be >= 2"));
            }
        }
        Ok(Prop25Construction { m_seq })
    }

    pub fn m_at(&self, block: usize) -> u32 {
        self.m_seq.at(block)
    }

    /// `f(x)` on `[1, infinity)`; ranges in `[-1/sqrt 2, 0]`.
    pub fn f_at(&self, x: f64) -> f64 {
        if x < 1.0 {
            return 0.0;
        }
        let n = x.log2().floor() as usize;
        let base = (n as f64).exp2();
        let m = self.m_seq.at(n) as f64;
        let kink = (m + 1.0) / m * base;
        if x < kink {
            -(m.sqrt() / base) * (x - base)
        } else {
            -1.0 / m.sqrt()
        }
    }

    /// `F(x) = x f(x)`.
    pub fn big_f_at(&self, x: f64) -> f64 {
        x * self.f_at(x)
    }

    /// First block at or after `start_block` whose exponent equals `target`,
    /// with the violation pair `x = 2^n`, `y = 2^n / target`.
    pub fn witness(&self, target: u32, start_block: usize) -> Option<Prop25Witness> {
        if target < 2 {
            return None;
        }
        (start_block..=1020).find(|&n| self.m_seq.at(n) == target).map(|n| {
            let x = (n as f64).exp2();
            let m = target as f64;
            Prop25Witness {
                block: n,
                x,
                y: x / m,
                margin_bound: -x / (2.0 * m.sqrt()),
            }
        })
    }

    /// Dyadic block starts and kinks inside `[lo, hi]`, for snap points.
    pub fn snap_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut n = lo.log2().floor().max(0.0) as usize;
        loop {
            let base = (n as f64).exp2();
            if base > hi {
                break;
            }
            let m = self.m_seq.at(n) as f64;
            out.push(base);
            out.push((m + 1.0) / m * base);
            n += 1;
        }
        out.retain(|&p| p >= lo && p <= hi);
        out
    }
}
