//! Coefficient series, summatory functions, and Mellin-Stieltjes transforms.
//!
//! A [`CoefficientSeries`] couples a coefficient rule `n -> a_n` with an
//! optional transform model for `A(s) = sum a_n n^{-s}` (equivalently the
//! Mellin-Stieltjes integral of the summatory function). Closed-form models
//! are expression trees over the Euler-Maclaurin zeta evaluator and remain
//! valid left of the abscissa of convergence; truncated-sum models return a
//! rigorous tail bound with the value.
//!
//! The exponential-scale functions are
//! `h_sigma(t) = e^{-(1+sigma) t} A(e^t)` and
//! `g_sigma(t) = h_sigma(t) - h_{2 sigma}(t) = h_sigma(t)(1 - e^{-sigma t})`,
//! whose Fourier transform is `A(1+sigma+i tau)/(1+sigma+i tau)` (and the
//! corresponding difference).

pub mod sieve;
pub mod zeta;

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use sieve::{divisor_count, divisor_summatory, divisor_table, MangoldtSummatory, PrimeSieve, Twist};
pub use zeta::{zeta_em, zeta_pair};

/// Builtin series names; stable strings for configs and the catalog listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogKind {
    VonMangoldt,
    Divisor,
    Unit,
    CosTwistedVonMangoldt,
}

impl CatalogKind {
    pub fn name(self) -> &'static str {
        match self {
            CatalogKind::VonMangoldt => "von_mangoldt",
            CatalogKind::Divisor => "divisor",
            CatalogKind::Unit => "unit",
            CatalogKind::CosTwistedVonMangoldt => "cos_twisted_von_mangoldt",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "von_mangoldt" => Ok(CatalogKind::VonMangoldt),
            "divisor" => Ok(CatalogKind::Divisor),
            "unit" => Ok(CatalogKind::Unit),
            "cos_twisted_von_mangoldt" => Ok(CatalogKind::CosTwistedVonMangoldt),
            other => Err(Error::argument(format!("unknown catalog series `{other}`"))),
        }
    }

    pub fn all() -> [CatalogKind; 4] {
        [
            CatalogKind::VonMangoldt,
            CatalogKind::Divisor,
            CatalogKind::Unit,
            CatalogKind::CosTwistedVonMangoldt,
        ]
    }
}

/// Closed-form transform expressions: zeta, its derivative, shifts along the
/// imaginary axis, and the rational operations. `Custom` admits synthetic
/// models for tests and diagnostics.
#[derive(Clone)]
pub enum TransformExpr {
    Zeta,
    ZetaPrime,
    Const(Complex64),
    /// Evaluate the inner expression at `s + i b`.
    Shift(Box<TransformExpr>, f64),
    Neg(Box<TransformExpr>),
    Add(Box<TransformExpr>, Box<TransformExpr>),
    Mul(Box<TransformExpr>, Box<TransformExpr>),
    Div(Box<TransformExpr>, Box<TransformExpr>),
    Custom(Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>),
}

impl fmt::Debug for TransformExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformExpr::Zeta => write!(f, "zeta"),
            TransformExpr::ZetaPrime => write!(f, "zeta'"),
            TransformExpr::Const(c) => write!(f, "{c}"),
            TransformExpr::Shift(e, b) => write!(f, "({e:?})(s{b:+}i)"),
            TransformExpr::Neg(e) => write!(f, "-({e:?})"),
            TransformExpr::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            TransformExpr::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            TransformExpr::Div(a, b) => write!(f, "({a:?} / {b:?})"),
            TransformExpr::Custom(_) => write!(f, "custom"),
        }
    }
}

// Per-evaluation cache: zeta and zeta' at each distinct shift are computed
// once even when the expression mentions them several times.
struct EvalCtx {
    s: Complex64,
    cache: RefCell<Vec<(u64, (Complex64, Complex64))>>,
}

impl EvalCtx {
    fn zeta_at(&self, shift: f64) -> Result<(Complex64, Complex64)> {
        let key = shift.to_bits();
        if let Some(&(_, pair)) = self.cache.borrow().iter().find(|(k, _)| *k == key) {
            return Ok(pair);
        }
        let pair = zeta_pair(self.s + Complex64::new(0.0, shift))?;
        self.cache.borrow_mut().push((key, pair));
        Ok(pair)
    }
}

impl TransformExpr {
    fn eval_shifted(&self, ctx: &EvalCtx, shift: f64) -> Result<Complex64> {
        match self {
            TransformExpr::Zeta => Ok(ctx.zeta_at(shift)?.0),
            TransformExpr::ZetaPrime => Ok(ctx.zeta_at(shift)?.1),
            TransformExpr::Const(c) => Ok(*c),
            TransformExpr::Shift(e, b) => e.eval_shifted(ctx, shift + b),
            TransformExpr::Neg(e) => Ok(-e.eval_shifted(ctx, shift)?),
            TransformExpr::Add(a, b) => Ok(a.eval_shifted(ctx, shift)? + b.eval_shifted(ctx, shift)?),
            TransformExpr::Mul(a, b) => Ok(a.eval_shifted(ctx, shift)? * b.eval_shifted(ctx, shift)?),
            TransformExpr::Div(a, b) => {
                let den = b.eval_shifted(ctx, shift)?;
                if den.norm() < 1e-280 {
                    return Err(Error::domain(format!(
                        "transform expression hits a zero denominator at s = {}",
                        ctx.s + Complex64::new(0.0, shift)
                    )));
                }
                Ok(a.eval_shifted(ctx, shift)? / den)
            }
            TransformExpr::Custom(f) => f(ctx.s + Complex64::new(0.0, shift)),
        }
    }

    /// Evaluate the expression at `s`.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let ctx = EvalCtx {
            s,
            cache: RefCell::new(Vec::new()),
        };
        self.eval_shifted(&ctx, 0.0)
    }

    /// `-zeta'/zeta`
    pub fn neg_zeta_log_deriv() -> Self {
        TransformExpr::Neg(Box::new(TransformExpr::Div(
            Box::new(TransformExpr::ZetaPrime),
            Box::new(TransformExpr::Zeta),
        )))
    }
}

/// Evaluation mode of a transform model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    ClosedForm,
    TruncatedSum,
}

/// Declared growth `|a_n| <= scale * n^power` used for custom truncated tails.
#[derive(Debug, Clone, Copy)]
pub struct CustomTail {
    pub scale: f64,
    pub power: f64,
}

/// Transform evaluation result; `tail_bound` is attached in truncated mode.
#[derive(Debug, Clone, Copy)]
pub struct TransformValue {
    pub value: Complex64,
    pub tail_bound: Option<f64>,
}

#[derive(Clone)]
enum SeriesKind {
    VonMangoldt(Arc<MangoldtSummatory>),
    CosTwisted(Arc<MangoldtSummatory>),
    Divisor { table: Arc<Vec<u32>> },
    Unit,
    Custom {
        entries: Arc<Vec<(u64, Complex64)>>,
        tail: Option<CustomTail>,
    },
    /// weighted sum of other series
    Combo { parts: Vec<(f64, Arc<CoefficientSeries>)> },
}

/// A coefficient rule plus an optional transform model.
#[derive(Clone)]
pub struct CoefficientSeries {
    label: String,
    kind: SeriesKind,
    mode: TransformMode,
    transform: Option<TransformExpr>,
    truncation_limit: u64,
    /// overrides the coefficient-rule summatory (synthetic models)
    explicit_summatory: Option<(f64, Arc<dyn Fn(f64) -> f64 + Send + Sync>)>,
}

impl fmt::Debug for CoefficientSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientSeries({})", self.label)
    }
}

impl CoefficientSeries {
    /// Build a catalog series. `sieve_limit` bounds exact summatory queries
    /// for the von Mangoldt variants and the truncated-sum cut for all.
    pub fn catalog(kind: CatalogKind, sieve_limit: u64) -> Result<Self> {
        let (series_kind, transform) = match kind {
            CatalogKind::VonMangoldt => (
                SeriesKind::VonMangoldt(Arc::new(MangoldtSummatory::build(sieve_limit, Twist::Plain)?)),
                TransformExpr::neg_zeta_log_deriv(),
            ),
            CatalogKind::CosTwistedVonMangoldt => (
                SeriesKind::CosTwisted(Arc::new(MangoldtSummatory::build(sieve_limit, Twist::CosLog)?)),
                TransformExpr::Add(
                    Box::new(TransformExpr::Shift(
                        Box::new(TransformExpr::neg_zeta_log_deriv()),
                        1.0,
                    )),
                    Box::new(TransformExpr::Shift(
                        Box::new(TransformExpr::neg_zeta_log_deriv()),
                        -1.0,
                    )),
                ),
            ),
            CatalogKind::Divisor => (
                SeriesKind::Divisor {
                    table: Arc::new(divisor_table(sieve_limit.min(1 << 20))),
                },
                TransformExpr::Mul(Box::new(TransformExpr::Zeta), Box::new(TransformExpr::Zeta)),
            ),
            CatalogKind::Unit => (SeriesKind::Unit, TransformExpr::Zeta),
        };
        Ok(CoefficientSeries {
            label: kind.name().to_string(),
            kind: series_kind,
            mode: TransformMode::ClosedForm,
            transform: Some(transform),
            truncation_limit: match kind {
                CatalogKind::Divisor => sieve_limit.min(1 << 20),
                _ => sieve_limit,
            },
            explicit_summatory: None,
        })
    }

    /// Custom series from explicit `(n, a_n)` entries.
    pub fn custom(
        label: impl Into<String>,
        mut entries: Vec<(u64, Complex64)>,
        tail: Option<CustomTail>,
    ) -> Result<Self> {
        if entries.iter().any(|&(n, _)| n == 0) {
            return Err(Error::argument("custom series: indices start at n = 1"));
        }
        entries.sort_by_key(|&(n, _)| n);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::argument("custom series: duplicate index"));
        }
        let limit = entries.last().map(|&(n, _)| n).unwrap_or(1);
        Ok(CoefficientSeries {
            label: label.into(),
            kind: SeriesKind::Custom {
                entries: Arc::new(entries),
                tail,
            },
            mode: TransformMode::TruncatedSum,
            transform: None,
            truncation_limit: limit,
            explicit_summatory: None,
        })
    }

    /// Weighted sum of existing series; coefficients, summatories, and
    /// closed-form transforms combine linearly.
    pub fn combination(
        label: impl Into<String>,
        parts: Vec<(f64, Arc<CoefficientSeries>)>,
    ) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::argument("combination: no parts"));
        }
        let limit = parts
            .iter()
            .map(|(_, p)| p.truncation_limit)
            .min()
            .unwrap_or(1);
        Ok(CoefficientSeries {
            label: label.into(),
            kind: SeriesKind::Combo { parts },
            mode: TransformMode::ClosedForm,
            transform: None,
            truncation_limit: limit,
            explicit_summatory: None,
        })
    }

    /// Synthetic series: an explicit closed-form transform plus an explicit
    /// summatory function; used for exact-cancellation diagnostics.
    pub fn synthetic(
        label: impl Into<String>,
        transform: Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>,
    ) -> Self {
        CoefficientSeries {
            label: label.into(),
            kind: SeriesKind::Custom {
                entries: Arc::new(Vec::new()),
                tail: None,
            },
            mode: TransformMode::ClosedForm,
            transform: Some(TransformExpr::Custom(transform)),
            truncation_limit: 1,
            explicit_summatory: None,
        }
    }

    pub fn with_mode(mut self, mode: TransformMode) -> Self {
        self.mode = mode;
        self
    }

    /// Attach an explicit summatory function (synthetic models).
    pub fn with_explicit_summatory(
        mut self,
        support_start: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.explicit_summatory = Some((support_start, Arc::new(f)));
        self
    }

    pub fn with_truncation_limit(mut self, limit: u64) -> Self {
        self.truncation_limit = limit;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mode(&self) -> TransformMode {
        self.mode
    }

    pub fn transform_expr(&self) -> Option<&TransformExpr> {
        self.transform.as_ref()
    }

    /// All catalog coefficients are real; custom entries may not be.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            SeriesKind::Custom { entries, .. } => entries.iter().all(|(_, a)| a.im == 0.0),
            SeriesKind::Combo { parts } => parts.iter().all(|(_, p)| p.is_real()),
            _ => true,
        }
    }

    /// Known-nonnegative coefficient rules.
    pub fn is_nonnegative(&self) -> bool {
        matches!(
            self.kind,
            SeriesKind::VonMangoldt(_) | SeriesKind::Divisor { .. } | SeriesKind::Unit
        )
    }

    /// Coefficient `a_n`.
    pub fn coefficient(&self, n: u64) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.kind {
            SeriesKind::VonMangoldt(m) | SeriesKind::CosTwisted(m) => {
                Complex64::new(m.coefficient(n), 0.0)
            }
            SeriesKind::Divisor { table } => {
                let d = if (n as usize) < table.len() {
                    table[n as usize] as f64
                } else {
                    divisor_count(n) as f64
                };
                Complex64::new(d, 0.0)
            }
            SeriesKind::Unit => Complex64::new(1.0, 0.0),
            SeriesKind::Custom { entries, .. } => entries
                .binary_search_by_key(&n, |&(m, _)| m)
                .map(|i| entries[i].1)
                .unwrap_or(Complex64::new(0.0, 0.0)),
            SeriesKind::Combo { parts } => parts
                .iter()
                .map(|(w, p)| *w * p.coefficient(n))
                .sum(),
        }
    }

    /// Partial sum `A(x) = sum_{n<=x} a_n` (real part for custom complex
    /// series; see [`CoefficientSeries::summatory_complex`]).
    pub fn summatory(&self, x: f64) -> Result<f64> {
        Ok(self.summatory_complex(x)?.re)
    }

    pub fn summatory_complex(&self, x: f64) -> Result<Complex64> {
        if let Some((start, f)) = &self.explicit_summatory {
            return Ok(Complex64::new(if x < *start { 0.0 } else { f(x) }, 0.0));
        }
        if x < 1.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match &self.kind {
            SeriesKind::VonMangoldt(m) | SeriesKind::CosTwisted(m) => {
                Ok(Complex64::new(m.eval(x)?, 0.0))
            }
            SeriesKind::Divisor { .. } => Ok(Complex64::new(divisor_summatory(x), 0.0)),
            SeriesKind::Unit => Ok(Complex64::new(x.floor(), 0.0)),
            SeriesKind::Custom { entries, .. } => {
                let cut = x.floor() as u64;
                let mut s = Complex64::new(0.0, 0.0);
                for &(_, a) in entries.iter().take_while(|&&(n, _)| n <= cut) {
                    s += a;
                }
                Ok(s)
            }
            SeriesKind::Combo { parts } => {
                let mut s = Complex64::new(0.0, 0.0);
                for (w, p) in parts {
                    s += *w * p.summatory_complex(x)?;
                }
                Ok(s)
            }
        }
    }

    /// Transform at `s` in the series' configured mode.
    pub fn transform(&self, s: Complex64) -> Result<TransformValue> {
        match self.mode {
            TransformMode::ClosedForm => Ok(TransformValue {
                value: self.transform_closed(s)?,
                tail_bound: None,
            }),
            TransformMode::TruncatedSum => self.transform_truncated(s),
        }
    }

    /// Closed-form transform; requires a model and `Re s > 0`.
    pub fn transform_closed(&self, s: Complex64) -> Result<Complex64> {
        if !(s.re > 0.0) {
            return Err(Error::domain(format!(
                "closed-form transform needs Re s > 0 (got {s})"
            )));
        }
        if let SeriesKind::Combo { parts } = &self.kind {
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, p) in parts {
                acc += *w * p.transform_closed(s)?;
            }
            return Ok(acc);
        }
        let expr = self.transform.as_ref().ok_or_else(|| {
            Error::argument(format!(
                "series `{}` has no closed-form transform model",
                self.label
            ))
        })?;
        expr.eval(s)
    }

    /// Truncated Dirichlet sum with a rigorous tail bound; requires
    /// `Re s >= 1.5` where the bounds below converge usefully.
    pub fn transform_truncated(&self, s: Complex64) -> Result<TransformValue> {
        let sigma = s.re;
        if sigma < 1.5 {
            return Err(Error::precision(
                format!("truncated transform needs Re s >= 1.5 (got {sigma}); convergence too slow near the boundary"),
                None,
            ));
        }
        let n_cut = self.truncation_limit.max(2);
        let mut sum = Complex64::new(0.0, 0.0);
        match &self.kind {
            SeriesKind::Custom { entries, .. } => {
                for &(n, a) in entries.iter() {
                    sum += a * (-s * (n as f64).ln()).exp();
                }
            }
            _ => {
                for n in 1..=n_cut {
                    let a = self.coefficient(n);
                    if a.norm_sqr() > 0.0 {
                        sum += a * (-s * (n as f64).ln()).exp();
                    }
                }
            }
        }
        let tail = self.tail_bound(sigma, n_cut)?;
        Ok(TransformValue {
            value: sum,
            tail_bound: Some(tail),
        })
    }

    // Rigorous bound for |sum_{n > N} a_n n^{-sigma}|.
    fn tail_bound(&self, sigma: f64, n_cut: u64) -> Result<f64> {
        let nf = n_cut as f64;
        match &self.kind {
            SeriesKind::Unit => Ok(nf.powf(1.0 - sigma) / (sigma - 1.0) + nf.powf(-sigma)),
            SeriesKind::VonMangoldt(_) | SeriesKind::CosTwisted(_) => {
                // |a_n| <= w ln n with w = 1 (plain) or 2 (cos twist)
                let w = if matches!(self.kind, SeriesKind::CosTwisted(_)) {
                    2.0
                } else {
                    1.0
                };
                let ln_n = nf.ln();
                Ok(w * (nf.powf(1.0 - sigma) * (ln_n / (sigma - 1.0) + 1.0 / ((sigma - 1.0) * (sigma - 1.0)))
                    + ln_n * nf.powf(-sigma)))
            }
            SeriesKind::Divisor { .. } => {
                // sum_{n>N} d(n) n^{-sigma} <= 2 zeta(sigma) sum_{b > sqrt N} b^{-sigma}
                let zeta_sig = zeta_em(Complex64::new(sigma, 0.0), 0)?.re;
                let root = nf.sqrt();
                Ok(2.0 * zeta_sig * (root.powf(1.0 - sigma) / (sigma - 1.0) + root.powf(-sigma)))
            }
            SeriesKind::Custom { tail, .. } => match tail {
                Some(CustomTail { scale, power }) => {
                    if sigma <= 1.0 + power {
                        return Err(Error::precision(
                            format!("custom tail bound diverges: Re s = {sigma} <= 1 + {power}"),
                            None,
                        ));
                    }
                    Ok(scale
                        * (nf.powf(1.0 + power - sigma) / (sigma - 1.0 - power)
                            + nf.powf(power - sigma)))
                }
                // finitely supported: no tail at all
                None => Ok(0.0),
            },
            SeriesKind::Combo { parts } => {
                let mut acc = 0.0;
                for (w, p) in parts {
                    acc += w.abs() * p.tail_bound(sigma, n_cut)?;
                }
                Ok(acc)
            }
        }
    }
}

/// Parse the two-column custom-series format: lines `n,a_n` with complex
/// `a_n` written as `re`, `re+imi`, or `re-imi`.
pub fn parse_custom_series(text: &str) -> Result<Vec<(u64, Complex64)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let n_str = parts.next().unwrap().trim();
        let a_str = parts
            .next()
            .ok_or_else(|| Error::argument(format!("line {}: expected `n,a_n`", lineno + 1)))?
            .trim();
        let n: u64 = n_str
            .parse()
            .map_err(|_| Error::argument(format!("line {}: bad index `{n_str}`", lineno + 1)))?;
        out.push((n, parse_complex(a_str).map_err(|e| {
            Error::argument(format!("line {}: {e}", lineno + 1))
        })?));
    }
    Ok(out)
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let s = s.replace(' ', "");
    if let Some(body) = s.strip_suffix('i') {
        // split at the last +/- that is not a leading sign or exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        let i = split.ok_or_else(|| format!("bad complex literal `{s}`"))?;
        let re: f64 = body[..i]
            .parse()
            .map_err(|_| format!("bad real part in `{s}`"))?;
        let im_str = &body[i..];
        let im: f64 = if im_str == "+" || im_str == "-" {
            format!("{im_str}1").parse().unwrap()
        } else {
            im_str
                .parse()
                .map_err(|_| format!("bad imaginary part in `{s}`"))?
        };
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = s.parse().map_err(|_| format!("bad real literal `{s}`"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Summatory function: either the partial sums of a series, or an explicit
/// function of locally bounded variation with a declared support start.
#[derive(Clone)]
pub enum SummatoryFunction {
    Series(Arc<CoefficientSeries>),
    Explicit {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        support_start: f64,
    },
}

impl SummatoryFunction {
    pub fn series(s: Arc<CoefficientSeries>) -> Self {
        SummatoryFunction::Series(s)
    }

    pub fn explicit(support_start: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SummatoryFunction::Explicit {
            f: Arc::new(f),
            support_start,
        }
    }

    pub fn support_start(&self) -> f64 {
        match self {
            SummatoryFunction::Series(_) => 1.0,
            SummatoryFunction::Explicit { support_start, .. } => *support_start,
        }
    }

    /// `A(x)`; zero below the support start, right-continuous at jumps for
    /// series-backed instances.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            SummatoryFunction::Series(s) => s.summatory(x),
            SummatoryFunction::Explicit { f, support_start } => {
                if x < *support_start {
                    Ok(0.0)
                } else {
                    Ok(f(x))
                }
            }
        }
    }
}

/// Abscissa query for the exponential-scale functions.
#[derive(Debug, Clone, Copy)]
pub struct ExpScaleQuery {
    pub sigma: f64,
    pub t: f64,
}

impl ExpScaleQuery {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::domain(format!(
                "exponential-scale query: sigma = {sigma} must lie in (0,1)"
            )));
        }
        Ok(ExpScaleQuery { sigma, t })
    }
}

fn h_sigma_unchecked(a: &SummatoryFunction, sigma: f64, t: f64) -> Result<f64> {
    let x = t.exp();
    if !x.is_finite() {
        return Err(Error::domain(format!("h_sigma: e^t overflows at t = {t}")));
    }
    if x < a.support_start() {
        return Ok(0.0);
    }
    Ok((-(1.0 + sigma) * t).exp() * a.eval(x)?)
}

/// `h_sigma(t) = e^{-(1+sigma) t} A(e^t)`.
pub fn h_sigma(a: &SummatoryFunction, q: &ExpScaleQuery) -> Result<f64> {
    h_sigma_unchecked(a, q.sigma, q.t)
}

/// `g_sigma(t) = h_sigma(t) - h_{2 sigma}(t)`; identically equal to
/// `h_sigma(t) (1 - e^{-sigma t})`.
pub fn g_sigma(a: &SummatoryFunction, q: &ExpScaleQuery) -> Result<f64> {
    Ok(h_sigma_unchecked(a, q.sigma, q.t)? - h_sigma_unchecked(a, 2.0 * q.sigma, q.t)?)
}

/// Fourier transform of `h_sigma` through the closed-form transform model:
/// `A(1+sigma+i tau) / (1+sigma+i tau)`.
pub fn fourier_h_sigma(series: &CoefficientSeries, sigma: f64, tau: f64) -> Result<Complex64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain(format!(
            "fourier_h_sigma: sigma = {sigma} must lie in (0,1)"
        )));
    }
    let s = Complex64::new(1.0 + sigma, tau);
    Ok(series.transform_closed(s)? / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn vm() -> CoefficientSeries {
        CoefficientSeries::catalog(CatalogKind::VonMangoldt, 100_000).unwrap()
    }

    #[test]
    fn summatory_catalog_values() {
        let psi10 = vm().summatory(10.0).unwrap();
        let expected = 3.0 * 2.0f64.ln() + 2.0 * 3.0f64.ln() + 5.0f64.ln() + 7.0f64.ln();
        assert!((psi10 - expected).abs() < 1e-12);

        let d = CoefficientSeries::catalog(CatalogKind::Divisor, 1000).unwrap();
        assert_eq!(d.summatory(10.0).unwrap(), 27.0);
        assert_eq!(d.summatory(0.5).unwrap(), 0.0);

        let u = CoefficientSeries::catalog(CatalogKind::Unit, 1000).unwrap();
        assert_eq!(u.summatory(7.9).unwrap(), 7.0);
    }

    #[test]
    fn summatory_nondecreasing_for_nonnegative() {
        for kind in [CatalogKind::VonMangoldt, CatalogKind::Divisor, CatalogKind::Unit] {
            let s = CoefficientSeries::catalog(kind, 10_000).unwrap();
            let mut prev = -1.0;
            for i in 0..200 {
                let x = 1.0 + i as f64 * 40.0;
                let v = s.summatory(x).unwrap();
                assert!(v >= prev, "{kind:?} decreases at x={x}");
                prev = v;
            }
        }
    }

    #[test]
    fn transform_closed_catalog_values() {
        let u = CoefficientSeries::catalog(CatalogKind::Unit, 100).unwrap();
        let z2 = u.transform(Complex64::new(2.0, 0.0)).unwrap().value;
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-12);

        let v = vm();
        let got = v.transform(Complex64::new(2.0, 0.0)).unwrap().value;
        let (z, zd) = zeta_pair(Complex64::new(2.0, 0.0)).unwrap();
        assert!((got + zd / z).norm() < 1e-13);
        assert!((got.re - 0.5699).abs() < 1e-3);

        let c = CoefficientSeries::catalog(CatalogKind::CosTwistedVonMangoldt, 100).unwrap();
        let gc = c.transform(Complex64::new(2.0, 0.0)).unwrap().value;
        let (zp, zdp) = zeta_pair(Complex64::new(2.0, 1.0)).unwrap();
        let (zm, zdm) = zeta_pair(Complex64::new(2.0, -1.0)).unwrap();
        let expected = -(zdp / zp) - (zdm / zm);
        assert!((gc - expected).norm() < 1e-12);
        assert!(gc.im.abs() < 1e-12, "cos-twisted transform real on the real axis");
    }

    #[test]
    fn conjugate_symmetry_of_transforms() {
        for kind in CatalogKind::all() {
            let s = CoefficientSeries::catalog(kind, 100).unwrap();
            let z = Complex64::new(1.7, 3.3);
            let a = s.transform(z).unwrap().value;
            let b = s.transform(z.conj()).unwrap().value;
            assert!((a.conj() - b).norm() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn truncated_agrees_with_closed_within_tail() {
        for kind in CatalogKind::all() {
            let closed = CoefficientSeries::catalog(kind, 200_000).unwrap();
            let trunc = CoefficientSeries::catalog(kind, 200_000)
                .unwrap()
                .with_mode(TransformMode::TruncatedSum);
            for &im in &[0.0, 5.0, 20.0] {
                let s = Complex64::new(2.0, im);
                let cv = closed.transform(s).unwrap().value;
                let tv = trunc.transform(s).unwrap();
                let gap = (cv - tv.value).norm();
                let bound = tv.tail_bound.unwrap();
                assert!(gap <= bound, "{kind:?} s={s}: gap {gap} > bound {bound}");
            }
        }
    }

    #[test]
    fn truncated_near_boundary_is_precision_error() {
        let u = CoefficientSeries::catalog(CatalogKind::Unit, 100)
            .unwrap()
            .with_mode(TransformMode::TruncatedSum);
        assert!(matches!(
            u.transform(Complex64::new(1.2, 0.0)),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn growth_order_bound_on_test_grid() {
        // |A(t)| <= C e^{2 ln t} = C t^2 with a finite reported C
        for kind in CatalogKind::all() {
            let s = CoefficientSeries::catalog(kind, 100_000).unwrap();
            let mut c_max: f64 = 0.0;
            for i in 1..100 {
                let x = (i * 1000) as f64;
                c_max = c_max.max(s.summatory(x).unwrap().abs() / (x * x));
            }
            assert!(c_max.is_finite() && c_max < 1.0, "{kind:?}: C = {c_max}");
        }
    }

    #[test]
    fn h_sigma_values() {
        let a = SummatoryFunction::series(Arc::new(vm()));
        // e^t < 1: vanishes
        let q = ExpScaleQuery::new(0.5, -1.0).unwrap();
        assert_eq!(h_sigma(&a, &q).unwrap(), 0.0);
        // psi(10)/10^{1.5}
        let q10 = ExpScaleQuery::new(0.5, 10.0f64.ln()).unwrap();
        let psi10 = 3.0 * 2.0f64.ln() + 2.0 * 3.0f64.ln() + 5.0f64.ln() + 7.0f64.ln();
        assert!((h_sigma(&a, &q10).unwrap() - psi10 / 10.0f64.powf(1.5)).abs() < 1e-12);
        assert!(ExpScaleQuery::new(0.0, 1.0).is_err());
        assert!(ExpScaleQuery::new(1.0, 1.0).is_err());
    }

    #[test]
    fn h_sigma_unit_decays() {
        let u = SummatoryFunction::series(Arc::new(
            CoefficientSeries::catalog(CatalogKind::Unit, 100).unwrap(),
        ));
        let mut prev = f64::INFINITY;
        for &t in &[2.0, 4.0, 6.0, 9.0] {
            let v = h_sigma(&u, &ExpScaleQuery::new(0.4, t).unwrap()).unwrap();
            assert!(v < prev);
            // A(e^t) ~ e^t so h ~ e^{-sigma t}
            assert!((v - (-0.4 * t).exp()).abs() < (-t).exp() * 2.0);
            prev = v;
        }
    }

    #[test]
    fn g_sigma_two_forms_agree() {
        let a = SummatoryFunction::series(Arc::new(vm()));
        for &sigma in &[0.2, 0.5, 0.9] {
            for &t in &[0.5, 2.0, 5.0, 9.0] {
                let q = ExpScaleQuery::new(sigma, t).unwrap();
                let g = g_sigma(&a, &q).unwrap();
                let h = h_sigma(&a, &q).unwrap();
                let alt = h * (-(-sigma * t).exp_m1());
                assert!((g - alt).abs() <= 1e-12 * (1.0 + g.abs()), "sigma={sigma} t={t}");
            }
        }
        // below support
        let q = ExpScaleQuery::new(0.5, -2.0).unwrap();
        assert_eq!(g_sigma(&a, &q).unwrap(), 0.0);
    }

    #[test]
    fn fourier_h_sigma_values() {
        let u = CoefficientSeries::catalog(CatalogKind::Unit, 100).unwrap();
        let v = fourier_h_sigma(&u, 0.5, 0.0).unwrap();
        let zeta15 = zeta_em(Complex64::new(1.5, 0.0), 0).unwrap().re;
        assert!((v.re - zeta15 / 1.5).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14, "real at tau = 0");
        assert!(fourier_h_sigma(&u, 1.0, 0.0).is_err());
    }

    #[test]
    fn custom_series_parse_and_eval() {
        let text = "1,1.0\n2, 0.5+0.25i\n3,-1.5-2i\n# comment\n5,2e-1\n";
        let entries = parse_custom_series(text).unwrap();
        assert_eq!(entries.len(), 4);
        let s = CoefficientSeries::custom("test", entries, None).unwrap();
        assert_eq!(s.coefficient(2), Complex64::new(0.5, 0.25));
        assert_eq!(s.coefficient(3), Complex64::new(-1.5, -2.0));
        assert_eq!(s.coefficient(4), Complex64::new(0.0, 0.0));
        assert!(!s.is_real());
        let a = s.summatory_complex(3.5).unwrap();
        assert!((a - Complex64::new(0.0, -1.75)).norm() < 1e-15);
        // truncated transform of a finitely supported series is exact
        let tv = s.transform(Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(tv.tail_bound, Some(0.0));

        assert!(parse_custom_series("0,1.0").is_ok()); // parse ok...
        assert!(CoefficientSeries::custom("bad", vec![(0, Complex64::new(1.0, 0.0))], None).is_err());
        assert!(parse_custom_series("brokenline").is_err());
        assert!(parse_custom_series("1,1.0+i*2").is_err());
    }
}
