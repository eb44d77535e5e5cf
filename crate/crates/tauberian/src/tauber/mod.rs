//! Boundary-singularity machinery and effective error bounds.
//!
//! The central object is
//!
//! `G(s) = A(s+1)/(s+1) - sum_{k,l} [ c_{k,l}/(s+i b_k)^{w_{k,l}+1}
//!                                  + conj(c_{k,l})/(s-i b_k)^{w_{k,l}+1} ]`
//!
//! the transform with its declared boundary principal part removed, and the
//! boundary integral `eta(sigma,T) = int_{-T}^{T} |G(2 sigma + i tau) -
//! G(sigma + i tau)| d tau`, whose scaling in `sigma` encodes the pole
//! orders. The `rho_*` evaluators assemble the explicit error factors that
//! multiply `x` in `|A(x) - main term| <= C x rho_T(x)`.

mod bounds;
mod eta;
mod rho;

pub use bounds::{
    bound_majorized, check_summatory_growth, check_transform_integral_bound,
    eta_to_integral_constant, verify_bound, BoundReport, BoundRow, GrowthBoundReport,
    GrowthChainParams, IntegralBoundReport, IntegralBoundRow, MajorizedReport, MajorizedRow,
    Regime, VerifyOpts,
};
pub use eta::{
    estimate_pole_order, eta, eta_curve, eta_principal_split, eta_profile, laurent_coefficients,
    EtaCurve, EtaPoint, EtaSample, PoleOrderEstimate,
};
pub use rho::{
    optimize_t, rho_increasing, rho_moderate, rho_moderate_statement, rho_slow, rho_slow_cor_form,
    ModerateBoundParams, SlowBoundParams,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::{CatalogKind, CoefficientSeries};
use crate::error::{Error, Result};
use crate::kernels;

/// One singular term `c/(s + i b)^{omega+1}` (the conjugate at `-i b` is
/// implicit).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SingularTerm {
    pub omega: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub c: Complex64,
}

fn serialize_complex<S: serde::Serializer>(
    c: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("complex", 2)?;
    st.serialize_field("re", &c.re)?;
    st.serialize_field("im", &c.im)?;
    st.end()
}

/// Terms attached to the boundary ordinate `b >= 0`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPole {
    pub b: f64,
    pub terms: Vec<SingularTerm>,
}

/// The boundary-pole data `{b_k, (omega_{k,l}, c_{k,l})}`. The `b = 0` slot
/// always exists (possibly with no terms); the remaining ordinates are
/// positive and strictly increasing.
#[derive(Debug, Clone, Serialize)]
pub struct SingularStructure {
    poles: Vec<BoundaryPole>,
}

impl SingularStructure {
    pub fn new(mut poles: Vec<BoundaryPole>) -> Result<Self> {
        poles.sort_by(|a, b| a.b.total_cmp(&b.b));
        if poles.first().map(|p| p.b) != Some(0.0) {
            poles.insert(
                0,
                BoundaryPole {
                    b: 0.0,
                    terms: Vec::new(),
                },
            );
        }
        for w in poles.windows(2) {
            if w[0].b >= w[1].b {
                return Err(Error::argument(format!(
                    "singular structure: ordinates must be strictly increasing (b = {} repeated)",
                    w[1].b
                )));
            }
        }
        for p in &poles {
            if p.b < 0.0 {
                return Err(Error::argument(format!(
                    "singular structure: ordinate b = {} must be >= 0",
                    p.b
                )));
            }
            for t in &p.terms {
                if !(t.omega > -1.0) {
                    return Err(Error::argument(format!(
                        "singular structure: exponent omega = {} must exceed -1",
                        t.omega
                    )));
                }
            }
        }
        Ok(SingularStructure { poles })
    }

    /// Only the mandatory empty `b = 0` slot.
    pub fn empty() -> Self {
        SingularStructure {
            poles: vec![BoundaryPole {
                b: 0.0,
                terms: Vec::new(),
            }],
        }
    }

    /// Single pole at the origin: `c/s^{omega+1} + conj(c)/s^{omega+1}`.
    pub fn single(omega: f64, c: Complex64) -> Result<Self> {
        SingularStructure::new(vec![BoundaryPole {
            b: 0.0,
            terms: vec![SingularTerm { omega, c }],
        }])
    }

    pub fn poles(&self) -> &[BoundaryPole] {
        &self.poles
    }

    pub fn has_terms(&self) -> bool {
        self.poles.iter().any(|p| !p.terms.is_empty())
    }

    pub fn term_count(&self) -> usize {
        self.poles.iter().map(|p| p.terms.len()).sum()
    }

    /// Largest exponent `Omega = max omega_{k,l}`.
    pub fn omega_max(&self) -> Option<f64> {
        self.poles
            .iter()
            .flat_map(|p| p.terms.iter().map(|t| t.omega))
            .max_by(f64::total_cmp)
    }

    /// Smallest exponent `omega = min omega_{k,l}`.
    pub fn omega_min(&self) -> Option<f64> {
        self.poles
            .iter()
            .flat_map(|p| p.terms.iter().map(|t| t.omega))
            .min_by(f64::total_cmp)
    }

    /// Iterate `(b_k, omega_{k,l}, c_{k,l})`.
    pub fn terms(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.poles
            .iter()
            .flat_map(|p| p.terms.iter().map(move |t| (p.b, t.omega, t.c)))
    }

    /// The conjugate-symmetric singular sum subtracted from the transform.
    pub fn singular_sum(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, omega, c) in self.terms() {
            let e = omega + 1.0;
            acc += c / (s + Complex64::new(0.0, b)).powf(e);
            acc += c.conj() / (s - Complex64::new(0.0, b)).powf(e);
        }
        acc
    }

    /// Scale every coefficient of the `(b, omega)` slot; used by corruption
    /// experiments. Returns how many terms changed.
    pub fn scale_terms(&mut self, b: f64, omega: f64, factor: f64) -> usize {
        let mut hit = 0;
        for p in self.poles.iter_mut() {
            if p.b == b {
                for t in p.terms.iter_mut() {
                    if t.omega == omega {
                        t.c *= factor;
                        hit += 1;
                    }
                }
            }
        }
        hit
    }
}

/// `G(s)`: the transform over `s+1`, divided by `s+1`, minus the declared
/// singular sum. Conjugate-symmetric for real-coefficient series.
pub fn g_eval(
    series: &CoefficientSeries,
    singular: &SingularStructure,
    s: Complex64,
) -> Result<Complex64> {
    let sp1 = s + 1.0;
    let a = series.transform_closed(sp1)?;
    Ok(a / sp1 - singular.singular_sum(s))
}

/// The asymptotic main term
/// `x sum_{k,l} (ln x)^{omega}/Gamma(omega+1) * 2 Re(c e^{-i b ln x})`.
pub fn main_term(singular: &SingularStructure, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::domain(format!("main_term: x = {x} must be >= 1")));
    }
    let lx = x.ln();
    let mut sum = 0.0;
    for (b, omega, c) in singular.terms() {
        // 0^0 = 1 at x = 1 with omega = 0
        let log_pow = if lx == 0.0 {
            if omega == 0.0 {
                1.0
            } else if omega > 0.0 {
                0.0
            } else {
                return Err(Error::domain(
                    "main_term: (ln x)^omega diverges at x = 1 for omega < 0".to_string(),
                ));
            }
        } else {
            lx.powf(omega)
        };
        let phase = Complex64::new(0.0, -b * lx).exp();
        sum += log_pow / kernels::gamma(omega + 1.0)? * 2.0 * (c * phase).re;
    }
    Ok(x * sum)
}

/// Catalog singular structures matching [`CoefficientSeries::catalog`].
pub fn catalog_singular(kind: CatalogKind) -> SingularStructure {
    match kind {
        // residue of -zeta'/zeta at 1 is 1: 2 Re c = 1
        CatalogKind::VonMangoldt => {
            SingularStructure::single(0.0, Complex64::new(0.5, 0.0)).unwrap()
        }
        // zeta^2(s+1)/(s+1) = 1/s^2 + (2 gamma - 1)/s + O(1)
        CatalogKind::Divisor => SingularStructure::new(vec![BoundaryPole {
            b: 0.0,
            terms: vec![
                SingularTerm {
                    omega: 1.0,
                    c: Complex64::new(0.5, 0.0),
                },
                SingularTerm {
                    omega: 0.0,
                    c: Complex64::new(crate::util::EULER_GAMMA - 0.5, 0.0),
                },
            ],
        }])
        .unwrap(),
        // zeta(s+1)/(s+1) has residue 1 at s = 0
        CatalogKind::Unit => SingularStructure::single(0.0, Complex64::new(0.5, 0.0)).unwrap(),
        // poles at s = -i and s = +i with residues 1/(1-i) and 1/(1+i)
        CatalogKind::CosTwistedVonMangoldt => SingularStructure::new(vec![
            BoundaryPole {
                b: 0.0,
                terms: Vec::new(),
            },
            BoundaryPole {
                b: 1.0,
                terms: vec![SingularTerm {
                    omega: 0.0,
                    c: Complex64::new(0.5, 0.5),
                }],
            },
        ])
        .unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::zeta_pair;
    use std::f64::consts::E;
    use std::sync::Arc;

    #[test]
    fn structure_validation() {
        // b0 slot auto-inserted
        let s = SingularStructure::new(vec![BoundaryPole {
            b: 1.0,
            terms: vec![SingularTerm {
                omega: 0.0,
                c: Complex64::new(1.0, 0.0),
            }],
        }])
        .unwrap();
        assert_eq!(s.poles()[0].b, 0.0);
        assert!(s.poles()[0].terms.is_empty());
        assert_eq!(s.omega_max(), Some(0.0));

        // duplicate ordinates rejected
        let dup = SingularStructure::new(vec![
            BoundaryPole { b: 2.0, terms: vec![] },
            BoundaryPole { b: 2.0, terms: vec![] },
        ]);
        assert!(dup.is_err());
        // omega <= -1 rejected
        assert!(SingularStructure::single(-1.0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn g_exact_cancellation() {
        // A(s+1) = (s+1) c / s with c real: G identically zero when the
        // declared structure carries 2 Re c_0 = c
        let c = 0.8;
        let series = CoefficientSeries::synthetic(
            "exact",
            Arc::new(move |s: Complex64| Ok(s * c / (s - 1.0))),
        );
        let singular = SingularStructure::single(0.0, Complex64::new(c / 2.0, 0.0)).unwrap();
        for &(re, im) in &[(0.3, 0.0), (0.05, 2.0), (1.0, -5.0)] {
            let g = g_eval(&series, &singular, Complex64::new(re, im)).unwrap();
            assert!(g.norm() < 1e-12, "G({re}+{im}i) = {g}");
        }
    }

    #[test]
    fn g_von_mangoldt_analytic_at_origin() {
        let series = CoefficientSeries::catalog(CatalogKind::VonMangoldt, 1000).unwrap();
        let singular = catalog_singular(CatalogKind::VonMangoldt);
        // finite limit across s -> 0 along the real axis
        let mut vals = Vec::new();
        for &sig in &[1e-2, 1e-3, 1e-4, 1e-5] {
            let g = g_eval(&series, &singular, Complex64::new(sig, 0.0)).unwrap();
            assert!(g.norm() < 10.0, "blows up at sigma={sig}: {g}");
            vals.push(g.re);
        }
        // differences shrink: a removable singularity, not a pole
        assert!((vals[2] - vals[3]).abs() < (vals[0] - vals[1]).abs());
    }

    #[test]
    fn g_conjugate_symmetry() {
        let series = CoefficientSeries::catalog(CatalogKind::Divisor, 1000).unwrap();
        let singular = catalog_singular(CatalogKind::Divisor);
        let s = Complex64::new(0.4, 3.3);
        let a = g_eval(&series, &singular, s).unwrap();
        let b = g_eval(&series, &singular, s.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-12);
    }

    #[test]
    fn g_cos_twisted_bounded_near_boundary_poles() {
        let series = CoefficientSeries::catalog(CatalogKind::CosTwistedVonMangoldt, 1000).unwrap();
        let singular = catalog_singular(CatalogKind::CosTwistedVonMangoldt);
        // with the correct residues removed, G stays bounded approaching +-i
        for &sig in &[1e-2, 1e-3, 1e-4] {
            for &b in &[1.0, -1.0] {
                let g = g_eval(&series, &singular, Complex64::new(sig, b)).unwrap();
                assert!(g.norm() < 20.0, "sigma={sig} b={b}: {}", g.norm());
            }
        }
        // and without them it blows up like 1/sigma
        let bare = SingularStructure::empty();
        let g4 = g_eval(&series, &bare, Complex64::new(1e-4, 1.0)).unwrap();
        assert!(g4.norm() > 1e3);
    }

    #[test]
    fn main_term_examples() {
        // single term b=0, omega=0, 2 Re c = 1: main = x
        let s = SingularStructure::single(0.0, Complex64::new(0.5, 0.0)).unwrap();
        assert!((main_term(&s, 100.0).unwrap() - 100.0).abs() < 1e-12);

        // divisor structure at x = e: e*(1 + (2 gamma - 1)) = 2 gamma e
        let d = catalog_singular(CatalogKind::Divisor);
        let expected = 2.0 * crate::util::EULER_GAMMA * E;
        assert!((main_term(&d, E).unwrap() - expected).abs() < 1e-12);

        // oscillatory term b=1, omega=0, c=1/2 at x = e^{2 pi}: phase closes
        let osc = SingularStructure::new(vec![
            BoundaryPole { b: 0.0, terms: vec![] },
            BoundaryPole {
                b: 1.0,
                terms: vec![SingularTerm {
                    omega: 0.0,
                    c: Complex64::new(0.5, 0.0),
                }],
            },
        ])
        .unwrap();
        let x = (2.0 * std::f64::consts::PI).exp();
        assert!((main_term(&osc, x).unwrap() - x).abs() < 1e-8 * x);

        assert!(main_term(&s, 0.5).is_err());
    }

    #[test]
    fn main_term_depends_on_c_only_via_real_combination() {
        // at b = 0 the imaginary part of c cancels between the conjugates
        let x = 37.0;
        let s1 = SingularStructure::single(0.0, Complex64::new(0.5, 0.0)).unwrap();
        let s2 = SingularStructure::single(0.0, Complex64::new(0.5, 3.7)).unwrap();
        let m1 = main_term(&s1, x).unwrap();
        let m2 = main_term(&s2, x).unwrap();
        assert!((m1 - m2).abs() < 1e-12);
    }

    #[test]
    fn catalog_residues_match_zeta_data() {
        // von mangoldt: sigma * (-zeta'/zeta)(1+sigma) -> 1
        let (z, zd) = zeta_pair(Complex64::new(1.001, 0.0)).unwrap();
        let r = 0.001 * (-zd / z).re;
        assert!((r - 1.0).abs() < 2e-3);
        let vm = catalog_singular(CatalogKind::VonMangoldt);
        let c0 = vm.poles()[0].terms[0].c;
        assert!((2.0 * c0.re - 1.0).abs() < 1e-15);
    }
}
