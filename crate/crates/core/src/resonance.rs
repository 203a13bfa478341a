//! The resonance condition, its zeros and their counting.
//!
//! For a single junction the resonances are the zeros of
//! F(k) = F1(k) + SIGMA i (u~ + 1)/(u~ - 1) = F1(k) + SIGMA i W+(k)/W(k),
//! with W, W+ the determinant polynomials of [`crate::model::coupling_polys`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{self, CountRow, Policy, Rect};
use crate::geometry::Geometry;
use crate::linalg::{self, CMatrix};
use crate::model::{self, CouplingMatrix, HedgehogSystem, SIGMA};
use crate::poly::Poly;
use crate::{Error, Result, I};

/// Half-width of the band around the real axis holding embedded eigenvalues.
pub const CLASSIFICATION_EPS: f64 = 1e-8;

/// Beyond |Im k| * size > SPLIT_SWITCH the function is evaluated in split form.
const SPLIT_SWITCH: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceKind {
    TrueResonance,
    EmbeddedEigenvalue,
    /// Zero above the band; impossible for a self-adjoint coupling.
    UpperHalfPlane,
}

pub fn classify(k: Complex64) -> ResonanceKind {
    if k.im < -CLASSIFICATION_EPS {
        ResonanceKind::TrueResonance
    } else if k.im <= CLASSIFICATION_EPS {
        ResonanceKind::EmbeddedEigenvalue
    } else {
        ResonanceKind::UpperHalfPlane
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    #[serde(with = "crate::cplx")]
    pub k: Complex64,
    pub multiplicity: usize,
    pub kind: ResonanceKind,
    pub residual: f64,
}

/// Numerator of F over a common denominator, per half-plane, for cores whose
/// leading term is a monomial c k^p: F = remainder + num(k) / (k^shift W(k)).
#[derive(Clone, Debug)]
struct Combined {
    upper: Poly,
    lower: Poly,
    shift: usize,
}

/// Reusable evaluator of the single-junction resonance function.
#[derive(Clone, Debug)]
pub struct ResonanceFunction {
    geometry: Geometry,
    det_w: Poly,
    det_w_plus: Poly,
    scale: f64,
    combined: Option<Combined>,
    coupling_poles: Vec<Complex64>,
    warnings: Vec<String>,
}

fn leading_coeff(geometry: &Geometry, upper: bool) -> Result<Option<(Complex64, i32)>> {
    let y = if upper { 1.0 } else { -1.0 };
    let probe = Complex64::new(0.37, 50.0 * y / geometry.size());
    Ok(match geometry {
        Geometry::Interval { .. } | Geometry::Ball { .. } => geometry.f1_split(probe)?.power,
        _ => None,
    })
}

impl ResonanceFunction {
    pub fn new(system: &HedgehogSystem) -> Result<Self> {
        let polys = model::coupling_polys(&system.coupling)?;
        if polys.det_w.is_zero() {
            return Err(Error::Decoupled);
        }
        let scale = polys.det_w.max_coeff().max(polys.det_w_plus.max_coeff());
        let mut warnings = Vec::new();

        let mut coupling_poles = Vec::new();
        for r in polys.det_w.roots() {
            if polys.det_w_plus.eval(r).norm() <= 1e-10 * scale * (1.0 + r.norm()).powi(system.leads() as i32) {
                warnings.push(format!("removable coupling singularity at k = {r}"));
            } else {
                coupling_poles.push(r);
            }
        }
        coupling_poles.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

        let combined = match (leading_coeff(&system.geometry, true)?, leading_coeff(&system.geometry, false)?) {
            (Some((cu, p)), Some((cl, _))) => {
                let shift = (-p).max(0) as usize;
                let lead_shift = (p + shift as i32) as usize;
                let build = |coeff: Complex64| {
                    let a = polys.det_w.shifted(lead_shift).scaled(coeff);
                    let b = polys.det_w_plus.shifted(shift).scaled(SIGMA * I);
                    let sum = a.add(&b);
                    let s = sum.max_coeff().max(a.max_coeff()).max(b.max_coeff());
                    sum.cleaned(1e-13, s)
                };
                Some(Combined { upper: build(cu), lower: build(cl), shift })
            }
            _ => None,
        };

        let mut me = ResonanceFunction {
            geometry: system.geometry.clone(),
            det_w: polys.det_w,
            det_w_plus: polys.det_w_plus,
            scale,
            combined,
            coupling_poles,
            warnings,
        };
        let f1_near = me.geometry.poles_within(me.coupling_poles.iter().map(|p| p.norm()).fold(0.0, f64::max) + 1.0);
        let mut extra = Vec::new();
        for p in &me.coupling_poles {
            if f1_near.iter().any(|q| (q - p).norm() <= 1e-8 * (1.0 + p.norm())) {
                extra.push(format!("coupling singularity at k = {p} coincides with a pole of F1"));
            }
        }
        me.warnings.extend(extra);
        Ok(me)
    }

    /// Poles of the coupling term i (u~ + 1)/(u~ - 1).
    pub fn coupling_poles(&self) -> &[Complex64] {
        &self.coupling_poles
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// SIGMA i W+/W.
    pub fn coupling_term(&self, k: Complex64) -> Result<Complex64> {
        let w = self.det_w.eval(k);
        if w.norm() <= 1e-14 * self.scale * (1.0 + k.norm()).powi(self.det_w.coeffs.len() as i32) {
            return Err(Error::NearPole { k });
        }
        Ok(SIGMA * I * self.det_w_plus.eval(k) / w)
    }

    pub fn eval(&self, k: Complex64) -> Result<Complex64> {
        if let Some(c) = &self.combined {
            if k.im.abs() * self.geometry.size() > SPLIT_SWITCH {
                let split = self.geometry.f1_split(k)?;
                let num = if k.im > 0.0 { &c.upper } else { &c.lower };
                if num.is_zero() {
                    return Ok(split.remainder);
                }
                let den = self.det_w.eval(k) * k.powi(c.shift as i32);
                if den.norm() == 0.0 {
                    return Err(Error::NearPole { k });
                }
                return Ok(split.remainder + num.eval(k) / den);
            }
        }
        Ok(self.geometry.f1(k)? + self.coupling_term(k)?)
    }

    /// Poles of F that may lie inside |k| < radius.
    pub fn poles_within(&self, radius: f64) -> Vec<Complex64> {
        let mut p = self.geometry.poles_within(radius);
        p.extend(self.coupling_poles.iter().filter(|q| q.norm() < radius));
        p
    }

    fn poles_near(&self, region: &Rect) -> Vec<Complex64> {
        let corners = [
            Complex64::new(region.re_min, region.im_min),
            Complex64::new(region.re_max, region.im_min),
            Complex64::new(region.re_min, region.im_max),
            Complex64::new(region.re_max, region.im_max),
        ];
        let r = corners.iter().map(|c| c.norm()).fold(0.0, f64::max) * 1.01 + 1.0;
        self.poles_within(r)
    }
}

/// F(k) for a single junction.
pub fn resonance_function(system: &HedgehogSystem, k: Complex64) -> Result<Complex64> {
    let ut = model::effective_coupling(&system.coupling, k)?;
    if (ut - 1.0).norm() < 1e-14 {
        return Err(Error::Decoupled);
    }
    Ok(system.geometry.f1(k)? + SIGMA * I * (ut + 1.0) / (ut - 1.0))
}

/// det[(U~ - I) Q0 + SIGMA i (U~ + I)] for n junctions with diagonal effective
/// couplings U~ and Green's matrix Q0.
pub fn resonance_det(q0: &CMatrix, utilde: &CMatrix) -> Result<Complex64> {
    let n = q0.nrows();
    if q0.ncols() != n || utilde.nrows() != n || utilde.ncols() != n {
        return Err(Error::InvalidParameter(format!(
            "dimension mismatch: Q0 is {}x{}, U~ is {}x{}",
            q0.nrows(),
            q0.ncols(),
            utilde.nrows(),
            utilde.ncols()
        )));
    }
    let id = CMatrix::identity(n, n);
    let m = (utilde - &id) * q0 + (utilde + &id) * (SIGMA * I);
    Ok(linalg::det(&m))
}

/// Determinant condition for several junctions on one core; the built-in
/// cores have no off-diagonal Green's values and refuse.
pub fn multi_junction_det(geometry: &Geometry, junctions: &[CouplingMatrix], k: Complex64) -> Result<Complex64> {
    let q0 = geometry.regular_matrix(k, junctions.len())?;
    let ut = CMatrix::from_diagonal(&model::effective_coupling_blocks(junctions, k)?);
    resonance_det(&q0, &ut)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSearch {
    pub resonances: Vec<Resonance>,
    pub region: Rect,
    pub region_count: i64,
    pub warnings: Vec<String>,
}

pub fn find_resonances(system: &HedgehogSystem, region: &Rect, tol: f64) -> Result<ResonanceSearch> {
    let rf = ResonanceFunction::new(system)?;
    search_with(&rf, region, tol)
}

fn search_with(rf: &ResonanceFunction, region: &Rect, tol: f64) -> Result<ResonanceSearch> {
    let poles = rf.poles_near(region);
    let f = |k: Complex64| rf.eval(k);
    let found = contour::find_roots(&f, region, &poles, tol, &Policy::default())?;
    let mut warnings = rf.warnings().to_vec();
    let resonances: Vec<Resonance> = found
        .roots
        .iter()
        .map(|r| {
            let kind = classify(r.k);
            if kind == ResonanceKind::UpperHalfPlane {
                warnings.push(format!("zero at k = {} lies in the upper half-plane", r.k));
            }
            if poles.iter().any(|p| (p - r.k).norm() <= 10.0 * tol) {
                warnings.push(format!("zero at k = {} is within 10 tol of a declared pole", r.k));
            }
            Resonance { k: r.k, multiplicity: r.multiplicity, kind, residual: r.residual }
        })
        .collect();
    Ok(ResonanceSearch { resonances, region: found.region, region_count: found.region_count, warnings })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub rows: Vec<CountRow>,
    /// Dirichlet eigenvalues of the bare core (both signs) inside each circle.
    pub core_eigenvalues: Vec<usize>,
    /// True when N(R) at the largest radius is below half the core count.
    pub non_weyl: bool,
    pub warnings: Vec<String>,
}

pub fn counting_report(system: &HedgehogSystem, radii: &[f64]) -> Result<CountingReport> {
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidParameter("radii must be positive and non-empty".into()));
    }
    let rf = ResonanceFunction::new(system)?;
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let poles = rf.poles_within(rmax * 1.01);
    let f = |k: Complex64| rf.eval(k);
    let rows = contour::counting_function(&f, radii, &poles, &Policy::default())?;
    let core_eigenvalues: Vec<usize> = rows.iter().map(|r| system.geometry.poles_within(r.radius_used).len()).collect();
    let (last, core) = rows
        .iter()
        .zip(&core_eigenvalues)
        .max_by(|a, b| a.0.radius.total_cmp(&b.0.radius))
        .map(|(r, c)| (r.zeros, *c))
        .unwrap_or((0, 0));
    Ok(CountingReport { rows, core_eigenvalues, non_weyl: (last as f64) < 0.5 * core as f64, warnings: rf.warnings().to_vec() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    pub search_windows: Vec<Rect>,
    pub max_abs_im: Vec<f64>,
    /// Largest imaginary part over all windows; at most CLASSIFICATION_EPS for
    /// a self-adjoint coupling.
    pub max_im: f64,
    pub counts: Vec<usize>,
    pub stable: bool,
    pub resonances: Vec<Resonance>,
    pub warnings: Vec<String>,
}

pub fn strip_bound(system: &HedgehogSystem, windows: &[Rect], tol: f64) -> Result<StripReport> {
    if windows.len() < 2 {
        return Err(Error::InvalidParameter("a strip report needs at least two windows".into()));
    }
    let rf = ResonanceFunction::new(system)?;
    let mut max_abs_im = Vec::new();
    let mut counts = Vec::new();
    let mut warnings = rf.warnings().to_vec();
    let mut last = Vec::new();
    let mut max_im = f64::NEG_INFINITY;
    for w in windows {
        let s = search_with(&rf, w, tol)?;
        max_abs_im.push(s.resonances.iter().map(|r| r.k.im.abs()).fold(0.0, f64::max));
        max_im = s.resonances.iter().map(|r| r.k.im).fold(max_im, f64::max);
        counts.push(s.resonances.iter().map(|r| r.multiplicity).sum());
        for w in s.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        last = s.resonances;
    }
    let n = max_abs_im.len();
    let (a, b) = (max_abs_im[n - 2], max_abs_im[n - 1]);
    let stable = if a == 0.0 { b == 0.0 } else { (b - a).abs() < 0.05 * a };
    Ok(StripReport { search_windows: windows.to_vec(), max_abs_im, max_im, counts, stable, resonances: last, warnings })
}
