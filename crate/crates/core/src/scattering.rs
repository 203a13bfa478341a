//! On-shell scattering matrix of a single-junction system.
//!
//! On lead j the solution is a_j e^{-ikx} + b_j e^{ikx}; the core carries
//! c G(x, x0; k), so near the junction d = c F1(k).  The coupling rows give
//! C c + A a + B b = 0 with
//! C = (U - I) e0 F1 + SIGMA i (U + I) e0, A = (U - I)_L + k (U + I)_L,
//! B = (U - I)_L - k (U + I)_L, where _L keeps the lead columns.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{self, Policy, Rect, RootRecord};
use crate::linalg::{self, CMatrix, CVector, Lu};
use crate::model::{self, HedgehogSystem, SIGMA};
use crate::poly::Poly;
use crate::{Error, Result, I};

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringSolve {
    pub k: Complex64,
    pub s_matrix: CMatrix,
    /// Core coefficient c for each unit incoming wave.
    pub interior_amplitudes: CVector,
    /// 1-norm condition number of [C | B].
    pub condition_number: f64,
    /// Largest coupling-row residual of the solved columns relative to the row scale.
    pub max_residual: f64,
}

fn lead_blocks(system: &HedgehogSystem, k: Complex64) -> (CMatrix, CMatrix, CVector, CVector) {
    let u = system.coupling.matrix();
    let n = u.nrows();
    let m = n - 1;
    let id = CMatrix::identity(n, n);
    let minus = u - &id;
    let plus = u + &id;
    let ml = minus.view((0, 1), (n, m)).into_owned();
    let pl = plus.view((0, 1), (n, m)).into_owned();
    let a = &ml + &pl * k;
    let b = &ml - &pl * k;
    (a, b, minus.column(0).into_owned(), plus.column(0).into_owned() * (SIGMA * I))
}

fn system_matrix(system: &HedgehogSystem, k: Complex64, f1: Complex64) -> (CMatrix, CMatrix) {
    let (a, b, c1, c2) = lead_blocks(system, k);
    let n = b.nrows();
    let mut cb = CMatrix::zeros(n, n);
    cb.set_column(0, &(c1 * f1 + c2));
    cb.view_mut((0, 1), (n, n - 1)).copy_from(&b);
    (cb, a)
}

pub fn s_matrix(system: &HedgehogSystem, k: Complex64) -> Result<ScatteringSolve> {
    if k.norm() == 0.0 {
        return Err(Error::Domain("k = 0 is degenerate for the scattering problem".into()));
    }
    let f1 = system.geometry.f1(k)?;
    let (cb, a) = system_matrix(system, k, f1);
    let lu = Lu::new(cb.clone());
    let rhs = -&a;
    let Some(sol) = lu.solve(&rhs) else {
        return Err(Error::Singular { k });
    };
    let Some(inv) = lu.inverse() else {
        return Err(Error::Singular { k });
    };
    let m = system.leads();
    let s = sol.view((1, 0), (m, m)).into_owned();
    let c = sol.row(0).transpose().into_owned();

    let mut max_residual: f64 = 0.0;
    for j in 0..m {
        let aj: Vec<Complex64> = (0..m).map(|i| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() }).collect();
        let bj: Vec<Complex64> = (0..m).map(|i| s[(i, j)]).collect();
        let f: Vec<Complex64> = aj.iter().zip(&bj).map(|(a, b)| a + b).collect();
        let df: Vec<Complex64> = aj.iter().zip(&bj).map(|(a, b)| I * k * (b - a)).collect();
        let (psi, dpsi) = model::boundary_columns(c[j] * f1, c[j], &f, &df);
        let r = model::coupling_residual(&system.coupling, &psi, &dpsi);
        let scale = 1.0 + psi.iter().chain(dpsi.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        max_residual = max_residual.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale);
    }

    Ok(ScatteringSolve {
        k,
        s_matrix: s,
        interior_amplitudes: c,
        condition_number: linalg::norm_one(&cb) * linalg::norm_one(&inv),
        max_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    #[serde(with = "crate::cplx")]
    pub k: Complex64,
    /// max |S(k) S(-k) - I|.
    pub inverse_deviation: f64,
    /// max |S(-k) - S(conj k)^*|.
    pub adjoint_deviation: f64,
    /// max |S S^* - I|, meaningful on the real axis.
    pub unitarity_deviation: f64,
    pub within_tolerance: bool,
}

pub fn s_identities_check(system: &HedgehogSystem, k: Complex64, tolerance: f64) -> Result<IdentityReport> {
    let s = s_matrix(system, k)?.s_matrix;
    let sm = s_matrix(system, -k)?.s_matrix;
    let sc = s_matrix(system, k.conj())?.s_matrix;
    let m = s.nrows();
    let id = CMatrix::identity(m, m);
    let inverse_deviation = linalg::max_abs(&(&s * &sm - &id));
    let adjoint_deviation = linalg::max_abs(&(&sm - sc.adjoint()));
    let unitarity_deviation = linalg::max_abs(&(&s * s.adjoint() - &id));
    Ok(IdentityReport {
        k,
        inverse_deviation,
        adjoint_deviation,
        unitarity_deviation,
        within_tolerance: inverse_deviation <= tolerance && adjoint_deviation <= tolerance,
    })
}

/// det[C | B] = F1 P1(k) + P2(k) with P1, P2 polynomials of degree <= M.
struct PoleDeterminant<'a> {
    system: &'a HedgehogSystem,
    p1: Poly,
    p2: Poly,
}

impl<'a> PoleDeterminant<'a> {
    fn new(system: &'a HedgehogSystem) -> Result<Self> {
        let m = system.leads();
        let minor = |k: Complex64, which: usize| {
            let (_, b, c1, c2) = lead_blocks(system, k);
            let n = b.nrows();
            let mut mat = CMatrix::zeros(n, n);
            mat.set_column(0, if which == 1 { &c1 } else { &c2 });
            mat.view_mut((0, 1), (n, n - 1)).copy_from(&b);
            linalg::det(&mat)
        };
        let p1 = Poly::interpolate(m, |k| Ok(minor(k, 1)))?;
        let p2 = Poly::interpolate(m, |k| Ok(minor(k, 2)))?;
        let scale = p1.max_coeff().max(p2.max_coeff());
        Ok(PoleDeterminant { system, p1: p1.cleaned(1e-13, scale), p2: p2.cleaned(1e-13, scale) })
    }

    fn eval(&self, k: Complex64) -> Result<Complex64> {
        let p2 = self.p2.eval(k);
        if self.p1.is_zero() {
            return Ok(p2);
        }
        Ok(self.system.geometry.f1(k)? * self.p1.eval(k) + p2)
    }

    fn poles_within(&self, radius: f64) -> Vec<Complex64> {
        if self.p1.is_zero() {
            return Vec::new();
        }
        let scale = self.p1.max_coeff();
        self.system
            .geometry
            .poles_within(radius)
            .into_iter()
            .filter(|p| self.p1.eval(*p).norm() > 1e-12 * scale * (1.0 + p.norm()).powi(self.system.leads() as i32))
            .collect()
    }
}

/// Poles of the continued S-matrix inside `region`: zeros of det[C | B].
pub fn s_pole_search(system: &HedgehogSystem, region: &Rect, tol: f64) -> Result<Vec<RootRecord>> {
    let pd = PoleDeterminant::new(system)?;
    let r = [region.re_min, region.re_max]
        .iter()
        .flat_map(|x| [region.im_min, region.im_max].map(|y| Complex64::new(*x, y).norm()))
        .fold(0.0, f64::max);
    let poles = pd.poles_within(r * 1.01 + 1.0);
    let f = |k: Complex64| pd.eval(k);
    Ok(contour::find_roots(&f, region, &poles, tol, &Policy::default())?.roots)
}
