//! Junction couplings and the energy-dependent effective coupling seen by the core.
//!
//! Boundary data at the junction are collected as Psi = (d, f_1(0), ..., f_M(0))
//! and Psi' = (SIGMA * c, f_1'(0), ..., f_M'(0)), where near the junction the core
//! function behaves as c F0(x) + d and every lead is the half-line x >= 0.  The
//! coupling condition is (U - I) Psi + i (U + I) Psi' = 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Geometry;
use crate::linalg::{self, CMatrix, CVector, Lu};
use crate::poly::Poly;
use crate::{Error, Result, I};

/// Orientation of the core coefficient c inside Psi'.  The singular term
/// c F0 carries the flux -c into the junction, so the symmetric boundary form
/// pairs d with -c.  With this sign the coupling is self-adjoint and all
/// resonances lie in the closed lower half-plane.
pub const SIGMA: f64 = -1.0;

pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Kirchhoff,
    Decoupled,
    DirichletJunction,
}

/// Unitary junction matrix of size 1 + M; row and column 0 belong to the core.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    u: CMatrix,
}

pub fn validate_unitary(u: &CMatrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::InvalidParameter(format!("coupling must be square, got {}x{}", u.nrows(), u.ncols())));
    }
    if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidParameter("coupling has non-finite entries".into()));
    }
    let deviation = linalg::unitarity_deviation(u);
    if deviation > UNITARITY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

impl CouplingMatrix {
    pub fn new(u: CMatrix) -> Result<Self> {
        validate_unitary(&u)?;
        if u.nrows() < 2 {
            return Err(Error::InvalidParameter("coupling needs the core and at least one lead".into()));
        }
        Ok(CouplingMatrix { u })
    }

    pub fn preset(preset: Preset, leads: usize) -> Result<Self> {
        if leads == 0 {
            return Err(Error::InvalidParameter("at least one lead is required".into()));
        }
        let n = leads + 1;
        let id = CMatrix::identity(n, n);
        let u = match preset {
            Preset::Kirchhoff => CMatrix::from_element(n, n, Complex64::new(2.0 / n as f64, 0.0)) - id,
            Preset::Decoupled => id,
            Preset::DirichletJunction => -id,
        };
        Ok(CouplingMatrix { u })
    }

    pub fn kirchhoff(leads: usize) -> Result<Self> {
        Self::preset(Preset::Kirchhoff, leads)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn leads(&self) -> usize {
        self.u.nrows() - 1
    }

    fn u1(&self) -> Complex64 {
        self.u[(0, 0)]
    }

    fn u2(&self) -> CMatrix {
        self.u.view((0, 1), (1, self.leads())).into_owned()
    }

    fn u3(&self) -> CMatrix {
        self.u.view((1, 0), (self.leads(), 1)).into_owned()
    }

    fn u4(&self) -> CMatrix {
        let m = self.leads();
        self.u.view((1, 1), (m, m)).into_owned()
    }

    /// (1 - k) U4 - (1 + k) I.
    fn lead_block(&self, k: Complex64) -> CMatrix {
        let m = self.leads();
        self.u4() * (1.0 - k) - CMatrix::identity(m, m) * (1.0 + k)
    }

    /// Junction matrix with the leads eliminated using outgoing waves
    /// f_j'(0) = i k f_j(0); the core corner is U1 - s.
    fn eliminated(&self, k: Complex64, s: f64) -> CMatrix {
        let m = self.leads();
        let mut w = CMatrix::zeros(m + 1, m + 1);
        w[(0, 0)] = self.u1() - s;
        w.view_mut((0, 1), (1, m)).copy_from(&(self.u2() * (1.0 - k)));
        w.view_mut((1, 0), (m, 1)).copy_from(&self.u3());
        w.view_mut((1, 1), (m, m)).copy_from(&self.lead_block(k));
        w
    }
}

/// Energy-dependent scalar coupling obtained by eliminating the leads.
pub fn effective_coupling(u: &CouplingMatrix, k: Complex64) -> Result<Complex64> {
    let x = u.lead_block(k);
    let lu = Lu::new(x);
    let Some(y) = lu.solve(&u.u3()) else {
        return Err(Error::Singular { k });
    };
    let corr = (u.u2() * y)[(0, 0)];
    Ok(u.u1() - (1.0 - k) * corr)
}

/// i (u~ + 1) / (u~ - 1).
pub fn effective_coupling_term(u: &CouplingMatrix, k: Complex64) -> Result<Complex64> {
    let ut = effective_coupling(u, k)?;
    if (ut - 1.0).norm() < 1e-14 {
        return Err(Error::Decoupled);
    }
    Ok(I * (ut + 1.0) / (ut - 1.0))
}

/// Effective couplings of several independent junctions.
pub fn effective_coupling_blocks(blocks: &[CouplingMatrix], k: Complex64) -> Result<CVector> {
    let vals = blocks.iter().map(|b| effective_coupling(b, k)).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(vals))
}

/// det W(k) = det X(k) (u~(k) - 1) and det W+(k) = det X(k) (u~(k) + 1) as
/// polynomials of degree <= M, so that i (u~ + 1)/(u~ - 1) = i W+ / W.
#[derive(Clone, Debug)]
pub struct CouplingPolys {
    pub det_w: Poly,
    pub det_w_plus: Poly,
}

pub fn coupling_polys(u: &CouplingMatrix) -> Result<CouplingPolys> {
    let m = u.leads();
    let det_w = Poly::interpolate(m, |k| Ok(linalg::det(&u.eliminated(k, 1.0))))?;
    let det_w_plus = Poly::interpolate(m, |k| Ok(linalg::det(&u.eliminated(k, -1.0))))?;
    let scale = det_w.max_coeff().max(det_w_plus.max_coeff());
    Ok(CouplingPolys { det_w: det_w.cleaned(1e-13, scale), det_w_plus: det_w_plus.cleaned(1e-13, scale) })
}

/// A core with M leads attached at one point.
#[derive(Clone, Debug)]
pub struct HedgehogSystem {
    pub geometry: Geometry,
    pub coupling: CouplingMatrix,
}

impl HedgehogSystem {
    pub fn new(geometry: Geometry, coupling: CouplingMatrix) -> Self {
        HedgehogSystem { geometry, coupling }
    }

    pub fn leads(&self) -> usize {
        self.coupling.leads()
    }
}

/// Left-hand side of the coupling condition.
pub fn coupling_residual(u: &CouplingMatrix, psi: &CVector, dpsi: &CVector) -> CVector {
    let n = u.matrix().nrows();
    let id = CMatrix::identity(n, n);
    (u.matrix() - &id) * psi + (u.matrix() + &id) * dpsi * I
}

/// Psi and Psi' from core coefficients and lead values.
pub fn boundary_columns(d: Complex64, c: Complex64, f: &[Complex64], df: &[Complex64]) -> (CVector, CVector) {
    let mut psi = vec![d];
    psi.extend_from_slice(f);
    let mut dpsi = vec![SIGMA * c];
    dpsi.extend_from_slice(df);
    (CVector::from_vec(psi), CVector::from_vec(dpsi))
}
