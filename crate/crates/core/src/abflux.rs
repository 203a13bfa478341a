//! Disc pierced by an Aharonov-Bohm string of flux 1/2, with one half-line
//! lead attached at the centre.
//!
//! Only the partial waves m = 0 and m = -1 feel the junction.  At flux 1/2 the
//! m = 0 radial equation loses its centrifugal term, so
//! u(r) = r^{-1/2} c sin k(R - r) on the disc and f(x) = a sin kx + b cos kx
//! on the lead.  The boundary values entering the coupling are
//! Phi1 = (b, c sqrt(pi) sin kR, 0) and Phi2 = k (a, -c sqrt(pi) cos kR, 0).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::Rect;
use crate::linalg::{CMatrix, CVector};
use crate::specfun;
use crate::{Error, Result, I};

/// Smallest distance of a scan grid from the real axis.
pub const REAL_AXIS_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct ABSystem {
    pub radius: f64,
    pub alpha: f64,
    pub rho: f64,
    u: CMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSolution {
    #[serde(with = "crate::cplx")]
    pub a: Complex64,
    #[serde(with = "crate::cplx")]
    pub b: Complex64,
    #[serde(with = "crate::cplx")]
    pub c: Complex64,
    #[serde(with = "crate::cplx")]
    pub k: Complex64,
}

impl ABSystem {
    pub fn new(radius: f64, alpha: f64, rho: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("disc radius must be positive, got {radius}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("flux must lie in (0, 1), got {alpha}")));
        }
        if !rho.is_finite() {
            return Err(Error::InvalidParameter("phase rho must be finite".into()));
        }
        let one = Complex64::new(1.0, 0.0);
        let mut u = CMatrix::zeros(3, 3);
        u[(0, 1)] = one;
        u[(1, 0)] = one;
        u[(2, 2)] = Complex64::from_polar(1.0, rho);
        Ok(ABSystem { radius, alpha, rho, u })
    }

    /// The half-flux system used for the no-resonance demonstration.
    pub fn half_flux(radius: f64, rho: f64) -> Result<Self> {
        Self::new(radius, 0.5, rho)
    }

    pub fn coupling(&self) -> &CMatrix {
        &self.u
    }

    fn require_half_flux(&self) -> Result<()> {
        if self.alpha != 0.5 {
            return Err(Error::Refused(format!(
                "the sine Ansatz needs a vanishing centrifugal term, i.e. flux 1/2 (got {})",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn boundary_functionals(&self, sol: &ChannelSolution) -> (CVector, CVector) {
        let s = PI.sqrt();
        let kr = sol.k * self.radius;
        let z = Complex64::default();
        let phi1 = CVector::from_vec(vec![sol.b, sol.c * s * kr.sin(), z]);
        let phi2 = CVector::from_vec(vec![sol.k * sol.a, -sol.k * sol.c * s * kr.cos(), z]);
        (phi1, phi2)
    }

    /// (U - I) Phi1 + i (U + I) Phi2.
    pub fn coupling_residual(&self, sol: &ChannelSolution) -> CVector {
        let (p1, p2) = self.boundary_functionals(sol);
        let id = CMatrix::identity(3, 3);
        (&self.u - &id) * p1 + (&self.u + &id) * p2 * I
    }

    /// Lead amplitudes (a, b) solving the first two coupling rows for given c.
    pub fn solve_lead(&self, k: Complex64, c: Complex64) -> Result<ChannelSolution> {
        let zero = Complex64::default();
        let at = |a: Complex64, b: Complex64| self.coupling_residual(&ChannelSolution { a, b, c, k });
        let r0 = at(zero, zero);
        let ra = at(Complex64::new(1.0, 0.0), zero) - &r0;
        let rb = at(zero, Complex64::new(1.0, 0.0)) - &r0;
        let det = ra[0] * rb[1] - ra[1] * rb[0];
        if det.norm() <= 1e-300 {
            return Err(Error::Singular { k });
        }
        let a = (-r0[0] * rb[1] + r0[1] * rb[0]) / det;
        let b = (-ra[0] * r0[1] + ra[1] * r0[0]) / det;
        Ok(ChannelSolution { a, b, c, k })
    }

    /// Zeros of the radial function of a decoupled partial wave m: with flux 1/2
    /// the Bessel order |m + 1/2| is half-integer, giving zeros of the
    /// spherical Bessel function j_n(kR) with n = |m + 1/2| - 1/2.
    pub fn persistent_eigenvalues(&self, m: i64, count: usize) -> Result<Vec<f64>> {
        self.require_half_flux()?;
        if m == 0 || m == -1 {
            return Err(Error::Refused(format!("partial wave m = {m} is coupled to the lead")));
        }
        let n = if m > 0 { m as usize } else { (-m - 1) as usize };
        let j = |x: f64| specfun::spherical_bessel_j(n, x);
        let mut out = Vec::with_capacity(count);
        let h = 0.05;
        let mut x = (n as f64).max(0.5);
        let mut fx = j(x);
        while out.len() < count {
            let (x1, f1) = (x + h, j(x + h));
            if fx == 0.0 {
                out.push(x / self.radius);
            } else if fx * f1 < 0.0 {
                let (mut lo, mut hi) = (x, x1);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if j(lo) * j(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo <= 1e-15 * hi {
                        break;
                    }
                }
                out.push(0.5 * (lo + hi) / self.radius);
            }
            x = x1;
            fx = f1;
        }
        Ok(out)
    }
}

/// Split of a sin kx + b cos kx into incoming e^{-ikx} and outgoing e^{ikx}
/// parts, returned as (incoming, outgoing).
pub fn outgoing_component(sol: &ChannelSolution) -> (Complex64, Complex64) {
    ((sol.b + I * sol.a) / 2.0, (sol.b - I * sol.a) / 2.0)
}

/// Hermitian boundary form Phi1(psi1)^* Phi2(psi2) - Phi2(psi1)^* Phi1(psi2).
pub fn boundary_form(sys: &ABSystem, s1: &ChannelSolution, s2: &ChannelSolution) -> Complex64 {
    let (p1, q1) = sys.boundary_functionals(s1);
    let (p2, q2) = sys.boundary_functionals(s2);
    p1.dotc(&q2) - q1.dotc(&p2)
}

/// Reflection amplitude outgoing / incoming on the lead for real k.
pub fn reflection(sys: &ABSystem, k: Complex64) -> Result<Complex64> {
    sys.require_half_flux()?;
    let sol = sys.solve_lead(k, Complex64::new(1.0, 0.0))?;
    let (inc, out) = outgoing_component(&sol);
    Ok(out / inc)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub region: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl ScanGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let r = &self.region;
        let step = |lo: f64, hi: f64, n: usize, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        (0..self.ny)
            .flat_map(|j| {
                (0..self.nx).map(move |i| {
                    Complex64::new(step(r.re_min, r.re_max, self.nx, i), step(r.im_min, r.im_max, self.ny, j))
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub points: usize,
    #[serde(with = "crate::cplx")]
    pub c: Complex64,
    pub min_incoming: f64,
    #[serde(with = "crate::cplx")]
    pub argmin: Complex64,
    /// max | |incoming| - (sqrt(pi)/2) |c| e^{R Im k} |.
    pub max_closed_form_deviation: f64,
    /// max relative deviation of the lead function from c sqrt(pi) sin k(R + x).
    pub max_profile_deviation: f64,
    pub max_residual: f64,
    /// Only the zero solution exists (c = 0).
    pub trivial_only: bool,
    pub no_true_resonances: bool,
    pub verdict: String,
    /// |incoming| per grid point, real part fastest.
    pub incoming: Vec<f64>,
}

const PROFILE_POINTS: [f64; 5] = [0.0, 0.3, 0.7, 1.5, 2.5];

pub fn true_resonance_scan(sys: &ABSystem, grid: &ScanGrid, c: Complex64) -> Result<ScanReport> {
    sys.require_half_flux()?;
    grid.region.validate()?;
    if grid.region.im_max > -REAL_AXIS_MARGIN {
        return Err(Error::InvalidParameter(format!(
            "scan grid must stay below Im k = -{REAL_AXIS_MARGIN}, got Im k up to {}",
            grid.region.im_max
        )));
    }
    if grid.nx == 0 || grid.ny == 0 {
        return Err(Error::InvalidParameter("scan grid needs at least one point per axis".into()));
    }
    let pts = grid.points();
    let sqrt_pi = PI.sqrt();
    let rows: Vec<Result<(f64, f64, f64, f64)>> = pts
        .par_iter()
        .map(|&k| {
            let sol = sys.solve_lead(k, c)?;
            let res = sys.coupling_residual(&sol).iter().map(|z| z.norm()).fold(0.0, f64::max);
            let (inc, _) = outgoing_component(&sol);
            let closed = 0.5 * sqrt_pi * c.norm() * (k.im * sys.radius).exp();
            let mut prof: f64 = 0.0;
            for x in PROFILE_POINTS {
                let f = sol.a * (k * x).sin() + sol.b * (k * x).cos();
                let g = c * sqrt_pi * (k * (sys.radius + x)).sin();
                prof = prof.max((f - g).norm() / g.norm().max(1.0));
            }
            Ok((inc.norm(), (inc.norm() - closed).abs(), prof, res))
        })
        .collect();
    let mut incoming = Vec::with_capacity(pts.len());
    let (mut min_incoming, mut argmin) = (f64::INFINITY, pts[0]);
    let (mut dev, mut prof, mut res) = (0.0f64, 0.0f64, 0.0f64);
    for (k, r) in pts.iter().zip(rows) {
        let (inc, d, p, q) = r?;
        if inc < min_incoming {
            min_incoming = inc;
            argmin = *k;
        }
        dev = dev.max(d);
        prof = prof.max(p);
        res = res.max(q);
        incoming.push(inc);
    }
    let trivial_only = c.norm() == 0.0;
    let no_true_resonances = !trivial_only && min_incoming > 0.0;
    let verdict = if trivial_only {
        "c = 0: only the trivial solution a = b = 0".to_string()
    } else if no_true_resonances {
        "no true resonances: confirmed on grid".to_string()
    } else {
        "incoming amplitude vanishes somewhere on the grid".to_string()
    };
    Ok(ScanReport {
        points: pts.len(),
        c,
        min_incoming,
        argmin,
        max_closed_form_deviation: dev,
        max_profile_deviation: prof,
        max_residual: res,
        trivial_only,
        no_true_resonances,
        verdict,
        incoming,
    })
}
