//! Regularised Green's functions F1(k) at the junction point of the compact core.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::specfun::{self, EULER_GAMMA};
use crate::{Error, Result, I};

/// Relative distance to a pole below which F1 is not evaluated.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub fn as_usize(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

/// User-supplied Green's data.
pub trait CustomGreen: Send + Sync {
    fn dimension(&self) -> Dimension;
    fn size(&self) -> f64;
    fn f1(&self, k: Complex64) -> Result<Complex64>;
    /// Poles of F1 with |k| < radius, repeated according to multiplicity.
    fn poles_within(&self, radius: f64) -> Vec<Complex64>;
    /// Green's matrix between several contact points, diagonal regularised.
    fn regular_matrix(&self, _k: Complex64, _points: usize) -> Result<CMatrix> {
        Err(Error::NotSupported("this backend has no off-diagonal Green's values".into()))
    }
}

/// F1 written as a leading term plus a remainder that is exponentially small
/// away from the real axis.  `power` carries the leading term as coeff * k^n
/// when it is a monomial.
#[derive(Clone, Copy, Debug)]
pub struct F1Split {
    pub leading: Complex64,
    pub remainder: Complex64,
    pub power: Option<(Complex64, i32)>,
}

#[derive(Clone)]
pub enum Geometry {
    /// Interval of length 2l with the junction at its midpoint, Dirichlet ends.
    Interval { half_length: f64 },
    /// Flat disc with the junction at the centre, Dirichlet rim.
    Disc { radius: f64 },
    /// Ball with the junction at the centre, Dirichlet surface.
    Ball { radius: f64 },
    Custom(Arc<dyn CustomGreen>),
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Interval { half_length } => write!(f, "Interval(l = {half_length})"),
            Geometry::Disc { radius } => write!(f, "Disc(R = {radius})"),
            Geometry::Ball { radius } => write!(f, "Ball(R = {radius})"),
            Geometry::Custom(c) => write!(f, "Custom(d = {:?}, size = {})", c.dimension(), c.size()),
        }
    }
}

fn check_size(s: f64) -> Result<f64> {
    if s.is_finite() && s > 0.0 {
        Ok(s)
    } else {
        Err(Error::InvalidParameter(format!("size must be positive and finite, got {s}")))
    }
}

fn check_k(k: Complex64) -> Result<()> {
    if k.re.is_finite() && k.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite momentum {k}")))
    }
}

impl Geometry {
    pub fn interval(half_length: f64) -> Result<Self> {
        Ok(Geometry::Interval { half_length: check_size(half_length)? })
    }

    pub fn disc(radius: f64) -> Result<Self> {
        Ok(Geometry::Disc { radius: check_size(radius)? })
    }

    pub fn ball(radius: f64) -> Result<Self> {
        Ok(Geometry::Ball { radius: check_size(radius)? })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Geometry::Interval { .. } => "interval",
            Geometry::Disc { .. } => "disc",
            Geometry::Ball { .. } => "ball",
            Geometry::Custom(_) => "custom",
        }
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            Geometry::Interval { .. } => Dimension::One,
            Geometry::Disc { .. } => Dimension::Two,
            Geometry::Ball { .. } => Dimension::Three,
            Geometry::Custom(c) => c.dimension(),
        }
    }

    pub fn size(&self) -> f64 {
        match self {
            Geometry::Interval { half_length } => *half_length,
            Geometry::Disc { radius } | Geometry::Ball { radius } => *radius,
            Geometry::Custom(c) => c.size(),
        }
    }

    /// Regularised Green's function at the junction.
    pub fn f1(&self, k: Complex64) -> Result<Complex64> {
        check_k(k)?;
        match self {
            Geometry::Interval { half_length: l } => {
                self.guard_nearest_pole(k)?;
                let z = k * *l;
                if z.norm() < 1e-4 {
                    // tan z / z = 1 + z^2/3 + 2 z^4/15
                    let z2 = z * z;
                    return Ok(*l / 2.0 * (1.0 + z2 / 3.0 + 2.0 * z2 * z2 / 15.0));
                }
                Ok(specfun::tan_c(z)? / (2.0 * k))
            }
            Geometry::Ball { radius: r } => {
                self.guard_nearest_pole(k)?;
                let z = k * *r;
                if z.norm() < 1e-4 {
                    // z cot z = 1 - z^2/3 - z^4/45
                    let z2 = z * z;
                    return Ok(-(1.0 - z2 / 3.0 - z2 * z2 / 45.0) / (4.0 * PI * *r));
                }
                Ok(-k / (4.0 * PI) * specfun::cot_c(z)?)
            }
            Geometry::Disc { radius } => disc_f1(k, *radius),
            Geometry::Custom(c) => c.f1(k),
        }
    }

    /// Leading large-|Im k| behaviour of F1, one branch per open half-plane.
    pub fn leading_term(&self, k: Complex64) -> Result<Complex64> {
        if k.im == 0.0 {
            return Err(Error::Domain("the leading term is defined off the real axis".into()));
        }
        leading(self.dimension(), k)
    }

    /// F1 = leading + remainder, with the remainder free of cancellation.
    /// On the real axis the upper branch is used.
    pub fn f1_split(&self, k: Complex64) -> Result<F1Split> {
        check_k(k)?;
        match self {
            Geometry::Interval { half_length: l } => {
                self.guard_nearest_pole(k)?;
                if k.norm() == 0.0 {
                    return Err(Error::Domain("the split is singular at k = 0".into()));
                }
                let t = specfun::tan_split(k * *l);
                let coeff = t.limit / 2.0;
                Ok(F1Split { leading: coeff / k, remainder: t.remainder / (2.0 * k), power: Some((coeff, -1)) })
            }
            Geometry::Ball { radius: r } => {
                self.guard_nearest_pole(k)?;
                let t = specfun::cot_split(k * *r)?;
                let coeff = -t.limit / (4.0 * PI);
                Ok(F1Split { leading: coeff * k, remainder: -k * t.remainder / (4.0 * PI), power: Some((coeff, 1)) })
            }
            Geometry::Disc { radius } => {
                if k.norm() == 0.0 {
                    return Err(Error::Domain("the split is singular at k = 0".into()));
                }
                let lead = leading(Dimension::Two, k)?;
                let z = k * *radius;
                if z.norm() < specfun::BESSEL_CROSSOVER {
                    let v = disc_f1(k, *radius)?;
                    return Ok(F1Split { leading: lead, remainder: v - lead, power: None });
                }
                let rem = if k.re >= 0.0 {
                    specfun::y0_over_j0_split(z)?.remainder / 4.0
                } else {
                    specfun::y0_over_j0_split(-z.conj())?.remainder.conj() / 4.0
                };
                Ok(F1Split { leading: lead, remainder: rem, power: None })
            }
            Geometry::Custom(c) => {
                let v = c.f1(k)?;
                let lead = if k.im == 0.0 { v } else { leading(c.dimension(), k)? };
                Ok(F1Split { leading: lead, remainder: v - lead, power: None })
            }
        }
    }

    /// Poles of F1 inside |k| < radius, sorted by real part.
    pub fn poles_within(&self, radius: f64) -> Vec<Complex64> {
        let positive: Vec<f64> = match self {
            Geometry::Interval { half_length: l } => {
                (1..).map(|n| (2 * n - 1) as f64 * PI / (2.0 * l)).take_while(|&p| p < radius).collect()
            }
            Geometry::Ball { radius: r } => (1..).map(|n| n as f64 * PI / r).take_while(|&p| p < radius).collect(),
            Geometry::Disc { radius: r } => {
                (1..).map(|n| j0_zero(n) / r).take_while(|&p| p < radius).collect()
            }
            Geometry::Custom(c) => {
                let mut v = c.poles_within(radius);
                v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                return v;
            }
        };
        let mut out: Vec<Complex64> = positive.iter().rev().map(|&p| Complex64::new(-p, 0.0)).collect();
        out.extend(positive.iter().map(|&p| Complex64::new(p, 0.0)));
        out
    }

    /// Truncated eigenfunction expansion of the interval F1 with a tail estimate.
    pub fn f1_series(&self, k: Complex64, terms: usize) -> Result<Complex64> {
        let Geometry::Interval { half_length: l } = self else {
            return Err(Error::NotSupported("the spectral series is implemented for the interval".into()));
        };
        if terms == 0 {
            return Err(Error::InvalidParameter("need at least one term".into()));
        }
        let k2 = k * k;
        let mut sum = Complex64::default();
        for n in (1..=terms).rev() {
            let kappa = (2 * n - 1) as f64 * PI / (2.0 * l);
            let d = kappa * kappa - k2;
            if d.norm() <= POLE_GUARD * kappa * kappa {
                return Err(Error::NearPole { k });
            }
            sum += 1.0 / d;
        }
        let tail = *l / (PI * PI * terms as f64);
        Ok(sum / *l + tail)
    }

    /// Green's matrix for several contact points; built-ins have one.
    pub fn regular_matrix(&self, k: Complex64, points: usize) -> Result<CMatrix> {
        match (self, points) {
            (Geometry::Custom(c), p) if p > 1 => c.regular_matrix(k, p),
            (_, 1) => Ok(CMatrix::from_element(1, 1, self.f1(k)?)),
            (_, 0) => Err(Error::InvalidParameter("need at least one contact point".into())),
            _ => Err(Error::NotSupported(
                "several contact points on a built-in core need off-diagonal Green's values, which are not available"
                    .into(),
            )),
        }
    }

    fn guard_nearest_pole(&self, k: Complex64) -> Result<()> {
        let (first, spacing) = match self {
            Geometry::Interval { half_length: l } => (PI / (2.0 * l), PI / l),
            Geometry::Ball { radius: r } => (PI / r, PI / r),
            _ => return Ok(()),
        };
        let x = k.re.abs();
        let n = ((x - first) / spacing).round().max(0.0);
        let p = first + n * spacing;
        let d = Complex64::new(x - p, k.im).norm();
        if d <= POLE_GUARD * p.max(1.0) {
            return Err(Error::NearPole { k });
        }
        Ok(())
    }
}

fn leading(dim: Dimension, k: Complex64) -> Result<Complex64> {
    let s = if k.im >= 0.0 { 1.0 } else { -1.0 };
    Ok(match dim {
        Dimension::One => s * I / (2.0 * k),
        Dimension::Two => -(specfun::principal_log(-s * I * k)? - 2f64.ln() + EULER_GAMMA) / (2.0 * PI),
        Dimension::Three => s * I * k / (4.0 * PI),
    })
}

fn disc_f1(k: Complex64, radius: f64) -> Result<Complex64> {
    if k.re < 0.0 {
        return Ok(disc_f1(-k.conj(), radius)?.conj());
    }
    let z = k * radius;
    if z.norm() < specfun::BESSEL_CROSSOVER {
        // the logarithms cancel: F1 = ln R / 2pi + S(kR) / 4 J0(kR)
        let (s, j0) = specfun::y0_regular_part(z);
        if j0.norm() <= POLE_GUARD * (1.0 + s.norm()) {
            return Err(Error::NearPole { k });
        }
        return Ok(radius.ln() / (2.0 * PI) + s / (4.0 * j0));
    }
    let ratio = specfun::y0_over_j0_split(z).map_err(|e| match e {
        Error::Domain(_) => Error::NearPole { k },
        other => other,
    })?;
    let log_k = specfun::principal_log(k)?;
    Ok(-(log_k - 2f64.ln() + EULER_GAMMA) / (2.0 * PI) + ratio.value() / 4.0)
}

/// n-th positive zero of J0.
pub fn j0_zero(n: usize) -> f64 {
    let b = (n as f64 - 0.25) * PI;
    let mut x = b + 1.0 / (8.0 * b) - 31.0 / (384.0 * b.powi(3));
    for _ in 0..20 {
        let j0 = specfun::bessel_j0(Complex64::new(x, 0.0)).map(|v| v.re).unwrap_or(0.0);
        let j1 = specfun::bessel_j1(Complex64::new(x, 0.0)).map(|v| v.re).unwrap_or(1.0);
        // J0' = -J1
        let step = -j0 / j1;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn interval_values() {
        let g = Geometry::interval(1.0).unwrap();
        let v = g.f1(c(PI / 4.0, 0.0)).unwrap();
        assert!((v.re - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
        assert!((g.f1(c(0.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        assert!((g.f1(c(1.0, 0.0)).unwrap().re - 1f64.tan() / 2.0).abs() < 1e-15);
        assert!(matches!(g.f1(c(PI / 2.0, 0.0)), Err(Error::NearPole { .. })));
    }

    #[test]
    fn ball_values() {
        let g = Geometry::ball(1.0).unwrap();
        let v = g.f1(c(0.0, 10.0)).unwrap();
        assert!((v - c(-10.0 / (4.0 * PI), 0.0)).norm() < 1e-7);
        let v0 = g.f1(c(0.0, 0.0)).unwrap();
        assert!((v0.re + 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn pole_listing() {
        let g = Geometry::interval(1.0).unwrap();
        let p = g.poles_within(5.0);
        assert_eq!(p.len(), 4);
        assert!((p[3].re - 1.5 * PI).abs() < 1e-15 && (p[0].re + 1.5 * PI).abs() < 1e-15);
        let d = Geometry::disc(1.0).unwrap().poles_within(6.0);
        assert_eq!(d.len(), 4);
        assert!((d[2].re - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((d[3].re - 5.520_078_110_286_311).abs() < 1e-13);
        let b = Geometry::ball(1.0).unwrap().poles_within(4.0);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn disc_regimes_agree() {
        // crossing |kR| = 12.5 must be smooth
        let g = Geometry::disc(PI).unwrap();
        for &k in &[c(3.97, 0.3), c(3.98, -0.2), c(2.0, 3.3), c(-3.0, -2.5)] {
            let a = g.f1(k).unwrap();
            let z = k * PI;
            let b = specfun::bessel_all(z).unwrap();
            let direct = -(specfun::principal_log(k).unwrap() - 2f64.ln() + EULER_GAMMA) / (2.0 * PI)
                + b.y0 / (4.0 * b.j0);
            assert!((a - direct).norm() < 1e-10 * (1.0 + a.norm()), "{k}: {a} vs {direct}");
        }
    }

    #[test]
    fn split_sums_to_value() {
        for g in [Geometry::interval(1.0).unwrap(), Geometry::disc(PI).unwrap(), Geometry::ball(1.0).unwrap()] {
            for &k in &[c(1.3, 2.0), c(2.2, -0.7), c(-4.1, -6.0), c(7.3, 0.0)] {
                let s = g.f1_split(k).unwrap();
                let v = g.f1(k).unwrap();
                assert!((s.leading + s.remainder - v).norm() < 1e-11 * (1.0 + v.norm()), "{g:?} {k}");
            }
        }
    }

    #[test]
    fn multi_point_refused_for_builtins() {
        let g = Geometry::disc(1.0).unwrap();
        assert!(matches!(g.regular_matrix(c(1.0, -0.1), 2), Err(Error::NotSupported(_))));
        assert_eq!(g.regular_matrix(c(1.0, -0.1), 1).unwrap().nrows(), 1);
    }
}
