//! Polynomials with complex coefficients, lowest degree first.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Poly { coeffs }
    }

    /// Coefficients of a polynomial of degree <= `degree` from its values on
    /// the unit circle.
    pub fn interpolate<F>(degree: usize, mut f: F) -> crate::Result<Self>
    where
        F: FnMut(Complex64) -> crate::Result<Complex64>,
    {
        let n = degree + 1;
        let mut vals = Vec::with_capacity(n);
        for m in 0..n {
            vals.push(f(Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))?);
        }
        let coeffs = (0..n)
            .map(|j| {
                let mut s = Complex64::default();
                for (m, v) in vals.iter().enumerate() {
                    s += v * Complex64::from_polar(1.0, -2.0 * PI * (j * m) as f64 / n as f64);
                }
                s / n as f64
            })
            .collect();
        Ok(Poly { coeffs })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, c| acc * z + c)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Zeroes coefficients below `rel` times `scale` and trims the top.
    pub fn cleaned(&self, rel: f64, scale: f64) -> Self {
        let cut = rel * scale;
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .map(|c| if c.norm() <= cut { Complex64::default() } else { *c })
            .collect();
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() != 0.0)
    }

    pub fn shifted(&self, by: usize) -> Self {
        let mut coeffs = vec![Complex64::default(); by];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Poly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Poly { coeffs: (0..n).map(|i| get(self, i) + get(other, i)).collect() }
    }

    /// All roots by simultaneous (Aberth) iteration.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.degree() else { return Vec::new() };
        if deg == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[deg];
        let monic: Vec<Complex64> = self.coeffs[..=deg].iter().map(|c| c / lead).collect();
        let p = Poly::new(monic);
        let dp = p.derivative();
        let radius = 1.0 + p.coeffs[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..deg)
            .map(|j| Complex64::from_polar(0.5 * radius, 2.0 * PI * (j as f64 + 0.25) / deg as f64))
            .collect();
        for _ in 0..500 {
            let mut moved: f64 = 0.0;
            for i in 0..deg {
                let pv = p.eval(z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dp.eval(z[i]);
                let mut s = Complex64::default();
                for j in 0..deg {
                    if j != i {
                        s += 1.0 / (z[i] - z[j]);
                    }
                }
                let step = ratio / (1.0 - ratio * s);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm() / z[i].norm().max(1.0));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }

    pub fn derivative(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect(),
        }
    }
}
