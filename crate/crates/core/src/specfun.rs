//! Elementary and Bessel-type functions of a complex argument.
//!
//! The Bessel routines use a power series for |z| < [`BESSEL_CROSSOVER`] and
//! the Hankel asymptotic expansion beyond it.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::{Error, Result, I};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Modulus at which the Bessel evaluation switches from series to asymptotics.
pub const BESSEL_CROSSOVER: f64 = 12.5;

/// Beyond this |Im z| tan and cot are built from e^{±2iz} instead of sin/cos.
const TRIG_SWITCH: f64 = 20.0;

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// Logarithm with the argument taken in (-pi, pi].
pub fn principal_log(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log of non-finite value {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("log of zero".into()));
    }
    let mut arg = z.im.atan2(z.re);
    if arg <= -PI {
        arg = PI;
    }
    Ok(Complex64::new(z.norm().ln(), arg))
}

/// A function written as its half-plane limit plus a remainder that decays
/// away from the real axis.  The remainder is computed without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub limit: Complex64,
    pub remainder: Complex64,
}

impl Split {
    pub fn value(&self) -> Complex64 {
        self.limit + self.remainder
    }
}

/// tan z = limit + remainder with limit = i for Im z >= 0 and -i below.
pub fn tan_split(z: Complex64) -> Split {
    if z.im >= 0.0 {
        let w = (2.0 * I * z).exp();
        Split { limit: I, remainder: -2.0 * I * w / (1.0 + w) }
    } else {
        let p = (-2.0 * I * z).exp();
        Split { limit: -I, remainder: 2.0 * I * p / (1.0 + p) }
    }
}

/// cot z = limit + remainder with limit = -i for Im z >= 0 and i below.
pub fn cot_split(z: Complex64) -> Result<Split> {
    let s = if z.im >= 0.0 {
        let w = (2.0 * I * z).exp();
        Split { limit: -I, remainder: -2.0 * I * w / (1.0 - w) }
    } else {
        let p = (-2.0 * I * z).exp();
        Split { limit: I, remainder: 2.0 * I * p / (1.0 - p) }
    };
    if !finite(s.remainder) {
        return Err(Error::Domain(format!("cot has a pole at {z}")));
    }
    Ok(s)
}

pub fn tan_c(z: Complex64) -> Result<Complex64> {
    if z.im.abs() > TRIG_SWITCH {
        return Ok(tan_split(z).value());
    }
    let (x2, y2) = (2.0 * z.re, 2.0 * z.im);
    let d = x2.cos() + y2.cosh();
    if d.abs() <= 1e-15 * y2.cosh() {
        return Err(Error::Domain(format!("tan has a pole at {z}")));
    }
    Ok(Complex64::new(x2.sin() / d, y2.sinh() / d))
}

pub fn cot_c(z: Complex64) -> Result<Complex64> {
    if z.im.abs() > TRIG_SWITCH {
        return Ok(cot_split(z)?.value());
    }
    let (x2, y2) = (2.0 * z.re, 2.0 * z.im);
    let d = y2.cosh() - x2.cos();
    if d.abs() <= 1e-15 * y2.cosh() {
        return Err(Error::Domain(format!("cot has a pole at {z}")));
    }
    Ok(Complex64::new(x2.sin() / d, -y2.sinh() / d))
}

/// J0, Y0, J1, Y1 at one argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bessel01 {
    pub j0: Complex64,
    pub y0: Complex64,
    pub j1: Complex64,
    pub y1: Complex64,
}

/// Power-series pieces.  `s0` is the log-free part of Y0 divided by 2/pi, `s1`
/// the log-free sum entering Y1.
struct SeriesParts {
    j0: Complex64,
    j1: Complex64,
    s0: Complex64,
    s1: Complex64,
}

fn series_parts(z: Complex64) -> SeriesParts {
    let q = -z * z / 4.0;
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = z / 2.0;
    let (mut j0, mut j1) = (Complex64::default(), Complex64::default());
    let (mut s0, mut s1) = (Complex64::default(), Complex64::default());
    let mut h = 0.0;
    for m in 0..400u32 {
        let h_next = h + 1.0 / f64::from(m + 1);
        j0 += t0;
        s0 -= t0 * h;
        j1 += t1;
        s1 += t1 * (h + h_next);
        let mf = f64::from(m + 1);
        t0 *= q / (mf * mf);
        t1 *= q / (mf * (mf + 1.0));
        h = h_next;
        let small = 1e-18;
        if m > 2
            && t0.norm() * (1.0 + h) <= small * j0.norm().max(s0.norm())
            && t1.norm() * (2.0 + 2.0 * h) <= small * j1.norm().max(s1.norm())
        {
            break;
        }
    }
    SeriesParts { j0, j1, s0, s1 }
}

fn check_y_domain(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain(format!("Y is singular on the cut (-inf, 0], got {z}")));
    }
    Ok(())
}

/// Power-series evaluation, accurate for moderate |z|.
pub fn bessel_series(z: Complex64) -> Result<Bessel01> {
    check_y_domain(z)?;
    let p = series_parts(z);
    let l = principal_log(z / 2.0)? + EULER_GAMMA;
    let y0 = (2.0 / PI) * (l * p.j0 + p.s0);
    let y1 = -2.0 / (PI * z) + (2.0 / PI) * l * p.j1 - p.s1 / PI;
    Ok(Bessel01 { j0: p.j0, y0, j1: p.j1, y1 })
}

/// Hankel P and Q series of order `nu`, summed to the smallest term.
fn hankel_pq(z: Complex64, nu: f64) -> Result<(Complex64, Complex64)> {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (Complex64::default(), Complex64::default());
    let mut a = Complex64::new(1.0, 0.0);
    let zinv = 1.0 / z;
    let mut prev = f64::INFINITY;
    let mut k = 0usize;
    loop {
        let mag = a.norm();
        if mag > prev {
            break;
        }
        prev = mag;
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k.is_multiple_of(2) {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if mag < 1e-17 || k > 200 {
            break;
        }
        k += 1;
        let kf = k as f64;
        let c = (2.0 * kf - 1.0).powi(2);
        a *= zinv * ((mu - c) / (8.0 * kf));
    }
    if prev > 1e-10 {
        return Err(Error::AccuracyLoss(format!("asymptotic series too short at |z| = {}", z.norm())));
    }
    Ok((p, q))
}

fn asymptotic_right(z: Complex64) -> Result<Bessel01> {
    let (p0, q0) = hankel_pq(z, 0.0)?;
    let (p1, q1) = hankel_pq(z, 1.0)?;
    let amp = (2.0 / (PI * z)).sqrt();
    let chi0 = z - FRAC_PI_4;
    let chi1 = z - 3.0 * FRAC_PI_4;
    let (c0, s0) = (chi0.cos(), chi0.sin());
    let (c1, s1) = (chi1.cos(), chi1.sin());
    let out = Bessel01 {
        j0: amp * (p0 * c0 - q0 * s0),
        y0: amp * (p0 * s0 + q0 * c0),
        j1: amp * (p1 * c1 - q1 * s1),
        y1: amp * (p1 * s1 + q1 * c1),
    };
    if ![out.j0, out.y0, out.j1, out.y1].iter().all(|v| finite(*v)) {
        return Err(Error::AccuracyLoss(format!("Bessel values overflow at {z}")));
    }
    Ok(out)
}

/// Hankel asymptotic evaluation; the left half-plane is reached by reflection.
pub fn bessel_asymptotic(z: Complex64) -> Result<Bessel01> {
    check_y_domain(z)?;
    if z.re >= 0.0 {
        return asymptotic_right(z);
    }
    let w = -z;
    let b = asymptotic_right(w)?;
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    Ok(Bessel01 {
        j0: b.j0,
        y0: b.y0 + s * 2.0 * I * b.j0,
        j1: -b.j1,
        y1: -b.y1 - s * 2.0 * I * b.j1,
    })
}

/// J0, Y0, J1, Y1 with the regime picked by |z|.
pub fn bessel_all(z: Complex64) -> Result<Bessel01> {
    if z.norm() < BESSEL_CROSSOVER {
        bessel_series(z)
    } else {
        bessel_asymptotic(z)
    }
}

fn bessel_j_pair(z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() < BESSEL_CROSSOVER {
        let p = series_parts(z);
        return Ok((p.j0, p.j1));
    }
    let sign = if z.re < 0.0 { -1.0 } else { 1.0 };
    let b = asymptotic_right(z * sign)?;
    Ok((b.j0, b.j1 * sign))
}

pub fn bessel_j0(z: Complex64) -> Result<Complex64> {
    Ok(bessel_j_pair(z)?.0)
}

pub fn bessel_j1(z: Complex64) -> Result<Complex64> {
    Ok(bessel_j_pair(z)?.1)
}

pub fn bessel_y0(z: Complex64) -> Result<Complex64> {
    Ok(bessel_all(z)?.y0)
}

pub fn bessel_y1(z: Complex64) -> Result<Complex64> {
    Ok(bessel_all(z)?.y1)
}

/// The log-free part of Y0: Y0(z) - (2/pi)(ln(z/2) + gamma) J0(z), with J0.
/// Both are entire functions of z^2, so this is valid for every z.
pub fn y0_regular_part(z: Complex64) -> (Complex64, Complex64) {
    let p = series_parts(z);
    ((2.0 / PI) * p.s0, p.j0)
}

/// Y0(z)/J0(z) for Re z >= 0 and large |z|, split into its half-plane limit
/// (+i above the real axis, -i below) and an exponentially small remainder.
pub fn y0_over_j0_split(z: Complex64) -> Result<Split> {
    if z.re < 0.0 {
        return Err(Error::Domain("the ratio split is defined for Re z >= 0".into()));
    }
    if z.norm() < BESSEL_CROSSOVER {
        return Err(Error::Domain("the ratio split needs the asymptotic regime".into()));
    }
    let (p, q) = hankel_pq(z, 0.0)?;
    let t = tan_split(z - FRAC_PI_4);
    let r = t.remainder;
    let den = p - q * t.value();
    if den.norm() <= 1e-14 * (p.norm() + (q * t.value()).norm()) {
        return Err(Error::Domain(format!("J0 vanishes at {z}")));
    }
    let remainder = if z.im >= 0.0 { r * (p + I * q) / den } else { r * (p - I * q) / den };
    Ok(Split { limit: t.limit, remainder })
}

/// Spherical Bessel function j_n on the positive real axis.
pub fn spherical_bessel_j(n: usize, x: f64) -> f64 {
    assert!(x > 0.0, "spherical_bessel_j needs x > 0");
    let j0 = x.sin() / x;
    if n == 0 {
        return j0;
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if x >= n as f64 {
        let (mut a, mut b) = (j0, j1);
        for l in 1..n {
            let c = (2 * l + 1) as f64 / x * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    // downward recurrence, normalised against j0
    let start = n + 20 + (x as usize);
    let (mut hi, mut cur) = (0.0f64, 1e-30f64);
    let mut at_n = 0.0;
    for l in (1..=start).rev() {
        let lower = (2 * l + 1) as f64 / x * cur - hi;
        hi = cur;
        cur = lower;
        if l - 1 == n {
            at_n = cur;
        }
        if cur.abs() > 1e250 {
            hi *= 1e-250;
            cur *= 1e-250;
            at_n *= 1e-250;
        }
    }
    at_n * j0 / cur
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
