//! Argument-principle engine: zero counting by phase unwrapping, root isolation
//! by quadrisection and Newton polishing.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Axis-parallel rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Rect { re_min, re_max, im_min, im_max };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite())
            && self.re_max > self.re_min
            && self.im_max > self.im_min;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("degenerate rectangle {self:?}")))
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Same centre, sides scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Rect {
        let c = self.center();
        let (hw, hh) = (0.5 * factor * self.width(), 0.5 * factor * self.height());
        Rect { re_min: c.re - hw, re_max: c.re + hw, im_min: c.im - hh, im_max: c.im + hh }
    }

    /// Grows every side outward by `delta`.
    pub fn grown(&self, delta: f64) -> Rect {
        Rect {
            re_min: self.re_min - delta,
            re_max: self.re_max + delta,
            im_min: self.im_min - delta,
            im_max: self.im_max + delta,
        }
    }

    /// Distance from z to the boundary (zero when on it).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let dx = (z.re - self.re_min).abs().min((z.re - self.re_max).abs());
        let dy = (z.im - self.im_min).abs().min((z.im - self.im_max).abs());
        let inside_re = z.re >= self.re_min && z.re <= self.re_max;
        let inside_im = z.im >= self.im_min && z.im <= self.im_max;
        match (inside_re, inside_im) {
            (true, true) => dx.min(dy),
            (true, false) => dy,
            (false, true) => dx,
            (false, false) => dx.hypot(dy),
        }
    }

    fn quarters(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let x = self.re_min + fx * self.width();
        let y = self.im_min + fy * self.height();
        [
            Rect { re_min: self.re_min, re_max: x, im_min: self.im_min, im_max: y },
            Rect { re_min: x, re_max: self.re_max, im_min: self.im_min, im_max: y },
            Rect { re_min: self.re_min, re_max: x, im_min: y, im_max: self.im_max },
            Rect { re_min: x, re_max: self.re_max, im_min: y, im_max: self.im_max },
        ]
    }
}

/// Closed, counter-clockwise contour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
    Rectangle(Rect),
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Contour::Circle { center, radius })
    }

    fn pieces(&self) -> Vec<Piece> {
        match *self {
            Contour::Circle { center, radius } => vec![Piece::Arc { center, radius }],
            Contour::Rectangle(r) => {
                let a = Complex64::new(r.re_min, r.im_min);
                let b = Complex64::new(r.re_max, r.im_min);
                let c = Complex64::new(r.re_max, r.im_max);
                let d = Complex64::new(r.re_min, r.im_max);
                vec![Piece::Line(a, b), Piece::Line(b, c), Piece::Line(c, d), Piece::Line(d, a)]
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Piece {
    Line(Complex64, Complex64),
    Arc { center: Complex64, radius: f64 },
}

impl Piece {
    fn at(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Line(a, b) => a + (b - a) * t,
            Piece::Arc { center, radius } => center + Complex64::from_polar(radius, TAU * t),
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Piece::Line(a, b) => (b - a).norm(),
            Piece::Arc { radius, .. } => TAU * radius,
        }
    }
}

/// Sampling policy for phase unwrapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    /// Minimum samples per contour piece (each rectangle side, or the whole circle).
    pub initial_samples: usize,
    /// Additional samples per unit length.
    pub density: f64,
    pub max_refinement_depth: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { initial_samples: 8, density: 16.0, max_refinement_depth: 40 }
    }
}

/// Result of a winding computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourCount {
    /// Zeros minus poles inside, with multiplicity.
    pub net: i64,
    pub samples_used: usize,
    pub min_modulus_on_contour: f64,
    /// Largest accepted phase step between neighbouring samples.
    pub max_phase_step: f64,
    /// Phase (taken in [0, 2pi)) jumping from 2pi down to 0.
    pub jumps_down: usize,
    /// Phase jumping from 0 up to 2pi.
    pub jumps_up: usize,
}

fn sample<F>(f: &F, z: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    match f(z) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() && (v.re != 0.0 || v.im != 0.0) => Ok(v),
        Ok(_) => Err(Error::OnContour { at: z }),
        Err(Error::NearPole { .. } | Error::Singular { .. } | Error::Domain(_)) => Err(Error::OnContour { at: z }),
        Err(e) => Err(e),
    }
}

struct Tracker {
    total: f64,
    samples: usize,
    min_mod: f64,
    max_step: f64,
    down: usize,
    up: usize,
}

impl Tracker {
    fn accept(&mut self, from: Complex64, step: f64) {
        let mut phi = from.arg();
        if phi < 0.0 {
            phi += TAU;
        }
        let next = phi + step;
        if next >= TAU {
            self.down += 1;
        } else if next < 0.0 {
            self.up += 1;
        }
        self.total += step;
        self.max_step = self.max_step.max(step.abs());
    }
}

fn refine<F>(
    f: &F,
    piece: &Piece,
    (t0, f0): (f64, Complex64),
    (t1, f1): (f64, Complex64),
    depth: usize,
    policy: &Policy,
    tr: &mut Tracker,
) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let tm = 0.5 * (t0 + t1);
    let zm = piece.at(tm);
    let fm = sample(f, zm)?;
    tr.samples += 1;
    tr.min_mod = tr.min_mod.min(fm.norm());
    // Both halves must change log f (modulus and phase together) by less than
    // pi/2.  For analytic f this bounds h |f'/f|, so a zero or pole passing
    // between samples shows up in the modulus even when the phase aliases.
    let (s0, s1) = ((fm / f0).arg(), (f1 / fm).arg());
    let l0 = Complex64::new((fm.norm() / f0.norm()).ln(), s0);
    let l1 = Complex64::new((f1.norm() / fm.norm()).ln(), s1);
    if l0.norm() < FRAC_PI_2 && l1.norm() < FRAC_PI_2 && (f1 / f0).arg().abs() < FRAC_PI_2 {
        tr.accept(f0, s0);
        tr.accept(fm, s1);
        return Ok(());
    }
    if depth >= policy.max_refinement_depth {
        return Err(Error::OnContour { at: zm });
    }
    refine(f, piece, (t0, f0), (tm, fm), depth + 1, policy, tr)?;
    refine(f, piece, (tm, fm), (t1, f1), depth + 1, policy, tr)
}

/// Zeros minus poles of f inside the contour.
pub fn winding_count<F>(f: &F, contour: &Contour, policy: &Policy) -> Result<ContourCount>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let mut tr = Tracker { total: 0.0, samples: 0, min_mod: f64::INFINITY, max_step: 0.0, down: 0, up: 0 };
    for piece in contour.pieces() {
        let n = policy.initial_samples.max((policy.density * piece.length()).ceil() as usize).max(2);
        let mut prev = (0.0, sample(f, piece.at(0.0))?);
        tr.samples += 1;
        tr.min_mod = tr.min_mod.min(prev.1.norm());
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let v = sample(f, piece.at(t))?;
            tr.samples += 1;
            tr.min_mod = tr.min_mod.min(v.norm());
            refine(f, &piece, prev, (t, v), 0, policy, &mut tr)?;
            prev = (t, v);
        }
    }
    let turns = tr.total / TAU;
    let net = turns.round();
    if (turns - net).abs() > 1e-6 {
        return Err(Error::AccuracyLoss(format!("phase increment {turns} turns is not an integer")));
    }
    Ok(ContourCount {
        net: net as i64,
        samples_used: tr.samples,
        min_modulus_on_contour: tr.min_mod,
        max_phase_step: tr.max_step,
        jumps_down: tr.down,
        jumps_up: tr.up,
    })
}

/// One row of a counting table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub radius: f64,
    /// Radius actually integrated over after any perturbation.
    pub radius_used: f64,
    pub net: i64,
    pub enclosed_poles: usize,
    pub zeros: i64,
    pub jumps_down: usize,
    pub jumps_up: usize,
}

const RADIUS_NUDGES: [f64; 7] = [0.0, 1e-3, -1e-3, 2e-3, -2e-3, 3e-3, -3e-3];

/// Zero counts inside circles about the origin; `poles` lists every pole of f
/// that may fall inside the largest circle.
pub fn counting_function<F>(f: &F, radii: &[f64], poles: &[Complex64], policy: &Policy) -> Result<Vec<CountRow>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + ?Sized,
{
    radii
        .par_iter()
        .map(|&radius| {
            let mut last = None;
            for nudge in RADIUS_NUDGES {
                let r = radius * (1.0 + nudge);
                if poles.iter().any(|p| (p.norm() - r).abs() <= 1e-9 * r) {
                    continue;
                }
                match winding_count(f, &Contour::circle(Complex64::default(), r)?, policy) {
                    Ok(cc) => {
                        let enclosed = poles.iter().filter(|p| p.norm() < r).count();
                        return Ok(CountRow {
                            radius,
                            radius_used: r,
                            net: cc.net,
                            enclosed_poles: enclosed,
                            zeros: cc.net + enclosed as i64,
                            jumps_down: cc.jumps_down,
                            jumps_up: cc.jumps_up,
                        });
                    }
                    Err(e @ Error::OnContour { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.unwrap_or(Error::OnContour { at: Complex64::new(radius, 0.0) }))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    #[serde(with = "crate::cplx")]
    pub k: Complex64,
    pub multiplicity: usize,
    /// |f| at the polished point.
    pub residual: f64,
    pub newton_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSearch {
    pub roots: Vec<RootRecord>,
    /// Region after any boundary perturbation.
    pub region: Rect,
    /// Zeros inside the region from the corrected winding count.
    pub region_count: i64,
}

const REGION_NUDGES: [f64; 7] = [0.0, 1e-7, -1e-7, 1e-6, -1e-6, 1e-5, -1e-5];
const SPLITS: [f64; 7] = [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65];

fn corrected_count<F>(f: &F, rect: &Rect, poles: &[Complex64], policy: &Policy) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let guard = 1e-9 * rect.diameter().max(1e-300);
    if poles.iter().any(|p| rect.boundary_distance(*p) <= guard) {
        return Err(Error::OnContour { at: rect.center() });
    }
    let cc = winding_count(f, &Contour::Rectangle(*rect), policy)?;
    let inside = poles.iter().filter(|p| rect.contains(**p)).count() as i64;
    Ok(cc.net + inside)
}

fn derivative<F>(f: &F, k: Complex64, cap: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let h = 1e-7f64.max(1e-7 * k.norm()).min(cap);
    let hp = Complex64::new(h, 0.0);
    Ok((f(k + hp)? - f(k - hp)?) / (2.0 * h))
}

struct Polished {
    k: Complex64,
    residual: f64,
    iterations: usize,
}

/// Newton iteration from the centre of `cell`; switches to m f / f' when the
/// plain steps shrink only linearly.  Near a multiple root the difference
/// step must stay below the distance to the root, so it is capped by the
/// cell size when m > 1.
fn polish<F>(f: &F, cell: &Rect, m: usize, tol: f64) -> Option<Polished>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let bound = cell.scaled(2.0);
    let cap = if m > 1 { 0.1 * cell.diameter() } else { f64::INFINITY };
    let mut k = cell.center();
    let mut steps: Vec<f64> = Vec::new();
    let mut modified = false;
    for it in 1..=100 {
        let fk = f(k).ok()?;
        if fk.norm() == 0.0 {
            return Some(Polished { k, residual: 0.0, iterations: it - 1 });
        }
        let d = derivative(f, k, cap).ok()?;
        if !(d.re.is_finite() && d.im.is_finite()) || d.norm() == 0.0 {
            return None;
        }
        let mult = if modified { m as f64 } else { 1.0 };
        let step = fk / d * mult;
        k -= step;
        if !bound.contains(k) {
            return None;
        }
        steps.push(step.norm());
        if m > 1 && !modified && steps.len() >= 5 {
            let w = &steps[steps.len() - 5..];
            if w.windows(2).all(|p| p[1] > 0.3 * p[0]) {
                modified = true;
            }
        }
        if step.norm() <= 0.1 * tol * k.norm().max(1.0) {
            let fk = f(k).ok()?;
            let scale = derivative(f, k, cap).ok()?.norm() * k.norm().max(1.0);
            if fk.norm() <= tol * scale || fk.norm() == 0.0 {
                return Some(Polished { k, residual: fk.norm(), iterations: it });
            }
            return None;
        }
    }
    None
}

enum CellOutcome {
    Root(RootRecord),
    Children(Vec<(Rect, i64)>),
}

fn process_cell<F>(f: &F, cell: &Rect, m: i64, poles: &[Complex64], tol: f64, policy: &Policy) -> Result<CellOutcome>
where
    F: Fn(Complex64) -> Result<Complex64> + ?Sized,
{
    let mu = m as usize;
    let tiny = cell.diameter() < 64.0 * tol;
    if tiny || m == 1 {
        if let Some(p) = polish(f, cell, mu, tol) {
            let inside = if tiny { cell.scaled(2.0).contains(p.k) } else { cell.contains(p.k) };
            if inside {
                return Ok(CellOutcome::Root(RootRecord {
                    k: p.k,
                    multiplicity: mu,
                    residual: p.residual,
                    newton_iterations: p.iterations,
                }));
            }
        }
        if tiny {
            return Err(Error::Unresolved(format!(
                "cell around {} with count {m} did not yield a convergent root",
                cell.center()
            )));
        }
    }
    let mut last_err = None;
    for fx in SPLITS {
        for fy in SPLITS {
            let quads = cell.quarters(fx, fy);
            let counts: Result<Vec<i64>> = quads.iter().map(|q| corrected_count(f, q, poles, policy)).collect();
            match counts {
                Ok(c) if c.iter().sum::<i64>() == m && c.iter().all(|&v| v >= 0) => {
                    return Ok(CellOutcome::Children(
                        quads.iter().zip(c).filter(|(_, v)| *v > 0).map(|(q, v)| (*q, v)).collect(),
                    ));
                }
                Ok(c) => {
                    last_err = Some(Error::Unresolved(format!(
                        "sub-cell counts {c:?} of the cell [{}, {}] x [{}, {}] do not add up to {m}",
                        cell.re_min, cell.re_max, cell.im_min, cell.im_max
                    )))
                }
                Err(e @ Error::OnContour { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            if fx != fy {
                continue;
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Unresolved(format!("cannot subdivide cell at {}", cell.center()))))
}

/// All zeros of f in `region`.  `poles` lists the poles of f near the region,
/// repeated by multiplicity.
pub fn find_roots<F>(f: &F, region: &Rect, poles: &[Complex64], tol: f64, policy: &Policy) -> Result<RootSearch>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + ?Sized,
{
    region.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let scale = region.width().max(region.height());
    let mut chosen = None;
    let mut last_err = None;
    for nudge in REGION_NUDGES {
        let r = region.grown(nudge * scale);
        match corrected_count(f, &r, poles, policy) {
            Ok(c) => {
                chosen = Some((r, c));
                break;
            }
            Err(e @ Error::OnContour { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let Some((region, count)) = chosen else {
        return Err(last_err.unwrap_or(Error::OnContour { at: region.center() }));
    };
    if count < 0 {
        return Err(Error::Unresolved(format!("negative corrected count {count}: undeclared poles in the region")));
    }
    let mut roots: Vec<RootRecord> = Vec::new();
    let mut level: Vec<(Rect, i64)> = if count > 0 { vec![(region, count)] } else { Vec::new() };
    while !level.is_empty() {
        let outcomes: Vec<Result<CellOutcome>> =
            level.par_iter().map(|(cell, m)| process_cell(f, cell, *m, poles, tol, policy)).collect();
        let mut next = Vec::new();
        for o in outcomes {
            match o? {
                CellOutcome::Root(r) => roots.push(r),
                CellOutcome::Children(c) => next.extend(c),
            }
        }
        level = next;
    }
    roots.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    let mut merged: Vec<RootRecord> = Vec::new();
    for r in roots {
        match merged.iter_mut().find(|q| (q.k - r.k).norm() <= 10.0 * tol) {
            Some(q) => q.multiplicity += r.multiplicity,
            None => merged.push(r),
        }
    }
    Ok(RootSearch { roots: merged, region, region_count: count })
}

/// Principal phase in (-pi, pi].
pub fn principal_phase(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}
