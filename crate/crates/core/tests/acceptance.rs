//! Acceptance suite.  Each criterion prints one PASS/FAIL line; the process
//! exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use hedgehog::abflux::{self, ABSystem, ScanGrid};
use hedgehog::cli::{self, RunConfig, Task};
use hedgehog::contour::{self, Contour, Policy, Rect};
use hedgehog::geometry::{self, Geometry};
use hedgehog::linalg::CMatrix;
use hedgehog::model::{CouplingMatrix, HedgehogSystem, Preset};
use hedgehog::resonance::{self, ResonanceFunction};
use hedgehog::scattering;
use hedgehog::specfun;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// ---------------------------------------------------------------------------
// Fixed-point complex arithmetic for the Bessel oracle.

const BITS: u32 = 480;

#[derive(Clone)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

fn fx_from(z: Complex64) -> Fx {
    let s = 2f64.powi(BITS as i32);
    Fx { re: BigInt::from_f64(z.re * s).unwrap(), im: BigInt::from_f64(z.im * s).unwrap() }
}

fn fx_to(z: &Fx) -> Complex64 {
    let s = 2f64.powi(BITS as i32);
    c(z.re.to_f64().unwrap() / s, z.im.to_f64().unwrap() / s)
}

fn fx_mul(a: &Fx, b: &Fx) -> Fx {
    Fx { re: (&a.re * &b.re - &a.im * &b.im) >> BITS, im: (&a.re * &b.im + &a.im * &b.re) >> BITS }
}

fn fx_scale(a: &Fx, h: &BigInt) -> Fx {
    Fx { re: (&a.re * h) >> BITS, im: (&a.im * h) >> BITS }
}

fn fx_add(a: &mut Fx, b: &Fx) {
    a.re += &b.re;
    a.im += &b.im;
}

fn fx_div(a: &Fx, n: u64) -> Fx {
    Fx { re: &a.re / n, im: &a.im / n }
}

fn fx_tiny(a: &Fx) -> bool {
    a.re.bits() < 16 && a.im.bits() < 16
}

/// Power-series Bessel values: (J0, Y0, J1, Y1) with gamma supplied by the caller.
fn oracle_bessel(z: Complex64, gamma: f64) -> [Complex64; 4] {
    let one = BigInt::one() << BITS;
    let half_z = fx_from(z / 2.0);
    let w = fx_mul(&half_z, &half_z);
    let neg_w = Fx { re: -&w.re, im: -&w.im };

    // J0 = sum t_m, t_m = (-w)^m/(m!)^2; A0 = sum H_m t_m
    let mut t = Fx { re: one.clone(), im: BigInt::zero() };
    let mut j0 = t.clone();
    let mut a0 = Fx { re: BigInt::zero(), im: BigInt::zero() };
    // J1 = sum u_m, u_m = (-1)^m (z/2)^{2m+1}/(m!(m+1)!); A1 = sum (H_m + H_{m+1}) u_m
    let mut u = half_z.clone();
    let mut j1 = u.clone();
    let mut a1 = fx_scale(&u, &one);
    let mut h = BigInt::zero();
    let mut m: u64 = 0;
    loop {
        m += 1;
        let h_prev = h.clone();
        h += &one / m;
        let h_next = &h + &one / (m + 1);
        t = fx_div(&fx_mul(&t, &neg_w), m * m);
        u = fx_div(&fx_mul(&u, &neg_w), m * (m + 1));
        fx_add(&mut j0, &t);
        fx_add(&mut a0, &fx_scale(&t, &h));
        fx_add(&mut j1, &u);
        fx_add(&mut a1, &fx_scale(&u, &(&h + &h_next)));
        let _ = h_prev;
        if m as f64 > z.norm() && fx_tiny(&t) && fx_tiny(&u) {
            break;
        }
    }
    let (j0, a0, j1, a1) = (fx_to(&j0), fx_to(&a0), fx_to(&j1), fx_to(&a1));
    let lg = (z / 2.0).ln() + gamma;
    let y0 = 2.0 / PI * (lg * j0 - a0);
    let y1 = 2.0 / PI * lg * j1 - 2.0 / (PI * z) - a1 / PI;
    [j0, y0, j1, y1]
}

/// Euler's constant from the Euler-Maclaurin form of H_n - ln n.
fn oracle_gamma() -> f64 {
    let n = 1000.0_f64;
    let h: f64 = (1..=1000).rev().map(|k| 1.0 / k as f64).sum();
    h - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4)) + 1.0 / (252.0 * n.powi(6))
}

fn criterion_1() -> Outcome {
    let gamma = oracle_gamma();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut points: Vec<Complex64> = (0..100).map(|_| c(rng.gen_range(0.1..50.0), 0.0)).collect();
    points.extend((0..100).map(|_| c(rng.gen_range(0.1..20.0), rng.gen_range(-5.0..5.0))));
    let mut worst: f64 = 0.0;
    let mut worst_at = c(0.0, 0.0);
    let mut wr: f64 = 0.0;
    for &z in &points {
        let want = oracle_bessel(z, gamma);
        let got = [
            specfun::bessel_j0(z).unwrap(),
            specfun::bessel_y0(z).unwrap(),
            specfun::bessel_j1(z).unwrap(),
            specfun::bessel_y1(z).unwrap(),
        ];
        for (g, w) in got.iter().zip(&want) {
            let rel = (g - w).norm() / w.norm();
            if rel > worst {
                worst = rel;
                worst_at = z;
            }
        }
        let wron = got[2] * got[1] - got[0] * got[3];
        let expect = 2.0 / (PI * z);
        wr = wr.max((wron - expect).norm() / expect.norm());
    }
    let gamma_err = (gamma - specfun::euler_gamma()).abs();
    // first zeros of J0 by bisection on the oracle
    let mut zero_err: f64 = 0.0;
    for n in 1..=5 {
        let (mut lo, mut hi) = ((n as f64 - 0.25) * PI - 0.5, (n as f64 - 0.25) * PI + 0.5);
        let f = |x: f64| oracle_bessel(c(x, 0.0), gamma)[0].re;
        let flo = f(lo);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        zero_err = zero_err.max((geometry::j0_zero(n) - 0.5 * (lo + hi)).abs() / lo);
    }
    outcome(
        worst <= 1e-10 && wr <= 1e-9 && gamma_err <= 1e-14 && zero_err <= 1e-13,
        format!(
            "max rel err {worst:.2e} at {worst_at}, Wronskian {wr:.2e}, gamma err {gamma_err:.1e}, J0 zeros {zero_err:.1e}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let l = 1.0;
    let g = Geometry::interval(l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n_terms = 100_000usize;
    let mut worst: f64 = 0.0;
    let mut lib_series: f64 = 0.0;
    let mut used = 0;
    while used < 20 {
        let k = c(rng.gen_range(0.0..10.0), rng.gen_range(-5.0..5.0));
        let near = (1..8).any(|n| (k - c((2 * n - 1) as f64 * PI / 2.0, 0.0)).norm() < 0.05);
        if near || k.norm() < 0.05 {
            continue;
        }
        used += 1;
        // eigenfunction expansion at the midpoint, summed from the tail upward
        let mut s = c(0.0, 0.0);
        for n in (1..=n_terms).rev() {
            let kap = (2 * n - 1) as f64 * PI / (2.0 * l);
            s += 1.0 / (kap * kap - k * k);
        }
        let series = s / l + l / (PI * PI * n_terms as f64);
        let closed = g.f1(k).unwrap();
        worst = worst.max((closed - series).norm());
        lib_series = lib_series.max((g.f1_series(k, n_terms).unwrap() - series).norm());
    }
    outcome(worst <= 1e-6 && lib_series <= 1e-12, format!("max |closed - series| {worst:.2e}, library series {lib_series:.1e}"))
}

fn criterion_3() -> Outcome {
    let ys = [5.0, 10.0, 20.0, 40.0];
    let mut worst_ratio: f64 = 0.0;
    let mut lines = Vec::new();
    for g in [Geometry::interval(0.25).unwrap(), Geometry::disc(0.25).unwrap(), Geometry::ball(0.25).unwrap()] {
        for s in [1.0, -1.0] {
            let d: Vec<f64> = ys
                .iter()
                .map(|&y| {
                    let k = c(0.0, s * y);
                    (g.f1(k).unwrap() - g.leading_term(k).unwrap()).norm()
                })
                .collect();
            let r = d.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            worst_ratio = worst_ratio.max(r);
            lines.push(format!("{}{}:{r:.2e}", g.kind(), if s > 0.0 { "+" } else { "-" }));
        }
    }
    // at the sizes of the worked examples the deviation is below rounding,
    // so the cancellation-free remainder is checked instead
    let mut split_ratio: f64 = 0.0;
    let mut split_sum: f64 = 0.0;
    for g in [Geometry::interval(1.0).unwrap(), Geometry::disc(PI).unwrap(), Geometry::ball(1.0).unwrap()] {
        for s in [1.0, -1.0] {
            let mut prev = None;
            for &y in &ys {
                let k = c(0.3, s * y);
                let sp = g.f1_split(k).unwrap();
                let lead = g.leading_term(k).unwrap();
                split_sum = split_sum.max((sp.leading - lead).norm() / lead.norm());
                let r = sp.remainder.norm();
                if let Some(p) = prev {
                    split_ratio = split_ratio.max(r / p);
                }
                prev = Some(r);
            }
        }
    }
    let doc = cli::run(
        Task::Count,
        &RunConfig::from_json(r#"{"geometry": {"kind": "interval", "size": 1.0}, "coupling": {"preset": "kirchhoff"}, "leads": 2, "radii": [5.0]}"#)
            .unwrap(),
    )
    .unwrap();
    let recorded = doc.conventions.sigma == -1.0
        && doc.conventions.leading_term_1d.contains("i/(2k)")
        && doc.conventions.leading_term_2d.contains("ln(-ik)")
        && doc.conventions.leading_term_3d.contains("ik/(4 pi)");
    outcome(
        worst_ratio <= 0.75 && split_ratio <= 0.75 && split_sum <= 1e-14 && recorded,
        format!(
            "worst halving ratio {worst_ratio:.3} [{}], worked-example remainder ratio {split_ratio:.2e}, branches recorded: {recorded}",
            lines.join(" ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let region = Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap();
    let circle = Contour::circle(c(0.0, 0.0), 2.5).unwrap();
    let policy = Policy::default();
    let mut failures = Vec::new();
    let mut max_loc: f64 = 0.0;
    for trial in 0..100 {
        // at most six distinct zeros and poles, separated from each other and from both contours
        let n_items = rng.gen_range(2..=6);
        let mut items: Vec<(Complex64, i32)> = Vec::new();
        while items.len() < n_items {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let clear = region.boundary_distance(z) >= 0.05
                && (z.norm() - 2.5).abs() >= 0.05
                && items.iter().all(|(p, _)| (p - z).norm() >= 0.1);
            if !clear {
                continue;
            }
            let m = rng.gen_range(1..=3);
            let is_zero = items.is_empty() || rng.gen_bool(0.6);
            items.push((z, if is_zero { m } else { -m }));
        }
        let f = |k: Complex64| -> hedgehog::Result<Complex64> {
            Ok(items.iter().fold(c(1.0, 0.0), |acc, (p, m)| acc * (k - p).powi(*m)))
        };
        let want_circle: i64 = items.iter().filter(|(p, _)| p.norm() < 2.5).map(|(_, m)| *m as i64).sum();
        let got = contour::winding_count(&f, &circle, &policy).unwrap().net;
        let rect_net: i64 = items.iter().filter(|(p, _)| region.contains(*p)).map(|(_, m)| *m as i64).sum();
        let rect_got = contour::winding_count(&f, &Contour::Rectangle(region), &policy).unwrap().net;
        let poles: Vec<Complex64> =
            items.iter().filter(|(_, m)| *m < 0).flat_map(|(p, m)| std::iter::repeat_n(*p, (-m) as usize)).collect();
        let zeros: Vec<(Complex64, usize)> =
            items.iter().filter(|(p, m)| *m > 0 && region.contains(*p)).map(|(p, m)| (*p, *m as usize)).collect();
        let found = contour::find_roots(&f, &region, &poles, 1e-12, &policy);
        let ok_roots = match &found {
            Ok(s) => {
                s.roots.len() == zeros.len()
                    && zeros.iter().all(|(z, m)| {
                        s.roots.iter().any(|r| {
                            let d = (r.k - z).norm();
                            max_loc = max_loc.max(if d <= 1e-9 { d } else { 0.0 });
                            d <= 1e-9 && r.multiplicity == *m
                        })
                    })
                    && s.region_count == zeros.iter().map(|(_, m)| *m as i64).sum::<i64>()
            }
            Err(_) => false,
        };
        if got != want_circle || rect_got != rect_net || !ok_roots {
            failures.push(trial);
        }
    }
    outcome(
        failures.is_empty(),
        format!("100 rational functions, failures {failures:?}, max root error {max_loc:.1e}"),
    )
}

fn swap_system() -> HedgehogSystem {
    let mut u = CMatrix::zeros(2, 2);
    u[(0, 1)] = c(1.0, 0.0);
    u[(1, 0)] = c(1.0, 0.0);
    HedgehogSystem::new(Geometry::interval(1.0).unwrap(), CouplingMatrix::new(u).unwrap())
}

fn criterion_5() -> Outcome {
    let sys = swap_system();
    let region = Rect::new(0.1, 10.0, -2.0, 0.01).unwrap();
    let res = resonance::find_resonances(&sys, &region, 1e-10).unwrap();
    let poles = scattering::s_pole_search(&sys, &region, 1e-10).unwrap();
    let half_ln3 = 0.5 * 3f64.ln();
    let anchors: Vec<Complex64> = (0..3).map(|n| c((2 * n + 1) as f64 * PI / 2.0, -half_ln3)).collect();
    let anchor_err = res
        .resonances
        .iter()
        .zip(&anchors)
        .map(|(r, a)| (r.k - a).norm())
        .fold(0.0, f64::max);
    let coincide = res.resonances.len() == poles.len()
        && res
            .resonances
            .iter()
            .zip(&poles)
            .all(|(r, p)| (r.k - p.k).norm() <= 1e-8 && r.multiplicity == p.multiplicity);
    let pass = res.resonances.len() == 3 && res.resonances.iter().all(|r| r.multiplicity == 1) && anchor_err <= 1e-8 && coincide;
    outcome(
        pass,
        format!(
            "{} resonances, max anchor error {anchor_err:.1e}, {} S-matrix poles, coincide: {coincide}",
            res.resonances.len(),
            poles.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let radii = [10.0, 20.0, 40.0];
    let g = Geometry::interval(1.0).unwrap();
    let k2 = HedgehogSystem::new(g.clone(), CouplingMatrix::kirchhoff(2).unwrap());
    let dj = HedgehogSystem::new(g, CouplingMatrix::preset(Preset::DirichletJunction, 2).unwrap());
    let a = resonance::counting_report(&k2, &radii).unwrap();
    let b = resonance::counting_report(&dj, &radii).unwrap();
    let na: Vec<i64> = a.rows.iter().map(|r| r.zeros).collect();
    let nb: Vec<i64> = b.rows.iter().map(|r| r.zeros).collect();
    let weyl: Vec<i64> = radii.iter().map(|r| 2 * (r / PI).floor() as i64).collect();
    outcome(
        na.iter().all(|&n| n == 0) && nb == weyl && a.non_weyl && !b.non_weyl,
        format!("Kirchhoff M=2 N(R) = {na:?}; Dirichlet junction N(R) = {nb:?}, expected {weyl:?}"),
    )
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.qr().q()
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = Geometry::interval(1.0).unwrap();
    let couplings = vec![
        ("kirchhoff M=2", CouplingMatrix::kirchhoff(2).unwrap()),
        ("kirchhoff M=3", CouplingMatrix::kirchhoff(3).unwrap()),
        ("random unitary M=2", CouplingMatrix::new(random_unitary(&mut rng, 3)).unwrap()),
    ];
    let mut inv: f64 = 0.0;
    let mut adj: f64 = 0.0;
    let mut skipped = 0;
    for (_, u) in &couplings {
        let sys = HedgehogSystem::new(g.clone(), u.clone());
        let mut done = 0;
        while done < 50 {
            let k = c(rng.gen_range(0.05..20.0), 0.0);
            let (Ok(s), Ok(sm)) = (scattering::s_matrix(&sys, k), scattering::s_matrix(&sys, -k)) else {
                skipped += 1;
                continue;
            };
            let sbar = scattering::s_matrix(&sys, k.conj()).unwrap().s_matrix;
            let m = s.s_matrix.nrows();
            inv = inv.max(frob(&(&s.s_matrix * &sm.s_matrix - CMatrix::identity(m, m))));
            adj = adj.max(frob(&(&sm.s_matrix - sbar.adjoint())));
            done += 1;
        }
    }
    outcome(
        inv <= 1e-10 && adj <= 1e-10,
        format!("3 couplings x 50 momenta: |S(k)S(-k) - I| {inv:.1e}, |S(-k) - S(conj k)^*| {adj:.1e}, inadmissible draws {skipped}"),
    )
}

fn criterion_8() -> Outcome {
    let windows = [Rect::new(0.2, 20.0, -6.0, 0.01).unwrap(), Rect::new(0.2, 40.0, -6.0, 0.01).unwrap()];
    let mut parts = Vec::new();
    let mut pass = true;
    for g in [Geometry::disc(PI).unwrap(), Geometry::ball(1.0).unwrap()] {
        let sys = HedgehogSystem::new(g.clone(), CouplingMatrix::kirchhoff(1).unwrap());
        match resonance::strip_bound(&sys, &windows, 1e-10) {
            Ok(rep) => {
                let change = (rep.max_abs_im[1] - rep.max_abs_im[0]).abs() / rep.max_abs_im[0];
                pass &= rep.stable && change < 0.05 && rep.max_im <= 1e-8 && rep.counts[0] > 0;
                parts.push(format!(
                    "{}: max|Im k| {:.6} -> {:.6} ({:.2}%), counts {:?}, max Im k {:.2e}",
                    g.kind(),
                    rep.max_abs_im[0],
                    rep.max_abs_im[1],
                    100.0 * change,
                    rep.counts,
                    rep.max_im
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", g.kind()));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let sys = ABSystem::half_flux(1.0, 0.0).unwrap();
    let grid = ScanGrid { region: Rect::new(0.1, 10.0, -3.0, -1e-3).unwrap(), nx: 100, ny: 100 };
    let one = c(1.0, 0.0);
    let rep = abflux::true_resonance_scan(&sys, &grid, one).unwrap();
    // independent check of the incoming modulus and of the lead profile
    let mut dev: f64 = 0.0;
    let mut prof: f64 = 0.0;
    let mut min_inc = f64::INFINITY;
    for k in grid.points() {
        let sol = sys.solve_lead(k, one).unwrap();
        let (inc, _) = abflux::outgoing_component(&sol);
        let closed = 0.5 * PI.sqrt() * (k.im * sys.radius).exp();
        dev = dev.max((inc.norm() - closed).abs());
        min_inc = min_inc.min(inc.norm());
        for x in [0.0, 0.4, 1.0, 1.7, 3.0] {
            let f = sol.a * (k * x).sin() + sol.b * (k * x).cos();
            let want = PI.sqrt() * (k * (sys.radius + x)).sin();
            prof = prof.max((f - want).norm() / want.norm().max(1.0));
        }
    }
    let rho_same = [PI / 2.0, PI].iter().all(|&rho| {
        let other = ABSystem::half_flux(1.0, rho).unwrap();
        let a = sys.solve_lead(c(2.3, -0.7), one).unwrap();
        let b = other.solve_lead(c(2.3, -0.7), one).unwrap();
        a.a == b.a && a.b == b.b
    });
    let pass = rep.points == 10_000
        && min_inc >= 0.04
        && rep.min_incoming >= 0.04
        && dev <= 1e-10
        && rep.max_closed_form_deviation <= 1e-10
        && prof <= 1e-10
        && rep.max_profile_deviation <= 1e-10
        && rep.no_true_resonances
        && rho_same;
    outcome(
        pass,
        format!(
            "{} points, min |incoming| {min_inc:.4}, closed-form dev {dev:.1e}, profile dev {prof:.1e}, rho-independent {rho_same}: {}",
            rep.points, rep.verdict
        ),
    )
}

fn out_dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("phase_fields");
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn criterion_10() -> Outcome {
    let radii = [10.0, 20.0, 40.0];
    let policy = Policy::default();
    let interval = Geometry::interval(1.0).unwrap();
    let tan_poles = interval.poles_within(41.0);
    let dir = out_dir();
    let mut pass = true;
    let mut parts = Vec::new();

    // (a) interval numerators tan k -/+ i: no zero-type jump lines survive
    for (name, s) in [("tan k - i", -1.0), ("tan k + i", 1.0)] {
        // limit and shift cancel exactly on one half-plane; keep the remainder
        let f = move |k: Complex64| {
            let t = specfun::tan_split(k);
            Ok((t.limit + s * Complex64::i()) + t.remainder)
        };
        let rows = contour::counting_function(&f, &radii, &tan_poles, &policy).unwrap();
        let z: Vec<i64> = rows.iter().map(|r| r.zeros).collect();
        let up: Vec<usize> = rows.iter().map(|r| r.jumps_up).collect();
        let down: Vec<usize> = rows.iter().map(|r| r.jumps_down).collect();
        pass &= z.iter().all(|&n| n == 0) && up.windows(2).all(|w| w[1] > w[0]);
        parts.push(format!("{name}: Z {z:?} (2pi->0 {down:?}, 0->2pi {up:?})"));
        let file = dir.join(format!("interval_{}.csv", if s < 0.0 { "minus" } else { "plus" }));
        let sum = cli::emit_phase_field(&f, &Rect::new(-10.0, 10.0, -5.0, 5.0).unwrap(), 200, 100, &file, None).unwrap();
        pass &= sum.points == 20_000;
    }
    // Kirchhoff M = 2 resonance function, same picture through the library path
    let k2 = ResonanceFunction::new(&HedgehogSystem::new(interval.clone(), CouplingMatrix::kirchhoff(2).unwrap())).unwrap();
    let kf = |k: Complex64| k2.eval(k);
    let rows = contour::counting_function(&kf, &radii, &k2.poles_within(41.0), &policy).unwrap();
    pass &= rows.iter().all(|r| r.zeros == 0);
    cli::emit_phase_field(&kf, &Rect::new(0.2, 20.0, -5.0, 5.0).unwrap(), 200, 100, &dir.join("kirchhoff2.csv"), None).unwrap();

    // (b) disc F1, R_disc = pi: zero count grows with the enclosed poles
    let r_disc = PI;
    let disc = Geometry::disc(r_disc).unwrap();
    let f1 = |k: Complex64| disc.f1(k);
    let rows = contour::counting_function(&f1, &radii, &disc.poles_within(41.0), &policy).unwrap();
    let z: Vec<i64> = rows.iter().map(|r| r.zeros).collect();
    let predicted: Vec<i64> = radii.iter().map(|r| (r * r_disc / PI).floor() as i64).collect();
    let consistent = z.iter().zip(&predicted).all(|(n, p)| ((*n as f64) / 2.0 - *p as f64).abs() <= 2.0);
    pass &= consistent && z.windows(2).all(|w| w[1] > w[0]);
    parts.push(format!("disc F1: Z {z:?} vs 2 x {predicted:?}"));
    let sum = cli::emit_phase_field(
        &f1,
        &Rect::new(0.2, 6.0, -2.0, 2.0).unwrap(),
        400,
        400,
        &dir.join("disc_f1.csv"),
        Some(&dir.join("disc_f1.pgm")),
    )
    .unwrap();
    pass &= sum.points == 160_000;
    outcome(pass, parts.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("special-function oracle", criterion_1, Duration::from_secs(10)),
        ("interval Green's function series", criterion_2, Duration::from_secs(30)),
        ("leading-term asymptotics", criterion_3, Duration::from_secs(10)),
        ("winding-count exactness", criterion_4, Duration::from_secs(60)),
        ("analytic resonance anchor", criterion_5, Duration::from_secs(60)),
        ("non-Weyl counting", criterion_6, Duration::from_secs(120)),
        ("S-matrix identities", criterion_7, Duration::from_secs(30)),
        ("strip confinement", criterion_8, Duration::from_secs(600)),
        ("Aharonov-Bohm scan", criterion_9, Duration::from_secs(30)),
        ("phase-field reproduction", criterion_10, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let el = t.elapsed();
        let ok = o.pass && el <= *budget;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} [{name}] {:.2}s/{}s: {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            el.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
