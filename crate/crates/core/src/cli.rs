//! Command-line driver: a JSON configuration in, a JSON result document out,
//! plus CSV/PGM phase fields.
//!
//! Complex numbers are written as `{"re": .., "im": ..}` everywhere.  Every
//! default that a task uses is filled into the echoed configuration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abflux::{self, ABSystem, ScanGrid};
use crate::contour::{principal_phase, Rect};
use crate::cplx::Cx;
use crate::geometry::Geometry;
use crate::linalg::CMatrix;
use crate::model::{CouplingMatrix, HedgehogSystem, Preset, SIGMA};
use crate::resonance::{self, ResonanceFunction, ResonanceKind};
use crate::scattering;
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_TOL: f64 = 1e-10;
pub const TOL_RANGE: (f64, f64) = (1e-14, 1e-4);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Resonances,
    Count,
    Strip,
    Smatrix,
    PhaseField,
    AbDemo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Interval,
    Disc,
    Ball,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    /// Half-length of the interval, or radius of the disc or ball.
    pub size: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingPreset {
    Kirchhoff,
    Decoupled,
    DirichletJunction,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub preset: CouplingPreset,
    /// Row-major (1 + M) x (1 + M) matrix, required for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Cx>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Regular part of the Green's function at the junction.
    F1,
    /// The resonance function of the configured system.
    Resonance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbConfig {
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    /// Disc amplitude used in the scan.
    pub c: Option<Cx>,
    /// Partial wave whose persistent eigenvalues are listed.
    pub m: Option<i64>,
    pub eigenvalues: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub phase_csv: Option<String>,
    pub pgm: Option<String>,
    pub heatmap_csv: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<Rect>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momenta: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ab: Option<AbConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn rect(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Rect {
    Rect { re_min, re_max, im_min, im_max }
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| cfg_err(format!("cannot parse configuration: {e}")))
    }

    /// Copy with every default the task relies on filled in, validated.
    pub fn resolved(&self, task: Task) -> Result<RunConfig> {
        if let Some(t) = self.task {
            if t != task {
                return Err(cfg_err(format!("configuration is for task {t:?}, command line asks for {task:?}")));
            }
        }
        let mut c = self.clone();
        c.task = Some(task);
        let tol = c.tol.unwrap_or(DEFAULT_TOL);
        if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
            return Err(cfg_err(format!("tol = {tol} outside [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1)));
        }
        c.tol = Some(tol);
        if task != Task::AbDemo {
            let g = c.geometry.ok_or_else(|| cfg_err("missing `geometry`"))?;
            if !(g.size.is_finite() && g.size > 0.0) {
                return Err(cfg_err(format!("geometry size must be positive, got {}", g.size)));
            }
            let needs_coupling = !(task == Task::PhaseField && c.field.unwrap_or(FieldKind::F1) == FieldKind::F1);
            if needs_coupling || c.coupling.is_some() {
                let coupling = c.coupling.clone().unwrap_or(CouplingConfig { preset: CouplingPreset::Kirchhoff, matrix: None });
                let leads = match (&coupling.matrix, c.leads) {
                    (Some(m), Some(l)) if m.len() != l + 1 => {
                        return Err(cfg_err(format!("coupling matrix has {} rows but leads = {l}", m.len())))
                    }
                    (Some(m), _) => m.len().saturating_sub(1),
                    (None, l) => l.unwrap_or(1),
                };
                c.leads = Some(leads);
                c.coupling = Some(coupling);
            }
        }
        match task {
            Task::Resonances => {
                c.region.get_or_insert(rect(0.1, 10.0, -2.0, 0.01));
            }
            Task::Count => {
                c.radii.get_or_insert_with(|| vec![10.0, 20.0, 40.0]);
            }
            Task::Strip => {
                c.windows.get_or_insert_with(|| vec![rect(0.2, 20.0, -6.0, 0.01), rect(0.2, 40.0, -6.0, 0.01)]);
            }
            Task::Smatrix => {
                c.momenta.get_or_insert_with(|| vec![Cx { re: 1.0, im: 0.0 }]);
                c.identity_tol.get_or_insert(1e-10);
            }
            Task::PhaseField => {
                c.region.get_or_insert(rect(0.2, 6.0, -2.0, 2.0));
                c.grid.get_or_insert(GridConfig { nx: 400, ny: 400 });
                c.field.get_or_insert(FieldKind::F1);
                let out = c.output.get_or_insert_with(OutputConfig::default);
                out.phase_csv.get_or_insert_with(|| "phase_field.csv".into());
            }
            Task::AbDemo => {
                c.region.get_or_insert(rect(0.1, 10.0, -3.0, -1e-3));
                c.grid.get_or_insert(GridConfig { nx: 100, ny: 100 });
                let ab = c.ab.get_or_insert(AbConfig {
                    radius: None,
                    alpha: None,
                    rho: None,
                    c: None,
                    m: None,
                    eigenvalues: None,
                });
                ab.radius.get_or_insert(1.0);
                ab.alpha.get_or_insert(0.5);
                ab.rho.get_or_insert(0.0);
                ab.c.get_or_insert(Cx { re: 1.0, im: 0.0 });
                ab.m.get_or_insert(1);
                ab.eigenvalues.get_or_insert(3);
            }
        }
        if let Some(r) = &c.region {
            r.validate().map_err(|e| cfg_err(e.to_string()))?;
        }
        if let Some(g) = &c.grid {
            if g.nx < 2 || g.ny < 2 {
                return Err(cfg_err(format!("grid must be at least 2 x 2, got {} x {}", g.nx, g.ny)));
            }
        }
        for w in c.windows.iter().flatten() {
            w.validate().map_err(|e| cfg_err(e.to_string()))?;
        }
        Ok(c)
    }

    fn system(&self) -> Result<HedgehogSystem> {
        let g = self.geometry.ok_or_else(|| cfg_err("missing `geometry`"))?;
        let geometry = match g.kind {
            GeometryKind::Interval => Geometry::interval(g.size)?,
            GeometryKind::Disc => Geometry::disc(g.size)?,
            GeometryKind::Ball => Geometry::ball(g.size)?,
        };
        let cc = self.coupling.as_ref().ok_or_else(|| cfg_err("missing `coupling`"))?;
        let leads = self.leads.unwrap_or(1);
        let coupling = match (cc.preset, &cc.matrix) {
            (CouplingPreset::Custom, None) => return Err(cfg_err("custom coupling needs `matrix`")),
            (CouplingPreset::Custom, Some(rows)) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(cfg_err("coupling matrix must be square"));
                }
                CouplingMatrix::new(CMatrix::from_fn(n, n, |i, j| rows[i][j].into()))?
            }
            (_, Some(_)) => return Err(cfg_err("`matrix` is only accepted with the custom preset")),
            (CouplingPreset::Kirchhoff, None) => CouplingMatrix::preset(Preset::Kirchhoff, leads)?,
            (CouplingPreset::Decoupled, None) => CouplingMatrix::preset(Preset::Decoupled, leads)?,
            (CouplingPreset::DirichletJunction, None) => CouplingMatrix::preset(Preset::DirichletJunction, leads)?,
        };
        Ok(HedgehogSystem::new(geometry, coupling))
    }

    fn geometry_only(&self) -> Result<Geometry> {
        let g = self.geometry.ok_or_else(|| cfg_err("missing `geometry`"))?;
        match g.kind {
            GeometryKind::Interval => Geometry::interval(g.size),
            GeometryKind::Disc => Geometry::disc(g.size),
            GeometryKind::Ball => Geometry::ball(g.size),
        }
    }
}

/// Sign and branch choices behind every number in a result document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub sigma: f64,
    pub resonance_function: String,
    pub leading_term_1d: String,
    pub leading_term_2d: String,
    pub leading_term_3d: String,
    pub lead_waves: String,
    pub phase: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            sigma: SIGMA,
            resonance_function: "F(k) = F1(k) + sigma i (u~(k) + 1)/(u~(k) - 1), sigma = -1; zeros in the closed lower half-plane".into(),
            leading_term_1d: "F1 ~ +i/(2k) for Im k > 0, -i/(2k) for Im k < 0".into(),
            leading_term_2d: "F1 ~ -(ln(-ik) - ln 2 + gamma)/(2 pi) for Im k > 0, -(ln(ik) - ln 2 + gamma)/(2 pi) for Im k < 0, principal log".into(),
            leading_term_3d: "F1 ~ +ik/(4 pi) for Im k > 0, -ik/(4 pi) for Im k < 0".into(),
            lead_waves: "lead j carries a_j e^{-ikx} + b_j e^{ikx}; S maps incoming a to outgoing b".into(),
            phase: "principal argument in (-pi, pi]; undefined (empty) at zeros and singular points".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    pub task: Task,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub generated_at_unix: u64,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub payload: serde_json::Value,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOut {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub kind: ResonanceKind,
    pub residual: f64,
}

fn resonance_rows(rs: &[resonance::Resonance]) -> Vec<ResonanceOut> {
    rs.iter()
        .map(|r| ResonanceOut { re: r.k.re, im: r.k.im, multiplicity: r.multiplicity, kind: r.kind, residual: r.residual })
        .collect()
}

fn cx_list(v: &[Complex64]) -> Vec<Cx> {
    v.iter().map(|z| Cx::from(*z)).collect()
}

fn cx_matrix(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect()
}

/// One grid sample of a phase field; `phase` is absent at zeros and singular points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSample {
    pub re: f64,
    pub im: f64,
    pub phase: Option<f64>,
}

/// Principal phase of f on an nx x ny grid covering `region`, real part fastest.
pub fn phase_field<F>(f: &F, region: &Rect, nx: usize, ny: usize) -> Result<Vec<PhaseSample>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + ?Sized,
{
    use rayon::prelude::*;
    if nx < 2 || ny < 2 {
        return Err(cfg_err(format!("phase field needs at least 2 x 2 points, got {nx} x {ny}")));
    }
    region.validate()?;
    let pts = ScanGrid { region: *region, nx, ny }.points();
    Ok(pts
        .par_iter()
        .map(|&k| {
            let phase = match f(k) {
                Ok(v) if v.re.is_finite() && v.im.is_finite() && v.norm() > 0.0 => Some(principal_phase(v)),
                _ => None,
            };
            PhaseSample { re: k.re, im: k.im, phase }
        })
        .collect())
}

pub fn write_phase_csv(samples: &[PhaseSample], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "re,im,phase")?;
    for s in samples {
        match s.phase {
            Some(p) => writeln!(w, "{},{},{}", s.re, s.im, p)?,
            None => writeln!(w, "{},{},", s.re, s.im)?,
        }
    }
    w.flush()?;
    Ok(())
}

/// 8-bit binary PGM, top row at the largest imaginary part; phase (-pi, pi]
/// maps linearly onto 0..255, undefined points are 0.
pub fn write_pgm(samples: &[PhaseSample], nx: usize, ny: usize, path: &Path) -> Result<()> {
    use std::f64::consts::PI;
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    for j in (0..ny).rev() {
        let row: Vec<u8> = (0..nx)
            .map(|i| match samples[j * nx + i].phase {
                Some(p) => ((p + PI) / (2.0 * PI) * 255.0).round().clamp(0.0, 255.0) as u8,
                None => 0,
            })
            .collect();
        w.write_all(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFieldSummary {
    pub csv: String,
    pub pgm: Option<String>,
    pub nx: usize,
    pub ny: usize,
    pub points: usize,
    pub undefined_points: usize,
}

pub fn emit_phase_field<F>(
    f: &F,
    region: &Rect,
    nx: usize,
    ny: usize,
    csv: &Path,
    pgm: Option<&Path>,
) -> Result<PhaseFieldSummary>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + ?Sized,
{
    let samples = phase_field(f, region, nx, ny)?;
    write_phase_csv(&samples, csv)?;
    if let Some(p) = pgm {
        write_pgm(&samples, nx, ny, p)?;
    }
    Ok(PhaseFieldSummary {
        csv: csv.display().to_string(),
        pgm: pgm.map(|p| p.display().to_string()),
        nx,
        ny,
        points: samples.len(),
        undefined_points: samples.iter().filter(|s| s.phase.is_none()).count(),
    })
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs one task on a resolved configuration.
pub fn run(task: Task, config: &RunConfig) -> Result<ResultDocument> {
    let cfg = config.resolved(task)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let mut warnings = Vec::new();
    let payload = match task {
        Task::Resonances => {
            let system = cfg.system()?;
            let region = cfg.region.unwrap_or(rect(0.1, 10.0, -2.0, 0.01));
            let rf = ResonanceFunction::new(&system)?;
            let found = resonance::find_resonances(&system, &region, tol)?;
            warnings.extend(found.warnings.iter().cloned());
            serde_json::json!({
                "region": found.region,
                "region_count": found.region_count,
                "resonances": resonance_rows(&found.resonances),
                "coupling_poles": cx_list(rf.coupling_poles()),
            })
        }
        Task::Count => {
            let system = cfg.system()?;
            let radii = cfg.radii.clone().unwrap_or_default();
            let rep = resonance::counting_report(&system, &radii)?;
            warnings.extend(rep.warnings.iter().cloned());
            let rows: Vec<serde_json::Value> = rep
                .rows
                .iter()
                .zip(&rep.core_eigenvalues)
                .map(|(r, core)| {
                    serde_json::json!({
                        "radius": r.radius,
                        "radius_used": r.radius_used,
                        "n": r.zeros,
                        "net": r.net,
                        "enclosed_poles": r.enclosed_poles,
                        "jumps_down": r.jumps_down,
                        "jumps_up": r.jumps_up,
                        "core_eigenvalues": core,
                    })
                })
                .collect();
            serde_json::json!({ "rows": rows, "non_weyl": rep.non_weyl })
        }
        Task::Strip => {
            let system = cfg.system()?;
            let windows = cfg.windows.clone().unwrap_or_default();
            let rep = resonance::strip_bound(&system, &windows, tol)?;
            warnings.extend(rep.warnings.iter().cloned());
            serde_json::json!({
                "search_windows": rep.search_windows,
                "max_abs_im": rep.max_abs_im,
                "max_im": rep.max_im,
                "counts": rep.counts,
                "stable": rep.stable,
                "resonances": resonance_rows(&rep.resonances),
            })
        }
        Task::Smatrix => {
            let system = cfg.system()?;
            let id_tol = cfg.identity_tol.unwrap_or(1e-10);
            let mut entries = Vec::new();
            for k in cfg.momenta.clone().unwrap_or_default() {
                let k: Complex64 = k.into();
                let sol = scattering::s_matrix(&system, k)?;
                let ids = scattering::s_identities_check(&system, k, id_tol)?;
                if !ids.within_tolerance {
                    warnings.push(format!("S-matrix identities exceed {id_tol:e} at k = {k}"));
                }
                entries.push(serde_json::json!({
                    "k": Cx::from(k),
                    "s_matrix": cx_matrix(&sol.s_matrix),
                    "interior_amplitudes": cx_list(sol.interior_amplitudes.as_slice()),
                    "condition_number": sol.condition_number,
                    "max_residual": sol.max_residual,
                    "identities": to_value(&ids)?,
                }));
            }
            serde_json::json!({ "entries": entries })
        }
        Task::PhaseField => {
            let region = cfg.region.unwrap_or(rect(0.2, 6.0, -2.0, 2.0));
            let grid = cfg.grid.unwrap_or(GridConfig { nx: 400, ny: 400 });
            let out = cfg.output.clone().unwrap_or_default();
            let csv = PathBuf::from(out.phase_csv.unwrap_or_else(|| "phase_field.csv".into()));
            let pgm = out.pgm.map(PathBuf::from);
            let summary = match cfg.field.unwrap_or(FieldKind::F1) {
                FieldKind::F1 => {
                    let g = cfg.geometry_only()?;
                    emit_phase_field(&|k| g.f1(k), &region, grid.nx, grid.ny, &csv, pgm.as_deref())?
                }
                FieldKind::Resonance => {
                    let rf = ResonanceFunction::new(&cfg.system()?)?;
                    emit_phase_field(&|k| rf.eval(k), &region, grid.nx, grid.ny, &csv, pgm.as_deref())?
                }
            };
            serde_json::json!({ "region": region, "field": cfg.field, "summary": to_value(&summary)? })
        }
        Task::AbDemo => {
            let ab = cfg.ab.ok_or_else(|| cfg_err("missing `ab`"))?;
            let sys = ABSystem::new(ab.radius.unwrap_or(1.0), ab.alpha.unwrap_or(0.5), ab.rho.unwrap_or(0.0))?;
            let grid = cfg.grid.unwrap_or(GridConfig { nx: 100, ny: 100 });
            let region = cfg.region.unwrap_or(rect(0.1, 10.0, -3.0, -1e-3));
            let scan_grid = ScanGrid { region, nx: grid.nx, ny: grid.ny };
            let c: Complex64 = ab.c.unwrap_or(Cx { re: 1.0, im: 0.0 }).into();
            let scan = abflux::true_resonance_scan(&sys, &scan_grid, c)?;
            let mut heatmap = None;
            if let Some(path) = cfg.output.as_ref().and_then(|o| o.heatmap_csv.clone()) {
                let mut w = BufWriter::new(File::create(&path)?);
                writeln!(w, "re,im,incoming")?;
                for (k, v) in scan_grid.points().iter().zip(&scan.incoming) {
                    writeln!(w, "{},{},{}", k.re, k.im, v)?;
                }
                w.flush()?;
                heatmap = Some(path);
            }
            let mut scan_value = to_value(&scan)?;
            // the per-point moduli go to the heat map, not the document
            if let Some(o) = scan_value.as_object_mut() {
                o.remove("incoming");
            }
            let m = ab.m.unwrap_or(1);
            let eig = sys.persistent_eigenvalues(m, ab.eigenvalues.unwrap_or(3))?;
            serde_json::json!({
                "scan": scan_value,
                "heatmap_csv": heatmap,
                "persistent_eigenvalues": { "m": m, "k": eig },
            })
        }
    };
    Ok(ResultDocument {
        version: VERSION.to_string(),
        task,
        generated_at_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        config: cfg,
        conventions: Conventions::default(),
        payload,
        warnings,
    })
}

#[derive(Debug, Parser)]
#[command(name = "hedgehog", version, about = "Resonances and scattering on hedgehog manifolds")]
pub struct Cli {
    #[arg(value_enum)]
    pub task: Task,
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Result document path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configured tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("HEDGEHOG_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| cfg_err(format!("HEDGEHOG_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(cfg_err("HEDGEHOG_THREADS must be positive"));
    }
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| cfg_err(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut config = RunConfig::from_json(&text)?;
    if let Some(t) = cli.tol {
        config.tol = Some(t);
    }
    let doc = run(cli.task, &config)?;
    let json = serde_json::to_string_pretty(&doc)?;
    match &cli.out {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

/// Process exit code: 0 success, 1 configuration error, 2 numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        1
    } else {
        2
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
