//! Comparison harness: runs identification methods on a set of feeders and
//! writes per-cell artifacts plus a summary report.
//!
//! Layout under the output directory:
//!
//! ```text
//! <feeder>/<method>/run<k>/cloud.csv      labelled interchange points
//! <feeder>/<method>/run<k>/hull.json      hull vertices
//! <feeder>/<method>/run<k>/meta.json      the cell's entry of the report
//! <feeder>/revol/run<k>/convergence.csv   best-so-far trace per direction
//! <feeder>/plot.svg                       clouds and hulls of the feeder
//! report.json, summary.txt                deterministic summary
//! timing.json                             wall-clock times (not reproducible)
//! ```
//!
//! Every cell (feeder × method × run) draws from its own named sub-stream of
//! the master seed, so a cell can be recomputed alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::feeder::{build_feeder, FeederModel, FeederSpec};
use crate::geometry::{convex_hull, jaccard, ForPolygon};
use crate::plot::render_svg;
use crate::powerflow::{Label, PowerFlow};
use crate::revol::{self, Restrictions, RevolConfig, SweepReport, NON_CONVERGED_VIOLATION};
use crate::rng;
use crate::sampling::{self, Alpha, DirichletConfig, LabelledCloud, SamplePoint, DEFAULT_ALPHA};
use crate::tuning::mean_std;

/// Reference mean revol-vs-Dirichlet Jaccard index of the default setting
/// at full epoch budget, recorded in reports for comparison.
pub const TARGET_REVOL_JACCARD: f64 = 0.923;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Uniform,
    Dirichlet,
    Revol,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Uniform, Method::Dirichlet, Method::Revol];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Uniform => "uniform",
            Method::Dirichlet => "dirichlet",
            Method::Revol => "revol",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

fn default_feeders() -> Vec<FeederSpec> {
    FeederSpec::reference_set()
}
fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}
fn default_sample_size() -> usize {
    10_000
}
fn default_alpha() -> Alpha {
    Alpha::Symmetric(DEFAULT_ALPHA)
}
fn default_runs() -> usize {
    10
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_feeders")]
    pub feeders: Vec<FeederSpec>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
    #[serde(default = "default_alpha")]
    pub alpha: Alpha,
    #[serde(default = "default_runs")]
    pub revol_runs: usize,
    #[serde(default)]
    pub revol: RevolConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default = "default_true")]
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            feeders: default_feeders(),
            methods: default_methods(),
            sample_size: default_sample_size(),
            alpha: default_alpha(),
            revol_runs: default_runs(),
            revol: RevolConfig::default(),
            seed: 0,
            out_dir: default_out(),
            svg: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feeders.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidConfig("need at least one feeder and one method".into()));
        }
        let mut names: Vec<String> = self.feeders.iter().map(FeederSpec::display_name).collect();
        names.sort();
        names.dedup();
        if names.len() != self.feeders.len() {
            return Err(Error::InvalidConfig("feeder names must be unique".into()));
        }
        for name in &names {
            if name.is_empty() || name.starts_with('.') || name.contains(['/', '\\']) {
                return Err(Error::InvalidConfig(format!("feeder name {name:?} is not a plain directory name")));
            }
        }
        for spec in &self.feeders {
            spec.validate()?;
        }
        let sampling = self.methods.iter().any(|m| *m != Method::Revol);
        if sampling && self.sample_size == 0 {
            return Err(Error::InvalidConfig("sample_size must be at least 1".into()));
        }
        if self.methods.contains(&Method::Revol) {
            if self.revol_runs == 0 {
                return Err(Error::InvalidConfig("revol_runs must be at least 1".into()));
            }
            self.revol.validate()?;
        }
        Ok(())
    }

    /// Seed of the `(feeder, method)` sub-stream.
    pub fn cell_seed(&self, feeder: &str, method: Method) -> u64 {
        rng::derive_key(self.seed, &[rng::tag(feeder), rng::tag(method.as_str())])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub feeder: String,
    pub method: Method,
    pub run: usize,
    pub seed: u64,
    pub status: CellStatus,
    /// Power flows solved by this cell, read from the solver counter.
    pub pf_calls: u64,
    pub points: usize,
    pub feasible_points: usize,
    pub hull_area: Option<f64>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

impl CellReport {
    pub fn ok(&self) -> bool {
        self.status == CellStatus::Ok
    }

    pub fn label(&self) -> String {
        match self.method {
            Method::Revol => format!("revol/run{}", self.run),
            m => m.as_str().to_string(),
        }
    }

    pub fn dir(&self) -> String {
        format!("{}/{}/run{}", self.feeder, self.method.as_str(), self.run)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeederReport {
    pub feeder: String,
    pub n_der: usize,
    /// Labels of the rows and columns of `jaccard`.
    pub hulls: Vec<String>,
    pub hull_areas: Vec<f64>,
    pub jaccard: Vec<Vec<f64>>,
    pub pf_calls: BTreeMap<Method, u64>,
    pub revol_vs_dirichlet: Option<Stats>,
    pub uniform_to_dirichlet_area: Option<f64>,
    pub plot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub sample_size: usize,
    pub revol_runs: usize,
    pub target_revol_jaccard: f64,
    pub cells: Vec<CellReport>,
    pub feeders: Vec<FeederReport>,
    pub failed_cells: usize,
}

impl ExperimentReport {
    pub fn all_ok(&self) -> bool {
        self.failed_cells == 0
    }

    /// One row per feeder × method.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<10} {:<10} {:>5} {:>10} {:>14} {:>12} {:>8}",
            "feeder", "method", "cells", "pf calls", "area kW*kvar", "J vs dir.", "failed"
        );
        for f in &self.feeders {
            for m in Method::ALL {
                let cells: Vec<&CellReport> =
                    self.cells.iter().filter(|c| c.feeder == f.feeder && c.method == m).collect();
                if cells.is_empty() {
                    continue;
                }
                let areas: Vec<f64> = cells.iter().filter_map(|c| c.hull_area).collect();
                let area = mean_std(&areas).0;
                let dir_idx = f.hulls.iter().position(|h| h == "dirichlet");
                let js: Vec<f64> = match dir_idx {
                    Some(d) => f
                        .hulls
                        .iter()
                        .enumerate()
                        .filter(|(_, h)| h.split('/').next() == Some(m.as_str()))
                        .map(|(i, _)| f.jaccard[i][d])
                        .collect(),
                    None => vec![],
                };
                let j = if js.is_empty() {
                    "-".to_string()
                } else {
                    format!("{:.4}", mean_std(&js).0)
                };
                let _ = writeln!(
                    s,
                    "{:<10} {:<10} {:>5} {:>10} {:>14.1} {:>12} {:>8}",
                    f.feeder,
                    m.as_str(),
                    cells.len(),
                    f.pf_calls.get(&m).copied().unwrap_or(0),
                    area,
                    j,
                    cells.iter().filter(|c| !c.ok()).count()
                );
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTiming {
    pub cell: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub cells: Vec<CellTiming>,
}

struct Cell {
    feeder: usize,
    method: Method,
    run: usize,
}

struct CellOutput {
    report: CellReport,
    cloud: Option<LabelledCloud>,
    hull: Option<ForPolygon>,
    seconds: f64,
}

fn rel(parts: &[&str]) -> String {
    parts.join("/")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_cloud(path: &Path, cloud: &LabelledCloud) -> Result<()> {
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Label of a REvol boundary point from its restrictions.
pub fn restrictions_label(r: &Restrictions) -> Label {
    let (v, i) = (r.0[1], r.0[2]);
    if v >= NON_CONVERGED_VIOLATION || i >= NON_CONVERGED_VIOLATION {
        Label::NonConverged
    } else {
        match (v > 0.0, i > 0.0) {
            (false, false) => Label::Feasible,
            (true, false) => Label::Voltage,
            (false, true) => Label::Current,
            (true, true) => Label::Both,
        }
    }
}

/// Boundary points of one sweep as a labelled cloud (one point per direction).
pub fn sweep_cloud(sweep: &SweepReport) -> LabelledCloud {
    LabelledCloud::from_points(
        sweep
            .directions
            .iter()
            .map(|d| SamplePoint {
                p_kw: d.point[0],
                q_kvar: d.point[1],
                label: restrictions_label(&d.restrictions),
            })
            .collect(),
    )
}

/// Writes `epoch,best_fitness,v_violation,i_violation` per direction.
pub fn write_convergence_csv<W: std::io::Write>(sweep: &SweepReport, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["alpha", "beta", "epoch", "best_fitness", "v_violation", "i_violation"])?;
    for d in &sweep.directions {
        for t in &d.trace {
            wr.write_record([
                d.direction.alpha.to_string(),
                d.direction.beta.to_string(),
                t.epoch.to_string(),
                t.best_fitness.to_string(),
                t.v_violation.to_string(),
                t.i_violation.to_string(),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Writes `cloud.csv`, `convergence.csv` and, if the hull exists,
/// `hull.json` for one sweep into `dir`. Returns the file names written.
pub fn write_sweep_artifacts(dir: &Path, sweep: &SweepReport) -> Result<(Vec<&'static str>, Result<ForPolygon>)> {
    fs::create_dir_all(dir)?;
    let mut written = vec!["cloud.csv", "convergence.csv"];
    write_cloud(&dir.join("cloud.csv"), &sweep_cloud(sweep))?;
    let mut buf = Vec::new();
    write_convergence_csv(sweep, &mut buf)?;
    fs::write(dir.join("convergence.csv"), buf)?;
    let hull = sweep.hull();
    if let Ok(h) = &hull {
        write_json(&dir.join("hull.json"), h)?;
        written.push("hull.json");
    }
    Ok((written, hull))
}

fn run_cell(cfg: &ExperimentConfig, model: &FeederModel, cell: &Cell, exec: Execution) -> CellOutput {
    let start = Instant::now();
    let feeder = model.name.clone();
    let seed = cfg.cell_seed(&feeder, cell.method);
    let mut report = CellReport {
        feeder,
        method: cell.method,
        run: cell.run,
        seed,
        status: CellStatus::Ok,
        pf_calls: 0,
        points: 0,
        feasible_points: 0,
        hull_area: None,
        artifacts: vec![],
    };
    let dir_rel = report.dir();
    let dir = cfg.out_dir.join(&dir_rel);
    let pf = PowerFlow::new(model);

    let outcome: Result<(LabelledCloud, Result<ForPolygon>)> = (|| {
        fs::create_dir_all(&dir)?;
        match cell.method {
            Method::Uniform | Method::Dirichlet => {
                let cloud = if cell.method == Method::Uniform {
                    sampling::sample_uniform(&pf, cfg.sample_size, seed, exec)?
                } else {
                    let dc = DirichletConfig {
                        alpha: cfg.alpha.clone(),
                        sample_size: cfg.sample_size,
                        seed,
                    };
                    sampling::sample_dirichlet_two_stage(&pf, &dc, exec)?
                };
                write_cloud(&dir.join("cloud.csv"), &cloud)?;
                report.artifacts.push(rel(&[&dir_rel, "cloud.csv"]));
                let hull = cloud.hull();
                if let Ok(h) = &hull {
                    write_json(&dir.join("hull.json"), h)?;
                    report.artifacts.push(rel(&[&dir_rel, "hull.json"]));
                }
                Ok((cloud, hull))
            }
            Method::Revol => {
                let rc = RevolConfig {
                    seed,
                    ..cfg.revol.clone()
                };
                let sweep = revol::run_sweep(&pf, &rc, cell.run as u64, exec);
                let (files, hull) = write_sweep_artifacts(&dir, &sweep)?;
                report.artifacts.extend(files.iter().map(|f| rel(&[&dir_rel, f])));
                Ok((sweep_cloud(&sweep), hull))
            }
        }
    })();

    report.pf_calls = pf.call_count();
    let (cloud, hull) = match outcome {
        Ok((cloud, hull)) => {
            report.points = cloud.points.len();
            report.feasible_points = cloud.feasible_count;
            let hull = match hull {
                Ok(h) => {
                    report.hull_area = Some(h.area());
                    Some(h)
                }
                Err(e) => {
                    report.status = CellStatus::Failed(format!("no hull: {e}"));
                    None
                }
            };
            (Some(cloud), hull)
        }
        Err(e) => {
            report.status = CellStatus::Failed(e.to_string());
            (None, None)
        }
    };
    report.artifacts.push(rel(&[&dir_rel, "meta.json"]));
    if let Err(e) = fs::create_dir_all(&dir).map_err(Error::from).and_then(|_| write_json(&dir.join("meta.json"), &report)) {
        report.status = CellStatus::Failed(format!("writing meta.json: {e}"));
        report.artifacts.pop();
    }
    CellOutput {
        report,
        cloud,
        hull,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn failed_cell(cfg: &ExperimentConfig, spec: &FeederSpec, cell: &Cell, err: &Error) -> CellOutput {
    let feeder = spec.display_name();
    CellOutput {
        report: CellReport {
            seed: cfg.cell_seed(&feeder, cell.method),
            feeder,
            method: cell.method,
            run: cell.run,
            status: CellStatus::Failed(err.to_string()),
            pf_calls: 0,
            points: 0,
            feasible_points: 0,
            hull_area: None,
            artifacts: vec![],
        },
        cloud: None,
        hull: None,
        seconds: 0.0,
    }
}

fn feeder_report(cfg: &ExperimentConfig, model: &FeederModel, outputs: &[&CellOutput]) -> Result<FeederReport> {
    let hulls: Vec<(String, ForPolygon)> = outputs
        .iter()
        .filter_map(|o| o.hull.clone().map(|h| (o.report.label(), h)))
        .collect();
    let n = hulls.len();
    let mut matrix = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = jaccard(&hulls[i].1, &hulls[j].1).unwrap_or(0.0);
            matrix[i][j] = v;
            matrix[j][i] = v;
        }
    }
    let mut pf_calls = BTreeMap::new();
    for o in outputs {
        *pf_calls.entry(o.report.method).or_insert(0) += o.report.pf_calls;
    }
    let dir_idx = hulls.iter().position(|(l, _)| l == "dirichlet");
    let revol_vs_dirichlet = dir_idx.and_then(|d| {
        let js: Vec<f64> = (0..n).filter(|&i| hulls[i].0.starts_with("revol/")).map(|i| matrix[i][d]).collect();
        (!js.is_empty()).then(|| {
            let (mean, std) = mean_std(&js);
            Stats { mean, std, n: js.len() }
        })
    });
    let area = |label: &str| hulls.iter().find(|(l, _)| l == label).map(|(_, h)| h.area());
    let uniform_to_dirichlet_area = match (area("uniform"), area("dirichlet")) {
        (Some(u), Some(d)) if d > 0.0 => Some(u / d),
        _ => None,
    };

    let mut plot = None;
    if cfg.svg {
        let cloud = outputs
            .iter()
            .filter(|o| o.report.method != Method::Revol)
            .filter_map(|o| o.cloud.as_ref())
            .max_by_key(|c| c.points.len())
            .cloned()
            .or_else(|| {
                let pts = outputs.iter().filter_map(|o| o.cloud.as_ref()).flat_map(|c| c.points.clone()).collect();
                Some(LabelledCloud::from_points(pts))
            })
            .unwrap_or_default();
        let rel_path = format!("{}/plot.svg", model.name);
        fs::write(cfg.out_dir.join(&rel_path), render_svg(&cloud, &hulls))?;
        plot = Some(rel_path);
    }

    Ok(FeederReport {
        feeder: model.name.clone(),
        n_der: model.n_der(),
        hull_areas: hulls.iter().map(|(_, h)| h.area()).collect(),
        hulls: hulls.into_iter().map(|(l, _)| l).collect(),
        jaccard: matrix,
        pf_calls,
        revol_vs_dirichlet,
        uniform_to_dirichlet_area,
        plot,
    })
}

/// Runs every feeder × method × run cell of `cfg` and writes the artifacts.
///
/// A failing cell is recorded in the report and does not stop the others.
/// Only an invalid configuration or an unwritable output directory is an
/// error.
pub fn run_comparison(cfg: &ExperimentConfig, exec: Execution) -> Result<(ExperimentReport, Timing)> {
    cfg.validate()?;
    let start = Instant::now();
    fs::create_dir_all(&cfg.out_dir)?;

    let models: Vec<Result<FeederModel>> = cfg.feeders.iter().map(build_feeder).collect();
    let mut cells = Vec::new();
    for f in 0..cfg.feeders.len() {
        for &method in &cfg.methods {
            let runs = if method == Method::Revol { cfg.revol_runs } else { 1 };
            cells.extend((0..runs).map(|run| Cell { feeder: f, method, run }));
        }
    }

    let outputs = exec.map_slice(&cells, |cell| match &models[cell.feeder] {
        Ok(model) => run_cell(cfg, model, cell, exec),
        Err(e) => failed_cell(cfg, &cfg.feeders[cell.feeder], cell, e),
    });

    let mut feeders = Vec::new();
    for (f, model) in models.iter().enumerate() {
        if let Ok(model) = model {
            let mine: Vec<&CellOutput> = cells
                .iter()
                .zip(&outputs)
                .filter(|(c, _)| c.feeder == f)
                .map(|(_, o)| o)
                .collect();
            feeders.push(feeder_report(cfg, model, &mine)?);
        }
    }

    let report = ExperimentReport {
        seed: cfg.seed,
        sample_size: cfg.sample_size,
        revol_runs: cfg.revol_runs,
        target_revol_jaccard: TARGET_REVOL_JACCARD,
        failed_cells: outputs.iter().filter(|o| !o.report.ok()).count(),
        cells: outputs.iter().map(|o| o.report.clone()).collect(),
        feeders,
    };
    write_json(&cfg.out_dir.join("report.json"), &report)?;
    fs::write(cfg.out_dir.join("summary.txt"), report.summary_table())?;

    let timing = Timing {
        total_seconds: start.elapsed().as_secs_f64(),
        cells: outputs
            .iter()
            .map(|o| CellTiming {
                cell: o.report.dir(),
                seconds: o.seconds,
            })
            .collect(),
    };
    write_json(&cfg.out_dir.join("timing.json"), &timing)?;
    Ok((report, timing))
}

/// Reads a hull written by this crate.
pub fn read_hull(path: &Path) -> Result<ForPolygon> {
    let poly: ForPolygon = serde_json::from_str(&fs::read_to_string(path)?)?;
    if poly.is_empty() {
        return Err(Error::Degenerate(format!("{}: fewer than 3 vertices", path.display())));
    }
    // re-hull so hand-written vertex lists in any order are accepted
    convex_hull(&poly.vertices)
}
