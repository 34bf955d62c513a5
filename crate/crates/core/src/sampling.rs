//! Random-sampling identification of the feasible operation region.
//!
//! Two samplers are provided: independent uniform set-values per unit (the
//! naive baseline whose aggregate collapses toward the centre as the unit
//! count grows) and the two-stage scheme that draws the aggregate target
//! uniformly and splits it across units with Dirichlet shares.
//!
//! Each sample index owns its own random stream, so a cloud of `n` points is
//! a prefix of any larger cloud with the same seed and the result does not
//! depend on the thread count.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{convex_hull, ForPolygon};
use crate::inverter::{self, SetpointVector};
use crate::powerflow::{evaluate_constraints, Label, PowerFlow};
use crate::rng;

pub const DEFAULT_ALPHA: f64 = 1.2;

const UNIFORM_STREAM: u64 = 0x756e_6966;
const DIRICHLET_STREAM: u64 = 0x6469_7269;

/// Dirichlet concentration: one value for every unit, or one per unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Symmetric(f64),
    PerUnit(Vec<f64>),
}

impl Alpha {
    pub fn expand(&self, k: usize) -> Result<Vec<f64>> {
        let v = match self {
            Alpha::Symmetric(a) => vec![*a; k],
            Alpha::PerUnit(v) if v.len() == k => v.clone(),
            Alpha::PerUnit(v) => {
                return Err(Error::InvalidConfig(format!(
                    "alpha has {} entries for {k} units",
                    v.len()
                )))
            }
        };
        if v.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidConfig("alpha entries must be positive".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletConfig {
    pub alpha: Alpha,
    pub sample_size: usize,
    pub seed: u64,
}

impl DirichletConfig {
    pub fn new(sample_size: usize, seed: u64) -> Self {
        DirichletConfig {
            alpha: Alpha::Symmetric(DEFAULT_ALPHA),
            sample_size,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub p_kw: f64,
    pub q_kvar: f64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LabelledCloud {
    pub points: Vec<SamplePoint>,
    pub feasible_count: usize,
}

impl LabelledCloud {
    pub fn from_points(points: Vec<SamplePoint>) -> Self {
        let feasible_count = points.iter().filter(|p| p.label == Label::Feasible).count();
        LabelledCloud { points, feasible_count }
    }

    pub fn feasible_points(&self) -> Vec<[f64; 2]> {
        self.points
            .iter()
            .filter(|p| p.label == Label::Feasible)
            .map(|p| [p.p_kw, p.q_kvar])
            .collect()
    }

    /// Convex hull of the feasible points.
    pub fn hull(&self) -> Result<ForPolygon> {
        convex_hull(&self.feasible_points())
    }

    pub fn count(&self, label: Label) -> usize {
        self.points.iter().filter(|p| p.label == label).count()
    }

    /// Writes `p_kw,q_kvar,label` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["p_kw", "q_kvar", "label"])?;
        for p in &self.points {
            wr.write_record([p.p_kw.to_string(), p.q_kvar.to_string(), p.label.as_str().to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let bad = || Error::InvalidConfig(format!("malformed cloud row: {rec:?}"));
            let p_kw: f64 = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let q_kvar: f64 = rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let label = rec.get(2).and_then(Label::parse).ok_or_else(bad)?;
            points.push(SamplePoint { p_kw, q_kvar, label });
        }
        Ok(Self::from_points(points))
    }
}

/// Applies inverter limits, runs one power flow and labels the outcome.
pub fn classify(pf: &PowerFlow<'_>, sp: &SetpointVector) -> SamplePoint {
    let model = pf.model();
    let applied = inverter::apply(sp, model);
    let res = pf.solve(&applied.injections);
    let label = match evaluate_constraints(&res, model) {
        Ok(rep) => rep.label,
        Err(_) => Label::NonConverged,
    };
    SamplePoint {
        p_kw: res.p_pcc_kw,
        q_kvar: res.q_pcc_kvar,
        label,
    }
}

pub fn classify_all(pf: &PowerFlow<'_>, setpoints: &[SetpointVector], exec: Execution) -> LabelledCloud {
    LabelledCloud::from_points(exec.map_slice(setpoints, |sp| classify(pf, sp)))
}

/// Independent `U[0,1]` set-values for every unit.
pub fn uniform_setpoints(k: usize, n: usize, seed: u64, exec: Execution) -> Vec<SetpointVector> {
    exec.map_range(n, |i| {
        let mut r = rng::stream(seed, &[UNIFORM_STREAM, i as u64]);
        let p_n = (0..k).map(|_| r.random::<f64>()).collect();
        let q_n = (0..k).map(|_| r.random::<f64>()).collect();
        SetpointVector { p_n, q_n }
    })
}

pub fn sample_uniform(pf: &PowerFlow<'_>, n: usize, seed: u64, exec: Execution) -> Result<LabelledCloud> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be at least 1".into()));
    }
    let sps = uniform_setpoints(pf.model().n_der(), n, seed, exec);
    Ok(classify_all(pf, &sps, exec))
}

/// One draw from `Dir(alpha)` via normalized `Gamma(alpha_i, 1)` variates.
pub fn sample_dirichlet_shares<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Vec<f64> {
    let k = alpha.len();
    assert!(k >= 1, "at least one share");
    if k == 1 {
        return vec![1.0];
    }
    let mut x: Vec<f64> = alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("alpha validated positive").sample(rng))
        .collect();
    let sum: f64 = x.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        for v in &mut x {
            *v /= sum;
        }
    } else {
        // every gamma draw underflowed; fall back to a random vertex
        let hot = rng.random_range(0..k);
        x.iter_mut().enumerate().for_each(|(i, v)| *v = (i == hot) as u8 as f64);
    }
    x
}

/// Stage one and two of the Dirichlet scheme, before the subset reflection.
///
/// Aggregate normalized targets `a_p, a_q ~ U[0,1]` are split as
/// `p_i = a_p · K · x_i` with `x ~ Dir(alpha)`, then clamped to `[0, 1]`.
pub fn dirichlet_setpoints(k: usize, cfg: &DirichletConfig, exec: Execution) -> Result<Vec<SetpointVector>> {
    let alpha = cfg.alpha.expand(k)?;
    let kf = k as f64;
    Ok(exec.map_range(cfg.sample_size, |i| {
        let mut r = rng::stream(cfg.seed, &[DIRICHLET_STREAM, i as u64]);
        let a_p: f64 = r.random();
        let a_q: f64 = r.random();
        let xp = sample_dirichlet_shares(&alpha, &mut r);
        let xq = sample_dirichlet_shares(&alpha, &mut r);
        let split = |a: f64, x: Vec<f64>| -> Vec<f64> {
            if k == 1 {
                vec![a]
            } else {
                x.into_iter().map(|s| (a * kf * s).clamp(0.0, 1.0)).collect()
            }
        };
        SetpointVector {
            p_n: split(a_p, xp),
            q_n: split(a_q, xq),
        }
    }))
}

/// Which of the four reflection subsets sample `index` belongs to.
///
/// Samples are dealt round-robin, so subset sizes differ by at most one and
/// a sample keeps its subset when the sample size grows.
pub fn subset_of(index: usize) -> usize {
    index % 4
}

/// Subset 0 unchanged, 1 reflects active, 2 reactive, 3 both (`x ← 1 − x`).
pub fn reflect(sp: &mut SetpointVector, subset: usize) {
    if subset == 1 || subset == 3 {
        sp.p_n.iter_mut().for_each(|p| *p = 1.0 - *p);
    }
    if subset == 2 || subset == 3 {
        sp.q_n.iter_mut().for_each(|q| *q = 1.0 - *q);
    }
}

pub fn transform_subsets(setpoints: &mut [SetpointVector]) {
    for (i, sp) in setpoints.iter_mut().enumerate() {
        reflect(sp, subset_of(i));
    }
}

pub fn sample_dirichlet_two_stage(pf: &PowerFlow<'_>, cfg: &DirichletConfig, exec: Execution) -> Result<LabelledCloud> {
    if cfg.sample_size == 0 {
        return Err(Error::InvalidConfig("sample size must be at least 1".into()));
    }
    let mut sps = dirichlet_setpoints(pf.model().n_der(), cfg, exec)?;
    transform_subsets(&mut sps);
    Ok(classify_all(pf, &sps, exec))
}
