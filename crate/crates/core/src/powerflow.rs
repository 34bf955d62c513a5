//! Balanced Newton–Raphson power flow on a radial feeder, plus constraint
//! evaluation.
//!
//! Per-unit system: transformer rating as power base, nominal winding
//! voltages as voltage bases. The transformer is a series impedance from
//! `(vk, vkr)` with its magnetizing branch on the MV bus; lines are π-models.
//! Interchange power is measured at the MV slack bus, positive when power
//! flows toward the transmission grid.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feeder::{FeederModel, SLACK_BUS};

pub const DEFAULT_TOLERANCE_PU: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 25;
const FREQUENCY_HZ: f64 = 50.0;

/// Active/reactive injection of one DER, generator convention.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Injection {
    pub p_kw: f64,
    pub q_kvar: f64,
}

impl Injection {
    pub fn new(p_kw: f64, q_kvar: f64) -> Self {
        Injection { p_kw, q_kvar }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterchangeResult {
    /// Active power exported to the MV grid (kW).
    pub p_pcc_kw: f64,
    /// Reactive power exported to the MV grid (kvar).
    pub q_pcc_kvar: f64,
    pub v_pu: Vec<f64>,
    /// Per-line current as a fraction of the thermal limit.
    pub line_loading: Vec<f64>,
    /// Transformer current as a fraction of rated.
    pub trafo_loading: f64,
    pub losses_kw: f64,
    pub converged: bool,
    pub iterations: usize,
    pub max_mismatch_pu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Feasible,
    Voltage,
    Current,
    Both,
    NonConverged,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Feasible => "feasible",
            Label::Voltage => "voltage",
            Label::Current => "current",
            Label::Both => "both",
            Label::NonConverged => "non-converged",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "feasible" => Label::Feasible,
            "voltage" => Label::Voltage,
            "current" => Label::Current,
            "both" => Label::Both,
            "non-converged" => Label::NonConverged,
            _ => return None,
        })
    }

    pub const ALL: [Label; 5] = [
        Label::Feasible,
        Label::Voltage,
        Label::Current,
        Label::Both,
        Label::NonConverged,
    ];
}

/// Constraint violations of one converged operating point.
///
/// Transformer overload is reported separately but classified together
/// with line overloads as a thermal (`current`) violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub max_v_violation: f64,
    pub max_i_violation: f64,
    pub trafo_violation: f64,
    pub label: Label,
}

impl ConstraintReport {
    /// Largest thermal violation over lines and transformer.
    pub fn thermal_violation(&self) -> f64 {
        self.max_i_violation.max(self.trafo_violation)
    }
}

pub fn evaluate_constraints(result: &InterchangeResult, model: &FeederModel) -> Result<ConstraintReport> {
    if !result.converged {
        return Err(Error::NotConverged);
    }
    let max_v_violation = result
        .v_pu
        .iter()
        .map(|&v| (v - model.v_max_pu).max(model.v_min_pu - v).max(0.0))
        .fold(0.0, f64::max);
    let max_i_violation = result
        .line_loading
        .iter()
        .map(|&l| (l - 1.0).max(0.0))
        .fold(0.0, f64::max);
    let trafo_violation = (result.trafo_loading - 1.0).max(0.0);

    let v = max_v_violation > 0.0;
    let i = max_i_violation > 0.0 || trafo_violation > 0.0;
    let label = match (v, i) {
        (false, false) => Label::Feasible,
        (true, false) => Label::Voltage,
        (false, true) => Label::Current,
        (true, true) => Label::Both,
    };
    Ok(ConstraintReport {
        max_v_violation,
        max_i_violation,
        trafo_violation,
        label,
    })
}

/// Monotone count of power-flow solves. Shared across worker threads.
#[derive(Debug, Default)]
pub struct PfCounter(AtomicU64);

impl PfCounter {
    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }

    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
}

#[derive(Debug, Clone, Copy)]
struct Branch {
    from: usize,
    to: usize,
    y_series: Complex64,
    /// Shunt admittance at each end.
    y_half_shunt: Complex64,
}

/// Solver bound to one feeder; holds the admittance matrix and the call
/// counter. `solve` takes `&self` and is safe to call from many threads.
#[derive(Debug)]
pub struct PowerFlow<'m> {
    model: &'m FeederModel,
    n: usize,
    ybus: Vec<Complex64>,
    lines: Vec<Branch>,
    trafo_series: Complex64,
    trafo_shunt: Complex64,
    s_base_kva: f64,
    i_base_lv_ka: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    counter: PfCounter,
}

impl<'m> PowerFlow<'m> {
    pub fn new(model: &'m FeederModel) -> Self {
        let tp = &model.transformer.params;
        let s_base_mva = tp.sn_mva;
        let z_base_lv = tp.vn_lv_kv * tp.vn_lv_kv / s_base_mva;
        let n = model.n_buses;

        let lines: Vec<Branch> = model
            .lines
            .iter()
            .map(|l| {
                let km = l.length_m / 1000.0;
                let z = Complex64::new(l.r_ohm_per_km * km, l.x_ohm_per_km * km) / z_base_lv;
                let b = 2.0 * PI * FREQUENCY_HZ * l.c_nf_per_km * 1e-9 * km * z_base_lv;
                Branch {
                    from: l.from,
                    to: l.to,
                    y_series: z.inv(),
                    y_half_shunt: Complex64::new(0.0, b / 2.0),
                }
            })
            .collect();

        // transformer rating equals the power base, so vk is already in pu
        let zk = tp.vk_percent / 100.0;
        let rk = tp.vkr_percent / 100.0;
        let xk = (zk * zk - rk * rk).max(0.0).sqrt();
        let trafo_series = Complex64::new(rk, xk).inv();
        let gm = tp.pfe_kw / 1000.0 / tp.sn_mva;
        let ym = tp.i0_percent / 100.0;
        let bm = (ym * ym - gm * gm).max(0.0).sqrt();
        let trafo_shunt = Complex64::new(gm, -bm);

        let mut ybus = vec![Complex64::new(0.0, 0.0); n * n];
        let (hv, lv) = (model.transformer.hv_bus, model.transformer.lv_bus);
        ybus[hv * n + hv] += trafo_series + trafo_shunt;
        ybus[lv * n + lv] += trafo_series;
        ybus[hv * n + lv] -= trafo_series;
        ybus[lv * n + hv] -= trafo_series;
        for br in &lines {
            let (f, t) = (br.from, br.to);
            ybus[f * n + f] += br.y_series + br.y_half_shunt;
            ybus[t * n + t] += br.y_series + br.y_half_shunt;
            ybus[f * n + t] -= br.y_series;
            ybus[t * n + f] -= br.y_series;
        }

        PowerFlow {
            model,
            n,
            ybus,
            lines,
            trafo_series,
            trafo_shunt,
            s_base_kva: s_base_mva * 1000.0,
            i_base_lv_ka: s_base_mva / (3f64.sqrt() * tp.vn_lv_kv),
            tolerance: DEFAULT_TOLERANCE_PU,
            max_iter: DEFAULT_MAX_ITER,
            counter: PfCounter::default(),
        }
    }

    pub fn model(&self) -> &'m FeederModel {
        self.model
    }

    pub fn s_base_kva(&self) -> f64 {
        self.s_base_kva
    }

    pub fn call_count(&self) -> u64 {
        self.counter.get()
    }

    pub fn reset_counter(&self) {
        self.counter.reset()
    }

    #[inline]
    fn y(&self, i: usize, j: usize) -> Complex64 {
        self.ybus[i * self.n + j]
    }

    fn currents(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.ybus[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(v).map(|(y, vj)| y * vj).sum();
        }
    }

    /// Solves the power flow for one injection per DER (in DER order).
    pub fn solve(&self, injections: &[Injection]) -> InterchangeResult {
        assert_eq!(
            injections.len(),
            self.model.ders.len(),
            "one injection per DER expected"
        );
        self.counter.bump();
        let n = self.n;
        let m = n - 1; // every bus but the slack is PQ

        let mut s_spec = vec![Complex64::new(0.0, 0.0); n];
        for (d, inj) in self.model.ders.iter().zip(injections) {
            s_spec[d.bus] += Complex64::new(inj.p_kw, inj.q_kvar) / self.s_base_kva;
        }

        let mut vm = vec![1.0; n];
        let mut va = vec![0.0; n];
        vm[SLACK_BUS] = self.model.slack_v_pu;
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(vm[i], va[i])).collect();
        let mut cur = vec![Complex64::new(0.0, 0.0); n];
        let mut f = DVector::<f64>::zeros(2 * m);
        let mut jac = DMatrix::<f64>::zeros(2 * m, 2 * m);

        let mut iterations = 0;
        let mut converged = false;
        let mut max_mis;
        loop {
            self.currents(&v, &mut cur);
            max_mis = 0.0f64;
            for k in 0..m {
                let i = k + 1;
                let mis = v[i] * cur[i].conj() - s_spec[i];
                f[k] = mis.re;
                f[m + k] = mis.im;
                max_mis = max_mis.max(mis.re.abs()).max(mis.im.abs());
            }
            if !max_mis.is_finite() {
                break;
            }
            if max_mis < self.tolerance {
                converged = true;
                break;
            }
            if iterations >= self.max_iter {
                break;
            }

            // dS/dθ = j diag(V) conj(diag(I) - Y diag(V))
            // dS/d|V| = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
            for a in 0..m {
                let i = a + 1;
                for b in 0..m {
                    let j = b + 1;
                    let yij = self.y(i, j);
                    let vn_j = v[j] / vm[j];
                    let mut ds_da = -(yij * v[j]).conj();
                    let mut ds_dm = (yij * vn_j).conj() * v[i];
                    if i == j {
                        ds_da += cur[i].conj();
                        ds_dm += cur[i].conj() * vn_j;
                    }
                    let ds_da = Complex64::new(0.0, 1.0) * v[i] * ds_da;
                    jac[(a, b)] = ds_da.re;
                    jac[(a, m + b)] = ds_dm.re;
                    jac[(m + a, b)] = ds_da.im;
                    jac[(m + a, m + b)] = ds_dm.im;
                }
            }
            let Some(dx) = jac.clone().lu().solve(&f) else {
                break;
            };
            for k in 0..m {
                va[k + 1] -= dx[k];
                vm[k + 1] -= dx[m + k];
            }
            for i in 1..n {
                v[i] = Complex64::from_polar(vm[i], va[i]);
            }
            iterations += 1;
        }

        self.finish(&v, converged, iterations, max_mis)
    }

    fn finish(&self, v: &[Complex64], converged: bool, iterations: usize, max_mis: f64) -> InterchangeResult {
        let n = self.n;
        let mut cur = vec![Complex64::new(0.0, 0.0); n];
        self.currents(v, &mut cur);
        let slack = v[SLACK_BUS] * cur[SLACK_BUS].conj();

        let mut losses = Complex64::new(0.0, 0.0);
        let line_loading = self
            .lines
            .iter()
            .map(|br| {
                let (vf, vt) = (v[br.from], v[br.to]);
                let i_f = (vf - vt) * br.y_series + vf * br.y_half_shunt;
                let i_t = (vt - vf) * br.y_series + vt * br.y_half_shunt;
                losses += vf * i_f.conj() + vt * i_t.conj();
                i_f.norm().max(i_t.norm()) * self.i_base_lv_ka / self.model.lines[0].max_i_ka
            })
            .collect::<Vec<_>>();

        let tr = &self.model.transformer;
        let (vh, vl) = (v[tr.hv_bus], v[tr.lv_bus]);
        let i_lv = (vl - vh) * self.trafo_series;
        let i_hv = (vh - vl) * self.trafo_series + vh * self.trafo_shunt;
        losses += vh * i_hv.conj() + vl * i_lv.conj();
        let trafo_loading = i_hv.norm().max(i_lv.norm());

        InterchangeResult {
            p_pcc_kw: -slack.re * self.s_base_kva,
            q_pcc_kvar: -slack.im * self.s_base_kva,
            v_pu: v.iter().map(|x| x.norm()).collect(),
            line_loading,
            trafo_loading,
            losses_kw: losses.re * self.s_base_kva,
            converged,
            iterations,
            max_mismatch_pu: max_mis,
        }
    }
}
