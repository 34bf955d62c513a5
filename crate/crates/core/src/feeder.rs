//! Synthetic 0.4 kV radial feeders.
//!
//! A feeder is a chain: MV slack bus (20 kV) → distribution transformer →
//! LV busbar → `N` equally spaced nodes, one battery inverter per node.
//! Total installed power and the mean transformer-node distance are held
//! constant across feeders so their operating regions are comparable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CATALOGUE_JSON: &str = include_str!("../data/standard_types.json");

/// Per-km cable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineType {
    pub r_ohm_per_km: f64,
    pub x_ohm_per_km: f64,
    pub c_nf_per_km: f64,
    pub max_i_ka: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafoType {
    pub sn_mva: f64,
    pub vn_hv_kv: f64,
    pub vn_lv_kv: f64,
    pub vk_percent: f64,
    pub vkr_percent: f64,
    pub pfe_kw: f64,
    pub i0_percent: f64,
}

#[derive(Debug, Deserialize)]
struct Catalogue {
    lines: BTreeMap<String, LineType>,
    trafos: BTreeMap<String, TrafoType>,
}

fn catalogue() -> &'static Catalogue {
    static CAT: OnceLock<Catalogue> = OnceLock::new();
    CAT.get_or_init(|| {
        serde_json::from_str(CATALOGUE_JSON).expect("embedded standard-type catalogue is valid")
    })
}

fn known<T>(map: &BTreeMap<String, T>) -> String {
    map.keys().cloned().collect::<Vec<_>>().join(", ")
}

/// Looks up a cable in the embedded standard-type catalogue.
pub fn standard_line_params(name: &str) -> Result<LineType> {
    let cat = catalogue();
    cat.lines.get(name).copied().ok_or_else(|| Error::UnknownType {
        kind: "line",
        name: name.to_string(),
        known: known(&cat.lines),
    })
}

/// Looks up a transformer in the embedded standard-type catalogue.
pub fn standard_trafo_params(name: &str) -> Result<TrafoType> {
    let cat = catalogue();
    cat.trafos.get(name).copied().ok_or_else(|| Error::UnknownType {
        kind: "trafo",
        name: name.to_string(),
        known: known(&cat.trafos),
    })
}

/// User-facing feeder description, read and written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeederSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub n_der: usize,
    pub p_inst_total_kw: f64,
    pub cos_phi_min: f64,
    pub v_min_pu: f64,
    pub v_max_pu: f64,
    pub line_type: String,
    pub trafo_type: String,
    pub mean_trafo_node_distance_m: f64,
}

impl FeederSpec {
    /// One of the four reference feeders (1, 3, 9 or 27 nodes, 200 kW total,
    /// cos φ 0.9, 400 m mean distance).
    pub fn reference(n_der: usize) -> Self {
        FeederSpec {
            name: Some(format!("feeder{n_der}")),
            n_der,
            p_inst_total_kw: 200.0,
            cos_phi_min: 0.9,
            v_min_pu: 0.9,
            v_max_pu: 1.1,
            line_type: "NAYY 4x150 SE".into(),
            trafo_type: "0.4 MVA 20/0.4 kV".into(),
            mean_trafo_node_distance_m: 400.0,
        }
    }

    pub fn reference_set() -> Vec<Self> {
        REFERENCE_NODE_COUNTS.iter().map(|&n| Self::reference(n)).collect()
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("feeder{}", self.n_der))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.n_der == 0 {
            return bad("n_der must be at least 1");
        }
        if !(self.p_inst_total_kw > 0.0) {
            return bad("p_inst_total_kw must be positive");
        }
        if !(self.cos_phi_min > 0.0 && self.cos_phi_min <= 1.0) {
            return bad("cos_phi_min must lie in (0, 1]");
        }
        if !(self.v_min_pu > 0.0 && self.v_min_pu < self.v_max_pu) {
            return bad("voltage band must satisfy 0 < v_min < v_max");
        }
        if !(self.mean_trafo_node_distance_m > 0.0) {
            return bad("mean_trafo_node_distance_m must be positive");
        }
        Ok(())
    }
}

pub const REFERENCE_NODE_COUNTS: [usize; 4] = [1, 3, 9, 27];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub length_m: f64,
    pub r_ohm_per_km: f64,
    pub x_ohm_per_km: f64,
    pub c_nf_per_km: f64,
    pub max_i_ka: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transformer {
    pub hv_bus: usize,
    pub lv_bus: usize,
    pub params: TrafoType,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Der {
    pub bus: usize,
    pub p_inst_kw: f64,
    pub s_max_kva: f64,
}

/// Immutable grid model consumed by the power-flow solver.
///
/// Bus 0 is the MV slack, bus 1 the LV busbar, buses `2..N+2` the chain
/// nodes. Line `k` connects bus `k+1` to bus `k+2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeederModel {
    pub name: String,
    pub n_buses: usize,
    pub lines: Vec<Line>,
    pub transformer: Transformer,
    pub ders: Vec<Der>,
    pub v_min_pu: f64,
    pub v_max_pu: f64,
    pub slack_v_pu: f64,
    pub line_type: String,
    pub trafo_type: String,
}

pub const SLACK_BUS: usize = 0;
pub const LV_BUS: usize = 1;

/// Builds the chain feeder described by `spec`.
///
/// Line length follows from the mean distance of a uniform chain,
/// `d = l (N + 1) / 2`. Lengths are kept exact in the model; whole-metre
/// rounding only happens in [`FeederSummary`].
pub fn build_feeder(spec: &FeederSpec) -> Result<FeederModel> {
    spec.validate()?;
    let line_type = standard_line_params(&spec.line_type)?;
    let trafo = standard_trafo_params(&spec.trafo_type)?;
    let n = spec.n_der;

    let line_length_m = 2.0 * spec.mean_trafo_node_distance_m / (n as f64 + 1.0);
    let lines = (0..n)
        .map(|k| Line {
            from: LV_BUS + k,
            to: LV_BUS + k + 1,
            length_m: line_length_m,
            r_ohm_per_km: line_type.r_ohm_per_km,
            x_ohm_per_km: line_type.x_ohm_per_km,
            c_nf_per_km: line_type.c_nf_per_km,
            max_i_ka: line_type.max_i_ka,
        })
        .collect();

    let share = spec.p_inst_total_kw / n as f64;
    let mut ders: Vec<Der> = (0..n)
        .map(|k| Der {
            bus: LV_BUS + k + 1,
            p_inst_kw: share,
            s_max_kva: 0.0,
        })
        .collect();
    // remainder goes to the last unit so the total is exact
    let head: f64 = ders[..n - 1].iter().map(|d| d.p_inst_kw).sum();
    ders[n - 1].p_inst_kw = spec.p_inst_total_kw - head;
    for d in &mut ders {
        d.s_max_kva = d.p_inst_kw / spec.cos_phi_min;
    }

    Ok(FeederModel {
        name: spec.display_name(),
        n_buses: n + 2,
        lines,
        transformer: Transformer {
            hv_bus: SLACK_BUS,
            lv_bus: LV_BUS,
            params: trafo,
        },
        ders,
        v_min_pu: spec.v_min_pu,
        v_max_pu: spec.v_max_pu,
        slack_v_pu: 1.0,
        line_type: spec.line_type.clone(),
        trafo_type: spec.trafo_type.clone(),
    })
}

impl FeederModel {
    pub fn n_der(&self) -> usize {
        self.ders.len()
    }

    pub fn feeder_length_m(&self) -> f64 {
        self.lines.iter().map(|l| l.length_m).sum()
    }

    /// Mean electrical distance from the LV busbar to each DER node.
    pub fn mean_trafo_node_distance_m(&self) -> f64 {
        let mut acc = 0.0;
        let mut total = 0.0;
        for l in &self.lines {
            acc += l.length_m;
            total += acc;
        }
        total / self.lines.len() as f64
    }

    pub fn total_p_inst_kw(&self) -> f64 {
        self.ders.iter().map(|d| d.p_inst_kw).sum()
    }

    /// Reference apparent power of the per-unit system (transformer rating).
    pub fn s_base_kva(&self) -> f64 {
        self.transformer.params.sn_mva * 1000.0
    }

    pub fn summary(&self) -> FeederSummary {
        let d = &self.ders[0];
        FeederSummary {
            name: self.name.clone(),
            n_der: self.n_der(),
            p_inst_der_kw: round_to(d.p_inst_kw, 1),
            s_max_der_kva: round_to(d.s_max_kva, 1),
            feeder_length_m: self.feeder_length_m().round(),
            line_length_m: self.lines[0].length_m.round(),
            line_type: self.line_type.clone(),
            v_band_pu: (self.v_min_pu, self.v_max_pu),
            trafo_type: self.trafo_type.clone(),
        }
    }
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

/// One row of the configuration table, rounded for presentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeederSummary {
    pub name: String,
    pub n_der: usize,
    pub p_inst_der_kw: f64,
    pub s_max_der_kva: f64,
    pub feeder_length_m: f64,
    pub line_length_m: f64,
    pub line_type: String,
    pub v_band_pu: (f64, f64),
    pub trafo_type: String,
}

impl FeederSummary {
    pub const HEADER: &'static str =
        "# DERs | P_inst,DER (kW) | |S|max,DER (kVA) | Feeder Length (m) | Line Length (m) | Line Type | Voltage Band (pu) | Trafo Type";
}

impl fmt::Display for FeederSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {:.1} | {:.1} | {:.0} | {:.0} | {} | {}-{} | {}",
            self.n_der,
            self.p_inst_der_kw,
            self.s_max_der_kva,
            self.feeder_length_m,
            self.line_length_m,
            self.line_type,
            self.v_band_pu.0,
            self.v_band_pu.1,
            self.trafo_type
        )
    }
}
