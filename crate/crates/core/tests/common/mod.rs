//! Reference implementations used to check the library, written without
//! any of its solver or geometry code.

#![allow(dead_code)]

use num_complex::Complex64;
use pqflex::feeder::FeederModel;
use pqflex::ForPolygon;
use rand::Rng;

/// A reference feeder with every shunt element removed, so the 1-node case is
/// a pure series impedance between slack and unit.
pub fn shunt_free(mut model: FeederModel) -> FeederModel {
    for l in &mut model.lines {
        l.c_nf_per_km = 0.0;
    }
    model.transformer.params.pfe_kw = 0.0;
    model.transformer.params.i0_percent = 0.0;
    model
}

/// Total series impedance (pu on the transformer rating) of a shunt-free
/// 1-node feeder, computed from the catalogue data.
pub fn series_impedance_pu(model: &FeederModel) -> Complex64 {
    let t = &model.transformer.params;
    let rk = t.vkr_percent / 100.0;
    let xk = ((t.vk_percent / 100.0).powi(2) - rk * rk).sqrt();
    let z_base = t.vn_lv_kv.powi(2) / t.sn_mva;
    let line: Complex64 = model
        .lines
        .iter()
        .map(|l| Complex64::new(l.r_ohm_per_km, l.x_ohm_per_km) * (l.length_m / 1000.0) / z_base)
        .sum();
    Complex64::new(rk, xk) + line
}

pub struct TwoBus {
    pub v_load: f64,
    /// Active and reactive power leaving toward the slack (pu).
    pub p_export: f64,
    pub q_export: f64,
}

/// Closed-form two-bus solution with slack at 1 pu behind `z` feeding the
/// injection `s_inj` (generation positive).
///
/// With load `S_L = -s_inj`, `|V|` solves
/// `|V|⁴ + (2(R·P_L + X·Q_L) − 1)|V|² + |Z|²|S_L|² = 0`; the high root is the
/// operating point.
pub fn two_bus(z: Complex64, s_inj: Complex64) -> TwoBus {
    let sl = -s_inj;
    let b = 2.0 * (z.re * sl.re + z.im * sl.im) - 1.0;
    let c = z.norm_sqr() * sl.norm_sqr();
    let disc = b * b - 4.0 * c;
    assert!(disc >= 0.0, "no solution for this operating point");
    let v2 = (-b + disc.sqrt()) / 2.0;
    let i2 = sl.norm_sqr() / v2;
    // slack supplies load plus series losses
    let slack = sl + z * i2;
    TwoBus {
        v_load: v2.sqrt(),
        p_export: -slack.re,
        q_export: -slack.im,
    }
}

pub struct SweepSolution {
    pub v: Vec<Complex64>,
    pub p_export_kw: f64,
    pub q_export_kvar: f64,
}

/// Backward/forward sweep on the chain feeder (trafo, then lines in series),
/// with line π-shunts and the magnetizing branch on the slack bus.
pub fn backward_forward_sweep(model: &FeederModel, inj_kw_kvar: &[(f64, f64)]) -> SweepSolution {
    let t = &model.transformer.params;
    let s_base_kva = t.sn_mva * 1000.0;
    let z_base = t.vn_lv_kv.powi(2) / t.sn_mva;
    let rk = t.vkr_percent / 100.0;
    let zt = Complex64::new(rk, ((t.vk_percent / 100.0).powi(2) - rk * rk).sqrt());
    let g_m = t.pfe_kw / 1000.0 / t.sn_mva;
    let y_m_abs = t.i0_percent / 100.0;
    let y_m = Complex64::new(g_m, -(y_m_abs * y_m_abs - g_m * g_m).max(0.0).sqrt());

    let n = model.n_buses;
    // chain: bus k connects to bus k+1 through branch k (branch 0 is the trafo)
    let mut z = vec![zt];
    let mut half_b = vec![0.0];
    for l in &model.lines {
        let km = l.length_m / 1000.0;
        z.push(Complex64::new(l.r_ohm_per_km, l.x_ohm_per_km) * km / z_base);
        half_b.push(2.0 * std::f64::consts::PI * 50.0 * l.c_nf_per_km * 1e-9 * km * z_base / 2.0);
    }
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    for (d, &(p, q)) in model.ders.iter().zip(inj_kw_kvar) {
        s[d.bus] += Complex64::new(p, q) / s_base_kva;
    }
    let v0 = Complex64::new(model.slack_v_pu, 0.0);
    let mut v = vec![v0; n];
    for _ in 0..200 {
        // current drawn out of each bus (load convention)
        let mut draw: Vec<Complex64> = (0..n).map(|k| -(s[k] / v[k]).conj()).collect();
        for k in 1..z.len() {
            let y = Complex64::new(0.0, half_b[k]);
            draw[k] += y * v[k];
            draw[k + 1] += y * v[k + 1];
        }
        let mut branch = vec![Complex64::new(0.0, 0.0); z.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..z.len()).rev() {
            acc += draw[k + 1];
            branch[k] = acc;
        }
        let mut next = vec![v0; n];
        for k in 0..z.len() {
            next[k + 1] = next[k] - z[k] * branch[k];
        }
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-13 {
            break;
        }
    }
    // slack current: trafo branch plus magnetizing shunt
    let mut draw_total = Complex64::new(0.0, 0.0);
    for k in 1..n {
        draw_total += -(s[k] / v[k]).conj();
    }
    for k in 1..z.len() {
        let y = Complex64::new(0.0, half_b[k]);
        draw_total += y * v[k] + y * v[k + 1];
    }
    let i_slack = draw_total + y_m * v0;
    let s_slack = v0 * i_slack.conj();
    SweepSolution {
        v,
        p_export_kw: -s_slack.re * s_base_kva,
        q_export_kvar: -s_slack.im * s_base_kva,
    }
}

fn inside(poly: &ForPolygon, p: [f64; 2]) -> bool {
    let v = &poly.vertices;
    let mut sign = 0i8;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let s = if c > 0.0 { 1 } else if c < 0.0 { -1 } else { 0 };
        if s != 0 {
            if sign != 0 && s != sign {
                return false;
            }
            sign = s;
        }
    }
    true
}

/// Monte Carlo estimate of the Jaccard index of two convex polygons from
/// `n` uniform points in their joint bounding box.
pub fn monte_carlo_jaccard<R: Rng>(a: &ForPolygon, b: &ForPolygon, n: usize, rng: &mut R) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in a.vertices.iter().chain(&b.vertices) {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let (mut both, mut either) = (0u64, 0u64);
    for _ in 0..n {
        let p = [rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])];
        let (ia, ib) = (inside(a, p), inside(b, p));
        both += (ia && ib) as u64;
        either += (ia || ib) as u64;
    }
    both as f64 / either as f64
}

/// Random convex polygon: hull of a handful of points in a random box.
pub fn random_convex<R: Rng>(rng: &mut R) -> ForPolygon {
    loop {
        let cx: f64 = rng.random_range(-1.0..1.0);
        let cy: f64 = rng.random_range(-1.0..1.0);
        let w: f64 = rng.random_range(0.3..2.0);
        let h: f64 = rng.random_range(0.3..2.0);
        let pts: Vec<[f64; 2]> = (0..rng.random_range(3..12))
            .map(|_| [cx + w * rng.random_range(-1.0..1.0), cy + h * rng.random_range(-1.0..1.0)])
            .collect();
        if let Ok(p) = pqflex::convex_hull(&pts) {
            if p.area() > 0.05 {
                return p;
            }
        }
    }
}
