//! Normalized setpoints and the inverter capability limit.
//!
//! A normalized value of 0.5 is zero power; 0 and 1 are full charge / full
//! discharge (active) and full absorption / full injection (reactive).
//! Active power spans `±p_inst`, reactive power `±s_max`.

use serde::{Deserialize, Serialize};

use crate::feeder::FeederModel;
use crate::powerflow::Injection;

/// Slack on the apparent-power limit (kVA).
pub const S_EPS_KVA: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetpointVector {
    pub p_n: Vec<f64>,
    pub q_n: Vec<f64>,
}

impl SetpointVector {
    pub fn new(p_n: Vec<f64>, q_n: Vec<f64>) -> Self {
        assert_eq!(p_n.len(), q_n.len());
        let mut sp = SetpointVector { p_n, q_n };
        sp.clamp();
        sp
    }

    pub fn neutral(n: usize) -> Self {
        SetpointVector {
            p_n: vec![0.5; n],
            q_n: vec![0.5; n],
        }
    }

    /// Interprets `[p_1..p_N, q_1..q_N]`.
    pub fn from_flat(flat: &[f64]) -> Self {
        assert!(flat.len().is_multiple_of(2));
        let n = flat.len() / 2;
        Self::new(flat[..n].to_vec(), flat[n..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.p_n.iter().chain(&self.q_n).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.p_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_n.is_empty()
    }

    pub fn clamp(&mut self) {
        for x in self.p_n.iter_mut().chain(self.q_n.iter_mut()) {
            *x = if x.is_nan() { 0.5 } else { x.clamp(0.0, 1.0) };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedSetpoint {
    pub injections: Vec<Injection>,
    pub clipped: Vec<bool>,
}

/// Affine map from normalized set-values to raw (P, Q) requests.
pub fn denormalize(sp: &SetpointVector, model: &FeederModel) -> Vec<Injection> {
    assert_eq!(sp.len(), model.n_der());
    model
        .ders
        .iter()
        .zip(sp.p_n.iter().zip(&sp.q_n))
        .map(|(d, (&p, &q))| Injection::new((2.0 * p - 1.0) * d.p_inst_kw, (2.0 * q - 1.0) * d.s_max_kva))
        .collect()
}

/// Projects one request onto `{|P| ≤ p_inst} ∩ {P² + Q² ≤ s_max²}`:
/// clamp P first, then scale radially onto the apparent-power circle.
pub fn project_one(raw: Injection, p_inst: f64, s_max: f64) -> (Injection, bool) {
    let mut p = raw.p_kw.clamp(-p_inst, p_inst);
    let mut q = raw.q_kvar;
    let s = p.hypot(q);
    if s > s_max + S_EPS_KVA {
        let k = s_max / s;
        p *= k;
        q *= k;
    }
    let out = Injection::new(p, q);
    (out, out != raw)
}

pub fn project(raw: &[Injection], model: &FeederModel) -> AppliedSetpoint {
    assert_eq!(raw.len(), model.n_der());
    let (injections, clipped) = raw
        .iter()
        .zip(&model.ders)
        .map(|(&r, d)| project_one(r, d.p_inst_kw, d.s_max_kva))
        .unzip();
    AppliedSetpoint { injections, clipped }
}

/// Inverse of [`denormalize`].
pub fn renormalize(applied: &AppliedSetpoint, model: &FeederModel) -> SetpointVector {
    let (p_n, q_n) = applied
        .injections
        .iter()
        .zip(&model.ders)
        .map(|(inj, d)| {
            (
                (inj.p_kw / d.p_inst_kw + 1.0) / 2.0,
                (inj.q_kvar / d.s_max_kva + 1.0) / 2.0,
            )
        })
        .unzip();
    SetpointVector::new(p_n, q_n)
}

/// denormalize → project in one step.
pub fn apply(sp: &SetpointVector, model: &FeederModel) -> AppliedSetpoint {
    project(&denormalize(sp, model), model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feeder::{build_feeder, FeederSpec};
    use proptest::prelude::*;

    fn one_node() -> FeederModel {
        build_feeder(&FeederSpec::reference(1)).unwrap()
    }

    #[test]
    fn denormalize_examples() {
        let m = one_node();
        let raw = denormalize(&SetpointVector::neutral(1), &m);
        assert_eq!(raw[0], Injection::new(0.0, 0.0));
        let raw = denormalize(&SetpointVector::new(vec![1.0], vec![0.5]), &m);
        assert_eq!(raw[0], Injection::new(200.0, 0.0));
        let raw = denormalize(&SetpointVector::new(vec![0.0], vec![0.5]), &m);
        assert_eq!(raw[0].p_kw, -200.0);
    }

    #[test]
    fn projection_examples() {
        let s_max = 200.0 / 0.9;
        let (out, clipped) = project_one(Injection::new(200.0, 0.0), 200.0, s_max);
        assert_eq!(out, Injection::new(200.0, 0.0));
        assert!(!clipped);

        let (out, clipped) = project_one(Injection::new(200.0, 200.0), 200.0, s_max);
        assert!(clipped);
        assert!((out.p_kw.hypot(out.q_kvar) - s_max).abs() < 1e-9);
        assert!((out.p_kw - out.q_kvar).abs() < 1e-9);

        let (out, clipped) = project_one(Injection::default(), 200.0, s_max);
        assert_eq!(out, Injection::default());
        assert!(!clipped);

        let (out, _) = project_one(Injection::new(-500.0, 0.0), 200.0, s_max);
        assert_eq!(out.p_kw, -200.0);
    }

    #[test]
    fn renormalize_neutral() {
        let m = one_node();
        let applied = AppliedSetpoint {
            injections: vec![Injection::default()],
            clipped: vec![false],
        };
        assert_eq!(renormalize(&applied, &m), SetpointVector::neutral(1));
    }

    proptest! {
        #[test]
        fn projection_is_feasible_idempotent_and_non_expanding(
            p in -600.0f64..600.0, q in -600.0f64..600.0, p_inst in 1.0f64..300.0, pf in 0.5f64..1.0,
        ) {
            let s_max = p_inst / pf;
            let raw = Injection::new(p, q);
            let (a, _) = project_one(raw, p_inst, s_max);
            prop_assert!(a.p_kw.abs() <= p_inst);
            prop_assert!(a.p_kw.hypot(a.q_kvar) <= s_max + S_EPS_KVA);
            prop_assert!(a.p_kw.hypot(a.q_kvar) <= p.hypot(q) + 1e-12);
            let (b, clipped) = project_one(a, p_inst, s_max);
            prop_assert_eq!(a, b);
            prop_assert!(!clipped);
        }

        #[test]
        fn normalization_roundtrip(ps in proptest::collection::vec(0.0f64..=1.0, 9), qs in proptest::collection::vec(0.0f64..=1.0, 9)) {
            let m = build_feeder(&FeederSpec::reference(9)).unwrap();
            let sp = SetpointVector::new(ps, qs);
            let applied = apply(&sp, &m);
            let back = renormalize(&applied, &m);
            for x in back.p_n.iter().chain(&back.q_n) {
                prop_assert!((0.0..=1.0).contains(x));
            }
            // feasible requests come back unchanged
            for (k, c) in applied.clipped.iter().enumerate() {
                if !c {
                    prop_assert!((back.p_n[k] - sp.p_n[k]).abs() < 1e-12);
                    prop_assert!((back.q_n[k] - sp.q_n[k]).abs() < 1e-12);
                }
            }
            // renormalized point is a fixed point of the whole map
            let again = apply(&back, &m);
            for (a, b) in again.injections.iter().zip(&applied.injections) {
                prop_assert!((a.p_kw - b.p_kw).abs() < 1e-9 && (a.q_kvar - b.q_kvar).abs() < 1e-9);
            }
        }
    }
}
