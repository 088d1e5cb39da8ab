use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::pauli::Axis;

/// One filter measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    /// 1-based running index.
    pub measurement: usize,
    /// 1-based iteration; the closing phased filter of a `J = 1/2` run
    /// carries `n_iter + 1`.
    pub iteration: usize,
    pub axis: Axis,
    pub t: f64,
    pub delta: f64,
    pub probability: f64,
    pub cumulative_probability: f64,
    pub j2: f64,
    pub jz: f64,
}

/// Weight of the `(J, M)` component of a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub j: f64,
    pub m: f64,
    pub weight: f64,
}

pub fn weight_at(weights: &[Weight], j: f64, m: f64) -> f64 {
    weights.iter().filter(|w| (w.j - j).abs() < 1e-9 && (w.m - m).abs() < 1e-9).map(|w| w.weight).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionRecord<S> {
    pub rows: Vec<RecordRow>,
    /// `<J^2>` and `<J_z>` of the trial before any filter.
    pub initial_j2: f64,
    pub initial_jz: f64,
    pub initial_weights: Option<Vec<Weight>>,
    pub final_weights: Option<Vec<Weight>>,
    /// Measurement at which a sampled run drew the rejected outcome.
    pub failed_at: Option<usize>,
    pub final_state: S,
}

impl<S> ProjectionRecord<S> {
    pub fn cumulative_probability(&self) -> f64 {
        self.rows.last().map_or(1.0, |r| r.cumulative_probability)
    }

    pub fn final_j2(&self) -> f64 {
        self.rows.last().map_or(self.initial_j2, |r| r.j2)
    }

    pub fn final_jz(&self) -> f64 {
        self.rows.last().map_or(self.initial_jz, |r| r.jz)
    }

    pub fn succeeded(&self) -> bool {
        self.failed_at.is_none()
    }

    /// First measurement after which `<J^2>` stays at or below `threshold`.
    pub fn converged_after(&self, threshold: f64) -> Option<usize> {
        let mut first = None;
        for r in &self.rows {
            if r.j2 <= threshold {
                first.get_or_insert(r.measurement);
            } else {
                first = None;
            }
        }
        first
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("measurement,iteration,axis,t,delta,probability,cumulative_probability,J2,Jz\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.measurement,
                r.iteration,
                r.axis.name(),
                r.t,
                r.delta,
                r.probability,
                r.cumulative_probability,
                r.j2,
                r.jz
            );
        }
        out
    }
}

pub fn weights_csv(weights: &[Weight]) -> String {
    let mut out = String::from("J,M,weight\n");
    for w in weights {
        let _ = writeln!(out, "{},{},{:.17e}", w.j, w.m, w.weight);
    }
    out
}
