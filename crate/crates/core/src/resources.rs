//! Gate counts for the filter algorithm and Trotter-step CNOT cost of a
//! generic Pauli-sum evolution.
//!
//! All counts are integer arithmetic; only the T-gate estimate involves a
//! ceiling.

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::scalar::Real;
use crate::spmodel::{ModelSpace, Species};
use serde::{Deserialize, Serialize};

/// Inputs of the closed-form gate count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateBudget {
    /// Modes per species.
    pub n: usize,
    pub n_species: usize,
    pub n_iter: usize,
    pub n_proj: usize,
    /// Distinct `j` values whose `J_x` blocks are rotated.
    pub jset: Vec<f64>,
    /// Apply `K` once more at the end to return to the deformed basis.
    #[serde(default)]
    pub include_final_deformed_return: bool,
    /// The trial is prepared directly in the spherical basis, so the
    /// initial `K^dag` is not needed.
    #[serde(default)]
    pub trial_in_spherical_basis: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleQubitCounts {
    pub h: u64,
    pub rz: u64,
    pub rx: u64,
    pub rz_theta: u64,
}

impl GateBudget {
    pub fn new(n: usize, n_species: usize, n_proj: usize, n_iter: usize, jset: Vec<f64>) -> Self {
        GateBudget {
            n,
            n_species,
            n_iter,
            n_proj,
            jset,
            include_final_deformed_return: false,
            trial_in_spherical_basis: false,
        }
    }

    /// Proton and neutron sd shell (`n = 12`, `j = 1/2, 3/2, 5/2`).
    pub fn sd_shell(n_proj: usize, n_iter: usize) -> Self {
        GateBudget::new(12, 2, n_proj, n_iter, vec![0.5, 1.5, 2.5])
    }

    /// Budget for a model space; every species must share one shell
    /// structure.
    pub fn for_space(space: &ModelSpace, n_proj: usize, n_iter: usize) -> Result<Self> {
        let blocks = space.blocks();
        let first = blocks.first().ok_or(Error::EmptySpace)?;
        let shape = |species: Species| -> Result<Vec<u32>> {
            let block = space.block(species)?;
            Ok(block.shells.iter().map(|&s| space.shells()[s].two_j).collect())
        };
        let reference = shape(first.species)?;
        for b in blocks {
            if b.len != first.len || shape(b.species)? != reference {
                return Err(Error::Parse("species blocks have different shell structures".into()));
            }
        }
        let mut jset: Vec<f64> = reference.iter().map(|&t| t as f64 / 2.0).collect();
        jset.sort_by(|a, b| a.partial_cmp(b).expect("finite j"));
        jset.dedup();
        Ok(GateBudget::new(first.len, blocks.len(), n_proj, n_iter, jset))
    }

    pub fn validate(&self) -> Result<()> {
        if self.jset.is_empty() {
            return Err(Error::Parse("empty j set".into()));
        }
        for &j in &self.jset {
            let two_j = 2.0 * j;
            if j <= 0.0 || two_j.fract() != 0.0 || two_j as u64 % 2 == 0 {
                return Err(Error::InvalidJ(j));
            }
        }
        Ok(())
    }

    /// Number of `K^dag_{J~z}` / `K_{J~z}` applications contributing to
    /// the first term.
    fn deformed_factor(&self) -> u64 {
        match (self.trial_in_spherical_basis, self.include_final_deformed_return) {
            (true, false) => 0,
            (true, true) | (false, false) => 1,
            (false, true) => 2,
        }
    }

    fn network(&self) -> u64 {
        (self.n * self.n.saturating_sub(1) * self.n_species) as u64
    }

    fn filters(&self) -> u64 {
        (2 * self.n * self.n_species * self.n_iter * self.n_proj) as u64
    }

    pub fn njx(&self) -> u64 {
        njx(self.n_species, &self.jset)
    }
}

/// `N_s * sum_j 2j(2j+1)`: CNOTs of one pass of the `J_x` block networks.
pub fn njx(n_species: usize, jset: &[f64]) -> u64 {
    let per: u64 = jset
        .iter()
        .map(|&j| {
            let two_j = (2.0 * j).round() as u64;
            two_j * (two_j + 1)
        })
        .sum();
    n_species as u64 * per
}

/// CNOT count of a single Givens network on `n` modes per species,
/// without factorizing into `(j)` blocks.
pub fn unfactorized_network(n: usize, n_species: usize) -> u64 {
    (n * n.saturating_sub(1) * n_species) as u64
}

pub fn cnot_count(b: &GateBudget) -> u64 {
    b.deformed_factor() * b.network() + b.filters() + 2 * b.n_iter as u64 * b.njx()
}

pub fn single_qubit_counts(b: &GateBudget) -> SingleQubitCounts {
    let base = b.deformed_factor() * b.network();
    let jx = 2 * b.n_iter as u64 * b.njx();
    let h = base + jx;
    let rx = 2 * base + b.filters() + 2 * jx;
    assert!(rx % 2 == 0, "R_x count is even by construction");
    SingleQubitCounts { h, rz: h, rx, rz_theta: rx / 2 }
}

/// T gates to synthesize `n_rz_theta` arbitrary rotations at accuracy
/// `epsilon`, at `ceil(10 + 4 log2(1/epsilon))` each.
pub fn t_count(n_rz_theta: u64, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Epsilon(epsilon));
    }
    let per = (10.0 + 4.0 * (1.0 / epsilon).log2()).ceil() as u64;
    Ok(n_rz_theta * per)
}

/// CNOTs for one first-order Trotter step of the ancilla-controlled
/// evolution `exp(-i t O (x) Y_a)`: each non-identity string gains the
/// ancilla letter and costs a ladder of `2 (N_c + 1 - 1)` CNOTs.
pub fn trotter_step_cnots<T: Real>(op: &PauliSum<T>) -> u64 {
    op.iter().filter(|(w, _)| !w.is_identity()).map(|(w, _)| 2 * w.complexity() as u64).sum()
}

/// Everything reported for one budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub budget: GateBudget,
    pub njx: u64,
    pub unfactorized_jx: u64,
    pub cnot: u64,
    pub single_qubit: SingleQubitCounts,
    pub epsilon: f64,
    pub t_count: u64,
    /// One Trotter step of the `J~^2` filter, when an operator was given.
    pub trotter_j2_cnots: Option<u64>,
    pub ratio: Option<f64>,
    pub assumptions: Vec<String>,
}

pub const ANCILLA_ASSUMPTION: &str = "trotter ladder complexity includes the ancilla Y letter";

impl ResourceReport {
    pub fn new(budget: GateBudget, epsilon: f64, trotter_j2_cnots: Option<u64>) -> Result<Self> {
        budget.validate()?;
        let cnot = cnot_count(&budget);
        let single_qubit = single_qubit_counts(&budget);
        let t = t_count(single_qubit.rz_theta, epsilon)?;
        Ok(ResourceReport {
            njx: budget.njx(),
            unfactorized_jx: unfactorized_network(budget.n, budget.n_species),
            cnot,
            single_qubit,
            epsilon,
            t_count: t,
            trotter_j2_cnots,
            ratio: trotter_j2_cnots.map(|c| c as f64 / cnot.max(1) as f64),
            assumptions: vec![ANCILLA_ASSUMPTION.to_string()],
            budget,
        })
    }
}

pub const TABLE_HEADER: &str = "n_proj,n_iter,cnot,h,rz,rx,rz_theta,t_count,trotter_j2_cnots,ratio";

/// One row per report, in the order given.
pub fn table_csv(reports: &[ResourceReport]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in reports {
        let s = r.single_qubit;
        let trotter = r.trotter_j2_cnots.map_or(String::new(), |c| c.to_string());
        let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.6}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.budget.n_proj, r.budget.n_iter, r.cnot, s.h, s.rz, s.rx, s.rz_theta, r.t_count, trotter, ratio
        ));
    }
    out
}
