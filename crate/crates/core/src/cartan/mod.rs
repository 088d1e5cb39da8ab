//! Cartan (KHK) decompositions of one-body operators into Givens networks.

mod algebra;
mod ansatz;
pub mod bfgs;
mod cost;
mod decompose;
mod probe;

pub use algebra::{InvolutionAlgebra, Part};
pub use ansatz::{gate_order, mirror_map, AnsatzFile, CartanAnsatz};
pub use cost::Cost;
pub use decompose::{
    decompose, decompose_matrix, deformed_jz_ansatz, jx_block_ansatz, jz_weights, relabel, verify, DecomposeOptions,
};
pub use probe::CostProbe;
