//! Triangular Givens networks `K(theta)`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::InvolutionAlgebra;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gate positions `(i, l)` (1-based) in application order: `l = 1..n-1`,
/// and for each `l`, `i = l, l-1, .., 1`. Gate `(i, l)` acts on local
/// qubits `(i-1, i)`.
pub fn gate_order(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for l in 1..n {
        for i in (1..=l).rev() {
            out.push((i, l));
        }
    }
    out
}

/// Parameter index of every gate under the mirror constraint
/// `theta_{i,l} = theta_{i,n-1+i-l}`, and the number of free parameters.
pub fn mirror_map(n: usize) -> (Vec<usize>, usize) {
    let order = gate_order(n);
    let mut classes: Vec<(usize, usize)> = Vec::new();
    let mut map = Vec::with_capacity(order.len());
    for &(i, l) in &order {
        let mirror = n - 1 + i - l;
        let key = (i, l.min(mirror));
        let idx = match classes.iter().position(|&c| c == key) {
            Some(k) => k,
            None => {
                classes.push(key);
                classes.len() - 1
            }
        };
        map.push(idx);
    }
    (map, classes.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartanAnsatz<T> {
    /// Number of modes in the block.
    pub n: usize,
    /// Global qubit of local mode 0.
    pub offset: usize,
    /// One angle per gate, in [`gate_order`].
    pub angles: Vec<T>,
    /// `Z_i` coefficients of the diagonal element.
    pub h: Vec<T>,
    /// `relabeling[i]` is the canonical mode whose weight sits on qubit `i`.
    pub relabeling: Vec<usize>,
    pub residual: f64,
    pub seed: u64,
    /// Local qubits carrying a `Z` applied ahead of the network.
    pub sign_flips: Vec<usize>,
}

impl<T: Real> CartanAnsatz<T> {
    pub fn identity(n: usize, offset: usize) -> Self {
        CartanAnsatz {
            n,
            offset,
            angles: vec![T::zero(); n * n.saturating_sub(1) / 2],
            h: vec![T::zero(); n],
            relabeling: (0..n).collect(),
            residual: 0.0,
            seed: 0,
            sign_flips: Vec::new(),
        }
    }

    /// `(local qubit, angle)` per gate in application order.
    pub fn gates(&self) -> Vec<(usize, T)> {
        gate_order(self.n).into_iter().zip(&self.angles).map(|((i, _), &t)| (i - 1, t)).collect()
    }

    pub fn angle(&self, i: usize, l: usize) -> T {
        let k = gate_order(self.n).iter().position(|&g| g == (i, l)).expect("gate inside the triangle");
        self.angles[k]
    }

    /// Single-particle matrix `k` of `K`: `K a_p^dag K^dag = sum_r k_{rp} a_r^dag`.
    pub fn one_body(&self) -> Array2<T> {
        let mut k = Array2::<T>::eye(self.n);
        for &q in &self.sign_flips {
            k[[q, q]] = -k[[q, q]];
        }
        for (q, theta) in self.gates() {
            let (s, c) = (theta + theta).sin_cos();
            for col in 0..self.n {
                let (a, b) = (k[[q, col]], k[[q + 1, col]]);
                k[[q, col]] = c * a + s * b;
                k[[q + 1, col]] = c * b - s * a;
            }
        }
        k
    }

    /// `v <- Ad_K(v)` on algebra coefficient vectors.
    pub fn conjugate(&self, alg: &InvolutionAlgebra, v: &mut [T]) {
        for &q in &self.sign_flips {
            alg.conjugate_z(v, q);
        }
        for (q, theta) in self.gates() {
            alg.conjugate_givens(v, q, theta);
        }
    }

    /// `v <- Ad_{K^dag}(v)`.
    pub fn conjugate_inverse(&self, alg: &InvolutionAlgebra, v: &mut [T]) {
        for (q, theta) in self.gates().into_iter().rev() {
            alg.conjugate_givens(v, q, -theta);
        }
        for &q in &self.sign_flips {
            alg.conjugate_z(v, q);
        }
    }

    pub fn to_file(&self) -> AnsatzFile {
        let mut rows: Vec<Vec<f64>> = (1..self.n).map(|l| vec![0.0; l]).collect();
        for (&(i, l), t) in gate_order(self.n).iter().zip(&self.angles) {
            rows[l - 1][i - 1] = t.f64();
        }
        AnsatzFile {
            n: self.n,
            offset: self.offset,
            angles: rows,
            h: self.h.iter().map(|v| v.f64()).collect(),
            relabeling: self.relabeling.clone(),
            residual: self.residual,
            seed: self.seed,
            sign_flips: self.sign_flips.clone(),
        }
    }

    pub fn from_file(file: &AnsatzFile) -> Result<Self> {
        let n = file.n;
        if file.angles.len() != n.saturating_sub(1) || file.angles.iter().enumerate().any(|(l, r)| r.len() != l + 1) {
            return Err(Error::Parse("angle rows must form a triangle of size n-1".into()));
        }
        if file.h.len() != n || file.relabeling.len() != n {
            return Err(Error::Shape { rows: file.h.len(), cols: file.relabeling.len(), expected: n });
        }
        let angles = gate_order(n).iter().map(|&(i, l)| T::of(file.angles[l - 1][i - 1])).collect();
        Ok(CartanAnsatz {
            n,
            offset: file.offset,
            angles,
            h: file.h.iter().map(|&v| T::of(v)).collect(),
            relabeling: file.relabeling.clone(),
            residual: file.residual,
            seed: file.seed,
            sign_flips: file.sign_flips.clone(),
        })
    }
}

/// Serialized ansatz; `angles[l-1][i-1]` is `theta_{i,l}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzFile {
    pub n: usize,
    #[serde(default)]
    pub offset: usize,
    pub angles: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    pub relabeling: Vec<usize>,
    pub residual: f64,
    pub seed: u64,
    #[serde(default)]
    pub sign_flips: Vec<usize>,
}
