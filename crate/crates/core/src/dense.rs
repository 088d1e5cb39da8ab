//! Dense reference matrices for small registers.
//!
//! These helpers build full `2^n x 2^n` matrices straight from the
//! definitions (Pauli letters acting on bits, fermionic ladder operators
//! with explicit ordering signs). They are slow and meant for checking the
//! sparse machinery on a handful of qubits.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::pauli::{OneBody, PauliSum, PauliWord};

pub type DenseMatrix = DMatrix<Complex<f64>>;

/// Matrix of a single word. Basis index `b` has qubit `q` in bit `q`.
pub fn word_matrix(word: &PauliWord, n: usize) -> DenseMatrix {
    let dim = 1usize << n;
    let mut out = DenseMatrix::zeros(dim, dim);
    let y_count = (word.x & word.z).count_ones();
    let phase = crate::pauli::i_pow::<f64>(y_count);
    for b in 0..dim as u64 {
        let sign = if (word.z & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[((b ^ word.x) as usize, b as usize)] = phase * sign;
    }
    out
}

pub fn pauli_matrix(op: &PauliSum<f64>) -> DenseMatrix {
    let n = op.n_qubits();
    let dim = 1usize << n;
    let mut out = DenseMatrix::zeros(dim, dim);
    for (w, c) in op.iter() {
        out += word_matrix(w, n) * *c;
    }
    out
}

fn ordering_sign(b: u64, q: usize) -> f64 {
    if (b & ((1u64 << q) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `a_p^dag a_q` on an `n`-mode register, signs from the mode ordering.
pub fn hopping(p: usize, q: usize, n: usize) -> DenseMatrix {
    let dim = 1usize << n;
    let mut out = DenseMatrix::zeros(dim, dim);
    for b in 0..dim as u64 {
        if b >> q & 1 == 0 {
            continue;
        }
        let s1 = ordering_sign(b, q);
        let mid = b & !(1u64 << q);
        if mid >> p & 1 == 1 {
            continue;
        }
        let s2 = ordering_sign(mid, p);
        out[((mid | 1u64 << p) as usize, b as usize)] = Complex::new(s1 * s2, 0.0);
    }
    out
}

/// `sum_{pq} M_pq a_{offset+p}^dag a_{offset+q}`.
pub fn fermionic_one_body(matrix: &OneBody<f64>, offset: usize, n: usize) -> DenseMatrix {
    let dim = 1usize << n;
    let mut out = DenseMatrix::zeros(dim, dim);
    for ((p, q), v) in matrix.indexed_iter() {
        if v.norm() != 0.0 {
            out += hopping(offset + p, offset + q, n) * *v;
        }
    }
    out
}
