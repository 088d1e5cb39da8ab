//! The one-body Lie algebra of an `n`-mode block in the Pauli basis and its
//! Cartan split `g = k + m` with Cartan subalgebra `h`.

use std::collections::HashMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::pauli::{hat_word, Letter, PauliSum, PauliWord};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// `Z_i`, which also spans the Cartan subalgebra.
    H,
    /// `XX^`, `YY^`.
    M,
    /// `XY^`, `YX^`.
    K,
}

/// Anticommuting pair under one generator `P`: `i P Q = sign R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Pair {
    pub q: usize,
    pub r: usize,
    pub sign: f64,
}

/// Basis of the block algebra with rotation tables for the adjacent
/// generators `X_i Y_{i+1}` and `Y_i X_{i+1}`.
///
/// Layout of coefficient vectors: `n` entries `Z_i`, then `XX^_{ij}, YY^_{ij}`
/// for `i < j` (together with the `Z_i` this is `m`, dimension `n^2`), then
/// `XY^_{ij}, YX^_{ij}` (the `n(n-1)` entries of `k`).
#[derive(Clone, Debug)]
pub struct InvolutionAlgebra {
    n: usize,
    words: Vec<PauliWord>,
    index: HashMap<PauliWord, usize>,
    tables: Vec<[Vec<Pair>; 2]>,
}

impl InvolutionAlgebra {
    pub fn new(n: usize) -> Self {
        let mut words: Vec<PauliWord> = (0..n).map(|i| PauliWord::single(i, Letter::Z)).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        for &(i, j) in &pairs {
            words.push(hat_word(i, Letter::X, j, Letter::X));
            words.push(hat_word(i, Letter::Y, j, Letter::Y));
        }
        for &(i, j) in &pairs {
            words.push(hat_word(i, Letter::X, j, Letter::Y));
            words.push(hat_word(i, Letter::Y, j, Letter::X));
        }
        let index: HashMap<PauliWord, usize> = words.iter().enumerate().map(|(k, w)| (*w, k)).collect();
        let mut alg = InvolutionAlgebra { n, words, index, tables: Vec::new() };
        alg.tables = (0..n.saturating_sub(1)).map(|i| [alg.table(&Self::generator(i, 0)), alg.table(&Self::generator(i, 1))]).collect();
        alg
    }

    /// `X_i Y_{i+1}` for `which == 0`, `Y_i X_{i+1}` otherwise.
    pub fn generator(i: usize, which: usize) -> PauliWord {
        if which == 0 {
            PauliWord::single(i, Letter::X).with(i + 1, Letter::Y)
        } else {
            PauliWord::single(i, Letter::Y).with(i + 1, Letter::X)
        }
    }

    fn table(&self, p: &PauliWord) -> Vec<Pair> {
        let mut out = Vec::new();
        for (q, w) in self.words.iter().enumerate() {
            if p.commutes_with(w) {
                continue;
            }
            let (k, prod) = p.mul(w);
            let r = *self.index.get(&prod).expect("algebra closed under adjacent generators");
            // i * i^k must be real
            let sign = match (k + 1) % 4 {
                0 => 1.0,
                2 => -1.0,
                _ => unreachable!("commutator of Hermitian words is anti-Hermitian"),
            };
            if q < r {
                out.push(Pair { q, r, sign });
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn m_dim(&self) -> usize {
        self.n * self.n
    }

    pub fn k_dim(&self) -> usize {
        self.n * self.n.saturating_sub(1)
    }

    pub fn words(&self) -> &[PauliWord] {
        &self.words
    }

    pub fn m_basis(&self) -> &[PauliWord] {
        &self.words[..self.m_dim()]
    }

    pub fn k_basis(&self) -> &[PauliWord] {
        &self.words[self.m_dim()..]
    }

    pub fn h_basis(&self) -> &[PauliWord] {
        &self.words[..self.n]
    }

    pub fn index_of(&self, w: &PauliWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn part(&self, w: &PauliWord) -> Option<Part> {
        self.index_of(w).map(|k| {
            if k < self.n {
                Part::H
            } else if k < self.m_dim() {
                Part::M
            } else {
                Part::K
            }
        })
    }

    /// Real coefficient vector of a block operator in `m`. The identity
    /// component is dropped.
    pub fn m_vector<T: Real>(&self, op: &PauliSum<T>, offset: usize) -> Result<Vec<T>> {
        let mut v = vec![T::zero(); self.dim()];
        let field = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 } << offset;
        for (w, c) in op.iter() {
            if w.is_identity() {
                continue;
            }
            if (w.support() & !field) != 0 {
                return Err(Error::OutsideM(w.to_letters(op.n_qubits())));
            }
            let local = PauliWord { x: w.x >> offset, z: w.z >> offset };
            match self.index_of(&local) {
                Some(k) if k < self.m_dim() => {
                    if c.im.abs() > T::structural() {
                        return Err(Error::ComplexElements(c.im.f64()));
                    }
                    v[k] = c.re;
                }
                _ => return Err(Error::OutsideM(w.to_letters(op.n_qubits()))),
            }
        }
        Ok(v)
    }

    /// Pauli sum on an `n_qubits` register from a coefficient vector.
    pub fn to_pauli<T: Real>(&self, v: &[T], offset: usize, n_qubits: usize) -> PauliSum<T> {
        let terms = self.words.iter().zip(v).filter(|(_, c)| c.abs() > T::structural()).map(|(w, c)| {
            (PauliWord { x: w.x << offset, z: w.z << offset }, Complex::new(*c, T::zero()))
        });
        PauliSum::from_terms(n_qubits, terms)
    }

    /// `v <- exp(i phi P) v exp(-i phi P)` for generator `which` of gate `gate`.
    #[inline]
    pub(crate) fn rotate<T: Real>(&self, v: &mut [T], gate: usize, which: usize, phi: T) {
        let (s, c) = (phi + phi).sin_cos();
        for p in &self.tables[gate][which] {
            let (a, b) = (v[p.q], v[p.r]);
            let ss = T::of(p.sign) * s;
            v[p.q] = c * a - ss * b;
            v[p.r] = c * b + ss * a;
        }
    }

    /// Conjugation by the Givens factor `exp(i theta (X_g Y_{g+1} - Y_g X_{g+1}))`.
    #[inline]
    pub fn conjugate_givens<T: Real>(&self, v: &mut [T], gate: usize, theta: T) {
        self.rotate(v, gate, 0, theta);
        self.rotate(v, gate, 1, -theta);
    }

    /// Conjugation by `Z_q`: flips every word with an `X` or `Y` on `q`.
    pub fn conjugate_z<T: Real>(&self, v: &mut [T], q: usize) {
        for (k, w) in self.words.iter().enumerate() {
            if w.x >> q & 1 == 1 {
                v[k] = -v[k];
            }
        }
    }

    /// `<i [X_g Y_{g+1} - Y_g X_{g+1}, A], B>` over coefficient vectors.
    #[inline]
    pub(crate) fn commutator_overlap<T: Real>(&self, a: &[T], b: &[T], gate: usize) -> T {
        let mut total = T::zero();
        for (which, sgn) in [(0usize, T::one()), (1, -T::one())] {
            let mut acc = T::zero();
            for p in &self.tables[gate][which] {
                acc += T::of(p.sign) * (a[p.q] * b[p.r] - a[p.r] * b[p.q]);
            }
            total += sgn * acc;
        }
        total + total
    }
}
