//! Pauli-string algebra: words, weighted sums, products and Jordan-Wigner
//! encodings of one-body operators.
//!
//! Words are stored in the symplectic `(x, z)` form with `Y = i X Z`, one bit
//! per qubit, so at most 64 qubits are supported. Letter strings are printed
//! with qubit 0 as the rightmost character, matching state bitstrings.

mod analysis;
mod angmom;
mod jw;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use analysis::{complexity_histogram, histogram_csv, ComplexityHistogram};
pub use angmom::{angular_momentum_matrix, build_j_squared, deformed_one_body, one_body_pauli, Axis};
pub use jw::{encode_one_body, hat_word, OneBody};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

/// An n-qubit Pauli word (no phase).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliWord {
    pub x: u64,
    pub z: u64,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn single(q: usize, letter: Letter) -> Self {
        PauliWord::IDENTITY.with(q, letter)
    }

    pub fn with(mut self, q: usize, letter: Letter) -> Self {
        let bit = 1u64 << q;
        self.x &= !bit;
        self.z &= !bit;
        match letter {
            Letter::I => {}
            Letter::X => self.x |= bit,
            Letter::Z => self.z |= bit,
            Letter::Y => {
                self.x |= bit;
                self.z |= bit;
            }
        }
        self
    }

    pub fn letter(&self, q: usize) -> Letter {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => Letter::I,
            (1, 0) => Letter::X,
            (0, 1) => Letter::Z,
            _ => Letter::Y,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity letters.
    pub fn complexity(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `self * other = i^k * word`; returns `(k mod 4, word)`.
    pub fn mul(&self, other: &PauliWord) -> (u32, PauliWord) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let a1 = (self.x & self.z).count_ones();
        let a2 = (other.x & other.z).count_ones();
        let a3 = (x & z).count_ones();
        let swap = (self.z & other.x).count_ones();
        let k = (a1 + a2 + 2 * swap + 4 * 64 - a3) % 4;
        (k, PauliWord { x, z })
    }

    pub fn to_letters(&self, n: usize) -> String {
        (0..n)
            .rev()
            .map(|q| match self.letter(q) {
                Letter::I => 'I',
                Letter::X => 'X',
                Letter::Y => 'Y',
                Letter::Z => 'Z',
            })
            .collect()
    }

    pub fn from_letters(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > 64 {
            return Err(Error::Parse(format!("word of length {n} exceeds 64 qubits")));
        }
        let mut w = PauliWord::IDENTITY;
        for (pos, ch) in s.chars().enumerate() {
            let q = n - 1 - pos;
            let letter = match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                other => return Err(Error::Parse(format!("invalid Pauli letter `{other}`"))),
            };
            w = w.with(q, letter);
        }
        Ok(w)
    }
}

pub(crate) fn i_pow<T: Real>(k: u32) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Weighted sum of Pauli words on `n` qubits, kept in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: BTreeMap<PauliWord, Complex<T>>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits are supported");
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize, coefficient: T) -> Self {
        let mut s = Self::zero(n);
        s.add_term(PauliWord::IDENTITY, Complex::new(coefficient, T::zero()));
        s
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliWord, Complex<T>)>) -> Self {
        let mut s = Self::zero(n);
        for (w, c) in terms {
            s.add_term(w, c);
        }
        s.prune();
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Accumulates a term without pruning; call [`PauliSum::prune`] afterwards.
    pub fn add_term(&mut self, word: PauliWord, coefficient: Complex<T>) {
        debug_assert!(self.n == 64 || word.support() >> self.n == 0, "word outside register");
        *self.terms.entry(word).or_insert_with(|| Complex::new(T::zero(), T::zero())) += coefficient;
    }

    /// Drops coefficients with magnitude below the structural tolerance.
    pub fn prune(&mut self) {
        let tol = T::structural();
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex<T> {
        self.terms.get(word).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex<T>)> {
        self.terms.iter()
    }

    /// Number of stored terms, identity included.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms excluding the identity; the count reported everywhere.
    pub fn term_count(&self) -> usize {
        self.terms.keys().filter(|w| !w.is_identity()).count()
    }

    pub fn max_complexity(&self) -> usize {
        self.terms.keys().map(PauliWord::complexity).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut out = Self::zero(self.n);
        for (w, c) in &self.terms {
            out.terms.insert(*w, *c * factor);
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex::new(-T::one(), T::zero())))
    }

    /// Exact product in the Pauli algebra.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (k, w) = wa.mul(wb);
                out.add_term(w, *ca * *cb * i_pow::<T>(k));
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (w, c) in &self.terms {
            out.terms.insert(*w, c.conj());
        }
        out
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> T {
        self.terms.values().map(|c| c.im.abs()).fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_imag() <= T::structural()
    }

    /// `sqrt(sum |c|^2)`, the normalized Hilbert-Schmidt norm.
    pub fn norm(&self) -> T {
        self.terms.values().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// Text export: one `<re> <im> <letters>` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in &self.terms {
            let _ = writeln!(out, "{} {} {}", c.re, c.im, w.to_letters(self.n));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: expected `<re> <im> <letters>`", lineno + 1));
            if fields.len() != 3 {
                return Err(bad());
            }
            let re: f64 = fields[0].parse().map_err(|_| bad())?;
            let im: f64 = fields[1].parse().map_err(|_| bad())?;
            let len = fields[2].chars().count();
            match n {
                None => n = Some(len),
                Some(m) if m != len => return Err(Error::QubitMismatch(m, len)),
                _ => {}
            }
            terms.push((PauliWord::from_letters(fields[2])?, Complex::new(T::of(re), T::of(im))));
        }
        Ok(Self::from_terms(n.unwrap_or(0), terms))
    }
}
