//! Many-fermion state vectors with a full `2^n` backend and a
//! fixed-particle-number sector backend.
//!
//! Basis states are occupation bitmasks (qubit `q` in bit `q`, `1` means
//! occupied). Every operation is written against [`QuantumState::mask`] and
//! [`QuantumState::index_of`], so both backends share one code path.

mod observable;
mod sector;

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::CartanAnsatz;
use crate::error::{Error, Result};
use crate::pauli::{OneBody, PauliSum};
use crate::scalar::Real;
use crate::spmodel::{check_occupations, ModelSpace};

pub use observable::{DiagonalObservable, FilterOutcome};
pub use sector::Sector;

/// Largest register the full backend will allocate.
pub const MAX_FULL_QUBITS: usize = 24;
/// Largest sector dimension the sector backend will allocate.
pub const MAX_SECTOR_DIM: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Full,
    Sector,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Backend::Full),
            "sector" => Ok(Backend::Sector),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Full,
    Sector(Sector),
}

/// Register geometry shared by states of the same shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    n: usize,
    ranges: Vec<(usize, usize)>,
    kind: Kind,
}

impl Layout {
    pub fn full(space: &ModelSpace) -> Result<Self> {
        Self::full_from_ranges(ranges_of(space))
    }

    pub fn sector(space: &ModelSpace, counts: &[usize]) -> Result<Self> {
        let ranges = ranges_of(space);
        let sector = Sector::new(&ranges, counts, MAX_SECTOR_DIM)?;
        Ok(Layout { n: space.n_modes(), ranges, kind: Kind::Sector(sector) })
    }

    fn full_from_ranges(ranges: Vec<(usize, usize)>) -> Result<Self> {
        let n: usize = ranges.iter().map(|r| r.1).sum();
        if n > MAX_FULL_QUBITS {
            return Err(Error::SectorTooLarge(1usize << n.min(63), 1 << MAX_FULL_QUBITS));
        }
        Ok(Layout { n, ranges, kind: Kind::Full })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> Backend {
        match self.kind {
            Kind::Full => Backend::Full,
            Kind::Sector(_) => Backend::Sector,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Full => 1 << self.n,
            Kind::Sector(s) => s.dim(),
        }
    }

    #[inline]
    pub fn mask(&self, index: usize) -> u64 {
        match &self.kind {
            Kind::Full => index as u64,
            Kind::Sector(s) => s.mask(index),
        }
    }

    #[inline]
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        match &self.kind {
            Kind::Full => ((mask >> self.n) == 0).then_some(mask as usize),
            Kind::Sector(s) => s.index_of(mask),
        }
    }

    /// `(offset, len)` of every species block.
    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    fn block_of(&self, q: usize) -> Option<usize> {
        self.ranges.iter().position(|&(o, l)| q >= o && q < o + l)
    }
}

fn ranges_of(space: &ModelSpace) -> Vec<(usize, usize)> {
    space.blocks().iter().map(|b| (b.offset, b.len)).collect()
}

#[inline]
fn parity_sign<T: Real>(bits: u64) -> T {
    if bits.count_ones() % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Mask of the qubits strictly between `a` and `b`.
#[inline]
fn between(a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi <= lo + 1 {
        0
    } else {
        ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState<T> {
    layout: Arc<Layout>,
    amps: Vec<Complex<T>>,
}

impl<T: Real> QuantumState<T> {
    /// Computational basis state with the given global qubits occupied.
    pub fn slater(space: &ModelSpace, occupations: &[usize], backend: Backend) -> Result<Self> {
        check_occupations(occupations, space.n_modes())?;
        let mask = occupations.iter().fold(0u64, |m, &q| m | 1u64 << q);
        let layout = match backend {
            Backend::Full => Layout::full(space)?,
            Backend::Sector => {
                let counts: Vec<usize> = space.blocks().iter().map(|b| occupations.iter().filter(|&&q| b.range().contains(&q)).count()).collect();
                Layout::sector(space, &counts)?
            }
        };
        Self::basis_state(Arc::new(layout), mask)
    }

    pub fn basis_state(layout: Arc<Layout>, mask: u64) -> Result<Self> {
        let index = layout.index_of(mask).ok_or(Error::SectorLeakage(1.0))?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); layout.dim()];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(QuantumState { layout, amps })
    }

    pub fn from_amplitudes(layout: Arc<Layout>, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::Shape { rows: amps.len(), cols: 1, expected: layout.dim() });
        }
        Ok(QuantumState { layout, amps })
    }

    /// Normalized state with independent Gaussian-like random amplitudes.
    pub fn random<R: Rng>(layout: Arc<Layout>, rng: &mut R) -> Self {
        let amps = (0..layout.dim()).map(|_| Complex::new(T::of(rng.gen_range(-1.0..1.0)), T::of(rng.gen_range(-1.0..1.0)))).collect();
        let mut s = QuantumState { layout, amps };
        s.normalize();
        s
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn backend(&self) -> Backend {
        self.layout.backend()
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub fn mask(&self, index: usize) -> u64 {
        self.layout.mask(index)
    }

    #[inline]
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.layout.index_of(mask)
    }

    /// Amplitude of an occupation mask (zero outside the sector).
    pub fn amplitude(&self, mask: u64) -> Complex<T> {
        self.index_of(mask).map_or(Complex::new(T::zero(), T::zero()), |i| self.amps[i])
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > T::zero() {
            for a in &mut self.amps {
                *a = *a / n;
            }
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.layout, other.layout, "inner product across layouts");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).fold(Complex::new(T::zero(), T::zero()), |s, v| s + v)
    }

    fn check_pair(&self, q: usize) -> Result<()> {
        let a = self.layout.block_of(q);
        let b = self.layout.block_of(q + 1);
        match (a, b) {
            (Some(x), Some(y)) if x == y => Ok(()),
            _ => Err(Error::CrossSpecies(q, q + 1)),
        }
    }

    /// `exp(i theta (X_q Y_{q+1} - Y_q X_{q+1}))` with `c = cos 2theta`,
    /// `s = sin 2theta`: `|1_q 0> -> c|1_q 0> - s|0 1_{q+1}>` and
    /// `|0 1_{q+1}> -> s|1_q 0> + c|0 1_{q+1}>`.
    pub fn apply_givens(&mut self, q: usize, theta: T) -> Result<()> {
        self.check_pair(q)?;
        let two = theta + theta;
        let (s, c) = two.sin_cos();
        let lo = 1u64 << q;
        let hi = 1u64 << (q + 1);
        for i in 0..self.amps.len() {
            let m = self.layout.mask(i);
            if m & (lo | hi) != lo {
                continue;
            }
            let j = match self.layout.index_of(m ^ lo ^ hi) {
                Some(j) => j,
                None => continue,
            };
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = a * c + b * s;
            self.amps[j] = b * c - a * s;
        }
        Ok(())
    }

    pub fn apply_z(&mut self, q: usize) {
        let bit = 1u64 << q;
        for i in 0..self.amps.len() {
            if self.layout.mask(i) & bit != 0 {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    /// Applies `K` of the ansatz (or `K^dag` when `dagger`).
    ///
    /// `K` first applies the sign-flip `Z` gates and then the Givens
    /// network in gate order; `K^dag` runs the network backwards with
    /// negated angles and then the flips.
    pub fn apply_cartan(&mut self, ansatz: &CartanAnsatz<T>, dagger: bool) -> Result<()> {
        let off = ansatz.offset;
        let gates = ansatz.gates();
        if ansatz.n > 0 {
            self.check_span(off, ansatz.n)?;
        }
        if dagger {
            for &(q, theta) in gates.iter().rev() {
                self.apply_givens(off + q, -theta)?;
            }
            for &q in &ansatz.sign_flips {
                self.apply_z(off + q);
            }
        } else {
            for &q in &ansatz.sign_flips {
                self.apply_z(off + q);
            }
            for &(q, theta) in &gates {
                self.apply_givens(off + q, theta)?;
            }
        }
        Ok(())
    }

    fn check_span(&self, offset: usize, n: usize) -> Result<()> {
        let first = self.layout.block_of(offset);
        let last = self.layout.block_of(offset + n - 1);
        match (first, last) {
            (Some(a), Some(b)) if a == b => Ok(()),
            _ => Err(Error::CrossSpecies(offset, offset + n - 1)),
        }
    }

    /// Multiplies amplitudes by `cos(lambda t + delta)` (outcome 0) or
    /// `sin(lambda t + delta)` (outcome 1) and renormalizes.
    ///
    /// With `sampler == None` outcome 0 is post-selected. Otherwise the
    /// outcome is drawn with the Born probability.
    pub fn filter_measure<R: Rng>(
        &mut self,
        obs: &DiagonalObservable<T>,
        t: T,
        delta: T,
        sampler: Option<&mut R>,
    ) -> Result<FilterOutcome> {
        let total = self.norm_sqr();
        let mut weighted = self.amps.clone();
        let mut kept = T::zero();
        for (i, a) in weighted.iter_mut().enumerate() {
            let phase = obs.eigenvalue(self.layout.mask(i)) * t + delta;
            *a = *a * phase.cos();
            kept += a.norm_sqr();
        }
        let p0 = (kept / total).f64();
        let outcome = match sampler {
            None => 0,
            Some(rng) => u8::from(rng.gen::<f64>() >= p0),
        };
        let probability = if outcome == 0 {
            self.amps = weighted;
            p0
        } else {
            for (i, a) in self.amps.iter_mut().enumerate() {
                let phase = obs.eigenvalue(self.layout.mask(i)) * t + delta;
                *a = *a * phase.sin();
            }
            1.0 - p0
        };
        if probability <= T::STRUCTURAL * T::STRUCTURAL {
            return Err(Error::ZeroProbability(probability));
        }
        self.normalize();
        Ok(FilterOutcome { probability, outcome })
    }

    /// `O|psi>` for a one-body matrix acting on qubits `offset..offset+rows`.
    pub fn apply_one_body(&self, matrix: &OneBody<T>, offset: usize) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
        self.accumulate_one_body(matrix, offset, &mut out);
        out
    }

    pub(crate) fn accumulate_one_body(&self, matrix: &OneBody<T>, offset: usize, out: &mut [Complex<T>]) {
        let tiny = T::structural();
        let entries: Vec<(usize, usize, Complex<T>)> =
            matrix.indexed_iter().filter(|(_, v)| v.norm() > tiny).map(|((p, q), v)| (offset + p, offset + q, *v)).collect();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == T::zero() {
                continue;
            }
            let m = self.layout.mask(i);
            for &(p, q, v) in &entries {
                if m >> q & 1 == 0 {
                    continue;
                }
                if p == q {
                    out[i] = out[i] + v * a;
                    continue;
                }
                let removed = m & !(1u64 << q);
                if removed >> p & 1 == 1 {
                    continue;
                }
                let target = removed | 1u64 << p;
                if let Some(j) = self.layout.index_of(target) {
                    let sign: T = parity_sign(removed & between(p, q));
                    out[j] = out[j] + v * a * sign;
                }
            }
        }
    }

    pub fn expectation_one_body(&self, matrix: &OneBody<T>, offset: usize) -> T {
        let v = self.apply_one_body(matrix, offset);
        self.amps.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `sum_a || (sum_b O_{a,b}) psi ||^2` for groups of one-body pieces,
    /// which is `<psi| sum_a O_a^2 |psi>` for Hermitian `O_a`.
    pub fn sum_of_squares(&self, groups: &[Vec<(OneBody<T>, usize)>]) -> T {
        let mut total = T::zero();
        for group in groups {
            let mut v = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
            for (m, off) in group {
                self.accumulate_one_body(m, *off, &mut v);
            }
            total += v.iter().map(|x| x.norm_sqr()).sum::<T>();
        }
        total
    }

    /// `<psi|O|psi>` for a Hermitian Pauli sum.
    pub fn expectation_pauli(&self, op: &PauliSum<T>) -> Result<T> {
        if op.n_qubits() != self.n_qubits() {
            return Err(Error::QubitMismatch(op.n_qubits(), self.n_qubits()));
        }
        if !op.is_hermitian() {
            return Err(Error::NotHermitian(op.max_imag().f64()));
        }
        let mut total = Complex::new(T::zero(), T::zero());
        for (w, c) in op.iter() {
            let y = (w.x & w.z).count_ones();
            let mut acc = Complex::new(T::zero(), T::zero());
            for (i, a) in self.amps.iter().enumerate() {
                let m = self.layout.mask(i);
                if let Some(j) = self.layout.index_of(m ^ w.x) {
                    let sign: T = parity_sign(w.z & m);
                    acc = acc + self.amps[j].conj() * a * sign;
                }
            }
            total = total + *c * crate::pauli::i_pow::<T>(y) * acc;
        }
        Ok(total.re)
    }

    pub fn expectation_diagonal(&self, obs: &DiagonalObservable<T>) -> T {
        self.amps.iter().enumerate().map(|(i, a)| a.norm_sqr() * obs.eigenvalue(self.layout.mask(i))).sum()
    }

    /// Expected particle number of each species block.
    pub fn particle_numbers(&self) -> Vec<T> {
        self.layout
            .ranges
            .iter()
            .map(|&(o, l)| {
                let field = ((1u64 << l) - 1) << o;
                self.amps.iter().enumerate().map(|(i, a)| a.norm_sqr() * T::of_usize((self.layout.mask(i) & field).count_ones() as usize)).sum()
            })
            .collect()
    }

    /// Re-expresses the state on the other backend.
    pub fn convert(&self, backend: Backend) -> Result<Self> {
        match (self.backend(), backend) {
            (a, b) if a == b => Ok(self.clone()),
            (Backend::Sector, Backend::Full) => {
                let layout = Arc::new(Layout::full_from_ranges(self.layout.ranges.clone())?);
                let mut amps = vec![Complex::new(T::zero(), T::zero()); layout.dim()];
                for (i, a) in self.amps.iter().enumerate() {
                    amps[self.layout.mask(i) as usize] = *a;
                }
                Ok(QuantumState { layout, amps })
            }
            _ => {
                let counts = self.dominant_counts();
                let sector = Sector::new(&self.layout.ranges, &counts, MAX_SECTOR_DIM)?;
                let layout = Arc::new(Layout { n: self.layout.n, ranges: self.layout.ranges.clone(), kind: Kind::Sector(sector) });
                let mut amps = vec![Complex::new(T::zero(), T::zero()); layout.dim()];
                let mut leak = T::zero();
                for (i, a) in self.amps.iter().enumerate() {
                    match layout.index_of(i as u64) {
                        Some(j) => amps[j] = *a,
                        None => leak += a.norm_sqr(),
                    }
                }
                if leak > T::structural() {
                    return Err(Error::SectorLeakage(leak.f64()));
                }
                Ok(QuantumState { layout, amps })
            }
        }
    }

    fn dominant_counts(&self) -> Vec<usize> {
        let (best, _) = self.amps.iter().enumerate().fold((0, T::zero()), |(bi, bv), (i, a)| if a.norm_sqr() > bv { (i, a.norm_sqr()) } else { (bi, bv) });
        let m = self.layout.mask(best);
        self.layout.ranges.iter().map(|&(o, l)| ((m >> o) & ((1u64 << l) - 1)).count_ones() as usize).collect()
    }

    /// Debug listing `bitstring re im` of amplitudes above `1e-10`.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        let n = self.n_qubits();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > T::of(1e-10) {
                let m = self.layout.mask(i);
                let bits: String = (0..n).rev().map(|q| if m >> q & 1 == 1 { '1' } else { '0' }).collect();
                let _ = writeln!(out, "{bits} {:e} {:e}", a.re, a.im);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests;
