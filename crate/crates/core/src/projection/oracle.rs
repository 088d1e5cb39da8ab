//! Brute-force `(J, M)` decomposition by dense diagonalization of `J^2`
//! inside each `(particle numbers, M)` block.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::Weight;
use crate::error::{Error, Result};
use crate::pauli::{angular_momentum_matrix, Axis};
use crate::scalar::Real;
use crate::simulator::QuantumState;
use crate::spmodel::ModelSpace;

/// Largest basis the oracle will diagonalize blockwise.
pub const ORACLE_LIMIT: usize = 20_000;

/// Raising operator `J+` elements per ordered mode pair `(to, from)`.
fn raising(space: &ModelSpace) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for b in space.blocks() {
        let jx = angular_momentum_matrix::<f64>(space, Axis::X, b.species)?;
        let jy = angular_momentum_matrix::<f64>(space, Axis::Y, b.species)?;
        for p in 0..b.len {
            for q in 0..b.len {
                // J+ = Jx + i Jy
                let v = jx[[p, q]].re - jy[[p, q]].im;
                if v.abs() > 1e-14 {
                    out.push((b.offset + p, b.offset + q, v));
                }
            }
        }
    }
    Ok(out)
}

fn between(a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi <= lo + 1 {
        0
    } else {
        ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1)
    }
}

/// Squared overlaps of `state` (in the spherical register) with the
/// simultaneous eigenstates of `J^2` and `J_z`, keyed by `(J, M)`.
pub fn exact_projector_oracle<T: Real>(state: &QuantumState<T>, space: &ModelSpace) -> Result<Vec<Weight>> {
    let two_m: Vec<i64> = space.modes().iter().map(|m| m.two_m as i64).collect();
    let ranges: Vec<u64> = space.blocks().iter().map(|b| ((1u64 << b.len) - 1) << b.offset).collect();
    // group basis states by (particle numbers, 2M)
    let mut groups: BTreeMap<(Vec<u32>, i64), Vec<usize>> = BTreeMap::new();
    for i in 0..state.dim() {
        let mask = state.mask(i);
        let counts: Vec<u32> = ranges.iter().map(|r| (mask & r).count_ones()).collect();
        let mut m2 = 0;
        let mut bits = mask;
        while bits != 0 {
            m2 += two_m[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        groups.entry((counts, m2)).or_default().push(i);
    }
    let amps: Vec<(f64, f64)> = state.amplitudes().iter().map(|a| (a.re.f64(), a.im.f64())).collect();
    let total: f64 = amps.iter().map(|(r, i)| r * r + i * i).sum();
    // only particle-number sectors carrying weight are diagonalized
    let mut sectors: BTreeMap<&Vec<u32>, (usize, f64)> = BTreeMap::new();
    for ((counts, _), members) in &groups {
        let e = sectors.entry(counts).or_insert((0, 0.0));
        e.0 += members.len();
        e.1 += members.iter().map(|&i| amps[i].0.powi(2) + amps[i].1.powi(2)).sum::<f64>();
    }
    if let Some(&(dim, _)) = sectors.values().filter(|(_, w)| *w > 1e-30).max_by_key(|(d, _)| *d) {
        if dim > ORACLE_LIMIT {
            return Err(Error::SectorTooLarge(dim, ORACLE_LIMIT));
        }
    }
    let jplus = raising(space)?;
    let mut acc: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for ((counts, m2), members) in &groups {
        let weight_here: f64 = members.iter().map(|&i| amps[i].0.powi(2) + amps[i].1.powi(2)).sum();
        if weight_here <= 1e-30 {
            continue;
        }
        let upper = groups.get(&(counts.clone(), m2 + 2));
        let dim = members.len();
        let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let m = *m2 as f64 / 2.0;
        let mut j2 = DMatrix::<f64>::identity(dim, dim) * (m * m + m);
        if let Some(up) = upper {
            let up_local: BTreeMap<u64, usize> = up.iter().enumerate().map(|(k, &i)| (state.mask(i), k)).collect();
            let mut jp = DMatrix::<f64>::zeros(up.len(), dim);
            for (&i, &col) in &local {
                let mask = state.mask(i);
                for &(p, q, v) in &jplus {
                    if mask >> q & 1 == 0 {
                        continue;
                    }
                    let removed = mask & !(1u64 << q);
                    if removed >> p & 1 == 1 {
                        continue;
                    }
                    let target = removed | 1u64 << p;
                    if let Some(&row) = up_local.get(&target) {
                        let sign = if (removed & between(p, q)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        jp[(row, col)] += sign * v;
                    }
                }
            }
            j2 += jp.transpose() * &jp;
        }
        let eig = SymmetricEigen::new(j2);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let (mut re, mut im) = (0.0, 0.0);
            for (&i, &row) in &local {
                re += v[row] * amps[i].0;
                im += v[row] * amps[i].1;
            }
            let w = (re * re + im * im) / total;
            let jj = (-1.0 + (1.0 + 4.0 * lambda.max(0.0)).sqrt()) / 2.0;
            let two_j = (2.0 * jj).round() as i64;
            if (2.0 * jj - two_j as f64).abs() > 1e-6 {
                return Err(Error::SpectrumMismatch(jj));
            }
            *acc.entry((two_j, *m2)).or_insert(0.0) += w;
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, w)| *w > 1e-15)
        .map(|((tj, tm), w)| Weight { j: tj as f64 / 2.0, m: tm as f64 / 2.0, weight: w })
        .collect())
}
