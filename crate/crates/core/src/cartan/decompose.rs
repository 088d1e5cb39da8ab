//! KHK decompositions `H = K h K^dag` of one-body block operators.

use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bfgs, mirror_map, CartanAnsatz, Cost, CostProbe, InvolutionAlgebra};
use crate::error::{Error, Result};
use crate::pauli::{angular_momentum_matrix, encode_one_body, Axis, PauliSum};
use crate::scalar::Real;
use crate::spmodel::{build_space, DeformedBasis, ModelSpace, ShellSpec, Species};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposeOptions {
    pub seed: u64,
    /// Optimizer runs attempted before giving up.
    pub restarts: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub residual_tol: f64,
    /// Tie `theta_{i,l}` to `theta_{i,n-1+i-l}`.
    pub mirror: bool,
}

impl DecomposeOptions {
    pub fn new<T: Real>(seed: u64) -> Self {
        DecomposeOptions {
            seed,
            restarts: 8,
            max_iter: 5000,
            grad_tol: T::GRADIENT_TOL,
            residual_tol: T::RESIDUAL_TOL,
            mirror: false,
        }
    }

    pub fn mirrored(mut self) -> Self {
        self.mirror = true;
        self
    }
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

/// Runs restarts until `accept` approves an ansatz whose residual meets
/// the tolerance.
fn search<T: Real>(
    alg: &InvolutionAlgebra,
    target: Vec<T>,
    offset: usize,
    opts: &DecomposeOptions,
    accept: &mut dyn FnMut(&mut CartanAnsatz<T>) -> bool,
) -> Result<CartanAnsatz<T>> {
    let n = alg.n();
    let scale = norm(&target);
    if scale == T::zero() || n < 2 {
        let mut a = CartanAnsatz::identity(n, offset);
        a.h = target[..n].to_vec();
        a.seed = opts.seed;
        if accept(&mut a) {
            return Ok(a);
        }
        return Err(Error::NoConvergence { best: 0.0, attempts: 1 });
    }
    let probe = CostProbe::<T>::new(n);
    let tied = opts.mirror.then(|| mirror_map(n));
    let cost = Cost::new(alg, target, &probe.gamma, tied);
    let bopts = bfgs::BfgsOptions { max_iter: opts.max_iter, grad_tol: opts.grad_tol };
    let mut best = f64::INFINITY;
    for attempt in 0..opts.restarts.max(1) {
        let seed = opts.seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0: Vec<T> = (0..cost.n_params()).map(|_| T::of(rng.gen_range(0.0..std::f64::consts::PI))).collect();
        let coarse = bfgs::minimize(|x| cost.value_and_gradient(x), x0, bopts);
        // a short second pass drives the gradient towards rounding level
        let fine = bfgs::BfgsOptions { max_iter: 200, grad_tol: opts.grad_tol * 1e-4 };
        let result = bfgs::minimize(|x| cost.value_and_gradient(x), coarse.x, fine);
        let b = cost.pulled_back_target(&result.x);
        let residual = (norm(&b[n..]) / scale).f64();
        best = best.min(residual);
        if residual > opts.residual_tol {
            continue;
        }
        let mut a = CartanAnsatz {
            n,
            offset,
            angles: cost.expand(&result.x),
            h: b[..n].to_vec(),
            relabeling: (0..n).collect(),
            residual,
            seed,
            sign_flips: Vec::new(),
        };
        if accept(&mut a) {
            return Ok(a);
        }
    }
    Err(Error::NoConvergence { best, attempts: opts.restarts.max(1) })
}

/// Matches sorted `h` to sorted `target`; `relabeling[i]` indexes `target`.
pub fn relabel<T: Real>(h: &[T], target: &[T]) -> Result<Vec<usize>> {
    let sorted = |v: &[T]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite weights"));
        idx
    };
    let (hs, ts) = (sorted(h), sorted(target));
    let mut out = vec![0; h.len()];
    let mut worst = 0.0f64;
    for (&a, &b) in hs.iter().zip(&ts) {
        out[a] = b;
        worst = worst.max((h[a] - target[b]).abs().f64());
    }
    if worst > T::ALGEBRAIC.sqrt() {
        return Err(Error::SpectrumMismatch(worst));
    }
    Ok(out)
}

/// Decomposes the block `offset..offset+n` of a Pauli sum in `m`.
///
/// When `target` holds the expected `Z` weights, the relabeling records
/// which target weight landed on each qubit.
pub fn decompose<T: Real>(
    op: &PauliSum<T>,
    offset: usize,
    n: usize,
    target: Option<&[T]>,
    opts: &DecomposeOptions,
) -> Result<CartanAnsatz<T>> {
    let alg = InvolutionAlgebra::new(n);
    let v = alg.m_vector(op, offset)?;
    let mut failure = None;
    let result = search(&alg, v, offset, opts, &mut |a| match target {
        None => true,
        Some(t) => match relabel(&a.h, t) {
            Ok(r) => {
                a.relabeling = r;
                true
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        },
    });
    match (result, failure) {
        (Err(Error::NoConvergence { best, .. }), Some(e)) if best <= opts.residual_tol => Err(e),
        (r, _) => r,
    }
}

/// Real symmetric one-body matrix as a complex one.
fn complexify<T: Real>(m: &Array2<T>) -> Result<Array2<Complex<T>>> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::Shape { rows: r, cols: c, expected: r });
    }
    Ok(m.mapv(|v| Complex::new(v, T::zero())))
}

/// Decomposes a real symmetric matrix; the ansatz acts at qubit `offset`.
pub fn decompose_matrix<T: Real>(
    matrix: &Array2<T>,
    offset: usize,
    target: Option<&[T]>,
    opts: &DecomposeOptions,
) -> Result<CartanAnsatz<T>> {
    let n = matrix.nrows();
    let op = encode_one_body(&complexify(matrix)?, 0, n)?;
    let mut a = decompose(&op, 0, n, target, opts)?;
    a.offset = offset;
    Ok(a)
}

/// `||Ad_K(h) - H|| / ||H||` over Pauli coefficients, identity excluded.
pub fn verify<T: Real>(ansatz: &CartanAnsatz<T>, op: &PauliSum<T>) -> Result<f64> {
    let alg = InvolutionAlgebra::new(ansatz.n);
    let target = alg.m_vector(op, ansatz.offset)?;
    let mut v = vec![T::zero(); alg.dim()];
    v[..ansatz.n].copy_from_slice(&ansatz.h);
    ansatz.conjugate(&alg, &mut v);
    let diff: Vec<T> = v.iter().zip(&target).map(|(a, b)| *a - *b).collect();
    let scale = norm(&target);
    if scale == T::zero() {
        return Ok(norm(&diff).f64());
    }
    Ok((norm(&diff) / scale).f64())
}

/// `Z` coefficients `-m/2` of `J_z` on a block with the given `m` values.
pub fn jz_weights<T: Real>(m: impl IntoIterator<Item = f64>) -> Vec<T> {
    m.into_iter().map(|m| T::of(-m / 2.0)).collect()
}

/// `K` with `J_x = K J_z K^dag` on one `j` shell, mirror symmetry enforced.
pub fn jx_block_ansatz<T: Real>(j: f64, opts: &DecomposeOptions) -> Result<CartanAnsatz<T>> {
    let space = build_space(&[ShellSpec { species: Species::Neutron, j }])?;
    let jx = angular_momentum_matrix::<T>(&space, Axis::X, Species::Neutron)?;
    let n = space.n_modes();
    let op = encode_one_body(&jx, 0, n)?;
    let target = jz_weights::<T>(space.modes().iter().map(|m| m.m()));
    match decompose(&op, 0, n, Some(&target), &opts.mirrored()) {
        Err(Error::NoConvergence { .. }) => decompose(&op, 0, n, Some(&target), opts),
        other => other,
    }
}

/// Non-degenerate diagonal ordering label of each mode of a species block:
/// `m + (2 j_max + 1) * rank(shell)`.
fn labels(space: &ModelSpace, species: Species) -> Result<Vec<f64>> {
    let block = space.block(species)?;
    let spread = space.max_two_j(species)? as f64 + 1.0;
    let mut out = Vec::with_capacity(block.len);
    for (rank, &s) in block.shells.iter().enumerate() {
        let shell = space.shells()[s];
        for k in 0..shell.len() {
            out.push(-shell.j() + k as f64 + spread * rank as f64);
        }
    }
    Ok(out)
}

/// `K` taking the spherical register to the deformed one: `K J_z K^dag =
/// U^T J_z U`, and `K^dag` maps the deformed Slater determinant onto its
/// spherical expansion with every mode keeping its `(j, m)` label.
///
/// The network is fitted to a non-degenerate labeling operator so that
/// modes of different shells with equal `m` cannot mix; the remaining
/// signs are absorbed into `Z` gates.
pub fn deformed_jz_ansatz<T: Real>(
    space: &ModelSpace,
    basis: &DeformedBasis<T>,
    species: Species,
    opts: &DecomposeOptions,
) -> Result<CartanAnsatz<T>> {
    let block = space.block(species)?;
    let def = basis.species(species)?;
    let n = block.len;
    let u = &def.matrix;
    if u.dim() != (n, n) {
        return Err(Error::Shape { rows: u.nrows(), cols: u.ncols(), expected: n });
    }
    let canonical = jz_weights::<T>(space.modes()[block.range()].iter().map(|m| m.m()));
    let jz = angular_momentum_matrix::<T>(space, Axis::Z, species)?.mapv(|c| c.re);
    let jz_def = u.t().dot(&jz).dot(u);
    let jz_op = encode_one_body(&complexify(&jz_def)?, block.offset, space.n_modes())?;
    if def.is_identity() {
        let mut a = CartanAnsatz::identity(n, block.offset);
        a.h = canonical;
        a.seed = opts.seed;
        return Ok(a);
    }
    let lab = labels(space, species)?;
    let l = Array2::from_diag(&ndarray::Array1::from_iter(lab.iter().map(|&v| T::of(v))));
    let l_def = u.t().dot(&l).dot(u);
    let alg = InvolutionAlgebra::new(n);
    let op = encode_one_body(&complexify(&l_def)?, 0, n)?;
    let target = alg.m_vector(&op, 0)?;
    let tol = T::of(T::ALGEBRAIC.sqrt());
    let mut a = search(&alg, target, block.offset, opts, &mut |a| {
        let m = u.dot(&a.one_body());
        let diagonal = (0..n).all(|p| (0..n).all(|q| p == q || m[[p, q]].abs() <= tol));
        if !diagonal {
            return false;
        }
        a.sign_flips = (0..n).filter(|&q| m[[q, q]] < T::zero()).collect();
        true
    })?;
    a.h = canonical;
    a.relabeling = (0..n).collect();
    a.residual = verify(&a, &jz_op)?;
    Ok(a)
}
