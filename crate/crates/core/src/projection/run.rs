//! The alternating `J_z` / `J_x` filter protocol.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{exact_projector_oracle, ProjectionRecord, ProjectionSchedule, RecordRow, Target};
use crate::cartan::{deformed_jz_ansatz, jx_block_ansatz, CartanAnsatz, DecomposeOptions};
use crate::error::{Error, Result};
use crate::pauli::{angular_momentum_matrix, Axis, OneBody};
use crate::scalar::Real;
use crate::simulator::{Backend, DiagonalObservable, QuantumState};
use crate::spmodel::{DeformedBasis, ModelSpace, Species};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasurementMode {
    Postselect,
    Sample { seed: u64 },
}

/// Everything a run needs besides the schedule: the trial, its frame
/// rotation per species and the `J_x` rotation of every shell.
#[derive(Clone, Debug)]
pub struct ProjectionSetup<T> {
    pub space: ModelSpace,
    pub basis: DeformedBasis<T>,
    /// One ansatz per species block, `K J_z K^dag = J~_z`.
    pub jz_ansatz: Vec<CartanAnsatz<T>>,
    /// One ansatz per shell, positioned at the shell's qubits.
    pub jx_ansatz: Vec<CartanAnsatz<T>>,
    pub backend: Backend,
    pub mode: MeasurementMode,
    /// Skip the dense `(J, M)` oracle on the initial and final states.
    pub oracle: bool,
}

impl<T: Real> ProjectionSetup<T> {
    /// Fits every ansatz the protocol uses.
    pub fn new(space: &ModelSpace, basis: &DeformedBasis<T>, opts: &DecomposeOptions) -> Result<Self> {
        basis.check_against(space)?;
        let jz_ansatz =
            space.blocks().iter().map(|b| deformed_jz_ansatz(space, basis, b.species, opts)).collect::<Result<Vec<_>>>()?;
        let mut cache: BTreeMap<u32, CartanAnsatz<T>> = BTreeMap::new();
        let mut jx_ansatz = Vec::new();
        for shell in space.shells() {
            if !cache.contains_key(&shell.two_j) {
                cache.insert(shell.two_j, jx_block_ansatz(shell.j(), opts)?);
            }
            let mut a = cache[&shell.two_j].clone();
            a.offset = shell.offset;
            jx_ansatz.push(a);
        }
        Ok(ProjectionSetup {
            space: space.clone(),
            basis: basis.clone(),
            jz_ansatz,
            jx_ansatz,
            backend: Backend::Sector,
            mode: MeasurementMode::Postselect,
            oracle: false,
        })
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_mode(mut self, mode: MeasurementMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_oracle(mut self, oracle: bool) -> Self {
        self.oracle = oracle;
        self
    }

    /// The deformed Slater determinant in the register.
    pub fn trial(&self) -> Result<QuantumState<T>> {
        QuantumState::slater(&self.space, &self.basis.global_occupations(&self.space)?, self.backend)
    }

    /// The trial expressed in the spherical register.
    pub fn spherical_trial(&self) -> Result<QuantumState<T>> {
        let mut st = self.trial()?;
        for a in &self.jz_ansatz {
            st.apply_cartan(a, true)?;
        }
        Ok(st)
    }
}

/// Tracks the single-particle frame of each species so that observables
/// can be evaluated in whatever basis the register currently holds.
///
/// With `F` the frame of a species, register operators are `F^T O F`.
struct Frames<T> {
    space: ModelSpace,
    frames: Vec<Array2<T>>,
    spherical: Vec<[OneBody<T>; 3]>,
}

impl<T: Real> Frames<T> {
    fn new(space: &ModelSpace, basis: &DeformedBasis<T>) -> Result<Self> {
        let mut frames = Vec::new();
        let mut spherical = Vec::new();
        for b in space.blocks() {
            frames.push(basis.species(b.species)?.matrix.clone());
            spherical.push([
                angular_momentum_matrix(space, Axis::X, b.species)?,
                angular_momentum_matrix(space, Axis::Y, b.species)?,
                angular_momentum_matrix(space, Axis::Z, b.species)?,
            ]);
        }
        Ok(Frames { space: space.clone(), frames, spherical })
    }

    fn block_index(&self, offset: usize) -> usize {
        self.space.blocks().iter().position(|b| offset >= b.offset && offset < b.offset + b.len).expect("ansatz inside a block")
    }

    /// Register update `psi <- K psi` (or `K^dag psi`).
    fn apply(&mut self, ansatz: &CartanAnsatz<T>, dagger: bool) {
        let b = self.block_index(ansatz.offset);
        let local = ansatz.offset - self.space.blocks()[b].offset;
        let n = self.frames[b].nrows();
        let k = ansatz.one_body();
        let mut full = Array2::<T>::eye(n);
        for p in 0..ansatz.n {
            for q in 0..ansatz.n {
                full[[local + p, local + q]] = k[[p, q]];
            }
        }
        // V psi with one-body v maps F to F v^T; K^dag has v = k^T
        let right = if dagger { full } else { full.t().to_owned() };
        self.frames[b] = self.frames[b].dot(&right);
    }

    fn current(&self, b: usize, axis: usize) -> OneBody<T> {
        let f = self.frames[b].mapv(|v| Complex::new(v, T::zero()));
        f.t().dot(&self.spherical[b][axis]).dot(&f)
    }

    fn j_squared(&self, st: &QuantumState<T>) -> T {
        let groups: Vec<Vec<(OneBody<T>, usize)>> = (0..3)
            .map(|axis| self.space.blocks().iter().enumerate().map(|(b, blk)| (self.current(b, axis), blk.offset)).collect())
            .collect();
        st.sum_of_squares(&groups)
    }

    fn jz(&self, st: &QuantumState<T>) -> T {
        self.space.blocks().iter().enumerate().map(|(b, blk)| st.expectation_one_body(&self.current(b, 2), blk.offset)).sum()
    }
}

fn check_parity(target: Target, total: usize) -> Result<()> {
    match target {
        Target::J0 if total % 2 == 1 => Err(Error::Parity(format!("J = 0 needs an even particle number, got {total}"))),
        Target::Jhalf { .. } if total % 2 == 0 => {
            Err(Error::Parity(format!("J = 1/2 needs an odd particle number, got {total}")))
        }
        _ => Ok(()),
    }
}

struct Runner<T> {
    state: QuantumState<T>,
    frames: Frames<T>,
    rows: Vec<RecordRow>,
    cumulative: f64,
    rng: Option<ChaCha8Rng>,
    failed_at: Option<usize>,
}

impl<T: Real> Runner<T> {
    fn rotate(&mut self, ansatz: &CartanAnsatz<T>, dagger: bool) -> Result<()> {
        self.state.apply_cartan(ansatz, dagger)?;
        self.frames.apply(ansatz, dagger);
        Ok(())
    }

    fn filter(&mut self, obs: &DiagonalObservable<T>, axis: Axis, iteration: usize, t: f64, delta: f64) -> Result<bool> {
        let out = self.state.filter_measure(obs, T::of(t), T::of(delta), self.rng.as_mut())?;
        self.cumulative *= out.probability;
        let measurement = self.rows.len() + 1;
        let j2 = self.frames.j_squared(&self.state).f64();
        let jz = self.frames.jz(&self.state).f64();
        self.rows.push(RecordRow {
            measurement,
            iteration,
            axis,
            t,
            delta,
            probability: out.probability,
            cumulative_probability: self.cumulative,
            j2,
            jz,
        });
        if out.outcome != 0 {
            self.failed_at = Some(measurement);
            return Ok(false);
        }
        Ok(true)
    }
}

/// Runs the protocol for the schedule's target.
///
/// The register starts in the deformed frame, is rotated into the
/// spherical frame, and then alternates `N_proj/2` filters on `J_z` with
/// `N_proj/2` filters on `J_x` for `N_iter` iterations. A `J = 1/2` run
/// closes with a phased `J_z` filter selecting `M = sign/2`. The final
/// state is spherical unless `return_deformed`.
pub fn run_projection<T: Real>(
    setup: &ProjectionSetup<T>,
    schedule: &ProjectionSchedule,
    return_deformed: bool,
) -> Result<ProjectionRecord<QuantumState<T>>> {
    schedule.validate()?;
    let total: usize = setup.basis.particle_numbers().iter().sum();
    check_parity(schedule.target, total)?;
    for a in &setup.jz_ansatz {
        if a.residual > T::RESIDUAL_TOL {
            return Err(Error::ResidualTooLarge(a.residual));
        }
    }
    let space = &setup.space;
    let mut runner = Runner {
        state: setup.trial()?,
        frames: Frames::new(space, &setup.basis)?,
        rows: Vec::new(),
        cumulative: 1.0,
        rng: match setup.mode {
            MeasurementMode::Postselect => None,
            MeasurementMode::Sample { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        },
        failed_at: None,
    };
    let initial_j2 = runner.frames.j_squared(&runner.state).f64();
    let initial_jz = runner.frames.jz(&runner.state).f64();

    for a in &setup.jz_ansatz {
        runner.rotate(a, true)?;
    }
    let initial_weights = if setup.oracle { Some(exact_projector_oracle(&runner.state, space)?) } else { None };

    let jz_obs = DiagonalObservable::<T>::jz(space);
    let mut jx_weights = vec![T::zero(); space.n_modes()];
    for a in &setup.jx_ansatz {
        let shell = space.shells().iter().find(|s| s.offset == a.offset).expect("shell ansatz");
        for (i, &r) in a.relabeling.iter().enumerate() {
            jx_weights[a.offset + i] = T::of(-shell.j() + r as f64);
        }
    }
    let jx_obs = DiagonalObservable::new(jx_weights);

    'outer: for iteration in 1..=schedule.n_iter {
        for (&t, &d) in schedule.times.iter().zip(&schedule.phases) {
            if !runner.filter(&jz_obs, Axis::Z, iteration, t, d)? {
                break 'outer;
            }
        }
        for a in &setup.jx_ansatz {
            runner.rotate(a, true)?;
        }
        for (&t, &d) in schedule.times.iter().zip(&schedule.phases) {
            if !runner.filter(&jx_obs, Axis::X, iteration, t, d)? {
                break 'outer;
            }
        }
        for a in &setup.jx_ansatz {
            runner.rotate(a, false)?;
        }
    }
    if let (Target::Jhalf { sign }, None) = (schedule.target, runner.failed_at) {
        runner.filter(&jz_obs, Axis::Z, schedule.n_iter + 1, FRAC_PI_2, -(sign as f64) * FRAC_PI_4)?;
    }
    let final_weights =
        if setup.oracle && runner.failed_at.is_none() { Some(exact_projector_oracle(&runner.state, space)?) } else { None };
    if return_deformed {
        for a in &setup.jz_ansatz {
            runner.rotate(a, false)?;
        }
    }
    Ok(ProjectionRecord {
        rows: runner.rows,
        initial_j2,
        initial_jz,
        initial_weights,
        final_weights,
        failed_at: runner.failed_at,
        final_state: runner.state,
    })
}

/// `J = 0` projection.
pub fn run_j0<T: Real>(
    setup: &ProjectionSetup<T>,
    schedule: &ProjectionSchedule,
    return_deformed: bool,
) -> Result<ProjectionRecord<QuantumState<T>>> {
    if schedule.target != Target::J0 {
        return Err(Error::Schedule("run_j0 needs a J0 schedule".into()));
    }
    run_projection(setup, schedule, return_deformed)
}

/// `J = 1/2` projection ending in `M = sign/2`.
pub fn run_jhalf<T: Real>(
    setup: &ProjectionSetup<T>,
    n_proj: usize,
    n_iter: usize,
    sign: i8,
) -> Result<ProjectionRecord<QuantumState<T>>> {
    run_projection(setup, &ProjectionSchedule::jhalf(n_proj, n_iter, sign)?, false)
}

/// Occupies the lowest deformed modes of each species.
pub fn lowest_occupation<T: Real>(mut basis: DeformedBasis<T>, counts: &[(Species, usize)]) -> Result<DeformedBasis<T>> {
    for &(s, c) in counts {
        basis.occupy_lowest(s, c)?;
    }
    Ok(basis)
}
