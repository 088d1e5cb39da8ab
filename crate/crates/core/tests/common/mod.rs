#![allow(dead_code)]

use jfilter::cartan::{decompose, jz_weights, verify, CartanAnsatz, Cost, CostProbe, DecomposeOptions, InvolutionAlgebra};
use jfilter::pauli::{deformed_one_body, encode_one_body, Axis, PauliSum};
use jfilter::projection::{lowest_occupation, run_j0, weight_at, ProjectionSchedule, ProjectionSetup};
use jfilter::spmodel::{build_space, generate_deformation, ModelSpace, ShellSpec, Species};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PARTITIONS: [(usize, usize); 3] = [(4, 10), (6, 6), (8, 5)];

/// Single-species space with `n` modes: one shell for n <= 8, the sd
/// shell for n = 12.
pub fn block_space(n: usize) -> ModelSpace {
    let js: Vec<f64> = match n {
        12 => vec![0.5, 1.5, 2.5],
        _ => vec![(n as f64 - 1.0) / 2.0],
    };
    build_space(&js.iter().map(|&j| ShellSpec { species: Species::Neutron, j }).collect::<Vec<_>>()).unwrap()
}

pub fn sd_pn() -> ModelSpace {
    ModelSpace::sd_shell(&[Species::Proton, Species::Neutron])
}

/// `U^T J_z U` on an `n`-mode block for a seeded dense deformation.
pub fn deformed_jz(n: usize, seed: u64) -> (ModelSpace, PauliSum<f64>) {
    let space = block_space(n);
    let basis = generate_deformation::<f64>(&space, seed, 1.0);
    let m = deformed_one_body(&space, Some(&basis), Axis::Z, Species::Neutron).unwrap();
    let op = encode_one_body(&m, 0, n).unwrap();
    (space, op)
}

/// Relative residual of the decomposition of a deformed `J_z`.
pub fn khk_residual(n: usize, seed: u64) -> Result<(CartanAnsatz<f64>, f64), String> {
    let (space, op) = deformed_jz(n, seed);
    let target = jz_weights::<f64>(space.modes().iter().map(|m| m.m()));
    let a = decompose(&op, 0, n, Some(&target), &DecomposeOptions::new::<f64>(seed)).map_err(|e| e.to_string())?;
    let r = verify(&a, &op).map_err(|e| e.to_string())?;
    Ok((a, r))
}

/// Worst componentwise relative deviation of the analytic gradient from
/// central differences with step 1e-6, for a random symmetric `H` and
/// random angles.
pub fn gradient_deviation(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0));
    let h = (&h + &h.t()).mapv(|x: f64| num_complex::Complex::new(x, 0.0));
    let alg = InvolutionAlgebra::new(n);
    let target = alg.m_vector(&encode_one_body(&h, 0, n).unwrap(), 0).unwrap();
    let probe = CostProbe::<f64>::new(n);
    let cost = Cost::new(&alg, target, &probe.gamma, None);
    let theta: Vec<f64> = (0..cost.n_params()).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
    let (_, grad) = cost.value_and_gradient(&theta);
    let step = 1e-6;
    let mut worst = 0.0f64;
    for k in 0..theta.len() {
        let (mut up, mut down) = (theta.clone(), theta.clone());
        up[k] += step;
        down[k] -= step;
        let fd = (cost.value(&up) - cost.value(&down)) / (2.0 * step);
        worst = worst.max((grad[k] - fd).abs() / grad[k].abs().max(f64::MIN_POSITIVE));
    }
    worst
}

/// Outcome of one convergence run on the 2p-2n sd trial.
#[derive(Clone, Debug)]
pub struct ConvergenceRun {
    pub seed: u64,
    pub partition: (usize, usize),
    pub initial_j2: f64,
    pub final_j2: f64,
    pub measurements: usize,
    pub cumulative: f64,
    pub initial_w00: f64,
    pub final_w00: f64,
    pub product_error: f64,
}

pub fn sd_trial_setup(seed: u64, strength: f64) -> ProjectionSetup<f64> {
    let space = sd_pn();
    let basis = generate_deformation::<f64>(&space, seed, strength);
    let basis = lowest_occupation(basis, &[(Species::Proton, 2), (Species::Neutron, 2)]).unwrap();
    ProjectionSetup::new(&space, &basis, &DecomposeOptions::new::<f64>(seed)).unwrap().with_oracle(true)
}

pub fn convergence_runs(seed: u64, strength: f64) -> Vec<ConvergenceRun> {
    let setup = sd_trial_setup(seed, strength);
    PARTITIONS
        .iter()
        .map(|&(p, i)| {
            let schedule = ProjectionSchedule::j0(p, i).unwrap();
            let rec = run_j0(&setup, &schedule, false).unwrap();
            let initial_w00 = weight_at(rec.initial_weights.as_ref().unwrap(), 0.0, 0.0);
            let final_w00 = weight_at(rec.final_weights.as_ref().unwrap(), 0.0, 0.0);
            let product: f64 = rec.rows.iter().map(|r| r.probability).product();
            ConvergenceRun {
                seed,
                partition: (p, i),
                initial_j2: rec.initial_j2,
                final_j2: rec.final_j2(),
                measurements: rec.rows.len(),
                cumulative: rec.cumulative_probability(),
                initial_w00,
                final_w00,
                product_error: (product - rec.cumulative_probability()).abs(),
            }
        })
        .collect()
}
