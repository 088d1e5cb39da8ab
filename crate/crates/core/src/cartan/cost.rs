//! Cost `f(theta) = <Ad_{K(theta)}(v), H>` and its gradient, evaluated on
//! coefficient vectors of the block algebra.
//!
//! The gradient uses one forward and one backward sweep over the gates:
//! with `A_k` the probe after gate `k` and `B_k` the target pulled back
//! through the gates after `k`, `df/dtheta_k = <i[P_k, A_k], B_k>`.

use super::InvolutionAlgebra;
use crate::scalar::Real;

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Cost over possibly tied parameters: gate `g` uses `params[map[g]]`.
#[derive(Clone, Debug)]
pub struct Cost<'a, T> {
    alg: &'a InvolutionAlgebra,
    gates: Vec<usize>,
    map: Vec<usize>,
    n_params: usize,
    probe: Vec<T>,
    target: Vec<T>,
}

impl<'a, T: Real> Cost<'a, T> {
    /// `target` is the coefficient vector of `H`; `gamma` the probe weights.
    pub fn new(alg: &'a InvolutionAlgebra, target: Vec<T>, gamma: &[T], tied: Option<(Vec<usize>, usize)>) -> Self {
        let n = alg.n();
        let gates: Vec<usize> = super::gate_order(n).into_iter().map(|(i, _)| i - 1).collect();
        let (map, n_params) = tied.unwrap_or_else(|| ((0..gates.len()).collect(), gates.len()));
        let mut probe = vec![T::zero(); alg.dim()];
        probe[..n].copy_from_slice(&gamma[..n]);
        Cost { alg, gates, map, n_params, probe, target }
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// Per-gate angles from free parameters.
    pub fn expand(&self, params: &[T]) -> Vec<T> {
        self.map.iter().map(|&k| params[k]).collect()
    }

    pub fn value(&self, params: &[T]) -> T {
        let mut a = self.probe.clone();
        for (&q, &k) in self.gates.iter().zip(&self.map) {
            self.alg.conjugate_givens(&mut a, q, params[k]);
        }
        dot(&a, &self.target)
    }

    pub fn value_and_gradient(&self, params: &[T]) -> (T, Vec<T>) {
        let mut a = self.probe.clone();
        for (&q, &k) in self.gates.iter().zip(&self.map) {
            self.alg.conjugate_givens(&mut a, q, params[k]);
        }
        let value = dot(&a, &self.target);
        let mut b = self.target.clone();
        let mut grad = vec![T::zero(); self.n_params];
        for (&q, &k) in self.gates.iter().zip(&self.map).rev() {
            grad[k] += self.alg.commutator_overlap(&a, &b, q);
            self.alg.conjugate_givens(&mut a, q, -params[k]);
            self.alg.conjugate_givens(&mut b, q, -params[k]);
        }
        (value, grad)
    }

    /// `Ad_{K^dag}(H)` for the given parameters.
    pub fn pulled_back_target(&self, params: &[T]) -> Vec<T> {
        let mut b = self.target.clone();
        for (&q, &k) in self.gates.iter().zip(&self.map).rev() {
            self.alg.conjugate_givens(&mut b, q, -params[k]);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{CostProbe, InvolutionAlgebra};
    use crate::dense;
    use crate::pauli::PauliSum;
    use nalgebra::DMatrix;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_m(alg: &InvolutionAlgebra, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut v = vec![0.0; alg.dim()];
        for x in v.iter_mut().take(alg.m_dim()) {
            *x = rng.gen_range(-1.0..1.0);
        }
        v
    }

    #[test]
    fn zero_angles_give_probe_overlap() {
        let alg = InvolutionAlgebra::new(4);
        let probe = CostProbe::<f64>::new(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_m(&alg, &mut rng);
        let cost = Cost::new(&alg, h.clone(), &probe.gamma, None);
        let expected: f64 = (0..4).map(|i| probe.gamma[i] * h[i]).sum();
        assert!((cost.value(&[0.0; 6]) - expected).abs() < 1e-14);
        let zero = Cost::new(&alg, vec![0.0; alg.dim()], &probe.gamma, None);
        assert_eq!(zero.value(&[0.3, 0.1, 1.0, 2.0, -0.4, 0.7]), 0.0);
    }

    #[test]
    fn matches_dense_trace() {
        let n = 4;
        let alg = InvolutionAlgebra::new(n);
        let probe = CostProbe::<f64>::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_m(&alg, &mut rng);
        let theta: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..3.0)).collect();
        let cost = Cost::new(&alg, h.clone(), &probe.gamma, None);

        let mut vv = vec![0.0; alg.dim()];
        vv[..n].copy_from_slice(&probe.gamma);
        let v_mat = dense::pauli_matrix(&alg.to_pauli(&vv, 0, n));
        let h_mat = dense::pauli_matrix(&alg.to_pauli(&h, 0, n));
        let mut k = DMatrix::<Complex<f64>>::identity(1 << n, 1 << n);
        for (&(i, _), &t) in crate::cartan::gate_order(n).iter().zip(&theta) {
            let gen = PauliSum::from_terms(
                n,
                [
                    (InvolutionAlgebra::generator(i - 1, 0), Complex::new(0.0, t)),
                    (InvolutionAlgebra::generator(i - 1, 1), Complex::new(0.0, -t)),
                ],
            );
            k = dense::pauli_matrix(&gen).exp() * k;
        }
        let conj = &k * v_mat * k.adjoint();
        let trace = (conj * h_mat).trace().re / (1 << n) as f64;
        assert!((trace - cost.value(&theta)).abs() < 1e-10);
    }
}
