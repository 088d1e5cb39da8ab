use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cartan::InvolutionAlgebra;
use crate::dense;
use crate::pauli::{angular_momentum_matrix, build_j_squared, Axis};
use crate::spmodel::{build_space, ShellSpec, Species};

type Rng8 = ChaCha8Rng;

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn shell(j: f64) -> ModelSpace {
    build_space(&[ShellSpec { species: Species::Neutron, j }]).unwrap()
}

fn two_species() -> ModelSpace {
    build_space(&[
        ShellSpec { species: Species::Proton, j: 0.5 },
        ShellSpec { species: Species::Proton, j: 1.5 },
        ShellSpec { species: Species::Neutron, j: 0.5 },
        ShellSpec { species: Species::Neutron, j: 1.5 },
    ])
    .unwrap()
}

fn j_squared_groups(space: &ModelSpace) -> Vec<Vec<(OneBody<f64>, usize)>> {
    Axis::ALL
        .iter()
        .map(|&axis| {
            space
                .blocks()
                .iter()
                .map(|b| (angular_momentum_matrix::<f64>(space, axis, b.species).unwrap(), b.offset))
                .collect()
        })
        .collect()
}

#[test]
fn slater_sets_low_bits() {
    let s = shell(1.5);
    let st = QuantumState::<f64>::slater(&s, &[0, 1], Backend::Full).unwrap();
    assert_eq!(st.amplitude(0b0011), c(1.0));
    assert_eq!(st.norm_sqr(), 1.0);
    let vac = QuantumState::<f64>::slater(&s, &[], Backend::Sector).unwrap();
    assert_eq!(vac.dim(), 1);
    assert_eq!(vac.amplitude(0), c(1.0));
    assert!(QuantumState::<f64>::slater(&s, &[0, 0], Backend::Full).is_err());
    assert!(QuantumState::<f64>::slater(&s, &[4], Backend::Full).is_err());
}

#[test]
fn givens_examples() {
    let s = shell(0.5);
    let mut st = QuantumState::<f64>::slater(&s, &[1], Backend::Full).unwrap();
    let before = st.clone();
    st.apply_givens(0, 0.0).unwrap();
    assert_eq!(st, before);
    // |n_0 = 0, n_1 = 1> goes to |n_0 = 1, n_1 = 0>
    st.apply_givens(0, PI / 4.0).unwrap();
    assert!((st.amplitude(0b01) - c(1.0)).norm() < 1e-15);
    assert!(st.amplitude(0b10).norm() < 1e-15);
    let mut full = QuantumState::<f64>::slater(&s, &[0, 1], Backend::Full).unwrap();
    full.apply_givens(0, 0.731).unwrap();
    assert_eq!(full.amplitude(0b11), c(1.0));
}

#[test]
fn givens_matches_dense_exponential() {
    let s = build_space(&[ShellSpec { species: Species::Neutron, j: 1.5 }]).unwrap();
    let layout = Arc::new(Layout::full(&s).unwrap());
    let mut rng = Rng8::seed_from_u64(2);
    let psi = QuantumState::<f64>::random(layout, &mut rng);
    let theta = 0.37;
    for q in 0..3 {
        let mut out = psi.clone();
        out.apply_givens(q, theta).unwrap();
        let gen = crate::pauli::PauliSum::from_terms(
            4,
            [
                (InvolutionAlgebra::generator(q, 0), Complex::new(0.0, theta)),
                (InvolutionAlgebra::generator(q, 1), Complex::new(0.0, -theta)),
            ],
        );
        let u = dense::pauli_matrix(&gen).exp();
        let v = nalgebra::DVector::from_vec(psi.amplitudes().to_vec());
        let w = u * v;
        for i in 0..16 {
            assert!((w[i] - out.amplitudes()[i]).norm() < 1e-12);
        }
    }
}

#[test]
fn givens_rejects_cross_species_pair() {
    let s = two_species();
    let mut st = QuantumState::<f64>::slater(&s, &[0, 6], Backend::Sector).unwrap();
    assert!(matches!(st.apply_givens(5, 0.1), Err(Error::CrossSpecies(5, 6))));
}

#[test]
fn filter_removes_odd_m() {
    // equal weight on M = 0 and M = 1 in a j = 1/2 shell pair
    let s = shell(0.5);
    let layout = Arc::new(Layout::full(&s).unwrap());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0); 4];
    amps[0b00] = c(h);
    amps[0b10] = c(h);
    let mut st = QuantumState::from_amplitudes(layout, amps).unwrap();
    // shift so the 1-particle state at m = +1/2 has M = 1 and the vacuum M = 0
    let mut obs = DiagonalObservable::jz(&s);
    obs.weights = vec![0.0, 1.0];
    let out = st.filter_measure::<Rng8>(&obs, PI / 2.0, 0.0, None).unwrap();
    assert!((out.probability - 0.5).abs() < 1e-15);
    assert!(st.amplitude(0b10).norm() < 1e-15);
    let still = st.clone();
    let same = st.filter_measure::<Rng8>(&obs, 0.0, 0.0, None).unwrap();
    assert_eq!(same.probability, 1.0);
    assert_eq!(st, still);
}

#[test]
fn filter_quarter_turn_on_even_m() {
    let s = shell(1.5);
    let layout = Arc::new(Layout::full(&s).unwrap());
    let mut amps = vec![c(0.0); 16];
    amps[0b0000] = c(0.5f64.sqrt());
    amps[0b0001] = c(0.5);
    amps[0b0010] = c(0.5);
    let mut st = QuantumState::from_amplitudes(layout, amps).unwrap();
    // vacuum at M = 0, the two one-particle states at M = +2 and M = -2
    let obs = DiagonalObservable::new(vec![2.0, -2.0, 0.0, 0.0]);
    let out = st.filter_measure::<Rng8>(&obs, PI / 4.0, 0.0, None).unwrap();
    assert!((out.probability - 0.5).abs() < 1e-15);
    assert!(st.amplitude(0b0001).norm() < 1e-15);
    assert!(st.amplitude(0b0010).norm() < 1e-15);
}

#[test]
fn filter_zero_probability_is_an_error() {
    let s = shell(0.5);
    let mut st = QuantumState::<f64>::slater(&s, &[1], Backend::Full).unwrap();
    let obs = DiagonalObservable::new(vec![0.0, 1.0]);
    assert!(matches!(st.filter_measure::<Rng8>(&obs, PI / 2.0, 0.0, None), Err(Error::ZeroProbability(_))));
}

#[test]
fn sampling_reports_outcome() {
    let s = shell(0.5);
    let layout = Arc::new(Layout::full(&s).unwrap());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = vec![c(h), c(0.0), c(h), c(0.0)];
    let obs = DiagonalObservable::new(vec![0.0, 1.0]);
    let mut seen = [0usize; 2];
    let mut rng = Rng8::seed_from_u64(9);
    for _ in 0..200 {
        let mut st = QuantumState::from_amplitudes(layout.clone(), amps.clone()).unwrap();
        let out = st.filter_measure(&obs, PI / 2.0, 0.0, Some(&mut rng)).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        seen[out.outcome as usize] += 1;
        let survivor = if out.outcome == 0 { 0b00 } else { 0b10 };
        assert!((st.amplitude(survivor).norm() - 1.0).abs() < 1e-12);
    }
    assert!(seen[0] > 60 && seen[1] > 60);
}

#[test]
fn j_squared_of_single_particle() {
    let s = shell(1.5);
    let j2 = build_j_squared::<f64>(&s, None).unwrap();
    for q in 0..4 {
        let st = QuantumState::<f64>::slater(&s, &[q], Backend::Sector).unwrap();
        assert!((st.expectation_pauli(&j2).unwrap() - 3.75).abs() < 1e-12);
        assert!((st.sum_of_squares(&j_squared_groups(&s)) - 3.75).abs() < 1e-12);
    }
    let closed = QuantumState::<f64>::slater(&s, &[0, 1, 2, 3], Backend::Full).unwrap();
    assert!(closed.expectation_pauli(&j2).unwrap().abs() < 1e-12);
}

#[test]
fn spin_half_pair_gives_three_quarters() {
    let s = shell(0.5);
    let j2 = build_j_squared::<f64>(&s, None).unwrap();
    let mut rng = Rng8::seed_from_u64(4);
    let layout = Arc::new(Layout::sector(&s, &[1]).unwrap());
    let st = QuantumState::<f64>::random(layout, &mut rng);
    assert!((st.expectation_pauli(&j2).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn backend_conversion() {
    let s = two_species();
    let st = QuantumState::<f64>::slater(&s, &[1, 3, 6], Backend::Full).unwrap();
    let sec = st.convert(Backend::Sector).unwrap();
    assert_eq!(sec.convert(Backend::Full).unwrap(), st);
    let mut g = sec.clone();
    g.apply_givens(1, 0.4).unwrap();
    g.apply_givens(6, -1.1).unwrap();
    let back = g.convert(Backend::Full).unwrap().convert(Backend::Sector).unwrap();
    let diff = back.amplitudes().iter().zip(g.amplitudes()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(diff <= 1e-12);

    let layout = Arc::new(Layout::full(&s).unwrap());
    let mut amps = vec![c(0.0); layout.dim()];
    amps[0b1] = c(0.6);
    amps[0b11] = c(0.8);
    let mixed = QuantumState::from_amplitudes(layout, amps).unwrap();
    assert!(matches!(mixed.convert(Backend::Sector), Err(Error::SectorLeakage(_))));
}

#[test]
fn snapshot_lists_bitstrings() {
    let s = shell(0.5);
    let st = QuantumState::<f64>::slater(&s, &[0], Backend::Full).unwrap();
    assert_eq!(st.snapshot().trim(), "01 1e0 0e0");
}

fn random_gates(n: usize) -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0..n - 1, -3.2f64..3.2), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn givens_networks_are_unitary(gates in random_gates(8), seed in 0u64..1000) {
        let s = build_space(&[ShellSpec { species: Species::Neutron, j: 0.5 }, ShellSpec { species: Species::Neutron, j: 2.5 }]).unwrap();
        let layout = Arc::new(Layout::sector(&s, &[3]).unwrap());
        let mut rng = Rng8::seed_from_u64(seed);
        let mut a = QuantumState::<f64>::random(layout.clone(), &mut rng);
        let mut b = QuantumState::<f64>::random(layout, &mut rng);
        let overlap = a.inner(&b);
        for &(q, t) in &gates {
            a.apply_givens(q, t).unwrap();
            b.apply_givens(q, t).unwrap();
        }
        prop_assert!((a.norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!((a.inner(&b) - overlap).norm() <= 1e-10);
    }

    #[test]
    fn operations_conserve_particle_number(gates in random_gates(6), t in 0.0f64..3.0, occ in prop::sample::subsequence(vec![0usize, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11], 0..12)) {
        let s = two_species();
        let mut st = QuantumState::<f64>::slater(&s, &occ, Backend::Full).unwrap();
        let before = st.particle_numbers();
        for &(q, th) in &gates {
            st.apply_givens(q, th).unwrap();
            st.apply_givens(q + 6, th * 0.5).unwrap();
        }
        let obs = DiagonalObservable::<f64>::jz(&s);
        if st.filter_measure::<Rng8>(&obs, t, 0.0, None).is_ok() {
            let after = st.particle_numbers();
            for (x, y) in before.iter().zip(&after) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn backends_agree(gates in random_gates(6), t in 0.0f64..3.0, seed in 0u64..100) {
        let s = two_species();
        let occ = [0usize, 2, 7, 9];
        let mut full = QuantumState::<f64>::slater(&s, &occ, Backend::Full).unwrap();
        let mut sec = QuantumState::<f64>::slater(&s, &occ, Backend::Sector).unwrap();
        let mut rng = Rng8::seed_from_u64(seed);
        for &(q, th) in &gates {
            let off = if rng.gen_bool(0.5) { 6 } else { 0 };
            full.apply_givens(q + off, th).unwrap();
            sec.apply_givens(q + off, th).unwrap();
        }
        let obs = DiagonalObservable::<f64>::jz(&s);
        let p1 = full.filter_measure::<Rng8>(&obs, t, 0.0, None);
        let p2 = sec.filter_measure::<Rng8>(&obs, t, 0.0, None);
        if let (Ok(a), Ok(b)) = (p1, p2) {
            prop_assert!((a.probability - b.probability).abs() <= 1e-10);
            let groups = j_squared_groups(&s);
            prop_assert!((full.sum_of_squares(&groups) - sec.sum_of_squares(&groups)).abs() <= 1e-10);
            prop_assert!((full.expectation_diagonal(&obs) - sec.expectation_diagonal(&obs)).abs() <= 1e-10);
        }
    }

    #[test]
    fn half_turn_filter_removes_odd_m(seed in 0u64..1000) {
        let s = build_space(&[ShellSpec { species: Species::Neutron, j: 1.5 }, ShellSpec { species: Species::Neutron, j: 2.5 }]).unwrap();
        let layout = Arc::new(Layout::sector(&s, &[2]).unwrap());
        let mut rng = Rng8::seed_from_u64(seed);
        let mut st = QuantumState::<f64>::random(layout, &mut rng);
        let obs = DiagonalObservable::<f64>::jz(&s);
        st.filter_measure::<Rng8>(&obs, PI / 2.0, 0.0, None).unwrap();
        let odd: f64 = st.amplitudes().iter().enumerate()
            .filter(|(i, _)| (obs.eigenvalue(st.mask(*i)).round() as i64).rem_euclid(2) == 1)
            .map(|(_, a)| a.norm_sqr()).sum();
        prop_assert!(odd <= 1e-12);
    }

    #[test]
    fn pauli_and_one_body_j_squared_agree(seed in 0u64..100) {
        let s = two_species();
        let j2 = build_j_squared::<f64>(&s, None).unwrap();
        let layout = Arc::new(Layout::sector(&s, &[2, 1]).unwrap());
        let mut rng = Rng8::seed_from_u64(seed);
        let st = QuantumState::<f64>::random(layout, &mut rng);
        let a = st.expectation_pauli(&j2).unwrap();
        let b = st.sum_of_squares(&j_squared_groups(&s));
        prop_assert!((a - b).abs() <= 1e-10);
    }
}
