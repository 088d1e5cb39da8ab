//! Angular-momentum operators of a model space and their Pauli images.

use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{encode_one_body, OneBody, PauliSum};
use crate::error::Result;
use crate::scalar::Real;
use crate::spmodel::{DeformedBasis, ModelSpace, Species};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Spherical-basis matrix of `J_axis` restricted to one species block.
///
/// `J_z` is diagonal with entries `m`; `J_x = (J+ + J-)/2` and
/// `J_y = (J+ - J-)/(2i)` with `<j m+1|J+|j m> = sqrt(j(j+1) - m(m+1))`.
pub fn angular_momentum_matrix<T: Real>(space: &ModelSpace, axis: Axis, species: Species) -> Result<OneBody<T>> {
    let block = space.block(species)?;
    let mut out = Array2::from_elem((block.len, block.len), Complex::new(T::zero(), T::zero()));
    let half = T::of(0.5);
    for &s in &block.shells {
        let shell = space.shells()[s];
        let base = shell.offset - block.offset;
        let j = shell.j();
        for k in 0..shell.len() {
            let m = -j + k as f64;
            if axis == Axis::Z {
                out[[base + k, base + k]] = Complex::new(T::of(m), T::zero());
            }
            if k + 1 < shell.len() {
                let raise = T::of((j * (j + 1.0) - m * (m + 1.0)).sqrt());
                // (row m+1, col m) holds J+; (row m, col m+1) holds J-
                let (up, down) = match axis {
                    Axis::Z => continue,
                    Axis::X => (Complex::new(raise * half, T::zero()), Complex::new(raise * half, T::zero())),
                    Axis::Y => (Complex::new(T::zero(), -raise * half), Complex::new(T::zero(), raise * half)),
                };
                out[[base + k + 1, base + k]] = up;
                out[[base + k, base + k + 1]] = down;
            }
        }
    }
    Ok(out)
}

/// `U^T J U` for one species; the spherical matrix when `basis` is `None`.
pub fn deformed_one_body<T: Real>(
    space: &ModelSpace,
    basis: Option<&DeformedBasis<T>>,
    axis: Axis,
    species: Species,
) -> Result<OneBody<T>> {
    let j = angular_momentum_matrix(space, axis, species)?;
    match basis {
        None => Ok(j),
        Some(b) => {
            let u = b.species(species)?.matrix.mapv(|v| Complex::new(v, T::zero()));
            Ok(u.t().dot(&j).dot(&u))
        }
    }
}

/// Pauli image of `J_axis` summed over all species of the space.
pub fn one_body_pauli<T: Real>(space: &ModelSpace, basis: Option<&DeformedBasis<T>>, axis: Axis) -> Result<PauliSum<T>> {
    let n = space.n_modes();
    let mut total = PauliSum::zero(n);
    for block in space.blocks() {
        let m = deformed_one_body(space, basis, axis, block.species)?;
        total = total.add(&encode_one_body(&m, block.offset, n)?)?;
    }
    Ok(total)
}

/// `J^2 = Jx^2 + Jy^2 + Jz^2` over both species, built by squaring the
/// one-body Pauli sums.
pub fn build_j_squared<T: Real>(space: &ModelSpace, basis: Option<&DeformedBasis<T>>) -> Result<PauliSum<T>> {
    let mut total = PauliSum::zero(space.n_modes());
    for axis in Axis::ALL {
        let j = one_body_pauli(space, basis, axis)?;
        total = total.add(&j.multiply(&j)?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spmodel::{build_space, ShellSpec};

    fn space(j: f64) -> ModelSpace {
        build_space(&[ShellSpec { species: Species::Neutron, j }]).unwrap()
    }

    #[test]
    fn spin_half_blocks() {
        let s = space(0.5);
        let z = angular_momentum_matrix::<f64>(&s, Axis::Z, Species::Neutron).unwrap();
        assert_eq!(z[[0, 0]].re, -0.5);
        assert_eq!(z[[1, 1]].re, 0.5);
        let x = angular_momentum_matrix::<f64>(&s, Axis::X, Species::Neutron).unwrap();
        assert!((x[[0, 1]].re - 0.5).abs() < 1e-15 && (x[[1, 0]].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn j_three_halves_superdiagonal() {
        let x = angular_momentum_matrix::<f64>(&space(1.5), Axis::X, Species::Neutron).unwrap();
        // sqrt(j(j+1) - m(m+1)) / 2 evaluated at m = -3/2, -1/2, 1/2
        let expected = [3f64.sqrt() / 2.0, 1.0, 3f64.sqrt() / 2.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((x[[k, k + 1]].re - e).abs() < 1e-15);
            assert!((x[[k + 1, k]].re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn commutation_relation_jx_jy() {
        let s = space(2.5);
        let x = angular_momentum_matrix::<f64>(&s, Axis::X, Species::Neutron).unwrap();
        let y = angular_momentum_matrix::<f64>(&s, Axis::Y, Species::Neutron).unwrap();
        let z = angular_momentum_matrix::<f64>(&s, Axis::Z, Species::Neutron).unwrap();
        let comm = x.dot(&y) - y.dot(&x);
        let target = z.mapv(|v| v * Complex::new(0.0, 1.0));
        assert!((comm - target).iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn spherical_jz_has_only_single_z_terms() {
        let s = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        let jz = one_body_pauli::<f64>(&s, None, Axis::Z).unwrap();
        assert!(jz.iter().all(|(w, _)| w.complexity() == 1));
        assert_eq!(jz.term_count(), 24);
    }
}
