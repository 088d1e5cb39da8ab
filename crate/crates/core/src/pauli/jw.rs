//! Jordan-Wigner images of one-body operators.
//!
//! `a_j^dag = (X_j - i Y_j)/2 * prod_{i<j} Z_i`, so for `i < j`
//!
//! * `a_i^dag a_i = (I - Z_i)/2`
//! * `a_i^dag a_j + a_j^dag a_i = (XX^ + YY^)/2`
//! * `a_i^dag a_j - a_j^dag a_i = i (XY^ - YX^)/2`
//!
//! where `AB^` carries a `Z` on every qubit strictly between `i` and `j`.

use ndarray::Array2;
use num_complex::Complex;

use super::{Letter, PauliSum, PauliWord};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense one-body matrix `<p|O|q>` over the modes of one block.
pub type OneBody<T> = Array2<Complex<T>>;

/// `A_i Z_{i+1} .. Z_{j-1} B_j` for `i < j`.
pub fn hat_word(i: usize, a: Letter, j: usize, b: Letter) -> PauliWord {
    debug_assert!(i < j);
    let mut w = PauliWord::single(i, a).with(j, b);
    for k in (i + 1)..j {
        w = w.with(k, Letter::Z);
    }
    w
}

/// Encodes a Hermitian one-body matrix whose modes start at qubit `offset`
/// of an `n_qubits` register.
pub fn encode_one_body<T: Real>(matrix: &OneBody<T>, offset: usize, n_qubits: usize) -> Result<PauliSum<T>> {
    let (rows, cols) = matrix.dim();
    if rows != cols || offset + rows > n_qubits {
        return Err(Error::Shape { rows, cols, expected: n_qubits.saturating_sub(offset) });
    }
    let mut dev = T::zero();
    for p in 0..rows {
        for q in 0..rows {
            dev = dev.max((matrix[[p, q]] - matrix[[q, p]].conj()).norm());
        }
    }
    if dev > T::structural() {
        return Err(Error::NotHermitian(dev.f64()));
    }

    let half = T::of(0.5);
    let re = |v: T| Complex::new(v, T::zero());
    let mut out = PauliSum::zero(n_qubits);
    for p in 0..rows {
        let d = matrix[[p, p]].re;
        out.add_term(PauliWord::IDENTITY, re(d * half));
        out.add_term(PauliWord::single(offset + p, Letter::Z), re(-d * half));
    }
    for p in 0..rows {
        for q in (p + 1)..rows {
            let h = matrix[[p, q]];
            let (i, j) = (offset + p, offset + q);
            if h.re != T::zero() {
                out.add_term(hat_word(i, Letter::X, j, Letter::X), re(h.re * half));
                out.add_term(hat_word(i, Letter::Y, j, Letter::Y), re(h.re * half));
            }
            if h.im != T::zero() {
                out.add_term(hat_word(i, Letter::X, j, Letter::Y), re(-h.im * half));
                out.add_term(hat_word(i, Letter::Y, j, Letter::X), re(h.im * half));
            }
        }
    }
    out.prune();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn jz_of_spin_half_pair() {
        let m = Array2::from_diag(&ndarray::arr1(&[c(-0.5, 0.0), c(0.5, 0.0)]));
        let s = encode_one_body(&m, 0, 2).unwrap();
        assert_eq!(s.coefficient(&PauliWord::single(0, Letter::Z)), c(0.25, 0.0));
        assert_eq!(s.coefficient(&PauliWord::single(1, Letter::Z)), c(-0.25, 0.0));
        assert_eq!(s.term_count(), 2);
    }

    #[test]
    fn jx_of_spin_half_pair() {
        let m = ndarray::arr2(&[[c(0.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.0, 0.0)]]);
        let s = encode_one_body(&m, 0, 2).unwrap();
        assert_eq!(s.coefficient(&PauliWord::from_letters("XX").unwrap()), c(0.25, 0.0));
        assert_eq!(s.coefficient(&PauliWord::from_letters("YY").unwrap()), c(0.25, 0.0));
        assert_eq!(s.term_count(), 2);
    }

    #[test]
    fn dense_symmetric_block_has_144_terms() {
        let n = 12;
        let m = Array2::from_shape_fn((n, n), |(p, q)| c(1.0 + (p * q) as f64 * 0.01 + (p + q) as f64 * 0.1, 0.0));
        let s = encode_one_body(&m, 12, 24).unwrap();
        assert_eq!(s.term_count(), 144);
        assert!(s.iter().all(|(w, _)| w.support() & 0xfff == 0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ndarray::arr2(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(encode_one_body(&m, 0, 2), Err(Error::NotHermitian(_))));
    }

    fn hermitian(n: usize) -> impl Strategy<Value = OneBody<f64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            let mut m = Array2::from_elem((n, n), c(0.0, 0.0));
            for p in 0..n {
                for q in 0..n {
                    let (a, b) = v[p * n + q];
                    if p == q {
                        m[[p, p]] = c(a, 0.0);
                    } else if p < q {
                        m[[p, q]] = c(a, b);
                        m[[q, p]] = c(a, -b);
                    }
                }
            }
            m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn matches_fermionic_dense_oracle(m in hermitian(4), offset in 0usize..3) {
            let n = 4 + offset;
            let s = encode_one_body(&m, offset, n).unwrap();
            prop_assert!(s.is_hermitian());
            let lhs = dense::pauli_matrix(&s);
            let rhs = dense::fermionic_one_body(&m, offset, n);
            prop_assert!((lhs - rhs).norm() <= 1e-10);
        }

        #[test]
        fn encoding_is_linear(a in hermitian(3), b in hermitian(3), alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
            let combo = a.mapv(|x| x * alpha) + b.mapv(|x| x * beta);
            let lhs = encode_one_body(&combo, 0, 3).unwrap();
            let rhs = encode_one_body(&a, 0, 3).unwrap().scaled(c(alpha, 0.0))
                .add(&encode_one_body(&b, 0, 3).unwrap().scaled(c(beta, 0.0))).unwrap();
            let diff = lhs.sub(&rhs).unwrap();
            prop_assert!(diff.iter().all(|(_, v)| v.norm() <= 1e-12));
        }
    }
}
