use crate::scalar::Real;

/// Weights `gamma_i` of the probe `v = sum_i gamma_i Z_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostProbe<T> {
    pub gamma: Vec<T>,
}

fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= k).all(|&p| k % p != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

impl<T: Real> CostProbe<T> {
    /// `gamma_i = sqrt(p_i)` for the first `n` primes, scaled to unit norm.
    pub fn new(n: usize) -> Self {
        let raw: Vec<f64> = primes(n).into_iter().map(|p| (p as f64).sqrt()).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        CostProbe { gamma: raw.into_iter().map(|v| T::of(v / norm)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_distinct_and_normalized() {
        let p = CostProbe::<f64>::new(12);
        assert!((p.gamma.iter().map(|g| g * g).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.gamma.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
    }
}
