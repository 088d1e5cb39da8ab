use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::PauliSum;
use crate::scalar::Real;

/// Term counts keyed by complexity (identity excluded).
pub type ComplexityHistogram = BTreeMap<usize, usize>;

pub fn complexity_histogram<T: Real>(op: &PauliSum<T>) -> ComplexityHistogram {
    let mut hist = BTreeMap::new();
    for (w, _) in op.iter() {
        if !w.is_identity() {
            *hist.entry(w.complexity()).or_insert(0) += 1;
        }
    }
    hist
}

/// CSV with header `complexity,count,percent`.
pub fn histogram_csv(hist: &ComplexityHistogram) -> String {
    let total: usize = hist.values().sum();
    let mut out = String::from("complexity,count,percent\n");
    for (&nc, &count) in hist {
        let pct = if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
        let _ = writeln!(out, "{nc},{count},{pct:.6}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Letter, PauliWord};
    use num_complex::Complex;

    #[test]
    fn z_pair_histogram() {
        let op = PauliSum::<f64>::from_terms(
            2,
            [
                (PauliWord::single(0, Letter::Z), Complex::new(0.25, 0.0)),
                (PauliWord::single(1, Letter::Z), Complex::new(-0.25, 0.0)),
                (PauliWord::IDENTITY, Complex::new(3.0, 0.0)),
            ],
        );
        let hist = complexity_histogram(&op);
        assert_eq!(hist, BTreeMap::from([(1, 2)]));
        assert_eq!(histogram_csv(&hist), "complexity,count,percent\n1,2,100.000000\n");
    }
}
