use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Projection target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    J0,
    /// `J = 1/2` finishing in `M = sign/2`.
    Jhalf { sign: i8 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSchedule {
    pub n_proj: usize,
    pub n_iter: usize,
    /// Filter times used on each axis within one iteration.
    pub times: Vec<f64>,
    pub phases: Vec<f64>,
    pub target: Target,
}

/// `M~ = 3/2, 5/2, 7/2, 11/2, ..`: ascending half-odd values, skipping any
/// odd multiple of an earlier entry (its zeros are already covered).
pub fn half_integer_filters(count: usize) -> Vec<f64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut two = 3u64;
    while out.len() < count {
        if !out.iter().any(|&p| two % p == 0 && (two / p) % 2 == 1) {
            out.push(two);
        }
        two += 2;
    }
    out.into_iter().map(|t| t as f64 / 2.0).collect()
}

impl ProjectionSchedule {
    fn check(n_proj: usize) -> Result<()> {
        if n_proj < 2 || n_proj % 2 != 0 {
            return Err(Error::Schedule(format!("N_proj must be even and at least 2, got {n_proj}")));
        }
        Ok(())
    }

    /// `t_i = pi / 2^i` for `i = 1..N_proj/2`, all phases zero.
    pub fn j0(n_proj: usize, n_iter: usize) -> Result<Self> {
        Self::check(n_proj)?;
        let times: Vec<f64> = (1..=n_proj / 2).map(|i| PI / 2f64.powi(i as i32)).collect();
        let phases = vec![0.0; times.len()];
        Ok(ProjectionSchedule { n_proj, n_iter, times, phases, target: Target::J0 })
    }

    /// Times `pi / (2 M~)` over [`half_integer_filters`].
    pub fn jhalf(n_proj: usize, n_iter: usize, sign: i8) -> Result<Self> {
        Self::check(n_proj)?;
        if sign != 1 && sign != -1 {
            return Err(Error::Schedule(format!("sign must be +1 or -1, got {sign}")));
        }
        let times: Vec<f64> = half_integer_filters(n_proj / 2).into_iter().map(|m| PI / (2.0 * m)).collect();
        let phases = vec![0.0; times.len()];
        Ok(ProjectionSchedule { n_proj, n_iter, times, phases, target: Target::Jhalf { sign } })
    }

    pub fn for_target(target: Target, n_proj: usize, n_iter: usize) -> Result<Self> {
        match target {
            Target::J0 => Self::j0(n_proj, n_iter),
            Target::Jhalf { sign } => Self::jhalf(n_proj, n_iter, sign),
        }
    }

    /// Filters applied by a complete run, the closing phased filter included.
    pub fn total_measurements(&self) -> usize {
        let extra = usize::from(matches!(self.target, Target::Jhalf { .. }));
        self.n_proj * self.n_iter + extra
    }

    pub fn validate(&self) -> Result<()> {
        Self::check(self.n_proj)?;
        if self.times.len() != self.n_proj / 2 || self.phases.len() != self.times.len() {
            return Err(Error::Schedule("expected N_proj/2 times and phases".into()));
        }
        if self.times.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Schedule("times must be strictly decreasing".into()));
        }
        if self.target == Target::J0 && self.phases.iter().any(|&d| d != 0.0) {
            return Err(Error::Schedule("J0 filters take zero phases".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_times_halve() {
        let s = ProjectionSchedule::j0(6, 2).unwrap();
        assert_eq!(s.times, vec![PI / 2.0, PI / 4.0, PI / 8.0]);
        assert_eq!(s.total_measurements(), 12);
        s.validate().unwrap();
        assert!(ProjectionSchedule::j0(5, 1).is_err());
        assert!(ProjectionSchedule::j0(0, 1).is_err());
    }

    #[test]
    fn half_integer_sequence_skips_covered_values() {
        assert_eq!(half_integer_filters(6), vec![1.5, 2.5, 3.5, 5.5, 6.5, 8.5]);
        let s = ProjectionSchedule::jhalf(4, 3, -1).unwrap();
        assert!((s.times[0] - PI / 3.0).abs() < 1e-15);
        s.validate().unwrap();
        assert_eq!(s.total_measurements(), 13);
    }
}
