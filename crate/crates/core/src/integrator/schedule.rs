use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Truncation dimensions `N_{-1}, N_0, …, N_{n−1}`.
///
/// `N_{-1}` sizes the initial projection; `N_k` is the number of components
/// updated on interval `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationSchedule {
    dims: Vec<usize>,
}

impl TruncationSchedule {
    /// `N_k = dim` for every `k ∈ {−1, …, n−1}`.
    pub fn uniform(n: usize, dim: usize) -> Result<Self> {
        Self::from_dims(alloc::vec![dim; n + 1])
    }

    /// `dims = [N_{-1}, N_0, …, N_{n−1}]`.
    pub fn from_dims(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(invalid(
                "dims",
                "need N_{-1} and at least one step dimension",
            ));
        }
        if dims.contains(&0) {
            return Err(invalid("dims", "truncation dimensions must be positive"));
        }
        Ok(Self { dims })
    }

    /// Number of intervals the schedule covers.
    pub fn n(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn initial_dim(&self) -> usize {
        self.dims[0]
    }

    /// `N_k` for `k = 0..n`.
    pub fn step_dim(&self, k: usize) -> usize {
        self.dims[k + 1]
    }

    pub fn step_dims(&self) -> &[usize] {
        &self.dims[1..]
    }

    /// `M_k = max(N_{-1}, …, N_k)` for `k = 0..n`.
    pub fn arg_dims(&self) -> Vec<usize> {
        let mut m = self.dims[0];
        self.dims[1..]
            .iter()
            .map(|&d| {
                m = m.max(d);
                m
            })
            .collect()
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn check_against(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::LengthMismatch {
                what: "truncation schedule",
                expected: n + 1,
                found: self.dims.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arg_dims_are_running_max() {
        let s = TruncationSchedule::from_dims(alloc::vec![3, 2, 5, 4, 1]).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.arg_dims(), [3, 5, 5, 5]);
        assert_eq!(s.step_dim(1), 5);
        assert!(TruncationSchedule::from_dims(alloc::vec![1, 0]).is_err());
        assert!(TruncationSchedule::from_dims(alloc::vec![1]).is_err());
    }
}
