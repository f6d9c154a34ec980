//! The iterated interpolation–integration stages on one interval, generic
//! over the scalar type.

use alloc::vec::Vec;

use super::poly::{horner, small_int, unit_nodes, LagrangeBasis, Scalar};

/// Nodes and Lagrange bases for stages `0..R`.
#[derive(Debug, Clone)]
pub struct StagePlan<T> {
    order: usize,
    bases: Vec<LagrangeBasis<T>>,
    divisors: Vec<T>,
}

impl<T: Scalar> StagePlan<T> {
    /// Plan for `order = R ≥ 1` stages; stage `s` interpolates at `p/s`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "stage count must be at least one");
        let bases = (0..order)
            .map(|s| LagrangeBasis::new(&unit_nodes::<T>(s)).expect("stage nodes are distinct"))
            .collect();
        let divisors = (1..=order).map(small_int::<T>).collect();
        Self {
            order,
            bases,
            divisors,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients stored per component: `R + 1`.
    pub fn stride(&self) -> usize {
        self.order + 1
    }

    /// Nodes used at stage `s`.
    pub fn nodes(&self, s: usize) -> &[T] {
        self.bases[s].nodes()
    }

    /// Information points per component on one interval.
    pub fn points_per_interval(&self) -> usize {
        self.bases.iter().map(|b| b.len()).sum()
    }

    /// Runs all stages on one interval.
    ///
    /// `y` is the padded state (length `D`); the first `updated` components
    /// evolve, the rest stay constant. On return `coeffs[j·stride + i]` is the
    /// coefficient of `τ^i` of component `j + 1`. `rhs(stage, node, arg, out)`
    /// must fill `out[i] = f^{i+1}(arg)` for `i < updated`.
    pub fn run<E>(
        &self,
        y: &[T],
        h: &T,
        updated: usize,
        coeffs: &mut [T],
        scratch: &mut StageScratch<T>,
        mut rhs: impl FnMut(usize, usize, &[T], &mut [T]) -> Result<(), E>,
    ) -> Result<(), E> {
        let d = y.len();
        let stride = self.stride();
        assert!(updated <= d, "updated dimension exceeds state dimension");
        assert_eq!(
            coeffs.len(),
            d * stride,
            "coefficient buffer has wrong length"
        );
        for (row, yj) in coeffs.chunks_exact_mut(stride).zip(y) {
            row[0] = yj.clone();
            for c in &mut row[1..] {
                *c = T::zero();
            }
        }
        scratch.arg.resize(d, T::zero());
        scratch.values.resize(self.order * updated, T::zero());

        for (s, basis) in self.bases.iter().enumerate() {
            let m = basis.len();
            // The polynomial entering stage s has degree s.
            for (p, tau) in basis.nodes().iter().enumerate() {
                let out = &mut scratch.values[p * updated..(p + 1) * updated];
                if s == 0 {
                    rhs(s, p, y, out)?;
                } else {
                    eval_rows(&coeffs[..d * stride], stride, tau, &mut scratch.arg);
                    rhs(s, p, &scratch.arg, out)?;
                }
            }
            let values = &scratch.values;
            for i in 0..m {
                let div = &self.divisors[i];
                let rows = coeffs.chunks_exact_mut(stride).take(updated);
                if m == 1 {
                    // c = v·ℓ_0 with ℓ_0 ≡ 1
                    for (row, v) in rows.zip(&values[..updated]) {
                        row[1] = h.clone() * v.clone();
                    }
                    continue;
                }
                for (j, row) in rows.enumerate() {
                    let mut c = values[j].clone() * basis.basis_row(0)[i].clone();
                    for p in 1..m {
                        c = c + values[p * updated + j].clone() * basis.basis_row(p)[i].clone();
                    }
                    // Dividing by one is exact; skip it.
                    row[i + 1] = if i == 0 {
                        h.clone() * c
                    } else {
                        h.clone() * c / div.clone()
                    };
                }
            }
        }
        Ok(())
    }
}

/// Reusable buffers for [`StagePlan::run`].
#[derive(Debug, Clone, Default)]
pub struct StageScratch<T> {
    arg: Vec<T>,
    values: Vec<T>,
}

impl<T> StageScratch<T> {
    pub fn new() -> Self {
        Self {
            arg: Vec::new(),
            values: Vec::new(),
        }
    }
}

/// `Σ_i row[i]·τ^i` for every component of a flattened coefficient block.
pub fn eval_rows<T: Scalar>(coeffs: &[T], stride: usize, tau: &T, out: &mut [T]) {
    // Fixed-width cases spelled out; each matches `horner` operation by operation.
    match stride {
        1 => {
            for (o, c) in out.iter_mut().zip(coeffs) {
                *o = c.clone();
            }
        }
        2 => {
            for (o, row) in out.iter_mut().zip(coeffs.chunks_exact(2)) {
                *o = row[1].clone() * tau.clone() + row[0].clone();
            }
        }
        3 => {
            for (o, row) in out.iter_mut().zip(coeffs.chunks_exact(3)) {
                let acc = row[2].clone() * tau.clone() + row[1].clone();
                *o = acc * tau.clone() + row[0].clone();
            }
        }
        _ => {
            for (o, row) in out.iter_mut().zip(coeffs.chunks_exact(stride)) {
                *o = horner(row, tau);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::convert::Infallible;

    fn step_scalar(order: usize, lambda: f64, h: f64) -> f64 {
        let plan = StagePlan::<f64>::new(order);
        let mut coeffs = alloc::vec![0.0; plan.stride()];
        let mut scratch = StageScratch::new();
        plan.run::<Infallible>(&[1.0], &h, 1, &mut coeffs, &mut scratch, |_, _, y, out| {
            out[0] = lambda * y[0];
            Ok(())
        })
        .unwrap();
        horner(&coeffs, &1.0)
    }

    #[test]
    fn stage_unrolling_matches_taylor() {
        let h = 0.1;
        assert!((step_scalar(1, -1.0, h) - (1.0 - h)).abs() < 1e-15);
        assert!((step_scalar(2, -1.0, h) - (1.0 - h + h * h / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn points_per_interval() {
        assert_eq!(StagePlan::<f64>::new(1).points_per_interval(), 1);
        assert_eq!(StagePlan::<f64>::new(2).points_per_interval(), 3);
        assert_eq!(StagePlan::<f64>::new(3).points_per_interval(), 6);
    }
}
