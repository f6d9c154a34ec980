use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math;

/// How a mesh was built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshKind {
    Uniform,
    /// `t_k = a + (b − a)(k/n)^σ`.
    Graded {
        sigma: f64,
    },
    Custom,
}

/// Partition `a = t_0 < t_1 < … < t_n = b` with step sizes `h_k`.
///
/// Uniform meshes store the nominal step `(b − a)/n` for every interval, so
/// step sizes are exactly equal even where the knot differences are not.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    points: Vec<f64>,
    steps: Vec<f64>,
    alpha: f64,
    kind: MeshKind,
}

impl Mesh {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        check_interval(a, b, n)?;
        let h = (b - a) / n as f64;
        let points = (0..=n)
            .map(|k| if k == n { b } else { a + k as f64 * h })
            .collect();
        Ok(Self {
            points,
            steps: alloc::vec![h; n],
            alpha: h,
            kind: MeshKind::Uniform,
        })
    }

    /// Graded mesh `t_k = a + (b − a)(k/n)^σ`, `σ ∈ [1, 2]`, with
    /// `α_n = σ(b − a)/n`.
    pub fn graded(a: f64, b: f64, n: usize, sigma: f64) -> Result<Self> {
        check_interval(a, b, n)?;
        if !(1.0..=2.0).contains(&sigma) {
            return Err(invalid("sigma", "grading exponent must lie in [1, 2]"));
        }
        let points: Vec<f64> = (0..=n)
            .map(|k| {
                if k == n {
                    b
                } else {
                    a + (b - a) * math::pow(k as f64 / n as f64, sigma)
                }
            })
            .collect();
        let steps = points.windows(2).map(|w| w[1] - w[0]).collect();
        let mesh = Self {
            points,
            steps,
            alpha: sigma * (b - a) / n as f64,
            kind: MeshKind::Graded { sigma },
        };
        mesh.check()?;
        Ok(mesh)
    }

    /// Arbitrary strictly increasing knots; `α_n` is the largest step.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("points", "a mesh needs at least two knots"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(invalid("points", "knots must be finite"));
        }
        let steps: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
        if steps.iter().any(|&h| h <= 0.0) {
            return Err(invalid("points", "knots must be strictly increasing"));
        }
        let alpha = steps.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            points,
            steps,
            alpha,
            kind: MeshKind::Custom,
        })
    }

    fn check(&self) -> Result<()> {
        if self.steps.iter().any(|&h| !(h > 0.0)) {
            return Err(invalid("mesh", "steps must be positive"));
        }
        let max = self.max_step();
        if max > self.alpha * (1.0 + 1e-12) {
            return Err(invalid("mesh", "a step exceeds the mesh bound α_n"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.steps.len()
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn point(&self, k: usize) -> f64 {
        self.points[k]
    }

    pub fn step(&self, k: usize) -> f64 {
        self.steps[k]
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    /// Step bound `α_n ≥ max_k h_k`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_step(&self) -> f64 {
        self.steps.iter().copied().fold(0.0, f64::max)
    }

    /// Quasi-uniformity constant `n·α_n`.
    pub fn uniformity_constant(&self) -> f64 {
        self.alpha * self.n() as f64
    }

    /// Interval index holding `t`: `t_0` belongs to interval 0 and every other
    /// knot to the interval on its left.
    pub fn locate(&self, t: f64) -> Result<usize> {
        let (a, b) = (self.a(), self.b());
        if !(t >= a && t <= b) {
            return Err(Error::OutOfRange { t, a, b });
        }
        // First knot index with point >= t.
        let idx = self.points.partition_point(|&p| p < t);
        Ok(idx.saturating_sub(1).min(self.n() - 1))
    }
}

fn check_interval(a: f64, b: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "need at least one interval"));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid("interval", "need finite a < b"));
    }
    Ok(())
}
