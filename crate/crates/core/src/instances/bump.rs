//! Compactly supported `C^r` bumps `ψ_r(x) = (1 − x²)^{r+1}` on `[−1, 1]`.
//!
//! `ψ_r` and its derivatives up to order `r` vanish at `±1`, so a scaled copy
//! placed between two information points is invisible to any evaluation of
//! order `≤ r` at those points.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

/// Safety factor applied to grid-maximized derivative bounds.
const SUP_MARGIN: f64 = 1.01;

/// Monomial coefficients of `ψ_r` and its derivatives, with sup bounds.
#[derive(Debug)]
struct PsiShape {
    /// `derivs[j]` holds monomial coefficients of `ψ_r^{(j)}`, `j = 0..=max(r,1)`.
    derivs: Vec<Vec<f64>>,
    /// `SUP_MARGIN · max_{1≤j≤max(r,1)} sup |ψ_r^{(j)}|`.
    b_r: f64,
    integral: f64,
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn psi_coeffs(r: u32) -> Vec<f64> {
    let m = r + 1;
    let mut c = alloc::vec![0.0; 2 * m as usize + 1];
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * k as usize] = sign * binomial(m, k);
    }
    c
}

fn differentiate(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return alloc::vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &v)| v * i as f64)
        .collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// `max_{x∈[−1,1]} |p(x)|` by a dense grid followed by golden-section
/// refinement around the best grid cell.
fn sup_abs_on_unit(c: &[f64]) -> f64 {
    const GRID: usize = 4000;
    let f = |x: f64| horner(c, x).abs();
    let step = 2.0 / GRID as f64;
    let (mut best_i, mut best) = (0, f(-1.0));
    for i in 1..=GRID {
        let v = f(-1.0 + i as f64 * step);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let centre = -1.0 + best_i as f64 * step;
    let (mut lo, mut hi) = ((centre - step).max(-1.0), (centre + step).min(1.0));
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) > f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.max(f(0.5 * (lo + hi)))
}

/// `sup_{[−1,1]} |ψ_r^{(j)}|` (no safety margin).
pub fn psi_derivative_sup(r: u32, j: u32) -> f64 {
    let mut c = psi_coeffs(r);
    for _ in 0..j {
        c = differentiate(&c);
    }
    sup_abs_on_unit(&c)
}

/// `∫_{−1}^{1} (1 − x²)^{r+1} dx = 2·Π_{k=1}^{r+1} 2k/(2k+1)`.
pub fn psi_integral(r: u32) -> f64 {
    (1..=r + 1).fold(2.0, |acc, k| acc * (2 * k) as f64 / (2 * k + 1) as f64)
}

impl PsiShape {
    fn new(r: u32) -> Self {
        let order = r.max(1);
        let mut derivs = alloc::vec![psi_coeffs(r)];
        for j in 1..=order as usize {
            let next = differentiate(&derivs[j - 1]);
            derivs.push(next);
        }
        let b_r = (1..=order as usize)
            .map(|j| sup_abs_on_unit(&derivs[j]))
            .fold(0.0, f64::max)
            * SUP_MARGIN;
        Self {
            derivs,
            b_r,
            integral: psi_integral(r),
        }
    }
}

/// `H(x) = h·ψ_r((x − c)/ρ)`, supported on `[c − ρ, c + ρ]`.
#[derive(Debug, Clone)]
pub struct Bump {
    lo: f64,
    hi: f64,
    center: f64,
    radius: f64,
    height: f64,
    r: u32,
    shape: Arc<PsiShape>,
}

/// Builds a bump with the conservative height
/// `h = min(M1, D1·min(ρ, ρ^{max(r,1)})/B_r)`, so `sup|H| ≤ M1` and
/// `sup|H^{(j)}| ≤ D1` for `j = 1..=max(r,1)`.
pub fn bump(r: u32, center: f64, radius: f64, m1: f64, d1: f64) -> Result<Bump> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    if !(m1 > 0.0 && d1 > 0.0) {
        return Err(invalid("M1/D1", "bump bounds must be positive"));
    }
    let shape = Arc::new(PsiShape::new(r));
    Ok(Bump::with_shape(
        shape,
        r,
        center - radius,
        center + radius,
        m1,
        d1,
    ))
}

impl Bump {
    fn with_shape(shape: Arc<PsiShape>, r: u32, lo: f64, hi: f64, m1: f64, d1: f64) -> Self {
        let center = 0.5 * (lo + hi);
        let radius = 0.5 * (hi - lo);
        let order = r.max(1);
        let scale = radius.min(math::powi(radius, order));
        let height = m1.min(d1 * scale / shape.b_r);
        Self {
            lo,
            hi,
            center,
            radius,
            height,
            r,
            shape,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn smoothness(&self) -> u32 {
        self.r
    }

    /// The bound `B_r` used for the height (including the safety margin).
    pub fn derivative_scale(&self) -> f64 {
        self.shape.b_r
    }

    /// `H(x)`; exactly zero outside the open support.
    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// `H^{(j)}(x)` for `j ≤ max(r, 1)`; exactly zero outside the open support.
    pub fn derivative(&self, x: f64, j: u32) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        let u = (x - self.center) / self.radius;
        let c = &self.shape.derivs[j as usize];
        self.height * horner(c, u) / math::powi(self.radius, j)
    }

    /// `∫ H = h·ρ·I_r`.
    pub fn integral(&self) -> f64 {
        self.height * self.radius * self.shape.integral
    }
}

/// A sum of bumps with pairwise disjoint open supports.
#[derive(Debug, Clone, Default)]
pub struct BumpSum {
    bumps: Vec<Bump>,
}

impl BumpSum {
    /// One bump on every gap `[x_i, x_{i+1}]` of the sorted, deduplicated
    /// `points`; zero-width gaps are skipped. Heights follow [`bump`] with the
    /// derivative cap `d1` and the additional slope cap `l1`.
    pub fn on_gaps(r: u32, points: &[f64], m1: f64, l1: f64, d1: f64) -> Self {
        let shape = Arc::new(PsiShape::new(r));
        // The first-derivative sup is at most B_r, so capping by min(L1, D1)
        // bounds the Lipschitz constant by L1 as well.
        let slope = l1.min(d1);
        let bumps = points
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Bump::with_shape(shape.clone(), r, w[0], w[1], m1, slope))
            .collect();
        Self { bumps }
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    fn locate(&self, x: f64) -> Option<&Bump> {
        let i = self.bumps.partition_point(|b| b.hi <= x);
        self.bumps.get(i).filter(|b| b.lo < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |b| b.eval(x))
    }

    pub fn derivative(&self, x: f64, j: u32) -> f64 {
        self.locate(x).map_or(0.0, |b| b.derivative(x, j))
    }

    pub fn integral(&self) -> f64 {
        self.bumps.iter().map(Bump::integral).sum()
    }
}
