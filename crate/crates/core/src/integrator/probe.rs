use alloc::vec::Vec;

use super::solve::{Segment, Trajectory};
use super::stage::eval_rows;
use crate::error::{invalid, Error, Result};
use crate::instances::ProblemInstance;
use crate::math;

/// How the part of the error beyond the represented dimension is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailMode {
    /// Add the certified bound `sup_{j>D}|z^j(t)| · ‖(w_j)_{j>D}‖_p`.
    #[default]
    Certified,
    /// Measure `‖P_D(z(t) − l(t))‖` only.
    Projected,
}

const CHUNK: usize = 2048;

/// `(Σ |z_j − v_j|^p w_j, Σ |v_j − η_j|^p w_j)` over one chunk, summed from
/// the top index down in four interleaved lanes; absent inputs give 0.
fn weighted_sums(
    v: &[f64],
    z: Option<&[f64]>,
    eta: Option<&[f64]>,
    w: &[f64],
    p: f64,
) -> (f64, f64) {
    let n = v.len();
    let lanes = |x: &[f64], y: &[f64]| -> f64 {
        let (x, y, w) = (&x[..n], &y[..n], &w[..n]);
        let mut acc = [0.0f64; 4];
        if p == 2.0 {
            let xs = x.rchunks_exact(4);
            let head = xs.remainder().len();
            for ((xc, yc), wc) in xs.zip(y.rchunks_exact(4)).zip(w.rchunks_exact(4)) {
                for l in 0..4 {
                    let e = xc[l] - yc[l];
                    acc[l] += e * e * wc[l];
                }
            }
            for j in (0..head).rev() {
                let e = x[j] - y[j];
                acc[0] += e * e * w[j];
            }
        } else {
            for j in (0..n).rev() {
                let e = x[j] - y[j];
                if e != 0.0 {
                    acc[j % 4] += math::abs_pow(e, p) * w[j];
                }
            }
        }
        (acc[0] + acc[1]) + (acc[2] + acc[3])
    };
    let e = z.map_or(0.0, |z| lanes(z, v));
    let b = eta.map_or(0.0, |eta| lanes(v, eta));
    (e, b)
}

/// Smallest accepted number of samples per interval.
pub const MIN_SAMPLES: usize = 8;

/// Chebyshev–Lobatto points on `[0, 1]`; includes both endpoints.
pub fn lobatto_points(m: usize) -> Vec<f64> {
    let last = (m - 1) as f64;
    (0..m)
        .map(|i| {
            if i == 0 {
                0.0
            } else if i == m - 1 {
                1.0
            } else {
                0.5 * (1.0 - math::cos(core::f64::consts::PI * i as f64 / last))
            }
        })
        .collect()
}

/// Streaming sampler for the sup-norm error and the distance to the initial
/// value, fed one segment at a time.
#[derive(Debug)]
pub struct ErrorProbe<'a> {
    inst: &'a ProblemInstance,
    taus: Vec<f64>,
    tail: TailMode,
    track_error: bool,
    track_ball: bool,
    wp: Vec<f64>,
    eta: Vec<f64>,
    exact: Vec<f64>,
    vals: Vec<f64>,
    err_pow: f64,
    err_t: f64,
    ball_pow: f64,
    /// `(index, dim)` of the last observed segment.
    last: Option<(usize, usize)>,
}

impl<'a> ErrorProbe<'a> {
    /// Probe tracking the error against the exact solution.
    pub fn new(inst: &'a ProblemInstance, samples: usize, tail: TailMode) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(invalid("samples", "need at least 8 samples per interval"));
        }
        if !inst.has_exact() {
            return Err(Error::Unsupported("instance has no closed-form solution"));
        }
        let mut probe = Self::ball_only(inst, samples)?;
        probe.tail = tail;
        probe.track_error = true;
        Ok(probe)
    }

    /// Probe tracking only `sup_t ‖l(t) − η‖` (an upper bound that includes
    /// the tail of `η`).
    pub fn ball_only(inst: &'a ProblemInstance, samples: usize) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(invalid("samples", "need at least 8 samples per interval"));
        }
        Ok(Self {
            inst,
            taus: lobatto_points(samples),
            tail: TailMode::Certified,
            track_error: false,
            track_ball: true,
            wp: Vec::new(),
            eta: Vec::new(),
            exact: Vec::new(),
            vals: Vec::new(),
            err_pow: 0.0,
            err_t: f64::NAN,
            ball_pow: 0.0,
            last: None,
        })
    }

    /// Also track the ball distance on an error probe.
    pub fn with_ball(mut self, on: bool) -> Self {
        self.track_ball = on;
        self
    }

    fn grow(&mut self, d: usize) {
        let space = self.inst.space;
        while self.wp.len() < d {
            let j = self.wp.len() + 1;
            self.wp.push(space.weight_pow(j));
        }
        if self.track_ball {
            while self.eta.len() < d {
                let j = self.eta.len() + 1;
                self.eta.push(self.inst.initial(j));
            }
        }
    }

    pub fn observe(&mut self, seg: &Segment) -> Result<()> {
        let d = seg.dim();
        self.grow(d);
        let space = self.inst.space;
        let p = space.p();
        let m = self.taus.len();
        // τ = 0 repeats the previous segment's τ = 1 sample (same knot
        // values, same dimension), so it is skipped.
        let first = match self.last {
            Some((k, dim)) if k + 1 == seg.index() && dim == d => 1,
            _ => 0,
        };
        self.last = Some((seg.index(), d));
        let tail_w = space.tail_bound(d);
        let mut err = alloc::vec![0.0; m];
        let mut ball = alloc::vec![0.0; m];
        if self.track_error && self.tail == TailMode::Certified {
            for (i, e) in err.iter_mut().enumerate().skip(first) {
                let t = seg.start() + self.taus[i] * seg.step();
                let sup = self
                    .inst
                    .model
                    .exact_tail_sup(d, t)
                    .ok_or(Error::Unsupported(
                        "no certified tail for the exact solution",
                    ))?;
                *e = math::abs_pow(sup * tail_w, p);
            }
        }
        if self.track_ball {
            ball.fill(math::abs_pow(
                self.inst.model.initial_tail_sup(d) * tail_w,
                p,
            ));
        }
        let stride = seg.stride();
        self.vals.resize(CHUNK.min(d), 0.0);
        self.exact.resize(CHUNK.min(d), 0.0);
        // Chunks from the top index down, so every component block stays in
        // cache while all sample times are processed.
        let mut hi = d;
        while hi > 0 {
            let lo = hi.saturating_sub(CHUNK);
            let len = hi - lo;
            let rows = &seg.coeffs()[lo * stride..hi * stride];
            let wp = &self.wp[lo..hi];
            for i in first..m {
                let tau = self.taus[i];
                let vals = &mut self.vals[..len];
                eval_rows(rows, stride, &tau, vals);
                let exact = if self.track_error {
                    let t = seg.start() + tau * seg.step();
                    let exact = &mut self.exact[..len];
                    if !self.inst.model.exact_range(t, lo + 1, exact) {
                        return Err(Error::Unsupported("instance has no closed-form solution"));
                    }
                    Some(&*exact)
                } else {
                    None
                };
                let eta = self.track_ball.then(|| &self.eta[lo..hi]);
                let (e, b) = weighted_sums(vals, exact, eta, wp, p);
                err[i] += e;
                ball[i] += b;
            }
            hi = lo;
        }
        for i in first..m {
            if self.track_error && (err[i] > self.err_pow || self.err_t.is_nan()) {
                self.err_pow = err[i];
                self.err_t = seg.start() + self.taus[i] * seg.step();
            }
            if self.track_ball && ball[i] > self.ball_pow {
                self.ball_pow = ball[i];
            }
        }
        Ok(())
    }

    /// Largest sampled error `‖z(t) − l(t)‖`.
    pub fn sup_error(&self) -> f64 {
        math::root(self.err_pow, self.inst.space.p())
    }

    /// Time at which [`sup_error`](Self::sup_error) was attained.
    pub fn argmax(&self) -> f64 {
        self.err_t
    }

    /// Largest sampled `‖l(t) − η‖` bound.
    pub fn ball_sup(&self) -> f64 {
        math::root(self.ball_pow, self.inst.space.p())
    }
}

/// `max` over sampled `t` of `‖z(t) − l(t)‖`, with `samples` Chebyshev–Lobatto
/// points per interval.
pub fn sup_error(
    traj: &Trajectory,
    inst: &ProblemInstance,
    samples: usize,
    tail: TailMode,
) -> Result<f64> {
    let mut probe = ErrorProbe::new(inst, samples, tail)?.with_ball(false);
    for seg in traj.segments() {
        probe.observe(seg)?;
    }
    Ok(probe.sup_error())
}

/// `max` over sampled `t` of the bound on `‖l(t) − η‖`.
pub fn ball_sup(traj: &Trajectory, inst: &ProblemInstance, samples: usize) -> Result<f64> {
    let mut probe = ErrorProbe::ball_only(inst, samples)?;
    for seg in traj.segments() {
        probe.observe(seg)?;
    }
    Ok(probe.ball_sup())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lobatto_points_nest() {
        let a = lobatto_points(9);
        let b = lobatto_points(17);
        assert_eq!(a[0], 0.0);
        assert_eq!(a[8], 1.0);
        for (i, x) in a.iter().enumerate() {
            assert_eq!(*x, b[2 * i]);
        }
    }
}
