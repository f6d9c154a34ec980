use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

/// Least-squares order estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    /// Slope of `log(error)` against `log(1/n)`.
    pub slope: f64,
    pub intercept: f64,
    /// `log(e_i/e_{i+1}) / log(n_{i+1}/n_i)` for adjacent pairs; the plain
    /// `log₂` error ratio when `n` doubles.
    pub local: Vec<f64>,
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("points", "need at least two paired values"));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(invalid("points", "values must be positive and finite"));
    }
    let lx: Vec<f64> = xs.iter().map(|&x| math::log(x)).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| math::log(y)).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(invalid("points", "abscissae must not all coincide"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Empirical convergence order from `(n, error)` pairs.
pub fn fit_order(pairs: &[(f64, f64)]) -> Result<OrderFit> {
    if pairs.len() < 3 {
        return Err(invalid("pairs", "need at least three (n, error) pairs"));
    }
    if pairs.iter().any(|&(_, e)| !(e > 0.0 && e.is_finite())) {
        return Err(invalid("error", "errors must be positive and finite"));
    }
    if pairs.iter().any(|&(n, _)| !(n > 0.0 && n.is_finite())) {
        return Err(invalid("n", "step counts must be positive"));
    }
    let inv: Vec<f64> = pairs.iter().map(|&(n, _)| 1.0 / n).collect();
    let errs: Vec<f64> = pairs.iter().map(|&(_, e)| e).collect();
    let (slope, intercept) = loglog_slope(&inv, &errs)?;
    let local = pairs
        .windows(2)
        .map(|w| math::log(w[0].1 / w[1].1) / math::log(w[1].0 / w[0].0))
        .collect();
    Ok(OrderFit {
        slope,
        intercept,
        local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&n| (n, 3.0 / (n * n)))
            .collect();
        let fit = fit_order(&pairs).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.local.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn constant_errors() {
        let fit = fit_order(&[(1.0, 0.5), (2.0, 0.5), (4.0, 0.5)]).unwrap();
        assert!(fit.slope.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_order(&[(1.0, 0.5), (2.0, 0.0), (4.0, 0.1)]).is_err());
        assert!(fit_order(&[(1.0, 0.5), (2.0, 0.2)]).is_err());
    }
}
