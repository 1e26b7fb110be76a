use serde::{Deserialize, Serialize};

use super::ols::ols_fit;
use crate::error::{Error, Result};
use crate::numeric::{mean, sample_std};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinPoint {
    pub bin_index: usize,
    pub n: usize,
    pub x_mean: f64,
    pub y_mean: f64,
    pub y_stderr: f64,
}

/// `y = a x^2 + b x + c` fitted on the raw scatter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    /// Vertex `-b / 2a`; `None` when `a == 0`.
    pub peak_x: Option<f64>,
    /// `a < 0` with `p_a < 0.05`.
    pub inverted_u: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    pub bins: Vec<BinPoint>,
    pub fit: QuadraticFit,
}

/// Equal-count bins over `x` with mean and standard error of `y`, plus a
/// quadratic least-squares fit of all points.
///
/// Points are ordered by `x` (ties by input position); the first
/// `len % n_bins` bins take one extra point.
pub fn binned_curve_with_quadratic_fit(x: &[f64], y: &[f64], n_bins: usize) -> Result<CurveFit> {
    assert_eq!(x.len(), y.len(), "x and y must have the same length");
    if n_bins == 0 || x.len() < 3 * n_bins {
        return Err(Error::InsufficientData(format!(
            "{} points for {n_bins} bins (need at least {})",
            x.len(),
            3 * n_bins.max(1)
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::DegenerateX);
    }

    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]).then(i.cmp(&j)));
    let base = x.len() / n_bins;
    let extra = x.len() % n_bins;
    let mut bins = Vec::with_capacity(n_bins);
    let mut start = 0;
    for b in 0..n_bins {
        let len = base + usize::from(b < extra);
        let idx = &order[start..start + len];
        start += len;
        let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        bins.push(BinPoint {
            bin_index: b,
            n: len,
            x_mean: mean(&xs).expect("non-empty bin"),
            y_mean: mean(&ys).expect("non-empty bin"),
            y_stderr: sample_std(&ys).expect("bin has >= 3 points") / (len as f64).sqrt(),
        });
    }

    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let reg = ols_fit(y, &[("x", x.to_vec()), ("x_sq", sq)])?;
    let (lin, quad) = (&reg.coefficients[0], &reg.coefficients[1]);
    let a = quad.estimate;
    let b = lin.estimate;
    let fit = QuadraticFit {
        a,
        b,
        c: reg.intercept.estimate,
        p_a: quad.p,
        p_b: lin.p,
        p_c: reg.intercept.p,
        peak_x: (a != 0.0).then(|| -b / (2.0 * a)),
        inverted_u: a < 0.0 && quad.p < 0.05,
    };
    Ok(CurveFit { bins, fit })
}
