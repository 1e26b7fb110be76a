//! Ordinary least squares with classical standard errors.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::numeric::exact_sum;

pub const INTERCEPT: &str = "intercept";

/// Named columns with possibly missing values, all of the same length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CovariateTable {
    columns: BTreeMap<String, Vec<Option<f64>>>,
    n_rows: usize,
}

impl CovariateTable {
    pub fn new(n_rows: usize) -> Self {
        Self {
            columns: BTreeMap::new(),
            n_rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Adds or replaces a column. Panics if the length differs from the table's.
    pub fn insert(&mut self, name: &str, values: Vec<Option<f64>>) {
        assert_eq!(values.len(), self.n_rows, "column `{name}` has the wrong length");
        self.columns.insert(name.to_string(), values);
    }

    pub fn insert_complete(&mut self, name: &str, values: Vec<f64>) {
        self.insert(name, values.into_iter().map(Some).collect());
    }

    pub fn column(&self, name: &str) -> Result<&[Option<f64>]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    /// Rows where every listed column has a finite value.
    pub fn complete_rows(&self, names: &[&str]) -> Result<Vec<usize>> {
        let cols: Vec<&[Option<f64>]> = names.iter().map(|n| self.column(n)).collect::<Result<_>>()?;
        Ok((0..self.n_rows)
            .filter(|&i| cols.iter().all(|c| c[i].is_some_and(f64::is_finite)))
            .collect())
    }

    pub fn restrict(&self, rows: &[usize]) -> CovariateTable {
        CovariateTable {
            columns: self
                .columns
                .iter()
                .map(|(k, v)| (k.clone(), rows.iter().map(|&i| v[i]).collect()))
                .collect(),
            n_rows: rows.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegressionSpec {
    pub model_id: u32,
    pub dependent: String,
    pub regressors: Vec<String>,
}

impl RegressionSpec {
    pub fn new(model_id: u32, dependent: &str, regressors: &[&str]) -> Self {
        Self {
            model_id,
            dependent: dependent.to_string(),
            regressors: regressors.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for r in &self.regressors {
            if !seen.insert(r.as_str()) {
                return Err(Error::InvalidSpec(format!("regressor `{r}` listed twice")));
            }
            if r == &self.dependent {
                return Err(Error::InvalidSpec(format!("`{r}` is both dependent and regressor")));
            }
        }
        if seen.contains(super::vars::AVE_DISTANCE_SQ) && !seen.contains(super::vars::AVE_DISTANCE) {
            return Err(Error::InvalidSpec("squared distance term without the linear term".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub variable: String,
    pub estimate: f64,
    pub std_err: f64,
    pub t: f64,
    pub p: f64,
}

impl Coefficient {
    pub fn stars(&self) -> &'static str {
        significance_stars(self.p)
    }
}

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub model_id: u32,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub r2: f64,
    pub n_observations: usize,
    pub n_dropped: usize,
    pub residual_df: usize,
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, variable: &str) -> Option<&Coefficient> {
        if variable == INTERCEPT {
            return Some(&self.intercept);
        }
        self.coefficients.iter().find(|c| c.variable == variable)
    }
}

/// Fits `spec` on the complete-case rows of `table`.
pub fn ols_regress(spec: &RegressionSpec, table: &CovariateTable) -> Result<RegressionResult> {
    spec.validate()?;
    let mut names: Vec<&str> = vec![spec.dependent.as_str()];
    names.extend(spec.regressors.iter().map(String::as_str));
    let rows = table.complete_rows(&names)?;
    let pick = |name: &str| -> Result<Vec<f64>> {
        let col = table.column(name)?;
        Ok(rows.iter().map(|&i| col[i].expect("complete row")).collect())
    };
    let y = pick(&spec.dependent)?;
    let columns: Vec<(&str, Vec<f64>)> = spec
        .regressors
        .iter()
        .map(|r| Ok((r.as_str(), pick(r)?)))
        .collect::<Result<_>>()?;
    let mut fit = ols_fit(&y, &columns)?;
    fit.model_id = spec.model_id;
    fit.n_dropped = table.n_rows() - rows.len();
    Ok(fit)
}

/// Least squares of `y` on an intercept plus `columns`, by Householder QR.
pub fn ols_fit(y: &[f64], columns: &[(&str, Vec<f64>)]) -> Result<RegressionResult> {
    let n = y.len();
    let k = columns.len();
    let p = k + 1;
    if n < k + 2 {
        return Err(Error::TooFewRows { rows: n, regressors: k });
    }
    let mut names = vec![INTERCEPT];
    names.extend(columns.iter().map(|(name, _)| *name));
    let mut x: Vec<Vec<f64>> = Vec::with_capacity(p);
    x.push(vec![1.0; n]);
    for (name, col) in columns {
        assert_eq!(col.len(), n, "column `{name}` has the wrong length");
        x.push(col.clone());
    }
    let original = x.clone();
    let norms: Vec<f64> = x.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();

    let mut qty = y.to_vec();
    for j in 0..p {
        let alpha = {
            let col = &x[j][j..];
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if col[0] > 0.0 {
                -norm
            } else {
                norm
            }
        };
        // residual norm of column j after projecting out columns 0..j
        if norms[j] == 0.0 || alpha.abs() <= 1e-10 * norms[j] {
            return Err(rank_error(&names, &x, j));
        }
        let mut v: Vec<f64> = x[j][j..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|a| a * a).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vv;
            for (c, a) in col.iter_mut().zip(&v) {
                *c -= s * a;
            }
        };
        for col in x.iter_mut().skip(j) {
            reflect(&mut col[j..]);
        }
        reflect(&mut qty[j..]);
    }
    // x now holds R in its upper triangle (column-major)
    let r: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| if j >= i { x[j][i] } else { 0.0 }).collect())
        .collect();

    let beta = back_substitute(&r, &qty[..p]);
    let fitted: Vec<f64> = (0..n)
        .map(|i| exact_sum((0..p).map(|j| original[j][i] * beta[j])))
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let ssr = exact_sum(residuals.iter().map(|e| e * e));
    let y_mean = exact_sum(y.iter().copied()) / n as f64;
    let sst = exact_sum(y.iter().map(|v| (v - y_mean) * (v - y_mean)));
    let r2 = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 1.0 };

    let df = n - p;
    let sigma2 = ssr / df as f64;
    let r_inv = invert_upper(&r);
    let t_dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    let coefficient = |j: usize| {
        let var: f64 = (j..p).map(|c| r_inv[j][c] * r_inv[j][c]).sum::<f64>() * sigma2;
        let std_err = var.sqrt();
        let t = beta[j] / std_err;
        let p_value = if t.is_nan() {
            1.0
        } else if t.is_infinite() {
            0.0
        } else {
            (2.0 * t_dist.sf(t.abs())).clamp(0.0, 1.0)
        };
        Coefficient {
            variable: names[j].to_string(),
            estimate: beta[j],
            std_err,
            t,
            p: p_value,
        }
    };
    Ok(RegressionResult {
        model_id: 0,
        intercept: coefficient(0),
        coefficients: (1..p).map(coefficient).collect(),
        r2,
        n_observations: n,
        n_dropped: 0,
        residual_df: df,
        residuals,
    })
}

fn back_substitute(r: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let p = b.len();
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / r[i][i];
    }
    x
}

fn invert_upper(r: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = r.len();
    let mut inv = vec![vec![0.0; p]; p];
    for col in 0..p {
        let mut e = vec![0.0; p];
        e[col] = 1.0;
        let x = back_substitute(r, &e);
        for row in 0..p {
            inv[row][col] = x[row];
        }
    }
    inv
}

/// Names the earlier columns that column `j` is (numerically) a combination of.
fn rank_error(names: &[&str], x: &[Vec<f64>], j: usize) -> Error {
    let top: Vec<Vec<f64>> = (0..j)
        .map(|i| (0..j).map(|c| if c >= i { x[c][i] } else { 0.0 }).collect())
        .collect();
    let rhs: Vec<f64> = (0..j).map(|i| x[j][i]).collect();
    let weights = if j > 0 { back_substitute(&top, &rhs) } else { Vec::new() };
    let scale = weights.iter().fold(0.0f64, |m, w| m.max(w.abs())).max(1e-300);
    let others = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| w.abs() > 1e-8 * scale)
        .map(|(i, _)| names[i].to_string())
        .collect();
    Error::RankDeficient {
        column: names[j].to_string(),
        others,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_line() {
        let x: Vec<f64> = (0..5).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 2.0 * v).collect();
        let fit = ols_fit(&y, &[("x", x)]).unwrap();
        assert!((fit.intercept.estimate - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[0].estimate - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_standard_errors() {
        // y = b0 + b1 x on five points, checked against the closed form
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![2.0, 4.1, 5.9, 8.2, 9.8];
        let fit = ols_fit(&y, &[("x", x.clone())]).unwrap();
        let n = 5.0;
        let xm = 3.0;
        let ym = y.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let b1 = sxy / sxx;
        let b0 = ym - b1 * xm;
        let ssr: f64 = x.iter().zip(&y).map(|(a, b)| (b - b0 - b1 * a).powi(2)).sum();
        let s2 = ssr / (n - 2.0);
        let se1 = (s2 / sxx).sqrt();
        let se0 = (s2 * (1.0 / n + xm * xm / sxx)).sqrt();
        let c = &fit.coefficients[0];
        assert!((c.estimate - b1).abs() < 1e-12);
        assert!((c.std_err - se1).abs() < 1e-12);
        assert!((fit.intercept.std_err - se0).abs() < 1e-12);
        assert_eq!(fit.residual_df, 3);
        // t = b1/se1 with 3 df; p from the t distribution
        let t = b1 / se1;
        let expect_p = 2.0 * StudentsT::new(0.0, 1.0, 3.0).unwrap().sf(t);
        assert!((c.p - expect_p).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_names_columns() {
        let a: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let b: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - y).collect();
        let y: Vec<f64> = (0..10).map(|i| (i % 3) as f64).collect();
        match ols_fit(&y, &[("a", a), ("b", b), ("c", c)]) {
            Err(Error::RankDeficient { column, others }) => {
                assert_eq!(column, "c");
                assert_eq!(others, ["a", "b"]);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        let constant = vec![4.0; 10];
        assert!(matches!(
            ols_fit(&[1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 0.0], &[("k", constant)]),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn too_few_rows_and_missing_values() {
        assert!(matches!(
            ols_fit(&[1.0, 2.0], &[("x", vec![0.0, 1.0])]),
            Err(Error::TooFewRows { .. })
        ));
        let mut t = CovariateTable::new(6);
        t.insert("y", vec![Some(1.0), Some(3.0), None, Some(7.0), Some(9.0), Some(11.0)]);
        t.insert("x", vec![Some(0.0), Some(1.0), Some(2.0), Some(3.0), Some(f64::NAN), Some(5.0)]);
        let fit = ols_regress(&RegressionSpec::new(1, "y", &["x"]), &t).unwrap();
        assert_eq!(fit.n_observations, 4);
        assert_eq!(fit.n_dropped, 2);
        assert!((fit.coefficients[0].estimate - 2.0).abs() < 1e-12);
        assert!(matches!(
            ols_regress(&RegressionSpec::new(1, "y", &["nope"]), &t),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(RegressionSpec::new(1, "y", &["x", "x"]).validate().is_err());
        assert!(RegressionSpec::new(1, "y", &["ave_distance_sq"]).validate().is_err());
        assert!(RegressionSpec::new(1, "y", &["ave_distance", "ave_distance_sq"]).validate().is_ok());
    }
}
