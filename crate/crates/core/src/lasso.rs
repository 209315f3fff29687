//! L1-penalised least squares by cyclic coordinate descent, with random
//! λ search and nested cross-validation.
//!
//! Objective: (1/(2n))·‖y − β₀ − Xβ‖² + λ·‖β‖₁ with an unpenalised intercept.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

/// Rectangular row-major matrix with named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub n: usize,
    pub p: usize,
    pub values: Vec<f64>,
    pub col_names: Vec<String>,
    /// Set when the matrix is the output of a standardisation.
    pub standardization: Option<Vec<ColumnScale>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    /// Constant columns are mapped to zeros.
    pub constant: bool,
}

impl FeatureMatrix {
    pub fn from_rows(rows: &[Vec<f64>], col_names: Vec<String>) -> Result<Self> {
        let p = col_names.len();
        let mut values = Vec::with_capacity(rows.len() * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::Ragged {
                    expected: p,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            values.extend_from_slice(row);
        }
        Ok(FeatureMatrix {
            n: rows.len(),
            p,
            values,
            col_names,
            standardization: None,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(rows.len() * self.p);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            n: rows.len(),
            p: self.p,
            values,
            col_names: self.col_names.clone(),
            standardization: self.standardization.clone(),
        }
    }
}

/// Per-column mean and population standard deviation.
pub fn fit_scales(x: &FeatureMatrix) -> Result<Vec<ColumnScale>> {
    if x.n < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.n,
        });
    }
    Ok((0..x.p)
        .map(|j| {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / x.n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.n as f64;
            let sd = var.sqrt();
            ColumnScale {
                mean,
                sd,
                constant: sd <= 1e-12 * mean.abs().max(1.0),
            }
        })
        .collect())
}

pub fn apply_scales(x: &FeatureMatrix, scales: &[ColumnScale]) -> Result<FeatureMatrix> {
    if scales.len() != x.p {
        return Err(Error::Ragged {
            expected: x.p,
            got: scales.len(),
        });
    }
    let mut values = x.values.clone();
    for row in values.chunks_mut(x.p.max(1)) {
        for (v, s) in row.iter_mut().zip(scales) {
            *v = if s.constant {
                0.0
            } else {
                (*v - s.mean) / s.sd
            };
        }
    }
    Ok(FeatureMatrix {
        values,
        standardization: Some(scales.to_vec()),
        ..x.clone()
    })
}

/// Zero mean, unit population variance per column; constant columns become
/// zeros and are flagged in the recorded scales.
pub fn standardize(x: &FeatureMatrix) -> Result<FeatureMatrix> {
    apply_scales(x, &fit_scales(x)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    pub n_iter: usize,
    pub converged: bool,
}

impl LassoModel {
    pub fn predict(&self, x: &FeatureMatrix) -> Vec<f64> {
        (0..x.n)
            .map(|i| {
                self.intercept
                    + x.row(i)
                        .iter()
                        .zip(&self.coefficients)
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
            })
            .collect()
    }
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

// Shared by the fit and by lambda_max so both see identical rounding.
fn col_dot_over_n(x: &FeatureMatrix, j: usize, r: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, ri) in r.iter().enumerate() {
        s += x.get(i, j) * ri;
    }
    s / x.n as f64
}

fn centered(y: &[f64]) -> Vec<f64> {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| v - mean).collect()
}

/// Smallest λ giving the all-zero solution: max_j |x_jᵀ(y − ȳ)|/n.
pub fn lambda_max(x: &FeatureMatrix, y: &[f64]) -> f64 {
    let r = centered(y);
    (0..x.p)
        .map(|j| col_dot_over_n(x, j, &r).abs())
        .fold(0.0, f64::max)
}

/// Penalised objective for a given model.
pub fn objective(x: &FeatureMatrix, y: &[f64], model: &LassoModel) -> f64 {
    let pred = model.predict(x);
    let sse: f64 = y.iter().zip(&pred).map(|(a, b)| (a - b).powi(2)).sum();
    sse / (2.0 * x.n as f64)
        + model.lambda * model.coefficients.iter().map(|b| b.abs()).sum::<f64>()
}

/// Per-coordinate gradients g_j = x_jᵀr/n at the model's residual.
pub fn gradients(x: &FeatureMatrix, y: &[f64], model: &LassoModel) -> Vec<f64> {
    let r: Vec<f64> = y.iter().zip(model.predict(x)).map(|(a, b)| a - b).collect();
    (0..x.p).map(|j| col_dot_over_n(x, j, &r)).collect()
}

/// Cyclic coordinate descent. Each sweep refits the intercept, then every
/// coefficient in column order; stops when no parameter moves by `tol` or
/// more. Columns of all zeros keep a zero coefficient.
pub fn lasso_fit(
    x: &FeatureMatrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> Result<LassoModel> {
    lasso_fit_traced(x, y, lambda, tol, max_sweeps, |_| {})
}

/// As [`lasso_fit`], calling `on_sweep` with the model after every sweep.
pub fn lasso_fit_traced(
    x: &FeatureMatrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
    mut on_sweep: impl FnMut(&LassoModel),
) -> Result<LassoModel> {
    if y.len() != x.n {
        return Err(Error::Ragged {
            expected: x.n,
            got: y.len(),
        });
    }
    if x.n == 0 {
        return Err(Error::Empty);
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda {lambda} must be finite and non-negative"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol {tol} must be positive"
        )));
    }
    if y.iter().chain(&x.values).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = x.n as f64;
    // The null model is optimal here; returning it directly keeps rounding
    // in the intercept from nudging a coefficient off zero.
    if lambda >= lambda_max(x, y) {
        let model = LassoModel {
            coefficients: vec![0.0; x.p],
            intercept: y.iter().sum::<f64>() / n,
            lambda,
            n_iter: 1,
            converged: true,
        };
        on_sweep(&model);
        return Ok(model);
    }
    let norms: Vec<f64> = (0..x.p)
        .map(|j| (0..x.n).map(|i| x.get(i, j).powi(2)).sum::<f64>() / n)
        .collect();
    let mut model = LassoModel {
        coefficients: vec![0.0; x.p],
        intercept: 0.0,
        lambda,
        n_iter: 0,
        converged: false,
    };
    let mut r = y.to_vec();
    while model.n_iter < max_sweeps {
        model.n_iter += 1;
        let shift = r.iter().sum::<f64>() / n;
        model.intercept += shift;
        r.iter_mut().for_each(|v| *v -= shift);
        let mut max_change = shift.abs();
        for j in 0..x.p {
            if norms[j] == 0.0 {
                continue;
            }
            let old = model.coefficients[j];
            let rho = col_dot_over_n(x, j, &r) + norms[j] * old;
            let new = soft_threshold(rho, lambda) / norms[j];
            let delta = new - old;
            if delta != 0.0 {
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri -= delta * x.get(i, j);
                }
                model.coefficients[j] = new;
            }
            max_change = max_change.max(delta.abs());
        }
        on_sweep(&model);
        if max_change < tol {
            model.converged = true;
            break;
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMetric {
    Mse,
    Mae,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardization {
    /// Fit on each training split, apply to its held-out rows.
    PerFold,
    /// Standardise the whole matrix once up front.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NestedCvConfig {
    pub k_outer: usize,
    pub k_inner: usize,
    pub n_draws: usize,
    pub lambda_range: (f64, f64),
    pub metric: InnerMetric,
    pub standardization: Standardization,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for NestedCvConfig {
    fn default() -> Self {
        NestedCvConfig {
            k_outer: 5,
            k_inner: 3,
            n_draws: 500,
            lambda_range: (0.0, 5.0),
            metric: InnerMetric::Mse,
            standardization: Standardization::PerFold,
            tol: DEFAULT_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

/// Contiguous folds of near-equal size, larger folds first.
pub fn kfold_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn contiguous_folds(n: usize, k: usize) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    kfold_sizes(n, k)
        .into_iter()
        .map(|len| {
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

fn score(y: &[f64], pred: &[f64], metric: InnerMetric) -> f64 {
    let n = y.len() as f64;
    match metric {
        InnerMetric::Mse => {
            y.iter()
                .zip(pred)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / n
        }
        InnerMetric::Mae => y.iter().zip(pred).map(|(a, b)| (a - b).abs()).sum::<f64>() / n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSearch {
    pub best_lambda: f64,
    pub best_score: f64,
    pub draws: Vec<f64>,
    pub scores: Vec<f64>,
}

/// Random search: `n_draws` uniform λ values, each scored by contiguous
/// k-fold CV on the given rows; lowest mean score wins, ties to smaller λ.
/// With [`Standardization::PerFold`] every inner split is standardised on
/// its own training part.
pub fn lambda_search<R: Rng>(
    x: &FeatureMatrix,
    y: &[f64],
    cfg: &NestedCvConfig,
    rng: &mut R,
) -> Result<LambdaSearch> {
    if x.n < cfg.k_inner.max(3) {
        return Err(Error::TooShort {
            needed: cfg.k_inner.max(3),
            got: x.n,
        });
    }
    if y.len() != x.n {
        return Err(Error::Ragged {
            expected: x.n,
            got: y.len(),
        });
    }
    let (lo, hi) = cfg.lambda_range;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bad lambda range [{lo}, {hi}]"
        )));
    }
    let draws: Vec<f64> = (0..cfg.n_draws)
        .map(|_| rng.random_range(lo..=hi))
        .collect();

    let mut splits = Vec::with_capacity(cfg.k_inner);
    for val in contiguous_folds(x.n, cfg.k_inner) {
        let train: Vec<usize> = (0..x.n).filter(|i| !val.contains(i)).collect();
        let val: Vec<usize> = val.collect();
        let (xt, xv) = (x.select_rows(&train), x.select_rows(&val));
        let (xt, xv) = match cfg.standardization {
            Standardization::PerFold => {
                let scales = fit_scales(&xt)?;
                (apply_scales(&xt, &scales)?, apply_scales(&xv, &scales)?)
            }
            Standardization::Global => (xt, xv),
        };
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let yv: Vec<f64> = val.iter().map(|&i| y[i]).collect();
        splits.push((xt, yt, xv, yv));
    }

    let mut scores = Vec::with_capacity(draws.len());
    let mut best: Option<(f64, f64)> = None;
    for &lambda in &draws {
        let mut total = 0.0;
        for (xt, yt, xv, yv) in &splits {
            let m = lasso_fit(xt, yt, lambda, cfg.tol, cfg.max_sweeps)?;
            total += score(yv, &m.predict(xv), cfg.metric);
        }
        let s = total / splits.len() as f64;
        scores.push(s);
        let better = match best {
            None => true,
            Some((bl, bs)) => s < bs || (s == bs && lambda < bl),
        };
        if better {
            best = Some((lambda, s));
        }
    }
    let (best_lambda, best_score) = best.ok_or(Error::Empty)?;
    Ok(LambdaSearch {
        best_lambda,
        best_score,
        draws,
        scores,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
    /// None when the targets have zero variance.
    pub r2: Option<f64>,
}

pub fn metrics(y_true: &[f64], y_pred: &[f64]) -> Result<Metrics> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Ragged {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    if y_true.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: y_true.len(),
        });
    }
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let sse: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    let sst: f64 = y_true.iter().map(|a| (a - mean).powi(2)).sum();
    Ok(Metrics {
        mae: y_true
            .iter()
            .zip(y_pred)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / n,
        rmse: (sse / n).sqrt(),
        r2: (sst > 0.0).then(|| 1.0 - sse / sst),
    })
}

pub fn average_coefficients(per_fold: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = per_fold.first().ok_or(Error::Empty)?;
    let mut avg = vec![0.0; first.len()];
    for v in per_fold {
        if v.len() != first.len() {
            return Err(Error::Ragged {
                expected: first.len(),
                got: v.len(),
            });
        }
        for (a, b) in avg.iter_mut().zip(v) {
            *a += b;
        }
    }
    avg.iter_mut().for_each(|a| *a /= per_fold.len() as f64);
    Ok(avg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub lambda: f64,
    pub inner_score: f64,
    /// On the standardised scale of this fold.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub scales: Vec<ColumnScale>,
    pub n_iter: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedCvReport {
    pub seed: u64,
    pub config: NestedCvConfig,
    pub col_names: Vec<String>,
    /// Outer test fold of every row.
    pub outer_fold_assignments: Vec<usize>,
    pub folds: Vec<FoldReport>,
    pub per_fold_lambda: Vec<f64>,
    pub per_fold_coefficients: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub out_of_fold_predictions: Vec<f64>,
    pub metrics: Metrics,
    pub avg_coefficients: Vec<f64>,
    pub avg_intercept: f64,
}

/// Name of the random stream feeding the λ draws of outer fold `k`.
pub fn lambda_stream_name(k: usize) -> String {
    format!("lambda-draws/fold-{k}")
}

pub const SHUFFLE_STREAM: &str = "outer-shuffle";

/// Shuffled row order used for the outer split.
pub fn outer_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed::stream(seed, SHUFFLE_STREAM));
    perm
}

/// Outer folds over a seeded shuffle; per fold, λ search and
/// standardisation use the training rows only.
pub fn nested_cv(
    x: &FeatureMatrix,
    y: &[f64],
    cfg: &NestedCvConfig,
    seed: u64,
) -> Result<NestedCvReport> {
    if y.len() != x.n {
        return Err(Error::Ragged {
            expected: x.n,
            got: y.len(),
        });
    }
    let needed = cfg.k_outer.max(5);
    if x.n < needed {
        return Err(Error::TooShort { needed, got: x.n });
    }
    let global_scales = fit_scales(x)?;
    let base = match cfg.standardization {
        Standardization::PerFold => x.clone(),
        Standardization::Global => apply_scales(x, &global_scales)?,
    };

    let perm = outer_permutation(x.n, seed);
    let mut assignments = vec![0; x.n];
    let mut predictions = vec![0.0; x.n];
    let mut folds = Vec::with_capacity(cfg.k_outer);
    for (k, range) in contiguous_folds(x.n, cfg.k_outer).into_iter().enumerate() {
        let test_rows: Vec<usize> = perm[range.clone()].to_vec();
        let train_rows: Vec<usize> = perm
            .iter()
            .enumerate()
            .filter(|(i, _)| !range.contains(i))
            .map(|(_, &r)| r)
            .collect();
        for &r in &test_rows {
            assignments[r] = k;
        }
        let x_train = base.select_rows(&train_rows);
        let y_train: Vec<f64> = train_rows.iter().map(|&i| y[i]).collect();

        let mut rng = seed::stream(seed, &lambda_stream_name(k));
        let search = lambda_search(&x_train, &y_train, cfg, &mut rng)?;

        let (x_train_s, x_test_s, scales) = match cfg.standardization {
            Standardization::PerFold => {
                let scales = fit_scales(&x_train)?;
                let test = base.select_rows(&test_rows);
                (
                    apply_scales(&x_train, &scales)?,
                    apply_scales(&test, &scales)?,
                    scales,
                )
            }
            Standardization::Global => {
                (x_train, base.select_rows(&test_rows), global_scales.clone())
            }
        };
        let model = lasso_fit(
            &x_train_s,
            &y_train,
            search.best_lambda,
            cfg.tol,
            cfg.max_sweeps,
        )?;
        for (&r, p) in test_rows.iter().zip(model.predict(&x_test_s)) {
            predictions[r] = p;
        }
        folds.push(FoldReport {
            fold: k,
            train_rows,
            test_rows,
            lambda: search.best_lambda,
            inner_score: search.best_score,
            coefficients: model.coefficients,
            intercept: model.intercept,
            scales,
            n_iter: model.n_iter,
            converged: model.converged,
        });
    }
    let per_fold_coefficients: Vec<Vec<f64>> =
        folds.iter().map(|f| f.coefficients.clone()).collect();
    Ok(NestedCvReport {
        seed,
        config: *cfg,
        col_names: x.col_names.clone(),
        outer_fold_assignments: assignments,
        per_fold_lambda: folds.iter().map(|f| f.lambda).collect(),
        avg_coefficients: average_coefficients(&per_fold_coefficients)?,
        avg_intercept: folds.iter().map(|f| f.intercept).sum::<f64>() / folds.len() as f64,
        per_fold_coefficients,
        metrics: metrics(y, &predictions)?,
        y: y.to_vec(),
        out_of_fold_predictions: predictions,
        folds,
    })
}
