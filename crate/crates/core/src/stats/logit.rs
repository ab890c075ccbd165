//! Logistic regression by iteratively reweighted least squares, with
//! standard errors clustered by participant.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::math::{exp, ln, normal_sf, sqrt};

pub const MAX_ITERATIONS: usize = 100;
pub const GRADIENT_TOLERANCE: f64 = 1e-10;
/// Coefficient norm beyond which the fit is declared separated.
pub const SEPARATION_NORM: f64 = 1e6;
/// A fitted probability this close to its 0/1 outcome marks quasi-complete
/// separation: the likelihood keeps rising as coefficients diverge.
pub const PERFECT_FIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitResult {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub z_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub converged: bool,
    pub separated: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
    pub gradient_norm: f64,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + exp(-t))
    } else {
        let e = exp(t);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + ln(1.0 + exp(-t))
    } else {
        ln(1.0 + exp(t))
    }
}

/// Bernoulli log-likelihood of coefficients `beta`.
pub fn log_likelihood(x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y).map(|(&e, &yi)| yi * e - softplus(e)).sum()
}

/// Score `Xᵀ(y - μ)`.
pub fn gradient(x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> DVector<f64> {
    let eta = x * beta;
    let resid = DVector::from_iterator(y.len(), eta.iter().zip(y).map(|(&e, &yi)| yi - sigmoid(e)));
    x.transpose() * resid
}

/// Observed information `Xᵀ W X` with `W = μ(1 - μ)`.
pub fn information(x: &DMatrix<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    let eta = x * beta;
    let mut xw = x.clone();
    for (i, &e) in eta.iter().enumerate() {
        let mu = sigmoid(e);
        xw.row_mut(i).scale_mut(mu * (1.0 - mu));
    }
    x.transpose() * xw
}

/// Fits `P(y = 1) = σ(x β)` with rows of `design` as observations.
pub fn logit_fit(design: &[Vec<f64>], y: &[u8], clusters: &[u64]) -> Result<LogitResult, StatsError> {
    let n = design.len();
    if n == 0 || y.len() != n || clusters.len() != n {
        return Err(StatsError::Dimension("design, y and clusters must have the same nonzero length".into()));
    }
    let k = design[0].len();
    if k == 0 || design.iter().any(|r| r.len() != k) {
        return Err(StatsError::Ragged);
    }
    if y.iter().any(|&v| v > 1) {
        return Err(StatsError::NotBinary);
    }
    let mut ids: Vec<u64> = clusters.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(StatsError::TooFewClusters);
    }
    let x = DMatrix::from_fn(n, k, |i, j| design[i][j]);
    let sv = x.clone().singular_values();
    let smax = sv.max();
    if n < k || sv.iter().any(|&s| s <= smax * 1e-10) {
        return Err(StatsError::RankDeficient);
    }
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();

    let mut beta = DVector::zeros(k);
    let mut ll = log_likelihood(&x, &yf, &beta);
    let mut converged = false;
    let mut iterations = 0;
    let mut g = gradient(&x, &yf, &beta);
    for it in 1..=MAX_ITERATIONS {
        iterations = it;
        if g.norm() <= GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        let Some(chol) = information(&x, &beta).cholesky() else { break };
        let step = chol.solve(&g);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = &beta + &step * scale;
            let trial_ll = log_likelihood(&x, &yf, &trial);
            if trial_ll >= ll - 1e-12 * (1.0 + ll.abs()) {
                beta = trial;
                ll = trial_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        g = gradient(&x, &yf, &beta);
        if beta.norm() > SEPARATION_NORM {
            break;
        }
        if !accepted {
            // No further progress is possible in floating point.
            converged = g.norm() <= 1e-8;
            break;
        }
    }
    if !converged && g.norm() <= GRADIENT_TOLERANCE && beta.norm() <= SEPARATION_NORM {
        converged = true;
    }

    let eta = &x * &beta;
    let separated = beta.norm() > SEPARATION_NORM
        || eta.iter().zip(&yf).any(|(&e, &yi)| (yi - sigmoid(e)).abs() < PERFECT_FIT);
    converged &= !separated;

    let bread = information(&x, &beta).try_inverse().ok_or(StatsError::RankDeficient)?;
    let mut meat = DMatrix::zeros(k, k);
    for &id in &ids {
        let mut score = DVector::zeros(k);
        for i in (0..n).filter(|&i| clusters[i] == id) {
            let r = yf[i] - sigmoid(eta[i]);
            score += x.row(i).transpose() * r;
        }
        meat += &score * score.transpose();
    }
    let groups = ids.len() as f64;
    let factor = groups / (groups - 1.0) * (n as f64 - 1.0) / (n as f64 - k as f64);
    let cov = &bread * meat * &bread * factor;
    let std_errors: Vec<f64> = (0..k).map(|j| sqrt(cov[(j, j)].max(0.0))).collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let z_values: Vec<f64> = coefficients.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = z_values.iter().map(|z| (2.0 * normal_sf(z.abs())).min(1.0)).collect();
    Ok(LogitResult {
        coefficients,
        std_errors,
        z_values,
        p_values,
        converged,
        separated,
        iterations,
        log_likelihood: ll,
        gradient_norm: g.norm(),
    })
}
