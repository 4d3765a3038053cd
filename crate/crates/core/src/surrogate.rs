//! Multivariate Pearson correlation between features and the surrogate entanglement built on it.

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::tensor::{AxisPartition, DenseTensor};

const PSD_CLAMP: f64 = 1e-12;

/// Centered feature columns with their covariance and its square root.
struct FeatureMoments {
    centered: Matrix,
    cov: Matrix,
    cov_sqrt: Matrix,
    degenerate: bool,
}

fn moments(ds: &Dataset, n: usize) -> Result<FeatureMoments> {
    let m = ds.n_instances();
    let d = ds.feature_dim();
    let mut mean = vec![0.0; d];
    let mut scale = 0.0;
    for i in 0..m {
        for (k, x) in ds.feature(i, n).iter().enumerate() {
            mean[k] += x / m as f64;
            scale += x * x / m as f64;
        }
    }
    let centered = Matrix::from_fn(m, d, |i, k| ds.feature(i, n)[k] - mean[k]);
    let cov = centered.transpose() * &centered / m as f64;
    let degenerate = cov.trace() <= 1e-24 * (1.0 + scale);
    let cov_sqrt = if degenerate {
        Matrix::zeros(d, d)
    } else {
        linalg::psd_sqrt(&cov, PSD_CLAMP)?
    };
    Ok(FeatureMoments {
        centered,
        cov,
        cov_sqrt,
        degenerate,
    })
}

/// `trace(cross-cov) / trace((cov_a cov_b)^{1/2})`. The trace of the principal root of the
/// product equals that of `(cov_a^{1/2} cov_b cov_a^{1/2})^{1/2}`, which is symmetric.
fn pearson_from_moments(a: &FeatureMoments, b: &FeatureMoments, m: usize) -> Result<f64> {
    let cross = (a.centered.transpose() * &b.centered).trace() / m as f64;
    let sandwich = &a.cov_sqrt * &b.cov * &a.cov_sqrt;
    let sym = (&sandwich + sandwich.transpose()) * 0.5;
    let (values, _) = linalg::symmetric_eigen(&sym)?;
    let trace: f64 = values.iter().map(|v| v.abs()).sum();
    let denom: f64 = values
        .iter()
        .map(|&v| if v > PSD_CLAMP * trace { v.sqrt() } else { 0.0 })
        .sum();
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok(cross / denom)
}

/// Multivariate Pearson correlation of features `a` and `b`. Constant features are an error.
pub fn multivariate_pearson(ds: &Dataset, a: usize, b: usize) -> Result<f64> {
    for f in [a, b] {
        if f >= ds.n_features() {
            return Err(Error::Argument(format!("feature {f} out of range")));
        }
    }
    let ma = moments(ds, a)?;
    if ma.degenerate {
        return Err(Error::DegenerateFeature { feature: a });
    }
    let mb = if a == b { None } else { Some(moments(ds, b)?) };
    let mb_ref = mb.as_ref().unwrap_or(&ma);
    if mb_ref.degenerate {
        return Err(Error::DegenerateFeature { feature: b });
    }
    pearson_from_moments(&ma, mb_ref, ds.n_instances())
}

/// Complete graph on the features with edge weights equal to pairwise correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationGraph {
    n: usize,
    weights: Vec<f64>,
}

impl CorrelationGraph {
    /// Builds a graph from a symmetric weight matrix given row-major; the diagonal is ignored.
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::Shape(format!(
                "{} weights for {n} vertices",
                weights.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if (weights[i * n + j] - weights[j * n + i]).abs() > 1e-12 {
                    return Err(Error::Argument(format!(
                        "weights not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, weights })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.n + b]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Surrogate entanglement of `subset` against every other vertex.
    pub fn surrogate(&self, subset: &[usize]) -> f64 {
        let mut inside = vec![false; self.n];
        for &v in subset {
            inside[v] = true;
        }
        subset
            .iter()
            .map(|&a| {
                (0..self.n)
                    .filter(|&b| !inside[b])
                    .map(|b| self.weight(a, b))
                    .sum::<f64>()
            })
            .sum()
    }

    /// Weight crossing between `part` and `rest`.
    pub fn cut_between(&self, part: &[usize], rest: &[usize]) -> f64 {
        part.iter()
            .map(|&a| rest.iter().map(|&b| self.weight(a, b)).sum::<f64>())
            .sum()
    }

    /// The weight matrix as a two-axis tensor, for export.
    pub fn to_tensor(&self) -> DenseTensor {
        DenseTensor::new(vec![self.n, self.n], self.weights.clone()).expect("square weight matrix")
    }
}

/// Pairwise correlation graph. Features with zero variance get weight 0 to every other feature.
pub fn build_correlation_graph(ds: &Dataset) -> Result<CorrelationGraph> {
    let n = ds.n_features();
    let m = ds.n_instances();
    let stats = (0..n)
        .into_par_iter()
        .map(|f| moments(ds, f))
        .collect::<Result<Vec<_>>>()?;
    let rows = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        Ok(if stats[a].degenerate { 0.0 } else { 1.0 })
                    } else if stats[a].degenerate || stats[b].degenerate {
                        Ok(0.0)
                    } else if b < a {
                        // Filled from the symmetric entry below.
                        Ok(f64::NAN)
                    } else {
                        pearson_from_moments(&stats[a], &stats[b], m)
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut weights: Vec<f64> = rows.into_iter().flatten().collect();
    for a in 0..n {
        for b in 0..a {
            weights[a * n + b] = weights[b * n + a];
        }
    }
    Ok(CorrelationGraph { n, weights })
}

/// `sum_{n in K, n' not in K} p_{n n'}` over row-major feature indices.
pub fn surrogate_entanglement(ds: &Dataset, part: &AxisPartition) -> Result<f64> {
    if part.n_axes() != ds.n_features() {
        return Err(Error::Partition(format!(
            "partition over {} features applied to a dataset with {}",
            part.n_axes(),
            ds.n_features()
        )));
    }
    let mut total = 0.0;
    for &a in part.subset() {
        for b in part.complement().subset() {
            total += multivariate_pearson(ds, a, *b)?;
        }
    }
    Ok(total)
}
