//! Datasets of feature vectors, the empirical data tensor, and its entanglement computed from
//! instance Gram matrices.
//!
//! The Gram route never forms the `prod_n D_n` sized data tensor: for a feature subset `K` it
//! builds the `M x M` matrices `G_K[i,j] = y_i y_j prod_{n in K} <x_{n,i}, x_{n,j}>` and
//! `G_Kc[i,j] = prod_{n not in K} <x_{n,i}, x_{n,j}>`, and reads the entanglement off the
//! singular values of `S_K^{1/2} U_K^T U_Kc S_Kc^{1/2}` built from their eigendecompositions.
//! Time is `O(D N M^2 + M^3)` and memory `O(D N M + M^2)` per partition.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::partitions::{
    canonical_partitions_in_levels, exact_log2, CanonicalPartition, CompatibleMap,
};
use crate::tensor::{AxisPartition, DenseTensor};
use crate::tree_tn::fit_hierarchical;

/// Default sine-cosine embedding frequency.
pub const DEFAULT_THETA: f64 = 0.085;

/// Gram eigenvalues below this fraction of the trace are treated as zero.
pub const GRAM_EIGEN_CLAMP: f64 = 1e-12;

/// Negative Gram eigenvalues beyond this fraction of the trace indicate a numerical failure.
pub const GRAM_NEGATIVE_TOLERANCE: f64 = 1e-8;

/// `M` labeled or unlabeled instances, each made of `N` feature vectors of length `D`.
///
/// For `P > 1` the features sit on an `N^{1/P}`-sided grid and are indexed row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_instances: usize,
    n_features: usize,
    feature_dim: usize,
    spatial_dim: usize,
    /// Instance-major, then feature-major: `features[(m * N + n) * D + d]`.
    features: Vec<f64>,
    labels: Option<Vec<f64>>,
    padding: usize,
}

/// `(sin(pi theta x), cos(pi theta x))`, a unit vector for every finite `x`.
pub fn embed_sincos(x: f64, theta: f64) -> [f64; 2] {
    let (s, c) = (std::f64::consts::PI * theta * x).sin_cos();
    [s, c]
}

impl Dataset {
    pub fn new(
        n_features: usize,
        feature_dim: usize,
        spatial_dim: usize,
        features: Vec<f64>,
        labels: Option<Vec<f64>>,
    ) -> Result<Self> {
        if n_features == 0 || feature_dim == 0 || spatial_dim == 0 {
            return Err(Error::Shape(
                "feature count, feature dimension and P must be positive".into(),
            ));
        }
        let stride = n_features * feature_dim;
        if !features.len().is_multiple_of(stride) {
            return Err(Error::Shape(format!(
                "{} values do not divide into instances of {n_features} x {feature_dim}",
                features.len()
            )));
        }
        let n_instances = features.len() / stride;
        if n_instances == 0 {
            return Err(Error::Shape("dataset has no instances".into()));
        }
        if spatial_dim > 1 {
            grid_side(n_features, spatial_dim)?;
        }
        if let Some(labels) = &labels {
            if labels.len() != n_instances {
                return Err(Error::Shape(format!(
                    "{} labels for {n_instances} instances",
                    labels.len()
                )));
            }
            if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
                return Err(Error::Argument(format!("label {bad} is not +1 or -1")));
            }
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("dataset contains non-finite values".into()));
        }
        Ok(Self {
            n_instances,
            n_features,
            feature_dim,
            spatial_dim,
            features,
            labels,
            padding: 0,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.n_instances
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn spatial_dim(&self) -> usize {
        self.spatial_dim
    }

    /// Number of constant features appended by [`Dataset::pad_to_power_of_two`].
    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn raw_features(&self) -> &[f64] {
        &self.features
    }

    pub fn feature(&self, instance: usize, feature: usize) -> &[f64] {
        let start = (instance * self.n_features + feature) * self.feature_dim;
        &self.features[start..start + self.feature_dim]
    }

    pub fn with_labels(mut self, labels: Option<Vec<f64>>) -> Result<Self> {
        let padding = self.padding;
        self = Dataset::new(
            self.n_features,
            self.feature_dim,
            self.spatial_dim,
            self.features,
            labels,
        )?;
        self.padding = padding;
        Ok(self)
    }

    /// Every feature vector has Euclidean norm at most one.
    pub fn is_normalized(&self) -> bool {
        self.features
            .chunks_exact(self.feature_dim)
            .all(|v| v.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12)
    }

    /// Grid side `N^{1/P}`; must be a power of two of at least 2 for canonical partitions.
    pub fn side(&self) -> Result<usize> {
        let side = grid_side(self.n_features, self.spatial_dim)?;
        match exact_log2(side) {
            Some(l) if l >= 1 => Ok(side),
            _ => Err(Error::Precondition(format!(
                "grid side {side} is not a power of two >= 2; pad the dataset first"
            ))),
        }
    }

    pub fn compatible_map(&self) -> Result<CompatibleMap> {
        CompatibleMap::new(self.side()?, self.spatial_dim)
    }

    /// Embeds every scalar component with the sine-cosine map. A feature vector of length `D`
    /// becomes the length-`2D` concatenation of embedded components scaled by `1/sqrt(D)`,
    /// so embedded vectors have unit norm.
    pub fn embed_sincos(&self, theta: f64) -> Dataset {
        let scale = 1.0 / (self.feature_dim as f64).sqrt();
        let features = self
            .features
            .iter()
            .flat_map(|&x| {
                let [s, c] = embed_sincos(x, theta);
                [s * scale, c * scale]
            })
            .collect();
        Dataset {
            feature_dim: 2 * self.feature_dim,
            features,
            labels: self.labels.clone(),
            ..*self
        }
    }

    /// Appends constant features (the last basis vector, `(0, 1)` for `D = 2`) until the
    /// feature count is a power of two. Only defined for one-dimensional layouts.
    pub fn pad_to_power_of_two(&self) -> Result<Dataset> {
        if self.spatial_dim != 1 {
            return Err(Error::Precondition(
                "padding is only defined for P = 1".into(),
            ));
        }
        let target = self.n_features.next_power_of_two().max(2);
        let extra = target - self.n_features;
        if extra == 0 {
            return Ok(self.clone());
        }
        let d = self.feature_dim;
        let mut constant = vec![0.0; d];
        constant[d - 1] = 1.0;
        let mut features = Vec::with_capacity(self.n_instances * target * d);
        for m in 0..self.n_instances {
            let start = m * self.n_features * d;
            features.extend_from_slice(&self.features[start..start + self.n_features * d]);
            for _ in 0..extra {
                features.extend_from_slice(&constant);
            }
        }
        Ok(Dataset {
            n_features: target,
            features,
            labels: self.labels.clone(),
            padding: self.padding + extra,
            ..*self
        })
    }

    /// Subset of instances, in the given order.
    pub fn select_instances(&self, rows: &[usize]) -> Result<Dataset> {
        let stride = self.n_features * self.feature_dim;
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_instances) {
            return Err(Error::Argument(format!("instance {bad} out of range")));
        }
        let features = rows
            .iter()
            .flat_map(|&r| self.features[r * stride..(r + 1) * stride].iter().copied())
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&r| l[r]).collect());
        let mut out = Dataset::new(
            self.n_features,
            self.feature_dim,
            self.spatial_dim,
            features,
            labels,
        )?;
        out.padding = self.padding;
        Ok(out)
    }

    /// Reorders feature columns: the feature at index `n` moves to `target[n]`.
    pub(crate) fn reorder_features(&self, target: &[usize]) -> Dataset {
        let d = self.feature_dim;
        let mut features = vec![0.0; self.features.len()];
        for m in 0..self.n_instances {
            for (n, &t) in target.iter().enumerate() {
                let src = (m * self.n_features + n) * d;
                let dst = (m * self.n_features + t) * d;
                features[dst..dst + d].copy_from_slice(&self.features[src..src + d]);
            }
        }
        Dataset {
            features,
            labels: self.labels.clone(),
            ..*self
        }
    }

    pub(crate) fn set_padding(&mut self, padding: usize) {
        self.padding = padding;
    }

    fn require_labels(&self) -> Result<&[f64]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::Precondition("operation needs a labeled dataset".into()))
    }
}

fn grid_side(n_features: usize, dim: usize) -> Result<usize> {
    let side = (n_features as f64).powf(1.0 / dim as f64).round() as usize;
    if side.checked_pow(dim as u32) != Some(n_features) {
        return Err(Error::Shape(format!(
            "{n_features} features do not form a {dim}-dimensional cubic grid"
        )));
    }
    Ok(side)
}

/// `(1/M) sum_m y_m (x) x_{n,m}` with axes ordered by the dataset's compatible map.
pub fn empirical_data_tensor_dense(ds: &Dataset, budget: u64) -> Result<DenseTensor> {
    let labels = ds.require_labels()?;
    let map = if ds.spatial_dim == 1 && !ds.n_features.is_power_of_two() {
        None
    } else {
        Some(ds.compatible_map()?)
    };
    let n = ds.n_features;
    let d = ds.feature_dim;
    let needed = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::Capacity { needed, budget });
    }
    let order: Vec<usize> = (0..n)
        .map(|a| map.as_ref().map_or(a, |m| m.feature_of_axis(a)))
        .collect();
    let len = needed as usize;
    let mut acc = vec![0.0; len];
    let mut scratch = vec![0.0; len];
    for (m, &y) in labels.iter().enumerate() {
        scratch.truncate(1);
        scratch[0] = y / ds.n_instances as f64;
        let mut filled = 1;
        for &f in &order {
            let x = ds.feature(m, f);
            // Expand in place from the back so every slot is read before it is overwritten.
            scratch.resize(filled * d, 0.0);
            for i in (0..filled).rev() {
                let a = scratch[i];
                for (k, xk) in x.iter().enumerate().rev() {
                    scratch[i * d + k] = a * xk;
                }
            }
            filled *= d;
        }
        for (o, s) in acc.iter_mut().zip(&scratch) {
            *o += s;
        }
    }
    DenseTensor::new(vec![d; n], acc)
}

fn check_partition(ds: &Dataset, part: &AxisPartition) -> Result<()> {
    if part.n_axes() != ds.n_features {
        return Err(Error::Partition(format!(
            "partition over {} features applied to a dataset with {}",
            part.n_axes(),
            ds.n_features
        )));
    }
    Ok(())
}

/// Multiplies `g` entrywise by the inner-product Gram matrix of each listed feature.
fn multiply_grams(ds: &Dataset, g: &mut Matrix, features: &[usize]) {
    let m = ds.n_instances;
    for &n in features {
        for i in 0..m {
            let xi = ds.feature(i, n);
            for j in i..m {
                let ip: f64 = xi.iter().zip(ds.feature(j, n)).map(|(a, b)| a * b).sum();
                g[(i, j)] *= ip;
                if i != j {
                    g[(j, i)] *= ip;
                }
            }
        }
    }
}

/// Entanglement of the empirical data tensor with respect to a subset of feature indices,
/// computed from `M x M` Gram matrices.
pub fn entanglement_gram(ds: &Dataset, part: &AxisPartition) -> Result<f64> {
    let labels = ds.require_labels()?;
    check_partition(ds, part)?;
    let m = ds.n_instances;
    let mut g_in = Matrix::from_fn(m, m, |i, j| labels[i] * labels[j]);
    let mut g_out = Matrix::from_element(m, m, 1.0);
    multiply_grams(ds, &mut g_in, part.subset());
    multiply_grams(ds, &mut g_out, part.complement().subset());
    let factor_in = gram_factor(&g_in)?;
    let factor_out = gram_factor(&g_out)?;
    if factor_in.ncols() == 0 || factor_out.ncols() == 0 {
        return Ok(0.0);
    }
    let q = factor_in.transpose() * factor_out;
    let sv = linalg::singular_values(&q)?;
    Ok(linalg::spectrum_entropy(&sv))
}

/// Same value as [`entanglement_gram`], computed through the explicit feature map of the
/// smaller side: with `Phi` the `M x r` matrix of rows `y_m (x) x_{n,m}` over that side and
/// `G` the Gram matrix of the other side, the squared singular values are the eigenvalues of
/// `Phi^T G Phi`. Cheaper whenever `r = D^{|smaller side|}` is below `M`.
pub fn entanglement_factored(ds: &Dataset, part: &AxisPartition) -> Result<f64> {
    let labels = ds.require_labels()?;
    check_partition(ds, part)?;
    let complement = part.complement();
    let (small, large) = if part.subset().len() <= complement.subset().len() {
        (part.subset(), complement.subset())
    } else {
        (complement.subset(), part.subset())
    };
    let d = ds.feature_dim;
    let r = u32::try_from(small.len())
        .ok()
        .and_then(|e| d.checked_pow(e))
        .ok_or(Error::Capacity {
            needed: u128::MAX,
            budget: u64::MAX,
        })?;
    let m = ds.n_instances;
    let mut phi = Matrix::zeros(m, r);
    let mut row = Vec::with_capacity(r);
    for i in 0..m {
        row.clear();
        row.push(labels[i]);
        for &n in small {
            let x = ds.feature(i, n);
            let prev = std::mem::take(&mut row);
            row.extend(prev.iter().flat_map(|a| x.iter().map(move |b| a * b)));
        }
        for (j, v) in row.iter().enumerate() {
            phi[(i, j)] = *v;
        }
    }
    let mut g = Matrix::from_element(m, m, 1.0);
    multiply_grams(ds, &mut g, large);
    let b = phi.transpose() * g * &phi;
    let sym = (&b + b.transpose()) * 0.5;
    let (values, _) = linalg::symmetric_eigen(&sym)?;
    let sv: Vec<f64> = values.iter().map(|&v| v.max(0.0).sqrt()).collect();
    Ok(linalg::spectrum_entropy(&sv))
}

/// Entanglement of the empirical data tensor, choosing the cheaper of
/// [`entanglement_gram`] and [`entanglement_factored`].
pub fn entanglement(ds: &Dataset, part: &AxisPartition) -> Result<f64> {
    check_partition(ds, part)?;
    let small = part.subset().len().min(ds.n_features - part.subset().len());
    let r = u32::try_from(small)
        .ok()
        .and_then(|e| ds.feature_dim.checked_pow(e));
    match r {
        Some(r) if r <= ds.n_instances => entanglement_factored(ds, part),
        _ => entanglement_gram(ds, part),
    }
}

/// `U S^{1/2}` restricted to eigenvalues above the clamp threshold.
fn gram_factor(g: &Matrix) -> Result<Matrix> {
    let (values, vectors) = linalg::symmetric_eigen(g)?;
    let trace: f64 = g.trace();
    if trace <= 0.0 {
        return Ok(Matrix::zeros(g.nrows(), 0));
    }
    if let Some(&worst) = values.last() {
        if worst < -GRAM_NEGATIVE_TOLERANCE * trace {
            return Err(Error::Numeric(format!(
                "Gram matrix eigenvalue {worst:e} is too negative for trace {trace:e}"
            )));
        }
    }
    let keep = values
        .iter()
        .take_while(|&&v| v > GRAM_EIGEN_CLAMP * trace)
        .count();
    Ok(Matrix::from_fn(g.nrows(), keep, |i, j| {
        vectors[(i, j)] * values[j].sqrt()
    }))
}

/// Entanglement under every canonical partition in levels `lo..=hi`, in enumeration order.
pub fn canonical_entanglements(
    ds: &Dataset,
    lo: u32,
    hi: u32,
) -> Result<Vec<(CanonicalPartition, f64)>> {
    ds.require_labels()?;
    let map = ds.compatible_map()?;
    if lo == 0 {
        return Err(Error::Argument(
            "level 0 has no complement; start at level 1".into(),
        ));
    }
    let parts = canonical_partitions_in_levels(&map, lo, hi)?;
    parts
        .into_par_iter()
        .map(|p| {
            let qe = entanglement(ds, &p.feature_partition()?)?;
            Ok((p, qe))
        })
        .collect()
}

/// Mean entanglement over all canonical partitions in levels `lo..=hi`.
pub fn average_canonical_entanglement(ds: &Dataset, lo: u32, hi: u32) -> Result<f64> {
    let values = canonical_entanglements(ds, lo, hi)?;
    if values.is_empty() {
        return Err(Error::Argument("empty level range".into()));
    }
    Ok(values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64)
}

/// Training-set size guaranteeing, with probability at least `1 - delta`, that every
/// entanglement of the empirical data tensor is within `gamma` of the population one:
/// `ceil(128 ln(2/delta) (max ln D_K)^4 / (|D_pop|^2 gamma^4))`.
///
/// Values within `1e-9` relative of an integer are snapped to it before the ceiling so that
/// rounding noise in the logarithm does not add one.
pub fn sample_size_bound(
    delta: f64,
    gamma: f64,
    pop_norm_lower: f64,
    max_log_dim: f64,
) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta = {delta} outside (0, 1)")));
    }
    if !(gamma > 0.0) || !(pop_norm_lower > 0.0) || !(max_log_dim >= 0.0) {
        return Err(Error::Argument(
            "gamma and the norm bound must be positive, max ln D nonnegative".into(),
        ));
    }
    let value =
        128.0 * (2.0 / delta).ln() * max_log_dim.powi(4) / (pop_norm_lower.powi(2) * gamma.powi(4));
    if !value.is_finite() || value > u64::MAX as f64 {
        return Err(Error::Numeric(format!(
            "sample size bound {value} is not representable"
        )));
    }
    let nearest = value.round();
    let snapped = if (value - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        value.ceil()
    };
    Ok(snapped as u64)
}

/// `|W/|W| - D/|D||` for the hierarchical width-`R` fit `W` of the normalized empirical data
/// tensor `D`; an upper bound on the best achievable distance.
pub fn suboptimality_upper_bound(ds: &Dataset, width: usize, budget: u64) -> Result<f64> {
    let d = empirical_data_tensor_dense(ds, budget)?;
    let norm = d.norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("empirical data tensor is zero".into()));
    }
    let unit = d.scaled(1.0 / norm);
    let map = ds.compatible_map()?;
    let fit = fit_hierarchical(&unit, width, &map, budget)?;
    let w = fit.network.contract_full(budget)?;
    let wn = w.norm();
    if wn == 0.0 {
        return Ok(std::f64::consts::SQRT_2);
    }
    w.scaled(1.0 / wn).distance(&unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_tn::DEFAULT_MEMORY_BUDGET;

    fn tiny() -> Dataset {
        Dataset::new(
            2,
            2,
            1,
            vec![0.6, 0.8, 1.0, 0.0, 0.0, 1.0, 0.8, -0.6],
            Some(vec![1.0, -1.0]),
        )
        .unwrap()
    }

    #[test]
    fn embedding_values() {
        assert_eq!(embed_sincos(0.0, 0.3), [0.0, 1.0]);
        assert_eq!(DEFAULT_THETA, 0.085);
        for x in [-3.7, 0.2, 15.0, 1e3] {
            let [s, c] = embed_sincos(x, DEFAULT_THETA);
            assert!((s * s + c * c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(Dataset::new(2, 2, 1, vec![0.0; 7], None).is_err());
        assert!(Dataset::new(2, 1, 1, vec![0.0; 4], Some(vec![1.0])).is_err());
        assert!(Dataset::new(2, 1, 1, vec![0.0; 2], Some(vec![0.5])).is_err());
        assert!(Dataset::new(6, 1, 2, vec![0.0; 6], None).is_err());
        assert!(Dataset::new(16, 1, 2, vec![0.0; 16], None).is_ok());
    }

    #[test]
    fn missing_labels_is_precondition() {
        let ds = tiny().with_labels(None).unwrap();
        let k = AxisPartition::new(2, [0]).unwrap();
        assert!(matches!(
            entanglement_gram(&ds, &k),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            empirical_data_tensor_dense(&ds, 1 << 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn single_instance_tensor_is_outer_product() {
        let ds = tiny().select_instances(&[0]).unwrap();
        let t = empirical_data_tensor_dense(&ds, 1 << 10).unwrap();
        assert_eq!(t.data(), &[0.6, 0.0, 0.8, 0.0]);
        let k = AxisPartition::new(2, [0]).unwrap();
        assert_eq!(entanglement_gram(&ds, &k).unwrap(), 0.0);
    }

    #[test]
    fn cancelling_instances_give_zero() {
        let ds = Dataset::new(
            2,
            2,
            1,
            vec![0.6, 0.8, 1.0, 0.0, 0.6, 0.8, 1.0, 0.0],
            Some(vec![1.0, -1.0]),
        )
        .unwrap();
        let t = empirical_data_tensor_dense(&ds, 1 << 10).unwrap();
        assert!(t.data().iter().all(|&v| v == 0.0));
        assert_eq!(
            entanglement_gram(&ds, &AxisPartition::new(2, [1]).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn padding_appends_constant_features() {
        let ds =
            Dataset::new(3, 2, 1, vec![0.0, 1.0, 1.0, 0.0, 0.6, 0.8], Some(vec![1.0])).unwrap();
        let padded = ds.pad_to_power_of_two().unwrap();
        assert_eq!(padded.n_features(), 4);
        assert_eq!(padded.padding(), 1);
        assert_eq!(padded.feature(0, 3), &[0.0, 1.0]);
        assert!(padded.side().is_ok());
        assert!(ds.side().is_err());
    }

    #[test]
    fn sincos_dataset_is_normalized() {
        let ds = Dataset::new(4, 1, 1, vec![3.0, -2.0, 0.5, 10.0], None).unwrap();
        assert!(!ds.is_normalized());
        let e = ds.embed_sincos(DEFAULT_THETA);
        assert_eq!(e.feature_dim(), 2);
        assert!(e.is_normalized());
    }

    #[test]
    fn sample_size_arithmetic() {
        let delta = 2.0 / std::f64::consts::E.powi(2);
        assert_eq!(sample_size_bound(delta, 1.0, 1.0, 1.0).unwrap(), 256);
        let a = sample_size_bound(0.1, 0.5, 0.3, 2.0).unwrap();
        let b = sample_size_bound(0.1, 1.0, 0.3, 2.0).unwrap();
        assert!(b <= a);
        let c = sample_size_bound(delta, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(c, 16 * 256);
        assert!(sample_size_bound(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(sample_size_bound(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(sample_size_bound(0.5, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_data_tensor_suboptimality_is_degenerate() {
        let ds = Dataset::new(
            2,
            2,
            1,
            vec![0.6, 0.8, 1.0, 0.0, 0.6, 0.8, 1.0, 0.0],
            Some(vec![1.0, -1.0]),
        )
        .unwrap();
        assert!(matches!(
            suboptimality_upper_bound(&ds, 1, DEFAULT_MEMORY_BUDGET),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn factored_route_matches_gram_route() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let features: Vec<f64> = (0..9 * 8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let labels = (0..9)
            .map(|i| if i % 3 == 0 { -1.0 } else { 1.0 })
            .collect();
        let ds = Dataset::new(8, 1, 1, features, Some(labels))
            .unwrap()
            .embed_sincos(0.3);
        for subset in [
            vec![0],
            vec![0, 5],
            vec![1, 2, 3],
            vec![0, 1, 2, 3],
            vec![2, 3, 4, 5, 6, 7],
        ] {
            let part = AxisPartition::new(8, subset).unwrap();
            let g = entanglement_gram(&ds, &part).unwrap();
            let f = entanglement_factored(&ds, &part).unwrap();
            assert!((g - f).abs() < 1e-9, "{g} vs {f}");
            assert!((entanglement(&ds, &part).unwrap() - g).abs() < 1e-9);
        }
    }
}
