//! Thin wrappers over the dense decompositions used throughout the crate.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Singular values below this fraction of the largest one are treated as exact zeros
/// when forming entanglement spectra.
pub const SINGULAR_VALUE_CUTOFF: f64 = 1e-12;

fn check_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric("matrix contains non-finite entries".into()))
    }
}

/// Singular values in descending order. Empty matrices yield an empty list.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut sv: Vec<f64> = m.singular_values().iter().map(|s| s.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Leading `k` left singular vectors (columns) together with the full descending spectrum.
///
/// Ties at the truncation boundary keep the vectors in the order the decomposition returns them.
pub fn leading_left_singular_vectors(m: &Matrix, k: usize) -> Result<(Matrix, Vec<f64>)> {
    check_finite(m)?;
    let svd = m.clone().svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| Error::Numeric("SVD did not produce left singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let keep = k.min(order.len());
    let mut out = Matrix::zeros(m.nrows(), keep);
    for (j, &src) in order.iter().take(keep).enumerate() {
        out.set_column(j, &u.column(src));
    }
    let spectrum = order
        .iter()
        .map(|&i| svd.singular_values[i].max(0.0))
        .collect();
    Ok((out, spectrum))
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending with matching
/// eigenvector columns.
pub fn symmetric_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    check_finite(m)?;
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (j, &src) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Principal square root of a symmetric positive semidefinite matrix. Negative eigenvalues
/// below `clamp_rel * trace` in magnitude are zeroed; larger ones are reported as errors.
pub fn psd_sqrt(m: &Matrix, clamp_rel: f64) -> Result<Matrix> {
    let (values, vectors) = symmetric_eigen(m)?;
    let trace: f64 = values.iter().map(|v| v.abs()).sum();
    let tol = clamp_rel * trace.max(f64::MIN_POSITIVE);
    let mut roots = Vec::with_capacity(values.len());
    for &v in &values {
        if v < -tol {
            return Err(Error::Numeric(format!(
                "matrix is not positive semidefinite (eigenvalue {v:e})"
            )));
        }
        roots.push(if v <= tol { 0.0 } else { v.sqrt() });
    }
    let scaled = Matrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * roots[j]
    });
    Ok(&scaled * vectors.transpose())
}

/// Von Neumann entropy (nats) of the distribution proportional to squared singular values.
///
/// Values below [`SINGULAR_VALUE_CUTOFF`] times the largest are dropped. An all-zero
/// spectrum has entropy zero.
pub fn spectrum_entropy(singular_values: &[f64]) -> f64 {
    let top = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if top <= 0.0 {
        return 0.0;
    }
    let cutoff = SINGULAR_VALUE_CUTOFF * top;
    let kept: Vec<f64> = singular_values
        .iter()
        .filter(|&&s| s > cutoff)
        .map(|s| (s / top) * (s / top))
        .collect();
    let total: f64 = kept.iter().sum();
    kept.iter()
        .map(|&w| {
            let rho = w / total;
            if rho > 0.0 {
                -rho * rho.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        .max(0.0)
}
