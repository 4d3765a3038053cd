//! Dense row-major tensors, matricization and entanglement entropy.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Magic bytes at the start of every binary tensor file.
pub const TENSOR_MAGIC: &[u8; 4] = b"LCTN";
pub const TENSOR_FORMAT_VERSION: u32 = 1;

/// An N-dimensional real array stored in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

/// A bipartition of the axes `0..n_axes` given by the sorted subset `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxisPartition {
    n_axes: usize,
    subset: Vec<usize>,
}

fn checked_len(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Shape(format!("tensor with dims {dims:?} overflows usize")))
}

fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("a tensor needs at least one axis".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Shape(format!(
                "axis lengths must be positive, got {dims:?}"
            )));
        }
        let len = checked_len(&dims)?;
        if len != data.len() {
            return Err(Error::Shape(format!(
                "dims {dims:?} need {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = if dims.is_empty() {
            0
        } else {
            checked_len(&dims)?
        };
        Self::new(dims, vec![0.0; len])
    }

    /// Builds a tensor by evaluating `f` at every multi-index, in row-major order.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        let mut idx = vec![0usize; t.dims.len()];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            increment(&mut idx, &t.dims);
        }
        Ok(t)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let strides = row_major_strides(&self.dims);
        let flat: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.data[flat]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn inner_product(&self, other: &DenseTensor) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "inner product of tensors with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn scaled(&self, c: f64) -> DenseTensor {
        DenseTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "difference of tensors with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(DenseTensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn distance(&self, other: &DenseTensor) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Reinterprets the row-major data under new dims of equal total size.
    pub fn reshape(self, dims: Vec<usize>) -> Result<DenseTensor> {
        DenseTensor::new(dims, self.data)
    }

    /// Returns the tensor whose axis `i` is axis `order[i]` of `self`.
    pub fn permute_axes(&self, order: &[usize]) -> Result<DenseTensor> {
        let n = self.ndim();
        let mut seen = vec![false; n];
        if order.len() != n
            || order
                .iter()
                .any(|&a| a >= n || std::mem::replace(&mut seen[a], true))
        {
            return Err(Error::Argument(format!(
                "{order:?} is not a permutation of {n} axes"
            )));
        }
        let src_strides = row_major_strides(&self.dims);
        let new_dims: Vec<usize> = order.iter().map(|&a| self.dims[a]).collect();
        DenseTensor::from_fn(new_dims, |idx| {
            let flat: usize = idx
                .iter()
                .zip(order)
                .map(|(&i, &a)| i * src_strides[a])
                .sum();
            self.data[flat]
        })
    }

    /// Contracts axis `axis` against the rows of `m`, replacing that axis by one of
    /// length `m.ncols()`: `out[.., j, ..] = sum_i self[.., i, ..] * m[i, j]`.
    pub fn contract_axis(&self, axis: usize, m: &Matrix) -> Result<DenseTensor> {
        if axis >= self.ndim() || m.nrows() != self.dims[axis] {
            return Err(Error::Shape(format!(
                "cannot contract axis {axis} of dims {:?} with a {}x{} matrix",
                self.dims,
                m.nrows(),
                m.ncols()
            )));
        }
        let outer: usize = self.dims[..axis].iter().product();
        let inner: usize = self.dims[axis + 1..].iter().product();
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut new_dims = self.dims.clone();
        new_dims[axis] = cols;
        let mut out = vec![0.0; outer * cols * inner];
        for o in 0..outer {
            for i in 0..rows {
                let src = &self.data[(o * rows + i) * inner..(o * rows + i + 1) * inner];
                for j in 0..cols {
                    let w = m[(i, j)];
                    if w == 0.0 {
                        continue;
                    }
                    let dst = &mut out[(o * cols + j) * inner..(o * cols + j + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
        DenseTensor::new(new_dims, out)
    }

    /// Arranges the tensor as a matrix whose rows index the axes in `part` and whose columns
    /// index the complement. Both row and column indices are lexicographic over their axes
    /// in ascending axis order, first axis slowest.
    pub fn matricize(&self, part: &AxisPartition) -> Result<Matrix> {
        part.check_axes(self.ndim())?;
        let (row_stride, col_stride, rows, cols) = self.split_strides(part);
        let mut m = Matrix::zeros(rows, cols);
        let mut idx = vec![0usize; self.ndim()];
        for &v in &self.data {
            let r: usize = idx.iter().zip(&row_stride).map(|(i, s)| i * s).sum();
            let c: usize = idx.iter().zip(&col_stride).map(|(i, s)| i * s).sum();
            m[(r, c)] = v;
            increment(&mut idx, &self.dims);
        }
        Ok(m)
    }

    /// Inverse of [`DenseTensor::matricize`].
    pub fn from_matricization(
        dims: Vec<usize>,
        part: &AxisPartition,
        m: &Matrix,
    ) -> Result<DenseTensor> {
        let mut t = DenseTensor::zeros(dims)?;
        part.check_axes(t.ndim())?;
        let (row_stride, col_stride, rows, cols) = t.split_strides(part);
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::Shape(format!(
                "expected a {rows}x{cols} matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut idx = vec![0usize; t.ndim()];
        let dims = t.dims.clone();
        for slot in t.data.iter_mut() {
            let r: usize = idx.iter().zip(&row_stride).map(|(i, s)| i * s).sum();
            let c: usize = idx.iter().zip(&col_stride).map(|(i, s)| i * s).sum();
            *slot = m[(r, c)];
            increment(&mut idx, &dims);
        }
        Ok(t)
    }

    /// Per-axis strides into the row and column index (zero for axes on the other side).
    fn split_strides(&self, part: &AxisPartition) -> (Vec<usize>, Vec<usize>, usize, usize) {
        let n = self.ndim();
        let mut in_k = vec![false; n];
        for &a in &part.subset {
            in_k[a] = true;
        }
        let mut row_stride = vec![0; n];
        let mut col_stride = vec![0; n];
        let (mut rs, mut cs) = (1usize, 1usize);
        for a in (0..n).rev() {
            if in_k[a] {
                row_stride[a] = rs;
                rs *= self.dims[a];
            } else {
                col_stride[a] = cs;
                cs *= self.dims[a];
            }
        }
        (row_stride, col_stride, rs, cs)
    }

    /// Entanglement entropy (nats) with respect to `part`; zero for the zero tensor.
    pub fn entanglement(&self, part: &AxisPartition) -> Result<f64> {
        let m = self.matricize(part)?;
        let sv = linalg::singular_values(&m)?;
        Ok(linalg::spectrum_entropy(&sv))
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(TENSOR_MAGIC)?;
        w.write_all(&TENSOR_FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.dims.len() as u32).to_le_bytes())?;
        for &d in &self.dims {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        for &v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<DenseTensor> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != TENSOR_MAGIC {
            return Err(Error::Format(format!("bad tensor magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != TENSOR_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported tensor format version {version}"
            )));
        }
        r.read_exact(&mut word)?;
        let ndim = u32::from_le_bytes(word) as usize;
        let mut dims = Vec::with_capacity(ndim);
        let mut long = [0u8; 8];
        for _ in 0..ndim {
            r.read_exact(&mut long)?;
            let d = usize::try_from(u64::from_le_bytes(long))
                .map_err(|_| Error::Format("axis length does not fit in usize".into()))?;
            dims.push(d);
        }
        let len = checked_len(&dims)?;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut long)?;
            data.push(f64::from_le_bytes(long));
        }
        DenseTensor::new(dims, data).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Row-major odometer increment.
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < dims[a] {
            return;
        }
        idx[a] = 0;
    }
}

/// Outer product of a list of vectors: entry `(d_1, .., d_N)` is `prod_n x_n[d_n]`.
pub fn outer_product(vectors: &[Vec<f64>]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(Error::Argument("outer product of an empty list".into()));
    }
    if vectors.iter().any(|v| v.is_empty()) {
        return Err(Error::Argument(
            "outer product factors must be nonempty".into(),
        ));
    }
    let mut data = vec![1.0];
    for v in vectors {
        data = data
            .iter()
            .flat_map(|&a| v.iter().map(move |&b| a * b))
            .collect();
    }
    DenseTensor::new(vectors.iter().map(Vec::len).collect(), data)
}

impl AxisPartition {
    /// Validates that `subset` is a nonempty proper subset of `0..n_axes`.
    pub fn new(n_axes: usize, subset: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut subset: Vec<usize> = subset.into_iter().collect();
        subset.sort_unstable();
        let before = subset.len();
        subset.dedup();
        if subset.len() != before {
            return Err(Error::Partition("axis subset contains duplicates".into()));
        }
        if let Some(&bad) = subset.iter().find(|&&a| a >= n_axes) {
            return Err(Error::Partition(format!(
                "axis {bad} out of range for {n_axes} axes"
            )));
        }
        if subset.is_empty() {
            return Err(Error::Partition("axis subset is empty".into()));
        }
        if subset.len() == n_axes {
            return Err(Error::Partition(
                "axis subset has an empty complement".into(),
            ));
        }
        Ok(Self { n_axes, subset })
    }

    pub fn n_axes(&self) -> usize {
        self.n_axes
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn complement(&self) -> AxisPartition {
        let mut in_k = vec![false; self.n_axes];
        for &a in &self.subset {
            in_k[a] = true;
        }
        AxisPartition {
            n_axes: self.n_axes,
            subset: (0..self.n_axes).filter(|&a| !in_k[a]).collect(),
        }
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.subset.binary_search(&axis).is_ok()
    }

    /// `min(prod_{n in K} D_n, prod_{n not in K} D_n)`, the largest attainable matrix rank.
    pub fn min_side_size(&self, dims: &[usize]) -> f64 {
        let inside: f64 = self.subset.iter().map(|&a| dims[a] as f64).product();
        let total: f64 = dims.iter().map(|&d| d as f64).product();
        inside.min(total / inside)
    }

    fn check_axes(&self, ndim: usize) -> Result<()> {
        if self.n_axes != ndim {
            return Err(Error::Partition(format!(
                "partition over {} axes applied to a tensor with {ndim} axes",
                self.n_axes
            )));
        }
        Ok(())
    }
}
