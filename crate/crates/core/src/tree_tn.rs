//! Locally connected tree tensor networks.
//!
//! A network over `N^P` axes (`N = 2^L`) is a perfect `2^P`-ary tree of depth `L`. Each leaf
//! holds a `D_n x R` matrix connecting its open axis to the parent. Each internal node holds a
//! tensor of shape `(R, .., R, parent)` with one `R` per child and `parent = R`, except at the
//! root where `parent = 1`. Open axes are numbered so that the axes below any node are
//! contiguous, which makes the canonical partitions under the Morton map exactly the
//! descendant sets of tree nodes.
//!
//! Serialized networks are a little-endian `u64` header length, a JSON header
//! `{"N", "P", "R", "dims"}`, then every node tensor in breadth-first order (root first,
//! leaves last) in the binary tensor format.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::partitions::{canonical_partitions_in_levels, CanonicalPartition, CompatibleMap};
use crate::tensor::{AxisPartition, DenseTensor};

/// Default cap on the number of entries any dense expansion may allocate.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeTensorNetwork {
    side: usize,
    dim: usize,
    width: usize,
    dims: Vec<usize>,
    /// `nodes[h]` are the tensors at depth `h` in axis order; the last level holds the leaves.
    nodes: Vec<Vec<DenseTensor>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkHeader {
    #[serde(rename = "N")]
    side: usize,
    #[serde(rename = "P")]
    dim: usize,
    #[serde(rename = "R")]
    width: usize,
    dims: Vec<usize>,
}

fn tree_shape(dims: &[usize], dim: usize) -> Result<(usize, u32)> {
    if dim == 0 {
        return Err(Error::Argument("dimension P must be positive".into()));
    }
    let arity_bits = dim as u32;
    let n = dims.len();
    if n < 2 || !n.is_power_of_two() || !n.trailing_zeros().is_multiple_of(arity_bits) {
        return Err(Error::Shape(format!(
            "{n} axes is not a power of the arity 2^{dim}"
        )));
    }
    let levels = n.trailing_zeros() / arity_bits;
    Ok((1usize << levels, levels))
}

fn check_budget(dims: &[usize], budget: u64) -> Result<()> {
    let needed: u128 = dims.iter().map(|&d| d as u128).product();
    if needed > budget as u128 {
        return Err(Error::Capacity { needed, budget });
    }
    Ok(())
}

impl TreeTensorNetwork {
    /// Assembles a network from node tensors grouped by depth, validating every edge.
    pub fn from_nodes(
        dim: usize,
        width: usize,
        dims: Vec<usize>,
        nodes: Vec<Vec<DenseTensor>>,
    ) -> Result<Self> {
        let (side, levels) = tree_shape(&dims, dim)?;
        if width == 0 {
            return Err(Error::Argument("width must be at least 1".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Shape("axis lengths must be positive".into()));
        }
        let arity = 1usize << dim;
        if nodes.len() != levels as usize + 1 {
            return Err(Error::Shape(format!(
                "expected {} node levels, got {}",
                levels + 1,
                nodes.len()
            )));
        }
        for (h, level) in nodes.iter().enumerate() {
            let count = arity.pow(h as u32);
            if level.len() != count {
                return Err(Error::Shape(format!(
                    "depth {h} needs {count} nodes, got {}",
                    level.len()
                )));
            }
            for (j, t) in level.iter().enumerate() {
                let expected: Vec<usize> = if h == levels as usize {
                    vec![dims[j], width]
                } else {
                    let mut s = vec![width; arity];
                    s.push(if h == 0 { 1 } else { width });
                    s
                };
                if t.dims() != expected.as_slice() {
                    return Err(Error::Shape(format!(
                        "node {j} at depth {h} has dims {:?}, expected {expected:?}",
                        t.dims()
                    )));
                }
            }
        }
        Ok(Self {
            side,
            dim,
            width,
            dims,
            nodes,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn arity(&self) -> usize {
        1 << self.dim
    }

    pub fn depth(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn leaf_count(&self) -> usize {
        self.dims.len()
    }

    pub fn nodes(&self) -> &[Vec<DenseTensor>] {
        &self.nodes
    }

    pub fn parameter_count(&self) -> usize {
        self.nodes.iter().flatten().map(DenseTensor::len).sum()
    }

    /// Multiplies the root tensor by `c`; the generated tensor scales by exactly `c`.
    pub fn scale_in_place(&mut self, c: f64) {
        for v in self.nodes[0][0].data_mut() {
            *v *= c;
        }
    }

    /// Dense tensor generated by the network, contracted leaves to root.
    pub fn contract_full(&self, budget: u64) -> Result<DenseTensor> {
        check_budget(&self.dims, budget)?;
        let depth = self.depth();
        let mut below: Vec<Matrix> = self.nodes[depth]
            .iter()
            .map(|t| Matrix::from_row_slice(t.dims()[0], t.dims()[1], t.data()))
            .collect();
        for h in (0..depth).rev() {
            below = self.nodes[h]
                .iter()
                .enumerate()
                .map(|(j, node)| {
                    let children = &below[j * self.arity()..(j + 1) * self.arity()];
                    let mut t = node.clone();
                    for (i, child) in children.iter().enumerate() {
                        t = t.contract_axis(i, &child.transpose())?;
                    }
                    let parent = *t.dims().last().unwrap();
                    let rows = t.len() / parent;
                    Ok(Matrix::from_row_slice(rows, parent, t.data()))
                })
                .collect::<Result<_>>()?;
        }
        let root = &below[0];
        DenseTensor::new(self.dims.clone(), root.iter().copied().collect())
    }

    /// `<x_1 (x) .. (x) x_{N^P}, W>` for one vector per axis, evaluated leaves to root without
    /// expanding the network.
    pub fn forward(&self, instance: &[Vec<f64>]) -> Result<f64> {
        if instance.len() != self.dims.len() {
            return Err(Error::Shape(format!(
                "instance has {} vectors, network has {} axes",
                instance.len(),
                self.dims.len()
            )));
        }
        let depth = self.depth();
        let mut below: Vec<Vec<f64>> = self.nodes[depth]
            .iter()
            .zip(instance)
            .enumerate()
            .map(|(n, (leaf, x))| {
                if x.len() != self.dims[n] {
                    return Err(Error::Shape(format!(
                        "vector {n} has length {}, axis length is {}",
                        x.len(),
                        self.dims[n]
                    )));
                }
                Ok((0..self.width)
                    .map(|r| {
                        x.iter()
                            .enumerate()
                            .map(|(d, xd)| xd * leaf.data()[d * self.width + r])
                            .sum()
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let arity = self.arity();
        for h in (0..depth).rev() {
            below = self.nodes[h]
                .iter()
                .enumerate()
                .map(|(j, node)| contract_with_vectors(node, &below[j * arity..(j + 1) * arity]))
                .collect();
        }
        Ok(below[0][0])
    }
}

/// Contracts every child axis of `node` with the corresponding vector, leaving the parent axis.
fn contract_with_vectors(node: &DenseTensor, vectors: &[Vec<f64>]) -> Vec<f64> {
    let dims = node.dims();
    let parent = *dims.last().unwrap();
    let mut out = vec![0.0; parent];
    let mut idx = vec![0usize; vectors.len()];
    let child_dims = &dims[..vectors.len()];
    for chunk in node.data().chunks_exact(parent) {
        let coeff: f64 = idx.iter().zip(vectors).map(|(&i, v)| v[i]).product();
        if coeff != 0.0 {
            for (o, b) in out.iter_mut().zip(chunk) {
                *o += coeff * b;
            }
        }
        crate::tensor::increment(&mut idx, child_dims);
    }
    out
}

/// Network with i.i.d. standard normal node entries, deterministic per seed.
pub fn random_ttn(
    dims: &[usize],
    width: usize,
    dim: usize,
    seed: u64,
) -> Result<TreeTensorNetwork> {
    let (_, levels) = tree_shape(dims, dim)?;
    let arity = 1usize << dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(levels as usize + 1);
    for h in 0..=levels as usize {
        let count = arity.pow(h as u32);
        let level = (0..count)
            .map(|j| {
                let shape = if h == levels as usize {
                    vec![dims[j], width]
                } else {
                    let mut s = vec![width; arity];
                    s.push(if h == 0 { 1 } else { width });
                    s
                };
                let len = shape.iter().product();
                let data = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
                DenseTensor::new(shape, data)
            })
            .collect::<Result<Vec<_>>>()?;
        nodes.push(level);
    }
    TreeTensorNetwork::from_nodes(dim, width, dims.to_vec(), nodes)
}

/// Truncation data for one non-root tree node.
#[derive(Debug, Clone, Serialize)]
pub struct NodeTruncation {
    pub level: u32,
    pub index: usize,
    /// `sqrt(sum_{d > R} sigma_d^2)` of the node's matricization.
    pub tail_norm: f64,
}

#[derive(Debug, Clone)]
pub struct HierarchicalFit {
    pub network: TreeTensorNetwork,
    pub achieved_error: f64,
    pub truncations: Vec<NodeTruncation>,
}

impl HierarchicalFit {
    pub fn max_tail(&self) -> f64 {
        self.truncations
            .iter()
            .map(|t| t.tail_norm)
            .fold(0.0, f64::max)
    }

    /// `sqrt(2 n_axes - 3) * max tail`, the a-priori error guarantee of the construction.
    pub fn tail_bound(&self) -> f64 {
        tail_bound_factor(self.network.leaf_count()) * self.max_tail()
    }
}

pub fn tail_bound_factor(n_axes: usize) -> f64 {
    ((2 * n_axes) as f64 - 3.0).max(1.0).sqrt()
}

/// Fits a width-`width` network to `a` by truncated SVDs of every canonical matricization.
///
/// Each non-root node keeps the leading `width` left singular vectors of the matricization
/// whose rows are its descendant axes (zero-padded when fewer exist). Transfer tensors are the
/// projections of a parent's basis onto the product of its children's bases; the root holds
/// the coefficients of `a` in the product basis of its children.
pub fn fit_hierarchical(
    a: &DenseTensor,
    width: usize,
    map: &CompatibleMap,
    budget: u64,
) -> Result<HierarchicalFit> {
    if a.ndim() != map.len() {
        return Err(Error::Shape(format!(
            "tensor has {} axes, map covers {}",
            a.ndim(),
            map.len()
        )));
    }
    if width == 0 {
        return Err(Error::Argument("width must be at least 1".into()));
    }
    if a.norm() == 0.0 {
        return Err(Error::Degenerate("cannot fit the zero tensor".into()));
    }
    let dims = a.dims().to_vec();
    let (_, levels) = tree_shape(&dims, map.dim())?;
    let levels = levels as usize;
    let arity = map.arity();
    let n_axes = dims.len();

    // Bases for every non-root node, grouped by depth.
    let mut bases: Vec<Vec<Matrix>> = vec![Vec::new(); levels + 1];
    let mut truncations = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for h in 1..=levels {
        let span = n_axes / arity.pow(h as u32);
        for j in 0..arity.pow(h as u32) {
            let part = AxisPartition::new(n_axes, j * span..(j + 1) * span)?;
            let m = a.matricize(&part)?;
            let (u, spectrum) = linalg::leading_left_singular_vectors(&m, width)?;
            let tail = spectrum
                .iter()
                .skip(width)
                .map(|s| s * s)
                .sum::<f64>()
                .sqrt();
            truncations.push(NodeTruncation {
                level: h as u32,
                index: j,
                tail_norm: tail,
            });
            let mut padded = Matrix::zeros(u.nrows(), width);
            padded.columns_mut(0, u.ncols()).copy_from(&u);
            bases[h].push(padded);
        }
    }

    let mut nodes: Vec<Vec<DenseTensor>> = vec![Vec::new(); levels + 1];
    nodes[levels] = bases[levels]
        .iter()
        .map(|u| DenseTensor::new(vec![u.nrows(), width], row_major(u)))
        .collect::<Result<_>>()?;
    for h in 0..levels {
        for j in 0..arity.pow(h as u32) {
            let children = &bases[h + 1][j * arity..(j + 1) * arity];
            let mut shape: Vec<usize> = children.iter().map(Matrix::nrows).collect();
            let mut t = if h == 0 {
                shape.push(1);
                a.clone().reshape(shape)?
            } else {
                shape.push(width);
                DenseTensor::new(shape, row_major(&bases[h][j]))?
            };
            for (i, u) in children.iter().enumerate() {
                t = t.contract_axis(i, u)?;
            }
            nodes[h].push(t);
        }
    }
    let network = TreeTensorNetwork::from_nodes(map.dim(), width, dims, nodes)?;
    let achieved_error = network.contract_full(budget)?.distance(a)?;
    Ok(HierarchicalFit {
        network,
        achieved_error,
        truncations,
    })
}

fn row_major(m: &Matrix) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

/// Necessary-condition check for one partition: an `eps`-accurate width-`R` fit forces
/// `QE(A; K) <= ln R + (2 eps/|A|) ln D_K + 2 sqrt(2 eps/|A|)`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub axes: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn necessary_bound_rhs(width: usize, eps_ratio: f64, min_side: f64) -> f64 {
    (width as f64).ln() + 2.0 * eps_ratio * min_side.ln() + 2.0 * (2.0 * eps_ratio).sqrt()
}

pub fn check_necessary_bound(
    a: &DenseTensor,
    width: usize,
    eps: f64,
    part: &AxisPartition,
) -> Result<BoundReport> {
    let norm = a.norm();
    if !(eps >= 0.0 && eps <= norm / 4.0) {
        return Err(Error::Argument(format!(
            "eps = {eps} outside [0, |A|/4] = [0, {}]",
            norm / 4.0
        )));
    }
    if width == 0 {
        return Err(Error::Argument("width must be at least 1".into()));
    }
    let ratio = if norm == 0.0 { 0.0 } else { eps / norm };
    let lhs = a.entanglement(part)?;
    let rhs = necessary_bound_rhs(width, ratio, part.min_side_size(a.dims()));
    Ok(BoundReport {
        axes: part.subset().to_vec(),
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// [`check_necessary_bound`] over every non-degenerate canonical partition.
pub fn check_necessary_bound_all(
    a: &DenseTensor,
    width: usize,
    eps: f64,
    map: &CompatibleMap,
) -> Result<Vec<BoundReport>> {
    canonical_partitions_in_levels(map, 1, map.levels())?
        .iter()
        .map(|p| check_necessary_bound(a, width, eps, &p.axis_partition()?))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionMargin {
    pub level: u32,
    pub block: Vec<usize>,
    pub entanglement: f64,
    /// `threshold - entanglement`; nonnegative where the condition holds.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SufficiencyReport {
    /// `eps^2 / ((2 n_axes - 3) |A|^2) * ln R`.
    pub threshold: f64,
    pub condition_holds: bool,
    pub margins: Vec<PartitionMargin>,
    /// `sqrt(2 n_axes - 3) * max_K tail_R(K)`; an error bound that does not need low entanglement.
    pub tail_bound: f64,
    pub tail_condition_holds: bool,
    /// Set when either condition holds and the fit was run.
    pub fit_error: Option<f64>,
    pub fit_within_eps: Option<bool>,
}

/// Evaluates the low-entanglement sufficient condition for an `eps`-accurate width-`R` fit,
/// running the hierarchical fit whenever it (or the singular-value tail condition) holds.
pub fn check_sufficient_condition(
    a: &DenseTensor,
    width: usize,
    eps: f64,
    map: &CompatibleMap,
    budget: u64,
) -> Result<SufficiencyReport> {
    if !(eps > 0.0) {
        return Err(Error::Argument(format!("eps must be positive, got {eps}")));
    }
    let norm = a.norm();
    let n_axes = a.ndim();
    let threshold = if norm == 0.0 {
        f64::INFINITY
    } else {
        eps * eps / (((2 * n_axes) as f64 - 3.0).max(1.0) * norm * norm) * (width as f64).ln()
    };
    let parts: Vec<CanonicalPartition> = canonical_partitions_in_levels(map, 1, map.levels())?;
    let margins = parts
        .iter()
        .map(|p| {
            let qe = a.entanglement(&p.axis_partition()?)?;
            Ok(PartitionMargin {
                level: p.level,
                block: p.block.clone(),
                entanglement: qe,
                margin: threshold - qe,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let condition_holds = margins.iter().all(|m| m.margin >= 0.0);

    if norm == 0.0 {
        return Ok(SufficiencyReport {
            threshold,
            condition_holds,
            margins,
            tail_bound: 0.0,
            tail_condition_holds: true,
            fit_error: Some(0.0),
            fit_within_eps: Some(true),
        });
    }
    let fit = fit_hierarchical(a, width, map, budget)?;
    let tail_bound = fit.tail_bound();
    let tail_condition_holds = tail_bound <= eps;
    let ran = condition_holds || tail_condition_holds;
    Ok(SufficiencyReport {
        threshold,
        condition_holds,
        margins,
        tail_bound,
        tail_condition_holds,
        fit_error: ran.then_some(fit.achieved_error),
        fit_within_eps: ran.then_some(fit.achieved_error <= eps),
    })
}

impl TreeTensorNetwork {
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_vec(&NetworkHeader {
            side: self.side,
            dim: self.dim,
            width: self.width,
            dims: self.dims.clone(),
        })?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for t in self.nodes.iter().flatten() {
            t.write_binary(&mut w)?;
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<TreeTensorNetwork> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = usize::try_from(u64::from_le_bytes(len))
            .ok()
            .filter(|&l| l < (1 << 30))
            .ok_or_else(|| Error::Format("network header length out of range".into()))?;
        let mut header = vec![0u8; len];
        r.read_exact(&mut header)?;
        let header: NetworkHeader = serde_json::from_slice(&header)?;
        let (side, levels) = tree_shape(&header.dims, header.dim)?;
        if side != header.side {
            return Err(Error::Format(format!(
                "header side {} disagrees with {} axes",
                header.side,
                header.dims.len()
            )));
        }
        let arity = 1usize << header.dim;
        let mut nodes = Vec::new();
        for h in 0..=levels {
            let level = (0..arity.pow(h))
                .map(|_| DenseTensor::read_binary(&mut r))
                .collect::<Result<Vec<_>>>()?;
            nodes.push(level);
        }
        TreeTensorNetwork::from_nodes(header.dim, header.width, header.dims, nodes)
            .map_err(|e| Error::Format(e.to_string()))
    }
}
