//! Canonical partitions of `[N]^P` and the Morton-order map from grid coordinates to
//! tensor axes.
//!
//! Everything here is 0-based. Grid coordinates `(n_1, .., n_P)` are flattened row-major
//! (`n_1` slowest) into a *feature index*; the compatible map sends a feature index to the
//! *axis index* of the data tensor, so that every tree node owns a contiguous range of axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::AxisPartition;

/// Returns `L` when `n == 2^L`.
pub fn exact_log2(n: usize) -> Option<u32> {
    (n > 0 && n.is_power_of_two()).then(|| n.trailing_zeros())
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::Argument(format!("{base}^{exp} overflows")))
}

/// Bijection between row-major grid coordinates and tensor axes in Z-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleMap {
    side: usize,
    dim: usize,
    levels: u32,
    to_axis: Vec<usize>,
    to_feature: Vec<usize>,
}

impl CompatibleMap {
    /// Builds the Morton map for an `side^dim` grid; `side` must be a power of two, at least 2.
    pub fn new(side: usize, dim: usize) -> Result<Self> {
        let levels = exact_log2(side).filter(|&l| l >= 1).ok_or_else(|| {
            Error::Argument(format!("grid side {side} is not a power of two >= 2"))
        })?;
        if dim == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        let total = checked_pow(side, dim)?;
        let mut to_axis = vec![0; total];
        let mut to_feature = vec![0; total];
        let mut coords = vec![0usize; dim];
        for (feature, slot) in to_axis.iter_mut().enumerate() {
            unflatten(feature, side, &mut coords);
            let mut axis = 0usize;
            for bit in (0..levels).rev() {
                for &c in &coords {
                    axis = (axis << 1) | ((c >> bit) & 1);
                }
            }
            *slot = axis;
            to_feature[axis] = feature;
        }
        Ok(Self {
            side,
            dim,
            levels,
            to_axis,
            to_feature,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.to_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_axis.is_empty()
    }

    /// Children per tree node, `2^P`.
    pub fn arity(&self) -> usize {
        1 << self.dim
    }

    pub fn axis_of_feature(&self, feature: usize) -> usize {
        self.to_axis[feature]
    }

    pub fn feature_of_axis(&self, axis: usize) -> usize {
        self.to_feature[axis]
    }

    pub fn axis_of_coords(&self, coords: &[usize]) -> usize {
        self.to_axis[flatten(coords, self.side)]
    }

    pub fn coords_of_axis(&self, axis: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dim];
        unflatten(self.to_feature[axis], self.side, &mut coords);
        coords
    }
}

/// Row-major flattening of grid coordinates.
pub fn flatten(coords: &[usize], side: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * side + c)
}

pub fn unflatten(mut flat: usize, side: usize, coords: &mut [usize]) {
    for c in coords.iter_mut().rev() {
        *c = flat % side;
        flat /= side;
    }
}

/// One canonical partition: the cubic block of side `N / 2^level` at block position `block`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalPartition {
    pub level: u32,
    /// Block position per grid dimension, each in `0..2^level`.
    pub block: Vec<usize>,
    /// Tensor axes (under the compatible map) covered by the block, ascending.
    pub axes: Vec<usize>,
    /// Row-major feature indices covered by the block, ascending.
    #[serde(skip)]
    pub features: Vec<usize>,
    /// Level 0 covers every axis and has no complement.
    #[serde(skip)]
    pub degenerate: bool,
    #[serde(skip)]
    pub n_axes: usize,
}

impl CanonicalPartition {
    /// Axis bipartition of the data tensor; fails for the degenerate level-0 block.
    pub fn axis_partition(&self) -> Result<AxisPartition> {
        AxisPartition::new(self.n_axes, self.axes.iter().copied())
    }

    /// The same block expressed over row-major feature indices.
    pub fn feature_partition(&self) -> Result<AxisPartition> {
        AxisPartition::new(self.n_axes, self.features.iter().copied())
    }
}

/// All canonical partitions of `[side]^dim`, level by level, blocks in row-major order.
/// Contains `sum_{l=0}^{L} 2^{l P}` entries.
pub fn canonical_partitions(side: usize, dim: usize) -> Result<Vec<CanonicalPartition>> {
    let map = CompatibleMap::new(side, dim)?;
    Ok((0..=map.levels())
        .flat_map(|l| partitions_at_level(&map, l))
        .collect())
}

/// Canonical partitions whose level lies in `lo..=hi`.
pub fn canonical_partitions_in_levels(
    map: &CompatibleMap,
    lo: u32,
    hi: u32,
) -> Result<Vec<CanonicalPartition>> {
    if lo > hi || hi > map.levels() {
        return Err(Error::Argument(format!(
            "level range {lo}..{hi} outside 0..{}",
            map.levels()
        )));
    }
    Ok((lo..=hi)
        .flat_map(|l| partitions_at_level(map, l))
        .collect())
}

/// The `2^{lP}` canonical partitions at one level.
pub fn partitions_at_level(map: &CompatibleMap, level: u32) -> Vec<CanonicalPartition> {
    assert!(
        level <= map.levels(),
        "level {level} beyond {}",
        map.levels()
    );
    let per_dim = 1usize << level;
    let block_side = map.side() >> level;
    let dim = map.dim();
    let n_blocks = per_dim.pow(dim as u32);
    let n_axes = map.len();
    let mut block = vec![0usize; dim];
    let mut offset = vec![0usize; dim];
    let mut coords = vec![0usize; dim];
    let cells = block_side.pow(dim as u32);
    (0..n_blocks)
        .map(|b| {
            unflatten(b, per_dim, &mut block);
            let mut features = Vec::with_capacity(cells);
            for cell in 0..cells {
                unflatten(cell, block_side, &mut offset);
                for p in 0..dim {
                    coords[p] = block[p] * block_side + offset[p];
                }
                features.push(flatten(&coords, map.side()));
            }
            features.sort_unstable();
            let mut axes: Vec<usize> = features.iter().map(|&f| map.axis_of_feature(f)).collect();
            axes.sort_unstable();
            CanonicalPartition {
                level,
                block: block.clone(),
                axes,
                features,
                degenerate: level == 0,
                n_axes,
            }
        })
        .collect()
}
