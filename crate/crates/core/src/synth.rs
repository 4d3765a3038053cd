//! Synthetic datasets with planted correlation structure.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::partitions::{exact_log2, flatten, unflatten};
use crate::rearrange::{apply_permutation, FeaturePermutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    /// Features in correlated pairs `(2i, 2i+1)` before shuffling.
    BlockPairs,
    /// `P = 2` grid whose `2x2` quadrant cells share a latent factor.
    GridQuadrants,
    /// Independent standard normal features.
    Iid,
}

impl std::str::FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block-pairs" => Ok(Self::BlockPairs),
            "grid-quadrants" => Ok(Self::GridQuadrants),
            "iid" => Ok(Self::Iid),
            other => Err(Error::Argument(format!("unknown synthetic kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub kind: SynthKind,
    /// Feature count for one-dimensional kinds, grid side for `GridQuadrants`.
    pub size: usize,
    pub instances: usize,
    /// Correlation inside a planted group.
    pub rho: f64,
    /// Multiplies every raw value.
    pub scale: f64,
    /// Scramble feature positions with a random permutation.
    pub shuffle: bool,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(kind: SynthKind, size: usize, instances: usize, seed: u64) -> Self {
        Self {
            kind,
            size,
            instances,
            rho: 0.9,
            scale: 1.0,
            shuffle: false,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub dataset: Dataset,
    /// Planted groups by feature index in the returned dataset.
    pub groups: Vec<Vec<usize>>,
    /// The scrambling permutation, when `shuffle` was set.
    pub shuffle: Option<FeaturePermutation>,
}

/// Generates a dataset. Labels are `sign` of the sum of the first planted group (first feature
/// for `Iid`), so the population data tensor keeps the planted product structure.
pub fn generate(params: &SynthParams) -> Result<SynthOutput> {
    if !(params.rho.abs() <= 1.0) || !(params.scale.is_finite() && params.scale > 0.0) {
        return Err(Error::Argument(
            "rho must lie in [-1, 1] and scale be positive".into(),
        ));
    }
    if params.instances == 0 {
        return Err(Error::Argument("instance count must be positive".into()));
    }
    let (dim, side, groups) = match params.kind {
        SynthKind::BlockPairs => {
            if params.size < 2 || !params.size.is_multiple_of(2) {
                return Err(Error::Argument(format!(
                    "block-pairs needs an even feature count, got {}",
                    params.size
                )));
            }
            let groups: Vec<Vec<usize>> = (0..params.size / 2)
                .map(|i| vec![2 * i, 2 * i + 1])
                .collect();
            (1, params.size, groups)
        }
        SynthKind::GridQuadrants => {
            if exact_log2(params.size).is_none_or(|l| l == 0) {
                return Err(Error::Argument(format!(
                    "grid side {} is not a power of two >= 2",
                    params.size
                )));
            }
            let s = params.size;
            let mut groups = Vec::new();
            for bi in 0..s / 2 {
                for bj in 0..s / 2 {
                    let mut g: Vec<usize> = [(0, 0), (0, 1), (1, 0), (1, 1)]
                        .iter()
                        .map(|&(di, dj)| flatten(&[2 * bi + di, 2 * bj + dj], s))
                        .collect();
                    g.sort_unstable();
                    groups.push(g);
                }
            }
            (2, s, groups)
        }
        SynthKind::Iid => {
            if params.size == 0 {
                return Err(Error::Argument("feature count must be positive".into()));
            }
            (1, params.size, (0..params.size).map(|n| vec![n]).collect())
        }
    };
    let n = side.pow(dim as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise = (1.0 - params.rho * params.rho).max(0.0).sqrt();
    let mut features = vec![0.0; params.instances * n];
    let mut labels = Vec::with_capacity(params.instances);
    for m in 0..params.instances {
        let row = &mut features[m * n..(m + 1) * n];
        for g in &groups {
            let shared: f64 = StandardNormal.sample(&mut rng);
            for (i, &f) in g.iter().enumerate() {
                let own: f64 = StandardNormal.sample(&mut rng);
                // The first member carries the latent factor exactly, as in a correlated pair.
                let value = if i == 0 && g.len() == 2 {
                    shared
                } else {
                    params.rho * shared + noise * own
                };
                row[f] = params.scale * if g.len() == 1 { own } else { value };
            }
        }
        let s: f64 = groups[0].iter().map(|&f| row[f]).sum();
        labels.push(if s >= 0.0 { 1.0 } else { -1.0 });
    }
    let dataset = Dataset::new(n, 1, dim, features, Some(labels))?;
    if !params.shuffle {
        return Ok(SynthOutput {
            dataset,
            groups,
            shuffle: None,
        });
    }
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(&mut rng);
    let perm = FeaturePermutation::new(dim, side, pi)?;
    let dataset = apply_permutation(&dataset, &perm)?;
    let groups = groups
        .into_iter()
        .map(|g| {
            let mut moved: Vec<usize> = g.into_iter().map(|f| perm.target(f)).collect();
            moved.sort_unstable();
            moved
        })
        .collect();
    Ok(SynthOutput {
        dataset,
        groups,
        shuffle: Some(perm),
    })
}

/// Grid coordinates of every member of each group, for reporting.
pub fn group_coords(groups: &[Vec<usize>], side: usize, dim: usize) -> Vec<Vec<Vec<usize>>> {
    groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|&f| {
                    let mut c = vec![0; dim];
                    unflatten(f, side, &mut c);
                    c
                })
                .collect()
        })
        .collect()
}
