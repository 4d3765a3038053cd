//! Dataset CSV files with JSON sidecars, and file wrappers for tensors, networks and
//! permutations.
//!
//! A dataset `data.csv` has one row per instance: an optional label column, then `N * D`
//! feature values grouped feature-major. Its header lives in `data.csv.json`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rearrange::FeaturePermutation;
use crate::tensor::DenseTensor;
use crate::tree_tn::TreeTensorNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Embedding {
    #[default]
    Raw,
    Sincos,
}

impl std::str::FromStr for Embedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "sincos" => Ok(Self::Sincos),
            other => Err(Error::Argument(format!("unknown embedding {other:?}"))),
        }
    }
}

/// Sidecar header. `N` counts all features, so a `P = 2` grid of side 4 has `N = 16`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "P")]
    pub p: usize,
    pub labeled: bool,
    #[serde(default)]
    pub embedding: Embedding,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Constant features appended to reach a power of two.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub padding: usize,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl DatasetHeader {
    pub fn describe(ds: &Dataset, embedding: Embedding, theta: Option<f64>) -> Self {
        Self {
            m: ds.n_instances(),
            n: ds.n_features(),
            d: ds.feature_dim(),
            p: ds.spatial_dim(),
            labeled: ds.labels().is_some(),
            embedding,
            theta,
            padding: ds.padding(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub header: DatasetHeader,
}

/// Binary one-vs-all reduction: `class` becomes +1, everything else -1, with the larger side
/// subsampled to the size of the smaller one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneVsAll {
    pub class: i64,
    pub seed: u64,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Shortest text that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("not a number: {:?}", cell.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            column,
            message: "non-finite value".into(),
        });
    }
    Ok(v)
}

pub fn read_header(csv: &Path) -> Result<DatasetHeader> {
    let path = sidecar_path(csv);
    let text = std::fs::read_to_string(&path)?;
    let header: DatasetHeader = serde_json::from_str(&text)?;
    if header.n == 0 || header.d == 0 || header.p == 0 {
        return Err(Error::Format(format!(
            "{}: N, D and P must be positive",
            path.display()
        )));
    }
    Ok(header)
}

/// Reads a dataset and its sidecar. Labels must be ±1 unless `one_vs_all` is given, in which
/// case they are integer class ids.
pub fn read_dataset(csv: &Path, one_vs_all: Option<OneVsAll>) -> Result<LoadedDataset> {
    let mut header = read_header(csv)?;
    let width = header.n * header.d + usize::from(header.labeled);
    let reader = BufReader::new(File::open(csv)?);
    let mut features = Vec::with_capacity(header.m * (width - usize::from(header.labeled)));
    let mut raw_labels = Vec::new();
    let mut rows = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(Error::Parse {
                line: lineno,
                column: cells.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", cells.len()),
            });
        }
        for (j, cell) in cells.iter().enumerate() {
            let v = parse_cell(cell, lineno, j + 1)?;
            if header.labeled && j == 0 {
                if one_vs_all.is_some() {
                    if v.fract() != 0.0 {
                        return Err(Error::Parse {
                            line: lineno,
                            column: 1,
                            message: "class id must be an integer".into(),
                        });
                    }
                } else if v != 1.0 && v != -1.0 {
                    return Err(Error::Parse {
                        line: lineno,
                        column: 1,
                        message: format!("label {v} is not +1 or -1"),
                    });
                }
                raw_labels.push(v);
            } else {
                features.push(v);
            }
        }
        rows += 1;
    }
    if rows != header.m {
        return Err(Error::Format(format!(
            "header declares M = {}, file has {rows} rows",
            header.m
        )));
    }
    let mut rows_kept: Option<Vec<usize>> = None;
    let labels = if header.labeled {
        match one_vs_all {
            Some(ova) => {
                let target = ova.class as f64;
                let mut pos: Vec<usize> = (0..rows).filter(|&r| raw_labels[r] == target).collect();
                let mut neg: Vec<usize> = (0..rows).filter(|&r| raw_labels[r] != target).collect();
                if pos.is_empty() || neg.is_empty() {
                    return Err(Error::Precondition(format!(
                        "class {} leaves one side empty",
                        ova.class
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(ova.seed);
                let keep = pos.len().min(neg.len());
                pos.shuffle(&mut rng);
                neg.shuffle(&mut rng);
                pos.truncate(keep);
                neg.truncate(keep);
                let mut kept: Vec<usize> = pos.into_iter().chain(neg).collect();
                kept.sort_unstable();
                let labels = kept
                    .iter()
                    .map(|&r| if raw_labels[r] == target { 1.0 } else { -1.0 })
                    .collect();
                rows_kept = Some(kept);
                Some(labels)
            }
            None => Some(raw_labels),
        }
    } else {
        if one_vs_all.is_some() {
            return Err(Error::Precondition(
                "one-vs-all needs a labeled dataset".into(),
            ));
        }
        None
    };
    let mut dataset = match &rows_kept {
        Some(kept) => {
            let full = Dataset::new(header.n, header.d, header.p, features, None)?;
            full.select_instances(kept)?.with_labels(labels)?
        }
        None => Dataset::new(header.n, header.d, header.p, features, labels)?,
    };
    dataset.set_padding(header.padding);
    header.m = dataset.n_instances();
    Ok(LoadedDataset { dataset, header })
}

/// Writes `csv` and its sidecar.
pub fn write_dataset(
    csv: &Path,
    ds: &Dataset,
    embedding: Embedding,
    theta: Option<f64>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(csv)?);
    let stride = ds.n_features() * ds.feature_dim();
    let labels = ds.labels();
    for (m, row) in ds.raw_features().chunks_exact(stride).enumerate() {
        let mut cells: Vec<String> = Vec::with_capacity(stride + 1);
        if let Some(l) = labels {
            cells.push(format_f64(l[m]));
        }
        cells.extend(row.iter().map(|&v| format_f64(v)));
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    let header = DatasetHeader::describe(ds, embedding, theta);
    std::fs::write(
        sidecar_path(csv),
        serde_json::to_string_pretty(&header)? + "\n",
    )?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    DenseTensor::read_binary(BufReader::new(File::open(path)?))
}

pub fn write_tensor(path: &Path, t: &DenseTensor) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    t.write_binary(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_network(path: &Path) -> Result<TreeTensorNetwork> {
    TreeTensorNetwork::read(BufReader::new(File::open(path)?))
}

pub fn write_network(path: &Path, net: &TreeTensorNetwork) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    net.write(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_permutation(path: &Path) -> Result<FeaturePermutation> {
    FeaturePermutation::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_permutation(path: &Path, perm: &FeaturePermutation) -> Result<()> {
    std::fs::write(path, perm.to_json()? + "\n")?;
    Ok(())
}
