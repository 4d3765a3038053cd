use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use entanglekit::data::{
    canonical_entanglements, empirical_data_tensor_dense, Dataset, DEFAULT_THETA,
};
use entanglekit::io::{self, Embedding, LoadedDataset, OneVsAll};
use entanglekit::rearrange::{
    apply_permutation, average_canonical_surrogate, permute_graph, random_swap_permutation,
    rearrange_graph, CutMode, CutOptions, DEFAULT_RESTARTS,
};
use entanglekit::surrogate::build_correlation_graph;
use entanglekit::synth::{generate, SynthKind, SynthParams};
use entanglekit::tree_tn::{
    check_necessary_bound_all, check_sufficient_condition, fit_hierarchical, DEFAULT_MEMORY_BUDGET,
};
use entanglekit::{CompatibleMap, Error, Result};

pub const THREADS_ENV: &str = "ENTANGLEKIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "entanglekit",
    version,
    about = "Entanglement of data tensors and feature rearrangement"
)]
struct Cli {
    /// Largest dense tensor, in f64 entries.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMORY_BUDGET)]
    mem_budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entanglement of the empirical data tensor under canonical partitions.
    Entangle {
        dataset: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        /// Level range `A..B`; defaults to 1..min(5, L).
        #[arg(long)]
        levels: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Finds a feature arrangement with low surrogate entanglement.
    Rearrange {
        dataset: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[command(flatten)]
        cut: CutArgs,
        /// Where to write the permutation JSON.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Reorders the features of a dataset by a permutation file.
    Apply {
        dataset: PathBuf,
        permutation: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Apply the inverse permutation instead.
        #[arg(long)]
        inverse: bool,
    },
    /// Applies seeded random position swaps to the features of a dataset.
    Swapgen {
        dataset: PathBuf,
        /// Number of random transpositions
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fits a width-R tree tensor network and checks the entanglement bounds.
    Tnfit {
        /// Binary tensor file.
        #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
        tensor: Option<PathBuf>,
        /// Dataset whose dense empirical data tensor is fitted.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Spatial dimension of a tensor input.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        width: usize,
        /// Accuracy for the bound checks; defaults to the achieved fit error.
        #[arg(long)]
        eps: Option<f64>,
        /// Sine-cosine angle scale; 0.085 when unset
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        embedding: Option<Embedding>,
        /// Where to write the fitted network.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Writes a synthetic dataset.
    Synth {
        /// block-pairs, grid-quadrants or iid.
        kind: SynthKind,
        /// Feature count, or grid side for grid-quadrants.
        #[arg(long, default_value_t = 16)]
        size: usize,
        #[arg(long, default_value_t = 500)]
        instances: usize,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        shuffle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
struct LoadArgs {
    /// Representation used for the computation; sincos embeds raw files.
    #[arg(long)]
    embedding: Option<Embedding>,
    /// Sine-cosine angle scale; 0.085 when unset
    #[arg(long)]
    theta: Option<f64>,
    /// Reduce class-id labels to CLASS versus the rest, balanced.
    #[arg(long, value_name = "CLASS")]
    one_vs_all: Option<i64>,
    /// Seed for subsampling and the cut heuristic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CutArgs {
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Solve every cut exhaustively.
    #[arg(long, conflicts_with = "heuristic_cut")]
    exact_cut: bool,
    /// Never solve cuts exhaustively.
    #[arg(long)]
    heuristic_cut: bool,
}

fn parse_levels(text: &str) -> Result<(u32, u32)> {
    let bad = || Error::Argument(format!("level range {text:?} is not of the form A..B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn load(path: &Path, args: &LoadArgs) -> Result<LoadedDataset> {
    let ova = args.one_vs_all.map(|class| OneVsAll {
        class,
        seed: args.seed,
    });
    io::read_dataset(path, ova)
}

/// Brings a loaded dataset into the requested representation, padding one-dimensional
/// layouts to a power of two.
fn prepare(loaded: &LoadedDataset, embedding: Embedding, theta: Option<f64>) -> Result<Dataset> {
    let ds = match (loaded.header.embedding, embedding) {
        (Embedding::Raw, Embedding::Sincos) => {
            loaded.dataset.embed_sincos(theta.unwrap_or(DEFAULT_THETA))
        }
        (Embedding::Sincos, Embedding::Raw) => {
            return Err(Error::Precondition(
                "file is already embedded; raw values are unavailable".into(),
            ))
        }
        _ => loaded.dataset.clone(),
    };
    if ds.spatial_dim() == 1 {
        ds.pad_to_power_of_two()
    } else {
        Ok(ds)
    }
}

fn emit(value: &impl Serialize, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_entangle(
    dataset: &Path,
    load_args: &LoadArgs,
    levels: Option<&str>,
    output: Option<&Path>,
) -> Result<()> {
    let loaded = load(dataset, load_args)?;
    let ds = prepare(
        &loaded,
        load_args.embedding.unwrap_or(Embedding::Sincos),
        load_args.theta,
    )?;
    let map = ds.compatible_map()?;
    let (lo, hi) = match levels {
        Some(t) => parse_levels(t)?,
        None => (1, map.levels().min(5)),
    };
    if lo == 0 || lo > hi || hi > map.levels() {
        return Err(Error::Argument(format!(
            "level range {lo}..{hi} outside 1..{}",
            map.levels()
        )));
    }
    let values = canonical_entanglements(&ds, lo, hi)?;
    let partitions: Vec<_> = values
        .iter()
        .map(|(p, qe)| json!({"level": p.level, "block": p.block, "axes": p.axes, "entanglement": qe}))
        .collect();
    let level_averages: Vec<_> = (lo..=hi)
        .map(|l| {
            let at: Vec<f64> = values
                .iter()
                .filter(|(p, _)| p.level == l)
                .map(|(_, v)| *v)
                .collect();
            json!({"level": l, "average": at.iter().sum::<f64>() / at.len() as f64})
        })
        .collect();
    let average = values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64;
    emit(
        &json!({
            "M": ds.n_instances(),
            "N": ds.n_features(),
            "D": ds.feature_dim(),
            "P": ds.spatial_dim(),
            "padding": ds.padding(),
            "levels": [lo, hi],
            "partitions": partitions,
            "level_averages": level_averages,
            "average": average,
        }),
        output,
    )
}

fn cmd_rearrange(dataset: &Path, load_args: &LoadArgs, cut: &CutArgs, output: &Path) -> Result<()> {
    let loaded = load(dataset, load_args)?;
    let original_n = loaded.dataset.n_features();
    let ds = prepare(
        &loaded,
        load_args.embedding.unwrap_or(Embedding::Raw),
        load_args.theta,
    )?;
    let side = ds.side()?;
    let levels = CompatibleMap::new(side, ds.spatial_dim())?.levels();
    let graph = build_correlation_graph(&ds)?;
    let mode = if cut.exact_cut {
        CutMode::Exact
    } else if cut.heuristic_cut {
        CutMode::Heuristic
    } else {
        CutMode::Auto
    };
    let opts = CutOptions {
        seed: load_args.seed,
        restarts: cut.restarts,
        mode,
    };
    let perm = rearrange_graph(&graph, ds.spatial_dim(), side, &opts)?;
    let before = average_canonical_surrogate(&graph, ds.spatial_dim(), side, 1, levels)?;
    let after = average_canonical_surrogate(
        &permute_graph(&graph, &perm)?,
        ds.spatial_dim(),
        side,
        1,
        levels,
    )?;
    let written = if ds.padding() > 0 {
        perm.strip_padding(original_n)?
    } else {
        perm
    };
    io::write_permutation(output, &written)?;
    emit(
        &json!({
            "permutation": output.display().to_string(),
            "padding": ds.padding(),
            "levels": [1, levels],
            "surrogate_before": before,
            "surrogate_after": after,
        }),
        None,
    )
}

fn cmd_apply(dataset: &Path, permutation: &Path, output: &Path, inverse: bool) -> Result<()> {
    let loaded = io::read_dataset(dataset, None)?;
    let mut perm = io::read_permutation(permutation)?;
    if inverse {
        perm = perm.inverse();
    }
    let out = apply_permutation(&loaded.dataset, &perm)?;
    io::write_dataset(output, &out, loaded.header.embedding, loaded.header.theta)
}

fn cmd_swapgen(dataset: &Path, k: usize, seed: u64, output: &Path) -> Result<()> {
    let loaded = io::read_dataset(dataset, None)?;
    let ds = &loaded.dataset;
    let perm = random_swap_permutation(ds.spatial_dim(), ds.side()?, k, seed)?;
    let out = apply_permutation(ds, &perm)?;
    io::write_dataset(output, &out, loaded.header.embedding, loaded.header.theta)
}

#[allow(clippy::too_many_arguments)]
fn cmd_tnfit(
    tensor: Option<&Path>,
    dataset: Option<&Path>,
    dim: usize,
    width: usize,
    eps: Option<f64>,
    embedding: Option<Embedding>,
    theta: Option<f64>,
    output: Option<&Path>,
    budget: u64,
) -> Result<()> {
    let (a, map) = match (tensor, dataset) {
        (Some(t), _) => {
            let a = io::read_tensor(t)?;
            let n = a.ndim();
            let side = (n as f64).powf(1.0 / dim as f64).round() as usize;
            if side.checked_pow(dim as u32) != Some(n) {
                return Err(Error::Shape(format!(
                    "{n} axes do not form a {dim}-dimensional grid"
                )));
            }
            (a, CompatibleMap::new(side, dim)?)
        }
        (None, Some(d)) => {
            let loaded = io::read_dataset(d, None)?;
            let ds = prepare(&loaded, embedding.unwrap_or(Embedding::Sincos), theta)?;
            (
                empirical_data_tensor_dense(&ds, budget)?,
                ds.compatible_map()?,
            )
        }
        (None, None) => return Err(Error::Argument("give --tensor or --dataset".into())),
    };
    let fit = fit_hierarchical(&a, width, &map, budget)?;
    let eps = eps.unwrap_or(fit.achieved_error);
    let norm = a.norm();
    // The necessary condition only speaks about eps <= |A|/4.
    let necessary = if eps > 0.0 && eps <= norm / 4.0 {
        Some(check_necessary_bound_all(&a, width, eps, &map)?)
    } else {
        None
    };
    let sufficient = if eps > 0.0 {
        Some(check_sufficient_condition(&a, width, eps, &map, budget)?)
    } else {
        None
    };
    if let Some(p) = output {
        io::write_network(p, &fit.network)?;
    }
    emit(
        &json!({
            "width": width,
            "norm": norm,
            "achieved_error": fit.achieved_error,
            "relative_error": if norm > 0.0 { fit.achieved_error / norm } else { 0.0 },
            "tail_bound": fit.tail_bound(),
            "eps": eps,
            "necessary_bound": necessary.as_ref().map(|r| json!({
                "violations": r.iter().filter(|b| !b.holds).count(),
                "partitions": r,
            })),
            "sufficient_condition": sufficient,
        }),
        None,
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    kind: SynthKind,
    size: usize,
    instances: usize,
    rho: f64,
    scale: f64,
    shuffle: bool,
    seed: u64,
    output: &Path,
) -> Result<()> {
    let params = SynthParams {
        kind,
        size,
        instances,
        rho,
        scale,
        shuffle,
        seed,
    };
    let out = generate(&params)?;
    io::write_dataset(output, &out.dataset, Embedding::Raw, None)?;
    emit(
        &json!({
            "dataset": output.display().to_string(),
            "groups": out.groups,
            "shuffle": out.shuffle.as_ref().map(|p| p.as_slice().to_vec()),
        }),
        None,
    )
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Argument(format!("{THREADS_ENV}={v:?} is not a positive integer"))
        })?;
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    configure_threads()?;
    let budget = cli.mem_budget;
    match cli.command {
        Command::Entangle {
            dataset,
            load,
            levels,
            output,
        } => cmd_entangle(&dataset, &load, levels.as_deref(), output.as_deref()),
        Command::Rearrange {
            dataset,
            load,
            cut,
            output,
        } => cmd_rearrange(&dataset, &load, &cut, &output),
        Command::Apply {
            dataset,
            permutation,
            output,
            inverse,
        } => cmd_apply(&dataset, &permutation, &output, inverse),
        Command::Swapgen {
            dataset,
            k,
            seed,
            output,
        } => cmd_swapgen(&dataset, k, seed, &output),
        Command::Tnfit {
            tensor,
            dataset,
            dim,
            width,
            eps,
            theta,
            embedding,
            output,
        } => cmd_tnfit(
            tensor.as_deref(),
            dataset.as_deref(),
            dim,
            width,
            eps,
            embedding,
            theta,
            output.as_deref(),
            budget,
        ),
        Command::Synth {
            kind,
            size,
            instances,
            rho,
            scale,
            shuffle,
            seed,
            output,
        } => cmd_synth(kind, size, instances, rho, scale, shuffle, seed, &output),
    }
}

/// Runs the tool and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
