//! Greedy recursive feature rearrangement through minimum balanced cuts of the correlation graph.
//!
//! Cuts are found with Kernighan-Lin from several random balanced starts. Small vertex sets can
//! be solved exhaustively instead. Every block at a level is cut independently, with a seed
//! derived from `(seed, level, block)`, so parallel and sequential runs agree.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::partitions::{exact_log2, flatten, unflatten, CompatibleMap};
use crate::surrogate::{build_correlation_graph, CorrelationGraph};

pub const DEFAULT_RESTARTS: usize = 8;

/// Largest vertex set solved exhaustively under [`CutMode::Auto`] for bisection.
pub const AUTO_EXACT_BISECTION: usize = 12;
/// Largest vertex set solved exhaustively under [`CutMode::Auto`] for `2^P`-way cuts.
pub const AUTO_EXACT_MULTIWAY: usize = 8;
/// Hard cap for forced exhaustive search.
pub const MAX_EXACT_VERTICES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutMode {
    /// Exhaustive for small vertex sets, Kernighan-Lin otherwise.
    #[default]
    Auto,
    /// Always Kernighan-Lin.
    Heuristic,
    /// Always exhaustive.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutOptions {
    pub seed: u64,
    pub restarts: usize,
    pub mode: CutMode,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            mode: CutMode::Auto,
        }
    }
}

/// An equal-size split of a vertex set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutSolution {
    /// Blocks sorted ascending internally; ordered by their lowest vertex.
    pub parts: Vec<Vec<usize>>,
    /// Total weight of edges joining different blocks.
    pub cut_weight: f64,
    /// Mean surrogate entanglement of the blocks against the whole graph.
    pub objective: f64,
    pub restarts: usize,
    pub exact: bool,
    /// Best cut weight after each restart (heuristic) or the single optimum (exact).
    pub trace: Vec<f64>,
}

/// Cut record for one block of one level of a rearrangement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCut {
    pub level: u32,
    pub block: usize,
    pub cut_weight: f64,
    pub exact: bool,
}

/// Bijection from row-major feature indices to target row-major positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePermutation {
    #[serde(rename = "P")]
    dim: usize,
    /// Grid side length (the feature count when `P = 1`).
    #[serde(rename = "N")]
    side: usize,
    pi: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    cuts: Vec<LevelCut>,
}

fn validate_bijection(pi: &[usize]) -> Result<()> {
    let mut seen = vec![false; pi.len()];
    for (i, &p) in pi.iter().enumerate() {
        if p >= pi.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Argument(format!("pi[{i}] = {p} breaks bijectivity")));
        }
    }
    Ok(())
}

impl FeaturePermutation {
    pub fn new(dim: usize, side: usize, pi: Vec<usize>) -> Result<Self> {
        if dim == 0 || side == 0 {
            return Err(Error::Argument("P and N must be positive".into()));
        }
        let total = u32::try_from(dim)
            .ok()
            .and_then(|d| side.checked_pow(d))
            .ok_or_else(|| Error::Argument("grid too large".into()))?;
        if pi.len() != total {
            return Err(Error::Shape(format!(
                "pi has {} entries, expected {total}",
                pi.len()
            )));
        }
        validate_bijection(&pi)?;
        let layout = (dim > 1).then(|| "row-major".to_string());
        Ok(Self {
            dim,
            side,
            pi,
            layout,
            cuts: Vec::new(),
        })
    }

    pub fn identity(dim: usize, side: usize) -> Result<Self> {
        let total = side.checked_pow(dim as u32).unwrap_or(usize::MAX);
        Self::new(dim, side, (0..total).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Target position of feature `n`.
    pub fn target(&self, n: usize) -> usize {
        self.pi[n]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }

    /// Target grid coordinates of the feature at grid coordinates `coords`.
    pub fn target_coords(&self, coords: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        unflatten(self.pi[flatten(coords, self.side)], self.side, &mut out);
        out
    }

    pub fn cuts(&self) -> &[LevelCut] {
        &self.cuts
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.pi.len()];
        for (n, &p) in self.pi.iter().enumerate() {
            inv[p] = n;
        }
        Self {
            pi: inv,
            cuts: Vec::new(),
            ..self.clone()
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &FeaturePermutation) -> Result<Self> {
        if other.pi.len() != self.pi.len() {
            return Err(Error::Shape("permutation sizes differ".into()));
        }
        let pi = self.pi.iter().map(|&p| other.pi[p]).collect();
        Ok(Self {
            pi,
            cuts: Vec::new(),
            ..self.clone()
        })
    }

    /// Restricts a one-dimensional permutation over padded features to the first `n_orig`,
    /// keeping their relative target order.
    pub fn strip_padding(&self, n_orig: usize) -> Result<Self> {
        if self.dim != 1 || n_orig == 0 || n_orig > self.pi.len() {
            return Err(Error::Argument(format!(
                "cannot strip a {}-dimensional permutation of {} down to {n_orig}",
                self.dim,
                self.pi.len()
            )));
        }
        let mut order: Vec<usize> = (0..n_orig).collect();
        order.sort_by_key(|&n| self.pi[n]);
        let mut pi = vec![0; n_orig];
        for (rank, n) in order.into_iter().enumerate() {
            pi[n] = rank;
        }
        Self::new(1, n_orig, pi)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FeaturePermutation = serde_json::from_str(text)?;
        let mut checked = Self::new(raw.dim, raw.side, raw.pi)?;
        checked.cuts = raw.cuts;
        Ok(checked)
    }
}

/// Moves feature `n` to position `pi(n)`.
pub fn apply_permutation(ds: &Dataset, perm: &FeaturePermutation) -> Result<Dataset> {
    if perm.len() != ds.n_features() {
        return Err(Error::Shape(format!(
            "permutation over {} features, dataset has {}",
            perm.len(),
            ds.n_features()
        )));
    }
    if ds.spatial_dim() != perm.dim() {
        return Err(Error::Shape(format!(
            "permutation is {}-dimensional, dataset is {}-dimensional",
            perm.dim(),
            ds.spatial_dim()
        )));
    }
    Ok(ds.reorder_features(perm.as_slice()))
}

/// `k` uniformly random transpositions of feature positions.
pub fn random_swap_permutation(
    dim: usize,
    side: usize,
    k: usize,
    seed: u64,
) -> Result<FeaturePermutation> {
    let mut perm = FeaturePermutation::identity(dim, side)?;
    let n = perm.len();
    if n < 2 {
        return Ok(perm);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // pos[f] is the current position of original feature f; occupant is its inverse.
    let mut occupant: Vec<usize> = (0..n).collect();
    for _ in 0..k {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        occupant.swap(a, b);
    }
    for (pos, &f) in occupant.iter().enumerate() {
        perm.pi[f] = pos;
    }
    Ok(perm)
}

/// Applies `k` seeded random position swaps to the features of `ds`.
pub fn random_swaps(ds: &Dataset, k: usize, seed: u64) -> Result<Dataset> {
    let side = ds.side()?;
    let perm = random_swap_permutation(ds.spatial_dim(), side, k, seed)?;
    apply_permutation(ds, &perm)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn block_seed(seed: u64, level: u32, block: usize) -> u64 {
    splitmix(splitmix(seed ^ splitmix(level as u64)) ^ block as u64)
}

/// Dense weights restricted to a vertex list.
struct LocalGraph {
    n: usize,
    w: Vec<f64>,
}

impl LocalGraph {
    fn new(graph: &CorrelationGraph, vertices: &[usize]) -> Self {
        let n = vertices.len();
        let mut w = vec![0.0; n * n];
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate() {
                if i != j {
                    w[i * n + j] = graph.weight(a, b);
                }
            }
        }
        Self { n, w }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    /// Cross weight of a labeling into groups.
    fn cut(&self, group: &[usize]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if group[i] != group[j] {
                    total += self.at(i, j);
                }
            }
        }
        total
    }

    /// Kernighan-Lin passes between groups `ga` and `gb` of `group`, other vertices untouched.
    /// Returns the per-pass cut weights between the two groups, starting from the initial one.
    fn kernighan_lin(&self, group: &mut [usize], ga: usize, gb: usize) -> Vec<f64> {
        let members: Vec<usize> = (0..self.n)
            .filter(|&v| group[v] == ga || group[v] == gb)
            .collect();
        let pair_cut = |group: &[usize]| {
            let mut total = 0.0;
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    if group[i] != group[j] {
                        total += self.at(i, j);
                    }
                }
            }
            total
        };
        let max_negative = members
            .iter()
            .flat_map(|&i| members.iter().map(move |&j| (i, j)))
            .map(|(i, j)| -self.at(i, j))
            .fold(0.0f64, f64::max);
        let mut history = vec![pair_cut(group)];
        loop {
            let mut d = vec![0.0; self.n];
            for &v in &members {
                for &u in &members {
                    if u != v {
                        d[v] += if group[u] == group[v] {
                            -self.at(u, v)
                        } else {
                            self.at(u, v)
                        };
                    }
                }
            }
            let mut locked = vec![false; self.n];
            let mut swaps = Vec::new();
            let mut running = 0.0;
            let mut best_total = 0.0;
            let mut best_len = 0;
            let steps = members.len() / 2;
            for _ in 0..steps {
                let mut side_a: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&v| !locked[v] && group[v] == ga)
                    .collect();
                let mut side_b: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&v| !locked[v] && group[v] == gb)
                    .collect();
                if side_a.is_empty() || side_b.is_empty() {
                    break;
                }
                side_a.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(x.cmp(&y)));
                side_b.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(x.cmp(&y)));
                let mut best: Option<(f64, usize, usize)> = None;
                'outer: for &a in &side_a {
                    for &b in &side_b {
                        let optimistic = d[a] + d[b] + 2.0 * max_negative;
                        if let Some((g, _, _)) = best {
                            if optimistic <= g {
                                if b == side_b[0] {
                                    break 'outer;
                                }
                                break;
                            }
                        }
                        let g = d[a] + d[b] - 2.0 * self.at(a, b);
                        if best.is_none_or(|(bg, _, _)| g > bg) {
                            best = Some((g, a, b));
                        }
                    }
                }
                let (g, a, b) = best.expect("both sides nonempty");
                locked[a] = true;
                locked[b] = true;
                for &v in &members {
                    if locked[v] {
                        continue;
                    }
                    let (same, other) = if group[v] == ga { (a, b) } else { (b, a) };
                    d[v] += 2.0 * self.at(v, same) - 2.0 * self.at(v, other);
                }
                swaps.push((a, b));
                running += g;
                if running > best_total + 1e-12 {
                    best_total = running;
                    best_len = swaps.len();
                }
            }
            if best_len == 0 {
                break;
            }
            for &(a, b) in &swaps[..best_len] {
                group[a] = gb;
                group[b] = ga;
            }
            let now = pair_cut(group);
            if now >= history[history.len() - 1] - 1e-12 {
                // Rounding can fake a gain; stop instead of cycling.
                history.push(now);
                break;
            }
            history.push(now);
        }
        history
    }
}

/// Parts as sorted global vertex lists, ordered by their lowest member.
fn canonical_parts(vertices: &[usize], group: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut parts = vec![Vec::new(); k];
    for (i, &g) in group.iter().enumerate() {
        parts[g].push(vertices[i]);
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    parts.sort_by_key(|p| p[0]);
    parts
}

#[allow(clippy::too_many_arguments)]
fn solution(
    graph: &CorrelationGraph,
    vertices: &[usize],
    group: &[usize],
    k: usize,
    cut_weight: f64,
    restarts: usize,
    exact: bool,
    trace: Vec<f64>,
) -> CutSolution {
    let parts = canonical_parts(vertices, group, k);
    let objective = parts.iter().map(|p| graph.surrogate(p)).sum::<f64>() / k as f64;
    CutSolution {
        parts,
        cut_weight,
        objective,
        restarts,
        exact,
        trace,
    }
}

/// Visits every split of `0..n` into `k` unordered groups of equal size.
fn for_each_equal_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        group: &mut [usize],
        counts: &mut [usize],
        used: usize,
        size: usize,
        next: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let n = group.len();
        if next == n {
            visit(group);
            return;
        }
        // Groups open in order, so a vertex may join an open group with room or the next fresh one.
        for g in 0..=used.min(counts.len() - 1) {
            if counts[g] == size {
                continue;
            }
            group[next] = g;
            counts[g] += 1;
            let new_used = if g == used { used + 1 } else { used };
            rec(group, counts, new_used, size, next + 1, visit);
            counts[g] -= 1;
        }
    }
    let mut group = vec![0; n];
    let mut counts = vec![0; k];
    rec(&mut group, &mut counts, 0, n / k, 0, &mut visit);
}

fn exact_cut(graph: &CorrelationGraph, vertices: &[usize], k: usize) -> Result<CutSolution> {
    if vertices.len() > MAX_EXACT_VERTICES {
        return Err(Error::Argument(format!(
            "exhaustive cut limited to {MAX_EXACT_VERTICES} vertices, got {}",
            vertices.len()
        )));
    }
    let local = LocalGraph::new(graph, vertices);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_equal_partition(vertices.len(), k, |group| {
        let c = local.cut(group);
        // Strict improvement keeps the first optimum in enumeration order.
        if best.as_ref().is_none_or(|(b, _)| c < *b - 1e-12) {
            best = Some((c, group.to_vec()));
        }
    });
    let (c, group) = best.expect("at least one partition");
    Ok(solution(graph, vertices, &group, k, c, 0, true, vec![c]))
}

fn validate_vertices(graph: &CorrelationGraph, vertices: &[usize]) -> Result<()> {
    let mut seen = vec![false; graph.n_vertices()];
    for &v in vertices {
        if v >= graph.n_vertices() || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Argument(format!(
                "vertex {v} out of range or repeated"
            )));
        }
    }
    Ok(())
}

/// Minimum balanced bisection of `vertices` in the correlation graph.
pub fn min_balanced_cut(
    graph: &CorrelationGraph,
    vertices: &[usize],
    opts: &CutOptions,
) -> Result<CutSolution> {
    validate_vertices(graph, vertices)?;
    let n = vertices.len();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "balanced cut needs an even vertex count >= 2, got {n}"
        )));
    }
    if n == 2 {
        let group = [0, 1];
        let c = graph.weight(vertices[0], vertices[1]);
        return Ok(solution(graph, vertices, &group, 2, c, 0, true, vec![c]));
    }
    let exact = match opts.mode {
        CutMode::Exact => true,
        CutMode::Heuristic => false,
        CutMode::Auto => n <= AUTO_EXACT_BISECTION,
    };
    if exact {
        return exact_cut(graph, vertices, 2);
    }
    let local = LocalGraph::new(graph, vertices);
    let restarts = opts.restarts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut trace = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        order.shuffle(&mut rng);
        let mut group = vec![0; n];
        for &i in &order[n / 2..] {
            group[i] = 1;
        }
        local.kernighan_lin(&mut group, 0, 1);
        let c = local.cut(&group);
        if best.as_ref().is_none_or(|(b, _)| c < *b - 1e-12) {
            best = Some((c, group));
        }
        trace.push(best.as_ref().map(|b| b.0).unwrap_or(c));
    }
    let (c, group) = best.expect("restarts >= 1");
    Ok(solution(
        graph, vertices, &group, 2, c, restarts, false, trace,
    ))
}

/// Minimum balanced `2^P`-way cut of `vertices`.
pub fn min_balanced_pow2_cut(
    graph: &CorrelationGraph,
    vertices: &[usize],
    dim: usize,
    opts: &CutOptions,
) -> Result<CutSolution> {
    if dim == 0 || dim >= usize::BITS as usize {
        return Err(Error::Argument(format!("invalid dimension {dim}")));
    }
    if dim == 1 {
        return min_balanced_cut(graph, vertices, opts);
    }
    validate_vertices(graph, vertices)?;
    let k = 1usize << dim;
    let n = vertices.len();
    if n == 0 || !n.is_multiple_of(k) {
        return Err(Error::Argument(format!(
            "{n} vertices cannot split into {k} equal blocks"
        )));
    }
    if n == k {
        let group: Vec<usize> = (0..n).collect();
        let local = LocalGraph::new(graph, vertices);
        let c = local.cut(&group);
        return Ok(solution(graph, vertices, &group, k, c, 0, true, vec![c]));
    }
    let exact = match opts.mode {
        CutMode::Exact => true,
        CutMode::Heuristic => false,
        CutMode::Auto => n <= AUTO_EXACT_MULTIWAY,
    };
    if exact {
        return exact_cut(graph, vertices, k);
    }
    let local = LocalGraph::new(graph, vertices);
    let restarts = opts.restarts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut trace = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        // Recursive bisection: split every current group in two, `dim` times.
        let mut group = vec![0usize; n];
        for round in 0..dim {
            let groups = 1usize << round;
            for g in 0..groups {
                let mut members: Vec<usize> = (0..n).filter(|&v| group[v] == g).collect();
                members.shuffle(&mut rng);
                let fresh = g + groups;
                for &v in &members[members.len() / 2..] {
                    group[v] = fresh;
                }
                local.kernighan_lin(&mut group, g, fresh);
            }
        }
        // Pairwise refinement until no pair improves.
        let mut current = local.cut(&group);
        loop {
            for ga in 0..k {
                for gb in ga + 1..k {
                    local.kernighan_lin(&mut group, ga, gb);
                }
            }
            let next = local.cut(&group);
            if next >= current - 1e-12 {
                break;
            }
            current = next;
        }
        if best.as_ref().is_none_or(|(b, _)| current < *b - 1e-12) {
            best = Some((current, group));
        }
        trace.push(best.as_ref().map(|b| b.0).unwrap_or(current));
    }
    let (c, group) = best.expect("restarts >= 1");
    Ok(solution(
        graph, vertices, &group, k, c, restarts, false, trace,
    ))
}

/// Algorithm over a correlation graph on `side^dim` row-major features.
pub fn rearrange_graph(
    graph: &CorrelationGraph,
    dim: usize,
    side: usize,
    opts: &CutOptions,
) -> Result<FeaturePermutation> {
    let levels = exact_log2(side)
        .filter(|&l| l >= 1)
        .ok_or_else(|| Error::Argument(format!("grid side {side} is not a power of two >= 2")))?;
    let map = CompatibleMap::new(side, dim)?;
    if graph.n_vertices() != map.len() {
        return Err(Error::Shape(format!(
            "graph has {} vertices, grid has {}",
            graph.n_vertices(),
            map.len()
        )));
    }
    let arity = map.arity();
    // Blocks are tracked as (corner in target coordinates, member features).
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![0; dim], (0..map.len()).collect())];
    let mut cuts = Vec::new();
    for level in 0..levels {
        let half = side >> (level + 1);
        let solved = blocks
            .par_iter()
            .enumerate()
            .map(|(b, (_, members))| {
                let block_opts = CutOptions {
                    seed: block_seed(opts.seed, level, b),
                    ..*opts
                };
                if members.len() == arity {
                    // Singletons: one vertex per child, lowest index first.
                    let mut parts: Vec<Vec<usize>> = members.iter().map(|&v| vec![v]).collect();
                    parts.sort_by_key(|p| p[0]);
                    let mut total = 0.0;
                    for i in 0..parts.len() {
                        for j in i + 1..parts.len() {
                            total += graph.weight(parts[i][0], parts[j][0]);
                        }
                    }
                    return Ok((parts, total, true));
                }
                let sol = min_balanced_pow2_cut(graph, members, dim, &block_opts)?;
                Ok((sol.parts, sol.cut_weight, sol.exact))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(blocks.len() * arity);
        for (b, ((corner, _), (parts, cut_weight, exact))) in blocks.iter().zip(solved).enumerate()
        {
            cuts.push(LevelCut {
                level,
                block: b,
                cut_weight,
                exact,
            });
            let mut offset = vec![0usize; dim];
            for (child, part) in parts.into_iter().enumerate() {
                unflatten(child, 2, &mut offset);
                let child_corner: Vec<usize> = corner
                    .iter()
                    .zip(&offset)
                    .map(|(c, o)| c + o * half)
                    .collect();
                next.push((child_corner, part));
            }
        }
        blocks = next;
    }
    let mut pi = vec![0; map.len()];
    for (corner, members) in blocks {
        debug_assert_eq!(members.len(), 1);
        pi[members[0]] = flatten(&corner, side);
    }
    let mut perm = FeaturePermutation::new(dim, side, pi)?;
    perm.cuts = cuts;
    Ok(perm)
}

/// Rearranges a one-dimensional dataset by recursive minimum balanced bisection.
pub fn rearrange_1d(ds: &Dataset, opts: &CutOptions) -> Result<FeaturePermutation> {
    if ds.spatial_dim() != 1 {
        return Err(Error::Precondition(format!(
            "one-dimensional rearrangement on a {}-dimensional dataset",
            ds.spatial_dim()
        )));
    }
    rearrange_pdim(ds, opts)
}

/// Rearranges a dataset on an `N^P` grid by recursive `2^P`-way cuts.
pub fn rearrange_pdim(ds: &Dataset, opts: &CutOptions) -> Result<FeaturePermutation> {
    let side = ds.side()?;
    if exact_log2(side).is_none_or(|l| l == 0) {
        return Err(Error::Precondition(format!(
            "grid side {side} is not a power of two >= 2; pad first"
        )));
    }
    let graph = build_correlation_graph(ds)?;
    rearrange_graph(&graph, ds.spatial_dim(), side, opts)
}

/// Mean surrogate entanglement over canonical partitions at levels `lo..=hi` of the current
/// arrangement.
pub fn average_canonical_surrogate(
    graph: &CorrelationGraph,
    dim: usize,
    side: usize,
    lo: u32,
    hi: u32,
) -> Result<f64> {
    let map = CompatibleMap::new(side, dim)?;
    if lo == 0 || lo > hi || hi > map.levels() {
        return Err(Error::Argument(format!(
            "level range {lo}..{hi} outside 1..{}",
            map.levels()
        )));
    }
    let parts = crate::partitions::canonical_partitions_in_levels(&map, lo, hi)?;
    Ok(parts
        .iter()
        .map(|p| graph.surrogate(&p.features))
        .sum::<f64>()
        / parts.len() as f64)
}

/// Correlation graph of `ds` with vertices relabeled by `perm`.
pub fn permute_graph(
    graph: &CorrelationGraph,
    perm: &FeaturePermutation,
) -> Result<CorrelationGraph> {
    let n = graph.n_vertices();
    if perm.len() != n {
        return Err(Error::Shape("permutation and graph sizes differ".into()));
    }
    let mut w = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            w[perm.target(a) * n + perm.target(b)] = graph.weight(a, b);
        }
    }
    CorrelationGraph::from_weights(n, w)
}
