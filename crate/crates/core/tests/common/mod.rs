//! Independent reference implementations used to check the library. Nothing here calls into
//! the library's linear algebra.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller keeps this independent of rand_distr.
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix, eigenvalues descending.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[b][b].total_cmp(&m[a][a]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&i| v[r][i]).collect())
        .collect();
    (values, vectors)
}

/// One-sided Jacobi singular values, descending.
pub fn jacobi_singular_values(a: &[Vec<f64>]) -> Vec<f64> {
    let rows = a.len();
    let cols = a[0].len();
    // Orthogonalize the columns of the taller orientation.
    let mut m: Vec<Vec<f64>> = if rows >= cols {
        (0..cols)
            .map(|j| (0..rows).map(|i| a[i][j]).collect())
            .collect()
    } else {
        a.to_vec()
    };
    let k = m.len();
    for _sweep in 0..200 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = m[p].iter().map(|x| x * x).sum();
                let beta: f64 = m[q].iter().map(|x| x * x).sum();
                let gamma: f64 = m[p].iter().zip(&m[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m[p].len() {
                    let (x, y) = (m[p][i], m[q][i]);
                    m[p][i] = c * x - s * y;
                    m[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = m
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Entropy of normalized squared singular values, dropping those below `1e-12 * s_1`.
pub fn entropy_of(sv: &[f64]) -> f64 {
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let sq: Vec<f64> = sv
        .iter()
        .filter(|&&s| s > 1e-12 * top)
        .map(|s| s * s)
        .collect();
    let total: f64 = sq.iter().sum();
    -sq.iter()
        .map(|s| s / total)
        .map(|r| if r > 0.0 { r * r.ln() } else { 0.0 })
        .sum::<f64>()
}

/// Visits every multi-index of `dims` in row-major order.
pub fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let total: usize = dims.iter().product();
    let mut idx = vec![0; dims.len()];
    for flat in 0..total {
        let mut rem = flat;
        for a in (0..dims.len()).rev() {
            idx[a] = rem % dims[a];
            rem /= dims[a];
        }
        f(&idx);
    }
}

/// Matricization by brute-force re-indexing: rows over `subset` axes, columns over the rest,
/// both lexicographic with the lowest axis slowest.
pub fn matricize_loop(dims: &[usize], data: &[f64], subset: &[usize]) -> Vec<Vec<f64>> {
    let rest: Vec<usize> = (0..dims.len()).filter(|a| !subset.contains(a)).collect();
    let nr: usize = subset.iter().map(|&a| dims[a]).product();
    let nc: usize = rest.iter().map(|&a| dims[a]).product();
    let mut out = vec![vec![0.0; nc]; nr];
    let mut flat = 0;
    for_each_index(dims, |idx| {
        let r = subset.iter().fold(0, |acc, &a| acc * dims[a] + idx[a]);
        let c = rest.iter().fold(0, |acc, &a| acc * dims[a] + idx[a]);
        out[r][c] = data[flat];
        flat += 1;
    });
    out
}

pub fn entanglement_oracle(dims: &[usize], data: &[f64], subset: &[usize]) -> f64 {
    entropy_of(&jacobi_singular_values(&matricize_loop(dims, data, subset)))
}

/// Tail norm beyond the first `r` singular values.
pub fn tail_oracle(dims: &[usize], data: &[f64], subset: &[usize], r: usize) -> f64 {
    let sv = jacobi_singular_values(&matricize_loop(dims, data, subset));
    sv.iter().skip(r).map(|s| s * s).sum::<f64>().sqrt()
}

/// Z-order axis of grid coordinates: bits interleaved from the most significant, first
/// coordinate first.
pub fn morton(coords: &[usize], side: usize) -> usize {
    let bits = side.trailing_zeros();
    let mut axis = 0;
    for b in (0..bits).rev() {
        for &c in coords {
            axis = (axis << 1) | ((c >> b) & 1);
        }
    }
    axis
}

/// Row-major feature index to tensor axis on a `side^dim` grid.
pub fn feature_to_axis(feature: usize, side: usize, dim: usize) -> usize {
    let mut coords = vec![0; dim];
    let mut rem = feature;
    for c in coords.iter_mut().rev() {
        *c = rem % side;
        rem /= side;
    }
    morton(&coords, side)
}

/// Feature sets of the canonical blocks at `level`, built by splitting the grid directly.
pub fn canonical_feature_blocks(side: usize, dim: usize, level: u32) -> Vec<Vec<usize>> {
    let per = 1usize << level;
    let bs = side / per;
    let n_blocks = per.pow(dim as u32);
    (0..n_blocks)
        .map(|b| {
            let mut block = vec![0; dim];
            let mut rem = b;
            for c in block.iter_mut().rev() {
                *c = rem % per;
                rem /= per;
            }
            let mut feats = Vec::new();
            for f in 0..side.pow(dim as u32) {
                let mut coords = vec![0; dim];
                let mut rem = f;
                for c in coords.iter_mut().rev() {
                    *c = rem % side;
                    rem /= side;
                }
                if coords.iter().zip(&block).all(|(c, b)| c / bs == *b) {
                    feats.push(f);
                }
            }
            feats
        })
        .collect()
}

/// `(1/M) sum_m y_m (x)_axes x_{feature(axis), m}` by direct summation over every entry.
/// `features[m][n]` is the vector of feature `n` of instance `m`.
pub fn data_tensor_oracle(
    features: &[Vec<Vec<f64>>],
    labels: &[f64],
    axis_feature: &[usize],
) -> (Vec<usize>, Vec<f64>) {
    let m = features.len();
    let dims: Vec<usize> = axis_feature.iter().map(|&f| features[0][f].len()).collect();
    let mut data = Vec::new();
    for_each_index(&dims, |idx| {
        let mut total = 0.0;
        for i in 0..m {
            let mut prod = labels[i];
            for (a, &f) in axis_feature.iter().enumerate() {
                prod *= features[i][f][idx[a]];
            }
            total += prod;
        }
        data.push(total / m as f64);
    });
    (dims, data)
}

pub fn pearson_scalar(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson_scalar(&ranks(a), &ranks(b))
}

/// Minimum cut weight over all balanced bisections, by enumerating bitmasks.
pub fn brute_force_bisection(w: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n / 2 || mask & 1 == 0 {
            continue;
        }
        let mut cut = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                if ((mask >> a) & 1) != ((mask >> b) & 1) {
                    cut += w(a, b);
                }
            }
        }
        best = f64::min(best, cut);
    }
    best
}

/// Best rank-one approximation error found by alternating least squares from `starts`
/// random initializations.
pub fn rank_one_als(dims: &[usize], data: &[f64], starts: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let norm2: f64 = data.iter().map(|x| x * x).sum();
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let mut vecs: Vec<Vec<f64>> = dims
            .iter()
            .map(|&d| (0..d).map(|_| normal(&mut r)).collect())
            .collect();
        for _iter in 0..500 {
            for a in 0..dims.len() {
                let mut next = vec![0.0; dims[a]];
                let mut flat = 0;
                for_each_index(dims, |idx| {
                    let mut p = data[flat];
                    for (b, v) in vecs.iter().enumerate() {
                        if b != a {
                            p *= v[idx[b]];
                        }
                    }
                    next[idx[a]] += p;
                    flat += 1;
                });
                let denom: f64 = vecs
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != a)
                    .map(|(_, v)| v.iter().map(|x| x * x).sum::<f64>())
                    .product();
                vecs[a] = next.iter().map(|x| x / denom).collect();
            }
        }
        let mut err2 = 0.0;
        let mut flat = 0;
        for_each_index(dims, |idx| {
            let approx: f64 = vecs.iter().enumerate().map(|(b, v)| v[idx[b]]).product();
            err2 += (data[flat] - approx).powi(2);
            flat += 1;
        });
        best = best.min(err2.max(0.0).sqrt());
    }
    debug_assert!(best <= norm2.sqrt() + 1e-9);
    best
}
