//! Counting kernel for the corrected generalized band depth.
//!
//! For a reference set of `n` curves every unordered pair is first given an
//! orientation: the curve that lies below on at least half of the domain (by
//! quadrature measure) is the lower band edge. A query value `q` at grid point
//! `t` is then inside the oriented band of a pair iff `lower(t) <= q <= upper(t)`.
//!
//! At each grid point the number of such pairs is
//!
//! ```text
//! C(n,2) - C(#{v < q}, 2) - C(#{v > q}, 2) - #{misoriented pairs with upper(t) <= q <= lower(t)}
//! ```
//!
//! where a pair is misoriented at `t` when `lower(t) > upper(t)`. The first three
//! terms count pairs whose unoriented range covers `q`; the last removes those
//! whose oriented band is empty at `t`. Misoriented intervals are tallied in
//! histograms indexed by the rank of their endpoints, so each grid point costs
//! one sort plus one pass over the pairs.

use rayon::prelude::*;

use crate::grid::Grid;

/// Values stored point-major: the value of curve `i` at grid point `t` is
/// `data[t * n + i]`.
#[derive(Debug, Clone)]
pub(crate) struct PointMajor {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl PointMajor {
    pub(crate) fn from_rows<'a, I>(rows: I, p: usize) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let n = rows.len();
        let mut data = vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            debug_assert_eq!(row.len(), p);
            for (t, &v) in row.iter().enumerate() {
                data[t * n + i] = v;
            }
        }
        PointMajor { n, p, data }
    }

    /// The sample followed by its reflection through `x`: curves
    /// `x_1..x_n, 2x - x_1, .., 2x - x_n`.
    pub(crate) fn reflected_through(&self, x: &[f64]) -> PointMajor {
        let n = 2 * self.n;
        let mut data = Vec::with_capacity(n * self.p);
        for (t, &xt) in x.iter().enumerate() {
            let row = self.row(t);
            data.extend_from_slice(row);
            data.extend(row.iter().map(|&v| 2.0 * xt - v));
        }
        PointMajor { n, p: self.p, data }
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.n..(t + 1) * self.n]
    }

    /// Curves at `indices` (in that order).
    pub(crate) fn select(&self, indices: &[usize]) -> PointMajor {
        let n = indices.len();
        let mut data = Vec::with_capacity(n * self.p);
        for t in 0..self.p {
            let row = self.row(t);
            data.extend(indices.iter().map(|&i| row[i]));
        }
        PointMajor { n, p: self.p, data }
    }
}

fn choose2(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

/// Orients every pair `i1 < i2` (lexicographic order). Returns `(lower, upper)`.
///
/// `L = measure{t : x_i2(t) >= x_i1(t)} / measure(T)`; the pair keeps its index
/// order when `L >= 1/2` and is flipped otherwise.
pub(crate) fn orient_pairs(sample: &PointMajor, grid: &Grid) -> Vec<(u32, u32)> {
    orient_pairs_reusing(sample, grid, &[], 0)
}

/// Like [`orient_pairs`], but pairs among the first `known_n` curves are copied
/// from `known` (the orientation of exactly those curves) instead of recomputed.
pub(crate) fn orient_pairs_reusing(
    sample: &PointMajor,
    grid: &Grid,
    known: &[(u32, u32)],
    known_n: usize,
) -> Vec<(u32, u32)> {
    let n = sample.n;
    let total = grid.measure();
    let weights = grid.weights();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i1| {
            let first_new = (i1 + 1).max(known_n);
            let reused = (i1 + 1..first_new).map(move |i2| known[pair_index(i1, i2, known_n)]);
            // partner sums for one row of the pair triangle, accumulated in grid order
            let mut sums = vec![0.0f64; n - first_new];
            for (t, &w) in weights.iter().enumerate() {
                let row = sample.row(t);
                let base = row[i1];
                for (s, &v) in sums.iter_mut().zip(&row[first_new..]) {
                    if v >= base {
                        *s += w;
                    }
                }
            }
            let fresh = sums.into_iter().enumerate().map(move |(off, s)| {
                let i2 = first_new + off;
                if s / total >= 0.5 {
                    (i1 as u32, i2 as u32)
                } else {
                    (i2 as u32, i1 as u32)
                }
            });
            reused.chain(fresh)
        })
        .collect()
}

/// Position of pair `(a, b)`, `a < b`, in the lexicographic pair list of `n` items.
pub(crate) fn pair_index(a: usize, b: usize, n: usize) -> usize {
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Number of oriented bands containing each query value at one grid point.
fn counts_at_point(row: &[f64], pairs: &[(u32, u32)], queries: &[f64]) -> Vec<u64> {
    let n = row.len();
    let mut sorted = row.to_vec();
    sorted.sort_by(f64::total_cmp);

    // less[i] = number of reference values strictly below row[i]
    let less: Vec<usize> = row
        .iter()
        .map(|&v| sorted.partition_point(|&s| s < v))
        .collect();

    let mut upper_hist = vec![0u64; n + 1];
    let mut lower_hist = vec![0u64; n + 1];
    for &(lo, up) in pairs {
        let (lo, up) = (lo as usize, up as usize);
        if row[lo] > row[up] {
            upper_hist[less[up]] += 1;
            lower_hist[less[lo]] += 1;
        }
    }
    // prefix sums: hist[k] becomes the count of entries with rank < k
    let mut acc_u = 0;
    let mut acc_l = 0;
    for k in 0..=n {
        let (u, l) = (upper_hist[k], lower_hist[k]);
        upper_hist[k] = acc_u;
        lower_hist[k] = acc_l;
        acc_u += u;
        acc_l += l;
    }
    let all = choose2(n);
    queries
        .iter()
        .map(|&q| {
            let below = sorted.partition_point(|&s| s < q);
            let at_most = sorted.partition_point(|&s| s <= q);
            let above = n - at_most;
            let covering = all - choose2(below) - choose2(above);
            // misoriented pairs with upper <= q (rank < at_most) minus those with lower < q
            let empty = upper_hist[at_most] - lower_hist[below];
            covering - empty
        })
        .collect()
}

/// Corrected generalized band depth of every query curve with respect to the
/// reference sample (`n >= 2`).
pub(crate) fn band_depths(
    sample: &PointMajor,
    pairs: &[(u32, u32)],
    grid: &Grid,
    queries: &PointMajor,
) -> Vec<f64> {
    let n = sample.n;
    debug_assert!(n >= 2);
    let total_pairs = choose2(n) as f64;
    let per_point: Vec<Vec<u64>> = (0..sample.p)
        .into_par_iter()
        .map(|t| counts_at_point(sample.row(t), pairs, queries.row(t)))
        .collect();

    let mut acc = vec![0.0f64; queries.n];
    for (counts, &w) in per_point.iter().zip(grid.weights()) {
        for (a, &c) in acc.iter_mut().zip(counts) {
            *a += w * (c as f64 / total_pairs);
        }
    }
    let measure = grid.measure();
    acc.into_iter().map(|a| a / measure).collect()
}
