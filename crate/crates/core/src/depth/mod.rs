//! Corrected generalized band depth (cGBD), its β-local version, depth regions
//! and depth-induced ranks.
//!
//! The band of a pair of curves only counts on the part of the domain where
//! the pair is ordered the way it is ordered on at least half of the domain.
//! Membership is inclusive on both edges. Measures are taken with the grid's
//! trapezoid weights.
//!
//! The local version at locality `beta < 1` reflects the sample through the
//! evaluation curve `x` (adding `2x - x_i` for every `x_i`), keeps the deepest
//! `beta` share of the 2n curves, and evaluates the depth of `x` among those.

mod band;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sample::{Curve, FunctionalSample};

pub(crate) use band::PointMajor;

/// Depth values for the curves of a sample, in sample order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthVector {
    pub values: Vec<f64>,
    pub beta: f64,
}

impl DepthVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How ties in depth are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RankScheme {
    /// `R_l = #{j : d_j <= d_l}`; tied curves share the largest rank.
    #[default]
    #[serde(rename = "eq4-max")]
    Eq4Max,
    /// Tied curves share the average of the ranks they span.
    #[serde(rename = "mid-rank")]
    MidRank,
}

impl std::str::FromStr for RankScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq4-max" | "max" => Ok(RankScheme::Eq4Max),
            "mid-rank" | "mid" => Ok(RankScheme::MidRank),
            other => Err(Error::parameter(format!(
                "unknown rank scheme {other:?} (expected eq4-max or mid-rank)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub ranks: Vec<f64>,
    pub scheme: RankScheme,
}

/// What locality `beta = 1` means for the local depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FullLocality {
    /// `beta = 1` is the global depth of `x` in the sample.
    #[default]
    Global,
    /// `beta = 1` still goes through the reflected 2n-sample.
    Symmetrized,
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::parameter(format!("beta must lie in (0, 1], got {beta}")))
    }
}

fn check_pair_sample(sample: &FunctionalSample) -> Result<()> {
    if sample.len() < 2 {
        Err(Error::validation(format!(
            "band depth needs at least 2 curves, the sample has {}",
            sample.len()
        )))
    } else {
        Ok(())
    }
}

fn point_major(sample: &FunctionalSample) -> PointMajor {
    PointMajor::from_rows(sample.curves().iter().map(Curve::values), sample.grid().len())
}

/// cGBD of `x` with respect to `sample`.
pub fn cgbd(x: &Curve, sample: &FunctionalSample) -> Result<f64> {
    check_pair_sample(sample)?;
    sample.check_curve(x)?;
    let pm = point_major(sample);
    let pairs = band::orient_pairs(&pm, sample.grid());
    let query = PointMajor::from_rows([x.values()], sample.grid().len());
    Ok(band::band_depths(&pm, &pairs, sample.grid(), &query)[0])
}

/// cGBD of every sample curve with respect to the whole sample.
pub fn cgbd_all(sample: &FunctionalSample) -> Result<DepthVector> {
    check_pair_sample(sample)?;
    let pm = point_major(sample);
    Ok(DepthVector {
        values: global_depths(&pm, sample.grid()),
        beta: 1.0,
    })
}

pub(crate) fn global_depths(pm: &PointMajor, grid: &Grid) -> Vec<f64> {
    let pairs = band::orient_pairs(pm, grid);
    band::band_depths(pm, &pairs, grid, pm)
}

/// Smallest count `k` with `k >= beta * n`, at least 1.
fn region_size(beta: f64, n: usize) -> usize {
    // the small slack keeps e.g. 0.6 * 5 from rounding up to 4
    let k = (beta * n as f64 - 1e-9).ceil().max(1.0) as usize;
    k.min(n)
}

/// Indices (ascending) of the `ceil(beta * n)` deepest curves, extended by every
/// curve tied with the shallowest of them.
pub fn depth_region(depths: &[f64], beta: f64) -> Result<Vec<usize>> {
    check_beta(beta)?;
    if depths.is_empty() {
        return Err(Error::validation("depth region of an empty depth vector"));
    }
    Ok(region_indices(depths, beta))
}

fn region_indices(depths: &[f64], beta: f64) -> Vec<usize> {
    let k = region_size(beta, depths.len());
    let mut sorted = depths.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let cutoff = sorted[k - 1];
    depths
        .iter()
        .enumerate()
        .filter(|(_, &d)| d >= cutoff)
        .map(|(i, _)| i)
        .collect()
}

/// Local cGBD of `x` at locality `beta`; `beta = 1` gives the global cGBD.
pub fn local_cgbd(x: &Curve, sample: &FunctionalSample, beta: f64) -> Result<f64> {
    local_cgbd_with(x, sample, beta, FullLocality::Global)
}

pub fn local_cgbd_with(
    x: &Curve,
    sample: &FunctionalSample,
    beta: f64,
    full: FullLocality,
) -> Result<f64> {
    check_beta(beta)?;
    check_pair_sample(sample)?;
    sample.check_curve(x)?;
    if beta == 1.0 && full == FullLocality::Global {
        return cgbd(x, sample);
    }
    let engine = LocalEngine::new(sample);
    Ok(engine.depth_of(x.values(), beta))
}

/// Local cGBD of every sample curve with respect to the whole sample.
pub fn local_cgbd_all(sample: &FunctionalSample, beta: f64) -> Result<DepthVector> {
    local_cgbd_all_with(sample, beta, FullLocality::Global)
}

pub fn local_cgbd_all_with(
    sample: &FunctionalSample,
    beta: f64,
    full: FullLocality,
) -> Result<DepthVector> {
    check_beta(beta)?;
    check_pair_sample(sample)?;
    if beta == 1.0 && full == FullLocality::Global {
        return cgbd_all(sample);
    }
    let engine = LocalEngine::new(sample);
    let values = (0..sample.len())
        .into_par_iter()
        .map(|i| engine.depth_of(sample.curve(i).values(), beta))
        .collect();
    Ok(DepthVector { values, beta })
}

/// Shared state for local depth evaluations against one sample.
struct LocalEngine<'a> {
    grid: &'a Grid,
    sample: PointMajor,
    /// Orientation of pairs among the original curves; these pairs reappear
    /// unchanged in every reflected sample.
    original_pairs: Vec<(u32, u32)>,
}

impl<'a> LocalEngine<'a> {
    fn new(sample: &'a FunctionalSample) -> Self {
        let pm = point_major(sample);
        let original_pairs = band::orient_pairs(&pm, sample.grid());
        LocalEngine {
            grid: sample.grid(),
            sample: pm,
            original_pairs,
        }
    }

    fn symmetrize(&self, x: &[f64]) -> PointMajor {
        self.sample.reflected_through(x)
    }

    fn symmetric_pairs(&self, sym: &PointMajor) -> Vec<(u32, u32)> {
        band::orient_pairs_reusing(sym, self.grid, &self.original_pairs, self.sample.n())
    }

    fn depth_of(&self, x: &[f64], beta: f64) -> f64 {
        let sym = self.symmetrize(x);
        let pairs = self.symmetric_pairs(&sym);
        let depths = band::band_depths(&sym, &pairs, self.grid, &sym);
        let region = region_indices(&depths, beta);
        if region.len() < 2 {
            return 0.0;
        }
        let retained = sym.select(&region);
        let total = sym.n();
        let mut retained_pairs = Vec::with_capacity(region.len() * (region.len() - 1) / 2);
        for (ia, &a) in region.iter().enumerate() {
            for (ib, &b) in region.iter().enumerate().skip(ia + 1) {
                let (lo, up) = pairs[band::pair_index(a, b, total)];
                // translate back to positions inside the retained subsample
                let map = |v: u32| if v as usize == a { ia as u32 } else { ib as u32 };
                retained_pairs.push((map(lo), map(up)));
            }
        }
        let query = PointMajor::from_rows([x], x.len());
        band::band_depths(&retained, &retained_pairs, self.grid, &query)[0]
    }
}

/// Depth-induced ranks.
pub fn ranks(depths: &[f64], scheme: RankScheme) -> RankVector {
    let mut sorted = depths.to_vec();
    sorted.sort_by(f64::total_cmp);
    let ranks = depths
        .iter()
        .map(|&d| {
            let at_most = sorted.partition_point(|&s| s <= d);
            match scheme {
                RankScheme::Eq4Max => at_most as f64,
                RankScheme::MidRank => {
                    let below = sorted.partition_point(|&s| s < d);
                    (below + 1 + at_most) as f64 / 2.0
                }
            }
        })
        .collect();
    RankVector { ranks, scheme }
}
