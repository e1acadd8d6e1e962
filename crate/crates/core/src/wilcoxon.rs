//! Local Wilcoxon rank-sum statistic for two samples of curves and its
//! p-values.
//!
//! The two samples are stacked (first sample first), every curve gets its
//! local cGBD with respect to the combined sample, depths are turned into
//! ranks, and the statistic is the rank sum of the first sample.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::bootstrap::{FtsMeboot, MeBootConfig};
use crate::depth::{self, local_cgbd_all, ranks, DepthVector, RankScheme, RankVector};
use crate::error::{Error, Result};
use crate::rng;
use crate::sample::FunctionalSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PMethod {
    #[serde(rename = "normal-approx")]
    NormalApprox,
    #[serde(rename = "bootstrap")]
    Bootstrap,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    pub statistic: f64,
    pub beta: f64,
    pub n_first: usize,
    pub n_second: usize,
    /// Ranks over the combined sample, first sample in positions `0..n_first`.
    pub ranks: RankVector,
    pub depths: DepthVector,
    pub p_value: Option<f64>,
    pub p_method: PMethod,
}

impl WilcoxonResult {
    pub fn scheme(&self) -> RankScheme {
        self.ranks.scheme
    }

    fn with_p(mut self, p: f64, method: PMethod) -> Self {
        self.p_value = Some(p);
        self.p_method = method;
        self
    }
}

impl Serialize for WilcoxonResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("WilcoxonResult", 7)?;
        s.serialize_field("statistic", &self.statistic)?;
        s.serialize_field("beta", &self.beta)?;
        s.serialize_field("n_first", &self.n_first)?;
        s.serialize_field("n_second", &self.n_second)?;
        s.serialize_field("p_value", &self.p_value)?;
        s.serialize_field("p_method", &self.p_method)?;
        s.serialize_field("scheme", &self.ranks.scheme)?;
        s.end()
    }
}

fn rank_sum(ranks: &[f64], positions: impl Iterator<Item = usize>) -> f64 {
    positions.map(|i| ranks[i]).sum()
}

/// Result for an already computed depth vector of the combined sample.
pub fn from_depths(depths: DepthVector, n_first: usize, scheme: RankScheme) -> WilcoxonResult {
    let r = ranks(&depths.values, scheme);
    WilcoxonResult {
        statistic: rank_sum(&r.ranks, 0..n_first),
        beta: depths.beta,
        n_first,
        n_second: depths.len() - n_first,
        ranks: r,
        depths,
        p_value: None,
        p_method: PMethod::None,
    }
}

fn combine(first: &FunctionalSample, second: &FunctionalSample, beta: f64) -> Result<FunctionalSample> {
    depth::check_beta(beta)?;
    let combined = first.concat(second)?;
    if combined.len() < 2 {
        return Err(Error::validation("the combined sample needs at least 2 curves"));
    }
    Ok(combined)
}

/// `S^beta` without a p-value.
pub fn local_wilcoxon(
    first: &FunctionalSample,
    second: &FunctionalSample,
    beta: f64,
    scheme: RankScheme,
) -> Result<WilcoxonResult> {
    let combined = combine(first, second, beta)?;
    let depths = local_cgbd_all(&combined, beta)?;
    Ok(from_depths(depths, first.len(), scheme))
}

/// Two-sided p-value from the normal approximation with continuity and tie
/// corrections. Only valid for the global test (`beta = 1`) with mid-ranks.
pub fn normal_approx_pvalue(result: &WilcoxonResult) -> Result<f64> {
    if result.beta != 1.0 {
        return Err(Error::Unsupported(format!(
            "the normal approximation only applies at beta = 1 (got {}); use the bootstrap",
            result.beta
        )));
    }
    if result.scheme() != RankScheme::MidRank {
        return Err(Error::parameter(
            "the normal approximation needs mid-rank ranks for its tie correction",
        ));
    }
    let (n1, n2) = (result.n_first as f64, result.n_second as f64);
    if result.n_first == 0 || result.n_second == 0 {
        return Err(Error::validation("both samples must be non-empty"));
    }
    let n = n1 + n2;
    let mu = n1 * (n + 1.0) / 2.0;

    let mut sorted = result.ranks.ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let ties: f64 = sorted
        .chunk_by(|a, b| a == b)
        .map(|g| {
            let t = g.len() as f64;
            t * t * t - t
        })
        .sum();
    let var = n1 * n2 * (n + 1.0) / 12.0 - n1 * n2 * ties / (12.0 * n * (n - 1.0));
    if var <= 0.0 {
        return Ok(1.0);
    }
    let z = ((result.statistic - mu).abs() - 0.5).max(0.0) / var.sqrt();
    Ok(statrs::function::erf::erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0))
}

/// [`local_wilcoxon`] with the normal-approximation p-value attached.
pub fn normal_approx_test(
    first: &FunctionalSample,
    second: &FunctionalSample,
) -> Result<WilcoxonResult> {
    let r = local_wilcoxon(first, second, 1.0, RankScheme::MidRank)?;
    let p = normal_approx_pvalue(&r)?;
    Ok(r.with_p(p, PMethod::NormalApprox))
}

/// How bootstrap replicates of the stacked series are split back into two
/// samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resplit {
    /// The first `n_first` positions of every replicate form the first sample.
    SamePosition,
    /// The first sample is a circular block of `n_first` consecutive positions
    /// starting at a random offset.
    RandomRotation,
    /// The positions are cut into consecutive blocks (the last one may be
    /// shorter), the blocks are shuffled, and the first `n_first` positions of
    /// the shuffled order form the first sample. Without an explicit length
    /// blocks have `ceil(n^(1/3))` positions.
    BlockPermutation { block: Option<usize> },
}

impl Default for Resplit {
    fn default() -> Self {
        Resplit::BlockPermutation { block: None }
    }
}

/// Default block length for `n` positions.
pub fn default_block(n: usize) -> usize {
    ((n as f64).cbrt().ceil() as usize).max(1)
}

impl Resplit {
    /// Positions of the first sample for replicate `b`.
    fn first_positions(self, n: usize, n_first: usize, seed: u64, b: usize) -> Vec<usize> {
        let mut stream = rng::stream(seed, &[b as u64, RESPLIT_STREAM]);
        match self {
            Resplit::SamePosition => (0..n_first).collect(),
            Resplit::RandomRotation => {
                let offset = stream.random_range(0..n);
                (offset..offset + n_first).map(|i| i % n).collect()
            }
            Resplit::BlockPermutation { block } => {
                let len = block.unwrap_or_else(|| default_block(n)).max(1);
                let mut blocks: Vec<std::ops::Range<usize>> = (0..n)
                    .step_by(len)
                    .map(|start| start..(start + len).min(n))
                    .collect();
                blocks.shuffle(&mut stream);
                blocks.into_iter().flatten().take(n_first).collect()
            }
        }
    }
}

pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub meboot: MeBootConfig,
    pub resplit: Resplit,
}

impl BootstrapOptions {
    pub fn new(replicates: usize, seed: u64) -> Self {
        BootstrapOptions {
            meboot: MeBootConfig::new(replicates, seed),
            resplit: Resplit::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    pub result: WilcoxonResult,
    /// `S_b` for every replicate, in replicate order.
    pub replicates: Vec<f64>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// `(1 + #{b : |S_b - med| >= |S* - med|}) / (B + 1)` with `med` the median
/// of the replicate statistics.
pub fn centered_pvalue(observed: f64, replicates: &[f64]) -> f64 {
    let med = median(replicates);
    let dev = (observed - med).abs();
    let extreme = replicates.iter().filter(|s| (*s - med).abs() >= dev).count();
    (1 + extreme) as f64 / (replicates.len() + 1) as f64
}

const RESPLIT_STREAM: u64 = u64::MAX;

/// Full bootstrap run: observed statistic, replicate statistics, p-value.
pub fn bootstrap_test(
    first: &FunctionalSample,
    second: &FunctionalSample,
    beta: f64,
    scheme: RankScheme,
    options: &BootstrapOptions,
) -> Result<BootstrapOutcome> {
    let config = options.meboot;
    if config.replicates < MIN_REPLICATES {
        return Err(Error::parameter(format!(
            "the bootstrap p-value needs at least {MIN_REPLICATES} replicates, got {}",
            config.replicates
        )));
    }
    let combined = combine(first, second, beta)?;
    let n = combined.len();
    let n_first = first.len();
    let observed = from_depths(local_cgbd_all(&combined, beta)?, n_first, scheme);
    let boot = FtsMeboot::new(&combined, config)?;

    let replicates = (0..config.replicates)
        .into_par_iter()
        .map(|b| {
            // Global band depths only depend on the per-point ordering of the
            // curves, which the bootstrap keeps unless it breaks ties.
            let r = if beta == 1.0 && boot.keeps_order(b) {
                observed.ranks.ranks.clone()
            } else {
                let d = local_cgbd_all(&boot.replicate(b), beta)?;
                ranks(&d.values, scheme).ranks
            };
            let first = options.resplit.first_positions(n, n_first, config.seed, b);
            Ok(rank_sum(&r, first.into_iter()))
        })
        .collect::<Result<Vec<f64>>>()?;

    let p = centered_pvalue(observed.statistic, &replicates);
    Ok(BootstrapOutcome {
        result: observed.with_p(p, PMethod::Bootstrap),
        replicates,
    })
}

/// Bootstrap p-value of `S^beta` with `replicates` (>= 100) replicates.
pub fn bootstrap_pvalue(
    first: &FunctionalSample,
    second: &FunctionalSample,
    beta: f64,
    scheme: RankScheme,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let options = BootstrapOptions::new(replicates, seed);
    Ok(bootstrap_test(first, second, beta, scheme, &options)?
        .result
        .p_value
        .expect("bootstrap attaches a p-value"))
}
