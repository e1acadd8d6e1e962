//! Maximum-entropy bootstrap for scalar series and, coordinate by coordinate,
//! for functional time series.
//!
//! For a scalar series of length n the replicate is built from the order
//! statistics: midpoints between consecutive order statistics (extended at both
//! ends by the trimmed mean absolute first difference) bound n intervals; n
//! uniform draws are mapped through the piecewise-linear quantile function over
//! those intervals, shifted so every interval has the prescribed mean, sorted,
//! and placed back so that the replicate has the same time ranks as the input.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::sample::{Curve, FunctionalSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeBootConfig {
    /// Proportion trimmed from each end when averaging absolute differences.
    pub trim: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl MeBootConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        MeBootConfig {
            trim: 0.10,
            replicates,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.trim >= 0.0 && self.trim < 0.5) {
            return Err(Error::parameter(format!(
                "trim must lie in [0, 0.5), got {}",
                self.trim
            )));
        }
        if self.replicates == 0 {
            return Err(Error::parameter("at least one bootstrap replicate is required"));
        }
        Ok(())
    }
}

/// Trimmed mean dropping `floor(trim * len)` values at each end.
pub fn trimmed_mean(values: &[f64], trim: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cut = (trim * sorted.len() as f64).floor() as usize;
    let kept = &sorted[cut..sorted.len() - cut];
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Everything about a series that does not depend on the random draws.
#[derive(Debug, Clone)]
pub struct MebootPlan {
    /// Time positions of the order statistics (stable for ties).
    order: Vec<usize>,
    /// Interval bounds `z_0 <= z_1 <= .. <= z_n`.
    z: Vec<f64>,
    /// Shift applied to draws landing in interval k (0-based).
    shift: Vec<f64>,
    /// Quantile knots `k / n`.
    knots: Vec<f64>,
    trimmed_diff: f64,
}

impl MebootPlan {
    pub fn new(series: &[f64], trim: f64) -> Result<Self> {
        let n = series.len();
        if n < 2 {
            return Err(Error::validation(format!(
                "meboot needs a series of length >= 2, got {n}"
            )));
        }
        if let Some(i) = series.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite value at position {i} of the series"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| series[a].total_cmp(&series[b]));
        let xs: Vec<f64> = order.iter().map(|&i| series[i]).collect();

        let diffs: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let m_trm = trimmed_mean(&diffs, trim);

        let mut z = Vec::with_capacity(n + 1);
        z.push(xs[0] - m_trm);
        z.extend(xs.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        z.push(xs[n - 1] + m_trm);

        let shift = (0..n)
            .map(|k| {
                let target = if k == 0 {
                    0.75 * xs[0] + 0.25 * xs[1]
                } else if k == n - 1 {
                    0.25 * xs[n - 2] + 0.75 * xs[n - 1]
                } else {
                    0.25 * xs[k - 1] + 0.5 * xs[k] + 0.25 * xs[k + 1]
                };
                target - (z[k] + z[k + 1]) / 2.0
            })
            .collect();
        Ok(MebootPlan {
            order,
            z,
            shift,
            knots: (0..=n).map(|k| k as f64 / n as f64).collect(),
            trimmed_diff: m_trm,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn intermediate_points(&self) -> &[f64] {
        &self.z[1..self.z.len() - 1]
    }

    /// `z_0, .., z_n`.
    pub fn bounds(&self) -> &[f64] {
        &self.z
    }

    pub fn trimmed_diff(&self) -> f64 {
        self.trimmed_diff
    }

    /// Maps one uniform draw through the quantile function and the shift of
    /// the interval it lands in.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.len();
        let knots = &self.knots;
        let mut k = ((u * n as f64) as usize).min(n - 1);
        while k > 0 && u < knots[k] {
            k -= 1;
        }
        while k + 1 < n && u >= knots[k + 1] {
            k += 1;
        }
        let (lo, hi) = (knots[k], knots[k + 1]);
        self.z[k] + (u - lo) / (hi - lo) * (self.z[k + 1] - self.z[k]) + self.shift[k]
    }

    /// The replicate's values in increasing order (`n` uniforms from `rng`).
    fn sorted_draws<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut mapped: Vec<f64> = (0..self.len()).map(|_| self.quantile(rng.random::<f64>())).collect();
        // values equal under total_cmp are bit-identical, so stability is moot
        mapped.sort_unstable_by(f64::total_cmp);
        mapped
    }

    /// One replicate, drawing `n` uniforms from `rng`.
    pub fn replicate<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (&pos, v) in self.order.iter().zip(self.sorted_draws(rng)) {
            out[pos] = v;
        }
        out
    }

    /// Whether the replicate drawn from `rng` orders every pair of time
    /// positions exactly like the series does, ties included.
    pub fn keeps_order<R: Rng + ?Sized>(&self, series_sorted: &[f64], rng: &mut R) -> bool {
        let draws = self.sorted_draws(rng);
        series_sorted
            .windows(2)
            .zip(draws.windows(2))
            .all(|(x, y)| x[0].partial_cmp(&x[1]) == y[0].partial_cmp(&y[1]))
    }
}

/// One maximum-entropy bootstrap replicate of a scalar series.
pub fn meboot_scalar<R: Rng + ?Sized>(
    series: &[f64],
    config: &MeBootConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    config.validate()?;
    Ok(MebootPlan::new(series, config.trim)?.replicate(rng))
}

/// Per-coordinate plans for a functional time series (curves in time order).
#[derive(Debug, Clone)]
pub struct FtsMeboot {
    template: FunctionalSample,
    plans: Vec<MebootPlan>,
    /// Each coordinate's series in increasing order.
    sorted: Vec<Vec<f64>>,
    config: MeBootConfig,
}

impl FtsMeboot {
    pub fn new(sample: &FunctionalSample, config: MeBootConfig) -> Result<Self> {
        config.validate()?;
        let mut plans = Vec::with_capacity(sample.grid().len());
        let mut sorted = Vec::with_capacity(sample.grid().len());
        for j in 0..sample.grid().len() {
            let series: Vec<f64> = sample.curves().iter().map(|c| c.values()[j]).collect();
            let plan = MebootPlan::new(&series, config.trim)?;
            sorted.push(plan.order.iter().map(|&i| series[i]).collect());
            plans.push(plan);
        }
        Ok(FtsMeboot {
            template: sample.clone(),
            plans,
            sorted,
            config,
        })
    }

    pub fn config(&self) -> &MeBootConfig {
        &self.config
    }

    /// Replicate `b`; coordinate `j` uses the stream derived from `(seed, b, j)`.
    pub fn replicate(&self, b: usize) -> FunctionalSample {
        let n = self.template.len();
        let mut rows = vec![Vec::with_capacity(self.plans.len()); n];
        for (j, plan) in self.plans.iter().enumerate() {
            let mut stream = rng::stream(self.config.seed, &[b as u64, j as u64]);
            for (row, v) in rows.iter_mut().zip(plan.replicate(&mut stream)) {
                row.push(v);
            }
        }
        let curves = rows.into_iter().map(Curve::from_values_unchecked).collect();
        self.template
            .with_curves(curves)
            .expect("replicate keeps the sample's shape")
    }

    /// Whether replicate `b` orders the curves like the input at every grid
    /// point (ties included), without building it. Order-based statistics such
    /// as global band depth are then unchanged.
    pub fn keeps_order(&self, b: usize) -> bool {
        self.plans.iter().zip(&self.sorted).enumerate().all(|(j, (plan, sorted))| {
            let mut stream = rng::stream(self.config.seed, &[b as u64, j as u64]);
            plan.keeps_order(sorted, &mut stream)
        })
    }
}

/// All `config.replicates` replicates of a functional time series.
pub fn meboot_fts(sample: &FunctionalSample, config: &MeBootConfig) -> Result<Vec<FunctionalSample>> {
    let boot = FtsMeboot::new(sample, *config)?;
    Ok((0..config.replicates)
        .into_par_iter()
        .map(|b| boot.replicate(b))
        .collect())
}
