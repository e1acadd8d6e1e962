//! Moving-window change detection: each window of a monitored stream is tested
//! against a fixed reference sample, and a change is flagged once a run of
//! consecutive windows is significant.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{check_beta, RankScheme};
use crate::error::{Error, Result};
use crate::io::format_value;
use crate::rng;
use crate::sample::FunctionalSample;
use crate::wilcoxon::{bootstrap_test, local_wilcoxon, BootstrapOptions};

pub const BETA_PRESETS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
pub const WINDOW_PRESETS: [usize; 3] = [10, 40, 50];
pub const STEP_PRESETS: [usize; 3] = [10, 20, 30];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub window: usize,
    pub step: usize,
    pub beta: f64,
    pub scheme: RankScheme,
    pub alpha: f64,
    pub consecutive: usize,
    /// Bootstrap settings; the seed is the base from which every window
    /// derives its own.
    pub bootstrap: Option<BootstrapOptions>,
}

impl DetectorConfig {
    /// Window 40, step 10, global depth, alpha 0.05, three windows in a row,
    /// 200 bootstrap replicates.
    pub fn standard(seed: u64) -> Self {
        DetectorConfig {
            window: 40,
            step: 10,
            beta: 1.0,
            scheme: RankScheme::Eq4Max,
            alpha: 0.05,
            consecutive: 3,
            bootstrap: Some(BootstrapOptions::new(200, seed)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::parameter(format!("window length must be >= 2, got {}", self.window)));
        }
        if self.step == 0 {
            return Err(Error::parameter("step must be >= 1"));
        }
        check_beta(self.beta)?;
        check_rule(self.alpha, self.consecutive)
    }
}

fn check_rule(alpha: f64, consecutive: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if consecutive == 0 {
        return Err(Error::parameter("the run length must be >= 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// 1-based stream index of the window's first curve.
    pub k: usize,
    pub statistic: f64,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionTrace {
    pub entries: Vec<TraceEntry>,
    pub reference_size: usize,
    pub window: usize,
}

impl DetectionTrace {
    /// `k,statistic,p_value` with an empty p-value column when absent.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "k,statistic,p_value")?;
        for e in &self.entries {
            let p = e.p_value.map(format_value).unwrap_or_default();
            writeln!(sink, "{},{},{}", e.k, format_value(e.statistic), p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeReport {
    pub flagged: bool,
    /// `k` of the first window of the first significant run.
    pub change_index: Option<usize>,
    pub rule: String,
    pub alpha: f64,
    pub consecutive: usize,
}

/// Tests every window `stream[k..k+L-1]` (k = 1, 1 + step, ...) against the
/// reference.
pub fn moving_wilcoxon(
    reference: &FunctionalSample,
    stream: &FunctionalSample,
    config: &DetectorConfig,
) -> Result<DetectionTrace> {
    config.validate()?;
    reference.check_same_grid(stream)?;
    if reference.len() < 2 {
        return Err(Error::validation("the reference sample needs at least 2 curves"));
    }
    if stream.len() < config.window {
        return Err(Error::validation(format!(
            "the stream has {} curves, fewer than the window length {}",
            stream.len(),
            config.window
        )));
    }
    let starts: Vec<usize> = (1..=stream.len() - config.window + 1)
        .step_by(config.step)
        .collect();
    let entries = starts
        .into_par_iter()
        .map(|k| {
            let window = stream.slice(k - 1, k - 1 + config.window)?;
            match config.bootstrap {
                Some(mut options) => {
                    options.meboot.seed = rng::derive_seed(options.meboot.seed, &[k as u64]);
                    let out = bootstrap_test(reference, &window, config.beta, config.scheme, &options)?;
                    Ok(TraceEntry {
                        k,
                        statistic: out.result.statistic,
                        p_value: out.result.p_value,
                    })
                }
                None => {
                    let r = local_wilcoxon(reference, &window, config.beta, config.scheme)?;
                    Ok(TraceEntry {
                        k,
                        statistic: r.statistic,
                        p_value: None,
                    })
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DetectionTrace {
        entries,
        reference_size: reference.len(),
        window: config.window,
    })
}

/// Flags the first run of `consecutive` entries with `p < alpha`.
pub fn detect_change(trace: &DetectionTrace, alpha: f64, consecutive: usize) -> Result<ChangeReport> {
    check_rule(alpha, consecutive)?;
    let ps = trace
        .entries
        .iter()
        .map(|e| {
            e.p_value.ok_or_else(|| {
                Error::validation(format!(
                    "window k={} has no p-value; run the detector with the bootstrap configured",
                    e.k
                ))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut run = 0;
    let mut change_index = None;
    for (i, p) in ps.iter().enumerate() {
        run = if *p < alpha { run + 1 } else { 0 };
        if run == consecutive {
            change_index = Some(trace.entries[i + 1 - consecutive].k);
            break;
        }
    }
    Ok(ChangeReport {
        flagged: change_index.is_some(),
        change_index,
        rule: format!("{consecutive} consecutive windows with p < {alpha}"),
        alpha,
        consecutive,
    })
}
