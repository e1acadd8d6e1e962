//! Generators for Wiener, Brownian-bridge, FAR(1) and two-component mixture
//! samples, plus the presets used in validation studies.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sample::{Curve, FunctionalSample};

/// What to do when a grid does not start at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartPolicy {
    #[default]
    Require,
    /// Run the process on `t - t_1`.
    Shift,
}

fn check_start(grid: &Grid, policy: StartPolicy) -> Result<()> {
    if policy == StartPolicy::Require && grid.start() != 0.0 {
        return Err(Error::parameter(format!(
            "process paths start at time 0 but the grid starts at {}",
            grid.start()
        )));
    }
    Ok(())
}

fn check_count(n_curves: usize) -> Result<()> {
    if n_curves == 0 {
        Err(Error::parameter("n_curves must be at least 1"))
    } else {
        Ok(())
    }
}

/// One Wiener path: 0 at the first grid point, Gaussian increments with
/// variance equal to the time step.
pub fn wiener_path<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Vec<f64> {
    let t = grid.points();
    let mut path = Vec::with_capacity(t.len());
    path.push(0.0);
    for j in 1..t.len() {
        let z: f64 = rng.sample(StandardNormal);
        path.push(path[j - 1] + (t[j] - t[j - 1]).sqrt() * z);
    }
    path
}

/// `B(t) = W(t) - (t - t_1) / (t_p - t_1) * W(t_p)`.
pub fn bridge_from_path(grid: &Grid, path: &[f64]) -> Vec<f64> {
    let span = grid.end() - grid.start();
    let last = path[path.len() - 1];
    grid.points()
        .iter()
        .zip(path)
        .map(|(t, w)| w - (t - grid.start()) / span * last)
        .collect()
}

pub fn wiener<R: Rng + ?Sized>(n_curves: usize, grid: Arc<Grid>, rng: &mut R) -> Result<FunctionalSample> {
    wiener_with(n_curves, grid, StartPolicy::Require, rng)
}

pub fn wiener_with<R: Rng + ?Sized>(
    n_curves: usize,
    grid: Arc<Grid>,
    policy: StartPolicy,
    rng: &mut R,
) -> Result<FunctionalSample> {
    check_count(n_curves)?;
    check_start(&grid, policy)?;
    let curves = (0..n_curves)
        .map(|_| Curve::from_values_unchecked(wiener_path(&grid, rng)))
        .collect();
    FunctionalSample::new(grid, curves)
}

pub fn brownian_bridge<R: Rng + ?Sized>(
    n_curves: usize,
    grid: Arc<Grid>,
    rng: &mut R,
) -> Result<FunctionalSample> {
    brownian_bridge_with(n_curves, grid, StartPolicy::Require, rng)
}

pub fn brownian_bridge_with<R: Rng + ?Sized>(
    n_curves: usize,
    grid: Arc<Grid>,
    policy: StartPolicy,
    rng: &mut R,
) -> Result<FunctionalSample> {
    check_count(n_curves)?;
    check_start(&grid, policy)?;
    let curves = (0..n_curves)
        .map(|_| Curve::from_values_unchecked(bridge_from_path(&grid, &wiener_path(&grid, rng))))
        .collect();
    FunctionalSample::new(grid, curves)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorProcess {
    #[default]
    Wiener,
    BrownianBridge,
}

impl ErrorProcess {
    pub fn draw<R: Rng + ?Sized>(self, grid: &Grid, rng: &mut R) -> Vec<f64> {
        let path = wiener_path(grid, rng);
        match self {
            ErrorProcess::Wiener => path,
            ErrorProcess::BrownianBridge => bridge_from_path(grid, &path),
        }
    }
}

/// Integral kernel of a FAR(1) operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    /// `C * exp(-(t^2 + s^2) / 2)`
    Gaussian { c: f64 },
    /// `C`
    Constant { c: f64 },
}

impl Kernel {
    pub fn value(&self, t: f64, s: f64) -> f64 {
        match *self {
            Kernel::Gaussian { c } => c * (-(t * t + s * s) / 2.0).exp(),
            Kernel::Constant { c } => c,
        }
    }

    /// Hilbert-Schmidt norm `(∬ ψ² dt ds)^(1/2)` by trapezoid quadrature on `grid`.
    pub fn norm(&self, grid: &Grid) -> f64 {
        let (t, w) = (grid.points(), grid.weights());
        let mut total = 0.0;
        for i in 0..t.len() {
            for j in 0..t.len() {
                total += w[i] * w[j] * self.value(t[i], t[j]).powi(2);
            }
        }
        total.sqrt()
    }

    /// Gaussian kernel scaled to have quadrature norm `target` on `grid`.
    pub fn gaussian_with_norm(target: f64, grid: &Grid) -> Kernel {
        let unit = Kernel::Gaussian { c: 1.0 }.norm(grid);
        Kernel::Gaussian { c: target / unit }
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        let norm = self.norm(grid);
        if norm >= 1.0 - 1e-12 {
            return Err(Error::parameter(format!(
                "kernel norm {norm} is not below 1; the FAR(1) recursion would not be stationary"
            )));
        }
        Ok(())
    }

    /// `ψ(t_i, s_j) w_j`, so that the operator is a matrix-vector product.
    fn operator(&self, grid: &Grid) -> Vec<Vec<f64>> {
        let (t, w) = (grid.points(), grid.weights());
        t.iter()
            .map(|&ti| t.iter().zip(w).map(|(&sj, &wj)| self.value(ti, sj) * wj).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Far1Config {
    pub kernel: Kernel,
    pub error: ErrorProcess,
    pub burn_in: usize,
    pub n_curves: usize,
    pub grid: Arc<Grid>,
}

impl Far1Config {
    pub fn new(kernel: Kernel, n_curves: usize, grid: Arc<Grid>) -> Self {
        Far1Config {
            kernel,
            error: ErrorProcess::Wiener,
            burn_in: 50,
            n_curves,
            grid,
        }
    }
}

/// `X_{k+1}(t) = ∫ ψ(t, s) X_k(s) ds + ε_{k+1}(t)` with `X_0` the first error
/// draw; the first `burn_in` curves are dropped.
pub fn far1<R: Rng + ?Sized>(config: &Far1Config, rng: &mut R) -> Result<FunctionalSample> {
    far1_segments(
        &[(config.kernel, config.n_curves)],
        config.error,
        config.burn_in,
        Arc::clone(&config.grid),
        rng,
    )
}

/// One FAR(1) series whose kernel changes between consecutive segments
/// `(kernel, length)`. The recursion runs on across each change; burn-in uses
/// the first segment's kernel.
pub fn far1_segments<R: Rng + ?Sized>(
    segments: &[(Kernel, usize)],
    error: ErrorProcess,
    burn_in: usize,
    grid: Arc<Grid>,
    rng: &mut R,
) -> Result<FunctionalSample> {
    let Some(&(first_kernel, _)) = segments.first() else {
        return Err(Error::parameter("a FAR(1) series needs at least one segment"));
    };
    check_count(segments.iter().map(|s| s.1).sum())?;
    check_start(&grid, StartPolicy::Require)?;
    for (kernel, _) in segments {
        kernel.check(&grid)?;
    }
    let mut state = error.draw(&grid, rng);
    let step = |op: &[Vec<f64>], prev: &[f64], rng: &mut R| -> Vec<f64> {
        let eps = error.draw(&grid, rng);
        op.iter()
            .zip(eps)
            .map(|(row, e)| row.iter().zip(prev).map(|(k, x)| k * x).sum::<f64>() + e)
            .collect()
    };
    let op = first_kernel.operator(&grid);
    for _ in 0..burn_in {
        state = step(&op, &state, rng);
    }
    let mut curves = Vec::new();
    let mut labels = Vec::new();
    for (idx, (kernel, len)) in segments.iter().enumerate() {
        let op = kernel.operator(&grid);
        for _ in 0..*len {
            state = step(&op, &state, rng);
            curves.push(Curve::new(state.clone())?);
            labels.push(if segments.len() > 1 { format!("segment{idx}") } else { String::new() });
        }
    }
    FunctionalSample::with_labels(grid, curves, labels)
}

/// A mixture component: an error process plus a constant vertical shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub process: ErrorProcess,
    pub shift: f64,
}

impl Component {
    pub fn wiener(shift: f64) -> Self {
        Component {
            process: ErrorProcess::Wiener,
            shift,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, grid: &Grid, rng: &mut R) -> Vec<f64> {
        let mut v = self.process.draw(grid, rng);
        for x in &mut v {
            *x += self.shift;
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub component_a: Component,
    pub component_b: Component,
    /// Probability that a curve comes from component b.
    pub contamination: f64,
}

impl MixtureConfig {
    /// Wiener paths with a 5% share shifted up by 2.
    pub fn location_mixture() -> Self {
        MixtureConfig {
            component_a: Component::wiener(0.0),
            component_b: Component::wiener(2.0),
            contamination: 0.05,
        }
    }
}

/// Curves drawn independently from component b with probability
/// `contamination`, else from component a; labels are "a" or "b".
pub fn mixture<R: Rng + ?Sized>(
    config: &MixtureConfig,
    n_curves: usize,
    grid: Arc<Grid>,
    rng: &mut R,
) -> Result<FunctionalSample> {
    check_count(n_curves)?;
    check_start(&grid, StartPolicy::Require)?;
    if !(0.0..=1.0).contains(&config.contamination) {
        return Err(Error::parameter(format!(
            "contamination must lie in [0, 1], got {}",
            config.contamination
        )));
    }
    let mut curves = Vec::with_capacity(n_curves);
    let mut labels = Vec::with_capacity(n_curves);
    for _ in 0..n_curves {
        let from_b = rng.random::<f64>() < config.contamination;
        let comp = if from_b { &config.component_b } else { &config.component_a };
        curves.push(Curve::from_values_unchecked(comp.draw(&grid, rng)));
        labels.push(if from_b { "b" } else { "a" }.to_string());
    }
    FunctionalSample::with_labels(grid, curves, labels)
}

/// A FAR(1) series split into a reference sample and a monitored stream, with
/// an optional kernel change inside the stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeDesign {
    pub before: Kernel,
    pub after: Kernel,
    pub error: ErrorProcess,
    pub burn_in: usize,
    pub reference: usize,
    pub stream: usize,
    /// Number of stream curves before the change; `None` for no change.
    pub change_at: Option<usize>,
    pub grid: Arc<Grid>,
}

impl ChangeDesign {
    /// Gaussian kernel of norm 0.5 switching to a constant kernel `c_after`
    /// after 100 stream curves; reference of 100, stream of 200, 120-point grid.
    pub fn kernel_change(c_after: f64) -> Self {
        let grid = Arc::new(Grid::coarse_day());
        ChangeDesign {
            before: Kernel::gaussian_with_norm(0.5, &grid),
            after: Kernel::Constant { c: c_after },
            error: ErrorProcess::Wiener,
            burn_in: 50,
            reference: 100,
            stream: 200,
            change_at: Some(100),
            grid,
        }
    }

    pub fn without_change(mut self) -> Self {
        self.change_at = None;
        self
    }

    /// `(reference, stream)`.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(FunctionalSample, FunctionalSample)> {
        let head = self.reference + self.change_at.unwrap_or(self.stream).min(self.stream);
        let mut segments = vec![(self.before, head)];
        if head < self.reference + self.stream {
            segments.push((self.after, self.reference + self.stream - head));
        }
        let series = far1_segments(&segments, self.error, self.burn_in, Arc::clone(&self.grid), rng)?;
        Ok((
            series.slice(0, self.reference)?,
            series.slice(self.reference, self.reference + self.stream)?,
        ))
    }
}
