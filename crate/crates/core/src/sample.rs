//! Curves and samples of curves sharing one grid.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// One curve: a finite value per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curve {
    values: Vec<f64>,
}

impl Curve {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("curve value at point {j} is not finite")));
        }
        Ok(Curve { values })
    }

    /// A curve equal to `value` at each of `len` points.
    pub fn constant(value: f64, len: usize) -> Result<Self> {
        Curve::new(vec![value; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `f` to every value. The result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Curve> {
        Curve::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn from_values_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Curve { values }
    }
}

/// An ordered collection of curves on one shared grid, with optional labels.
///
/// Labels are kept as strings; an empty string means "no label".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SampleRepr", into = "SampleRepr")]
pub struct FunctionalSample {
    grid: Arc<Grid>,
    curves: Vec<Curve>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SampleRepr {
    grid: Grid,
    curves: Vec<Curve>,
    #[serde(default)]
    labels: Vec<String>,
}

impl TryFrom<SampleRepr> for FunctionalSample {
    type Error = Error;

    fn try_from(repr: SampleRepr) -> Result<Self> {
        let labels = if repr.labels.is_empty() {
            vec![String::new(); repr.curves.len()]
        } else {
            repr.labels
        };
        FunctionalSample::with_labels(Arc::new(repr.grid), repr.curves, labels)
    }
}

impl From<FunctionalSample> for SampleRepr {
    fn from(s: FunctionalSample) -> Self {
        SampleRepr {
            grid: (*s.grid).clone(),
            curves: s.curves,
            labels: s.labels,
        }
    }
}

impl PartialEq for FunctionalSample {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other) && self.curves == other.curves && self.labels == other.labels
    }
}

impl FunctionalSample {
    /// Unlabelled sample. Needs at least one curve, every curve on `grid`.
    pub fn new(grid: Arc<Grid>, curves: Vec<Curve>) -> Result<Self> {
        let labels = vec![String::new(); curves.len()];
        Self::with_labels(grid, curves, labels)
    }

    pub fn with_labels(grid: Arc<Grid>, curves: Vec<Curve>, labels: Vec<String>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::validation("a sample needs at least one curve"));
        }
        if labels.len() != curves.len() {
            return Err(Error::validation(format!(
                "{} labels for {} curves",
                labels.len(),
                curves.len()
            )));
        }
        if let Some((i, c)) = curves.iter().enumerate().find(|(_, c)| c.len() != grid.len()) {
            return Err(Error::validation(format!(
                "curve {i} has {} values but the grid has {} points",
                c.len(),
                grid.len()
            )));
        }
        Ok(FunctionalSample {
            grid,
            curves,
            labels,
        })
    }

    /// Builds a sample from raw rows of values.
    pub fn from_rows(grid: Arc<Grid>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let curves = rows.into_iter().map(Curve::new).collect::<Result<Vec<_>>>()?;
        Self::new(grid, curves)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &Curve {
        &self.curves[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn same_grid(&self, other: &FunctionalSample) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Fails unless `other` lives on exactly this sample's grid.
    pub fn check_same_grid(&self, other: &FunctionalSample) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids differ ({} points on [{}, {}] vs {} points on [{}, {}])",
                self.grid.len(),
                self.grid.start(),
                self.grid.end(),
                other.grid.len(),
                other.grid.start(),
                other.grid.end()
            )))
        }
    }

    pub fn check_curve(&self, x: &Curve) -> Result<()> {
        if x.len() == self.grid.len() {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "curve has {} values but the sample grid has {} points",
                x.len(),
                self.grid.len()
            )))
        }
    }

    /// `self` followed by `other`; both must share the grid.
    pub fn concat(&self, other: &FunctionalSample) -> Result<FunctionalSample> {
        self.check_same_grid(other)?;
        let mut curves = self.curves.clone();
        curves.extend_from_slice(&other.curves);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(FunctionalSample {
            grid: Arc::clone(&self.grid),
            curves,
            labels,
        })
    }

    /// Curves `start..end` (half-open) as a new sample.
    pub fn slice(&self, start: usize, end: usize) -> Result<FunctionalSample> {
        if start >= end || end > self.len() {
            return Err(Error::parameter(format!(
                "slice {start}..{end} is empty or outside a sample of {} curves",
                self.len()
            )));
        }
        Ok(FunctionalSample {
            grid: Arc::clone(&self.grid),
            curves: self.curves[start..end].to_vec(),
            labels: self.labels[start..end].to_vec(),
        })
    }

    /// Curves at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<FunctionalSample> {
        if let Some(&i) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::parameter(format!(
                "index {i} outside a sample of {} curves",
                self.len()
            )));
        }
        FunctionalSample::with_labels(
            Arc::clone(&self.grid),
            indices.iter().map(|&i| self.curves[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i].clone()).collect(),
        )
    }

    /// Applies `f` value-wise to every curve.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<FunctionalSample> {
        let curves = self.curves.iter().map(|c| c.map(&f)).collect::<Result<Vec<_>>>()?;
        FunctionalSample::with_labels(Arc::clone(&self.grid), curves, self.labels.clone())
    }

    /// Replaces the curves, keeping grid and labels.
    pub fn with_curves(&self, curves: Vec<Curve>) -> Result<FunctionalSample> {
        FunctionalSample::with_labels(Arc::clone(&self.grid), curves, self.labels.clone())
    }

    /// Pointwise mean curve.
    pub fn mean_curve(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut mean = vec![0.0; self.grid.len()];
        for c in &self.curves {
            for (m, v) in mean.iter_mut().zip(c.values()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }
}
