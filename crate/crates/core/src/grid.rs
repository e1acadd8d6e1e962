//! Evaluation grids and their trapezoid quadrature weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing evaluation points on a compact interval, together with
/// trapezoid weights standing in for Lebesgue measure on that interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
    measure: f64,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    points: Vec<f64>,
    #[serde(default, skip_deserializing)]
    weights: Vec<f64>,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Self> {
        Grid::new(repr.points)
    }
}

impl From<Grid> for GridRepr {
    fn from(grid: Grid) -> Self {
        GridRepr {
            points: grid.points,
            weights: grid.weights,
        }
    }
}

impl Grid {
    /// Builds a grid from at least two strictly increasing finite points.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::validation(format!(
                "a grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        for (j, &t) in points.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::validation(format!("grid point {j} is not finite")));
            }
            if j > 0 && t <= points[j - 1] {
                return Err(Error::validation(format!(
                    "grid points must be strictly increasing; point {j} ({t}) <= point {} ({})",
                    j - 1,
                    points[j - 1]
                )));
            }
        }
        let p = points.len();
        let weights: Vec<f64> = (0..p)
            .map(|j| {
                let left = if j == 0 { points[0] } else { points[j - 1] };
                let right = if j + 1 == p { points[p - 1] } else { points[j + 1] };
                (right - left) / 2.0
            })
            .collect();
        let measure = weights.iter().sum();
        Ok(Grid {
            points,
            weights,
            measure,
        })
    }

    /// `n` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::parameter("a uniform grid needs n >= 2"));
        }
        let step = (end - start) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|j| start + step * j as f64).collect();
        points[n - 1] = end;
        Grid::new(points)
    }

    /// The 120-point grid on [0, 1] (a day in 12-minute segments).
    pub fn coarse_day() -> Self {
        Grid::uniform(0.0, 1.0, 120).expect("valid preset")
    }

    /// The 1440-point grid on [0, 1] (a day in 1-minute segments).
    pub fn fine_day() -> Self {
        Grid::uniform(0.0, 1.0, 1440).expect("valid preset")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Quadrature measure of the whole interval: the sum of the weights,
    /// which equals `end - start` up to rounding.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Measure of the grid points selected by `mask`, summed in grid order.
    pub fn measure_of(&self, mask: impl IntoIterator<Item = bool>) -> f64 {
        self.weights
            .iter()
            .zip(mask)
            .filter(|(_, keep)| *keep)
            .map(|(w, _)| *w)
            .sum()
    }
}
