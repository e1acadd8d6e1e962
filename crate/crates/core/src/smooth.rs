//! Least-squares smoothing of discretized curves in a Fourier basis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sample::{Curve, FunctionalSample};

/// Values of the Fourier basis `1, sin(2πk·s), cos(2πk·s)` (k = 1..=(n_basis-1)/2)
/// at every grid point, where `s` is the position rescaled to one period over
/// the grid's span. Row j is grid point j.
pub fn fourier_design(grid: &Grid, n_basis: usize) -> DMatrix<f64> {
    let span = grid.end() - grid.start();
    DMatrix::from_fn(grid.len(), n_basis, |j, b| {
        let s = (grid.points()[j] - grid.start()) / span;
        if b == 0 {
            1.0
        } else {
            let k = b.div_ceil(2) as f64;
            let arg = 2.0 * PI * k * s;
            if b % 2 == 1 {
                arg.sin()
            } else {
                arg.cos()
            }
        }
    })
}

/// Replaces every curve by its weighted least-squares fit in the first
/// `n_basis` Fourier functions, evaluated back on the same grid. The weights
/// are the grid's quadrature weights, so the fit is the discrete L² projection.
pub fn fourier_smooth(sample: &FunctionalSample, n_basis: usize) -> Result<FunctionalSample> {
    let grid = sample.grid();
    if n_basis == 0 || n_basis.is_multiple_of(2) {
        return Err(Error::parameter(format!(
            "n_basis must be a positive odd integer, got {n_basis}"
        )));
    }
    if n_basis > grid.len() {
        return Err(Error::parameter(format!(
            "n_basis {n_basis} exceeds the {} grid points",
            grid.len()
        )));
    }

    let design = fourier_design(grid, n_basis);
    let sqrt_w = DVector::from_iterator(grid.len(), grid.weights().iter().map(|w| w.sqrt()));
    let mut weighted = design.clone();
    for (mut row, sw) in weighted.row_iter_mut().zip(sqrt_w.iter()) {
        row *= *sw;
    }
    let qr = weighted.qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-10 * scale) {
        return Err(Error::parameter(format!(
            "the {n_basis}-function Fourier basis is rank deficient on this grid"
        )));
    }
    let q = qr.q();

    let curves = sample
        .curves()
        .iter()
        .map(|c| {
            let y = DVector::from_iterator(
                grid.len(),
                c.values().iter().zip(sqrt_w.iter()).map(|(v, sw)| v * sw),
            );
            let qty = q.transpose() * y;
            let coef = r
                .solve_upper_triangular(&qty)
                .expect("checked full rank above");
            let fitted = &design * coef;
            Curve::new(fitted.iter().copied().collect())
        })
        .collect::<Result<Vec<_>>>()?;
    sample.with_curves(curves)
}
