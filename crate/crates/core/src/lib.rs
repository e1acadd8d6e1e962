//! Depth-based rank tests for samples of curves.
//!
//! The crate ranks curves by their corrected generalized band depth (optionally
//! localised around each curve), forms a Wilcoxon rank-sum statistic over a
//! two-sample split, and runs that statistic over a moving window to flag
//! structural change in a functional time series. P-values come from a normal
//! approximation (global depth) or from a maximum-entropy bootstrap.
//!
//! Simulators for Wiener, Brownian-bridge, mixture and FAR(1) curve samples are
//! included for validation studies, as is a depth-based functional boxplot.

pub mod bootstrap;
pub mod boxplot;
pub mod depth;
pub mod detector;
pub mod error;
pub mod grid;
pub mod io;
pub mod rng;
pub mod sample;
pub mod simulate;
pub mod smooth;
pub mod wilcoxon;

pub use depth::{
    cgbd, cgbd_all, depth_region, local_cgbd, local_cgbd_all, ranks, DepthVector, FullLocality,
    RankScheme, RankVector,
};
pub use error::{Error, Result};
pub use grid::Grid;
pub use sample::{Curve, FunctionalSample};
