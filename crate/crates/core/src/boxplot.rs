//! Functional boxplot from cGBD: the deepest curve, the envelope of the central
//! region, fences around it, and the curves that cross a fence.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::depth::{cgbd_all, depth_region};
use crate::error::{Error, Result};
use crate::io::format_value;
use crate::sample::FunctionalSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub median_index: usize,
    pub depths: Vec<f64>,
    pub central_indices: Vec<usize>,
    pub central_lower: Vec<f64>,
    pub central_upper: Vec<f64>,
    pub fence_lower: Vec<f64>,
    pub fence_upper: Vec<f64>,
    pub outlier_indices: Vec<usize>,
    pub central_prop: f64,
    /// `None` when the fences are unbounded.
    pub factor: Option<f64>,
}

/// Boxplot with central region `central_prop` and fences `factor` envelope
/// widths outside it; `factor = f64::INFINITY` disables outlier flagging.
pub fn functional_boxplot(
    sample: &FunctionalSample,
    central_prop: f64,
    factor: f64,
) -> Result<BoxplotSummary> {
    if sample.len() < 4 {
        return Err(Error::validation(format!(
            "a functional boxplot needs at least 4 curves, got {}",
            sample.len()
        )));
    }
    if factor.is_nan() || factor < 0.0 {
        return Err(Error::parameter(format!("fence factor must be >= 0, got {factor}")));
    }
    let depths = cgbd_all(sample)?.values;
    let central = depth_region(&depths, central_prop)?;
    let median_index = central
        .iter()
        .copied()
        .reduce(|best, i| if depths[i] > depths[best] { i } else { best })
        .expect("central region is never empty");

    let p = sample.grid().len();
    let mut lower = vec![f64::INFINITY; p];
    let mut upper = vec![f64::NEG_INFINITY; p];
    for &i in &central {
        for (t, &v) in sample.curve(i).values().iter().enumerate() {
            lower[t] = lower[t].min(v);
            upper[t] = upper[t].max(v);
        }
    }
    let (fence_lower, fence_upper): (Vec<f64>, Vec<f64>) = if factor.is_infinite() {
        (vec![f64::NEG_INFINITY; p], vec![f64::INFINITY; p])
    } else {
        lower
            .iter()
            .zip(&upper)
            .map(|(lo, up)| {
                let pad = factor * (up - lo);
                (lo - pad, up + pad)
            })
            .unzip()
    };
    let outlier_indices = sample
        .curves()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.values()
                .iter()
                .zip(fence_lower.iter().zip(&fence_upper))
                .any(|(v, (lo, up))| v < lo || v > up)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(BoxplotSummary {
        median_index,
        depths,
        central_indices: central,
        central_lower: lower,
        central_upper: upper,
        fence_lower,
        fence_upper,
        outlier_indices,
        central_prop,
        factor: factor.is_finite().then_some(factor),
    })
}

impl BoxplotSummary {
    /// One row per grid point: `t,median,central_lower,central_upper,fence_lower,fence_upper`.
    pub fn write_csv<W: Write>(&self, sample: &FunctionalSample, mut sink: W) -> Result<()> {
        writeln!(sink, "t,median,central_lower,central_upper,fence_lower,fence_upper")?;
        let median = sample.curve(self.median_index).values();
        for (j, t) in sample.grid().points().iter().enumerate() {
            let cols = [
                *t,
                median[j],
                self.central_lower[j],
                self.central_upper[j],
                self.fence_lower[j],
                self.fence_upper[j],
            ];
            let row: Vec<String> = cols.iter().map(|&v| format_value(v)).collect();
            writeln!(sink, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::grid::Grid;
    use crate::simulate;

    fn constants(values: &[f64]) -> FunctionalSample {
        let grid = Arc::new(Grid::new(vec![0.0, 0.5, 1.0]).unwrap());
        FunctionalSample::from_rows(grid, values.iter().map(|&v| vec![v; 3]).collect()).unwrap()
    }

    fn wiener(n: usize, seed: u64) -> FunctionalSample {
        let grid = Arc::new(Grid::uniform(0.0, 1.0, 40).unwrap());
        simulate::wiener(n, grid, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn five_constants() {
        let b = functional_boxplot(&constants(&[0.0, 1.0, 2.0, 3.0, 4.0]), 0.5, 1.5).unwrap();
        assert_eq!(b.median_index, 2);
        assert_eq!(b.central_indices, vec![1, 2, 3]);
        assert_eq!(b.central_lower, vec![1.0; 3]);
        assert_eq!(b.central_upper, vec![3.0; 3]);
        assert_eq!(b.fence_lower, vec![-2.0; 3]);
        assert!(b.outlier_indices.is_empty());
    }

    #[test]
    fn identical_curves_have_a_flat_box() {
        let b = functional_boxplot(&constants(&[1.5; 6]), 0.5, 1.5).unwrap();
        assert_eq!(b.central_lower, b.central_upper);
        assert!(b.outlier_indices.is_empty());
    }

    #[test]
    fn far_curve_is_an_outlier() {
        let s = wiener(20, 1);
        let far = FunctionalSample::from_rows(Arc::clone(s.grid_arc()), vec![vec![1e6; 40]]).unwrap();
        let b = functional_boxplot(&s.concat(&far).unwrap(), 0.5, 1.5).unwrap();
        assert!(b.outlier_indices.contains(&20));
        assert!(!b.outlier_indices.contains(&b.median_index));
    }

    #[test]
    fn infinite_factor_flags_nothing() {
        let s = wiener(10, 2);
        let far = FunctionalSample::from_rows(Arc::clone(s.grid_arc()), vec![vec![1e6; 40]]).unwrap();
        let b = functional_boxplot(&s.concat(&far).unwrap(), 0.5, f64::INFINITY).unwrap();
        assert!(b.outlier_indices.is_empty());
        assert_eq!(b.factor, None);
        assert!(serde_json::to_string(&b).is_ok());
    }

    #[test]
    fn rejects_small_samples_and_bad_factor() {
        assert!(functional_boxplot(&constants(&[0.0, 1.0, 2.0]), 0.5, 1.5).is_err());
        assert!(functional_boxplot(&constants(&[0.0, 1.0, 2.0, 3.0]), 0.5, -1.0).is_err());
        assert!(functional_boxplot(&constants(&[0.0, 1.0, 2.0, 3.0]), 0.0, 1.5).is_err());
    }

    #[test]
    fn csv_has_a_row_per_grid_point() {
        let s = wiener(6, 3);
        let b = functional_boxplot(&s, 0.5, 1.5).unwrap();
        let mut out = Vec::new();
        b.write_csv(&s, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 41);
        assert!(text.starts_with("t,median,central_lower"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn envelope_and_fence_invariants(seed in any::<u64>(), n in 4usize..25) {
            let s = wiener(n, seed);
            let b = functional_boxplot(&s, 0.5, 1.5).unwrap();
            for &i in &b.central_indices {
                for (t, v) in s.curve(i).values().iter().enumerate() {
                    prop_assert!(b.central_lower[t] <= *v && *v <= b.central_upper[t]);
                }
            }
            for t in 0..s.grid().len() {
                prop_assert!(b.fence_lower[t] <= b.central_lower[t]);
                prop_assert!(b.central_upper[t] <= b.fence_upper[t]);
            }
            prop_assert!(!b.outlier_indices.contains(&b.median_index));
        }

        #[test]
        fn outliers_ignore_a_common_added_curve(seed in any::<u64>()) {
            let s = wiener(15, seed);
            let shift: Vec<f64> = (0..40).map(|j| (j as f64 * 0.25).sin() * 3.0).collect();
            let moved = s
                .with_curves(
                    s.curves()
                        .iter()
                        .map(|c| crate::Curve::new(c.values().iter().zip(&shift).map(|(v, d)| v + d).collect()).unwrap())
                        .collect(),
                )
                .unwrap();
            let a = functional_boxplot(&s, 0.5, 1.5).unwrap();
            let b = functional_boxplot(&moved, 0.5, 1.5).unwrap();
            prop_assert_eq!(a.median_index, b.median_index);
            prop_assert_eq!(a.outlier_indices, b.outlier_indices);
        }
    }
}
