use std::sync::Arc;

use ftswilcox::boxplot::functional_boxplot;
use ftswilcox::detector::{detect_change, moving_wilcoxon, DetectorConfig};
use ftswilcox::io::{load_sample_csv, save_sample_csv};
use ftswilcox::rng;
use ftswilcox::simulate::{self, ChangeDesign};
use ftswilcox::smooth::fourier_smooth;
use ftswilcox::wilcoxon::{bootstrap_test, local_wilcoxon, BootstrapOptions};
use ftswilcox::{cgbd_all, local_cgbd_all, FunctionalSample, Grid, RankScheme};

fn round_trip(sample: &FunctionalSample) -> FunctionalSample {
    let mut buf = Vec::new();
    save_sample_csv(sample, &mut buf).unwrap();
    load_sample_csv(buf.as_slice()).unwrap()
}

#[test]
fn csv_round_trip_keeps_depths_bit_for_bit() {
    let grid = Arc::new(Grid::coarse_day());
    let s = simulate::brownian_bridge(25, grid, &mut rng::stream(1, &[])).unwrap();
    let back = round_trip(&s);
    assert_eq!(back, s);
    assert_eq!(cgbd_all(&back).unwrap(), cgbd_all(&s).unwrap());
    assert_eq!(local_cgbd_all(&back, 0.4).unwrap(), local_cgbd_all(&s, 0.4).unwrap());
}

#[test]
fn json_round_trip() {
    let grid = Arc::new(Grid::uniform(0.0, 1.0, 30).unwrap());
    let s = simulate::wiener(6, grid, &mut rng::stream(2, &[])).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let back: FunctionalSample = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}

#[test]
fn smoothing_is_a_projection() {
    let grid = Arc::new(Grid::coarse_day());
    let s = simulate::wiener(20, grid, &mut rng::stream(3, &[])).unwrap();
    let smooth = fourier_smooth(&s, 15).unwrap();
    assert_eq!(smooth.len(), s.len());
    assert_eq!(smooth.grid(), s.grid());
    let smoother = fourier_smooth(&smooth, 15).unwrap();
    for (a, b) in smooth.curves().iter().zip(smoother.curves()) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-9, "smoothing is a projection");
        }
    }
}

#[test]
fn boxplot_of_a_loaded_sample_flags_an_injected_outlier() {
    let grid = Arc::new(Grid::coarse_day());
    let mut rng = rng::stream(4, &[]);
    let s = simulate::wiener(30, Arc::clone(&grid), &mut rng).unwrap();
    let far = simulate::wiener(1, grid, &mut rng).unwrap().map_values(|v| v + 25.0).unwrap();
    let loaded = round_trip(&s.concat(&far).unwrap());
    let b = functional_boxplot(&loaded, 0.5, 1.5).unwrap();
    assert!(b.outlier_indices.contains(&30));
    assert!(b.depths[30] < b.depths[b.median_index]);
}

#[test]
fn bootstrap_observed_statistic_matches_plain_test() {
    let grid = Arc::new(Grid::coarse_day());
    let mut rng = rng::stream(5, &[]);
    let a = simulate::wiener(12, Arc::clone(&grid), &mut rng).unwrap();
    let b = simulate::wiener(14, grid, &mut rng).unwrap();
    for beta in [1.0, 0.6] {
        let plain = local_wilcoxon(&a, &b, beta, RankScheme::Eq4Max).unwrap();
        let boot = bootstrap_test(&a, &b, beta, RankScheme::Eq4Max, &BootstrapOptions::new(100, 9)).unwrap();
        assert_eq!(boot.result.statistic, plain.statistic);
        assert_eq!(boot.replicates.len(), 100);
        let p = boot.result.p_value.unwrap();
        assert!(p > 0.0 && p <= 1.0);
    }
}

#[test]
fn detector_finds_a_strong_kernel_change() {
    let mut design = ChangeDesign::kernel_change(0.99);
    design.reference = 60;
    design.stream = 100;
    design.change_at = Some(40);
    let (reference, stream) = design.generate(&mut rng::stream(6, &[])).unwrap();
    let config = DetectorConfig {
        bootstrap: Some(BootstrapOptions::new(100, 6)),
        ..DetectorConfig::standard(6)
    };
    let trace = moving_wilcoxon(&reference, &stream, &config).unwrap();
    assert_eq!(trace.entries.len(), 7);
    let report = detect_change(&trace, 0.05, 2).unwrap();
    assert!(report.flagged, "{trace:?}");
    assert!(report.change_index.unwrap() >= 11);
}
