//! Acceptance criteria 1 to 12, run in order on one thread of control. Each
//! criterion prints a single PASS or FAIL line; the process exits non-zero if
//! any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use ftswilcox::bootstrap::{meboot_scalar, MeBootConfig, MebootPlan};
use ftswilcox::detector::{detect_change, moving_wilcoxon, DetectorConfig};
use ftswilcox::rng::{self, Stream};
use ftswilcox::simulate::{self, ChangeDesign, MixtureConfig};
use ftswilcox::wilcoxon::{bootstrap_pvalue, local_wilcoxon};
use ftswilcox::{cgbd, cgbd_all, local_cgbd, local_cgbd_all, ranks, Curve, FunctionalSample, Grid, RankScheme};
use rand::seq::index::sample as choose_indices;
use rand::Rng;

const ALPHA: f64 = 0.05;

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn gaussian(rng: &mut Stream) -> f64 {
    // Box-Muller; only used to build test inputs
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_grid(p: usize, rng: &mut Stream) -> Grid {
    let mut t = 0.0;
    let points = (0..p)
        .map(|_| {
            t += 0.05 + rng.random::<f64>();
            t
        })
        .collect();
    Grid::new(points).unwrap()
}

/// Random walks; with `coarse` the values are rounded to a few levels so that
/// pointwise ties and band edges occur often.
fn random_rows(n: usize, p: usize, coarse: bool, rng: &mut Stream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let mut level = 0.0;
            (0..p)
                .map(|_| {
                    level += gaussian(rng);
                    if coarse {
                        level.round()
                    } else {
                        level
                    }
                })
                .collect()
        })
        .collect()
}

fn sample_of(grid: &Grid, rows: Vec<Vec<f64>>) -> FunctionalSample {
    FunctionalSample::from_rows(Arc::new(grid.clone()), rows).unwrap()
}

/// Band depth summed pair by pair, straight from its definition.
fn literal_cgbd(x: &[f64], curves: &[Vec<f64>], grid: &Grid) -> f64 {
    let (w, measure) = (grid.weights(), grid.measure());
    let n = curves.len();
    let mut total = 0.0;
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            let mut upper_share = 0.0;
            for t in 0..w.len() {
                if curves[i2][t] >= curves[i1][t] {
                    upper_share += w[t];
                }
            }
            let (lo, hi) = if upper_share / measure >= 0.5 { (i1, i2) } else { (i2, i1) };
            let mut inside = 0.0;
            for t in 0..w.len() {
                let ordered = curves[hi][t] >= curves[lo][t];
                if ordered && curves[lo][t] <= x[t] && x[t] <= curves[hi][t] {
                    inside += w[t];
                }
            }
            total += inside / measure;
        }
    }
    total * 2.0 / (n * (n - 1)) as f64
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for s in 0..100u64 {
        let mut rng = rng::stream(1, &[s]);
        let n = rng.random_range(2..=12);
        let p = rng.random_range(2..=50);
        let grid = random_grid(p, &mut rng);
        let rows = random_rows(n + 1, p, s % 2 == 0, &mut rng);
        let (rows, outside) = (rows[..n].to_vec(), rows[n].clone());
        let sample = sample_of(&grid, rows.clone());
        let fast = cgbd_all(&sample).unwrap().values;
        for (i, row) in rows.iter().enumerate() {
            worst = worst.max((fast[i] - literal_cgbd(row, &rows, &grid)).abs());
        }
        let x = Curve::new(outside.clone()).unwrap();
        worst = worst.max((cgbd(&x, &sample).unwrap() - literal_cgbd(&outside, &rows, &grid)).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(10),
        format!("cGBD vs literal sum on 100 samples: max |diff| {worst:.1e}, {elapsed:.2?}"),
    )
}

fn constants(values: &[f64]) -> FunctionalSample {
    let grid = Grid::new(vec![0.0, 0.5, 1.0]).unwrap();
    sample_of(&grid, values.iter().map(|&v| vec![v; 3]).collect())
}

fn criterion_2() -> Verdict {
    let d = cgbd_all(&constants(&[0.0, 1.0, 2.0])).unwrap().values;
    let expected = [2.0 / 3.0, 1.0, 2.0 / 3.0];
    verdict(d == expected, format!("constants 0, 1, 2 have depths {d:?}"))
}

fn criterion_3() -> Verdict {
    let x = Curve::constant(0.0, 3).unwrap();
    let d = local_cgbd(&x, &constants(&[-1.0, 1.0]), 0.5).unwrap();
    verdict(d == 2.0 / 3.0, format!("local depth of 0 in {{-1, +1}} at beta 0.5 is {d}"))
}

/// Wilcoxon rank sum of the first `n_first` values, counted pair by pair.
fn classical_rank_sum(values: &[f64], n_first: usize) -> f64 {
    let (first, second) = values.split_at(n_first);
    let beaten: usize = first
        .iter()
        .map(|a| second.iter().filter(|b| *b < a).count())
        .sum();
    (n_first * (n_first + 1) / 2 + beaten) as f64
}

fn criterion_4() -> Verdict {
    let grid = Grid::coarse_day();
    let (mut depth_equal, mut sums_equal, mut s) = (0, 0, 0u64);
    let mut instances = 0;
    while instances < 50 {
        let mut rng = rng::stream(4, &[s]);
        s += 1;
        let (n1, n2) = (rng.random_range(5..=15), rng.random_range(5..=15));
        let rows = random_rows(n1 + n2, grid.len(), false, &mut rng);
        let a = sample_of(&grid, rows[..n1].to_vec());
        let b = sample_of(&grid, rows[n1..].to_vec());
        let both = a.concat(&b).unwrap();
        let global = cgbd_all(&both).unwrap().values;
        let mut sorted = global.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        instances += 1;
        if local_cgbd_all(&both, 1.0).unwrap().values == global {
            depth_equal += 1;
        }
        let s_beta = local_wilcoxon(&a, &b, 1.0, RankScheme::MidRank).unwrap().statistic;
        if s_beta == classical_rank_sum(&global, n1) {
            sums_equal += 1;
        }
    }
    verdict(
        depth_equal == 50 && sums_equal == 50,
        format!("beta 1 depth equal to cGBD in {depth_equal}/50, statistic equal to the classical rank sum in {sums_equal}/50"),
    )
}

fn wiener(n: usize, rng: &mut Stream) -> FunctionalSample {
    simulate::wiener(n, Arc::new(Grid::coarse_day()), rng).unwrap()
}

fn shifted(s: &FunctionalSample, by: f64) -> FunctionalSample {
    s.map_values(|v| v + by).unwrap()
}

/// Wiener reference of 50 curves, `outliers` of them moved up by 10, against
/// a Wiener sample of 50 shifted by `shift`; returns the rejection rate.
fn rejection_rate(tag: u64, reps: u64, shift: f64, outliers: usize) -> f64 {
    let mut rejected = 0;
    for r in 0..reps {
        let mut rng = rng::stream(tag, &[r]);
        let mut a = wiener(50, &mut rng);
        if outliers > 0 {
            let hit = choose_indices(&mut rng, 50, outliers).into_vec();
            let curves = a
                .curves()
                .iter()
                .enumerate()
                .map(|(i, c)| if hit.contains(&i) { c.map(|v| v + 10.0).unwrap() } else { c.clone() })
                .collect();
            a = a.with_curves(curves).unwrap();
        }
        let b = shifted(&wiener(50, &mut rng), shift);
        let p = bootstrap_pvalue(&a, &b, 1.0, RankScheme::Eq4Max, 200, rng::derive_seed(tag, &[r])).unwrap();
        if p < ALPHA {
            rejected += 1;
        }
    }
    rejected as f64 / reps as f64
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let rate = rejection_rate(5, 200, 0.0, 0);
    verdict(
        (0.01..=0.12).contains(&rate),
        format!("null rejection rate {rate:.3} over 200 runs (target [0.01, 0.12]), {:.0?}", start.elapsed()),
    )
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let rate = rejection_rate(6, 100, 2.0, 0);
    verdict(
        rate >= 0.90,
        format!("rejection rate {rate:.3} for a shift of 2 over 100 runs (target >= 0.90), {:.0?}", start.elapsed()),
    )
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let grid = Arc::new(Grid::coarse_day());
    let null = MixtureConfig::location_mixture();
    let changed = MixtureConfig {
        contamination: 0.5,
        ..null
    };
    let mut report = Vec::new();
    for beta in [0.6, 0.4, 0.2] {
        let (mut s0, mut s1) = (Vec::new(), Vec::new());
        for r in 0..100u64 {
            let mut rng = rng::stream(7, &[r]);
            let a = simulate::mixture(&null, 40, Arc::clone(&grid), &mut rng).unwrap();
            let b = simulate::mixture(&null, 40, Arc::clone(&grid), &mut rng).unwrap();
            let c = simulate::mixture(&changed, 40, Arc::clone(&grid), &mut rng).unwrap();
            s0.push(local_wilcoxon(&a, &b, beta, RankScheme::Eq4Max).unwrap().statistic);
            s1.push(local_wilcoxon(&a, &c, beta, RankScheme::Eq4Max).unwrap().statistic);
        }
        let ((m0, sd0), (m1, sd1)) = (mean_sd(&s0), mean_sd(&s1));
        let d = (m1 - m0).abs() / ((sd0 * sd0 + sd1 * sd1) / 2.0).sqrt();
        report.push(format!("beta {beta}: d {d:.2}"));
        if d >= 2.0 {
            return verdict(
                true,
                format!("{} (target >= 2 at some beta), {:.0?}", report.join(", "), start.elapsed()),
            );
        }
    }
    verdict(false, format!("{} (target >= 2 at some beta), {:.0?}", report.join(", "), start.elapsed()))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let design = ChangeDesign::kernel_change(0.99);
    let quiet = design.clone().without_change();
    let (mut timely, mut false_flags) = (0, 0);
    for r in 0..100u64 {
        let (reference, stream) = design.generate(&mut rng::stream(8, &[r])).unwrap();
        let trace = moving_wilcoxon(&reference, &stream, &DetectorConfig::standard(r)).unwrap();
        // the alarm window must contain post-change curves and start by 140
        if let Some(k) = detect_change(&trace, ALPHA, 3).unwrap().change_index {
            if (62..=140).contains(&k) {
                timely += 1;
            }
        }
        let (reference, stream) = quiet.generate(&mut rng::stream(8, &[r, 1])).unwrap();
        let trace = moving_wilcoxon(&reference, &stream, &DetectorConfig::standard(r)).unwrap();
        if detect_change(&trace, ALPHA, 3).unwrap().flagged {
            false_flags += 1;
        }
    }
    verdict(
        timely >= 80 && false_flags <= 10,
        format!(
            "timely detections {timely}/100 (target >= 80), flags without change {false_flags}/100 (target <= 10), {:.0?}",
            start.elapsed()
        ),
    )
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let size = rejection_rate(9, 200, 0.0, 5);
    let power = rejection_rate(19, 100, 2.0, 5);
    verdict(
        (0.01..=0.15).contains(&size) && power >= 0.80,
        format!(
            "with 10% outliers in the reference: size {size:.3} (target [0.01, 0.15]), power {power:.3} (target >= 0.80), {:.0?}",
            start.elapsed()
        ),
    )
}

/// Maximum-entropy bootstrap replicate built one step at a time.
fn literal_meboot(series: &[f64], trim: f64, rng: &mut Stream) -> Vec<f64> {
    let n = series.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| series[a].partial_cmp(&series[b]).unwrap());
    let x: Vec<f64> = order.iter().map(|&i| series[i]).collect();
    let mut diffs: Vec<f64> = (1..n).map(|t| (series[t] - series[t - 1]).abs()).collect();
    diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = (trim * diffs.len() as f64) as usize;
    let kept = &diffs[cut..diffs.len() - cut];
    let m_trm = kept.iter().sum::<f64>() / kept.len() as f64;
    let mut z = vec![x[0] - m_trm];
    for t in 0..n - 1 {
        z.push((x[t] + x[t + 1]) / 2.0);
    }
    z.push(x[n - 1] + m_trm);
    let mut target = vec![0.75 * x[0] + 0.25 * x[1]];
    for k in 1..n - 1 {
        target.push(0.25 * x[k - 1] + 0.5 * x[k] + 0.25 * x[k + 1]);
    }
    target.push(0.25 * x[n - 2] + 0.75 * x[n - 1]);
    let mut draws: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut k = 0;
            while !(u >= k as f64 / n as f64 && u < (k + 1) as f64 / n as f64) {
                k += 1;
            }
            let (a, b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            z[k] + (u - a) / (b - a) * (z[k + 1] - z[k]) + (target[k] - (z[k] + z[k + 1]) / 2.0)
        })
        .collect();
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = vec![0.0; n];
    for (r, &i) in order.iter().enumerate() {
        out[i] = draws[r];
    }
    out
}

fn argsort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    idx
}

fn criterion_10() -> Verdict {
    let config = MeBootConfig::new(1, 0);
    let constant = vec![3.25; 12];
    let fixed = (0..50u64).all(|s| meboot_scalar(&constant, &config, &mut rng::stream(10, &[s])).unwrap() == constant);

    let mut preserved = 0;
    let mut matches_literal = 0;
    for s in 0..1000u64 {
        let mut rng = rng::stream(10, &[1, s]);
        let n = rng.random_range(2..=60);
        let series: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
        let rep = meboot_scalar(&series, &config, &mut rng).unwrap();
        if argsort(&rep) == argsort(&series) {
            preserved += 1;
        }
        let ours = meboot_scalar(&series, &config, &mut rng::stream(10, &[2, s])).unwrap();
        let literal = literal_meboot(&series, config.trim, &mut rng::stream(10, &[2, s]));
        if ours == literal {
            matches_literal += 1;
        }
    }
    let plan = MebootPlan::new(&[4.0, 12.0, 36.0, 20.0, 8.0], 0.10).unwrap();
    let intermediate = plan.intermediate_points() == [6.0, 10.0, 16.0, 28.0];
    verdict(
        fixed && preserved == 1000 && intermediate && matches_literal == 1000,
        format!(
            "constant fixed point {fixed}, rank preservation {preserved}/1000, intermediate points {:?}, literal replicate equal {matches_literal}/1000",
            plan.intermediate_points()
        ),
    )
}

fn criterion_11() -> Verdict {
    let grid = Grid::coarse_day();
    let mut unchanged = 0;
    for s in 0..50u64 {
        let mut rng = rng::stream(11, &[s]);
        let (n1, n2) = (rng.random_range(3..=12), rng.random_range(3..=12));
        let rows = random_rows(n1 + n2, grid.len(), s % 3 == 0, &mut rng);
        let a = sample_of(&grid, rows[..n1].to_vec());
        let b = sample_of(&grid, rows[n1..].to_vec());
        let f = |v: f64| v * v * v + v;
        let (fa, fb) = (a.map_values(f).unwrap(), b.map_values(f).unwrap());
        let before = local_wilcoxon(&a, &b, 1.0, RankScheme::Eq4Max).unwrap();
        let after = local_wilcoxon(&fa, &fb, 1.0, RankScheme::Eq4Max).unwrap();
        let same_ranks = ranks(&before.depths.values, RankScheme::MidRank) == ranks(&after.depths.values, RankScheme::MidRank);
        if before.depths == after.depths && before.ranks == after.ranks && same_ranks && before.statistic == after.statistic {
            unchanged += 1;
        }
    }
    verdict(
        unchanged == 50,
        format!("depths, ranks and statistic unchanged under v^3 + v in {unchanged}/50 instances"),
    )
}

fn criterion_12() -> Verdict {
    let grid = Grid::fine_day();
    let rows = random_rows(100, grid.len(), false, &mut rng::stream(12, &[]));
    let sample = sample_of(&grid, rows);
    let timed = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let start = Instant::now();
            std::hint::black_box(cgbd_all(&sample).unwrap());
            start.elapsed()
        })
    };
    timed(1);
    let single = timed(1);
    let eight = timed(8);
    let speedup = single.as_secs_f64() / eight.as_secs_f64();
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    verdict(
        single < Duration::from_secs(5) && speedup >= 3.0,
        format!(
            "n=100 on 1440 points: {single:.2?} on 1 thread (target < 5 s), {eight:.2?} on 8 threads, speedup {speedup:.2} (target >= 3); {cores} core(s) available"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("depth oracle equivalence", criterion_1),
        ("hand-computed depths", criterion_2),
        ("local depth hand case", criterion_3),
        ("beta = 1 reduction", criterion_4),
        ("null size", criterion_5),
        ("location power", criterion_6),
        ("mixture discrimination", criterion_7),
        ("change detection", criterion_8),
        ("robustness to outliers", criterion_9),
        ("meboot contracts", criterion_10),
        ("invariance", criterion_11),
        ("performance", criterion_12),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let v = check();
        println!("criterion {id:>2} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
