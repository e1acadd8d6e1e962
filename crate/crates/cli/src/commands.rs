use std::path::Path;
use std::sync::Arc;

use ftswilcox::boxplot::functional_boxplot;
use ftswilcox::detector::{detect_change, moving_wilcoxon, DetectorConfig};
use ftswilcox::io::{save_indexed_csv, save_sample_csv};
use ftswilcox::rng;
use ftswilcox::simulate::{self, ErrorProcess, Far1Config, Kernel, MixtureConfig};
use ftswilcox::smooth::fourier_smooth;
use ftswilcox::wilcoxon::{bootstrap_test, local_wilcoxon, normal_approx_pvalue, BootstrapOptions, PMethod};
use ftswilcox::{cgbd_all, local_cgbd_all, Grid, RankScheme};

use crate::args::*;
use crate::output::{require_seed, CliError, CliResult, Run};

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    let parameters = match serde_json::to_value(&cli.command).expect("arguments serialize") {
        serde_json::Value::Object(mut m) if m.len() == 1 => m.values_mut().next().unwrap().take(),
        other => other,
    };
    match cli.command {
        Command::Depth(a) => depth(Run::new("depth", parameters, None), a),
        Command::Test(a) => test(Run::new("test", parameters, a.seed), a),
        Command::Detect(a) => detect(Run::new("detect", parameters, a.seed), a),
        Command::Simulate(a) => simulate(Run::new("simulate", parameters, a.seed), a),
        Command::Boxplot(a) => boxplot(Run::new("boxplot", parameters, None), a),
        Command::Smooth(a) => smooth(Run::new("smooth", parameters, None), a),
    }
}

fn scheme(s: SchemeArg) -> RankScheme {
    match s {
        SchemeArg::Eq4Max => RankScheme::Eq4Max,
        SchemeArg::MidRank => RankScheme::MidRank,
    }
}

fn depth(mut run: Run, a: DepthArgs) -> CliResult<()> {
    let sample = run.load_sample(&a.input)?;
    let depths = if a.local {
        local_cgbd_all(&sample, a.beta)?
    } else if a.beta == 1.0 {
        cgbd_all(&sample)?
    } else {
        return Err(CliError::Usage(format!(
            "--beta {} needs --local; the global depth has beta = 1",
            a.beta
        )));
    };
    run.emit(a.out.as_deref(), |buf| save_indexed_csv(["index", "depth"], &depths.values, buf))?;
    run.finish()
}

fn test(mut run: Run, a: TestArgs) -> CliResult<()> {
    let first = run.load_sample(&a.first)?;
    let second = run.load_sample(&a.second)?;
    let scheme = scheme(a.scheme);
    let result = match a.bootstrap {
        Some(replicates) => {
            let seed = require_seed(a.seed, "the bootstrap")?;
            let options = BootstrapOptions::new(replicates, seed);
            bootstrap_test(&first, &second, a.beta, scheme, &options)?.result
        }
        None => {
            let mut r = local_wilcoxon(&first, &second, a.beta, scheme)?;
            if a.beta == 1.0 && scheme == RankScheme::MidRank {
                r.p_value = Some(normal_approx_pvalue(&r)?);
                r.p_method = PMethod::NormalApprox;
            }
            r
        }
    };
    run.emit_json(a.out.as_deref(), &result)?;
    run.finish()
}

fn detect(mut run: Run, a: DetectArgs) -> CliResult<()> {
    let seed = require_seed(a.seed, "detect")?;
    let reference = run.load_sample(&a.reference)?;
    let stream = run.load_sample(&a.stream)?;
    let config = DetectorConfig {
        window: a.window,
        step: a.step,
        beta: a.beta,
        scheme: RankScheme::Eq4Max,
        alpha: a.alpha,
        consecutive: a.consec,
        bootstrap: Some(BootstrapOptions::new(a.bootstrap, seed)),
    };
    let trace = moving_wilcoxon(&reference, &stream, &config)?;
    let report = detect_change(&trace, a.alpha, a.consec)?;
    run.emit(a.out.as_deref(), |buf| trace.write_csv(buf))?;
    run.emit_json(a.report.as_deref(), &report)?;
    run.finish()
}

fn load_grid(run: &mut Run, choice: &str) -> CliResult<Grid> {
    match choice {
        "120" => Ok(Grid::coarse_day()),
        "1440" => Ok(Grid::fine_day()),
        file => {
            let path = Path::new(file);
            let bytes = run.read_bytes(path)?;
            let text = String::from_utf8(bytes).map_err(|_| CliError::Input {
                path: path.to_path_buf(),
                message: "grid file is not UTF-8".into(),
            })?;
            let points = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|_| CliError::Input {
                        path: path.to_path_buf(),
                        message: format!("cannot parse grid point {s:?}"),
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            Ok(Grid::new(points)?)
        }
    }
}

fn simulate(mut run: Run, a: SimulateArgs) -> CliResult<()> {
    let seed = require_seed(a.seed, "simulate")?;
    let grid = Arc::new(load_grid(&mut run, &a.grid)?);
    let mut rng = rng::stream(seed, &[]);
    let sample = match a.model {
        Model::Wiener => simulate::wiener(a.n, grid, &mut rng)?,
        Model::Bridge => simulate::brownian_bridge(a.n, grid, &mut rng)?,
        Model::Far1 => {
            let kernel = match a.kernel_constant {
                Some(c) => Kernel::Constant { c },
                None => Kernel::gaussian_with_norm(a.kernel_norm, &grid),
            };
            let mut config = Far1Config::new(kernel, a.n, grid);
            config.burn_in = a.burn_in;
            config.error = match a.error {
                ErrorArg::Wiener => ErrorProcess::Wiener,
                ErrorArg::Bridge => ErrorProcess::BrownianBridge,
            };
            simulate::far1(&config, &mut rng)?
        }
        Model::Mixture => {
            let mut config = MixtureConfig::location_mixture();
            config.contamination = a.contamination;
            config.component_b.shift = a.shift;
            simulate::mixture(&config, a.n, grid, &mut rng)?
        }
    };
    run.emit(a.out.as_deref(), |buf| save_sample_csv(&sample, buf))?;
    run.finish()
}

fn boxplot(mut run: Run, a: BoxplotArgs) -> CliResult<()> {
    let sample = run.load_sample(&a.input)?;
    let summary = functional_boxplot(&sample, a.central, a.factor)?;
    run.emit(a.out.as_deref(), |buf| summary.write_csv(&sample, buf))?;
    if a.report.is_some() {
        run.emit_json(a.report.as_deref(), &summary)?;
    }
    run.finish()
}

fn smooth(mut run: Run, a: SmoothArgs) -> CliResult<()> {
    let sample = run.load_sample(&a.input)?;
    let smoothed = fourier_smooth(&sample, a.nbasis)?;
    run.emit(a.out.as_deref(), |buf| save_sample_csv(&smoothed, buf))?;
    run.finish()
}
