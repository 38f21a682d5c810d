mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use lmp_forecast::backtest::{
    compare_models, rolling_backtest, run_backtest, BacktestReport, DalmpBaseline, FittedPipeline,
};
use lmp_forecast::data_io::{
    format_timestamp, load_lmp_csv, save_lmp_csv, synth_market, write_acf_pacf, write_forecast_overlay,
    write_improvement_curve, MarketDataset,
};
use lmp_forecast::estimation::grid_select;

use crate::config::{Model, RunConfig, UsageError};

#[derive(Debug, Parser)]
#[command(name = "lmpf", version, about = "Real-time LMP forecasting from day-ahead prices")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Market CSV; overrides `data.input`. Without either, a synthetic market is generated.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic market dataset.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Export sample ACF/PACF with confidence bands.
    Acf {
        #[arg(long, value_enum, default_value_t = SeriesChoice::Target)]
        series: SeriesChoice,
        #[arg(long, default_value_t = 168)]
        max_lag: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid BIC order selection on the training window.
    Select {
        /// Also write the table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the pipeline on the training window and write it as JSON.
    Fit {
        #[arg(long)]
        out: PathBuf,
    },
    /// Forecast from a fitted pipeline at the end of the training window.
    Forecast {
        #[arg(long)]
        model: PathBuf,
        /// Defaults to `backtest.horizon`.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rolling-origin evaluation over the test window.
    Backtest {
        #[arg(long)]
        out: PathBuf,
        /// Score DALMP itself instead of the configured pipeline.
        #[arg(long)]
        baseline: bool,
        /// One-step forecast overlay CSV.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// Tabulate backtest reports side by side.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Improvement index against horizon, one row per model and horizon.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeriesChoice {
    /// The clipped, log-transformed series the pipeline models.
    Target,
    Rtlmp,
    Dalmp,
    Delta,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(input) = &cli.input {
        config.data.input = Some(input.clone());
    }
    for line in config.to_toml().lines() {
        println!("# {line}");
    }

    match cli.command {
        Command::Synth { out } => {
            let data = synth_market(&config.synth_config()?)?;
            save_lmp_csv(&data, &out)?;
            println!("wrote {} hours to {}", data.len(), out.display());
        }
        Command::Acf {
            series,
            max_lag,
            out,
        } => {
            let data = load(&config)?;
            let values = match series {
                SeriesChoice::Target => config.pipeline()?.target(&data)?,
                SeriesChoice::Rtlmp => data.rtlmp.clone(),
                SeriesChoice::Dalmp => data.dalmp.clone(),
                SeriesChoice::Delta => data.delta(),
            };
            write_acf_pacf(&values, max_lag, create(&out)?)?;
            println!("wrote {max_lag} lags to {}", out.display());
        }
        Command::Select { out } => {
            let pipeline = config.pipeline()?;
            let (train, _) = windows(&config, &load(&config)?)?;
            let y = pipeline.target(&train)?;
            let exog = pipeline.regressors(&train.dalmp)?;
            let [p0, p1] = config.grid.p;
            let [q0, q1] = config.grid.q;
            let (chosen, table) = grid_select(
                &y,
                exog.as_ref(),
                p0..=p1,
                q0..=q1,
                &pipeline.spec,
                &config.fit_options(),
            )?;
            let text = format!(
                "{}selected p={} q={}\n",
                table.render(),
                chosen.p,
                chosen.q
            );
            print!("{text}");
            if let Some(out) = out {
                std::fs::write(&out, &text).with_context(|| format!("writing {}", out.display()))?;
            }
        }
        Command::Fit { out } => {
            let pipeline = config.pipeline()?;
            let (train, _) = windows(&config, &load(&config)?)?;
            let fitted = FittedPipeline::fit(&pipeline, &train, &config.fit_options())?;
            print_fit(&fitted);
            write_json(&fitted, &out)?;
        }
        Command::Forecast {
            model,
            horizon,
            out,
        } => {
            let fitted: FittedPipeline = read_json(&model)?;
            let (train, test) = windows(&config, &load(&config)?)?;
            let horizon = horizon.unwrap_or(config.backtest.horizon);
            if horizon == 0 || horizon > test.len() {
                return Err(UsageError(format!(
                    "horizon must lie in 1..={} (hours after the training window)",
                    test.len()
                ))
                .into());
            }
            let future = test.slice(0, horizon)?;
            let f = fitted.forecast(&train, &future.dalmp)?;
            let mut w = create(&out)?;
            writeln!(w, "timestamp,dalmp,rtlmp_forecast,model_mean,model_variance")?;
            for t in 0..horizon {
                writeln!(
                    w,
                    "{},{:.6},{:.6},{:.9},{:.9}",
                    format_timestamp(future.dalmp.timestamp(t)),
                    future.dalmp.values()[t],
                    f.rtlmp.values()[t],
                    f.model_mean[t],
                    f.model_variance[t]
                )?;
            }
            w.flush()?;
            println!(
                "{} forecast of {horizon} hours from {}",
                fitted.config.name(),
                format_timestamp(train.end())
            );
        }
        Command::Backtest {
            out,
            baseline,
            overlay,
        } => {
            let (train, test) = windows(&config, &load(&config)?)?;
            let b = &config.backtest;
            let model = if baseline { Model::Baseline } else { config.model()? };
            let report = match model {
                Model::Baseline => run_backtest(&mut DalmpBaseline, &train, &test, b.horizon, b.epsilon)?,
                Model::Pipeline(pipeline) => rolling_backtest(
                    &pipeline,
                    &train,
                    &test,
                    b.horizon,
                    config.refit(),
                    &config.fit_options(),
                    b.epsilon,
                )?,
            };
            for h in &report.horizons {
                println!(
                    "{} I_{} = {:.2}%  MAE {:.3}  DALMP MAE {:.3}  excluded {}",
                    report.model, h.horizon, h.improvement_pct, h.mae, h.baseline_mae, h.excluded
                );
            }
            if let Some(path) = overlay {
                write_forecast_overlay(&report.overlay, create(&path)?)?;
            }
            write_json(&report, &out)?;
        }
        Command::Compare {
            reports,
            csv,
            curve,
        } => {
            let loaded = reports
                .iter()
                .map(|path| {
                    let report: BacktestReport = read_json(path)?;
                    Ok((report.model.clone(), report))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let table = compare_models(&loaded)?;
            print!("{}", table.render());
            if let Some(path) = csv {
                std::fs::write(&path, table.to_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = curve {
                write_improvement_curve(&loaded, create(&path)?)?;
            }
        }
    }
    Ok(())
}

fn load(config: &RunConfig) -> anyhow::Result<MarketDataset> {
    match &config.data.input {
        Some(path) => load_lmp_csv(path, &config.csv_options())
            .with_context(|| format!("loading {}", path.display())),
        None => {
            log::info!("no input file, generating the synthetic market");
            Ok(synth_market(&config.synth_config()?)?)
        }
    }
}

/// Training and test windows from the `[window]` section.
fn windows(config: &RunConfig, data: &MarketDataset) -> anyhow::Result<(MarketDataset, MarketDataset)> {
    let n = data.len();
    let split = match config.train_end() {
        Some(end) => data.rtlmp.index_of(end).ok_or_else(|| {
            anyhow!(
                "window.train_end {} is outside the data ({} to {})",
                format_timestamp(end),
                format_timestamp(data.start()),
                format_timestamp(data.end())
            )
        })?,
        None => n.checked_sub(config.window.test_hours).ok_or_else(|| {
            anyhow!("{} test hours requested from {n} hours of data", config.window.test_hours)
        })?,
    };
    if split == 0 || split == n {
        return Err(anyhow!("training window of {split} hours leaves no room to test"));
    }
    let test_len = config.window.test_hours.min(n - split);
    let (train, rest) = data.split_at(split)?;
    let test = rest.slice(0, test_len)?;
    log::info!(
        "train {} to {}, test {} to {}",
        format_timestamp(train.start()),
        format_timestamp(train.end()),
        format_timestamp(test.start()),
        format_timestamp(test.end())
    );
    Ok((train, test))
}

fn print_fit(fitted: &FittedPipeline) {
    let m = &fitted.model;
    let p = &m.params;
    println!("{} on {} observations", fitted.config.name(), m.n_effective);
    let groups: [(&str, &[f64]); 5] = [
        ("phi", &p.phi),
        ("seasonal_phi", &p.seasonal_phi),
        ("theta", &p.theta),
        ("seasonal_theta", &p.seasonal_theta),
        ("gamma", &p.gamma),
    ];
    for (name, values) in groups {
        if !values.is_empty() {
            println!("  {name:<15}{}", join(values));
        }
    }
    println!("  {:<15}{:.6}", "mu", p.mu);
    println!("  {:<15}{:.6}", "sigma2", p.sigma2);
    println!("  {:<15}{:.3}", "loglik", m.loglik);
    println!("  {:<15}{:.3}", "bic", m.bic);
    if let Some(g) = &m.garch {
        println!(
            "  garch          alpha0 {:.6}  alpha {}  beta {}",
            g.params.alpha0,
            join(&g.params.alpha),
            join(&g.params.beta)
        );
    }
    for note in m
        .diagnostics
        .boundary
        .iter()
        .chain(m.garch.iter().flat_map(|g| &g.diagnostics.boundary))
    {
        log::warn!("{note}");
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))
}
