mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_grid, parse_int_grid, FileConfig, SweepSection};
use fmelm::elm::{InputScale, WeightMapping, E0};
use fmelm::experiments::{
    benchmark_record, run_benchmark, run_sweep, sweep_record, CSource, RunConfig, SweepGrid, TaskId, WeightingMode,
};
use fmelm::optics::{comb_spectrum_text, generate_comb, ModulatorConfig, FITTED_EPSILON, FITTED_PHI, REFERENCE_M1};
use fmelm::tasks::{bundled_data_dir, verify_bundled_data};

#[derive(Parser)]
#[command(name = "fmelm", version, about = "Frequency-multiplexed photonic ELM simulator")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validated benchmark of one task.
    Run {
        task: Option<TaskId>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        m1: Option<f64>,
        #[arg(long)]
        m2: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Benchmark on every cell of a (d, m1, m2) grid.
    Sweep {
        task: Option<TaskId>,
        /// Grid: value, comma list or start:stop:step.
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        m1: Option<String>,
        #[arg(long)]
        m2: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Line powers of the comb leaving the first modulator.
    ExportComb {
        #[arg(long, default_value_t = REFERENCE_M1)]
        m1: f64,
        #[arg(long, default_value_t = FITTED_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = FITTED_PHI)]
        phi: f64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Check bundled datasets against their checksums.
    ValidateData {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Ridge penalties to try, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    #[arg(long)]
    mode: Option<ModeArg>,
    #[arg(long)]
    mapping: Option<MappingArg>,
    #[arg(long)]
    c_source: Option<CSourceArg>,
    #[arg(long)]
    input_scale: Option<ScaleArg>,
    /// Channel SNR in dB, or `none`.
    #[arg(long, value_parser = parse_snr)]
    snr: Option<Snr>,
    #[arg(long)]
    symbols: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    hidden_noise: Option<f64>,
    #[arg(long)]
    readout_noise: Option<f64>,
    /// Dataset file replacing the bundled one.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    banknote_features: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// TOML config, or a result file with an embedded config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Config override `section.key=value`; repeatable.
    #[arg(long = "set")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Digital,
    Optical,
}

#[derive(Clone, Copy, ValueEnum)]
enum MappingArg {
    DbLinear,
    PowerLinear,
}

#[derive(Clone, Copy, ValueEnum)]
enum CSourceArg {
    Learned,
    FromWeights,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Db,
    Power,
}

#[derive(Clone, Copy)]
struct Snr(Option<f64>);

fn parse_snr(s: &str) -> Result<Snr, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(Snr(None));
    }
    s.parse::<f64>()
        .map(|v| Snr(Some(v)))
        .map_err(|_| format!("{s:?} is neither a number nor `none`"))
}

/// Bad input from the user; exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run {
            task,
            d,
            m1,
            m2,
            common,
        } => {
            let (mut cfg, _) = resolve(task, &common)?;
            set(&mut cfg.d, d);
            set(&mut cfg.m1, m1);
            set(&mut cfg.m2, m2);
            cfg.validate().map_err(usage)?;
            cmd_run(&cfg, &common.out)
        }
        Command::Sweep {
            task,
            d,
            m1,
            m2,
            common,
        } => {
            let (cfg, file) = resolve(task, &common)?;
            let spec = SweepSection {
                d: d.or(file.sweep.d).or_else(|| Some(cfg.d.to_string())),
                m1: m1.or(file.sweep.m1).or_else(|| Some(cfg.m1.to_string())),
                m2: m2.or(file.sweep.m2).or_else(|| Some(cfg.m2.to_string())),
            };
            let grid = SweepGrid {
                d: parse_int_grid(spec.d.as_deref().unwrap_or_default()).map_err(usage)?,
                m1: parse_grid(spec.m1.as_deref().unwrap_or_default()).map_err(usage)?,
                m2: parse_grid(spec.m2.as_deref().unwrap_or_default()).map_err(usage)?,
            };
            if grid.len() > fmelm::experiments::MAX_SWEEP_CELLS {
                return Err(usage(format!(
                    "sweep has {} cells, limit is {}",
                    grid.len(),
                    fmelm::experiments::MAX_SWEEP_CELLS
                )));
            }
            cfg.validate().map_err(usage)?;
            cmd_sweep(&cfg, &grid, spec, &common.out)
        }
        Command::ExportComb { m1, epsilon, phi, out } => cmd_export_comb(m1, epsilon, phi, &out),
        Command::ValidateData { dir } => cmd_validate(&dir.unwrap_or_else(bundled_data_dir)),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Defaults, then the config file, then `--set` overrides, then flags.
fn resolve(task: Option<TaskId>, a: &CommonArgs) -> Result<(RunConfig, FileConfig)> {
    let file = match &a.config {
        Some(p) => FileConfig::load(p).map_err(usage)?,
        None => FileConfig::default(),
    };
    let file = file.with_overrides(&a.overrides).map_err(usage)?;
    let task = task
        .or(file.run.task)
        .ok_or_else(|| usage("no task given; expected one of iris, wine, banknote, nlc"))?;
    let mode = a
        .mode
        .map(|m| match m {
            ModeArg::Digital => WeightingMode::Digital,
            ModeArg::Optical => WeightingMode::Optical,
        })
        .or(file.training.mode)
        .unwrap_or(WeightingMode::Digital);
    let mut cfg = RunConfig::for_task(task, mode);
    file.apply(&mut cfg);
    cfg.mode = mode;
    set(&mut cfg.epsilon, a.epsilon);
    set(&mut cfg.phi, a.phi);
    set(&mut cfg.lambdas, a.lambda.clone());
    if let Some(m) = a.mapping {
        cfg.mapping = match m {
            MappingArg::DbLinear => WeightMapping::DbLinear,
            MappingArg::PowerLinear => WeightMapping::PowerLinear,
        };
    }
    if let Some(c) = a.c_source {
        cfg.c_source = match c {
            CSourceArg::Learned => CSource::Learned,
            CSourceArg::FromWeights => CSource::FromWeights,
        };
    }
    if let Some(s) = a.input_scale {
        cfg.input_scale = match s {
            ScaleArg::Db => InputScale::Db,
            ScaleArg::Power => InputScale::Power,
        };
    }
    if let Some(Snr(s)) = a.snr {
        cfg.nlc.snr_db = s;
    }
    set(&mut cfg.nlc.symbols, a.symbols);
    set(&mut cfg.repeats, a.repeats);
    set(&mut cfg.seed, a.seed);
    set(&mut cfg.train_fraction, a.train_fraction);
    set(&mut cfg.noise.hidden_sigma, a.hidden_noise);
    set(&mut cfg.noise.readout_sigma, a.readout_noise);
    if let Some(p) = &a.data {
        cfg.data_path = Some(p.clone());
    }
    set(&mut cfg.banknote_features, a.banknote_features);
    if let Some(n) = a.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the thread pool")?;
    }
    Ok((cfg, file))
}

struct Timing {
    started: SystemTime,
    clock: Instant,
}

impl Timing {
    fn start() -> Self {
        Self {
            started: SystemTime::now(),
            clock: Instant::now(),
        }
    }

    /// Timestamps go to `<file>.time` so that result files stay reproducible
    /// byte for byte.
    fn write_sidecar(&self, file: &Path) -> Result<()> {
        let unix = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut path = file.as_os_str().to_owned();
        path.push(".time");
        fs::write(
            &path,
            format!(
                "started_unix = {}\nfinished_unix = {}\nelapsed_seconds = {:.3}\n",
                unix(self.started),
                unix(SystemTime::now()),
                self.clock.elapsed().as_secs_f64()
            ),
        )
        .with_context(|| format!("cannot write {}", PathBuf::from(path).display()))
    }
}

fn write_output(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<ExitCode> {
    let timing = Timing::start();
    let result = run_benchmark(cfg)?;
    let body = format!(
        "{}{}",
        FileConfig::resolved(cfg, None).embedded()?,
        benchmark_record(cfg, &result)
    );
    let path = write_output(out, &format!("{}-run.tsv", cfg.task), &body)?;
    timing.write_sidecar(&path)?;
    let s = &result.metrics.summary;
    println!(
        "{} {} over {} repeats at lambda {:e}: median {:.6} (q1 {:.6}, q3 {:.6}, min {:.6}, max {:.6})",
        cfg.task,
        result.kind.name(),
        cfg.repeats,
        result.selected_lambda,
        s.median,
        s.q1,
        s.q3,
        s.min,
        s.max
    );
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(cfg: &RunConfig, grid: &SweepGrid, spec: SweepSection, out: &Path) -> Result<ExitCode> {
    let timing = Timing::start();
    let result = run_sweep(cfg, grid)?;
    let body = format!(
        "{}{}",
        FileConfig::resolved(cfg, Some(spec)).embedded()?,
        sweep_record(cfg, &result)
    );
    let path = write_output(out, &format!("{}-sweep.tsv", cfg.task), &body)?;
    timing.write_sidecar(&path)?;
    let failed = result.cells.iter().filter(|c| c.outcome.is_err()).count();
    println!(
        "{} sweep: {} cells, {} failed; wrote {}",
        cfg.task,
        result.cells.len(),
        failed,
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_export_comb(m1: f64, epsilon: f64, phi: f64, out: &Path) -> Result<ExitCode> {
    let pm1 = ModulatorConfig::new(m1, epsilon, phi).map_err(usage)?;
    let comb = generate_comb(E0, &pm1)?;
    let header = format!(
        "{p}[model]\n{p}m1 = {m1:?}\n{p}epsilon = {epsilon:?}\n{p}phi = {phi:?}\n# format: {}\n# kind: comb\n",
        fmelm::experiments::FORMAT_VERSION,
        p = config::EMBED_PREFIX,
    );
    let path = write_output(out, "comb.tsv", &format!("{header}{}", comb_spectrum_text(&comb)))?;
    println!("{} lines; wrote {}", comb.len(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(dir: &Path) -> Result<ExitCode> {
    let checks = verify_bundled_data(dir)?;
    let mut bad = 0;
    for c in &checks {
        let status = match &c.actual {
            None => "MISSING",
            Some(_) if c.ok() => "OK",
            Some(_) => "MISMATCH",
        };
        if !c.ok() {
            bad += 1;
        }
        println!("{status}\t{}", c.file);
    }
    Ok(if bad == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{bad} of {} files failed", checks.len());
        ExitCode::from(1)
    })
}
