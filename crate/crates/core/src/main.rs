use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dsr_lab::sweep::config::{Recipe, Scenario, SweepConfig};
use dsr_lab::sweep::emit::{
    population_json, sweep_json, write_csv, write_json, write_population_csv, VERSION,
};
use dsr_lab::sweep::run::{run_crossover, run_populations, run_sweep, with_jobs};
use dsr_lab::sweep::{builtin_recipe, ConfigError, SweepError};

#[derive(Parser)]
#[command(
    name = "dsr-lab",
    version,
    about = "Displacement-squeeze receiver simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (overrides outputs.csv_path); stdout if neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; DSR_LAB_JOBS takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark table over the energy grid.
    Benchmarks(Common),
    /// Run the configured scenario.
    Sweep(Common),
    /// Crossover of two curves described by the [crossover] section.
    Crossover(Common),
    /// Maximum tolerable thermal noise over the energy grid.
    Ntmax(Common),
    /// Regenerate the data behind a figure from its built-in recipe.
    ReproduceFigure {
        figure: u32,
        /// Use this recipe file instead of the built-in one.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(c) => Failure::Config(c.to_string()),
            SweepError::Numeric(n) => Failure::Numeric(n.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn jobs(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("DSR_LAB_JOBS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|j| *j > 0)
            .map(Some)
            .ok_or_else(|| {
                Failure::Config(format!(
                    "DSR_LAB_JOBS: expected a positive integer, got '{v}'"
                ))
            }),
        Err(_) => Ok(flag),
    }
}

fn load(path: &Path) -> Result<SweepConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    SweepConfig::from_toml(&text).map_err(Failure::from)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_failure(path, e))
}

type RowWriter = Box<dyn Fn(&mut dyn Write) -> io::Result<()>>;

/// Writes CSV (to `csv_path` or stdout) and JSON (if `json_path`);
/// returns the number of failed rows.
fn emit(
    config: &SweepConfig,
    csv_path: Option<&Path>,
    json_path: Option<&Path>,
    jobs: Option<usize>,
) -> Result<usize, Failure> {
    let (write_rows, json, failed): (RowWriter, _, usize) =
        if config.scenario == Scenario::Populations {
            let rows = with_jobs(jobs, || run_populations(config))??;
            let json = population_json(&rows, config);
            (Box::new(move |w| write_population_csv(&rows, w)), json, 0)
        } else {
            let out = with_jobs(jobs, || run_sweep(config))??;
            for e in &out.errors {
                eprintln!("row {} (N = {}): {}", e.index, e.n, e.message);
            }
            let json = sweep_json(&out.rows, &out.errors, config);
            let failed = out.errors.len();
            let cfg = config.clone();
            (
                Box::new(move |w| write_csv(&out.rows, &cfg, w)),
                json,
                failed,
            )
        };
    match csv_path {
        Some(p) => {
            let mut f = create(p)?;
            write_rows(&mut f)
                .and_then(|_| f.flush())
                .map_err(|e| io_failure(p, e))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_rows(&mut lock).map_err(|e| Failure::Io(format!("stdout: {e}")))?;
        }
    }
    if let Some(p) = json_path {
        let mut f = create(p)?;
        write_json(&json, &mut f)
            .and_then(|_| f.flush())
            .map_err(|e| io_failure(p, e))?;
    }
    Ok(failed)
}

fn run_common(common: &Common, force: Option<Scenario>) -> Result<(), Failure> {
    let mut config = load(&common.config)?;
    if let Some(s) = force {
        if config.scenario != s {
            config.scenario = s;
            config.validate()?;
        }
    }
    let csv = common
        .out
        .clone()
        .or_else(|| config.outputs.csv_path.clone());
    let json = config.outputs.json_path.clone();
    let failed = emit(&config, csv.as_deref(), json.as_deref(), jobs(common.jobs)?)?;
    if failed > 0 {
        return Err(Failure::Numeric(format!("{failed} grid point(s) failed")));
    }
    Ok(())
}

fn crossover(common: &Common) -> Result<(), Failure> {
    let config = load(&common.config)?;
    let c = config
        .crossover
        .ok_or_else(|| Failure::Config("crossover: section missing".into()))?;
    let root = with_jobs(jobs(common.jobs)?, || run_crossover(&config))??;
    println!(
        "{} = {} at N = {}",
        c.curve_a,
        c.curve_b,
        format_args!("{root:.6}")
    );
    if let Some(p) = common.out.as_ref().or(config.outputs.json_path.as_ref()) {
        let value = serde_json::json!({
            "config": serde_json::to_value(&config).expect("config serializes"),
            "version": VERSION,
            "crossover": root,
        });
        let mut f = create(p)?;
        write_json(&value, &mut f)
            .and_then(|_| f.flush())
            .map_err(|e| io_failure(p, e))?;
    }
    Ok(())
}

fn reproduce(
    figure: u32,
    config: Option<&Path>,
    out: &Path,
    jobs_flag: Option<usize>,
) -> Result<(), Failure> {
    let recipe = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_failure(p, e))?;
            Recipe::from_toml(&text)?
        }
        None => builtin_recipe(figure)?,
    };
    let jobs = jobs(jobs_flag)?;
    let mut failed = 0;
    for panel in &recipe.panels {
        let name = panel.name.as_deref().unwrap_or("panel");
        let stem = format!("fig{}_{name}", recipe.figure);
        let csv = out.join(format!("{stem}.csv"));
        let json = out.join(format!("{stem}.json"));
        failed += emit(panel, Some(&csv), Some(&json), jobs)?;
        eprintln!("wrote {}", csv.display());
    }
    if failed > 0 {
        return Err(Failure::Numeric(format!("{failed} grid point(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Benchmarks(c) => run_common(c, Some(Scenario::Benchmarks)),
        Command::Sweep(c) => run_common(c, None),
        Command::Crossover(c) => crossover(c),
        Command::Ntmax(c) => run_common(c, Some(Scenario::TolerableThermal)),
        Command::ReproduceFigure {
            figure,
            config,
            out,
            jobs,
        } => reproduce(*figure, config.as_deref(), out, *jobs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
