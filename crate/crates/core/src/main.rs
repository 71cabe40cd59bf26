use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use transship_moo::experiment::{
    load_experiment, parse_front, render_landscape, run_experiment, sample_landscape, summarize_front, write_outputs,
    ExperimentError, ExperimentSpec, LandscapeDesign, ObjectiveSubset,
};

/// Environment variable naming the default output directory.
const OUTPUT_ENV: &str = "TRANSSHIP_MOO_OUT";

#[derive(Parser)]
#[command(
    name = "transship-moo",
    version,
    about = "Multiobjective base-stock optimization with lateral transshipments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an experiment file or preset and print the resolved system.
    Validate(Source),
    /// Estimate all objectives over random or grid base-stock levels.
    Landscape(LandscapeArgs),
    /// Run SPEA2 and write the front, solutions, snapshots and summary.
    Optimize(OptimizeArgs),
    /// Print extent and spread statistics for an exported front.
    Summarize { front: PathBuf },
}

#[derive(Args)]
struct Source {
    /// Experiment file (TOML).
    config: Option<PathBuf>,
    /// Built-in system: table1, s1, s2, s3 or s4. Used when no file is given.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Scenarios per estimate.
    #[arg(long)]
    scenarios: Option<usize>,
    #[arg(long)]
    scenario_seed: Option<u64>,
    /// Upper bound on every base-stock level.
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct LandscapeArgs {
    #[command(flatten)]
    common: Common,
    /// Number of uniformly random points.
    #[arg(long, default_value_t = 30_000, conflicts_with = "grid")]
    samples: usize,
    /// Grid levels per location instead of random points.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 7)]
    sample_seed: u64,
    /// Output file; defaults to `landscape.csv` in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    /// Objective subset, e.g. `cost,fill` or `C/F/L`.
    #[arg(long)]
    objectives: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    archive: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    crossover_rate: Option<f64>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    /// Draw a new scenario pool every generation.
    #[arg(long)]
    resample_per_generation: bool,
}

fn load(source: &Source) -> Result<ExperimentSpec, ExperimentError> {
    match (&source.config, &source.preset) {
        (Some(path), _) => load_experiment(path),
        (None, Some(name)) => ExperimentSpec::from_preset(name),
        (None, None) => ExperimentSpec::from_preset("table1"),
    }
}

fn apply_common(spec: &mut ExperimentSpec, common: &Common) {
    if let Some(n) = common.scenarios {
        spec.scenarios = n;
    }
    if let Some(seed) = common.scenario_seed {
        spec.scenario_seed = seed;
    }
    if let Some(s_max) = common.s_max {
        spec.spea.upper_bound = s_max;
    }
    if let Some(dir) = &common.output_dir {
        spec.output_dir = Some(dir.clone());
    }
}

fn output_dir(spec: &ExperimentSpec) -> PathBuf {
    spec.output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn io_error(path: &Path, e: std::io::Error) -> ExperimentError {
    ExperimentError::Io(format!("{}: {e}", path.display()))
}

fn validate(source: &Source) -> Result<(), ExperimentError> {
    let spec = load(source)?;
    spec.validate()?;
    println!(
        "ok: {} locations, period duration {}",
        spec.system.len(),
        spec.system.period_duration
    );
    for (i, loc) in spec.system.locations.iter().enumerate() {
        println!(
            "location {}: h={} p={} demand N({}, {})",
            i + 1,
            loc.holding_cost,
            loc.shortage_cost,
            loc.demand.mean,
            loc.demand.std_dev
        );
    }
    println!(
        "spea: population {} archive {} generations {} crossover {} mutation {} s_max {}",
        spec.spea.population_size,
        spec.spea.archive_size,
        spec.spea.generations,
        spec.spea.crossover_rate,
        spec.spea.mutation_rate,
        spec.spea.upper_bound
    );
    println!(
        "run: objectives {} scenarios {} seed {}",
        spec.objectives, spec.scenarios, spec.scenario_seed
    );
    Ok(())
}

fn landscape(args: &LandscapeArgs) -> Result<(), ExperimentError> {
    let mut spec = load(&args.common.source)?;
    apply_common(&mut spec, &args.common);
    spec.validate()?;
    let design = match args.grid {
        Some(points_per_axis) => LandscapeDesign::Grid { points_per_axis },
        None => LandscapeDesign::Random {
            count: args.samples,
            seed: args.sample_seed,
        },
    };
    let rows = sample_landscape(&spec, design)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| output_dir(&spec).join("landscape.csv"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    std::fs::write(&path, render_landscape(&rows)).map_err(|e| io_error(&path, e))?;
    println!("wrote {} points to {}", rows.len(), path.display());
    Ok(())
}

fn optimize(args: &OptimizeArgs) -> Result<(), ExperimentError> {
    let mut spec = load(&args.common.source)?;
    apply_common(&mut spec, &args.common);
    if let Some(objectives) = &args.objectives {
        spec.objectives = objectives.parse::<ObjectiveSubset>()?;
    }
    let p = &mut spec.spea;
    if let Some(v) = args.seed {
        p.seed = v;
    }
    if let Some(v) = args.population {
        p.population_size = v;
    }
    if let Some(v) = args.archive {
        p.archive_size = v;
    }
    if let Some(v) = args.generations {
        p.generations = v;
    }
    if let Some(v) = args.crossover_rate {
        p.crossover_rate = v;
    }
    if let Some(v) = args.mutation_rate {
        p.mutation_rate = v;
    }
    if args.resample_per_generation {
        spec.resample_per_generation = true;
    }
    spec.validate()?;

    let result = run_experiment(&spec)?;
    let dir = output_dir(&spec);
    write_outputs(&result, &dir)?;
    print!("{}", result.summary);
    println!("evaluations: {}", result.evaluations);
    println!("wrote {}", dir.display());
    Ok(())
}

fn summarize(path: &Path) -> Result<(), ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let front = parse_front(&text)?;
    if front.is_empty() {
        return Err(ExperimentError::Invalid(format!("{} has no records", path.display())));
    }
    print!("{}", summarize_front(&front));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate(source) => validate(source),
        Command::Landscape(args) => landscape(args),
        Command::Optimize(args) => optimize(args),
        Command::Summarize { front } => summarize(front),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
