use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pqflex::experiment::{self, ExperimentConfig, Method};
use pqflex::feeder::{build_feeder, FeederSpec, FeederSummary};
use pqflex::inverter::{self, SetpointVector};
use pqflex::plot::render_svg;
use pqflex::revol::{self, DirectionSet, RevolConfig};
use pqflex::sampling::{self, Alpha, DirichletConfig, LabelledCloud, DEFAULT_ALPHA};
use pqflex::tuning::{self, SearchSpace};
use pqflex::{jaccard, Execution, PowerFlow};

#[derive(Parser)]
#[command(name = "pqflex", version, about = "Feasible operation regions of LV feeders at the MV interconnection")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect or export feeder specifications.
    #[command(subcommand)]
    Feeder(FeederCmd),
    /// Power-flow utilities.
    #[command(subcommand)]
    Pf(PfCmd),
    /// Sample a labelled interchange cloud.
    Sample(SampleArgs),
    /// Boundary sweeps with REvol.
    Revol(RevolArgs),
    /// Randomized REvol hyperparameter search.
    Tune(TuneArgs),
    /// Jaccard index of two hull files.
    Jaccard { a: PathBuf, b: PathBuf },
    /// Run the method comparison grid.
    Compare(CompareArgs),
    /// Render a cloud and hulls to SVG.
    Plot(PlotArgs),
}

#[derive(Subcommand)]
enum FeederCmd {
    /// Print the summary table (reference feeders when none given).
    Show { feeders: Vec<String> },
    /// Write the reference feeder specs as JSON into `--out` (default `.`).
    Write,
}

#[derive(Subcommand)]
enum PfCmd {
    /// Solve one operating point and print the interchange result as JSON.
    Solve {
        #[arg(long)]
        feeder: String,
        /// Normalized set-values `{"p_n": [...], "q_n": [...]}`; neutral if omitted.
        #[arg(long)]
        setpoints: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleMethod {
    Uniform,
    Dirichlet,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    method: SampleMethod,
    #[arg(long)]
    feeder: String,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Symmetric Dirichlet concentration.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Hull output (default: `hull.json` next to the cloud).
    #[arg(long)]
    hull: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct RevolArgs {
    #[arg(long)]
    feeder: String,
    /// RevolConfig JSON; the tuned defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long, value_enum)]
    directions: Option<Directions>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Directions {
    Compass,
    Legacy,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long, default_value = "feeder9")]
    feeder: String,
    #[arg(long, default_value_t = 210)]
    trials: usize,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    /// SearchSpace JSON; the default ranges when omitted.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Upper bound on sampled max_epochs.
    #[arg(long)]
    max_epochs: Option<u64>,
    #[arg(long, default_value_t = tuning::BENCHMARK_SAMPLES)]
    benchmark_n: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// ExperimentConfig JSON; defaults for every missing field.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feeder spec files or reference names, replacing the configured set.
    #[arg(long, num_args = 1..)]
    feeders: Vec<String>,
    #[arg(long, num_args = 1.., value_parser = parse_method)]
    methods: Vec<Method>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    cloud: PathBuf,
    /// Hull JSON files to outline; repeatable.
    #[arg(long)]
    hull: Vec<PathBuf>,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    Method::parse(s).ok_or_else(|| format!("unknown method {s:?} (uniform, dirichlet, revol)"))
}

/// A JSON spec file, or a reference feeder by name (`feeder9`) or node count (`9`).
fn load_feeder(arg: &str) -> Result<FeederSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return serde_json::from_str(&text).with_context(|| format!("parsing feeder spec {arg}"));
    }
    let digits = arg.strip_prefix("feeder").unwrap_or(arg);
    match digits.parse::<usize>() {
        Ok(n) if n > 0 => Ok(FeederSpec::reference(n)),
        _ => bail!("{arg}: neither a feeder spec file nor a reference name like feeder9"),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn execution(jobs: Option<usize>) -> Result<Execution> {
    match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(_n).build_global()?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every requested cell succeeded.
fn run(cli: Cli) -> Result<bool> {
    let exec = execution(cli.jobs)?;
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Feeder(FeederCmd::Show { feeders }) => {
            let specs = if feeders.is_empty() {
                FeederSpec::reference_set()
            } else {
                feeders.iter().map(|f| load_feeder(f)).collect::<Result<_>>()?
            };
            let mut table = format!("{}\n", FeederSummary::HEADER);
            for spec in &specs {
                table += &format!("{}\n", build_feeder(spec)?.summary());
            }
            print!("{table}");
            if let Some(out) = &cli.out {
                write_text(out, &table)?;
            }
            Ok(true)
        }
        Command::Feeder(FeederCmd::Write) => {
            let dir = cli.out.unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            for spec in FeederSpec::reference_set() {
                let path = dir.join(format!("{}.json", spec.display_name()));
                write_text(&path, &to_json(&spec)?)?;
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Pf(PfCmd::Solve { feeder, setpoints }) => {
            let model = build_feeder(&load_feeder(&feeder)?)?;
            let sp = match setpoints {
                Some(p) => {
                    let raw: SetpointVector = read_json(&p)?;
                    if raw.len() != model.n_der() || raw.q_n.len() != model.n_der() {
                        bail!("setpoints have {} units, feeder has {}", raw.len(), model.n_der());
                    }
                    SetpointVector::new(raw.p_n, raw.q_n)
                }
                None => SetpointVector::neutral(model.n_der()),
            };
            let applied = inverter::apply(&sp, &model);
            let res = PowerFlow::new(&model).solve(&applied.injections);
            let text = to_json(&res)?;
            match &cli.out {
                Some(out) => write_text(out, &text)?,
                None => print!("{text}"),
            }
            Ok(res.converged)
        }
        Command::Sample(a) => sample(a, seed, cli.out, exec),
        Command::Revol(a) => run_revol(a, cli.seed, cli.out, exec),
        Command::Tune(a) => tune(a, seed, cli.out, exec),
        Command::Jaccard { a, b } => {
            let j = jaccard(&experiment::read_hull(&a)?, &experiment::read_hull(&b)?)?;
            println!("{j}");
            if let Some(out) = &cli.out {
                write_text(out, &format!("{j}\n"))?;
            }
            Ok(true)
        }
        Command::Compare(a) => compare(a, cli.seed, cli.out, exec),
        Command::Plot(a) => {
            let cloud = LabelledCloud::read_csv(fs::File::open(&a.cloud).with_context(|| a.cloud.display().to_string())?)?;
            let mut hulls = Vec::new();
            for p in &a.hull {
                hulls.push((hull_label(p), experiment::read_hull(p)?));
            }
            let out = cli.out.unwrap_or_else(|| PathBuf::from("plot.svg"));
            write_text(&out, &render_svg(&cloud, &hulls))?;
            Ok(true)
        }
    }
}

/// `run3/hull.json` is labelled `run3`, `bench.json` is labelled `bench`.
fn hull_label(p: &Path) -> String {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if stem == "hull" {
        if let Some(parent) = p.parent().and_then(|d| d.file_name()) {
            return parent.to_string_lossy().into_owned();
        }
    }
    stem
}

fn sample(a: SampleArgs, seed: u64, out: Option<PathBuf>, exec: Execution) -> Result<bool> {
    let model = build_feeder(&load_feeder(&a.feeder)?)?;
    let pf = PowerFlow::new(&model);
    let cloud = match a.method {
        SampleMethod::Uniform => sampling::sample_uniform(&pf, a.n, seed, exec)?,
        SampleMethod::Dirichlet => {
            let cfg = DirichletConfig {
                alpha: Alpha::Symmetric(a.alpha),
                sample_size: a.n,
                seed,
            };
            sampling::sample_dirichlet_two_stage(&pf, &cfg, exec)?
        }
    };
    let out = out.unwrap_or_else(|| PathBuf::from("cloud.csv"));
    let mut buf = Vec::new();
    cloud.write_csv(&mut buf)?;
    write_text(&out, std::str::from_utf8(&buf)?)?;

    let hull_path = a.hull.unwrap_or_else(|| out.with_file_name("hull.json"));
    let hull = cloud.hull();
    if let Ok(h) = &hull {
        write_text(&hull_path, &to_json(h)?)?;
    }
    if let Some(svg) = &a.svg {
        let hulls: Vec<_> = hull.iter().map(|h| ("hull".to_string(), h.clone())).collect();
        write_text(svg, &render_svg(&cloud, &hulls))?;
    }
    println!(
        "{} samples, {} feasible, {} power flows, hull area {}",
        cloud.points.len(),
        cloud.feasible_count,
        pf.call_count(),
        hull.as_ref().map_or("n/a".to_string(), |h| format!("{:.1} kW*kvar", h.area()))
    );
    if let Err(e) = &hull {
        eprintln!("error: no hull: {e}");
    }
    Ok(hull.is_ok())
}

fn run_revol(a: RevolArgs, seed: Option<u64>, out: Option<PathBuf>, exec: Execution) -> Result<bool> {
    let model = build_feeder(&load_feeder(&a.feeder)?)?;
    let mut cfg: RevolConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => RevolConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(e) = a.max_epochs {
        cfg.max_epochs = e;
    }
    if let Some(d) = a.directions {
        cfg.directions = match d {
            Directions::Compass => DirectionSet::Compass,
            Directions::Legacy => DirectionSet::Legacy,
        };
    }
    let pf = PowerFlow::new(&model);
    let sweeps = revol::sweep_runs(&pf, &cfg, a.runs, exec)?;
    let dir = out.unwrap_or_else(|| PathBuf::from("sweep"));

    let mut ok = true;
    let mut runs = Vec::new();
    for s in &sweeps {
        let (_, hull) = experiment::write_sweep_artifacts(&dir.join(format!("run{}", s.run)), s)?;
        if let Err(e) = &hull {
            eprintln!("run {}: {e}", s.run);
            ok = false;
        }
        runs.push(serde_json::json!({
            "run": s.run,
            "pf_calls": s.pf_calls,
            "feasible_points": s.boundary_points().len(),
            "hull_area": hull.as_ref().ok().map(|h| h.area()),
        }));
        println!(
            "run {:>2}: {} power flows, {} feasible boundary points, hull area {}",
            s.run,
            s.pf_calls,
            s.boundary_points().len(),
            hull.as_ref().map_or("n/a".to_string(), |h| format!("{:.1}", h.area()))
        );
    }
    let total = pf.call_count();
    let summary = serde_json::json!({
        "feeder": model.name,
        "config": cfg,
        "runs": runs,
        "pf_calls": total,
    });
    write_text(&dir.join("summary.json"), &to_json(&summary)?)?;
    println!("{total} power flows in total");
    Ok(ok)
}

fn tune(a: TuneArgs, seed: u64, out: Option<PathBuf>, exec: Execution) -> Result<bool> {
    let model = build_feeder(&load_feeder(&a.feeder)?)?;
    let mut space: SearchSpace = match &a.space {
        Some(p) => read_json(p)?,
        None => SearchSpace::default(),
    };
    if let Some(cap) = a.max_epochs {
        space = space.with_epoch_cap(cap);
    }
    let pf = PowerFlow::new(&model);
    let benchmark = tuning::build_benchmark(&pf, seed, a.benchmark_n, exec)?;
    let records = tuning::random_search(&space, &RevolConfig::default(), a.trials, a.runs, &pf, &benchmark, seed, exec)?;
    let out = out.unwrap_or_else(|| PathBuf::from("trials.csv"));
    let mut buf = Vec::new();
    tuning::write_trials_csv(&records, &mut buf)?;
    write_text(&out, std::str::from_utf8(&buf)?)?;
    let best = &records[0];
    println!(
        "best of {} trials: mean Jaccard {:.4} (std {:.4}), trial {}",
        records.len(),
        best.mean,
        best.std,
        best.trial
    );
    println!("{}", serde_json::to_string(&best.config)?);
    Ok(true)
}

fn compare(a: CompareArgs, seed: Option<u64>, out: Option<PathBuf>, exec: Execution) -> Result<bool> {
    let mut cfg: ExperimentConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => ExperimentConfig::default(),
    };
    if !a.feeders.is_empty() {
        cfg.feeders = a.feeders.iter().map(|f| load_feeder(f)).collect::<Result<_>>()?;
    }
    if !a.methods.is_empty() {
        cfg.methods = a.methods;
    }
    if let Some(n) = a.n {
        cfg.sample_size = n;
    }
    if let Some(r) = a.runs {
        cfg.revol_runs = r;
    }
    if let Some(e) = a.max_epochs {
        cfg.revol.max_epochs = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out_dir = o;
    }
    let (report, timing) = experiment::run_comparison(&cfg, exec)?;
    print!("{}", report.summary_table());
    for c in report.cells.iter().filter(|c| !c.ok()) {
        eprintln!("failed: {} {:?}", c.dir(), c.status);
    }
    println!(
        "{} cells, {} failed, {:.1} s; report in {}",
        report.cells.len(),
        report.failed_cells,
        timing.total_seconds,
        cfg.out_dir.join("report.json").display()
    );
    Ok(report.all_ok())
}
