//! Command-line front end. Exit codes: 0 success, 1 I/O failure,
//! 2 configuration error, 3 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use photonic_vqa::config::{validate_config, Experiment, NoiseSpec, OptimizerKind, RunConfig};
use photonic_vqa::counts::NoiseConfig;
use photonic_vqa::experiments::{
    certified_dimension, default_theta_grid, dimension_sources, fit_landscape, h2_dissociation, h2_theta_scan,
    heralded_interference, landscape_minimum, phase_grid, projector_fidelity, run_vqe_bayesian, run_vqe_gd, run_vqf,
    to_csv, SourcePair, DEMOCRATIC_INIT,
};
use photonic_vqa::cost::GroupRecord;
use photonic_vqa::observables::vqf_table;
use photonic_vqa::optimizers::OptRun;
use photonic_vqa::tables::{h2_grid, H2_TABLE_JSON, PHASE_TABLES_JSON};

const OUTPUT_DIR_ENV: &str = "PHOTONIC_VQA_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "photonic-vqa", version, about = "Two-ququart photonic variational processor simulator")]
struct Cli {
    /// TOML run configuration; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving results.json, metadata.json, trace.jsonl and CSV files.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the bundled data tables into the output directory.
    #[arg(long)]
    dump_tables: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// Noiseless evaluation.
    #[arg(long, conflicts_with_all = ["counts", "car"])]
    exact: bool,
    /// Coincidences per measurement setting.
    #[arg(long)]
    counts: Option<u64>,
    /// Coincidence-to-accidental ratio (number or "inf").
    #[arg(long)]
    car: Option<String>,
    /// Remove the expected accidental floor before estimating.
    #[arg(long)]
    subtract_accidentals: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Source indistinguishability in [0, 1].
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Variational eigensolver for H2 at one bond length.
    VqeH2 {
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        optimizer: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        init: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Variational factoring of a semiprime.
    Vqf {
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Energy landscape of the one-angle ansatz.
    ScanH2 {
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum energy over bond lengths.
    Dissociation {
        #[arg(long, value_delimiter = ',')]
        r_values: Option<Vec<f64>>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Heralded two-source interference fringes.
    Interference {
        /// Source pair 2-3, 1-3 or 3-4 (default: all).
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Certified entanglement dimension.
    CertifyDim {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        sources: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Single-source projector fidelity.
    Fidelity {
        /// Source 1..=4 (default: all).
        #[arg(long)]
        source: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Config(Vec<String>),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<photonic_vqa::Error> for Failure {
    fn from(e: photonic_vqa::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn apply_common(cfg: &mut RunConfig, c: &Common) -> Result<(), Failure> {
    if c.exact {
        cfg.noise = NoiseSpec::default();
    }
    if c.counts.is_some() || c.car.is_some() {
        let (mut counts, mut car, mut sub) = match &cfg.noise {
            NoiseSpec::Sampled { total_counts_per_setting, car, subtract_accidentals } => {
                (Some(*total_counts_per_setting), car.clone(), *subtract_accidentals)
            }
            NoiseSpec::Named(_) => (None, toml::Value::String("inf".into()), false),
        };
        if let Some(n) = c.counts {
            counts = Some(n);
        }
        if let Some(text) = &c.car {
            car = match text.parse::<f64>() {
                Ok(x) if x.is_finite() => toml::Value::Float(x),
                _ => toml::Value::String(text.clone()),
            };
        }
        sub |= c.subtract_accidentals;
        let total = counts.ok_or_else(|| Failure::Config(vec!["--car needs --counts".into()]))?;
        cfg.noise = NoiseSpec::Sampled { total_counts_per_setting: total, car, subtract_accidentals: sub };
    } else if c.subtract_accidentals {
        if let NoiseSpec::Sampled { subtract_accidentals, .. } = &mut cfg.noise {
            *subtract_accidentals = true;
        }
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(e) = c.epsilon {
        cfg.epsilon = e;
    }
    Ok(())
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let from_file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(vec![format!("{}: {e}", path.display())]))?;
            Some(RunConfig::from_toml(&text).map_err(|e| Failure::Config(vec![e.to_string()]))?)
        }
        None => None,
    };
    let (experiment, common) = match &cli.command {
        Some(Command::VqeH2 { common, .. }) => (Experiment::VqeH2, common.clone()),
        Some(Command::Vqf { common, .. }) => (Experiment::Vqf, common.clone()),
        Some(Command::ScanH2 { common, .. }) => (Experiment::ScanH2, common.clone()),
        Some(Command::Dissociation { common, .. }) => (Experiment::Dissociation, common.clone()),
        Some(Command::Interference { common, .. }) => (Experiment::Interference, common.clone()),
        Some(Command::CertifyDim { common, .. }) => (Experiment::CertifyDim, common.clone()),
        Some(Command::Fidelity { common, .. }) => (Experiment::Fidelity, common.clone()),
        None => match &from_file {
            Some(c) => (c.experiment, Common::default()),
            None => return Err(Failure::Config(vec!["a subcommand or --config is required".into()])),
        },
    };
    let mut cfg = match from_file {
        Some(c) if c.experiment != experiment => {
            return Err(Failure::Config(vec![format!(
                "config file describes {} but the subcommand is {experiment}",
                c.experiment
            )]))
        }
        Some(c) => c,
        None => RunConfig::new(experiment),
    };
    apply_common(&mut cfg, &common)?;
    match &cli.command {
        Some(Command::VqeH2 { r, optimizer, init, .. }) => {
            cfg.r = r.or(cfg.r);
            if let Some(o) = optimizer {
                cfg.optimizer = Some(o.parse::<OptimizerKind>().map_err(|e| Failure::Config(vec![e.to_string()]))?);
            }
            if let Some(x) = init {
                cfg.init = Some(vec![*x]);
            }
        }
        Some(Command::Vqf { n, .. }) => cfg.n = n.or(cfg.n),
        Some(Command::ScanH2 { r, grid_points, .. }) => {
            cfg.r = r.or(cfg.r);
            cfg.grid_points = grid_points.or(cfg.grid_points);
        }
        Some(Command::Dissociation { r_values, grid_points, .. }) => {
            if r_values.is_some() {
                cfg.r_values = r_values.clone();
            }
            cfg.grid_points = grid_points.or(cfg.grid_points);
        }
        Some(Command::Interference { pair, grid_points, .. }) => {
            if pair.is_some() {
                cfg.pair = pair.clone();
            }
            cfg.grid_points = grid_points.or(cfg.grid_points);
        }
        Some(Command::CertifyDim { d, sources, .. }) => {
            cfg.d = d.or(cfg.d);
            if sources.is_some() {
                cfg.sources = sources.clone();
            }
        }
        Some(Command::Fidelity { source, .. }) => cfg.source = source.or(cfg.source),
        None => {}
    }
    if cli.output_dir.is_some() {
        cfg.output_dir = cli.output_dir.clone();
    }
    validate_config(&cfg).map_err(Failure::Config)?;
    Ok(cfg)
}

/// Everything one experiment produces before it is written out.
struct Products {
    result: Value,
    trace: Vec<Value>,
    csv: Vec<(String, String)>,
    eval_wall_ms: Vec<f64>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Numerical(format!("serialization: {e}")))
}

fn run_trace(run: &OptRun) -> Vec<Value> {
    run.eval_log
        .iter()
        .map(|e| {
            let counts: Vec<Value> = e
                .group_records
                .iter()
                .filter_map(|r| match r {
                    GroupRecord::Sampled(c) => Some(c.to_log_json()),
                    GroupRecord::Exact(_) => None,
                })
                .collect();
            json!({ "eval_index": e.eval_index, "params": e.params, "value": e.value, "std_err": e.std_err, "counts": counts })
        })
        .collect()
}

#[derive(Serialize)]
struct TrajectoryRow {
    iteration: usize,
    params: String,
    cost: f64,
    std_err: f64,
}

fn trajectory_csv(run: &OptRun) -> Result<String, Failure> {
    let rows: Vec<TrajectoryRow> = run
        .trajectory
        .iter()
        .enumerate()
        .map(|(k, t)| TrajectoryRow {
            iteration: k,
            params: t.params.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
            cost: t.cost,
            std_err: t.std_err,
        })
        .collect();
    Ok(to_csv(&rows)?)
}

fn execute(cfg: &RunConfig) -> Result<Products, Failure> {
    let noise: Option<NoiseConfig> = cfg.noise_config()?;
    let noise = noise.as_ref();
    let mut out = Products { result: Value::Null, trace: Vec::new(), csv: Vec::new(), eval_wall_ms: Vec::new() };
    match cfg.experiment {
        Experiment::VqeH2 => {
            let r = cfg.r.expect("validated");
            let init = cfg.init.as_ref().map_or(0.0, |v| v[0]);
            let res = match cfg.optimizer_kind() {
                OptimizerKind::Bayes => run_vqe_bayesian(r, noise, &cfg.gp_config(), init)?,
                OptimizerKind::Gd => run_vqe_gd(r, noise, &cfg.gd_config(), init)?,
            };
            out.trace = run_trace(&res.run);
            out.csv.push(("trajectory.csv".into(), trajectory_csv(&res.run)?));
            out.eval_wall_ms = res.run.eval_wall_ms.clone();
            out.result = to_value(&res)?;
        }
        Experiment::Vqf => {
            let init = cfg.init.as_ref().map_or(DEMOCRATIC_INIT, |v| [v[0], v[1], v[2]]);
            let res = run_vqf(cfg.n.expect("validated"), noise, &cfg.gd_config(), init)?;
            out.trace = run_trace(&res.run);
            out.csv.push(("trajectory.csv".into(), trajectory_csv(&res.run)?));
            out.eval_wall_ms = res.run.eval_wall_ms.clone();
            out.result = to_value(&res)?;
        }
        Experiment::ScanH2 => {
            let r = cfg.r.expect("validated");
            let points = h2_theta_scan(r, &default_theta_grid(cfg.grid_points.unwrap_or(25)), noise, cfg.epsilon)?;
            let (a, b, c) = fit_landscape(&points)?;
            let (e_min, theta_min) = landscape_minimum(a, b, c);
            out.trace = points.iter().map(to_value).collect::<Result<_, _>>()?;
            out.csv.push(("scan.csv".into(), to_csv(&points)?));
            out.result = json!({ "R": r, "points": points, "fit": [a, b, c], "e_min": e_min, "theta_min": theta_min });
        }
        Experiment::Dissociation => {
            let rs = cfg.r_values.clone().unwrap_or_else(h2_grid);
            let points = h2_dissociation(&rs, &default_theta_grid(cfg.grid_points.unwrap_or(9)), noise)?;
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "R")]
                r: f64,
                e_min: f64,
                theta_min: f64,
            }
            let rows: Vec<Row> = points.iter().map(|p| Row { r: p.r, e_min: p.e_min, theta_min: p.theta_min }).collect();
            out.csv.push(("dissociation.csv".into(), to_csv(&rows)?));
            out.result = json!({ "points": points });
        }
        Experiment::Interference => {
            let pairs: Vec<SourcePair> = match &cfg.pair {
                Some(p) => vec![p.parse()?],
                None => SourcePair::ALL.to_vec(),
            };
            let grid = phase_grid(cfg.grid_points.unwrap_or(36));
            let mut scans = Vec::new();
            #[derive(Serialize)]
            struct Row {
                pair: String,
                phase: f64,
                normalized_cc: f64,
            }
            let mut rows = Vec::new();
            for pair in pairs {
                let scan = heralded_interference(pair, cfg.epsilon, &grid, noise)?;
                for (phase, y) in scan.phase_grid.iter().zip(&scan.normalized_cc) {
                    rows.push(Row { pair: pair.to_string(), phase: *phase, normalized_cc: *y });
                }
                scans.push(scan);
            }
            out.csv.push(("fringes.csv".into(), to_csv(&rows)?));
            out.result = json!({ "epsilon": cfg.epsilon, "scans": scans });
        }
        Experiment::CertifyDim => {
            let d = cfg.d.expect("validated");
            let sources: Vec<String> = match &cfg.sources {
                Some(s) => vec![s.clone()],
                None => dimension_sources(d).iter().map(|s| s.to_string()).collect(),
            };
            let results = sources
                .iter()
                .map(|s| certified_dimension(d, s, cfg.epsilon, noise))
                .collect::<Result<Vec<_>, _>>()?;
            #[derive(Serialize)]
            struct Row<'a> {
                d: usize,
                sources: &'a str,
                certified_dimension: f64,
            }
            let rows: Vec<Row> = results.iter().map(|r| Row { d: r.d, sources: &r.sources, certified_dimension: r.certified_dimension }).collect();
            out.csv.push(("dimension.csv".into(), to_csv(&rows)?));
            out.result = json!({ "epsilon": cfg.epsilon, "results": results });
        }
        Experiment::Fidelity => {
            let sources: Vec<usize> = cfg.source.map_or_else(|| (1..=4).collect(), |m| vec![m]);
            #[derive(Serialize)]
            struct Row {
                source: usize,
                fidelity: f64,
            }
            let rows = sources
                .iter()
                .map(|&m| Ok(Row { source: m, fidelity: projector_fidelity(m, cfg.epsilon, noise)? }))
                .collect::<Result<Vec<_>, photonic_vqa::Error>>()?;
            out.csv.push(("fidelity.csv".into(), to_csv(&rows)?));
            out.result = json!({ "epsilon": cfg.epsilon, "fidelities": rows });
        }
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_err(&path, e))
}

fn output_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    cli.output_dir
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("photonic-vqa-output"))
}

fn dump_tables(dir: &Path) -> Result<(), Failure> {
    let tables = dir.join("tables");
    fs::create_dir_all(&tables).map_err(|e| io_err(&tables, e))?;
    write_file(&tables, "phase_tables.json", PHASE_TABLES_JSON.as_bytes())?;
    write_file(&tables, "h2_sto3g.json", H2_TABLE_JSON.as_bytes())?;
    let vqf = vqf_table(&[15, 21, 35])?;
    let text = serde_json::to_string_pretty(&vqf).map_err(|e| Failure::Numerical(e.to_string()))?;
    write_file(&tables, "vqf_2x2.json", text.as_bytes())
}

fn write_products(dir: &Path, cfg: &RunConfig, p: &Products, wall_ms: f64, threads: usize) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut echo = cfg.clone();
    echo.output_dir = None;
    let mut config = to_value(&echo)?;
    if let Value::Object(m) = &mut config {
        m.insert("optimizer".into(), to_value(&cfg.optimizer_kind())?);
        m.insert("gd".into(), to_value(&cfg.gd_config())?);
        m.insert("gp".into(), to_value(&cfg.gp_config())?);
    }
    let mut results = json!({ "experiment": cfg.experiment.name(), "config": config });
    if let (Value::Object(dst), Value::Object(src)) = (&mut results, &p.result) {
        for (k, v) in src {
            dst.insert(k.clone(), v.clone());
        }
    }
    let text = serde_json::to_string_pretty(&results).map_err(|e| Failure::Numerical(e.to_string()))?;
    write_file(dir, "results.json", text.as_bytes())?;

    let mut trace = Vec::new();
    for line in &p.trace {
        serde_json::to_writer(&mut trace, line).map_err(|e| Failure::Numerical(e.to_string()))?;
        trace.write_all(b"\n").map_err(|e| io_err(dir, e))?;
    }
    write_file(dir, "trace.jsonl", &trace)?;
    for (name, body) in &p.csv {
        write_file(dir, name, body.as_bytes())?;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "program": "photonic-vqa",
        "version": env!("CARGO_PKG_VERSION"),
        "finished_unix_s": started,
        "wall_ms": wall_ms,
        "threads": threads,
        "eval_wall_ms": p.eval_wall_ms,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Failure::Numerical(e.to_string()))?;
    write_file(dir, "metadata.json", text.as_bytes())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Config(vec!["--threads must be at least 1".into()]));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Config(vec![format!("thread pool: {e}")]))?;
    }
    if cli.dump_tables && cli.command.is_none() && cli.config.is_none() {
        return dump_tables(&output_dir(cli, None));
    }
    let cfg = resolve(cli)?;
    let dir = output_dir(cli, Some(&cfg));
    let start = Instant::now();
    let products = execute(&cfg)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    write_products(&dir, &cfg, &products, wall_ms, rayon::current_num_threads())?;
    if cli.dump_tables {
        dump_tables(&dir)?;
    }
    println!("{}", dir.join("results.json").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(errs) => {
                    for e in errs {
                        eprintln!("config error: {e}");
                    }
                }
                Failure::Numerical(e) => eprintln!("numerical failure: {e}"),
                Failure::Io(e) => eprintln!("i/o failure: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}
