use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sporadic::census::{run_census, CensusReportFile, DirichletMode, RunConfig, Timings};
use sporadic::dirichlet::{parse_center, Limits};
use sporadic::discretetest::{evaluate_row, table_specs};
use sporadic::SporadicId;

const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    All,
    Off,
}

/// Census of the sporadic complex hyperbolic triangle groups Γ(2π/p, τ).
#[derive(Debug, Parser)]
#[command(name = "sporadic", version)]
struct Cli {
    /// Range of p, inclusive, as A..B.
    #[arg(long, default_value = "2..24")]
    p_range: String,

    /// Sporadic values (sigma1 … sigma9, sigma1bar …, or "all"); comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    tau: Vec<String>,

    /// Restrict to specific groups, e.g. `p=3,tau=sigma4bar`. Repeatable.
    #[arg(long)]
    only: Vec<String>,

    /// Grid size of the Giraud-disk sampling.
    #[arg(long, default_value_t = 200)]
    grid: usize,

    /// Bits for multiprecision confirmation of verdicts.
    #[arg(long, default_value_t = 256)]
    precision: usize,

    #[arg(long, default_value_t = 20000)]
    max_words: usize,

    #[arg(long, default_value_t = 12)]
    max_steps: usize,

    /// Center of the Dirichlet domain as three complex entries, e.g. `1,0.5i,-1`.
    #[arg(long)]
    center_override: Option<String>,

    /// Print a numeric table (e.g. `prop:sig4c`, or `all`) and exit.
    #[arg(long)]
    tables: Option<String>,

    /// Write one SVG (and CSV hit grid) per isometry class of facets.
    #[arg(long)]
    faces_svg: bool,

    /// Directory for face pictures.
    #[arg(long, default_value = "faces")]
    faces_dir: PathBuf,

    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,

    /// Write per-record timings (seconds) here.
    #[arg(long)]
    timings: Option<PathBuf>,

    /// When to run the G-procedure.
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    dirichlet: Mode,

    /// Try the R1R2R3R2⁻¹ family for every value that has one.
    #[arg(long)]
    all_families: bool,

    /// Report engine verdicts only, without falling back on earlier results.
    #[arg(long)]
    no_cited: bool,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Resource(_) => EXIT_RESOURCE,
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::Config(format!("--p-range expects A..B, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a < 2 || a > b {
        return Err(Failure::Config(format!("--p-range needs 2 ≤ A ≤ B, got {s:?}")));
    }
    Ok((a, b))
}

fn parse_tau(s: &str) -> Result<SporadicId, Failure> {
    s.trim().parse().map_err(|_| Failure::Config(format!("unknown sporadic value {s:?}")))
}

fn parse_only(s: &str) -> Result<(u32, SporadicId), Failure> {
    let mut p = None;
    let mut tau = None;
    for kv in s.split(',') {
        match kv.split_once('=') {
            Some(("p", v)) => p = v.trim().parse::<u32>().ok(),
            Some(("tau", v)) => tau = Some(parse_tau(v)?),
            _ => return Err(Failure::Config(format!("--only expects p=N,tau=ID, got {s:?}"))),
        }
    }
    match (p, tau) {
        (Some(p), Some(t)) if p >= 2 => Ok((p, t)),
        _ => Err(Failure::Config(format!("--only expects p=N,tau=ID, got {s:?}"))),
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Failure> {
    let (p_min, p_max) = parse_range(&cli.p_range)?;
    let taus = if cli.tau.is_empty() || cli.tau.iter().any(|t| t == "all") {
        SporadicId::all()
    } else {
        cli.tau.iter().map(|t| parse_tau(t)).collect::<Result<_, _>>()?
    };
    if cli.grid < 8 {
        return Err(Failure::Config("--grid must be at least 8".into()));
    }
    if cli.precision < 64 {
        return Err(Failure::Config("--precision must be at least 64 bits".into()));
    }
    if cli.max_words == 0 || cli.max_steps == 0 {
        return Err(Failure::Config("--max-words and --max-steps must be positive".into()));
    }
    if let Some(c) = &cli.center_override {
        parse_center(c).map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(RunConfig {
        p_min,
        p_max,
        taus,
        limits: Limits { max_steps: cli.max_steps, max_words: cli.max_words, grid: cli.grid, ..Limits::default() },
        precision_bits: cli.precision,
        center_override: cli.center_override.clone(),
        dirichlet: match cli.dirichlet {
            Mode::Auto => DirichletMode::Auto,
            Mode::All => DirichletMode::All,
            Mode::Off => DirichletMode::Off,
        },
        all_families: cli.all_families,
        cited: !cli.no_cited,
        collect_faces: cli.faces_svg,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Resource(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Resource(format!("{}: {e}", path.display())))
}

fn print_tables(which: &str, json: Option<&Path>) -> Result<(), Failure> {
    let specs: Vec<_> = table_specs().into_iter().filter(|t| which == "all" || t.id == which).collect();
    if specs.is_empty() {
        let known: Vec<&str> = table_specs().iter().map(|t| t.id).collect();
        return Err(Failure::Config(format!("unknown table {which:?}; known: {}", known.join(", "))));
    }
    let mut out = std::io::stdout().lock();
    let mut results = Vec::new();
    for spec in specs {
        let _ = writeln!(out, "{}", spec.id);
        let _ =
            writeln!(out, "{:>4} | {:>10} | {:>6} | {:>9} | {:>9} | test", "p", "τ", "α_p", "coshδ·sinα", "printed");
        for row in &spec.rows {
            let r = evaluate_row(row).map_err(|e| Failure::Resource(format!("{} p={}: {e}", spec.id, row.p)))?;
            let _ = writeln!(
                out,
                "{:>4} | {:>10} | {:>6} | {:>10.4} | {:>9} | {}{}",
                r.p,
                r.tau.name(),
                r.alpha.as_deref().unwrap_or("-"),
                r.computed,
                r.printed,
                r.test,
                if r.matches { "" } else { "  (mismatch)" }
            );
            results.push((spec.id, r));
        }
        let _ = writeln!(out);
    }
    if let Some(path) = json {
        let v = serde_json::json!({
            "schema": sporadic::census::SCHEMA_VERSION,
            "tables": results.iter().map(|(id, r)| serde_json::json!({"table": id, "row": r})).collect::<Vec<_>>(),
        });
        write_file(path, &serde_json::to_string_pretty(&v).expect("serializable"))?;
    }
    Ok(())
}

fn print_summary(report: &CensusReportFile) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{:>10} {:>3} {:>8} {:>26} {:>9} {:>8} {:>6}",
        "τ", "p", "sig", "non-discrete", "behaviour", "cycles", "arith"
    );
    for r in &report.records {
        let nd = r.nondiscreteness.done().map_or("-".to_string(), |n| n.verdict.clone());
        let cyc = match r.cycles.done() {
            Some(c) if c.iter().all(|x| x.closed && x.integral) => "integral",
            Some(_) => "other",
            None => "-",
        };
        let ar = r.arithmeticity.done().map_or("-", |a| if a.satisfied { "yes" } else { "no" });
        let _ = writeln!(
            out,
            "{:>10} {:>3} {:>8} {:>26} {:>9} {:>8} {:>6}",
            r.tau, r.p, r.signature, nd, r.behaviour, cyc, ar
        );
    }
}

fn write_timings(path: &Path, t: &[Timings]) -> Result<(), Failure> {
    write_file(path, &serde_json::to_string_pretty(t).expect("serializable"))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(which) = &cli.tables {
        print_tables(which, cli.json.as_deref())?;
        return Ok(true);
    }
    let cfg = config(&cli)?;
    let only: Vec<(u32, SporadicId)> = cli.only.iter().map(|s| parse_only(s)).collect::<Result<_, _>>()?;
    let (report, timings) = run_census(&cfg, (!only.is_empty()).then_some(only.as_slice()));
    for t in &timings {
        log::info!("{} p={}: {:.2}s", t.tau, t.p, t.nondiscreteness + t.dirichlet + t.tables + t.arithmeticity);
    }
    print_summary(&report);
    if let Some(path) = &cli.json {
        write_file(path, &serde_json::to_string_pretty(&report).expect("serializable"))?;
    }
    if let Some(path) = &cli.timings {
        write_timings(path, &timings)?;
    }
    if cli.faces_svg {
        for f in report.records.iter().flat_map(|r| r.face_files.iter()) {
            write_file(&cli.faces_dir.join(format!("{}.svg", f.stem)), &f.svg)?;
            write_file(&cli.faces_dir.join(format!("{}.csv", f.stem)), &f.csv)?;
        }
    }
    let errors: Vec<String> =
        report.records.iter().flat_map(|r| r.errors.iter().map(move |e| format!("{} p={}: {e}", r.tau, r.p))).collect();
    for e in &errors {
        log::error!("{e}");
    }
    Ok(errors.is_empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_RESOURCE),
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("configuration error: {m}"),
                Failure::Resource(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
