//! `gdnc` — run cooperative-coding experiments, certify codes, print outage tables.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or configuration error,
//! 3 budget refusal.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gdnc_core::analysis::{
    analytic_formula, exact_outage, pe_slope, LinkModel, DEFAULT_PATTERN_BUDGET,
};
use gdnc_core::channel::{threshold_for_pe, ChannelParams};
use gdnc_core::code::{
    design_systematic_code, gdnc_diversity_bound, singleton_bound, CodeSpec, DesignStrategy,
    DEFAULT_BUDGET,
};
use gdnc_core::experiment::{default_code, golden_code, load_experiment, Experiment};
use gdnc_core::field::Field;
use gdnc_core::montecarlo::{compare_schemes, run_sweep, FerCurve, RunConfig, TrialPlan};
use gdnc_core::protocol::{Scheme, SchemeConfig};
use gdnc_core::report::{write_comparison_csv, write_curve_csv, ExperimentSummary, RunSummary};
use gdnc_core::Error;

#[derive(Parser)]
#[command(name = "gdnc", version, about = "Generalized dynamic-network codes: simulation and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo FER sweep from a config file or from flags.
    Simulate(SimulateArgs),
    /// Certify the minimum distance of a code.
    Mindist(MindistArgs),
    /// Design a systematic code and certify it.
    Design(DesignArgs),
    /// Print analytic and exact outage probabilities.
    Analyze(AnalyzeArgs),
    /// Tabulate several curve JSON files on a shared SNR grid.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// Scheme: df, bnc, dnc or gdnc.
    #[arg(long, default_value = "gdnc")]
    scheme: Scheme,
    /// Number of users.
    #[arg(long = "M", alias = "users", default_value_t = 2)]
    users: usize,
    #[arg(long, default_value_t = 1)]
    k1: usize,
    /// Parity packets per user (default: M - 1 for dnc, 1 otherwise).
    #[arg(long)]
    k2: Option<usize>,
    /// One shared fade for both directions of each inter-user link
    /// (default: independent fades).
    #[arg(long)]
    reciprocal: bool,
    /// Code file in the text format (default: golden or Cauchy code).
    #[arg(long, conflicts_with = "golden")]
    code: Option<PathBuf>,
    /// Golden code: df, bnc, dnc or gdnc.
    #[arg(long)]
    golden: Option<String>,
}

impl SchemeArgs {
    fn build(&self) -> Result<SchemeConfig, Error> {
        let k2 = self.k2.unwrap_or(match self.scheme {
            Scheme::Dnc => self.users.saturating_sub(1),
            _ => 1,
        });
        let code = match (&self.code, &self.golden) {
            (Some(path), _) => read_code(path)?,
            (None, Some(name)) => golden_code(name)?,
            (None, None) => default_code(self.scheme, self.users, self.k1, k2)?,
        };
        SchemeConfig::new(self.scheme, self.users, self.k1, k2, self.reciprocal, code)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment file (TOML). Without it, one scheme is built from flags.
    config: Option<PathBuf>,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// SNR grid in dB (comma separated); flag mode only.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Fixed trial count per point (overrides the config).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Exact-oracle pattern budget; 0 disables the exact column.
    #[arg(long)]
    exact_budget: Option<u64>,
    /// Output directory (default: config `output_dir`, else `results`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "flags")]
    label: String,
}

#[derive(Args)]
struct MindistArgs {
    /// Code file in the text format.
    #[arg(required_unless_present = "golden", conflicts_with = "golden")]
    path: Option<PathBuf>,
    #[arg(long)]
    golden: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Exhaustive,
    Erasure,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Cauchy,
    Random,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    q: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Strategy::Cauchy)]
    strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_tries: usize,
    /// Fail if random search cannot reach this minimum distance.
    #[arg(long)]
    floor: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write the code here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Per-link outage probability.
    #[arg(long, conflicts_with = "snr_db", required_unless_present = "snr_db")]
    pe: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Information packet whose outage is reported.
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[arg(long, default_value_t = DEFAULT_PATTERN_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct CompareArgs {
    /// Curve JSON files written by `simulate`.
    #[arg(required = true)]
    curves: Vec<PathBuf>,
    /// Write the comparison CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Mindist(a) => mindist(a),
        Command::Design(a) => design(a),
        Command::Analyze(a) => analyze(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        Error::Config(_) | Error::Parse { .. } | Error::NoFormula(_) => 2,
        _ => 1,
    }
}

fn read_code(path: &Path) -> Result<CodeSpec, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    CodeSpec::from_text(&text)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"))
}

fn simulate(a: SimulateArgs) -> Result<(), Error> {
    let mut exp = match &a.config {
        Some(path) => {
            if !a.snr_db.is_empty() {
                return Err(Error::Config("--snr-db only applies without a config file".into()));
            }
            load_experiment(path)?
        }
        None => {
            if a.snr_db.is_empty() {
                return Err(Error::Config("give a config file or --snr-db".into()));
            }
            let trials = a
                .trials
                .ok_or_else(|| Error::Config("--trials is required without a config file".into()))?;
            Experiment {
                runs: vec![RunConfig {
                    label: a.label.clone(),
                    scheme: a.scheme.build()?,
                    rate: a.rate,
                    snr_db: a.snr_db.clone(),
                    trials: TrialPlan::Fixed(trials),
                    seed: 1,
                    workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
                    target: 0,
                    exact_budget: DEFAULT_PATTERN_BUDGET,
                }],
                output_dir: None,
            }
        }
    };
    for r in &mut exp.runs {
        if let Some(t) = a.trials {
            r.trials = TrialPlan::Fixed(t);
        }
        if let Some(s) = a.seed {
            r.seed = s;
        }
        if let Some(w) = a.workers {
            r.workers = w as usize;
        }
        if let Some(b) = a.exact_budget {
            r.exact_budget = b;
        }
    }
    let out = a
        .out
        .clone()
        .or_else(|| match (&exp.output_dir, &a.config) {
            (Some(d), Some(cfg)) => Some(cfg.parent().unwrap_or(Path::new(".")).join(d)),
            _ => None,
        })
        .unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&out)?;

    let start = Instant::now();
    let mut curves: Vec<FerCurve> = Vec::new();
    let mut runs = Vec::new();
    for cfg in &exp.runs {
        let t0 = Instant::now();
        let curve = run_sweep(cfg)?;
        let runtime = t0.elapsed().as_secs_f64();
        let csv_name = format!("{}.csv", cfg.label);
        let json_name = format!("{}.json", cfg.label);
        write_curve_csv(&curve, fs::File::create(out.join(&csv_name))?)?;
        fs::write(out.join(&json_name), curve.to_json() + "\n")?;
        print_curve(&curve, cfg);
        runs.push(RunSummary {
            label: cfg.label.clone(),
            scheme: cfg.scheme.scheme.to_string(),
            field_order: cfg.scheme.code.field().q(),
            dmin: cfg.scheme.code.dmin(),
            slope: curve.slope,
            slope_source: curve.slope_source.clone(),
            runtime_seconds: runtime,
            csv: csv_name,
            curve: json_name,
        });
        curves.push(curve);
    }
    let comparison = if curves.len() > 1 {
        let cmp = compare_schemes(&curves)?;
        write_comparison_csv(&cmp, fs::File::create(out.join("comparison.csv"))?)?;
        Some("comparison.csv".to_string())
    } else {
        None
    };
    let summary = ExperimentSummary {
        runs,
        comparison,
        total_runtime_seconds: start.elapsed().as_secs_f64(),
    };
    fs::write(out.join("summary.json"), summary.to_json() + "\n")?;
    println!("wrote results to {}", out.display());
    Ok(())
}

fn print_curve(curve: &FerCurve, cfg: &RunConfig) {
    let s = &cfg.scheme;
    println!(
        "== {} ({}, M={}, k1={}, k2={}, {}, GF({}) d_min={})",
        curve.label,
        s.scheme,
        s.users,
        s.k1,
        s.k2,
        if s.reciprocal { "reciprocal" } else { "non-reciprocal" },
        s.code.field().q(),
        s.code.dmin().map_or("?".into(), |d| d.to_string()),
    );
    println!(
        "{:>8} {:>10} {:>9} {:>11} {:>23} {:>11} {:>11} {:>11}",
        "snr_db", "trials", "failures", "fer", "95% ci", "analytic", "exact", "frame_fer"
    );
    for p in &curve.points {
        println!(
            "{:>8} {:>10} {:>9} {:>11.4e} [{:>10.3e},{:>10.3e}] {:>11} {:>11} {:>11.4e}",
            p.snr_db,
            p.trials,
            p.failures,
            p.fer,
            p.ci_low,
            p.ci_high,
            fmt_opt(p.analytic),
            fmt_opt(p.exact),
            p.frame_failures as f64 / p.trials as f64,
        );
    }
    match (curve.slope, &curve.slope_source) {
        (Some(sl), Some(src)) => println!("diversity slope (top two points, {src}): {sl:.4}"),
        _ => println!("diversity slope: unavailable"),
    }
}

fn mindist(a: MindistArgs) -> Result<(), Error> {
    let code = match (&a.path, &a.golden) {
        (Some(p), _) => read_code(p)?,
        (None, Some(name)) => golden_code(name)?,
        (None, None) => unreachable!("clap requires one"),
    };
    let t0 = Instant::now();
    let cert = match a.method {
        Method::Auto => code.clone().certify(a.budget)?.certificate().cloned().expect("certified"),
        Method::Exhaustive => code.min_distance_exhaustive(a.budget)?,
        Method::Erasure => code.min_distance_erasure(a.budget)?,
    };
    let (k, n) = (code.k(), code.n());
    println!("k = {k}");
    println!("n = {n}");
    println!("q = {}", code.field().q());
    println!("dmin = {}", cert.dmin);
    println!("singleton bound = {}", singleton_bound(k, n));
    println!("mds = {}", cert.dmin == singleton_bound(k, n));
    println!("method = {:?}", cert.method);
    println!("witness info = {:?}", cert.witness);
    println!("witness codeword = {:?}", code.encode(&cert.witness));
    println!("elapsed = {:.3} s", t0.elapsed().as_secs_f64());
    Ok(())
}

fn design(a: DesignArgs) -> Result<(), Error> {
    let field = Arc::new(Field::of_order(a.q)?);
    let strategy = match a.strategy {
        Strategy::Cauchy => DesignStrategy::Cauchy,
        Strategy::Random => DesignStrategy::RandomSearch {
            seed: a.seed,
            max_tries: a.max_tries,
        },
    };
    let code = design_systematic_code(field, a.k, a.n, strategy, a.floor, a.budget)?;
    let cert = code.certificate().expect("designs are certified");
    let text = code.to_text();
    match &a.out {
        Some(path) => {
            fs::write(path, &text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    let bound = singleton_bound(a.k, a.n);
    eprintln!(
        "dmin = {} ({:?}), singleton bound = {bound}, mds = {}",
        cert.dmin,
        cert.method,
        cert.dmin == bound
    );
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Result<(), Error> {
    let cfg = a.scheme.build()?;
    let (pe, links) = match (a.pe, a.snr_db) {
        (Some(pe), _) => {
            if !(0.0..=1.0).contains(&pe) {
                return Err(Error::Config(format!("--pe must lie in [0, 1], got {pe}")));
            }
            (pe, LinkModel::uniform(pe))
        }
        (None, Some(db)) => {
            let ch = ChannelParams::from_db(db, a.rate)?;
            (ch.pe(), LinkModel::from_channel(&ch))
        }
        (None, None) => unreachable!("clap requires one"),
    };
    let formula = analytic_formula(cfg.scheme, cfg.users, cfg.k1, cfg.k2, cfg.reciprocal);
    let analytic = formula.as_ref().ok().map(|f| f.eval(pe));
    let exact = exact_outage(&cfg, a.target, links, a.budget)?;

    println!(
        "scheme = {} (M={}, k1={}, k2={}, {})",
        cfg.scheme,
        cfg.users,
        cfg.k1,
        cfg.k2,
        if cfg.reciprocal { "reciprocal" } else { "non-reciprocal" }
    );
    println!("code = GF({}) {}/{}, dmin = {:?}", cfg.code.field().q(), cfg.code.k(), cfg.code.n(), cfg.code.dmin());
    println!("pe = {pe:e}");
    match &formula {
        Ok(f) => println!("analytic = {:e}  ({} * pe^{}, {})", analytic.unwrap(), f.coefficient, f.exponent, f.note),
        Err(e) => println!("analytic = -  ({e})"),
    }
    println!("exact = {exact:e}");
    match analytic {
        Some(an) if an > 0.0 => println!("ratio exact/analytic = {:.6}", exact / an),
        _ => println!("ratio exact/analytic = -"),
    }
    if pe > 0.0 && pe < 1.0 {
        let lo = LinkModel {
            inter_user_pe: links.inter_user_pe / 10.0,
            g: threshold_for_pe(-(-links.g).exp_m1() / 10.0),
        };
        let exact_lo = exact_outage(&cfg, a.target, lo, a.budget)?;
        if exact > 0.0 && exact_lo > 0.0 {
            println!(
                "exact slope (pe .. pe/10) = {:.4}",
                pe_slope(pe, exact, pe / 10.0, exact_lo)
            );
        }
    }
    let predicted = match &formula {
        Ok(f) => f.exponent as usize,
        Err(_) => cfg.users + cfg.k2,
    };
    println!("predicted diversity = {predicted}");
    println!("diversity bound k2*M+1 = {}", gdnc_diversity_bound(cfg.users, cfg.k2));
    Ok(())
}

fn compare(a: CompareArgs) -> Result<(), Error> {
    let curves = a
        .curves
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<FerCurve>(&text)
                .map_err(|e| Error::Config(format!("{}: not a curve file: {e}", p.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cmp = compare_schemes(&curves)?;
    match &a.out {
        Some(path) => write_comparison_csv(&cmp, fs::File::create(path)?)?,
        None => write_comparison_csv(&cmp, std::io::stdout().lock())?,
    }
    Ok(())
}
