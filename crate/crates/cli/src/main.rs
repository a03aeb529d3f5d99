//! `freechaos`: partitions, moments, contraction tables and fourth-moment
//! experiments from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 capacity or budget exceeded,
//! 3 oracle mismatch, 4 precondition violation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use freechaos::algebra::moment_via_products;
use freechaos::limits::{
    contraction_criteria, generate_indicator_family, run_fmt_experiment, ExperimentConfig,
};
use freechaos::moments::{diagram_moment_by_class, DEFAULT_BUDGET};
use freechaos::partitions::{catalan, connects, enumerate, enumerate_respecting, respects};
use freechaos::{BlockStructure, Error, Kernel, PartitionClass, C64};
use serde_json::json;

/// Default relative tolerance of `moment --oracle both`.
const ORACLE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    version,
    about = "Free Poisson chaos: partitions, moments and fourth-moment experiments"
)]
struct Cli {
    /// Cap on sparse entries visited per partition integral
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Relative oracle tolerance for `moment`; final-gap threshold for `fmt-experiment`
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format (default: json, except csv for `contractions`)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout; report prefix for `fmt-experiment`
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true, env = "FREECHAOS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Diagram,
    Product,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) partitions of a class
    Partitions {
        /// Ground set size; defaults to the total of --structure
        #[arg(long)]
        n: Option<usize>,
        /// all, p2, ge2, ge2plus, nc, nc2, nc-ge2, nc-ge2plus
        #[arg(long, default_value = "nc")]
        class: String,
        /// Block structure such as 2,2,1; keeps only respecting partitions
        #[arg(long, value_delimiter = ',')]
        structure: Option<Vec<usize>>,
        /// With --structure, keep only connecting partitions
        #[arg(long)]
        connected: bool,
        /// Print every partition, 1-based
        #[arg(long)]
        list: bool,
    },
    /// Moment of the product of the multiple integrals of the given kernels
    Moment {
        #[arg(required = true)]
        kernels: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "diagram")]
        oracle: Oracle,
    },
    /// Contraction-norm table of a mirror-symmetric kernel
    Contractions { kernel: PathBuf },
    /// Run a fourth-moment experiment and write CSV and JSON reports
    FmtExperiment { config: PathBuf },
    /// Quick consistency checks of the installation
    Selfcheck,
}

#[derive(Debug)]
struct OracleMismatch(String);

impl std::fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for OracleMismatch {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<OracleMismatch>().is_some() {
        return 3;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Capacity { .. } | Error::Budget { .. }) => 2,
        Some(Error::Precondition(_)) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring thread pool")?;
    }
    let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
    match &cli.command {
        Command::Partitions {
            n,
            class,
            structure,
            connected,
            list,
        } => {
            let text = cmd_partitions(
                *n,
                class,
                structure.as_deref(),
                *connected,
                *list,
                cli.format,
            )?;
            emit(&cli.out, &text)
        }
        Command::Moment { kernels, oracle } => {
            let (text, mismatch) = cmd_moment(
                kernels,
                *oracle,
                budget,
                cli.tol.unwrap_or(ORACLE_TOL),
                cli.format,
            )?;
            emit(&cli.out, &text)?;
            match mismatch {
                Some(msg) => Err(OracleMismatch(msg).into()),
                None => Ok(()),
            }
        }
        Command::Contractions { kernel } => {
            let text = cmd_contractions(kernel, cli.format)?;
            emit(&cli.out, &text)
        }
        Command::FmtExperiment { config } => {
            cmd_fmt_experiment(config, budget, cli.budget.is_some(), cli.tol, &cli.out)
        }
        Command::Selfcheck => cmd_selfcheck(),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    Error::Argument(msg.into()).into()
}

fn cmd_partitions(
    n: Option<usize>,
    class: &str,
    structure: Option<&[usize]>,
    connected: bool,
    list: bool,
    format: Option<Format>,
) -> anyhow::Result<String> {
    let class = PartitionClass::from_short_name(class)
        .ok_or_else(|| input_error(format!("unknown class '{class}'")))?;
    let structure = structure
        .map(|s| BlockStructure::new(s.to_vec()))
        .transpose()?;
    let n = match (n, &structure) {
        (Some(n), Some(s)) if n != s.total() => {
            return Err(input_error(format!(
                "--n {n} does not match structure total {}",
                s.total()
            )))
        }
        (Some(n), _) => n,
        (None, Some(s)) => s.total(),
        (None, None) => return Err(input_error("--n or --structure is required")),
    };
    if connected && structure.is_none() {
        return Err(input_error("--connected needs --structure"));
    }

    let parts = match &structure {
        None => enumerate(n, class)?,
        Some(s) if class.is_noncrossing() => enumerate_respecting(s, class, connected)?,
        Some(s) => {
            let mut keep = Vec::new();
            for p in enumerate(n, class)? {
                if respects(&p, s)? && (!connected || connects(&p, s)?) {
                    keep.push(p);
                }
            }
            keep
        }
    };

    let mut out = String::new();
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "n": n,
                "class": class.short_name(),
                "structure": structure.as_ref().map(|s| s.orders().to_vec()),
                "connected": connected,
                "count": parts.len(),
            });
            if list {
                v["partitions"] = serde_json::to_value(&parts)?;
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv if list => {
            writeln!(out, "index,blocks,partition")?;
            for (i, p) in parts.iter().enumerate() {
                writeln!(out, "{},{},\"{p}\"", i + 1, p.len())?;
            }
        }
        Format::Csv => {
            writeln!(out, "n,class,count")?;
            writeln!(out, "{n},{},{}", class.short_name(), parts.len())?;
        }
    }
    Ok(out)
}

fn load_kernels(paths: &[PathBuf]) -> anyhow::Result<Vec<Kernel>> {
    paths
        .iter()
        .map(|p| Kernel::load(p).with_context(|| format!("reading kernel {}", p.display())))
        .collect()
}

/// Returns the formatted output and, for `both`, a message if the oracles
/// disagree beyond `tol · (1 + |value|)`.
fn cmd_moment(
    paths: &[PathBuf],
    oracle: Oracle,
    budget: u64,
    tol: f64,
    format: Option<Format>,
) -> anyhow::Result<(String, Option<String>)> {
    let ks = load_kernels(paths)?;
    let word: Vec<usize> = ks.iter().map(Kernel::arity).collect();
    let diagram = match oracle {
        Oracle::Product => None,
        _ => Some(diagram_moment_by_class(&ks, budget)?),
    };
    let product = match oracle {
        Oracle::Diagram => None,
        _ => Some(moment_via_products(&ks)?),
    };
    let value: C64 = diagram
        .as_ref()
        .map(|d| d.value)
        .or(product)
        .expect("one oracle ran");
    let difference = match (&diagram, product) {
        (Some(d), Some(p)) => Some((d.value - p).norm()),
        _ => None,
    };
    let mismatch = difference
        .filter(|&d| d > tol * (1.0 + value.norm()))
        .map(|d| format!("diagram and product oracles differ by {d:e} (value {value})"));

    let oracle_name = match oracle {
        Oracle::Diagram => "diagram",
        Oracle::Product => "product",
        Oracle::Both => "both",
    };
    let mut out = String::new();
    match format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "word": word,
                "oracle": oracle_name,
                "value": value.re,
                "value_im": value.im,
            });
            if let Some(d) = &diagram {
                v["by_class"] = json!({
                    "pairings": d.pairings.re,
                    "big_blocks": d.big_blocks.re,
                    "partitions": d.partitions,
                });
            }
            if let (Some(p), Some(diff)) = (product, difference) {
                v["product"] = json!(p.re);
                v["product_im"] = json!(p.im);
                v["difference"] = json!(diff);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "word,oracle,value,value_im,pairings,big_blocks,product,difference"
            )?;
            let word_s = word
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(
                out,
                "{word_s},{oracle_name},{},{},{},{},{},{}",
                value.re,
                value.im,
                opt(diagram.as_ref().map(|d| d.pairings.re)),
                opt(diagram.as_ref().map(|d| d.big_blocks.re)),
                opt(product.filter(|_| diagram.is_some()).map(|p| p.re)),
                opt(difference),
            )?;
        }
    }
    Ok((out, mismatch))
}

fn cmd_contractions(path: &Path, format: Option<Format>) -> anyhow::Result<String> {
    let f = Kernel::load(path).with_context(|| format!("reading kernel {}", path.display()))?;
    let table = contraction_criteria(&f)?;
    let mut out = String::new();
    match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            writeln!(out, "integrated,identified,norm")?;
            for c in &table {
                writeln!(out, "{},{},{}", c.integrated, c.identified, c.norm)?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&table)?)?,
    }
    Ok(out)
}

fn cmd_fmt_experiment(
    path: &Path,
    budget: u64,
    budget_given: bool,
    tol: Option<f64>,
    out: &Option<PathBuf>,
) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(Error::from)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut cfg = ExperimentConfig::<f64>::from_json(&text)
        .with_context(|| format!("config {}", path.display()))?;
    if budget_given {
        cfg.budget = budget;
    }
    if let Some(t) = tol {
        cfg.final_gap = t;
    }
    let report = run_fmt_experiment(&cfg)?;

    let prefix = match out {
        Some(p) => p.clone(),
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fmt");
            PathBuf::from(format!("{stem}_report"))
        }
    };
    let csv_path = prefix.with_extension("csv");
    let json_path = prefix.with_extension("json");
    std::fs::write(&csv_path, report.to_csv()?)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    std::fs::write(&json_path, report.to_json() + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;

    let yes = |b: bool| if b { "yes" } else { "no" };
    let v = &report.verdict;
    println!("k values: {:?}", cfg.k_values);
    println!(
        "covariance gaps decreasing: {}",
        yes(v.covariance_decreasing)
    );
    println!(
        "fourth-moment gaps decreasing: {}",
        yes(v.fourth_moment_decreasing)
    );
    println!(
        "mixed-moment gaps decreasing: {}",
        yes(v.mixed_moment_decreasing)
    );
    println!(
        "contraction norms decreasing: {}",
        yes(v.contractions_decreasing)
    );
    println!(
        "max gap at last k: {} (threshold {})",
        v.final_max_gap, v.final_gap_threshold
    );
    println!("verdict: {}", if v.pass { "pass" } else { "fail" });
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn cmd_selfcheck() -> anyhow::Result<()> {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        println!("{}: {name}", if ok { "ok" } else { "FAIL" });
        if !ok {
            failures.push(name.to_string());
        }
    };

    let counts_ok = (1..=8).all(|n| {
        enumerate(n, PartitionClass::NoncrossingAll)
            .map(|p| p.len() as u128)
            .ok()
            == Some(catalan(n as u32))
    });
    check("non-crossing counts are Catalan numbers", counts_ok);

    let f: Kernel = generate_indicator_family(4)?;
    let word = vec![f.clone(); 4];
    let d = diagram_moment_by_class(&word, DEFAULT_BUDGET)?.value;
    check(
        "indicator fourth moment is 2 + 1/k",
        (d.re - 2.25).abs() < 1e-12,
    );
    let p = moment_via_products(&word)?;
    check(
        "diagram formula agrees with product rule",
        (d - p).norm() < 1e-12,
    );

    let g = f.tensor_product(&f)?;
    let mixed = vec![g.clone(), f.clone(), g, f];
    let d = diagram_moment_by_class(&mixed, DEFAULT_BUDGET)?.value;
    let p = moment_via_products(&mixed)?;
    check(
        "oracles agree on a mixed-order word",
        (d - p).norm() <= 1e-10 * (1.0 + d.norm()),
    );

    if failures.is_empty() {
        Ok(())
    } else {
        Err(OracleMismatch(format!("selfcheck failed: {}", failures.join(", "))).into())
    }
}
