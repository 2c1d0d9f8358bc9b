//! Command-line surface of the verification toolkit.
//!
//! Exit codes: 0 when every requested check passes, 1 when a verified
//! statement fails, 2 on usage, configuration, or resource errors.
//! Every command is deterministic given its arguments and `--seed`;
//! report floats are rounded to 12 significant digits before printing
//! so reruns are byte-identical.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cairncheck::cairn::{
    verify_cairn, verify_measure_independence, Cairn, CoordinateCairn, GradedCairn,
    ProductMeasureCairn,
};
use cairncheck::hilbert::check_independence_axioms;
use cairncheck::intervals::{parse_interval_literal, Chain};
use cairncheck::report::fmt_sig12;
use cairncheck::spectral::{kazhdan_eta, kesten_report, SparseOperator};
use cairncheck::splitting::{certify_regular_multiple, decompose, displacement_bound, SplitReport};
use cairncheck::{Config, Error};

#[derive(Parser)]
#[command(
    name = "cairncheck",
    version,
    about = "Interval calculus and Kazhdan-pair verification"
)]
struct Cli {
    /// Optional TOML config file; explicit flags win over its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format (commands with tabular output default to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of stdout. A relative path is
    /// resolved inside $CAIRNCHECK_OUT_DIR when that variable is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every randomized component.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Interval-system operations and the exhaustive law suite.
    Intervals {
        #[command(subcommand)]
        cmd: IntervalsCmd,
    },
    /// Interval-indexed subspace and measure models.
    Cairn {
        #[command(subcommand)]
        cmd: CairnCmd,
    },
    /// Level decomposition, regularity certificate, displacement bound.
    Split {
        #[command(subcommand)]
        cmd: SplitCmd,
    },
    /// Spectral tables and constants.
    Spectral {
        #[command(subcommand)]
        cmd: SpectralCmd,
    },
    /// Randomized independence-axiom suite for relative orthogonality.
    Axioms(AxiomsArgs),
}

#[derive(Subcommand)]
enum IntervalsCmd {
    /// Print the base interval I_n.
    Gen {
        #[arg(long)]
        n: usize,
    },
    /// Run the exhaustive interval-law suite up to max-n.
    Verify {
        #[arg(long = "max-n")]
        max_n: usize,
    },
    /// Enumerate the subintervals of I_n.
    Subs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        include_empty: bool,
    },
    /// Setwise stabilizers of I_0..I_max_n.
    Stab {
        #[arg(long = "max-n")]
        max_n: usize,
    },
    /// Intersect two interval literals (`In` or `w*In`).
    Intersect {
        #[arg(long)]
        i: String,
        #[arg(long)]
        j: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Graded,
    Coordinate,
    Measure,
}

#[derive(Subcommand)]
enum CairnCmd {
    /// Build a model and print its shape.
    Build(CairnArgs),
    /// Build a model and verify its laws.
    Verify(CairnArgs),
}

#[derive(Args)]
struct CairnArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    window: usize,
    /// Relation tolerance override for the Hilbert models.
    #[arg(long)]
    tol: Option<f64>,
    /// Fiber dimension of the coordinate model.
    #[arg(long, default_value_t = 1)]
    fiber_dim: usize,
}

#[derive(Subcommand)]
enum SplitCmd {
    /// Decompose the graded model into levels of reduced blocks.
    Run {
        #[arg(long)]
        window: usize,
    },
    /// Decompose and certify the block permutation structure.
    Certify {
        #[arg(long)]
        window: usize,
    },
    /// Spectral displacement bound at one radius.
    Displacement {
        #[arg(long)]
        radius: usize,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Top-eigenvalue table against the 2*sqrt(3) bound.
    Kesten {
        #[arg(long = "max-radius")]
        max_radius: usize,
    },
    /// The displacement constant and its companions.
    Eta,
    /// Edge list of the Cayley ball, one `u v` pair per line.
    Edges {
        #[arg(long)]
        radius: usize,
    },
}

#[derive(Args)]
struct AxiomsArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 12)]
    dim: usize,
    #[arg(long)]
    tol: Option<f64>,
}

/// Config-file schema: the run configuration plus output preferences.
#[derive(Default, Deserialize)]
#[serde(default)]
struct FileConfig {
    #[serde(flatten)]
    run: Config,
    format: Option<String>,
    out: Option<PathBuf>,
}

enum CliError {
    Core(Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            // a failed decomposition is a failed statement, not misuse
            CliError::Core(Error::Decomposition { .. }) => 1,
            _ => 2,
        }
    }
}

struct Output {
    format: Format,
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, body: String) -> Result<(), CliError> {
        match &self.out {
            None => {
                print!("{body}");
                Ok(())
            }
            Some(path) => {
                let resolved = resolve_out(path);
                if let Some(parent) = resolved.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(resolved, body)?;
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
        body.push('\n');
        self.emit(body)
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("CAIRNCHECK_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file: FileConfig = match &cli.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config file: {e}")))?
        }
    };
    let mut config = file.run;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;

    let format = cli.format.or_else(|| {
        file.format.as_deref().and_then(|f| match f {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            "text" => Some(Format::Text),
            _ => None,
        })
    });
    let out = Output {
        format: format.unwrap_or(Format::Json),
        out: cli.out.clone().or(file.out),
    };
    let explicit_format = format.is_some();

    match cli.command {
        Command::Intervals { cmd } => run_intervals(cmd, &config, &out),
        Command::Cairn { cmd } => run_cairn(cmd, &config, &out),
        Command::Split { cmd } => run_split(cmd, &config, &out, explicit_format),
        Command::Spectral { cmd } => run_spectral(cmd, &config, &out, explicit_format),
        Command::Axioms(args) => run_axioms(args, &config, &out),
    }
}

fn chain(config: &Config) -> Arc<Chain> {
    Arc::new(Chain::new(config.caps.interval_rank))
}

fn run_intervals(cmd: IntervalsCmd, config: &Config, out: &Output) -> Result<bool, CliError> {
    let chain = chain(config);
    match cmd {
        IntervalsCmd::Gen { n } => {
            let interval = chain.base(n)?;
            match out.format {
                Format::Text => {
                    out.emit(format!("{}: {:?}\n", interval.label(), interval.elements()))?
                }
                _ => out.json(&interval)?,
            }
            Ok(true)
        }
        IntervalsCmd::Verify { max_n } => {
            let report = chain.verify(max_n)?;
            match out.format {
                Format::Text => {
                    let mut body = String::new();
                    for st in &report.statements {
                        body.push_str(&format!(
                            "{} {}: {} instances\n",
                            if st.pass { "pass" } else { "FAIL" },
                            st.name,
                            st.total_instances()
                        ));
                    }
                    body.push_str(&format!(
                        "overall: {}\n",
                        if report.pass { "pass" } else { "FAIL" }
                    ));
                    out.emit(body)?;
                }
                _ => out.json(&report)?,
            }
            Ok(report.pass)
        }
        IntervalsCmd::Subs { n, include_empty } => {
            let subs = chain.subintervals(&chain.base(n)?, include_empty)?;
            out.json(&subs)?;
            Ok(true)
        }
        IntervalsCmd::Stab { max_n } => {
            #[derive(Serialize)]
            struct StabRow {
                n: usize,
                stabilizer: Vec<String>,
            }
            let mut rows = Vec::new();
            let mut all_trivial = true;
            for n in 0..=max_n {
                let stab = chain.stabilizer(n)?;
                all_trivial &= stab.len() == 1;
                rows.push(StabRow {
                    n,
                    stabilizer: stab.iter().map(|w| w.render()).collect(),
                });
            }
            out.json(&rows)?;
            Ok(all_trivial)
        }
        IntervalsCmd::Intersect { i, j } => {
            let left = parse_interval_literal(&chain, &i)?;
            let right = parse_interval_literal(&chain, &j)?;
            let meet = chain.intersect(&left, &right)?;
            out.json(&meet)?;
            Ok(true)
        }
    }
}

fn build_hilbert_model(args: &CairnArgs, config: &Config) -> Result<Cairn, Error> {
    let chain = Arc::new(Chain::new(config.caps.interval_rank));
    match args.model {
        Model::Graded => Ok(Cairn::Graded(GradedCairn::build(
            chain,
            args.window,
            None,
            config.seed,
            config.caps.ambient_dim,
        )?)),
        Model::Coordinate => Ok(Cairn::Coordinate(CoordinateCairn::build(
            chain,
            args.window,
            args.fiber_dim,
            config.caps.ambient_dim,
        )?)),
        Model::Measure => unreachable!("measure model handled separately"),
    }
}

fn run_cairn(cmd: CairnCmd, config: &Config, out: &Output) -> Result<bool, CliError> {
    #[derive(Serialize)]
    struct BuildSummary {
        model: &'static str,
        window_rank: usize,
        index_size: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        ambient_dim: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        coords: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        atoms: Option<usize>,
        seed: u64,
    }

    let (args, verify) = match cmd {
        CairnCmd::Build(a) => (a, false),
        CairnCmd::Verify(a) => (a, true),
    };

    if args.model == Model::Measure {
        let ch = chain(config);
        let model = ProductMeasureCairn::build(&ch, args.window, config.caps.measure_coords)?;
        if !verify {
            out.json(&BuildSummary {
                model: "measure",
                window_rank: model.window_rank(),
                index_size: model.index().len(),
                ambient_dim: None,
                coords: Some(model.coord_count()),
                atoms: Some(model.atom_count()),
                seed: config.seed,
            })?;
            return Ok(true);
        }
        let report = verify_measure_independence(&model, &ch)?;
        match out.format {
            Format::Text => out.emit(format!(
                "{} measure window {}: {} atom pairs, exact\n",
                if report.pass { "pass" } else { "FAIL" },
                report.window_rank,
                report.atom_pairs_checked
            ))?,
            _ => out.json(&report)?,
        }
        return Ok(report.pass);
    }

    let model = build_hilbert_model(&args, config)?;
    if !verify {
        out.json(&BuildSummary {
            model: model.model_name(),
            window_rank: model.window_rank(),
            index_size: model.index().len(),
            ambient_dim: Some(model.ambient_dim()),
            coords: None,
            atoms: None,
            seed: config.seed,
        })?;
        return Ok(true);
    }
    let tol = args.tol.unwrap_or(config.tolerances.relation);
    let report = verify_cairn(&model, tol)?;
    match out.format {
        Format::Text => out.emit(format!(
            "{} {} window {}: {} checks, worst residual {}\n",
            if report.pass { "pass" } else { "FAIL" },
            report.model,
            report.window_rank,
            report.checks.len(),
            fmt_sig12(report.worst_residual)
        ))?,
        _ => out.json(&report)?,
    }
    Ok(report.pass)
}

fn run_split(
    cmd: SplitCmd,
    config: &Config,
    out: &Output,
    explicit_format: bool,
) -> Result<bool, CliError> {
    match cmd {
        SplitCmd::Run { window } | SplitCmd::Certify { window } => {
            let want_certificate = matches!(cmd, SplitCmd::Certify { .. });
            let chain = chain(config);
            let cairn =
                GradedCairn::build(chain, window, None, config.seed, config.caps.ambient_dim)?;
            let decomposition = decompose(&cairn, config.tolerances.decomposition)?;
            let certificate = if want_certificate {
                Some(certify_regular_multiple(
                    &cairn,
                    &decomposition,
                    config.tolerances.decomposition,
                )?)
            } else {
                None
            };
            let report = SplitReport::from_decomposition(&decomposition, config.seed, certificate);
            let pass = report.pass;
            match out.format {
                Format::Csv => out.emit(report.to_csv())?,
                Format::Text => {
                    let dims: Vec<String> = report
                        .levels
                        .iter()
                        .map(|l| l.block_count.to_string())
                        .collect();
                    out.emit(format!(
                        "{} window {}: blocks per level ({}), completeness residual {}\n",
                        if pass { "pass" } else { "FAIL" },
                        report.window_rank,
                        dims.join(", "),
                        fmt_sig12(report.completeness_residual)
                    ))?;
                }
                Format::Json => out.json(&report)?,
            }
            Ok(pass)
        }
        SplitCmd::Displacement { radius } => {
            let report = displacement_bound(radius, config.caps.spectral_radius, config.seed)?;
            match out.format {
                Format::Text => out.emit(format!(
                    "{} radius {}: min_eig {} vs threshold {}\n",
                    if report.pass { "pass" } else { "FAIL" },
                    report.radius,
                    fmt_sig12(report.min_eig),
                    fmt_sig12(report.threshold)
                ))?,
                _ => out.json(&report)?,
            }
            let _ = explicit_format;
            Ok(report.pass)
        }
    }
}

fn run_spectral(
    cmd: SpectralCmd,
    config: &Config,
    out: &Output,
    explicit_format: bool,
) -> Result<bool, CliError> {
    match cmd {
        SpectralCmd::Kesten { max_radius } => {
            let rows = kesten_report(max_radius, config.caps.spectral_radius, config.seed)?;
            let increasing = rows.windows(2).all(|p| p[0].lambda_max < p[1].lambda_max);
            let pass = rows.iter().all(|r| r.gap > 0.0) && increasing;
            // tabular output: csv unless json was explicitly requested
            let format = if explicit_format {
                out.format
            } else {
                Format::Csv
            };
            match format {
                Format::Json => out.json(&rows)?,
                _ => {
                    let mut body = String::from("radius,dimension,lambda_max,gap\n");
                    for r in &rows {
                        body.push_str(&format!(
                            "{},{},{},{}\n",
                            r.radius,
                            r.dimension,
                            fmt_sig12(r.lambda_max),
                            fmt_sig12(r.gap)
                        ));
                    }
                    out.emit(body)?;
                }
            }
            Ok(pass)
        }
        SpectralCmd::Eta => {
            let constants = kazhdan_eta();
            match out.format {
                Format::Text => out.emit(format!(
                    "eta {} eta_squared {} kesten_norm {}\n",
                    fmt_sig12(constants.eta),
                    fmt_sig12(constants.eta_squared),
                    fmt_sig12(constants.kesten_norm)
                ))?,
                _ => out.json(&constants)?,
            }
            Ok(true)
        }
        SpectralCmd::Edges { radius } => {
            let op = SparseOperator::cayley(radius, config.caps.spectral_radius)?;
            let mut buf = Vec::new();
            op.write_edge_list(&mut buf)?;
            out.emit(String::from_utf8(buf).expect("edge list is ascii"))?;
            Ok(true)
        }
    }
}

fn run_axioms(args: AxiomsArgs, config: &Config, out: &Output) -> Result<bool, CliError> {
    let tol = args.tol.unwrap_or(config.tolerances.decomposition);
    let report = check_independence_axioms(args.trials, args.dim, config.seed, tol);
    match out.format {
        Format::Text => {
            let mut body = String::new();
            for axiom in &report.axioms {
                body.push_str(&format!(
                    "{} {}: {} checked, {} violations\n",
                    if axiom.violations == 0 {
                        "pass"
                    } else {
                        "FAIL"
                    },
                    axiom.name,
                    axiom.checked,
                    axiom.violations
                ));
            }
            out.emit(body)?;
        }
        _ => out.json(&report)?,
    }
    Ok(report.pass)
}
