//! `klmix` — build, evaluate, and certify divergence-bounded finite mixture
//! approximations from the command line.

mod speclang;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use klmix::{
    convolve, direct_sequential, marginal_divergence, sym_kl_numeric, ChiSquared, DirectConfig,
    FiniteMixture, GridFile, MixedOn, NormalScaleFamily, QuadratureSettings, Role, StudentT,
};
use speclang::{parse_distribution, parse_family, FamilySpec};

const AFTER_HELP: &str = "\
Distribution specs: normal(mu,sigma), chisq(nu), t(nu), logistic(loc,scale),
skewnormal(xi,omega,alpha).
Family specs (grid files): normal-scale(nu), normal-location(sigma),
shift(<distribution>).

Exit codes: 0 success (certify: grid passed), 1 certification failed,
2 input or parse error, 3 numeric failure.";

#[derive(Parser)]
#[command(
    name = "klmix",
    version,
    about = "Finite mixture approximations with a certified divergence ceiling",
    after_help = AFTER_HELP
)]
struct Cli {
    /// RNG seed for commands that sample. Accepted everywhere for
    /// reproducibility; the built-in commands are currently deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tessellate a chi-squared-mixed normal scale family (Student-t marginal)
    #[command(name = "student-t")]
    StudentT(StudentTArgs),
    /// Approximate the distribution of a sum of two independent variables
    Convolve(ConvolveArgs),
    /// Evaluate pdf, cdf, or quantiles of the mixture a grid file encodes
    Eval(EvalArgs),
    /// Rescan a grid file's bins and check the divergence ceiling
    Certify(CertifyArgs),
}

#[derive(Args)]
struct StudentTArgs {
    /// Degrees of freedom of the chi-squared mixing distribution
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    nu: f64,
    /// Ceiling on the within-bin symmetrized divergence
    #[arg(long, allow_negative_numbers = true)]
    delta: f64,
    /// Latent tail probability the construction may ignore
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    epsilon: f64,
    /// First reference point (default: the epsilon/2 mixing quantile)
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    /// Write the grid file here (default: grid JSON to stdout, summary to stderr)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary format (default: human-readable text)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ConvolveArgs {
    /// First summand, e.g. 'skewnormal(0,1,4)'
    #[arg(long)]
    x: String,
    /// Second summand, e.g. 'logistic(0,1)'
    #[arg(long)]
    y: String,
    /// Ceiling on the within-bin symmetrized divergence
    #[arg(long, allow_negative_numbers = true)]
    delta: f64,
    /// Latent tail probability the construction may ignore
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    epsilon: f64,
    /// Which summand to tessellate (auto: the narrower central range)
    #[arg(long, value_enum, default_value_t = MixOnArg::Auto)]
    mix_on: MixOnArg,
    /// Write the grid file here (default: grid JSON to stdout, summary to stderr)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary format (default: human-readable text)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct EvalArgs {
    /// Grid file produced by student-t or convolve
    #[arg(long)]
    grid: PathBuf,
    /// Function to evaluate
    #[arg(long, value_enum)]
    what: What,
    /// Comma-separated evaluation points; quantile levels must lie in (0,1)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    at: Vec<f64>,
    /// Write the table here (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct CertifyArgs {
    /// Grid file to rescan
    #[arg(long)]
    grid: PathBuf,
    /// Conditional family spec (default: the grid file's family field)
    #[arg(long)]
    family: Option<String>,
    /// Divergence ceiling (default: the grid file's delta field)
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Latent points scanned per bin
    #[arg(long, default_value_t = 8)]
    points_per_bin: usize,
    /// Write the per-bin table here (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MixOnArg {
    Auto,
    X,
    Y,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Pdf,
    Cdf,
    Quantile,
}

/// Input problems exit with 2, numeric failures with 3.
enum CliError {
    Parse(String),
    Numeric(String),
}

impl From<klmix::Error> for CliError {
    fn from(e: klmix::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::StudentT(args) => cmd_student_t(args),
        Command::Convolve(args) => cmd_convolve(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Certify(args) => cmd_certify(args),
    }
}

fn cmd_student_t(args: StudentTArgs) -> Result<ExitCode, CliError> {
    let parse = |e: klmix::Error| CliError::Parse(format!("--nu: {e}"));
    let family = NormalScaleFamily::new(args.nu).map_err(parse)?;
    let mixing = ChiSquared::new(args.nu).map_err(parse)?;
    let truth = StudentT::new(args.nu).map_err(parse)?;

    let config = build_config(args.delta, args.epsilon, args.start)?;
    let grid = direct_sequential(&family, &mixing, &config)?;
    let mixture = FiniteMixture::from_grid(&grid, &family, true)?;
    let achieved = sym_kl_numeric(&truth, &mixture, &QuadratureSettings::default())?;

    let spec = FamilySpec::NormalScale { nu: args.nu };
    let file = GridFile::from_grid(&grid, spec.to_string(), args.delta, args.epsilon, true);
    let summary = vec![
        ("k", json!(grid.k())),
        ("dropped_tail", json!(grid.dropped_tail())),
        ("achieved_sym_kl", json!(achieved)),
        ("family", json!(file.family)),
    ];
    emit_grid(&file, args.out.as_deref(), args.format, summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_convolve(args: ConvolveArgs) -> Result<ExitCode, CliError> {
    let spec_x =
        parse_distribution(&args.x).map_err(|m| CliError::Parse(format!("--x: {m}")))?;
    let spec_y =
        parse_distribution(&args.y).map_err(|m| CliError::Parse(format!("--y: {m}")))?;
    let dist_x = spec_x.build().map_err(|m| CliError::Parse(format!("--x: {m}")))?;
    let dist_y = spec_y.build().map_err(|m| CliError::Parse(format!("--y: {m}")))?;

    let role = match args.mix_on {
        MixOnArg::Auto => Role::Auto,
        MixOnArg::X => Role::MixOnFirst,
        MixOnArg::Y => Role::MixOnSecond,
    };
    let config = build_config(args.delta, args.epsilon, None)?;
    let conv = convolve(dist_x, dist_y, role, &config)?;

    let (mixed_on, latent_spec, shifted_spec) = match conv.mixed_on() {
        MixedOn::First => ("x", &spec_x, &spec_y),
        MixedOn::Second => ("y", &spec_y, &spec_x),
    };
    let family = FamilySpec::Shift(shifted_spec.clone());
    let grid = conv.grid();
    let file = GridFile::from_grid(grid, family.to_string(), args.delta, args.epsilon, true);
    let summary = vec![
        ("k", json!(grid.k())),
        ("mixed_on", json!(mixed_on)),
        ("latent", json!(latent_spec.to_string())),
        ("family", json!(file.family)),
        ("dropped_tail", json!(grid.dropped_tail())),
    ];
    emit_grid(&file, args.out.as_deref(), args.format, summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, CliError> {
    let file = read_grid(&args.grid)?;
    let grid = file
        .to_grid()
        .map_err(|e| CliError::Parse(format!("invalid grid file {}: {e}", args.grid.display())))?;
    let famspec = parse_family(&file.family)
        .map_err(|m| CliError::Parse(format!("grid family field: {m}")))?;
    let built = famspec.build().map_err(CliError::Parse)?;
    let mixture = built.mixture(&grid, file.renormalized)?;

    let mut rows = Vec::with_capacity(args.at.len());
    for &input in &args.at {
        let output = match args.what {
            What::Pdf => mixture.pdf(input),
            What::Cdf => mixture.cdf(input),
            What::Quantile => mixture.quantile(input)?,
        };
        rows.push((input, output));
    }

    let text = match args.format {
        Format::Csv => {
            let mut t = String::from("input,output\n");
            for (input, output) in &rows {
                t.push_str(&format!("{input},{output}\n"));
            }
            t
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(input, output)| json!({ "input": input, "output": output }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).expect("json"))
        }
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode, CliError> {
    let file = read_grid(&args.grid)?;
    let grid = file
        .to_grid()
        .map_err(|e| CliError::Parse(format!("invalid grid file {}: {e}", args.grid.display())))?;
    let famspec = match &args.family {
        Some(src) => {
            parse_family(src).map_err(|m| CliError::Parse(format!("--family: {m}")))?
        }
        None => parse_family(&file.family)
            .map_err(|m| CliError::Parse(format!("grid family field: {m}")))?,
    };
    let built = famspec.build().map_err(CliError::Parse)?;
    let delta = args.delta.unwrap_or(file.delta);
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CliError::Parse(format!("--delta: must be positive, got {delta}")));
    }
    if args.points_per_bin < 2 {
        return Err(CliError::Parse(format!(
            "--points-per-bin: need at least 2, got {}",
            args.points_per_bin
        )));
    }

    let quad = QuadratureSettings::default();
    let cert = built.certify(&grid, delta, args.points_per_bin, &quad)?;
    let marginal = marginal_divergence(&cert, &grid)?;
    let verdict = if cert.passed { "PASS" } else { "FAIL" };

    let table = match args.format {
        Format::Csv => {
            let mut t = String::from("index,reference,max_divergence,argmax\n");
            for bin in &cert.bins {
                t.push_str(&format!(
                    "{},{},{},{}\n",
                    bin.index, bin.reference, bin.max_divergence, bin.argmax
                ));
            }
            t
        }
        Format::Json => {
            let bins: Vec<_> = cert
                .bins
                .iter()
                .map(|b| {
                    json!({
                        "index": b.index,
                        "reference": b.reference,
                        "max_divergence": b.max_divergence,
                        "argmax": b.argmax,
                    })
                })
                .collect();
            let payload = json!({
                "delta": delta,
                "passed": cert.passed,
                "max_divergence": cert.max_divergence,
                "marginal_bound": marginal,
                "bins": bins,
            });
            format!("{}\n", serde_json::to_string_pretty(&payload).expect("json"))
        }
    };
    write_output(args.out.as_deref(), &table)?;

    eprintln!("delta = {delta}");
    eprintln!("max_divergence = {}", cert.max_divergence);
    eprintln!("marginal_bound = {marginal}");
    // The verdict goes to stdout unless it is already part of a JSON payload
    // printed there.
    if args.out.is_some() || args.format != Format::Json {
        println!("{verdict}");
    }
    Ok(ExitCode::from(if cert.passed { 0 } else { 1 }))
}

fn build_config(delta: f64, epsilon: f64, start: Option<f64>) -> Result<DirectConfig, CliError> {
    let mut config = DirectConfig::new(delta);
    config.epsilon = epsilon;
    config.start = start;
    config
        .validate()
        .map_err(|e| CliError::Parse(format!("invalid construction parameters: {e}")))?;
    Ok(config)
}

fn read_grid(path: &Path) -> Result<GridFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("invalid grid file {}: {e}", path.display())))
}

/// Write the grid JSON to `out` (or stdout) and the summary to stdout (or
/// stderr, when the grid itself occupies stdout).
fn emit_grid(
    file: &GridFile,
    out: Option<&Path>,
    format: Option<Format>,
    summary: Vec<(&str, serde_json::Value)>,
) -> Result<(), CliError> {
    let payload = format!("{}\n", serde_json::to_string_pretty(file).expect("json"));
    let summary_text = render_summary(format, &summary);
    match out {
        Some(path) => {
            std::fs::write(path, payload).map_err(|e| {
                CliError::Numeric(format!("cannot write {}: {e}", path.display()))
            })?;
            print!("{summary_text}");
            if format.is_none() {
                println!("wrote = {}", path.display());
            }
        }
        None => {
            print!("{payload}");
            eprint!("{summary_text}");
        }
    }
    Ok(())
}

fn render_summary(format: Option<Format>, summary: &[(&str, serde_json::Value)]) -> String {
    match format {
        None => summary
            .iter()
            .map(|(key, value)| format!("{key} = {}\n", plain(value)))
            .collect(),
        Some(Format::Csv) => summary
            .iter()
            .map(|(key, value)| format!("{key},{}\n", plain(value)))
            .collect(),
        Some(Format::Json) => {
            let mut map = serde_json::Map::new();
            for (key, value) in summary {
                map.insert((*key).to_string(), value.clone());
            }
            format!("{}\n", serde_json::to_string_pretty(&map).expect("json"))
        }
    }
}

/// Render a JSON scalar without string quotes for text/CSV summaries.
fn plain(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Numeric(format!("cannot write to stdout: {e}")))
        }
    }
}
