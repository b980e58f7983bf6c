use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use ramsey_core::canon::to_canonical_string;
use ramsey_core::cert::{self, parse_mode, CertError, CheckOutcome, RunConfig, Stage};

const EXIT_BUDGET: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Verify and transfer structural Ramsey witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Largest hom-set that may be enumerated.
    #[arg(long, global = true, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(1..))]
    cap_hom: u64,
    /// Search node budget of the arrow verifier.
    #[arg(long, global = true, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    cap_nodes: u64,
    /// Largest number of colorings an exhaustive search may visit.
    #[arg(long, global = true, default_value_t = 1 << 32, value_parser = clap::value_parser!(u64).range(1..))]
    cap_colorings: u64,
    #[arg(long, global = true, default_value = "backtrack", value_parser = ["exhaustive", "backtrack"])]
    mode: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the arrow search; more than one makes the
    /// reported coloring nondeterministic.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Write the report or certificate here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            cap_hom: self.cap_hom as usize,
            cap_nodes: self.cap_nodes,
            cap_colorings: self.cap_colorings,
            mode: parse_mode(&self.mode).expect("restricted by clap"),
            seed: self.seed,
            jobs: self.jobs as usize,
            ..RunConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide C → (B)^A_k by searching for a bad coloring.
    Verify {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        #[arg(short, long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=16))]
        k: u32,
    },
    /// Run one construction and write its certificate.
    Transfer(TransferArgs),
    /// Replay every claim of a certificate.
    Check { certificate: PathBuf },
}

#[derive(Args)]
struct TransferArgs {
    #[arg(value_parser = parse_stage)]
    stage: Stage,
    /// JSON object holding all inputs; the flags below override its keys.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    a: Option<PathBuf>,
    #[arg(long)]
    b: Option<PathBuf>,
    #[arg(long)]
    c: Option<PathBuf>,
    /// Hypergraph for `phi`.
    #[arg(long)]
    h: Option<PathBuf>,
    /// Embedding for `lift`.
    #[arg(long)]
    f: Option<PathBuf>,
    /// Parameter word for `phi`, e.g. "x1 0 x2".
    #[arg(long)]
    u: Option<String>,
    /// Apex structure for `closure`, once per relation symbol.
    #[arg(long)]
    apex: Vec<PathBuf>,
    /// JSON array of {a, b, c} for `product`.
    #[arg(long)]
    factors: Option<PathBuf>,
    #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..=16))]
    k: Option<u32>,
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    Stage::parse(s)
        .filter(|&st| st != Stage::Verify)
        .ok_or_else(|| {
            let names: Vec<&str> = Stage::ALL
                .iter()
                .filter(|&&st| st != Stage::Verify)
                .map(|st| st.name())
                .collect();
            format!("unknown stage `{s}`; expected one of {}", names.join(", "))
        })
}

#[derive(Debug)]
enum Failure {
    Io(PathBuf, io::Error),
    Json(PathBuf, serde_json::Error),
    Cert(CertError),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(..) | Failure::Json(..) => EXIT_INPUT,
            Failure::Cert(e) if e.is_budget() => EXIT_BUDGET,
            Failure::Cert(CertError::Malformed(_) | CertError::Format(_)) => EXIT_INPUT,
            Failure::Cert(_) => 1,
        }
    }

    fn report(&self) -> Value {
        let (kind, message) = match self {
            Failure::Io(p, e) => ("io", format!("{}: {e}", p.display())),
            Failure::Json(p, e) => ("parse", format!("{}: {e}", p.display())),
            Failure::Cert(e) => {
                let kind = match self.exit_code() {
                    EXIT_BUDGET => "budget",
                    EXIT_INPUT => "input",
                    _ => "construction",
                };
                (kind, e.to_string())
            }
        };
        json!({"error": {"kind": kind, "message": message}})
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        Failure::Cert(e)
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Json(path.to_path_buf(), e))
}

fn emit(out: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let mut text = to_canonical_string(value);
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn cmd_verify(run: &RunArgs, a: &Path, b: &Path, c: &Path, k: u32) -> Result<u8, Failure> {
    let input = json!({"a": read_json(a)?, "b": read_json(b)?, "c": read_json(c)?, "k": k});
    let report = cert::build(Stage::Verify, &input, &run.config())?;
    emit(run.out.as_deref(), &report)?;
    Ok(match report["construction"]["verdict"].as_str() {
        Some("witnessed") => 0,
        Some("refuted") => 1,
        _ => EXIT_BUDGET,
    })
}

fn transfer_input(args: &TransferArgs) -> Result<Value, Failure> {
    let mut input = match &args.input {
        Some(path) => match read_json(path)? {
            Value::Object(m) => m,
            _ => return Err(CertError::Malformed("--input must hold a JSON object".into()).into()),
        },
        None => Map::new(),
    };
    for (key, path) in [
        ("a", &args.a),
        ("b", &args.b),
        ("c", &args.c),
        ("h", &args.h),
        ("f", &args.f),
        ("factors", &args.factors),
    ] {
        if let Some(path) = path {
            input.insert(key.into(), read_json(path)?);
        }
    }
    if !args.apex.is_empty() {
        let apex = args
            .apex
            .iter()
            .map(|p| read_json(p))
            .collect::<Result<Vec<_>, _>>()?;
        input.insert("apex".into(), Value::Array(apex));
    }
    if let Some(u) = &args.u {
        input.insert("u".into(), Value::from(u.as_str()));
    }
    if let Some(k) = args.k {
        input.insert("k".into(), Value::from(k));
    }
    Ok(Value::Object(input))
}

fn cmd_transfer(run: &RunArgs, args: &TransferArgs) -> Result<u8, Failure> {
    let input = transfer_input(args)?;
    let certificate = cert::build(args.stage, &input, &run.config())?;
    emit(run.out.as_deref(), &certificate)?;
    Ok(if certificate["verification"] == "budget-exceeded" {
        EXIT_BUDGET
    } else {
        0
    })
}

fn cmd_check(run: &RunArgs, path: &Path) -> Result<u8, Failure> {
    let certificate = read_json(path)?;
    let outcome = cert::check(&certificate)?;
    let report = match &outcome {
        CheckOutcome::Replayed => json!({"result": "replayed"}),
        CheckOutcome::Failed { claim, detail } => {
            json!({"result": "failed", "claim": claim, "detail": detail})
        }
        CheckOutcome::Unreplayable(reason) => json!({"result": "unreplayable", "detail": reason}),
    };
    emit(run.out.as_deref(), &report)?;
    Ok(outcome.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify { a, b, c, k } => cmd_verify(&cli.run, a, b, c, *k),
        Command::Transfer(args) => cmd_transfer(&cli.run, args),
        Command::Check { certificate } => cmd_check(&cli.run, certificate),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("{}", to_canonical_string(&failure.report()));
            ExitCode::from(failure.exit_code())
        }
    }
}
