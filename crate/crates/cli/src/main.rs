//! `koszul-lab`: generate models, compute Betti tables, extract pencils and
//! run verification suites.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 random retries
//! exhausted, 3 usage or validation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use koszul_lab::field::{Field, FieldSpec};
use koszul_lab::graded::Representation;
use koszul_lab::koszul::{betti_table, BettiTable};
use koszul_lab::models::{
    default_variant, gen_canonical, gen_k3_g6, load_model, save_model, CanonicalModel, Variant,
};
use koszul_lab::pencils::{all_split_divisors, annihilator, enumerate_pencils};
use koszul_lab::verify::{run_suite, with_field_escalation, Suite, SuiteOptions, SuiteReport};
use koszul_lab::Error;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_RETRIES: u8 = 2;
const EXIT_USAGE: u8 = 3;

const THREADS_VAR: &str = "KOSZUL_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "koszul-lab",
    version,
    about = "Koszul cohomology of canonical curves and K3 surfaces over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random model and write it to a file.
    Gen {
        #[arg(long)]
        genus: u32,
        /// ci, grass, sextic or k3; defaults to the standard construction
        /// for the genus.
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        p: u32,
        /// Extension degree; by default the smallest one that works.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Betti table of a model file.
    Betti {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 2)]
        qmax: i64,
        /// Largest p; defaults to the number of variables minus 2.
        #[arg(long)]
        pmax: Option<i64>,
        #[arg(long, value_enum, default_value_t = Rep::Presentation)]
        rep: Rep,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Pencils, split divisors and special subspaces of a sextic-built
    /// genus-6 model.
    Pencils {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        divisors: usize,
        /// Seed for the divisor parameters; defaults to the model's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite.
    Verify {
        /// green, geometric, restriction, cross-model or all
        suite: String,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        genus: u32,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long, default_value_t = 4)]
        divisors: usize,
        /// Run below the characteristic bound, recording observations only.
        #[arg(long)]
        force: bool,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Render a saved report or Betti table.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rep {
    Presentation,
    Evaluation,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_retryable() {
            EXIT_RETRIES
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn check_prime(p: u32) -> Result<(), Failure> {
    Field::prime(p)
        .map(|_| ())
        .map_err(|e| usage(e.to_string()))
}

fn load(path: &Path) -> Result<CanonicalModel, Failure> {
    load_model(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn verdict_code(reports: &[SuiteReport]) -> u8 {
    if reports.iter().any(|r| r.passed() == Some(false)) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

fn cmd_gen(
    genus: u32,
    variant: Option<String>,
    p: u32,
    m: Option<u32>,
    seed: u64,
    out: PathBuf,
) -> Result<(String, u8), Failure> {
    check_prime(p)?;
    if p < 5 {
        return Err(usage(format!("models need p >= 5, got {p}")));
    }
    let k3 = variant.as_deref() == Some("k3");
    let variant = match variant.as_deref() {
        None => default_variant(genus),
        Some("k3") => {
            if genus != 6 {
                return Err(usage("the K3 model exists only for genus 6"));
            }
            Variant::Grass
        }
        Some(v) => v.parse().map_err(|e: Error| usage(e.to_string()))?,
    };
    let build = |field: &Field| {
        if k3 {
            gen_k3_g6(field, seed)
        } else {
            gen_canonical(genus, variant, field, seed)
        }
    };
    let (model, notes) = match m {
        Some(m) => {
            let field = Field::new(FieldSpec::extension(p, m)?)?;
            (build(&field)?, Vec::new())
        }
        None => {
            let (model, _, notes) = with_field_escalation(p, build)?;
            (model, notes)
        }
    };
    for n in notes {
        eprintln!("note: {n}");
    }
    save_model(&out, &model)?;
    Ok((
        format!(
            "{} over {} (seed {}, {} attempt(s)) written to {}\n",
            model.construction(),
            model.field().spec(),
            seed,
            model.meta().attempts,
            out.display()
        ),
        EXIT_PASS,
    ))
}

fn cmd_betti(
    path: PathBuf,
    qmax: i64,
    pmax: Option<i64>,
    rep: Rep,
    format: Format,
) -> Result<(String, u8), Failure> {
    if !(0..=koszul_lab::graded::MAX_DEGREE as i64 - 2).contains(&qmax) {
        return Err(usage(format!(
            "--qmax must lie in 0..={}",
            koszul_lab::graded::MAX_DEGREE - 2
        )));
    }
    let model = load(&path)?;
    let n = model.nvars() as i64;
    let pmax = pmax.unwrap_or(n - 2);
    if !(0..=n).contains(&pmax) {
        return Err(usage(format!("--pmax must lie in 0..={n}")));
    }
    let rep = match rep {
        Rep::Presentation => Representation::Presentation,
        Rep::Evaluation => Representation::Evaluation,
    };
    let ring = model.ring(rep)?;
    let mut table = betti_table(&ring, (0, pmax), (0, qmax))?;
    table.model = json!({
        "construction": model.construction(),
        "field": model.field().spec(),
        "seed": model.meta().seed,
        "representation": rep,
    });
    let text = match format {
        Format::Table => render_table(&table),
        Format::Json => pretty(&table.to_json()),
    };
    Ok((text, EXIT_PASS))
}

fn render_table(table: &BettiTable) -> String {
    let m = &table.model;
    let mut s = String::new();
    if let (Some(c), Some(f)) = (m.get("construction"), m.get("field")) {
        let field: Option<FieldSpec> = serde_json::from_value(f.clone()).ok();
        s += &format!(
            "{} over {}\n",
            c.as_str().unwrap_or("?"),
            field.map(|f| f.to_string()).unwrap_or_else(|| "?".into())
        );
    }
    s + &table.render()
}

fn cmd_pencils(path: PathBuf, divisors: usize, seed: Option<u64>) -> Result<(String, u8), Failure> {
    if divisors == 0 {
        return Err(usage("--divisors must be positive"));
    }
    let model = load(&path)?;
    let Some(sextic) = model.plane_model()? else {
        return Err(usage(format!(
            "{} has no plane sextic model; pencils need a sextic-built genus-6 model",
            model.construction()
        )));
    };
    let field = &sextic.field;
    let seed = seed.unwrap_or(model.meta().seed);
    let pencils = enumerate_pencils(&sextic)?;
    let divs = all_split_divisors(&sextic, &pencils, divisors, seed)?;
    let mut out = Vec::new();
    for (pencil, ds) in pencils.iter().zip(&divs) {
        let mut entries = Vec::new();
        for d in ds {
            let pts: Vec<_> = d.points.iter().map(|(x, _)| x.clone()).collect();
            let w = annihilator(&sextic, &pts)?;
            let mut e = d.to_json(field);
            e["special_subspace"] = json!({"dim": w.dim(), "basis": w.to_json()});
            entries.push(e);
        }
        let mut pj = pencil.to_json(field);
        pj["label"] = pencil.label().into();
        pj["divisors"] = entries.into();
        out.push(pj);
    }
    let v = json!({
        "field": field.spec(),
        "seed": seed,
        "pencils": out,
    });
    Ok((pretty(&v), EXIT_PASS))
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: String,
    p: u32,
    seed: u64,
    genus: u32,
    variant: Option<String>,
    divisors: usize,
    force: bool,
    timing: bool,
    format: Format,
) -> Result<(String, u8), Failure> {
    let mut suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&suite).ok_or_else(|| {
            usage(format!(
                "unknown suite {suite:?}; expected green, geometric, restriction, cross-model or all"
            ))
        })?]
    };
    suites.sort_by_key(|s| s.name());
    check_prime(p)?;
    let variant = variant
        .map(|v| v.parse::<Variant>())
        .transpose()
        .map_err(|e| usage(e.to_string()))?;
    let opts = SuiteOptions {
        genus,
        variant,
        divisors_per_pencil: divisors,
        force,
        timing,
    };
    let results: Vec<_> = suites
        .par_iter()
        .map(|s| run_suite(*s, p, seed, &opts))
        .collect();
    let mut reports = Vec::new();
    for r in results {
        reports.push(r?);
    }
    let code = verdict_code(&reports);
    let text = match format {
        Format::Json if reports.len() == 1 => pretty(&reports[0].to_json()),
        Format::Json => pretty(&Value::Array(
            reports.iter().map(SuiteReport::to_json).collect(),
        )),
        Format::Table => reports
            .iter()
            .map(SuiteReport::render)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    Ok((text, code))
}

fn cmd_report(input: PathBuf, format: Format) -> Result<(String, u8), Failure> {
    let text =
        std::fs::read_to_string(&input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: not JSON: {e}", input.display())))?;
    if v.get("rows").is_some() {
        let table = BettiTable::from_json(&v)?;
        let text = match format {
            Format::Table => render_table(&table),
            Format::Json => pretty(&table.to_json()),
        };
        return Ok((text, EXIT_PASS));
    }
    let items = match &v {
        Value::Array(a) => a.clone(),
        _ => vec![v.clone()],
    };
    let reports = items
        .iter()
        .map(SuiteReport::from_json)
        .collect::<Result<Vec<_>, _>>()?;
    let code = verdict_code(&reports);
    let text = match format {
        Format::Table => reports
            .iter()
            .map(SuiteReport::render)
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => pretty(&v),
    };
    Ok((text, code))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            usage(format!(
                "{THREADS_VAR} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Gen {
            genus,
            variant,
            p,
            m,
            seed,
            out,
        } => cmd_gen(genus, variant, p, m, seed, out),
        Command::Betti {
            model,
            qmax,
            pmax,
            rep,
            format,
        } => cmd_betti(model, qmax, pmax, rep, format),
        Command::Pencils {
            model,
            divisors,
            seed,
        } => cmd_pencils(model, divisors, seed),
        Command::Verify {
            suite,
            p,
            seed,
            genus,
            variant,
            divisors,
            force,
            timing,
            format,
        } => cmd_verify(
            suite, p, seed, genus, variant, divisors, force, timing, format,
        ),
        Command::Report { input, format } => cmd_report(input, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("koszul-lab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
