//! qfe: exact quadratic-form certificates.
//!
//! Exit codes: 0 success/verified, 1 mathematical mismatch or precondition
//! failure, 2 usage/parse error.

mod catalog;
mod cert;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qfe_core::json as qjson;

#[derive(Parser)]
#[command(name = "qfe", version, about = "Exact arithmetic certificates for rational quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the certificate JSON to this path in addition to stdout.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Catalog file (defaults to $QFE_CATALOG or ./qfe_catalog.jsonl).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct HeightOpt {
    /// Height bound for witness searches (decoration only; verdicts are exact).
    #[arg(long, default_value_t = 200)]
    height_bound: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant profile, signatures, admissibility and isotropy of forms.
    Analyze {
        /// One or more form files; processed sequentially.
        files: Vec<PathBuf>,
    },
    /// Local and global isotropy with an optional witness.
    Isotropy {
        file: PathBuf,
        /// Extra places to report, comma-separated (e.g. "2,3,inf").
        #[arg(long, value_delimiter = ',')]
        places: Vec<String>,
        #[command(flatten)]
        height: HeightOpt,
    },
    /// Does the form represent the rational number q?
    Represents {
        file: PathBuf,
        q: String,
        #[command(flatten)]
        height: HeightOpt,
    },
    /// Equivalence over Q via rank, signature, discriminant and Hasse data.
    Equiv { file_a: PathBuf, file_b: PathBuf },
    /// Extend an admissible form of signature (n,1) to one of (n+1,1).
    Extend {
        file: PathBuf,
        /// Force a specific extension coefficient q (validated).
        #[arg(long)]
        q: Option<String>,
    },
    /// Smallest non-represented square-free integer of the requested sign.
    Missing {
        file: PathBuf,
        /// "+" or "-".
        #[arg(long)]
        sign: String,
    },
    /// Lift an isometry of f to a determinant-one isometry of the extension.
    Lift {
        file: PathBuf,
        /// Matrix JSON (inline or @path).
        matrix: String,
        #[arg(long)]
        q: Option<String>,
    },
    /// Image of a Moebius element under the PSL(2,Q(i)) -> SO+(f) map.
    Psl2 {
        /// Moebius JSON {"a":...,"b":...,"c":...,"d":...} (inline or @path).
        element: String,
    },
    /// Scripted constructions: bianchi, sl3, gamma0, tau-cert, squares.
    Demo {
        name: String,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long = "P")]
        p_entry: Option<i64>,
        #[arg(long = "L")]
        l: Option<i64>,
        /// Gaussian prime as "re,im" for tau-cert.
        #[arg(long)]
        pi: Option<String>,
    },
    /// Catalog maintenance: add, query, link.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Recompute a certificate and compare the mathematical payload.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Canonicalize and store a form.
    Add { file: PathBuf },
    /// Return the stored class of a form.
    Query { file: PathBuf },
    /// Record the extension edge f -> extend_form(f).
    Link {
        file: PathBuf,
        #[arg(long)]
        q: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // parse/usage problems exit 2, mathematical failures exit 1
            if e.downcast_ref::<qfe_core::Error>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid JSON in {}", path.display()))
}

/// Inline JSON or @path indirection.
fn read_json_arg(arg: &str) -> anyhow::Result<Value> {
    if let Some(path) = arg.strip_prefix('@') {
        return read_json(Path::new(path));
    }
    serde_json::from_str(arg).context("invalid inline JSON")
}

fn emit(cli: &Cli, certificate: &Value) -> anyhow::Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(certificate)?;
    // tolerate a closed stdout (e.g. piping into `head`)
    if let Err(e) = writeln!(std::io::stdout(), "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if let Some(path) = &cli.json_out {
        std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn run_pure(cli: &Cli, command: &str, inputs: Value) -> anyhow::Result<Value> {
    let payload = cert::compute_payload(command, &inputs)?;
    let certificate = cert::build_certificate(command, inputs, payload);
    emit(cli, &certificate)?;
    Ok(certificate)
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Analyze { files } => {
            if files.is_empty() {
                anyhow::bail!("analyze needs at least one form file");
            }
            for file in files {
                let form = read_json(file)?;
                // parse eagerly so bad files fail before any output
                qjson::form_from_json(&form)?;
                run_pure(cli, "analyze", json!({"form": form}))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Isotropy { file, places, height } => {
            let form = read_json(file)?;
            qjson::form_from_json(&form)?;
            run_pure(
                cli,
                "isotropy",
                json!({
                    "form": form,
                    "places": places,
                    "height_bound": height.height_bound,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Represents { file, q, height } => {
            let form = read_json(file)?;
            qjson::form_from_json(&form)?;
            run_pure(
                cli,
                "represents",
                json!({"form": form, "q": q, "height_bound": height.height_bound}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { file_a, file_b } => {
            let a = read_json(file_a)?;
            let b = read_json(file_b)?;
            let certificate =
                run_pure(cli, "equiv", json!({"form_a": a, "form_b": b}))?;
            let equivalent = certificate["verdicts"]["equivalent"]
                .as_bool()
                .ok_or_else(|| anyhow!("internal: missing verdict"))?;
            Ok(if equivalent {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Extend { file, q } => {
            let form = read_json(file)?;
            run_pure(cli, "extend", json!({"form": form, "q": q}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Missing { file, sign } => {
            let form = read_json(file)?;
            run_pure(cli, "missing", json!({"form": form, "sign": sign}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift { file, matrix, q } => {
            let form = read_json(file)?;
            let matrix = read_json_arg(matrix)?;
            run_pure(cli, "lift", json!({"form": form, "matrix": matrix, "q": q}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Psl2 { element } => {
            let m = read_json_arg(element)?;
            run_pure(cli, "psl2", json!({"moebius": m}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo { name, n, p_entry, l, pi } => {
            let command = format!("demo:{name}");
            let known = ["bianchi", "sl3", "gamma0", "tau-cert", "squares"];
            if !known.contains(&name.as_str()) {
                anyhow::bail!("unknown demo {name:?}; expected one of {known:?}");
            }
            let mut inputs = serde_json::Map::new();
            if let Some(n) = n {
                inputs.insert("n".into(), json!(n));
            }
            if let Some(p) = p_entry {
                inputs.insert("P".into(), json!(p));
            }
            if let Some(l) = l {
                inputs.insert("L".into(), json!(l));
            }
            if let Some(pi) = pi {
                let parts: Vec<i64> = pi
                    .split(',')
                    .map(|s| s.trim().parse::<i64>())
                    .collect::<Result<_, _>>()
                    .context("pi must be \"re,im\"")?;
                if parts.len() != 2 {
                    anyhow::bail!("pi must be \"re,im\"");
                }
                inputs.insert("pi".into(), json!(parts));
            }
            run_pure(cli, &command, Value::Object(inputs))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog { action } => {
            let cat = catalog::Catalog::open(catalog::catalog_path(cli.catalog.as_deref()));
            match action {
                CatalogAction::Add { file } => {
                    let form = qjson::form_from_json(&read_json(file)?)?;
                    let entry = cat.add(&form)?;
                    emit(cli, &json!({"stored": entry}))?;
                }
                CatalogAction::Query { file } => {
                    let form = qjson::form_from_json(&read_json(file)?)?;
                    let (key, matches) = cat.query(&form)?;
                    emit(cli, &json!({"key": key, "matches": matches}))?;
                }
                CatalogAction::Link { file, q } => {
                    let form = qjson::form_from_json(&read_json(file)?)?;
                    let forced = q
                        .as_ref()
                        .map(|s| qfe_core::rational::parse_rational(s))
                        .transpose()?;
                    let ext = qfe_core::extend::extend_form(&form, forced.as_ref())?;
                    let q_json = qjson::field_element_to_json(&ext.q);
                    let entry = cat.link(&form, &ext.g, &q_json)?;
                    emit(cli, &json!({"stored": entry}))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file } => {
            let certificate = read_json(file)?;
            let mismatches = cert::verify_certificate(&certificate)?;
            if mismatches.is_empty() {
                println!("verified: all recomputed verdicts match");
                Ok(ExitCode::SUCCESS)
            } else {
                for m in &mismatches {
                    eprintln!("mismatch: {m}");
                }
                Ok(ExitCode::from(1))
            }
        }
    }
}
