//! `ortho2` — classify second order partial difference operators in two
//! variables, synthesize orthogonality weights, build the classical discrete
//! families, and verify everything by exact arithmetic.
//!
//! Exit codes: 0 when every requested verdict passes, 1 when a mathematical
//! verdict fails, 2 on usage or I/O errors. Rationals cross the command line
//! and all file formats as exact strings such as `-3/7`; floats are never
//! read or written.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ortho2_core::admissible::classify_admissible;
use ortho2_core::families::FamilySpec;
use ortho2_core::lattice::LatticeSet;
use ortho2_core::operator::DifferenceOperator;
use ortho2_core::pearson::synthesize_weight;
use ortho2_core::report::{full_report_with_weight, ReportOptions, ReportSource};
use ortho2_core::scalar::{format_rat, parse_rat, Rat};
use ortho2_core::verify::{gram_matrix, gram_to_csv};
use ortho2_core::weight::WeightFunction;

#[derive(Parser)]
#[command(
    name = "ortho2",
    version,
    about = "Exact classification and verification of second order partial difference equations with orthogonal polynomial solutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct FamilyParams {
    /// Triangle Hahn parameters, e.g. `--sigma 1,2,3` (exact rationals).
    #[arg(long)]
    sigma: Option<String>,
    /// Success probabilities, e.g. `--p 1/4,1/4` or `--p 1/3`.
    #[arg(long)]
    p: Option<String>,
    /// Negative-binomial shape parameters, e.g. `--beta 1,2` or `--beta 1`.
    #[arg(long)]
    beta: Option<String>,
    /// Negative-binomial ratios in (0, 1), e.g. `--c 1/2,1/3`.
    #[arg(long)]
    c: Option<String>,
    /// Poisson-type rates, e.g. `--a 1,2` or `--a 1`.
    #[arg(long)]
    a: Option<String>,
    /// Truncation parameters, e.g. `--N 5` or `--N 5,4`.
    #[arg(long = "N")]
    n: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an operator: admissibility, template data, eigenvalues.
    Classify {
        /// Operator JSON (inline or a file path).
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize (or, for a family, evaluate) the orthogonality weight and
    /// dump it as CSV rows `x1,x2,num,den`.
    Weight {
        /// Operator JSON (inline or a file path).
        #[arg(long)]
        operator: Option<String>,
        /// Lattice JSON (inline or a file path), required with --operator.
        #[arg(long)]
        lattice: Option<String>,
        /// Family name instead of an operator (see `family --help`).
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        params: FamilyParams,
        /// Window cap for infinite lattice sets.
        #[arg(long, default_value_t = 80)]
        cap: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build one of the eight classical families: hahn2d, kraw2d, meixner2,
    /// meixner-kraw, meixner-charlier, kraw2, kraw-charlier, charlier2.
    Family {
        name: String,
        #[command(flatten)]
        params: FamilyParams,
        /// Run the full verification pipeline.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 4)]
        degrees: u32,
        #[arg(long, default_value_t = 80)]
        cap: u32,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        /// Primary output format: `json` (report) or `csv` (Gram matrix).
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the Gram matrix CSV here.
        #[arg(long)]
        gram_out: Option<PathBuf>,
    },
    /// Re-run the weight-dependent verdicts with an explicitly tabulated
    /// weight (as dumped by `weight`).
    Verify {
        #[arg(long)]
        operator: String,
        #[arg(long)]
        lattice: String,
        /// Weight CSV path.
        #[arg(long)]
        weight: PathBuf,
        #[arg(long, default_value_t = 4)]
        degrees: u32,
        #[arg(long, default_value_t = 80)]
        cap: u32,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full classification pipeline for an operator or a family.
    Report {
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        params: FamilyParams,
        #[arg(long, default_value_t = 4)]
        degrees: u32,
        #[arg(long, default_value_t = 80)]
        cap: u32,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Inline JSON is accepted anywhere a file path is; anything starting with
/// `{` is treated as inline.
fn read_spec(arg: &str) -> Result<String> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        Ok(trimmed.to_string())
    } else {
        fs::read_to_string(trimmed).with_context(|| format!("reading {trimmed}"))
    }
}

fn load_operator(arg: &str) -> Result<DifferenceOperator> {
    let text = read_spec(arg)?;
    serde_json::from_str(&text).context("parsing operator JSON")
}

fn load_lattice(arg: &str) -> Result<LatticeSet> {
    let text = read_spec(arg)?;
    serde_json::from_str(&text).context("parsing lattice JSON")
}

fn parse_rat_list(name: &str, value: &Option<String>, want: usize) -> Result<Vec<Rat>> {
    let raw = value
        .as_deref()
        .ok_or_else(|| anyhow!("missing --{name} (expected {want} value(s))"))?;
    let items: Vec<Rat> = raw
        .split(',')
        .map(|s| parse_rat(s).map_err(|e| anyhow!("--{name}: {e}")))
        .collect::<Result<_>>()?;
    if items.len() != want {
        bail!("--{name} expects {want} comma-separated value(s), got {}", items.len());
    }
    Ok(items)
}

fn parse_int_list(name: &str, value: &Option<String>, want: usize) -> Result<Vec<u32>> {
    let raw = value
        .as_deref()
        .ok_or_else(|| anyhow!("missing --{name} (expected {want} value(s))"))?;
    let items: Vec<u32> = raw
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|e| anyhow!("--{name}: {e}")))
        .collect::<Result<_>>()?;
    if items.len() != want {
        bail!("--{name} expects {want} comma-separated value(s), got {}", items.len());
    }
    Ok(items)
}

fn build_family(name: &str, args: &FamilyParams) -> Result<FamilySpec> {
    let spec = match name {
        "hahn2d" => {
            let s = parse_rat_list("sigma", &args.sigma, 3)?;
            let n = parse_int_list("N", &args.n, 1)?;
            FamilySpec::Hahn2D {
                sigma: [s[0].clone(), s[1].clone(), s[2].clone()],
                n: n[0],
            }
        }
        "kraw2d" => {
            let p = parse_rat_list("p", &args.p, 2)?;
            let n = parse_int_list("N", &args.n, 1)?;
            FamilySpec::Krawtchouk2D {
                p1: p[0].clone(),
                p2: p[1].clone(),
                n: n[0],
            }
        }
        "meixner2" => {
            let beta = parse_rat_list("beta", &args.beta, 2)?;
            let c = parse_rat_list("c", &args.c, 2)?;
            FamilySpec::MeixnerMeixner {
                beta1: beta[0].clone(),
                c1: c[0].clone(),
                beta2: beta[1].clone(),
                c2: c[1].clone(),
            }
        }
        "meixner-kraw" => {
            let beta = parse_rat_list("beta", &args.beta, 1)?;
            let c = parse_rat_list("c", &args.c, 1)?;
            let p = parse_rat_list("p", &args.p, 1)?;
            let n = parse_int_list("N", &args.n, 1)?;
            FamilySpec::MeixnerKrawtchouk {
                beta: beta[0].clone(),
                c: c[0].clone(),
                p: p[0].clone(),
                n: n[0],
            }
        }
        "meixner-charlier" => {
            let beta = parse_rat_list("beta", &args.beta, 1)?;
            let c = parse_rat_list("c", &args.c, 1)?;
            let a = parse_rat_list("a", &args.a, 1)?;
            FamilySpec::MeixnerCharlier {
                beta: beta[0].clone(),
                c: c[0].clone(),
                a: a[0].clone(),
            }
        }
        "kraw2" => {
            let p = parse_rat_list("p", &args.p, 2)?;
            let n = parse_int_list("N", &args.n, 2)?;
            FamilySpec::KrawtchoukKrawtchouk {
                p1: p[0].clone(),
                n1: n[0],
                p2: p[1].clone(),
                n2: n[1],
            }
        }
        "kraw-charlier" => {
            let p = parse_rat_list("p", &args.p, 1)?;
            let n = parse_int_list("N", &args.n, 1)?;
            let a = parse_rat_list("a", &args.a, 1)?;
            FamilySpec::KrawtchoukCharlier {
                p: p[0].clone(),
                n: n[0],
                a: a[0].clone(),
            }
        }
        "charlier2" => {
            let a = parse_rat_list("a", &args.a, 2)?;
            FamilySpec::CharlierCharlier {
                a1: a[0].clone(),
                a2: a[1].clone(),
            }
        }
        other => bail!(
            "unknown family {other:?}; expected one of {}",
            FamilySpec::CLI_NAMES.join(", ")
        ),
    };
    spec.validate().map_err(|e| anyhow!("{e}"))?;
    Ok(spec)
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).with_context(|| format!("writing {path:?}")),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn options(nmax: u32, degrees: u32, cap: u32) -> ReportOptions {
    ReportOptions {
        nmax,
        degrees,
        cap,
        ..ReportOptions::default()
    }
}

/// Returns the process exit code: 0 all-pass, 1 verdict failure.
fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify { operator, nmax, out } => {
            let op = load_operator(&operator)?;
            let (json, ok) = match classify_admissible(&op, nmax) {
                Ok(params) => {
                    let lambda: Vec<String> =
                        params.eigenvalues().iter().map(format_rat).collect();
                    (
                        serde_json::json!({
                            "admissible": true,
                            "reason": serde_json::Value::Null,
                            "a": format_rat(&params.a),
                            "b": format_rat(&params.b),
                            "lambda": lambda,
                            "nmax": nmax,
                        }),
                        true,
                    )
                }
                Err(rejection) => (
                    serde_json::json!({
                        "admissible": false,
                        "reason": rejection.code(),
                        "detail": rejection.to_string(),
                        "lambda": [],
                        "nmax": nmax,
                    }),
                    false,
                ),
            };
            write_out(&out, &serde_json::to_string_pretty(&json)?)?;
            Ok(if ok { 0 } else { 1 })
        }

        Command::Weight {
            operator,
            lattice,
            family,
            params,
            cap,
            out,
        } => {
            let weight: WeightFunction = match (&operator, &family) {
                (Some(op_arg), None) => {
                    let op = load_operator(op_arg)?;
                    let v = load_lattice(
                        lattice
                            .as_deref()
                            .ok_or_else(|| anyhow!("--operator requires --lattice"))?,
                    )?;
                    match synthesize_weight(&op, &v) {
                        Ok(w) => w,
                        Err(e) => {
                            eprintln!("weight synthesis failed: {e}");
                            return Ok(1);
                        }
                    }
                }
                (None, Some(name)) => build_family(name, &params)?.weight(),
                _ => bail!("exactly one of --operator or --family is required"),
            };
            let csv = weight.to_csv(cap).map_err(|e| anyhow!("{e}"))?;
            write_out(&out, &csv)?;
            Ok(0)
        }

        Command::Family {
            name,
            params,
            verify,
            degrees,
            cap,
            nmax,
            format,
            out,
            gram_out,
        } => {
            let spec = build_family(&name, &params)?;
            let opts = options(nmax, degrees, cap);
            if !verify && format == "json" && gram_out.is_none() {
                let lambda: Vec<String> =
                    (0..=degrees).map(|k| format_rat(&spec.eigenvalue(k))).collect();
                let json = serde_json::json!({
                    "family": spec.cli_name(),
                    "lattice": spec.lattice(),
                    "operator": spec.operator(),
                    "lambda": lambda,
                    "degrees": degrees,
                });
                write_out(&out, &serde_json::to_string_pretty(&json)?)?;
                return Ok(0);
            }
            let report = ortho2_core::report::full_report(
                &ReportSource::Family(spec.clone()),
                &opts,
            );
            let gram_csv = family_gram_csv(&spec, degrees, cap)?;
            if let Some(path) = &gram_out {
                fs::write(path, &gram_csv).with_context(|| format!("writing {path:?}"))?;
            }
            match format.as_str() {
                "csv" => write_out(&out, &gram_csv)?,
                "json" => write_out(&out, &report.to_json())?,
                other => bail!("unknown format {other:?} (expected json or csv)"),
            }
            Ok(if report.pass { 0 } else { 1 })
        }

        Command::Verify {
            operator,
            lattice,
            weight,
            degrees,
            cap,
            nmax,
            out,
        } => {
            let op = load_operator(&operator)?;
            let v = load_lattice(&lattice)?;
            let text = fs::read_to_string(&weight)
                .with_context(|| format!("reading {weight:?}"))?;
            let w = WeightFunction::from_csv(v.clone(), &text).map_err(|e| anyhow!("{e}"))?;
            let report =
                full_report_with_weight(&op, &v, Some(&w), None, &options(nmax, degrees, cap));
            write_out(&out, &report.to_json())?;
            Ok(if report.pass { 0 } else { 1 })
        }

        Command::Report {
            operator,
            lattice,
            family,
            params,
            degrees,
            cap,
            nmax,
            out,
        } => {
            let source = match (&operator, &family) {
                (Some(op_arg), None) => ReportSource::Operator {
                    op: load_operator(op_arg)?,
                    lattice: load_lattice(
                        lattice
                            .as_deref()
                            .ok_or_else(|| anyhow!("--operator requires --lattice"))?,
                    )?,
                },
                (None, Some(name)) => ReportSource::Family(build_family(name, &params)?),
                _ => bail!("exactly one of --operator or --family is required"),
            };
            let report = ortho2_core::report::full_report(&source, &options(nmax, degrees, cap));
            write_out(&out, &report.to_json())?;
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

/// Gram matrix CSV of a family basis through `degrees`.
fn family_gram_csv(spec: &FamilySpec, degrees: u32, cap: u32) -> Result<String> {
    let max = spec.max_degree().map_or(degrees, |m| m.min(degrees));
    let mut basis = Vec::new();
    for level in spec.basis_through(max).map_err(|e| anyhow!("{e}"))? {
        for member in level.members {
            basis.push(member.poly);
        }
    }
    let gram = gram_matrix(&basis, &spec.weight(), cap).map_err(|e| anyhow!("{e}"))?;
    Ok(gram_to_csv(&gram))
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ORTHO2_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => ortho2_core::par::configure_threads(n),
            _ => {
                eprintln!("ORTHO2_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
