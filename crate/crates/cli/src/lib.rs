//! Command-line front end: instance files in, JSON reports out.

pub mod instance;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use hasse_mw::arith;
use hasse_mw::groups::GroupError;
use hasse_mw::localglobal::{self, LocalGlobalError, Status, Verdict};
use hasse_mw::qforms::{self, DiagonalForm, FormError, Place};
use serde::Serialize;
use serde_json::{json, Value};

use instance::{InstanceFile, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSOLVABLE: i32 = 3;
pub const EXIT_UNCERTIFIED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hasse-mw", version, about = "Local-global principle for quadratic forms on Mordell-Weil type groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Add wall-clock timing to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Local profile, global decision and isotropic vector of a diagonal form.
    Qform {
        #[arg(long, num_args = 2..=3, allow_negative_numbers = true, required = true)]
        coeffs: Vec<i64>,
    },
    /// Exact global decision for an instance with 2 or 3 points.
    Decide { instance: PathBuf },
    /// Local solvability at every good place in a range, against the global decision.
    Scan {
        instance: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
        #[arg(long, default_value_t = 2)]
        pmin: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Local solutions of 2 x_1^2 + x_2^2 + ... + x_n^2 at one place or a range.
    Counterexample {
        instance: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with_all = ["pmax", "pmin"])]
        prime: Option<u64>,
        #[arg(long)]
        pmax: Option<u64>,
        #[arg(long, default_value_t = 2)]
        pmin: u64,
    },
    /// Frequency probes for the two standing assumptions.
    Probe {
        instance: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        assumption: u8,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        pattern: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
    },
    /// A decomposition n = a^2 + b^2 + c^2.
    ThreeSquares { n: u64 },
    /// Hilbert symbols (a, b)_v.
    Hilbert {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        /// A prime or "inf"; all relevant places when absent.
        #[arg(long)]
        place: Option<String>,
    },
}

#[derive(Serialize)]
struct ReportFile {
    schema_version: u32,
    command: CommandEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<InstanceFile>,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Value>,
}

/// The invocation, minus flags that cannot change the results.
#[derive(Serialize)]
struct CommandEcho {
    name: &'static str,
    args: BTreeMap<&'static str, Value>,
}

/// Errors meaning the library contradicted itself, as opposed to bad input.
fn is_inconsistency(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(e.downcast_ref::<LocalGlobalError>(), Some(LocalGlobalError::Inconsistent(_)))
            || matches!(e.downcast_ref::<GroupError>(), Some(GroupError::Inconsistent(_)))
            || matches!(e.downcast_ref::<FormError>(), Some(FormError::Inconsistent(_)))
    })
}

pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    if is_inconsistency(err) {
        EXIT_VIOLATION
    } else {
        EXIT_USAGE
    }
}

fn parse_place(text: &str) -> Result<Place> {
    match text.trim() {
        "inf" | "infinity" => Ok(Place::Infinite),
        p => {
            let p: u64 = p.parse().map_err(|_| anyhow!("place must be a prime or \"inf\", got {p:?}"))?;
            if !arith::is_prime(p) {
                bail!("{p} is not prime");
            }
            Ok(Place::Finite(p))
        }
    }
}

fn load(path: &PathBuf) -> Result<(InstanceFile, localglobal::Instance)> {
    let file = InstanceFile::read(path)?;
    let instance = file.to_instance()?;
    Ok((InstanceFile::from_instance(&instance), instance))
}

/// Runs a command; returns the exit code. Errors map through [`exit_code_for`].
pub fn run(cli: Cli) -> Result<i32> {
    let start = Instant::now();
    let mut args: BTreeMap<&'static str, Value> = BTreeMap::new();
    let mut echoed_instance = None;
    let (name, results, code) = match &cli.command {
        Command::Qform { coeffs } => {
            args.insert("coeffs", json!(coeffs));
            let form = DiagonalForm::new(coeffs.clone())?;
            let profile = qforms::local_profile(&form)?;
            let global = qforms::global_represents_zero(&form)?;
            let failing: Vec<Place> = profile.entries.iter().filter(|(_, ok)| !ok).map(|(v, _)| *v).collect();
            let results = json!({
                "form": form,
                "relevant_places": qforms::relevant_places(&form),
                "local_profile": profile.entries,
                "global": global,
                "witness": qforms::find_isotropic_vector(&form)?,
                "failing_places": failing,
            });
            ("qform", results, EXIT_OK)
        }
        Command::Decide { instance } => {
            args.insert("instance", json!(instance));
            let (file, inst) = load(instance)?;
            let decision = localglobal::global_decide(&inst)?;
            let code = match decision.status {
                Status::Solvable { .. } => EXIT_OK,
                Status::Unsolvable { .. } => EXIT_UNSOLVABLE,
                Status::IndependentUncertified => EXIT_UNCERTIFIED,
            };
            echoed_instance = Some(file);
            ("decide", serde_json::to_value(&decision)?, code)
        }
        Command::Scan { instance, pmax, pmin, jobs } => {
            args.insert("instance", json!(instance));
            args.insert("pmax", json!(pmax));
            args.insert("pmin", json!(pmin));
            let (file, inst) = load(instance)?;
            let report = localglobal::scan_with_jobs(&inst, *pmax, *pmin, *jobs)?;
            let code = match report.verdict {
                Verdict::Consistent => EXIT_OK,
                Verdict::Violation { .. } => EXIT_VIOLATION,
                Verdict::NotAsserted => EXIT_UNCERTIFIED,
            };
            let mut value = serde_json::to_value(&report)?;
            // the canonical instance file is echoed at top level instead
            value.as_object_mut().expect("report is an object").remove("instance");
            echoed_instance = Some(file);
            ("scan", value, code)
        }
        Command::Counterexample { instance, n, prime, pmax, pmin } => {
            args.insert("instance", json!(instance));
            args.insert("n", json!(n));
            let (file, inst) = load(instance)?;
            if inst.rank() != 1 {
                bail!("counterexample needs a single-point instance, got {} points", inst.rank());
            }
            if *n < 4 {
                bail!("n must be at least 4, got {n}");
            }
            let point = &inst.points()[0];
            let places = match (prime, pmax) {
                (Some(p), _) => {
                    args.insert("prime", json!(p));
                    vec![*p]
                }
                (None, Some(pmax)) => {
                    args.insert("pmax", json!(pmax));
                    args.insert("pmin", json!(pmin));
                    inst.context().good_places(*pmin, *pmax)
                }
                (None, None) => bail!("give --prime or --pmax"),
            };
            let found = places
                .iter()
                .map(|&p| localglobal::counterexample_rank_n(point, p, *n))
                .collect::<Result<Vec<_>, _>>()?;
            let box_check = localglobal::positive_definite_check(point, *n, 10)?;
            let verified = found.iter().filter(|c| c.verified).count();
            let code = if verified == found.len() && box_check.confirmed { EXIT_OK } else { EXIT_VIOLATION };
            echoed_instance = Some(file);
            let results = json!({
                "n": n,
                "places": found.len(),
                "verified": verified,
                "counterexamples": found,
                "positive_definite_check": box_check,
            });
            ("counterexample", results, code)
        }
        Command::Probe { instance, assumption, l, pattern, pmax } => {
            args.insert("instance", json!(instance));
            args.insert("assumption", json!(assumption));
            args.insert("pmax", json!(pmax));
            let (file, inst) = load(instance)?;
            let results = if *assumption == 1 {
                let l = l.ok_or_else(|| anyhow!("assumption 1 needs --l"))?;
                args.insert("l", json!(l));
                args.insert("pattern", json!(pattern));
                serde_json::to_value(localglobal::probe_assumption1(inst.points(), l, pattern, *pmax)?)?
            } else {
                json!({
                    "p_max": pmax,
                    "failing_places": localglobal::probe_assumption2(inst.context(), *pmax)?,
                })
            };
            echoed_instance = Some(file);
            ("probe", results, EXIT_OK)
        }
        Command::ThreeSquares { n } => {
            args.insert("n", json!(n));
            let squares = arith::three_squares(*n).map(|(a, b, c)| vec![a, b, c]);
            ("three-squares", json!({ "n": n, "squares": squares }), EXIT_OK)
        }
        Command::Hilbert { a, b, place } => {
            args.insert("a", json!(a));
            args.insert("b", json!(b));
            let places = match place {
                Some(text) => {
                    args.insert("place", json!(text));
                    vec![parse_place(text)?]
                }
                None => qforms::relevant_places(&DiagonalForm::new(vec![*a, *b])?),
            };
            let symbols = places
                .iter()
                .map(|&v| Ok((v, qforms::hilbert_symbol(*a, *b, v)?)))
                .collect::<Result<Vec<(Place, i8)>, FormError>>()?;
            let product: i8 = symbols.iter().map(|(_, s)| s).product();
            ("hilbert", json!({ "a": a, "b": b, "symbols": symbols, "product": product }), EXIT_OK)
        }
    };
    let report = ReportFile {
        schema_version: SCHEMA_VERSION,
        command: CommandEcho { name, args },
        instance: echoed_instance,
        results,
        timing: cli.timing.then(|| json!({ "elapsed_ms": start.elapsed().as_millis() as u64 })),
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(code)
}
