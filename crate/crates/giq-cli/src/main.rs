//! giq: command line driver for the exact quotient-cohomology engine.
//!
//! Subcommands run either a single stage (`strata`, `balance`,
//! `series`, `betti`, `pairing`) or the whole pipeline (`run`), on a
//! problem file or a built-in preset. `selftest` replays the golden
//! examples. Exit codes: 0 success, 1 input error, 2 integrity error,
//! 3 balance failure under `--strict`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use giq_core::error::Error;
use giq_core::groebner::OrderKind;
use giq_core::pipeline::{report_json, report_text, run_pipeline, CrossCheck, Report};
use giq_core::problem::{parse_problem, OutputKind, ProblemSpec};
use giq_core::series::palindrome_check;

#[derive(Parser)]
#[command(name = "giq", version, about = "exact intersection-cohomology engine for GIT quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Problem file (omit when using --preset)
    file: Option<PathBuf>,

    /// Built-in instance: pn-cstar:a,b,c or p1-sl2:n
    #[arg(long)]
    preset: Option<String>,

    /// Monomial order override
    #[arg(long, value_parser = ["lex", "grlex"])]
    order: Option<String>,

    /// Even degree bound override
    #[arg(long)]
    max_degree: Option<u32>,

    /// Output format
    #[arg(long, default_value = "text", value_parser = ["text", "json"])]
    format: String,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Fail (exit 3) when the balance check does not pass
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Index set and stratum codimensions
    Strata(InputArgs),
    /// Balance verdict for the slice data
    Balance(InputArgs),
    /// Equivariant series from the Morse assembly
    Series(InputArgs),
    /// Intersection Betti numbers (both routes where available)
    Betti(InputArgs),
    /// Pairing matrices, determinants and signatures
    Pairing(InputArgs),
    /// Full pipeline with the cross-check
    Run(InputArgs),
    /// Golden regression suite over the built-in examples
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, only) = match &cli.command {
        Command::Strata(a) => (a, Some(OutputKind::Strata)),
        Command::Balance(a) => (a, Some(OutputKind::Balance)),
        Command::Series(a) => (a, Some(OutputKind::Series)),
        Command::Betti(a) => (a, Some(OutputKind::Betti)),
        Command::Pairing(a) => (a, Some(OutputKind::Pairing)),
        Command::Run(a) => (a, None),
        Command::Selftest => return selftest(),
    };
    match execute(args, only) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Integrity(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_spec(args: &InputArgs, only: Option<OutputKind>) -> Result<ProblemSpec, Error> {
    let mut spec = match (&args.file, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_problem(&text)?
        }
        (None, Some(preset)) => {
            let (name, rest) = preset
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput("preset flags look like pn-cstar:3,2,3".into()))?;
            let preset_args: Vec<u32> = rest
                .split(',')
                .map(|a| {
                    a.trim()
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad preset argument `{a}`")))
                })
                .collect::<Result<_, _>>()?;
            giq_core::presets::build_preset(name, &preset_args)?
        }
        (Some(_), Some(_)) => {
            return Err(Error::InvalidInput("give either a file or --preset, not both".into()))
        }
        (None, None) => {
            return Err(Error::InvalidInput("give a problem file or --preset".into()))
        }
    };
    if let Some(order) = &args.order {
        spec.order = OrderKind::parse(order)?;
    }
    if let Some(d) = args.max_degree {
        spec.max_degree = d;
    }
    if let Some(kind) = only {
        spec.outputs = vec![kind];
    }
    Ok(spec)
}

fn execute(args: &InputArgs, only: Option<OutputKind>) -> Result<ExitCode, Error> {
    let spec = load_spec(args, only)?;
    let report = run_pipeline(&spec)?;
    let rendered = match args.format.as_str() {
        "json" => {
            let mut s = serde_json::to_string_pretty(&report_json(&spec, &report))
                .expect("report serialization cannot fail");
            s.push('\n');
            s
        }
        _ => report_text(&spec, &report),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    if args.strict && !report.certified {
        eprintln!("balance check failed (--strict)");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn selftest_run(label: &str, ok: bool, failures: &mut u32) {
    if ok {
        println!("PASS {label}");
    } else {
        println!("FAIL {label}");
        *failures += 1;
    }
}

/// Golden suite over the built-in examples: series values, kernel
/// bases, pairing matrices and the dual-route cross-check.
fn selftest() -> ExitCode {
    let mut failures = 0u32;

    let circle: Result<Report, Error> =
        giq_core::presets::pn_cstar_problem(3, 2, 3).and_then(|s| run_pipeline(&s));
    match circle {
        Ok(report) => {
            let v = report.v_space.as_ref();
            selftest_run(
                "circle betti [1,2,3,3,3,2,1]",
                v.is_some_and(|v| v.betti().by_even_degree() == [1, 2, 3, 3, 3, 2, 1]),
                &mut failures,
            );
            selftest_run(
                "circle cross-check agrees",
                report.cross_check == CrossCheck::Agree,
                &mut failures,
            );
            selftest_run(
                "circle top class",
                report
                    .pairing
                    .as_ref()
                    .is_some_and(|p| p.top_class.to_string() == "xi^2*rho^4"),
                &mut failures,
            );
            selftest_run(
                "circle middle signature 1",
                report.pairing.as_ref().is_some_and(|p| {
                    p.blocks
                        .iter()
                        .find(|b| b.degree == 6)
                        .is_some_and(|b| b.signature == Some(1))
                }),
                &mut failures,
            );
            selftest_run(
                "circle series palindromic",
                report
                    .series_betti
                    .as_ref()
                    .is_some_and(|b| palindrome_check(b, 12)),
                &mut failures,
            );
        }
        Err(e) => {
            println!("FAIL circle preset pipeline: {e}");
            failures += 1;
        }
    }

    for (n, expected) in [(2u32, vec![1u64, 1]), (3, vec![1, 6, 6, 1])] {
        let result: Result<Report, Error> =
            giq_core::presets::p1_sl2_problem(n).and_then(|s| run_pipeline(&s));
        match result {
            Ok(report) => {
                selftest_run(
                    &format!("tuples n={n} betti {expected:?}"),
                    report
                        .v_space
                        .as_ref()
                        .is_some_and(|v| v.betti().by_even_degree() == expected),
                    &mut failures,
                );
                selftest_run(
                    &format!("tuples n={n} cross-check agrees"),
                    report.cross_check == CrossCheck::Agree,
                    &mut failures,
                );
            }
            Err(e) => {
                println!("FAIL tuples n={n} pipeline: {e}");
                failures += 1;
            }
        }
    }

    if failures == 0 {
        println!("selftest: all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("selftest: {failures} check(s) failed");
        ExitCode::from(2)
    }
}
