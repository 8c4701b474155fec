//! Command-line front end: `capcont <command> [--seed S] [--json|--csv]`.
//!
//! Exit codes: 0 success, 1 operational error, 2 a hard bound check failed.

pub mod args;
mod commands;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;

use capcont_core::tol::Tolerances;
use clap::Parser;

use args::{Cli, GlobalArgs};
use commands::{command_name, execute, Context};
use report::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

fn tolerances(g: &GlobalArgs) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::default();
    for (name, given, slot) in [
        ("herm", g.tol_herm, &mut t.herm),
        ("trace", g.tol_trace, &mut t.trace),
        ("psd", g.tol_psd, &mut t.psd),
        ("tp", g.tol_tp, &mut t.tp),
        ("ent", g.tol_ent, &mut t.ent),
        ("sdp", g.tol_sdp, &mut t.sdp),
        ("opt", g.tol_opt, &mut t.opt),
    ] {
        if let Some(v) = given {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::bad_parameter(format!("--tol-{name} must be a finite nonnegative number")));
            }
            *slot = v;
        }
    }
    Ok(t)
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let json = cli.global.json;
    match run_cli(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            if json {
                let _ = write!(out, "{}", report::error_envelope(&e));
            }
            EXIT_ERROR
        }
    }
}

fn run_cli(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = &cli.global;
    let ctx = Context {
        seed: g.seed,
        tol: tolerances(g)?,
    };
    let name = command_name(&cli.command);
    let outcome = execute(&ctx, &cli.command)?;
    let text = if g.csv {
        outcome
            .csv
            .ok_or_else(|| CliError::usage(format!("{name} has no CSV form; use --json")))?
    } else if g.json {
        report::envelope(ctx.seed, &ctx.tol, &name, &outcome.value)?
    } else {
        format!("# {name} (seed {})\n{}", ctx.seed, report::pretty(&outcome.value))
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new("io", e.to_string()))?;
    Ok(if outcome.violation { EXIT_VIOLATION } else { EXIT_OK })
}
