use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use superspace_core::model::Model;
use superspace_lab::{run, Command, Divisor, Options};

#[derive(Clone, Copy, ValueEnum)]
enum DivisorArg {
    B,
    Hbar,
}

/// Verify superspace reductions for the model in a file.
#[derive(Parser)]
#[command(name = "superspace-lab", version)]
struct Args {
    /// expand, reduce, quantize, bigaction, dimcheck, lattice, identities or all
    command: String,
    model: PathBuf,
    /// Write a machine-readable report to this file.
    #[arg(long, value_name = "out.json")]
    json: Option<PathBuf>,
    /// Also report the large-action exponent before the eps -> 0 limit.
    #[arg(long)]
    eps_symbolic: bool,
    #[arg(long, value_enum, default_value = "b", ignore_case = true)]
    divisor: DivisorArg,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let fail = |msg: String| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    };
    let command: Command = match args.command.parse() {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let model = match Model::load(&args.model) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    let opts = Options {
        eps_symbolic: args.eps_symbolic,
        divisor: match args.divisor {
            DivisorArg::B => Divisor::B,
            DivisorArg::Hbar => Divisor::Hbar,
        },
    };
    let name = args.model.display().to_string();
    let report = match run(command, &model, &name, opts) {
        Ok(r) => r,
        Err(e) => return fail(format!("{name}: {e}")),
    };
    print!("{}", report.render());
    if let Some(path) = &args.json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return fail(format!("cannot write {}: {e}", path.display()));
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
