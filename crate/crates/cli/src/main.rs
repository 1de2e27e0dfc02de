use clap::error::ErrorKind;
use clap::Parser;
use heisenberg_cli::args::{Cli, Command, OutputArgs};
use heisenberg_cli::jobs::{Failure, Job, EXIT_USAGE};
use heisenberg_cli::report::{emit, read_document, render};
use std::process::ExitCode;

fn execute(cli: Cli) -> Result<i32, Failure> {
    let (job, out): (Job, OutputArgs) = match &cli.command {
        Command::Certify(r) => (Job::certify(r)?, r.out.clone()),
        Command::HessianCheck(h) => (Job::hessian(h)?, h.run.out.clone()),
        Command::ScanDegeneracy(s) => (Job::scan(s)?, s.run.out.clone()),
        Command::OpnormDecay(d) => (Job::decay(d)?, d.run.out.clone()),
        Command::Replay(r) => {
            let doc = read_document(&r.input)?;
            doc.config.revalidate()?;
            (doc.config, r.out.clone())
        }
    };
    let outcome = job.run()?;
    emit(&render(&job, &outcome, out.format)?, out.output.as_deref())?;
    eprintln!("{}", outcome.summary);
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        0
                    }
                }
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
