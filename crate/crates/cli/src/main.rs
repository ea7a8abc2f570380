use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = qns::Cli::parse();
    match qns::run(&cli) {
        Ok(r) => {
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            if cli.check.is_some() {
                println!("check passed");
            } else {
                println!("{}", r.dir.display());
            }
            ExitCode::from(qns::EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(qns::exit_code(&e))
        }
    }
}
