use std::io::Write;

use clap::Parser;

use avgemb::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            if outcome.written.is_empty() {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(outcome.report.to_json().as_bytes());
            } else {
                for p in &outcome.written {
                    println!("{}", p.display());
                }
                if let Some(gap) = outcome.report.max_gap {
                    println!("max gap: {gap}");
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
