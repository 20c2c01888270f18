use clap::Parser;

use trendhedge_cli::config::Cli;
use trendhedge_cli::{exit_code, run};

fn main() {
    // clap exits with 2 on usage errors by default; 2 is reserved here for
    // numeric degeneracy, so usage errors are remapped to 1 (help and
    // version output stay 0).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(error) = run(&cli) {
        eprintln!("error: {error}");
        std::process::exit(exit_code(&error));
    }
}
