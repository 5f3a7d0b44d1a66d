use clap::Parser;

use drivenjc_cli::args::Cli;
use drivenjc_cli::{commands, exit_code};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = commands::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(e.category()));
    }
}
