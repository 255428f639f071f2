use clap::Parser;

use qmc_cli::app::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
