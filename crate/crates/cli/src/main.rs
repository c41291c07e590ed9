use clap::Parser;

use squitter_sim_cli::{dispatch, Cli};

fn main() {
    if let Err(err) = dispatch(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
