use clap::Parser;
use lgcp_sphere::cli::{run, RunConfig};

fn main() {
    let config = RunConfig::parse();
    if let Err(err) = run(&config) {
        eprintln!("{}: {err}", err.code());
        std::process::exit(1);
    }
}
