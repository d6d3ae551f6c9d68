use clap::Parser;
use hdx_cli::{run, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    std::process::exit(run(&cfg));
}
