use std::process::ExitCode;

use clap::Parser;
use treeflip_cli::commands::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
