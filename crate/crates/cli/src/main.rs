use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CMCLAB_LOG", "warn")).init();
    cmclab::run(cmclab::Cli::parse())
}
