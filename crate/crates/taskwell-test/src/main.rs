//! Command-line entry point for the harness.

use clap::Parser;

use taskwell_test::support::install_quiet_worker_panics;
use taskwell_test::HarnessConfig;

fn main() {
    let config = HarnessConfig::parse();
    install_quiet_worker_panics();
    let code = taskwell_test::run(&config, Box::new(std::io::stdout()));
    std::process::exit(code);
}
