//! Runs the built-in invariant checks and prints the report.

use chsh_decoherence::commands::{render_report, Format};
use chsh_decoherence::selftest::{run, SelfTestOptions};

fn main() {
    let report = run(&SelfTestOptions::new(5_000, 42));
    print!("{}", render_report(&report, Format::Csv));
    if !report.passed() {
        std::process::exit(2);
    }
}
