//! Acceptance criteria. Prints one PASS/FAIL line per criterion followed by its sub-checks,
//! and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use ncalc::demos::{self, DEFAULT_SEED};

fn main() -> ExitCode {
    let mut failed = vec![];
    for name in demos::NAMES {
        let start = Instant::now();
        match demos::run(name, DEFAULT_SEED) {
            Ok(report) => {
                print!("{report}");
                println!("      ({name}, {:.2}s)", start.elapsed().as_secs_f64());
                if !report.passed() {
                    failed.push(report.id.to_string());
                }
            }
            Err(e) => {
                println!("[FAIL] {name}: error {e}");
                failed.push(name.to_string());
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", demos::NAMES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
