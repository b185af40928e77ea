//! Runs every acceptance criterion and prints one line per criterion.
//! Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use conormal_cli::suites::run_suite;
use conormal_cli::{RunConfig, Session};

fn main() -> ExitCode {
    let session = Session::new(RunConfig::default()).expect("default configuration is valid");
    let start = Instant::now();
    let outcomes = run_suite(&session, "acceptance").expect("the acceptance suite exists");
    let mut failed = 0;
    for o in &outcomes {
        println!("criterion {:>2}: {}  {}", o.criterion, if o.pass { "PASS" } else { "FAIL" }, o.title);
        for c in o.checks.iter().filter(|c| !c.pass) {
            println!("    {}: expected {}, observed {}", c.name, c.expected, c.observed);
        }
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
