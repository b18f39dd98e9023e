//! Every acceptance criterion, one pass/fail line each. Exits nonzero if any
//! criterion fails.

use std::path::Path;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcomes = cvqec_cli::verify::run_all(Some(Path::new(env!("CARGO_BIN_EXE_cvqec"))));
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("\nacceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
