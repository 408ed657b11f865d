//! Verdict bookkeeping for the acceptance run.
//!
//! The criteria live in `tests/acceptance.rs`, a plain binary so every
//! verdict is printed even when earlier ones fail. Kept in its own package
//! so a failing criterion does not stop the other crates' test targets.

use std::process::ExitCode;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

pub fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Prints one `PASS`/`FAIL` line per criterion and a summary.
pub fn report(results: &[(&str, Verdict)]) -> ExitCode {
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} ({name}): {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
