//! Reporting harness for the acceptance suite in `tests/acceptance.rs`.

use std::io::Write;

/// `Ok` carries a summary, `Err` the first violation.
pub type Outcome = Result<String, String>;

/// Runs one criterion, prints a single `PASS`/`FAIL` line to stderr
/// (bypassing output capture) and panics on `FAIL`.
pub fn criterion(number: u32, name: &str, body: impl FnOnce() -> Outcome) {
    let outcome = body();
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    let _ = writeln!(std::io::stderr(), "{tag} acceptance/{number:02} {name}: {detail}");
    if let Err(d) = outcome {
        panic!("criterion {number} ({name}) failed: {d}");
    }
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
