//! The acceptance gate: every numbered criterion must pass at the pinned
//! tolerances, printing one line per criterion.

use genconj::suite::{self, Tolerances};
use std::io::Write;

#[test]
fn acceptance_criteria() {
    let results = suite::run_all(&Tolerances::default());
    assert_eq!(results.len(), 10);
    let mut failing = Vec::new();
    // write straight to the stdout handle so the lines survive libtest's
    // output capture in a plain `cargo test` run
    let mut out = std::io::stdout();
    let _ = writeln!(out);
    for r in &results {
        let _ = writeln!(out, "{}", r.line());
        if !r.passed {
            failing.push(format!("{} ({})", r.name, r.detail));
        }
    }
    assert!(failing.is_empty(), "failing criteria: {}", failing.join("; "));
}
