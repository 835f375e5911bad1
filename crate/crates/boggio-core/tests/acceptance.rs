//! Acceptance gate: runs every named verification check at full scale and
//! prints exactly one pass/fail line per criterion. Exits nonzero if any
//! criterion fails, so `cargo test` reports the failure.
//!
//! Set BOGGIO_ACCEPTANCE_QUICK=1 to run the reduced grids (useful while
//! iterating; the default full grids are the authoritative gate).

use boggio_core::verify::{run_named_check, VerificationReport, VerifyOptions, CHECK_NAMES};
use std::time::Instant;

fn main() {
    let thorough = std::env::var("BOGGIO_ACCEPTANCE_QUICK").is_err();
    let opts = VerifyOptions {
        thorough,
        ..VerifyOptions::default()
    };
    if !thorough {
        println!("note: BOGGIO_ACCEPTANCE_QUICK is set; running reduced grids");
    }
    let mut all_pass = true;
    let t_start = Instant::now();
    for (i, name) in CHECK_NAMES.iter().enumerate() {
        let mut report = VerificationReport::default();
        let t0 = Instant::now();
        let outcome = run_named_check(name, &opts, &mut report);
        let dt = t0.elapsed().as_secs_f64();
        let pass = outcome.is_ok() && report.overall_pass();
        all_pass &= pass;
        println!(
            "criterion {:02} [{}] {}  worst residual {:.3e}  ({} records, {:.1} s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            report.worst_residual(),
            report.checks.len(),
            dt
        );
        if let Err(e) = outcome {
            println!("    error: {e}");
        }
        for c in report.checks.iter().filter(|c| !c.pass) {
            println!(
                "    failing: {}  residual {:.4e}  tol {:.1e}",
                c.parameters, c.residual, c.tolerance
            );
        }
    }
    println!(
        "acceptance: {} ({} criteria, {:.1} s total)",
        if all_pass { "PASS" } else { "FAIL" },
        CHECK_NAMES.len(),
        t_start.elapsed().as_secs_f64()
    );
    std::process::exit(if all_pass { 0 } else { 1 });
}
