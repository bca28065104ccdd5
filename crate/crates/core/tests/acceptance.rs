//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` print FAIL without failing the run;
//! any other FAIL, or a PASS on a listed criterion, exits nonzero.

use std::process::ExitCode;
use std::time::Instant;

use lagnp::verify;

/// The printed smooth-window lists and the printed nine-term window set
/// are proper subsets of what exhaustive computation finds.
const KNOWN_FAILURES: [u32; 2] = [6, 7];

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--verbose" || a == "-v");
    let mut unexpected = 0;
    let mut failed = 0;
    for (id, _) in verify::CRITERIA {
        let start = Instant::now();
        let known = KNOWN_FAILURES.contains(&id);
        match verify::run_criterion(id) {
            Ok(r) => {
                let tag = match (r.pass, known) {
                    (false, true) => " [known failure]",
                    (true, true) => " [unexpected pass]",
                    _ => "",
                };
                println!("{}{tag} ({:.1}s)", r.line(), start.elapsed().as_secs_f64());
                if verbose || !r.pass {
                    for d in r.detail.iter().skip(1) {
                        println!("      {d}");
                    }
                }
                failed += usize::from(!r.pass);
                unexpected += usize::from(r.pass == known);
            }
            Err(e) => {
                println!("FAIL [{id:>2}] error: {e}");
                failed += 1;
                unexpected += 1;
            }
        }
    }
    println!(
        "{failed} of {} criteria failed ({unexpected} unexpected)",
        verify::CRITERIA.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
