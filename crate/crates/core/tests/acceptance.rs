//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Stretch items are reported but never fail the run.

use regrep::verify::{run_suite, Config, SUITES};

fn main() {
    let cfg = Config::default();
    let mut failed = Vec::new();
    for (i, suite) in SUITES.iter().enumerate() {
        let rep = run_suite(suite.id, &cfg).expect("known suite");
        let status = match (rep.passed, rep.stretch) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (stretch, tolerated)",
        };
        println!(
            "criterion {:>2} {status:<5} {} [{} ms] {}",
            i + 1,
            rep.id,
            rep.elapsed_ms,
            rep.claim
        );
        for line in &rep.details {
            println!("                {line}");
        }
        if !rep.passed && !rep.stretch {
            failed.push(rep.id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
