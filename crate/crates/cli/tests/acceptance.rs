//! Runs every acceptance item at its stated tolerance and runtime budget and
//! prints one line per item. Exits nonzero if any item fails.

use ksblow::verify::{run_verify, VerifyOptions};

fn main() {
    let reports = run_verify(&VerifyOptions::default(), |r| println!("{}", r.line())).expect("known item ids");
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("acceptance: {} passed, {} failed", reports.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        eprintln!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
