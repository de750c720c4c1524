//! Runs the acceptance criteria and prints one PASS/FAIL line each.
//! Exits non-zero if any criterion fails.

use discrete_canonical::acceptance::run_all;

fn main() {
    println!("acceptance: running {} criteria", discrete_canonical::acceptance::CRITERIA.len());
    let outcomes = run_all(|o| println!("{o}"));
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| format!("C{}", o.id)).collect();
    let total: f64 = outcomes.iter().map(|o| o.seconds).sum();
    println!("acceptance: {} passed, {} failed in {total:.1}s", outcomes.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        println!("acceptance: failing criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
