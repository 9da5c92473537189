//! One line per acceptance criterion; exits non-zero if any fails.

use ncfree::verify::{criterion, ALL};

/// `NCFREE_CRITERIA=3,6` restricts the run to the listed criteria.
fn main() {
    let ids: Vec<u8> = match std::env::var("NCFREE_CRITERIA") {
        Ok(list) => list.split(',').map(|s| s.trim().parse().expect("criterion number")).collect(),
        Err(_) => ALL.to_vec(),
    };
    let mut failed = 0;
    for &id in &ids {
        let outcome = criterion(id).expect("known criterion");
        println!("{outcome}");
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", ids.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
