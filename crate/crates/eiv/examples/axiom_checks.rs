//! Certify or falsify a candidate valuation functional against the
//! rationality axioms.
//!
//! The entropy-based expected identification value passes every check; a
//! functional that bumps the index of whichever cell happens to be listed
//! first is caught by structural invariance, with a serialized witness
//! pair.
//!
//! ```bash
//! cargo run -p eiv --example axiom_checks
//! ```

use eiv::axiomlab::{
    check_structural_invariance, entropy_functional, perturbed_entropy_functional, run_check,
    CHECK_NAMES,
};
use eiv::prior::PriorModel;
use eiv::EvalConfig;

fn main() {
    let prior = PriorModel::uniform(3, 8);
    let cfg = EvalConfig::default();

    let entropy = entropy_functional(prior.clone(), cfg.clone(), 1e-6);
    println!("functional under test: {}", entropy.name);
    for name in CHECK_NAMES {
        let report = run_check(name, &entropy, 60, 2024).unwrap();
        println!(
            "  {:<30} {}  ({} instances checked)",
            report.axiom, report.verdict, report.checked
        );
    }

    let broken = perturbed_entropy_functional(prior, cfg, 1e-6, 0.05);
    println!("\nfunctional under test: {}", broken.name);
    let report = check_structural_invariance(&broken, 60, 2024).unwrap();
    println!(
        "  {:<30} {}  ({} violations)",
        report.axiom,
        report.verdict,
        report.violations.len()
    );
    if let Some(witness) = report.violations.first() {
        println!("\nsmallest witness:");
        println!("  {}", witness.detail);
        println!("  values: {:?}", witness.values);
        println!("  first experiment: {}", witness.experiments[0]);
    }
}
