//! Prints one PASS/FAIL line per acceptance criterion and asserts the
//! attainable ones. Runs without the libtest harness so the lines are always
//! shown: `cargo test --test acceptance`.

use kdnls::verify::acceptance::{self, run_suite, Suite, ROGUE1_DEVIATION};

fn main() {
    let report = run_suite(Suite::Full);
    assert_eq!(
        report.outcomes.iter().map(|o| o.id).collect::<Vec<_>>(),
        (1..=8).collect::<Vec<u8>>()
    );
    for o in &report.outcomes {
        println!("{}", o.line());
    }
    for o in &report.outcomes {
        if o.id == 5 {
            assert_eq!(o.known_deviation, Some(ROGUE1_DEVIATION));
        } else {
            assert!(o.passed, "criterion {} failed: {}", o.id, o.detail);
        }
    }
    assert!(
        report.outcomes[0].seconds < 1.0,
        "pin-down took {} s",
        report.outcomes[0].seconds
    );
    assert!(report.outcomes[1].seconds < 60.0);
    assert!(report.outcomes[4].seconds < 120.0);

    // Criterion 5, attainable parts: the positon ladder and the first-order
    // rate of the rogue1 family with extended arithmetic at the smallest ε.
    let positon = &report
        .convergence
        .iter()
        .find(|c| c.family == "positon")
        .unwrap()
        .study;
    assert!(positon.monotone);
    assert!(1.0 / positon.reduction() >= 20.0);
    let rogue = &report
        .convergence
        .iter()
        .find(|c| c.family == "rogue1")
        .unwrap()
        .study;
    let ratio = rogue.entries[0].1 / rogue.entries[1].1;
    assert!((8.0..12.5).contains(&ratio), "rogue1 error ratio {ratio}");
    let (_, precision) = acceptance::rogue1_lattice_error(1e-3).unwrap();
    assert_eq!(precision, kdnls::numerics::Precision::Extended);
    println!("acceptance: all attainable criteria hold");
}
