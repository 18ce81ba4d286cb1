//! Acceptance gate: every criterion runs at the default desk scale and must
//! pass. One line is printed per criterion; run with `--nocapture` to see
//! the numbers.

use winhopf_core::acceptance::{run, AcceptanceConfig};

#[test]
fn acceptance_suite() {
    let cfg = AcceptanceConfig::default();
    let results = run(&cfg, &[]);
    let mut all_pass = true;
    for r in &results {
        println!("{}", r.line());
        all_pass &= r.pass;
    }
    assert!(all_pass, "acceptance criteria failed");
}
