mod common;

use common::Agreement;

fn assert_agrees(name: &str, a: Agreement) {
    assert!(a.instances >= 20, "{name}: only {} instances", a.instances);
    assert!(a.max_err <= 1e-10, "{name}: max relative error {:e}", a.max_err);
}

#[test]
fn ap_matches_oracle() {
    assert_agrees("ap", common::check_ap());
}

#[test]
fn a1_matches_oracle() {
    assert_agrees("a1", common::check_a1());
}

#[test]
fn fujii_wilson_matches_oracle() {
    assert_agrees("fujii_wilson", common::check_fujii_wilson());
}

#[test]
fn hl_maximal_matches_oracle() {
    assert_agrees("hl_maximal", common::check_hl_maximal());
}

#[test]
fn luxemburg_matches_oracle() {
    assert_agrees("luxemburg", common::check_luxemburg());
}

#[test]
fn sparse_operator_matches_oracle() {
    assert_agrees("sparse_operator", common::check_sparse_operator());
}

#[test]
fn b_psi_matches_oracle() {
    assert_agrees("b_psi", common::check_b_psi());
}
