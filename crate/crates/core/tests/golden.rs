mod common;

#[test]
fn golden_exponent_table() {
    let rows = common::check_golden_table().unwrap();
    assert!(rows >= 20, "{rows}");
}
