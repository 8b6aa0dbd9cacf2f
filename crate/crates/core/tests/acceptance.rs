use qlm_core::acceptance;

#[test]
fn acceptance_criteria() {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    assert_eq!(outcomes.len(), 12);
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
