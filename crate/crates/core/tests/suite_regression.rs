use polyprg::lab::suite::{compute_goldens, Golden};

#[test]
fn discrepancy_suite_matches_stored_values() {
    let text = include_str!("golden/discrepancy_suite.json");
    let stored: Vec<Golden> = serde_json::from_str(text).unwrap();
    let fresh = compute_goldens().unwrap();
    assert_eq!(fresh.len(), stored.len());
    for (f, s) in fresh.iter().zip(&stored) {
        assert_eq!(f, s, "{}", f.id);
        assert_eq!(f.mollifier_uniform.to_bits(), s.mollifier_uniform.to_bits());
        assert_eq!(f.mollifier_generated.to_bits(), s.mollifier_generated.to_bits());
    }
}
