mod common;

use robust_stable::oracle::enumerate_stable;

#[test]
fn corpus_has_rich_lattices() {
    let sizes: Vec<usize> = common::corpus(100, 2, 8, 0)
        .iter()
        .map(|i| enumerate_stable(i).unwrap().len())
        .collect();
    assert!(sizes.iter().filter(|&&s| s >= 4).count() >= 20);
}
