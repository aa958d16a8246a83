mod common;

use rand::Rng;
use robust_stable::generate::{random_error, random_weights};
use robust_stable::oracle::{brute_force_robust, enumerate_stable};
use robust_stable::robust::anchors;
use robust_stable::{
    build_robust, build_rotation_poset, fixtures, max_weight_robust, robust_matchings, ErrorSpec, Instance, Matching,
    Side,
};

fn cases(count: usize, base: u64) -> Vec<(Instance, Vec<ErrorSpec>)> {
    let mut rng = common::rng(base);
    common::corpus(count, 2, 8, base)
        .into_iter()
        .map(|inst| {
            let k = rng.random_range(0..=20);
            let errors = (0..k).map(|_| random_error(inst.n(), None, &mut rng)).collect();
            (inst, errors)
        })
        .collect()
}

#[test]
fn robust_set_matches_brute_force() {
    let (mut empty, mut nonempty) = (0, 0);
    for (inst, errors) in cases(150, 80_000) {
        let p = build_rotation_poset(&inst);
        let r = build_robust(&p, &inst, &errors).unwrap();
        let want = brute_force_robust(&inst, &errors).unwrap();
        assert_eq!(common::sorted(robust_matchings(&r, &p)), want);
        assert_eq!(r.exists, !want.is_empty());
        if r.exists {
            nonempty += 1;
            let w = r.witness.clone().unwrap();
            assert!(want.iter().all(|m| robust_stable::dominates(&inst, &w, m)));
            let snap = enumerate_stable(&inst).unwrap();
            assert!(snap.is_sublattice(&want));
        } else {
            empty += 1;
            assert!(r.witness.is_none());
        }
        for s in p.order().proper_closed_sets() {
            let m = p.matching_from_closed_set(&robust_stable::ClosedSet::from_bits(s.clone())).unwrap();
            assert_eq!(!r.edges.separated_by(&s), want.contains(&m));
        }
    }
    assert!(empty > 10 && nonempty > 10, "{empty} empty, {nonempty} nonempty");
}

#[test]
fn max_weight_matches_brute_force() {
    let mut rng = common::rng(9);
    for (inst, errors) in cases(150, 90_000) {
        let p = build_rotation_poset(&inst);
        let r = build_robust(&p, &inst, &errors).unwrap();
        let w = random_weights(inst.n(), -10.0, 10.0, &mut rng);
        let want = brute_force_robust(&inst, &errors).unwrap();
        match max_weight_robust(&r, &p, &w) {
            None => assert!(want.is_empty()),
            Some((m, total)) => {
                assert!(want.contains(&m));
                assert_eq!(total, w.weight_of(&m));
                let best = want.iter().map(|x| w.weight_of(x)).fold(f64::NEG_INFINITY, f64::max);
                assert!((total - best).abs() <= 1e-9, "{total} vs {best}");
                let (low, _) = max_weight_robust(&r, &p, &w.negated()).unwrap();
                let worst = want.iter().map(|x| w.weight_of(x)).fold(f64::INFINITY, f64::min);
                assert!((w.weight_of(&low) - worst).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn anchors_are_ordered() {
    for inst in common::corpus(50, 2, 8, 95_000) {
        let p = build_rotation_poset(&inst);
        let r = build_robust(&p, &inst, &[]).unwrap();
        for b in 0..inst.n() {
            for g in 0..inst.n() {
                if let Some((u, v)) = anchors(&p, b, g) {
                    let (bu, bv) = (r.meta.block_of(u), r.meta.block_of(v));
                    assert!(bu == bv || r.meta.order().precedes(bu, bv));
                }
            }
        }
    }
}

/// A second error on the example that leaves nothing fully robust: the
/// first error only keeps the boy-optimal matching, so any error breaking
/// that matching empties the set.
#[test]
fn contradictory_errors_on_the_example() {
    let a = fixtures::example_a();
    let p = build_rotation_poset(&a);
    let first = ErrorSpec::parse_file(fixtures::EXAMPLE_ERROR, 4).unwrap().remove(0);
    let mut found = None;
    'search: for side in [Side::Boy, Side::Girl] {
        for agent in 0..4 {
            for list in permutations(4) {
                let e = ErrorSpec { side, agent, new_list: list };
                if brute_force_robust(&a, &[first.clone(), e.clone()]).unwrap().is_empty() {
                    found = Some(e);
                    break 'search;
                }
            }
        }
    }
    let second = found.expect("some error breaks the boy-optimal matching");
    let r = build_robust(&p, &a, &[first, second]).unwrap();
    assert!(!r.exists);
    assert!(robust_matchings(&r, &p).is_empty());
    assert!(max_weight_robust(&r, &p, &robust_stable::WeightFunction::uniform(4, 1.0)).is_none());
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn duplicate_and_identity_errors_are_ignored() {
    let mut rng = common::rng(3);
    for inst in common::corpus(30, 2, 8, 97_000) {
        let p = build_rotation_poset(&inst);
        let e = random_error(inst.n(), None, &mut rng);
        let same = ErrorSpec {
            side: Side::Girl,
            agent: 0,
            new_list: inst.girl_prefs()[0].clone(),
        };
        let once = build_robust(&p, &inst, std::slice::from_ref(&e)).unwrap();
        let noisy = build_robust(&p, &inst, &[e.clone(), same, e.clone()]).unwrap();
        assert_eq!(once, noisy);
        let want: Vec<Matching> = brute_force_robust(&inst, &[e]).unwrap();
        assert_eq!(common::sorted(robust_matchings(&noisy, &p)), want);
    }
}
