mod common;

use rand::seq::IndexedRandom;
use robust_stable::oracle::enumerate_stable;
use robust_stable::rotations::rotation_index;
use robust_stable::{build_rotation_poset, eliminate, exposed_rotations, join, meet, ClosedSet, Matching, S, T};

#[test]
fn closed_sets_biject_with_stable_matchings() {
    for inst in common::corpus(80, 1, 8, 1000) {
        let p = build_rotation_poset(&inst);
        let snap = enumerate_stable(&inst).unwrap();
        let sets = p.proper_closed_sets();
        assert_eq!(sets.len(), snap.len());
        let ms: Vec<Matching> = sets.iter().map(|s| p.matching_from_closed_set(s).unwrap()).collect();
        assert_eq!(common::sorted(ms.clone()), snap.matchings());
        for (s, m) in sets.iter().zip(&ms) {
            assert_eq!(&p.closed_set_from_matching(&inst, m).unwrap(), s);
        }
        for (i, x) in sets.iter().enumerate() {
            for (j, y) in sets.iter().enumerate() {
                assert_eq!(p.matching_from_closed_set(&x.union(y)).unwrap(), join(&inst, &ms[i], &ms[j]).unwrap());
                assert_eq!(
                    p.matching_from_closed_set(&x.intersection(y)).unwrap(),
                    meet(&inst, &ms[i], &ms[j]).unwrap()
                );
            }
        }
    }
}

#[test]
fn random_elimination_chains_use_every_rotation_once() {
    let mut rng = common::rng(11);
    for inst in common::corpus(60, 2, 8, 2000) {
        let p = build_rotation_poset(&inst);
        for _ in 0..3 {
            let mut m = p.boy_optimal().clone();
            let mut used = Vec::new();
            loop {
                let exposed = exposed_rotations(&inst, &m);
                let Some(rho) = exposed.choose(&mut rng) else { break };
                m = eliminate(&inst, &m, rho).unwrap();
                used.push(rho.clone());
            }
            assert_eq!(&m, p.girl_optimal());
            used.sort();
            let mut all = p.rotations().to_vec();
            all.sort();
            assert_eq!(used, all);
        }
    }
}

#[test]
fn anchors_and_size_bounds() {
    for inst in common::corpus(80, 1, 8, 3000) {
        let n = inst.n();
        let p = build_rotation_poset(&inst);
        assert!(p.rotations().len() <= n * (n - 1) / 2);
        for b in 0..n {
            for g in 0..n {
                match (p.move_to(b, g), p.move_from(b, g)) {
                    (Some(u), Some(v)) => assert!(p.order().precedes(u, v)),
                    (None, None) => {}
                    other => panic!("pair ({b},{g}) has one anchor only: {other:?}"),
                }
            }
        }
        for (k, rho) in p.rotations().iter().enumerate() {
            for &(b, g) in rho.pairs() {
                assert_eq!(p.move_from(b, g), Some(k + 2));
            }
        }
    }
}

/// `x` precedes `y` iff every stable matching that has eliminated `y` has
/// eliminated `x`.
#[test]
fn precedence_matches_brute_force() {
    for inst in common::corpus(80, 2, 8, 4000) {
        let p = build_rotation_poset(&inst);
        let snap = enumerate_stable(&inst).unwrap();
        let sets: Vec<ClosedSet> = snap
            .matchings()
            .iter()
            .map(|m| p.closed_set_from_matching(&inst, m).unwrap())
            .collect();
        for x in 2..p.len() {
            for y in 2..p.len() {
                if x == y {
                    continue;
                }
                let implied = sets.iter().all(|s| !s.contains(y) || s.contains(x));
                assert_eq!(p.order().precedes(x, y), implied, "elements {x} and {y}");
            }
        }
        assert!(rotation_index(S).is_none() && rotation_index(T).is_none());
    }
}
