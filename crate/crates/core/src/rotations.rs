//! Rotations and the rotation poset.
//!
//! Element ids of a [`RotationPoset`] are fixed: `0` is the bottom dummy `s`,
//! `1` is the top dummy `t`, and rotation `k` (in discovery order) is element
//! `k + 2`. Discovery follows a single elimination chain from the boy-optimal
//! to the girl-optimal matching, always eliminating the exposed rotation with
//! the lowest id, so ids are a linear extension of the poset.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::instance::{Instance, Side};
use crate::matching::{blocking_pairs, deferred_acceptance, BlockingPair, Matching};
use crate::order::{Elem, Order, OrderError};

/// Bottom dummy element.
pub const S: Elem = 0;
/// Top dummy element.
pub const T: Elem = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("a rotation needs at least two pairs, got {0}")]
    TooShort(usize),
    #[error("boy {0} appears twice in the rotation")]
    RepeatedBoy(usize),
    #[error("girl {0} appears twice in the rotation")]
    RepeatedGirl(usize),
    #[error("rotation {0} is not exposed in the matching")]
    NotExposed(Rotation),
    #[error("set is not downward closed: element {elem} is present but {missing} is not")]
    NotClosed { elem: Elem, missing: Elem },
    #[error("set is not a proper closed set (it must contain s and miss t)")]
    NotProper,
    #[error("matching is not stable: {0:?}")]
    Unstable(Vec<BlockingPair>),
    #[error("matching has {found} boys, instance has {expected}")]
    SizeMismatch { expected: usize, found: usize },
}

/// A cyclic list of matched pairs `(b_0, g_0) .. (b_{r-1}, g_{r-1})`;
/// eliminating it moves each `b_i` to `g_{i+1}`.
///
/// Stored rotated so the smallest boy comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation {
    pairs: Vec<(usize, usize)>,
}

impl Rotation {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Rotation, RotationError> {
        if pairs.len() < 2 {
            return Err(RotationError::TooShort(pairs.len()));
        }
        let mut boys: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut girls: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        boys.sort_unstable();
        girls.sort_unstable();
        if let Some(w) = boys.windows(2).find(|w| w[0] == w[1]) {
            return Err(RotationError::RepeatedBoy(w[0]));
        }
        if let Some(w) = girls.windows(2).find(|w| w[0] == w[1]) {
            return Err(RotationError::RepeatedGirl(w[0]));
        }
        let start = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| p.0)
            .map(|(i, _)| i)
            .unwrap_or(0);
        pairs.rotate_left(start);
        Ok(Rotation { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(boy, from, to)` for every boy the rotation moves.
    pub fn moves(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let r = self.pairs.len();
        (0..r).map(move |i| (self.pairs[i].0, self.pairs[i].1, self.pairs[(i + 1) % r].1))
    }

    /// `(girl, from, to)` for every girl: `g_i` moves from `b_i` to `b_{i-1}`.
    pub fn girl_moves(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let r = self.pairs.len();
        (0..r).map(move |i| (self.pairs[i].1, self.pairs[i].0, self.pairs[(i + r - 1) % r].0))
    }

    pub(crate) fn apply_to(&self, partners: &mut [usize]) {
        for (b, _, to) in self.moves() {
            partners[b] = to;
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (b, g)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({},{})", b + 1, g + 1)?;
        }
        Ok(())
    }
}

/// Rotations exposed in the stable matching `m`, sorted by canonical form.
///
/// For each boy, `s(b)` is the first girl after his partner who prefers him
/// to her own partner and `next(b)` is that girl's partner; the exposed
/// rotations are exactly the cycles of `next`.
pub fn exposed_rotations(inst: &Instance, m: &Matching) -> Vec<Rotation> {
    let n = inst.n();
    let girl_partner = m.partner_of_girl_table();
    let next: Vec<Option<usize>> = (0..n)
        .map(|b| {
            let list = &inst.boy_prefs()[b];
            let start = inst.boy_rank(b, m.partner_of_boy(b)) + 1;
            list[start..]
                .iter()
                .find(|&&g| inst.girl_prefers(g, b, girl_partner[g]))
                .map(|&g| girl_partner[g])
        })
        .collect();

    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    let mut out = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(b) = cur {
            match state[b] {
                0 => {
                    state[b] = 1;
                    path.push(b);
                    cur = next[b];
                }
                1 => {
                    let pos = path.iter().position(|&x| x == b).expect("on path");
                    let pairs = path[pos..].iter().map(|&x| (x, m.partner_of_boy(x))).collect();
                    out.push(Rotation::new(pairs).expect("cycle of distinct boys"));
                    break;
                }
                _ => break,
            }
        }
        for b in path {
            state[b] = 2;
        }
    }
    out.sort();
    out
}

/// Eliminates `rho` from `m`, checking that it is exposed first.
pub fn eliminate(inst: &Instance, m: &Matching, rho: &Rotation) -> Result<Matching, RotationError> {
    if !exposed_rotations(inst, m).contains(rho) {
        return Err(RotationError::NotExposed(rho.clone()));
    }
    let mut partners = m.partners().to_vec();
    rho.apply_to(&mut partners);
    Ok(Matching::from_vec_unchecked(partners))
}

/// A set of poset elements; callers decide whether it must be closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedSet(FixedBitSet);

impl ClosedSet {
    pub fn from_bits(bits: FixedBitSet) -> Self {
        ClosedSet(bits)
    }

    pub fn from_elems(len: usize, elems: impl IntoIterator<Item = Elem>) -> Self {
        let mut bits = FixedBitSet::with_capacity(len);
        for e in elems {
            bits.insert(e);
        }
        ClosedSet(bits)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }

    pub fn into_bits(self) -> FixedBitSet {
        self.0
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.0.contains(e)
    }

    pub fn elems(&self) -> Vec<Elem> {
        self.0.ones().collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn union(&self, other: &ClosedSet) -> ClosedSet {
        let mut bits = self.0.clone();
        bits.union_with(&other.0);
        ClosedSet(bits)
    }

    pub fn intersection(&self, other: &ClosedSet) -> ClosedSet {
        let mut bits = self.0.clone();
        bits.intersect_with(&other.0);
        ClosedSet(bits)
    }
}

/// The rotation poset of an instance together with the pair anchors.
#[derive(Debug, Clone)]
pub struct RotationPoset {
    n: usize,
    rotations: Vec<Rotation>,
    order: Order,
    move_to: Vec<Option<Elem>>,
    move_from: Vec<Option<Elem>>,
    m0: Matching,
    mz: Matching,
}

/// Rotation for element `e`, or `None` for the dummies.
#[inline]
pub fn rotation_index(e: Elem) -> Option<usize> {
    e.checked_sub(2)
}

/// Builds the rotation poset of `inst`.
///
/// Rotations are found along one elimination chain. Precedence is generated
/// by two rules and then closed transitively:
/// 1. the rotation moving `b` to `g` precedes the one moving `b` from `g`;
/// 2. if `rho` moves `b` strictly past `g`, the rotation moving `g` above `b`
///    (from a partner she likes no more than `b` to one she likes better)
///    precedes `rho`.
pub fn build_rotation_poset(inst: &Instance) -> RotationPoset {
    let n = inst.n();
    let m0 = deferred_acceptance(inst, Side::Boy);
    let mz = deferred_acceptance(inst, Side::Girl);

    let mut rotations: Vec<Rotation> = Vec::new();
    let mut ids: HashMap<Rotation, usize> = HashMap::new();
    let mut partners = m0.partners().to_vec();
    loop {
        let current = Matching::from_vec_unchecked(partners.clone());
        let exposed = exposed_rotations(inst, &current);
        if exposed.is_empty() {
            break;
        }
        let mut lowest = usize::MAX;
        for rho in exposed {
            let id = *ids.entry(rho.clone()).or_insert_with(|| {
                rotations.push(rho);
                rotations.len() - 1
            });
            lowest = lowest.min(id);
        }
        rotations[lowest].apply_to(&mut partners);
    }
    debug_assert_eq!(partners, mz.partners());

    let idx = |b: usize, g: usize| b * n + g;
    let mut move_to = vec![None; n * n];
    let mut move_from = vec![None; n * n];
    for (b, g) in m0.pairs() {
        move_to[idx(b, g)] = Some(S);
    }
    for (b, g) in mz.pairs() {
        move_from[idx(b, g)] = Some(T);
    }
    // Per girl: (element, rank of old partner, rank of new partner).
    let mut girl_steps: Vec<Vec<(Elem, usize, usize)>> = vec![Vec::new(); n];
    for (k, rho) in rotations.iter().enumerate() {
        let e = k + 2;
        for (b, from, to) in rho.moves() {
            move_from[idx(b, from)] = Some(e);
            move_to[idx(b, to)] = Some(e);
        }
        for (g, from, to) in rho.girl_moves() {
            girl_steps[g].push((e, inst.girl_rank(g, from), inst.girl_rank(g, to)));
        }
    }

    let mut relations = Vec::new();
    for (k, rho) in rotations.iter().enumerate() {
        let e = k + 2;
        for (b, from, to) in rho.moves() {
            if let Some(p) = move_to[idx(b, from)] {
                if p != S {
                    relations.push((p, e));
                }
            }
            let list = &inst.boy_prefs()[b];
            let lo = inst.boy_rank(b, from) + 1;
            let hi = inst.boy_rank(b, to);
            for &g in &list[lo..hi] {
                let rank_b = inst.girl_rank(g, b);
                let mover = girl_steps[g]
                    .iter()
                    .find(|&&(_, old, new)| new < rank_b && rank_b <= old);
                if let Some(&(p, _, _)) = mover {
                    if p != e {
                        relations.push((p, e));
                    }
                }
            }
        }
    }

    let order = Order::from_relations(rotations.len() + 2, S, T, relations)
        .expect("rotation precedence is acyclic");
    RotationPoset {
        n,
        rotations,
        order,
        move_to,
        move_from,
        m0,
        mz,
    }
}

impl RotationPoset {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of elements including the two dummies.
    pub fn len(&self) -> usize {
        self.rotations.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn rotation(&self, e: Elem) -> Option<&Rotation> {
        rotation_index(e).and_then(|k| self.rotations.get(k))
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn hasse_edges(&self) -> &[(Elem, Elem)] {
        self.order.hasse_edges()
    }

    pub fn boy_optimal(&self) -> &Matching {
        &self.m0
    }

    pub fn girl_optimal(&self) -> &Matching {
        &self.mz
    }

    /// Element whose elimination moves `b` to `g`; `s` if they are matched in
    /// the boy-optimal matching, `None` if `b` is never matched to `g`.
    pub fn move_to(&self, b: usize, g: usize) -> Option<Elem> {
        self.move_to[b * self.n + g]
    }

    /// Element whose elimination moves `b` away from `g`; `t` if they are
    /// matched in the girl-optimal matching.
    pub fn move_from(&self, b: usize, g: usize) -> Option<Elem> {
        self.move_from[b * self.n + g]
    }

    /// The matching generated by a closed set, without validation. Rotations
    /// are applied in id order, which is topological.
    pub(crate) fn matching_of_bits(&self, bits: &FixedBitSet) -> Matching {
        let mut partners = self.m0.partners().to_vec();
        for e in bits.ones() {
            if let Some(rho) = self.rotation(e) {
                rho.apply_to(&mut partners);
            }
        }
        Matching::from_vec_unchecked(partners)
    }

    pub fn matching_from_closed_set(&self, cs: &ClosedSet) -> Result<Matching, RotationError> {
        let bits = cs.bits();
        if bits.len() != self.len() || !bits.contains(S) || bits.contains(T) {
            return Err(RotationError::NotProper);
        }
        for e in bits.ones() {
            let below = self.order.below(e);
            if let Some(missing) = below.ones().find(|&p| !bits.contains(p)) {
                return Err(RotationError::NotClosed { elem: e, missing });
            }
        }
        Ok(self.matching_of_bits(bits))
    }

    /// Inverse of [`matching_from_closed_set`](Self::matching_from_closed_set):
    /// a rotation has been eliminated iff it moves some boy away from a girl
    /// he strictly prefers to his partner in `m`.
    pub fn closed_set_from_matching(&self, inst: &Instance, m: &Matching) -> Result<ClosedSet, RotationError> {
        if m.n() != self.n {
            return Err(RotationError::SizeMismatch {
                expected: self.n,
                found: m.n(),
            });
        }
        let blocking = blocking_pairs(inst, m);
        if !blocking.is_empty() {
            return Err(RotationError::Unstable(blocking));
        }
        let mut bits = FixedBitSet::with_capacity(self.len());
        bits.insert(S);
        for (k, rho) in self.rotations.iter().enumerate() {
            let gone = rho
                .pairs()
                .iter()
                .any(|&(b, g)| inst.boy_prefers(b, g, m.partner_of_boy(b)));
            if gone {
                bits.insert(k + 2);
            }
        }
        Ok(ClosedSet(bits))
    }

    /// Every proper closed set. Exponential; for small instances.
    pub fn proper_closed_sets(&self) -> Vec<ClosedSet> {
        self.order.proper_closed_sets().into_iter().map(ClosedSet).collect()
    }

    pub fn elem_label(&self, e: Elem) -> String {
        match e {
            S => "s".to_string(),
            T => "t".to_string(),
            _ => e.to_string(),
        }
    }

    /// Text form: rotations (1-based pairs) one per line, then covering
    /// edges as `a -> b`. Element `0` is `s` and `1` is `t`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# element 0 = s, element 1 = t, pairs are (boy,girl)\n");
        out.push_str(&format!("rotations {}\n", self.rotations.len()));
        for (k, rho) in self.rotations.iter().enumerate() {
            out.push_str(&format!("{}: {}\n", k + 2, rho));
        }
        out.push_str(&format!("hasse {}\n", self.hasse_edges().len()));
        for &(a, b) in self.hasse_edges() {
            out.push_str(&format!("{a} -> {b}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetTextError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Reads the order back from [`RotationPoset::to_text`] output.
pub fn parse_poset_text(text: &str) -> Result<Order, PosetTextError> {
    let mut count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen_rotations = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        let syntax = |reason: &str| PosetTextError::Syntax {
            line: lineno,
            reason: reason.to_string(),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("rotations") {
            count = Some(rest.trim().parse().map_err(|_| syntax("bad rotation count"))?);
        } else if line.starts_with("hasse") {
            continue;
        } else if let Some((a, b)) = line.split_once("->") {
            let a: usize = a.trim().parse().map_err(|_| syntax("bad edge tail"))?;
            let b: usize = b.trim().parse().map_err(|_| syntax("bad edge head"))?;
            edges.push((a, b));
        } else if line.contains(':') {
            seen_rotations += 1;
        } else {
            return Err(syntax("unrecognised line"));
        }
    }
    let k = count.unwrap_or(seen_rotations);
    Ok(Order::from_relations(k + 2, S, T, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, matching};

    #[test]
    fn exposed_in_boy_optimal() {
        let a = fixtures::example_a();
        let m0 = deferred_acceptance(&a, Side::Boy);
        let exposed = exposed_rotations(&a, &m0);
        assert_eq!(
            exposed,
            vec![
                Rotation::new(vec![(0, 0), (1, 1)]).unwrap(),
                Rotation::new(vec![(2, 2), (3, 3)]).unwrap(),
            ]
        );
        let mz = deferred_acceptance(&a, Side::Girl);
        assert!(exposed_rotations(&a, &mz).is_empty());
        let one = Instance::parse("1\n1\n1\n").unwrap();
        assert!(exposed_rotations(&one, &deferred_acceptance(&one, Side::Boy)).is_empty());
    }

    #[test]
    fn elimination_on_example() {
        let a = fixtures::example_a();
        let m0 = deferred_acceptance(&a, Side::Boy);
        let r1 = Rotation::new(vec![(0, 0), (1, 1)]).unwrap();
        let r2 = Rotation::new(vec![(2, 2), (3, 3)]).unwrap();
        let m2 = eliminate(&a, &m0, &r1).unwrap();
        let m1 = eliminate(&a, &m0, &r2).unwrap();
        assert_eq!(m2, matching(4, "a2 b1 c3 d4"));
        assert_eq!(m1, matching(4, "a1 b2 c4 d3"));
        let mz = matching(4, "a2 b1 c4 d3");
        assert_eq!(eliminate(&a, &m2, &r2).unwrap(), mz);
        assert_eq!(eliminate(&a, &m1, &r1).unwrap(), mz);
        assert!(matches!(eliminate(&a, &m2, &r1), Err(RotationError::NotExposed(_))));
    }

    #[test]
    fn canonical_form() {
        let r = Rotation::new(vec![(3, 1), (0, 2), (2, 0)]).unwrap();
        assert_eq!(r.pairs(), &[(0, 2), (2, 0), (3, 1)]);
        assert_eq!(r.moves().collect::<Vec<_>>(), vec![(0, 2, 0), (2, 0, 1), (3, 1, 2)]);
        assert!(Rotation::new(vec![(0, 1)]).is_err());
        assert!(Rotation::new(vec![(0, 1), (0, 2)]).is_err());
        assert!(Rotation::new(vec![(0, 1), (1, 1)]).is_err());
    }

    #[test]
    fn example_poset() {
        let a = fixtures::example_a();
        let p = build_rotation_poset(&a);
        assert_eq!(p.rotations().len(), 2);
        assert_eq!(p.hasse_edges(), &[(0, 2), (0, 3), (2, 1), (3, 1)]);
        assert!(!p.order().comparable(2, 3));
        assert_eq!(p.move_to(0, 1), Some(2));
        assert_eq!(p.move_from(0, 0), Some(2));
        assert_eq!(p.move_to(0, 0), Some(S));
        assert_eq!(p.move_from(0, 1), Some(T));
        assert_eq!(p.move_to(0, 2), None);

        let m1 = p
            .matching_from_closed_set(&ClosedSet::from_elems(4, [S, 3]))
            .unwrap();
        assert_eq!(m1, matching(4, "1a 2b 3d 4c"));
        let m0 = p.matching_from_closed_set(&ClosedSet::from_elems(4, [S])).unwrap();
        assert_eq!(&m0, p.boy_optimal());
        let mz = p
            .matching_from_closed_set(&ClosedSet::from_elems(4, [S, 2, 3]))
            .unwrap();
        assert_eq!(&mz, p.girl_optimal());
        assert_eq!(
            p.closed_set_from_matching(&a, &m1).unwrap(),
            ClosedSet::from_elems(4, [S, 3])
        );
        assert_eq!(
            p.closed_set_from_matching(&a, &mz).unwrap(),
            ClosedSet::from_elems(4, [S, 2, 3])
        );
    }

    #[test]
    fn trivial_instance_poset() {
        let one = Instance::parse("1\n1\n1\n").unwrap();
        let p = build_rotation_poset(&one);
        assert!(p.rotations().is_empty());
        assert_eq!(p.hasse_edges(), &[(S, T)]);
        assert_eq!(p.proper_closed_sets().len(), 1);
    }

    #[test]
    fn bad_sets_are_rejected() {
        let a = fixtures::example_a();
        let p = build_rotation_poset(&a);
        assert_eq!(
            p.matching_from_closed_set(&ClosedSet::from_elems(4, [2])),
            Err(RotationError::NotProper)
        );
        assert_eq!(
            p.matching_from_closed_set(&ClosedSet::from_elems(4, [S, 2, T])),
            Err(RotationError::NotProper)
        );
        let b = fixtures::example_b();
        let m1 = matching(4, "a1 b2 c4 d3");
        assert!(matches!(
            build_rotation_poset(&b).closed_set_from_matching(&b, &m1),
            Err(RotationError::Unstable(_))
        ));
    }

    #[test]
    fn not_closed_is_reported() {
        // 3x3 cyclic instance: the three diagonals, rotations form a chain.
        let inst = Instance::parse("3\n1 2 3\n2 3 1\n3 1 2\n2 3 1\n3 1 2\n1 2 3\n").unwrap();
        let p = build_rotation_poset(&inst);
        assert_eq!(p.rotations().len(), 2);
        assert!(p.order().precedes(2, 3));
        assert_eq!(
            p.matching_from_closed_set(&ClosedSet::from_elems(4, [S, 3])),
            Err(RotationError::NotClosed { elem: 3, missing: 2 })
        );
    }

    #[test]
    fn poset_text_round_trip() {
        let p = build_rotation_poset(&fixtures::example_a());
        let text = p.to_text();
        assert!(text.contains("2: (1,1) (2,2)"));
        assert!(text.contains("3 -> 1"));
        let order = parse_poset_text(&text).unwrap();
        assert_eq!(&order, p.order());
        assert!(parse_poset_text("rotations x\n").is_err());
        assert!(parse_poset_text("rotations 1\n2: (1,1)\n2 -> 2\n").is_err());
    }
}
