//! Finding edge sets that define one part of a two-way lattice partition.
//!
//! The stable lattice is split by a membership oracle into `L1`, a
//! sublattice, and `L2`, its complement, which must be a join
//! semi-sublattice (closed under union of closed sets). [`find_bouquet`]
//! returns edges whose separation characterises `L2`: a closed set generates
//! a matching of `L1` iff it separates no edge. The edges come grouped into
//! flowers: one tail and its pairwise incomparable heads, with all tails on a
//! chain.
//!
//! When `L2` is closed under meet instead, the search runs on the dual poset
//! ([`Orientation::Dual`]), where a closed set `D` stands for the primal
//! closed set `Π \ D` and a dual edge `(u, v)` is the primal edge `(v, u)`.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::compression::{crosses, separates, Edge, EdgeSet};
use crate::matching::Matching;
use crate::order::{Elem, Order};
use crate::rotations::RotationPoset;

/// Decides membership in `L1` for stable matchings.
pub trait MembershipOracle {
    fn in_l1(&mut self, m: &Matching) -> bool;
}

impl<F: FnMut(&Matching) -> bool> MembershipOracle for F {
    fn in_l1(&mut self, m: &Matching) -> bool {
        self(m)
    }
}

/// Which way the search runs relative to the rotation poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `L2` is closed under join; search the poset itself.
    Direct,
    /// `L2` is closed under meet; search the dual poset.
    Dual,
}

/// Classification of a probe set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    L1,
    L2,
    /// Not a proper closed set; generates no matching.
    Improper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flower {
    pub tail: Elem,
    pub heads: Vec<Elem>,
}

/// Flowers in the order they were found (decreasing tails), with ids in the
/// orientation the search ran in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bouquet {
    pub orientation: Orientation,
    pub flowers: Vec<Flower>,
}

impl Bouquet {
    pub fn is_empty(&self) -> bool {
        self.flowers.is_empty()
    }

    /// Edges `(tail, head)` in the search orientation.
    pub fn working_edges(&self) -> Vec<Edge> {
        self.flowers
            .iter()
            .flat_map(|f| f.heads.iter().map(move |&h| (f.tail, h)))
            .collect()
    }

    /// Edges over the rotation poset itself.
    pub fn edges(&self) -> EdgeSet {
        let flip = self.orientation == Orientation::Dual;
        self.working_edges()
            .into_iter()
            .map(|(u, v)| if flip { (v, u) } else { (u, v) })
            .collect()
    }

    /// One line per flower, `tail: head head ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.flowers {
            let heads: Vec<String> = f.heads.iter().map(|h| h.to_string()).collect();
            out.push_str(&format!("{}: {}\n", f.tail, heads.join(" ")));
        }
        out
    }
}

/// What one round of the search saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    /// Splitting set at the start of the round.
    pub splitting: FixedBitSet,
    pub tail: Elem,
    /// The tail was the sink, taken because the top matching is not in `L1`.
    pub sink_tail: bool,
    /// Candidates examined while looking for the tail.
    pub tail_candidates: Vec<Elem>,
    pub x: Vec<Elem>,
    pub y: FixedBitSet,
    pub heads: Vec<Elem>,
    /// The flower was `{s}` because `X` was empty.
    pub shortcut: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleStats {
    /// Probes issued, cached or not.
    pub queries: usize,
    /// Probes that reached the oracle.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BouquetRun {
    pub bouquet: Bouquet,
    pub rounds: Vec<Round>,
    pub stats: OracleStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BouquetError {
    #[error("tail candidates {candidates:?} have no unique maximum; the partition is not valid for this search")]
    AmbiguousTail { candidates: Vec<Elem> },
    #[error("no head found for tail {tail} (Y = {y:?}); the partition is not valid for this search")]
    EmptyFlower { tail: Elem, y: Vec<Elem> },
    #[error("flower at tail {tail} has heads {heads:?}; both parts must be sublattices for a canonical path")]
    NotSettingI { tail: Elem, heads: Vec<Elem> },
}

/// Result of a tail search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailSearch {
    Tail(Elem),
    NoTail,
    /// Candidates exist but have no unique maximum.
    Ambiguous(Vec<Elem>),
}

/// The search state: an order, a cached probe and counters.
pub struct Search<'a, P> {
    order: &'a Order,
    probe: P,
    cache: HashMap<FixedBitSet, bool>,
    stats: OracleStats,
}

impl<'a, P: FnMut(&FixedBitSet) -> bool> Search<'a, P> {
    /// `probe` gets a proper closed set of `order` and says whether its
    /// matching is in `L1`.
    pub fn new(order: &'a Order, probe: P) -> Self {
        Search {
            order,
            probe,
            cache: HashMap::new(),
            stats: OracleStats::default(),
        }
    }

    pub fn stats(&self) -> OracleStats {
        self.stats
    }

    pub fn part(&mut self, set: &FixedBitSet) -> Part {
        if set.is_clear() || !set.contains(self.order.source()) || set.contains(self.order.sink()) {
            return Part::Improper;
        }
        debug_assert!(self.order.is_closed(set));
        self.stats.queries += 1;
        let in_l1 = match self.cache.get(set) {
            Some(&b) => b,
            None => {
                self.stats.evaluations += 1;
                let b = (self.probe)(set);
                self.cache.insert(set.clone(), b);
                b
            }
        };
        if in_l1 {
            Part::L1
        } else {
            Part::L2
        }
    }

    fn tail_candidates(&mut self, splitting: &FixedBitSet) -> Vec<Elem> {
        let order = self.order;
        let mut v = Vec::new();
        for &x in order.topo_order() {
            if !splitting.contains(x) {
                continue;
            }
            let mut keep = splitting.clone();
            keep.difference_with(order.above(x));
            if self.part(&keep) != Part::L1 {
                continue;
            }
            let mut drop = keep;
            drop.set(x, false);
            if self.part(&drop) == Part::L2 {
                v.push(x);
            }
        }
        v
    }

    /// The unique maximal `v` in `splitting` such that `S \ I'_v` is in
    /// `L1` and `S \ J'_v` is in `L2`, where `S` is the splitting set.
    ///
    /// Probing inside `S` rather than the whole poset keeps heads of flowers
    /// already found (which lie outside `S`) out of the probe sets.
    pub fn find_next_tail(&mut self, splitting: &FixedBitSet) -> TailSearch {
        let v = self.tail_candidates(splitting);
        match unique_max(self.order, &v) {
            Some(r) => TailSearch::Tail(r),
            None if v.is_empty() => TailSearch::NoTail,
            None => TailSearch::Ambiguous(v),
        }
    }

    /// Heads of the flower at `tail`, with the intermediate sets.
    pub fn find_flower(&mut self, splitting: &FixedBitSet, tail: Elem) -> Result<FlowerStep, BouquetError> {
        let order = self.order;
        let mut x = Vec::new();
        let mut y = order.empty_set();
        for v in order.below(tail).ones() {
            let j = order.down_closed(v);
            if self.part(&j) == Part::L1 {
                x.push(v);
                y.union_with(&j);
            }
        }
        if y.is_clear() {
            let mut bottom = order.empty_set();
            bottom.insert(order.source());
            if self.part(&bottom) == Part::L2 {
                return Ok(FlowerStep {
                    heads: vec![order.source()],
                    x,
                    y,
                    shortcut: true,
                });
            }
        }
        let mut heads = Vec::new();
        for &v in order.topo_order() {
            if !splitting.contains(v) {
                continue;
            }
            let mut with_below = y.clone();
            with_below.union_with(order.below(v));
            if self.part(&with_below) != Part::L1 {
                continue;
            }
            with_below.insert(v);
            if self.part(&with_below) == Part::L2 {
                heads.push(v);
            }
        }
        if heads.is_empty() {
            return Err(BouquetError::EmptyFlower {
                tail,
                y: y.ones().collect(),
            });
        }
        heads.sort_unstable();
        Ok(FlowerStep {
            heads,
            x,
            y,
            shortcut: false,
        })
    }

    /// Runs the whole search.
    pub fn run(mut self, orientation: Orientation) -> Result<BouquetRun, BouquetError> {
        let order = self.order;
        let mut splitting = order.full_set();
        let mut flowers = Vec::new();
        let mut rounds = Vec::new();

        let mut below_top = order.full_set();
        below_top.set(order.sink(), false);
        let mut next = if self.part(&below_top) == Part::L1 {
            self.next_tail(&splitting)?
        } else {
            Some((order.sink(), true, Vec::new()))
        };

        while let Some((tail, sink_tail, tail_candidates)) = next {
            let step = self.find_flower(&splitting, tail)?;
            rounds.push(Round {
                splitting: splitting.clone(),
                tail,
                sink_tail,
                tail_candidates,
                x: step.x,
                y: step.y,
                heads: step.heads.clone(),
                shortcut: step.shortcut,
            });
            for &u in step.heads.iter().chain(std::iter::once(&tail)) {
                splitting.difference_with(&order.up_closed(u));
            }
            flowers.push(Flower {
                tail,
                heads: step.heads,
            });
            next = self.next_tail(&splitting)?;
        }

        Ok(BouquetRun {
            bouquet: Bouquet { orientation, flowers },
            rounds,
            stats: self.stats,
        })
    }

    fn next_tail(&mut self, splitting: &FixedBitSet) -> Result<Option<(Elem, bool, Vec<Elem>)>, BouquetError> {
        let v = self.tail_candidates(splitting);
        match unique_max(self.order, &v) {
            Some(r) => Ok(Some((r, false, v))),
            None if v.is_empty() => Ok(None),
            None => Err(BouquetError::AmbiguousTail { candidates: v }),
        }
    }
}

/// Output of [`Search::find_flower`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowerStep {
    pub heads: Vec<Elem>,
    pub x: Vec<Elem>,
    pub y: FixedBitSet,
    pub shortcut: bool,
}

fn unique_max(order: &Order, v: &[Elem]) -> Option<Elem> {
    v.iter()
        .copied()
        .find(|&m| v.iter().all(|&w| w == m || order.precedes(w, m)))
}

/// The order the search runs on for `orientation`.
pub fn working_order(poset: &RotationPoset, orientation: Orientation) -> Order {
    match orientation {
        Orientation::Direct => poset.order().clone(),
        Orientation::Dual => poset.order().dual(),
    }
}

/// Finds a bouquet defining `L1` over the rotation poset of `poset`.
pub fn find_bouquet<O: MembershipOracle + ?Sized>(
    poset: &RotationPoset,
    oracle: &mut O,
    orientation: Orientation,
) -> Result<BouquetRun, BouquetError> {
    let order = working_order(poset, orientation);
    find_bouquet_in(poset, &order, oracle, orientation)
}

/// As [`find_bouquet`], reusing an order already built by
/// [`working_order`].
pub fn find_bouquet_in<O: MembershipOracle + ?Sized>(
    poset: &RotationPoset,
    order: &Order,
    oracle: &mut O,
    orientation: Orientation,
) -> Result<BouquetRun, BouquetError> {
    let probe = |set: &FixedBitSet| {
        let m = match orientation {
            Orientation::Direct => poset.matching_of_bits(set),
            Orientation::Dual => poset.matching_of_bits(&order.complement(set)),
        };
        oracle.in_l1(&m)
    };
    Search::new(order, probe).run(orientation)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BouquetViolation {
    #[error("tails {0} and {1} are incomparable")]
    TailsIncomparable(Elem, Elem),
    #[error("element {0} is both a head and a tail")]
    PathOfLengthTwo(Elem),
    #[error("heads {1} and {2} of tail {0} are comparable")]
    HeadsComparable(Elem, Elem, Elem),
    #[error("no recorded splitting set separates the flowers of tails {0} and {1}")]
    NoSplittingSet(Elem, Elem),
}

/// Checks the structural conditions on a bouquet found by a run: tails form
/// a chain, no element is both head and tail, heads of one flower are
/// incomparable, and for tails `r_i < r_j` the splitting set recorded when
/// `r_i` was found contains the flower of `r_i`, misses the flower of `r_j`
/// and neither separates nor crosses any edge.
pub fn verify_bouquet(order: &Order, run: &BouquetRun) -> Result<(), BouquetViolation> {
    let flowers = &run.bouquet.flowers;
    for (i, a) in flowers.iter().enumerate() {
        for b in &flowers[i + 1..] {
            if !order.comparable(a.tail, b.tail) {
                return Err(BouquetViolation::TailsIncomparable(a.tail, b.tail));
            }
        }
    }
    for f in flowers {
        if flowers.iter().any(|g| g.heads.contains(&f.tail)) {
            return Err(BouquetViolation::PathOfLengthTwo(f.tail));
        }
        for (i, &a) in f.heads.iter().enumerate() {
            for &b in &f.heads[i + 1..] {
                if order.comparable(a, b) {
                    return Err(BouquetViolation::HeadsComparable(f.tail, a, b));
                }
            }
        }
    }
    let edges = run.bouquet.working_edges();
    for (i, fi) in flowers.iter().enumerate() {
        for fj in flowers {
            if !order.precedes(fi.tail, fj.tail) {
                continue;
            }
            let s = &run.rounds[i].splitting;
            let ok = s.contains(fi.tail)
                && fi.heads.iter().all(|&h| s.contains(h))
                && !s.contains(fj.tail)
                && fj.heads.iter().all(|&h| !s.contains(h))
                && order.is_closed(s)
                && edges.iter().all(|&e| !separates(s, e) && !crosses(s, e));
            if !ok {
                return Err(BouquetViolation::NoSplittingSet(fi.tail, fj.tail));
            }
        }
    }
    Ok(())
}

/// The alternating path of a partition into two sublattices.
///
/// `vertices` runs from `t` to `s`, alternating bouquet edges `r -> h` with
/// connecting steps `h -> r'`. A closed set generates an `L1` matching iff
/// for some pair `(a, b)` in `pairs` it contains `a` but not `b`. An empty
/// bouquet gives no vertices and the single pair `(s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPath {
    pub vertices: Vec<Elem>,
    pub pairs: Vec<(Elem, Elem)>,
}

impl CanonicalPath {
    pub fn from_bouquet(order: &Order, bouquet: &Bouquet) -> Result<CanonicalPath, BouquetError> {
        let (s, t) = (order.source(), order.sink());
        if bouquet.is_empty() {
            return Ok(CanonicalPath {
                vertices: Vec::new(),
                pairs: vec![(s, t)],
            });
        }
        let mut links = Vec::with_capacity(bouquet.flowers.len());
        for f in &bouquet.flowers {
            match f.heads[..] {
                [h] => links.push((f.tail, h)),
                _ => {
                    return Err(BouquetError::NotSettingI {
                        tail: f.tail,
                        heads: f.heads.clone(),
                    })
                }
            }
        }
        let mut vertices = vec![t];
        let mut pairs = Vec::new();
        let mut prev = t;
        for &(r, h) in &links {
            if r != prev {
                vertices.push(r);
                pairs.push((r, prev));
            }
            vertices.push(h);
            prev = h;
        }
        if prev != s {
            vertices.push(s);
            pairs.push((s, prev));
        }
        Ok(CanonicalPath { vertices, pairs })
    }

    pub fn in_l1(&self, set: &FixedBitSet) -> bool {
        self.pairs.iter().any(|&(a, b)| set.contains(a) && !set.contains(b))
    }
}

/// Runs the search directly and extracts the canonical path. Both parts of
/// the partition must be sublattices.
pub fn canonical_path<O: MembershipOracle + ?Sized>(poset: &RotationPoset, oracle: &mut O) -> Result<CanonicalPath, BouquetError> {
    let run = find_bouquet(poset, oracle, Orientation::Direct)?;
    CanonicalPath::from_bouquet(poset.order(), &run.bouquet)
}
