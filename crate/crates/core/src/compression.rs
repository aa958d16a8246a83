//! Compressions of a rotation poset.
//!
//! A compression partitions the poset into blocks (meta-rotations) ordered by
//! a DAG; its proper closed sets generate a sublattice of the stable lattice.
//! Compressions come from directed edge sets: add the edges to the Hasse
//! diagram and shrink strongly connected components. A closed set `I`
//! *separates* an edge `(u, v)` when `v ∈ I` and `u ∉ I`; the sublattice
//! generated by the shrunk poset is exactly the set of matchings whose closed
//! sets separate no edge.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::instance::Instance;
use crate::matching::Matching;
use crate::order::{Elem, Order};
use crate::rotations::{RotationError, RotationPoset};

/// A directed edge `(tail, head)`.
pub type Edge = (Elem, Elem);

/// `head ∈ set` and `tail ∉ set`.
#[inline]
pub fn separates(set: &FixedBitSet, (tail, head): Edge) -> bool {
    set.contains(head) && !set.contains(tail)
}

/// `tail ∈ set` and `head ∉ set`.
#[inline]
pub fn crosses(set: &FixedBitSet, (tail, head): Edge) -> bool {
    set.contains(tail) && !set.contains(head)
}

/// A sorted, duplicate-free list of edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet(Vec<Edge>);

impl EdgeSet {
    pub fn new(edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut v: Vec<Edge> = edges.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        EdgeSet(v)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet::new(self.iter().chain(other.iter()))
    }

    /// True iff `set` separates at least one edge.
    pub fn separated_by(&self, set: &FixedBitSet) -> bool {
        self.iter().any(|e| separates(set, e))
    }

    /// Parses `u v` per line (blank lines and `#` comments skipped).
    pub fn parse(text: &str) -> Result<EdgeSet, EdgeParseError> {
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
            let bad = || EdgeParseError {
                line: i + 1,
                text: raw.to_string(),
            };
            if nums.len() != 2 {
                return Err(bad());
            }
            let u = nums[0].parse().map_err(|_| bad())?;
            let v = nums[1].parse().map_err(|_| bad())?;
            edges.push((u, v));
        }
        Ok(EdgeSet::new(edges))
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        EdgeSet::new(iter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: expected two element ids, got {text:?}")]
pub struct EdgeParseError {
    pub line: usize,
    pub text: String,
}

/// The four sets attached to an element `v`: `I_v` (strictly below),
/// `J_v` (`v` and below), `I'_v` (strictly above), `J'_v` (`v` and above).
///
/// `I_v` and `J_v` are closed; so are the complements of `I'_v` and `J'_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownSets {
    pub i: FixedBitSet,
    pub j: FixedBitSet,
    pub i_prime: FixedBitSet,
    pub j_prime: FixedBitSet,
}

impl DownSets {
    pub fn of(order: &Order, v: Elem) -> DownSets {
        DownSets {
            i: order.below(v).clone(),
            j: order.down_closed(v),
            i_prime: order.above(v).clone(),
            j_prime: order.up_closed(v),
        }
    }
}

/// A compression: blocks of base elements and their order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaPoset {
    base_len: usize,
    blocks: Vec<Vec<Elem>>,
    block_of: Vec<usize>,
    order: Order,
}

impl MetaPoset {
    /// Blocks sorted by smallest member, members ascending.
    fn from_blocks(base_len: usize, mut blocks: Vec<Vec<Elem>>, base_source: Elem, base_sink: Elem, relations: Vec<(Elem, Elem)>) -> MetaPoset {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![usize::MAX; base_len];
        for (k, b) in blocks.iter().enumerate() {
            for &e in b {
                block_of[e] = k;
            }
        }
        let rels: Vec<(usize, usize)> = relations
            .into_iter()
            .map(|(u, v)| (block_of[u], block_of[v]))
            .filter(|(a, b)| a != b)
            .collect();
        let a_s = block_of[base_source];
        let a_t = block_of[base_sink];
        let order = Order::from_relations(blocks.len(), a_s, a_t, rels).expect("condensation is acyclic");
        MetaPoset {
            base_len,
            blocks,
            block_of,
            order,
        }
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn blocks(&self) -> &[Vec<Elem>] {
        &self.blocks
    }

    pub fn block_of(&self, e: Elem) -> usize {
        self.block_of[e]
    }

    /// Order on block ids.
    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn a_s(&self) -> usize {
        self.order.source()
    }

    pub fn a_t(&self) -> usize {
        self.order.sink()
    }

    /// Every strict precedence between blocks.
    pub fn dag_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.blocks.len() {
            for a in self.order.below(b).ones() {
                out.push((a, b));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        self.order.hasse_edges()
    }

    /// Union of the blocks in `meta_set`, over base element ids.
    pub fn expand(&self, meta_set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.base_len);
        for k in meta_set.ones() {
            for &e in &self.blocks[k] {
                out.insert(e);
            }
        }
        out
    }

    /// Blocks listed one per line as `k: e e e`, then covering pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("# block {} contains s, block {} contains t\n", self.a_s(), self.a_t());
        out.push_str(&format!("blocks {}\n", self.blocks.len()));
        for (k, b) in self.blocks.iter().enumerate() {
            let ids: Vec<String> = b.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{k}: {}\n", ids.join(" ")));
        }
        out.push_str(&format!("dag {}\n", self.hasse_edges().len()));
        for &(a, b) in self.hasse_edges() {
            out.push_str(&format!("{a} -> {b}\n"));
        }
        out
    }
}

impl fmt::Display for MetaPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Adds `edges` to the Hasse diagram of `order` and contracts strongly
/// connected components.
pub fn shrink(order: &Order, edges: &EdgeSet) -> MetaPoset {
    let len = order.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(len, order.hasse_edges().len() + edges.len());
    for _ in 0..len {
        g.add_node(());
    }
    let all: Vec<Edge> = order.hasse_edges().iter().copied().chain(edges.iter()).collect();
    for &(u, v) in &all {
        g.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    let blocks: Vec<Vec<Elem>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| c.into_iter().map(NodeIndex::index).collect())
        .collect();
    MetaPoset::from_blocks(len, blocks, order.source(), order.sink(), all)
}

/// Proper closed sets of `meta`, expanded to base elements.
pub fn closed_sets_of_meta(meta: &MetaPoset) -> Vec<FixedBitSet> {
    meta.order
        .proper_closed_sets()
        .into_iter()
        .map(|s| meta.expand(&s))
        .collect()
}

/// Stable matchings whose closed sets separate no edge, in closed-set
/// enumeration order. Exponential; for small instances.
pub fn sublattice_from_edges(poset: &RotationPoset, edges: &EdgeSet) -> Vec<Matching> {
    poset
        .order()
        .proper_closed_sets()
        .into_iter()
        .filter(|s| !edges.separated_by(s))
        .map(|s| poset.matching_of_bits(&s))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompressionError {
    #[error("the sublattice is empty")]
    Empty,
    #[error("matching {index} is not usable: {source}")]
    BadMatching { index: usize, source: RotationError },
    #[error("the set is not closed under {0}")]
    NotSublattice(&'static str),
    #[error("block differences do not partition the poset")]
    NotPartition,
}

/// Rebuilds a compression generating the sublattice `sub` (given as an
/// explicit list of stable matchings).
///
/// Blocks are the differences `I_j \ I_i` over covering pairs of the
/// sublattice, plus everything below its bottom (with `s`) and everything
/// above its top (with `t`). A block `A` is preceded by every block contained
/// in the smallest member of the sublattice that contains `A`.
pub fn compression_from_sublattice(poset: &RotationPoset, inst: &Instance, sub: &[Matching]) -> Result<MetaPoset, CompressionError> {
    if sub.is_empty() {
        return Err(CompressionError::Empty);
    }
    let mut sets: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut members: Vec<FixedBitSet> = Vec::new();
    for (index, m) in sub.iter().enumerate() {
        let cs = poset
            .closed_set_from_matching(inst, m)
            .map_err(|source| CompressionError::BadMatching { index, source })?;
        let bits = cs.into_bits();
        if sets.insert(bits.ones().map(|e| e as u32).collect()) {
            members.push(bits);
        }
    }
    let contains = |s: &FixedBitSet| members.iter().any(|m| m == s);
    for a in &members {
        for b in &members {
            let mut u = a.clone();
            u.union_with(b);
            if !contains(&u) {
                return Err(CompressionError::NotSublattice("join"));
            }
            let mut i = a.clone();
            i.intersect_with(b);
            if !contains(&i) {
                return Err(CompressionError::NotSublattice("meet"));
            }
        }
    }

    let len = poset.len();
    let order = poset.order();
    let mut bottom = members[0].clone();
    let mut top = members[0].clone();
    for m in &members[1..] {
        bottom.intersect_with(m);
        top.union_with(m);
    }
    let mut blocks: Vec<Vec<Elem>> = vec![bottom.ones().collect(), order.complement(&top).ones().collect()];
    let mut middle: BTreeSet<Vec<Elem>> = BTreeSet::new();
    for a in &members {
        for b in &members {
            if a == b || !a.is_subset(b) {
                continue;
            }
            let covered = members
                .iter()
                .all(|c| c == a || c == b || !(a.is_subset(c) && c.is_subset(b)));
            if covered {
                middle.insert(b.difference(a).collect());
            }
        }
    }
    blocks.extend(middle);
    let mut seen = FixedBitSet::with_capacity(len);
    for b in &blocks {
        for &e in b {
            if seen.put(e) {
                return Err(CompressionError::NotPartition);
            }
        }
    }
    if seen.count_ones(..) != len {
        return Err(CompressionError::NotPartition);
    }

    let mut relations = Vec::new();
    for a in &blocks[2..] {
        let mut hull = order.full_set();
        for m in &members {
            if a.iter().all(|&e| m.contains(e)) {
                hull.intersect_with(m);
            }
        }
        for b in &blocks[2..] {
            if b != a && b.iter().all(|&e| hull.contains(e)) {
                relations.push((b[0], a[0]));
            }
        }
    }
    Ok(MetaPoset::from_blocks(len, blocks, order.source(), order.sink(), relations))
}

/// An edge set whose shrink reproduces `meta`: a cycle through each block
/// plus one edge per covering pair of blocks.
pub fn edges_of_compression(meta: &MetaPoset) -> EdgeSet {
    let mut edges = Vec::new();
    for b in meta.blocks() {
        if b.len() > 1 {
            for w in b.windows(2) {
                edges.push((w[0], w[1]));
            }
            edges.push((b[b.len() - 1], b[0]));
        }
    }
    for &(a, b) in meta.hasse_edges() {
        edges.push((meta.blocks[a][0], meta.blocks[b][0]));
    }
    EdgeSet::new(edges)
}

/// Drops edges that do not change the generated sublattice, keeping a set in
/// which every edge is separated by some closed set that separates no other
/// kept edge.
///
/// Edges are examined by increasing topological position of the tail. An
/// edge `(u, v)` is dropped when the smallest set containing `s` and `v`
/// that is closed under the order and the other kept edges already contains
/// `u` or `t`.
pub fn minimize_edges(order: &Order, edges: &EdgeSet) -> EdgeSet {
    let len = order.len();
    let mut rank = vec![0usize; len];
    for (i, &v) in order.topo_order().iter().enumerate() {
        rank[v] = i;
    }
    let mut work: Vec<Edge> = edges.iter().collect();
    work.sort_by_key(|&(u, v)| (rank[u], rank[v]));
    let mut kept = vec![true; work.len()];
    for i in 0..work.len() {
        let (u, v) = work[i];
        let mut into: Vec<Vec<Elem>> = vec![Vec::new(); len];
        for (j, &(a, b)) in work.iter().enumerate() {
            if j != i && kept[j] {
                into[b].push(a);
            }
        }
        let mut reach = order.down_closed(v);
        reach.union_with(&order.down_closed(order.source()));
        let mut queue: VecDeque<Elem> = reach.ones().collect();
        while let Some(x) = queue.pop_front() {
            for &a in &into[x] {
                if !reach.contains(a) {
                    for y in order.down_closed(a).ones() {
                        if !reach.put(y) {
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
        if reach.contains(u) || reach.contains(order.sink()) {
            kept[i] = false;
        }
    }
    EdgeSet::new(work.into_iter().zip(kept).filter(|&(_, k)| k).map(|(e, _)| e))
}
