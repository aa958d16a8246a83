//! Finite posets with a distinguished bottom (`source`) and top (`sink`).
//!
//! Elements are dense `usize` ids. The strict down-set and up-set of every
//! element are stored as bitsets, which makes closure tests and the set
//! algebra in the bouquet search cheap.

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Element id inside an [`Order`].
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation contains a cycle through element {0}")]
    Cycle(Elem),
    #[error("element {elem} out of range for an order of size {len}")]
    OutOfRange { elem: Elem, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    source: Elem,
    sink: Elem,
    preds: Vec<FixedBitSet>,
    succs: Vec<FixedBitSet>,
    hasse: Vec<(Elem, Elem)>,
    topo: Vec<Elem>,
}

impl Order {
    /// Builds the order generated by `relations` (any set of `a < b` pairs
    /// whose transitive closure is the intended order). Unless
    /// `source == sink`, the source is put below and the sink above every
    /// other element.
    pub fn from_relations(
        len: usize,
        source: Elem,
        sink: Elem,
        relations: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Order, OrderError> {
        for e in [source, sink] {
            if e >= len {
                return Err(OrderError::OutOfRange { elem: e, len });
            }
        }
        let mut gen_in: Vec<Vec<Elem>> = vec![Vec::new(); len];
        for (a, b) in relations {
            if a >= len || b >= len {
                return Err(OrderError::OutOfRange { elem: a.max(b), len });
            }
            if a == b {
                return Err(OrderError::Cycle(a));
            }
            gen_in[b].push(a);
        }
        if source != sink {
            for v in 0..len {
                if v != source {
                    gen_in[v].push(source);
                }
                if v != sink && v != source {
                    gen_in[sink].push(v);
                }
            }
        }
        for list in &mut gen_in {
            list.sort_unstable();
            list.dedup();
        }

        // Kahn's algorithm, smallest id first so the order is deterministic.
        let mut indegree: Vec<usize> = gen_in.iter().map(Vec::len).collect();
        let mut gen_out: Vec<Vec<Elem>> = vec![Vec::new(); len];
        for (b, list) in gen_in.iter().enumerate() {
            for &a in list {
                gen_out[a].push(b);
            }
        }
        let mut ready: std::collections::BTreeSet<Elem> =
            (0..len).filter(|&v| indegree[v] == 0).collect();
        let mut topo = Vec::with_capacity(len);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &w in &gen_out[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if topo.len() != len {
            // Walk back through unfinished predecessors until one repeats.
            let mut seen = vec![false; len];
            let mut v = (0..len).find(|&v| indegree[v] > 0).unwrap_or(0);
            while !seen[v] {
                seen[v] = true;
                v = gen_in[v].iter().copied().find(|&u| indegree[u] > 0).unwrap_or(v);
            }
            return Err(OrderError::Cycle(v));
        }

        let mut preds = vec![FixedBitSet::with_capacity(len); len];
        for &v in &topo {
            let mut acc = FixedBitSet::with_capacity(len);
            for &u in &gen_in[v] {
                acc.union_with(&preds[u]);
                acc.insert(u);
            }
            preds[v] = acc;
        }
        let mut succs = vec![FixedBitSet::with_capacity(len); len];
        for (v, p) in preds.iter().enumerate() {
            for u in p.ones() {
                succs[u].insert(v);
            }
        }

        // Covering pairs are a subset of the generating pairs: (u, v) covers
        // iff u is below no other generating predecessor of v.
        let mut hasse = Vec::new();
        for (v, into) in gen_in.iter().enumerate() {
            let mut shadow = FixedBitSet::with_capacity(len);
            for &w in into {
                shadow.union_with(&preds[w]);
            }
            for &u in into {
                if !shadow.contains(u) {
                    hasse.push((u, v));
                }
            }
        }
        hasse.sort_unstable();

        Ok(Order {
            source,
            sink,
            preds,
            succs,
            hasse,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn source(&self) -> Elem {
        self.source
    }

    pub fn sink(&self) -> Elem {
        self.sink
    }

    /// Strict precedence `a < b`.
    #[inline]
    pub fn precedes(&self, a: Elem, b: Elem) -> bool {
        self.preds[b].contains(a)
    }

    pub fn comparable(&self, a: Elem, b: Elem) -> bool {
        a == b || self.precedes(a, b) || self.precedes(b, a)
    }

    /// Elements strictly below `v`.
    pub fn below(&self, v: Elem) -> &FixedBitSet {
        &self.preds[v]
    }

    /// Elements strictly above `v`.
    pub fn above(&self, v: Elem) -> &FixedBitSet {
        &self.succs[v]
    }

    /// `v` together with everything below it.
    pub fn down_closed(&self, v: Elem) -> FixedBitSet {
        let mut s = self.preds[v].clone();
        s.insert(v);
        s
    }

    /// `v` together with everything above it.
    pub fn up_closed(&self, v: Elem) -> FixedBitSet {
        let mut s = self.succs[v].clone();
        s.insert(v);
        s
    }

    /// Covering pairs, sorted.
    pub fn hasse_edges(&self) -> &[(Elem, Elem)] {
        &self.hasse
    }

    /// A linear extension; ties are broken by smallest id.
    pub fn topo_order(&self) -> &[Elem] {
        &self.topo
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn complement(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut s = set.clone();
        s.toggle_range(..);
        s
    }

    pub fn is_closed(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|v| self.preds[v].is_subset(set))
    }

    /// Closed, contains the source and misses the sink.
    pub fn is_proper_closed(&self, set: &FixedBitSet) -> bool {
        set.contains(self.source) && !set.contains(self.sink) && self.is_closed(set)
    }

    /// Smallest closed set containing `set`.
    pub fn down_closure(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut out = set.clone();
        for v in set.ones() {
            out.union_with(&self.preds[v]);
        }
        out
    }

    /// The same elements with the order reversed: source and sink swap and
    /// closed sets of the dual are complements of closed sets of `self`.
    pub fn dual(&self) -> Order {
        let mut hasse: Vec<(Elem, Elem)> = self.hasse.iter().map(|&(a, b)| (b, a)).collect();
        hasse.sort_unstable();
        let mut topo = self.topo.clone();
        topo.reverse();
        Order {
            source: self.sink,
            sink: self.source,
            preds: self.succs.clone(),
            succs: self.preds.clone(),
            hasse,
            topo,
        }
    }

    /// Every proper closed set, in a deterministic order. Exponential in the
    /// width of the order; intended for small posets.
    pub fn proper_closed_sets(&self) -> Vec<FixedBitSet> {
        let mut out = Vec::new();
        if self.source == self.sink {
            return out;
        }
        let free: Vec<Elem> = self
            .topo
            .iter()
            .copied()
            .filter(|&v| v != self.source && v != self.sink)
            .collect();
        let mut current = self.empty_set();
        current.insert(self.source);
        self.extend_closed(&free, 0, &mut current, &mut out);
        out
    }

    fn extend_closed(&self, free: &[Elem], at: usize, current: &mut FixedBitSet, out: &mut Vec<FixedBitSet>) {
        if at == free.len() {
            out.push(current.clone());
            return;
        }
        let v = free[at];
        self.extend_closed(free, at + 1, current, out);
        if self.preds[v].is_subset(current) {
            current.insert(v);
            self.extend_closed(free, at + 1, current, out);
            current.set(v, false);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(len: usize, items: &[Elem]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(len);
        for &i in items {
            s.insert(i);
        }
        s
    }

    // 0 = bottom, 1 = top, 2 < 4, 3 < 4
    fn diamond() -> Order {
        Order::from_relations(5, 0, 1, [(2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn closure_and_hasse() {
        let o = diamond();
        assert!(o.precedes(0, 4));
        assert!(o.precedes(2, 1));
        assert!(!o.comparable(2, 3));
        assert_eq!(o.hasse_edges(), &[(0, 2), (0, 3), (2, 4), (3, 4), (4, 1)]);
        assert_eq!(o.topo_order(), &[0, 2, 3, 4, 1]);
    }

    #[test]
    fn redundant_relations_do_not_appear_in_hasse() {
        let o = Order::from_relations(5, 0, 1, [(2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(o.hasse_edges(), &[(0, 2), (2, 3), (3, 4), (4, 1)]);
    }

    #[test]
    fn cycles_are_rejected() {
        assert_eq!(
            Order::from_relations(4, 0, 1, [(2, 3), (3, 2)]).unwrap_err(),
            OrderError::Cycle(2)
        );
        assert!(Order::from_relations(3, 0, 1, [(2, 2)]).is_err());
        assert!(Order::from_relations(3, 0, 1, [(2, 7)]).is_err());
    }

    #[test]
    fn proper_closed_sets_of_diamond() {
        let o = diamond();
        let sets = o.proper_closed_sets();
        assert_eq!(sets.len(), 5);
        assert!(sets.iter().all(|s| o.is_proper_closed(s)));
        assert!(sets.contains(&set(5, &[0, 2, 3, 4])));
        assert!(!o.is_closed(&set(5, &[0, 4])));
    }

    #[test]
    fn dual_swaps_everything() {
        let o = diamond();
        let d = o.dual();
        assert_eq!(d.source(), 1);
        assert!(d.precedes(4, 2));
        for s in o.proper_closed_sets() {
            assert!(d.is_proper_closed(&o.complement(&s)));
        }
        assert_eq!(d.proper_closed_sets().len(), 5);
        assert_eq!(d.dual(), o);
    }

    #[test]
    fn bottom_equal_top_has_no_proper_sets() {
        let o = Order::from_relations(1, 0, 0, []).unwrap();
        assert!(o.proper_closed_sets().is_empty());
    }
}
