//! Brute-force ground truth for small instances.
//!
//! Nothing here uses the rotation machinery or the lattice operations of
//! [`crate::matching`]: stable matchings are found by exhaustive search and
//! meet/join are read off the dominance order.

use thiserror::Error;

use crate::instance::Instance;
use crate::matching::Matching;
use crate::robust::{apply_error, ErrorSpec};

/// Largest `n` enumerated unless another bound is given.
pub const DEFAULT_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the enumeration bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("invalid error: {0}")]
    BadError(String),
}

/// All stable matchings of an instance with their dominance relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSnapshot {
    matchings: Vec<Matching>,
    /// `dominance[i][j]`: every boy weakly prefers matching `i` to `j`.
    dominance: Vec<Vec<bool>>,
}

/// Direct blocking-pair scan.
pub fn stable_in(inst: &Instance, m: &Matching) -> bool {
    let n = inst.n();
    let mut husband = vec![0; n];
    for b in 0..n {
        husband[m.partner_of_boy(b)] = b;
    }
    for b in 0..n {
        for (g, &h) in husband.iter().enumerate() {
            if g != m.partner_of_boy(b)
                && inst.boy_rank(b, g) < inst.boy_rank(b, m.partner_of_boy(b))
                && inst.girl_rank(g, b) < inst.girl_rank(g, h)
            {
                return false;
            }
        }
    }
    true
}

pub fn enumerate_stable(inst: &Instance) -> Result<LatticeSnapshot, OracleError> {
    enumerate_stable_bounded(inst, DEFAULT_BOUND)
}

pub fn enumerate_stable_bounded(inst: &Instance, bound: usize) -> Result<LatticeSnapshot, OracleError> {
    let n = inst.n();
    if n > bound {
        return Err(OracleError::TooLarge { n, bound });
    }
    let mut found = Vec::new();
    let mut partner = vec![usize::MAX; n];
    let mut husband = vec![usize::MAX; n];
    extend(inst, 0, &mut partner, &mut husband, &mut found);
    found.sort();
    let dominance = found
        .iter()
        .map(|x| found.iter().map(|y| weakly_better(inst, x, y)).collect())
        .collect();
    Ok(LatticeSnapshot {
        matchings: found,
        dominance,
    })
}

/// Assigns boys in order, pruning as soon as two assigned couples block.
fn extend(inst: &Instance, b: usize, partner: &mut [usize], husband: &mut [usize], out: &mut Vec<Matching>) {
    let n = inst.n();
    if b == n {
        let m = Matching::new(partner.to_vec()).expect("assignment is a permutation");
        debug_assert!(stable_in(inst, &m));
        out.push(m);
        return;
    }
    for g in 0..n {
        if husband[g] != usize::MAX {
            continue;
        }
        let blocked = (0..b).any(|c| {
            let h = partner[c];
            (inst.boy_rank(b, h) < inst.boy_rank(b, g) && inst.girl_rank(h, b) < inst.girl_rank(h, c))
                || (inst.boy_rank(c, g) < inst.boy_rank(c, h) && inst.girl_rank(g, c) < inst.girl_rank(g, b))
        });
        if blocked {
            continue;
        }
        partner[b] = g;
        husband[g] = b;
        extend(inst, b + 1, partner, husband, out);
        husband[g] = usize::MAX;
    }
    partner[b] = usize::MAX;
}

fn weakly_better(inst: &Instance, x: &Matching, y: &Matching) -> bool {
    (0..inst.n()).all(|b| inst.boy_rank(b, x.partner_of_boy(b)) <= inst.boy_rank(b, y.partner_of_boy(b)))
}

impl LatticeSnapshot {
    /// Sorted by partner vector.
    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn index_of(&self, m: &Matching) -> Option<usize> {
        self.matchings.binary_search(m).ok()
    }

    pub fn dominates(&self, i: usize, j: usize) -> bool {
        self.dominance[i][j]
    }

    /// The matching dominating every other one.
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.dominance[i][j]))
    }

    /// The matching dominated by every other one.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.dominance[j][i]))
    }

    /// Least matching dominating both (each boy takes his better partner).
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let common: Vec<usize> = (0..self.len()).filter(|&k| self.dominance[k][i] && self.dominance[k][j]).collect();
        common.iter().copied().find(|&k| common.iter().all(|&o| self.dominance[o][k]))
    }

    /// Greatest matching dominated by both.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let common: Vec<usize> = (0..self.len()).filter(|&k| self.dominance[i][k] && self.dominance[j][k]).collect();
        common.iter().copied().find(|&k| common.iter().all(|&o| self.dominance[k][o]))
    }

    fn closed_under(&self, subset: &[Matching], op: impl Fn(usize, usize) -> Option<usize>) -> bool {
        let Some(idx) = subset.iter().map(|m| self.index_of(m)).collect::<Option<Vec<usize>>>() else {
            return false;
        };
        idx.iter().all(|&i| {
            idx.iter().all(|&j| match op(i, j) {
                Some(k) => idx.contains(&k),
                None => false,
            })
        })
    }

    pub fn is_join_semi(&self, subset: &[Matching]) -> bool {
        self.closed_under(subset, |i, j| self.join(i, j))
    }

    pub fn is_meet_semi(&self, subset: &[Matching]) -> bool {
        self.closed_under(subset, |i, j| self.meet(i, j))
    }

    pub fn is_sublattice(&self, subset: &[Matching]) -> bool {
        self.is_join_semi(subset) && self.is_meet_semi(subset)
    }
}

/// Matchings stable in `inst` and in every instance obtained by applying one
/// of `errors`, sorted.
pub fn brute_force_robust(inst: &Instance, errors: &[ErrorSpec]) -> Result<Vec<Matching>, OracleError> {
    let snap = enumerate_stable(inst)?;
    let variants = errors
        .iter()
        .map(|e| apply_error(inst, e).map_err(|err| OracleError::BadError(err.to_string())))
        .collect::<Result<Vec<Instance>, _>>()?;
    Ok(snap
        .matchings
        .into_iter()
        .filter(|m| variants.iter().all(|b| stable_in(b, m)))
        .collect())
}
