//! Perfect matchings, blocking pairs, deferred acceptance and the lattice
//! operations on stable matchings.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::instance::{Instance, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("partner list has length {found}, expected {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("girl {girl} is matched to more than one boy")]
    NotPerfect { girl: usize },
    #[error("girl index {girl} out of range for n = {n}")]
    OutOfRange { girl: usize, n: usize },
}

/// A perfect matching stored as the girl assigned to each boy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    partner_of_boy: Vec<usize>,
}

impl Matching {
    pub fn new(partner_of_boy: Vec<usize>) -> Result<Self, MatchingError> {
        let n = partner_of_boy.len();
        let mut taken = vec![false; n];
        for &g in &partner_of_boy {
            if g >= n {
                return Err(MatchingError::OutOfRange { girl: g, n });
            }
            if std::mem::replace(&mut taken[g], true) {
                return Err(MatchingError::NotPerfect { girl: g });
            }
        }
        Ok(Matching { partner_of_boy })
    }

    /// Builds a matching from `(boy, girl)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, MatchingError> {
        if pairs.len() != n {
            return Err(MatchingError::WrongSize {
                expected: n,
                found: pairs.len(),
            });
        }
        let mut partner = vec![usize::MAX; n];
        for &(b, g) in pairs {
            if b >= n {
                return Err(MatchingError::WrongSize {
                    expected: n,
                    found: b + 1,
                });
            }
            partner[b] = g;
        }
        Matching::new(partner)
    }

    pub(crate) fn from_vec_unchecked(partner_of_boy: Vec<usize>) -> Self {
        debug_assert!(Matching::new(partner_of_boy.clone()).is_ok());
        Matching { partner_of_boy }
    }

    pub fn n(&self) -> usize {
        self.partner_of_boy.len()
    }

    #[inline]
    pub fn partner_of_boy(&self, b: usize) -> usize {
        self.partner_of_boy[b]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner_of_boy
    }

    pub fn partner_of_girl_table(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (b, &g) in self.partner_of_boy.iter().enumerate() {
            out[g] = b;
        }
        out
    }

    pub fn contains(&self, b: usize, g: usize) -> bool {
        self.partner_of_boy[b] == g
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partner_of_boy.iter().copied().enumerate()
    }

    /// Sum of `weight(b, g)` over the pairs, accumulated in boy order.
    pub fn weight_by(&self, mut weight: impl FnMut(usize, usize) -> f64) -> f64 {
        self.pairs().map(|(b, g)| weight(b, g)).sum()
    }
}

/// Boys print as letters when there are at most 26 of them (`{a1,b2}`),
/// otherwise as `boy-girl` numbers.
impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.n() <= 26;
        f.write_str("{")?;
        for (b, g) in self.pairs() {
            if b > 0 {
                f.write_str(",")?;
            }
            if letters {
                write!(f, "{}{}", (b'a' + b as u8) as char, g + 1)?;
            } else {
                write!(f, "{}-{}", b + 1, g + 1)?;
            }
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockingPair {
    pub boy: usize,
    pub girl: usize,
}

/// All pairs that block `m` under `inst`, ordered by boy then girl.
pub fn blocking_pairs(inst: &Instance, m: &Matching) -> Vec<BlockingPair> {
    let girl_partner = m.partner_of_girl_table();
    let mut out = Vec::new();
    for b in 0..inst.n() {
        let mine = m.partner_of_boy(b);
        for &g in &inst.boy_prefs()[b] {
            if g == mine {
                break;
            }
            if inst.girl_prefers(g, b, girl_partner[g]) {
                out.push(BlockingPair { boy: b, girl: g });
            }
        }
    }
    out.sort();
    out
}

pub fn is_stable(inst: &Instance, m: &Matching) -> bool {
    let girl_partner = m.partner_of_girl_table();
    (0..inst.n()).all(|b| {
        let mine = m.partner_of_boy(b);
        inst.boy_prefs()[b]
            .iter()
            .take_while(|&&g| g != mine)
            .all(|&g| !inst.girl_prefers(g, b, girl_partner[g]))
    })
}

/// Proposal-queue deferred acceptance. Boys proposing yields the boy-optimal
/// matching, girls proposing the girl-optimal one.
pub fn deferred_acceptance(inst: &Instance, proposing: Side) -> Matching {
    let n = inst.n();
    let (proposer_prefs, accepts) = match proposing {
        Side::Boy => (inst.boy_prefs(), Side::Girl),
        Side::Girl => (inst.girl_prefs(), Side::Boy),
    };
    let prefers = |receiver: usize, x: usize, y: usize| match accepts {
        Side::Girl => inst.girl_prefers(receiver, x, y),
        Side::Boy => inst.boy_prefers(receiver, x, y),
    };
    let mut next = vec![0usize; n];
    let mut held: Vec<Option<usize>> = vec![None; n];
    let mut free: VecDeque<usize> = (0..n).collect();
    while let Some(p) = free.pop_front() {
        let r = proposer_prefs[p][next[p]];
        next[p] += 1;
        match held[r] {
            None => held[r] = Some(p),
            Some(q) if prefers(r, p, q) => {
                held[r] = Some(p);
                free.push_back(q);
            }
            Some(_) => free.push_back(p),
        }
    }
    let mut partner_of_boy = vec![0; n];
    for (r, p) in held.into_iter().enumerate() {
        let p = p.expect("complete lists give a perfect matching");
        match proposing {
            Side::Boy => partner_of_boy[p] = r,
            Side::Girl => partner_of_boy[r] = p,
        }
    }
    Matching::from_vec_unchecked(partner_of_boy)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("inputs have different sizes ({0} and {1})")]
    SizeMismatch(usize, usize),
    #[error("combining the inputs does not give a matching; are both stable? ({0})")]
    NotAMatching(MatchingError),
}

fn combine(inst: &Instance, m1: &Matching, m2: &Matching, better: bool) -> Result<Matching, LatticeError> {
    if m1.n() != m2.n() || m1.n() != inst.n() {
        return Err(LatticeError::SizeMismatch(m1.n(), m2.n()));
    }
    let partners = (0..inst.n())
        .map(|b| {
            let (x, y) = (m1.partner_of_boy(b), m2.partner_of_boy(b));
            if inst.boy_prefers(b, x, y) == better {
                x
            } else {
                y
            }
        })
        .collect();
    Matching::new(partners).map_err(LatticeError::NotAMatching)
}

/// Each boy takes the better of his two partners.
pub fn meet(inst: &Instance, m1: &Matching, m2: &Matching) -> Result<Matching, LatticeError> {
    combine(inst, m1, m2, true)
}

/// Each boy takes the worse of his two partners.
pub fn join(inst: &Instance, m1: &Matching, m2: &Matching) -> Result<Matching, LatticeError> {
    combine(inst, m1, m2, false)
}

/// True iff every boy weakly prefers his partner in `m1` to the one in `m2`.
pub fn dominates(inst: &Instance, m1: &Matching, m2: &Matching) -> bool {
    (0..inst.n()).all(|b| inst.boy_rank(b, m1.partner_of_boy(b)) <= inst.boy_rank(b, m2.partner_of_boy(b)))
}
