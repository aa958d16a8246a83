//! Fully robust stable matchings.
//!
//! An error replaces one agent's preference list. A matching is fully robust
//! for a set of errors if it is stable in the base instance and stays stable
//! after any single error is applied. For each error the matchings that
//! survive form a sublattice, defined by a bouquet found with a stability
//! oracle; the union of those edge sets, shrunk, is a compression whose
//! closed sets are exactly the fully robust matchings.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::bouquet::{find_bouquet_in, working_order, BouquetError, BouquetRun, MembershipOracle, Orientation};
use crate::compression::{closed_sets_of_meta, shrink, EdgeSet, MetaPoset};
use crate::flow::FlowNetwork;
use crate::instance::{parse_agent_token, parse_permutation, Instance, InstanceError, ParseError, Side};
use crate::matching::Matching;
use crate::order::{Elem, Order};
use crate::rotations::RotationPoset;

/// Replaces the list of one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorSpec {
    pub side: Side,
    pub agent: usize,
    pub new_list: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErrorFileError {
    #[error("line {line}: expected `boy|girl <agent>: <list>`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: agent `{token}` is not valid for n = {n}")]
    Agent { line: usize, token: String, n: usize },
    #[error(transparent)]
    List(#[from] ParseError),
}

impl ErrorSpec {
    /// Parses one line such as `girl 1: c a b d`. `line` is for diagnostics.
    pub fn parse_line(text: &str, n: usize, line: usize) -> Result<ErrorSpec, ErrorFileError> {
        let syntax = || ErrorFileError::Syntax {
            line,
            text: text.to_string(),
        };
        let (head, list) = text.split_once(':').ok_or_else(syntax)?;
        let mut words = head.split_whitespace();
        let side: Side = words.next().ok_or_else(syntax)?.parse().map_err(|_| syntax())?;
        let token = words.next().ok_or_else(syntax)?;
        if words.next().is_some() {
            return Err(syntax());
        }
        let agent = parse_agent_token(token).filter(|&a| a < n).ok_or_else(|| ErrorFileError::Agent {
            line,
            token: token.to_string(),
            n,
        })?;
        let new_list = parse_permutation(list, n, line)?;
        Ok(ErrorSpec { side, agent, new_list })
    }

    /// Parses an error file: one error per line, `#` comments and blank
    /// lines ignored.
    pub fn parse_file(text: &str, n: usize) -> Result<Vec<ErrorSpec>, ErrorFileError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            })
            .map(|(i, l)| ErrorSpec::parse_line(l.trim(), n, i + 1))
            .collect()
    }

    /// True if the new list equals the agent's list in `inst`.
    pub fn is_identity(&self, inst: &Instance) -> bool {
        inst.prefs(self.side)[self.agent] == self.new_list
    }

    /// Girl errors leave a join-closed set of broken matchings, boy errors a
    /// meet-closed one.
    pub fn orientation(&self) -> Orientation {
        match self.side {
            Side::Girl => Orientation::Direct,
            Side::Boy => Orientation::Dual,
        }
    }
}

impl fmt::Display for ErrorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}:", self.side, self.agent + 1)?;
        for x in &self.new_list {
            write!(f, " {}", x + 1)?;
        }
        Ok(())
    }
}

pub fn apply_error(inst: &Instance, e: &ErrorSpec) -> Result<Instance, InstanceError> {
    inst.with_list(e.side, e.agent, e.new_list.clone())
}

/// Stability under one error, for matchings already stable in the base
/// instance: only pairs involving the changed agent can block.
pub struct SingleErrorOracle<'a> {
    inst: &'a Instance,
    spec: &'a ErrorSpec,
    new_rank: Vec<usize>,
}

impl<'a> SingleErrorOracle<'a> {
    pub fn new(inst: &'a Instance, spec: &'a ErrorSpec) -> Self {
        let mut new_rank = vec![0; inst.n()];
        for (r, &x) in spec.new_list.iter().enumerate() {
            new_rank[x] = r;
        }
        SingleErrorOracle { inst, spec, new_rank }
    }

    pub fn is_stable(&self, m: &Matching) -> bool {
        let agent = self.spec.agent;
        match self.spec.side {
            Side::Girl => {
                let g = agent;
                let mine = m.partners().iter().position(|&x| x == g).expect("perfect matching");
                self.spec.new_list[..self.new_rank[mine]]
                    .iter()
                    .all(|&b| !self.inst.boy_prefers(b, g, m.partner_of_boy(b)))
            }
            Side::Boy => {
                let b = agent;
                let girl_partner = m.partner_of_girl_table();
                self.spec.new_list[..self.new_rank[m.partner_of_boy(b)]]
                    .iter()
                    .all(|&g| !self.inst.girl_prefers(g, b, girl_partner[g]))
            }
        }
    }
}

impl MembershipOracle for SingleErrorOracle<'_> {
    fn in_l1(&mut self, m: &Matching) -> bool {
        self.is_stable(m)
    }
}

/// Edges for one error together with the search that found them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorEdges {
    pub spec: ErrorSpec,
    pub edges: EdgeSet,
    pub run: Option<BouquetRun>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobustError {
    #[error("error {index} is invalid: {source}")]
    BadError { index: usize, source: InstanceError },
    #[error("bouquet search failed for error {index} ({spec}): {source}")]
    Bouquet {
        index: usize,
        spec: ErrorSpec,
        source: BouquetError,
    },
}

/// Edges defining the matchings of `inst` that stay stable under `spec`.
/// Empty for an identity error.
pub fn edges_for_error(poset: &RotationPoset, inst: &Instance, spec: &ErrorSpec) -> Result<ErrorEdges, BouquetError> {
    let order = working_order(poset, spec.orientation());
    edges_for_error_in(poset, &order, inst, spec)
}

fn edges_for_error_in(poset: &RotationPoset, order: &Order, inst: &Instance, spec: &ErrorSpec) -> Result<ErrorEdges, BouquetError> {
    if spec.is_identity(inst) {
        return Ok(ErrorEdges {
            spec: spec.clone(),
            edges: EdgeSet::default(),
            run: None,
        });
    }
    let mut oracle = SingleErrorOracle::new(inst, spec);
    let run = find_bouquet_in(poset, order, &mut oracle, spec.orientation())?;
    Ok(ErrorEdges {
        spec: spec.clone(),
        edges: run.bouquet.edges(),
        run: Some(run),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustResult {
    pub meta: MetaPoset,
    pub exists: bool,
    /// The boy-optimal fully robust matching.
    pub witness: Option<Matching>,
    pub edges: EdgeSet,
    /// One entry per distinct, non-identity error.
    pub per_error: Vec<ErrorEdges>,
}

/// Computes the compression whose closed sets are the fully robust matchings
/// for `errors`. Duplicate and identity errors are skipped.
pub fn build_robust(poset: &RotationPoset, inst: &Instance, errors: &[ErrorSpec]) -> Result<RobustResult, RobustError> {
    let mut seen = std::collections::HashSet::new();
    let mut distinct = Vec::new();
    for (index, e) in errors.iter().enumerate() {
        apply_error(inst, e).map_err(|source| RobustError::BadError { index, source })?;
        if !e.is_identity(inst) && seen.insert(e.clone()) {
            distinct.push((index, e));
        }
    }
    let direct = poset.order().clone();
    let dual = direct.dual();
    let mut per_error = Vec::with_capacity(distinct.len());
    for (index, e) in distinct {
        let order = match e.orientation() {
            Orientation::Direct => &direct,
            Orientation::Dual => &dual,
        };
        let found = edges_for_error_in(poset, order, inst, e).map_err(|source| RobustError::Bouquet {
            index,
            spec: e.clone(),
            source,
        })?;
        per_error.push(found);
    }
    let edges = EdgeSet::new(per_error.iter().flat_map(|x| x.edges.iter()));
    let meta = shrink(poset.order(), &edges);
    let exists = meta.a_s() != meta.a_t();
    let witness = exists.then(|| {
        let mut bottom = FixedBitSet::with_capacity(meta.blocks().len());
        bottom.insert(meta.a_s());
        poset.matching_of_bits(&meta.expand(&bottom))
    });
    Ok(RobustResult {
        meta,
        exists,
        witness,
        edges,
        per_error,
    })
}

/// Every fully robust matching. Exponential; for small instances.
pub fn robust_matchings(result: &RobustResult, poset: &RotationPoset) -> Vec<Matching> {
    closed_sets_of_meta(&result.meta)
        .iter()
        .map(|s| poset.matching_of_bits(s))
        .collect()
}

/// Real weight per boy-girl pair, row = boy.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    n: usize,
    w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("expected {expected} rows of weights, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} weights, found {found}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("row {row}: `{token}` is not a finite number")]
    BadNumber { row: usize, token: String },
}

impl WeightFunction {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<WeightFunction, WeightError> {
        let n = rows.len();
        let mut w = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(WeightError::RowLength {
                    row: row + 1,
                    expected: n,
                    found: r.len(),
                });
            }
            if let Some(x) = r.iter().find(|x| !x.is_finite()) {
                return Err(WeightError::BadNumber {
                    row: row + 1,
                    token: x.to_string(),
                });
            }
            w.extend(r);
        }
        Ok(WeightFunction { n, w })
    }

    pub fn uniform(n: usize, value: f64) -> WeightFunction {
        WeightFunction { n, w: vec![value; n * n] }
    }

    /// Reads `n` lines of `n` reals; `#` comments and blank lines skipped.
    pub fn parse(text: &str, n: usize) -> Result<WeightFunction, WeightError> {
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let row = rows.len() + 1;
            let r = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| WeightError::BadNumber {
                        row,
                        token: t.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(r);
        }
        if rows.len() != n {
            return Err(WeightError::RowCount {
                expected: n,
                found: rows.len(),
            });
        }
        WeightFunction::new(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, b: usize, g: usize) -> f64 {
        self.w[b * self.n + g]
    }

    pub fn negated(&self) -> WeightFunction {
        WeightFunction {
            n: self.n,
            w: self.w.iter().map(|x| -x).collect(),
        }
    }

    /// Sum over pairs, in boy order.
    pub fn weight_of(&self, m: &Matching) -> f64 {
        m.weight_by(|b, g| self.get(b, g))
    }
}

/// The pair anchors `(u, v)`: the element that moves `b` to `g` and the one
/// that moves him away. `None` if `b` and `g` are never stably matched.
pub fn anchors(poset: &RotationPoset, b: usize, g: usize) -> Option<(Elem, Elem)> {
    Some((poset.move_to(b, g)?, poset.move_from(b, g)?))
}

/// Change in total weight caused by eliminating each rotation, indexed by
/// element id (zero for the dummies).
pub fn rotation_deltas(poset: &RotationPoset, w: &WeightFunction) -> Vec<f64> {
    let mut out = vec![0.0; poset.len()];
    for (k, rho) in poset.rotations().iter().enumerate() {
        out[k + 2] = rho.moves().map(|(b, from, to)| w.get(b, to) - w.get(b, from)).sum();
    }
    out
}

/// The fully robust matching of maximum total weight and that weight, or
/// `None` when no fully robust matching exists. Among optima the one
/// dominating the others is returned.
pub fn max_weight_robust(result: &RobustResult, poset: &RotationPoset, w: &WeightFunction) -> Option<(Matching, f64)> {
    if !result.exists {
        return None;
    }
    let meta = &result.meta;
    let k = meta.blocks().len();
    let (a_s, a_t) = (meta.a_s(), meta.a_t());
    let delta = rotation_deltas(poset, w);
    let block_weight: Vec<f64> = meta
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&e| delta[e]).sum())
        .collect();
    let scale: f64 = block_weight.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    let (src, snk) = (k, k + 1);
    let mut net = FlowNetwork::new(k + 2, 1e-12 * scale);
    for (x, &bw) in block_weight.iter().enumerate() {
        if x == a_s || x == a_t {
            continue;
        }
        if bw > 0.0 {
            net.add_arc(src, x, bw);
        } else if bw < 0.0 {
            net.add_arc(x, snk, -bw);
        }
    }
    for &(p, x) in meta.hasse_edges() {
        if p != a_s && x != a_t {
            net.add_arc(x, p, f64::INFINITY);
        }
    }
    net.max_flow(src, snk);
    let side = net.source_side(src);
    let mut chosen = FixedBitSet::with_capacity(k);
    chosen.insert(a_s);
    for (x, &on_source) in side.iter().enumerate().take(k) {
        if on_source && x != a_t {
            chosen.insert(x);
        }
    }
    let m = poset.matching_of_bits(&meta.expand(&chosen));
    let total = w.weight_of(&m);
    Some((m, total))
}

impl FromStr for ErrorSpec {
    type Err = ErrorFileError;

    /// Parses one line, inferring `n` from the length of the list.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.split_once(':').map(|(_, l)| l.split_whitespace().count()).unwrap_or(0);
        ErrorSpec::parse_line(s.trim(), n, 1)
    }
}
