//! Stable marriage instances with complete, strict preference lists.
//!
//! Agents are 0-based internally. The text format is 1-based and also accepts
//! single letters (`a`..`z` for 1..26) so boys can be written the way they
//! usually are in hand-worked examples.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One side of the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Boy,
    Girl,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Boy => Side::Girl,
            Side::Girl => Side::Boy,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Boy => f.write_str("boy"),
            Side::Girl => f.write_str("girl"),
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "boy" | "boys" | "b" | "men" | "man" => Ok(Side::Boy),
            "girl" | "girls" | "g" | "women" | "woman" => Ok(Side::Girl),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance must have at least one agent per side")]
    Empty,
    #[error("expected {expected} preference lists for the {side}s, found {found}")]
    ListCount {
        side: Side,
        expected: usize,
        found: usize,
    },
    #[error("{side} {agent}: list has {found} entries, expected {expected}")]
    ListLength {
        side: Side,
        agent: usize,
        expected: usize,
        found: usize,
    },
    #[error("{side} {agent}: entry {index} is out of range for n = {n}")]
    IndexOutOfRange {
        side: Side,
        agent: usize,
        index: usize,
        n: usize,
    },
    #[error("{side} {agent}: entry {duplicate} appears twice")]
    NotPermutation {
        side: Side,
        agent: usize,
        duplicate: usize,
    },
}

/// Errors from reading the instance text format. Line numbers are 1-based
/// positions in the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing header line with n")]
    MissingHeader,
    #[error("line {line}: bad header `{text}`, expected a positive integer")]
    BadHeader { line: usize, text: String },
    #[error("expected {expected} preference lines after the header, found {found}")]
    LineCount { expected: usize, found: usize },
    #[error("line {line}: cannot read `{token}` as an agent")]
    BadToken { line: usize, token: String },
    #[error("line {line}: list has {found} entries, expected {expected}")]
    ListLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: agent `{token}` is out of range for n = {n}")]
    IndexOutOfRange { line: usize, token: String, n: usize },
    #[error("line {line}: `{token}` appears twice, list is not a permutation")]
    NotPermutation { line: usize, token: String },
}

/// Reads one agent token: a 1-based number or a single letter.
pub(crate) fn parse_agent_token(token: &str) -> Option<usize> {
    if let Ok(v) = token.parse::<usize>() {
        return v.checked_sub(1);
    }
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_alphabetic() => {
            Some((c.to_ascii_lowercase() as u8 - b'a') as usize)
        }
        _ => None,
    }
}

/// Parses a whitespace-separated permutation of `0..n` written in the file
/// alphabet. `line` is only used for diagnostics.
pub(crate) fn parse_permutation(text: &str, n: usize, line: usize) -> Result<Vec<usize>, ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != n {
        return Err(ParseError::ListLength {
            line,
            expected: n,
            found: tokens.len(),
        });
    }
    let mut seen = vec![false; n];
    let mut list = Vec::with_capacity(n);
    for token in tokens {
        let idx = parse_agent_token(token).ok_or_else(|| ParseError::BadToken {
            line,
            token: token.to_string(),
        })?;
        if idx >= n {
            return Err(ParseError::IndexOutOfRange {
                line,
                token: token.to_string(),
                n,
            });
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err(ParseError::NotPermutation {
                line,
                token: token.to_string(),
            });
        }
        list.push(idx);
    }
    Ok(list)
}

/// Complete strict preferences for `n` boys and `n` girls.
///
/// `boy_prefs[b]` lists girls from most to least preferred and `girl_prefs[g]`
/// lists boys the same way. Rank tables are kept alongside so comparisons are
/// O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    boy_prefs: Vec<Vec<usize>>,
    girl_prefs: Vec<Vec<usize>>,
    boy_rank: Vec<Vec<usize>>,
    girl_rank: Vec<Vec<usize>>,
}

fn check_lists(side: Side, lists: &[Vec<usize>], n: usize) -> Result<(), InstanceError> {
    if lists.len() != n {
        return Err(InstanceError::ListCount {
            side,
            expected: n,
            found: lists.len(),
        });
    }
    for (agent, list) in lists.iter().enumerate() {
        if list.len() != n {
            return Err(InstanceError::ListLength {
                side,
                agent,
                expected: n,
                found: list.len(),
            });
        }
        let mut seen = vec![false; n];
        for &x in list {
            if x >= n {
                return Err(InstanceError::IndexOutOfRange {
                    side,
                    agent,
                    index: x,
                    n,
                });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(InstanceError::NotPermutation {
                    side,
                    agent,
                    duplicate: x,
                });
            }
        }
    }
    Ok(())
}

fn ranks(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    lists
        .iter()
        .map(|list| {
            let mut rank = vec![0; list.len()];
            for (pos, &x) in list.iter().enumerate() {
                rank[x] = pos;
            }
            rank
        })
        .collect()
}

impl Instance {
    pub fn new(boy_prefs: Vec<Vec<usize>>, girl_prefs: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        let n = boy_prefs.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        check_lists(Side::Boy, &boy_prefs, n)?;
        check_lists(Side::Girl, &girl_prefs, n)?;
        let boy_rank = ranks(&boy_prefs);
        let girl_rank = ranks(&girl_prefs);
        Ok(Instance {
            n,
            boy_prefs,
            girl_prefs,
            boy_rank,
            girl_rank,
        })
    }

    /// Parses the instance text format: `n`, then `n` boy lists, then `n`
    /// girl lists. Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (header_line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
        let n = match header.parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                return Err(ParseError::BadHeader {
                    line: header_line,
                    text: header.to_string(),
                })
            }
        };
        let body: Vec<(usize, &str)> = lines.collect();
        if body.len() != 2 * n {
            return Err(ParseError::LineCount {
                expected: 2 * n,
                found: body.len(),
            });
        }
        let mut lists = Vec::with_capacity(2 * n);
        for &(line, text) in &body {
            lists.push(parse_permutation(text, n, line)?);
        }
        let girl_prefs = lists.split_off(n);
        Ok(Instance::new(lists, girl_prefs).expect("parsed lists are validated permutations"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn boy_prefs(&self) -> &[Vec<usize>] {
        &self.boy_prefs
    }

    pub fn girl_prefs(&self) -> &[Vec<usize>] {
        &self.girl_prefs
    }

    pub fn prefs(&self, side: Side) -> &[Vec<usize>] {
        match side {
            Side::Boy => &self.boy_prefs,
            Side::Girl => &self.girl_prefs,
        }
    }

    /// Position of girl `g` in boy `b`'s list (0 = favourite).
    #[inline]
    pub fn boy_rank(&self, b: usize, g: usize) -> usize {
        self.boy_rank[b][g]
    }

    /// Position of boy `b` in girl `g`'s list (0 = favourite).
    #[inline]
    pub fn girl_rank(&self, g: usize, b: usize) -> usize {
        self.girl_rank[g][b]
    }

    /// True if boy `b` strictly prefers girl `x` to girl `y`.
    #[inline]
    pub fn boy_prefers(&self, b: usize, x: usize, y: usize) -> bool {
        self.boy_rank[b][x] < self.boy_rank[b][y]
    }

    /// True if girl `g` strictly prefers boy `x` to boy `y`.
    #[inline]
    pub fn girl_prefers(&self, g: usize, x: usize, y: usize) -> bool {
        self.girl_rank[g][x] < self.girl_rank[g][y]
    }

    /// Returns a copy with one agent's list replaced.
    pub fn with_list(&self, side: Side, agent: usize, list: Vec<usize>) -> Result<Instance, InstanceError> {
        let mut boys = self.boy_prefs.clone();
        let mut girls = self.girl_prefs.clone();
        let target = match side {
            Side::Boy => &mut boys,
            Side::Girl => &mut girls,
        };
        if agent >= self.n {
            return Err(InstanceError::ListCount {
                side,
                expected: self.n,
                found: agent + 1,
            });
        }
        target[agent] = list;
        Instance::new(boys, girls)
    }

    /// Renders the instance in the numeric text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for list in self.boy_prefs.iter().chain(&self.girl_prefs) {
            let row: Vec<String> = list.iter().map(|x| (x + 1).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for Instance {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Instance::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# boys a..d, girls 1..4
4
1 2 3 4
2 1 3 4
3 1 4 2
4 3 1 2
b a c d
a b c d
d c a b
c d a b
";

    #[test]
    fn parses_worked_example() {
        let inst = Instance::parse(EXAMPLE).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.boy_prefs()[2], vec![2, 0, 3, 1]);
        assert_eq!(inst.girl_prefs()[0], vec![1, 0, 2, 3]);
        assert!(inst.girl_prefers(0, 1, 0));
        assert_eq!(inst.boy_rank(3, 1), 3);
    }

    #[test]
    fn single_pair() {
        let inst = Instance::parse("1\n1\n1\n").unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.boy_prefs(), &[vec![0]]);
    }

    #[test]
    fn duplicate_entry_is_rejected() {
        let text = EXAMPLE.replace("b a c d", "b a c b");
        assert!(matches!(
            Instance::parse(&text),
            Err(ParseError::NotPermutation { line: 7, .. })
        ));
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(Instance::parse(""), Err(ParseError::MissingHeader));
        assert!(matches!(Instance::parse("x\n"), Err(ParseError::BadHeader { .. })));
        assert!(matches!(Instance::parse("0\n"), Err(ParseError::BadHeader { .. })));
        assert_eq!(
            Instance::parse("2\n1 2\n2 1\n1 2\n"),
            Err(ParseError::LineCount { expected: 4, found: 3 })
        );
        assert!(matches!(
            Instance::parse("2\n1 3\n2 1\n1 2\n1 2\n"),
            Err(ParseError::IndexOutOfRange { line: 2, .. })
        ));
        assert!(matches!(
            Instance::parse("2\n1 ?\n2 1\n1 2\n1 2\n"),
            Err(ParseError::BadToken { line: 2, .. })
        ));
        assert!(matches!(
            Instance::parse("2\n1\n2 1\n1 2\n1 2\n"),
            Err(ParseError::ListLength { line: 2, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let inst = Instance::parse(EXAMPLE).unwrap();
        assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn with_list_replaces_one_row() {
        let a = Instance::parse(EXAMPLE).unwrap();
        let b = a.with_list(Side::Girl, 0, vec![2, 0, 1, 3]).unwrap();
        assert_eq!(b.boy_prefs(), a.boy_prefs());
        assert_eq!(&b.girl_prefs()[1..], &a.girl_prefs()[1..]);
        assert_eq!(b.girl_prefs()[0], vec![2, 0, 1, 3]);
        assert!(a.with_list(Side::Boy, 1, vec![0, 0, 1, 2]).is_err());
    }
}
