//! Small hand-checked instances used by tests, docs and the CLI smoke tests.
//!
//! The 4x4 example has boys `a..d` and girls `1..4`; its stable lattice is the
//! Boolean lattice on two rotations. Permuting girl 1's list from `b a c d` to
//! `c a b d` leaves only the boy-optimal matching stable in both instances and
//! makes the set of matchings that break under the change fail to be closed
//! under meet.

use crate::instance::Instance;
use crate::matching::Matching;

pub const EXAMPLE_A: &str = "\
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

pub const EXAMPLE_B: &str = "\
4
1 2 3 4
2 1 3 4
3 1 4 2
4 3 1 2
c a b d
a b c d
d c a b
c d a b
";

/// The error turning `EXAMPLE_A` into `EXAMPLE_B`, in error-file syntax.
pub const EXAMPLE_ERROR: &str = "girl 1: c a b d\n";

pub fn example_a() -> Instance {
    Instance::parse(EXAMPLE_A).expect("fixture parses")
}

pub fn example_b() -> Instance {
    Instance::parse(EXAMPLE_B).expect("fixture parses")
}

/// Parses pairs written as `a1 b2` or `1a 2b` (letter = boy, number = girl).
///
/// Panics on malformed input; this is for tests.
pub fn matching(n: usize, spec: &str) -> Matching {
    let pairs: Vec<(usize, usize)> = spec
        .split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let letter = t.chars().find(|c| c.is_ascii_alphabetic()).expect("boy letter");
            let digits: String = t.chars().filter(|c| c.is_ascii_digit()).collect();
            let b = (letter.to_ascii_lowercase() as u8 - b'a') as usize;
            let g = digits.parse::<usize>().expect("girl number") - 1;
            (b, g)
        })
        .collect();
    Matching::from_pairs(n, &pairs).expect("fixture matching is perfect")
}
