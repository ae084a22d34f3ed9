//! Variable symbols and the fixed global variable order.
//!
//! The engine works with single-letter symbols. The two main variables are
//! `k` (summation index) and `n` (recursion index); every other letter is a
//! free parameter. The canonical order places k first, n second, and the
//! parameters alphabetically after them, which makes all canonical forms
//! (polynomial term order, printed output) reproducible.

use std::cmp::Ordering;
use std::fmt;

/// A single-letter variable symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub char);

/// The summation variable k.
pub const K: Var = Var('k');
/// The recursion variable n.
pub const N: Var = Var('n');

impl Var {
    /// Constructs a variable, validating the `[a-z]` grammar restriction.
    pub fn new(c: char) -> Option<Var> {
        if c.is_ascii_lowercase() {
            Some(Var(c))
        } else {
            None
        }
    }

    fn rank(self) -> (u8, char) {
        match self.0 {
            'k' => (0, 'k'),
            'n' => (1, 'n'),
            c => (2, c),
        }
    }
}

/// Picks a lowercase letter not present in `used`, for internal scratch
/// variables (e.g. the shift unknown when locating integer root distances
/// between two polynomials). Letters that commonly appear as parameters in
/// inputs are tried last.
pub fn fresh_var(used: &[Var]) -> Var {
    const CANDIDATES: &[char] = &[
        'j', 'i', 'w', 'y', 'v', 'u', 'q', 'o', 'g', 'h', 't', 'z', 'e', 'f', 'p', 'r', 's', 'm',
        'l', 'x', 'd', 'c', 'b', 'a',
    ];
    for &c in CANDIDATES {
        let v = Var(c);
        if !used.contains(&v) {
            return v;
        }
    }
    unreachable!("more than 24 distinct variables in one expression")
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
