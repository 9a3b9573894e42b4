//! The small sites used throughout the tests, benches and CLI suites, plus
//! the diagram shapes used to build finite limits and colimits.

use std::sync::Arc;

use crate::fincat::FinCat;

/// One object, one (identity) arrow.
pub fn terminal() -> FinCat {
    FinCat::from_tables(&["*"], &[], &[])
}

/// The interval `a --f--> b`.
pub fn interval() -> FinCat {
    FinCat::from_tables(&["a", "b"], &[("f", "a", "b")], &[])
}

/// Two parallel arrows `f, g: a -> b`.
pub fn parallel_pair() -> FinCat {
    FinCat::from_tables(&["a", "b"], &[("f", "a", "b"), ("g", "a", "b")], &[])
}

/// The commutative square `h . f = k . g = hf` from `a` to `d`.
pub fn commutative_square() -> FinCat {
    FinCat::from_tables(
        &["a", "b", "c", "d"],
        &[("f", "a", "b"), ("g", "a", "c"), ("h", "b", "d"), ("k", "c", "d"), ("hf", "a", "d")],
        &[("h", "f", "hf"), ("k", "g", "hf")],
    )
}

/// The three-element monoid `{1, p, q}` with `x . y = x` for `x, y` in
/// `{p, q}` (a left-zero band with a unit adjoined).
pub fn monoid3() -> FinCat {
    FinCat::from_tables(
        &["*"],
        &[("p", "*", "*"), ("q", "*", "*")],
        &[("p", "p", "p"), ("p", "q", "p"), ("q", "p", "q"), ("q", "q", "q")],
    )
}

/// The five acceptance sites, by name.
pub fn test_sites() -> Vec<(&'static str, Arc<FinCat>)> {
    vec![
        ("terminal", Arc::new(terminal())),
        ("interval", Arc::new(interval())),
        ("parallel-pair", Arc::new(parallel_pair())),
        ("square", Arc::new(commutative_square())),
        ("monoid3", Arc::new(monoid3())),
    ]
}

pub fn by_name(name: &str) -> Option<Arc<FinCat>> {
    test_sites().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}

/// Diagram shapes. Object names are chosen so that the sorted order is the
/// intended order.
pub mod shapes {
    use super::*;

    /// `n` objects named `d000`, `d001`, ... and no other arrows.
    pub fn discrete(n: usize) -> FinCat {
        let names: Vec<String> = (0..n).map(|i| format!("d{i:03}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        FinCat::from_tables(&refs, &[], &[])
    }

    /// `l --p--> z <--q-- r`; objects sort as l, r, z.
    pub fn cospan() -> FinCat {
        FinCat::from_tables(&["l", "r", "z"], &[("p", "l", "z"), ("q", "r", "z")], &[])
    }

    /// `s <--p-- l --q--> r`; objects sort as l, r, s.
    pub fn span() -> FinCat {
        FinCat::from_tables(&["l", "r", "s"], &[("p", "l", "s"), ("q", "l", "r")], &[])
    }

    /// Two parallel arrows `p, q: s -> t`.
    pub fn parallel() -> FinCat {
        FinCat::from_tables(&["s", "t"], &[("p", "s", "t"), ("q", "s", "t")], &[])
    }

    /// The 2-truncated semi-simplicial index shape `x2 => x1 => x0`, with
    /// arrows pointing the way face maps act (from higher to lower
    /// simplices), subject to the simplicial identities.
    pub fn nerve2() -> FinCat {
        FinCat::from_tables(
            &["x0", "x1", "x2"],
            &[
                ("d0", "x1", "x0"),
                ("d1", "x1", "x0"),
                ("e0", "x2", "x1"),
                ("e1", "x2", "x1"),
                ("e2", "x2", "x1"),
                ("v0", "x2", "x0"),
                ("v1", "x2", "x0"),
                ("v2", "x2", "x0"),
            ],
            &[
                ("d1", "e1", "v0"),
                ("d1", "e2", "v0"),
                ("d0", "e2", "v1"),
                ("d1", "e0", "v1"),
                ("d0", "e0", "v2"),
                ("d0", "e1", "v2"),
            ],
        )
    }
}
