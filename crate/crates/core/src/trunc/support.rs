//! Finite or cofinite subsets of coordinates.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Support {
    Finite(BTreeSet<usize>),
    /// Everything except the listed coordinates.
    Cofinite(BTreeSet<usize>),
}

impl Support {
    pub fn empty() -> Self {
        Support::Finite(BTreeSet::new())
    }

    pub fn finite<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Support::Finite(it.into_iter().collect())
    }

    pub fn cofinite<I: IntoIterator<Item = usize>>(excluded: I) -> Self {
        Support::Cofinite(excluded.into_iter().collect())
    }

    /// `{0, .., n-1}`.
    pub fn range(n: usize) -> Self {
        Self::finite(0..n)
    }

    pub fn contains(&self, i: usize) -> bool {
        match self {
            Support::Finite(s) => s.contains(&i),
            Support::Cofinite(s) => !s.contains(&i),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Support::Finite(s) if s.is_empty())
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, Support::Cofinite(_))
    }

    pub fn union(&self, other: &Self) -> Self {
        use Support::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Cofinite(c - f),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        use Support::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a & b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a | b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Finite(f - c),
        }
    }

    /// Complement inside `{0..n}` when `dim = Some(n)`, inside ℕ otherwise.
    pub fn complement(&self, dim: Option<usize>) -> Self {
        match (self, dim) {
            (Support::Finite(s), Some(n)) => Support::Finite((0..n).filter(|i| !s.contains(i)).collect()),
            (Support::Cofinite(s), Some(n)) => Support::Finite(s.iter().copied().filter(|&i| i < n).collect()),
            (Support::Finite(s), None) => Support::Cofinite(s.clone()),
            (Support::Cofinite(s), None) => Support::Finite(s.clone()),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        use Support::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.is_subset(b),
            (Finite(a), Cofinite(b)) => a.is_disjoint(b),
            (Cofinite(_), Finite(_)) => false,
            (Cofinite(a), Cofinite(b)) => b.is_subset(a),
        }
    }

    /// Listed coordinates: members if finite, exclusions if cofinite.
    pub fn listed(&self) -> &BTreeSet<usize> {
        match self {
            Support::Finite(s) | Support::Cofinite(s) => s,
        }
    }

    /// Members below `n`.
    pub fn members_below(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| self.contains(i)).collect()
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, matching user-facing coordinate names
        let list = |s: &BTreeSet<usize>| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        match self {
            Support::Finite(s) => write!(f, "{{{}}}", list(s)),
            Support::Cofinite(s) if s.is_empty() => write!(f, "N"),
            Support::Cofinite(s) => write!(f, "N\\{{{}}}", list(s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_laws_on_mixed_supports() {
        let a = Support::finite([1, 2]);
        let b = Support::cofinite([2, 5]);
        assert_eq!(a.union(&b), Support::cofinite([5]));
        assert_eq!(a.intersect(&b), Support::finite([1]));
        assert_eq!(b.complement(None), Support::finite([2, 5]));
        assert!(a.intersect(&b).is_subset(&a));
        assert!(a.is_subset(&a.union(&b)));
        assert!(!b.is_subset(&a));
        assert_eq!(a.complement(Some(4)), Support::finite([0, 3]));
        assert_eq!(b.complement(Some(4)), Support::finite([2]));
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(Support::finite([0, 2]).to_string(), "{1,3}");
        assert_eq!(Support::cofinite([0]).to_string(), "N\\{1}");
    }
}
