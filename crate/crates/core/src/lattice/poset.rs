use std::collections::HashMap;

use super::{LatticeError, OrderLaw};

/// Largest number of points a base poset may carry. Downsets are stored as
/// `u64` bitmasks.
pub const MAX_POINTS: usize = 63;

/// A finite partial order on labelled points.
///
/// `below[i]` is the principal downset of point `i` (bit `j` set iff `j <= i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    below: Vec<u64>,
}

impl Poset {
    /// Builds a poset from an explicit `leq` relation given as ordered label pairs.
    ///
    /// The relation must already be reflexive, antisymmetric and transitive; the
    /// first violated law is reported.
    pub fn from_relation<S: AsRef<str>>(
        labels: &[S],
        leq: &[(S, S)],
    ) -> Result<Self, LatticeError> {
        let (labels, index) = Self::index_labels(labels)?;
        let n = labels.len();
        let mut below = vec![0u64; n];
        for (a, b) in leq {
            let i = Self::lookup(&index, a.as_ref())?;
            let j = Self::lookup(&index, b.as_ref())?;
            below[j] |= 1 << i;
        }
        for i in 0..n {
            if below[i] & (1 << i) == 0 {
                return Err(LatticeError::NotPartialOrder {
                    law: OrderLaw::Reflexivity,
                    witness: vec![labels[i].clone()],
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && below[j] & (1 << i) != 0 && below[i] & (1 << j) != 0 {
                    return Err(LatticeError::NotPartialOrder {
                        law: OrderLaw::Antisymmetry,
                        witness: vec![labels[i].clone(), labels[j].clone()],
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let ij = below[j] & (1 << i) != 0;
                    let jk = below[k] & (1 << j) != 0;
                    let ik = below[k] & (1 << i) != 0;
                    if ij && jk && !ik {
                        return Err(LatticeError::NotPartialOrder {
                            law: OrderLaw::Transitivity,
                            witness: vec![labels[i].clone(), labels[j].clone(), labels[k].clone()],
                        });
                    }
                }
            }
        }
        Ok(Poset { labels, below })
    }

    /// Builds a poset from covering pairs `(lower, upper)`, taking the
    /// reflexive-transitive closure. Cycles are rejected as antisymmetry failures.
    pub fn from_covers<S: AsRef<str>>(
        labels: &[S],
        covers: &[(S, S)],
    ) -> Result<Self, LatticeError> {
        let (labels, index) = Self::index_labels(labels)?;
        let n = labels.len();
        let mut below: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for (a, b) in covers {
            let i = Self::lookup(&index, a.as_ref())?;
            let j = Self::lookup(&index, b.as_ref())?;
            below[j] |= 1 << i;
        }
        // Warshall closure on bitmasks.
        for k in 0..n {
            for j in 0..n {
                if below[j] & (1 << k) != 0 {
                    below[j] |= below[k];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if below[j] & (1 << i) != 0 && below[i] & (1 << j) != 0 {
                    return Err(LatticeError::NotPartialOrder {
                        law: OrderLaw::Antisymmetry,
                        witness: vec![labels[i].clone(), labels[j].clone()],
                    });
                }
            }
        }
        Ok(Poset { labels, below })
    }

    /// An antichain on the given labels.
    pub fn antichain<S: AsRef<str>>(labels: &[S]) -> Result<Self, LatticeError> {
        Self::from_covers::<&str>(
            &labels.iter().map(|s| s.as_ref()).collect::<Vec<_>>(),
            &[],
        )
    }

    /// A chain `labels[0] < labels[1] < ...`.
    pub fn chain<S: AsRef<str>>(labels: &[S]) -> Result<Self, LatticeError> {
        let ls: Vec<&str> = labels.iter().map(|s| s.as_ref()).collect();
        let covers: Vec<(&str, &str)> = ls.windows(2).map(|w| (w[0], w[1])).collect();
        Self::from_covers(&ls, &covers)
    }

    pub(crate) fn from_parts(labels: Vec<String>, below: Vec<u64>) -> Self {
        Poset { labels, below }
    }

    fn index_labels<S: AsRef<str>>(
        labels: &[S],
    ) -> Result<(Vec<String>, HashMap<String, usize>), LatticeError> {
        if labels.len() > MAX_POINTS {
            return Err(LatticeError::TooLarge { points: labels.len(), max: MAX_POINTS });
        }
        let mut index = HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            let l = l.as_ref().to_string();
            if index.insert(l.clone(), i).is_some() {
                return Err(LatticeError::DuplicateLabel(l));
            }
            out.push(l);
        }
        Ok((out, index))
    }

    fn lookup(index: &HashMap<String, usize>, label: &str) -> Result<usize, LatticeError> {
        index
            .get(label)
            .copied()
            .ok_or_else(|| LatticeError::UnknownLabel(label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `i <= j` in the order.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j] & (1 << i) != 0
    }

    /// Principal downset of point `i` as a bitmask.
    pub fn down(&self, i: usize) -> u64 {
        self.below[i]
    }

    /// Bitmask of all points.
    pub fn full_mask(&self) -> u64 {
        if self.labels.is_empty() {
            0
        } else {
            u64::MAX >> (64 - self.labels.len())
        }
    }

    /// Whether `mask` is closed downward.
    pub fn is_downset(&self, mask: u64) -> bool {
        (0..self.len()).all(|i| mask & (1 << i) == 0 || self.below[i] & !mask == 0)
    }

    /// Covering pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let between = (0..n).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The subposet induced on the points of `mask`, and the parent index of
    /// each retained point.
    pub fn restrict(&self, mask: u64) -> (Poset, Vec<usize>) {
        let keep: Vec<usize> = (0..self.len()).filter(|i| mask & (1 << i) != 0).collect();
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let below = keep
            .iter()
            .map(|&j| {
                keep.iter()
                    .enumerate()
                    .filter(|(_, &i)| self.leq(i, j))
                    .fold(0u64, |m, (ni, _)| m | (1 << ni))
            })
            .collect();
        (Poset { labels, below }, keep)
    }

    /// Every partial order on `n` points labelled `p1..pn` (labelled, not up to
    /// isomorphism). Intended for `n <= 4`.
    pub fn enumerate(n: usize) -> Vec<Poset> {
        let labels: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let mut out = Vec::new();
        for code in 0u64..(1 << pairs.len()) {
            let mut below: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if code & (1 << k) != 0 {
                    below[j] |= 1 << i;
                }
            }
            let antisymmetric = pairs
                .iter()
                .all(|&(i, j)| !(below[j] & (1 << i) != 0 && below[i] & (1 << j) != 0));
            let transitive = (0..n).all(|j| {
                (0..n).all(|k| below[k] & (1 << j) == 0 || below[j] & !below[k] == 0)
            });
            if antisymmetric && transitive {
                out.push(Poset { labels: labels.clone(), below });
            }
        }
        out
    }

    /// Points listed so that every point comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.below[i].count_ones(), i));
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_covers() {
        let p = Poset::chain(&["a", "b", "c"]).unwrap();
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn relation_laws_are_named() {
        let err = Poset::from_relation(&["a", "b"], &[("a", "a"), ("a", "b")]).unwrap_err();
        assert!(matches!(err, LatticeError::NotPartialOrder { law: OrderLaw::Reflexivity, .. }));

        let err = Poset::from_relation(
            &["a", "b"],
            &[("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")],
        )
        .unwrap_err();
        assert!(matches!(err, LatticeError::NotPartialOrder { law: OrderLaw::Antisymmetry, .. }));

        let err = Poset::from_relation(
            &["a", "b", "c"],
            &[("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")],
        )
        .unwrap_err();
        assert!(matches!(err, LatticeError::NotPartialOrder { law: OrderLaw::Transitivity, .. }));
    }

    #[test]
    fn cycles_in_covers_fail_antisymmetry() {
        let err = Poset::from_covers(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, LatticeError::NotPartialOrder { law: OrderLaw::Antisymmetry, .. }));
    }

    #[test]
    fn labelled_poset_counts() {
        // OEIS A001035: 1, 1, 3, 19, 219
        let counts: Vec<usize> = (0..=4).map(|n| Poset::enumerate(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219]);
    }

    #[test]
    fn restrict_keeps_order() {
        let p = Poset::chain(&["a", "b", "c"]).unwrap();
        let (q, keep) = p.restrict(0b101);
        assert_eq!(keep, vec![0, 2]);
        assert!(q.leq(0, 1));
        assert_eq!(q.labels(), &["a".to_string(), "c".to_string()]);
    }
}
