use std::collections::HashMap;
use std::fmt;

use super::poset::Poset;
use super::LatticeError;

/// Upper bound on the number of elements a materialized frame may have.
pub const MAX_ELEMENTS: usize = 1 << 16;

/// An element of a [`FiniteFrame`]: a downset of the base poset, as a bitmask
/// over base points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u64);

impl Elem {
    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_subset(self, other: Elem) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn contains_point(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }
}

/// A finite frame presented as the lattice of downsets of a poset of
/// join-irreducibles. Joins are unions and meets are intersections.
#[derive(Clone, Debug)]
pub struct FiniteFrame {
    base: Poset,
    elements: Vec<Elem>,
    index: HashMap<Elem, usize>,
}

impl PartialEq for FiniteFrame {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl Eq for FiniteFrame {}

impl FiniteFrame {
    /// The lattice of all downsets of `base`.
    pub fn build(base: Poset) -> Result<Self, LatticeError> {
        let order = base.linear_extension();
        let mut elements = Vec::new();
        let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
        while let Some((k, mask)) = stack.pop() {
            if k == order.len() {
                if elements.len() >= MAX_ELEMENTS {
                    return Err(LatticeError::TooManyElements { max: MAX_ELEMENTS });
                }
                elements.push(Elem(mask));
                continue;
            }
            let i = order[k];
            stack.push((k + 1, mask));
            let strictly_below = base.down(i) & !(1 << i);
            if strictly_below & !mask == 0 {
                stack.push((k + 1, mask | (1 << i)));
            }
        }
        elements.sort_by_key(|e| (e.0.count_ones(), e.0));
        let index = elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Ok(FiniteFrame { base, elements, index })
    }

    /// The one-element frame (`⊥ = ⊤`).
    pub fn trivial() -> Self {
        Self::build(Poset::antichain::<&str>(&[]).expect("empty poset")).expect("trivial frame")
    }

    /// The two-element frame `2`.
    pub fn two() -> Self {
        Self::build(Poset::antichain(&["1"]).expect("one point")).expect("frame 2")
    }

    /// A chain with `n` elements (`n >= 1`).
    pub fn chain(n: usize) -> Self {
        let labels: Vec<String> = (1..n).map(|i| format!("c{i}")).collect();
        Self::build(Poset::chain(&labels).expect("chain")).expect("chain frame")
    }

    /// The Boolean frame on `n` atoms labelled `x1..xn`.
    pub fn boolean(n: usize) -> Self {
        let labels: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Self::build(Poset::antichain(&labels).expect("antichain")).expect("boolean frame")
    }

    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn bottom(&self) -> Elem {
        Elem(0)
    }

    pub fn top(&self) -> Elem {
        Elem(self.base.full_mask())
    }

    pub fn is_trivial(&self) -> bool {
        self.base.is_empty()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.index.contains_key(&e)
    }

    pub fn position(&self, e: Elem) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn check(&self, e: Elem) -> Result<Elem, LatticeError> {
        if self.contains(e) {
            Ok(e)
        } else {
            Err(LatticeError::NotAnElement(e.0))
        }
    }

    /// Element from a set of base labels; the set must be a downset.
    pub fn element<S: AsRef<str>>(&self, labels: &[S]) -> Result<Elem, LatticeError> {
        let mut mask = 0u64;
        for l in labels {
            let i = self
                .base
                .index_of(l.as_ref())
                .ok_or_else(|| LatticeError::UnknownLabel(l.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        self.check(Elem(mask))
    }

    /// Principal downset of base point `i`; these are the join-irreducibles.
    pub fn principal(&self, i: usize) -> Elem {
        Elem(self.base.down(i))
    }

    pub fn join_irreducibles(&self) -> Vec<Elem> {
        (0..self.base.len()).map(|i| self.principal(i)).collect()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        a.is_subset(b)
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        Elem(a.0 | b.0)
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        Elem(a.0 & b.0)
    }

    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        Elem(items.into_iter().fold(0, |m, e| m | e.0))
    }

    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        Elem(items.into_iter().fold(self.top().0, |m, e| m & e.0))
    }

    /// Largest downset contained in the point set `mask`.
    fn interior(&self, mask: u64) -> Elem {
        let mut out = 0u64;
        for i in 0..self.base.len() {
            if self.base.down(i) & !mask == 0 {
                out |= 1 << i;
            }
        }
        Elem(out)
    }

    /// Heyting arrow `a → b`, the largest `c` with `c ∧ a ≤ b`.
    pub fn arrow(&self, a: Elem, b: Elem) -> Result<Elem, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.arrow_unchecked(a, b))
    }

    pub(crate) fn arrow_unchecked(&self, a: Elem, b: Elem) -> Elem {
        self.interior((!a.0 | b.0) & self.base.full_mask())
    }

    /// Pseudocomplement `a* = a → ⊥`.
    pub fn pseudocomplement(&self, a: Elem) -> Result<Elem, LatticeError> {
        self.arrow(a, self.bottom())
    }

    pub(crate) fn pc(&self, a: Elem) -> Elem {
        self.arrow_unchecked(a, self.bottom())
    }

    /// `b ≺ a`: `b* ∨ a = ⊤`.
    pub fn rather_below(&self, b: Elem, a: Elem) -> Result<bool, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.rb(b, a))
    }

    pub(crate) fn rb(&self, b: Elem, a: Elem) -> bool {
        self.join(self.pc(b), a) == self.top()
    }

    /// Every element is the join of the elements rather below it.
    pub fn is_regular(&self) -> bool {
        self.elements.iter().all(|&a| {
            let j = self.join_all(self.elements.iter().copied().filter(|&b| self.rb(b, a)));
            j == a
        })
    }

    pub fn complement(&self, a: Elem) -> Option<Elem> {
        let c = self.pc(a);
        (self.join(a, c) == self.top()).then_some(c)
    }

    pub fn is_complemented(&self, a: Elem) -> bool {
        self.complement(a).is_some()
    }

    /// Complemented elements, in frame order.
    pub fn centre(&self) -> Vec<Elem> {
        self.elements.iter().copied().filter(|&a| self.is_complemented(a)).collect()
    }

    /// Atoms of the Boolean algebra of complemented elements.
    pub fn centre_atoms(&self) -> Vec<Elem> {
        let centre = self.centre();
        centre
            .iter()
            .copied()
            .filter(|&a| {
                a != self.bottom()
                    && centre.iter().all(|&b| b == self.bottom() || b == a || !b.is_subset(a))
            })
            .collect()
    }

    pub fn is_boolean(&self) -> bool {
        self.elements.iter().all(|&a| self.is_complemented(a))
    }

    /// The principal downset `↓c` as a frame of its own.
    pub fn down_frame(&self, c: Elem) -> Result<SubFrame, LatticeError> {
        self.check(c)?;
        let (poset, keep) = self.base.restrict(c.0);
        Ok(SubFrame { frame: FiniteFrame::build(poset)?, keep, offset: 0 })
    }

    /// The principal upset `↑p` as a frame of its own.
    pub fn up_frame(&self, p: Elem) -> Result<SubFrame, LatticeError> {
        self.check(p)?;
        let (poset, keep) = self.base.restrict(self.base.full_mask() & !p.0);
        Ok(SubFrame { frame: FiniteFrame::build(poset)?, keep, offset: p.0 })
    }

    /// Sorted base labels of an element.
    pub fn element_labels(&self, e: Elem) -> Vec<String> {
        let mut v: Vec<String> = (0..self.base.len())
            .filter(|&i| e.contains_point(i))
            .map(|i| self.base.labels()[i].clone())
            .collect();
        v.sort();
        v
    }

    pub fn display(&self, e: Elem) -> String {
        format!("{{{}}}", self.element_labels(e).join(","))
    }

    /// Pairs `(a, b)` where `b` covers `a` in the element lattice.
    pub fn hasse_edges(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for &a in &self.elements {
            for &b in &self.elements {
                if a.is_subset(b) && (b.0 & !a.0).count_ones() == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Materializes a finite distributive lattice given extensionally.
    ///
    /// `leq(i, j)` must be a partial order on `0..n` forming a distributive
    /// lattice. Join-irreducibles become base points labelled by `label`.
    /// Returns the frame and the frame element of each input index.
    pub fn from_lattice<F, L>(n: usize, leq: F, label: L) -> Result<(Self, Vec<Elem>), LatticeError>
    where
        F: Fn(usize, usize) -> bool,
        L: Fn(usize) -> String,
    {
        let bottoms: Vec<usize> = (0..n).filter(|&i| (0..n).all(|j| leq(i, j))).collect();
        if bottoms.len() != 1 {
            return Err(LatticeError::NotDistributive("no unique bottom".into()));
        }
        let bottom = bottoms[0];
        let lt = |i: usize, j: usize| i != j && leq(i, j);
        let mut irreducibles = Vec::new();
        for j in 0..n {
            if j == bottom {
                continue;
            }
            let lower_covers = (0..n)
                .filter(|&y| lt(y, j) && !(0..n).any(|z| lt(y, z) && lt(z, j)))
                .count();
            if lower_covers == 1 {
                irreducibles.push(j);
            }
        }
        if irreducibles.len() > super::poset::MAX_POINTS {
            return Err(LatticeError::TooLarge {
                points: irreducibles.len(),
                max: super::poset::MAX_POINTS,
            });
        }
        let labels: Vec<String> = irreducibles.iter().map(|&j| label(j)).collect();
        let below: Vec<u64> = irreducibles
            .iter()
            .map(|&j| {
                irreducibles
                    .iter()
                    .enumerate()
                    .filter(|(_, &i)| leq(i, j))
                    .fold(0u64, |m, (k, _)| m | (1 << k))
            })
            .collect();
        let frame = FiniteFrame::build(Poset::from_parts(labels, below))?;
        let images: Vec<Elem> = (0..n)
            .map(|x| {
                Elem(
                    irreducibles
                        .iter()
                        .enumerate()
                        .filter(|(_, &j)| leq(j, x))
                        .fold(0u64, |m, (k, _)| m | (1 << k)),
                )
            })
            .collect();
        let mut seen = images.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != n || frame.len() != n {
            return Err(LatticeError::NotDistributive(format!(
                "{} inputs map onto {} downsets of {} join-irreducibles",
                n,
                seen.len(),
                irreducibles.len()
            )));
        }
        Ok((frame, images))
    }

    /// Exhaustive check that binary meet distributes over binary join.
    pub fn check_distributive(&self) -> bool {
        self.elements.iter().all(|&a| {
            self.elements.iter().all(|&b| {
                self.elements.iter().all(|&c| {
                    self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))
                })
            })
        })
    }
}

impl fmt::Display for FiniteFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "frame[{} elements over {} points]", self.len(), self.base.len())
    }
}

/// A principal down- or up-set of a parent frame, materialized as a frame,
/// with the bijection back to the parent's elements.
#[derive(Clone, Debug)]
pub struct SubFrame {
    pub frame: FiniteFrame,
    keep: Vec<usize>,
    offset: u64,
}

impl SubFrame {
    /// Parent element corresponding to a child element.
    pub fn to_parent(&self, e: Elem) -> Elem {
        let mut out = self.offset;
        for (k, &i) in self.keep.iter().enumerate() {
            if e.0 & (1 << k) != 0 {
                out |= 1 << i;
            }
        }
        Elem(out)
    }

    /// Child element of a parent element lying in the sub-range.
    pub fn from_parent(&self, e: Elem) -> Elem {
        let mut out = 0u64;
        for (k, &i) in self.keep.iter().enumerate() {
            if e.0 & (1 << i) != 0 {
                out |= 1 << k;
            }
        }
        Elem(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow_oracle(l: &FiniteFrame, a: Elem, b: Elem) -> Elem {
        l.join_all(l.elements().iter().copied().filter(|&c| l.meet(c, a).is_subset(b)))
    }

    #[test]
    fn small_frames_have_expected_sizes() {
        assert_eq!(FiniteFrame::trivial().len(), 1);
        assert_eq!(FiniteFrame::two().len(), 2);
        let four = FiniteFrame::boolean(2);
        assert_eq!(four.len(), 4);
        assert_eq!(FiniteFrame::chain(3).len(), 3);
        let v = Poset::from_covers(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        // downsets of the "V": ∅, a, b, ab, abc
        assert_eq!(FiniteFrame::build(v).unwrap().len(), 5);
    }

    #[test]
    fn arrow_matches_bruteforce_join() {
        let four = FiniteFrame::boolean(2);
        let m1 = four.element(&["x1"]).unwrap();
        let m2 = four.element(&["x2"]).unwrap();
        assert_eq!(four.pseudocomplement(m1).unwrap(), m2);
        assert_eq!(arrow_oracle(&four, m1, four.bottom()), m2);

        let chain = FiniteFrame::chain(3);
        let m = chain.element(&["c1"]).unwrap();
        assert_eq!(chain.arrow(chain.top(), m).unwrap(), m);
        assert_eq!(arrow_oracle(&chain, chain.top(), m), m);
        for &a in chain.elements() {
            assert_eq!(chain.arrow(a, chain.top()).unwrap(), chain.top());
        }
    }

    #[test]
    fn rather_below_cases() {
        let chain = FiniteFrame::chain(3);
        let m = chain.element(&["c1"]).unwrap();
        assert!(!chain.rather_below(m, m).unwrap());
        for &a in chain.elements() {
            assert!(chain.rather_below(chain.bottom(), a).unwrap());
        }
        assert!(!chain.is_regular());
        assert!(FiniteFrame::two().is_regular());
        assert!(FiniteFrame::boolean(3).is_regular());
    }

    #[test]
    fn membership_errors() {
        let chain = FiniteFrame::chain(3);
        // {c2} alone is not a downset of c1 < c2.
        assert!(matches!(chain.arrow(Elem(0b10), chain.top()), Err(LatticeError::NotAnElement(_))));
        assert!(chain.element(&["c2"]).is_err());
    }

    #[test]
    fn centre_of_chain_is_trivial_bounds() {
        let chain = FiniteFrame::chain(3);
        assert_eq!(chain.centre(), vec![chain.bottom(), chain.top()]);
        assert_eq!(chain.centre_atoms(), vec![chain.top()]);
        let b3 = FiniteFrame::boolean(3);
        assert_eq!(b3.centre_atoms().len(), 3);
    }

    #[test]
    fn from_lattice_recovers_the_diamond() {
        // 0 < 1, 2 < 3
        let leq = |i: usize, j: usize| i == j || i == 0 || j == 3;
        let (frame, images) = FiniteFrame::from_lattice(4, leq, |i| format!("e{i}")).unwrap();
        assert_eq!(frame.len(), 4);
        assert!(frame.is_boolean());
        assert_eq!(images[0], frame.bottom());
        assert_eq!(images[3], frame.top());
    }

    #[test]
    fn from_lattice_rejects_m3() {
        // bottom 0, atoms 1,2,3, top 4: not distributive
        let leq = |i: usize, j: usize| i == j || i == 0 || j == 4;
        assert!(FiniteFrame::from_lattice(5, leq, |i| format!("e{i}")).is_err());
    }

    #[test]
    fn sub_frames_round_trip() {
        let b3 = FiniteFrame::boolean(3);
        let c = b3.element(&["x1", "x3"]).unwrap();
        let down = b3.down_frame(c).unwrap();
        assert_eq!(down.frame.len(), 4);
        for &e in down.frame.elements() {
            assert_eq!(down.from_parent(down.to_parent(e)), e);
            assert!(down.to_parent(e).is_subset(c));
        }
        let up = b3.up_frame(c).unwrap();
        assert_eq!(up.frame.len(), 2);
        assert_eq!(up.to_parent(up.frame.bottom()), c);
        assert_eq!(up.to_parent(up.frame.top()), b3.top());
    }
}
