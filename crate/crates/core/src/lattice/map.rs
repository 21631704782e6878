use std::sync::Arc;

use serde::Serialize;

use super::frame::{Elem, FiniteFrame};
use super::LatticeError;

/// A function between finite frames given by its table on source elements.
#[derive(Clone, Debug)]
pub struct FrameMap {
    source: Arc<FiniteFrame>,
    target: Arc<FiniteFrame>,
    table: Vec<Elem>,
}

/// Outcome of checking the frame-map laws, with the first violating pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapReport {
    pub preserves_bottom: bool,
    pub preserves_top: bool,
    pub meet_violation: Option<(String, String)>,
    pub join_violation: Option<(String, String)>,
}

impl MapReport {
    pub fn is_frame_map(&self) -> bool {
        self.preserves_bottom
            && self.preserves_top
            && self.meet_violation.is_none()
            && self.join_violation.is_none()
    }
}

impl FrameMap {
    /// Table entries are aligned with `source.elements()`.
    pub fn new(
        source: Arc<FiniteFrame>,
        target: Arc<FiniteFrame>,
        table: Vec<Elem>,
    ) -> Result<Self, LatticeError> {
        if table.len() != source.len() {
            return Err(LatticeError::TableLength { expected: source.len(), got: table.len() });
        }
        for &e in &table {
            target.check(e)?;
        }
        Ok(FrameMap { source, target, table })
    }

    pub fn from_fn<F: Fn(Elem) -> Elem>(
        source: Arc<FiniteFrame>,
        target: Arc<FiniteFrame>,
        f: F,
    ) -> Result<Self, LatticeError> {
        let table = source.elements().iter().map(|&e| f(e)).collect();
        Self::new(source, target, table)
    }

    /// Extends images of the join-irreducibles `↓i` (one per base point) by joins.
    pub fn from_generators(
        source: Arc<FiniteFrame>,
        target: Arc<FiniteFrame>,
        images: &[Elem],
    ) -> Result<Self, LatticeError> {
        if images.len() != source.base().len() {
            return Err(LatticeError::TableLength {
                expected: source.base().len(),
                got: images.len(),
            });
        }
        let t = target.clone();
        Self::from_fn(source, target, |e| {
            t.join_all((0..images.len()).filter(|&i| e.contains_point(i)).map(|i| images[i]))
        })
    }

    pub fn identity(frame: Arc<FiniteFrame>) -> Self {
        let table = frame.elements().to_vec();
        FrameMap { source: frame.clone(), target: frame, table }
    }

    pub fn source(&self) -> &Arc<FiniteFrame> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteFrame> {
        &self.target
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, e: Elem) -> Result<Elem, LatticeError> {
        let i = self.source.position(e).ok_or(LatticeError::NotAnElement(e.0))?;
        Ok(self.table[i])
    }

    pub(crate) fn at(&self, e: Elem) -> Elem {
        self.table[self.source.position(e).expect("source element")]
    }

    pub fn check(&self) -> MapReport {
        let s = &self.source;
        let t = &self.target;
        let mut report = MapReport {
            preserves_bottom: self.at(s.bottom()) == t.bottom(),
            preserves_top: self.at(s.top()) == t.top(),
            meet_violation: None,
            join_violation: None,
        };
        'outer: for &a in s.elements() {
            for &b in s.elements() {
                let fa = self.at(a);
                let fb = self.at(b);
                if report.meet_violation.is_none() && self.at(s.meet(a, b)) != t.meet(fa, fb) {
                    report.meet_violation = Some((s.display(a), s.display(b)));
                }
                if report.join_violation.is_none() && self.at(s.join(a, b)) != t.join(fa, fb) {
                    report.join_violation = Some((s.display(a), s.display(b)));
                }
                if report.meet_violation.is_some() && report.join_violation.is_some() {
                    break 'outer;
                }
            }
        }
        report
    }

    pub fn validate(self) -> Result<Self, LatticeError> {
        let r = self.check();
        if r.is_frame_map() {
            Ok(self)
        } else {
            Err(LatticeError::NotFrameMap(format!("{r:?}")))
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FrameMap) -> Result<FrameMap, LatticeError> {
        if *self.target != *next.source {
            return Err(LatticeError::NotFrameMap("composition of mismatched frames".into()));
        }
        let table = self.table.iter().map(|&e| next.at(e)).collect();
        Ok(FrameMap { source: self.source.clone(), target: next.target.clone(), table })
    }

    pub fn is_injective(&self) -> bool {
        let mut v = self.table.clone();
        v.sort();
        v.dedup();
        v.len() == self.table.len()
    }

    pub fn is_surjective(&self) -> bool {
        let mut v = self.table.clone();
        v.sort();
        v.dedup();
        v.len() == self.target.len()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Same table, compared element by element.
    pub fn agrees_with(&self, other: &FrameMap) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.table == other.table
    }
}

/// All frame maps `source → target`, by backtracking over images of the
/// join-irreducibles.
pub fn enumerate_frame_maps(source: &Arc<FiniteFrame>, target: &Arc<FiniteFrame>) -> Vec<FrameMap> {
    let base = source.base();
    let order = base.linear_extension();
    let n = base.len();
    let mut images = vec![Elem(0); n];
    let mut assigned = vec![false; n];
    let mut out = Vec::new();

    fn rec(
        k: usize,
        order: &[usize],
        source: &Arc<FiniteFrame>,
        target: &Arc<FiniteFrame>,
        images: &mut Vec<Elem>,
        assigned: &mut Vec<bool>,
        out: &mut Vec<FrameMap>,
    ) {
        let base = source.base();
        if k == order.len() {
            let top = target.join_all(images.iter().copied());
            if top == target.top() {
                let m = FrameMap::from_generators(source.clone(), target.clone(), images)
                    .expect("images are target elements");
                debug_assert!(m.check().is_frame_map());
                out.push(m);
            }
            return;
        }
        let i = order[k];
        for &t in target.elements() {
            // Monotone on the base.
            let below_ok = (0..base.len())
                .filter(|&j| j != i && base.leq(j, i))
                .all(|j| images[j].is_subset(t));
            if !below_ok {
                continue;
            }
            images[i] = t;
            assigned[i] = true;
            // f(↓i) ∧ f(↓j) = f(↓i ∩ ↓j) for every assigned j.
            let meets_ok = (0..base.len()).filter(|&j| assigned[j]).all(|j| {
                let common = base.down(i) & base.down(j);
                let rhs = target.join_all(
                    (0..base.len()).filter(|&m| common & (1 << m) != 0).map(|m| images[m]),
                );
                target.meet(t, images[j]) == rhs
            });
            if meets_ok {
                rec(k + 1, order, source, target, images, assigned, out);
            }
            assigned[i] = false;
        }
        images[i] = Elem(0);
    }

    rec(0, &order, source, target, &mut images, &mut assigned, &mut out);
    out
}

/// A point of a frame: a frame map to `2` with its kernel.
#[derive(Clone, Debug)]
pub struct Point {
    pub map: FrameMap,
    pub kernel: Elem,
}

/// All points of `frame`, ordered by kernel.
pub fn points(frame: &Arc<FiniteFrame>) -> Vec<Point> {
    let two = Arc::new(FiniteFrame::two());
    let mut out: Vec<Point> = enumerate_frame_maps(frame, &two)
        .into_iter()
        .map(|map| {
            let kernel = frame.join_all(
                frame.elements().iter().copied().filter(|&e| map.at(e) == two.bottom()),
            );
            Point { map, kernel }
        })
        .collect();
    out.sort_by_key(|p| frame.position(p.kernel));
    out
}

/// Whether `p` is prime: `p ≠ ⊤` and `a ∧ b ≤ p` forces `a ≤ p` or `b ≤ p`.
pub fn is_prime(frame: &FiniteFrame, p: Elem) -> bool {
    p != frame.top()
        && frame.elements().iter().all(|&a| {
            frame.elements().iter().all(|&b| {
                !frame.meet(a, b).is_subset(p) || a.is_subset(p) || b.is_subset(p)
            })
        })
}

/// The point with kernel `p`: `a ↦ ⊥` iff `a ≤ p`.
pub fn point_with_kernel(frame: &Arc<FiniteFrame>, p: Elem) -> Result<FrameMap, LatticeError> {
    frame.check(p)?;
    if !is_prime(frame, p) {
        return Err(LatticeError::NotPrime(frame.display(p)));
    }
    let two = Arc::new(FiniteFrame::two());
    let t = two.clone();
    FrameMap::from_fn(frame.clone(), two, move |a| if a.is_subset(p) { t.bottom() } else { t.top() })
}

/// The closed quotient `a ↦ a ∨ p` onto `↑p` and the open quotient
/// `a ↦ a ∧ p` onto `↓p`, both as frame maps into materialized frames.
pub fn point_quotients(
    frame: &Arc<FiniteFrame>,
    p: Elem,
) -> Result<(FrameMap, FrameMap), LatticeError> {
    let up = frame.up_frame(p)?;
    let down = frame.down_frame(p)?;
    let up_frame = Arc::new(up.frame.clone());
    let down_frame = Arc::new(down.frame.clone());
    let closed = FrameMap::from_fn(frame.clone(), up_frame, |a| up.from_parent(frame.join(a, p)))?;
    let open = FrameMap::from_fn(frame.clone(), down_frame, |a| down.from_parent(frame.meet(a, p)))?;
    Ok((closed, open))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Poset;

    fn brute_force_count(s: &Arc<FiniteFrame>, t: &Arc<FiniteFrame>) -> usize {
        // Every function on elements, filtered by the laws.
        let n = s.len();
        let m = t.len();
        let mut count = 0;
        let total = (m as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let table: Vec<Elem> = (0..n)
                .map(|_| {
                    let e = t.elements()[(c % m as u64) as usize];
                    c /= m as u64;
                    e
                })
                .collect();
            let f = FrameMap::new(s.clone(), t.clone(), table).unwrap();
            if f.check().is_frame_map() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let frames: Vec<Arc<FiniteFrame>> = vec![
            Arc::new(FiniteFrame::two()),
            Arc::new(FiniteFrame::chain(3)),
            Arc::new(FiniteFrame::boolean(2)),
            Arc::new(
                FiniteFrame::build(
                    Poset::from_covers(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap(),
                )
                .unwrap(),
            ),
        ];
        for s in &frames {
            for t in &frames {
                if s.len() > 4 && t.len() > 4 {
                    continue;
                }
                assert_eq!(enumerate_frame_maps(s, t).len(), brute_force_count(s, t));
            }
        }
    }

    #[test]
    fn points_are_primes() {
        let l = Arc::new(FiniteFrame::boolean(3));
        let pts = points(&l);
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert!(is_prime(&l, p.kernel));
            assert_eq!(p.kernel.bits().count_ones(), 2);
            let q = point_with_kernel(&l, p.kernel).unwrap();
            assert!(q.agrees_with(&p.map));
        }
        let chain = Arc::new(FiniteFrame::chain(4));
        assert_eq!(points(&chain).len(), 3);
    }

    #[test]
    fn quotients_are_frame_maps() {
        let chain = Arc::new(FiniteFrame::chain(4));
        for p in points(&chain) {
            let (c, o) = point_quotients(&chain, p.kernel).unwrap();
            assert!(c.check().is_frame_map());
            assert!(o.check().is_frame_map());
        }
    }

    #[test]
    fn check_names_violations() {
        let four = Arc::new(FiniteFrame::boolean(2));
        let two = Arc::new(FiniteFrame::two());
        // Constant ⊤ fails bottom preservation.
        let f = FrameMap::from_fn(four.clone(), two.clone(), |_| two.top()).unwrap();
        let r = f.check();
        assert!(!r.preserves_bottom);
        // Sends both atoms to ⊤: meet fails.
        let g = FrameMap::from_fn(four.clone(), two.clone(), |e| {
            if e.bits() == 0 {
                Elem(0)
            } else {
                Elem(1)
            }
        })
        .unwrap();
        let r = g.check();
        assert!(r.preserves_bottom && r.preserves_top);
        assert!(r.meet_violation.is_some());
        assert!(r.join_violation.is_none());
    }
}
