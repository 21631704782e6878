//! Frame-valued real maps on finite frames.
//!
//! A map `O(ℝ) → L` is stored by its values on the rays `(r, ∞)`, a
//! right-continuous step function with finitely many rational breakpoints.
//! On a finite frame every value must be complemented, so each map is also
//! a rational tuple indexed by the atoms of the centre; arithmetic runs on
//! that tuple form.

pub mod induced;
pub mod reflect;
pub mod underline;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::kernel_frame::KernelFrameError;
use crate::lattice::{Elem, FiniteFrame, FrameMap, LatticeError};
use crate::scalar::Scalar;
use crate::trunc::TruncError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("real maps have different target frames")]
    MixedTargets,
    #[error("not a frame map from the reals: {0}")]
    Invalid(String),
    #[error("tuple has {got} entries, the centre has {expected} atoms")]
    TupleLength { expected: usize, got: usize },
    #[error("not a trunc morphism: {0} is not preserved")]
    NotMorphism(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Trunc(#[from] TruncError),
    #[error(transparent)]
    KernelFrame(#[from] KernelFrameError),
}

/// An open interval with optional rational endpoints (`None` is infinite).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval<S> {
    pub lo: Option<S>,
    pub hi: Option<S>,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: Option<S>, hi: Option<S>) -> Self {
        Interval { lo, hi }
    }

    pub fn above(r: S) -> Self {
        Interval { lo: Some(r), hi: None }
    }

    pub fn below(r: S) -> Self {
        Interval { lo: None, hi: Some(r) }
    }

    pub fn contains(&self, x: &S) -> bool {
        self.lo.as_ref().map_or(true, |l| l < x) && self.hi.as_ref().map_or(true, |h| x < h)
    }
}

/// A finite union of open intervals.
pub type OpenSet<S> = Vec<Interval<S>>;

/// `ℝ ∖ {r}`.
pub fn punctured<S: Scalar>(r: &S) -> OpenSet<S> {
    vec![Interval::below(r.clone()), Interval::above(r.clone())]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealFrameMap<S> {
    target: Arc<FiniteFrame>,
    /// `(r_i, v_i)`: `(r, ∞) ↦ v_i` on `[r_i, r_{i+1})`, `⊤` before `r_1`.
    /// The last value is `⊥`.
    steps: Vec<(S, Elem)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepJson {
    pub breakpoint: String,
    pub value: String,
}

impl<S: Scalar> RealFrameMap<S> {
    /// Validates the step form: breakpoints increase, values strictly
    /// decrease from `⊤` to `⊥`, and every value is rather below itself
    /// (complemented), which is what `v(s) ≺ v(r)` for `r < s` requires
    /// inside a single step.
    pub fn new(target: Arc<FiniteFrame>, steps: Vec<(S, Elem)>) -> Result<Self, RepError> {
        if steps.is_empty() {
            return Err(RepError::Invalid("no breakpoints: the high-end join of pseudocomplements is ⊥".into()));
        }
        let mut prev = target.top();
        for (i, (r, v)) in steps.iter().enumerate() {
            target.check(*v)?;
            if i > 0 && steps[i - 1].0 >= *r {
                return Err(RepError::Invalid(format!("breakpoints not increasing at {r}")));
            }
            if !(target.leq(*v, prev) && *v != prev) {
                return Err(RepError::Invalid(format!("value at {r} does not drop below the previous value")));
            }
            if !target.is_complemented(*v) {
                return Err(RepError::Invalid(format!(
                    "value {} at {r} is not rather below itself",
                    target.display(*v)
                )));
            }
            prev = *v;
        }
        if prev != target.bottom() {
            return Err(RepError::Invalid("last value is not ⊥".into()));
        }
        Ok(RealFrameMap { target, steps })
    }

    /// Like `new` after dropping steps that do not change the value.
    pub fn normalized(target: Arc<FiniteFrame>, steps: Vec<(S, Elem)>) -> Result<Self, RepError> {
        let mut out: Vec<(S, Elem)> = Vec::new();
        let mut prev = target.top();
        for (r, v) in steps {
            if v != prev {
                out.push((r, v));
                prev = v;
            }
        }
        Self::new(target, out)
    }

    /// The constant frame function `r`: `(s, ∞) ↦ ⊤` iff `s < r`.
    pub fn constant(target: &Arc<FiniteFrame>, r: S) -> Self {
        RealFrameMap { target: target.clone(), steps: vec![(r, target.bottom())] }
    }

    pub fn zero(target: &Arc<FiniteFrame>) -> Self {
        Self::constant(target, S::zero())
    }

    pub fn target(&self) -> &Arc<FiniteFrame> {
        &self.target
    }

    pub fn steps(&self) -> &[(S, Elem)] {
        &self.steps
    }

    pub fn breakpoints(&self) -> Vec<S> {
        self.steps.iter().map(|(r, _)| r.clone()).collect()
    }

    /// Value of `(r, ∞)`.
    pub fn upper(&self, r: &S) -> Elem {
        self.steps.iter().rev().find(|(b, _)| b <= r).map_or(self.target.top(), |(_, v)| *v)
    }

    /// `⋁_{s<r}` of the upper values, i.e. the value just left of `r`.
    pub fn upper_left(&self, r: &S) -> Elem {
        self.steps.iter().rev().find(|(b, _)| b < r).map_or(self.target.top(), |(_, v)| *v)
    }

    /// Value of `(−∞, r) = ⋁_{s<r} (s, ∞)*`.
    pub fn lower(&self, r: &S) -> Elem {
        self.target.pc(self.upper_left(r))
    }

    pub fn interval(&self, i: &Interval<S>) -> Elem {
        let up = i.lo.as_ref().map_or(self.target.top(), |l| self.upper(l));
        let down = i.hi.as_ref().map_or(self.target.top(), |h| self.lower(h));
        self.target.meet(up, down)
    }

    pub fn evaluate(&self, u: &[Interval<S>]) -> Elem {
        self.target.join_all(u.iter().map(|i| self.interval(i)))
    }

    /// `f((−∞,0) ∪ (0,∞))`.
    pub fn coz(&self) -> Elem {
        self.evaluate(&punctured(&S::zero()))
    }

    /// `f((−∞,1) ∪ (1,∞))`.
    pub fn con(&self) -> Elem {
        self.evaluate(&punctured(&S::one()))
    }

    /// `⋁_{s<1} f(s,∞)*`; agrees with `con` when `f ≤ 1`.
    pub fn con_below_one(&self) -> Elem {
        self.lower(&S::one())
    }

    /// Values on the centre atoms (in `centre_atoms` order): the supremum of
    /// the `r` with the atom below `(r, ∞)`.
    pub fn to_tuple(&self) -> Vec<S> {
        self.target
            .centre_atoms()
            .into_iter()
            .map(|c| {
                self.steps
                    .iter()
                    .find(|(_, v)| !self.target.leq(c, *v))
                    .map(|(r, _)| r.clone())
                    .expect("last value is bottom")
            })
            .collect()
    }

    pub fn from_tuple(target: &Arc<FiniteFrame>, values: &[S]) -> Result<Self, RepError> {
        let atoms = target.centre_atoms();
        if atoms.len() != values.len() {
            return Err(RepError::TupleLength { expected: atoms.len(), got: values.len() });
        }
        let mut levels = values.to_vec();
        levels.sort();
        levels.dedup();
        let steps = levels
            .into_iter()
            .map(|r| {
                let v = target.join_all(atoms.iter().zip(values).filter(|(_, x)| **x > r).map(|(a, _)| *a));
                (r, v)
            })
            .collect();
        Self::normalized(target.clone(), steps)
    }

    fn same_target(&self, other: &Self) -> Result<(), RepError> {
        if Arc::ptr_eq(&self.target, &other.target) || self.target == other.target {
            Ok(())
        } else {
            Err(RepError::MixedTargets)
        }
    }

    pub fn zip<F: Fn(&S, &S) -> S>(&self, other: &Self, f: F) -> Result<Self, RepError> {
        self.same_target(other)?;
        let v: Vec<S> = self.to_tuple().iter().zip(other.to_tuple().iter()).map(|(a, b)| f(a, b)).collect();
        Self::from_tuple(&self.target, &v)
    }

    pub fn map_values<F: Fn(&S) -> S>(&self, f: F) -> Self {
        let v: Vec<S> = self.to_tuple().iter().map(f).collect();
        Self::from_tuple(&self.target, &v).expect("tuple of the right length")
    }

    pub fn add(&self, other: &Self) -> Result<Self, RepError> {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RepError> {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn meet(&self, other: &Self) -> Result<Self, RepError> {
        self.zip(other, |a, b| a.min_of(b))
    }

    pub fn join(&self, other: &Self) -> Result<Self, RepError> {
        self.zip(other, |a, b| a.max_of(b))
    }

    pub fn neg(&self) -> Self {
        self.map_values(|a| -a.clone())
    }

    pub fn scale(&self, r: &S) -> Self {
        self.map_values(|a| a.clone() * r.clone())
    }

    pub fn pos_part(&self) -> Self {
        self.map_values(|a| a.pos())
    }

    /// `f ∧ 1` with the constant frame function 1.
    pub fn truncate_at_one(&self) -> Self {
        self.map_values(|a| a.min_of(&S::one()))
    }

    pub fn is_nonneg(&self) -> bool {
        self.upper_left(&S::zero()) == self.target.top()
    }

    /// `(f + g)(r, ∞) = ⋁_{s} f(s,∞) ∧ g(r−s,∞)`, evaluated on the step form
    /// alone. Splits `s` between every pair of breakpoints, which is where
    /// the join can change.
    pub fn minkowski_upper(&self, other: &Self, r: &S) -> Result<Elem, RepError> {
        self.same_target(other)?;
        let f = &self.target;
        let mut fs = self.breakpoints();
        fs.push(fs[0].clone() - S::one());
        let gs = other.breakpoints();
        let mut acc = f.bottom();
        for x in &fs {
            for y in &gs {
                // s strictly between r − y and x when that gap is open
                let s = x.midpoint(&(r.clone() - y.clone()));
                acc = f.join(acc, f.meet(self.upper(&s), other.upper(&(r.clone() - s.clone()))));
            }
        }
        // also s far below everything: g must carry all of r
        let low = fs.iter().min().cloned().unwrap() - S::one();
        acc = f.join(acc, f.meet(self.upper(&low), other.upper(&(r.clone() - low))));
        Ok(acc)
    }

    /// `h ∘ f` for a frame map `h` out of the target.
    pub fn push_forward(&self, h: &FrameMap) -> Result<Self, RepError> {
        if **h.source() != *self.target {
            return Err(RepError::MixedTargets);
        }
        let steps = self.steps.iter().map(|(r, v)| (r.clone(), h.at(*v))).collect();
        Self::normalized(h.target().clone(), steps)
    }

    pub fn to_json(&self) -> Vec<StepJson> {
        self.steps
            .iter()
            .map(|(r, v)| StepJson { breakpoint: r.to_string(), value: self.target.display(*v) })
            .collect()
    }

    /// Two maps agree iff they agree at every breakpoint of both and just
    /// left of each; the normalized step form makes this plain equality.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let mut probes = self.breakpoints();
        probes.extend(other.breakpoints());
        self.target == other.target
            && probes.iter().all(|r| self.upper(r) == other.upper(r) && self.upper_left(r) == other.upper_left(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn four() -> Arc<FiniteFrame> {
        Arc::new(FiniteFrame::boolean(2))
    }

    #[test]
    fn validation() {
        let f = four();
        let p = f.element(&["x1"]).unwrap();
        assert!(RealFrameMap::<Q>::new(f.clone(), vec![]).is_err());
        assert!(RealFrameMap::new(f.clone(), vec![(q(1, 1), p)]).is_err());
        assert!(RealFrameMap::new(f.clone(), vec![(q(1, 1), p), (q(0, 1), f.bottom())]).is_err());
        assert!(RealFrameMap::new(f.clone(), vec![(q(0, 1), p), (q(1, 1), f.bottom())]).is_ok());
        let chain = Arc::new(FiniteFrame::chain(3));
        let mid = chain.elements()[1];
        let e = RealFrameMap::new(chain.clone(), vec![(q(0, 1), mid), (q(1, 1), chain.bottom())]).unwrap_err();
        assert!(matches!(e, RepError::Invalid(m) if m.contains("rather below")));
    }

    #[test]
    fn atom_examples_on_four() {
        let f = four();
        let p = f.element(&["x1"]).unwrap();
        let a = RealFrameMap::from_tuple(&f, &[q(3, 1), q(1, 1)]).unwrap();
        let b = RealFrameMap::from_tuple(&f, &[q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(a.meet(&b).unwrap().to_tuple(), vec![q(1, 1), q(1, 1)]);
        assert_eq!(a.sub(&b).unwrap().coz(), p);
        assert_eq!(a.truncate_at_one().to_tuple(), vec![q(1, 1), q(1, 1)]);
        assert_eq!(a.con(), p);
        assert_eq!(a.truncate_at_one().con(), f.bottom());
        assert_eq!(a.add(&RealFrameMap::zero(&f)).unwrap(), a);
    }

    #[test]
    fn constant_point_map() {
        let two = Arc::new(FiniteFrame::two());
        let five = RealFrameMap::constant(&two, q(5, 1));
        let u = vec![Interval::new(Some(q(4, 1)), Some(q(6, 1)))];
        assert_eq!(five.evaluate(&u), two.top());
        let v = vec![Interval::new(Some(q(5, 1)), Some(q(6, 1)))];
        assert_eq!(five.evaluate(&v), two.bottom());
    }

    #[test]
    fn minkowski_matches_tuple_sum() {
        let f = Arc::new(FiniteFrame::boolean(3));
        let a = RealFrameMap::from_tuple(&f, &[q(3, 1), q(-1, 2), q(0, 1)]).unwrap();
        let b = RealFrameMap::from_tuple(&f, &[q(1, 3), q(2, 1), q(-5, 1)]).unwrap();
        let s = a.add(&b).unwrap();
        for r in [-6i64, -5, -1, 0, 1, 2, 3, 4] {
            for d in [1i64, 3] {
                let r = q(r, d);
                assert_eq!(a.minkowski_upper(&b, &r).unwrap(), s.upper(&r), "r={r}");
            }
        }
    }
}
