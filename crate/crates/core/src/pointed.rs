//! Pointed frames, filtered frames, `2L`, `2_F L` and the equivalence between
//! pointed and filtered frames.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lattice::io::{ParseError, PosetFile};
use crate::lattice::map::{enumerate_frame_maps, is_prime, point_with_kernel};
use crate::lattice::{Elem, FiniteFrame, FrameMap, LatticeError, MapReport, Poset, SubFrame};

/// Label used for the extra base point of `2L`.
pub const POINT_LABEL: &str = "*";

/// A frame with a designated point `frame → 2`.
#[derive(Clone, Debug)]
pub struct PointedFrame {
    frame: Arc<FiniteFrame>,
    point: FrameMap,
    kernel: Elem,
}

impl PointedFrame {
    pub fn new(frame: Arc<FiniteFrame>, point: FrameMap) -> Result<Self, LatticeError> {
        if *point.source() != frame || point.target().len() != 2 {
            return Err(LatticeError::NotFrameMap("point must be a map into 2".into()));
        }
        let point = point.validate()?;
        let kernel = frame.join_all(
            frame.elements().iter().copied().filter(|&e| point.at(e) == Elem(0)),
        );
        Ok(PointedFrame { frame, point, kernel })
    }

    /// The point whose kernel is the prime element `p`.
    pub fn with_kernel(frame: Arc<FiniteFrame>, p: Elem) -> Result<Self, LatticeError> {
        let point = point_with_kernel(&frame, p)?;
        Ok(PointedFrame { frame, point, kernel: p })
    }

    pub fn frame(&self) -> &Arc<FiniteFrame> {
        &self.frame
    }

    pub fn point(&self) -> &FrameMap {
        &self.point
    }

    pub fn kernel(&self) -> Elem {
        self.kernel
    }

    /// `point(a) = ⊤`.
    pub fn at(&self, a: Elem) -> bool {
        self.point.at(a) != Elem(0)
    }

    /// The kernel is complemented.
    pub fn is_isolated(&self) -> bool {
        self.frame.is_complemented(self.kernel)
    }

    /// Every pointed frame whose base has at most `max_points` points.
    pub fn enumerate(max_points: usize) -> Vec<PointedFrame> {
        let mut out = Vec::new();
        for n in 0..=max_points {
            for p in Poset::enumerate(n) {
                let frame = Arc::new(FiniteFrame::build(p).expect("small frame"));
                for &k in frame.elements() {
                    if is_prime(&frame, k) {
                        out.push(PointedFrame::with_kernel(frame.clone(), k).expect("prime"));
                    }
                }
            }
        }
        out
    }
}

/// A pointed map `h: M → N`: a frame map with `point_N ∘ h = point_M`.
pub fn is_pointed_map(h: &FrameMap, m: &PointedFrame, n: &PointedFrame) -> bool {
    *h.source() == m.frame
        && *h.target() == n.frame
        && h.check().is_frame_map()
        && m.frame.elements().iter().all(|&a| n.at(h.at(a)) == m.at(a))
}

/// All pointed maps `M → N`.
pub fn pointed_maps(m: &PointedFrame, n: &PointedFrame) -> Vec<FrameMap> {
    enumerate_frame_maps(&m.frame, &n.frame)
        .into_iter()
        .filter(|h| m.frame.elements().iter().all(|&a| n.at(h.at(a)) == m.at(a)))
        .collect()
}

/// A filter, stored as its set of members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    members: Vec<Elem>,
}

impl Filter {
    /// Validates nonemptiness, upward closure and meet closure.
    pub fn new(frame: &FiniteFrame, members: Vec<Elem>) -> Result<Self, LatticeError> {
        for &m in &members {
            frame.check(m)?;
        }
        let mut members = members;
        members.sort();
        members.dedup();
        if members.is_empty() {
            return Err(LatticeError::NotFilter("nonempty: no members".into()));
        }
        for &a in &members {
            for &b in frame.elements() {
                if a.is_subset(b) && members.binary_search(&b).is_err() {
                    return Err(LatticeError::NotFilter(format!(
                        "upward closure: {} is a member, {} is not",
                        frame.display(a),
                        frame.display(b)
                    )));
                }
            }
        }
        for &a in &members {
            for &b in &members {
                let m = frame.meet(a, b);
                if members.binary_search(&m).is_err() {
                    return Err(LatticeError::NotFilter(format!(
                        "meet closure: {} ∧ {} = {} is not a member",
                        frame.display(a),
                        frame.display(b),
                        frame.display(m)
                    )));
                }
            }
        }
        Ok(Filter { members })
    }

    /// `↑f`.
    pub fn principal(frame: &FiniteFrame, f: Elem) -> Result<Self, LatticeError> {
        frame.check(f)?;
        let mut members: Vec<Elem> =
            frame.elements().iter().copied().filter(|&b| f.is_subset(b)).collect();
        members.sort();
        Ok(Filter { members })
    }

    /// The filter generated by `gens` (on a finite frame: `↑⋀ gens`).
    pub fn generated(frame: &FiniteFrame, gens: &[Elem]) -> Result<Self, LatticeError> {
        for &g in gens {
            frame.check(g)?;
        }
        Self::principal(frame, frame.meet_all(gens.iter().copied()))
    }

    pub fn improper(frame: &FiniteFrame) -> Self {
        let mut members = frame.elements().to_vec();
        members.sort();
        Filter { members }
    }

    /// All filters on a finite frame, one per element.
    pub fn all(frame: &FiniteFrame) -> Vec<Filter> {
        frame.elements().iter().map(|&f| Self::principal(frame, f).expect("element")).collect()
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn contains(&self, a: Elem) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    /// Least member.
    pub fn generator(&self) -> Elem {
        Elem(self.members.iter().fold(u64::MAX, |m, e| m & e.0))
    }

    pub fn is_proper(&self) -> bool {
        !self.contains(Elem(0))
    }

    /// `⋁_{b∈F} b* = ⊤`.
    pub fn is_regular(&self, frame: &FiniteFrame) -> bool {
        frame.join_all(self.members.iter().map(|&b| frame.pc(b))) == frame.top()
    }
}

#[derive(Clone, Debug)]
pub struct FilteredFrame {
    pub frame: Arc<FiniteFrame>,
    pub filter: Filter,
}

impl FilteredFrame {
    pub fn new(frame: Arc<FiniteFrame>, filter: Filter) -> Self {
        FilteredFrame { frame, filter }
    }

    pub fn is_regular(&self) -> bool {
        self.filter.is_regular(&self.frame)
    }
}

/// A morphism `(L,F) → (L',F')`: an element `c` of `L'` and a frame map
/// `f: L → ↓c`, stored by its values in `L'`.
#[derive(Clone, Debug)]
pub struct FilteredMorphism {
    pub source: FilteredFrame,
    pub target: FilteredFrame,
    pub c: Elem,
    values: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilteredReport {
    pub frame_map: MapReport,
    pub values_below_c: bool,
    /// A filter member `a` with `c → f(a)` outside the target filter.
    pub escaping: Option<String>,
}

impl FilteredReport {
    pub fn is_valid(&self) -> bool {
        self.frame_map.is_frame_map() && self.values_below_c && self.escaping.is_none()
    }
}

impl FilteredMorphism {
    pub fn new(
        source: FilteredFrame,
        target: FilteredFrame,
        c: Elem,
        values: Vec<Elem>,
    ) -> Result<Self, LatticeError> {
        target.frame.check(c)?;
        if values.len() != source.frame.len() {
            return Err(LatticeError::TableLength { expected: source.frame.len(), got: values.len() });
        }
        for &v in &values {
            target.frame.check(v)?;
        }
        Ok(FilteredMorphism { source, target, c, values })
    }

    pub fn identity(lf: &FilteredFrame) -> Self {
        FilteredMorphism {
            source: lf.clone(),
            target: lf.clone(),
            c: lf.frame.top(),
            values: lf.frame.elements().to_vec(),
        }
    }

    pub fn value(&self, a: Elem) -> Elem {
        self.values[self.source.frame.position(a).expect("source element")]
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    /// `f` as a frame map into the materialized `↓c`.
    pub fn as_frame_map(&self) -> Result<(FrameMap, SubFrame), LatticeError> {
        let down = self.target.frame.down_frame(self.c)?;
        let target = Arc::new(down.frame.clone());
        let map = FrameMap::from_fn(self.source.frame.clone(), target, |a| {
            down.from_parent(self.target.frame.meet(self.value(a), self.c))
        })?;
        Ok((map, down))
    }

    pub fn check(&self) -> FilteredReport {
        let values_below_c = self.values.iter().all(|v| v.is_subset(self.c));
        let frame_map = match self.as_frame_map() {
            Ok((m, _)) => m.check(),
            Err(e) => MapReport {
                preserves_bottom: false,
                preserves_top: false,
                meet_violation: Some((e.to_string(), String::new())),
                join_violation: None,
            },
        };
        let t = &self.target.frame;
        let escaping = self
            .source
            .filter
            .members()
            .iter()
            .find(|&&a| !self.target.filter.contains(t.arrow_unchecked(self.c, self.value(a))))
            .map(|&a| self.source.frame.display(a));
        FilteredReport { frame_map, values_below_c, escaping }
    }

    /// `next ∘ self = (g(c), g ∘ f)`.
    pub fn then(&self, next: &FilteredMorphism) -> Result<FilteredMorphism, LatticeError> {
        if *self.target.frame != *next.source.frame || self.target.filter != next.source.filter {
            return Err(LatticeError::NotFrameMap("composition of mismatched filtered frames".into()));
        }
        let values = self.values.iter().map(|&v| next.value(v)).collect();
        Ok(FilteredMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            c: next.value(self.c),
            values,
        })
    }

    /// All morphisms `(L,F) → (L',F')`, valid or not, with their reports.
    pub fn enumerate_all(source: &FilteredFrame, target: &FilteredFrame) -> Vec<FilteredMorphism> {
        let mut out = Vec::new();
        for &c in target.frame.elements() {
            let down = target.frame.down_frame(c).expect("element");
            let down_frame = Arc::new(down.frame.clone());
            for f in enumerate_frame_maps(&source.frame, &down_frame) {
                let values = f.table().iter().map(|&e| down.to_parent(e)).collect();
                out.push(FilteredMorphism { source: source.clone(), target: target.clone(), c, values });
            }
        }
        out
    }
}

/// Splits an element of `2L` into `(ε, a)`.
pub fn split(e: Elem) -> (bool, Elem) {
    (e.0 & 1 != 0, Elem(e.0 >> 1))
}

/// The element `(ε, a)` of `2L`.
pub fn pair(eps: bool, a: Elem) -> Elem {
    Elem((a.0 << 1) | eps as u64)
}

fn point_label(l: &FiniteFrame) -> String {
    let mut label = POINT_LABEL.to_string();
    while l.base().index_of(&label).is_some() {
        label.push('\'');
    }
    label
}

/// `2L = 2 × L`, pointed by the first projection.
pub fn product2(l: &FiniteFrame) -> Result<PointedFrame, LatticeError> {
    let n = l.base().len();
    if n + 1 > crate::lattice::poset::MAX_POINTS {
        return Err(LatticeError::TooLarge { points: n + 1, max: crate::lattice::poset::MAX_POINTS });
    }
    let mut labels = vec![point_label(l)];
    labels.extend(l.base().labels().iter().cloned());
    let mut below = vec![1u64];
    below.extend((0..n).map(|i| l.base().down(i) << 1));
    let frame = Arc::new(FiniteFrame::build(Poset::from_parts(labels, below))?);
    let two = Arc::new(FiniteFrame::two());
    let point = FrameMap::from_fn(frame.clone(), two, |e| Elem(split(e).0 as u64))?;
    PointedFrame::new(frame, point)
}

/// The second projection `2L → L`.
pub fn projection(two_l: &PointedFrame, l: &Arc<FiniteFrame>) -> Result<FrameMap, LatticeError> {
    FrameMap::from_fn(two_l.frame.clone(), l.clone(), |e| split(e).1)
}

/// `2_F L` together with its insertion into `2L`.
#[derive(Clone, Debug)]
pub struct TwoSubF {
    pub base: FilteredFrame,
    pub pointed: PointedFrame,
    pub ambient: PointedFrame,
    pub insertion: FrameMap,
    lookup: HashMap<Elem, Elem>,
}

impl TwoSubF {
    /// Element of `2_F L` with the given `2L` coordinates.
    pub fn element(&self, eps: bool, a: Elem) -> Option<Elem> {
        self.lookup.get(&pair(eps, a)).copied()
    }

    /// `(ε, a)` coordinates of an element of `2_F L`.
    pub fn coords(&self, e: Elem) -> (bool, Elem) {
        split(self.insertion.at(e))
    }
}

/// `2_F L = {(ε,a) : ε = ⊤ ⇒ a ∈ F}`; this is the functor D on objects.
pub fn two_sub_f(lf: &FilteredFrame) -> Result<TwoSubF, LatticeError> {
    let l = &lf.frame;
    let ambient = product2(l)?;
    let members: Vec<Elem> = ambient
        .frame
        .elements()
        .iter()
        .copied()
        .filter(|&e| {
            let (eps, a) = split(e);
            !eps || lf.filter.contains(a)
        })
        .collect();
    let pl = point_label(l);
    let (frame, images) = FiniteFrame::from_lattice(
        members.len(),
        |i, j| members[i].is_subset(members[j]),
        |j| {
            let (eps, a) = split(members[j]);
            if eps {
                pl.clone()
            } else {
                (0..l.base().len())
                    .find(|&i| l.base().down(i) == a.0)
                    .map(|i| l.base().labels()[i].clone())
                    .unwrap_or_else(|| l.display(a))
            }
        },
    )?;
    let frame = Arc::new(frame);
    let to_ambient: HashMap<Elem, Elem> =
        images.iter().zip(members.iter()).map(|(&img, &m)| (img, m)).collect();
    let lookup: HashMap<Elem, Elem> = to_ambient.iter().map(|(&k, &v)| (v, k)).collect();
    let insertion =
        FrameMap::from_fn(frame.clone(), ambient.frame.clone(), |e| to_ambient[&e])?;
    let two = Arc::new(FiniteFrame::two());
    let point = FrameMap::from_fn(frame.clone(), two, |e| Elem(split(to_ambient[&e]).0 as u64))?;
    let pointed = PointedFrame::new(frame, point)?;
    Ok(TwoSubF { base: lf.clone(), pointed, ambient, insertion, lookup })
}

/// The functor E on objects: `M ↦ (↓p, {p ∧ a : point(a) = ⊤})`.
#[derive(Clone, Debug)]
pub struct FunctorE {
    pub filtered: FilteredFrame,
    pub down: SubFrame,
}

pub fn functor_e(m: &PointedFrame) -> Result<FunctorE, LatticeError> {
    let p = m.kernel;
    let down = m.frame.down_frame(p)?;
    let frame = Arc::new(down.frame.clone());
    let members: Vec<Elem> = m
        .frame
        .elements()
        .iter()
        .filter(|&&a| m.at(a))
        .map(|&a| down.from_parent(m.frame.meet(p, a)))
        .collect();
    let filter = Filter::new(&frame, members)?;
    Ok(FunctorE { filtered: FilteredFrame::new(frame, filter), down })
}

/// The functor D on a morphism `(c, f)`:
/// `(⊥,a) ↦ (⊥, f(a))` and `(⊤,a) ↦ (⊤, c → f(a))`.
///
/// The table is a frame map exactly when `c ∨ (c → f(a)) = ⊤` for every `a`
/// in the source filter. This always holds when `c` is complemented, so in
/// particular for regular targets.
pub fn functor_d_morphism(
    m: &FilteredMorphism,
    src: &TwoSubF,
    dst: &TwoSubF,
) -> Result<FrameMap, LatticeError> {
    let t = &m.target.frame;
    let mut table = Vec::with_capacity(src.pointed.frame.len());
    for &e in src.pointed.frame.elements() {
        let (eps, a) = src.coords(e);
        let fa = m.value(a);
        let img = if eps { dst.element(true, t.arrow_unchecked(m.c, fa)) } else { dst.element(false, fa) };
        let img = img.ok_or_else(|| {
            LatticeError::NotFrameMap(format!("image of {} leaves the target", src.pointed.frame.display(e)))
        })?;
        table.push(img);
    }
    FrameMap::new(src.pointed.frame.clone(), dst.pointed.frame.clone(), table)
}

/// The functor E on a pointed map `h: M → N`: `c = h(p_M)` and `f = h` on `↓p_M`.
pub fn functor_e_morphism(
    h: &FrameMap,
    em: &FunctorE,
    en: &FunctorE,
    m: &PointedFrame,
) -> Result<FilteredMorphism, LatticeError> {
    let c = en.down.from_parent(h.at(m.kernel));
    let values = em
        .filtered
        .frame
        .elements()
        .iter()
        .map(|&a| en.down.from_parent(h.at(em.down.to_parent(a))))
        .collect();
    FilteredMorphism::new(em.filtered.clone(), en.filtered.clone(), c, values)
}

/// Unit `M → D(E(M))`, `a ↦ (point(a), p ∧ a)`.
pub fn unit_pointed(m: &PointedFrame, em: &FunctorE, dem: &TwoSubF) -> Result<FrameMap, LatticeError> {
    let mut table = Vec::with_capacity(m.frame.len());
    for &a in m.frame.elements() {
        let img = dem.element(m.at(a), em.down.from_parent(m.frame.meet(m.kernel, a)));
        table.push(img.ok_or_else(|| LatticeError::NotFrameMap("unit leaves 2_F L".into()))?);
    }
    FrameMap::new(m.frame.clone(), dem.pointed.frame.clone(), table)
}

/// Unit `L → E(D(L,F))` on frames, `a ↦ (⊥, a)`.
pub fn unit_filtered(lf: &FilteredFrame, d: &TwoSubF, ed: &FunctorE) -> Result<FrameMap, LatticeError> {
    let mut table = Vec::with_capacity(lf.frame.len());
    for &a in lf.frame.elements() {
        let e = d.element(false, a).ok_or_else(|| LatticeError::NotFrameMap("(⊥,a) missing".into()))?;
        table.push(ed.down.from_parent(e));
    }
    FrameMap::new(lf.frame.clone(), ed.filtered.frame.clone(), table)
}

/// Outcome of both round trips through D and E.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTrip {
    /// `L → E(D(L,F))` is a frame isomorphism carrying `F` onto the new filter.
    pub filtered_unit_iso: bool,
    /// `M → D(E(M))` is a pointed frame isomorphism, with `M = D(L,F)`.
    pub pointed_unit_iso: bool,
}

pub fn round_trip(lf: &FilteredFrame) -> Result<RoundTrip, LatticeError> {
    let d = two_sub_f(lf)?;
    let ed = functor_e(&d.pointed)?;
    let eps = unit_filtered(lf, &d, &ed)?;
    let filter_image: Vec<Elem> = lf.filter.members().iter().map(|&a| eps.at(a)).collect();
    let filter_ok = filter_image.len() == ed.filtered.filter.members().len()
        && filter_image.iter().all(|&b| ed.filtered.filter.contains(b));
    let filtered_unit_iso = eps.check().is_frame_map() && eps.is_isomorphism() && filter_ok;
    let pointed_unit_iso = pointed_unit_is_iso(&d.pointed)?;
    Ok(RoundTrip { filtered_unit_iso, pointed_unit_iso })
}

pub fn pointed_unit_is_iso(m: &PointedFrame) -> Result<bool, LatticeError> {
    let em = functor_e(m)?;
    let dem = two_sub_f(&em.filtered)?;
    let eta = unit_pointed(m, &em, &dem)?;
    Ok(eta.is_isomorphism() && is_pointed_map(&eta, m, &dem.pointed))
}

/// `ν_M = point × π: M → 2(↓p)`.
#[derive(Clone, Debug)]
pub struct FreeIsolated {
    pub isolated: PointedFrame,
    pub nu: FrameMap,
    pub down: SubFrame,
}

pub fn free_isolated(m: &PointedFrame) -> Result<FreeIsolated, LatticeError> {
    let down = m.frame.down_frame(m.kernel)?;
    let isolated = product2(&down.frame)?;
    let nu = FrameMap::from_fn(m.frame.clone(), isolated.frame.clone(), |a| {
        pair(m.at(a), down.from_parent(m.frame.meet(m.kernel, a)))
    })?;
    Ok(FreeIsolated { isolated, nu, down })
}

/// Finite-scale checks on `2_F L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameChecks {
    pub projection_dense: bool,
    pub filter_proper: bool,
    pub regular: bool,
    pub filter_regular: bool,
    pub compact: bool,
}

pub fn frame_checks(d: &TwoSubF) -> FrameChecks {
    let f = &d.pointed.frame;
    let projection_dense = f
        .elements()
        .iter()
        .all(|&e| d.coords(e).1 != Elem(0) || e == f.bottom());
    FrameChecks {
        projection_dense,
        filter_proper: d.base.filter.is_proper(),
        regular: f.is_regular(),
        filter_regular: d.base.is_regular(),
        compact: true,
    }
}

/// On-disk `(frame, filter)` bundle.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FilteredBundle {
    pub base: PosetFile,
    pub filter: Vec<Vec<String>>,
}

/// On-disk `(frame, point table)` bundle: each element with its point value.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointedBundle {
    pub base: PosetFile,
    pub point: Vec<PointEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointEntry {
    pub element: Vec<String>,
    pub top: bool,
}

impl FilteredBundle {
    pub fn from_filtered(lf: &FilteredFrame) -> Self {
        FilteredBundle {
            base: PosetFile::from_poset(lf.frame.base()),
            filter: lf.filter.members().iter().map(|&e| lf.frame.element_labels(e)).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<FilteredFrame, ParseError> {
        let b: FilteredBundle = serde_json::from_str(text)?;
        let frame = Arc::new(FiniteFrame::build(b.base.to_poset()?)?);
        let members = b
            .filter
            .iter()
            .map(|ls| frame.element(ls))
            .collect::<Result<Vec<_>, _>>()?;
        let filter = Filter::new(&frame, members)?;
        Ok(FilteredFrame::new(frame, filter))
    }
}

impl PointedBundle {
    pub fn from_pointed(m: &PointedFrame) -> Self {
        PointedBundle {
            base: PosetFile::from_poset(m.frame.base()),
            point: m
                .frame
                .elements()
                .iter()
                .map(|&e| PointEntry { element: m.frame.element_labels(e), top: m.at(e) })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<PointedFrame, ParseError> {
        let b: PointedBundle = serde_json::from_str(text)?;
        let frame = Arc::new(FiniteFrame::build(b.base.to_poset()?)?);
        let mut table = vec![None; frame.len()];
        for entry in &b.point {
            let e = frame.element(&entry.element)?;
            table[frame.position(e).expect("element")] = Some(Elem(entry.top as u64));
        }
        let table = table
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ParseError::Invalid("point table is not total".into()))?;
        let point = FrameMap::new(frame.clone(), Arc::new(FiniteFrame::two()), table)?;
        Ok(PointedFrame::new(frame, point)?)
    }
}

/// Exhaustive round trips: every filter on every frame with at most
/// `max_points` join-irreducibles goes through `D` and `E` up to
/// isomorphism, and a pointed frame's unit is an isomorphism exactly when its
/// kernel is maximal. Returns the number of instances and the first failure.
pub fn equivalence_check(max_points: usize) -> (usize, Option<String>) {
    let mut count = 0;
    for n in 0..=max_points {
        for p in Poset::enumerate(n) {
            let l = Arc::new(FiniteFrame::build(p).expect("small frame"));
            for f in Filter::all(&l) {
                count += 1;
                let lf = FilteredFrame::new(l.clone(), f);
                match round_trip(&lf) {
                    Ok(rt) if rt.filtered_unit_iso && rt.pointed_unit_iso => {}
                    other => {
                        let members: Vec<String> = lf.filter.members().iter().map(|&e| l.display(e)).collect();
                        return (count, Some(format!("filter {{{}}}: {other:?}", members.join(", "))));
                    }
                }
            }
        }
    }
    for m in PointedFrame::enumerate(max_points) {
        count += 1;
        let k = m.kernel;
        let maximal = m.frame.elements().iter().all(|&b| !k.is_subset(b) || b == k || b == m.frame.top());
        if pointed_unit_is_iso(&m).ok() != Some(maximal) {
            return (count, Some(format!("pointed frame with kernel {}", m.frame.display(k))));
        }
    }
    (count, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_frames() -> Vec<Arc<FiniteFrame>> {
        (0..=3)
            .flat_map(Poset::enumerate)
            .map(|p| Arc::new(FiniteFrame::build(p).unwrap()))
            .collect()
    }

    #[test]
    fn product2_examples() {
        let one = product2(&FiniteFrame::trivial()).unwrap();
        assert_eq!(one.frame.len(), 2);
        let two = FiniteFrame::two();
        let four = product2(&two).unwrap();
        assert_eq!(four.frame.len(), 4);
        assert!(four.frame.is_boolean());
        assert_eq!(split(four.kernel()), (false, two.top()));
        assert!(four.is_isolated());
    }

    #[test]
    fn product2_is_cofree() {
        let targets = [FiniteFrame::two(), FiniteFrame::chain(3), FiniteFrame::boolean(2)];
        let ms: Vec<PointedFrame> =
            PointedFrame::enumerate(2).into_iter().filter(|m| m.frame.len() <= 5).collect();
        for l in targets {
            let l = Arc::new(l);
            let two_l = product2(&l).unwrap();
            let pi = projection(&two_l, &l).unwrap();
            for m in &ms {
                for f in enumerate_frame_maps(&m.frame, &l) {
                    let count = pointed_maps(m, &two_l)
                        .iter()
                        .filter(|k| k.then(&pi).unwrap().agrees_with(&f))
                        .count();
                    assert_eq!(count, 1);
                }
            }
        }
    }

    #[test]
    fn two_sub_f_on_two() {
        let two = Arc::new(FiniteFrame::two());
        let f = Filter::principal(&two, two.top()).unwrap();
        let d = two_sub_f(&FilteredFrame::new(two.clone(), f)).unwrap();
        assert_eq!(d.pointed.frame.len(), 3);
        // a chain: join-irreducibles form a chain
        assert_eq!(d.pointed.frame.base().covers().len(), 1);
        // point sends only the top to ⊤
        let tops: Vec<Elem> =
            d.pointed.frame.elements().iter().copied().filter(|&e| d.pointed.at(e)).collect();
        assert_eq!(tops, vec![d.pointed.frame.top()]);

        let e = functor_e(&d.pointed).unwrap();
        assert_eq!(e.filtered.frame.len(), 2);
        assert_eq!(e.filtered.filter.members(), &[e.filtered.frame.top()]);
    }

    #[test]
    fn improper_filter_gives_2l() {
        for l in small_frames() {
            let d = two_sub_f(&FilteredFrame::new(l.clone(), Filter::improper(&l))).unwrap();
            assert_eq!(d.pointed.frame.len(), 2 * l.len());
            assert!(d.insertion.is_isomorphism());
        }
    }

    #[test]
    fn filter_laws_are_named() {
        let c = FiniteFrame::chain(3);
        let m = c.element(&["c1"]).unwrap();
        let err = Filter::new(&c, vec![m]).unwrap_err();
        assert!(err.to_string().contains("upward closure"));
        let four = FiniteFrame::boolean(2);
        let a = four.element(&["x1"]).unwrap();
        let b = four.element(&["x2"]).unwrap();
        let err = Filter::new(&four, vec![a, b, four.top()]).unwrap_err();
        assert!(err.to_string().contains("meet closure"));
        assert!(Filter::new(&four, vec![]).is_err());
    }

    #[test]
    fn equivalence_check_passes() {
        let (n, failure) = equivalence_check(3);
        assert!(failure.is_none(), "{failure:?}");
        assert!(n > 50);
    }

    #[test]
    fn round_trip_on_every_small_filtered_frame() {
        for l in small_frames() {
            for f in Filter::all(&l) {
                let rt = round_trip(&FilteredFrame::new(l.clone(), f)).unwrap();
                assert!(rt.filtered_unit_iso && rt.pointed_unit_iso);
            }
        }
    }

    #[test]
    fn pointed_unit_is_iso_iff_kernel_is_maximal() {
        for m in PointedFrame::enumerate(3) {
            let maximal = m
                .frame
                .elements()
                .iter()
                .all(|&b| !m.kernel().is_subset(b) || b == m.kernel() || b == m.frame.top());
            assert_eq!(pointed_unit_is_iso(&m).unwrap(), maximal);
            let fi = free_isolated(&m).unwrap();
            assert_eq!(fi.nu.is_injective(), maximal);
        }
    }

    #[test]
    fn regularity_transfers_on_boolean_frames() {
        for n in 0..=3 {
            let l = Arc::new(FiniteFrame::boolean(n));
            for f in Filter::all(&l) {
                let improper = !f.is_proper();
                let regular_f = f.is_regular(&l);
                let d = two_sub_f(&FilteredFrame::new(l.clone(), f)).unwrap();
                assert_eq!(regular_f, improper);
                assert_eq!(d.pointed.frame.is_regular(), regular_f);
            }
        }
    }

    #[test]
    fn density_iff_proper() {
        for l in small_frames() {
            for f in Filter::all(&l) {
                let d = two_sub_f(&FilteredFrame::new(l.clone(), f)).unwrap();
                let c = frame_checks(&d);
                assert_eq!(c.projection_dense, c.filter_proper);
                assert!(c.compact);
            }
        }
    }

    #[test]
    fn filtered_morphisms_compose_and_fail_with_witness() {
        let frames: Vec<FilteredFrame> = small_frames()
            .into_iter()
            .filter(|l| l.len() <= 4)
            .flat_map(|l| Filter::all(&l).into_iter().map(move |f| FilteredFrame::new(l.clone(), f)))
            .collect();
        let mut saw_failure = false;
        for a in frames.iter().step_by(3) {
            assert!(FilteredMorphism::identity(a).check().is_valid());
            let full = FilteredFrame::new(a.frame.clone(), Filter::improper(&a.frame));
            let reflect = FilteredMorphism::new(a.clone(), full, a.frame.top(), a.frame.elements().to_vec()).unwrap();
            assert!(reflect.check().is_valid());
            for b in frames.iter().step_by(4) {
                for m1 in FilteredMorphism::enumerate_all(a, b) {
                    let r = m1.check();
                    if !r.is_valid() {
                        if r.frame_map.is_frame_map() && r.escaping.is_some() {
                            saw_failure = true;
                        }
                        continue;
                    }
                    for cc in frames.iter().step_by(5) {
                        for m2 in FilteredMorphism::enumerate_all(b, cc) {
                            if m2.check().is_valid() {
                                assert!(m1.then(&m2).unwrap().check().is_valid());
                            }
                        }
                    }
                }
            }
        }
        assert!(saw_failure);
    }

    #[test]
    fn d_and_e_act_on_morphisms() {
        let objects: Vec<FilteredFrame> = small_frames()
            .into_iter()
            .filter(|l| l.len() <= 4)
            .flat_map(|l| Filter::all(&l).into_iter().map(move |f| FilteredFrame::new(l.clone(), f)))
            .step_by(2)
            .collect();
        let ds: Vec<TwoSubF> = objects.iter().map(|o| two_sub_f(o).unwrap()).collect();
        let mut checked = 0;
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                for m in FilteredMorphism::enumerate_all(a, b) {
                    if !m.check().is_valid() {
                        continue;
                    }
                    let dm = functor_d_morphism(&m, &ds[i], &ds[j]).unwrap();
                    let valid = is_pointed_map(&dm, &ds[i].pointed, &ds[j].pointed);
                    // (⊤,a) ↦ (⊤, c → f(a)) needs c ∨ (c → f(a)) = ⊤ on F.
                    let t = &b.frame;
                    let expected = a.filter.members().iter().all(|&x| {
                        t.join(m.c, t.arrow(m.c, m.value(x)).unwrap()) == t.top()
                    });
                    assert_eq!(valid, expected);
                    if t.is_complemented(m.c) {
                        assert!(valid);
                    }
                    if !valid {
                        continue;
                    }
                    // E(D(m)) recovers m through the filtered units.
                    let ea = functor_e(&ds[i].pointed).unwrap();
                    let eb = functor_e(&ds[j].pointed).unwrap();
                    let edm = functor_e_morphism(&dm, &ea, &eb, &ds[i].pointed).unwrap();
                    assert!(edm.check().is_valid());
                    let ua = unit_filtered(a, &ds[i], &ea).unwrap();
                    let ub = unit_filtered(b, &ds[j], &eb).unwrap();
                    assert_eq!(edm.c, ub.at(m.c));
                    for &x in a.frame.elements() {
                        assert_eq!(edm.value(ua.at(x)), ub.at(m.value(x)));
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn pointed_unit_is_natural() {
        let mut ms: Vec<PointedFrame> = Vec::new();
        for l in [FiniteFrame::boolean(2), FiniteFrame::chain(3)] {
            let l = Arc::new(l);
            for f in Filter::all(&l) {
                ms.push(two_sub_f(&FilteredFrame::new(l.clone(), f)).unwrap().pointed);
            }
        }
        for m in &ms {
            let em = functor_e(m).unwrap();
            let dem = two_sub_f(&em.filtered).unwrap();
            let eta_m = unit_pointed(m, &em, &dem).unwrap();
            for n in &ms {
                let en = functor_e(n).unwrap();
                let den = two_sub_f(&en.filtered).unwrap();
                let eta_n = unit_pointed(n, &en, &den).unwrap();
                for h in pointed_maps(m, n) {
                    let eh = functor_e_morphism(&h, &em, &en, m).unwrap();
                    assert!(eh.check().is_valid());
                    let deh = functor_d_morphism(&eh, &dem, &den).unwrap();
                    let left = h.then(&eta_n).unwrap();
                    let right = eta_m.then(&deh).unwrap();
                    assert!(left.agrees_with(&right));
                }
            }
        }
    }

    #[test]
    fn free_isolated_examples() {
        let l = FiniteFrame::boolean(2);
        let m = product2(&l).unwrap();
        let fi = free_isolated(&m).unwrap();
        assert!(fi.nu.is_isomorphism());

        let chain = Arc::new(FiniteFrame::chain(3));
        let k = chain.element(&["c1"]).unwrap();
        let m = PointedFrame::with_kernel(chain, k).unwrap();
        let fi = free_isolated(&m).unwrap();
        assert_eq!(fi.isolated.frame.len(), 4);
        assert!(fi.nu.is_injective());
        assert!(is_pointed_map(&fi.nu, &m, &fi.isolated));
    }

    #[test]
    fn nu_factors_through_the_unit() {
        for m in PointedFrame::enumerate(3) {
            let em = functor_e(&m).unwrap();
            let dem = two_sub_f(&em.filtered).unwrap();
            let eta = unit_pointed(&m, &em, &dem).unwrap();
            let fi = free_isolated(&m).unwrap();
            let via = eta.then(&dem.insertion).unwrap();
            assert_eq!(via.table(), fi.nu.table());
        }
    }

    #[test]
    fn bundles_round_trip() {
        let l = Arc::new(FiniteFrame::chain(3));
        let lf = FilteredFrame::new(l.clone(), Filter::principal(&l, l.top()).unwrap());
        let text = serde_json::to_string(&FilteredBundle::from_filtered(&lf)).unwrap();
        let back = FilteredBundle::parse(&text).unwrap();
        assert_eq!(back.filter, lf.filter);

        let m = product2(&FiniteFrame::two()).unwrap();
        let text = serde_json::to_string(&PointedBundle::from_pointed(&m)).unwrap();
        let back = PointedBundle::parse(&text).unwrap();
        assert_eq!(back.kernel(), m.kernel());
    }
}
