//! Truncation kernels and the kernel calculus.
//!
//! A kernel is stored by its support. Each operation decides membership of
//! coordinates by probing truncated indicators against the defining
//! condition. For `EvSeq` one extra probe past every explicit coordinate
//! stands in for the whole tail, since all inputs are constant there.

use std::sync::Arc;

use serde::Serialize;

use super::support::Support;
use super::{Carrier, TruncElement, TruncError};
use crate::scalar::Scalar;

/// Round cap for the ladder iteration.
pub const LADDER_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Kernel<S> {
    carrier: Arc<Carrier<S>>,
    support: Support,
}

/// Supports reached by the ladder, one per round after stage 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderTrace {
    pub stages: Vec<String>,
    pub rounds: usize,
    pub capped: bool,
}

/// Evidence that a finite parameter family realizes an infinite join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilization<S> {
    pub family: Vec<S>,
    /// The join over the family equals the join with extra parameters added.
    pub stable: bool,
}

impl<S: Scalar> Kernel<S> {
    pub fn from_support(carrier: &Arc<Carrier<S>>, support: Support) -> Self {
        let support = match carrier.dim() {
            Some(n) => support.intersect(&Support::range(n)),
            None => support,
        };
        Kernel { carrier: carrier.clone(), support }
    }

    pub fn zero(carrier: &Arc<Carrier<S>>) -> Self {
        Self::from_support(carrier, Support::empty())
    }

    pub fn whole(carrier: &Arc<Carrier<S>>) -> Self {
        match carrier.dim() {
            Some(n) => Self::from_support(carrier, Support::range(n)),
            None => Self::from_support(carrier, Support::cofinite([])),
        }
    }

    pub fn carrier(&self) -> &Arc<Carrier<S>> {
        &self.carrier
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        *self == Self::whole(&self.carrier)
    }

    pub fn contains(&self, a: &TruncElement<S>) -> bool {
        a.in_trunc() && a.support().is_subset(&self.support)
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.support.is_subset(&other.support)
    }

    pub fn meet(&self, other: &Self) -> Self {
        Self::from_support(&self.carrier, self.support.intersect(&other.support))
    }

    pub fn join(&self, other: &Self) -> Self {
        Self::from_support(&self.carrier, self.support.union(&other.support))
    }

    /// `K* = K^⊥`.
    pub fn pseudocomplement(&self) -> Self {
        Self::from_support(&self.carrier, self.support.complement(self.carrier.dim()))
    }

    /// `self ≺ other`.
    pub fn rather_below(&self, other: &Self) -> bool {
        self.pseudocomplement().join(other).is_whole()
    }

    /// Indicators of the support's coordinates below `n`.
    pub fn generators_below(&self, n: usize) -> Vec<TruncElement<S>> {
        self.support
            .members_below(n)
            .into_iter()
            .map(|i| TruncElement::indicator(&self.carrier, i))
            .collect()
    }
}

/// Coordinates to probe: every explicit one and, for `EvSeq`, one more that
/// represents the tail.
fn probe_range<S: Scalar>(carrier: &Carrier<S>, elems: &[&TruncElement<S>], extra: usize) -> (usize, bool) {
    match carrier.dim() {
        Some(n) => (n, false),
        None => {
            let l = elems.iter().map(|e| e.explicit_len()).max().unwrap_or(0).max(extra);
            (l, true)
        }
    }
}

fn probed_support<F: Fn(usize) -> bool>(len: usize, has_tail: bool, member: F) -> Support {
    let explicit: Vec<usize> = (0..len).filter(|&i| member(i)).collect();
    if has_tail && member(len) {
        Support::cofinite((0..len).filter(|i| !explicit.contains(i)))
    } else {
        Support::finite(explicit)
    }
}

fn require_in_trunc<S: Scalar>(b: &TruncElement<S>) -> Result<(), TruncError> {
    if b.in_trunc() {
        Ok(())
    } else {
        Err(TruncError::Domain(format!("{b} is not in the trunc (nonzero tail)")))
    }
}

/// Smallest `n` with `|a| ≤ n·(|b₁|+…+|b_k|)`, if any: membership in the
/// convex ℓ-subgroup generated by `B`.
pub fn convex_hull_witness<S: Scalar>(a: &TruncElement<S>, gens: &[TruncElement<S>]) -> Option<u64> {
    let carrier = a.carrier();
    let mut sum = TruncElement::zero(carrier);
    for g in gens {
        sum = sum.add(&g.abs()).ok()?;
    }
    let aa = a.abs();
    let (len, tail) = probe_range(carrier, &[&aa, &sum], 0);
    let mut n = S::zero();
    for i in 0..len + usize::from(tail) {
        let (x, s) = (aa.at(i), sum.at(i));
        if x.is_zero() {
            continue;
        }
        if s.is_zero() {
            return None;
        }
        n = n.max_of(&(x / s));
    }
    Some(n.ceil_u64())
}

/// For `a` outside the archimedean step of `K`, and any `c ≥ 0`, an `n` with
/// `(n|a| − c)⁺ ∉ K`. `None` when no coordinate of `a` escapes `K`.
pub fn archimedean_refutation<S: Scalar>(a: &TruncElement<S>, k: &Kernel<S>, c: &TruncElement<S>) -> Option<u64> {
    let aa = a.abs();
    let (len, tail) = probe_range(a.carrier(), &[&aa, c], 0);
    (0..len + usize::from(tail))
        .find(|&i| !aa.at(i).is_zero() && !k.support.contains(i))
        .map(|i| (c.at(i) / aa.at(i)).ceil_u64() + 1)
}

/// Archimedean step: coordinates whose indicator `e` admits some `c` with
/// `(n·e − c)⁺ ∈ K` for all `n`. A refutation for `c = 0` is a refutation
/// for every `c`, so probing `c = e·m` for growing `m` never succeeds outside
/// `K`; inside `K` every `c` works.
fn archimedean_step<S: Scalar>(k: &Kernel<S>, len: usize, tail: bool) -> Kernel<S> {
    let carrier = k.carrier.clone();
    let support = probed_support(len, tail, |i| {
        let e = TruncElement::indicator(&carrier, i);
        let c = TruncElement::zero(&carrier);
        match archimedean_refutation(&e, k, &c) {
            None => true,
            Some(n) => {
                let probe = e.scale(&S::from_u64(n)).sub(&c).expect("same carrier").pos_part();
                debug_assert!(!k.contains(&probe));
                false
            }
        }
    });
    Kernel::from_support(&carrier, support.union(&k.support))
}

/// Absorbing step: `ā ∈ K ⇒ a ∈ K`, probed on scaled indicators.
fn absorbing_step<S: Scalar>(k: &Kernel<S>, len: usize, tail: bool) -> Kernel<S> {
    let carrier = k.carrier.clone();
    let two = S::from_u64(2);
    let support = probed_support(len, tail, |i| {
        let a = TruncElement::indicator(&carrier, i).scale(&two);
        k.contains(&a.truncate().expect("nonnegative"))
    });
    Kernel::from_support(&carrier, support.union(&k.support))
}

/// `[B]`, the least truncation kernel containing `B`, by iterating the
/// ladder from the convex ℓ-subgroup `⟨B⟩` to a fixpoint.
pub fn kernel_closure<S: Scalar>(
    carrier: &Arc<Carrier<S>>,
    gens: &[TruncElement<S>],
) -> Result<(Kernel<S>, LadderTrace), TruncError> {
    for g in gens {
        if g.carrier() != carrier {
            return Err(TruncError::CarrierMismatch);
        }
        require_in_trunc(g)?;
    }
    let refs: Vec<&TruncElement<S>> = gens.iter().collect();
    let (len, tail) = probe_range(carrier, &refs, 0);
    let stage0 = probed_support(len, tail, |i| {
        convex_hull_witness(&TruncElement::indicator(carrier, i), gens).is_some()
    });
    let mut cur = Kernel::from_support(carrier, stage0);
    let mut trace = LadderTrace { stages: vec![cur.support.to_string()], rounds: 0, capped: false };
    loop {
        if trace.rounds == LADDER_CAP {
            trace.capped = true;
            break;
        }
        trace.rounds += 1;
        let next = absorbing_step(&archimedean_step(&cur, len, tail), len, tail);
        trace.stages.push(next.support.to_string());
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok((cur, trace))
}

/// `[B]` without the trace.
pub fn closure<S: Scalar>(carrier: &Arc<Carrier<S>>, gens: &[TruncElement<S>]) -> Result<Kernel<S>, TruncError> {
    kernel_closure(carrier, gens).map(|(k, _)| k)
}

/// `[a]`.
pub fn principal<S: Scalar>(a: &TruncElement<S>) -> Result<Kernel<S>, TruncError> {
    closure(a.carrier(), std::slice::from_ref(a))
}

/// `B^⊥ = {a : |a| ∧ |b| = 0 for all b ∈ B}`.
pub fn polar<S: Scalar>(carrier: &Arc<Carrier<S>>, set: &[TruncElement<S>]) -> Result<Kernel<S>, TruncError> {
    for b in set {
        if b.carrier() != carrier {
            return Err(TruncError::CarrierMismatch);
        }
        require_in_trunc(b)?;
    }
    let refs: Vec<&TruncElement<S>> = set.iter().collect();
    let (len, tail) = probe_range(carrier, &refs, 0);
    let support = probed_support(len, tail, |i| {
        let e = TruncElement::indicator(carrier, i);
        set.iter().all(|b| e.meet(&b.abs()).expect("same carrier").is_zero())
    });
    Ok(Kernel::from_support(carrier, support))
}

/// `a▶r = [a ⊖ r]`.
pub fn bright<S: Scalar>(a: &TruncElement<S>, r: &S) -> Result<Kernel<S>, TruncError> {
    if r.is_negative() {
        return Err(TruncError::Domain(format!("bright needs r >= 0, got {r}")));
    }
    principal(&a.diminish(r)?)
}

/// Parameters `s ∈ (0, r)` that realize `⋁_{0<s<r} (a⊖s)^⊥`: the ratio
/// values of `a` below `r` and points between them and `r`.
fn dark_family<S: Scalar>(a: &TruncElement<S>, r: &S) -> Vec<S> {
    let mut levels: Vec<S> = vec![S::zero()];
    for i in 0..a.explicit_len() {
        let v = a.at(i) / a.carrier().unit_at(i);
        if v.is_positive() && v < *r {
            levels.push(v);
        }
    }
    levels.sort();
    levels.dedup();
    let mut fam: Vec<S> = levels.iter().filter(|v| v.is_positive()).cloned().collect();
    fam.extend(levels.iter().map(|v| v.midpoint(r)));
    fam.sort();
    fam.dedup();
    fam
}

fn dark_over<S: Scalar>(a: &TruncElement<S>, family: &[S]) -> Result<Kernel<S>, TruncError> {
    let mut acc = Kernel::zero(a.carrier());
    for s in family {
        let d = a.diminish(s)?;
        acc = acc.join(&polar(a.carrier(), std::slice::from_ref(&d))?);
    }
    Ok(acc)
}

/// `a◀r = ⋁_{0<s<r} (a⊖s)^⊥`, with the finite family that realizes it.
pub fn dark_with_trace<S: Scalar>(a: &TruncElement<S>, r: &S) -> Result<(Kernel<S>, Stabilization<S>), TruncError> {
    if !a.is_truncated() || !a.in_trunc() {
        return Err(TruncError::Domain(format!("dark needs a truncated element, got {a}")));
    }
    if !r.is_positive() {
        return Ok((Kernel::zero(a.carrier()), Stabilization { family: vec![], stable: true }));
    }
    let family = dark_family(a, r);
    let k = dark_over(a, &family)?;
    // Push further toward r and toward 0; the join must not move.
    let top = family.last().cloned().unwrap_or_else(S::zero);
    let bottom = family.first().cloned().unwrap_or_else(|| r.clone());
    let extra = vec![top.midpoint(r), bottom / S::from_u64(2)];
    let stable = dark_over(a, &extra)?.leq(&k);
    Ok((k, Stabilization { family, stable }))
}

pub fn dark<S: Scalar>(a: &TruncElement<S>, r: &S) -> Result<Kernel<S>, TruncError> {
    let (k, st) = dark_with_trace(a, r)?;
    debug_assert!(st.stable, "dark family did not stabilize");
    Ok(k)
}

/// `a ∈ ⁰K`: `a` truncated and `a▶0 ⊆ K`.
pub fn in_k0<S: Scalar>(k: &Kernel<S>, a: &TruncElement<S>) -> Result<bool, TruncError> {
    if !a.is_truncated() || !a.in_trunc() {
        return Ok(false);
    }
    Ok(bright(a, &S::zero())?.leq(k))
}

/// `a ∈ ¹K`: `a` truncated and `a◀1 ⊆ K`.
pub fn in_k1<S: Scalar>(k: &Kernel<S>, a: &TruncElement<S>) -> Result<bool, TruncError> {
    if !a.is_truncated() || !a.in_trunc() {
        return Ok(false);
    }
    Ok(dark(a, &S::one())?.leq(k))
}

/// Closed forms of `a▶r` and `a◀r`, used as oracles.
pub mod closed_form {
    use super::*;

    pub fn bright<S: Scalar>(a: &TruncElement<S>, r: &S) -> Support {
        let len = a.explicit_len();
        let c = a.carrier();
        let above = |i: usize| a.at(i) > r.clone() * c.unit_at(i);
        match c.dim() {
            Some(n) => Support::finite((0..n).filter(|&i| above(i))),
            None => Support::finite((0..len).filter(|&i| above(i))),
        }
    }

    pub fn dark<S: Scalar>(a: &TruncElement<S>, r: &S) -> Support {
        if !r.is_positive() {
            return Support::empty();
        }
        let c = a.carrier();
        let below = |i: usize| a.at(i) < r.clone() * c.unit_at(i);
        match c.dim() {
            Some(n) => Support::finite((0..n).filter(|&i| below(i))),
            None => Support::cofinite((0..a.explicit_len()).filter(|&i| !below(i))),
        }
    }
}
