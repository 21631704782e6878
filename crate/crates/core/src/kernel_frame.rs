//! The frame of truncation kernels of a carrier, its truncation filter and
//! the spectrum `2_F K A`.
//!
//! `FinVec` kernels are materialized exactly. `EvSeq` kernels are shown on a
//! window of `W` coordinates plus one `cof` atom standing for every
//! coordinate past the window.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Elem, FiniteFrame, LatticeError};
use crate::pointed::{two_sub_f, Filter, FilteredFrame, TwoSubF};
use crate::scalar::Scalar;
use crate::trunc::kernel::{closure, dark, polar, principal};
use crate::trunc::{random, Carrier, Kernel, Support, TruncElement, TruncError};

pub const TAIL_LABEL: &str = "cof";
pub const DEFAULT_MAX_DIM: usize = 10;
pub const DEFAULT_WINDOW: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelFrameError {
    #[error("kernel frame would have {count} elements, above the bound of {max}")]
    TooLarge { count: u128, max: u128 },
    #[error("the kernel frame is not Boolean")]
    NotBoolean,
    #[error("unital conditions disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_dim: usize,
    pub window: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_dim: DEFAULT_MAX_DIM, window: DEFAULT_WINDOW }
    }
}

#[derive(Clone, Debug)]
pub struct KernelFrameBundle<S> {
    pub carrier: Arc<Carrier<S>>,
    /// `Some(W)` for `EvSeq`.
    pub window: Option<usize>,
    pub frame: Arc<FiniteFrame>,
    kernels: HashMap<Elem, Kernel<S>>,
    /// Truncated elements whose darks generate the filter.
    pub filter_generators: Vec<TruncElement<S>>,
}

fn window_support(window: usize, inside: impl Iterator<Item = usize>, tail: bool) -> Support {
    let inside: Vec<usize> = inside.collect();
    if tail {
        Support::cofinite((0..window).filter(|i| !inside.contains(i)))
    } else {
        Support::finite(inside)
    }
}

/// `K A` as an explicit frame, built from the kernel order and verified
/// Boolean.
pub fn kernel_frame<S: Scalar>(
    carrier: &Arc<Carrier<S>>,
    bounds: Bounds,
) -> Result<KernelFrameBundle<S>, KernelFrameError> {
    let (atoms, window, limit) = match carrier.dim() {
        Some(n) => (n, None, bounds.max_dim),
        None => (bounds.window + 1, Some(bounds.window), bounds.max_dim),
    };
    if atoms > limit.min(20) {
        return Err(KernelFrameError::TooLarge { count: 1u128 << atoms.min(127), max: 1u128 << limit.min(20) });
    }
    // Each candidate is the closure of a set of indicators; the tail atom
    // contributes the polar of the window.
    let mut kernels: Vec<Kernel<S>> = Vec::with_capacity(1 << atoms);
    for mask in 0u64..(1 << atoms) {
        let inside = (0..atoms).filter(|i| mask & (1 << i) != 0);
        let k = match window {
            None => closure(carrier, &inside.map(|i| TruncElement::indicator(carrier, i)).collect::<Vec<_>>())?,
            Some(w) => {
                let gens: Vec<TruncElement<S>> =
                    inside.clone().filter(|&i| i < w).map(|i| TruncElement::indicator(carrier, i)).collect();
                let mut k = closure(carrier, &gens)?;
                if mask & (1 << w) != 0 {
                    let everything: Vec<TruncElement<S>> =
                        (0..w).map(|i| TruncElement::indicator(carrier, i)).collect();
                    k = k.join(&polar(carrier, &everything)?);
                }
                debug_assert_eq!(*k.support(), window_support(w, inside.filter(|&i| i < w), mask & (1 << w) != 0));
                k
            }
        };
        kernels.push(k);
    }
    let label = |j: usize| -> String {
        let k: &Kernel<S> = &kernels[j];
        match window {
            None => format!("x{}", k.support().listed().iter().next().map_or(0, |i| i + 1)),
            Some(_) => match k.support() {
                Support::Finite(s) => format!("n{}", s.iter().next().map_or(0, |i| i + 1)),
                Support::Cofinite(_) => TAIL_LABEL.to_string(),
            },
        }
    };
    let (frame, images) = FiniteFrame::from_lattice(kernels.len(), |i, j| kernels[i].leq(&kernels[j]), label)?;
    if !frame.is_boolean() {
        return Err(KernelFrameError::NotBoolean);
    }
    let map: HashMap<Elem, Kernel<S>> = images.into_iter().zip(kernels).collect();
    let filter_generators = match window {
        None => indicator_sums(carrier, carrier.dim().unwrap()),
        Some(w) => indicator_sums(carrier, w),
    };
    Ok(KernelFrameBundle { carrier: carrier.clone(), window, frame: Arc::new(frame), kernels: map, filter_generators })
}

/// `χ_T = Σ_{i∈T} ū·e_i` for every `T ⊆ {0..n}`.
fn indicator_sums<S: Scalar>(carrier: &Arc<Carrier<S>>, n: usize) -> Vec<TruncElement<S>> {
    (0u64..(1 << n))
        .map(|mask| TruncElement::indicator_of(carrier, (0..n).filter(|i| mask & (1 << i) != 0)))
        .collect()
}

impl<S: Scalar> KernelFrameBundle<S> {
    pub fn kernel(&self, e: Elem) -> &Kernel<S> {
        &self.kernels[&e]
    }

    /// Frame element of a kernel. Past the window, coordinates collapse onto
    /// the tail atom.
    pub fn element_of(&self, k: &Kernel<S>) -> Elem {
        let collapsed = match self.window {
            None => k.support().clone(),
            Some(w) => {
                let beyond = match k.support() {
                    Support::Finite(s) => s.iter().any(|&i| i >= w),
                    Support::Cofinite(_) => true,
                };
                window_support(w, k.support().members_below(w).into_iter(), beyond)
            }
        };
        self.kernels
            .iter()
            .find(|(_, v)| *v.support() == collapsed)
            .map(|(e, _)| *e)
            .expect("every collapsed support is materialized")
    }

    /// Whether `k` is represented without collapse.
    pub fn is_exact(&self, k: &Kernel<S>) -> bool {
        self.kernel(self.element_of(k)) == k
    }

    /// Base point of the tail atom.
    pub fn tail_point(&self) -> Option<usize> {
        self.window.map(|_| self.frame.base().index_of(TAIL_LABEL).expect("tail atom"))
    }

    /// The filter generated by `a◀1` for the stored generators.
    pub fn trunc_filter(&self) -> Result<Filter, KernelFrameError> {
        let gens = self
            .filter_generators
            .iter()
            .map(|a| Ok(self.element_of(&dark(a, &S::one())?)))
            .collect::<Result<Vec<Elem>, KernelFrameError>>()?;
        Ok(Filter::generated(&self.frame, &gens)?)
    }

    /// `M A = 2_F K A`.
    pub fn spectrum(&self) -> Result<TwoSubF, KernelFrameError> {
        let lf = FilteredFrame::new(self.frame.clone(), self.trunc_filter()?);
        Ok(two_sub_f(&lf)?)
    }

    /// Consistency of the frame with the kernel operations: meets, joins and
    /// pseudocomplements agree, and `[χ_T]* = χ_T^⊥` for every generator.
    pub fn check_operations(&self) -> Result<(), String> {
        let f = &self.frame;
        for &a in f.elements() {
            for &b in f.elements() {
                let (ka, kb) = (self.kernel(a), self.kernel(b));
                if self.kernel(f.meet(a, b)) != &ka.meet(kb) || self.kernel(f.join(a, b)) != &ka.join(kb) {
                    return Err(format!("operations disagree at {} and {}", f.display(a), f.display(b)));
                }
            }
            if self.kernel(f.pc(a)) != &self.kernel(a).pseudocomplement() {
                return Err(format!("pseudocomplement disagrees at {}", f.display(a)));
            }
        }
        for g in &self.filter_generators {
            let pa = principal(g).map_err(|e| e.to_string())?;
            let pol = polar(&self.carrier, std::slice::from_ref(g)).map_err(|e| e.to_string())?;
            if self.kernel(f.pc(self.element_of(&pa))) != &pol {
                return Err(format!("[a]* != a^⊥ for a={g}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitalConditions {
    /// Some truncated `a₀` has `a₀◀1 = 0`.
    pub dark_vanishes: bool,
    /// The spectrum's point is isolated.
    pub point_isolated: bool,
    /// The truncated elements have a greatest element.
    pub greatest_truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitalReport {
    pub carrier: String,
    pub unital: bool,
    pub conditions: UnitalConditions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub evidence: Vec<String>,
    /// For `EvSeq`: the window cut off from its tail, read as a finite
    /// carrier, classifies as unital.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_artifact: Option<bool>,
}

/// Decides the three unital conditions independently and requires them to
/// agree. `EvSeq` evidence covers every window indicator sum and `extra`
/// random truncated elements.
pub fn classify_unital<S: Scalar>(
    carrier: &Arc<Carrier<S>>,
    bounds: Bounds,
    seed: u64,
    extra: usize,
) -> Result<UnitalReport, KernelFrameError> {
    let bundle = kernel_frame(carrier, bounds)?;
    let spectrum = bundle.spectrum()?;
    let point_isolated = spectrum.pointed.is_isolated();
    let mut rng = crate::check::instance_rng(seed, "classify_unital", 0);
    let mut samples = bundle.filter_generators.clone();
    samples.extend((0..extra).map(|_| random::truncated(&mut rng, carrier)));
    let mut evidence = Vec::new();
    let mut witness = None;
    let mut dark_vanishes = false;
    if let Some(_n) = carrier.dim() {
        let u = TruncElement::unit(carrier);
        samples.insert(0, u);
    }
    for a in &samples {
        let d = dark(a, &S::one())?;
        if d.is_zero() {
            dark_vanishes = true;
            witness.get_or_insert_with(|| a.to_string());
        } else if carrier.dim().is_none() {
            evidence.push(format!("{a}: dark at 1 is {}", d.support()));
        }
    }
    // A greatest truncated element must dominate every sample and survive
    // the bump test: adding an indicator past its support leaves Ā.
    let greatest_truncated = match carrier.dim() {
        Some(_) => {
            let u = TruncElement::unit(carrier);
            samples.iter().all(|a| a.leq(&u).unwrap_or(false)) && u.is_truncated()
        }
        None => {
            for a in &samples {
                let bump = TruncElement::indicator(carrier, a.explicit_len());
                let bigger = a.add(&bump)?;
                if bigger.is_truncated() {
                    evidence.push(format!("{a} < {bigger}, both truncated"));
                }
            }
            false
        }
    };
    let conditions = UnitalConditions { dark_vanishes, point_isolated, greatest_truncated };
    if !(dark_vanishes == point_isolated && point_isolated == greatest_truncated) {
        return Err(KernelFrameError::Inconsistent(format!("{conditions:?}")));
    }
    let window_artifact = match carrier.dim() {
        Some(_) => None,
        None => {
            let cut = Carrier::<S>::standard(bounds.window.max(1))?;
            Some(classify_unital(&cut, bounds, seed, 0)?.unital)
        }
    };
    Ok(UnitalReport {
        carrier: carrier.name(),
        unital: dark_vanishes,
        conditions,
        witness,
        evidence,
        window_artifact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn small_kernel_frames() {
        for n in 1..=4 {
            let c = Carrier::<Q>::standard(n).unwrap();
            let b = kernel_frame(&c, Bounds::default()).unwrap();
            assert_eq!(b.frame.len(), 1 << n);
            assert!(b.frame.is_boolean() && b.frame.is_regular());
            b.check_operations().unwrap();
        }
    }

    #[test]
    fn size_bound() {
        let c = Carrier::<Q>::standard(5).unwrap();
        let e = kernel_frame(&c, Bounds { max_dim: 4, window: 2 }).unwrap_err();
        assert_eq!(e, KernelFrameError::TooLarge { count: 32, max: 16 });
    }

    #[test]
    fn fin_vec_filter_is_improper() {
        let c = Carrier::<Q>::fin_vec(vec![Q::ratio(1, 2)]).unwrap();
        let b = kernel_frame(&c, Bounds::default()).unwrap();
        let f = b.trunc_filter().unwrap();
        assert!(!f.is_proper());
        let m = b.spectrum().unwrap();
        assert_eq!(m.pointed.frame().len(), 4);
        assert!(m.pointed.frame().is_boolean());
    }

    #[test]
    fn ev_seq_window() {
        let c = Carrier::<Q>::ev_seq();
        let b = kernel_frame(&c, Bounds { max_dim: 10, window: 3 }).unwrap();
        assert_eq!(b.frame.len(), 16);
        b.check_operations().unwrap();
        let f = b.trunc_filter().unwrap();
        assert!(f.is_proper());
        let tail = b.frame.principal(b.tail_point().unwrap());
        assert_eq!(f.generator(), tail);
        let m = b.spectrum().unwrap();
        assert!(!m.pointed.is_isolated());
        // a proper filter on a Boolean frame never gives a regular 2_F L
        assert!(!m.pointed.frame().is_regular());
        let far = Kernel::from_support(&c, Support::finite([7]));
        assert!(!b.is_exact(&far));
        assert_eq!(b.element_of(&far), tail);
    }

    #[test]
    fn classification() {
        let c = Carrier::<Q>::fin_vec(vec![Q::ratio(2, 3), Q::ratio(5, 1)]).unwrap();
        let r = classify_unital(&c, Bounds::default(), 1, 20).unwrap();
        assert!(r.unital);
        assert_eq!(r.witness.as_deref(), Some("(2/3, 5)"));
        let s = classify_unital(&Carrier::<Q>::ev_seq(), Bounds { max_dim: 10, window: 3 }, 1, 20).unwrap();
        assert!(!s.unital);
        assert_eq!(s.window_artifact, Some(true));
        assert!(!s.evidence.is_empty());
    }
}
