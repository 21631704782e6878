//! The kernel-valued representation `a ↦ a̲` into `R(K A)` and the pointed
//! representation `a ↦ â` into `R₀(M A)`.

use std::sync::Arc;

use rand::Rng;

use super::{punctured, Interval, OpenSet, RealFrameMap, RepError};
use crate::check::{ensure, run, Property};
use crate::kernel_frame::{kernel_frame, Bounds, KernelFrameBundle};
use crate::lattice::Elem;
use crate::pointed::{PointedFrame, TwoSubF};
use crate::scalar::Scalar;
use crate::trunc::kernel::bright;
use crate::trunc::{random, Carrier, TruncElement};

/// A carrier with its kernel frame and spectrum.
#[derive(Clone, Debug)]
pub struct Spectral<S> {
    pub bundle: KernelFrameBundle<S>,
    pub spectrum: TwoSubF,
}

impl<S: Scalar> Spectral<S> {
    pub fn new(carrier: &Arc<Carrier<S>>, bounds: Bounds) -> Result<Self, RepError> {
        let bundle = kernel_frame(carrier, bounds)?;
        let spectrum = bundle.spectrum()?;
        Ok(Spectral { bundle, spectrum })
    }

    pub fn carrier(&self) -> &Arc<Carrier<S>> {
        &self.bundle.carrier
    }

    pub fn pointed(&self) -> &PointedFrame {
        &self.spectrum.pointed
    }

    /// `(⊥, K)` in the spectrum.
    pub fn lower_element(&self, k: Elem) -> Elem {
        self.spectrum.element(false, k).expect("(⊥, K) always lies in 2_F L")
    }
}

/// Levels where `a▶r` can change: 0 and the ratios `a(x)/u(x) > 0`.
fn levels<S: Scalar>(a: &TruncElement<S>) -> Vec<S> {
    let mut out = vec![S::zero()];
    for i in 0..a.explicit_len() {
        let v = a.at(i) / a.carrier().unit_at(i);
        if v.is_positive() {
            out.push(v);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn steps_nonneg<S: Scalar, F: Fn(Elem) -> Elem>(
    bundle: &KernelFrameBundle<S>,
    a: &TruncElement<S>,
    wrap: F,
) -> Result<Vec<(S, Elem)>, RepError> {
    levels(a)
        .into_iter()
        .map(|r| {
            let k = bright(a, &r)?;
            Ok((r, wrap(bundle.element_of(&k))))
        })
        .collect()
}

/// `a̲(r, ∞) = a▶r` for `r ≥ 0` and `⊤` below 0, extended to all of `A`
/// through `a = a⁺ − a⁻`.
pub fn underline<S: Scalar>(bundle: &KernelFrameBundle<S>, a: &TruncElement<S>) -> Result<RealFrameMap<S>, RepError> {
    let one = |x: &TruncElement<S>| -> Result<RealFrameMap<S>, RepError> {
        RealFrameMap::normalized(bundle.frame.clone(), steps_nonneg(bundle, x, |e| e)?)
    };
    if a.is_nonneg() {
        one(a)
    } else {
        one(&a.pos_part())?.sub(&one(&a.neg_part())?)
    }
}

/// `â(r, ∞) = (⊥, a▶r)` for `r ≥ 0` and `(⊤, ⊤)` below 0.
pub fn hat<S: Scalar>(sp: &Spectral<S>, a: &TruncElement<S>) -> Result<RealFrameMap<S>, RepError> {
    let frame = sp.pointed().frame().clone();
    let one = |x: &TruncElement<S>| -> Result<RealFrameMap<S>, RepError> {
        RealFrameMap::normalized(frame.clone(), steps_nonneg(&sp.bundle, x, |e| sp.lower_element(e))?)
            .map_err(|e| match e {
                RepError::Invalid(m) => RepError::Unsupported(format!("{x} is not represented exactly ({m})")),
                other => other,
            })
    };
    if a.is_nonneg() {
        one(a)
    } else {
        one(&a.pos_part())?.sub(&one(&a.neg_part())?)
    }
}

/// `f ∈ R₀M`: the point sends `f(r, ∞)` to ⊥ for `r ≥ 0` and to ⊤ below 0.
pub fn in_r0<S: Scalar>(m: &PointedFrame, f: &RealFrameMap<S>) -> bool {
    !m.at(f.upper(&S::zero())) && m.at(f.upper_left(&S::zero()))
}

/// `f̂(U) = (0 ∈ U, f(U))` into `2_F L`, when every value lies there.
pub fn lift<S: Scalar>(two: &TwoSubF, f: &RealFrameMap<S>) -> Option<RealFrameMap<S>> {
    // (r, ∞) ↦ (r < 0, f(r, ∞)); the ⊤ part changes at 0 only.
    let mut cuts = f.breakpoints();
    cuts.push(S::zero());
    cuts.sort();
    cuts.dedup();
    let mut steps = Vec::new();
    for r in cuts {
        let e = two.element(r.is_negative(), f.upper(&r))?;
        steps.push((r, e));
    }
    RealFrameMap::normalized(two.pointed.frame().clone(), steps).ok()
}

/// The filtered condition on probe sets: `0 ∈ U ⇒ f(U) ∈ F`.
pub fn filtered_condition<S: Scalar>(two: &TwoSubF, f: &RealFrameMap<S>, probes: &[Vec<Interval<S>>]) -> bool {
    probes.iter().all(|u| !u.iter().any(|i| i.contains(&S::zero())) || two.base.filter.contains(f.evaluate(u)))
}

/// Open sets built from the breakpoints of `f` and 0: intervals between
/// any two of them (and the infinite ends), so every value `f(U)` that can
/// occur is hit.
pub fn probe_sets<S: Scalar>(f: &RealFrameMap<S>) -> Vec<Vec<Interval<S>>> {
    let mut pts = f.breakpoints();
    pts.push(S::zero());
    pts.push(S::one());
    pts.sort();
    pts.dedup();
    let mut ends: Vec<Option<S>> = vec![None];
    for w in pts.windows(2) {
        ends.push(Some(w[0].midpoint(&w[1])));
    }
    ends.push(Some(pts[0].clone() - S::one()));
    ends.push(Some(pts[pts.len() - 1].clone() + S::one()));
    ends.extend(pts.iter().cloned().map(Some));
    let mut out = Vec::new();
    for lo in &ends {
        for hi in &ends {
            let ok = match (lo, hi) {
                (Some(l), Some(h)) => l < h,
                _ => true,
            };
            if ok {
                out.push(vec![Interval::new(lo.clone(), hi.clone())]);
            }
        }
    }
    out
}

/// The four-case table of `â` for the unit of a `FinVec` carrier: on `U`
/// it is `(0 ∈ U, 1 ∈ U)` read in `2 × K A`.
pub fn unit_table_holds<S: Scalar>(sp: &Spectral<S>) -> Result<bool, RepError> {
    if sp.carrier().dim().is_none() {
        return Err(RepError::Unsupported("the sequence carrier has no unit".into()));
    }
    let hat_u = hat(sp, &TruncElement::unit(sp.carrier()))?;
    let (top, bot) = (sp.bundle.frame.top(), sp.bundle.frame.bottom());
    let iv = |a: i64, b: i64, c: i64, d: i64| Interval::new(Some(S::ratio(a, b)), Some(S::ratio(c, d)));
    let sets: Vec<OpenSet<S>> = vec![
        vec![iv(-1, 2, 3, 2)],
        vec![iv(-1, 2, 1, 2)],
        vec![iv(1, 2, 3, 2)],
        vec![iv(3, 2, 2, 1)],
        vec![iv(-1, 3, 1, 3), Interval::above(S::ratio(2, 3))],
        vec![Interval::below(S::ratio(-1, 1)), iv(1, 4, 3, 4)],
        punctured(&S::zero()),
        punctured(&S::one()),
    ];
    for u in sets {
        let zero_in = u.iter().any(|i| i.contains(&S::zero()));
        let one_in = u.iter().any(|i| i.contains(&S::one()));
        let expected = sp.spectrum.element(zero_in, if one_in { top } else { bot });
        if expected != Some(hat_u.evaluate(&u)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `FinVec` tuple oracle: `a̲` has value `a(x)/u(x)` on the atom of `x`.
pub fn atom_oracle_holds<S: Scalar>(bundle: &KernelFrameBundle<S>, a: &TruncElement<S>, f: &RealFrameMap<S>) -> bool {
    let atoms = bundle.frame.centre_atoms();
    let tuple = f.to_tuple();
    atoms.iter().zip(tuple).all(|(&atom, v)| {
        let k = bundle.kernel(atom);
        match k.support().listed().iter().next() {
            Some(&i) if !k.support().is_cofinite() => v == a.at(i) / bundle.carrier.unit_at(i),
            // the tail atom of a window carries the tail value
            _ => Some(&v) == a.tail(),
        }
    })
}

/// The element `a` with `a̲ = f`, if there is one.
pub fn preimage<S: Scalar>(bundle: &KernelFrameBundle<S>, f: &RealFrameMap<S>) -> Result<Option<TruncElement<S>>, RepError> {
    let atoms = bundle.frame.centre_atoms();
    let tuple = f.to_tuple();
    let c = &bundle.carrier;
    let width = c.dim().unwrap_or_else(|| bundle.window.unwrap_or(0));
    let mut coords = vec![S::zero(); width];
    for (&atom, v) in atoms.iter().zip(tuple) {
        let k = bundle.kernel(atom);
        if k.support().is_cofinite() {
            // the tail atom: elements of the trunc vanish eventually
            if !v.is_zero() {
                return Ok(None);
            }
        } else if let Some(&i) = k.support().listed().iter().next() {
            coords[i] = v * c.unit_at(i);
        }
    }
    let a = match c.dim() {
        Some(_) => TruncElement::tuple(c, coords)?,
        None => TruncElement::seq(c, coords)?,
    };
    Ok((underline(bundle, &a)? == *f).then_some(a))
}

/// Whether the constant frame function `r` is `a̲` for some `a`.
pub fn constant_in_image<S: Scalar>(bundle: &KernelFrameBundle<S>, r: S) -> Result<bool, RepError> {
    Ok(preimage(bundle, &RealFrameMap::constant(&bundle.frame, r))?.is_some())
}

/// Kernel frames shared across instances: one per random `FinVec` draw, one
/// windowed `EvSeq` frame covering every sample prefix.
fn instance_bundle<S: Scalar>(
    rng: &mut rand_chacha::ChaCha8Rng,
    idx: usize,
    seq: &KernelFrameBundle<S>,
) -> Result<KernelFrameBundle<S>, RepError> {
    if idx % 2 == 0 {
        let c = random::fin_vec::<S, _>(rng, 4);
        Ok(kernel_frame(&c, Bounds::default())?)
    } else {
        Ok(seq.clone())
    }
}

pub fn seq_bundle<S: Scalar>() -> Result<KernelFrameBundle<S>, RepError> {
    Ok(kernel_frame(&Carrier::ev_seq(), Bounds { max_dim: 10, window: random::MAX_PREFIX })?)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

/// The kernel representation preserves the trunc operations, is injective
/// and agrees with the atom tuples. `n` instances, alternating carriers.
pub fn verify_kappa<S: Scalar>(seed: u64, n: usize) -> Result<Vec<Property>, RepError> {
    let seq = seq_bundle::<S>()?;
    let ops = run("kernel_representation_preserves_operations", seed, n, |rng, idx| {
        let b = instance_bundle(rng, idx, &seq).map_err(err)?;
        let c = b.carrier.clone();
        let x = random::element(rng, &c, false);
        let y = random::element(rng, &c, false);
        let w = |what: &str| format!("{what}: a={x}, b={y}");
        let ul = |e: &TruncElement<S>| underline(&b, e).map_err(err);
        let (ux, uy) = (ul(&x)?, ul(&y)?);
        ensure(ul(&x.meet(&y).map_err(err)?)? == ux.meet(&uy).map_err(err)?, || w("meet"))?;
        ensure(ul(&x.join(&y).map_err(err)?)? == ux.join(&uy).map_err(err)?, || w("join"))?;
        ensure(ul(&x.add(&y).map_err(err)?)? == ux.add(&uy).map_err(err)?, || w("sum"))?;
        let ax = x.abs();
        let uax = ul(&ax)?;
        ensure(ul(&ax.truncate().map_err(err)?)? == uax.truncate_at_one(), || w("truncation"))?;
        let d1 = ax.diminish(&S::one()).map_err(err)?;
        ensure(ul(&d1)? == uax.sub(&RealFrameMap::constant(&b.frame, S::one())).map_err(err)?.pos_part(), || {
            w("diminution by one")
        })?;
        ensure(x.is_zero() || uax.upper(&S::zero()) != b.frame.bottom(), || w("injectivity"))?;
        ensure(atom_oracle_holds(&b, &x, &ux), || w("atom tuple"))?;
        // the step form matches the definition at and between levels
        if x.is_nonneg() {
            let bps = ux.breakpoints();
            for (i, r) in bps.iter().enumerate() {
                let next = bps.get(i + 1).cloned().unwrap_or_else(|| r.clone() + S::one());
                for p in [r.clone(), r.midpoint(&next)] {
                    if !p.is_negative() {
                        let k = bright(&x, &p).map_err(err)?;
                        ensure(ux.upper(&p) == b.element_of(&k), || w("step form"))?;
                    }
                }
            }
        }
        Ok(None)
    });
    let below_one = run("truncation_keeps_kernels_below_one", seed, n, |rng, idx| {
        let b = instance_bundle(rng, idx, &seq).map_err(err)?;
        let x = random::nonneg(rng, &b.carrier);
        let (ux, ut) = (underline(&b, &x).map_err(err)?, underline(&b, &x.truncate().map_err(err)?).map_err(err)?);
        let mut probes: Vec<S> = ux.breakpoints().into_iter().filter(|r| !r.is_negative() && *r < S::one()).collect();
        let d = rng.gen_range(1..=12);
        probes.push(S::ratio(rng.gen_range(0..d), d));
        for r in probes {
            ensure(ux.upper(&r) == ut.upper(&r), || format!("a={x}, r={r}"))?;
        }
        Ok(None)
    });
    Ok(vec![ops, below_one])
}

/// The pointed representation: values in `R₀M`, operations preserved,
/// the lift `R L → R₀(2L)` is a bijection on atom tuples, and the filtered
/// condition matches membership in `2_F L`.
pub fn verify_hat<S: Scalar>(seed: u64, n: usize) -> Result<Vec<Property>, RepError> {
    let window = 3;
    let seq = Spectral::new(&Carrier::<S>::ev_seq(), Bounds { max_dim: 10, window })?;
    let spectral = |rng: &mut rand_chacha::ChaCha8Rng, idx: usize| -> Result<Spectral<S>, String> {
        if idx % 2 == 0 {
            Spectral::new(&random::fin_vec::<S, _>(rng, 3), Bounds::default()).map_err(err)
        } else {
            Ok(seq.clone())
        }
    };
    let sample = |rng: &mut rand_chacha::ChaCha8Rng, c: &Arc<Carrier<S>>| -> TruncElement<S> {
        let x = random::element(rng, c, false);
        match c.dim() {
            Some(_) => x,
            None => x.map(|i, v| if i < window { v.clone() } else { S::zero() }),
        }
    };
    let ops = run("pointed_representation_lands_in_r0_and_preserves_operations", seed, n, |rng, idx| {
        let sp = spectral(rng, idx)?;
        let c = sp.carrier().clone();
        let (x, y) = (sample(rng, &c), sample(rng, &c));
        let w = |what: &str| format!("{what}: a={x}, b={y}");
        let h = |e: &TruncElement<S>| hat(&sp, e).map_err(err);
        let (hx, hy) = (h(&x)?, h(&y)?);
        ensure(in_r0(sp.pointed(), &hx), || w("R0 membership"))?;
        ensure(h(&x.meet(&y).map_err(err)?)? == hx.meet(&hy).map_err(err)?, || w("meet"))?;
        ensure(h(&x.add(&y).map_err(err)?)? == hx.add(&hy).map_err(err)?, || w("sum"))?;
        let ax = x.abs();
        ensure(h(&ax.truncate().map_err(err)?)? == h(&ax)?.truncate_at_one(), || w("truncation"))?;
        ensure(x.is_zero() || h(&ax)?.upper(&S::zero()) != sp.pointed().frame().bottom(), || w("injectivity"))?;
        Ok(None)
    });
    let lift_iso = run("real_maps_on_l_match_pointed_maps_on_2l", seed, n, |rng, idx| {
        let sp = spectral(rng, idx)?;
        let l = sp.bundle.frame.clone();
        let k = l.centre_atoms().len();
        let vals: Vec<S> = (0..k).map(|_| random::rational(rng, 3, false)).collect();
        let f = RealFrameMap::from_tuple(&l, &vals).map_err(err)?;
        // into 2L: always defined, R0, and the tuple is f's plus a 0 for the point atom
        let ambient = crate::pointed::product2(&l).map_err(err)?;
        let two_l = crate::pointed::two_sub_f(&crate::pointed::FilteredFrame::new(
            l.clone(),
            crate::pointed::Filter::improper(&l),
        ))
        .map_err(err)?;
        let lifted = lift(&two_l, &f).ok_or_else(|| format!("no lift of {vals:?}"))?;
        ensure(in_r0(&two_l.pointed, &lifted), || format!("lift not in R0: {vals:?}"))?;
        let mut sorted_vals = lifted.to_tuple();
        sorted_vals.sort();
        let mut expected = vals.clone();
        expected.push(S::zero());
        expected.sort();
        ensure(sorted_vals == expected && ambient.frame().len() == two_l.pointed.frame().len(), || {
            format!("lift tuple mismatch for {vals:?}")
        })?;
        // filtered condition against membership in 2_F L
        let in_2f = lift(&sp.spectrum, &f).is_some();
        ensure(in_2f == filtered_condition(&sp.spectrum, &f, &probe_sets(&f)), || {
            format!("filtered condition disagrees for {vals:?}")
        })?;
        Ok(None)
    });
    Ok(vec![ops, lift_iso])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn underline_examples() {
        let c = Carrier::<Q>::standard(2).unwrap();
        let b = kernel_frame(&c, Bounds::default()).unwrap();
        let z = underline(&b, &TruncElement::zero(&c)).unwrap();
        assert_eq!(z, RealFrameMap::zero(&b.frame));
        let a = TruncElement::tuple(&c, vec![q(3, 1), q(1, 1)]).unwrap();
        let u = underline(&b, &a).unwrap();
        let labels: Vec<(Q, Vec<String>)> =
            u.steps().iter().map(|(r, v)| (r.clone(), b.frame.element_labels(*v))).collect();
        // [a] is the top, so nothing changes at 0
        assert_eq!(u.upper(&q(0, 1)), b.frame.top());
        assert_eq!(u.upper(&q(2, 1)), b.frame.element(&["x1"]).unwrap());
        assert_eq!(labels, vec![(q(1, 1), vec!["x1".to_string()]), (q(3, 1), vec![])]);
    }

    #[test]
    fn constant_five_on_one_coordinate() {
        let c = Carrier::<Q>::standard(1).unwrap();
        let b = kernel_frame(&c, Bounds::default()).unwrap();
        let u = underline(&b, &TruncElement::tuple(&c, vec![q(5, 1)]).unwrap()).unwrap();
        assert_eq!(u, RealFrameMap::constant(&b.frame, q(5, 1)));
    }

    #[test]
    fn hat_examples() {
        let c = Carrier::<Q>::standard(2).unwrap();
        let sp = Spectral::new(&c, Bounds::default()).unwrap();
        let a = TruncElement::tuple(&c, vec![q(2, 1), q(0, 1)]).unwrap();
        let h = hat(&sp, &a).unwrap();
        let x1 = sp.bundle.frame.element(&["x1"]).unwrap();
        assert_eq!(h.steps(), &[(q(0, 1), sp.lower_element(x1)), (q(2, 1), sp.pointed().frame().bottom())]);
        let z = hat(&sp, &TruncElement::zero(&c)).unwrap();
        assert_eq!(z, RealFrameMap::zero(sp.pointed().frame()));
        assert!(unit_table_holds(&sp).unwrap());
    }

    #[test]
    fn constant_membership() {
        let c = Carrier::<Q>::fin_vec(vec![q(2, 1), q(1, 3)]).unwrap();
        let b = kernel_frame(&c, Bounds::default()).unwrap();
        assert!(constant_in_image(&b, q(1, 1)).unwrap());
        let a = preimage(&b, &RealFrameMap::constant(&b.frame, q(1, 1))).unwrap().unwrap();
        assert_eq!(a, TruncElement::unit(&c));
        assert!(!constant_in_image(&seq_bundle::<Q>().unwrap(), q(1, 1)).unwrap());
        assert!(constant_in_image(&seq_bundle::<Q>().unwrap(), q(0, 1)).unwrap());
    }

    #[test]
    fn constant_one_is_not_a_sequence_representation() {
        // a̲ for a in the trunc never equals the constant 1 on the window
        let b = seq_bundle::<Q>().unwrap();
        let one = RealFrameMap::constant(&b.frame, q(1, 1));
        let c = b.carrier.clone();
        for len in 0..=random::MAX_PREFIX {
            let a = TruncElement::seq(&c, vec![q(1, 1); len]).unwrap();
            assert_ne!(underline(&b, &a).unwrap(), one);
        }
    }

    #[test]
    fn verification_batches() {
        for p in verify_kappa::<Q>(3, 40).unwrap().into_iter().chain(verify_hat::<Q>(3, 30).unwrap()) {
            assert!(p.passed, "{p:?}");
        }
    }
}
