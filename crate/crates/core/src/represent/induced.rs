//! Trunc morphisms into `R₀L`, the pointed frame map they induce on the
//! spectrum, the non-functoriality example for `a ↦ a̲`, and the coz/con
//! calculus.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::underline::{hat, seq_bundle, underline, Spectral};
use super::{Interval, RealFrameMap, RepError};
use crate::check::{ensure, run, Property};
use crate::kernel_frame::{kernel_frame, Bounds, KernelFrameBundle};
use crate::lattice::{enumerate_frame_maps, Elem, FrameMap};
use crate::pointed::{is_pointed_map, pointed_maps, PointedFrame};
use crate::scalar::Scalar;
use crate::trunc::kernel::{closure, dark, in_k0, in_k1};
use crate::trunc::{random, Carrier, Kernel, TruncElement};

/// `θ: A → R₀L` for a `FinVec` carrier, given by `θ(ū_i e_i)` and extended
/// linearly.
#[derive(Clone, Debug)]
pub struct TruncMorphism<S> {
    source: Arc<Carrier<S>>,
    target: PointedFrame,
    images: Vec<RealFrameMap<S>>,
}

/// Elements used to validate a morphism: a grid for small `|X|`, otherwise
/// seeded random elements.
fn validation_samples<S: Scalar>(c: &Arc<Carrier<S>>) -> Vec<TruncElement<S>> {
    let n = c.dim().unwrap_or(0);
    if n <= 3 {
        let vals = [S::ratio(-1, 1), S::ratio(1, 2), S::from_u64(2)];
        (0..3usize.pow(n as u32))
            .map(|mut code| {
                let v = (0..n)
                    .map(|i| {
                        let x = vals[code % 3].clone() * c.unit_at(i);
                        code /= 3;
                        x
                    })
                    .collect();
                TruncElement::tuple(c, v).expect("shape")
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        (0..24).map(|_| random::element(&mut rng, c, false)).collect()
    }
}

impl<S: Scalar> TruncMorphism<S> {
    pub fn new(source: &Arc<Carrier<S>>, target: PointedFrame, images: Vec<RealFrameMap<S>>) -> Result<Self, RepError> {
        let n = source
            .dim()
            .ok_or_else(|| RepError::Unsupported("morphisms are given on a finite generating set".into()))?;
        if images.len() != n {
            return Err(RepError::Invalid(format!("{} generator images for {n} generators", images.len())));
        }
        for f in &images {
            if **f.target() != **target.frame() {
                return Err(RepError::MixedTargets);
            }
            if !super::underline::in_r0(&target, f) {
                return Err(RepError::NotMorphism("vanishing at the point".into()));
            }
        }
        let theta = TruncMorphism { source: source.clone(), target, images };
        theta.validate()?;
        Ok(theta)
    }

    /// `μ_B ∘ φ` for `φ: A → B` given by `φ(ū_i e_i)` in `B`.
    pub fn through_hat(
        source: &Arc<Carrier<S>>,
        spectral: &Spectral<S>,
        images: &[TruncElement<S>],
    ) -> Result<Self, RepError> {
        let maps = images.iter().map(|b| hat(spectral, b)).collect::<Result<Vec<_>, _>>()?;
        Self::new(source, spectral.pointed().clone(), maps)
    }

    /// `μ_A` itself.
    pub fn hat_of(spectral: &Spectral<S>) -> Result<Self, RepError> {
        let c = spectral.carrier().clone();
        let n = c.dim().ok_or_else(|| RepError::Unsupported("the sequence carrier".into()))?;
        let gens: Vec<TruncElement<S>> = (0..n).map(|i| TruncElement::indicator(&c, i)).collect();
        Self::through_hat(&c, spectral, &gens)
    }

    pub fn source(&self) -> &Arc<Carrier<S>> {
        &self.source
    }

    pub fn target(&self) -> &PointedFrame {
        &self.target
    }

    pub fn apply(&self, a: &TruncElement<S>) -> Result<RealFrameMap<S>, RepError> {
        let frame = self.target.frame();
        let mut acc = vec![S::zero(); frame.centre_atoms().len()];
        for (i, img) in self.images.iter().enumerate() {
            let coeff = a.at(i) / self.source.unit_at(i);
            for (x, y) in acc.iter_mut().zip(img.to_tuple()) {
                *x = x.clone() + coeff.clone() * y;
            }
        }
        RealFrameMap::from_tuple(frame, &acc)
    }

    fn validate(&self) -> Result<(), RepError> {
        let samples = validation_samples(&self.source);
        let images = samples.iter().map(|a| self.apply(a)).collect::<Result<Vec<_>, _>>()?;
        let pairs = || samples.iter().zip(&images).flat_map(|x| samples.iter().zip(&images).map(move |y| (x, y)));
        for ((a, fa), (b, fb)) in pairs() {
            if self.apply(&a.meet(b)?)? != fa.meet(fb)? {
                return Err(RepError::NotMorphism("meet".into()));
            }
        }
        for ((a, fa), (b, fb)) in pairs() {
            if self.apply(&a.join(b)?)? != fa.join(fb)? {
                return Err(RepError::NotMorphism("join".into()));
            }
        }
        for a in &samples {
            let p = a.abs();
            if self.apply(&p.truncate()?)? != self.apply(&p)?.truncate_at_one() {
                return Err(RepError::NotMorphism("truncation".into()));
            }
        }
        Ok(())
    }
}

/// Truncated elements `Σ c_i ū_i e_i` with `c_i ∈ {0, 1/2, 1}` over the
/// first `width` coordinates.
pub fn half_grid<S: Scalar>(c: &Arc<Carrier<S>>, width: usize) -> Vec<TruncElement<S>> {
    let vals = [S::zero(), S::ratio(1, 2), S::one()];
    (0..3usize.pow(width as u32))
        .map(|mut code| {
            let mut e = TruncElement::zero(c);
            for i in 0..width {
                let t = vals[code % 3].clone();
                code /= 3;
                e = e.add(&TruncElement::indicator(c, i).scale(&t)).expect("same carrier");
            }
            e
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Induced {
    pub g: FrameMap,
    /// Size of the finite family each join was taken over.
    pub family: usize,
    /// Random members of `⁰K`, `¹K` never exceeded the finite join.
    pub stable: bool,
}

/// `g(⊥,K) = ⋁_{⁰K} coz θ(a)`, `g(⊤,K) = ⋁_{¹K} con θ(a)`.
pub fn induced_g<S: Scalar>(sp: &Spectral<S>, theta: &TruncMorphism<S>, seed: u64) -> Result<Induced, RepError> {
    let c = sp.carrier().clone();
    let n = c.dim().ok_or_else(|| RepError::Unsupported("the sequence carrier".into()))?;
    if theta.source() != &c {
        return Err(RepError::Invalid("morphism source differs from the spectrum's carrier".into()));
    }
    let family = half_grid(&c, n);
    let cozs: Vec<(Elem, Elem)> = family
        .iter()
        .map(|a| theta.apply(a).map(|f| (f.coz(), f.con())))
        .collect::<Result<_, _>>()?;
    let target = theta.target().frame().clone();
    let m = sp.pointed().frame().clone();
    let mut table = Vec::with_capacity(m.len());
    let mut stable = true;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra: Vec<TruncElement<S>> = (0..32).map(|_| random::truncated(&mut rng, &c)).collect();
    for &e in m.elements() {
        let (eps, k) = sp.spectrum.coords(e);
        let kernel = sp.bundle.kernel(k);
        let member = |a: &TruncElement<S>| if eps { in_k1(kernel, a) } else { in_k0(kernel, a) };
        let pick = |v: &(Elem, Elem)| if eps { v.1 } else { v.0 };
        let mut value = target.bottom();
        for (a, v) in family.iter().zip(&cozs) {
            if member(a)? {
                value = target.join(value, pick(v));
            }
        }
        for a in &extra {
            if member(a)? {
                let f = theta.apply(a)?;
                let w = if eps { f.con() } else { f.coz() };
                stable &= target.leq(w, value);
            }
        }
        table.push(value);
    }
    let g = FrameMap::new(m, target, table)?;
    Ok(Induced { g, family: family.len(), stable })
}

/// `R₀g ∘ μ_A = θ` on the generators and the validation samples.
pub fn square_commutes<S: Scalar>(sp: &Spectral<S>, theta: &TruncMorphism<S>, g: &FrameMap) -> Result<bool, RepError> {
    let c = sp.carrier();
    let n = c.dim().unwrap_or(0);
    let mut probe: Vec<TruncElement<S>> = (0..n).map(|i| TruncElement::indicator(c, i)).collect();
    probe.extend(validation_samples(c));
    for a in &probe {
        if hat(sp, a)?.push_forward(g)? != theta.apply(a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pointed maps `M A → L` that make the square commute.
pub fn commuting_maps<S: Scalar>(sp: &Spectral<S>, theta: &TruncMorphism<S>) -> Result<Vec<FrameMap>, RepError> {
    let mut out = Vec::new();
    for h in pointed_maps(sp.pointed(), theta.target()) {
        if square_commutes(sp, theta, &h)? {
            out.push(h);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedReport {
    pub source: String,
    pub table: Vec<(String, String)>,
    pub pointed: bool,
    pub square_commutes: bool,
    pub family: usize,
    pub stable: bool,
    pub commuting_maps: usize,
    pub unique: bool,
}

pub fn induce_report<S: Scalar>(sp: &Spectral<S>, theta: &TruncMorphism<S>, seed: u64) -> Result<InducedReport, RepError> {
    let ind = induced_g(sp, theta, seed)?;
    let m = sp.pointed().frame();
    let t = theta.target().frame();
    let pointed = is_pointed_map(&ind.g, sp.pointed(), theta.target());
    let square = square_commutes(sp, theta, &ind.g)?;
    let all = commuting_maps(sp, theta)?;
    Ok(InducedReport {
        source: sp.carrier().name(),
        table: m.elements().iter().map(|&e| (m.display(e), t.display(ind.g.at(e)))).collect(),
        pointed,
        square_commutes: square,
        family: ind.family,
        stable: ind.stable,
        commuting_maps: all.len(),
        unique: all.len() == 1 && all[0].agrees_with(&ind.g),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Ex1Report {
    /// Frame maps `K ℚ¹ → K ℚ²`.
    pub frame_maps: usize,
    pub unique_map: Vec<(String, String)>,
    pub probe: (String, String),
    /// `h ∘ 1̲` at the probe.
    pub pushed_value: String,
    /// `θ(1)̲` at the probe.
    pub direct_value: String,
    pub repair: InducedReport,
}

/// `A = ℚ¹`, `B = ℚ²`, `θ(a) = (a, 0)`.
pub fn nonfunctorial_demo<S: Scalar>() -> Result<Ex1Report, RepError> {
    let a = Carrier::<S>::standard(1)?;
    let b = Carrier::<S>::standard(2)?;
    let theta_one = TruncElement::tuple(&b, vec![S::one(), S::zero()])?;
    let ka = kernel_frame(&a, Bounds::default())?;
    let kb = kernel_frame(&b, Bounds::default())?;
    let maps = enumerate_frame_maps(&ka.frame, &kb.frame);
    let h = maps.first().ok_or_else(|| RepError::Invalid("no frame map 2 → 4".into()))?;
    let pushed = underline(&ka, &TruncElement::unit(&a))?.push_forward(h)?;
    let direct = underline(&kb, &theta_one)?;
    // unit intervals around the breakpoints of the pushed map
    let half = S::ratio(1, 2);
    let probe = pushed
        .breakpoints()
        .into_iter()
        .chain(direct.breakpoints())
        .map(|r| Interval::new(Some(r.clone() - half.clone()), Some(r + half.clone())))
        .find(|i| pushed.interval(i) != direct.interval(i))
        .ok_or_else(|| RepError::Invalid("no failing probe".into()))?;
    let sa = Spectral::new(&a, Bounds::default())?;
    let sb = Spectral::new(&b, Bounds::default())?;
    let theta = TruncMorphism::through_hat(&a, &sb, &[theta_one])?;
    let repair = induce_report(&sa, &theta, 0)?;
    let show = |x: &Option<S>| x.as_ref().map_or("inf".to_string(), |v| v.to_string());
    Ok(Ex1Report {
        frame_maps: maps.len(),
        unique_map: ka.frame.elements().iter().map(|&e| (ka.frame.display(e), kb.frame.display(h.at(e)))).collect(),
        probe: (show(&probe.lo), show(&probe.hi)),
        pushed_value: kb.frame.display(pushed.interval(&probe)),
        direct_value: kb.frame.display(direct.interval(&probe)),
        repair,
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

/// A random kernel frame instance: `FinVec` with `|X| ≤ 4` or the windowed
/// sequence frame.
fn coz_bundle<S: Scalar>(
    rng: &mut ChaCha8Rng,
    idx: usize,
    seq: &KernelFrameBundle<S>,
) -> Result<KernelFrameBundle<S>, String> {
    if idx % 2 == 0 {
        kernel_frame(&random::fin_vec::<S, _>(rng, 4), Bounds::default()).map_err(err)
    } else {
        Ok(seq.clone())
    }
}

/// Coordinates that reach every atom of the frame: the window and one
/// coordinate past it for sequences.
fn atom_width<S: Scalar>(b: &KernelFrameBundle<S>) -> usize {
    b.carrier.dim().unwrap_or_else(|| b.window.unwrap_or(0) + 1)
}

/// `⋁_{c∈K} coz c̲` over the indicator generators of `K`. Stabilization: the
/// finite join is the frame element of `K` and random members of `K` stay
/// below it.
fn coz_join<S: Scalar>(
    b: &KernelFrameBundle<S>,
    k: &Kernel<S>,
    rng: &mut ChaCha8Rng,
    f: impl Fn(&TruncElement<S>) -> Result<Elem, String>,
) -> Result<(Elem, u64), String> {
    let gens = k.generators_below(atom_width(b));
    let mut acc = b.frame.bottom();
    for g in &gens {
        acc = b.frame.join(acc, f(g)?);
    }
    for _ in 0..4 {
        let x = random::element(rng, &b.carrier, true);
        let x = x.map(|i, v| if k.support().contains(i) { v.clone() } else { S::zero() });
        ensure(b.frame.leq(f(&x)?, acc), || format!("member {x} of {} escapes the finite join", k.support()))?;
    }
    Ok((acc, gens.len() as u64))
}

/// The five coz/con properties, each on `n` instances, with maps `a̲` in the
/// kernel frame (`EvSeq` on a window covering every sample).
pub fn coz_con_suite<S: Scalar>(seed: u64, n: usize) -> Result<Vec<Property>, RepError> {
    let seq = seq_bundle::<S>()?;
    let seq = &seq;
    let coz = |b: &KernelFrameBundle<S>, a: &TruncElement<S>| underline(b, a).map(|f| f.coz()).map_err(err);
    let con = |b: &KernelFrameBundle<S>, a: &TruncElement<S>| underline(b, a).map(|f| f.con()).map_err(err);

    let join_invariant = run("cozero_joins_invariant_under_kernel_closure", seed, n, |rng, idx| {
        let b = coz_bundle(rng, idx, seq)?;
        let set: Vec<TruncElement<S>> = (0..3).map(|_| random::element(rng, &b.carrier, false)).collect();
        let lhs = b.frame.join_all(set.iter().map(|a| coz(&b, a)).collect::<Result<Vec<_>, _>>()?);
        let k = closure(&b.carrier, &set).map_err(err)?;
        let (rhs, used) = coz_join(&b, &k, rng, |c| coz(&b, c))?;
        ensure(lhs == rhs && rhs == b.element_of(&k), || format!("S={{{}}}", listing(&set)))?;
        Ok(Some(used))
    });

    let dark_below_con = run("cozeros_in_dark_lie_below_con", seed, n, |rng, idx| {
        let b = coz_bundle(rng, idx, seq)?;
        let a = random::truncated(rng, &b.carrier);
        let d = dark(&a, &S::one()).map_err(err)?;
        let ca = con(&b, &a)?;
        let x = random::element(rng, &b.carrier, false).map(|i, v| if d.support().contains(i) { v.clone() } else { S::zero() });
        ensure(b.frame.leq(coz(&b, &x)?, ca), || format!("a={a}, b={x}"))?;
        let (j, used) = coz_join(&b, &d, rng, |c| coz(&b, c))?;
        ensure(b.frame.leq(j, ca), || format!("a={a}: join over a◀1 exceeds con a"))?;
        Ok(Some(used))
    });

    let meet_below = run("coz_meet_con_below_dark_cozeros", seed, n, |rng, idx| {
        let b = coz_bundle(rng, idx, seq)?;
        let a = random::truncated(rng, &b.carrier);
        let x = random::truncated(rng, &b.carrier);
        let d = dark(&a, &S::one()).map_err(err)?;
        let (j, used) = coz_join(&b, &d, rng, |c| coz(&b, c))?;
        ensure(b.frame.leq(b.frame.meet(coz(&b, &x)?, con(&b, &a)?), j), || format!("a={a}, b={x}"))?;
        Ok(Some(used))
    });

    let meet_equals = run("coz_meet_con_equals_join_of_meets", seed, n, |rng, idx| {
        let b = coz_bundle(rng, idx, seq)?;
        let a = random::truncated(rng, &b.carrier);
        let x = random::nonneg(rng, &b.carrier);
        let d = dark(&a, &S::one()).map_err(err)?;
        let cb = coz(&b, &x)?;
        let lhs = b.frame.meet(cb, con(&b, &a)?);
        let (j, _) = coz_join(&b, &d, rng, |c| coz(&b, c))?;
        let (jm, used) = coz_join(&b, &d, rng, |c| coz(&b, &x.meet(c).map_err(err)?))?;
        ensure(lhs == b.frame.meet(cb, j) && lhs == jm, || format!("a={a}, b={x}"))?;
        Ok(Some(used))
    });

    let con_cover = run("con_join_dark_cozeros_covers_con", seed, n, |rng, idx| {
        let b = coz_bundle(rng, idx, seq)?;
        let a = random::truncated(rng, &b.carrier);
        let x = random::truncated(rng, &b.carrier);
        let d = dark(&x, &S::one()).map_err(err)?;
        let (j, used) = coz_join(&b, &d, rng, |c| coz(&b, c))?;
        ensure(b.frame.leq(con(&b, &x)?, b.frame.join(con(&b, &a)?, j)), || format!("a={a}, b={x}"))?;
        Ok(Some(used))
    });

    Ok(vec![join_invariant, dark_below_con, meet_below, meet_equals, con_cover])
}

fn listing<S: Scalar>(xs: &[TruncElement<S>]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn ex1() {
        let r = nonfunctorial_demo::<Q>().unwrap();
        assert_eq!(r.frame_maps, 1);
        assert_eq!(r.probe, ("1/2".to_string(), "3/2".to_string()));
        assert_ne!(r.pushed_value, r.direct_value);
        assert!(r.repair.pointed && r.repair.square_commutes && r.repair.stable);
        assert_eq!(r.repair.commuting_maps, 1);
        assert!(r.repair.unique);
    }

    #[test]
    fn hat_induces_identity() {
        for n in 1..=2 {
            let c = Carrier::<Q>::standard(n).unwrap();
            let sp = Spectral::new(&c, Bounds::default()).unwrap();
            let theta = TruncMorphism::hat_of(&sp).unwrap();
            let ind = induced_g(&sp, &theta, 1).unwrap();
            assert!(ind.g.agrees_with(&FrameMap::identity(sp.pointed().frame().clone())));
            let r = induce_report(&sp, &theta, 1).unwrap();
            assert!(r.unique && r.square_commutes && r.pointed);
        }
    }

    #[test]
    fn non_unit_weights() {
        let a = Carrier::<Q>::fin_vec(vec![q(2, 1), q(1, 3)]).unwrap();
        let b = Carrier::<Q>::fin_vec(vec![q(1, 2), q(3, 1), q(1, 1)]).unwrap();
        let sa = Spectral::new(&a, Bounds::default()).unwrap();
        let sb = Spectral::new(&b, Bounds::default()).unwrap();
        // x1 ↦ y2 and y3, x2 ↦ y1
        let imgs = vec![
            TruncElement::tuple(&b, vec![q(0, 1), q(3, 1), q(1, 1)]).unwrap(),
            TruncElement::tuple(&b, vec![q(1, 2), q(0, 1), q(0, 1)]).unwrap(),
        ];
        let theta = TruncMorphism::through_hat(&a, &sb, &imgs).unwrap();
        let r = induce_report(&sa, &theta, 2).unwrap();
        assert!(r.pointed && r.square_commutes && r.unique, "{r:?}");
    }

    #[test]
    fn broken_morphisms_are_named() {
        let a = Carrier::<Q>::standard(2).unwrap();
        let b = Carrier::<Q>::standard(1).unwrap();
        let sb = Spectral::new(&b, Bounds::default()).unwrap();
        let one = TruncElement::tuple(&b, vec![q(1, 1)]).unwrap();
        // both generators onto the same coordinate: meets fail
        let e = TruncMorphism::through_hat(&a, &sb, &[one.clone(), one.clone()]).unwrap_err();
        assert_eq!(e, RepError::NotMorphism("meet".into()));
        // a generator sent to 2: truncation fails
        let two = TruncElement::tuple(&b, vec![q(2, 1)]).unwrap();
        let e = TruncMorphism::through_hat(&a, &sb, &[two, TruncElement::zero(&b)]).unwrap_err();
        assert_eq!(e, RepError::NotMorphism("truncation".into()));
        // a map that is not zero at the point
        let two_frame = sb.pointed().frame().clone();
        let konst = RealFrameMap::constant(&two_frame, q(1, 1));
        let e = TruncMorphism::new(&a, sb.pointed().clone(), vec![konst.clone(), konst]).unwrap_err();
        assert_eq!(e, RepError::NotMorphism("vanishing at the point".into()));
    }

    #[test]
    fn coz_con_properties() {
        for p in coz_con_suite::<Q>(5, 30).unwrap() {
            assert!(p.passed, "{p:?}");
        }
    }
}
