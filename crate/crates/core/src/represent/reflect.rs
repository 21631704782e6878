//! The reflection `ω_A = R ν ∘ μ_A: A → R₀(2·K A)` and the subtrunc
//! `ωA = ⟨Â, b₀⟩`.
//!
//! `2·K A` is Boolean apart from the point, so `R₀(2·K A)` is the tuple
//! space over the atoms of `K A` and `b₀` is the all-ones tuple. `Â` is a
//! rational subspace; `ωA` is `Â + ℤ·b₀`, which is closed under the lattice
//! operations because `b₀` is constant.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::underline::{hat, in_r0, Spectral};
use super::{RealFrameMap, RepError};
use crate::check::{ensure, run, Property};
use crate::kernel_frame::Bounds;
use crate::pointed::{free_isolated, FreeIsolated};
use crate::scalar::Scalar;
use crate::trunc::{random, Carrier, TruncElement};

#[derive(Clone, Debug)]
pub struct Reflection<S> {
    pub spectral: Spectral<S>,
    pub free: FreeIsolated,
    /// Labels of the model coordinates (atoms of `2·K A` off the point).
    pub coords: Vec<String>,
    point_atom: usize,
    /// `ω_A` of the generators of `A`.
    generators: Vec<Vec<S>>,
    pub rank: usize,
    pub b0: Vec<S>,
    pub b0_in_hat: bool,
}

/// Solves `Σ x_j cols_j = v` exactly; `None` when inconsistent. Free
/// variables are set to 0.
pub fn solve<S: Scalar>(cols: &[Vec<S>], v: &[S]) -> Option<Vec<S>> {
    let rows = v.len();
    let n = cols.len();
    let mut m: Vec<Vec<S>> = (0..rows)
        .map(|r| cols.iter().map(|c| c[r].clone()).chain(std::iter::once(v[r].clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() / lead.clone();
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..=n {
                    let d = f.clone() * m[row][j].clone();
                    m[r][j] = m[r][j].clone() - d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![S::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n].clone();
    }
    Some(x)
}

pub fn rank<S: Scalar>(cols: &[Vec<S>]) -> usize {
    // a column is new iff it is not in the span of the earlier ones
    let mut kept: Vec<Vec<S>> = Vec::new();
    for c in cols {
        if kept.is_empty() || solve(&kept, c).is_none() {
            if c.iter().any(|x| !x.is_zero()) {
                kept.push(c.clone());
            }
        }
    }
    kept.len()
}

fn generators_of<S: Scalar>(c: &Arc<Carrier<S>>, window: usize) -> Vec<TruncElement<S>> {
    let n = c.dim().unwrap_or(window);
    (0..n).map(|i| TruncElement::indicator(c, i)).collect()
}

impl<S: Scalar> Reflection<S> {
    pub fn new(carrier: &Arc<Carrier<S>>, bounds: Bounds) -> Result<Self, RepError> {
        let spectral = Spectral::new(carrier, bounds)?;
        let free = free_isolated(spectral.pointed())?;
        let frame = free.isolated.frame().clone();
        let atoms = frame.centre_atoms();
        let point_atom = atoms
            .iter()
            .position(|&a| free.isolated.at(a))
            .ok_or_else(|| RepError::Invalid("no point atom".into()))?;
        let coords: Vec<String> =
            atoms.iter().enumerate().filter(|(i, _)| *i != point_atom).map(|(_, &a)| frame.display(a)).collect();
        let mut r = Reflection {
            spectral,
            free,
            coords,
            point_atom,
            generators: Vec::new(),
            rank: 0,
            b0: Vec::new(),
            b0_in_hat: false,
        };
        r.generators = generators_of(carrier, bounds.window)
            .iter()
            .map(|g| r.model(g))
            .collect::<Result<Vec<_>, _>>()?;
        r.rank = rank(&r.generators);
        r.b0 = vec![S::one(); r.coords.len()];
        r.b0_in_hat = solve(&r.generators, &r.b0).is_some();
        Ok(r)
    }

    /// `ω_A(a)` as a real map on `2·K A`.
    pub fn omega(&self, a: &TruncElement<S>) -> Result<RealFrameMap<S>, RepError> {
        hat(&self.spectral, a)?.push_forward(&self.free.nu)
    }

    /// Tuple of `ω_A(a)` over the model coordinates.
    pub fn model(&self, a: &TruncElement<S>) -> Result<Vec<S>, RepError> {
        let f = self.omega(a)?;
        if !in_r0(&self.free.isolated, &f) {
            return Err(RepError::Invalid(format!("ω({a}) does not vanish at the point")));
        }
        let mut t = f.to_tuple();
        t.remove(self.point_atom);
        Ok(t)
    }

    /// `b₀` as a real map.
    pub fn b0_map(&self) -> Result<RealFrameMap<S>, RepError> {
        let mut t = self.b0.clone();
        t.insert(self.point_atom, S::zero());
        RealFrameMap::from_tuple(self.free.isolated.frame(), &t)
    }

    /// `v ∈ Â + ℤ·b₀`.
    pub fn contains(&self, v: &[S]) -> bool {
        if self.b0_in_hat {
            return solve(&self.generators, v).is_some();
        }
        let mut cols = self.generators.clone();
        cols.push(self.b0.clone());
        match solve(&cols, v) {
            Some(x) => x.last().map_or(false, |k| k.is_integral()),
            None => false,
        }
    }

    /// Truncation in `R₀(2·K A)`: meet with `b₀`.
    pub fn truncate(&self, v: &[S]) -> Vec<S> {
        v.iter().zip(&self.b0).map(|(x, b)| x.min_of(b)).collect()
    }

    fn model_of_generator(&self, i: usize) -> &[S] {
        &self.generators[i]
    }
}

/// `θ: A → ℚ^Y`, `θ(a)_y = u_y·a_x/u_x` for the assigned `x`, else 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMorphism<S> {
    pub assign: Vec<Option<usize>>,
    pub unit: Vec<S>,
}

impl<S: Scalar> CoordinateMorphism<S> {
    pub fn apply(&self, a: &TruncElement<S>) -> Vec<S> {
        let c = a.carrier();
        self.assign
            .iter()
            .zip(&self.unit)
            .map(|(x, u)| x.map_or(S::zero(), |x| u.clone() * a.at(x) / c.unit_at(x)))
            .collect()
    }
}

/// Unit-preserving lattice maps `ℚ^m → ℚ^Y`: each `y` reads one model
/// coordinate, scaled by `u_y` (the only scale with `θ̃(b₀) = u_Y`).
pub fn factorizations<S: Scalar>(r: &Reflection<S>, theta: &CoordinateMorphism<S>) -> Vec<Vec<usize>> {
    let m = r.coords.len();
    let ys = theta.assign.len();
    let n_gens = r.generators.len();
    let c = r.spectral.carrier();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<Vec<Vec<S>>> = Vec::new();
    for code in 0..m.pow(ys as u32) {
        let pick: Vec<usize> = (0..ys).map(|j| (code / m.pow(j as u32)) % m).collect();
        let lifted = |v: &[S]| -> Vec<S> { pick.iter().zip(&theta.unit).map(|(&k, u)| u.clone() * v[k].clone()).collect() };
        let ok = (0..n_gens).all(|i| lifted(r.model_of_generator(i)) == theta.apply(&TruncElement::indicator(c, i)));
        if ok {
            // restrictions to ωA are determined by the generators and b₀
            let mut restr: Vec<Vec<S>> = (0..n_gens).map(|i| lifted(r.model_of_generator(i))).collect();
            restr.push(lifted(&r.b0));
            if !seen.contains(&restr) {
                seen.push(restr);
                out.push(pick);
            }
        }
    }
    out
}

fn random_morphism<S: Scalar>(rng: &mut ChaCha8Rng, c: &Arc<Carrier<S>>, window: usize) -> CoordinateMorphism<S> {
    let ys = rng.gen_range(1..=3);
    let assign = (0..ys)
        .map(|_| match c.dim() {
            // unit preserving: every y reads a coordinate
            Some(n) => Some(rng.gen_range(0..n)),
            None => {
                let x = rng.gen_range(0..=window);
                (x < window).then_some(x)
            }
        })
        .collect();
    let unit = (0..ys).map(|_| random::positive::<S, _>(rng, 3)).collect();
    CoordinateMorphism { assign, unit }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

/// Every sampled `θ: A → ℚ^Y` (`|Y| ≤ 3`) factors through `ω_A` by exactly
/// one unit-preserving map.
pub fn factorization_property<S: Scalar>(r: &Reflection<S>, window: usize, seed: u64, n: usize) -> Property {
    let c = r.spectral.carrier().clone();
    run("reflection_factors_morphisms_uniquely", seed, n, |rng, _| {
        let theta = random_morphism(rng, &c, window);
        // θ is a trunc morphism: check truncation and meets on samples
        for _ in 0..4 {
            let a = sample_in_window(rng, &c, window);
            let b = sample_in_window(rng, &c, window);
            let p = a.abs();
            let trunc: Vec<S> = theta.apply(&p).iter().zip(&theta.unit).map(|(x, u)| x.min_of(u)).collect();
            ensure(theta.apply(&p.truncate().map_err(err)?) == trunc, || format!("{theta:?} breaks truncation"))?;
            let meet: Vec<S> = theta.apply(&a).iter().zip(theta.apply(&b)).map(|(x, y)| x.min_of(&y)).collect();
            ensure(theta.apply(&a.meet(&b).map_err(err)?) == meet, || format!("{theta:?} breaks meets"))?;
        }
        let found = factorizations(r, &theta);
        ensure(found.len() == 1, || format!("{} factorizations of {:?}", found.len(), theta.assign))?;
        // and the factorization agrees with θ on random elements
        let pick = &found[0];
        for _ in 0..4 {
            let a = sample_in_window(rng, &c, window);
            let v = r.model(&a).map_err(err)?;
            let lifted: Vec<S> = pick.iter().zip(&theta.unit).map(|(&k, u)| u.clone() * v[k].clone()).collect();
            ensure(lifted == theta.apply(&a), || format!("{:?} disagrees at {a}", theta.assign))?;
        }
        Ok(None)
    })
}

fn sample_in_window<S: Scalar>(rng: &mut ChaCha8Rng, c: &Arc<Carrier<S>>, window: usize) -> TruncElement<S> {
    let a = random::element(rng, c, false);
    match c.dim() {
        Some(_) => a,
        None => a.map(|i, v| if i < window { v.clone() } else { S::zero() }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReflectReport {
    pub carrier: String,
    pub coordinates: Vec<String>,
    pub rank_of_image: usize,
    pub b0: Vec<String>,
    /// `b₀ ∉ Â`: the reflection adjoins a top.
    pub b0_adjoined: bool,
    pub isomorphism: bool,
    /// `ωA` is closed under the operations and truncation on samples.
    pub closed: bool,
    /// `b₀` is the greatest truncated element on samples.
    pub unital: bool,
    pub factorization: Property,
}

pub fn w_reflect<S: Scalar>(carrier: &Arc<Carrier<S>>, bounds: Bounds, seed: u64, samples: usize) -> Result<ReflectReport, RepError> {
    let r = Reflection::new(carrier, bounds)?;
    let window = bounds.window;
    let b0 = r.b0_map()?;
    let closed_unital = run("reflection_is_a_unital_subtrunc", seed, samples.max(1), |rng, _| {
        let mut elems = Vec::new();
        for _ in 0..3 {
            let a = sample_in_window(rng, carrier, window);
            let k = S::from_u64(rng.gen_range(0..3)) - S::one();
            let v: Vec<S> = r.model(&a).map_err(err)?.iter().zip(&r.b0).map(|(x, b)| x.clone() + k.clone() * b.clone()).collect();
            ensure(r.contains(&v), || format!("{a} + {k}·b0 not recognized"))?;
            elems.push(v);
        }
        for x in &elems {
            for y in &elems {
                let ops: [Vec<S>; 3] = [
                    x.iter().zip(y).map(|(a, b)| a.min_of(b)).collect(),
                    x.iter().zip(y).map(|(a, b)| a.max_of(b)).collect(),
                    x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect(),
                ];
                ensure(ops.iter().all(|v| r.contains(v)), || "not closed".into())?;
            }
            let t = r.truncate(&x.iter().map(|a| a.pos()).collect::<Vec<_>>());
            ensure(r.contains(&t) && t.iter().zip(&r.b0).all(|(a, b)| a <= b), || "truncation escapes b0".into())?;
        }
        Ok(None)
    });
    let omega_b0 = RealFrameMap::from_tuple(b0.target(), &b0.to_tuple())?;
    let b0_ok = in_r0(&r.free.isolated, &omega_b0) && b0.truncate_at_one() == b0;
    let factorization = factorization_property(&r, window, seed, samples);
    Ok(ReflectReport {
        carrier: carrier.name(),
        coordinates: r.coords.clone(),
        rank_of_image: r.rank,
        b0: r.b0.iter().map(|x| x.to_string()).collect(),
        b0_adjoined: !r.b0_in_hat,
        isomorphism: r.b0_in_hat && r.rank == r.coords.len(),
        closed: closed_unital.passed,
        unital: closed_unital.passed && b0_ok,
        factorization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn solver() {
        let cols = vec![vec![q(1, 1), q(0, 1), q(1, 1)], vec![q(0, 1), q(2, 1), q(2, 1)]];
        assert_eq!(solve(&cols, &[q(3, 1), q(4, 1), q(7, 1)]), Some(vec![q(3, 1), q(2, 1)]));
        assert_eq!(solve(&cols, &[q(1, 1), q(1, 1), q(1, 1)]), None);
        assert_eq!(rank(&[cols[0].clone(), cols[1].clone(), vec![q(2, 1), q(2, 1), q(4, 1)]]), 2);
    }

    #[test]
    fn fin_vec_is_fixed() {
        let c = Carrier::<Q>::fin_vec(vec![q(1, 2), q(3, 1)]).unwrap();
        let r = w_reflect(&c, Bounds::default(), 4, 20).unwrap();
        assert!(r.isomorphism && !r.b0_adjoined && r.unital, "{r:?}");
        assert!(r.factorization.passed, "{r:?}");
    }

    #[test]
    fn sequences_get_a_top() {
        let c = Carrier::<Q>::ev_seq();
        let r = w_reflect(&c, Bounds { max_dim: 10, window: 4 }, 4, 20).unwrap();
        assert_eq!(r.coordinates.len(), 5);
        assert_eq!(r.rank_of_image, 4);
        assert!(r.b0_adjoined && !r.isomorphism && r.closed && r.unital, "{r:?}");
        assert!(r.factorization.passed, "{r:?}");
        let refl = Reflection::new(&c, Bounds { max_dim: 10, window: 4 }).unwrap();
        // half of b0 is not reached: only integer multiples are adjoined
        let half: Vec<Q> = refl.b0.iter().map(|x| x / q(2, 1)).collect();
        assert!(!refl.contains(&half));
        assert!(refl.contains(&refl.b0));
    }

    #[test]
    fn zero_morphism_has_no_unital_factorization() {
        let c = Carrier::<Q>::standard(2).unwrap();
        let r = Reflection::new(&c, Bounds::default()).unwrap();
        let theta = CoordinateMorphism { assign: vec![None], unit: vec![q(1, 1)] };
        assert!(factorizations(&r, &theta).is_empty());
    }
}
