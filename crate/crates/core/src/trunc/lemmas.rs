//! Seeded property checks for the kernel calculus, plus the brute-force
//! oracle for the support representation of kernels.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::kernel::{self, bright, closure, dark, dark_with_trace, in_k0, in_k1, polar, principal};
use super::{random, Carrier, Kernel, Support, TruncElement};
use crate::check::{ensure, run, Property};
use crate::scalar::Scalar;

/// Coordinates used for random `EvSeq` supports.
const SEQ_WINDOW: usize = 7;

/// Even instances use `FinVec` (`|X| ≤ 4`), odd ones `EvSeq`.
pub fn carrier_for<S: Scalar>(rng: &mut ChaCha8Rng, idx: usize) -> Arc<Carrier<S>> {
    if idx % 2 == 0 {
        random::fin_vec(rng, 4)
    } else {
        Carrier::ev_seq()
    }
}

fn random_kernel<S: Scalar>(rng: &mut ChaCha8Rng, c: &Arc<Carrier<S>>) -> Kernel<S> {
    match c.dim() {
        Some(n) => Kernel::from_support(c, Support::finite((0..n).filter(|_| rng.gen_bool(0.5)))),
        None => {
            let set: Vec<usize> = (0..SEQ_WINDOW).filter(|_| rng.gen_bool(0.5)).collect();
            if rng.gen_bool(0.5) {
                Kernel::from_support(c, Support::finite(set))
            } else {
                Kernel::from_support(c, Support::cofinite(set))
            }
        }
    }
}

fn rational_param<S: Scalar>(rng: &mut ChaCha8Rng, bound: i64) -> S {
    random::rational(rng, bound, true)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

/// Membership via scaled truncations: `b ∈ K ⇔ n·(b/n)‾ ∈ K` for some `n`,
/// for all `n`.
pub fn membership_by_scaled_truncations<S: Scalar>(seed: u64, n: usize) -> Property {
    run("kernel_membership_by_scaled_truncations", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let k = random_kernel(rng, &c);
        let b = random::nonneg(rng, &c);
        let direct = k.contains(&b);
        for m in 1..=6u64 {
            let m = S::from_u64(m);
            let t = b.scale(&(S::one() / m.clone())).truncate().map_err(err)?.scale(&m);
            ensure(k.contains(&t) == direct, || format!("b={b}, K={}, n={m}", k.support()))?;
        }
        Ok(None)
    })
}

/// Closures of convex ℓ-subgroups commute with intersection; the
/// non-convex pair `ℚ(1,1)`, `ℚ(1,2)` in `ℚ²` shows the hypothesis matters.
pub fn closure_meets_convex<S: Scalar>(seed: u64, n: usize) -> Property {
    run("closure_commutes_with_meets_of_convex_subgroups", seed, n, |rng, idx| {
        if idx == 0 {
            let c = Carrier::<S>::standard(2).map_err(err)?;
            let a1 = TruncElement::tuple(&c, vec![S::one(), S::one()]).map_err(err)?;
            let a2 = TruncElement::tuple(&c, vec![S::one(), S::from_u64(2)]).map_err(err)?;
            // The two lines meet only in 0, yet each generates everything.
            let meet = principal(&a1).map_err(err)?.meet(&principal(&a2).map_err(err)?);
            ensure(meet.is_whole() && closure(&c, &[]).map_err(err)?.is_zero(), || {
                "non-convex counterexample did not separate".into()
            })?;
        }
        let c = carrier_for::<S>(rng, idx);
        let width = c.dim().unwrap_or(SEQ_WINDOW);
        let s1: BTreeSet<usize> = (0..width).filter(|_| rng.gen_bool(0.5)).collect();
        let s2: BTreeSet<usize> = (0..width).filter(|_| rng.gen_bool(0.5)).collect();
        let gens = |s: &BTreeSet<usize>, rng: &mut ChaCha8Rng| -> Vec<TruncElement<S>> {
            s.iter()
                .map(|&i| TruncElement::indicator(&c, i).scale(&random::positive::<S, _>(rng, 3)))
                .collect()
        };
        let g1 = gens(&s1, rng);
        let g2 = gens(&s2, rng);
        let g12 = gens(&(&s1 & &s2), rng);
        let lhs = closure(&c, &g1).map_err(err)?.meet(&closure(&c, &g2).map_err(err)?);
        let rhs = closure(&c, &g12).map_err(err)?;
        ensure(lhs == rhs, || format!("S1={s1:?}, S2={s2:?}"))?;
        Ok(None)
    })
}

/// `[na⊖1 : n] = [a⊖1/n : n] = [a⊖0] = [a]`; reports the `n` at which the
/// first join stabilizes.
pub fn diminished_multiples_generate<S: Scalar>(seed: u64, n: usize) -> Property {
    run("multiples_diminished_by_one_generate_principal_kernel", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::nonneg(rng, &c);
        let target = principal(&a).map_err(err)?;
        ensure(bright(&a, &S::zero()).map_err(err)? == target, || format!("[a⊖0] != [a] for a={a}"))?;
        let bound = if a.is_zero() { 1 } else { (S::one() / min_positive_ratio(&a)).ceil_u64() + 1 };
        let mut acc = Kernel::zero(&c);
        let mut acc2 = Kernel::zero(&c);
        for m in 1..=bound {
            let ms = S::from_u64(m);
            acc = acc.join(&bright(&a.scale(&ms), &S::one()).map_err(err)?);
            acc2 = acc2.join(&bright(&a, &(S::one() / ms)).map_err(err)?);
            ensure(acc.leq(&target), || format!("a={a}: join exceeds [a]"))?;
            if acc == target {
                ensure(acc2 == target, || format!("a={a}: [a⊖1/n] differs at n={m}"))?;
                return Ok(Some(m));
            }
        }
        Err(format!("a={a}: no stabilization by n={bound}"))
    })
}

fn min_positive_ratio<S: Scalar>(a: &TruncElement<S>) -> S {
    (0..a.explicit_len())
        .map(|i| a.at(i) / a.carrier().unit_at(i))
        .filter(|v| v.is_positive())
        .min()
        .unwrap_or_else(S::one)
}

/// `⋁_{s>r} [a⊖s] = [a⊖(r+1/n) : n] = [a⊖r]`, with the stabilizing `n`.
pub fn upper_diminution_join<S: Scalar>(seed: u64, n: usize) -> Property {
    run("joins_of_diminutions_from_above", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::nonneg(rng, &c);
        let r: S = rational_param(rng, 3);
        let target = bright(&a, &r).map_err(err)?;
        let gap = (0..a.explicit_len())
            .map(|i| a.at(i) / c.unit_at(i) - r.clone())
            .filter(|g| g.is_positive())
            .min()
            .unwrap_or_else(S::one);
        let bound = (S::one() / gap).ceil_u64() + 1;
        let mut acc = Kernel::zero(&c);
        for m in 1..=bound {
            let s = r.clone() + S::one() / S::from_u64(m);
            acc = acc.join(&bright(&a, &s).map_err(err)?);
            ensure(acc.leq(&target), || format!("a={a}, r={r}: join exceeds [a⊖r]"))?;
            if acc == target {
                return Ok(Some(m));
            }
        }
        Err(format!("a={a}, r={r}: no stabilization by n={bound}"))
    })
}

/// Meets are intersections, joins are closures of unions, pseudocomplements
/// are polars, and principal kernels turn `∧`/`∨` into `∩`/`∨`.
pub fn frame_operations<S: Scalar>(seed: u64, n: usize) -> Property {
    run("kernel_frame_operations", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a1 = random::nonneg(rng, &c);
        let a2 = random::nonneg(rng, &c);
        let k1 = principal(&a1).map_err(err)?;
        let k2 = principal(&a2).map_err(err)?;
        let w = |msg: &str| format!("{msg}: a1={a1}, a2={a2}");
        // meet: the intersection is itself closed
        let inter = k1.meet(&k2);
        let probe = a1.explicit_len().max(a2.explicit_len()) + 1;
        let re = closure(&c, &inter.generators_below(probe)).map_err(err)?;
        ensure(re == inter, || w("intersection not closed"))?;
        // join: closure of the union of generators
        let u = closure(&c, &[k1.generators_below(probe), k2.generators_below(probe)].concat()).map_err(err)?;
        ensure(k1.join(&k2) == u, || w("join is not the closure of the union"))?;
        // pseudocomplement: polar, and the largest kernel disjoint from K
        let pc = k1.pseudocomplement();
        ensure(pc == polar(&c, std::slice::from_ref(&a1)).map_err(err)?, || w("K* != K^⊥"))?;
        let other = random_kernel(rng, &c);
        ensure(!other.meet(&k1).is_zero() || other.leq(&pc), || w("disjoint kernel escapes K*"))?;
        ensure(k1.meet(&k2) == principal(&a1.meet(&a2).map_err(err)?).map_err(err)?, || w("[a1]∩[a2]"))?;
        ensure(k1.join(&k2) == principal(&a1.join(&a2).map_err(err)?).map_err(err)?, || w("[a1]∨[a2]"))?;
        Ok(None)
    })
}

/// `[a⊖r] ≺ [a⊖s]` for `s < r`.
pub fn bright_rather_below<S: Scalar>(seed: u64, n: usize) -> Property {
    run("higher_diminution_rather_below_lower", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::nonneg(rng, &c);
        let s: S = rational_param(rng, 3);
        let r = s.clone() + random::positive::<S, _>(rng, 2);
        let hi = bright(&a, &r).map_err(err)?;
        let lo = bright(&a, &s).map_err(err)?;
        ensure(hi.rather_below(&lo), || format!("a={a}, s={s}, r={r}"))?;
        Ok(None)
    })
}

/// The five exchange and separation clauses for `▶` and `◀` on truncated
/// elements.
pub fn bright_dark_clauses<S: Scalar>(seed: u64, n: usize) -> Property {
    run("bright_dark_exchange_laws", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a1 = random::truncated(rng, &c);
        let a2 = random::truncated(rng, &c);
        let s: S = rational_param(rng, 1);
        let r = if rng.gen_bool(0.2) { s.clone() } else { s.clone() + random::positive::<S, _>(rng, 1) };
        let w = |clause: u8| format!("clause ({clause}): a1={a1}, a2={a2}, s={s}, r={r}");
        let (join, meet) = (a1.join(&a2).map_err(err)?, a1.meet(&a2).map_err(err)?);
        let b = |a: &TruncElement<S>, t: &S| bright(a, t).map_err(err);
        let d = |a: &TruncElement<S>, t: &S| dark(a, t).map_err(err);
        ensure(b(&a1, &r)?.join(&b(&a2, &r)?) == b(&join, &r)?, || w(1))?;
        ensure(b(&a1, &r)?.meet(&b(&a2, &r)?) == b(&meet, &r)?, || w(1))?;
        ensure(d(&a1, &r)?.join(&d(&a2, &r)?) == d(&meet, &r)?, || w(2))?;
        ensure(d(&a1, &r)?.meet(&d(&a2, &r)?) == d(&join, &r)?, || w(2))?;
        ensure(d(&a1, &s)?.meet(&b(&a1, &r)?).is_zero(), || w(4))?;
        if s < r {
            let (br, bs) = (b(&a1, &r)?, b(&a1, &s)?);
            ensure(br.rather_below(&bs), || w(3))?;
            ensure(bs.pseudocomplement().rather_below(&br.pseudocomplement()), || w(3))?;
            ensure(d(&a1, &r)?.join(&bs).is_whole(), || w(4))?;
            let (ds, dr) = (d(&a1, &s)?, d(&a1, &r)?);
            ensure(ds.rather_below(&dr), || w(5))?;
            ensure(dr.pseudocomplement().rather_below(&ds.pseudocomplement()), || w(5))?;
        }
        Ok(None)
    })
}

/// `a, b, a+b` truncated implies `b ∈ a◀1`.
pub fn sum_truncated_in_dark<S: Scalar>(seed: u64, n: usize) -> Property {
    run("truncated_sum_puts_summand_in_dark", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::truncated(rng, &c);
        let room = TruncElement::unit(&c).sub(&a).map_err(err)?;
        let b = random::truncated(rng, &c).meet(&room).map_err(err)?;
        let sum = a.add(&b).map_err(err)?;
        ensure(sum.is_truncated() && b.is_truncated(), || format!("generator broke: a={a}, b={b}"))?;
        ensure(dark(&a, &S::one()).map_err(err)?.contains(&b), || format!("a={a}, b={b}"))?;
        Ok(None)
    })
}

/// `b▶0 ∨ a◀1 = (a−b)⁺◀1`.
pub fn dark_of_difference<S: Scalar>(seed: u64, n: usize) -> Property {
    run("dark_of_positive_difference", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::truncated(rng, &c);
        let b = random::truncated(rng, &c);
        let lhs = bright(&b, &S::zero()).map_err(err)?.join(&dark(&a, &S::one()).map_err(err)?);
        let rhs = dark(&a.sub(&b).map_err(err)?.pos_part(), &S::one()).map_err(err)?;
        ensure(lhs == rhs, || format!("a={a}, b={b}"))?;
        Ok(None)
    })
}

/// `[ā⊖r] = [a⊖r]` for `0 ≤ r < 1`.
pub fn truncated_diminution<S: Scalar>(seed: u64, n: usize) -> Property {
    run("truncation_preserves_diminution_kernels_below_one", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::nonneg(rng, &c);
        let d = rng.gen_range(1..=random::MAX_DENOM);
        let r = S::ratio(rng.gen_range(0..d), d);
        let lhs = bright(&a.truncate().map_err(err)?, &r).map_err(err)?;
        ensure(lhs == bright(&a, &r).map_err(err)?, || format!("a={a}, r={r}"))?;
        Ok(None)
    })
}

/// `a ∈ ¹K, b ∈ ⁰K ⇒ (a−b)⁺ ∈ ¹K`, plus `⁰K = Ā ∩ K` and `⁰K ∩ ¹K = ∅`
/// for proper `K`.
pub fn k1_minus_k0<S: Scalar>(seed: u64, n: usize) -> Property {
    run("one_part_minus_zero_part_stays_in_one_part", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::truncated(rng, &c);
        let k = random_kernel(rng, &c).join(&dark(&a, &S::one()).map_err(err)?);
        let b = random::truncated(rng, &c).map(|i, x| if k.support().contains(i) { x.clone() } else { S::zero() });
        let w = || format!("K={}, a={a}, b={b}", k.support());
        ensure(in_k1(&k, &a).map_err(err)?, w)?;
        ensure(in_k0(&k, &b).map_err(err)? == k.contains(&b), w)?;
        ensure(in_k0(&k, &b).map_err(err)?, w)?;
        let diff = a.sub(&b).map_err(err)?.pos_part();
        ensure(in_k1(&k, &diff).map_err(err)?, w)?;
        if !k.is_whole() {
            ensure(!(in_k0(&k, &a).map_err(err)? && in_k1(&k, &a).map_err(err)?), w)?;
        }
        Ok(None)
    })
}

/// `a^⊥⊥ = ā^⊥⊥` and `[a]* = a^⊥`.
pub fn polar_identities<S: Scalar>(seed: u64, n: usize) -> Property {
    run("double_polar_ignores_truncation", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::nonneg(rng, &c);
        let p = polar(&c, std::slice::from_ref(&a)).map_err(err)?;
        let pt = polar(&c, &[a.truncate().map_err(err)?]).map_err(err)?;
        ensure(p.pseudocomplement() == pt.pseudocomplement(), || format!("a={a}"))?;
        ensure(principal(&a).map_err(err)?.pseudocomplement() == p, || format!("a={a}"))?;
        Ok(None)
    })
}

/// The dark family always stabilizes.
pub fn dark_stabilizes<S: Scalar>(seed: u64, n: usize) -> Property {
    run("dark_join_stabilizes", seed, n, |rng, idx| {
        let c = carrier_for::<S>(rng, idx);
        let a = random::truncated(rng, &c);
        let r: S = random::positive(rng, 2);
        let (k, st) = dark_with_trace(&a, &r).map_err(err)?;
        ensure(st.stable, || format!("a={a}, r={r}"))?;
        ensure(*k.support() == kernel::closed_form::dark(&a, &r), || format!("closed form: a={a}, r={r}"))?;
        Ok(Some(st.family.len() as u64))
    })
}

/// Every property above, each on `n` instances.
pub fn all<S: Scalar>(seed: u64, n: usize) -> Vec<Property> {
    vec![
        membership_by_scaled_truncations::<S>(seed, n),
        closure_meets_convex::<S>(seed, n),
        diminished_multiples_generate::<S>(seed, n),
        upper_diminution_join::<S>(seed, n),
        frame_operations::<S>(seed, n),
        bright_rather_below::<S>(seed, n),
        bright_dark_clauses::<S>(seed, n),
        sum_truncated_in_dark::<S>(seed, n),
        dark_of_difference::<S>(seed, n),
        truncated_diminution::<S>(seed, n),
        k1_minus_k0::<S>(seed, n),
        polar_identities::<S>(seed, n),
        dark_stabilizes::<S>(seed, n),
    ]
}

/// Brute-force check, for `|X| ≤ max_dim`, that the sets closed under the
/// ladder steps are exactly the `2^|X|` support kernels. On a rational grid
/// each `K_S` is shown to be a convex ℓ-subgroup, closed under both steps
/// (each excluded element gets a refutation), and every grid element
/// generates the support kernel of its support.
pub fn support_representation_oracle<S: Scalar>(max_dim: usize) -> Property {
    let outcome = (|| -> Result<Option<u64>, String> {
        let vals: Vec<S> = [(-1, 1), (-1, 2), (0, 1), (1, 3), (2, 1)].iter().map(|&(p, q)| S::ratio(p, q)).collect();
        let mut checked = 0u64;
        for n in 1..=max_dim {
            for unit in [vec![S::one(); n], (0..n).map(|i| S::ratio(i as i64 + 1, 2)).collect()] {
                let c = Carrier::fin_vec(unit).map_err(err)?;
                let grid: Vec<TruncElement<S>> = (0..vals.len().pow(n as u32))
                    .map(|mut code| {
                        let v = (0..n)
                            .map(|_| {
                                let x = vals[code % vals.len()].clone();
                                code /= vals.len();
                                x
                            })
                            .collect();
                        TruncElement::tuple(&c, v).expect("shape")
                    })
                    .collect();
                let nonneg: Vec<&TruncElement<S>> = grid.iter().filter(|g| g.is_nonneg()).collect();
                for mask in 0u32..(1 << n) {
                    let k = Kernel::from_support(&c, Support::finite((0..n).filter(|i| mask & (1 << i) != 0)));
                    let members: Vec<&TruncElement<S>> = grid.iter().filter(|g| k.contains(g)).collect();
                    let w = |what: &str, x: &TruncElement<S>| format!("|X|={n}, S={}, {what}: {x}", k.support());
                    for a in &members {
                        for b in &members {
                            ensure(k.contains(&a.sub(b).unwrap()) && k.contains(&a.meet(b).unwrap()), || {
                                w("not an l-subgroup at", a)
                            })?;
                        }
                        for b in &grid {
                            if b.abs().leq(&a.abs()).unwrap() {
                                ensure(k.contains(b), || w("not convex at", b))?;
                            }
                        }
                    }
                    for a in &grid {
                        if !k.contains(a) {
                            for cc in &nonneg {
                                let m = kernel::archimedean_refutation(a, &k, cc)
                                    .ok_or_else(|| w("archimedean step adds", a))?;
                                let probe = a.abs().scale(&S::from_u64(m)).sub(cc).unwrap().pos_part();
                                ensure(!k.contains(&probe), || w("bad refutation for", a))?;
                                checked += 1;
                            }
                        }
                        if a.is_nonneg() && k.contains(&a.truncate().unwrap()) {
                            ensure(k.contains(a), || w("absorbing step adds", a))?;
                        }
                    }
                    let gens = k.generators_below(n);
                    let (kk, trace) = kernel::kernel_closure(&c, &gens).map_err(err)?;
                    ensure(kk == k && trace.rounds <= 3, || format!("|X|={n}, S={}: closure differs", k.support()))?;
                }
                for g in &grid {
                    let k = principal(g).map_err(err)?;
                    ensure(*k.support() == g.support(), || format!("[{g}] is not its support kernel"))?;
                }
            }
        }
        Ok(Some(checked))
    })();
    let mut p = Property::single("support_kernels_are_exactly_the_ladder_closed_sets", outcome);
    p.instances = (1..=max_dim).map(|n| 2usize << n).sum();
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;
    use num_rational::Ratio;

    #[test]
    fn lemma_properties_hold() {
        for p in all::<Q>(11, 40) {
            assert!(p.passed, "{p:?}");
        }
    }

    #[test]
    fn oracle_small() {
        let p = support_representation_oracle::<Ratio<i64>>(2);
        assert!(p.passed, "{p:?}");
    }
}
