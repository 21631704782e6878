//! Sample-based checks of the four truncation axioms T1–T4.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::polar;
use super::{random, Carrier, TruncElement};
use crate::scalar::Scalar;

/// Deliberately broken truncations for testing the checker.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// `ā := 0`
    Zero,
    /// `ā := a`
    Identity,
}

impl Mutation {
    pub fn truncate<S: Scalar>(self, a: &TruncElement<S>) -> TruncElement<S> {
        match self {
            Mutation::None => a.truncate().expect("nonnegative sample"),
            Mutation::Zero => TruncElement::zero(a.carrier()),
            Mutation::Identity => a.clone(),
        }
    }

    /// `a ⊖ r` under this truncation.
    pub fn diminish<S: Scalar>(self, a: &TruncElement<S>, r: &S) -> TruncElement<S> {
        if r.is_zero() {
            return a.clone();
        }
        let inner = self.truncate(&a.scale(&(S::one() / r.clone())));
        a.sub(&inner.scale(r)).expect("same carrier")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: String,
    pub checked: usize,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub mutation: Mutation,
    pub instances: usize,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, axiom: &str) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|o| o.axiom == axiom)
    }
}

/// First failure per axiom over `samples` (all nonnegative, same carrier).
/// T1 runs over consecutive pairs, including each sample with itself.
pub fn check_samples<S: Scalar>(samples: &[TruncElement<S>], m: Mutation) -> [Option<String>; 4] {
    let mut out: [Option<String>; 4] = Default::default();
    for (i, a) in samples.iter().enumerate() {
        let ta = m.truncate(a);
        if out[0].is_none() {
            for b in [a, &samples[(i + 1) % samples.len()]] {
                let lhs = a.meet(&m.truncate(b)).expect("same carrier");
                if !(lhs.leq(&ta).unwrap() && ta.leq(a).unwrap()) {
                    out[0] = Some(format!("a={a}, b={b}"));
                }
            }
        }
        if out[1].is_none() && ta.is_zero() && !a.is_zero() {
            out[1] = Some(format!("a={a}"));
        }
        if out[2].is_none() && t3_fails(a, m) {
            out[2] = Some(format!("a={a}"));
        }
        if out[3].is_none() && !t4_holds(a, m) {
            out[3] = Some(format!("a={a}"));
        }
    }
    out
}

/// `na` equals its truncation for every `n ≤ N`, yet `a ≠ 0`. With
/// `N = ⌈1/max(a/u)⌉ + 1` some coordinate of `Na` exceeds the bound, so the
/// finite range decides the axiom exactly.
fn t3_fails<S: Scalar>(a: &TruncElement<S>, m: Mutation) -> bool {
    if a.is_zero() {
        return false;
    }
    let big = (S::one() / a.max_ratio()).ceil_u64() + 1;
    (1..=big).all(|n| {
        let na = a.scale(&S::from_u64(n));
        m.truncate(&na) == na
    })
}

/// `⋂_n (a⊖n)^⊥⊥ = 0`, over `n ≤ ⌈max(a/u)⌉ + 1`; past that bound `a⊖n`
/// is already 0 for the genuine truncation.
fn t4_holds<S: Scalar>(a: &TruncElement<S>, m: Mutation) -> bool {
    let carrier = a.carrier();
    let bound = a.max_ratio().ceil_u64() + 1;
    let mut acc: Option<super::Kernel<S>> = None;
    for n in 0..=bound {
        let d = m.diminish(a, &S::from_u64(n));
        let pp = polar(carrier, &[d]).expect("trunc element").pseudocomplement();
        acc = Some(match acc {
            None => pp,
            Some(k) => k.meet(&pp),
        });
    }
    acc.map_or(true, |k| k.is_zero())
}

pub const AXIOMS: [&str; 4] = ["T1", "T2", "T3", "T4"];

/// Checks the axioms on one carrier with explicit samples.
pub fn check_carrier<S: Scalar>(samples: &[TruncElement<S>], m: Mutation) -> AxiomReport {
    let fails = check_samples(samples, m);
    AxiomReport {
        mutation: m,
        instances: 1,
        outcomes: AXIOMS
            .iter()
            .zip(fails)
            .map(|(name, w)| AxiomOutcome {
                axiom: name.to_string(),
                checked: samples.len(),
                passed: w.is_none(),
                witness: w,
            })
            .collect(),
    }
}

/// Seeded run: `fin` random `FinVec` instances (`|X| ≤ max_dim`) and `seq`
/// `EvSeq` instances, each a carrier with a handful of samples. Every
/// instance's first sample is the unit (`FinVec`) or the first indicator
/// (`EvSeq`).
pub fn axiom_suite<S: Scalar>(seed: u64, fin: usize, seq: usize, max_dim: usize, m: Mutation) -> AxiomReport {
    let per_instance = 4;
    let run = |idx: usize| -> [Option<String>; 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let carrier: Arc<Carrier<S>> =
            if idx < fin { random::fin_vec(&mut rng, max_dim) } else { Carrier::ev_seq() };
        let mut samples = vec![match carrier.dim() {
            Some(_) => TruncElement::unit(&carrier),
            None => TruncElement::indicator(&carrier, 0),
        }];
        samples.extend((0..per_instance).map(|_| random::nonneg(&mut rng, &carrier)));
        check_samples(&samples, m)
    };
    let results: Vec<[Option<String>; 4]> = (0..fin + seq).into_par_iter().map(run).collect();
    let outcomes = AXIOMS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let witness = results.iter().find_map(|r| r[k].clone());
            AxiomOutcome {
                axiom: name.to_string(),
                checked: (fin + seq) * (per_instance + 1),
                passed: witness.is_none(),
                witness,
            }
        })
        .collect();
    AxiomReport { mutation: m, instances: fin + seq, outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn genuine_truncation_passes() {
        let r = axiom_suite::<Q>(1, 60, 30, 4, Mutation::None);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn zero_mutation_breaks_t2_at_the_unit() {
        let c = Carrier::<Q>::fin_vec(vec![Q::ratio(1, 2), Q::ratio(3, 1)]).unwrap();
        let r = check_carrier(&[TruncElement::unit(&c)], Mutation::Zero);
        let t2 = r.outcome("T2").unwrap();
        assert!(!t2.passed);
        assert_eq!(t2.witness.as_deref(), Some("a=(1/2, 3)"));
    }

    #[test]
    fn identity_mutation_breaks_t3() {
        let r = axiom_suite::<Q>(3, 10, 10, 3, Mutation::Identity);
        let t3 = r.outcome("T3").unwrap();
        assert!(!t3.passed && t3.witness.is_some());
        assert!(r.outcome("T1").unwrap().passed);
        assert!(r.outcome("T2").unwrap().passed);
    }

    #[test]
    fn t3_bound_handles_small_ratios() {
        let c = Carrier::<Q>::standard(1).unwrap();
        let a = TruncElement::tuple(&c, vec![Q::ratio(1, 100)]).unwrap();
        assert!(!t3_fails(&a, Mutation::None));
        assert!(t3_fails(&a, Mutation::Identity));
    }
}
