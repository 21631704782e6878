//! Seeded property runs with deterministic reports.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Outcome of one property over a batch of seeded instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Property {
    pub key: String,
    pub instances: usize,
    pub passed: bool,
    /// First counterexample, by instance index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Largest finite parameter a join needed before it stabilized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilized_by: Option<u64>,
}

impl Property {
    pub fn single(key: &str, outcome: Result<Option<u64>, String>) -> Self {
        Property {
            key: key.to_string(),
            instances: 1,
            passed: outcome.is_ok(),
            stabilized_by: outcome.as_ref().ok().copied().flatten(),
            witness: outcome.err(),
        }
    }
}

fn fnv(key: &str) -> u64 {
    key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Independent generator for instance `idx` of property `key`.
pub fn instance_rng(seed: u64, key: &str, idx: usize) -> ChaCha8Rng {
    let mut s = seed ^ fnv(key);
    s = s.wrapping_add((idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    ChaCha8Rng::seed_from_u64(s)
}

/// Runs `f` on `instances` seeded instances in parallel. `f` returns an
/// optional stabilization index on success and a witness on failure.
pub fn run<F>(key: &str, seed: u64, instances: usize, f: F) -> Property
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Option<u64>, String> + Sync,
{
    let results: Vec<Result<Option<u64>, String>> = (0..instances)
        .into_par_iter()
        .map(|i| f(&mut instance_rng(seed, key, i), i))
        .collect();
    let witness = results.iter().find_map(|r| r.as_ref().err().cloned());
    let stabilized_by = results.iter().filter_map(|r| r.as_ref().ok().copied().flatten()).max();
    Property { key: key.to_string(), instances, passed: witness.is_none(), witness, stabilized_by }
}

/// `Err(witness)` unless `cond`.
pub fn ensure(cond: bool, witness: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn runs_are_deterministic_and_report_the_first_failure() {
        let f = |rng: &mut ChaCha8Rng, i: usize| {
            let x: u32 = rng.gen_range(0..100);
            if i % 7 == 3 {
                Err(format!("i={i} x={x}"))
            } else {
                Ok(Some(x as u64))
            }
        };
        let a = run("demo", 5, 40, f);
        let b = run("demo", 5, 40, f);
        assert_eq!(a, b);
        assert!(a.witness.unwrap().starts_with("i=3 "));
    }
}
