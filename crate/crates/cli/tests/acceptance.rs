//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use trunclab::check::Property;
use trunclab::kernel_frame::{classify_unital, kernel_frame, Bounds};
use trunclab::pointed::equivalence_check;
use trunclab::represent::induced::{coz_con_suite, nonfunctorial_demo};
use trunclab::represent::reflect::w_reflect;
use trunclab::represent::underline::verify_kappa;
use trunclab::trunc::axioms::{axiom_suite, Mutation};
use trunclab::trunc::{lemmas, random, Carrier};
use trunclab::Q;

const SEED: u64 = 2024;

type Outcome = Result<String, String>;

fn all_pass(props: &[Property], min: usize) -> Outcome {
    for p in props {
        if !p.passed {
            return Err(format!("{} failed: {}", p.key, p.witness.clone().unwrap_or_default()));
        }
        if p.instances < min {
            return Err(format!("{} ran {} instances, need {min}", p.key, p.instances));
        }
    }
    Ok(format!("{} properties", props.len()))
}

fn c1_axioms() -> Outcome {
    let r = axiom_suite::<Q>(SEED, 1000, 500, 4, Mutation::None);
    if !r.passed() || r.instances != 1500 {
        return Err(format!("{r:?}"));
    }
    for m in [Mutation::Zero, Mutation::Identity] {
        let bad = axiom_suite::<Q>(SEED, 1000, 500, 4, m);
        let failing: Vec<_> = bad.outcomes.iter().filter(|o| !o.passed).collect();
        if failing.is_empty() || failing.iter().any(|o| o.witness.is_none()) {
            return Err(format!("mutation {m:?} not caught: {bad:?}"));
        }
        for o in failing {
            println!("    {m:?}: {} fails, witness {}", o.axiom, o.witness.as_deref().unwrap_or(""));
        }
    }
    Ok("T1-T4 on 1000 + 500 instances, both mutations caught".into())
}

fn c2_oracle() -> Outcome {
    let p = lemmas::support_representation_oracle::<Q>(3);
    all_pass(&[p], 1).map(|_| "ladder-closed subsets are exactly the support kernels, |X| <= 3".into())
}

fn c3_lemmas() -> Outcome {
    let props = lemmas::all::<Q>(SEED, 200);
    all_pass(&props, 200)?;
    let t3 = props
        .iter()
        .find(|p| p.key == "multiples_diminished_by_one_generate_principal_kernel")
        .ok_or("missing stabilization property")?;
    let n = t3.stabilized_by.ok_or("stabilizing n not recorded")?;
    Ok(format!("{} lemma properties x 200, stabilizing n up to {n}", props.len()))
}

fn c4_kappa() -> Outcome {
    // pairs alternate finite and sequence carriers
    let props = verify_kappa::<Q>(SEED, 2000).map_err(|e| e.to_string())?;
    all_pass(&props, 2000).map(|_| "1000 pairs per carrier kind".into())
}

fn c5_spectrum() -> Outcome {
    for n in 1..=4 {
        let b = kernel_frame(&Carrier::<Q>::standard(n).map_err(|e| e.to_string())?, Bounds::default())
            .map_err(|e| e.to_string())?;
        if b.frame.len() != 1 << n || !b.frame.is_boolean() {
            return Err(format!("n = {n}: {} elements", b.frame.len()));
        }
    }
    let bounds = Bounds { max_dim: 5, window: 4 };
    let agree = |c: &trunclab::kernel_frame::UnitalConditions| {
        c.dark_vanishes == c.point_isolated && c.point_isolated == c.greatest_truncated
    };
    let mut rng = trunclab::check::instance_rng(SEED, "acceptance_spectrum", 0);
    for _ in 0..100 {
        let c = random::fin_vec::<Q, _>(&mut rng, 4);
        let r = classify_unital(&c, bounds, SEED, 4).map_err(|e| format!("{}: {e}", c.name()))?;
        if !r.unital || r.witness.is_none() || !agree(&r.conditions) {
            return Err(format!("{r:?}"));
        }
    }
    let r = classify_unital(&Carrier::<Q>::ev_seq(), bounds, SEED, 50).map_err(|e| e.to_string())?;
    if r.unital || !agree(&r.conditions) {
        return Err(format!("{r:?}"));
    }
    Ok("Boolean 2^n for n <= 4, 100 finite carriers unital, sequences not".into())
}

fn c6_universal_arrow() -> Outcome {
    let r = nonfunctorial_demo::<Q>().map_err(|e| e.to_string())?;
    let rep = &r.repair;
    if r.frame_maps != 1 || r.pushed_value == r.direct_value || !rep.pointed || !rep.square_commutes {
        return Err(format!("{r:?}"));
    }
    if rep.commuting_maps != 1 || !rep.unique {
        return Err(format!("{} commuting pointed maps", rep.commuting_maps));
    }
    Ok(format!(
        "1 frame map, probe ({}, {}) gives {} vs {}, unique pointed repair",
        r.probe.0, r.probe.1, r.pushed_value, r.direct_value
    ))
}

fn c7_equivalence() -> Outcome {
    match equivalence_check(3) {
        (n, None) => Ok(format!("{n} filtered and pointed frames round-trip")),
        (_, Some(w)) => Err(w),
    }
}

fn c8_coz_con() -> Outcome {
    let props = coz_con_suite::<Q>(SEED, 200).map_err(|e| e.to_string())?;
    if props.len() != 5 {
        return Err(format!("{} properties", props.len()));
    }
    all_pass(&props, 200)?;
    if let Some(p) = props.iter().find(|p| p.stabilized_by.is_none()) {
        return Err(format!("{} has no stabilization record", p.key));
    }
    Ok("5 properties x 200, joins stabilized".into())
}

fn c9_reflection() -> Outcome {
    let r = w_reflect(&Carrier::<Q>::ev_seq(), Bounds { max_dim: 10, window: 4 }, SEED, 50).map_err(|e| e.to_string())?;
    if !(r.b0_adjoined && !r.isomorphism && r.closed && r.unital) {
        return Err(format!("{r:?}"));
    }
    all_pass(&[r.factorization.clone()], 50)?;
    Ok(format!("top b0 = ({}) adjoined, 50 morphisms factor uniquely", r.b0.join(",")))
}

fn c10_suite() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_trunclab");
    let run = || Command::new(bin).args(["suite", "--format", "json", "--seed", "7"]).output();
    let start = Instant::now();
    let a = run().map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if a.status.code() != Some(0) {
        return Err(format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout)));
    }
    if took > Duration::from_secs(60) {
        return Err(format!("took {took:?}"));
    }
    let b = run().map_err(|e| e.to_string())?;
    if a.stdout != b.stdout {
        return Err("rerun differs".into());
    }
    Ok(format!("exit 0 in {:.1}s, rerun byte-identical", took.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 10] = [
        ("axiom suite and mutation fixtures", c1_axioms, Some(5)),
        ("kernel representation oracle", c2_oracle, Some(1)),
        ("lemma suite", c3_lemmas, Some(30)),
        ("kernel representation isomorphism", c4_kappa, Some(10)),
        ("spectrum and unital classification", c5_spectrum, None),
        ("universal arrow example", c6_universal_arrow, Some(5)),
        ("filtered/pointed equivalence", c7_equivalence, Some(10)),
        ("coz/con suite", c8_coz_con, None),
        ("W-reflection", c9_reflection, None),
        ("full suite run", c10_suite, None),
    ];
    let mut failures = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if let (Ok(_), Some(b)) = (&outcome, budget) {
            if took > Duration::from_secs(*b) {
                outcome = Err(format!("over the {b}s budget"));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {tag} {name} ({:.2}s): {detail}", i + 1, took.as_secs_f64());
        failures += usize::from(outcome.is_err());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
