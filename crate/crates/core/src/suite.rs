//! The full verification run behind `trunclab suite`.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;

use crate::check::{run, Property};
use crate::kernel_frame::{classify_unital, kernel_frame, Bounds};
use crate::pointed::equivalence_check;
use crate::represent::induced::{coz_con_suite, induce_report, nonfunctorial_demo, TruncMorphism};
use crate::represent::reflect::w_reflect;
use crate::represent::underline::{unit_table_holds, verify_hat, verify_kappa, Spectral};
use crate::trunc::axioms::{axiom_suite, Mutation, AXIOMS};
use crate::trunc::{lemmas, random, Carrier};
use crate::scalar::Scalar;
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Instances per lemma property; other batches scale from it.
    pub samples: usize,
    pub max_dim: usize,
    pub window: usize,
    pub mutation: Mutation,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, samples: 200, max_dim: 4, window: 4, mutation: Mutation::None }
    }
}

impl RunConfig {
    pub fn axiom_fin(&self) -> usize {
        self.samples * 5
    }

    pub fn axiom_seq(&self) -> usize {
        self.samples * 5 / 2
    }

    /// Alternates finite and sequence carriers, so half go to each.
    pub fn kappa_pairs(&self) -> usize {
        self.samples * 10
    }

    pub fn reflection_samples(&self) -> usize {
        (self.samples / 4).max(1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: String,
    pub properties: Vec<Property>,
}

impl Section {
    fn new(name: &str, properties: Vec<Property>) -> Self {
        Section { name: name.to_string(), properties }
    }

    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub passed: bool,
    pub sections: Vec<Section>,
}

fn failed(key: &str, e: impl std::fmt::Display) -> Property {
    Property::single(key, Err(format!("error: {e}")))
}

fn flag(key: &str, ok: bool, witness: impl FnOnce() -> String) -> Property {
    Property::single(key, if ok { Ok(None) } else { Err(witness()) })
}

pub fn axioms_section(cfg: &RunConfig) -> Section {
    let r = axiom_suite::<Q>(cfg.seed, cfg.axiom_fin(), cfg.axiom_seq(), cfg.max_dim, cfg.mutation);
    let props = AXIOMS
        .iter()
        .map(|&ax| {
            let o = r.outcome(ax).expect("every axiom is checked");
            Property {
                key: format!("truncation_axiom_{ax}"),
                instances: o.checked,
                passed: o.passed,
                witness: o.witness.clone(),
                stabilized_by: None,
            }
        })
        .collect();
    Section::new("axioms", props)
}

pub fn kernels_section(cfg: &RunConfig) -> Section {
    let mut props = vec![lemmas::support_representation_oracle::<Ratio<i64>>(cfg.max_dim.min(3))];
    props.extend(lemmas::all::<Q>(cfg.seed, cfg.samples));
    Section::new("kernels", props)
}

pub fn spectrum_section(cfg: &RunConfig) -> Section {
    let bounds = Bounds { max_dim: cfg.max_dim.max(cfg.window + 1), window: cfg.window };
    let sizes = Property::single(
        "kernel_frame_of_n_coordinates_is_boolean_of_size_2_to_n",
        (|| {
            for n in 1..=cfg.max_dim.min(4) {
                let b = kernel_frame(&Carrier::<Q>::standard(n).map_err(|e| e.to_string())?, bounds).map_err(|e| e.to_string())?;
                if b.frame.len() != 1 << n || !b.frame.is_boolean() {
                    return Err(format!("n={n}: {} elements", b.frame.len()));
                }
                b.check_operations()?;
            }
            Ok(None)
        })(),
    );
    let fin = run("finite_carriers_are_unital", cfg.seed, cfg.samples.min(50), |rng, _| {
        let c = random::fin_vec::<Q, _>(rng, cfg.max_dim.min(4));
        let r = classify_unital(&c, bounds, cfg.seed, 4).map_err(|e| format!("{}: {e}", c.name()))?;
        if r.unital && r.witness.is_some() {
            Ok(None)
        } else {
            Err(format!("{} classified non-unital", c.name()))
        }
    });
    let seq = match classify_unital(&Carrier::<Q>::ev_seq(), bounds, cfg.seed, cfg.samples.min(50)) {
        Ok(r) => flag("sequences_are_not_unital", !r.unital, || "sequence carrier classified unital".into()),
        Err(e) => failed("sequences_are_not_unital", e),
    };
    Section::new("spectrum", vec![sizes, fin, seq])
}

pub fn pointed_section() -> Section {
    let (n, failure) = equivalence_check(3);
    let mut p = Property::single("pointed_filtered_round_trips", failure.map_or(Ok(None), Err));
    p.instances = n;
    Section::new("pointed", vec![p])
}

fn ex1_property() -> Property {
    match nonfunctorial_demo::<Q>() {
        Ok(r) => flag(
            "single_frame_map_breaks_naturality_and_pointed_map_repairs_it",
            r.frame_maps == 1 && r.pushed_value != r.direct_value && r.repair.square_commutes && r.repair.unique,
            || format!("{r:?}"),
        ),
        Err(e) => failed("single_frame_map_breaks_naturality_and_pointed_map_repairs_it", e),
    }
}

fn universal_arrow(cfg: &RunConfig) -> Property {
    run("induced_pointed_map_is_unique", cfg.seed, cfg.samples.min(20), |rng, _| {
        use rand::Rng;
        let s = |e: &dyn std::fmt::Display| e.to_string();
        let a = random::fin_vec::<Q, _>(rng, 2);
        let b = random::fin_vec::<Q, _>(rng, 2);
        let (n, m) = (a.dim().unwrap(), b.dim().unwrap());
        // each target coordinate copies at most one source coordinate
        let pick: Vec<Option<usize>> = (0..m).map(|_| rng.gen_range(0..=n).checked_sub(1)).collect();
        let images: Vec<crate::Element> = (0..n)
            .map(|i| {
                crate::Element::tuple(&b, (0..m).map(|y| if pick[y] == Some(i) { b.unit_at(y) } else { Q::ratio(0, 1) }).collect())
                    .expect("shape")
            })
            .collect();
        let sa = Spectral::new(&a, Bounds::default()).map_err(|e| s(&e))?;
        let sb = Spectral::new(&b, Bounds::default()).map_err(|e| s(&e))?;
        let theta = TruncMorphism::through_hat(&a, &sb, &images).map_err(|e| s(&e))?;
        let r = induce_report(&sa, &theta, cfg.seed).map_err(|e| s(&e))?;
        if r.pointed && r.square_commutes && r.unique && r.stable {
            Ok(None)
        } else {
            Err(format!("{} -> {} via {pick:?}: {r:?}", a.name(), b.name()))
        }
    })
}

pub fn representation_section(cfg: &RunConfig) -> Section {
    let mut props = Vec::new();
    match verify_kappa::<Q>(cfg.seed, cfg.kappa_pairs()) {
        Ok(p) => props.extend(p),
        Err(e) => props.push(failed("kernel_representation_preserves_operations", e)),
    }
    match verify_hat::<Q>(cfg.seed, cfg.samples) {
        Ok(p) => props.extend(p),
        Err(e) => props.push(failed("pointed_representation_lands_in_r0_and_preserves_operations", e)),
    }
    let unit = (|| -> Result<bool, String> {
        for n in 1..=3 {
            let c = Carrier::<Q>::fin_vec((1..=n).map(|i| Q::ratio(i, 2)).collect()).map_err(|e| e.to_string())?;
            let sp = Spectral::new(&c, Bounds::default()).map_err(|e| e.to_string())?;
            if !unit_table_holds(&sp).map_err(|e| e.to_string())? {
                return Ok(false);
            }
        }
        Ok(true)
    })();
    props.push(match unit {
        Ok(ok) => flag("unit_image_four_case_table", ok, || "table mismatch".into()),
        Err(e) => failed("unit_image_four_case_table", e),
    });
    match coz_con_suite::<Q>(cfg.seed, cfg.samples) {
        Ok(p) => props.extend(p),
        Err(e) => props.push(failed("coz_con", e)),
    }
    props.push(ex1_property());
    props.push(universal_arrow(cfg));
    Section::new("representation", props)
}

pub fn reflection_section(cfg: &RunConfig) -> Section {
    let mut props = Vec::new();
    let cases = [
        ("finite_carrier_reflects_to_itself", Carrier::<Q>::fin_vec(vec![Q::ratio(1, 2), Q::ratio(3, 1)]).expect("unit")),
        ("sequences_reflect_with_adjoined_top", Carrier::<Q>::ev_seq()),
    ];
    for (key, c) in cases {
        let bounds = Bounds { max_dim: 10, window: cfg.window };
        match w_reflect(&c, bounds, cfg.seed, cfg.reflection_samples()) {
            Ok(r) => {
                let shape = if c.dim().is_some() { r.isomorphism } else { r.b0_adjoined && !r.isomorphism };
                props.push(flag(key, shape && r.closed && r.unital, || format!("{r:?}")));
                let mut f = r.factorization.clone();
                f.key = format!("{}_{}", f.key, if c.dim().is_some() { "finite" } else { "sequences" });
                props.push(f);
            }
            Err(e) => props.push(failed(key, e)),
        }
    }
    Section::new("reflection", props)
}

pub fn run_suite(cfg: &RunConfig) -> SuiteReport {
    let sections = vec![
        axioms_section(cfg),
        kernels_section(cfg),
        spectrum_section(cfg),
        pointed_section(),
        representation_section(cfg),
        reflection_section(cfg),
    ];
    SuiteReport { config: *cfg, passed: sections.iter().all(Section::passed), sections }
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "seed {} samples {} max-dim {} window {} mutation {:?}", c.seed, c.samples, c.max_dim, c.window, c.mutation);
        for s in &self.sections {
            let _ = writeln!(out, "[{}]", s.name);
            for p in &s.properties {
                out.push_str(&render(p));
            }
        }
        let _ = writeln!(out, "{}", if self.passed { "all properties passed" } else { "FAILED" });
        out
    }
}

pub fn render(p: &Property) -> String {
    let mut line = format!("  {} {} ({} instances)", if p.passed { "PASS" } else { "FAIL" }, p.key, p.instances);
    if let Some(n) = p.stabilized_by {
        let _ = write!(line, " stabilized by {n}");
    }
    if let Some(w) = &p.witness {
        let _ = write!(line, "\n    witness: {w}");
    }
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_deterministic_and_passes() {
        let cfg = RunConfig { samples: 8, ..RunConfig::default() };
        let a = run_suite(&cfg);
        assert!(a.passed, "{}", a.to_text());
        assert_eq!(a.to_json(), run_suite(&cfg).to_json());
    }

    #[test]
    fn mutation_fails_the_run() {
        let cfg = RunConfig { samples: 8, mutation: Mutation::Zero, ..RunConfig::default() };
        let s = axioms_section(&cfg);
        assert!(!s.passed());
        assert!(s.properties.iter().any(|p| p.witness.is_some()));
    }
}
