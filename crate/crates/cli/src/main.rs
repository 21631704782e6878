use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trunclab::kernel_frame::{classify_unital, kernel_frame, Bounds};
use trunclab::lattice::io::{listing, parse_poset, to_dot, Decorations};
use trunclab::lattice::FiniteFrame;
use trunclab::pointed::{FilteredBundle, PointedBundle};
use trunclab::represent::induced::{induce_report, nonfunctorial_demo, TruncMorphism};
use trunclab::represent::reflect::w_reflect;
use trunclab::represent::underline::{hat, in_r0, underline, Spectral};
use trunclab::suite::{render, run_suite, RunConfig};
use trunclab::trunc::axioms::{axiom_suite, check_carrier, AxiomReport, Mutation};
use trunclab::trunc::io::{parse_trunc, TruncSpec};
use trunclab::trunc::Carrier;
use trunclab::{Scalar, Q};

#[derive(Parser)]
#[command(name = "trunclab", version, about = "Truncated l-groups, kernel frames and their pointfree representation")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Instances per property.
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Largest finite coordinate count.
    #[arg(long, global = true, default_value_t = 4)]
    max_dim: usize,
    /// Coordinate window for the sequence carrier.
    #[arg(long, global = true, default_value_t = 4)]
    window: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write a Graphviz rendering here.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MutationArg {
    None,
    Zero,
    Identity,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::Zero => Mutation::Zero,
            MutationArg::Identity => Mutation::Identity,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    Ex1,
    Reflection,
}

#[derive(Subcommand)]
enum Command {
    /// Check the truncation axioms on random carriers, or on a trunc file.
    CheckAxioms {
        #[arg(long)]
        trunc: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MutationArg::None)]
        mutation: MutationArg,
    },
    /// Build the frame of truncation kernels.
    KernelFrame {
        #[arg(long)]
        trunc: PathBuf,
    },
    /// Build the pointed spectrum and classify unitality.
    Spectrum {
        #[arg(long)]
        trunc: PathBuf,
    },
    /// Step forms of the frame-valued representation of each generator.
    Represent {
        #[arg(long)]
        trunc: PathBuf,
    },
    /// Induced pointed map for a morphism given by generator images.
    ///
    /// The target file's generators are the images of the scaled source
    /// basis vectors, one per source coordinate.
    InduceG {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// W-reflection of a trunc.
    Reflect {
        #[arg(long)]
        trunc: PathBuf,
    },
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
    /// Every property suite.
    Suite {
        #[arg(long, value_enum, default_value_t = MutationArg::None)]
        mutation: MutationArg,
    },
    /// Export a poset, filtered or pointed frame file.
    Frame {
        input: PathBuf,
    },
}

enum Failure {
    Input(String),
}

fn input(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

struct Output {
    json: Value,
    text: String,
    passed: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_trunc(path: &Path) -> Result<TruncSpec<Q>, Failure> {
    parse_trunc(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn bounds(cli: &Cli, spec: &TruncSpec<Q>) -> Bounds {
    Bounds { max_dim: cli.max_dim, window: spec.window.unwrap_or(cli.window) }
}

fn write_dot(cli: &Cli, dot: impl FnOnce() -> String) -> Result<(), Failure> {
    if let Some(p) = &cli.dot {
        fs::write(p, dot()).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Indented `key: value` rendering of a JSON report.
fn plain(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|y| y.is_object() || y.is_array()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    plain(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x)));
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                let flat = x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()));
                if x.is_object() || (x.is_array() && !flat) {
                    out.push_str(&format!("{pad}-\n"));
                    plain(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar_text(x))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar_text).collect::<Vec<_>>().join(", "),
        x => x.to_string(),
    }
}

fn generic(json: Value, passed: bool) -> Output {
    let mut text = String::new();
    plain(&json, 0, &mut text);
    Output { json, text, passed }
}

fn axioms_output(r: &AxiomReport) -> Output {
    let mut text = format!("mutation {:?}, {} instances\n", r.mutation, r.instances);
    for o in &r.outcomes {
        text.push_str(&format!("  {} {} ({} checked)\n", if o.passed { "PASS" } else { "FAIL" }, o.axiom, o.checked));
        if let Some(w) = &o.witness {
            text.push_str(&format!("    witness: {w}\n"));
        }
    }
    Output { json: json!(r), text, passed: r.passed() }
}

fn check_axioms(cli: &Cli, trunc: &Option<PathBuf>, m: Mutation) -> Result<Output, Failure> {
    let r = match trunc {
        Some(p) => {
            let spec = load_trunc(p)?;
            if spec.generators.is_empty() {
                return Err(Failure::Input(format!("{}: no generators to check", p.display())));
            }
            check_carrier(&spec.generators, m)
        }
        None => {
            let cfg = RunConfig { seed: cli.seed, samples: cli.samples, max_dim: cli.max_dim, window: cli.window, mutation: m };
            axiom_suite::<Q>(cli.seed, cfg.axiom_fin(), cfg.axiom_seq(), cli.max_dim, m)
        }
    };
    Ok(axioms_output(&r))
}

fn kernel_frame_cmd(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let spec = load_trunc(path)?;
    let b = kernel_frame(&spec.carrier, bounds(cli, &spec)).map_err(input)?;
    let filter = b.trunc_filter().map_err(input)?;
    write_dot(cli, || {
        to_dot(
            &b.frame,
            &Decorations {
                filter: filter.members().to_vec(),
                cofinite_point: b.tail_point(),
                title: Some(format!("K {}", spec.carrier.name())),
                ..Decorations::default()
            },
        )
    })?;
    let json = json!({
        "carrier": spec.carrier.name(),
        "window": b.window,
        "elements": b.frame.len(),
        "boolean": b.frame.is_boolean(),
        "regular": b.frame.is_regular(),
        "filter": filter.members().iter().map(|&e| b.frame.display(e)).collect::<Vec<_>>(),
        "listing": listing(&b.frame),
    });
    Ok(generic(json, true))
}

fn spectrum_cmd(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let spec = load_trunc(path)?;
    let bnd = bounds(cli, &spec);
    let sp = Spectral::new(&spec.carrier, bnd).map_err(input)?;
    let report = classify_unital(&spec.carrier, bnd, cli.seed, cli.samples.min(50)).map_err(input)?;
    let m = sp.pointed();
    write_dot(cli, || {
        to_dot(
            m.frame(),
            &Decorations { kernel: Some(m.kernel()), title: Some(format!("M {}", spec.carrier.name())), ..Decorations::default() },
        )
    })?;
    let json = json!({
        "carrier": spec.carrier.name(),
        "kernel_frame_elements": sp.bundle.frame.len(),
        "spectrum_elements": m.frame().len(),
        "point_kernel": m.frame().display(m.kernel()),
        "classification": report,
    });
    Ok(generic(json, true))
}

fn represent_cmd(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let spec = load_trunc(path)?;
    let sp = Spectral::new(&spec.carrier, bounds(cli, &spec)).map_err(input)?;
    let mut rows = Vec::new();
    let mut passed = true;
    for a in &spec.generators {
        let u = underline(&sp.bundle, a).map_err(input)?;
        let mut row = json!({ "element": a.to_string(), "underline": u.to_json() });
        match hat(&sp, a) {
            Ok(h) => {
                let ok = in_r0(sp.pointed(), &h);
                passed &= ok;
                row["hat"] = json!(h.to_json());
                row["vanishes_at_point"] = json!(ok);
            }
            Err(e) => row["hat_unavailable"] = json!(e.to_string()),
        }
        rows.push(row);
    }
    Ok(generic(json!({ "carrier": spec.carrier.name(), "elements": rows }), passed))
}

fn induce_cmd(cli: &Cli, source: &Path, target: &Path) -> Result<Output, Failure> {
    let a = load_trunc(source)?;
    let b = load_trunc(target)?;
    let sa = Spectral::new(&a.carrier, bounds(cli, &a)).map_err(input)?;
    let sb = Spectral::new(&b.carrier, bounds(cli, &b)).map_err(input)?;
    let theta = TruncMorphism::through_hat(&a.carrier, &sb, &b.generators).map_err(input)?;
    let r = induce_report(&sa, &theta, cli.seed).map_err(input)?;
    let passed = r.pointed && r.square_commutes && r.unique && r.stable;
    Ok(generic(json!(r), passed))
}

fn reflect_cmd(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let spec = load_trunc(path)?;
    let bnd = Bounds { max_dim: cli.max_dim.max(10), window: spec.window.unwrap_or(cli.window) };
    let r = w_reflect(&spec.carrier, bnd, cli.seed, cli.samples).map_err(input)?;
    let passed = r.closed && r.unital && r.factorization.passed;
    Ok(generic(json!(r), passed))
}

fn demo_ex1() -> Result<Output, Failure> {
    let r = nonfunctorial_demo::<Q>().map_err(input)?;
    let mut text = String::from("A = Q^1, B = Q^2, theta(a) = (a, 0)\n");
    text.push_str(&format!("frame maps K A -> K B: {}\n", r.frame_maps));
    for (x, y) in &r.unique_map {
        text.push_str(&format!("  {x} -> {y}\n"));
    }
    text.push_str(&format!(
        "probe ({}, {}): pushed forward {} but direct {}\n",
        r.probe.0, r.probe.1, r.pushed_value, r.direct_value
    ));
    text.push_str(&format!(
        "pointed repair on M A ({} elements family, stable {}):\n",
        r.repair.family, r.repair.stable
    ));
    for (x, y) in &r.repair.table {
        text.push_str(&format!("  {x} -> {y}\n"));
    }
    text.push_str(&format!(
        "pointed {}, square commutes {}, commuting pointed maps {}\n",
        r.repair.pointed, r.repair.square_commutes, r.repair.commuting_maps
    ));
    let passed = r.frame_maps == 1 && r.pushed_value != r.direct_value && r.repair.square_commutes && r.repair.unique;
    Ok(Output { json: json!(r), text, passed })
}

fn demo_reflection(cli: &Cli) -> Result<Output, Failure> {
    let fin = Carrier::<Q>::fin_vec(vec![Q::ratio(1, 2), Q::ratio(3, 1)]).map_err(input)?;
    let bnd = Bounds { max_dim: 10, window: cli.window };
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for c in [fin, Carrier::<Q>::ev_seq()] {
        let r = w_reflect(&c, bnd, cli.seed, cli.samples.clamp(1, 50)).map_err(input)?;
        let shape = if c.dim().is_some() { r.isomorphism } else { r.b0_adjoined && !r.isomorphism };
        passed &= shape && r.closed && r.unital && r.factorization.passed;
        text.push_str(&format!("{}\n", r.carrier));
        text.push_str(&format!("  model coordinates: {}\n", r.coordinates.join(" ")));
        text.push_str(&format!("  rank of the image: {}\n", r.rank_of_image));
        text.push_str(&format!("  b0 = ({})\n", r.b0.join(", ")));
        if r.isomorphism {
            text.push_str("  reflection is an isomorphism\n");
        } else if r.b0_adjoined {
            text.push_str("  reflection adjoins the top b0\n");
        }
        text.push_str(&format!("  closed {}, unital {}\n", r.closed, r.unital));
        text.push_str(&render(&r.factorization));
        reports.push(r);
    }
    Ok(Output { json: json!(reports), text, passed })
}

fn frame_cmd(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let text = read(path)?;
    let shape: Value = serde_json::from_str(&text).map_err(|e| input(format!("{}: {}", path.display(), trunclab::lattice::io::ParseError::from(e))))?;
    let at = |e: trunclab::lattice::io::ParseError| Failure::Input(format!("{}: {e}", path.display()));
    let (frame, deco, extra): (std::sync::Arc<FiniteFrame>, Decorations, Value) = if shape.get("point").is_some() {
        let m = PointedBundle::parse(&text).map_err(at)?;
        let k = m.kernel();
        let extra = json!({ "kernel": m.frame().display(k), "isolated": m.is_isolated() });
        (m.frame().clone(), Decorations { kernel: Some(k), ..Decorations::default() }, extra)
    } else if shape.get("filter").is_some() {
        let lf = FilteredBundle::parse(&text).map_err(at)?;
        let extra = json!({
            "filter": lf.filter.members().iter().map(|&e| lf.frame.display(e)).collect::<Vec<_>>(),
            "regular_filter": lf.is_regular(),
        });
        (lf.frame.clone(), Decorations { filter: lf.filter.members().to_vec(), ..Decorations::default() }, extra)
    } else {
        let p = parse_poset(&text).map_err(at)?;
        let f = FiniteFrame::build(p).map_err(input)?;
        (std::sync::Arc::new(f), Decorations::default(), json!({}))
    };
    write_dot(cli, || to_dot(&frame, &deco))?;
    let mut json = json!({
        "elements": frame.len(),
        "boolean": frame.is_boolean(),
        "regular": frame.is_regular(),
        "listing": listing(&frame),
    });
    if let (Value::Object(m), Value::Object(x)) = (&mut json, extra) {
        m.extend(x);
    }
    Ok(generic(json, true))
}

fn suite_cmd(cli: &Cli, m: Mutation) -> Output {
    let cfg = RunConfig { seed: cli.seed, samples: cli.samples, max_dim: cli.max_dim, window: cli.window, mutation: m };
    let r = run_suite(&cfg);
    Output { json: serde_json::from_str(&r.to_json()).expect("report is JSON"), text: r.to_text(), passed: r.passed }
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::CheckAxioms { trunc, mutation } => check_axioms(cli, trunc, (*mutation).into()),
        Command::KernelFrame { trunc } => kernel_frame_cmd(cli, trunc),
        Command::Spectrum { trunc } => spectrum_cmd(cli, trunc),
        Command::Represent { trunc } => represent_cmd(cli, trunc),
        Command::InduceG { source, target } => induce_cmd(cli, source, target),
        Command::Reflect { trunc } => reflect_cmd(cli, trunc),
        Command::Demo { name: Demo::Ex1 } => demo_ex1(),
        Command::Demo { name: Demo::Reflection } => demo_reflection(cli),
        Command::Suite { mutation } => Ok(suite_cmd(cli, (*mutation).into())),
        Command::Frame { input } => frame_cmd(cli, input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match dispatch(&cli) {
        Ok(o) => o,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let mut body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("report serializes"),
        Format::Text => out.text,
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, body) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
