//! Poset ingestion, DOT export and structured listings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::frame::{Elem, FiniteFrame};
use super::poset::Poset;
use super::LatticeError;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{0}")]
    Invalid(String),
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        ParseError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// On-disk poset: labels and covering pairs `[lower, upper]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PosetFile {
    pub labels: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

impl PosetFile {
    pub fn from_poset(p: &Poset) -> Self {
        PosetFile {
            labels: p.labels().to_vec(),
            covers: p
                .covers()
                .into_iter()
                .map(|(i, j)| (p.labels()[i].clone(), p.labels()[j].clone()))
                .collect(),
        }
    }

    pub fn to_poset(&self) -> Result<Poset, LatticeError> {
        Poset::from_covers(&self.labels, &self.covers)
    }
}

pub fn parse_poset(text: &str) -> Result<Poset, ParseError> {
    let file: PosetFile = serde_json::from_str(text)?;
    Ok(file.to_poset()?)
}

/// Elements as sorted label sets, plus the covering relation by index.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FrameListing {
    pub base: PosetFile,
    pub elements: Vec<Vec<String>>,
    pub covers: Vec<(usize, usize)>,
}

pub fn listing(frame: &FiniteFrame) -> FrameListing {
    let mut elements: Vec<(Vec<String>, Elem)> =
        frame.elements().iter().map(|&e| (frame.element_labels(e), e)).collect();
    elements.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    let pos = |e: Elem| elements.iter().position(|(_, x)| *x == e).expect("element");
    let mut covers: Vec<(usize, usize)> =
        frame.hasse_edges().into_iter().map(|(a, b)| (pos(a), pos(b))).collect();
    covers.sort();
    FrameListing {
        base: PosetFile::from_poset(frame.base()),
        elements: elements.into_iter().map(|(l, _)| l).collect(),
        covers,
    }
}

/// Node decorations for DOT output.
#[derive(Clone, Debug, Default)]
pub struct Decorations {
    /// Point kernel, drawn filled.
    pub kernel: Option<Elem>,
    /// Filter members, drawn with a double border.
    pub filter: Vec<Elem>,
    /// Elements containing this base point get a `+cof` suffix.
    pub cofinite_point: Option<usize>,
    pub title: Option<String>,
}

fn node_name(frame: &FiniteFrame, e: Elem) -> String {
    let labels = frame.element_labels(e);
    if labels.is_empty() {
        "∅".to_string()
    } else {
        labels.join(",")
    }
}

/// Hasse diagram of the element lattice in DOT, bottom at the bottom.
pub fn to_dot(frame: &FiniteFrame, deco: &Decorations) -> String {
    let listing = listing(frame);
    let mut ordered: Vec<Elem> = frame.elements().to_vec();
    ordered.sort_by_key(|&e| {
        let l = frame.element_labels(e);
        (l.len(), l)
    });
    let mut out = String::new();
    let title = deco.title.clone().unwrap_or_else(|| "frame".into());
    let _ = writeln!(out, "digraph \"{}\" {{", escape(&title));
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=ellipse];");
    for (i, &e) in ordered.iter().enumerate() {
        let mut label = node_name(frame, e);
        if let Some(p) = deco.cofinite_point {
            if e.contains_point(p) {
                label.push_str(" +cof");
            }
        }
        let mut attrs = vec![format!("label=\"{}\"", escape(&label))];
        if deco.kernel == Some(e) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=\"#f4a582\"".into());
            attrs.push("xlabel=\"kernel\"".into());
        }
        if deco.filter.contains(&e) {
            attrs.push("peripheries=2".into());
            attrs.push("color=\"#2166ac\"".into());
        }
        let _ = writeln!(out, "  n{} [{}];", i, attrs.join(", "));
    }
    for (a, b) in &listing.covers {
        let _ = writeln!(out, "  n{a} -> n{b} [arrowhead=none];");
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let text = r#"{"labels":["a","b","c"],"covers":[["a","c"],["b","c"]]}"#;
        let p = parse_poset(text).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(PosetFile::from_poset(&p).to_poset().unwrap(), p);
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = "{\n  \"labels\": [\"a\",\n  oops]\n}";
        match parse_poset(text) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let cyc = r#"{"labels":["a","b"],"covers":[["a","b"],["b","a"]]}"#;
        assert!(matches!(parse_poset(cyc), Err(ParseError::Lattice(_))));
    }

    #[test]
    fn trivial_frame_is_a_single_node() {
        let dot = to_dot(&FiniteFrame::trivial(), &Decorations::default());
        assert_eq!(dot.matches("label=").count(), 1);
        assert!(!dot.contains("->"));
    }

    #[test]
    fn listing_of_four() {
        let four = FiniteFrame::boolean(2);
        let l = listing(&four);
        assert_eq!(l.elements.len(), 4);
        assert_eq!(l.elements[0], Vec::<String>::new());
        assert_eq!(l.elements[3], vec!["x1".to_string(), "x2".to_string()]);
        assert_eq!(l.covers.len(), 4);
    }

    #[test]
    fn decorations_are_emitted() {
        let four = FiniteFrame::boolean(2);
        let k = four.element(&["x1"]).unwrap();
        let deco = Decorations { kernel: Some(k), filter: vec![four.top()], ..Default::default() };
        let dot = to_dot(&four, &deco);
        assert_eq!(dot.matches("fillcolor").count(), 1);
        assert_eq!(dot.matches("peripheries=2").count(), 1);
    }
}
