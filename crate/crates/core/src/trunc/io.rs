//! Trunc description files.
//!
//! ```json
//! {"kind": "fin_vec", "unit": ["1", "1/2"], "generators": [["1", "0"]]}
//! {"kind": "ev_seq", "window": 4, "generators": [["1", "1"]]}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Carrier, TruncElement};
use crate::lattice::io::ParseError;
use crate::scalar::{parse_scalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    FinVec,
    EvSeq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncFile {
    pub kind: Kind,
    /// `FinVec` dimension; implied by `unit` when that is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// `FinVec` unit, defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<String>>,
    /// `EvSeq` coordinate window for frame materialization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Tuples (`FinVec`) or sequence prefixes with tail 0 (`EvSeq`).
    #[serde(default)]
    pub generators: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct TruncSpec<S> {
    pub carrier: Arc<Carrier<S>>,
    pub window: Option<usize>,
    pub generators: Vec<TruncElement<S>>,
}

fn scalars<S: Scalar>(v: &[String]) -> Result<Vec<S>, ParseError> {
    v.iter()
        .map(|t| parse_scalar(t).ok_or_else(|| ParseError::Invalid(format!("not a rational: {t:?}"))))
        .collect()
}

fn fmt_scalars<S: Scalar>(v: impl Iterator<Item = S>) -> Vec<String> {
    v.map(|x| x.to_string()).collect()
}

impl TruncFile {
    pub fn to_spec<S: Scalar>(&self) -> Result<TruncSpec<S>, ParseError> {
        let invalid = |e: super::TruncError| ParseError::Invalid(e.to_string());
        let carrier = match self.kind {
            Kind::FinVec => {
                let unit = match (&self.unit, self.dimension) {
                    (Some(u), d) => {
                        let u = scalars::<S>(u)?;
                        if d.is_some_and(|d| d != u.len()) {
                            return Err(ParseError::Invalid(format!(
                                "dimension {} disagrees with unit length {}",
                                d.unwrap(),
                                u.len()
                            )));
                        }
                        u
                    }
                    (None, Some(d)) => vec![S::one(); d],
                    (None, None) => return Err(ParseError::Invalid("fin_vec needs a unit or a dimension".into())),
                };
                Carrier::fin_vec(unit).map_err(invalid)?
            }
            Kind::EvSeq => Carrier::ev_seq(),
        };
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let v = scalars::<S>(g)?;
                match self.kind {
                    Kind::FinVec => TruncElement::tuple(&carrier, v),
                    Kind::EvSeq => TruncElement::seq(&carrier, v),
                }
                .map_err(invalid)
            })
            .collect::<Result<_, _>>()?;
        Ok(TruncSpec { carrier, window: self.window, generators })
    }

    pub fn from_spec<S: Scalar>(spec: &TruncSpec<S>) -> Self {
        let (kind, unit, dimension) = match &*spec.carrier {
            Carrier::FinVec { unit } => (Kind::FinVec, Some(fmt_scalars(unit.iter().cloned())), Some(unit.len())),
            Carrier::EvSeq => (Kind::EvSeq, None, None),
        };
        TruncFile {
            kind,
            dimension,
            unit,
            window: spec.window,
            generators: spec
                .generators
                .iter()
                .map(|g| fmt_scalars((0..g.explicit_len()).map(|i| g.at(i))))
                .collect(),
        }
    }
}

pub fn parse_trunc<S: Scalar>(text: &str) -> Result<TruncSpec<S>, ParseError> {
    let file: TruncFile = serde_json::from_str(text)?;
    file.to_spec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn round_trip() {
        let text = r#"{"kind":"fin_vec","unit":["1","1/2"],"generators":[["3","-1/4"]]}"#;
        let spec = parse_trunc::<Q>(text).unwrap();
        assert_eq!(spec.carrier.dim(), Some(2));
        assert_eq!(spec.generators[0].at(1), Q::ratio(-1, 4));
        let back = TruncFile::from_spec(&spec).to_spec::<Q>().unwrap();
        assert_eq!(back.generators, spec.generators);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_trunc::<Q>("{\"kind\":\n\"fin_vec\",\n}"), Err(ParseError::Syntax { line: 3, .. })));
        assert!(matches!(parse_trunc::<Q>(r#"{"kind":"fin_vec"}"#), Err(ParseError::Invalid(_))));
        assert!(matches!(parse_trunc::<Q>(r#"{"kind":"fin_vec","unit":["0"]}"#), Err(ParseError::Invalid(_))));
        assert!(matches!(
            parse_trunc::<Q>(r#"{"kind":"fin_vec","dimension":2,"generators":[["1"]]}"#),
            Err(ParseError::Invalid(_))
        ));
        let seq = parse_trunc::<Q>(r#"{"kind":"ev_seq","window":4,"generators":[["1","1"]]}"#).unwrap();
        assert_eq!(seq.window, Some(4));
    }
}
