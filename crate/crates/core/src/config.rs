//! JSON configuration documents.
//!
//! A document names a radical basis, the ambient variables with their values
//! as coefficient vectors over the basis, the substitutions for `x, y, z`,
//! and optional bounds. Rationals are strings like `"-3/2"`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grouplat::PushingBounds;
use crate::jumpseq::ChainBounds;
use crate::laurent::{LaurentPoly, VarList};
use crate::outputs::RedundancyCaps;
use crate::valmodel::{validate_model, ValuationModel};
use crate::values::{format_rational, parse_rational, RadicalBasis, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub basis: Vec<u64>,
    pub ambient: Vec<AmbientVar>,
    pub ring: Vec<RingVar>,
    #[serde(default)]
    pub bounds: BoundsDoc,
    #[serde(default)]
    pub output: OutputDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientVar {
    pub name: String,
    /// One rational per radicand of the basis.
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingVar {
    pub name: String,
    /// Laurent polynomial in the ambient variables.
    pub image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsDoc {
    pub max_p_len: usize,
    pub max_t_index: usize,
    pub max_value: String,
    pub d_coord_cap: u32,
    pub d_layer_cap: u32,
    pub d_node_cap: usize,
    /// Defaults to five times the value of `x`.
    pub value_slack: Option<String>,
    pub degree_cap: u32,
}

impl Default for BoundsDoc {
    fn default() -> Self {
        let p = PushingBounds::default();
        let c = ChainBounds::default();
        Self {
            max_p_len: c.max_p_len,
            max_t_index: c.max_global_index,
            max_value: "20".into(),
            d_coord_cap: p.coord_bound,
            d_layer_cap: p.t_max,
            d_node_cap: p.max_nodes,
            value_slack: None,
            degree_cap: RedundancyCaps::default().degree_cap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputDoc {
    /// Values `σ` whose ideals `I_σ` are listed in the report.
    pub ideal_sigmas: Vec<String>,
    /// Semigroup elements up to this value are listed.
    pub semigroup_cap: String,
}

impl Default for OutputDoc {
    fn default() -> Self {
        Self {
            ideal_sigmas: vec!["1".into()],
            semigroup_cap: "4".into(),
        }
    }
}

/// A problem in a document, located at a 1-based line and column when the
/// offending text can be found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub doc: ConfigDoc,
    pub model: ValuationModel,
    pub bounds: ChainBounds,
    pub caps: RedundancyCaps,
    pub sigmas: Vec<Value>,
    pub semigroup_cap: Value,
}

/// Line and column of the first occurrence of `needle` as a JSON string,
/// shifted by `offset` characters into it.
fn locate(text: &str, needle: &str, offset: usize) -> (usize, usize) {
    let quoted = serde_json::to_string(needle).unwrap_or_default();
    let Some(at) = text.find(&quoted) else {
        return (0, 0);
    };
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |k| k + 1);
    let column = text[line_start..at].chars().count() + 2 + offset;
    (line, column)
}

struct Diags<'a> {
    text: &'a str,
    list: Vec<Diagnostic>,
}

impl Diags<'_> {
    fn at(&mut self, needle: &str, offset: usize, message: String) {
        let (line, column) = locate(self.text, needle, offset);
        self.list.push(Diagnostic { line, column, message });
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let doc: ConfigDoc = serde_json::from_str(text).map_err(|e| {
            vec![Diagnostic {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }]
        })?;
        Self::from_doc_located(doc, text)
    }

    pub fn from_doc(doc: ConfigDoc) -> Result<Self, Vec<Diagnostic>> {
        let text = serde_json::to_string_pretty(&doc).unwrap_or_default();
        Self::from_doc_located(doc, &text)
    }

    fn from_doc_located(doc: ConfigDoc, text: &str) -> Result<Self, Vec<Diagnostic>> {
        let mut d = Diags {
            text,
            list: Vec::new(),
        };
        let basis = match RadicalBasis::new(&doc.basis) {
            Ok(b) => b,
            Err(e) => {
                d.list.push(Diagnostic {
                    line: 0,
                    column: 0,
                    message: format!("basis: {e}"),
                });
                return Err(d.list);
            }
        };
        let ambient = VarList::new(&doc.ambient.iter().map(|a| a.name.as_str()).collect::<Vec<_>>());
        let mut values = Vec::new();
        for a in &doc.ambient {
            let mut coeffs = Vec::new();
            for c in &a.value {
                match parse_rational(c) {
                    Some(q) => coeffs.push(q),
                    None => d.at(c, 0, format!("value of `{}`: `{c}` is not a rational", a.name)),
                }
            }
            if coeffs.len() != a.value.len() {
                continue;
            }
            match Value::from_coeffs(&basis, coeffs) {
                Ok(v) => values.push(v),
                Err(e) => d.at(&a.name, 0, format!("value of `{}`: {e}", a.name)),
            }
        }
        let ring = VarList::new(&doc.ring.iter().map(|r| r.name.as_str()).collect::<Vec<_>>());
        let mut images = Vec::new();
        for r in &doc.ring {
            match LaurentPoly::parse(&ambient, &r.image, true) {
                Ok(p) => images.push(p),
                Err(e) => {
                    let offset = match &e {
                        crate::error::PolyError::Parse { position, .. } => *position,
                        _ => 0,
                    };
                    d.at(&r.image, offset, format!("image of `{}`: {e}", r.name));
                }
            }
        }
        let value = |d: &mut Diags, what: &str, s: &str| match Value::parse(&basis, s) {
            Ok(v) => Some(v),
            Err(e) => {
                d.at(s, 0, format!("{what}: {e}"));
                None
            }
        };
        let max_value = value(&mut d, "max_value", &doc.bounds.max_value);
        let slack = doc
            .bounds
            .value_slack
            .as_ref()
            .map(|s| value(&mut d, "value_slack", s));
        let sigmas: Vec<Option<Value>> = doc
            .output
            .ideal_sigmas
            .iter()
            .map(|s| value(&mut d, "ideal sigma", s))
            .collect();
        let semigroup_cap = value(&mut d, "semigroup_cap", &doc.output.semigroup_cap);
        if !d.list.is_empty() {
            return Err(d.list);
        }

        let model = ValuationModel::new_unchecked(&basis, Arc::clone(&ambient), values, ring, images);
        if let Err(msgs) = validate_model(&model) {
            for m in msgs {
                d.list.push(Diagnostic {
                    line: 0,
                    column: 0,
                    message: m,
                });
            }
            return Err(d.list);
        }
        let b = &doc.bounds;
        let bounds = ChainBounds {
            max_p_len: b.max_p_len,
            max_global_index: b.max_t_index,
            max_value,
            pushing: PushingBounds {
                coord_bound: b.d_coord_cap,
                t_max: b.d_layer_cap,
                max_nodes: b.d_node_cap,
            },
        };
        let caps = RedundancyCaps {
            value_slack: slack.flatten(),
            degree_cap: b.degree_cap,
        };
        Ok(Config {
            doc,
            model,
            bounds,
            caps,
            sigmas: sigmas.into_iter().flatten().collect(),
            semigroup_cap: semigroup_cap.expect("checked above"),
        })
    }

    /// The document in normal form: values and polynomials re-rendered, all
    /// bounds explicit.
    pub fn to_doc(&self) -> ConfigDoc {
        let m = &self.model;
        ConfigDoc {
            basis: m.basis().radicands().to_vec(),
            ambient: m
                .ambient()
                .names()
                .iter()
                .zip(m.ambient_values())
                .map(|(name, v)| AmbientVar {
                    name: name.clone(),
                    value: v.coeffs().iter().map(format_rational).collect(),
                })
                .collect(),
            ring: m
                .ring()
                .names()
                .iter()
                .zip(m.images())
                .map(|(name, p)| RingVar {
                    name: name.clone(),
                    image: p.to_string(),
                })
                .collect(),
            bounds: BoundsDoc {
                max_p_len: self.bounds.max_p_len,
                max_t_index: self.bounds.max_global_index,
                max_value: self
                    .bounds
                    .max_value
                    .as_ref()
                    .map_or_else(|| "20".into(), |v| v.to_string()),
                d_coord_cap: self.bounds.pushing.coord_bound,
                d_layer_cap: self.bounds.pushing.t_max,
                d_node_cap: self.bounds.pushing.max_nodes,
                value_slack: self.caps.value_slack.as_ref().map(|v| v.to_string()),
                degree_cap: self.caps.degree_cap,
            },
            output: OutputDoc {
                ideal_sigmas: self.sigmas.iter().map(|v| v.to_string()).collect(),
                semigroup_cap: self.semigroup_cap.to_string(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("config serializes")
    }
}

/// The configuration of the three-variable example with values
/// `1, √2, √51 − 5` and `z = y²/x + y⁵/x⁵ + z'`.
pub const EXAMPLE_CONFIG: &str = include_str!("../data/example.json");
