//! Reference data for the built-in example and a field-by-field comparison
//! of a fresh run against it.
//!
//! The reference polynomials are given by their defining recursions and are
//! expanded here without using the engine, so the comparison is independent
//! of how the engine builds them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;

use crate::config::{Config, EXAMPLE_CONFIG};
use crate::error::ChainError;
use crate::grouplat::{Multiplicity, PairVec};
use crate::jumpseq::JumpState;
use crate::laurent::{LaurentPoly, VarList};
use crate::outputs::{generating_sequence, redundancy_certificate, verify_certificate, Target};
use crate::values::Value;

pub const EXAMPLE_GOLDEN: &str = include_str!("../data/example_golden.json");

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Golden {
    pub p_length: usize,
    pub betas: Vec<String>,
    pub m: usize,
    pub gammas: Vec<(usize, String)>,
    pub s: Vec<(usize, Multiplicity)>,
    pub d_sets: Vec<(usize, Vec<Vec<u32>>)>,
    pub t_defs: Vec<(usize, String)>,
    pub identities: Vec<(usize, String)>,
    pub sequence: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub field: String,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, found {}", self.field, self.expected, self.found)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("reference data: {0}")]
    Data(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

fn data_err(e: impl fmt::Display) -> GoldenError {
    GoldenError::Data(e.to_string())
}

/// The reference `T_j` in the ring variables, expanded from `t_defs`.
pub fn expand_reference(config: &Config, golden: &Golden) -> Result<BTreeMap<usize, LaurentPoly>, GoldenError> {
    let ring = config.model.ring();
    let top = golden.t_defs.iter().map(|(j, _)| *j).max().unwrap_or(0);
    let mut names: Vec<String> = ring.names().to_vec();
    names.extend((1..=top).map(|j| format!("T{j}")));
    let ext = VarList::new(&names);
    let mut polys: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
    let eval = |text: &str, polys: &BTreeMap<usize, LaurentPoly>| -> Result<LaurentPoly, GoldenError> {
        let p = LaurentPoly::parse(&ext, text, false).map_err(data_err)?;
        let mut images: Vec<LaurentPoly> = (0..ring.len()).map(|k| LaurentPoly::var(ring, k)).collect();
        for j in 1..=top {
            images.push(polys.get(&j).cloned().unwrap_or_else(|| LaurentPoly::zero(ring)));
        }
        p.substitute(&images).map_err(data_err)
    };
    for (j, def) in &golden.t_defs {
        let p = eval(def, &polys)?;
        polys.insert(*j, p);
    }
    Ok(polys)
}

/// Compares a run on the built-in configuration with `golden_text`; an empty
/// list means every field matched.
pub fn verify_example(golden_text: &str) -> Result<Vec<Mismatch>, GoldenError> {
    let golden: Golden = serde_json::from_str(golden_text).map_err(data_err)?;
    let config = Config::parse(EXAMPLE_CONFIG).map_err(|d| data_err(format!("{d:?}")))?;
    let state = JumpState::build(config.model.clone(), config.bounds.clone())?;
    compare(&config, &state, &golden)
}

pub fn compare(config: &Config, state: &JumpState, golden: &Golden) -> Result<Vec<Mismatch>, GoldenError> {
    let mut out = Vec::new();
    let mut check = |field: String, expected: String, found: String| {
        if expected != found {
            out.push(Mismatch { field, expected, found });
        }
    };
    let basis = config.model.basis();
    let value = |s: &str| Value::parse(basis, s).map_err(data_err);

    check(
        "p_chain.length".into(),
        golden.p_length.to_string(),
        state.p_chain().len().to_string(),
    );
    for (k, b) in golden.betas.iter().enumerate() {
        let found = state.p(k + 1).map_or("missing".into(), |p| p.beta.to_string());
        check(format!("P{}.beta", k + 1), value(b)?.to_string(), found);
    }
    for (j, g) in &golden.gammas {
        let found = state.t(*j).map_or("missing".into(), |t| t.gamma.to_string());
        check(format!("T{j}.gamma"), value(g)?.to_string(), found);
    }
    for (j, s) in &golden.s {
        let found = state.t(*j).map_or("missing".into(), |t| t.s.to_string());
        check(format!("T{j}.s"), s.to_string(), found);
        let found = state.t(*j).map_or("missing".into(), |t| t.m.to_string());
        check(format!("T{j}.m"), golden.m.to_string(), found);
    }
    for (j, d) in &golden.d_sets {
        let expected: BTreeSet<PairVec> = d.iter().map(|v| PairVec::from_flat(v, golden.m)).collect();
        let render = |s: &BTreeSet<PairVec>| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let found = match state.t(*j).and_then(|t| t.d_set.as_ref()) {
            Some(ds) => render(&ds.iter().cloned().collect()),
            None => "missing".into(),
        };
        check(format!("T{j}.D"), render(&expected), found);
        let complete = state.t(*j).is_some_and(|t| t.d_complete);
        check(format!("T{j}.D.complete"), "true".into(), complete.to_string());
    }

    let reference = expand_reference(config, golden)?;
    for (j, p) in &reference {
        let found = state.t(*j).map_or("missing".into(), |t| t.poly.to_string());
        check(format!("T{j}.poly"), p.to_string(), found);
    }

    let ext_names: Vec<String> = config
        .model
        .ring()
        .names()
        .iter()
        .cloned()
        .chain(reference.keys().map(|j| format!("T{j}")))
        .collect();
    let ext = VarList::new(&ext_names);
    let mut images: Vec<LaurentPoly> = (0..config.model.ring().len())
        .map(|k| config.model.ring_var(k))
        .collect();
    images.extend(reference.values().cloned());
    for (j, rhs) in &golden.identities {
        let lhs = reference
            .get(j)
            .ok_or_else(|| data_err(format!("identity for undefined T{j}")))?;
        let rhs = LaurentPoly::parse(&ext, rhs, false)
            .map_err(data_err)?
            .substitute(&images)
            .map_err(data_err)?;
        check(
            format!("T{j}.identity"),
            "holds".into(),
            if *lhs == rhs { "holds" } else { "fails" }.into(),
        );
        let engine = match state.t(*j) {
            None => "missing".to_string(),
            Some(t) if t.is_zero() => "zero".into(),
            Some(_) => match redundancy_certificate(state, Target::T(*j), &config.caps)?.certificate() {
                Some(c) => match verify_certificate(state, c) {
                    Ok(()) => "certificate".into(),
                    Err(e) => format!("invalid certificate ({e})"),
                },
                None => "no certificate".into(),
            },
        };
        let expected = if rhs.is_zero() { "zero" } else { "certificate" };
        check(format!("T{j}.redundancy"), expected.into(), engine);
    }

    let gs = generating_sequence(state, true, &config.caps)?;
    check("sequence.length".into(), golden.sequence.len().to_string(), gs.members.len().to_string());
    for (k, (label, poly)) in golden.sequence.iter().enumerate() {
        let expected = LaurentPoly::parse(config.model.ring(), poly, false).map_err(data_err)?;
        let found = gs
            .members
            .get(k)
            .map_or("missing".into(), |m| format!("{} = {}", m.target, m.poly));
        check(format!("sequence.{label}"), format!("{label} = {expected}"), found);
    }
    check("sequence.certified".into(), "true".into(), gs.certified.to_string());
    check("sequence.minimal".into(), "true".into(), gs.minimal.to_string());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_matches_reference() {
        let diffs = verify_example(EXAMPLE_GOLDEN).unwrap();
        assert!(diffs.is_empty(), "{diffs:#?}");
    }

    #[test]
    fn flipped_sign_is_reported() {
        let bad = EXAMPLE_GOLDEN.replace("[\"T8\", \"-x^5*z^2", "[\"T8\", \"x^5*z^2");
        assert_ne!(bad, EXAMPLE_GOLDEN);
        let diffs = verify_example(&bad).unwrap();
        assert_eq!(diffs.len(), 1, "{diffs:#?}");
        assert_eq!(diffs[0].field, "sequence.T8");
    }
}
