//! Machine-readable and text reports of a run.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::config::{Config, ConfigDoc};
use crate::error::ChainError;
use crate::grouplat::{Multiplicity, PairVec};
use crate::jumpseq::{JumpState, StopReason, TCase};
use crate::outputs::{
    gr_presentation, generating_sequence, ideal_generators, redundancy_certificate,
    semigroup_values_up_to, Redundancy, Target,
};
use crate::values::{format_rational, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueRow {
    pub expr: String,
    pub decimal: String,
}

impl From<&Value> for ValueRow {
    fn from(v: &Value) -> Self {
        Self {
            expr: v.to_string(),
            decimal: v.to_decimal(12),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PRow {
    pub index: usize,
    pub poly: String,
    pub beta: ValueRow,
    /// Undefined for `P_1`.
    pub q: Option<Multiplicity>,
    pub l: Option<Vec<u32>>,
    pub lambda: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParentRow {
    pub from: usize,
    pub ac: PairVec,
    pub ln: PairVec,
    pub mu: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TRow {
    pub index: usize,
    pub poly: String,
    pub gamma: ValueRow,
    pub case: &'static str,
    pub s: Multiplicity,
    pub m: usize,
    pub parent: Option<ParentRow>,
    pub d_set: Option<Vec<PairVec>>,
    pub d_complete: bool,
    pub successors: Vec<usize>,
    pub dropped_successors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagsRow {
    pub truncated: bool,
    pub p_truncated: bool,
    pub stop: String,
    pub stop_index: Option<usize>,
    pub incomplete_d: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermRow {
    pub coeff: String,
    pub vec: PairVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedundancyRow {
    pub target: String,
    /// `certificate`, `undecided` or `not_eligible`.
    pub outcome: &'static str,
    pub combo: Vec<TermRow>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberRow {
    pub target: String,
    pub poly: String,
    pub value: ValueRow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceRow {
    pub members: Vec<MemberRow>,
    pub dropped: Vec<String>,
    pub certified: bool,
    pub minimal: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationRow {
    pub source: String,
    pub lhs: PairVec,
    pub rhs: PairVec,
    pub scalar: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemigroupRow {
    pub cap: ValueRow,
    pub values: Vec<ValueRow>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorRow {
    pub vec: PairVec,
    pub value: ValueRow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealRow {
    pub sigma: ValueRow,
    pub generators: Vec<GeneratorRow>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportDoc {
    pub config: ConfigDoc,
    pub p_chain: Vec<PRow>,
    pub t_chain: Vec<TRow>,
    pub flags: FlagsRow,
    pub redundancy: Vec<RedundancyRow>,
    pub generating_sequence: SequenceRow,
    pub gr_relations: Vec<RelationRow>,
    pub semigroup: SemigroupRow,
    pub ideals: Vec<IdealRow>,
}

fn terms(combo: &[(num_rational::BigRational, PairVec)]) -> Vec<TermRow> {
    combo
        .iter()
        .map(|(c, v)| TermRow {
            coeff: format_rational(c),
            vec: v.clone(),
        })
        .collect()
}

pub fn ideal_rows(state: &JumpState, config: &Config, sigma: &Value) -> Result<IdealRow, ChainError> {
    let ig = ideal_generators(state, sigma, &config.caps)?;
    let generators = ig
        .generators
        .into_iter()
        .map(|v| Ok(GeneratorRow { value: (&state.value(&v)?).into(), vec: v }))
        .collect::<Result<_, ChainError>>()?;
    Ok(IdealRow {
        sigma: sigma.into(),
        generators,
        complete: ig.complete,
    })
}

impl ReportDoc {
    pub fn build(config: &Config, state: &JumpState) -> Result<Self, ChainError> {
        let p_chain = state
            .p_chain()
            .iter()
            .map(|p| PRow {
                index: p.index,
                poly: p.poly.to_string(),
                beta: (&p.beta).into(),
                q: (p.index > 1).then_some(p.q),
                l: p.l_vec.clone(),
                lambda: p.lambda.as_ref().map(format_rational),
            })
            .collect();
        let t_chain = state
            .t_chain()
            .iter()
            .map(|t| TRow {
                index: t.index,
                poly: t.poly.to_string(),
                gamma: (&t.gamma).into(),
                case: match t.case {
                    TCase::Commensurable => "commensurable",
                    TCase::Incommensurable => "incommensurable",
                    TCase::Zero => "zero",
                },
                s: t.s,
                m: t.m,
                parent: t.parent.as_ref().map(|p| ParentRow {
                    from: p.i,
                    ac: p.ac.clone(),
                    ln: p.ln.clone(),
                    mu: format_rational(&p.mu),
                }),
                d_set: t.d_set.clone(),
                d_complete: t.d_complete,
                successors: t.successors.clone(),
                dropped_successors: t.dropped,
            })
            .collect();
        let f = state.flags();
        let (stop, stop_index) = match f.stop {
            Some(StopReason::Exhausted) => ("exhausted", None),
            Some(StopReason::ValueBound { index }) => ("value_bound", Some(index)),
            Some(StopReason::IndexBound { index }) => ("index_bound", Some(index)),
            None => ("not_run", None),
        };
        let flags = FlagsRow {
            truncated: f.truncated(),
            p_truncated: f.p_truncated,
            stop: stop.into(),
            stop_index,
            incomplete_d: f.incomplete_d.clone(),
        };

        let targets = state
            .p_chain()
            .iter()
            .map(|p| Target::P(p.index))
            .chain(state.t_chain().iter().map(|t| Target::T(t.index)));
        let mut redundancy = Vec::new();
        for target in targets {
            let row = match redundancy_certificate(state, target, &config.caps)? {
                Redundancy::Certificate(c) => RedundancyRow {
                    target: target.to_string(),
                    outcome: "certificate",
                    combo: terms(&c.combo),
                    reason: None,
                },
                Redundancy::Undecided(why) => RedundancyRow {
                    target: target.to_string(),
                    outcome: "undecided",
                    combo: Vec::new(),
                    reason: Some(why),
                },
                Redundancy::NotEligible => RedundancyRow {
                    target: target.to_string(),
                    outcome: "not_eligible",
                    combo: Vec::new(),
                    reason: None,
                },
            };
            redundancy.push(row);
        }

        let gs = generating_sequence(state, true, &config.caps)?;
        let generating_sequence = SequenceRow {
            members: gs
                .members
                .iter()
                .map(|m| MemberRow {
                    target: m.target.to_string(),
                    poly: m.poly.to_string(),
                    value: (&m.value).into(),
                })
                .collect(),
            dropped: gs.dropped.iter().map(|(t, _)| t.to_string()).collect(),
            certified: gs.certified,
            minimal: gs.minimal,
            notes: gs.notes,
        };
        let gr_relations = gr_presentation(state)
            .into_iter()
            .map(|r| RelationRow {
                source: r.source.to_string(),
                lhs: r.lhs,
                rhs: r.rhs,
                scalar: format_rational(&r.scalar),
            })
            .collect();
        let sv = semigroup_values_up_to(state, &config.semigroup_cap, &config.caps)?;
        let semigroup = SemigroupRow {
            cap: (&config.semigroup_cap).into(),
            values: sv.values.iter().map(ValueRow::from).collect(),
            complete: sv.complete,
        };
        let ideals = config
            .sigmas
            .iter()
            .map(|s| ideal_rows(state, config, s))
            .collect::<Result<_, _>>()?;
        Ok(ReportDoc {
            config: config.to_doc(),
            p_chain,
            t_chain,
            flags,
            redundancy,
            generating_sequence,
            gr_relations,
            semigroup,
            ideals,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text rendering; `elapsed` is appended when given.
    pub fn to_text(&self, elapsed: Option<Duration>) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "P-chain");
        for p in &self.p_chain {
            let _ = write!(o, "  P{} = {}  beta = {}", p.index, p.poly, p.beta.expr);
            if let Some(q) = p.q {
                let _ = write!(o, "  q = {q}");
            }
            if let (Some(l), Some(lam)) = (&p.l, &p.lambda) {
                let _ = write!(o, "  L = {l:?}  lambda = {lam}");
            }
            let _ = writeln!(o);
        }
        let _ = writeln!(o, "T-chain");
        for t in &self.t_chain {
            let _ = write!(o, "  T{} = {}\n    gamma = {}  s = {}  m = {}", t.index, t.poly, t.gamma.expr, t.s, t.m);
            if let Some(p) = &t.parent {
                let _ = write!(o, "  from T{}: {} - ({}) {}", p.from, p.ac, p.mu, p.ln);
            }
            let _ = writeln!(o);
            if let Some(d) = &t.d_set {
                let list: Vec<String> = d.iter().map(|v| v.to_string()).collect();
                let mark = if t.d_complete { "" } else { " (search bounded)" };
                let _ = writeln!(o, "    D = {{{}}}{mark}", list.join(", "));
            }
        }
        let f = &self.flags;
        let _ = writeln!(
            o,
            "stop: {}{}  truncated: {}",
            f.stop,
            f.stop_index.map(|i| format!(" at T{i}")).unwrap_or_default(),
            f.truncated
        );
        let _ = writeln!(o, "Redundancy");
        for r in &self.redundancy {
            let body = match r.outcome {
                "certificate" if r.combo.is_empty() => "= 0".to_string(),
                "certificate" => {
                    let parts: Vec<String> = r.combo.iter().map(|t| format!("({}) {}", t.coeff, t.vec)).collect();
                    format!("= {}", parts.join(" + "))
                }
                other => format!("{other}{}", r.reason.as_ref().map(|s| format!(": {s}")).unwrap_or_default()),
            };
            let _ = writeln!(o, "  {} {}", r.target, body);
        }
        let g = &self.generating_sequence;
        let _ = writeln!(o, "Generating sequence (certified: {}, minimal: {})", g.certified, g.minimal);
        for m in &g.members {
            let _ = writeln!(o, "  {} = {}  value {}", m.target, m.poly, m.value.expr);
        }
        for n in &g.notes {
            let _ = writeln!(o, "  note: {n}");
        }
        let _ = writeln!(o, "Graded relations");
        for r in &self.gr_relations {
            let _ = writeln!(o, "  {}: {} = ({}) {}", r.source, r.lhs, r.scalar, r.rhs);
        }
        let vals: Vec<&str> = self.semigroup.values.iter().map(|v| v.expr.as_str()).collect();
        let _ = writeln!(o, "Semigroup up to {}: {}", self.semigroup.cap.expr, vals.join(", "));
        for i in &self.ideals {
            let gens: Vec<String> = i.generators.iter().map(|g| g.vec.to_string()).collect();
            let _ = writeln!(o, "Ideal sigma = {}: {}", i.sigma.expr, gens.join(" "));
        }
        if let Some(e) = elapsed {
            let _ = writeln!(o, "elapsed: {} ms", e.as_millis());
        }
        o
    }
}
