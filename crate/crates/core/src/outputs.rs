//! Consumers of a built chain: monomial generators of valuation ideals,
//! redundancy certificates, generating sequences, the binomial presentation
//! of the graded algebra, and the value semigroup below a bound.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::ChainError;
use crate::grouplat::{minimal_semigroup_generators, Multiplicity, PairVec};
use crate::jumpseq::{JumpState, TCase};
use crate::laurent::LaurentPoly;
use crate::values::Value;

/// A P- or T-polynomial of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    P(usize),
    T(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::P(i) => write!(f, "P{i}"),
            Target::T(j) => write!(f, "T{j}"),
        }
    }
}

/// The nonzero constructed polynomials as monomial coordinates.
#[derive(Clone, Debug)]
struct Generators {
    coords: Vec<Target>,
    values: Vec<Value>,
}

impl Generators {
    fn of(state: &JumpState) -> Self {
        let mut coords = Vec::new();
        let mut values = Vec::new();
        for p in state.p_chain() {
            coords.push(Target::P(p.index));
            values.push(p.beta.clone());
        }
        for t in state.t_chain() {
            if !t.is_zero() {
                coords.push(Target::T(t.index));
                values.push(t.gamma.clone());
            }
        }
        Self { coords, values }
    }

    fn pair(&self, counts: &[u32]) -> PairVec {
        let mut p = Vec::new();
        let mut t = Vec::new();
        for (c, &n) in self.coords.iter().zip(counts) {
            let (v, k) = match *c {
                Target::P(k) => (&mut p, k),
                Target::T(k) => (&mut t, k),
            };
            if v.len() < k {
                v.resize(k, 0);
            }
            v[k - 1] = n;
        }
        PairVec::new(p, t)
    }

    /// Calls `visit` on every count vector of value at most `cap` (strictly
    /// below when `strict`).
    fn below(&self, cap: &Value, strict: bool, visit: &mut dyn FnMut(&[u32], &Value)) {
        let mut counts = vec![0u32; self.coords.len()];
        let zero = Value::zero(cap.basis());
        self.below_rec(0, &zero, cap, strict, &mut counts, visit);
    }

    fn below_rec(
        &self,
        from: usize,
        acc: &Value,
        cap: &Value,
        strict: bool,
        counts: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32], &Value),
    ) {
        visit(counts, acc);
        for k in from..self.coords.len() {
            let next = acc + &self.values[k];
            let fits = if strict { next < *cap } else { next <= *cap };
            if fits {
                counts[k] += 1;
                self.below_rec(k, &next, cap, strict, counts, visit);
                counts[k] -= 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGenerators {
    /// Minimal exponent vectors, sorted by value then by vector.
    pub generators: Vec<PairVec>,
    /// True when the constructed polynomials contain a certified generating
    /// sequence, so that these monomials generate `I_σ`.
    pub complete: bool,
}

/// The minimal `(A, C)` over the constructed indices with `|(A,C)| ≥ σ`.
pub fn ideal_generators(state: &JumpState, sigma: &Value, caps: &RedundancyCaps) -> Result<IdealGenerators, ChainError> {
    let complete = chain_coverage(state, caps)?.covered;
    if !sigma.is_positive() {
        return Ok(IdealGenerators {
            generators: vec![PairVec::zero()],
            complete,
        });
    }
    let gens = Generators::of(state);
    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    gens.below(sigma, true, &mut |counts, acc| {
        for k in 0..counts.len() {
            let v = acc + &gens.values[k];
            if v < *sigma {
                continue;
            }
            let mut c = counts.to_vec();
            c[k] += 1;
            // minimal when removing any single factor drops below sigma
            let minimal = (0..c.len())
                .filter(|&j| c[j] > 0)
                .all(|j| &v - &gens.values[j] < *sigma);
            if minimal {
                found.insert(c);
            }
        }
    });
    let mut out: Vec<(Value, PairVec)> = found
        .iter()
        .map(|c| {
            let v = c
                .iter()
                .zip(&gens.values)
                .fold(Value::zero(sigma.basis()), |acc, (&n, g)| &acc + &g.scale_int(n as i64));
            (v, gens.pair(c))
        })
        .collect();
    out.sort();
    Ok(IdealGenerators {
        generators: out.into_iter().map(|(_, p)| p).collect(),
        complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundancyCaps {
    /// Terms of value above `ν(target) + slack` are not explored; `None`
    /// means `5·β_1`.
    pub value_slack: Option<Value>,
    /// Largest total degree in `x, y, z` of a term.
    pub degree_cap: u32,
}

impl Default for RedundancyCaps {
    fn default() -> Self {
        Self {
            value_slack: None,
            degree_cap: 40,
        }
    }
}

/// `target = Σ coeff · P^X T^Y` with every `(X, Y)` irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundancyCertificate {
    pub target: Target,
    pub combo: Vec<(BigRational, PairVec)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Redundancy {
    Certificate(RedundancyCertificate),
    /// The bounded search found no certificate.
    Undecided(String),
    /// The value condition for redundancy fails.
    NotEligible,
}

impl Redundancy {
    pub fn certificate(&self) -> Option<&RedundancyCertificate> {
        match self {
            Redundancy::Certificate(c) => Some(c),
            _ => None,
        }
    }
}

fn target_poly(state: &JumpState, target: Target) -> Result<(&LaurentPoly, &LaurentPoly, Value), ChainError> {
    let missing = || ChainError::consistency(format!("{target} was not constructed"));
    match target {
        Target::P(i) => {
            let p = state.p(i).ok_or_else(missing)?;
            Ok((&p.poly, &p.expansion, p.beta.clone()))
        }
        Target::T(j) => {
            let t = state.t(j).ok_or_else(missing)?;
            Ok((&t.poly, &t.expansion, t.gamma.clone()))
        }
    }
}

/// The value condition: `β_i ∈ S_{i-1}`, resp. `γ_j ∈ S_{m_j} + U_{j-1}`.
pub fn is_eligible(state: &JumpState, target: Target) -> Result<bool, ChainError> {
    let tower = state.tower();
    match target {
        Target::P(i) => {
            let p = state
                .p(i)
                .ok_or_else(|| ChainError::consistency(format!("{target} was not constructed")))?;
            if i == 1 {
                return Ok(false);
            }
            Ok(tower.semigroup(i - 1, 0)?.0.contains(&p.beta)?.is_some())
        }
        Target::T(j) => {
            let t = state
                .t(j)
                .ok_or_else(|| ChainError::consistency(format!("{target} was not constructed")))?;
            if t.is_zero() {
                return Ok(true);
            }
            Ok(tower.semigroup(t.m, j - 1)?.0.contains(&t.gamma)?.is_some())
        }
    }
}

fn ring_degree(state: &JumpState, v: &PairVec) -> i64 {
    let mut d = 0;
    for (k, &a) in v.p().iter().enumerate() {
        let deg = state.p(k + 1).and_then(|p| p.poly.total_degree()).unwrap_or(0);
        d += a as i64 * deg;
    }
    for (j, &c) in v.t().iter().enumerate() {
        let deg = state.t(j + 1).and_then(|t| t.poly.total_degree()).unwrap_or(0);
        d += c as i64 * deg;
    }
    d
}

/// Writes `target` as a combination of irreducible monomials over the
/// processed indices by repeatedly cancelling the initial term. When such a
/// combination exists its terms have pairwise distinct values, so this peel
/// finds it.
pub fn redundancy_certificate(
    state: &JumpState,
    target: Target,
    caps: &RedundancyCaps,
) -> Result<Redundancy, ChainError> {
    if !is_eligible(state, target)? {
        return Ok(Redundancy::NotEligible);
    }
    let (poly, expansion, nu) = target_poly(state, target)?;
    let model = state.model();
    let tower = state.tower();
    let slack = match &caps.value_slack {
        Some(s) => s.clone(),
        None => tower.beta(1)?.scale_int(5),
    };
    let ceiling = &nu + &slack;
    let last = state.processed();
    let mut rem = (*expansion).clone();
    let mut combo: Vec<(BigRational, PairVec)> = Vec::new();
    while !rem.is_zero() {
        let init = model.initial_of_expansion(&rem)?;
        if init.value > ceiling {
            return Ok(Redundancy::Undecided(format!(
                "remainder of value {} exceeds the slack",
                init.value
            )));
        }
        let v = match tower.irreducible_decompose(&init.value, tower.p_len(), last) {
            Ok(v) => v,
            Err(crate::error::GroupError::NotInSemigroup) => {
                return Ok(Redundancy::Undecided(format!(
                    "value {} is not reached by the processed indices",
                    init.value
                )))
            }
            Err(e) => return Err(e.into()),
        };
        if ring_degree(state, &v) > caps.degree_cap as i64 {
            return Ok(Redundancy::Undecided(format!("term {v} exceeds the degree cap")));
        }
        let mi = state.monomial_initial(&v)?;
        if mi.monomial != init.monomial {
            return Err(ChainError::consistency(format!(
                "initial monomials of the remainder and of {v} differ"
            )));
        }
        let coeff = &init.coefficient / &mi.coefficient;
        rem = &rem - &state.monomial_expansion(&v)?.scale(&coeff);
        combo.push((coeff, v));
    }
    let cert = RedundancyCertificate { target, combo };
    match verify_certificate(state, &cert) {
        Ok(()) => Ok(Redundancy::Certificate(cert)),
        Err(msg) => {
            let _ = poly;
            Ok(Redundancy::Undecided(msg))
        }
    }
}

/// Re-checks a certificate from scratch: the ring identity, irreducibility
/// and the value conditions.
pub fn verify_certificate(state: &JumpState, cert: &RedundancyCertificate) -> Result<(), String> {
    let (poly, _, nu) = target_poly(state, cert.target).map_err(|e| e.to_string())?;
    let mut sum = LaurentPoly::zero(state.model().ring());
    let mut values = BTreeSet::new();
    let mut vecs = BTreeSet::new();
    let obstacles = state.tower().obstacles();
    for (c, v) in &cert.combo {
        if c.is_zero() {
            return Err(format!("zero coefficient on {v}"));
        }
        if !vecs.insert(v.clone()) {
            return Err(format!("{v} appears twice"));
        }
        if v.t().len() > state.processed() || v.t().iter().enumerate().any(|(j, &c)| c > 0 && state.t(j + 1).map_or(true, |t| t.is_zero())) {
            return Err(format!("{v} uses an unprocessed or zero polynomial"));
        }
        if !obstacles.is_irreducible(v) {
            return Err(format!("{v} is reducible"));
        }
        let val = state.value(v).map_err(|e| e.to_string())?;
        if val < nu {
            return Err(format!("{v} has value below the target"));
        }
        if !values.insert(val) {
            return Err(format!("two terms share the value of {v}"));
        }
        let m = state.monomial_poly(v).map_err(|e| e.to_string())?;
        sum = &sum + &m.scale(c);
    }
    if let Some(min) = values.iter().next() {
        if *min != nu {
            return Err("least term value differs from the target value".into());
        }
    }
    if sum != *poly {
        return Err("the combination does not reproduce the target".into());
    }
    Ok(())
}

/// Whether the constructed polynomials are known to contain a generating
/// sequence, and which indices lack a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub covered: bool,
    pub reasons: Vec<String>,
}

/// Polynomials that were never built descend from unprocessed `T_i` or from
/// successors dropped by the index bound. Successors of a redundant `T` are
/// redundant (they are tails of its certificate), so the constructed
/// polynomials suffice when every such ancestor is redundant.
pub fn chain_coverage(state: &JumpState, caps: &RedundancyCaps) -> Result<Coverage, ChainError> {
    let mut reasons = Vec::new();
    if state.flags().p_truncated {
        reasons.push("the P-chain was truncated".to_string());
    }
    for i in &state.flags().incomplete_d {
        reasons.push(format!("the search for D{i} hit its bounds"));
    }
    for t in state.t_chain() {
        let open = !t.processed() || t.dropped > 0;
        if !open || t.is_zero() {
            continue;
        }
        if t.case == TCase::Incommensurable {
            continue;
        }
        if redundancy_certificate(state, Target::T(t.index), caps)?
            .certificate()
            .is_none()
        {
            reasons.push(format!("T{} has unbuilt successors and no redundancy certificate", t.index));
        }
    }
    Ok(Coverage {
        covered: reasons.is_empty(),
        reasons,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceMember {
    pub target: Target,
    pub poly: LaurentPoly,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSequence {
    pub members: Vec<SequenceMember>,
    /// Dropped as redundant, with their certificates (zero `T` have none).
    pub dropped: Vec<(Target, Option<RedundancyCertificate>)>,
    /// True when the list is a generating sequence: the constructed part
    /// covers the whole chain and every drop is certified.
    pub certified: bool,
    /// True when in addition the values minimally generate their semigroup,
    /// which makes the sequence minimal.
    pub minimal: bool,
    pub notes: Vec<String>,
}

/// The constructed nonzero P's and T's; with `minimal`, redundant ones are
/// dropped.
pub fn generating_sequence(
    state: &JumpState,
    minimal: bool,
    caps: &RedundancyCaps,
) -> Result<GeneratingSequence, ChainError> {
    let coverage = chain_coverage(state, caps)?;
    let mut members = Vec::new();
    let mut dropped = Vec::new();
    for p in state.p_chain() {
        let target = Target::P(p.index);
        if minimal {
            if let Redundancy::Certificate(c) = redundancy_certificate(state, target, caps)? {
                dropped.push((target, Some(c)));
                continue;
            }
        }
        members.push(SequenceMember {
            target,
            poly: p.poly.clone(),
            value: p.beta.clone(),
        });
    }
    for t in state.t_chain() {
        let target = Target::T(t.index);
        if t.is_zero() {
            dropped.push((target, None));
            continue;
        }
        if minimal {
            if let Redundancy::Certificate(c) = redundancy_certificate(state, target, caps)? {
                dropped.push((target, Some(c)));
                continue;
            }
        }
        members.push(SequenceMember {
            target,
            poly: t.poly.clone(),
            value: t.gamma.clone(),
        });
    }
    let mut notes = coverage.reasons;
    let certified = coverage.covered;
    let values: Vec<Value> = members.iter().map(|m| m.value.clone()).collect();
    let kept = minimal_semigroup_generators(&values)?;
    let values_minimal = kept.len() == values.len();
    if !values_minimal {
        let extra: Vec<String> = (0..values.len())
            .filter(|k| !kept.contains(k))
            .map(|k| members[k].target.to_string())
            .collect();
        notes.push(format!(
            "values of {} are generated by the others",
            extra.join(", ")
        ));
    }
    Ok(GeneratingSequence {
        members,
        dropped,
        certified,
        minimal: minimal && certified && values_minimal,
        notes,
    })
}

/// `image(P^lhs) = scalar · image(P^rhs)` in the graded algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrRelation {
    pub source: Target,
    pub lhs: PairVec,
    pub rhs: PairVec,
    pub scalar: BigRational,
}

/// One binomial relation per defining equation of `P_{i+1}` and `T_AC`.
pub fn gr_presentation(state: &JumpState) -> Vec<GrRelation> {
    let mut out = Vec::new();
    for p in state.p_chain() {
        if let (Multiplicity::Finite(q), Some(l), Some(lambda)) = (p.q, &p.l_vec, &p.lambda) {
            let mut lhs = vec![0; p.index];
            lhs[p.index - 1] = q as u32;
            out.push(GrRelation {
                source: Target::P(p.index + 1),
                lhs: PairVec::new(lhs, Vec::new()),
                rhs: PairVec::new(l.clone(), Vec::new()),
                scalar: lambda.clone(),
            });
        }
    }
    for t in state.t_chain() {
        if let Some(parent) = &t.parent {
            out.push(GrRelation {
                source: Target::T(t.index),
                lhs: parent.ac.clone(),
                rhs: parent.ln.clone(),
                scalar: parent.mu.clone(),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupValues {
    pub values: Vec<Value>,
    pub complete: bool,
}

/// Every value `Σ a_i β_i + Σ c_j γ_j ≤ cap` over the constructed indices.
pub fn semigroup_values_up_to(
    state: &JumpState,
    cap: &Value,
    caps: &RedundancyCaps,
) -> Result<SemigroupValues, ChainError> {
    let gens = Generators::of(state);
    let mut set = BTreeSet::new();
    if !cap.is_negative() {
        gens.below(cap, false, &mut |_, v| {
            set.insert(v.clone());
        });
    }
    Ok(SemigroupValues {
        values: set.into_iter().collect(),
        complete: chain_coverage(state, caps)?.covered,
    })
}
