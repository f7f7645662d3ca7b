//! Group and semigroup questions about the values of the jumping polynomials:
//! commensurability, minimal multiples, semigroup membership, the permissible
//! and irreducible coefficient vectors, and the minimal pushing vectors that
//! drive the construction.

mod linalg;
mod pushing;
mod semigroup;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use linalg::Lattice;
pub use pushing::{minimal_pushing_set, PushingBounds, PushingSet};
pub use semigroup::Semigroup;

use crate::error::GroupError;
use crate::values::{RadicalBasis, Value};

/// A positive integer or infinity (`q_i`, `s_i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub fn finite(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(q) => Some(q),
            Multiplicity::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Multiplicity::Infinite)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(q) => write!(f, "{q}"),
            Multiplicity::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(q) => s.serialize_u64(*q),
            Multiplicity::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(q) => Ok(Multiplicity::Finite(q)),
            Raw::S(s) if s == "infinity" => Ok(Multiplicity::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad multiplicity `{s}`"))),
        }
    }
}

/// A pair `(A, C)` of finitely supported exponent vectors over the P- and
/// T-indices. Index `k` (1-based) of `A` is the exponent of `P_k`. Trailing
/// zeros are trimmed, so equal pairs compare equal regardless of padding.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PairVec {
    p: Vec<u32>,
    t: Vec<u32>,
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

impl PairVec {
    pub fn new(p: Vec<u32>, t: Vec<u32>) -> Self {
        Self {
            p: trim(p),
            t: trim(t),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `E_k` in the P-part.
    pub fn p_unit(k: usize) -> Self {
        let mut p = vec![0; k];
        p[k - 1] = 1;
        Self::new(p, Vec::new())
    }

    /// `E_j` in the T-part.
    pub fn t_unit(j: usize) -> Self {
        let mut t = vec![0; j];
        t[j - 1] = 1;
        Self::new(Vec::new(), t)
    }

    /// Splits a concatenated vector `AC` whose first `m` entries are `A`.
    pub fn from_flat(flat: &[u32], m: usize) -> Self {
        let m = m.min(flat.len());
        Self::new(flat[..m].to_vec(), flat[m..].to_vec())
    }

    pub fn p(&self) -> &[u32] {
        &self.p
    }

    pub fn t(&self) -> &[u32] {
        &self.t
    }

    pub fn p_at(&self, k: usize) -> u32 {
        self.p.get(k.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn t_at(&self, j: usize) -> u32 {
        self.t.get(j.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_empty() && self.t.is_empty()
    }

    /// `self ≼ other` componentwise.
    pub fn le(&self, other: &Self) -> bool {
        self.p.len() <= other.p.len()
            && self.t.len() <= other.t.len()
            && self.p.iter().zip(&other.p).all(|(a, b)| a <= b)
            && self.t.iter().zip(&other.t).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let sum = |a: &[u32], b: &[u32]| {
            (0..a.len().max(b.len()))
                .map(|k| a.get(k).copied().unwrap_or(0) + b.get(k).copied().unwrap_or(0))
                .collect()
        };
        Self::new(sum(&self.p, &other.p), sum(&self.t, &other.t))
    }

    /// `self - other` when `other ≼ self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        let diff = |a: &[u32], b: &[u32]| {
            a.iter()
                .enumerate()
                .map(|(k, x)| x - b.get(k).copied().unwrap_or(0))
                .collect()
        };
        Some(Self::new(diff(&self.p, &other.p), diff(&self.t, &other.t)))
    }

    pub fn degree(&self) -> u64 {
        self.p.iter().chain(&self.t).map(|&x| x as u64).sum()
    }

    /// Concatenation `AC` padded to `m` P-entries and `i` T-entries; `None`
    /// when the support does not fit.
    pub fn flatten(&self, m: usize, i: usize) -> Option<Vec<u32>> {
        if self.p.len() > m || self.t.len() > i {
            return None;
        }
        let mut out = vec![0; m + i];
        out[..self.p.len()].copy_from_slice(&self.p);
        out[m..m + self.t.len()].copy_from_slice(&self.t);
        Some(out)
    }
}

impl fmt::Display for PairVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| {
            if v.is_empty() {
                "0".to_string()
            } else {
                v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "({}|{})", join(&self.p), join(&self.t))
    }
}

/// Graded lexicographic order on concatenated vectors.
pub fn graded_lex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstacle {
    pub vec: PairVec,
    /// The obstacle belongs to `𝒯_i` for every `i > stage`.
    pub stage: usize,
}

/// A finite set of obstacle vectors such as `𝒫`, `𝒯_i` or `𝒟_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObstacleSet {
    members: Vec<Obstacle>,
}

impl ObstacleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vecs(vecs: impl IntoIterator<Item = PairVec>) -> Self {
        Self {
            members: vecs
                .into_iter()
                .map(|vec| Obstacle { vec, stage: 0 })
                .collect(),
        }
    }

    pub fn push(&mut self, vec: PairVec, stage: usize) {
        self.members.push(Obstacle { vec, stage });
    }

    pub fn members(&self) -> &[Obstacle] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// No member is `≼ v`.
    pub fn is_irreducible(&self, v: &PairVec) -> bool {
        self.members.iter().all(|o| !o.vec.le(v))
    }

    /// Irreducibility with respect to `𝒯_i`, the members added before step `i`.
    pub fn is_irreducible_at(&self, v: &PairVec, i: usize) -> bool {
        self.members
            .iter()
            .filter(|o| o.stage < i)
            .all(|o| !o.vec.le(v))
    }
}

/// A generator position in `S_k + U_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    P(usize),
    T(usize),
}

/// Numerical data of the two chains: values, multiplicities, the `m_i`, and
/// the obstacle set `𝒯`, with caches of the lattices `G_k + H_i` and the
/// semigroups `S_k + U_i`.
#[derive(Debug)]
pub struct Tower {
    basis: Arc<RadicalBasis>,
    betas: Vec<Value>,
    qs: Vec<Multiplicity>,
    gammas: Vec<Value>,
    zero_t: Vec<bool>,
    ss: Vec<Option<Multiplicity>>,
    ms: Vec<Option<usize>>,
    obstacles: ObstacleSet,
    lattices: Mutex<HashMap<(usize, usize), Arc<Lattice>>>,
    semigroups: Mutex<HashMap<(usize, usize), Arc<(Semigroup, Vec<Coord>)>>>,
}

impl Clone for Tower {
    fn clone(&self) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            betas: self.betas.clone(),
            qs: self.qs.clone(),
            gammas: self.gammas.clone(),
            zero_t: self.zero_t.clone(),
            ss: self.ss.clone(),
            ms: self.ms.clone(),
            obstacles: self.obstacles.clone(),
            lattices: Mutex::new(self.lattices.lock().expect("cache lock").clone()),
            semigroups: Mutex::new(self.semigroups.lock().expect("cache lock").clone()),
        }
    }
}

impl Tower {
    pub fn new(basis: &Arc<RadicalBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            betas: Vec::new(),
            qs: Vec::new(),
            gammas: Vec::new(),
            zero_t: Vec::new(),
            ss: Vec::new(),
            ms: Vec::new(),
            obstacles: ObstacleSet::new(),
            lattices: Mutex::new(HashMap::new()),
            semigroups: Mutex::new(HashMap::new()),
        }
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    /// Appends `β_k`; its `q_k` starts out infinite until set.
    pub fn push_beta(&mut self, beta: Value) -> usize {
        self.betas.push(beta);
        self.qs.push(Multiplicity::Infinite);
        self.betas.len()
    }

    /// Records a finite `q_k` and adds `(q_k E_k, 0)` to `𝒫`.
    pub fn set_q(&mut self, k: usize, q: u64) {
        self.qs[k - 1] = Multiplicity::Finite(q);
        let mut p = vec![0; k];
        p[k - 1] = q as u32;
        self.obstacles.push(PairVec::new(p, Vec::new()), 0);
    }

    /// Appends `γ_i` (zero for a zero polynomial).
    pub fn push_gamma(&mut self, gamma: Value, zero: bool) -> usize {
        self.gammas.push(gamma);
        self.zero_t.push(zero);
        self.ss.push(None);
        self.ms.push(None);
        self.gammas.len()
    }

    pub fn classify(&mut self, i: usize, s: Multiplicity, m: usize) {
        self.ss[i - 1] = Some(s);
        self.ms[i - 1] = Some(m);
        if self.zero_t[i - 1] {
            self.obstacles.push(PairVec::t_unit(i), i);
        }
    }

    pub fn add_obstacles(&mut self, vecs: &[PairVec], stage: usize) {
        for v in vecs {
            self.obstacles.push(v.clone(), stage);
        }
    }

    pub fn p_len(&self) -> usize {
        self.betas.len()
    }

    pub fn t_len(&self) -> usize {
        self.gammas.len()
    }

    pub fn beta(&self, k: usize) -> Result<&Value, GroupError> {
        self.betas
            .get(k.wrapping_sub(1))
            .ok_or(GroupError::IndexOutOfRange { index: k })
    }

    pub fn q(&self, k: usize) -> Multiplicity {
        self.qs.get(k.wrapping_sub(1)).copied().unwrap_or(Multiplicity::Infinite)
    }

    pub fn gamma(&self, i: usize) -> Result<&Value, GroupError> {
        self.gammas
            .get(i.wrapping_sub(1))
            .ok_or(GroupError::IndexOutOfRange { index: i })
    }

    pub fn is_zero_t(&self, i: usize) -> bool {
        self.zero_t.get(i.wrapping_sub(1)).copied().unwrap_or(false)
    }

    pub fn s(&self, i: usize) -> Option<Multiplicity> {
        self.ss.get(i.wrapping_sub(1)).copied().flatten()
    }

    /// `m_i`, with `m_0 = 1`.
    pub fn m(&self, i: usize) -> Result<usize, GroupError> {
        if i == 0 {
            return Ok(1);
        }
        self.ms
            .get(i - 1)
            .copied()
            .flatten()
            .ok_or(GroupError::IndexOutOfRange { index: i })
    }

    pub fn obstacles(&self) -> &ObstacleSet {
        &self.obstacles
    }

    /// `|(A,C)| = A·β + C·γ`.
    pub fn value(&self, v: &PairVec) -> Result<Value, GroupError> {
        let mut acc = Value::zero(&self.basis);
        for (k, &a) in v.p().iter().enumerate() {
            if a > 0 {
                acc = &acc + &self.beta(k + 1)?.scale_int(a as i64);
            }
        }
        for (j, &c) in v.t().iter().enumerate() {
            if c > 0 {
                acc = &acc + &self.gamma(j + 1)?.scale_int(c as i64);
            }
        }
        Ok(acc)
    }

    fn check_range(&self, k: usize, i: usize) -> Result<(), GroupError> {
        if k > self.p_len() {
            return Err(GroupError::IndexOutOfRange { index: k });
        }
        if i > self.t_len() {
            return Err(GroupError::IndexOutOfRange { index: i });
        }
        Ok(())
    }

    /// The group `G_k + H_i`.
    pub fn lattice(&self, k: usize, i: usize) -> Result<Arc<Lattice>, GroupError> {
        self.check_range(k, i)?;
        if let Some(l) = self.lattices.lock().expect("cache lock").get(&(k, i)) {
            return Ok(Arc::clone(l));
        }
        let gens: Vec<Value> = self.betas[..k]
            .iter()
            .chain(&self.gammas[..i])
            .cloned()
            .collect();
        let l = Arc::new(Lattice::new(&self.basis, &gens));
        self.lattices
            .lock()
            .expect("cache lock")
            .insert((k, i), Arc::clone(&l));
        Ok(l)
    }

    /// The semigroup `S_k + U_i` (zero values dropped) together with the
    /// position of each generator.
    pub fn semigroup(&self, k: usize, i: usize) -> Result<Arc<(Semigroup, Vec<Coord>)>, GroupError> {
        self.check_range(k, i)?;
        if let Some(s) = self.semigroups.lock().expect("cache lock").get(&(k, i)) {
            return Ok(Arc::clone(s));
        }
        let mut gens = Vec::new();
        let mut coords = Vec::new();
        for (idx, b) in self.betas[..k].iter().enumerate() {
            gens.push(b.clone());
            coords.push(Coord::P(idx + 1));
        }
        for (idx, g) in self.gammas[..i].iter().enumerate() {
            if !g.is_zero() {
                gens.push(g.clone());
                coords.push(Coord::T(idx + 1));
            }
        }
        let s = Arc::new((Semigroup::new(&self.basis, &gens)?, coords));
        self.semigroups
            .lock()
            .expect("cache lock")
            .insert((k, i), Arc::clone(&s));
        Ok(s)
    }

    /// Membership in `S_k + U_i` with the witness as a `PairVec`.
    pub fn semigroup_witness(&self, alpha: &Value, k: usize, i: usize) -> Result<Option<PairVec>, GroupError> {
        let sg = self.semigroup(k, i)?;
        let (semigroup, coords) = &*sg;
        Ok(semigroup.contains(alpha)?.map(|w| {
            let mut p = vec![0u32; k];
            let mut t = vec![0u32; i];
            for (c, &n) in coords.iter().zip(&w) {
                match *c {
                    Coord::P(j) => p[j - 1] = n as u32,
                    Coord::T(j) => t[j - 1] = n as u32,
                }
            }
            PairVec::new(p, t)
        }))
    }

    /// Least `j` in `1..=p_len` with `alpha ∈ G_j + H_i`.
    pub fn min_group_level(&self, alpha: &Value, i: usize) -> Result<Option<usize>, GroupError> {
        for j in 1..=self.p_len() {
            if self.lattice(j, i)?.contains(alpha) {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    /// The unique permissible `(L, N)` in `Z^m × Z^i`, `m = max(k, m_i)`, with
    /// `alpha = |(L, N)|`.
    pub fn permissible_decompose(
        &self,
        alpha: &Value,
        k: usize,
        i: usize,
    ) -> Result<(Vec<i64>, Vec<i64>), GroupError> {
        let mut kk = k.max(self.m(i)?);
        self.check_range(kk, i)?;
        let mut ii = i;
        let mut l = vec![0i64; kk];
        let mut n = vec![0i64; i];
        let mut rem = alpha.clone();
        while kk > 0 || ii > 0 {
            if ii == 0 || kk > self.m(ii)? {
                let b = self.beta(kk)?.clone();
                let c = step_coefficient(&*self.lattice(kk - 1, ii)?, &rem, &b)?;
                l[kk - 1] = c;
                rem = &rem - &b.scale_int(c);
                kk -= 1;
            } else {
                if !self.is_zero_t(ii) {
                    let g = self.gamma(ii)?.clone();
                    let c = step_coefficient(&*self.lattice(kk, ii - 1)?, &rem, &g)?;
                    n[ii - 1] = c;
                    rem = &rem - &g.scale_int(c);
                }
                ii -= 1;
            }
        }
        if rem.is_zero() {
            Ok((l, n))
        } else {
            Err(GroupError::NotInGroup)
        }
    }

    /// The unique `(L, N)` in `N_0^m × N_0^i`, `m = max(k, m_i)`, irreducible
    /// with respect to `𝒯` and with `alpha = |(L, N)|`.
    pub fn irreducible_decompose(&self, alpha: &Value, k: usize, i: usize) -> Result<PairVec, GroupError> {
        let mut kk = k.max(self.m(i)?);
        self.check_range(kk, i)?;
        let mut ii = i;
        let mut l = vec![0u32; kk];
        let mut n = vec![0u32; i];
        let mut rem = alpha.clone();
        while kk > 0 || ii > 0 {
            if ii == 0 || kk > self.m(ii)? {
                let w = self
                    .semigroup_witness(&rem, kk, ii)?
                    .ok_or(GroupError::NotInSemigroup)?;
                let b = w.p_at(kk) as u64;
                let c = match self.q(kk) {
                    Multiplicity::Finite(q) => b % q,
                    Multiplicity::Infinite => b,
                };
                l[kk - 1] = c as u32;
                rem = &rem - &self.beta(kk)?.scale_int(c as i64);
                kk -= 1;
            } else {
                if !self.is_zero_t(ii) {
                    let g = self.gamma(ii)?.clone();
                    let lower = self.semigroup(kk, ii - 1)?;
                    let mut j = 0u32;
                    loop {
                        let cand = &rem - &g.scale_int(j as i64);
                        if cand.is_negative() {
                            return Err(GroupError::NotInSemigroup);
                        }
                        if lower.0.contains(&cand)?.is_some() {
                            rem = cand;
                            break;
                        }
                        j += 1;
                    }
                    n[ii - 1] = j;
                }
                ii -= 1;
            }
        }
        if rem.is_zero() {
            Ok(PairVec::new(l, n))
        } else {
            Err(GroupError::NotInSemigroup)
        }
    }
}

/// The coefficient of `g` in the reduction of `rem` modulo `lower`: the least
/// residue when `g` has finite order modulo `lower`, the unique integer
/// otherwise.
fn step_coefficient(lower: &Lattice, rem: &Value, g: &Value) -> Result<i64, GroupError> {
    match lower.min_multiple(g) {
        Multiplicity::Finite(q) => {
            for b in 0..q {
                let cand = rem - &g.scale_int(b as i64);
                if lower.contains(&cand) {
                    return Ok(b as i64);
                }
            }
            Err(GroupError::NotInGroup)
        }
        Multiplicity::Infinite => {
            let c: BigRational = lower
                .transversal_coefficient(rem, g)
                .ok_or(GroupError::NotInGroup)?;
            if !c.is_integer() {
                return Err(GroupError::NotInGroup);
            }
            c.to_integer().to_i64().ok_or(GroupError::Overflow)
        }
    }
}

/// True iff `alpha` lies in the rational span of `gens`.
pub fn is_commensurable(alpha: &Value, gens: &[Value]) -> bool {
    Lattice::new(alpha.basis(), gens).in_span(alpha)
}

/// Least `q >= 1` with `q * alpha` in the group generated by `gens`.
pub fn min_multiple_in_group(alpha: &Value, gens: &[Value]) -> Multiplicity {
    Lattice::new(alpha.basis(), gens).min_multiple(alpha)
}

/// A nonnegative integer combination of `gens` equal to `alpha`, if any.
pub fn semigroup_contains(alpha: &Value, gens: &[Value]) -> Result<Option<Vec<u64>>, GroupError> {
    Semigroup::new(alpha.basis(), gens)?.contains(alpha)
}

/// Indices of the generators that are not nonnegative combinations of the
/// others (for repeated values the first occurrence is kept).
pub fn minimal_semigroup_generators(gens: &[Value]) -> Result<Vec<usize>, GroupError> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let basis = Arc::clone(first.basis());
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by(|&a, &b| gens[a].cmp(&gens[b]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for idx in order {
        let kept_vals: Vec<Value> = kept.iter().map(|&k| gens[k].clone()).collect();
        let sg = Semigroup::new(&basis, &kept_vals).map_err(|e| match e {
            GroupError::NonPositiveGenerator(_) => GroupError::NonPositiveGenerator(idx),
            other => other,
        })?;
        if !gens[idx].is_positive() {
            return Err(GroupError::NonPositiveGenerator(idx));
        }
        if sg.contains(&gens[idx])?.is_none() {
            kept.push(idx);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}
