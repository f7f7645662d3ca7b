//! The jumping polynomials `P_i` and `T_j`.
//!
//! The P-chain starts with `x, y` and continues while `β_i` is commensurable
//! with the earlier values. The T-chain starts with `z`; processing `T_i`
//! computes `s_i, m_i, 𝒟_i` and appends one new polynomial per element of
//! `𝒟_i`. Every polynomial is kept both in the ring variables and expanded in
//! the ambient variables.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::ChainError;
use crate::grouplat::{minimal_pushing_set, Multiplicity, PairVec, PushingBounds, Tower};
use crate::laurent::LaurentPoly;
use crate::valmodel::{ratio_of_initials, InitialTerm, ValuationModel};
use crate::values::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainBounds {
    pub max_p_len: usize,
    /// T-polynomials with a larger global index are not constructed.
    pub max_global_index: usize,
    /// Processing stops at the first `T_i` of larger value; `None` means 20.
    pub max_value: Option<Value>,
    pub pushing: PushingBounds,
}

impl Default for ChainBounds {
    fn default() -> Self {
        Self {
            max_p_len: 16,
            max_global_index: 64,
            max_value: None,
            pushing: PushingBounds::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PJump {
    pub index: usize,
    pub poly: LaurentPoly,
    pub expansion: Arc<LaurentPoly>,
    pub initial: InitialTerm,
    pub beta: Value,
    pub q: Multiplicity,
    /// `L(i)` and `λ_i`, present when `q_i` is finite and `P_{i+1}` was built.
    pub l_vec: Option<Vec<u32>>,
    pub lambda: Option<BigRational>,
}

/// How `T_j = P^A T^C − μ P^L T^N` arose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parent {
    pub i: usize,
    pub ac: PairVec,
    pub ln: PairVec,
    pub mu: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TCase {
    /// `γ_i` commensurable with `G + H_{i-1}`.
    Commensurable,
    Incommensurable,
    Zero,
}

#[derive(Clone, Debug)]
pub struct TJump {
    pub index: usize,
    pub poly: LaurentPoly,
    pub expansion: Arc<LaurentPoly>,
    pub initial: Option<InitialTerm>,
    pub gamma: Value,
    pub case: TCase,
    pub s: Multiplicity,
    pub m: usize,
    pub parent: Option<Parent>,
    /// `𝒟_i`, present once `T_i` has been processed.
    pub d_set: Option<Vec<PairVec>>,
    pub d_complete: bool,
    /// Global indices of the successors that were built.
    pub successors: Vec<usize>,
    /// Elements of `𝒟_i` whose successor fell beyond the index bound.
    pub dropped: usize,
}

impl TJump {
    pub fn is_zero(&self) -> bool {
        self.case == TCase::Zero
    }

    pub fn processed(&self) -> bool {
        self.d_set.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Every constructed `T` was processed.
    Exhausted,
    ValueBound { index: usize },
    IndexBound { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainFlags {
    /// The P-chain hit `max_p_len` while still commensurable.
    pub p_truncated: bool,
    pub stop: Option<StopReason>,
    /// Indices `i` whose `𝒟_i` search was cut by its bounds.
    pub incomplete_d: Vec<usize>,
}

impl ChainFlags {
    /// True when some jumping polynomial was not constructed.
    pub fn truncated(&self) -> bool {
        self.p_truncated
            || !matches!(self.stop, Some(StopReason::Exhausted))
            || !self.incomplete_d.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct JumpState {
    model: Arc<ValuationModel>,
    tower: Tower,
    p_chain: Vec<PJump>,
    t_chain: Vec<TJump>,
    bounds: ChainBounds,
    flags: ChainFlags,
    max_value: Value,
    processed: usize,
    next_index: usize,
}

fn consistency(msg: String) -> ChainError {
    ChainError::consistency(msg)
}

/// Builds `P_1, P_2, …` into `tower`; the flag reports truncation.
fn p_chain_into(
    model: &ValuationModel,
    tower: &mut Tower,
    max_len: usize,
) -> Result<(Vec<PJump>, bool), ChainError> {
    let mut chain: Vec<PJump> = Vec::new();
    let mut next = Some(model.ring_var(0));
    let mut truncated = false;
    while let Some(poly) = next.take() {
        if chain.len() >= max_len {
            truncated = true;
            break;
        }
        let expansion = model.expand(&poly)?;
        let initial = model.initial_of_expansion(&expansion)?;
        let beta = initial.value.clone();
        let i = tower.push_beta(beta.clone());
        chain.push(PJump {
            index: i,
            poly,
            expansion,
            initial,
            beta: beta.clone(),
            q: Multiplicity::Infinite,
            l_vec: None,
            lambda: None,
        });
        if i == 1 {
            next = Some(model.ring_var(1));
            continue;
        }
        let q = match tower.lattice(i - 1, 0)?.min_multiple(&beta) {
            Multiplicity::Finite(q) => q,
            Multiplicity::Infinite => break,
        };
        let target = beta.scale_int(q as i64);
        let l = tower.irreducible_decompose(&target, i - 1, 0)?;
        let lvec: Vec<u32> = (1..i).map(|k| l.p_at(k)).collect();
        let pi = &chain[i - 1];
        let lhs_exp = pi.expansion.pow(q as u32);
        let mut rhs_exp = LaurentPoly::one(model.ambient());
        let mut rhs_poly = LaurentPoly::one(model.ring());
        for (k, &a) in lvec.iter().enumerate() {
            if a > 0 {
                rhs_exp = &rhs_exp * &chain[k].expansion.pow(a);
                rhs_poly = &rhs_poly * &chain[k].poly.pow(a);
            }
        }
        let lambda = ratio_of_initials(
            &model.initial_of_expansion(&lhs_exp)?,
            &model.initial_of_expansion(&rhs_exp)?,
        )
        .map_err(|_| consistency(format!("P_{}^{q} and P^L(i) have different initial terms", i)))?;
        if lambda.is_zero() {
            return Err(consistency(format!("zero residue at P_{i}")));
        }
        let new_poly = &pi.poly.pow(q as u32) - &rhs_poly.scale(&lambda);
        if new_poly.is_zero() {
            return Err(consistency(format!("P_{} vanishes", i + 1)));
        }
        tower.set_q(i, q);
        let last = chain.last_mut().expect("nonempty chain");
        last.q = Multiplicity::Finite(q);
        last.l_vec = Some(lvec);
        last.lambda = Some(lambda);
        let next_beta = model.nu(&new_poly)?;
        if next_beta <= target {
            return Err(consistency(format!("β_{} does not exceed q_{i}·β_{i}", i + 1)));
        }
        next = Some(new_poly);
    }
    Ok((chain, truncated))
}

/// The P-chain alone, with its truncation flag.
pub fn build_p_chain(model: &ValuationModel, max_len: usize) -> Result<(Vec<PJump>, bool), ChainError> {
    let mut tower = Tower::new(model.basis());
    p_chain_into(model, &mut tower, max_len)
}

impl JumpState {
    /// Builds the P-chain and `T_1 = z`; nothing is processed yet.
    pub fn new(model: ValuationModel, bounds: ChainBounds) -> Result<Self, ChainError> {
        let model = Arc::new(model);
        let mut tower = Tower::new(model.basis());
        let (p_chain, p_truncated) = p_chain_into(&model, &mut tower, bounds.max_p_len.max(1))?;
        let max_value = match &bounds.max_value {
            Some(v) => v.clone(),
            None => Value::from_integer(model.basis(), 20),
        };
        let mut state = Self {
            model: Arc::clone(&model),
            tower,
            p_chain,
            t_chain: Vec::new(),
            bounds,
            flags: ChainFlags {
                p_truncated,
                stop: None,
                incomplete_d: Vec::new(),
            },
            max_value,
            processed: 0,
            next_index: 2,
        };
        let z = model.ring_var(2);
        let e = model.expand(&z)?;
        state.push_t(z, e, None)?;
        Ok(state)
    }

    /// [`JumpState::new`] followed by [`JumpState::build_t_chain`].
    pub fn build(model: ValuationModel, bounds: ChainBounds) -> Result<Self, ChainError> {
        let mut s = Self::new(model, bounds)?;
        s.build_t_chain()?;
        Ok(s)
    }

    pub fn model(&self) -> &ValuationModel {
        &self.model
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn bounds(&self) -> &ChainBounds {
        &self.bounds
    }

    pub fn flags(&self) -> &ChainFlags {
        &self.flags
    }

    pub fn p_chain(&self) -> &[PJump] {
        &self.p_chain
    }

    pub fn t_chain(&self) -> &[TJump] {
        &self.t_chain
    }

    pub fn p(&self, k: usize) -> Option<&PJump> {
        self.p_chain.get(k.wrapping_sub(1))
    }

    pub fn t(&self, j: usize) -> Option<&TJump> {
        self.t_chain.get(j.wrapping_sub(1))
    }

    /// Number of processed `T_i` (always a prefix of the chain).
    pub fn processed(&self) -> usize {
        self.processed
    }

    /// `|(A, C)|`.
    pub fn value(&self, v: &PairVec) -> Result<Value, ChainError> {
        Ok(self.tower.value(v)?)
    }

    /// `P^A T^C` in the ring variables.
    pub fn monomial_poly(&self, v: &PairVec) -> Result<LaurentPoly, ChainError> {
        let mut out = LaurentPoly::one(self.model.ring());
        for (k, &a) in v.p().iter().enumerate() {
            if a > 0 {
                let p = self.p(k + 1).ok_or(ChainError::Group(
                    crate::error::GroupError::IndexOutOfRange { index: k + 1 },
                ))?;
                out = &out * &p.poly.pow(a);
            }
        }
        for (j, &c) in v.t().iter().enumerate() {
            if c > 0 {
                let t = self.t(j + 1).ok_or(ChainError::Group(
                    crate::error::GroupError::IndexOutOfRange { index: j + 1 },
                ))?;
                out = &out * &t.poly.pow(c);
            }
        }
        Ok(out)
    }

    /// `P^A T^C` expanded in the ambient variables.
    pub fn monomial_expansion(&self, v: &PairVec) -> Result<LaurentPoly, ChainError> {
        let mut out = LaurentPoly::one(self.model.ambient());
        for (k, &a) in v.p().iter().enumerate() {
            if a > 0 {
                let p = self.p(k + 1).ok_or(ChainError::Group(
                    crate::error::GroupError::IndexOutOfRange { index: k + 1 },
                ))?;
                out = &out * &p.expansion.pow(a);
            }
        }
        for (j, &c) in v.t().iter().enumerate() {
            if c > 0 {
                let t = self.t(j + 1).ok_or(ChainError::Group(
                    crate::error::GroupError::IndexOutOfRange { index: j + 1 },
                ))?;
                out = &out * &t.expansion.pow(c);
            }
        }
        Ok(out)
    }

    /// Initial term of `P^A T^C`: the product of the initial terms.
    pub fn monomial_initial(&self, v: &PairVec) -> Result<InitialTerm, ChainError> {
        let basis = self.model.basis();
        let mut value = Value::zero(basis);
        let mut mono = crate::laurent::Monomial::one(self.model.ambient().len());
        let mut coeff = BigRational::one();
        let factors = v
            .p()
            .iter()
            .enumerate()
            .map(|(k, &a)| (self.p(k + 1).map(|p| Some(&p.initial)), a))
            .chain(
                v.t()
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| (self.t(j + 1).map(|t| t.initial.as_ref()), c)),
            );
        for (init, e) in factors {
            if e == 0 {
                continue;
            }
            let init = init
                .ok_or_else(|| consistency(format!("monomial {v} uses an unknown index")))?
                .ok_or_else(|| consistency(format!("monomial {v} involves a zero polynomial")))?;
            for _ in 0..e {
                value = &value + &init.value;
                mono = mono.mul(&init.monomial);
                coeff *= &init.coefficient;
            }
        }
        Ok(InitialTerm {
            value,
            monomial: mono,
            coefficient: coeff,
        })
    }

    fn push_t(
        &mut self,
        poly: LaurentPoly,
        expansion: Arc<LaurentPoly>,
        parent: Option<Parent>,
    ) -> Result<usize, ChainError> {
        let (initial, gamma, zero) = if expansion.is_zero() {
            (None, Value::zero(self.model.basis()), true)
        } else {
            let init = self.model.initial_of_expansion(&expansion)?;
            let g = init.value.clone();
            (Some(init), g, false)
        };
        let i = self.tower.push_gamma(gamma.clone(), zero);
        let m_prev = self.tower.m(i - 1)?;
        let p_len = self.tower.p_len();
        let (case, s, m) = if zero {
            (TCase::Zero, Multiplicity::Finite(1), m_prev)
        } else {
            match self.tower.lattice(p_len, i - 1)?.min_multiple(&gamma) {
                Multiplicity::Finite(s) => {
                    let level = self
                        .tower
                        .min_group_level(&gamma.scale_int(s as i64), i - 1)?
                        .ok_or_else(|| consistency(format!("s_{i}·γ_{i} is in no G_j + H_{}", i - 1)))?;
                    (TCase::Commensurable, Multiplicity::Finite(s), m_prev.max(level))
                }
                Multiplicity::Infinite => (TCase::Incommensurable, Multiplicity::Infinite, m_prev),
            }
        };
        self.tower.classify(i, s, m);
        self.t_chain.push(TJump {
            index: i,
            poly,
            expansion,
            initial,
            gamma,
            case,
            s,
            m,
            parent,
            d_set: None,
            d_complete: true,
            successors: Vec::new(),
            dropped: 0,
        });
        Ok(i)
    }

    /// Processes the next unprocessed `T_i`. Returns false once the chain is
    /// exhausted or a bound stops the construction.
    pub fn step_t_chain(&mut self) -> Result<bool, ChainError> {
        if self.flags.stop.is_some() {
            return Ok(false);
        }
        let i = self.processed + 1;
        if i > self.t_chain.len() {
            // Successors dropped by the index bound still count as truncation.
            self.flags.stop = Some(match self.t_chain.iter().find(|t| t.dropped > 0) {
                Some(t) => StopReason::IndexBound { index: t.index },
                None => StopReason::Exhausted,
            });
            return Ok(false);
        }
        let tj = &self.t_chain[i - 1];
        if tj.case != TCase::Commensurable {
            self.t_chain[i - 1].d_set = Some(Vec::new());
            self.processed = i;
            return Ok(true);
        }
        if tj.gamma > self.max_value {
            self.flags.stop = Some(StopReason::ValueBound { index: i });
            return Ok(false);
        }
        if self.next_index > self.bounds.max_global_index {
            self.flags.stop = Some(StopReason::IndexBound { index: i });
            return Ok(false);
        }

        let d = minimal_pushing_set(&self.tower, i, &self.bounds.pushing)?;
        if !d.complete {
            self.flags.incomplete_d.push(i);
        }
        let m = self.tower.m(i)?;
        let mut successors = Vec::new();
        let mut dropped = 0;
        let mut built = Vec::new();
        for ac in &d.members {
            self.check_reduced(ac, i, m)?;
            let index = self.next_index;
            self.next_index += 1;
            if index > self.bounds.max_global_index {
                dropped += 1;
                continue;
            }
            built.push(self.successor(ac, i, m)?);
            successors.push(index);
        }
        self.tower.add_obstacles(&d.members, i);
        for (poly, exp, parent) in built {
            self.push_t(poly, exp, Some(parent))?;
        }
        let t = &mut self.t_chain[i - 1];
        t.d_set = Some(d.members);
        t.d_complete = d.complete;
        t.successors = successors;
        t.dropped = dropped;
        self.processed = i;
        Ok(true)
    }

    /// Runs [`JumpState::step_t_chain`] until it stops.
    pub fn build_t_chain(&mut self) -> Result<(), ChainError> {
        while self.step_t_chain()? {}
        Ok(())
    }

    /// No vector strictly below `ac` with positive last entry pushes `γ_i`.
    fn check_reduced(&self, ac: &PairVec, i: usize, m: usize) -> Result<(), ChainError> {
        let flat = ac
            .flatten(m, i)
            .ok_or_else(|| consistency(format!("𝒟_{i} element {ac} has the wrong shape")))?;
        let sg = self.tower.semigroup(m, i - 1)?;
        let mut cur = vec![0u32; flat.len()];
        loop {
            let last = *cur.last().expect("nonempty");
            if last > 0 && cur != flat {
                let v = self.tower.value(&PairVec::from_flat(&cur, m))?;
                if sg.0.contains(&v)?.is_some() {
                    return Err(consistency(format!("𝒟_{i} element {ac} is not reduced")));
                }
            }
            let mut k = 0;
            loop {
                if k == cur.len() {
                    return Ok(());
                }
                if cur[k] < flat[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    /// `T_AC = P^A T^C − μ P^L T^N` for `(A, C) ∈ 𝒟_i`.
    fn successor(
        &self,
        ac: &PairVec,
        i: usize,
        m: usize,
    ) -> Result<(LaurentPoly, Arc<LaurentPoly>, Parent), ChainError> {
        let obstacles = self.tower.obstacles();
        if !obstacles.is_irreducible_at(ac, i) {
            return Err(consistency(format!("𝒟_{i} element {ac} is reducible")));
        }
        let value = self.tower.value(ac)?;
        let ln = self.tower.irreducible_decompose(&value, m, i - 1)?;
        if !obstacles.is_irreducible_at(&ln, i) {
            return Err(consistency(format!("(L,N) = {ln} for {ac} is reducible")));
        }
        if self.tower.value(&ln)? != value {
            return Err(consistency(format!("(L,N) = {ln} has the wrong value")));
        }
        let mu = ratio_of_initials(&self.monomial_initial(ac)?, &self.monomial_initial(&ln)?)
            .map_err(|_| consistency(format!("initial terms of {ac} and {ln} differ")))?;
        if mu.is_zero() {
            return Err(consistency(format!("zero residue for {ac}")));
        }
        let poly = &self.monomial_poly(ac)? - &self.monomial_poly(&ln)?.scale(&mu);
        let exp = &self.monomial_expansion(ac)? - &self.monomial_expansion(&ln)?.scale(&mu);
        if !exp.is_zero() && self.model.initial_of_expansion(&exp)?.value <= value {
            return Err(consistency(format!("value of T for {ac} does not jump")));
        }
        Ok((
            poly,
            Arc::new(exp),
            Parent {
                i,
                ac: ac.clone(),
                ln,
                mu,
            },
        ))
    }

    /// Global indices of the immediate successors of `T_i`.
    pub fn successors(&self, i: usize) -> Vec<usize> {
        self.t(i).map(|t| t.successors.clone()).unwrap_or_default()
    }

    /// True when `T_j` descends from `T_i` through parent records.
    pub fn is_successor(&self, i: usize, j: usize) -> bool {
        let mut cur = j;
        while let Some(p) = self.t(cur).and_then(|t| t.parent.as_ref()) {
            if p.i == i {
                return true;
            }
            cur = p.i;
        }
        false
    }
}
