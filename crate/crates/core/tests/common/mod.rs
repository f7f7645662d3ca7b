//! Brute-force oracles shared by the integration tests. They only use the
//! exact value and polynomial types, never the engine's search code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use jumpgen::config::{Config, EXAMPLE_CONFIG};
use jumpgen::grouplat::{Multiplicity, PairVec};
use jumpgen::jumpseq::JumpState;
use jumpgen::laurent::{LaurentPoly, VarList};
use jumpgen::values::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn build(config: &Config) -> JumpState {
    JumpState::build(config.model.clone(), config.bounds.clone()).expect("chain builds")
}

pub fn example() -> (Config, JumpState) {
    let c = Config::parse(EXAMPLE_CONFIG).expect("example config");
    let s = build(&c);
    (c, s)
}

pub fn second_model() -> (Config, JumpState) {
    let text = std::fs::read_to_string(fixture("second_model.json")).unwrap();
    let c = Config::parse(&text).expect("fixture config");
    let s = build(&c);
    (c, s)
}

pub fn val(c: &Config, s: &str) -> Value {
    Value::parse(c.model.basis(), s).unwrap()
}

/// Ring polynomial from text in `x, y, z` and `T1, T2, ...`, with each `Tj`
/// replaced by `t[j]`.
pub fn eval_with_t(c: &Config, text: &str, t: &BTreeMap<usize, LaurentPoly>) -> LaurentPoly {
    let ring = c.model.ring();
    let top = t.keys().max().copied().unwrap_or(0);
    let mut names: Vec<String> = ring.names().to_vec();
    names.extend((1..=top).map(|j| format!("T{j}")));
    let ext = VarList::new(&names);
    let mut images: Vec<LaurentPoly> = (0..ring.len()).map(|k| c.model.ring_var(k)).collect();
    for j in 1..=top {
        images.push(t.get(&j).cloned().unwrap_or_else(|| LaurentPoly::zero(ring)));
    }
    LaurentPoly::parse(&ext, text, false).unwrap().substitute(&images).unwrap()
}

/// Monomial generators: every P and every nonzero T, with their values.
pub struct Gens {
    pub coords: Vec<(bool, usize)>,
    pub values: Vec<Value>,
}

impl Gens {
    /// P_1..P_m and the nonzero T_1..T_n.
    pub fn new(state: &JumpState, m: usize, n: usize) -> Self {
        let mut coords = Vec::new();
        let mut values = Vec::new();
        for p in state.p_chain().iter().take(m) {
            coords.push((true, p.index));
            values.push(p.beta.clone());
        }
        for t in state.t_chain().iter().take(n) {
            if !t.is_zero() {
                coords.push((false, t.index));
                values.push(t.gamma.clone());
            }
        }
        Self { coords, values }
    }

    pub fn all(state: &JumpState) -> Self {
        Self::new(state, state.p_chain().len(), state.t_chain().len())
    }

    pub fn pair(&self, counts: &[u32]) -> PairVec {
        let mut p = vec![0; 64];
        let mut t = vec![0; 64];
        for (&(is_p, k), &n) in self.coords.iter().zip(counts) {
            if is_p {
                p[k - 1] = n;
            } else {
                t[k - 1] = n;
            }
        }
        PairVec::new(p, t)
    }

    pub fn value(&self, counts: &[u32]) -> Value {
        let basis = self.values[0].basis().clone();
        counts
            .iter()
            .zip(&self.values)
            .fold(Value::zero(&basis), |acc, (&n, g)| &acc + &g.scale_int(n as i64))
    }

    /// Every count vector whose value is strictly below `cap`.
    pub fn below(&self, cap: &Value) -> Vec<Vec<u32>> {
        let approx: Vec<f64> = self.values.iter().map(Value::to_f64).collect();
        let limit = cap.to_f64();
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.values.len()];
        fn rec(k: usize, sum: f64, approx: &[f64], limit: f64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if k == approx.len() {
                out.push(cur.clone());
                return;
            }
            let mut s = sum;
            loop {
                rec(k + 1, s, approx, limit, cur, out);
                s += approx[k];
                if s > limit + 1e-9 {
                    break;
                }
                cur[k] += 1;
            }
            cur[k] = 0;
        }
        rec(0, 0.0, &approx, limit, &mut cur, &mut out);
        out.retain(|c| self.value(c) < *cap);
        out
    }
}

/// Whether `target` is a nonnegative integer combination of `gens`. The
/// search runs in floating point; a combination that lands on zero is
/// confirmed exactly.
pub fn semigroup_contains(gens: &[Value], target: &Value) -> bool {
    let approx: Vec<f64> = gens.iter().map(Value::to_f64).collect();
    let mut counts = vec![0i64; gens.len()];
    fn rec(k: usize, rest: f64, approx: &[f64], counts: &mut Vec<i64>, exact: &dyn Fn(&[i64]) -> bool) -> bool {
        if rest.abs() < 1e-7 && exact(counts) {
            return true;
        }
        if rest < -1e-7 || k == approx.len() {
            return false;
        }
        let mut r = rest;
        let mut found = false;
        while r > -1e-7 {
            if rec(k + 1, r, approx, counts, exact) {
                found = true;
                break;
            }
            counts[k] += 1;
            r -= approx[k];
        }
        if !found {
            counts[k] = 0;
        }
        found
    }
    let exact = |c: &[i64]| {
        let sum = c
            .iter()
            .zip(gens)
            .fold(Value::zero(target.basis()), |acc, (&n, g)| &acc + &g.scale_int(n));
        sum == *target
    };
    rec(0, target.to_f64(), &approx, &mut counts, &exact)
}

/// `𝒯` as (vector, stage) pairs read off the built chain: `(q_k E_k | 0)` at
/// stage 0, the elements of each `𝒟_j` and `(0 | E_j)` for zero `T_j` at
/// stage `j`.
pub fn obstacles(state: &JumpState) -> Vec<(PairVec, usize)> {
    let mut out = Vec::new();
    for p in state.p_chain() {
        if p.index > 1 {
            if let Multiplicity::Finite(q) = p.q {
                let mut a = vec![0; p.index];
                a[p.index - 1] = q as u32;
                out.push((PairVec::new(a, vec![]), 0));
            }
        }
    }
    for t in state.t_chain() {
        if t.is_zero() {
            out.push((PairVec::t_unit(t.index), t.index));
        } else if let Some(d) = &t.d_set {
            for v in d {
                out.push((v.clone(), t.index));
            }
        }
    }
    out
}

/// Irreducible with respect to the obstacles of stage below `i`.
pub fn irreducible_at(obs: &[(PairVec, usize)], v: &PairVec, i: usize) -> bool {
    !obs.iter().any(|(o, stage)| *stage < i && o.le(v))
}

/// Checks every `𝒟_i` of the chain: membership in `𝒴_i`, minimality against
/// every proper sub-vector, and the antichain property.
pub fn check_d_sets(state: &JumpState) -> Result<(), String> {
    let obs = obstacles(state);
    for t in state.t_chain() {
        let Some(d) = &t.d_set else { continue };
        if t.is_zero() {
            continue;
        }
        let i = t.index;
        let gens = Gens::new(state, t.m, i - 1).values;
        let in_y = |v: &PairVec| -> bool {
            v.t_at(i) > 0
                && v.p().len() <= t.m
                && v.t().len() <= i
                && irreducible_at(&obs, v, i)
                && semigroup_contains(&gens, &state.value(v).unwrap())
        };
        for (a, v) in d.iter().enumerate() {
            if !in_y(v) {
                return Err(format!("D{i}: {v} does not push into the semigroup"));
            }
            for w in d.iter().skip(a + 1) {
                if v.le(w) || w.le(v) {
                    return Err(format!("D{i}: {v} and {w} are comparable"));
                }
            }
            // every proper sub-vector
            let flat = v.flatten(t.m, i).unwrap();
            let mut cur = vec![0u32; flat.len()];
            loop {
                let mut k = 0;
                while k < flat.len() && cur[k] == flat[k] {
                    cur[k] = 0;
                    k += 1;
                }
                if k == flat.len() {
                    break;
                }
                cur[k] += 1;
                if cur == flat {
                    continue;
                }
                let sub = PairVec::from_flat(&cur, t.m);
                if in_y(&sub) {
                    return Err(format!("D{i}: {v} is not minimal, {sub} also pushes"));
                }
            }
        }
    }
    Ok(())
}

/// Elements of `𝒴_i` of total degree at most `deg` that dominate no element
/// of `𝒟_i`.
pub fn d_set_gaps(state: &JumpState, i: usize, deg: u32) -> Vec<PairVec> {
    let t = state.t(i).unwrap();
    let d = t.d_set.as_ref().unwrap();
    let obs = obstacles(state);
    let gens = Gens::new(state, t.m, i - 1).values;
    let dim = t.m + i;
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if k == cur.len() {
            visit(cur);
            return;
        }
        for x in 0..=left {
            cur[k] = x;
            rec(k + 1, left - x, cur, visit);
        }
        cur[k] = 0;
    }
    rec(0, deg, &mut cur, &mut |flat| {
        if flat[dim - 1] == 0 {
            return;
        }
        let v = PairVec::from_flat(flat, t.m);
        if !irreducible_at(&obs, &v, i) || d.iter().any(|e| e.le(&v)) {
            return;
        }
        if semigroup_contains(&gens, &state.value(&v).unwrap()) {
            out.push(v);
        }
    });
    out
}

/// Irreducible vectors over the processed indices with value below `cap`
/// that share a value.
pub fn value_collisions(state: &JumpState, cap: &Value) -> Vec<(PairVec, PairVec)> {
    let obs = obstacles(state);
    let processed = state.t_chain().iter().take_while(|t| t.d_set.is_some()).count();
    let gens = Gens::new(state, state.p_chain().len(), processed);
    let mut seen: BTreeMap<Value, PairVec> = BTreeMap::new();
    let mut out = Vec::new();
    for c in gens.below(cap) {
        let v = gens.pair(&c);
        if !irreducible_at(&obs, &v, usize::MAX) {
            continue;
        }
        let value = gens.value(&c);
        if let Some(w) = seen.get(&value) {
            out.push((w.clone(), v));
        } else {
            seen.insert(value, v);
        }
    }
    out
}

/// Minimal elements of `{v : |v| ≥ σ}` by plain enumeration and pairwise
/// comparison.
pub fn naive_ideal(state: &JumpState, sigma: &Value) -> BTreeSet<PairVec> {
    let gens = Gens::all(state);
    let mut out = BTreeSet::new();
    if !sigma.is_positive() {
        out.insert(PairVec::zero());
        return out;
    }
    // a generator of value ≥ σ is minimal on its own and is not part of any
    // other minimal element
    let mut small = Vec::new();
    for (k, g) in gens.values.iter().enumerate() {
        if *g >= *sigma {
            let mut c = vec![0; gens.values.len()];
            c[k] = 1;
            out.insert(gens.pair(&c));
        } else {
            small.push(k);
        }
    }
    let sub = Gens {
        coords: small.iter().map(|&k| gens.coords[k]).collect(),
        values: small.iter().map(|&k| gens.values[k].clone()).collect(),
    };
    if sub.values.is_empty() {
        return out;
    }
    let above: Vec<PairVec> = sub
        .below(&sigma.scale_int(2))
        .into_iter()
        .filter(|c| sub.value(c) >= *sigma)
        .map(|c| sub.pair(&c))
        .collect();
    for v in &above {
        if !above.iter().any(|w| w != v && w.le(v)) {
            out.insert(v.clone());
        }
    }
    out
}

/// Construction invariants: `q_k β_k < β_{k+1}`, `ν(P^A T^C) = |(A,C)| =
/// |(L,N)|` and `|(A,C)| < γ` for every nonzero `T_AC`.
pub fn check_invariants(state: &JumpState) -> Result<(), String> {
    let model = state.model();
    for p in state.p_chain() {
        if let (Multiplicity::Finite(q), Some(next)) = (p.q, state.p(p.index + 1)) {
            if p.index > 1 && p.beta.scale_int(q as i64) >= next.beta {
                return Err(format!("q{} beta{} is not below beta{}", p.index, p.index, p.index + 1));
            }
        }
        if model.nu(&p.poly).unwrap() != p.beta {
            return Err(format!("beta{} differs from the valuation of P{}", p.index, p.index));
        }
    }
    for t in state.t_chain() {
        let Some(parent) = &t.parent else { continue };
        let lead = state.monomial_poly(&parent.ac).unwrap();
        let other = state.monomial_poly(&parent.ln).unwrap();
        let v = state.value(&parent.ac).unwrap();
        if model.nu(&lead).unwrap() != v || model.nu(&other).unwrap() != v {
            return Err(format!("T{}: the two monomials do not have value {v}", t.index));
        }
        let diff = &lead - &other.scale(&parent.mu);
        if diff != t.poly {
            return Err(format!("T{} is not P^A T^C - mu P^L T^N", t.index));
        }
        if !t.is_zero() && (model.nu(&t.poly).unwrap() != t.gamma || t.gamma <= v) {
            return Err(format!("T{}: gamma is not above {v}", t.index));
        }
    }
    Ok(())
}
