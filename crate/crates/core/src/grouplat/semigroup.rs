//! Membership in finitely generated semigroups of positive values.
//!
//! Generators are embedded as integer vectors and processed from the largest
//! value down. At every depth the admissible counts for the current generator
//! are cut out exactly by the facet inequalities and span equations of the
//! cone spanned by the generators that remain, and partial remainders outside
//! the lattice of the remaining generators are discarded immediately.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::linalg::{common_denominator, cone_facets, hnf, nullspace, scaled_integers, IVec};
use crate::error::GroupError;
use crate::values::{RadicalBasis, Value};

type V = Vec<i128>;

fn to_i128(v: &IVec) -> Result<V, GroupError> {
    v.iter()
        .map(|x| x.to_i128().ok_or(GroupError::Overflow))
        .collect()
}

fn dot(a: &[i128], b: &[i128]) -> Result<i128, GroupError> {
    let mut s: i128 = 0;
    for (x, y) in a.iter().zip(b) {
        s = x
            .checked_mul(*y)
            .and_then(|p| s.checked_add(p))
            .ok_or(GroupError::Overflow)?;
    }
    Ok(s)
}

fn axpy(rem: &[i128], c: i128, g: &[i128]) -> Result<V, GroupError> {
    rem.iter()
        .zip(g)
        .map(|(r, x)| {
            c.checked_mul(*x)
                .and_then(|p| r.checked_sub(p))
                .ok_or(GroupError::Overflow)
        })
        .collect()
}

/// Cone and lattice data of a tail of the ordered generator list.
#[derive(Debug)]
struct Tail {
    eqs: Vec<V>,
    facets: Vec<V>,
    lattice: Vec<V>,
}

impl Tail {
    fn new(gens: &[IVec], dim: usize) -> Result<Self, GroupError> {
        let lattice = hnf(gens, dim);
        let eqs = nullspace(&lattice, dim);
        let facets = cone_facets(gens, &eqs, dim);
        Ok(Self {
            eqs: eqs.iter().map(to_i128).collect::<Result<_, _>>()?,
            facets: facets.iter().map(to_i128).collect::<Result<_, _>>()?,
            lattice: lattice.iter().map(to_i128).collect::<Result<_, _>>()?,
        })
    }

    fn in_lattice(&self, v: &[i128]) -> Result<bool, GroupError> {
        let mut rem = v.to_vec();
        for row in &self.lattice {
            let p = row.iter().position(|&x| x != 0).expect("nonzero row");
            if rem[p] % row[p] != 0 {
                return Ok(false);
            }
            let c = rem[p] / row[p];
            rem = axpy(&rem, c, row)?;
        }
        Ok(rem.iter().all(|&x| x == 0))
    }

    fn admits(&self, v: &[i128]) -> Result<bool, GroupError> {
        for e in &self.eqs {
            if dot(e, v)? != 0 {
                return Ok(false);
            }
        }
        for f in &self.facets {
            if dot(f, v)? < 0 {
                return Ok(false);
            }
        }
        self.in_lattice(v)
    }

    /// Range of counts `c >= 0` such that `rem - c*g` satisfies the span
    /// equations and facet inequalities of this tail. `None` when empty;
    /// the upper end is `None` when unbounded.
    fn count_range(&self, rem: &[i128], g: &[i128]) -> Result<Option<(i128, Option<i128>)>, GroupError> {
        let mut lo: i128 = 0;
        let mut hi: Option<i128> = None;
        let tighten_hi = |hi: &mut Option<i128>, v: i128| {
            *hi = Some(hi.map_or(v, |h| h.min(v)));
        };
        for e in &self.eqs {
            let a = dot(e, rem)?;
            let b = dot(e, g)?;
            if b == 0 {
                if a != 0 {
                    return Ok(None);
                }
            } else {
                if a % b != 0 {
                    return Ok(None);
                }
                let c = a / b;
                lo = lo.max(c);
                tighten_hi(&mut hi, c);
            }
        }
        for f in &self.facets {
            let a = dot(f, rem)?;
            let b = dot(f, g)?;
            if b > 0 {
                tighten_hi(&mut hi, a.div_euclid(b));
            } else if b < 0 {
                // a - c*b >= 0 with b < 0  <=>  c >= -a/|b|
                let c = -(a.div_euclid(-b));
                lo = lo.max(c);
            } else if a < 0 {
                return Ok(None);
            }
        }
        if let Some(h) = hi {
            if h < lo {
                return Ok(None);
            }
        }
        Ok(Some((lo, hi)))
    }
}

/// The semigroup `N g_1 + ... + N g_n` of positive values, with a cache of
/// answered membership queries.
#[derive(Debug)]
pub struct Semigroup {
    basis: Arc<RadicalBasis>,
    values: Vec<Value>,
    denom: BigInt,
    gens: Vec<V>,
    order: Vec<usize>,
    tails: Vec<Tail>,
    cache: Mutex<HashMap<V, Option<Vec<u64>>>>,
}

impl Semigroup {
    pub fn new(basis: &Arc<RadicalBasis>, gens: &[Value]) -> Result<Self, GroupError> {
        for (i, g) in gens.iter().enumerate() {
            if g.basis() != basis {
                return Err(GroupError::Value(crate::error::ValueError::BasisMismatch));
            }
            if !g.is_positive() {
                return Err(GroupError::NonPositiveGenerator(i));
            }
        }
        let dim = basis.len();
        let denom = common_denominator(gens);
        let big: Vec<IVec> = gens
            .iter()
            .map(|g| scaled_integers(g, &denom).expect("denominator clears"))
            .collect();
        let ints: Vec<V> = big.iter().map(to_i128).collect::<Result<_, _>>()?;
        let mut order: Vec<usize> = (0..gens.len()).collect();
        order.sort_by(|&a, &b| gens[b].cmp(&gens[a]).then(a.cmp(&b)));
        let mut tails = Vec::with_capacity(order.len() + 1);
        for j in 0..=order.len() {
            let rest: Vec<IVec> = order[j..].iter().map(|&k| big[k].clone()).collect();
            tails.push(Tail::new(&rest, dim)?);
        }
        Ok(Self {
            basis: Arc::clone(basis),
            values: gens.to_vec(),
            denom,
            gens: ints,
            order,
            tails,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn generators(&self) -> &[Value] {
        &self.values
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    /// Integer embedding of a value on the generators' scale; `None` when the
    /// value is not integral there (and hence outside the semigroup).
    pub(crate) fn embed(&self, v: &Value) -> Result<Option<V>, GroupError> {
        match scaled_integers(v, &self.denom) {
            Some(iv) => Ok(Some(to_i128(&iv)?)),
            None => Ok(None),
        }
    }

    /// Facet normals of the cone spanned by all generators.
    pub(crate) fn facets(&self) -> &[V] {
        &self.tails[0].facets
    }

    pub(crate) fn dot(a: &[i128], b: &[i128]) -> Result<i128, GroupError> {
        dot(a, b)
    }

    /// A witness `w` with `sum w[k] * gens[k] = alpha`, or `None`.
    pub fn contains(&self, alpha: &Value) -> Result<Option<Vec<u64>>, GroupError> {
        if alpha.basis() != &self.basis {
            return Err(GroupError::Value(crate::error::ValueError::BasisMismatch));
        }
        match self.embed(alpha)? {
            None => Ok(None),
            Some(v) => self.contains_embedded(&v),
        }
    }

    pub(crate) fn contains_embedded(&self, v: &[i128]) -> Result<Option<Vec<u64>>, GroupError> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(v) {
            return Ok(hit.clone());
        }
        let mut counts = vec![0u64; self.gens.len()];
        let mut failed = HashSet::new();
        let found = if v.iter().all(|&x| x == 0) {
            true
        } else {
            self.search(0, v, &mut counts, &mut failed)?
        };
        let answer = if found { Some(counts) } else { None };
        self.cache
            .lock()
            .expect("cache lock")
            .insert(v.to_vec(), answer.clone());
        Ok(answer)
    }

    fn search(
        &self,
        depth: usize,
        rem: &[i128],
        counts: &mut [u64],
        failed: &mut HashSet<(usize, V)>,
    ) -> Result<bool, GroupError> {
        let n = self.order.len();
        if depth == n {
            return Ok(rem.iter().all(|&x| x == 0));
        }
        if failed.contains(&(depth, rem.to_vec())) {
            return Ok(false);
        }
        if !self.tails[depth].admits(rem)? {
            failed.insert((depth, rem.to_vec()));
            return Ok(false);
        }
        let gi = self.order[depth];
        let g = &self.gens[gi];
        let range = self.tails[depth + 1].count_range(rem, g)?;
        if let Some((lo, hi)) = range {
            let hi = match hi {
                Some(h) => h,
                None => self.value_bound(rem, gi)?,
            };
            let mut c = hi;
            while c >= lo {
                let next = axpy(rem, c, g)?;
                if self.search(depth + 1, &next, counts, failed)? {
                    counts[gi] = c as u64;
                    return Ok(true);
                }
                c -= 1;
            }
        }
        failed.insert((depth, rem.to_vec()));
        Ok(false)
    }

    /// Largest `c` with `c * gens[gi] <= rem` in real value.
    fn value_bound(&self, rem: &[i128], gi: usize) -> Result<i128, GroupError> {
        let to_value = |v: &[i128]| {
            let coeffs = v
                .iter()
                .map(|x| {
                    num_rational::BigRational::new(BigInt::from(*x), self.denom.clone())
                })
                .collect();
            Value::from_coeffs(&self.basis, coeffs).expect("dimension matches")
        };
        let r = to_value(rem);
        let g = &self.values[gi];
        if !r.is_positive() {
            return Ok(0);
        }
        let est = (r.to_f64() / g.to_f64()).floor();
        let mut c: i128 = if est.is_finite() && est >= 0.0 { est as i128 } else { 0 };
        while g.scale_int(c as i64) > r {
            c -= 1;
        }
        while g.scale_int((c + 1) as i64) <= r {
            c += 1;
        }
        Ok(c.max(0))
    }
}
