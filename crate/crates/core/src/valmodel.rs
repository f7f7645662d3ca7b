//! Monomial valuations composed with a change of variables.
//!
//! The ambient variables carry ℚ-linearly independent values, so every
//! nonzero Laurent polynomial in them has a unique monomial of least value.
//! The ring variables `x, y, z` are given by their ambient images; `ν` of a
//! ring polynomial is read off its expansion.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;

use crate::error::ModelError;
use crate::grouplat::Lattice;
use crate::laurent::{LaurentPoly, Monomial, VarList};
use crate::values::{RadicalBasis, Value};

/// The leading part of an expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialTerm {
    pub value: Value,
    pub monomial: Monomial,
    pub coefficient: BigRational,
}

#[derive(Debug)]
pub struct ValuationModel {
    basis: Arc<RadicalBasis>,
    ambient: Arc<VarList>,
    ambient_values: Vec<Value>,
    ring: Arc<VarList>,
    images: Vec<LaurentPoly>,
    expansions: Mutex<HashMap<LaurentPoly, Arc<LaurentPoly>>>,
}

impl Clone for ValuationModel {
    fn clone(&self) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            ambient: Arc::clone(&self.ambient),
            ambient_values: self.ambient_values.clone(),
            ring: Arc::clone(&self.ring),
            images: self.images.clone(),
            expansions: Mutex::new(HashMap::new()),
        }
    }
}

impl ValuationModel {
    /// Assembles a model without checking it; see [`validate_model`].
    pub fn new_unchecked(
        basis: &Arc<RadicalBasis>,
        ambient: Arc<VarList>,
        ambient_values: Vec<Value>,
        ring: Arc<VarList>,
        images: Vec<LaurentPoly>,
    ) -> Self {
        Self {
            basis: Arc::clone(basis),
            ambient,
            ambient_values,
            ring,
            images,
            expansions: Mutex::new(HashMap::new()),
        }
    }

    /// Assembles and validates a model.
    pub fn new(
        basis: &Arc<RadicalBasis>,
        ambient: Arc<VarList>,
        ambient_values: Vec<Value>,
        ring: Arc<VarList>,
        images: Vec<LaurentPoly>,
    ) -> Result<Self, ModelError> {
        let m = Self::new_unchecked(basis, ambient, ambient_values, ring, images);
        validate_model(&m).map_err(ModelError::Invalid)?;
        Ok(m)
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    pub fn ambient(&self) -> &Arc<VarList> {
        &self.ambient
    }

    pub fn ambient_values(&self) -> &[Value] {
        &self.ambient_values
    }

    pub fn ring(&self) -> &Arc<VarList> {
        &self.ring
    }

    pub fn images(&self) -> &[LaurentPoly] {
        &self.images
    }

    /// The ring variable with the given position as a polynomial.
    pub fn ring_var(&self, index: usize) -> LaurentPoly {
        LaurentPoly::var(&self.ring, index)
    }

    /// Value of an ambient monomial.
    pub fn monomial_value(&self, m: &Monomial) -> Value {
        let mut acc = Value::zero(&self.basis);
        for (e, v) in m.exponents().iter().zip(&self.ambient_values) {
            if *e != 0 {
                acc = &acc + &v.scale_int(*e as i64);
            }
        }
        acc
    }

    /// The ambient expansion of a ring polynomial (memoized).
    pub fn expand(&self, f: &LaurentPoly) -> Result<Arc<LaurentPoly>, ModelError> {
        if let Some(e) = self.expansions.lock().expect("cache lock").get(f) {
            return Ok(Arc::clone(e));
        }
        let e = Arc::new(f.substitute(&self.images)?);
        self.expansions
            .lock()
            .expect("cache lock")
            .insert(f.clone(), Arc::clone(&e));
        Ok(e)
    }

    /// Least-value term of an ambient polynomial.
    pub fn initial_of_expansion(&self, e: &LaurentPoly) -> Result<InitialTerm, ModelError> {
        let mut best: Option<(Value, &Monomial, &BigRational)> = None;
        for (m, c) in e.terms() {
            let v = self.monomial_value(m);
            let better = match &best {
                None => true,
                Some((bv, _, _)) => v < *bv,
            };
            if better {
                best = Some((v, m, c));
            }
        }
        let (value, monomial, coefficient) = best.ok_or(ModelError::ValuationOfZero)?;
        Ok(InitialTerm {
            value,
            monomial: monomial.clone(),
            coefficient: coefficient.clone(),
        })
    }

    /// `ν(f)` for a nonzero ring polynomial.
    pub fn nu(&self, f: &LaurentPoly) -> Result<Value, ModelError> {
        Ok(self.initial_term(f)?.value)
    }

    pub fn initial_term(&self, f: &LaurentPoly) -> Result<InitialTerm, ModelError> {
        let e = self.expand(f)?;
        self.initial_of_expansion(&e)
    }

    /// The residue of `f/g` when `ν(f) = ν(g)`.
    pub fn residue_ratio(&self, f: &LaurentPoly, g: &LaurentPoly) -> Result<BigRational, ModelError> {
        let a = self.initial_term(f)?;
        let b = self.initial_term(g)?;
        ratio_of_initials(&a, &b)
    }
}

/// Residue of the quotient of two expansions with the given initial terms.
pub fn ratio_of_initials(a: &InitialTerm, b: &InitialTerm) -> Result<BigRational, ModelError> {
    if a.value != b.value || a.monomial != b.monomial {
        return Err(ModelError::NotEqualValues);
    }
    Ok(&a.coefficient / &b.coefficient)
}

/// Checks the standing hypotheses and lists every violation.
pub fn validate_model(m: &ValuationModel) -> Result<(), Vec<String>> {
    let mut diags = Vec::new();
    if m.ambient_values.len() != m.ambient.len() {
        diags.push(format!(
            "{} ambient variables but {} values",
            m.ambient.len(),
            m.ambient_values.len()
        ));
    }
    if m.ambient_values.iter().any(|v| **v.basis() != *m.basis) {
        diags.push("ambient values use a different radical basis".into());
    } else if Lattice::new(&m.basis, &m.ambient_values).rank() < m.ambient_values.len() {
        diags.push("ambient values are linearly dependent over the rationals".into());
    }
    if m.ring.len() != 3 {
        diags.push(format!("expected 3 ring variables, found {}", m.ring.len()));
    }
    if m.images.len() != m.ring.len() {
        diags.push(format!(
            "{} ring variables but {} substitutions",
            m.ring.len(),
            m.images.len()
        ));
    }
    for (name, img) in m.ring.names().iter().zip(&m.images) {
        if **img.vars() != *m.ambient {
            diags.push(format!("substitution for `{name}` is not over the ambient variables"));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut values = Vec::new();
    for (k, name) in m.ring.names().iter().enumerate() {
        match m.nu(&m.ring_var(k)) {
            Ok(v) => {
                if !v.is_positive() {
                    diags.push(format!("value of `{name}` is {v}, not positive"));
                }
                values.push(Some(v));
            }
            Err(e) => {
                diags.push(format!("cannot evaluate `{name}`: {e}"));
                values.push(None);
            }
        }
    }
    let names = m.ring.names();
    for k in 1..values.len() {
        if let (Some(a), Some(b)) = (&values[k - 1], &values[k]) {
            if a > b {
                diags.push(format!(
                    "values must be nondecreasing: `{}` has {a} but `{}` has {b}",
                    names[k - 1], names[k]
                ));
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn example() -> ValuationModel {
        let basis = RadicalBasis::new(&[1, 2, 51]).unwrap();
        let amb = VarList::new(&["x", "y", "w"]);
        let vals = vec![
            Value::parse(&basis, "1").unwrap(),
            Value::parse(&basis, "sqrt(2)").unwrap(),
            Value::parse(&basis, "sqrt(51) - 5").unwrap(),
        ];
        let ring = VarList::new(&["x", "y", "z"]);
        let images = vec![
            LaurentPoly::parse(&amb, "x", true).unwrap(),
            LaurentPoly::parse(&amb, "y", true).unwrap(),
            LaurentPoly::parse(&amb, "y^2*x^-1 + y^5*x^-5 + w", true).unwrap(),
        ];
        ValuationModel::new(&basis, amb, vals, ring, images).unwrap()
    }

    fn ring(m: &ValuationModel, s: &str) -> LaurentPoly {
        LaurentPoly::parse(m.ring(), s, false).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn values_of_generators() {
        let m = example();
        assert_eq!(m.nu(&ring(&m, "z")).unwrap(), Value::parse(m.basis(), "2*sqrt(2) - 1").unwrap());
        assert_eq!(m.nu(&ring(&m, "x^7")).unwrap(), Value::parse(m.basis(), "7").unwrap());
        let t2 = m.initial_term(&ring(&m, "x*z - y^2")).unwrap();
        assert_eq!(t2.value, Value::parse(m.basis(), "5*sqrt(2) - 4").unwrap());
        assert_eq!(t2.monomial, Monomial(vec![-4, 5, 0]));
        assert_eq!(t2.coefficient, q(1));
    }

    #[test]
    fn zero_has_no_value() {
        let m = example();
        assert_eq!(m.nu(&ring(&m, "x - x")), Err(ModelError::ValuationOfZero));
    }

    #[test]
    fn residues() {
        let m = example();
        assert_eq!(m.residue_ratio(&ring(&m, "x*z"), &ring(&m, "y^2")).unwrap(), q(1));
        assert_eq!(m.residue_ratio(&ring(&m, "-3*y"), &ring(&m, "y")).unwrap(), q(-3));
        assert_eq!(
            m.residue_ratio(&ring(&m, "x"), &ring(&m, "y")),
            Err(ModelError::NotEqualValues)
        );
    }

    #[test]
    fn rejects_dependent_values() {
        let basis = RadicalBasis::new(&[1, 2]).unwrap();
        let amb = VarList::new(&["u", "v"]);
        let vals = vec![Value::parse(&basis, "1").unwrap(), Value::parse(&basis, "2").unwrap()];
        let ring = VarList::new(&["x", "y", "z"]);
        let images = vec![
            LaurentPoly::parse(&amb, "u", true).unwrap(),
            LaurentPoly::parse(&amb, "v", true).unwrap(),
            LaurentPoly::parse(&amb, "u*v", true).unwrap(),
        ];
        let m = ValuationModel::new_unchecked(&basis, amb, vals, ring, images);
        let diags = validate_model(&m).unwrap_err();
        assert!(diags[0].contains("linearly dependent"), "{diags:?}");
    }

    #[test]
    fn rejects_bad_order() {
        let basis = RadicalBasis::new(&[1, 2, 3]).unwrap();
        let amb = VarList::new(&["u", "v", "w"]);
        let vals = ["1", "sqrt(2)", "sqrt(3)"]
            .iter()
            .map(|s| Value::parse(&basis, s).unwrap())
            .collect();
        let ring = VarList::new(&["x", "y", "z"]);
        let images = vec![
            LaurentPoly::parse(&amb, "v", true).unwrap(),
            LaurentPoly::parse(&amb, "u", true).unwrap(),
            LaurentPoly::parse(&amb, "w", true).unwrap(),
        ];
        let m = ValuationModel::new_unchecked(&basis, amb, vals, ring, images);
        let diags = validate_model(&m).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("nondecreasing"), "{diags:?}");
    }
}
