//! Exact integer and rational linear algebra on coefficient vectors.
//!
//! Values over a radical basis are identified with their coefficient vectors;
//! after clearing denominators every question about subgroups of the value
//! group becomes a question about integer lattices in `Z^d`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Multiplicity;
use crate::values::{RadicalBasis, Value};

pub(crate) type IVec = Vec<BigInt>;

/// Least common multiple of the coefficient denominators of `values`.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Value>) -> BigInt {
    let mut d = BigInt::one();
    for v in values {
        for c in v.coeffs() {
            d = d.lcm(c.denom());
        }
    }
    d
}

/// `v * denom` as an integer vector, or `None` when it is not integral.
pub(crate) fn scaled_integers(v: &Value, denom: &BigInt) -> Option<IVec> {
    v.coeffs()
        .iter()
        .map(|c| {
            let s = c * BigRational::from_integer(denom.clone());
            if s.is_integer() {
                Some(s.to_integer())
            } else {
                None
            }
        })
        .collect()
}

pub(crate) fn scaled_rationals(v: &Value, denom: &BigInt) -> Vec<BigRational> {
    let d = BigRational::from_integer(denom.clone());
    v.coeffs().iter().map(|c| c * &d).collect()
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_rat(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| y * BigRational::from_integer(x.clone()))
        .sum()
}

/// Divides out the (positive) content.
pub(crate) fn content_free(mut v: IVec) -> IVec {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

/// Divides out the content and makes the first nonzero entry positive.
pub(crate) fn primitive(v: IVec) -> IVec {
    let mut v = content_free(v);
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut v {
                *x = -&*x;
            }
        }
    }
    v
}

/// Row-style Hermite normal form: an echelon basis of the row lattice with
/// positive pivots in strictly increasing columns.
pub(crate) fn hnf(rows: &[IVec], dim: usize) -> Vec<IVec> {
    let mut active: Vec<IVec> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut basis: Vec<IVec> = Vec::new();
    for col in 0..dim {
        loop {
            let nz: Vec<usize> = (0..active.len())
                .filter(|&r| !active[r][col].is_zero())
                .collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz
                .iter()
                .min_by(|&&a, &&b| active[a][col].abs().cmp(&active[b][col].abs()))
                .expect("nonempty");
            let prow = active[piv].clone();
            for &r in &nz {
                if r == piv {
                    continue;
                }
                let f = active[r][col].div_floor(&prow[col]);
                for (x, p) in active[r].iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
            active.retain(|r| r.iter().any(|x| !x.is_zero()));
        }
        if let Some(pos) = active.iter().position(|r| !r[col].is_zero()) {
            let mut row = active.swap_remove(pos);
            if row[col].is_negative() {
                for x in &mut row {
                    *x = -&*x;
                }
            }
            for prev in &mut basis {
                let f = prev[col].div_floor(&row[col]);
                if !f.is_zero() {
                    for (x, p) in prev.iter_mut().zip(&row) {
                        *x -= &f * p;
                    }
                }
            }
            basis.push(row);
        }
    }
    basis
}

/// Integer basis of the rational nullspace `{v : row . v = 0 for all rows}`.
pub(crate) fn nullspace(rows: &[IVec], dim: usize) -> Vec<IVec> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in &mut m[row] {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..dim {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); dim];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        let den = v.iter().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
        let ints: IVec = v
            .iter()
            .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        out.push(primitive(ints));
    }
    out
}

/// Membership in the row lattice of an echelon basis returned by [`hnf`].
pub(crate) fn in_echelon_lattice(basis: &[IVec], v: &[BigInt]) -> bool {
    let mut rem = v.to_vec();
    for row in basis {
        let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
        if !rem[p].is_multiple_of(&row[p]) {
            return false;
        }
        let f = &rem[p] / &row[p];
        for (x, r) in rem.iter_mut().zip(row) {
            *x -= &f * r;
        }
    }
    rem.iter().all(Zero::is_zero)
}

/// Facet normals of the cone spanned by `gens` inside their linear span:
/// integer functionals that are nonnegative on every generator and vanish on
/// a codimension-one face. `eqs` is a basis of the annihilator of the span.
pub(crate) fn cone_facets(gens: &[IVec], eqs: &[IVec], dim: usize) -> Vec<IVec> {
    let mut dirs: Vec<IVec> = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .map(|g| content_free(g.clone()))
        .collect();
    dirs.sort();
    dirs.dedup();
    let r = dim - eqs.len();
    if r == 0 || dirs.is_empty() {
        return Vec::new();
    }
    let mut found: Vec<IVec> = Vec::new();
    let k = r - 1;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut rows: Vec<IVec> = idx.iter().map(|&i| dirs[i].clone()).collect();
        rows.extend(eqs.iter().cloned());
        let ns = nullspace(&rows, dim);
        if ns.len() == 1 {
            let phi = &ns[0];
            let signs: Vec<BigInt> = dirs.iter().map(|g| dot(phi, g)).collect();
            let all_nonneg = signs.iter().all(|s| !s.is_negative());
            let all_nonpos = signs.iter().all(|s| !s.is_positive());
            let oriented = if all_nonneg {
                Some(phi.clone())
            } else if all_nonpos {
                Some(phi.iter().map(|x| -x).collect())
            } else {
                None
            };
            if let Some(f) = oriented {
                if !found.contains(&f) {
                    found.push(f);
                }
            }
        }
        // next k-combination of 0..dirs.len()
        let n = dirs.len();
        let mut pos = k;
        loop {
            if pos == 0 {
                found.sort();
                return found;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The subgroup of the value group generated by a finite list of values.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis_ref: Arc<RadicalBasis>,
    denom: BigInt,
    rows: Vec<IVec>,
    annihilator: Vec<IVec>,
}

impl Lattice {
    pub fn new(basis: &Arc<RadicalBasis>, gens: &[Value]) -> Self {
        let dim = basis.len();
        let denom = common_denominator(gens);
        let ints: Vec<IVec> = gens
            .iter()
            .map(|g| scaled_integers(g, &denom).expect("denominator clears"))
            .collect();
        let rows = hnf(&ints, dim);
        let annihilator = nullspace(&rows, dim);
        Self {
            basis_ref: Arc::clone(basis),
            denom,
            rows,
            annihilator,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rational coordinates of `v` in the echelon basis, or `None` when `v`
    /// is outside the rational span.
    fn coordinates(&self, v: &Value) -> Option<Vec<BigRational>> {
        let mut rem = scaled_rationals(v, &self.denom);
        let mut coords = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let c = &rem[p] / BigRational::from_integer(row[p].clone());
            for (x, r) in rem.iter_mut().zip(row) {
                *x -= &c * BigRational::from_integer(r.clone());
            }
            coords.push(c);
        }
        if rem.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn in_span(&self, v: &Value) -> bool {
        self.annihilator
            .iter()
            .all(|a| dot_rat(a, &scaled_rationals(v, &self.denom)).is_zero())
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.coordinates(v)
            .is_some_and(|c| c.iter().all(|x| x.is_integer()))
    }

    /// Least `q >= 1` with `q * v` in the lattice.
    pub fn min_multiple(&self, v: &Value) -> Multiplicity {
        match self.coordinates(v) {
            None => Multiplicity::Infinite,
            Some(c) => {
                let q = c.iter().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
                match u64::try_from(q) {
                    Ok(q) => Multiplicity::Finite(q),
                    Err(_) => Multiplicity::Infinite,
                }
            }
        }
    }

    /// For `beta` outside the rational span, the unique rational `b` such
    /// that `alpha - b * beta` lies in the span (if any).
    pub(crate) fn transversal_coefficient(&self, alpha: &Value, beta: &Value) -> Option<BigRational> {
        let a = scaled_rationals(alpha, &self.denom);
        let b = scaled_rationals(beta, &self.denom);
        let psi = self
            .annihilator
            .iter()
            .find(|psi| !dot_rat(psi, &b).is_zero())?;
        let coef = dot_rat(psi, &a) / dot_rat(psi, &b);
        let rest = alpha.try_sub(&beta.scale(&coef)).ok()?;
        if self.in_span(&rest) {
            Some(coef)
        } else {
            None
        }
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis_ref
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(xs: &[i64]) -> IVec {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_of_dependent_rows() {
        let b = hnf(&[iv(&[2, 4]), iv(&[3, 6]), iv(&[0, 0])], 2);
        assert_eq!(b, vec![iv(&[1, 2])]);
        let b = hnf(&[iv(&[4, 0]), iv(&[6, 1])], 2);
        assert_eq!(b, vec![iv(&[2, 1]), iv(&[0, 2])]);
    }

    #[test]
    fn nullspace_dimensions() {
        let ns = nullspace(&[iv(&[1, 2, 0]), iv(&[0, 0, 1])], 3);
        assert_eq!(ns, vec![iv(&[2, -1, 0])].into_iter().map(primitive).collect::<Vec<_>>());
        assert_eq!(nullspace(&[], 2).len(), 2);
        assert_eq!(nullspace(&[iv(&[1, 1]), iv(&[2, 2])], 2).len(), 1);
    }

    #[test]
    fn echelon_membership() {
        let b = hnf(&[iv(&[4, 0]), iv(&[6, 1])], 2);
        assert!(in_echelon_lattice(&b, &iv(&[2, 1])));
        assert!(in_echelon_lattice(&b, &iv(&[-2, 3])));
        assert!(!in_echelon_lattice(&b, &iv(&[1, 0])));
        assert!(!in_echelon_lattice(&b, &iv(&[0, 1])));
        assert!(in_echelon_lattice(&[], &iv(&[0, 0])));
    }

    #[test]
    fn facets_of_planar_cone() {
        // cone spanned by (1,0) and (-4,5)
        let f = cone_facets(&[iv(&[1, 0]), iv(&[-4, 5]), iv(&[0, 1])], &[], 2);
        assert_eq!(f, vec![iv(&[0, 1]), iv(&[5, 4])]);
        // a ray inside the plane z = 0
        let f = cone_facets(&[iv(&[2, 1, 0])], &[iv(&[1, -2, 0]), iv(&[0, 0, 1])], 3);
        assert_eq!(f, vec![iv(&[2, 1, 0])]);
    }
}
