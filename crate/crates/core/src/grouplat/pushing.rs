//! The sets `𝒟_i` of minimal pushing vectors.
//!
//! Candidates are written in step units `x = (u, t)`: `u` collects the
//! exponents of `β_1..β_{m_i}, γ_1..γ_{i-1}` and `t` counts copies of
//! `s_i γ_i` (any pushing vector has `c_i` divisible by `s_i`). For fixed `t`
//! the pushing condition is upward closed in `u` while irreducibility is
//! downward closed, so the minimal elements are met first by a breadth-first
//! search in increasing coordinate sum that never expands pushing, reducible
//! or dominated vectors.
//!
//! Unbounded branches are cut by certificates. The open vectors above `x`
//! are covered by finitely many families `y + N^F` (the coordinates outside
//! `F` are fixed). A family is dead when a facet functional `φ` of the cone
//! of `S_{m_i} + U_{i-1}` vanishes on the directions in `F` and no
//! nonnegative combination of generators can match `φ` of the family's
//! values modulo the lattice of the face.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::linalg::{hnf, in_echelon_lattice, IVec};
use super::{graded_lex, PairVec, Tower};
use crate::error::GroupError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PushingBounds {
    /// Largest exponent explored in any coordinate of `u`.
    pub coord_bound: u32,
    /// Largest layer `t` explored.
    pub t_max: u32,
    /// Hard cap on the number of visited vectors.
    pub max_nodes: usize,
}

impl Default for PushingBounds {
    fn default() -> Self {
        Self {
            coord_bound: 16,
            t_max: 16,
            max_nodes: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushingSet {
    /// Sorted by value, ties by graded lex order on the concatenation.
    pub members: Vec<PairVec>,
    /// False when a live vector fell outside the search bounds.
    pub complete: bool,
    pub explored: usize,
}

/// Work limits of a single certificate.
const SPLIT_BUDGET: usize = 20_000;
const KNAPSACK_BUDGET: usize = 100_000;

struct Search<'a> {
    tower: &'a Tower,
    i: usize,
    m: usize,
    s: u32,
    /// Number of coordinates of `u`; `x` has one more.
    n: usize,
    /// Embedded values of the coordinate directions, the last one `s_i γ_i`.
    dirs: Vec<Vec<i128>>,
    facets: Vec<Vec<i128>>,
    /// `φ(dirs[k])` per facet.
    phi_dirs: Vec<Vec<i128>>,
    obstacles: Vec<Vec<u32>>,
    minima: Vec<Vec<u32>>,
}

impl Search<'_> {
    fn pair(&self, x: &[u32]) -> PairVec {
        let mut f = x.to_vec();
        f[self.n] *= self.s;
        PairVec::from_flat(&f, self.m)
    }

    fn closed(&self, x: &[u32]) -> bool {
        let le = |b: &Vec<u32>| b.iter().zip(x).all(|(a, c)| a <= c);
        self.minima.iter().any(le) || self.obstacles.iter().any(le)
    }

    fn value(&self, x: &[u32]) -> Result<Vec<i128>, GroupError> {
        let mut w = vec![0i128; self.dirs[0].len()];
        for (k, &e) in x.iter().enumerate() {
            if e == 0 {
                continue;
            }
            for (wj, dj) in w.iter_mut().zip(&self.dirs[k]) {
                *wj = dj
                    .checked_mul(e as i128)
                    .and_then(|p| wj.checked_add(p))
                    .ok_or(GroupError::Overflow)?;
            }
        }
        Ok(w)
    }

    fn pushes(&self, x: &[u32]) -> Result<bool, GroupError> {
        let w = self.value(x)?;
        let sg = self.tower.semigroup(self.m, self.i - 1)?;
        Ok(sg.0.contains_embedded(&w)?.is_some())
    }

    /// No open vector `≥ x` pushes.
    fn dead(&self, x: &[u32]) -> Result<bool, GroupError> {
        let free: Vec<bool> = vec![true; self.n + 1];
        let mut budget = SPLIT_BUDGET;
        self.dead_family(x.to_vec(), free, &mut budget)
    }

    /// No open vector in `x + N^free` pushes.
    fn dead_family(&self, x: Vec<u32>, free: Vec<bool>, budget: &mut usize) -> Result<bool, GroupError> {
        if self.closed(&x) {
            return Ok(true);
        }
        if *budget == 0 {
            return Ok(false);
        }
        *budget -= 1;
        if self.certify(&x, &free)? {
            return Ok(true);
        }
        // A blocker caps the family once every fixed coordinate reaches it.
        let mut best: Option<(&Vec<u32>, u64)> = None;
        for b in self.minima.iter().chain(&self.obstacles) {
            if b.iter().zip(&x).zip(&free).any(|((bk, xk), f)| !f && bk > xk) {
                continue;
            }
            let cost: u64 = b
                .iter()
                .zip(&x)
                .map(|(bk, xk)| bk.saturating_sub(*xk) as u64)
                .sum();
            if best.map_or(true, |(_, c)| cost < c) {
                best = Some((b, cost));
            }
        }
        let Some((b, _)) = best else {
            return Ok(false);
        };
        let b = b.clone();
        for k in 0..x.len() {
            if !free[k] || b[k] <= x[k] {
                continue;
            }
            let mut sub_free = free.clone();
            sub_free[k] = false;
            for val in x[k]..b[k] {
                let mut y = x.clone();
                y[k] = val;
                if !self.dead_family(y, sub_free.clone(), budget)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A facet certificate for the whole family `x + N^free`.
    fn certify(&self, x: &[u32], free: &[bool]) -> Result<bool, GroupError> {
        let w = self.value(x)?;
        let n = self.n;
        'facets: for (f, phi) in self.facets.iter().enumerate() {
            let pd = &self.phi_dirs[f];
            if (0..n).any(|k| free[k] && pd[k] != 0) {
                continue;
            }
            let t_free = free[n];
            if t_free && pd[n] > 0 {
                continue;
            }
            let mut lattice_rows: Vec<IVec> = Vec::new();
            for k in 0..n {
                if free[k] || pd[k] == 0 {
                    lattice_rows.push(to_big(&self.dirs[k]));
                }
            }
            if t_free && pd[n] == 0 {
                lattice_rows.push(to_big(&self.dirs[n]));
            }
            let lattice = hnf(&lattice_rows, w.len());
            let positive: Vec<usize> = (0..n).filter(|&k| pd[k] > 0).collect();
            let mut wt = w.clone();
            let mut c = super::Semigroup::dot(phi, &w)?;
            loop {
                if c < 0 {
                    break;
                }
                let mut leaves = KNAPSACK_BUDGET;
                if self.knapsack_hits(&positive, pd, 0, c, wt.clone(), &lattice, &mut leaves)? {
                    continue 'facets;
                }
                if !t_free || pd[n] == 0 {
                    break;
                }
                for (a, d) in wt.iter_mut().zip(&self.dirs[n]) {
                    *a = a.checked_add(*d).ok_or(GroupError::Overflow)?;
                }
                c += pd[n];
            }
            return Ok(true);
        }
        Ok(false)
    }

    /// True when some combination of the `positive` directions with
    /// `φ`-weight `rest` leaves a remainder of `w` in `lattice` (or when the
    /// enumeration budget runs out).
    #[allow(clippy::too_many_arguments)]
    fn knapsack_hits(
        &self,
        positive: &[usize],
        pd: &[i128],
        from: usize,
        rest: i128,
        w: Vec<i128>,
        lattice: &[IVec],
        leaves: &mut usize,
    ) -> Result<bool, GroupError> {
        if rest == 0 {
            if *leaves == 0 {
                return Ok(true);
            }
            *leaves -= 1;
            return Ok(in_echelon_lattice(lattice, &to_big(&w)));
        }
        for idx in from..positive.len() {
            let k = positive[idx];
            if pd[k] > rest {
                continue;
            }
            let mut w2 = w.clone();
            for (a, d) in w2.iter_mut().zip(&self.dirs[k]) {
                *a = a.checked_sub(*d).ok_or(GroupError::Overflow)?;
            }
            if self.knapsack_hits(positive, pd, idx, rest - pd[k], w2, lattice, leaves)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn to_big(v: &[i128]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `𝒟_i`: the minimal vectors `(A, C)` with `c_i > 0`, `|(A,C)|` in
/// `S_{m_i} + U_{i-1}`, irreducible with respect to `𝒯_i`. Requires `T_i ≠ 0`
/// with finite `s_i`; otherwise the set is empty.
pub fn minimal_pushing_set(tower: &Tower, i: usize, bounds: &PushingBounds) -> Result<PushingSet, GroupError> {
    let empty = PushingSet {
        members: Vec::new(),
        complete: true,
        explored: 0,
    };
    if i == 0 || tower.is_zero_t(i) {
        return Ok(empty);
    }
    let s = match tower.s(i) {
        Some(super::Multiplicity::Finite(s)) => s,
        Some(super::Multiplicity::Infinite) => return Ok(empty),
        None => return Err(GroupError::IndexOutOfRange { index: i }),
    };
    let m = tower.m(i)?;
    let n = m + i - 1;
    let sg = tower.semigroup(m, i - 1)?;
    let semigroup = &sg.0;
    let mut dirs = Vec::with_capacity(n + 1);
    for k in 0..n {
        let v = if k < m {
            tower.beta(k + 1)?.clone()
        } else {
            tower.gamma(k - m + 1)?.clone()
        };
        dirs.push(semigroup.embed(&v)?.ok_or(GroupError::NotInGroup)?);
    }
    let step_value = tower.gamma(i)?.scale_int(s as i64);
    dirs.push(semigroup.embed(&step_value)?.ok_or(GroupError::NotInGroup)?);
    let facets: Vec<Vec<i128>> = semigroup.facets().to_vec();
    let phi_dirs = facets
        .iter()
        .map(|phi| {
            dirs.iter()
                .map(|d| super::Semigroup::dot(phi, d))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let obstacles = tower
        .obstacles()
        .members()
        .iter()
        .filter(|o| o.stage < i)
        .filter_map(|o| o.vec.flatten(m, i))
        .collect();
    let mut search = Search {
        tower,
        i,
        m,
        s: s as u32,
        n,
        dirs,
        facets,
        phi_dirs,
        obstacles,
        minima: Vec::new(),
    };

    let mut start = vec![0u32; n + 1];
    start[n] = 1;
    let mut level: BTreeSet<Vec<u32>> = BTreeSet::new();
    level.insert(start);
    let mut overflow: Vec<Vec<u32>> = Vec::new();
    let mut explored = 0usize;
    let mut exhausted = false;
    while !level.is_empty() {
        let mut next: BTreeSet<Vec<u32>> = BTreeSet::new();
        for x in &level {
            explored += 1;
            if explored > bounds.max_nodes {
                exhausted = true;
                break;
            }
            if search.closed(x) {
                continue;
            }
            if search.pushes(x)? {
                search.minima.push(x.clone());
                continue;
            }
            if search.dead(x)? {
                continue;
            }
            for k in 0..=n {
                let mut c = x.clone();
                c[k] += 1;
                if search.closed(&c) {
                    continue;
                }
                let cap = if k == n { bounds.t_max } else { bounds.coord_bound };
                if c[k] > cap {
                    overflow.push(c);
                } else {
                    next.insert(c);
                }
            }
        }
        if exhausted {
            break;
        }
        level = next;
    }

    let mut complete = !exhausted;
    if complete {
        for x in &overflow {
            if !search.dead(x)? {
                complete = false;
                break;
            }
        }
    }

    let mut members: Vec<(crate::values::Value, Vec<u32>, PairVec)> = Vec::new();
    for x in &search.minima {
        let pv = search.pair(x);
        let flat = pv.flatten(m, i).expect("fits");
        members.push((tower.value(&pv)?, flat, pv));
    }
    members.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| graded_lex(&a.1, &b.1)));
    Ok(PushingSet {
        members: members.into_iter().map(|(_, _, p)| p).collect(),
        complete,
        explored,
    })
}
