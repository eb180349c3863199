//! Extremal points and ravels.
//!
//! `a` is non-extremal in `A` when some `b ≠ a` in `A` also has `a b⁻¹ a ∈ A`
//! (take `g = b a⁻¹`: then `ga = b` and `g⁻¹a = a b⁻¹ a`). Removing points can
//! only destroy such witnesses, so peeling extremal points converges to the
//! same set in any order: the union of all ravels inside `A`.

use rayon::prelude::*;
use thiserror::Error;

use crate::linrep::{ElementSet, Group};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RavelError {
    #[error("element is not in the set")]
    NotMember,
    #[error("input set is not a ravel ({extremal} extremal points)")]
    NotARavel { extremal: usize },
}

/// For every element, the witness pairs `(b, c)` with `c = a b⁻¹ a`, both in the set.
pub struct TripleTable {
    witnesses: Vec<Vec<(u32, u32)>>,
    /// `dependents[x]` lists elements having a witness pair that involves `x`.
    dependents: Vec<Vec<u32>>,
}

impl TripleTable {
    pub fn build<G: Group>(g: &G, set: &ElementSet<G::Elem>) -> Self {
        let vals: Vec<&G::Elem> = set.iter().map(|e| &e.value).collect();
        let invs: Vec<G::Elem> = vals.par_iter().map(|v| g.inv(v)).collect();
        let n = vals.len();
        let witnesses: Vec<Vec<(u32, u32)>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut w = Vec::new();
                for b in 0..n {
                    if b == a {
                        continue;
                    }
                    let c = g.mul(&g.mul(vals[a], &invs[b]), vals[a]);
                    if let Some(ci) = set.elements.get_index_of(&g.key(&c)) {
                        w.push((b as u32, ci as u32));
                    }
                }
                w
            })
            .collect();
        let mut dependents = vec![Vec::new(); n];
        for (a, ws) in witnesses.iter().enumerate() {
            for &(b, c) in ws {
                dependents[b as usize].push(a as u32);
                dependents[c as usize].push(a as u32);
            }
        }
        for d in dependents.iter_mut() {
            d.sort_unstable();
            d.dedup();
        }
        Self { witnesses, dependents }
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn is_extremal_in(&self, a: usize, alive: &[bool]) -> bool {
        !self.witnesses[a].iter().any(|&(b, c)| alive[b as usize] && alive[c as usize])
    }

    /// Peels extremal points from `alive`, visiting candidates in `order` first.
    pub fn peel(&self, alive: &mut [bool], order: &[usize]) {
        let mut queued = vec![false; alive.len()];
        let mut stack: Vec<usize> = order.iter().rev().copied().filter(|&i| alive[i]).collect();
        for &i in &stack {
            queued[i] = true;
        }
        while let Some(a) = stack.pop() {
            queued[a] = false;
            if !alive[a] || !self.is_extremal_in(a, alive) {
                continue;
            }
            alive[a] = false;
            for &d in self.dependents[a].iter().rev() {
                let d = d as usize;
                if alive[d] && !queued[d] {
                    queued[d] = true;
                    stack.push(d);
                }
            }
        }
    }
}

fn position<G: Group>(g: &G, set: &ElementSet<G::Elem>, a: &G::Elem) -> Result<usize, RavelError> {
    set.elements.get_index_of(&g.key(a)).ok_or(RavelError::NotMember)
}

/// Algorithm 1: does `a` have no witness inside `set`?
pub fn is_extremal<G: Group>(g: &G, a: &G::Elem, set: &ElementSet<G::Elem>) -> Result<bool, RavelError> {
    let ia = position(g, set, a)?;
    let ainv_free = set.iter().enumerate().filter(|(i, _)| *i != ia);
    for (_, b) in ainv_free {
        let c = g.mul(&g.mul(a, &g.inv(&b.value)), a);
        if set.contains(g, &c) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_ravel<G: Group>(g: &G, set: &ElementSet<G::Elem>) -> bool {
    !set.is_empty() && count_extremal(g, set) == 0
}

pub fn count_extremal<G: Group>(g: &G, set: &ElementSet<G::Elem>) -> usize {
    let t = TripleTable::build(g, set);
    let alive = vec![true; t.len()];
    (0..t.len()).filter(|&a| t.is_extremal_in(a, &alive)).count()
}

/// Algorithm 2: the largest ravel in `set` (empty when there is none).
pub fn find_ravel<G: Group>(g: &G, set: &ElementSet<G::Elem>) -> ElementSet<G::Elem> {
    let order: Vec<usize> = (0..set.len()).collect();
    find_ravel_with_order(g, set, &order)
}

/// [`find_ravel`] with a prescribed initial removal order (a permutation of positions).
pub fn find_ravel_with_order<G: Group>(g: &G, set: &ElementSet<G::Elem>, order: &[usize]) -> ElementSet<G::Elem> {
    let t = TripleTable::build(g, set);
    let mut alive = vec![true; t.len()];
    t.peel(&mut alive, order);
    let keep: Vec<usize> = (0..t.len()).filter(|&i| alive[i]).collect();
    set.select(&keep)
}

/// Algorithm 3: a deletion-minimal ravel inside the ravel `set`, scanning
/// candidates in canonical-key order.
pub fn min_ravel<G: Group>(g: &G, set: &ElementSet<G::Elem>) -> Result<ElementSet<G::Elem>, RavelError> {
    let sorted = set.sorted();
    let t = TripleTable::build(g, &sorted);
    let n = t.len();
    let all = vec![true; n];
    let extremal = (0..n).filter(|&a| t.is_extremal_in(a, &all)).count();
    if n == 0 || extremal > 0 {
        return Err(RavelError::NotARavel { extremal });
    }
    let mut current = all;
    'outer: loop {
        for a in 0..n {
            if !current[a] {
                continue;
            }
            let mut trial = current.clone();
            trial[a] = false;
            let order: Vec<usize> = (0..n).collect();
            t.peel(&mut trial, &order);
            if trial.iter().any(|&x| x) {
                current = trial;
                continue 'outer;
            }
        }
        break;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| current[i]).collect();
    Ok(sorted.select(&keep))
}

/// Checks the deletion-minimality postcondition of [`min_ravel`].
pub fn is_deletion_minimal<G: Group>(g: &G, set: &ElementSet<G::Elem>) -> bool {
    let t = TripleTable::build(g, set);
    let n = t.len();
    let order: Vec<usize> = (0..n).collect();
    (0..n).all(|a| {
        let mut alive = vec![true; n];
        alive[a] = false;
        t.peel(&mut alive, &order);
        !alive.iter().any(|&x| x)
    })
}
