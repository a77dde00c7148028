//! 3-SAT → 2-out-of-4-SAT.
//!
//! One global reference variable `t` is shared by every gadget. A 3-clause
//! `(x ∨ y ∨ z)` gets four fresh variables `a, b, c, d` and the clauses
//!
//! ```text
//! (¬x, a, b, t)   (y, b, c, t)   (¬z, c, d, t)
//! ```
//!
//! With `t` true each clause asks for exactly one true literal among its
//! other three, which is the classical one-in-three chain for `x ∨ y ∨ z`.
//! Flipping every sign maps satisfying assignments to satisfying
//! assignments, so `t` never needs to be forced.

use super::{occurrence_counts, Assignment, Cnf3, Lit, TwoFourInstance};
use crate::error::{Error, Result};

/// Variable numbering used by [`reduce_to_2of4`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionLayout {
    pub source_vars: usize,
    pub source_clauses: usize,
}

impl ReductionLayout {
    pub fn of(alpha: &Cnf3) -> Self {
        ReductionLayout { source_vars: alpha.num_vars(), source_clauses: alpha.clauses().len() }
    }

    /// 1-based index of the reference variable.
    pub fn reference(&self) -> usize {
        self.source_vars + 1
    }

    /// 1-based indices of `a, b, c, d` for source clause `k`.
    pub fn auxiliaries(&self, k: usize) -> [usize; 4] {
        let base = self.source_vars + 2 + 4 * k;
        [base, base + 1, base + 2, base + 3]
    }

    pub fn total_vars(&self) -> usize {
        self.source_vars + 4 * self.source_clauses + 1
    }
}

fn gadget(layout: &ReductionLayout, k: usize, clause: &[Lit; 3]) -> [[Lit; 4]; 3] {
    let [a, b, c, d] = layout.auxiliaries(k).map(Lit::pos);
    let t = Lit::pos(layout.reference());
    let [x, y, z] = *clause;
    [[x.negated(), a, b, t], [y, b, c, t], [z.negated(), c, d, t]]
}

pub fn reduce_to_2of4(alpha: &Cnf3) -> TwoFourInstance {
    let layout = ReductionLayout::of(alpha);
    let clauses = alpha
        .clauses()
        .iter()
        .enumerate()
        .flat_map(|(k, c)| gadget(&layout, k, c))
        .collect();
    TwoFourInstance::new(layout.total_vars(), clauses)
        .expect("gadget clauses use fresh, distinct, in-range variables")
}

/// Extend a satisfying assignment of `alpha` to one of its reduction, with
/// `t = +1`. Returns `None` when `values` does not satisfy `alpha`.
pub fn lift_assignment(alpha: &Cnf3, values: &[bool]) -> Option<Assignment> {
    let layout = ReductionLayout::of(alpha);
    let mut signs = vec![1i8; layout.total_vars()];
    for (j, &v) in values.iter().enumerate().take(alpha.num_vars()) {
        signs[j] = if v { 1 } else { -1 };
    }
    for (k, c) in alpha.clauses().iter().enumerate() {
        let aux = layout.auxiliaries(k);
        let clauses = gadget(&layout, k, c);
        let found = (0..16u8).find(|bits| {
            for (i, &var) in aux.iter().enumerate() {
                signs[var - 1] = if bits >> i & 1 == 1 { 1 } else { -1 };
            }
            clauses
                .iter()
                .all(|cl| cl.iter().filter(|l| l.holds(&signs)).count() == 2)
        });
        found?;
    }
    Assignment::new(signs).ok()
}

/// Split every variable that occurs in more than `cap` clauses into a chain
/// of copies. Neighbouring copies `p, q` are tied by two fresh variables
/// `u, v` and the clause pair `(p, ¬q, u, v)`, `(p, ¬q, ¬u, ¬v)`, which is
/// satisfiable exactly when `sign(p) = sign(q)` and `sign(u) = −sign(v)`.
/// Every variable of the result occurs at most `cap + 2` times.
pub fn bound_occurrences(beta: &TwoFourInstance, cap: usize) -> Result<TwoFourInstance> {
    if cap < 3 {
        return Err(Error::Domain(format!("occurrence cap must be at least 3, got {cap}")));
    }
    let counts = occurrence_counts(beta.num_vars(), beta.clauses());
    if counts.iter().all(|&c| c <= cap) {
        return Ok(beta.clone());
    }

    let mut clauses = beta.clauses().to_vec();
    let mut links = Vec::new();
    let mut next = beta.num_vars() + 1;

    for var in 1..=beta.num_vars() {
        let total = counts[var - 1];
        if total <= cap {
            continue;
        }
        let occurrences: Vec<(usize, usize)> = clauses
            .iter()
            .enumerate()
            .flat_map(|(k, c)| {
                c.iter()
                    .enumerate()
                    .filter(move |(_, l)| l.var() == var)
                    .map(move |(slot, _)| (k, slot))
            })
            .collect();

        // End copies sit in one link (two extra occurrences), interior
        // copies in two.
        let mut chunks = Vec::new();
        let mut remaining = total;
        loop {
            if !chunks.is_empty() && remaining <= cap {
                chunks.push(remaining);
                break;
            }
            let take = if chunks.is_empty() { cap } else { cap - 2 };
            chunks.push(take);
            remaining -= take;
        }

        let mut copy = var;
        let mut cursor = 0;
        for (i, &len) in chunks.iter().enumerate() {
            if i > 0 {
                let prev = copy;
                copy = next;
                let (u, v) = (next + 1, next + 2);
                next += 3;
                let (p, q) = (Lit::pos(prev), Lit::neg(copy));
                links.push([p, q, Lit::pos(u), Lit::pos(v)]);
                links.push([p, q, Lit::neg(u), Lit::neg(v)]);
            }
            for &(k, slot) in &occurrences[cursor..cursor + len] {
                let old = clauses[k][slot];
                clauses[k][slot] = if old.is_positive() { Lit::pos(copy) } else { Lit::neg(copy) };
            }
            cursor += len;
        }
    }

    clauses.extend(links);
    TwoFourInstance::new(next - 1, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat_io::exhaustive_sat_search;

    #[test]
    fn single_clause_sizes() {
        let alpha = Cnf3::from_ints(3, &[[1, 2, 3]]).unwrap();
        let beta = reduce_to_2of4(&alpha);
        assert_eq!(beta.num_vars(), 8);
        assert_eq!(beta.num_clauses(), 3);
        assert!(exhaustive_sat_search(&beta).unwrap().satisfiable);
    }

    #[test]
    fn empty_formula_gives_reference_only() {
        let alpha = Cnf3::new(0, vec![]).unwrap();
        let beta = reduce_to_2of4(&alpha);
        assert_eq!((beta.num_vars(), beta.num_clauses()), (1, 0));
        assert!(exhaustive_sat_search(&beta).unwrap().satisfiable);
    }

    #[test]
    fn contradiction_is_unsatisfiable() {
        let alpha = Cnf3::from_ints(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
        let beta = reduce_to_2of4(&alpha);
        let out = exhaustive_sat_search(&beta).unwrap();
        assert!(!out.satisfiable);
        assert!(out.max_satisfied < 6);
    }

    #[test]
    fn lift_matches_truth() {
        let alpha = Cnf3::from_ints(3, &[[1, -2, 3], [-1, 2, 2]]).unwrap();
        let beta = reduce_to_2of4(&alpha);
        for bits in 0..8u8 {
            let values: Vec<bool> = (0..3).map(|j| bits >> j & 1 == 1).collect();
            match lift_assignment(&alpha, &values) {
                Some(a) => {
                    assert!(alpha.is_satisfied_by(&values));
                    assert!(beta.is_satisfied_by(&a));
                }
                None => assert!(!alpha.is_satisfied_by(&values)),
            }
        }
    }

    #[test]
    fn equality_gadget_truth_table() {
        // (t_a, ¬t_b, u, v), (t_a, ¬t_b, ¬u, ¬v) over variables 1..=4
        let g = TwoFourInstance::from_ints(4, &[[1, -2, 3, 4], [1, -2, -3, -4]]).unwrap();
        for bits in 0..16u64 {
            let a = Assignment::from_bits(bits, 4);
            let s = a.signs();
            let expected = s[0] == s[1] && s[2] == -s[3];
            assert_eq!(g.is_satisfied_by(&a), expected, "bits {bits:04b}");
        }
    }

    #[test]
    fn within_cap_is_identity() {
        let beta = TwoFourInstance::from_ints(5, &[[1, 2, 3, 4], [-1, 2, 3, 5]]).unwrap();
        assert_eq!(bound_occurrences(&beta, 3).unwrap(), beta);
        assert!(bound_occurrences(&beta, 2).is_err());
    }

    #[test]
    fn split_respects_cap_plus_two() {
        let alpha = Cnf3::from_ints(3, &[[1, 2, 3], [-1, 2, -3], [1, -2, 3]]).unwrap();
        let beta = reduce_to_2of4(&alpha);
        assert_eq!(beta.stats().max, 9);
        for cap in 3..=8 {
            let bounded = bound_occurrences(&beta, cap).unwrap();
            assert!(bounded.stats().max <= cap + 2, "cap {cap}: {:?}", bounded.stats());
        }
    }
}
