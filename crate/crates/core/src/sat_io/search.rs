//! Classical decision procedures used as oracles.

use rayon::prelude::*;

use super::{Assignment, Cnf3, Lit, TwoFourInstance};
use crate::error::{Error, Result};

/// Largest instance (in variables) that [`exhaustive_sat_search`] enumerates.
pub const ENUMERATION_LIMIT: usize = 26;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub satisfiable: bool,
    /// Canonical (first variable `+1`) assignment with the most satisfied
    /// clauses; ties go to the smallest bit pattern.
    pub best: Assignment,
    pub max_satisfied: usize,
    /// Number of canonical assignments satisfying every clause.
    pub num_satisfying: u64,
}

/// Per-clause bit masks: `vars` marks the four variables, `neg` the negated
/// ones. With bit `j` set meaning `s_{j+1} = +1`, the number of true
/// literals is `popcount((bits ^ neg) & vars)`.
#[derive(Clone, Copy)]
pub(crate) struct ClauseMask {
    pub vars: u64,
    pub neg: u64,
}

pub(crate) fn masks(clauses: &[[Lit; 4]]) -> Vec<ClauseMask> {
    clauses
        .iter()
        .map(|c| {
            let mut m = ClauseMask { vars: 0, neg: 0 };
            for l in c {
                let bit = 1u64 << (l.var() - 1);
                m.vars |= bit;
                if !l.is_positive() {
                    m.neg |= bit;
                }
            }
            m
        })
        .collect()
}

#[inline]
fn satisfied(masks: &[ClauseMask], bits: u64) -> usize {
    masks
        .iter()
        .filter(|m| ((bits ^ m.neg) & m.vars).count_ones() == 2)
        .count()
}

/// Enumerate all `2^(n−1)` canonical sign vectors (the global flip maps
/// the other half onto these with identical clause counts).
pub fn exhaustive_sat_search(beta: &TwoFourInstance) -> Result<SearchOutcome> {
    let n = beta.num_vars();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { num_vars: n, limit: ENUMERATION_LIMIT });
    }
    let masks = masks(beta.clauses());
    let total = 1u64 << (n - 1);
    let chunks = total.div_ceil(CHUNK);

    let (max_satisfied, best_k, num_satisfying) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut best = (0usize, lo, 0u64);
            let mut first = true;
            for k in lo..hi {
                let s = satisfied(&masks, (k << 1) | 1);
                if s == masks.len() {
                    best.2 += 1;
                }
                if first || s > best.0 {
                    best.0 = s;
                    best.1 = k;
                    first = false;
                }
            }
            best
        })
        .reduce(
            || (0, u64::MAX, 0),
            |a, b| {
                let count = a.2 + b.2;
                let better = if a.1 == u64::MAX {
                    b
                } else if b.1 == u64::MAX {
                    a
                } else if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                };
                (better.0, better.1, count)
            },
        );

    Ok(SearchOutcome {
        satisfiable: max_satisfied == masks.len(),
        best: Assignment::from_bits((best_k << 1) | 1, n),
        max_satisfied,
        num_satisfying,
    })
}

/// Depth-first search for a satisfying assignment, pruning as soon as a
/// clause has three true or three false literals. Exact, and fast on the
/// sparse instances the reduction produces; used where enumeration is too
/// large.
pub fn find_satisfying(beta: &TwoFourInstance) -> Option<Assignment> {
    let n = beta.num_vars();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for c in beta.clauses() {
        for l in c {
            if !seen[l.var() - 1] {
                seen[l.var() - 1] = true;
                order.push(l.var() - 1);
            }
        }
    }
    let mut occ: Vec<Vec<(usize, i8)>> = vec![Vec::new(); n];
    for (k, c) in beta.clauses().iter().enumerate() {
        for l in c {
            occ[l.var() - 1].push((k, l.sign()));
        }
    }

    struct Dfs<'a> {
        order: &'a [usize],
        occ: &'a [Vec<(usize, i8)>],
        trues: Vec<u8>,
        falses: Vec<u8>,
        signs: Vec<i8>,
    }

    impl Dfs<'_> {
        fn assign(&mut self, var: usize, s: i8) -> bool {
            self.signs[var] = s;
            let mut ok = true;
            for &(k, lit_sign) in &self.occ[var] {
                if lit_sign == s {
                    self.trues[k] += 1;
                    ok &= self.trues[k] <= 2;
                } else {
                    self.falses[k] += 1;
                    ok &= self.falses[k] <= 2;
                }
            }
            ok
        }

        fn unassign(&mut self, var: usize) {
            let s = self.signs[var];
            for &(k, lit_sign) in &self.occ[var] {
                if lit_sign == s {
                    self.trues[k] -= 1;
                } else {
                    self.falses[k] -= 1;
                }
            }
        }

        fn run(&mut self, depth: usize) -> bool {
            if depth == self.order.len() {
                return true;
            }
            let var = self.order[depth];
            // the global flip makes the first decision free
            let choices: &[i8] = if depth == 0 { &[1] } else { &[1, -1] };
            for &s in choices {
                let ok = self.assign(var, s);
                if ok && self.run(depth + 1) {
                    return true;
                }
                self.unassign(var);
            }
            false
        }
    }

    let m = beta.num_clauses();
    let mut dfs = Dfs {
        order: &order,
        occ: &occ,
        trues: vec![0; m],
        falses: vec![0; m],
        signs: vec![1; n],
    };
    if dfs.run(0) {
        let a = Assignment::new(dfs.signs).expect("all signs ±1").canonical();
        debug_assert!(beta.is_satisfied_by(&a));
        Some(a)
    } else {
        None
    }
}

/// Truth-table satisfiability of a 3-CNF. Returns a model if one exists.
pub fn brute_force_cnf(cnf: &Cnf3) -> Result<Option<Vec<bool>>> {
    let n = cnf.num_vars();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { num_vars: n, limit: ENUMERATION_LIMIT });
    }
    Ok((0..1u64 << n)
        .map(|bits| (0..n).map(|j| bits >> j & 1 == 1).collect::<Vec<_>>())
        .find(|v| cnf.is_satisfied_by(v)))
}
