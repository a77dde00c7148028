//! 3-SAT input, the 2-out-of-4-SAT clause-vector formulation, and the
//! classical oracles used to check the reduction between them.
//!
//! A 2-out-of-4 clause is four signed variable indices; it is satisfied when
//! exactly two of its literals are true. Reading a literal `±j` as the entry
//! `±1/2` of a vector over the basis `|1⟩..|n⟩`, satisfaction of a clause by a
//! sign assignment `s` is the same as orthogonality of the clause vector to
//! the proper state `Σ s_j/√n |j⟩`.

mod dimacs;
mod reduce;
pub(crate) mod search;

pub use dimacs::{
    parse_2of4, parse_assignment, parse_dimacs, write_2of4, write_assignment, write_dimacs,
};
pub use reduce::{bound_occurrences, lift_assignment, reduce_to_2of4, ReductionLayout};
pub use search::{
    brute_force_cnf, exhaustive_sat_search, find_satisfying, SearchOutcome, ENUMERATION_LIMIT,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signed, 1-based variable reference. Positive means the variable is
/// true when its sign is `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lit(i32);

impl Lit {
    pub fn new(v: i32) -> Result<Self> {
        if v == 0 {
            return Err(Error::Instance("literal 0 is not a variable".into()));
        }
        Ok(Lit(v))
    }

    pub fn pos(var: usize) -> Self {
        Lit(var as i32)
    }

    pub fn neg(var: usize) -> Self {
        Lit(-(var as i32))
    }

    /// 1-based variable index.
    #[inline]
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// `+1` or `-1`.
    #[inline]
    pub fn sign(self) -> i8 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn raw(self) -> i32 {
        self.0
    }

    pub fn negated(self) -> Self {
        Lit(-self.0)
    }

    /// Literal value under a ±1 assignment.
    #[inline]
    pub fn holds(self, signs: &[i8]) -> bool {
        signs[self.var() - 1] == self.sign()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A 3-CNF formula. Variables are `1..=num_vars`; `num_vars` may be zero for
/// the empty formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<[Lit; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<[Lit; 3]>) -> Result<Self> {
        for (k, c) in clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var() > num_vars) {
                return Err(Error::Instance(format!(
                    "clause {k}: literal {l} out of range 1..={num_vars}"
                )));
            }
        }
        Ok(Cnf3 { num_vars, clauses })
    }

    /// Convenience constructor from raw signed integers.
    pub fn from_ints(num_vars: usize, clauses: &[[i32; 3]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| Ok([Lit::new(c[0])?, Lit::new(c[1])?, Lit::new(c[2])?]))
            .collect::<Result<Vec<_>>>()?;
        Cnf3::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    /// Truth under a boolean assignment indexed from 0.
    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| values[l.var() - 1] == l.is_positive())
        })
    }
}

/// Occurrence statistics of a 2-out-of-4 instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceStats {
    /// Largest number of clauses any single variable appears in.
    pub max: usize,
    /// `histogram[k]` = number of variables occurring in exactly `k` clauses.
    pub histogram: Vec<usize>,
}

impl OccurrenceStats {
    fn measure(num_vars: usize, clauses: &[[Lit; 4]]) -> Self {
        let counts = occurrence_counts(num_vars, clauses);
        let max = counts.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0; max + 1];
        for c in counts {
            histogram[c] += 1;
        }
        OccurrenceStats { max, histogram }
    }
}

pub(crate) fn occurrence_counts(num_vars: usize, clauses: &[[Lit; 4]]) -> Vec<usize> {
    let mut counts = vec![0usize; num_vars];
    for c in clauses {
        for l in c {
            counts[l.var() - 1] += 1;
        }
    }
    counts
}

/// A 2-out-of-4-SAT instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoFourInstance {
    num_vars: usize,
    clauses: Vec<[Lit; 4]>,
    stats: OccurrenceStats,
}

impl TwoFourInstance {
    pub fn new(num_vars: usize, clauses: Vec<[Lit; 4]>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::Instance("a 2-out-of-4 instance needs at least one variable".into()));
        }
        for (k, c) in clauses.iter().enumerate() {
            for (i, l) in c.iter().enumerate() {
                if l.var() > num_vars {
                    return Err(Error::Instance(format!(
                        "clause {k}: literal {l} out of range 1..={num_vars}"
                    )));
                }
                if c[..i].iter().any(|o| o.var() == l.var()) {
                    return Err(Error::Instance(format!(
                        "clause {k}: variable {} repeated",
                        l.var()
                    )));
                }
            }
        }
        let stats = OccurrenceStats::measure(num_vars, &clauses);
        Ok(TwoFourInstance { num_vars, clauses, stats })
    }

    pub fn from_ints(num_vars: usize, clauses: &[[i32; 4]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| {
                Ok([Lit::new(c[0])?, Lit::new(c[1])?, Lit::new(c[2])?, Lit::new(c[3])?])
            })
            .collect::<Result<Vec<_>>>()?;
        TwoFourInstance::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Lit; 4]] {
        &self.clauses
    }

    pub fn stats(&self) -> &OccurrenceStats {
        &self.stats
    }

    /// Number of true literals of clause `k` under `signs`.
    pub fn true_literals(&self, k: usize, signs: &[i8]) -> usize {
        self.clauses[k].iter().filter(|l| l.holds(signs)).count()
    }

    pub fn count_satisfied(&self, assignment: &Assignment) -> usize {
        let s = assignment.signs();
        (0..self.clauses.len())
            .filter(|&k| self.true_literals(k, s) == 2)
            .count()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        assignment.len() == self.num_vars && self.count_satisfied(assignment) == self.clauses.len()
    }
}

/// A ±1 sign per variable; the classical shadow of a proper state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    signs: Vec<i8>,
}

impl Assignment {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Instance("empty assignment".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Instance(format!("sign {bad} is not ±1")));
        }
        Ok(Assignment { signs })
    }

    pub fn all_positive(n: usize) -> Self {
        Assignment { signs: vec![1; n] }
    }

    /// Bit `j` set means variable `j + 1` has sign `+1`.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        let signs = (0..n)
            .map(|j| if bits >> j & 1 == 1 { 1 } else { -1 })
            .collect();
        Assignment { signs }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Assignment { signs: self.signs.iter().map(|s| -s).collect() }
    }

    /// Representative with the first variable at `+1`.
    pub fn canonical(&self) -> Self {
        if self.signs[0] == 1 {
            self.clone()
        } else {
            self.flipped()
        }
    }
}
