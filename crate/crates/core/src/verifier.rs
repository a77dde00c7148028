//! Arthur's side of the protocol.
//!
//! With probability ½ Arthur runs the properness test on `φ ⊗ ψ` (a coin
//! with heads probability `⟨φψ|(½I + H/(3n))|φψ⟩`), otherwise the
//! satisfiability test on `ψ`: pick a clause `k` uniformly, measure the
//! projector `|a_k⟩⟨a_k|`, reject on a hit. A proper state that satisfies
//! every clause is orthogonal to every `|a_k⟩`, so that branch never
//! rejects it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{optimal_phi, properness_accept_prob, properness_ceiling, PairWitness};
use crate::qstate::{proper_state, StateVec};
use crate::rng::{stream_id, stream_rng, STREAM_SAMPLING};
use crate::sat_io::{Assignment, TwoFourInstance};
use crate::scalar::{czero, Real, C};

/// A clause vector: `±1/2` at four 0-based indices, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseVector {
    pub indices: [usize; 4],
    pub signs: [i8; 4],
}

impl ClauseVector {
    /// `⟨a_k|ψ⟩` (the entries are real).
    pub fn overlap<T: Real>(&self, psi: &StateVec<T>) -> C<T> {
        let x = psi.amps();
        let sum = self
            .indices
            .iter()
            .zip(self.signs)
            .fold(czero::<T>(), |acc, (&j, s)| if s > 0 { acc + x[j] } else { acc - x[j] });
        sum * T::lit(0.5)
    }
}

pub fn clause_vectors(inst: &TwoFourInstance) -> Vec<ClauseVector> {
    inst.clauses()
        .iter()
        .map(|c| ClauseVector {
            indices: c.map(|l| l.var() - 1),
            signs: c.map(|l| l.sign()),
        })
        .collect()
}

fn check_dim<T: Real>(psi: &StateVec<T>, inst: &TwoFourInstance) -> Result<()> {
    if psi.dim() != inst.num_vars() {
        return Err(Error::DimensionMismatch { expected: inst.num_vars(), got: psi.dim() });
    }
    Ok(())
}

/// `(1/m)·Σ_k |⟨a_k|ψ⟩|²`; zero for an instance without clauses.
pub fn sat_reject_prob<T: Real>(psi: &StateVec<T>, inst: &TwoFourInstance) -> Result<T> {
    check_dim(psi, inst)?;
    let m = inst.num_clauses();
    if m == 0 {
        return Ok(T::zero());
    }
    let total: T = clause_vectors(inst).iter().map(|cv| cv.overlap(psi).norm_sqr()).sum();
    Ok(total / T::from_usize_lossy(m))
}

/// `½·P_properness(φ, ψ) + ½·(1 − P_reject(ψ))`.
pub fn combined_accept_prob<T: Real>(
    phi: &PairWitness<T>,
    psi: &StateVec<T>,
    inst: &TwoFourInstance,
) -> Result<T> {
    let half = T::lit(0.5);
    let prop = properness_accept_prob(phi, psi)?;
    let reject = sat_reject_prob(psi, inst)?;
    Ok(half * prop + half * (T::one() - reject))
}

/// Completeness `a(m) = ¾ + (1/(6m))·√(2 − 2/m)`.
pub fn completeness<T: Real>(m: usize) -> T {
    let half = T::lit(0.5);
    half + half * properness_ceiling::<T>(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConstants {
    pub m: usize,
    pub epsilon: f64,
    /// Honest acceptance probability.
    pub a: f64,
    /// Acceptance ceiling when `ψ` is far from every proper state.
    pub b1: f64,
    /// `1/(20·m^{3+ε})`, the properness-test gap.
    pub gap_lemma4: f64,
}

pub fn protocol_constants(m: usize, epsilon: f64) -> Result<ProtocolConstants> {
    if m < 2 {
        return Err(Error::Domain(format!("need at least 2 variables, got {m}")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let a = completeness::<f64>(m);
    let gap_lemma4 = 1.0 / (20.0 * (m as f64).powf(3.0 + epsilon));
    Ok(ProtocolConstants { m, epsilon, a, b1: a - gap_lemma4 / 2.0, gap_lemma4 })
}

/// Honest provers: `ψ` is the proper state of a satisfying assignment and
/// `φ` its optimal partner.
pub fn honest_witnesses<T: Real>(
    inst: &TwoFourInstance,
    assignment: &Assignment,
) -> Result<(PairWitness<T>, StateVec<T>)> {
    if assignment.len() != inst.num_vars() {
        return Err(Error::DimensionMismatch { expected: inst.num_vars(), got: assignment.len() });
    }
    let satisfied = inst.count_satisfied(assignment);
    if satisfied != inst.num_clauses() {
        return Err(Error::Unsatisfied { violated: inst.num_clauses() - satisfied });
    }
    let psi = proper_state::<T>(assignment.signs())?;
    let (phi, _) = optimal_phi(&psi);
    Ok((phi, psi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Properness,
    Satisfiability,
    Combined,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Properness => "properness",
            Branch::Satisfiability => "satisfiability",
            Branch::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledAcceptance {
    pub accepts: u64,
    pub shots: u64,
    pub seed: u64,
    pub accept_freq: f64,
    /// `√(f(1 − f)/shots)`.
    pub stderr: f64,
}

/// Shots are split over this many independently seeded shards, so the
/// result does not depend on the worker count.
pub const SAMPLING_SHARDS: u64 = 16;

/// Monte Carlo run of one branch (or the ½/½ mixture). For the properness
/// test each shot is a Bernoulli draw with the exact heads probability; for
/// the satisfiability test a uniformly chosen clause rejects with
/// probability `|⟨a_k|ψ⟩|²`.
pub fn run_branch_sampled<T: Real>(
    branch: Branch,
    phi: &PairWitness<T>,
    psi: &StateVec<T>,
    inst: &TwoFourInstance,
    shots: u64,
    seed: u64,
) -> Result<SampledAcceptance> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    check_dim(psi, inst)?;
    let p_prop = properness_accept_prob(phi, psi)?.to_f64().unwrap();
    let hits: Vec<f64> = clause_vectors(inst)
        .iter()
        .map(|cv| cv.overlap(psi).norm_sqr().to_f64().unwrap())
        .collect();

    let accepts: u64 = (0..SAMPLING_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let len = shots / SAMPLING_SHARDS + u64::from(shard < shots % SAMPLING_SHARDS);
            let mut rng = stream_rng(seed, stream_id(STREAM_SAMPLING, 0, shard));
            let mut acc = 0u64;
            for _ in 0..len {
                let properness = match branch {
                    Branch::Properness => true,
                    Branch::Satisfiability => false,
                    Branch::Combined => rng.random::<bool>(),
                };
                let accept = if properness {
                    rng.random::<f64>() < p_prop
                } else if hits.is_empty() {
                    true
                } else {
                    let k = rng.random_range(0..hits.len());
                    rng.random::<f64>() >= hits[k]
                };
                acc += u64::from(accept);
            }
            acc
        })
        .sum();

    let f = accepts as f64 / shots as f64;
    Ok(SampledAcceptance {
        accepts,
        shots,
        seed,
        accept_freq: f,
        stderr: (f * (1.0 - f) / shots as f64).sqrt(),
    })
}

pub fn run_protocol_sampled<T: Real>(
    phi: &PairWitness<T>,
    psi: &StateVec<T>,
    inst: &TwoFourInstance,
    shots: u64,
    seed: u64,
) -> Result<SampledAcceptance> {
    run_branch_sampled(Branch::Combined, phi, psi, inst, shots, seed)
}

/// One JSON record of `verify` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub test: Branch,
    pub exact_prob: f64,
    pub sampled_freq: Option<f64>,
    pub shots: u64,
    pub seed: u64,
}

/// Exact (and optionally sampled) acceptance of every branch.
pub fn verdicts<T: Real>(
    phi: &PairWitness<T>,
    psi: &StateVec<T>,
    inst: &TwoFourInstance,
    shots: Option<u64>,
    seed: u64,
) -> Result<Vec<Verdict>> {
    let exact = [
        (Branch::Properness, properness_accept_prob(phi, psi)?),
        (Branch::Satisfiability, T::one() - sat_reject_prob(psi, inst)?),
        (Branch::Combined, combined_accept_prob(phi, psi, inst)?),
    ];
    exact
        .into_iter()
        .map(|(branch, p)| {
            let sampled = match shots {
                Some(s) => Some(run_branch_sampled(branch, phi, psi, inst, s, seed)?.accept_freq),
                None => None,
            };
            Ok(Verdict {
                test: branch,
                exact_prob: p.to_f64().unwrap(),
                sampled_freq: sampled,
                shots: shots.unwrap_or(0),
                seed,
            })
        })
        .collect()
}
