//! A laboratory for the two-prover, log-size quantum Merlin-Arthur
//! protocol for 3-SAT.
//!
//! Pipeline: parse 3-CNF ([`sat_io`]), reduce to 2-out-of-4-SAT, build the
//! honest product witness `φ ⊗ ψ` ([`qstate`], [`hamiltonian`]), compute
//! Arthur's exact acceptance probability ([`verifier`]) and search for
//! cheating witnesses ([`adversary`]). [`harness`] ties these together into
//! reproducible gap scans.
//!
//! The numeric modules are generic over [`Real`] (`f64` and `f32`); the
//! aliases below fix the usual double-precision instantiation.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod qstate;
pub mod rng;
pub mod sat_io;
pub mod scalar;
pub mod verifier;

pub use error::{Error, Result};
pub use scalar::Real;

pub type StateVec64 = qstate::StateVec<f64>;
pub type StateVec32 = qstate::StateVec<f32>;
pub type PairWitness64 = hamiltonian::PairWitness<f64>;
pub type PairWitness32 = hamiltonian::PairWitness<f32>;
pub type AttackResult64 = adversary::AttackResult<f64>;
pub type AttackResult32 = adversary::AttackResult<f32>;
pub type PolarDecomp64 = qstate::PolarDecomp<f64>;
