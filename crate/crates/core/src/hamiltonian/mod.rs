//! The pair Hamiltonian
//!
//! ```text
//! H = Σ_{j<l} (|top⟩⟨jl| + |jl⟩⟨top|) ⊗ B_jl,    B_jl = |j⟩⟨l| + |l⟩⟨j|
//! ```
//!
//! acting on `φ ⊗ ψ`, where `φ` lives on the pair register spanned by
//! `top` and one basis vector per pair `j < l`. Arthur's properness coin
//! lands heads with probability `⟨φψ|(½I + H/(3n))|φψ⟩`.
//!
//! Production paths never build `H`: its expectation on a product state is
//! the bilinear form `Σ 2·Re(φ̄_top φ_jl)·b_jl(ψ)` with
//! `b_jl(ψ) = ⟨ψ|B_jl|ψ⟩ = 2·Re(x̄_j x_l)`. The dense matrices in [`dense`]
//! exist only to check that form.

pub mod dense;
mod witness;

pub use witness::{read_witness, write_pair_witness, write_state_witness, Witness};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{norm_sqr, StateVec};
use crate::scalar::{czero, Real, C};

/// Index map of the pair register: `top ↦ 0` and `(j, l) ↦ 1 + rank` in
/// lexicographic order, 0-based `j < l < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairBasis {
    n: usize,
}

impl PairBasis {
    pub fn new(n: usize) -> Self {
        PairBasis { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_pairs(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// `1 + n(n−1)/2`.
    pub fn dim(&self) -> usize {
        1 + self.num_pairs()
    }

    pub const TOP: usize = 0;

    pub fn index(&self, j: usize, l: usize) -> usize {
        debug_assert!(j < l && l < self.n);
        1 + j * self.n - j * (j + 1) / 2 + (l - j - 1)
    }

    /// Inverse of [`PairBasis::index`]; `None` for `top`.
    pub fn pair(&self, index: usize) -> Option<(usize, usize)> {
        if index == 0 || index >= self.dim() {
            return None;
        }
        let mut rank = index - 1;
        for j in 0..self.n {
            let row = self.n - j - 1;
            if rank < row {
                return Some((j, j + 1 + rank));
            }
            rank -= row;
        }
        None
    }

    /// Pairs in index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |j| (j + 1..self.n).map(move |l| (j, l)))
    }
}

/// The first prover's witness over the pair register.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct PairWitness<T: Real> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> PairWitness<T> {
    pub fn new(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        let dim = PairBasis::new(n).dim();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
        }
        let dev = (norm_sqr(&amps) - T::one()).abs();
        if !(dev <= T::norm_tolerance()) {
            return Err(Error::NotNormalized { deviation: dev.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(PairWitness { n, amps })
    }

    pub fn normalized(n: usize, mut amps: Vec<C<T>>) -> Result<Self> {
        let norm = norm_sqr(&amps).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero pair witness".into()));
        }
        for a in &mut amps {
            *a = *a / norm;
        }
        PairWitness::new(n, amps)
    }

    /// The `top` basis vector.
    pub fn top(n: usize) -> Self {
        let mut amps = vec![czero(); PairBasis::new(n).dim()];
        amps[PairBasis::TOP] = Complex::new(T::one(), T::zero());
        PairWitness { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> PairBasis {
        PairBasis::new(self.n)
    }

    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }
}

/// `b_jl = ⟨ψ|B_jl|ψ⟩ = 2·Re(x̄_j x_l)` in pair order.
pub fn b_coeffs<T: Real>(psi: &StateVec<T>) -> Vec<T> {
    let x = psi.amps();
    let two = T::lit(2.0);
    PairBasis::new(psi.dim())
        .pairs()
        .map(|(j, l)| two * (x[j].conj() * x[l]).re)
        .collect()
}

fn check_dims<T: Real>(phi: &PairWitness<T>, psi: &StateVec<T>) -> Result<()> {
    if phi.n() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.n(), got: psi.dim() });
    }
    Ok(())
}

/// `⟨φ|⟨ψ| H |ψ⟩|φ⟩` from the bilinear form.
pub fn h_expectation<T: Real>(phi: &PairWitness<T>, psi: &StateVec<T>) -> Result<T> {
    check_dims(phi, psi)?;
    let top = phi.amps()[PairBasis::TOP].conj();
    let two = T::lit(2.0);
    Ok(b_coeffs(psi)
        .into_iter()
        .zip(&phi.amps()[1..])
        .map(|(b, p)| two * (top * p).re * b)
        .sum())
}

/// Probability that the properness coin lands heads:
/// `½ + (1/(3n))·⟨φψ|H|φψ⟩`, always in `[½ − 1/3, ½ + 1/3]`.
pub fn properness_accept_prob<T: Real>(phi: &PairWitness<T>, psi: &StateVec<T>) -> Result<T> {
    let e = h_expectation(phi, psi)?;
    let n = T::from_usize_lossy(psi.dim());
    Ok(T::lit(0.5) + e / (T::lit(3.0) * n))
}

/// Maximizer of `⟨φψ|H|φψ⟩` over `φ` for fixed `ψ`: the top eigenvector of
/// the rank-two matrix `H(ψ)`, `φ_top = 1/√2`, `φ_jl = b_jl/(√2·‖b‖)`, with
/// eigenvalue `‖b‖ = √S(ψ)`. When `‖b‖` vanishes the top vector is returned
/// with value 0.
pub fn optimal_phi<T: Real>(psi: &StateVec<T>) -> (PairWitness<T>, T) {
    let n = psi.dim();
    let b = b_coeffs(psi);
    let norm = b.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if norm < T::zero_amplitude() {
        return (PairWitness::top(n), T::zero());
    }
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    let mut amps = Vec::with_capacity(b.len() + 1);
    amps.push(Complex::new(inv_sqrt2, T::zero()));
    amps.extend(b.iter().map(|&v| Complex::new(v * inv_sqrt2 / norm, T::zero())));
    (PairWitness { n, amps }, norm)
}

/// `½ + (1/(3n))·√(2 − 2/n)`, the largest properness acceptance over
/// product witnesses, attained exactly by proper `ψ` with optimal `φ`.
pub fn properness_ceiling<T: Real>(n: usize) -> T {
    let nf = T::from_usize_lossy(n);
    T::lit(0.5) + (T::lit(2.0) - T::lit(2.0) / nf).sqrt() / (T::lit(3.0) * nf)
}
