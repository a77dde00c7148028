//! Explicit matrices for cross-checking the structured formulas. Double
//! precision only; sizes are capped at `n ≤ 9` (dimension 333).

use nalgebra::{DMatrix, SymmetricEigen};

use super::{PairBasis, PairWitness};
use crate::error::{Error, Result};
use crate::qstate::StateVec;
use crate::scalar::Real;

pub const DENSE_LIMIT: usize = 9;

fn check_n(n: usize) -> Result<()> {
    if !(2..=DENSE_LIMIT).contains(&n) {
        return Err(Error::Domain(format!("dense operator needs 2 ≤ n ≤ {DENSE_LIMIT}, got {n}")));
    }
    Ok(())
}

/// `H` on the pair ⊗ state space, index `pair * n + i`. Real symmetric.
pub fn dense_hamiltonian(n: usize) -> Result<DMatrix<f64>> {
    check_n(n)?;
    let basis = PairBasis::new(n);
    let dim = basis.dim() * n;
    let mut h = DMatrix::zeros(dim, dim);
    for (j, l) in basis.pairs() {
        let p = basis.index(j, l);
        // |top⟩⟨jl| ⊗ (|j⟩⟨l| + |l⟩⟨j|) and its transpose
        for (a, b) in [(j, l), (l, j)] {
            h[(a, p * n + b)] = 1.0;
            h[(p * n + b, a)] = 1.0;
        }
    }
    Ok(h)
}

/// `½I + H/(3n)`.
pub fn dense_operator(n: usize) -> Result<DMatrix<f64>> {
    let h = dense_hamiltonian(n)?;
    let dim = h.nrows();
    Ok(DMatrix::identity(dim, dim) * 0.5 + h / (3.0 * n as f64))
}

/// `H(ψ)`: zero except for the first row and column, which carry
/// `b_jl(ψ)` (computed here directly from the amplitudes).
pub fn dense_h_of_psi<T: Real>(psi: &StateVec<T>) -> DMatrix<f64> {
    let basis = PairBasis::new(psi.dim());
    let x: Vec<(f64, f64)> = psi
        .amps()
        .iter()
        .map(|a| (a.re.to_f64().unwrap(), a.im.to_f64().unwrap()))
        .collect();
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for (j, l) in basis.pairs() {
        let p = basis.index(j, l);
        // ⟨ψ|B_jl|ψ⟩ = x̄_j x_l + x̄_l x_j
        let b = 2.0 * (x[j].0 * x[l].0 + x[j].1 * x[l].1);
        m[(0, p)] = b;
        m[(p, 0)] = b;
    }
    m
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn top_eigenvalue(m: &DMatrix<f64>) -> f64 {
    *eigenvalues(m).last().expect("non-empty matrix")
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `Re ⟨φ⊗ψ| M |φ⊗ψ⟩` for a real symmetric `M`.
pub fn product_expectation<T: Real>(
    m: &DMatrix<f64>,
    phi: &PairWitness<T>,
    psi: &StateVec<T>,
) -> Result<f64> {
    let n = psi.dim();
    let dim = phi.amps().len() * n;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: dim });
    }
    let v: Vec<(f64, f64)> = phi
        .amps()
        .iter()
        .flat_map(|p| {
            psi.amps().iter().map(move |x| {
                let z = p * x;
                (z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
            })
        })
        .collect();
    let mut acc = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let w = m[(a, b)];
            if w != 0.0 {
                acc += w * (v[a].0 * v[b].0 + v[a].1 * v[b].1);
            }
        }
    }
    Ok(acc)
}
