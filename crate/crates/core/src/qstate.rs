//! Pure states on the `n`-dimensional register, proper states, the pair
//! functional `S(ψ) = Σ_{j<l} ⟨ψ|B_jl|ψ⟩²` and the nearest-proper-state
//! construction.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::scalar::{czero, Real, C};

/// A unit vector of complex amplitudes, dimension at least 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct StateVec<T: Real> {
    amps: Vec<C<T>>,
}

pub(crate) fn norm_sqr<T: Real>(amps: &[C<T>]) -> T {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

impl<T: Real> StateVec<T> {
    pub fn new(amps: Vec<C<T>>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: amps.len() });
        }
        let dev = (norm_sqr(&amps) - T::one()).abs();
        if !(dev <= T::norm_tolerance()) {
            return Err(Error::NotNormalized { deviation: dev.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(StateVec { amps })
    }

    /// Scale `amps` to unit norm.
    pub fn normalized(mut amps: Vec<C<T>>) -> Result<Self> {
        let norm = norm_sqr(&amps).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero or non-finite vector".into()));
        }
        for a in &mut amps {
            *a = *a / norm;
        }
        StateVec::new(amps)
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        StateVec::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn basis(n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::DimensionMismatch { expected: n, got: j + 1 });
        }
        let mut amps = vec![czero(); n];
        amps[j] = Complex::new(T::one(), T::zero());
        StateVec::new(amps)
    }

    pub(crate) fn from_amps_unchecked(amps: Vec<C<T>>) -> Self {
        StateVec { amps }
    }

    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Multiply by a global phase `e^{iθ}`.
    pub fn with_phase(&self, theta: T) -> Self {
        let p = Complex::from_polar(T::one(), theta);
        StateVec { amps: self.amps.iter().map(|a| a * p).collect() }
    }
}

/// A proper state `Σ s_j/√n |j⟩` held as its sign vector, canonicalized to
/// `s_1 = +1` (global phase makes `s` and `−s` the same state).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ProperState {
    signs: Vec<i8>,
}

impl ProperState {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Domain("empty sign vector".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Domain(format!("sign {bad} is not ±1")));
        }
        let flip = signs[0];
        Ok(ProperState { signs: signs.into_iter().map(|s| s * flip).collect() })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_state<T: Real>(&self) -> Result<StateVec<T>> {
        proper_state(&self.signs)
    }
}

/// Amplitudes `signs_j / √n`.
pub fn proper_state<T: Real>(signs: &[i8]) -> Result<StateVec<T>> {
    if signs.is_empty() {
        return Err(Error::Domain("empty sign vector".into()));
    }
    let inv = T::one() / T::from_usize_lossy(signs.len()).sqrt();
    let amps = signs
        .iter()
        .map(|&s| match s {
            1 => Ok(Complex::new(inv, T::zero())),
            -1 => Ok(Complex::new(-inv, T::zero())),
            _ => Err(Error::Domain(format!("sign {s} is not ±1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    StateVec::new(amps)
}

/// `S(ψ) = |Σ x_j²|² + (Σ|x_j|²)² − 2Σ|x_j|⁴`, an `O(n)` evaluation of
/// `Σ_{j<l} (2·Re(x̄_j x_l))²`.
pub fn s_value<T: Real>(psi: &StateVec<T>) -> T {
    let mut sum_sq = czero::<T>();
    let mut norm = T::zero();
    let mut quartic = T::zero();
    for x in psi.amps() {
        sum_sq = sum_sq + x * x;
        let m = x.norm_sqr();
        norm = norm + m;
        quartic = quartic + m * m;
    }
    sum_sq.norm_sqr() + norm * norm - T::lit(2.0) * quartic
}

/// `2 − 2/n`, the value of `S` on every proper state and its maximum.
pub fn s_max<T: Real>(n: usize) -> T {
    T::lit(2.0) - T::lit(2.0) / T::from_usize_lossy(n)
}

/// `x_j = s_j · r_j · e^{iθ_j}` after rotating the anchor amplitude to phase 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct PolarDecomp<T: Real> {
    pub signs: Vec<i8>,
    pub radii: Vec<T>,
    /// In `(−π/2, π/2]`.
    pub phases: Vec<T>,
    /// 0-based index whose phase was fixed to zero.
    pub anchor: usize,
    /// Global phase removed from every amplitude.
    pub global_phase: T,
}

pub fn polar_decompose<T: Real>(psi: &StateVec<T>) -> PolarDecomp<T> {
    let eps = T::zero_amplitude();
    let anchor = psi
        .amps()
        .iter()
        .position(|x| x.norm() > eps)
        .expect("a normalized state has a nonzero amplitude");
    let global_phase = psi.amps()[anchor].arg();
    let rot = Complex::from_polar(T::one(), -global_phase);
    let half_pi = T::FRAC_PI_2();

    let n = psi.dim();
    let mut signs = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for (j, x) in psi.amps().iter().enumerate() {
        let r = x.norm();
        if r <= eps {
            signs.push(1);
            radii.push(r);
            phases.push(T::zero());
            continue;
        }
        let theta = if j == anchor { T::zero() } else { (x * rot).arg() };
        let (s, theta) = if theta > half_pi {
            (-1, theta - T::PI())
        } else if theta <= -half_pi {
            (-1, theta + T::PI())
        } else {
            (1, theta)
        };
        signs.push(s);
        radii.push(r);
        phases.push(theta);
    }
    PolarDecomp { signs, radii, phases, anchor, global_phase }
}

/// Proper state built from the signs of the polar decomposition, with its
/// trace distance to `psi`.
pub fn nearest_proper<T: Real>(psi: &StateVec<T>) -> (ProperState, T) {
    let polar = polar_decompose(psi);
    let proper = ProperState::new(polar.signs).expect("polar signs are ±1");
    let candidate = proper.to_state::<T>().expect("dimension ≥ 2");
    let dist = trace_distance_pure(psi, &candidate).expect("same dimension");
    (proper, dist)
}

/// `‖|a⟩⟨a| − |b⟩⟨b|‖_tr = √(1 − |⟨a|b⟩|²)`, clamped to `[0, 1]`.
pub fn trace_distance_pure<T: Real>(a: &StateVec<T>, b: &StateVec<T>) -> Result<T> {
    let overlap = a.inner(b)?.norm_sqr();
    Ok((T::one() - overlap).max(T::zero()).min(T::one()).sqrt())
}

/// State with i.i.d. standard complex Gaussian amplitudes, normalized
/// (uniform on the unit sphere).
pub fn random_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVec<T>> {
    let amps = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    StateVec::normalized(amps)
}

/// A uniformly random proper state plus `noise · (g_re + i·g_im)` per
/// amplitude with standard normal `g`, renormalized. Deterministic in `seed`.
pub fn random_near_proper<T: Real>(n: usize, noise: T, seed: u64) -> Result<StateVec<T>> {
    if !(noise >= T::zero()) {
        return Err(Error::Domain("noise must be non-negative".into()));
    }
    let mut rng = seeded_rng(seed);
    let signs: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let base = proper_state::<T>(&signs)?;
    if noise == T::zero() {
        return Ok(base);
    }
    let amps = base
        .amps()
        .iter()
        .map(|a| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            a + Complex::new(T::lit(re), T::lit(im)) * noise
        })
        .collect();
    StateVec::normalized(amps)
}
