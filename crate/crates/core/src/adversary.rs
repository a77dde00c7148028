//! Soundness attacks on separable witnesses.
//!
//! For fixed `ψ` the best first witness is known in closed form (the top
//! eigenvector of `H(ψ)`), so cheating provers only have to choose `ψ`:
//!
//! ```text
//! f(ψ) = ½·(½ + √S(ψ)/(3n)) + ½·(1 − (1/m)·Σ_k |⟨a_k|ψ⟩|²)
//! ```
//!
//! `f` is maximized by projected gradient ascent on the unit sphere from
//! many starts.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    nearest_proper, norm_sqr, random_near_proper, random_state, s_max, s_value, ProperState,
    StateVec,
};
use crate::rng::{derive_seed, stream_id, stream_rng, STREAM_ATTACK};
use crate::sat_io::search::masks;
use crate::sat_io::{Assignment, TwoFourInstance, ENUMERATION_LIMIT};
use crate::scalar::{czero, Real, C};
use crate::verifier::{clause_vectors, completeness, ClauseVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub starts: usize,
    pub max_iters: usize,
    /// Initial step length of the line search.
    pub step: f64,
    /// Stop when an accepted step improves the objective by less than this,
    /// or the projected gradient norm drops below it.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig { starts: 64, max_iters: 2000, step: 0.1, tol: 1e-10, seed: 0 }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::Domain("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain("tol must be positive".into()));
        }
        if !(self.step > 0.0) {
            return Err(Error::Domain("step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Random,
    NearProper,
    BestProper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct StartTrace<T: Real> {
    pub index: usize,
    pub kind: StartKind,
    pub iterations: usize,
    pub initial_value: T,
    pub final_value: T,
    pub converged: bool,
    /// Largest objective value evaluated during this start, rejected line
    /// search trials included.
    pub max_evaluated: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct AttackResult<T: Real> {
    pub best_value: T,
    pub best_start: usize,
    pub best_psi: StateVec<T>,
    pub nearest_proper: ProperState,
    pub distance_to_proper: T,
    /// `a(n)`, the honest value, for reference.
    pub completeness: T,
    /// Best value over proper states, when enumeration was feasible.
    pub proper_oracle: Option<T>,
    pub max_evaluated: T,
    pub starts: Vec<StartTrace<T>>,
}

struct Objective<'a> {
    n: usize,
    clauses: &'a [ClauseVector],
}

impl Objective<'_> {
    fn value<T: Real>(&self, x: &[C<T>]) -> T {
        let half = T::lit(0.5);
        let s = s_value(&StateVec::from_amps_unchecked(x.to_vec())).max(T::zero());
        let prop = half + s.sqrt() / (T::lit(3.0) * T::from_usize_lossy(self.n));
        half * prop + half * (T::one() - self.reject(x))
    }

    fn reject<T: Real>(&self, x: &[C<T>]) -> T {
        if self.clauses.is_empty() {
            return T::zero();
        }
        let total: T = self
            .clauses
            .iter()
            .map(|cv| overlap(cv, x).norm_sqr())
            .sum();
        total / T::from_usize_lossy(self.clauses.len())
    }

    /// Gradient with respect to `(Re x, Im x)` packed as `∂/∂Re + i·∂/∂Im`,
    /// projected onto the tangent space at `x`.
    ///
    /// With `P = Σ x_j²`, `N = Σ |x_j|²`:
    /// `∇S = 4·P·x̄ + 4·N·x − 8·|x|²·x` and
    /// `∇|⟨a|x⟩|² = 2·⟨a|x⟩·a`.
    fn gradient<T: Real>(&self, x: &[C<T>]) -> Result<Vec<C<T>>> {
        let s = s_value(&StateVec::from_amps_unchecked(x.to_vec()));
        if !(s > T::lit(1e-12)) {
            return Err(Error::Degenerate(format!("S(ψ) = {:e} is too small for a gradient", s.to_f64().unwrap_or(0.0))));
        }
        let (four, eight) = (T::lit(4.0), T::lit(8.0));
        let p = x.iter().fold(czero::<T>(), |acc, v| acc + v * v);
        let nrm = norm_sqr(x);
        let sqrt_s = s.sqrt();
        // d√S = dS / (2√S); scaled by ½·1/(3n)
        let scale = T::one() / (T::lit(12.0) * T::from_usize_lossy(self.n) * sqrt_s);
        let mut g: Vec<C<T>> = x
            .iter()
            .map(|v| {
                let ds = p * v.conj() * four + v * (four * nrm) - v * (eight * v.norm_sqr());
                ds * scale
            })
            .collect();

        if !self.clauses.is_empty() {
            // −½ · (1/m) · 2·o_k·a_k
            let w = T::one() / T::from_usize_lossy(self.clauses.len());
            for cv in self.clauses {
                let o = overlap(cv, x) * w * T::lit(0.5);
                for (&j, &sign) in cv.indices.iter().zip(&cv.signs) {
                    if sign > 0 {
                        g[j] = g[j] - o;
                    } else {
                        g[j] = g[j] + o;
                    }
                }
            }
        }

        let along = x.iter().zip(&g).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b);
        for (gj, xj) in g.iter_mut().zip(x) {
            *gj = *gj - xj * along;
        }
        Ok(g)
    }
}

fn overlap<T: Real>(cv: &ClauseVector, x: &[C<T>]) -> C<T> {
    let sum = cv
        .indices
        .iter()
        .zip(cv.signs)
        .fold(czero::<T>(), |acc, (&j, s)| if s > 0 { acc + x[j] } else { acc - x[j] });
    sum * T::lit(0.5)
}

fn check_dim<T: Real>(psi: &StateVec<T>, inst: &TwoFourInstance) -> Result<()> {
    if psi.dim() != inst.num_vars() {
        return Err(Error::DimensionMismatch { expected: inst.num_vars(), got: psi.dim() });
    }
    Ok(())
}

/// Acceptance of `(optimal φ for ψ, ψ)`, i.e. the maximum over `φ` of the
/// combined acceptance probability.
pub fn cheat_objective<T: Real>(psi: &StateVec<T>, inst: &TwoFourInstance) -> Result<T> {
    check_dim(psi, inst)?;
    let clauses = clause_vectors(inst);
    Ok(Objective { n: psi.dim(), clauses: &clauses }.value(psi.amps()))
}

/// Tangent-space gradient of [`cheat_objective`]. Fails where `S(ψ)` is
/// (numerically) zero, since `√S` is not differentiable there.
pub fn objective_gradient<T: Real>(psi: &StateVec<T>, inst: &TwoFourInstance) -> Result<Vec<C<T>>> {
    check_dim(psi, inst)?;
    let clauses = clause_vectors(inst);
    Objective { n: psi.dim(), clauses: &clauses }.gradient(psi.amps())
}

/// Exact maximum of the cheat objective over all canonical proper states.
///
/// On a proper state `S = 2 − 2/n` and a clause with `t` true literals
/// has `|⟨a_k|ψ⟩|² = (t − 2)²/n`, so only `Σ_k (t_k − 2)²` has to be
/// minimized.
pub fn enumerate_proper_cheats<T: Real>(inst: &TwoFourInstance) -> Result<(T, Assignment)> {
    let n = inst.num_vars();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { num_vars: n, limit: ENUMERATION_LIMIT });
    }
    if n < 2 {
        return Err(Error::Domain("need at least 2 variables".into()));
    }
    let masks = masks(inst.clauses());
    let total = 1u64 << (n - 1);
    const CHUNK: u64 = 1 << 14;
    let cost = |bits: u64| -> u64 {
        masks
            .iter()
            .map(|m| {
                let t = ((bits ^ m.neg) & m.vars).count_ones() as i64 - 2;
                (t * t) as u64
            })
            .sum()
    };
    let (best_cost, best_k) = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            (lo..(lo + CHUNK).min(total))
                .map(|k| (cost((k << 1) | 1), k))
                .min()
                .expect("non-empty chunk")
        })
        .min()
        .expect("at least one chunk");

    let half = T::lit(0.5);
    let nf = T::from_usize_lossy(n);
    let prop = half + s_max::<T>(n).sqrt() / (T::lit(3.0) * nf);
    let reject = if masks.is_empty() {
        T::zero()
    } else {
        T::from_u64(best_cost).unwrap() / (nf * T::from_usize_lossy(masks.len()))
    };
    Ok((half * prop + half * (T::one() - reject), Assignment::from_bits((best_k << 1) | 1, n)))
}

fn step_to<T: Real>(x: &[C<T>], g: &[C<T>], alpha: T) -> Vec<C<T>> {
    let mut y: Vec<C<T>> = x.iter().zip(g).map(|(a, b)| a + b * alpha).collect();
    let norm = norm_sqr(&y).sqrt();
    for v in &mut y {
        *v = *v / norm;
    }
    y
}

fn perturb<T: Real, R: Rng>(x: &[C<T>], scale: f64, rng: &mut R) -> Vec<C<T>> {
    let mut y: Vec<C<T>> = x
        .iter()
        .map(|v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + Complex::new(T::lit(re * scale), T::lit(im * scale))
        })
        .collect();
    let norm = norm_sqr(&y).sqrt();
    for v in &mut y {
        *v = *v / norm;
    }
    y
}

const ARMIJO: f64 = 1e-4;
const DEGENERATE_NOISE: f64 = 1e-6;

fn ascend<T: Real, R: Rng>(
    obj: &Objective<'_>,
    start: Vec<C<T>>,
    cfg: &AttackConfig,
    rng: &mut R,
) -> (Vec<C<T>>, usize, bool, T) {
    let tol = T::lit(cfg.tol);
    let mut x = start;
    let mut f = obj.value(&x);
    let mut max_eval = f;
    let mut alpha = T::lit(cfg.step);
    let min_alpha = T::lit(1e-14);
    let max_alpha = T::lit(1e3);

    for it in 0..cfg.max_iters {
        let g = match obj.gradient(&x) {
            Ok(g) => g,
            Err(_) => {
                let y = perturb(&x, DEGENERATE_NOISE, rng);
                let fy = obj.value(&y);
                max_eval = max_eval.max(fy);
                if fy >= f {
                    x = y;
                    f = fy;
                }
                continue;
            }
        };
        let g2 = norm_sqr(&g);
        if g2.sqrt() <= tol {
            return (x, it, true, max_eval);
        }
        let accepted = loop {
            let y = step_to(&x, &g, alpha);
            let fy = obj.value(&y);
            max_eval = max_eval.max(fy);
            if fy >= f + T::lit(ARMIJO) * alpha * g2 {
                break Some((y, fy));
            }
            alpha = alpha * T::lit(0.5);
            if alpha < min_alpha {
                break None;
            }
        };
        let Some((y, fy)) = accepted else {
            return (x, it, true, max_eval);
        };
        let gain = fy - f;
        x = y;
        f = fy;
        alpha = (alpha * T::lit(2.0)).min(max_alpha);
        if gain < tol {
            return (x, it + 1, true, max_eval);
        }
    }
    (x, cfg.max_iters, false, max_eval)
}

/// Multi-start projected gradient ascent on the cheat objective.
///
/// Start 0 is the best proper state from [`enumerate_proper_cheats`] when
/// the instance is small enough to enumerate; the remaining starts
/// alternate between Haar-random states and random near-proper states.
/// Each start draws from its own seeded stream, so the result is
/// independent of scheduling.
pub fn optimize_cheat<T: Real>(inst: &TwoFourInstance, cfg: &AttackConfig) -> Result<AttackResult<T>> {
    cfg.validate()?;
    let n = inst.num_vars();
    if n < 2 {
        return Err(Error::Domain("need at least 2 variables".into()));
    }
    let clauses = clause_vectors(inst);
    let obj = Objective { n, clauses: &clauses };
    let oracle = if n <= ENUMERATION_LIMIT {
        Some(enumerate_proper_cheats::<T>(inst)?)
    } else {
        None
    };
    let near_noise = T::lit(0.3) / T::from_usize_lossy(n).sqrt();

    let runs: Vec<(StartTrace<T>, Vec<C<T>>)> = (0..cfg.starts)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut rng = stream_rng(cfg.seed, stream_id(STREAM_ATTACK, 0, i as u64));
            let (kind, start) = match (&oracle, i) {
                (Some((_, best)), 0) => (StartKind::BestProper, crate::qstate::proper_state::<T>(best.signs())?),
                _ if i % 2 == 1 => (StartKind::Random, random_state::<T, _>(n, &mut rng)?),
                _ => {
                    let seed = derive_seed(cfg.seed, stream_id(STREAM_ATTACK, 1, i as u64));
                    (StartKind::NearProper, random_near_proper::<T>(n, near_noise, seed)?)
                }
            };
            let mut x = start.amps().to_vec();
            if s_value(&start) <= T::lit(1e-12) {
                x = perturb(&x, DEGENERATE_NOISE, &mut rng);
            }
            let initial_value = obj.value(&x);
            let (x, iterations, converged, max_evaluated) = ascend(&obj, x, cfg, &mut rng);
            let final_value = obj.value(&x);
            Ok((
                StartTrace {
                    index: i,
                    kind,
                    iterations,
                    initial_value,
                    final_value,
                    converged,
                    max_evaluated: max_evaluated.max(initial_value),
                },
                x,
            ))
        })
        .collect::<Result<_>>()?;

    let (best_start, _) = runs
        .iter()
        .enumerate()
        .fold((0usize, T::neg_infinity()), |(bi, bv), (i, (t, _))| {
            if t.final_value > bv {
                (i, t.final_value)
            } else {
                (bi, bv)
            }
        });
    let best_psi = StateVec::new(runs[best_start].1.clone())?;
    let (nearest, distance) = nearest_proper(&best_psi);
    let max_evaluated = runs.iter().map(|(t, _)| t.max_evaluated).fold(T::neg_infinity(), T::max);
    let starts: Vec<StartTrace<T>> = runs.into_iter().map(|(t, _)| t).collect();

    Ok(AttackResult {
        best_value: starts[best_start].final_value,
        best_start,
        best_psi,
        nearest_proper: nearest,
        distance_to_proper: distance,
        completeness: completeness::<T>(n),
        proper_oracle: oracle.map(|(v, _)| v),
        max_evaluated,
        starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::optimal_phi;
    use crate::qstate::proper_state;
    use crate::rng::seeded_rng;
    use crate::sat_io::{exhaustive_sat_search, reduce_to_2of4, Cnf3};
    use crate::verifier::combined_accept_prob;
    use approx::assert_abs_diff_eq;

    fn small_instances() -> Vec<TwoFourInstance> {
        vec![
            TwoFourInstance::from_ints(4, &[[1, 2, 3, 4]]).unwrap(),
            TwoFourInstance::from_ints(6, &[[1, 2, 3, 4], [-1, 2, -5, 6], [3, -4, 5, -6]]).unwrap(),
            TwoFourInstance::from_ints(5, &[[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 4, 5], [1, 3, 4, 5]])
                .unwrap(),
            reduce_to_2of4(&Cnf3::from_ints(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap()),
        ]
    }

    /// Objective from the O(n²) pairwise sum and dense clause overlaps.
    fn oracle_objective(x: &[C<f64>], inst: &TwoFourInstance) -> f64 {
        let n = x.len();
        let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let y: Vec<C<f64>> = x.iter().map(|v| v / norm.sqrt()).collect();
        let mut s = 0.0;
        for j in 0..n {
            for l in j + 1..n {
                let b = 2.0 * (y[j].conj() * y[l]).re;
                s += b * b;
            }
        }
        let mut rej = 0.0;
        for c in inst.clauses() {
            let mut o = C::new(0.0, 0.0);
            for lit in c {
                o += y[lit.var() - 1] * (0.5 * lit.sign() as f64);
            }
            rej += o.norm_sqr();
        }
        if inst.num_clauses() > 0 {
            rej /= inst.num_clauses() as f64;
        }
        0.5 * (0.5 + s.sqrt() / (3.0 * n as f64)) + 0.5 * (1.0 - rej)
    }

    #[test]
    fn objective_examples() {
        let inst = TwoFourInstance::from_ints(4, &[[1, 2, -3, -4]]).unwrap();
        let sat = proper_state::<f64>(&[1, 1, 1, 1]).unwrap();
        assert_abs_diff_eq!(cheat_objective(&sat, &inst).unwrap(), completeness::<f64>(4), epsilon = 1e-15);

        let inst = TwoFourInstance::from_ints(5, &[[2, 3, 4, 5]]).unwrap();
        let e1 = StateVec::<f64>::basis(5, 0).unwrap();
        assert_abs_diff_eq!(cheat_objective(&e1, &inst).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn objective_is_max_over_phi() {
        let mut rng = seeded_rng(4);
        for inst in small_instances() {
            for _ in 0..50 {
                let psi: StateVec<f64> = random_state(inst.num_vars(), &mut rng).unwrap();
                let (phi, _) = optimal_phi(&psi);
                assert_abs_diff_eq!(
                    cheat_objective(&psi, &inst).unwrap(),
                    combined_accept_prob(&phi, &psi, &inst).unwrap(),
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(
                    cheat_objective(&psi, &inst).unwrap(),
                    oracle_objective(psi.amps(), &inst),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let h = 1e-5;
        let mut rng = seeded_rng(8);
        for inst in small_instances().iter().filter(|i| i.num_vars() <= 8) {
            for _ in 0..100 {
                let psi: StateVec<f64> = random_state(inst.num_vars(), &mut rng).unwrap();
                let g = objective_gradient(&psi, inst).unwrap();
                let x = psi.amps();
                let mut fd = vec![C::new(0.0, 0.0); x.len()];
                for j in 0..x.len() {
                    for (dir, slot) in [(C::new(h, 0.0), 0), (C::new(0.0, h), 1)] {
                        let mut up = x.to_vec();
                        let mut dn = x.to_vec();
                        up[j] += dir;
                        dn[j] -= dir;
                        let d = (oracle_objective(&up, inst) - oracle_objective(&dn, inst)) / (2.0 * h);
                        if slot == 0 {
                            fd[j].re = d;
                        } else {
                            fd[j].im = d;
                        }
                    }
                }
                let err: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                let scale: f64 = fd.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                assert!(err <= 1e-5 * scale.max(1e-12), "relative error {}", err / scale);

                let tangency = x.iter().zip(&g).fold(C::new(0.0, 0.0), |a, (p, q)| a + p.conj() * q);
                assert!(tangency.norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_satisfying_proper_state() {
        let inst = TwoFourInstance::from_ints(6, &[[1, 2, 3, 4], [-1, 2, -5, 6], [3, -4, 5, -6]]).unwrap();
        let found = exhaustive_sat_search(&inst).unwrap();
        assert!(found.satisfiable);
        let psi = proper_state::<f64>(found.best.signs()).unwrap();
        let g = objective_gradient(&psi, &inst).unwrap();
        assert!(norm_sqr(&g).sqrt() <= 1e-10);
    }

    #[test]
    fn gradient_rejects_degenerate_point() {
        let inst = TwoFourInstance::new(3, vec![]).unwrap();
        let e = StateVec::<f64>::basis(3, 1).unwrap();
        assert!(matches!(objective_gradient(&e, &inst), Err(Error::Degenerate(_))));
    }

    #[test]
    fn proper_enumeration_examples() {
        let inst = TwoFourInstance::from_ints(4, &[[1, 2, 3, 4]]).unwrap();
        let (v, a) = enumerate_proper_cheats::<f64>(&inst).unwrap();
        assert_abs_diff_eq!(v, completeness::<f64>(4), epsilon = 1e-15);
        assert!(inst.is_satisfied_by(&a));

        let unsat = &small_instances()[3];
        let (v, a) = enumerate_proper_cheats::<f64>(unsat).unwrap();
        let direct = cheat_objective(&proper_state::<f64>(a.signs()).unwrap(), unsat).unwrap();
        assert_abs_diff_eq!(v, direct, epsilon = 1e-12);
        assert!(v < completeness::<f64>(unsat.num_vars()));
    }

    #[test]
    fn attack_properties() {
        let cfg = AttackConfig { starts: 12, max_iters: 500, ..AttackConfig::default() };
        for inst in small_instances() {
            let r = optimize_cheat::<f64>(&inst, &cfg).unwrap();
            let a = completeness::<f64>(inst.num_vars());
            assert!(r.max_evaluated <= a + 1e-9);
            assert!(r.best_value >= r.proper_oracle.unwrap() - 1e-9);
            for t in &r.starts {
                assert!(t.final_value >= t.initial_value);
            }
            let again = optimize_cheat::<f64>(&inst, &cfg).unwrap();
            assert_eq!(r.best_value, again.best_value);
            if exhaustive_sat_search(&inst).unwrap().satisfiable {
                assert_abs_diff_eq!(r.best_value, a, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn clause_free_instance_reaches_completeness() {
        let inst = TwoFourInstance::new(7, vec![]).unwrap();
        let r = optimize_cheat::<f64>(&inst, &AttackConfig { starts: 4, ..AttackConfig::default() }).unwrap();
        assert_abs_diff_eq!(r.best_value, completeness::<f64>(7), epsilon = 1e-6);
    }

    #[test]
    fn config_validation() {
        let inst = TwoFourInstance::new(3, vec![]).unwrap();
        let bad = AttackConfig { starts: 0, ..AttackConfig::default() };
        assert!(optimize_cheat::<f64>(&inst, &bad).is_err());
        let bad = AttackConfig { tol: 0.0, ..AttackConfig::default() };
        assert!(optimize_cheat::<f64>(&inst, &bad).is_err());
    }

    #[test]
    fn runs_in_single_precision() {
        let inst = TwoFourInstance::from_ints(4, &[[1, 2, 3, 4]]).unwrap();
        let cfg = AttackConfig { starts: 4, max_iters: 200, tol: 1e-6, ..AttackConfig::default() };
        let r = optimize_cheat::<f32>(&inst, &cfg).unwrap();
        assert!((r.best_value - completeness::<f32>(4)).abs() < 1e-5);
    }
}
