//! Quick oracle checks runnable from the CLI (`qmalog selftest`). Each
//! compares a production path against an independent route on a handful of
//! seeded probes.

use serde::Serialize;

use crate::adversary::{cheat_objective, objective_gradient};
use crate::hamiltonian::dense::{dense_h_of_psi, dense_operator, product_expectation, top_eigenvalue};
use crate::hamiltonian::{b_coeffs, optimal_phi, properness_accept_prob, PairBasis, PairWitness};
use crate::qstate::{proper_state, random_state, s_max, s_value, StateVec};
use crate::rng::seeded_rng;
use crate::sat_io::{brute_force_cnf, exhaustive_sat_search, reduce_to_2of4, Cnf3};
use crate::verifier::{combined_accept_prob, completeness, honest_witnesses};
use crate::harness::random_3sat;

#[derive(Debug, Clone, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> SelfCheck {
    SelfCheck { name, passed: worst <= tol, detail: format!("worst deviation {worst:.3e} (tolerance {tol:e})") }
}

pub fn run_selftest(seed: u64) -> Vec<SelfCheck> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for n in 2..=12usize {
        for k in 0..20u64 {
            let signs: Vec<i8> = (0..n).map(|j| if (k * 7 + j as u64 * 3) % 5 < 2 { -1 } else { 1 }).collect();
            let p = proper_state::<f64>(&signs).unwrap();
            worst = worst.max((s_value(&p) - s_max::<f64>(n)).abs());
        }
    }
    out.push(check("proper states attain S = 2 - 2/n", worst, 1e-12));

    let mut worst: f64 = 0.0;
    for n in 2..=12 {
        for _ in 0..20 {
            let psi: StateVec<f64> = random_state(n, &mut rng).unwrap();
            let pairwise: f64 = b_coeffs(&psi).iter().map(|b| b * b).sum();
            worst = worst.max((pairwise - s_value(&psi)).abs());
        }
    }
    out.push(check("closed-form S matches pairwise sum", worst, 1e-10));

    let mut worst_eig: f64 = 0.0;
    let mut worst_exp: f64 = 0.0;
    for n in 2..=6 {
        let m = dense_operator(n).unwrap();
        for _ in 0..5 {
            let psi: StateVec<f64> = random_state(n, &mut rng).unwrap();
            let (_, value) = optimal_phi(&psi);
            worst_eig = worst_eig.max((value - top_eigenvalue(&dense_h_of_psi(&psi))).abs());
            let dim = PairBasis::new(n).dim();
            let raw: StateVec<f64> = random_state(dim.max(2), &mut rng).unwrap();
            let phi = PairWitness::normalized(n, raw.amps()[..dim].to_vec()).unwrap();
            let dense = product_expectation(&m, &phi, &psi).unwrap();
            worst_exp = worst_exp.max((properness_accept_prob(&phi, &psi).unwrap() - dense).abs());
        }
    }
    out.push(check("rank-two value matches dense eigenvalue", worst_eig, 1e-10));
    out.push(check("properness probability matches dense operator", worst_exp, 1e-10));

    let mut mismatches = 0;
    for x in 0..8u8 {
        let alpha = Cnf3::from_ints(3, &[[1, 2, 3]]).unwrap();
        let values: Vec<bool> = (0..3).map(|j| x >> j & 1 == 1).collect();
        let lifted = crate::sat_io::lift_assignment(&alpha, &values).is_some();
        if lifted != alpha.is_satisfied_by(&values) {
            mismatches += 1;
        }
    }
    out.push(SelfCheck {
        name: "gadget truth table",
        passed: mismatches == 0,
        detail: format!("{mismatches} of 8 rows disagree"),
    });

    let mut mismatches = 0;
    for s in 0..40 {
        let alpha = random_3sat(3, 1 + s as usize % 4, seed ^ s).unwrap();
        let direct = brute_force_cnf(&alpha).unwrap().is_some();
        let reduced = exhaustive_sat_search(&reduce_to_2of4(&alpha)).unwrap().satisfiable;
        mismatches += usize::from(direct != reduced);
    }
    out.push(SelfCheck {
        name: "reduction preserves satisfiability",
        passed: mismatches == 0,
        detail: format!("{mismatches} of 40 random formulas disagree"),
    });

    let alpha = Cnf3::from_ints(4, &[[1, -2, 3], [-1, 2, 4], [2, 3, -4]]).unwrap();
    let beta = reduce_to_2of4(&alpha);
    let best = exhaustive_sat_search(&beta).unwrap().best;
    let (phi, psi) = honest_witnesses::<f64>(&beta, &best).unwrap();
    let dev = (combined_accept_prob(&phi, &psi, &beta).unwrap() - completeness::<f64>(beta.num_vars())).abs();
    out.push(check("honest acceptance equals a(m)", dev, 1e-12));

    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let psi: StateVec<f64> = random_state(beta.num_vars(), &mut rng).unwrap();
        let g = objective_gradient(&psi, &beta).unwrap();
        let mut err = 0.0;
        let mut scale = 0.0;
        for (j, gj) in g.iter().enumerate() {
            for (dir, comp) in [(num_complex::Complex::new(h, 0.0), gj.re), (num_complex::Complex::new(0.0, h), gj.im)] {
                let mut up = psi.amps().to_vec();
                let mut dn = psi.amps().to_vec();
                up[j] += dir;
                dn[j] -= dir;
                let f = |v: Vec<num_complex::Complex<f64>>| cheat_objective(&StateVec::normalized(v).unwrap(), &beta).unwrap();
                let fd = (f(up) - f(dn)) / (2.0 * h);
                err += (fd - comp) * (fd - comp);
                scale += fd * fd;
            }
        }
        worst = worst.max((err / scale).sqrt());
    }
    out.push(check("gradient matches finite differences (relative)", worst, 1e-5));

    out
}
