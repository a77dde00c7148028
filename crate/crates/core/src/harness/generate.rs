use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::sat_io::{Cnf3, Lit};

/// Uniform random 3-CNF: three distinct variables per clause (fewer if
/// `num_vars < 3`, padded by repetition), independent fair polarities.
pub fn random_3sat(num_vars: usize, num_clauses: usize, seed: u64) -> Result<Cnf3> {
    if num_vars == 0 && num_clauses > 0 {
        return Err(Error::Domain("clauses need at least one variable".into()));
    }
    let mut rng = seeded_rng(seed);
    let width = num_vars.min(3);
    let clauses = (0..num_clauses)
        .map(|_| {
            let vars = sample(&mut rng, num_vars, width).into_vec();
            let lits: Vec<Lit> = vars
                .into_iter()
                .map(|v| if rng.random::<bool>() { Lit::pos(v + 1) } else { Lit::neg(v + 1) })
                .collect();
            let last = *lits.last().expect("width ≥ 1");
            [lits[0], *lits.get(1).unwrap_or(&last), *lits.get(2).unwrap_or(&last)]
        })
        .collect();
    Cnf3::new(num_vars, clauses)
}
