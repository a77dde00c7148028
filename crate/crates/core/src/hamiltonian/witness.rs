//! Plain-text witness files.
//!
//! ```text
//! pair <n>          or    state <n>
//! <re> <im>               one line per amplitude, PairBasis order for
//! ...                     pair witnesses
//! ```
//!
//! Numbers are written with the shortest representation that parses back to
//! the same value.

use std::fmt::Write as _;

use num_complex::Complex;

use super::{PairBasis, PairWitness};
use crate::error::{Error, Result};
use crate::qstate::StateVec;
use crate::scalar::{Real, C};

#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T: Real> {
    Pair(PairWitness<T>),
    State(StateVec<T>),
}

fn write_amps<T: Real>(header: String, amps: &[C<T>]) -> String {
    let mut s = header;
    for a in amps {
        let _ = writeln!(s, "{} {}", a.re, a.im);
    }
    s
}

pub fn write_pair_witness<T: Real>(phi: &PairWitness<T>) -> String {
    write_amps(format!("pair {}\n", phi.n()), phi.amps())
}

pub fn write_state_witness<T: Real>(psi: &StateVec<T>) -> String {
    write_amps(format!("state {}\n", psi.dim()), psi.amps())
}

pub fn read_witness<T: Real>(text: &str) -> Result<Witness<T>> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty witness file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (kind, n) = match toks.as_slice() {
        [kind @ ("pair" | "state"), n] => {
            let n: usize = n.parse().map_err(|_| perr(hline, format!("bad dimension `{n}`")))?;
            (*kind, n)
        }
        _ => return Err(perr(hline, "expected `pair <n>` or `state <n>`".into())),
    };
    let expected = if kind == "pair" { PairBasis::new(n).dim() } else { n };

    let mut amps = Vec::with_capacity(expected);
    for (line, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let [re, im] = parts.as_slice() else {
            return Err(perr(line, "expected `<re> <im>`".into()));
        };
        let re: T = re.parse().map_err(|_| perr(line, format!("bad number `{re}`")))?;
        let im: T = im.parse().map_err(|_| perr(line, format!("bad number `{im}`")))?;
        amps.push(Complex::new(re, im));
    }
    if amps.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: amps.len() });
    }
    Ok(if kind == "pair" {
        Witness::Pair(PairWitness::new(n, amps)?)
    } else {
        Witness::State(StateVec::new(amps)?)
    })
}
