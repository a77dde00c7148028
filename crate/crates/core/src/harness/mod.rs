//! Experiment orchestration: gap scans over a corpus of 3-CNF files,
//! self-contained JSON reports and a CSV summary.
//!
//! Randomness flows from one root seed. Instance `i` of a corpus attacks
//! with seed `derive_seed(root, stream_id(STREAM_CORPUS, i, 0))`; inside an
//! attack, start `k` uses stream `stream_id(STREAM_ATTACK, 0, k)`.

mod config;
mod generate;
mod selftest;

pub use config::Config;
pub use generate::random_3sat;
pub use selftest::{run_selftest, SelfCheck};

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{optimize_cheat, AttackConfig, StartTrace};
use crate::error::{Error, Result};
use crate::sat_io::{
    bound_occurrences, exhaustive_sat_search, find_satisfying, parse_dimacs, reduce_to_2of4,
    TwoFourInstance, ENUMERATION_LIMIT,
};
use crate::rng::{derive_seed, stream_id, STREAM_CORPUS};
use crate::verifier::{combined_accept_prob, honest_witnesses, protocol_constants};

/// Honest acceptance must match `a(m)` this closely.
pub const HONEST_TOLERANCE: f64 = 1e-12;
/// Slack allowed above `a(m)` and below zero gap.
pub const CAP_TOLERANCE: f64 = 1e-9;

/// One corpus member; `content` is `Err` when the source could not be read.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub origin: String,
    pub content: std::result::Result<String, String>,
}

impl CorpusEntry {
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        let id = id.into();
        CorpusEntry { origin: id.clone(), id, content: Ok(text.into()) }
    }
}

/// Every `*.cnf` file directly under `dir`, sorted by file name.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let io = |e: std::io::Error| Error::Io { path: dir.display().to_string(), msg: e.to_string() };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| CorpusEntry {
            id: p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            origin: p.display().to_string(),
            content: fs::read_to_string(&p).map_err(|e| e.to_string()),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub origin: String,
    pub root_seed: u64,
    pub instance_seed: u64,
    pub corpus_index: usize,
    pub bound_occurrences: Option<usize>,
    pub tool_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub honest: f64,
    pub cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub reduce_ms: f64,
    pub search_ms: f64,
    pub attack_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub instance_id: String,
    pub provenance: Provenance,
    pub source_vars: usize,
    pub source_clauses: usize,
    /// Variables of the 2-out-of-4 instance (the dimension of ψ).
    pub m: usize,
    pub num_clauses: usize,
    pub max_occurrence: usize,
    pub satisfiable: bool,
    pub satisfiability_method: String,
    pub epsilon: f64,
    pub a: f64,
    pub b1: f64,
    pub honest_value: Option<f64>,
    pub attack_value: f64,
    pub gap: f64,
    /// `5·m^{−ε/4}`, the trace-distance radius of the properness test.
    pub lemma4_threshold: f64,
    /// `1/(40·m^{3+ε})`, the gap guaranteed for states outside that radius.
    pub far_state_gap: f64,
    pub attack_distance_to_proper: f64,
    pub proper_oracle_value: Option<f64>,
    /// Attack value exceeds the best proper state by more than the cap tolerance.
    pub continuous_beats_proper: Option<bool>,
    pub attack_config: AttackConfig,
    pub tolerances: Tolerances,
    pub attack_trace: Vec<StartTrace<f64>>,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFailure {
    pub instance_id: String,
    pub origin: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct GapScan {
    pub reports: Vec<GapReport>,
    pub failures: Vec<CorpusFailure>,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    instance_id: &'a str,
    m: usize,
    a: f64,
    attack_value: f64,
    gap: f64,
    far_state_gap: f64,
}

impl GapScan {
    /// Rows `(instance_id, m, a, attack_value, gap, 1/(40·m^{3+ε}))` in
    /// corpus order.
    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.reports {
            w.serialize(CsvRow {
                instance_id: &r.instance_id,
                m: r.m,
                a: r.a,
                attack_value: r.attack_value,
                gap: r.gap,
                far_state_gap: r.far_state_gap,
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Reduce, decide, verify honestly and attack one formula.
#[allow(clippy::too_many_arguments)]
pub fn scan_instance(
    id: &str,
    origin: &str,
    text: &str,
    corpus_index: usize,
    epsilon: f64,
    cfg: &AttackConfig,
    root_seed: u64,
    bound: Option<usize>,
) -> Result<GapReport> {
    let total = Instant::now();
    let t = Instant::now();
    let alpha = parse_dimacs(text)?;
    let mut beta = reduce_to_2of4(&alpha);
    if let Some(cap) = bound {
        beta = bound_occurrences(&beta, cap)?;
    }
    let reduce_ms = ms(t);
    let m = beta.num_vars();
    let constants = protocol_constants(m, epsilon)?;

    let t = Instant::now();
    let (assignment, method) = if m <= ENUMERATION_LIMIT {
        let out = exhaustive_sat_search(&beta)?;
        (out.satisfiable.then_some(out.best), "enumeration")
    } else {
        (find_satisfying(&beta), "backtracking")
    };
    let search_ms = ms(t);

    let honest_value = match &assignment {
        Some(a) => {
            let (phi, psi) = honest_witnesses::<f64>(&beta, a)?;
            let v = combined_accept_prob(&phi, &psi, &beta)?;
            if (v - constants.a).abs() > HONEST_TOLERANCE {
                return Err(Error::Invariant(format!(
                    "{id}: honest acceptance {v} differs from a = {}",
                    constants.a
                )));
            }
            Some(v)
        }
        None => None,
    };

    let t = Instant::now();
    let instance_seed = derive_seed(root_seed, stream_id(STREAM_CORPUS, corpus_index as u64, 0));
    let attack_cfg = AttackConfig { seed: instance_seed, ..*cfg };
    let attack = optimize_cheat::<f64>(&beta, &attack_cfg)?;
    let attack_ms = ms(t);

    let gap = constants.a - attack.best_value;
    if gap < -CAP_TOLERANCE || attack.max_evaluated > constants.a + CAP_TOLERANCE {
        return Err(Error::Invariant(format!(
            "{id}: attack value {} exceeds a = {}",
            attack.max_evaluated.max(attack.best_value),
            constants.a
        )));
    }

    Ok(GapReport {
        instance_id: id.to_string(),
        provenance: Provenance {
            origin: origin.to_string(),
            root_seed,
            instance_seed,
            corpus_index,
            bound_occurrences: bound,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        source_vars: alpha.num_vars(),
        source_clauses: alpha.clauses().len(),
        m,
        num_clauses: beta.num_clauses(),
        max_occurrence: beta.stats().max,
        satisfiable: assignment.is_some(),
        satisfiability_method: method.to_string(),
        epsilon,
        a: constants.a,
        b1: constants.b1,
        honest_value,
        attack_value: attack.best_value,
        gap,
        lemma4_threshold: 5.0 * (m as f64).powf(-epsilon / 4.0),
        far_state_gap: constants.a - constants.b1,
        attack_distance_to_proper: attack.distance_to_proper,
        proper_oracle_value: attack.proper_oracle,
        continuous_beats_proper: attack
            .proper_oracle
            .map(|p| attack.best_value > p + CAP_TOLERANCE),
        attack_config: attack_cfg,
        tolerances: Tolerances { honest: HONEST_TOLERANCE, cap: CAP_TOLERANCE },
        attack_trace: attack.starts,
        timings: Timings { reduce_ms, search_ms, attack_ms, total_ms: ms(total) },
    })
}

/// Scan every corpus entry in parallel. Entries that cannot be read or
/// parsed are reported in `failures` and the scan continues; invariant
/// violations abort the scan.
pub fn run_gap_scan(
    corpus: &[CorpusEntry],
    epsilon: f64,
    cfg: &AttackConfig,
    root_seed: u64,
    bound: Option<usize>,
) -> Result<GapScan> {
    if corpus.is_empty() {
        return Err(Error::Instance("empty corpus".into()));
    }
    protocol_constants(2, epsilon)?;
    cfg.validate()?;

    let results: Vec<Result<GapReport>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, entry)| match &entry.content {
            Ok(text) => scan_instance(&entry.id, &entry.origin, text, i, epsilon, cfg, root_seed, bound),
            Err(e) => Err(Error::Io { path: entry.origin.clone(), msg: e.clone() }),
        })
        .collect();

    let mut scan = GapScan { reports: Vec::new(), failures: Vec::new() };
    for (entry, r) in corpus.iter().zip(results) {
        match r {
            Ok(report) => scan.reports.push(report),
            Err(e @ Error::Invariant(_)) => return Err(e),
            Err(e) => scan.failures.push(CorpusFailure {
                instance_id: entry.id.clone(),
                origin: entry.origin.clone(),
                error: e.to_string(),
            }),
        }
    }
    Ok(scan)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), msg: e.to_string() };
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// `<dir>/<instance_id>.json` per report, `gap.csv` and `failures.json`.
pub fn write_scan_outputs(dir: &Path, scan: &GapScan) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Io { path: dir.display().to_string(), msg: e.to_string() })?;
    for r in &scan.reports {
        let json = serde_json::to_string_pretty(r).expect("report serializes");
        write_atomic(&dir.join(format!("{}.json", r.instance_id)), &json)?;
    }
    write_atomic(&dir.join("gap.csv"), &scan.csv())?;
    let failures = serde_json::to_string_pretty(&scan.failures).expect("failures serialize");
    write_atomic(&dir.join("failures.json"), &failures)
}

/// Same report with every timing zeroed, for reproducibility comparisons.
pub fn without_timings(report: &GapReport) -> GapReport {
    GapReport {
        timings: Timings { reduce_ms: 0.0, search_ms: 0.0, attack_ms: 0.0, total_ms: 0.0 },
        ..report.clone()
    }
}

/// Reduce a formula and optionally bound occurrences; convenience for the CLI.
pub fn reduce_text(text: &str, bound: Option<usize>) -> Result<TwoFourInstance> {
    let beta = reduce_to_2of4(&parse_dimacs(text)?);
    match bound {
        Some(cap) => bound_occurrences(&beta, cap),
        None => Ok(beta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> AttackConfig {
        AttackConfig { starts: 6, max_iters: 300, ..AttackConfig::default() }
    }

    #[test]
    fn satisfiable_formula_has_zero_gap() {
        let corpus = [CorpusEntry::from_text("sat", "p cnf 3 1\n1 -2 3 0\n")];
        let scan = run_gap_scan(&corpus, 1.0, &quick(), 9, None).unwrap();
        let r = &scan.reports[0];
        assert!(r.satisfiable);
        assert!(r.gap.abs() < 1e-6);
        assert_eq!(r.honest_value, Some(r.a));
    }

    #[test]
    fn unsatisfiable_formula_has_positive_gap() {
        let corpus = [CorpusEntry::from_text("unsat", "p cnf 1 2\n1 0\n-1 0\n")];
        let scan = run_gap_scan(&corpus, 1.0, &quick(), 9, None).unwrap();
        let r = &scan.reports[0];
        assert!(!r.satisfiable);
        assert!(r.gap > 0.0);
        assert_eq!(r.attack_trace.len(), 6);
        assert!(r.honest_value.is_none());
    }

    #[test]
    fn bad_entries_do_not_stop_the_scan() {
        let corpus = [
            CorpusEntry::from_text("bad", "p cnf 1 1\n1 2 0\n"),
            CorpusEntry { id: "gone".into(), origin: "gone.cnf".into(), content: Err("missing".into()) },
            CorpusEntry::from_text("ok", "p cnf 2 1\n1 2 0\n"),
        ];
        let scan = run_gap_scan(&corpus, 1.0, &quick(), 0, None).unwrap();
        assert_eq!(scan.reports.len(), 1);
        assert_eq!(scan.failures.len(), 2);
        assert!(run_gap_scan(&[], 1.0, &quick(), 0, None).is_err());
    }

    #[test]
    fn csv_columns() {
        let corpus = [CorpusEntry::from_text("x", "p cnf 2 1\n1 2 0\n")];
        let scan = run_gap_scan(&corpus, 1.0, &quick(), 0, Some(3)).unwrap();
        let csv = scan.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("instance_id,m,a,attack_value,gap,far_state_gap"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let m: usize = row[1].parse().unwrap();
        let a: f64 = row[2].parse().unwrap();
        assert_eq!(a, protocol_constants(m, 1.0).unwrap().a);
    }

    #[test]
    fn outputs_written() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = [CorpusEntry::from_text("one", "p cnf 2 1\n1 2 0\n")];
        let scan = run_gap_scan(&corpus, 1.0, &quick(), 0, None).unwrap();
        write_scan_outputs(dir.path(), &scan).unwrap();
        assert!(dir.path().join("one.json").exists());
        assert!(dir.path().join("gap.csv").exists());
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("one.json")).unwrap()).unwrap();
        for key in ["instance_id", "m", "a", "honest_value", "attack_value", "gap", "lemma4_threshold", "epsilon"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
