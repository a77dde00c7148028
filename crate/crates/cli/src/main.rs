//! `qmalog`: reduce, verify, attack and scan 3-SAT instances under the
//! two-prover log-size QMA protocol.
//!
//! Exit codes: 0 success, 1 usage error, 2 corpus/input error, 3 internal
//! invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmalog::adversary::{optimize_cheat, AttackConfig};
use qmalog::hamiltonian::{optimal_phi, read_witness, write_pair_witness, write_state_witness, Witness};
use qmalog::harness::{self, load_corpus_dir, random_3sat, run_gap_scan, run_selftest, Config};
use qmalog::sat_io::{parse_2of4, parse_assignment, write_2of4, write_dimacs};
use qmalog::verifier::{honest_witnesses, verdicts};
use qmalog::{Error, PairWitness64, StateVec64};

#[derive(Parser)]
#[command(name = "qmalog", version, about = "Two-prover log-size QMA protocol for 3-SAT")]
struct Cli {
    /// Flat key=value file supplying defaults for any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a DIMACS 3-CNF to 2-out-of-4-SAT.
    Reduce {
        cnf: PathBuf,
        #[arg(long)]
        bound_occurrences: Option<usize>,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact (and optionally sampled) acceptance of each test, as JSON lines.
    Verify {
        instance: PathBuf,
        /// Sign assignment; the honest witnesses are built from it.
        #[arg(long, conflicts_with_all = ["phi", "psi"])]
        assignment: Option<PathBuf>,
        #[arg(long, requires = "psi")]
        phi: Option<PathBuf>,
        #[arg(long, requires = "phi")]
        psi: Option<PathBuf>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search for a cheating product witness.
    Attack {
        instance: PathBuf,
        #[command(flatten)]
        attack: AttackFlags,
        /// Write `<prefix>.phi` and `<prefix>.psi` for the best witness found.
        #[arg(long)]
        save_witness: Option<PathBuf>,
    },
    /// Completeness/soundness gap over a directory of `.cnf` files.
    Gapscan {
        dir: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        bound_occurrences: Option<usize>,
        #[command(flatten)]
        attack: AttackFlags,
    },
    /// Run the built-in oracle checks.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a random 3-CNF in DIMACS form.
    Generate {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct AttackFlags {
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl AttackFlags {
    fn resolve(&self, cfg: &Config) -> Result<AttackConfig, Failure> {
        let d = AttackConfig::default();
        let c = AttackConfig {
            starts: cfg.resolve(self.starts, "starts", d.starts)?,
            max_iters: cfg.resolve(self.iters, "iters", d.max_iters)?,
            step: cfg.resolve(self.step, "step", d.step)?,
            tol: cfg.resolve(self.tol, "tol", d.tol)?,
            seed: cfg.resolve(self.seed, "seed", d.seed)?,
        };
        c.validate().map_err(Failure::Usage)?;
        Ok(c)
    }
}

enum Failure {
    Usage(Error),
    Input(Error),
    Invariant(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e),
            Error::Domain(_) => Failure::Usage(e),
            _ => Failure::Input(e),
        }
    }
}

/// Flag value, else config value, else `None`.
fn optional<T: std::str::FromStr>(cfg: &Config, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key).map_err(Failure::Usage),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(Error::Io { path: path.display().to_string(), msg: e.to_string() }))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Input(Error::Io { path: path.display().to_string(), msg: e.to_string() }))
}


fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::parse(&read(p)?).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    match cli.cmd {
        Cmd::Reduce { cnf, bound_occurrences, out } => {
            let bound = optional(&cfg, bound_occurrences, "bound-occurrences")?;
            let beta = harness::reduce_text(&read(&cnf)?, bound)?;
            let text = write_2of4(&beta);
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Verify { instance, assignment, phi, psi, shots, seed } => {
            let inst = parse_2of4(&read(&instance)?)?;
            let shots = optional(&cfg, shots, "shots")?;
            let seed = cfg.resolve(seed, "seed", 0)?;
            let (phi, psi): (PairWitness64, StateVec64) = match (assignment, phi, psi) {
                (Some(a), _, _) => {
                    let a = parse_assignment(&read(&a)?, inst.num_vars())?;
                    honest_witnesses(&inst, &a)?
                }
                (None, Some(p), Some(s)) => match (read_witness(&read(&p)?)?, read_witness(&read(&s)?)?) {
                    (Witness::Pair(phi), Witness::State(psi)) => (phi, psi),
                    _ => {
                        return Err(Failure::Input(Error::Instance(
                            "--phi must hold a pair witness and --psi a state witness".into(),
                        )))
                    }
                },
                _ => {
                    return Err(Failure::Usage(Error::Domain(
                        "either --assignment or both --phi and --psi are required".into(),
                    )))
                }
            };
            for v in verdicts(&phi, &psi, &inst, shots, seed)? {
                println!("{}", serde_json::to_string(&v).expect("serializable output"));
            }
        }
        Cmd::Attack { instance, attack, save_witness } => {
            let inst = parse_2of4(&read(&instance)?)?;
            let ac = attack.resolve(&cfg)?;
            let res = optimize_cheat::<f64>(&inst, &ac)?;
            if let Some(prefix) = save_witness {
                let (phi, _) = optimal_phi(&res.best_psi);
                write(&prefix.with_extension("phi"), &write_pair_witness(&phi))?;
                write(&prefix.with_extension("psi"), &write_state_witness(&res.best_psi))?;
            }
            println!("{}", serde_json::to_string_pretty(&res).expect("serializable output"));
        }
        Cmd::Gapscan { dir, epsilon, out, bound_occurrences, attack } => {
            let epsilon = cfg.resolve(epsilon, "epsilon", 1.0)?;
            let bound = optional(&cfg, bound_occurrences, "bound-occurrences")?;
            let out = optional(&cfg, out, "out")?;
            let ac = attack.resolve(&cfg)?;
            let corpus = load_corpus_dir(&dir).map_err(Failure::Input)?;
            let scan = run_gap_scan(&corpus, epsilon, &ac, ac.seed, bound)?;
            if let Some(o) = &out {
                harness::write_scan_outputs(o, &scan)?;
            }
            print!("{}", scan.csv());
            for f in &scan.failures {
                eprintln!("corpus error: {}: {}", f.instance_id, f.error);
            }
            if !scan.failures.is_empty() {
                return Err(Failure::Input(Error::Instance(format!(
                    "{} of {} corpus entries failed",
                    scan.failures.len(),
                    corpus.len()
                ))));
            }
        }
        Cmd::Selftest { seed } => {
            let seed = cfg.resolve(seed, "seed", 0)?;
            let checks = run_selftest(seed);
            let mut failed = 0;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Failure::Invariant(Error::Invariant(format!("{failed} self-checks failed"))));
            }
        }
        Cmd::Generate { vars, clauses, seed } => {
            let seed = cfg.resolve(seed, "seed", 0)?;
            print!("{}", write_dimacs(&random_3sat(vars, clauses, seed).map_err(Failure::Usage)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("invariant violation: {e}");
            ExitCode::from(3)
        }
    }
}
