use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ramsey_ap::drivers::{
    alpha_steplist, compute_number, compute_transversal_sequence, extension_numbers_from_tau,
    parse_certificate, verify_certificate, DriverError, NumberSearch, NumberStatus, SolverBackend,
    TransversalSequence,
};
use ramsey_ap::estimation::{
    count_progressions, estimate_count, fit_count_model, format_samples, parse_samples,
};
use ramsey_ap::satcore::{parse_dimacs, solve_with, write_dimacs, ExternalCommand, SolverConfig};
use ramsey_ap::{
    build_instance, translate, Budget, Family, ParameterTuple, Status, TranslationKind,
};

const EXIT_LOWER_BOUND: u8 = 10;
const EXIT_UNKNOWN: u8 = 20;

/// Van der Waerden and Green-Tao numbers via SAT.
#[derive(Parser)]
#[command(name = "ramsey-ap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the boolean translation of an instance as DIMACS.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        tuple: ParameterTuple,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "weak-nested")]
        translation: TranslationKind,
        /// Output path; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a DIMACS file with the embedded solver; prints `s` and `v` lines.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute a vdW- or GT-number by scanning n upwards.
    Number {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        tuple: ParameterTuple,
        #[arg(long, default_value = "weak-nested")]
        translation: TranslationKind,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 1)]
        nstart: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        /// External DIMACS solver command; the CNF path is appended.
        #[arg(long)]
        external: Option<String>,
        /// Number of n values solved concurrently.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
        /// Where to write the colouring of the last satisfiable level.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Transversal numbers of the size-k progression hypergraphs for n = 1..=nmax.
    Transversal {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        nmax: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        external: Option<String>,
    },
    /// Check a certificate colouring of the first n vertices.
    Verify {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        tuple: ParameterTuple,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Fit the progression-count model to a samples file and predict counts.
    Estimate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Vertex counts to predict at.
        #[arg(long, required = true)]
        at: Vec<usize>,
        /// Also print the exact GT count at each prediction point.
        #[arg(long)]
        exact: bool,
    },
    /// Write exact progression counts as a samples file.
    Samples {
        #[arg(long, default_value = "gt")]
        family: Family,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        step: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Conflict limit per solver call.
    #[arg(long)]
    budget: Option<u64>,
    /// Time limit per solver call, in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        let time = match self.timeout {
            Some(t) if !(t.is_finite() && t >= 0.0) => anyhow::bail!("invalid timeout {t}"),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        Ok(Budget {
            conflicts: self.budget,
            time,
        })
    }
}

fn backend(external: Option<&str>) -> Result<SolverBackend> {
    match external {
        None => Ok(SolverBackend::default()),
        Some(spec) => ExternalCommand::parse(spec)
            .map(SolverBackend::External)
            .context("empty --external command"),
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn joined(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_transversal(out: &mut impl Write, seq: &TransversalSequence) -> io::Result<()> {
    writeln!(out, "tau {}", joined(&seq.tau))?;
    writeln!(
        out,
        "thresholds {}",
        joined(&extension_numbers_from_tau(seq))
    )?;
    writeln!(out, "steplist {}", joined(&alpha_steplist(seq)))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Gen {
            family,
            tuple,
            n,
            translation,
            out: path,
        } => {
            let f = build_instance(family, &tuple, n);
            let (cnf, map) = translate(&f, translation)?;
            let mut sink = output(path.as_ref())?;
            write_dimacs(&cnf, &map.entries(), &mut sink)?;
            sink.flush()?;
            drop(sink);
            if path.is_some() {
                writeln!(out, "{} {}", cnf.num_vars, cnf.len())?;
            }
        }
        Command::Solve { path, budget, seed } => {
            let cnf =
                parse_dimacs(&read(&path)?).with_context(|| format!("in {}", path.display()))?;
            let config = SolverConfig {
                seed,
                ..SolverConfig::default()
            };
            let result = solve_with(&cnf, budget.budget()?, &config);
            writeln!(out, "c conflicts {}", result.stats.conflicts)?;
            match result.status {
                Status::Sat => {
                    writeln!(out, "s SATISFIABLE")?;
                    let model = result.model.unwrap_or_default();
                    let lits: Vec<String> = model
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| {
                            if b {
                                format!("{}", i + 1)
                            } else {
                                format!("-{}", i + 1)
                            }
                        })
                        .chain(std::iter::once("0".to_string()))
                        .collect();
                    writeln!(out, "v {}", lits.join(" "))?;
                }
                Status::Unsat => writeln!(out, "s UNSATISFIABLE")?,
                Status::Unknown => {
                    writeln!(out, "s UNKNOWN")?;
                    return Ok(ExitCode::from(EXIT_UNKNOWN));
                }
            }
        }
        Command::Number {
            family,
            tuple,
            translation,
            nmax,
            nstart,
            budget,
            external,
            jobs,
            certificate,
        } => {
            let search = NumberSearch {
                kind: translation,
                n_start: nstart,
                n_max: nmax,
                budget: budget.budget()?,
                backend: backend(external.as_deref())?,
                jobs: jobs as usize,
            };
            let result = match compute_number(family, &tuple, &search) {
                Err(DriverError::Unknown { n, log }) => {
                    for record in &log {
                        writeln!(out, "{record}")?;
                    }
                    writeln!(out, "unknown {n}")?;
                    return Ok(ExitCode::from(EXIT_UNKNOWN));
                }
                other => other?,
            };
            for record in &result.log {
                writeln!(out, "{record}")?;
            }
            let path = certificate.unwrap_or_else(|| {
                let t: Vec<String> = tuple.entries().iter().map(|k| k.to_string()).collect();
                PathBuf::from(format!("{}_{}.cert", family, t.join("_")))
            });
            fs::write(
                &path,
                format!("# n = {}\n{}", result.certificate_n, result.certificate),
            )
            .with_context(|| format!("cannot write {}", path.display()))?;
            writeln!(out, "{}", result.status)?;
            if let NumberStatus::LowerBound(_) = result.status {
                return Ok(ExitCode::from(EXIT_LOWER_BOUND));
            }
        }
        Command::Transversal {
            family,
            k,
            nmax,
            budget,
            external,
        } => {
            let backend = backend(external.as_deref())?;
            match compute_transversal_sequence(family, k, nmax, budget.budget()?, &backend) {
                Ok(seq) => print_transversal(&mut out, &seq)?,
                Err(DriverError::TransversalUnknown { n, prefix }) => {
                    print_transversal(&mut out, &prefix)?;
                    writeln!(out, "unknown {n}")?;
                    return Ok(ExitCode::from(EXIT_UNKNOWN));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify {
            family,
            tuple,
            n,
            certificate,
        } => {
            let colouring = parse_certificate(&read(&certificate)?)
                .with_context(|| format!("in {}", certificate.display()))?;
            if verify_certificate(family, &tuple, n, &colouring)? {
                writeln!(out, "valid")?;
            } else {
                writeln!(out, "invalid")?;
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Estimate {
            k,
            samples,
            order,
            at,
            exact,
        } => {
            let data = parse_samples(&read(&samples)?)
                .with_context(|| format!("in {}", samples.display()))?;
            let model = fit_count_model(k, &data, order)?;
            let a: Vec<String> = model.a.iter().map(|a| format!("{a:.6}")).collect();
            writeln!(out, "C {:.6} a {}", model.c, a.join(" "))?;
            for n in at {
                let estimate = estimate_count(&model, n);
                if exact {
                    let count = count_progressions(Family::Gt, k, n);
                    let rel = (estimate - count as f64) / count.max(1) as f64;
                    writeln!(out, "{n} {estimate:.1} {count} {rel:+.4}")?;
                } else {
                    writeln!(out, "{n} {estimate:.1}")?;
                }
            }
        }
        Command::Samples {
            family,
            k,
            from,
            to,
            step,
            out: path,
        } => {
            let data: Vec<(usize, u64)> = (from..=to)
                .step_by(step as usize)
                .map(|n| (n, count_progressions(family, k, n)))
                .collect();
            let mut sink = output(path.as_ref())?;
            sink.write_all(format_samples(&data).as_bytes())?;
            sink.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
