use std::process::Command;
use std::time::Instant;

use crate::cnf::BoolClauseSet;

use super::{verify_assignment, write_dimacs, SatError, SolveResult, SolveStats, Status};

/// An external solver invocation: the CNF path is appended as the last argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl ExternalCommand {
    /// Splits a command line on whitespace, e.g. `"minisat -verb=0"`.
    pub fn parse(spec: &str) -> Option<Self> {
        let mut words = spec.split_whitespace().map(str::to_string);
        let program = words.next()?;
        Some(Self {
            program,
            args: words.collect(),
        })
    }

    fn display(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Reads `s ...` and `v ...` lines of solver output. The model covers `num_vars`
/// variables; variables the solver leaves out are set false.
pub fn parse_solver_output(
    output: &str,
    num_vars: usize,
) -> Result<(Status, Option<Vec<bool>>), SatError> {
    let mut status = None;
    let mut values: Vec<i64> = Vec::new();
    let mut saw_values = false;
    for line in output.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            let s = match rest.trim() {
                "SATISFIABLE" => Status::Sat,
                "UNSATISFIABLE" => Status::Unsat,
                "UNKNOWN" | "INDETERMINATE" => Status::Unknown,
                other => {
                    return Err(SatError::UnparseableOutput(format!(
                        "status line `s {other}`"
                    )))
                }
            };
            if status.replace(s).is_some_and(|prev| prev != s) {
                return Err(SatError::UnparseableOutput(
                    "conflicting status lines".into(),
                ));
            }
        } else if let Some(rest) = line.strip_prefix('v') {
            saw_values = true;
            for tok in rest.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| SatError::UnparseableOutput(format!("value `{tok}`")))?;
                values.push(v);
            }
        }
    }
    let status = status.ok_or_else(|| SatError::UnparseableOutput("no status line".into()))?;
    if status != Status::Sat {
        return Ok((status, None));
    }
    if !saw_values {
        return Err(SatError::UnparseableOutput(
            "satisfiable without `v` lines".into(),
        ));
    }
    let mut model = vec![false; num_vars];
    for v in values.into_iter().filter(|&v| v != 0) {
        let idx = v.unsigned_abs() as usize;
        if idx > num_vars {
            return Err(SatError::UnparseableOutput(format!(
                "value {v} out of range"
            )));
        }
        model[idx - 1] = v > 0;
    }
    Ok((Status::Sat, Some(model)))
}

/// Runs an external DIMACS solver on `f`. SAT answers are verified locally.
pub fn run_external(command: &ExternalCommand, f: &BoolClauseSet) -> Result<SolveResult, SatError> {
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    write_dimacs(f, &[], &mut file)?;
    let started = Instant::now();
    let output = Command::new(&command.program)
        .args(&command.args)
        .arg(file.path())
        .output()
        .map_err(|e| SatError::ExternalFailed {
            command: command.display(),
            message: e.to_string(),
        })?;
    let elapsed = started.elapsed();
    let stdout = String::from_utf8_lossy(&output.stdout);
    let (status, model) = match parse_solver_output(&stdout, f.num_vars) {
        Ok(r) => r,
        Err(e)
            if !output.status.success()
                && !stdout.lines().any(|l| l.trim_start().starts_with("s ")) =>
        {
            return Err(SatError::ExternalFailed {
                command: command.display(),
                message: format!("{} without status line ({e})", output.status),
            })
        }
        Err(e) => return Err(e),
    };
    if let Some(m) = &model {
        if !verify_assignment(f, m)? {
            return Err(SatError::ModelRejected);
        }
    }
    Ok(SolveResult {
        status,
        model,
        stats: SolveStats {
            elapsed,
            ..SolveStats::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use std::os::unix::fs::PermissionsExt;

    fn script(body: &str) -> (tempfile::TempDir, ExternalCommand) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solver.sh");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "#!/bin/sh\n{body}").unwrap();
        drop(f);
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        let cmd = ExternalCommand {
            program: path.to_string_lossy().into_owned(),
            args: vec![],
        };
        (dir, cmd)
    }

    #[test]
    fn output_parsing() {
        let (s, m) = parse_solver_output("c x\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(s, Status::Sat);
        assert_eq!(m, Some(vec![true, false, true]));
        let (s, m) = parse_solver_output("s UNSATISFIABLE\n", 3).unwrap();
        assert_eq!((s, m), (Status::Unsat, None));
        assert!(matches!(
            parse_solver_output("hello", 1),
            Err(SatError::UnparseableOutput(_))
        ));
        assert!(parse_solver_output("s SATISFIABLE\n", 1).is_err());
        assert!(parse_solver_output("s SATISFIABLE\nv 5 0\n", 1).is_err());
        assert!(parse_solver_output("s MAYBE\n", 1).is_err());
    }

    #[test]
    fn unsat_via_script() {
        let (_dir, cmd) = script("echo 's UNSATISFIABLE'; exit 20");
        let f = BoolClauseSet::with_clauses(0, vec![vec![]]);
        assert_eq!(run_external(&cmd, &f).unwrap().status, Status::Unsat);
    }

    #[test]
    fn sat_model_is_verified() {
        let f = BoolClauseSet::with_clauses(2, vec![vec![1], vec![-2]]);
        let (_dir, good) = script("echo 's SATISFIABLE'; echo 'v 1 -2 0'; exit 10");
        let r = run_external(&good, &f).unwrap();
        assert_eq!(r.model, Some(vec![true, false]));
        let (_dir2, bad) = script("echo 's SATISFIABLE'; echo 'v -1 -2 0'; exit 10");
        assert!(matches!(
            run_external(&bad, &f),
            Err(SatError::ModelRejected)
        ));
    }

    #[test]
    fn script_sees_the_cnf_file() {
        let (_dir, cmd) = script("grep -q '^p cnf 2 2$' \"$1\" && echo 's UNSATISFIABLE'");
        let f = BoolClauseSet::with_clauses(2, vec![vec![1], vec![-1]]);
        assert_eq!(run_external(&cmd, &f).unwrap().status, Status::Unsat);
    }

    #[test]
    fn garbage_and_failures() {
        let (_dir, cmd) = script("echo garbage");
        let f = BoolClauseSet::new(1);
        assert!(matches!(
            run_external(&cmd, &f),
            Err(SatError::UnparseableOutput(_))
        ));
        let (_dir2, cmd) = script("exit 3");
        assert!(matches!(
            run_external(&cmd, &f),
            Err(SatError::ExternalFailed { .. })
        ));
        let missing = ExternalCommand::parse("/nonexistent/solver").unwrap();
        assert!(matches!(
            run_external(&missing, &f),
            Err(SatError::ExternalFailed { .. })
        ));
        assert_eq!(ExternalCommand::parse("   "), None);
    }
}
