use std::io::Write as _;
use std::path::PathBuf;
use std::process::Command;

use num_bigint::BigUint;
use num_traits::Zero;

use super::HybridError;
use crate::model::CnfFormula;

/// Largest formula the internal enumerator accepts, in variables.
pub const INTERNAL_MAX_VARS: usize = 22;

/// Environment variable naming the directory for sub-solver input files.
pub const TMPDIR_ENV: &str = "TREEWISE_TMPDIR";

/// What a sub-solver call must determine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Decide,
    Count,
}

/// Solver for residual sub-instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubSolver {
    /// Word-parallel enumeration, limited to [`INTERNAL_MAX_VARS`] variables.
    Internal,
    /// Shell-free command template; `{file}` is replaced by the DIMACS input path
    /// (appended as last argument when absent).
    External(String),
}

impl SubSolver {
    /// Model count in [`Mode::Count`]; 0 or 1 in [`Mode::Decide`].
    pub fn solve(&self, cnf: &CnfFormula, mode: Mode) -> Result<BigUint, HybridError> {
        match self {
            SubSolver::Internal => {
                if cnf.num_vars() > INTERNAL_MAX_VARS {
                    return Err(HybridError::DepthExhaustedWithoutSubSolver {
                        vars: cnf.num_vars(),
                        limit: INTERNAL_MAX_VARS,
                    });
                }
                Ok(enumerate(cnf, mode))
            }
            SubSolver::External(template) => run_external(template, cnf, mode),
        }
    }
}

/// Counts models 64 assignments at a time: the six lowest variables vary
/// inside a word, the rest are enumerated.
fn enumerate(cnf: &CnfFormula, mode: Mode) -> BigUint {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let n = cnf.num_vars();
    let low = n.min(6);
    let valid: u64 = if low == 6 { u64::MAX } else { (1u64 << (1 << low)) - 1 };
    let mut total: u64 = 0;
    for high in 0u64..1 << (n - low) {
        let mut word = valid;
        for clause in cnf.clauses() {
            let mut sat = 0u64;
            for lit in clause {
                let v = lit.var().index();
                let value = if v < 6 {
                    PATTERNS[v]
                } else if high >> (v - 6) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
                sat |= if lit.is_negated() { !value } else { value };
            }
            word &= sat;
            if word == 0 {
                break;
            }
        }
        total += u64::from(word.count_ones());
        if mode == Mode::Decide && total > 0 {
            return BigUint::from(1u32);
        }
    }
    BigUint::from(total)
}

fn run_external(template: &str, cnf: &CnfFormula, mode: Mode) -> Result<BigUint, HybridError> {
    let failure = |msg: String| HybridError::SubSolverFailure(msg);
    let mut builder = tempfile::Builder::new();
    builder.prefix("treewise-").suffix(".cnf");
    let mut file = match std::env::var_os(TMPDIR_ENV) {
        Some(dir) => builder.tempfile_in(PathBuf::from(dir)),
        None => builder.tempfile(),
    }
    .map_err(|e| failure(format!("cannot create input file: {e}")))?;
    file.write_all(cnf.to_dimacs().as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| failure(format!("cannot write input file: {e}")))?;
    let path = file.path().to_string_lossy().into_owned();

    let mut words: Vec<String> = template.split_whitespace().map(str::to_owned).collect();
    if words.is_empty() {
        return Err(failure("empty sub-solver command".into()));
    }
    if words.iter().any(|w| w.contains("{file}")) {
        for w in &mut words {
            *w = w.replace("{file}", &path);
        }
    } else {
        words.push(path);
    }
    let output = Command::new(&words[0])
        .args(&words[1..])
        .output()
        .map_err(|e| failure(format!("cannot run `{}`: {e}", words[0])))?;
    match output.status.code() {
        Some(0 | 10 | 20) => {}
        other => {
            let stderr = String::from_utf8_lossy(&output.stderr);
            let first = stderr.lines().next().unwrap_or("");
            return Err(failure(format!(
                "`{}` exited with {}: {first}",
                words[0],
                other.map_or_else(|| "a signal".to_string(), |c| c.to_string())
            )));
        }
    }
    parse_answer(&String::from_utf8_lossy(&output.stdout), mode).map_err(failure)
}

/// Reads either a model-counter line `c s exact arb int N` or a SAT status
/// line `s SATISFIABLE` / `s UNSATISFIABLE`.
pub fn parse_answer(stdout: &str, mode: Mode) -> Result<BigUint, String> {
    let mut count: Option<BigUint> = None;
    let mut status: Option<bool> = None;
    for line in stdout.lines() {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["c", "s", "exact", .., "int", n] => {
                count = Some(n.parse().map_err(|_| format!("unparsable count `{n}`"))?);
            }
            ["s", "SATISFIABLE"] => status = Some(true),
            ["s", "UNSATISFIABLE"] => status = Some(false),
            _ => {}
        }
    }
    match (mode, count, status) {
        (_, Some(c), Some(false)) if !c.is_zero() => Err("solver reports UNSATISFIABLE with a nonzero count".into()),
        (Mode::Count, Some(c), _) => Ok(c),
        (_, None, Some(false)) => Ok(BigUint::zero()),
        (Mode::Decide, Some(c), _) => Ok(BigUint::from(u32::from(!c.is_zero()))),
        (Mode::Decide, None, Some(true)) => Ok(BigUint::from(1u32)),
        (Mode::Count, None, Some(true)) => Err("solver reports SATISFIABLE without a model count".into()),
        (_, None, None) => Err("no answer line in solver output".into()),
    }
}
