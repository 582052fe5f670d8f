use num_bigint::BigUint;

use super::DpError;
use crate::model::CnfFormula;

/// Largest variable count [`brute_force_count`] will enumerate.
pub const ORACLE_MAX_VARS: usize = 26;

/// Counts models by enumerating every assignment.
pub fn brute_force_count(cnf: &CnfFormula) -> Result<BigUint, DpError> {
    let n = cnf.num_vars();
    if n > ORACLE_MAX_VARS {
        return Err(DpError::TooLargeForOracle {
            vars: n,
            limit: ORACLE_MAX_VARS,
        });
    }
    let masks: Vec<(u32, u32)> = cnf
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), lit| {
                let m = 1u32 << lit.var().index();
                if lit.is_negated() {
                    (pos, neg | m)
                } else {
                    (pos | m, neg)
                }
            })
        })
        .collect();
    let mut count: u64 = 0;
    for a in 0..(1u32 << n) {
        if masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0) {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}
