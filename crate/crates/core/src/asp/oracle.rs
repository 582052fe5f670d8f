use super::AspError;
use crate::model::{Program, Var};

pub const ASP_ORACLE_MAX_ATOMS: usize = 20;

/// Answer sets found by exhaustive enumeration, each sorted ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StableModels {
    pub answer_sets: Vec<Vec<Var>>,
    /// Set when enumeration stopped at the requested maximum.
    pub truncated: bool,
}

impl StableModels {
    pub fn is_empty(&self) -> bool {
        self.answer_sets.is_empty()
    }
}

pub fn enumerate_answer_sets(program: &Program) -> Result<StableModels, AspError> {
    enumerate_answer_sets_limited(program, usize::MAX)
}

/// Tries every atom subset in increasing bitmask order and keeps the stable ones.
pub fn enumerate_answer_sets_limited(program: &Program, max_sets: usize) -> Result<StableModels, AspError> {
    let n = program.num_atoms();
    if n > ASP_ORACLE_MAX_ATOMS {
        return Err(AspError::TooLargeForOracle {
            atoms: n,
            limit: ASP_ORACLE_MAX_ATOMS,
        });
    }
    let mask = |atoms: &[Var]| atoms.iter().fold(0u32, |m, a| m | 1 << a.index());
    let rules: Vec<(Option<usize>, u32, u32)> = program
        .rules()
        .iter()
        .map(|r| (r.head.map(Var::index), mask(&r.pos), mask(&r.neg)))
        .collect();

    let mut result = StableModels::default();
    for candidate in 0..(1u32 << n) {
        let violates_constraint = rules
            .iter()
            .any(|&(h, pos, neg)| h.is_none() && pos & !candidate == 0 && neg & candidate == 0);
        if violates_constraint || least_model_of_reduct(&rules, candidate) != candidate {
            continue;
        }
        if result.answer_sets.len() == max_sets {
            result.truncated = true;
            break;
        }
        result
            .answer_sets
            .push((0..n).filter(|&i| candidate >> i & 1 == 1).map(Var::from_index).collect());
    }
    Ok(result)
}

fn least_model_of_reduct(rules: &[(Option<usize>, u32, u32)], candidate: u32) -> u32 {
    let mut model = 0u32;
    loop {
        let mut next = model;
        for &(h, pos, neg) in rules {
            if let Some(h) = h {
                if neg & candidate == 0 && pos & !model == 0 {
                    next |= 1 << h;
                }
            }
        }
        if next == model {
            return model;
        }
        model = next;
    }
}
