use super::AspError;
use crate::dp::solve_with_heuristic;
use crate::model::{CnfFormula, Lit, Program};
use crate::td::Heuristic;

/// Completion of a tight program.
///
/// Variables `0..num_atoms` are the program's atoms; every rule with a head
/// gets one body variable after them, in rule order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub cnf: CnfFormula,
    pub num_atoms: usize,
    /// Body variable of each rule (`None` for constraints).
    pub body_vars: Vec<Option<usize>>,
    /// Largest number of atoms in one rule; bounds the width added per bag.
    pub max_rule_size: usize,
}

/// Clark completion: `body_r <-> B(r)`, `body_r -> head`, and every atom
/// implies the disjunction of its rules' bodies. Atoms without rules become
/// unit-false; constraints become plain clauses.
pub fn clark_completion(program: &Program) -> Result<Completion, AspError> {
    if !program.is_tight() {
        return Err(AspError::NotTight);
    }
    let n = program.num_atoms();
    let mut cnf = CnfFormula::new(n);
    let mut body_vars = Vec::with_capacity(program.rules().len());
    let mut support: Vec<Vec<Lit>> = vec![Vec::new(); n];

    for rule in program.rules() {
        let body_false: Vec<Lit> = rule
            .pos
            .iter()
            .map(|a| a.neg())
            .chain(rule.neg.iter().map(|a| a.pos()))
            .collect();
        match rule.head {
            None => {
                cnf.add_clause(body_false);
                body_vars.push(None);
            }
            Some(h) => {
                let b = cnf.new_var();
                for &l in &body_false {
                    cnf.add_clause([b.neg(), !l]);
                }
                cnf.add_clause(body_false.iter().copied().chain([b.pos()]));
                cnf.add_clause([b.neg(), h.pos()]);
                support[h.index()].push(b.pos());
                body_vars.push(Some(b.index()));
            }
        }
    }
    for (atom, bodies) in support.into_iter().enumerate() {
        let h = crate::model::Var::from_index(atom);
        cnf.add_clause(std::iter::once(h.neg()).chain(bodies));
    }
    let max_rule_size = program.rules().iter().map(|r| r.atoms().len()).max().unwrap_or(0);
    Ok(Completion {
        cnf,
        num_atoms: n,
        body_vars,
        max_rule_size,
    })
}

/// Answer-set existence for a tight program via its completion.
pub fn solve_tight_asp(program: &Program, heuristic: Heuristic, seed: u64) -> Result<bool, AspError> {
    let completion = clark_completion(program)?;
    Ok(solve_with_heuristic(&completion.cnf, heuristic, seed)?)
}
