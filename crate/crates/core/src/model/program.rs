use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ParseError, Var};

/// A normal rule `head :- pos, not neg.`; a missing head is an integrity constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Option<Var>,
    pub pos: Vec<Var>,
    pub neg: Vec<Var>,
}

impl Rule {
    pub fn new(head: Option<Var>, pos: Vec<Var>, neg: Vec<Var>) -> Self {
        let mut rule = Rule { head, pos, neg };
        dedup_in_order(&mut rule.pos);
        dedup_in_order(&mut rule.neg);
        rule
    }

    pub fn fact(head: Var) -> Self {
        Rule::new(Some(head), Vec::new(), Vec::new())
    }

    pub fn constraint(pos: Vec<Var>, neg: Vec<Var>) -> Self {
        Rule::new(None, pos, neg)
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    /// All atoms mentioned by the rule (head, positive and negative body), deduplicated.
    pub fn atoms(&self) -> Vec<Var> {
        let mut atoms: Vec<Var> = self
            .head
            .iter()
            .chain(self.pos.iter())
            .chain(self.neg.iter())
            .copied()
            .collect();
        atoms.sort();
        atoms.dedup();
        atoms
    }

    /// The body can never hold if an atom is required both true and false.
    pub fn body_is_contradictory(&self) -> bool {
        self.pos.iter().any(|a| self.neg.contains(a))
    }

    pub fn body_holds(&self, is_true: impl Fn(Var) -> bool) -> bool {
        self.pos.iter().all(|&a| is_true(a)) && self.neg.iter().all(|&a| !is_true(a))
    }

    /// Classical satisfaction: body true implies head true (or, for constraints, body false).
    pub fn is_satisfied(&self, is_true: impl Fn(Var) -> bool + Copy) -> bool {
        if !self.body_holds(is_true) {
            return true;
        }
        self.head.is_some_and(is_true)
    }
}

fn dedup_in_order(atoms: &mut Vec<Var>) {
    let mut seen = Vec::with_capacity(atoms.len());
    atoms.retain(|a| {
        if seen.contains(a) {
            false
        } else {
            seen.push(*a);
            true
        }
    });
}

/// A ground normal logic program over a dense, named atom universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    names: Vec<String>,
    index: HashMap<String, Var>,
    rules: Vec<Rule>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    /// A program with `n` atoms named `p1..pn` and no rules.
    pub fn with_atoms(n: usize) -> Self {
        let mut program = Program::new();
        for i in 1..=n {
            program.atom(&format!("p{i}"));
        }
        program
    }

    /// Interns an atom name, returning its variable.
    pub fn atom(&mut self, name: &str) -> Var {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = Var::from_index(self.names.len());
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, atom: Var) -> &str {
        &self.names[atom.index()]
    }

    pub fn num_atoms(&self) -> usize {
        self.names.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Adds a rule; panics if it references an atom outside the universe.
    pub fn add_rule(&mut self, rule: Rule) {
        for a in rule.atoms() {
            assert!(a.index() < self.num_atoms(), "rule references unknown atom {a}");
        }
        self.rules.push(rule);
    }

    /// Whether `atoms` (a set of true atoms) satisfies every rule classically.
    pub fn is_model(&self, is_true: impl Fn(Var) -> bool + Copy) -> bool {
        self.rules.iter().all(|r| r.is_satisfied(is_true))
    }

    /// Parses the ground rule syntax (`h :- a, not b.`, `h.`, `:- a.`, `%` comments).
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let mut program = Program::new();
        let mut pos = 0;
        while pos < tokens.len() {
            pos = parse_statement(&tokens, pos, &mut program)?;
        }
        Ok(program)
    }

    /// Writes the program back in the same syntax, one rule per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            if let Some(h) = rule.head {
                out.push_str(self.name(h));
            }
            let body: Vec<String> = rule
                .pos
                .iter()
                .map(|&a| self.name(a).to_string())
                .chain(rule.neg.iter().map(|&a| format!("not {}", self.name(a))))
                .collect();
            match (rule.head.is_some(), body.is_empty()) {
                (true, true) => {}
                (true, false) => write!(out, " :- {}", body.join(", ")).unwrap(),
                (false, true) => out.push_str(":- "),
                (false, false) => write!(out, ":- {}", body.join(", ")).unwrap(),
            }
            out.push_str(".\n");
        }
        out
    }

    /// Positive dependency graph and tightness check.
    pub fn tightness(&self) -> TightnessReport {
        let n = self.num_atoms();
        let mut arcs: Vec<(Var, Var)> = Vec::new();
        for rule in &self.rules {
            if let Some(h) = rule.head {
                for &b in &rule.pos {
                    arcs.push((b, h));
                }
            }
        }
        arcs.sort();
        arcs.dedup();

        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(b, h) in &arcs {
            out[b.index()].push(h.index());
            indegree[h.index()] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(Var::from_index(v));
            for &w in &out[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
        let tight = order.len() == n;
        TightnessReport {
            tight,
            arcs,
            topological_order: tight.then_some(order),
        }
    }

    pub fn is_tight(&self) -> bool {
        self.tightness().tight
    }
}

/// Result of [`Program::tightness`]: the positive dependency arcs `b -> h`
/// and, for tight programs, a topological order of all atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightnessReport {
    pub tight: bool,
    pub arcs: Vec<(Var, Var)>,
    pub topological_order: Option<Vec<Var>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    If,
    Comma,
    Bar,
    Dot,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut tokens = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('%').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                c if c.is_whitespace() => i += 1,
                ',' => {
                    tokens.push((Tok::Comma, line));
                    i += 1;
                }
                '|' | ';' => {
                    tokens.push((Tok::Bar, line));
                    i += 1;
                }
                '.' => {
                    tokens.push((Tok::Dot, line));
                    i += 1;
                }
                ':' if chars.get(i + 1) == Some(&'-') => {
                    tokens.push((Tok::If, line));
                    i += 2;
                }
                'a'..='z' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    if word == "not" {
                        tokens.push((Tok::Not, line));
                    } else {
                        tokens.push((Tok::Ident(word), line));
                    }
                }
                other => {
                    return Err(ParseError::Syntax {
                        line,
                        reason: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(tokens)
}

fn parse_statement(
    tokens: &[(Tok, usize)],
    start: usize,
    program: &mut Program,
) -> Result<usize, ParseError> {
    let line = tokens[start].1;
    let end = tokens[start..]
        .iter()
        .position(|(t, _)| *t == Tok::Dot)
        .map(|p| start + p)
        .ok_or_else(|| ParseError::Syntax {
            line,
            reason: "statement not terminated by `.`".into(),
        })?;
    let stmt = &tokens[start..end];
    let split = stmt.iter().position(|(t, _)| *t == Tok::If);
    let (head_toks, body_toks) = match split {
        Some(p) => (&stmt[..p], Some(&stmt[p + 1..])),
        None => (stmt, None),
    };

    let head = match head_toks {
        [] => None,
        [(Tok::Ident(name), _)] => Some(name.as_str()),
        toks if toks.iter().any(|(t, _)| matches!(t, Tok::Comma | Tok::Bar)) => {
            return Err(ParseError::UnsupportedDisjunction { line })
        }
        _ => {
            return Err(ParseError::Syntax {
                line,
                reason: "head must be a single atom".into(),
            })
        }
    };
    if head.is_none() && body_toks.is_none() {
        return Err(ParseError::Syntax {
            line,
            reason: "empty statement".into(),
        });
    }
    if let Some(toks) = body_toks {
        if toks.iter().any(|(t, _)| *t == Tok::Bar || *t == Tok::If) {
            return Err(ParseError::Syntax {
                line,
                reason: "unexpected token in body".into(),
            });
        }
    }

    // Intern atoms in order of appearance: head first, then body left to right.
    let head_var = head.map(|h| program.atom(h));
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    if let Some(toks) = body_toks {
        if !toks.is_empty() {
            for lit in toks.split(|(t, _)| *t == Tok::Comma) {
                match lit {
                    [(Tok::Ident(a), _)] => pos.push(program.atom(a)),
                    [(Tok::Not, _), (Tok::Ident(a), _)] => neg.push(program.atom(a)),
                    [] => {
                        return Err(ParseError::Syntax {
                            line,
                            reason: "empty body literal".into(),
                        })
                    }
                    [(_, l), ..] => {
                        return Err(ParseError::Syntax {
                            line: *l,
                            reason: "malformed body literal".into(),
                        })
                    }
                }
            }
        }
    }
    program.rules.push(Rule::new(head_var, pos, neg));
    Ok(end + 1)
}
