use std::fmt;

/// A propositional variable (or ASP atom), stored as a 0-based index.
///
/// Text formats are 1-based; use [`Var::from_dimacs`] and [`Var::to_dimacs`]
/// at the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub const fn new(index: u32) -> Self {
        Var(index)
    }

    pub fn from_index(index: usize) -> Self {
        Var(u32::try_from(index).expect("variable index exceeds u32"))
    }

    /// Converts a positive 1-based id into a variable.
    pub fn from_dimacs(id: u32) -> Self {
        assert!(id > 0, "DIMACS variable ids start at 1");
        Var(id - 1)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn to_dimacs(self) -> u32 {
        self.0 + 1
    }

    pub const fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    pub const fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.to_dimacs())
    }
}

/// A literal: a variable with a polarity, packed as `2 * var + negated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub const fn new(var: Var, negated: bool) -> Self {
        Lit((var.0 << 1) | negated as u32)
    }

    pub const fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub const fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub const fn is_positive(self) -> bool {
        !self.is_negated()
    }

    /// Parses a non-zero signed DIMACS literal.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        let var = Var::from_dimacs(value.unsigned_abs() as u32);
        Some(Lit::new(var, value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let id = self.var().to_dimacs() as i64;
        if self.is_negated() {
            -id
        } else {
            id
        }
    }

    /// Truth value of the literal under a value for its variable.
    pub const fn holds(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}
