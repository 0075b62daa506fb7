//! Literals, clauses and formulas.
//!
//! A formula is a multiset of clauses: duplicates are kept and clause order is
//! generation order. Literals inside a clause keep the order they were drawn
//! in.

pub mod dimacs;

use smallvec::SmallVec;
use std::fmt;
use std::ops::Not;
use thiserror::Error;

pub use dimacs::{parse_dimacs, read_dimacs, write_dimacs, DimacsDocument, DimacsError};

/// A signed variable index, stored in DIMACS form (`-3` is `¬x3`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Literal(i32);

impl Literal {
    /// # Panics
    ///
    /// If `var` is zero or does not fit the DIMACS range.
    #[inline]
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(
            var >= 1 && var <= i32::MAX as u32,
            "variable index {var} out of range"
        );
        let v = var as i32;
        Literal(if positive { v } else { -v })
    }

    #[inline]
    pub fn positive(var: u32) -> Self {
        Self::new(var, true)
    }

    #[inline]
    pub fn negative(var: u32) -> Self {
        Self::new(var, false)
    }

    /// `None` for zero or `i32::MIN`.
    #[inline]
    pub fn from_dimacs(value: i32) -> Option<Self> {
        (value != 0 && value != i32::MIN).then_some(Literal(value))
    }

    #[inline]
    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense index over the `2n` literals: `2(var - 1)` for `x`, one more for `¬x`.
    #[inline]
    pub fn index(self) -> usize {
        2 * (self.var() as usize - 1) + usize::from(self.0 < 0)
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        Self::new((index / 2 + 1) as u32, index.is_multiple_of(2))
    }

    /// Truth value under `assignment`, indexed by `var - 1`.
    #[inline]
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var() as usize - 1] == self.is_positive()
    }
}

impl Not for Literal {
    type Output = Literal;

    #[inline]
    fn not(self) -> Literal {
        Literal(-self.0)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: SmallVec<[Literal; 4]>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Literal>>(lits: I) -> Self {
        Clause {
            lits: lits.into_iter().collect(),
        }
    }

    /// From DIMACS integers.
    ///
    /// # Panics
    ///
    /// On a zero literal.
    pub fn from_dimacs(values: &[i32]) -> Self {
        Clause::new(
            values
                .iter()
                .map(|&v| Literal::from_dimacs(v).expect("nonzero literal")),
        )
    }

    #[inline]
    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.lits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// Literals sorted by variable, then positive before negative.
    pub fn canonical(&self) -> Clause {
        let mut lits = self.lits.clone();
        lits.sort_unstable_by_key(|l| (l.var(), !l.is_positive()));
        Clause { lits }
    }

    /// True when some variable occurs twice, with either sign.
    pub fn has_repeated_variable(&self) -> bool {
        let l = &self.lits;
        (0..l.len()).any(|i| (i + 1..l.len()).any(|j| l[i].var() == l[j].var()))
    }

    #[inline]
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(assignment))
    }

    #[inline]
    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Clause")
            .field(&self.lits.as_slice())
            .finish()
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {literal} in clause {clause} exceeds the {n} declared variables")]
    LiteralOutOfRange { clause: usize, literal: i32, n: u32 },
}

/// A multiset of clauses over variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Formula {
    n: u32,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: u32) -> Self {
        Formula {
            n,
            clauses: Vec::new(),
        }
    }

    pub fn with_clauses(n: u32, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(l) = c.literals().iter().find(|l| l.var() > n) {
                return Err(FormulaError::LiteralOutOfRange {
                    clause: i,
                    literal: l.to_dimacs(),
                    n,
                });
            }
        }
        Ok(Formula { n, clauses })
    }

    /// # Panics
    ///
    /// If a literal exceeds `n`.
    pub fn push(&mut self, clause: Clause) {
        assert!(
            clause.max_var() <= self.n,
            "clause {clause:?} exceeds n = {}",
            self.n
        );
        self.clauses.push(clause);
    }

    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    /// `|F|`, the total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::width).sum()
    }

    /// The common clause width, if all clauses share one.
    pub fn uniform_width(&self) -> Option<usize> {
        let w = self.clauses.first()?.width();
        self.clauses.iter().all(|c| c.width() == w).then_some(w)
    }

    /// `assignment[v - 1]` is the value of variable `v`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assert_eq!(
            assignment.len(),
            self.n as usize,
            "assignment length must equal n"
        );
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// The clauses mentioning only variables `1..=r`, over the same `n`.
    pub fn restrict_to(&self, r: u32) -> Formula {
        Formula {
            n: self.n,
            clauses: self
                .clauses
                .iter()
                .filter(|c| c.max_var() <= r)
                .cloned()
                .collect(),
        }
    }
}
