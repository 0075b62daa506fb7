//! Budgeted DPLL with unit propagation and pure-literal elimination.
//!
//! Clause state is kept in counters rather than watched literals: for each
//! clause the number of true and false literals, and for each literal the
//! number of not-yet-satisfied clauses containing it. That makes both unit
//! and pure-literal detection incremental, which is all these small random
//! instances need.

use super::SatResult;
use crate::formula::Formula;

const UNASSIGNED: i8 = 0;

struct Search {
    n: usize,
    // Flattened clause literals, by dense literal index.
    starts: Vec<usize>,
    lits: Vec<u32>,
    occurrences: Vec<Vec<u32>>,
    value: Vec<i8>,
    true_count: Vec<u32>,
    false_count: Vec<u32>,
    active: Vec<u32>,
    trail: Vec<u32>,
    units: Vec<u32>,
    pures: Vec<u32>,
    cursor: usize,
}

#[inline]
fn neg(l: u32) -> u32 {
    l ^ 1
}

impl Search {
    fn new(n: usize, clauses: &[Vec<u32>]) -> Self {
        let mut starts = Vec::with_capacity(clauses.len() + 1);
        let mut lits = Vec::new();
        let mut occurrences = vec![Vec::new(); 2 * n];
        let mut active = vec![0u32; 2 * n];
        starts.push(0);
        for (ci, c) in clauses.iter().enumerate() {
            for &l in c {
                lits.push(l);
                occurrences[l as usize].push(ci as u32);
                active[l as usize] += 1;
            }
            starts.push(lits.len());
        }
        Search {
            n,
            starts,
            lits,
            occurrences,
            value: vec![UNASSIGNED; n],
            true_count: vec![0; clauses.len()],
            false_count: vec![0; clauses.len()],
            active,
            trail: Vec::new(),
            units: Vec::new(),
            pures: Vec::new(),
            cursor: 0,
        }
    }

    #[inline]
    fn clause(&self, c: usize) -> &[u32] {
        &self.lits[self.starts[c]..self.starts[c + 1]]
    }

    /// +1 true, -1 false, 0 unassigned.
    #[inline]
    fn lit_value(&self, l: u32) -> i8 {
        let v = self.value[(l >> 1) as usize];
        if l & 1 == 0 {
            v
        } else {
            -v
        }
    }

    /// Makes `l` true. Returns false on a conflict; counters are still fully
    /// updated so the assignment can be undone uniformly.
    fn assign(&mut self, l: u32) -> bool {
        self.value[(l >> 1) as usize] = if l & 1 == 0 { 1 } else { -1 };
        self.trail.push(l);
        for i in 0..self.occurrences[l as usize].len() {
            let c = self.occurrences[l as usize][i] as usize;
            self.true_count[c] += 1;
            if self.true_count[c] == 1 {
                for j in self.starts[c]..self.starts[c + 1] {
                    let q = self.lits[j];
                    self.active[q as usize] -= 1;
                    if self.active[q as usize] == 0 && self.active[neg(q) as usize] > 0 {
                        self.pures.push(neg(q));
                    }
                }
            }
        }
        let mut ok = true;
        for i in 0..self.occurrences[neg(l) as usize].len() {
            let c = self.occurrences[neg(l) as usize][i] as usize;
            self.false_count[c] += 1;
            if self.true_count[c] > 0 {
                continue;
            }
            let width = (self.starts[c + 1] - self.starts[c]) as u32;
            if self.false_count[c] == width {
                ok = false;
            } else if self.false_count[c] + 1 == width {
                let unit = self
                    .clause(c)
                    .iter()
                    .copied()
                    .find(|&q| self.lit_value(q) == UNASSIGNED);
                self.units.push(unit.expect("one literal left open"));
            }
        }
        ok
    }

    fn unassign_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().expect("trail longer than len");
            let var = (l >> 1) as usize;
            for i in 0..self.occurrences[neg(l) as usize].len() {
                let c = self.occurrences[neg(l) as usize][i] as usize;
                self.false_count[c] -= 1;
            }
            for i in 0..self.occurrences[l as usize].len() {
                let c = self.occurrences[l as usize][i] as usize;
                self.true_count[c] -= 1;
                if self.true_count[c] == 0 {
                    for j in self.starts[c]..self.starts[c + 1] {
                        let q = self.lits[j];
                        self.active[q as usize] += 1;
                        self.cursor = self.cursor.min((q >> 1) as usize);
                    }
                }
            }
            self.value[var] = UNASSIGNED;
            self.cursor = self.cursor.min(var);
        }
        self.units.clear();
        self.pures.clear();
    }

    /// Unit propagation, then pure literals, until both queues are empty.
    fn propagate(&mut self) -> bool {
        loop {
            if let Some(l) = self.units.pop() {
                match self.lit_value(l) {
                    1 => {}
                    -1 => return false,
                    _ => {
                        if !self.assign(l) {
                            return false;
                        }
                    }
                }
            } else if let Some(l) = self.pures.pop() {
                let still_pure = self.active[neg(l) as usize] == 0 && self.active[l as usize] > 0;
                if self.lit_value(l) == UNASSIGNED && still_pure && !self.assign(l) {
                    return false;
                }
            } else {
                return true;
            }
        }
    }

    /// Lowest unassigned variable that still appears in an open clause.
    fn next_branch(&mut self) -> Option<usize> {
        while self.cursor < self.n {
            let v = self.cursor;
            let open = self.active[2 * v] + self.active[2 * v + 1] > 0;
            if self.value[v] == UNASSIGNED && open {
                return Some(v);
            }
            self.cursor += 1;
        }
        None
    }
}

/// Decides `formula` with at most `node_budget` search nodes (branch and
/// flip decisions); UNKNOWN when the budget runs out.
///
/// Branches on the lowest-index open variable, positive phase first. A SAT
/// witness sets untouched variables to false and is checked before it is
/// returned.
pub fn solve_dpll(formula: &Formula, node_budget: u64) -> SatResult {
    assert!(node_budget >= 1, "node budget must be positive");
    let n = formula.num_vars() as usize;

    // Duplicate literals are merged and tautologies dropped; neither changes
    // satisfiability.
    let mut clauses: Vec<Vec<u32>> = Vec::with_capacity(formula.num_clauses());
    for c in formula.clauses() {
        let mut lits: Vec<u32> = c.literals().iter().map(|l| l.index() as u32).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue;
        }
        if lits.is_empty() {
            return SatResult::unsat(None);
        }
        clauses.push(lits);
    }

    let mut s = Search::new(n, &clauses);
    s.units
        .extend(clauses.iter().filter(|c| c.len() == 1).map(|c| c[0]));
    for v in 0..n {
        let (p, q) = (2 * v as u32, 2 * v as u32 + 1);
        if s.active[p as usize] > 0 && s.active[q as usize] == 0 {
            s.pures.push(p);
        } else if s.active[q as usize] > 0 && s.active[p as usize] == 0 {
            s.pures.push(q);
        }
    }

    // (trail length before the decision, decision literal, already flipped)
    let mut decisions: Vec<(usize, u32, bool)> = Vec::new();
    let mut nodes: u64 = 0;
    let mut ok = s.propagate();
    loop {
        if !ok {
            // Backtrack to the deepest decision whose other phase is untried.
            loop {
                match decisions.pop() {
                    None => return SatResult::unsat(None),
                    Some((len, _, true)) => s.unassign_to(len),
                    Some((len, lit, false)) => {
                        s.unassign_to(len);
                        nodes += 1;
                        if nodes > node_budget {
                            return SatResult::unknown();
                        }
                        decisions.push((len, neg(lit), true));
                        ok = s.assign(neg(lit)) && s.propagate();
                        break;
                    }
                }
            }
            continue;
        }
        let Some(v) = s.next_branch() else { break };
        nodes += 1;
        if nodes > node_budget {
            return SatResult::unknown();
        }
        let lit = 2 * v as u32;
        decisions.push((s.trail.len(), lit, false));
        ok = s.assign(lit) && s.propagate();
    }

    let witness: Vec<bool> = s.value.iter().map(|&v| v == 1).collect();
    assert!(
        formula.is_satisfied_by(&witness),
        "DPLL witness failed verification"
    );
    SatResult::sat(witness)
}

/// Solves only `C_r`, the clauses whose variables all lie in `1..=r`. UNSAT
/// here is a certificate for the full formula.
pub fn core_restricted_status(formula: &Formula, r: u32, node_budget: u64) -> SatResult {
    assert!(r >= 1, "core radius must be positive");
    solve_dpll(&formula.restrict_to(r), node_budget)
}
