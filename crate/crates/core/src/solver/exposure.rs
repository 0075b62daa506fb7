//! Implied-literal exposure.
//!
//! Starting from a literal `x`, repeatedly pick a remaining clause `y ∨ z`
//! whose literal `y` has a reached negation, mark `z` as reached, bump the
//! removal counters of `y` and `z`, and delete the clause. The walk
//! `X_r = Σ_{o(¬x)} (k_x - c_x)` counts the clause occurrences still waiting
//! to be explored; a step changes it by `-1` when `z` was already reached, by
//! `k(¬z) - 1` when neither `z` nor `¬z` was, and ends in a contradiction when
//! `¬z` was reached but `z` was not.

use super::SolverError;
use crate::formula::{Formula, Literal};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Fraction of the `2n` literals above which an implied set counts as giant.
pub const DEFAULT_GIANT_FRACTION: f64 = 0.01;

/// How one step changed the walk, classified by the flags of `z` before the
/// step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExposureCase {
    /// `z` was already reached: `X` drops by one.
    ReachedBefore,
    /// Neither `z` nor `¬z` was reached: `X` gains `k(¬z) - 1`.
    Fresh,
    /// `¬z` was reached: `X` changes by `k(¬z) - c(¬z) - 2` and the walk stops.
    Contradiction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExposureStep {
    /// Index of the removed clause in the formula.
    pub clause: usize,
    pub y: Literal,
    pub z: Literal,
    pub case: ExposureCase,
    /// `k(¬z)` and `c(¬z)` just before the step.
    pub k_not_z: u32,
    pub c_not_z: u32,
}

impl ExposureStep {
    /// The walk increment this step must produce.
    pub fn expected_delta(&self) -> i64 {
        let (k, c) = (i64::from(self.k_not_z), i64::from(self.c_not_z));
        match self.case {
            ExposureCase::ReachedBefore => -1,
            ExposureCase::Fresh => k - 1,
            ExposureCase::Contradiction => k - c - 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExposureOutcome {
    /// No eligible clause is left and the implied set is small.
    Closed,
    /// Some variable was reached with both signs.
    Contradiction,
    /// The implied set reached the giant fraction of the literals.
    Giant,
}

#[derive(Clone, Debug)]
pub struct ExposureTrace {
    pub start: Literal,
    /// Reached literals in the order they were reached, `start` first.
    pub implied: Vec<Literal>,
    /// `walk[r]` is `X_r`; `walk[0] = k(¬start)`.
    pub walk: Vec<i64>,
    pub steps: Vec<ExposureStep>,
    pub outcome: ExposureOutcome,
}

impl ExposureTrace {
    pub fn max_walk(&self) -> i64 {
        self.walk.iter().copied().max().unwrap_or(0)
    }
}

/// Runs the exposure from `start` on a 2-CNF formula. Among the eligible
/// clauses the one generated earliest is taken first.
///
/// # Panics
///
/// If `giant_fraction` is not in `(0, 1]`, or `start` exceeds the formula's
/// variables.
pub fn find_implied_set(
    formula: &Formula,
    start: Literal,
    giant_fraction: f64,
) -> Result<ExposureTrace, SolverError> {
    assert!(
        giant_fraction > 0.0 && giant_fraction <= 1.0,
        "giant_fraction must lie in (0, 1]"
    );
    assert!(
        start.var() <= formula.num_vars(),
        "start literal {start} exceeds n"
    );
    let nodes = 2 * formula.num_vars() as usize;
    let mut occurrences: Vec<Vec<u32>> = vec![Vec::new(); nodes];
    for (i, c) in formula.clauses().iter().enumerate() {
        if c.width() != 2 {
            return Err(SolverError::NotTwoCnf {
                clause: i,
                width: c.width(),
            });
        }
        for l in c.literals() {
            occurrences[l.index()].push(i as u32);
        }
    }
    let k = |l: Literal| occurrences[l.index()].len() as i64;

    let mut reached = vec![false; nodes];
    let mut counter = vec![0u32; nodes];
    let mut removed = vec![false; formula.num_clauses()];
    let mut eligible: BinaryHeap<Reverse<u32>> = BinaryHeap::new();

    let mut implied = vec![start];
    reached[start.index()] = true;
    eligible.extend(occurrences[(!start).index()].iter().map(|&c| Reverse(c)));
    let mut x = k(!start);
    let mut walk = vec![x];
    let mut steps = Vec::new();
    let mut contradiction = false;

    while let Some(Reverse(ci)) = eligible.pop() {
        let ci = ci as usize;
        if removed[ci] {
            continue;
        }
        let &[a, b] = formula.clauses()[ci].literals() else {
            unreachable!("width checked")
        };
        let (y, z) = if reached[(!a).index()] {
            (a, b)
        } else {
            (b, a)
        };
        debug_assert!(reached[(!y).index()]);

        let (z_on, not_z_on) = (reached[z.index()], reached[(!z).index()]);
        let case = match (z_on, not_z_on) {
            (true, false) => ExposureCase::ReachedBefore,
            (false, false) => ExposureCase::Fresh,
            (false, true) => ExposureCase::Contradiction,
            (true, true) => unreachable!("the walk stops at the first contradiction"),
        };
        let step = ExposureStep {
            clause: ci,
            y,
            z,
            case,
            k_not_z: k(!z) as u32,
            c_not_z: counter[(!z).index()],
        };

        if !z_on {
            reached[z.index()] = true;
            implied.push(z);
            x += k(!z) - i64::from(counter[(!z).index()]);
            eligible.extend(occurrences[(!z).index()].iter().map(|&c| Reverse(c)));
        }
        counter[y.index()] += 1;
        if reached[(!y).index()] {
            x -= 1;
        }
        counter[z.index()] += 1;
        if reached[(!z).index()] {
            x -= 1;
        }
        removed[ci] = true;

        debug_assert_eq!(x - walk[walk.len() - 1], step.expected_delta());
        walk.push(x);
        steps.push(step);
        if case == ExposureCase::Contradiction {
            contradiction = true;
            break;
        }
    }

    let outcome = if contradiction {
        ExposureOutcome::Contradiction
    } else if implied.len() as f64 >= giant_fraction * nodes as f64 {
        ExposureOutcome::Giant
    } else {
        ExposureOutcome::Closed
    };
    Ok(ExposureTrace {
        start,
        implied,
        walk,
        steps,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn formula(n: u32, clauses: &[[i32; 2]]) -> Formula {
        Formula::with_clauses(n, clauses.iter().map(|c| Clause::from_dimacs(c)).collect()).unwrap()
    }

    #[test]
    fn single_implication() {
        let f = formula(10, &[[-1, 2]]);
        let t = find_implied_set(&f, Literal::positive(1), 0.5).unwrap();
        assert_eq!(t.implied, vec![Literal::positive(1), Literal::positive(2)]);
        assert_eq!(t.outcome, ExposureOutcome::Closed);
        assert_eq!(t.walk, vec![1, 0]);
        assert_eq!(t.steps[0].case, ExposureCase::Fresh);
    }

    #[test]
    fn self_refuting_start() {
        // x1 → x2 and x2 → ¬x1.
        let f = formula(2, &[[-1, 2], [-2, -1]]);
        let t = find_implied_set(&f, Literal::positive(1), 1.0).unwrap();
        assert_eq!(t.outcome, ExposureOutcome::Contradiction);
        assert_eq!(t.steps.last().unwrap().case, ExposureCase::Contradiction);
    }

    #[test]
    fn walk_increments_match_cases() {
        let f = formula(
            6,
            &[
                [-1, 2],
                [-1, 3],
                [-2, 3],
                [-3, 4],
                [-4, 5],
                [5, 6],
                [-5, -6],
                [-3, 4],
            ],
        );
        let t = find_implied_set(&f, Literal::positive(1), 1.0).unwrap();
        for (r, s) in t.steps.iter().enumerate() {
            assert_eq!(
                t.walk[r + 1] - t.walk[r],
                s.expected_delta(),
                "step {r}: {s:?}"
            );
        }
        assert!(t
            .steps
            .iter()
            .any(|s| s.case == ExposureCase::ReachedBefore));
    }

    #[test]
    fn giant_threshold() {
        let f = formula(4, &[[-1, 2], [-2, 3]]);
        assert_eq!(
            find_implied_set(&f, Literal::positive(1), 0.375)
                .unwrap()
                .outcome,
            ExposureOutcome::Giant
        );
        assert_eq!(
            find_implied_set(&f, Literal::positive(1), 0.5)
                .unwrap()
                .outcome,
            ExposureOutcome::Closed
        );
    }
}
