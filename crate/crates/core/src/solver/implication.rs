use super::{SatResult, SolverError};
use crate::formula::{Formula, Literal};

/// Directed graph on the `2n` literals; clause `a ∨ b` adds `¬a → b` and
/// `¬b → a`. Stored in compressed sparse row form, nodes numbered by
/// [`Literal::index`].
#[derive(Clone, Debug)]
pub struct ImplicationGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl ImplicationGraph {
    pub fn from_formula(formula: &Formula) -> Result<Self, SolverError> {
        let nodes = 2 * formula.num_vars() as usize;
        let mut edges = Vec::with_capacity(2 * formula.num_clauses());
        for (i, c) in formula.clauses().iter().enumerate() {
            let &[a, b] = c.literals() else {
                return Err(SolverError::NotTwoCnf {
                    clause: i,
                    width: c.width(),
                });
            };
            edges.push(((!a).index(), b.index() as u32));
            edges.push(((!b).index(), a.index() as u32));
        }
        let mut offsets = vec![0usize; nodes + 1];
        for &(u, _) in &edges {
            offsets[u + 1] += 1;
        }
        for i in 0..nodes {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; edges.len()];
        for (u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        Ok(ImplicationGraph { offsets, targets })
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, lit: Literal) -> impl Iterator<Item = Literal> + '_ {
        let i = lit.index();
        self.targets[self.offsets[i]..self.offsets[i + 1]]
            .iter()
            .map(|&t| Literal::from_index(t as usize))
    }

    pub fn has_edge(&self, from: Literal, to: Literal) -> bool {
        self.successors(from).any(|l| l == to)
    }

    /// Literals reachable from `start`, `start` included, indexed by
    /// [`Literal::index`].
    pub fn reachable_from(&self, start: Literal) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![start.index()];
        seen[start.index()] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.targets[self.offsets[u]..self.offsets[u + 1]] {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Component id per node (iterative Tarjan). Ids come out in reverse
    /// topological order: an edge `u → v` between components has
    /// `comp[u] >= comp[v]`.
    pub fn strongly_connected_components(&self) -> Vec<u32> {
        const NONE: u32 = u32::MAX;
        let n = self.num_nodes();
        let mut index = vec![NONE; n];
        let mut low = vec![0u32; n];
        let mut comp = vec![NONE; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut call: Vec<(u32, usize)> = Vec::new();
        let (mut next_index, mut next_comp) = (0u32, 0u32);

        for root in 0..n {
            if index[root] != NONE {
                continue;
            }
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root as u32);
            call.push((root as u32, self.offsets[root]));

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let v = v as usize;
                if *pos < self.offsets[v + 1] {
                    let w = self.targets[*pos] as usize;
                    *pos += 1;
                    if index[w] == NONE {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w as u32);
                        call.push((w as u32, self.offsets[w]));
                    } else if comp[w] == NONE {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack holds v") as usize;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some(&(u, _)) = call.last() {
                    let u = u as usize;
                    low[u] = low[u].min(low[v]);
                }
            }
        }
        comp
    }
}

/// Decides a 2-CNF formula.
///
/// UNSAT comes with the lowest variable `x` such that `x` and `¬x` lie in one
/// strongly connected component. A SAT witness is checked against every
/// clause before it is returned.
pub fn solve_2sat(formula: &Formula) -> Result<SatResult, SolverError> {
    let graph = ImplicationGraph::from_formula(formula)?;
    let comp = graph.strongly_connected_components();
    let n = formula.num_vars();
    let mut witness = Vec::with_capacity(n as usize);
    for v in 1..=n {
        let (pos, neg) = (
            comp[Literal::positive(v).index()],
            comp[Literal::negative(v).index()],
        );
        if pos == neg {
            return Ok(SatResult::unsat(Some(v)));
        }
        // The literal whose component is closer to the sinks is made true.
        witness.push(pos < neg);
    }
    assert!(
        formula.is_satisfied_by(&witness),
        "2-SAT witness failed verification"
    );
    Ok(SatResult::sat(witness))
}
