//! Oriented digraphs, vertex orderings, and feedback-arc counting.
//!
//! An ordering places vertex `positions[i]` at rank `i`. Under an ordering an
//! arc `u -> v` is *forward* when `rank(u) < rank(v)` and *backward* (a
//! feedback arc) otherwise. In adjacency-matrix terms the ordering is a
//! relabelling `P^T A P` and the backward arcs are the ones below the diagonal.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type Vertex = usize;
pub type Arc = (Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at arc ({0}, {0})")]
    SelfLoop(Vertex),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(Vertex, Vertex),
    #[error("arc ({0}, {1}) closes a 2-cycle with ({1}, {0})")]
    TwoCycle(Vertex, Vertex),
    #[error("arc ({0}, {1}) has an endpoint outside 0..{2}")]
    VertexOutOfRange(Vertex, Vertex, usize),
    #[error("ordering has {got} entries, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ordering is not a permutation of 0..{0}")]
    NotAPermutation(usize),
}

/// A directed graph with no self-loops, no multi-arcs and no 2-cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedDigraph {
    n: usize,
    arcs: Vec<Arc>,
    out: Vec<Vec<Vertex>>,
}

impl OrientedDigraph {
    pub fn new(n: usize, arcs: Vec<Arc>) -> Result<Self, GraphError> {
        let mut seen: HashSet<Arc> = HashSet::with_capacity(arcs.len());
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if seen.contains(&(v, u)) {
                return Err(GraphError::TwoCycle(u, v));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateArc(u, v));
            }
        }
        Ok(Self::from_arcs_unchecked(n, arcs))
    }

    /// Builds the graph without validation. Callers guarantee the invariants
    /// (used by samplers that produce oriented pairs by construction).
    pub(crate) fn from_arcs_unchecked(n: usize, arcs: Vec<Arc>) -> Self {
        let mut out = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            out[u].push(v);
        }
        OrientedDigraph { n, arcs, out }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_arcs_unchecked(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of arcs, `M`.
    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v]
    }

    /// Arc set in sorted order, for comparisons that ignore arc order.
    pub fn sorted_arcs(&self) -> Vec<Arc> {
        let mut a = self.arcs.clone();
        a.sort_unstable();
        a
    }

    /// `2M / n`.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        2.0 * self.m() as f64 / self.n as f64
    }

    /// In-degree plus out-degree of every vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.arcs {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Per-vertex out-neighbour bitmasks. Only meaningful for `n <= 64`.
    pub fn out_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask view needs n <= 64, got {}", self.n);
        let mut masks = vec![0u64; self.n];
        for &(u, v) in &self.arcs {
            masks[u] |= 1 << v;
        }
        masks
    }

    /// Dense signed adjacency: `+1` at `(u, v)` for `u -> v`, `-1` for `v -> u`.
    pub(crate) fn signed_matrix(&self) -> Vec<i8> {
        let n = self.n;
        let mut mat = vec![0i8; n * n];
        for &(u, v) in &self.arcs {
            mat[u * n + v] = 1;
            mat[v * n + u] = -1;
        }
        mat
    }

    pub fn count_feedback_arcs(&self, ord: &VertexOrdering) -> Result<usize, GraphError> {
        let rank = self.check_ordering(ord)?;
        Ok(self.arcs.iter().filter(|&&(u, v)| rank[u] > rank[v]).count())
    }

    /// The backward arcs under `ord`, i.e. the feedback arc set it induces.
    pub fn feedback_arcs(&self, ord: &VertexOrdering) -> Result<Vec<Arc>, GraphError> {
        let rank = self.check_ordering(ord)?;
        Ok(self.arcs.iter().copied().filter(|&(u, v)| rank[u] > rank[v]).collect())
    }

    /// The graph with the given arcs deleted.
    pub fn without_arcs(&self, removed: &[Arc]) -> OrientedDigraph {
        let drop: HashSet<Arc> = removed.iter().copied().collect();
        let kept = self.arcs.iter().copied().filter(|a| !drop.contains(a)).collect();
        Self::from_arcs_unchecked(self.n, kept)
    }

    /// Cycle detection by Kahn's algorithm.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        for &(_, v) in &self.arcs {
            indeg[v] += 1;
        }
        let mut queue: VecDeque<Vertex> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(u) = queue.pop_front() {
            removed += 1;
            for &w in &self.out[u] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        removed == self.n
    }

    /// Renames the vertex at rank `i` of `ord` to `i`.
    pub fn relabel(&self, ord: &VertexOrdering) -> Result<OrientedDigraph, GraphError> {
        let rank = self.check_ordering(ord)?;
        let arcs = self.arcs.iter().map(|&(u, v)| (rank[u], rank[v])).collect();
        Ok(Self::from_arcs_unchecked(self.n, arcs))
    }

    fn check_ordering(&self, ord: &VertexOrdering) -> Result<Vec<usize>, GraphError> {
        if ord.len() != self.n {
            return Err(GraphError::LengthMismatch { expected: self.n, got: ord.len() });
        }
        Ok(ord.ranks())
    }
}

/// `2M / n` for `g`.
pub fn average_degree(g: &OrientedDigraph) -> f64 {
    g.average_degree()
}

/// A permutation of `0..n`; `positions[i]` is the vertex placed at rank `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexOrdering {
    positions: Vec<Vertex>,
}

impl VertexOrdering {
    pub fn new(positions: Vec<Vertex>) -> Result<Self, GraphError> {
        let n = positions.len();
        let mut seen = vec![false; n];
        for &v in &positions {
            if v >= n || seen[v] {
                return Err(GraphError::NotAPermutation(n));
            }
            seen[v] = true;
        }
        Ok(VertexOrdering { positions })
    }

    pub(crate) fn from_positions_unchecked(positions: Vec<Vertex>) -> Self {
        debug_assert!(VertexOrdering::new(positions.clone()).is_ok());
        VertexOrdering { positions }
    }

    pub fn identity(n: usize) -> Self {
        VertexOrdering { positions: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vertex] {
        &self.positions
    }

    /// `ranks()[v]` is the rank of vertex `v`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.positions.len()];
        for (i, &v) in self.positions.iter().enumerate() {
            rank[v] = i;
        }
        rank
    }

    pub fn reversed(&self) -> Self {
        let mut positions = self.positions.clone();
        positions.reverse();
        VertexOrdering { positions }
    }

    /// The ordering that undoes a relabelling by `self`.
    pub fn inverse(&self) -> Self {
        VertexOrdering { positions: self.ranks() }
    }
}

impl fmt::Display for VertexOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.positions {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveMethod {
    BruteForce,
    ExactDp,
    Greedy,
    LocalSearch,
}

impl SolveMethod {
    pub fn label(self) -> &'static str {
        match self {
            SolveMethod::BruteForce => "brute-force",
            SolveMethod::ExactDp => "exact-dp",
            SolveMethod::Greedy => "greedy",
            SolveMethod::LocalSearch => "greedy+sifting",
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An ordering together with its backward (`Y`) and forward (`X`) arc counts.
///
/// When `exact` is set, `feedback_count` is the minimum over all orderings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FasResult {
    pub ordering: VertexOrdering,
    pub feedback_count: usize,
    pub forward_count: usize,
    pub exact: bool,
    pub method: SolveMethod,
}

impl FasResult {
    pub fn evaluate(
        g: &OrientedDigraph,
        ordering: VertexOrdering,
        exact: bool,
        method: SolveMethod,
    ) -> Result<Self, GraphError> {
        let feedback_count = g.count_feedback_arcs(&ordering)?;
        Ok(FasResult {
            ordering,
            feedback_count,
            forward_count: g.m() - feedback_count,
            exact,
            method,
        })
    }
}
