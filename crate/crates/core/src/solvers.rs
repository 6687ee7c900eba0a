//! Minimum feedback arc set solvers.
//!
//! * [`solve_brute_force`]: all `n!` orderings; test oracle for tiny graphs.
//! * [`solve_exact_dp`]: subset DP over ordering prefixes, `O(2^n · n)`.
//! * [`solve_greedy`]: Eades–Lin–Smyth source/sink elimination.
//! * [`local_search_insertion`]: single-vertex sifting until a pass makes no improvement.
//! * [`solve_auto`]: exact below the vertex limit, greedy + sifting above it.

use thiserror::Error;

use crate::graph::{FasResult, OrientedDigraph, SolveMethod, VertexOrdering};

/// Largest `n` the subset DP can index at all (`u32` vertex masks).
pub const DP_HARD_LIMIT: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("graph has {n} vertices, solver limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("exact DP on {n} vertices needs {needed} bytes, budget is {limit}")]
    MemoryBudgetExceeded { n: usize, needed: u64, limit: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverBudget {
    pub exact_vertex_limit: usize,
    pub brute_force_limit: usize,
    /// `None` runs sifting until a full pass makes no improvement.
    pub local_search_passes: Option<usize>,
    pub dp_memory_limit: u64,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            exact_vertex_limit: 22,
            brute_force_limit: 9,
            local_search_passes: None,
            dp_memory_limit: 1 << 30,
        }
    }
}

impl SolverBudget {
    /// Keeps `brute_force_limit <= exact_vertex_limit`.
    pub fn normalized(mut self) -> Self {
        self.brute_force_limit = self.brute_force_limit.min(self.exact_vertex_limit);
        self
    }
}

pub fn solve_brute_force(g: &OrientedDigraph, budget: &SolverBudget) -> Result<FasResult, SolverError> {
    let n = g.n();
    if n > budget.brute_force_limit {
        return Err(SolverError::TooLarge { n, limit: budget.brute_force_limit });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = vec![0usize; n];
    let mut best = usize::MAX;
    let mut best_perm = perm.clone();
    loop {
        for (i, &v) in perm.iter().enumerate() {
            rank[v] = i;
        }
        let y = g.arcs().iter().filter(|&&(u, v)| rank[u] > rank[v]).count();
        if y < best {
            best = y;
            best_perm.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let ordering = VertexOrdering::from_positions_unchecked(best_perm);
    Ok(FasResult {
        ordering,
        feedback_count: best,
        forward_count: g.m() - best,
        exact: true,
        method: SolveMethod::BruteForce,
    })
}

/// Lexicographic successor; returns `false` after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Fills `best[S]` = fewest backward arcs inside prefix set `S`, for every `S`.
///
/// `best[S] = min_{v in S} best[S \ v] + |out(v) ∩ (S \ v)|`: `v` is the last
/// vertex of the prefix, so its arcs into the rest of the prefix point backward.
fn dp_table(n: usize, out: &[u32]) -> Vec<u16> {
    let size = 1usize << n;
    let mut best = vec![0u16; size];
    for s in 1..size as u32 {
        let mut min = u16::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let c = best[prev as usize] + (out[v] & prev).count_ones() as u16;
            if c < min {
                min = c;
            }
        }
        best[s as usize] = min;
    }
    best
}

fn dp_check(n: usize, budget: &SolverBudget) -> Result<(), SolverError> {
    let limit = budget.exact_vertex_limit.min(DP_HARD_LIMIT);
    if n > limit {
        return Err(SolverError::TooLarge { n, limit });
    }
    let needed = (1u64 << n) * std::mem::size_of::<u16>() as u64;
    if needed > budget.dp_memory_limit {
        return Err(SolverError::MemoryBudgetExceeded { n, needed, limit: budget.dp_memory_limit });
    }
    Ok(())
}

fn masks32(g: &OrientedDigraph) -> Vec<u32> {
    g.out_masks().into_iter().map(|m| m as u32).collect()
}

/// Exact minimum only, without ordering reconstruction. Used by enumeration.
pub fn min_feedback_exact(g: &OrientedDigraph, budget: &SolverBudget) -> Result<usize, SolverError> {
    dp_check(g.n(), budget)?;
    let best = dp_table(g.n(), &masks32(g));
    Ok(best[best.len() - 1] as usize)
}

pub fn solve_exact_dp(g: &OrientedDigraph, budget: &SolverBudget) -> Result<FasResult, SolverError> {
    let n = g.n();
    dp_check(n, budget)?;
    let out = masks32(g);
    let best = dp_table(n, &out);

    // Walk back from the full set, peeling off the lowest-id argmin each step.
    let mut positions = vec![0usize; n];
    let mut s: u32 = ((1u64 << n) - 1) as u32;
    for slot in (0..n).rev() {
        let target = best[s as usize];
        let mut rest = s;
        let v = loop {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            if best[prev as usize] + (out[v] & prev).count_ones() as u16 == target {
                break v;
            }
        };
        positions[slot] = v;
        s &= !(1 << v);
    }
    let feedback_count = best[best.len() - 1] as usize;
    let ordering = VertexOrdering::from_positions_unchecked(positions);
    debug_assert_eq!(g.count_feedback_arcs(&ordering), Ok(feedback_count));
    Ok(FasResult {
        ordering,
        feedback_count,
        forward_count: g.m() - feedback_count,
        exact: true,
        method: SolveMethod::ExactDp,
    })
}

/// Eades–Lin–Smyth GR ordering. Ties go to the lowest vertex id.
pub fn solve_greedy(g: &OrientedDigraph) -> FasResult {
    let n = g.n();
    let mut inn: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for &(u, v) in g.arcs() {
        inn[v].push(u);
        indeg[v] += 1;
        outdeg[u] += 1;
    }
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut prefix = Vec::with_capacity(n);
    let mut suffix = Vec::new();

    let remove = |v: usize, alive: &mut Vec<bool>, indeg: &mut Vec<usize>, outdeg: &mut Vec<usize>| {
        alive[v] = false;
        for &w in g.out_neighbors(v) {
            if alive[w] {
                indeg[w] -= 1;
            }
        }
        for &w in &inn[v] {
            if alive[w] {
                outdeg[w] -= 1;
            }
        }
    };

    while remaining > 0 {
        while let Some(v) = (0..n).find(|&v| alive[v] && outdeg[v] == 0) {
            remove(v, &mut alive, &mut indeg, &mut outdeg);
            suffix.push(v);
            remaining -= 1;
        }
        while let Some(v) = (0..n).find(|&v| alive[v] && indeg[v] == 0) {
            remove(v, &mut alive, &mut indeg, &mut outdeg);
            prefix.push(v);
            remaining -= 1;
        }
        if remaining > 0 {
            let v = (0..n)
                .filter(|&v| alive[v])
                .max_by_key(|&v| (outdeg[v] as i64 - indeg[v] as i64, std::cmp::Reverse(v)))
                .unwrap();
            remove(v, &mut alive, &mut indeg, &mut outdeg);
            prefix.push(v);
            remaining -= 1;
        }
    }
    // Sinks were peeled from the back.
    prefix.extend(suffix.into_iter().rev());
    FasResult::evaluate(g, VertexOrdering::from_positions_unchecked(prefix), false, SolveMethod::Greedy)
        .expect("greedy ordering covers every vertex")
}

/// Sifting: each vertex in ascending id order moves to its cheapest insertion
/// point whenever that strictly reduces the backward-arc count. Starts from
/// the reverse of `start` when that ordering is better, so the result never
/// exceeds `M / 2`.
pub fn local_search_insertion(g: &OrientedDigraph, start: &FasResult, budget: &SolverBudget) -> FasResult {
    let n = g.n();
    let m = g.m();
    let mut positions: Vec<usize> = start.ordering.positions().to_vec();
    let mut count = g
        .count_feedback_arcs(&start.ordering)
        .expect("start ordering must match the graph");
    if count > m - count {
        positions.reverse();
        count = m - count;
    }
    let mat = g.signed_matrix();
    let mut indeg = vec![0i64; n];
    for &(_, v) in g.arcs() {
        indeg[v] += 1;
    }

    let mut rest = Vec::with_capacity(n);
    let mut pass = 0;
    loop {
        if budget.local_search_passes.is_some_and(|cap| pass >= cap) {
            break;
        }
        pass += 1;
        let mut improved = false;
        for v in 0..n {
            let cur = positions.iter().position(|&x| x == v).unwrap();
            rest.clear();
            rest.extend(positions.iter().copied().filter(|&x| x != v));
            // Backward arcs incident to v when inserted before rest[0]: all in-arcs.
            let mut cost = indeg[v];
            let mut best_cost = cost;
            let mut best_at = 0;
            let mut cur_cost = cost;
            for (k, &w) in rest.iter().enumerate() {
                match mat[v * n + w] {
                    -1 => cost -= 1,
                    1 => cost += 1,
                    _ => {}
                }
                if k + 1 == cur {
                    cur_cost = cost;
                }
                if cost < best_cost {
                    best_cost = cost;
                    best_at = k + 1;
                }
            }
            if best_cost < cur_cost {
                rest.insert(best_at, v);
                std::mem::swap(&mut positions, &mut rest);
                count -= (cur_cost - best_cost) as usize;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let ordering = VertexOrdering::from_positions_unchecked(positions);
    debug_assert_eq!(g.count_feedback_arcs(&ordering), Ok(count));
    FasResult {
        ordering,
        feedback_count: count,
        forward_count: m - count,
        exact: start.exact,
        method: SolveMethod::LocalSearch,
    }
}

pub fn solve_auto(g: &OrientedDigraph, budget: &SolverBudget) -> Result<FasResult, SolverError> {
    if g.n() <= budget.exact_vertex_limit {
        solve_exact_dp(g, budget)
    } else {
        let greedy = solve_greedy(g);
        Ok(local_search_insertion(g, &greedy, budget))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, arcs: &[(usize, usize)]) -> OrientedDigraph {
        OrientedDigraph::new(n, arcs.to_vec()).unwrap()
    }

    fn budget() -> SolverBudget {
        SolverBudget::default()
    }

    #[test]
    fn triangle_needs_one() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(solve_brute_force(&g, &budget()).unwrap().feedback_count, 1);
        assert_eq!(solve_exact_dp(&g, &budget()).unwrap().feedback_count, 1);
        assert_eq!(solve_greedy(&g).feedback_count, 1);
    }

    #[test]
    fn path_needs_zero() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let r = solve_brute_force(&g, &budget()).unwrap();
        assert_eq!((r.feedback_count, r.forward_count), (0, 5));
        assert!(r.exact);
        assert_eq!(solve_greedy(&g).feedback_count, 0);
    }

    #[test]
    fn two_disjoint_triangles() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let r = solve_exact_dp(&g, &budget()).unwrap();
        assert_eq!(r.feedback_count, 2);
        assert_eq!(g.count_feedback_arcs(&r.ordering), Ok(2));
    }

    #[test]
    fn limits_are_enforced() {
        let g = OrientedDigraph::empty(10);
        assert_eq!(
            solve_brute_force(&g, &budget()),
            Err(SolverError::TooLarge { n: 10, limit: 9 })
        );
        let tight = SolverBudget { dp_memory_limit: 1000, ..budget() };
        assert!(matches!(
            solve_exact_dp(&g, &tight),
            Err(SolverError::MemoryBudgetExceeded { n: 10, needed: 2048, limit: 1000 })
        ));
        let big = OrientedDigraph::empty(23);
        assert!(matches!(solve_exact_dp(&big, &budget()), Err(SolverError::TooLarge { .. })));
    }

    #[test]
    fn sifting_fixed_point_on_optimum() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let start = solve_exact_dp(&g, &budget()).unwrap();
        let r = local_search_insertion(&g, &start, &budget());
        assert_eq!(r.feedback_count, 1);
        assert_eq!(r.feedback_count + r.forward_count, 3);
    }

    #[test]
    fn sifting_reverses_bad_start() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let start = FasResult::evaluate(
            &g,
            VertexOrdering::new(vec![3, 2, 1, 0]).unwrap(),
            false,
            SolveMethod::Greedy,
        )
        .unwrap();
        assert_eq!(start.feedback_count, 3);
        let r = local_search_insertion(&g, &start, &budget());
        assert_eq!(r.feedback_count, 0);
    }

    #[test]
    fn pass_cap_is_respected() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let start = solve_greedy(&g);
        let zero = SolverBudget { local_search_passes: Some(0), ..budget() };
        assert_eq!(local_search_insertion(&g, &start, &zero).ordering, start.ordering);
    }

    #[test]
    fn auto_switches_on_size() {
        let small = OrientedDigraph::empty(10);
        assert!(solve_auto(&small, &budget()).unwrap().exact);
        let large = OrientedDigraph::empty(100);
        let r = solve_auto(&large, &budget()).unwrap();
        assert!(!r.exact);
        assert_eq!(r.method, SolveMethod::LocalSearch);
    }

    #[test]
    fn permutation_count() {
        let mut p: Vec<usize> = (0..5).collect();
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 120);
        assert!(!next_permutation(&mut []));
    }
}
