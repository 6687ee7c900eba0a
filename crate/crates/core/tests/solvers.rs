use fasbound::graph::{FasResult, OrientedDigraph, SolveMethod, VertexOrdering};
use fasbound::random::{sample_gnm_oriented, sample_tournament, ModelSpec, Seed};
use fasbound::solvers::{
    local_search_insertion, solve_auto, solve_brute_force, solve_exact_dp, solve_greedy, SolverBudget,
};
use proptest::prelude::*;
use rayon::prelude::*;

fn budget() -> SolverBudget {
    SolverBudget::default()
}

fn mixed_instance(i: u64) -> OrientedDigraph {
    let seed = Seed(2024).derive(i);
    let n = 3 + (i % 6) as usize;
    let spec = match i % 3 {
        0 => ModelSpec::Gnm { n, m: (seed.0 as usize) % (n * (n - 1) / 2 + 1) },
        1 => ModelSpec::ErNp { n, p: 0.2 + 0.6 * ((i / 3) % 5) as f64 / 4.0 },
        _ => ModelSpec::Tournament { n },
    };
    spec.sample(seed).unwrap()
}

fn assert_valid(g: &OrientedDigraph, r: &FasResult) {
    assert_eq!(r.feedback_count + r.forward_count, g.m());
    assert_eq!(g.count_feedback_arcs(&r.ordering).unwrap(), r.feedback_count);
    let fb = g.feedback_arcs(&r.ordering).unwrap();
    assert!(g.without_arcs(&fb).is_acyclic());
}

#[test]
fn seeded_tournament_brute_force_matches_dp() {
    let g = sample_tournament(5, Seed(5));
    let b = solve_brute_force(&g, &budget()).unwrap();
    let d = solve_exact_dp(&g, &budget()).unwrap();
    assert_eq!(b.feedback_count, d.feedback_count);
    assert!(b.exact && d.exact);
}

#[test]
fn exact_dp_matches_brute_force_on_mixed_suite() {
    for i in 0..500 {
        let g = mixed_instance(i);
        let b = solve_brute_force(&g, &budget()).unwrap();
        let d = solve_exact_dp(&g, &budget()).unwrap();
        assert_eq!(b.feedback_count, d.feedback_count, "instance {i}");
        assert_valid(&g, &b);
        assert_valid(&g, &d);
    }
}

#[test]
fn greedy_never_beats_exact() {
    let g = ModelSpec::ErNp { n: 12, p: 0.5 }.sample(Seed(77)).unwrap();
    let greedy = solve_greedy(&g);
    let exact = solve_exact_dp(&g, &budget()).unwrap();
    assert!(greedy.feedback_count >= exact.feedback_count);
    assert!(!greedy.exact);
    assert_valid(&g, &greedy);
}

#[test]
fn greedy_solves_dags() {
    for i in 0..50 {
        let g = random_dag(15, 0.4, Seed(i));
        assert_eq!(solve_greedy(&g).feedback_count, 0);
    }
}

/// Arcs only from lower to higher id, then relabelled by a shuffled ordering.
fn random_dag(n: usize, p: f64, seed: Seed) -> OrientedDigraph {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = seed.rng();
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let g = OrientedDigraph::new(n, arcs).unwrap();
    g.relabel(&VertexOrdering::new(perm).unwrap()).unwrap()
}

fn topological_order(g: &OrientedDigraph) -> VertexOrdering {
    let n = g.n();
    let mut indeg = vec![0; n];
    for &(_, v) in g.arcs() {
        indeg[v] += 1;
    }
    let mut order = Vec::new();
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(u) = stack.pop() {
        order.push(u);
        for &w in g.out_neighbors(u) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    VertexOrdering::new(order).unwrap()
}

#[test]
fn sifting_reaches_zero_from_reverse_topological_order() {
    for i in 0..100 {
        let g = random_dag(12 + (i % 20) as usize, 0.3, Seed(1000 + i));
        let start = FasResult::evaluate(&g, topological_order(&g).reversed(), false, SolveMethod::Greedy).unwrap();
        assert_eq!(start.feedback_count, g.m());
        let r = local_search_insertion(&g, &start, &budget());
        assert_eq!(r.feedback_count, 0, "dag {i}");
    }
}

#[test]
fn auto_is_exact_below_limit_and_heuristic_above() {
    let small = sample_gnm_oriented(10, 20, Seed(1)).unwrap();
    assert!(solve_auto(&small, &budget()).unwrap().exact);
    let large = sample_gnm_oriented(100, 600, Seed(1)).unwrap();
    let r = solve_auto(&large, &budget()).unwrap();
    assert!(!r.exact);
    assert_valid(&large, &r);
}

#[test]
fn large_tournament_within_half() {
    let g = sample_tournament(100, Seed(3));
    let r = solve_auto(&g, &budget()).unwrap();
    assert!(r.feedback_count <= 2475);
    assert_valid(&g, &r);
}

#[test]
fn auto_never_worse_than_greedy() {
    for i in 0..40 {
        let n = [8, 15, 22, 30, 60][i % 5];
        let g = ModelSpec::ErNp { n, p: 0.4 }.sample(Seed(300 + i as u64)).unwrap();
        let a = solve_auto(&g, &budget()).unwrap();
        let gr = solve_greedy(&g);
        assert!(a.feedback_count <= gr.feedback_count);
        assert_valid(&g, &a);
    }
}

#[test]
fn heuristic_within_ten_percent_on_n24_tournaments() {
    // Sifting optima are 0-15% above the optimum per instance; the suite
    // checks the aggregate gap over the 50 tournaments.
    let exact_budget = SolverBudget { exact_vertex_limit: 24, ..budget() };
    let pairs: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_tournament(24, Seed(24).derive(i));
            let exact = solve_exact_dp(&g, &exact_budget).unwrap().feedback_count as f64;
            let heur = local_search_insertion(&g, &solve_greedy(&g), &budget()).feedback_count as f64;
            assert!(heur >= exact);
            (exact, heur)
        })
        .collect();
    let exact: f64 = pairs.iter().map(|p| p.0).sum();
    let heur: f64 = pairs.iter().map(|p| p.1).sum();
    let gap = (heur - exact) / exact;
    assert!(gap <= 0.10, "aggregate relative gap {gap}");
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = OrientedDigraph> {
    (2..=max_n, any::<u64>(), 0.0f64..=1.0)
        .prop_map(|(n, seed, p)| ModelSpec::ErNp { n, p }.sample(Seed(seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sifting_never_exceeds_start_or_its_reverse(
        g in arb_graph(30),
        shuffle_seed: u64,
    ) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut Seed(shuffle_seed).rng());
        let start = FasResult::evaluate(&g, VertexOrdering::new(perm).unwrap(), false, SolveMethod::Greedy).unwrap();
        let r = local_search_insertion(&g, &start, &budget());
        prop_assert!(r.feedback_count <= start.feedback_count.min(g.m() - start.feedback_count));
        prop_assert!(2 * r.feedback_count <= g.m());
        prop_assert_eq!(g.count_feedback_arcs(&r.ordering).unwrap(), r.feedback_count);
    }

    #[test]
    fn every_solver_returns_a_valid_fas(g in arb_graph(9)) {
        for r in [
            solve_brute_force(&g, &budget()).unwrap(),
            solve_exact_dp(&g, &budget()).unwrap(),
            solve_greedy(&g),
            solve_auto(&g, &budget()).unwrap(),
        ] {
            prop_assert_eq!(r.feedback_count + r.forward_count, g.m());
            let fb = g.feedback_arcs(&r.ordering).unwrap();
            prop_assert!(g.without_arcs(&fb).is_acyclic());
        }
    }
}
