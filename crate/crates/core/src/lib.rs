//! Random oriented digraphs, minimum feedback arc sets, and the probabilistic
//! lower bounds that govern their size.
//!
//! * [`graph`]: oriented digraphs, vertex orderings, feedback-arc counting.
//! * [`edgelist`]: the `n M` / `u v` text format.
//! * [`random`]: seeded G(n,M), ER(n,p) and tournament samplers.
//! * [`solvers`]: exact (brute force, subset DP) and heuristic (greedy, sifting) solvers.
//! * [`bounds`]: Hoeffding, union-bound, Stirling and lower-bound evaluators.
//! * [`experiment`]: Monte Carlo sweeps, exhaustive enumeration, verification reports, CSV.
//! * [`plot`]: SVG charts of sweep output.

pub mod bounds;
pub mod edgelist;
pub mod experiment;
pub mod graph;
pub mod plot;
pub mod random;
pub mod solvers;

pub use graph::{FasResult, OrientedDigraph, SolveMethod, VertexOrdering};
pub use random::{ModelKind, ModelSpec, Seed};
pub use solvers::SolverBudget;
