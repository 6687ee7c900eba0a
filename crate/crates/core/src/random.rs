//! Seeded samplers for random oriented digraphs.
//!
//! Every sampler is a pure function of its parameters and a [`Seed`]. A seed
//! is expanded into a ChaCha8 stream, and per-point / per-trial seeds are
//! derived with [`Seed::derive`], a SplitMix64 finalizer mix. Derived seeds do
//! not depend on the order in which trials execute.
//!
//! Unordered pairs `{i, j}` with `i < j` are indexed `j(j-1)/2 + i`, so the
//! pairs of `0..n` occupy `0..C(n,2)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Arc, OrientedDigraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("m = {m} exceeds C({n},2) = {max}")]
    TooManyArcs { n: usize, m: usize, max: u64 },
    #[error("probability {0} is not in [0, 1]")]
    BadProbability(f64),
    #[error("unknown model `{0}` (expected gnm, gnp or tournament)")]
    UnknownModel(String),
}

/// SplitMix64 output function (Steele, Lea & Flood 2014).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    /// Child seed for sub-stream `index`: `splitmix64(master + splitmix64(index))`.
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(self.0.wrapping_add(splitmix64(index))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `C(n, 2)`.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Inverse of the triangular pair index: returns `(i, j)` with `i < j`.
pub fn decode_pair(idx: u64) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0).floor() as u64;
    while j * (j - 1) / 2 > idx {
        j -= 1;
    }
    while (j + 1) * j / 2 <= idx {
        j += 1;
    }
    let i = idx - j * (j - 1) / 2;
    (i as usize, j as usize)
}

pub fn encode_pair(i: usize, j: usize) -> u64 {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    (j as u64) * (j as u64 - 1) / 2 + i as u64
}

fn orient<R: Rng>(rng: &mut R, idx: u64) -> Arc {
    let (i, j) = decode_pair(idx);
    if rng.random_bool(0.5) {
        (i, j)
    } else {
        (j, i)
    }
}

/// `k` distinct values from `0..total`, uniformly, in ascending order
/// (Floyd's algorithm; samples the complement when `k > total / 2`).
fn sample_indices<R: Rng>(rng: &mut R, total: u64, k: u64) -> Vec<u64> {
    let complement = k > total / 2;
    let draw = if complement { total - k } else { k };
    let mut chosen: HashSet<u64> = HashSet::with_capacity(draw as usize);
    for j in total - draw..total {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    if complement {
        (0..total).filter(|x| !chosen.contains(x)).collect()
    } else {
        let mut v: Vec<u64> = chosen.into_iter().collect();
        v.sort_unstable();
        v
    }
}

/// `m` uniformly chosen pairs, each oriented by a fair coin.
pub fn sample_gnm_oriented(n: usize, m: usize, seed: Seed) -> Result<OrientedDigraph, ModelError> {
    let max = pair_count(n);
    if m as u64 > max {
        return Err(ModelError::TooManyArcs { n, m, max });
    }
    let mut rng = seed.rng();
    let indices = sample_indices(&mut rng, max, m as u64);
    let arcs = indices.into_iter().map(|idx| orient(&mut rng, idx)).collect();
    Ok(OrientedDigraph::from_arcs_unchecked(n, arcs))
}

/// Each pair kept with probability `p` (geometric skipping), then oriented by a fair coin.
pub fn sample_er_np_oriented(n: usize, p: f64, seed: Seed) -> Result<OrientedDigraph, ModelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::BadProbability(p));
    }
    let total = pair_count(n);
    let mut rng = seed.rng();
    let mut arcs = Vec::new();
    if p == 1.0 {
        arcs.extend((0..total).map(|idx| orient(&mut rng, idx)));
    } else if p > 0.0 {
        let log_q = (-p).ln_1p();
        let mut idx: u64 = 0;
        loop {
            let u = 1.0 - rng.random::<f64>();
            let skip = (u.ln() / log_q).floor();
            if skip >= (total - idx) as f64 {
                break;
            }
            idx += skip as u64;
            arcs.push(orient(&mut rng, idx));
            idx += 1;
            if idx >= total {
                break;
            }
        }
    }
    Ok(OrientedDigraph::from_arcs_unchecked(n, arcs))
}

/// Every pair oriented by a fair coin.
pub fn sample_tournament(n: usize, seed: Seed) -> OrientedDigraph {
    let mut rng = seed.rng();
    let arcs = (0..pair_count(n)).map(|idx| orient(&mut rng, idx)).collect();
    OrientedDigraph::from_arcs_unchecked(n, arcs)
}

/// `p · n(n-1)/2`, unrounded.
pub fn expected_edges(n: usize, p: f64) -> f64 {
    p * n as f64 * (n as f64 - 1.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Gnm,
    ErNp,
    Tournament,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Gnm => "gnm",
            ModelKind::ErNp => "gnp",
            ModelKind::Tournament => "tournament",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gnm" => Ok(ModelKind::Gnm),
            "gnp" | "er" | "er_np" | "ernp" => Ok(ModelKind::ErNp),
            "tournament" => Ok(ModelKind::Tournament),
            _ => Err(ModelError::UnknownModel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Gnm { n: usize, m: usize },
    ErNp { n: usize, p: f64 },
    Tournament { n: usize },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Gnm { .. } => ModelKind::Gnm,
            ModelSpec::ErNp { .. } => ModelKind::ErNp,
            ModelSpec::Tournament { .. } => ModelKind::Tournament,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            ModelSpec::Gnm { n, .. } | ModelSpec::ErNp { n, .. } | ModelSpec::Tournament { n } => n,
        }
    }

    /// Arc count used for bound evaluation: exact `m` for G(n,M) and
    /// tournaments, the expectation `p·C(n,2)` for ER(n,p).
    pub fn reference_m(&self) -> f64 {
        match *self {
            ModelSpec::Gnm { m, .. } => m as f64,
            ModelSpec::ErNp { n, p } => expected_edges(n, p),
            ModelSpec::Tournament { n } => pair_count(n) as f64,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            ModelSpec::Gnm { n, m } if m as u64 > pair_count(n) => {
                Err(ModelError::TooManyArcs { n, m, max: pair_count(n) })
            }
            ModelSpec::ErNp { p, .. } if !(0.0..=1.0).contains(&p) => Err(ModelError::BadProbability(p)),
            _ => Ok(()),
        }
    }

    pub fn sample(&self, seed: Seed) -> Result<OrientedDigraph, ModelError> {
        match *self {
            ModelSpec::Gnm { n, m } => sample_gnm_oriented(n, m, seed),
            ModelSpec::ErNp { n, p } => sample_er_np_oriented(n, p, seed),
            ModelSpec::Tournament { n } => Ok(sample_tournament(n, seed)),
        }
    }

    /// Trial `trial` of this model under `master`.
    pub fn sample_trial(&self, master: Seed, trial: u64) -> Result<OrientedDigraph, ModelError> {
        self.sample(master.derive(trial))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_round_trip() {
        let mut idx = 0;
        for j in 1..200usize {
            for i in 0..j {
                assert_eq!(decode_pair(idx), (i, j));
                assert_eq!(encode_pair(j, i), idx);
                idx += 1;
            }
        }
        let big = pair_count(100_000) - 1;
        assert_eq!(decode_pair(big), (99_998, 99_999));
    }

    #[test]
    fn gnm_edge_cases() {
        let g = sample_gnm_oriented(5, 10, Seed(3)).unwrap();
        assert_eq!(g.m(), 10);
        let mut pairs: Vec<_> = g.arcs().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 10);
        assert_eq!(sample_gnm_oriented(5, 0, Seed(3)).unwrap().m(), 0);
        assert!(matches!(
            sample_gnm_oriented(5, 11, Seed(3)),
            Err(ModelError::TooManyArcs { .. })
        ));
    }

    #[test]
    fn er_edge_cases() {
        assert_eq!(sample_er_np_oriented(9, 1.0, Seed(1)).unwrap().m(), 36);
        assert_eq!(sample_er_np_oriented(9, 0.0, Seed(1)).unwrap().m(), 0);
        assert_eq!(sample_er_np_oriented(9, 1.5, Seed(1)), Err(ModelError::BadProbability(1.5)));
        assert!(sample_er_np_oriented(9, -0.1, Seed(1)).is_err());
    }

    #[test]
    fn tournament_edge_cases() {
        assert_eq!(sample_tournament(1, Seed(0)).m(), 0);
        assert_eq!(sample_tournament(3, Seed(0)).m(), 3);
    }

    #[test]
    fn expected_edge_values() {
        assert_eq!(expected_edges(50, 0.5), 612.5);
        assert_eq!(expected_edges(10, 1.0), 45.0);
        assert_eq!(expected_edges(2, 0.5), 0.5);
    }

    #[test]
    fn model_names() {
        assert_eq!("gnp".parse::<ModelKind>(), Ok(ModelKind::ErNp));
        assert_eq!("GNM".parse::<ModelKind>(), Ok(ModelKind::Gnm));
        assert!("ba".parse::<ModelKind>().is_err());
    }

    #[test]
    fn seeds_are_order_independent() {
        let s = Seed(42);
        let a: Vec<_> = (0..8).map(|i| s.derive(i)).collect();
        let b: Vec<_> = (0..8).rev().map(|i| s.derive(i)).collect::<Vec<_>>().into_iter().rev().collect();
        assert_eq!(a, b);
        assert_ne!(s.derive(0), s.derive(1));
    }
}
