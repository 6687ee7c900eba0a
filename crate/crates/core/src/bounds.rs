//! Closed-form tail bounds and FAS-size estimates.
//!
//! Logarithms are natural throughout. Factorials and binomial tails are
//! carried in log space and only exponentiated at the boundary, so nothing
//! overflows for `n` well past 170.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("argument outside domain: {0}")]
    BadDomain(String),
}

fn domain(msg: impl Into<String>) -> BoundsError {
    BoundsError::BadDomain(msg.into())
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `exp(-2 m t^2)`: Hoeffding's bound on `Pr(Y <= m(1/2 - t))` for `Y ~ B(m, 1/2)`.
pub fn hoeffding_tail_bound(m: f64, t: f64) -> Result<f64, BoundsError> {
    if !(m > 0.0) || !(t >= 0.0) {
        return Err(domain(format!("hoeffding_tail_bound needs m > 0, t >= 0 (m={m}, t={t})")));
    }
    Ok((-2.0 * m * t * t).exp())
}

/// `log C(m, k)` as a compensated sum of `log((m-k+i)/i)`.
pub fn log_binomial_coefficient(m: u64, k: u64) -> f64 {
    assert!(k <= m);
    let k = k.min(m - k);
    (1..=k)
        .map(|i| ((m - k + i) as f64 / i as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

/// `log Pr(Y <= k)` for `Y ~ B(m, 1/2)`; `-inf` when `k < 0`.
///
/// For `k < m/2` the terms `C(m,j)/C(m,k)` shrink geometrically as `j`
/// decreases and are summed directly. Larger `k` goes through the complement.
pub fn log_binomial_tail(m: u64, k: i64) -> f64 {
    if k < 0 {
        return f64::NEG_INFINITY;
    }
    let k = k as u64;
    if k >= m {
        return 0.0;
    }
    if 2 * k >= m {
        let upper = log_binomial_tail(m, m as i64 - k as i64 - 1);
        return (-upper.exp()).ln_1p();
    }
    let mut ratio = 1.0;
    let mut sum = CompensatedSum::default();
    sum.add(1.0);
    for j in (1..=k).rev() {
        // C(m, j-1) / C(m, j) = j / (m - j + 1)
        ratio *= j as f64 / (m - j + 1) as f64;
        if ratio < 1e-18 * sum.value() {
            break;
        }
        sum.add(ratio);
    }
    log_binomial_coefficient(m, k) - m as f64 * LN_2 + sum.value().ln()
}

/// `Pr(Y <= k) = 2^-m · Σ_{j<=k} C(m, j)`.
pub fn binomial_tail_exact(m: u64, k: u64) -> Result<f64, BoundsError> {
    if k > m {
        return Err(domain(format!("binomial_tail_exact needs k <= m (m={m}, k={k})")));
    }
    Ok(log_binomial_tail(m, k as i64).exp())
}

/// `Σ_{j=2..n} log j`, compensated.
pub fn log_factorial_exact(n: u64) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).collect::<CompensatedSum>().value()
}

/// `n log n - n + ½ log(2πn) + 1/(12n)`, an upper bound on `log n!`.
pub fn stirling_log_factorial_upper(n: u64) -> f64 {
    assert!(n >= 1, "Stirling upper bound needs n >= 1");
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + 1.0 / (12.0 * x)
}

/// `n! · Pr(Y <= k)`; an upper bound on `Pr(Y* <= k)` that can exceed 1.
pub fn permutation_union_bound(n: u64, m: u64, k: u64) -> Result<f64, BoundsError> {
    Ok(log_permutation_union_bound(n, m, k)?.exp())
}

pub fn log_permutation_union_bound(n: u64, m: u64, k: u64) -> Result<f64, BoundsError> {
    if n < 1 || k > m {
        return Err(domain(format!("union bound needs n >= 1, k <= m (n={n}, m={m}, k={k})")));
    }
    Ok(log_factorial_exact(n) + log_binomial_tail(m, k as i64))
}

fn check_nm(what: &str, n: u64, m: f64) -> Result<(), BoundsError> {
    if n < 2 || !(m > 0.0) || !m.is_finite() {
        return Err(domain(format!("{what} needs n >= 2, m > 0 (n={n}, m={m})")));
    }
    Ok(())
}

/// `sqrt(log n / Δ_av)` with `Δ_av = 2m/n`: the deviation that cancels the
/// `n log n` term of `log n!` in `n! exp(-2mt²)`.
pub fn optimal_t(n: u64, m: f64) -> Result<f64, BoundsError> {
    check_nm("optimal_t", n, m)?;
    let x = n as f64;
    Ok((x * x.ln() / (2.0 * m)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// `m(1/2 - t*)`, reported raw; negative values mean the bound is vacuous.
    pub bound: f64,
    /// `3 √n e^{-n}`, the cap on `Pr(Y* < bound)`.
    pub failure_prob: f64,
}

pub fn theorem31_lower_bound(n: u64, m: f64) -> Result<LowerBound, BoundsError> {
    let t = optimal_t(n, m)?;
    Ok(LowerBound { bound: m * (0.5 - t), failure_prob: failure_probability(n) })
}

/// `3 √n e^{-n}`.
pub fn failure_probability(n: u64) -> f64 {
    let x = n as f64;
    3.0 * x.sqrt() * (-x).exp()
}

/// `m(1/2 - ½ t*)`: half the lower bound's deviation from `m/2`.
pub fn heuristic_fas_estimate(n: u64, m: f64) -> Result<f64, BoundsError> {
    let t = optimal_t(n, m)?;
    Ok(m * (0.5 - 0.5 * t))
}

/// `n(n-1)/4 - 1.73 n^{3/2}` for random tournaments.
pub fn delavega_tournament_bound(n: u64) -> f64 {
    let x = n as f64;
    x * (x - 1.0) / 4.0 - 1.73 * x.powf(1.5)
}

/// Every formula evaluated at one `(n, m)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    pub m: f64,
    pub delta_av: f64,
    pub t_star: f64,
    pub thm31_bound: f64,
    pub thm31_failure_prob: f64,
    pub heuristic_estimate: f64,
    /// Present only when `m = C(n,2)`.
    pub delavega_bound: Option<f64>,
}

impl BoundReport {
    pub fn evaluate(n: u64, m: f64) -> Result<Self, BoundsError> {
        let t_star = optimal_t(n, m)?;
        let lb = theorem31_lower_bound(n, m)?;
        let full = (n * (n - 1) / 2) as f64;
        Ok(BoundReport {
            n,
            m,
            delta_av: 2.0 * m / n as f64,
            t_star,
            thm31_bound: lb.bound,
            thm31_failure_prob: lb.failure_prob,
            heuristic_estimate: heuristic_fas_estimate(n, m)?,
            delavega_bound: (m == full).then(|| delavega_tournament_bound(n)),
        })
    }

    /// `m/2 - bound`, the deviation below half the arcs.
    pub fn epsilon_deviation(&self) -> f64 {
        self.m / 2.0 - self.thm31_bound
    }

    pub const CSV_HEADER: &'static str =
        "n,m,delta_av,t_star,thm31_bound,thm31_failure_prob,heuristic_estimate,delavega_bound";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.delta_av,
            self.t_star,
            self.thm31_bound,
            self.thm31_failure_prob,
            self.heuristic_estimate,
            self.delavega_bound.map(|v| v.to_string()).unwrap_or_default()
        )
    }

    pub fn to_text(&self) -> String {
        let mut rows = vec![
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("delta_av", format!("{}", self.delta_av)),
            ("t_star", format!("{:.6}", self.t_star)),
            ("thm31_bound", format!("{:.6}", self.thm31_bound)),
            ("thm31_failure_prob", format!("{:.6e}", self.thm31_failure_prob)),
            ("heuristic_estimate", format!("{:.6}", self.heuristic_estimate)),
            ("half_m", format!("{}", self.m / 2.0)),
        ];
        if let Some(d) = self.delavega_bound {
            rows.push(("delavega_bound", format!("{d:.6}")));
        }
        rows.iter().map(|(k, v)| format!("{k:<20}{v}\n")).collect()
    }
}
