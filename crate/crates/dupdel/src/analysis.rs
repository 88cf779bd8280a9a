//! Empirical degree distributions from snapshots, and diagnostics comparing
//! them to the exact limit: total-variation distance, tail-law fits, the
//! one-step conditional-expectation oracle and the vertex-growth check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::process::{simulate, CliqueState, ProcessParams};
use crate::theory::{DegreeDistribution, Regime};
use crate::{Error, Result};

/// The degree distribution read off a single state: a vertex has degree
/// `k - 1` iff it sits in a `k`-clique, so mass `k * C_k / N` at `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    /// Step index the state was observed at.
    pub m: u64,
    pub n_vertices: u64,
    /// Clique size `k` -> fraction of vertices in `k`-cliques. Sums to 1 up
    /// to rounding since `Σ k C_k = N` exactly.
    pub fractions: BTreeMap<u32, f64>,
}

/// Agreement between one empirical snapshot and a theory table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tv_distance: f64,
    /// Power-law exponent fit; populated in the supercritical regime when
    /// the default window has enough occupied bins.
    pub fitted_exponent: Option<f64>,
    /// Exponential rate fit (estimate of `ln γ`); subcritical counterpart.
    pub fitted_rate: Option<f64>,
    /// `N_m / (p m)`.
    pub growth_ratio: f64,
    /// `empirical - theoretical` per occupied empirical bin.
    pub per_k_errors: BTreeMap<u32, f64>,
}

/// Fractions `k * C_k / N` for every occupied size.
pub fn empirical_degree_distribution(state: &CliqueState) -> EmpiricalDistribution {
    let n = state.num_vertices() as f64;
    let fractions = state
        .occupied()
        .map(|(k, c)| (k, k as f64 * c as f64 / n))
        .collect();
    EmpiricalDistribution {
        m: state.step_index(),
        n_vertices: state.num_vertices(),
        fractions,
    }
}

/// Exact one-step conditional expectations `E[C_{m+1,k} | F_m]`:
///
/// ```text
/// E[C_1'] = C_1 (1 - 1/N) + (1 - p) + 2 (1 - p) C_2 / N
/// E[C_k'] = C_k (1 - k/N) + p (k-1) C_{k-1} / N + (1-p)(k+1) C_{k+1} / N
/// ```
///
/// Support of the result is sizes 1 ..= max size + 1.
pub fn expected_next_clique_counts(state: &CliqueState, p: f64) -> BTreeMap<u32, f64> {
    let n = state.num_vertices() as f64;
    let max = state.max_size() as u32;
    let mut out = BTreeMap::new();
    let c = |k: u32| state.count_of(k) as f64;
    out.insert(
        1,
        c(1) * (1.0 - 1.0 / n) + (1.0 - p) + 2.0 * (1.0 - p) * c(2) / n,
    );
    for k in 2..=max + 1 {
        let kf = k as f64;
        let v = c(k) * (1.0 - kf / n)
            + p * (kf - 1.0) * c(k - 1) / n
            + (1.0 - p) * (kf + 1.0) * c(k + 1) / n;
        out.insert(k, v);
    }
    out
}

/// Half the L1 distance between two already-lumped mass vectors of equal
/// length. The metric core shared by [`total_variation`] and the property
/// tests.
pub fn total_variation_lumped(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Total-variation distance with the tail beyond the theory truncation `K`
/// lumped into a single bucket on both sides.
pub fn total_variation(empirical: &EmpiricalDistribution, theory: &DegreeDistribution) -> f64 {
    let k_max = theory.truncation() as u32;
    let mut sum = 0.0;
    let mut emp_tail = 0.0;
    let mut covered = vec![false; k_max as usize + 1];
    for (&k, &f) in &empirical.fractions {
        if k > k_max {
            emp_tail += f;
        } else {
            sum += (f - theory.entry(k as usize)).abs();
            covered[k as usize] = true;
        }
    }
    for k in 1..=k_max as usize {
        if !covered[k] {
            sum += theory.entry(k);
        }
    }
    sum += (emp_tail - theory.tail_mass).abs();
    0.5 * sum
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn fit_points(
    empirical: &EmpiricalDistribution,
    k_min: u32,
    k_max: u32,
    x_of: impl Fn(f64) -> f64,
) -> Result<Vec<(f64, f64)>> {
    if k_min >= k_max {
        return Err(Error::invalid(
            "k_min",
            format!("empty fit window [{k_min}, {k_max}]"),
        ));
    }
    let pts: Vec<(f64, f64)> = empirical
        .fractions
        .range(k_min..=k_max)
        .filter(|(_, &f)| f > 0.0)
        .map(|(&k, &f)| (x_of(k as f64), f.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::invalid(
            "empirical",
            format!(
                "need >= 5 occupied bins in [{k_min}, {k_max}], found {}",
                pts.len()
            ),
        ));
    }
    Ok(pts)
}

/// OLS slope of `ln fraction_k` against `ln k` over occupied bins in the
/// window, sign-flipped so a decaying tail gives a positive exponent.
pub fn fit_power_law_exponent(
    empirical: &EmpiricalDistribution,
    k_min: u32,
    k_max: u32,
) -> Result<f64> {
    let pts = fit_points(empirical, k_min, k_max, f64::ln)?;
    Ok(-ols_slope(&pts))
}

/// OLS slope of `ln fraction_k` against `k`, sign-flipped; estimates the
/// subcritical decay rate `ln γ = ln((1-p)/p)`.
pub fn fit_exponential_rate(
    empirical: &EmpiricalDistribution,
    k_min: u32,
    k_max: u32,
) -> Result<f64> {
    let pts = fit_points(empirical, k_min, k_max, |k| k)?;
    Ok(-ols_slope(&pts))
}

/// `N_m / (p m)`, which converges a.s. to 1.
pub fn growth_rate_check(state: &CliqueState, p: f64) -> f64 {
    state.num_vertices() as f64 / (p * state.step_index() as f64)
}

/// Default fit windows: supercritical `[10, max_occupied / 2]` on a log-log
/// fit, subcritical `[5, last k with >= 100 vertices]` on a semilog fit.
/// Returns `None` when the window has too few occupied bins.
fn default_fits(empirical: &EmpiricalDistribution, regime: Regime) -> (Option<f64>, Option<f64>) {
    match regime {
        Regime::Supercritical => {
            let max_k = empirical.fractions.keys().next_back().copied().unwrap_or(0);
            let exponent = fit_power_law_exponent(empirical, 10, (max_k / 2).max(11)).ok();
            (exponent, None)
        }
        Regime::Subcritical => {
            let n = empirical.n_vertices as f64;
            let last = empirical
                .fractions
                .iter()
                .filter(|(_, &f)| f * n >= 100.0)
                .map(|(&k, _)| k)
                .next_back()
                .unwrap_or(0);
            let rate = fit_exponential_rate(empirical, 5, last.max(6)).ok();
            (None, rate)
        }
        Regime::Critical => (None, None),
    }
}

/// Build the full report for one snapshot against a theory table.
pub fn compare(state: &CliqueState, theory: &DegreeDistribution, p: f64) -> ComparisonReport {
    let empirical = empirical_degree_distribution(state);
    let regime = crate::theory::regime_params(p)
        .map(|r| r.regime)
        .unwrap_or(Regime::Critical);
    let (fitted_exponent, fitted_rate) = default_fits(&empirical, regime);
    let k_max = theory.truncation() as u32;
    let per_k_errors = empirical
        .fractions
        .iter()
        .map(|(&k, &f)| {
            let theo = if k <= k_max {
                theory.entry(k as usize)
            } else {
                0.0
            };
            (k, f - theo)
        })
        .collect();
    ComparisonReport {
        tv_distance: total_variation(&empirical, theory),
        fitted_exponent,
        fitted_rate,
        growth_ratio: growth_rate_check(state, p),
        per_k_errors,
    }
}

/// Run one simulation and emit a [`ComparisonReport`] at each checkpoint.
/// Deterministic for a fixed seed in `params`.
pub fn convergence_trace(
    params: &ProcessParams,
    theory: &DegreeDistribution,
    checkpoints: &[u64],
) -> Result<Vec<(u64, ComparisonReport)>> {
    let num_steps = checkpoints.last().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(checkpoints.len());
    let p = params.p;
    let mut scratch = CliqueState::init(2);
    simulate(params, num_steps, checkpoints, |m, snap| {
        // Rebuild a state view from the snapshot for the report helpers.
        scratch = CliqueState::from_snapshot(&snap);
        out.push((m, compare(&scratch, theory, p)));
    })?;
    Ok(out)
}
