//! Exact limiting degree distribution of the duplication–deletion process.
//!
//! The limit sequence `(d_k)` is the unique positive bounded solution of
//!
//! ```text
//! d_0 = (1-p)/p,
//! (k+p) d_k = p k d_{k-1} + (1-p) k d_{k+1},   k >= 1,
//! ```
//!
//! and has closed integral forms in each regime of `p`:
//!
//! * supercritical (`p > 1/2`):  `d_k = γ ∫₀¹ t^k (1-t)^(β-1) (1-γt)^-(β+1) dt`
//! * subcritical  (`p < 1/2`):  `d_k = γ^-k ∫₀¹ t^k (1-t)^(-1-β) (1-t/γ)^-(1-β) dt`
//! * critical     (`p = 1/2`):  `d_k = k ∫₀¹ s^(k-1) e^(-s/(1-s)) ds`
//!
//! with `β = p/(2p-1)` and `γ = (1-p)/p`. This module evaluates those
//! integrals with endpoint-weighted Gauss–Jacobi rules, provides the
//! supercritical ₂F₁ series form, a Miller-style backward recursion, the
//! monotone fixed-point lower bound, and the tail asymptotics.
//!
//! Forward recursion from `(d_0, d_1)` is *not* offered as a production
//! method: every solution of the recurrence other than `(d_k)` itself is
//! unbounded, so rounding noise grows without bound. The instability is
//! demonstrated in the acceptance suite.

pub mod quadrature;
pub mod special;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};
use quadrature::{cached_rule, node_count_for, JacobiRule};
pub use special::{gamma, hypergeometric_2f1, log_beta, log_gamma};

/// Half-width of the window around `p = 1/2` routed to the critical branch.
pub const CRITICAL_WINDOW: f64 = 1e-12;

/// Hard cap on the truncation index chosen by the tail rule.
pub const MAX_TRUNCATION: usize = 100_000;

const MAX_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        };
        f.write_str(s)
    }
}

/// `p` together with the derived constants of the exact solutions.
///
/// `beta` is `NaN` in the critical regime, where it does not appear in any
/// formula.
#[derive(Debug, Clone, Copy)]
pub struct RegimeParams {
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub regime: Regime,
}

/// Classify `p` and compute `β = p/(2p-1)`, `γ = (1-p)/p`.
pub fn regime_params(p: f64) -> Result<RegimeParams> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("need 0 < p < 1, got {p}")));
    }
    let gamma_p = (1.0 - p) / p;
    let regime = if (p - 0.5).abs() <= CRITICAL_WINDOW {
        Regime::Critical
    } else if p < 0.5 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    let beta = match regime {
        Regime::Critical => f64::NAN,
        _ => p / (2.0 * p - 1.0),
    };
    Ok(RegimeParams {
        p,
        beta,
        gamma: gamma_p,
        regime,
    })
}

/// How a [`DegreeDistribution`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    Hypergeometric,
    BackwardRecursion,
    FixedPoint,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Quadrature => "quadrature",
            Method::Hypergeometric => "hypergeometric",
            Method::BackwardRecursion => "backward-recursion",
            Method::FixedPoint => "fixed-point",
        };
        f.write_str(s)
    }
}

/// Truncated theoretical degree distribution `d_1 .. d_K`.
///
/// `d0` is the bookkeeping value `(1-p)/p`; it is part of the recursion but
/// carries no probability mass. `tail_mass` estimates `Σ_{k>K} d_k` via the
/// partial-sum identity, which is exact for any solution of the recursion,
/// so `Σ values + tail_mass = 1` holds up to the method's numerical error at
/// *any* truncation.
#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    pub p: f64,
    pub d0: f64,
    /// `values[k-1] = d_k` for `k = 1..=K`.
    pub values: Vec<f64>,
    pub tail_mass: f64,
    pub method: Method,
    pub tol: f64,
}

impl DegreeDistribution {
    /// Truncation index `K`.
    pub fn truncation(&self) -> usize {
        self.values.len()
    }

    /// `d_k` for `1 <= k <= K`. `k = 0` returns the bookkeeping value.
    ///
    /// # Panics
    /// If `k > K`.
    pub fn entry(&self, k: usize) -> f64 {
        if k == 0 {
            self.d0
        } else {
            self.values[k - 1]
        }
    }

    /// Residual of the defining recursion at `k`:
    /// `(k+p) d_k - p k d_{k-1} - (1-p) k d_{k+1}`, for `1 <= k <= K-1`.
    pub fn recursion_residual(&self, k: usize) -> Result<f64> {
        let kk = self.truncation();
        if k < 1 || k + 1 > kk {
            return Err(Error::invalid(
                "k",
                format!("need 1 <= k <= {}, got {k}", kk - 1),
            ));
        }
        let kf = k as f64;
        let p = self.p;
        Ok((kf + p) * self.entry(k)
            - p * kf * self.entry(k - 1)
            - (1.0 - p) * kf * self.entry(k + 1))
    }

    /// LHS minus RHS of the partial-sum identity
    /// `Σ_{k<=n} d_k = 1 + (1/(1-p)) (-p (n+1) d_n + (1-p) n d_{n+1})`,
    /// for `1 <= n <= K-1`.
    pub fn partial_sum_identity_residual(&self, n: usize) -> Result<f64> {
        let kk = self.truncation();
        if n < 1 || n + 1 > kk {
            return Err(Error::invalid(
                "n",
                format!("need 1 <= n <= {}, got {n}", kk - 1),
            ));
        }
        let lhs: f64 = self.values[..n].iter().sum();
        Ok(lhs - self.identity_rhs(n))
    }

    /// Largest absolute partial-sum residual over all valid `n`, computed
    /// with a running prefix sum.
    pub fn max_partial_sum_identity_residual(&self) -> f64 {
        let mut prefix = 0.0;
        let mut worst: f64 = 0.0;
        for n in 1..self.truncation() {
            prefix += self.values[n - 1];
            worst = worst.max((prefix - self.identity_rhs(n)).abs());
        }
        worst
    }

    fn identity_rhs(&self, n: usize) -> f64 {
        let p = self.p;
        let nf = n as f64;
        1.0 + (-p * (nf + 1.0) * self.entry(n) + (1.0 - p) * nf * self.entry(n + 1)) / (1.0 - p)
    }

    /// Clique-size analogue `c_k = d_k / k`.
    pub fn clique_size_distribution(&self) -> CliqueSizeDistribution {
        CliqueSizeDistribution {
            p: self.p,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, d)| d / (i as f64 + 1.0))
                .collect(),
        }
    }
}

/// Truncated clique-size sequence `c_1 .. c_K` with `c_k = d_k / k`.
#[derive(Debug, Clone)]
pub struct CliqueSizeDistribution {
    pub p: f64,
    /// `values[k-1] = c_k`.
    pub values: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Quadrature evaluation
// ---------------------------------------------------------------------------

/// Per-rule evaluation data: `d_k`-independent parts of the log-space terms.
struct Evaluator {
    /// `ln t_i`
    log_nodes: Vec<f64>,
    /// `ln w_i` plus the log of the smooth factor at `t_i`.
    offsets: Vec<f64>,
}

impl Evaluator {
    /// `ln Σ_i exp(offsets[i] + coeff * ln t_i)`
    fn log_value(&self, coeff: f64) -> f64 {
        let n = self.log_nodes.len();
        let mut max = f64::NEG_INFINITY;
        for i in 0..n {
            let l = self.offsets[i] + coeff * self.log_nodes[i];
            if l > max {
                max = l;
            }
        }
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let mut sum = 0.0;
        for i in 0..n {
            let d = self.offsets[i] + coeff * self.log_nodes[i] - max;
            if d > -45.0 {
                sum += d.exp();
            }
        }
        max + sum.ln()
    }
}

/// The three integrand families, in the shape the evaluator needs.
enum Integrand {
    /// smooth factor `(1 - γ t)^-(β+1)`, weight `(1-t)^(β-1)`, `d_k = γ exp(L(k))`
    Supercritical { beta: f64, gamma: f64 },
    /// smooth factor `(1 - t/γ)^-(1-β)`, weight `(1-t)^(-1-β)`, `d_k = exp(-k ln γ + L(k))`
    Subcritical { beta: f64, gamma: f64 },
    /// factor `e^(-s/(1-s))`, weight 1, `d_k = k exp(L(k-1))`
    Critical,
}

impl Integrand {
    fn weight_exponent(&self) -> f64 {
        match self {
            Integrand::Supercritical { beta, .. } => beta - 1.0,
            Integrand::Subcritical { beta, .. } => -1.0 - beta,
            Integrand::Critical => 0.0,
        }
    }

    fn build(&self, rule: &JacobiRule) -> Evaluator {
        let n = rule.len();
        let mut log_nodes = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        for i in 0..n {
            let t = rule.nodes[i];
            let omt = rule.one_minus_nodes[i];
            let lw = rule.log_weights[i];
            let off = match self {
                Integrand::Supercritical { beta, gamma } => {
                    lw - (beta + 1.0) * (-gamma * t).ln_1p()
                }
                Integrand::Subcritical { beta, gamma } => lw - (1.0 - beta) * (-t / gamma).ln_1p(),
                // e^{-s/(1-s)} clamped to 0 once 1-s is at rounding scale.
                Integrand::Critical => {
                    if omt < 1e-12 {
                        f64::NEG_INFINITY
                    } else {
                        lw - t / omt
                    }
                }
            };
            log_nodes.push(t.ln());
            offsets.push(off);
        }
        Evaluator { log_nodes, offsets }
    }

    fn value(&self, eval: &Evaluator, k: usize) -> f64 {
        let kf = k as f64;
        match self {
            Integrand::Supercritical { gamma, .. } => gamma * eval.log_value(kf).exp(),
            Integrand::Subcritical { gamma, .. } => {
                let v = (-kf * gamma.ln() + eval.log_value(kf)).exp();
                v.max(f64::MIN_POSITIVE)
            }
            Integrand::Critical => kf * eval.log_value(kf - 1.0).exp(),
        }
    }
}

/// Evaluate `d_1 .. d_kmax` by quadrature with per-entry absolute error at
/// most `tol`, escalating the node count (base rule doubled) until two
/// successive rule sizes agree.
fn quadrature_values(integrand: &Integrand, kmax: usize, tol: f64) -> Result<Vec<f64>> {
    let alpha = integrand.weight_exponent();
    let mut evaluators: HashMap<usize, (Arc<JacobiRule>, Evaluator)> = HashMap::new();
    let get = |n: usize, evs: &mut HashMap<usize, (Arc<JacobiRule>, Evaluator)>| -> Result<()> {
        if !evs.contains_key(&n) {
            let rule = cached_rule(n, alpha)?;
            let ev = integrand.build(&rule);
            evs.insert(n, (rule, ev));
        }
        Ok(())
    };

    let mut out = Vec::with_capacity(kmax);
    let mut mult = 1usize;
    for k in 1..=kmax {
        let base = node_count_for(k);
        loop {
            let n1 = base * mult;
            let n2 = n1 * 2;
            if n2 > MAX_NODES {
                return Err(Error::NonConvergence {
                    worst_k: k,
                    detail: format!("quadrature not within tol={tol} at {MAX_NODES} nodes"),
                });
            }
            get(n1, &mut evaluators)?;
            get(n2, &mut evaluators)?;
            let v1 = integrand.value(&evaluators[&n1].1, k);
            let v2 = integrand.value(&evaluators[&n2].1, k);
            if (v2 - v1).abs() <= tol.max(1e-13 * v2.abs()) {
                out.push(v2);
                break;
            }
            mult *= 2;
        }
    }
    Ok(out)
}

/// Assemble a distribution from `d_1 .. d_{K+1}`: the extra entry feeds the
/// partial-sum tail estimate and is then dropped.
fn finish(p: f64, mut values: Vec<f64>, d0: f64, method: Method, tol: f64) -> DegreeDistribution {
    let d_kp1 = values.pop().expect("need at least K+1 = 2 entries");
    let big_k = values.len();
    let kf = big_k as f64;
    let d_k = values[big_k - 1];
    let tail_mass = (p * (kf + 1.0) * d_k - (1.0 - p) * kf * d_kp1) / (1.0 - p);
    DegreeDistribution {
        p,
        d0,
        values,
        tail_mass,
        method,
        tol,
    }
}

/// Supercritical exact values by Gauss–Jacobi quadrature.
pub fn degree_dist_supercritical(
    p: f64,
    truncation: usize,
    tol: f64,
) -> Result<DegreeDistribution> {
    let rp = regime_params(p)?;
    if rp.regime != Regime::Supercritical {
        return Err(Error::invalid(
            "p",
            format!("supercritical needs p > 1/2, got {p}"),
        ));
    }
    check_table_args(truncation, tol)?;
    let integrand = Integrand::Supercritical {
        beta: rp.beta,
        gamma: rp.gamma,
    };
    let vals = quadrature_values(&integrand, truncation + 1, tol)?;
    Ok(finish(p, vals, rp.gamma, Method::Quadrature, tol))
}

/// Subcritical exact values by Gauss–Jacobi quadrature; the integrable
/// `(1-t)^(-1-β)` endpoint singularity sits in the quadrature weight.
pub fn degree_dist_subcritical(p: f64, truncation: usize, tol: f64) -> Result<DegreeDistribution> {
    let rp = regime_params(p)?;
    if rp.regime != Regime::Subcritical {
        return Err(Error::invalid(
            "p",
            format!("subcritical needs p < 1/2, got {p}"),
        ));
    }
    check_table_args(truncation, tol)?;
    let integrand = Integrand::Subcritical {
        beta: rp.beta,
        gamma: rp.gamma,
    };
    let vals = quadrature_values(&integrand, truncation + 1, tol)?;
    Ok(finish(p, vals, rp.gamma, Method::Quadrature, tol))
}

/// Critical (`p = 1/2`) exact values, integrating the finite-interval form
/// `d_k = k ∫₀¹ s^(k-1) e^(-s/(1-s)) ds`.
pub fn degree_dist_critical(truncation: usize, tol: f64) -> Result<DegreeDistribution> {
    check_table_args(truncation, tol)?;
    let vals = quadrature_values(&Integrand::Critical, truncation + 1, tol)?;
    Ok(finish(0.5, vals, 1.0, Method::Quadrature, tol))
}

/// Regime dispatch; `p` within [`CRITICAL_WINDOW`] of `1/2` uses the
/// critical branch.
pub fn degree_distribution(p: f64, truncation: usize, tol: f64) -> Result<DegreeDistribution> {
    let rp = regime_params(p)?;
    match rp.regime {
        Regime::Subcritical => degree_dist_subcritical(p, truncation, tol),
        Regime::Critical => degree_dist_critical(truncation, tol),
        Regime::Supercritical => degree_dist_supercritical(p, truncation, tol),
    }
}

fn check_table_args(truncation: usize, tol: f64) -> Result<()> {
    if truncation < 1 {
        return Err(Error::invalid("K", "truncation must be >= 1"));
    }
    if truncation > MAX_TRUNCATION {
        return Err(Error::invalid(
            "K",
            format!("truncation capped at {MAX_TRUNCATION}"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "tolerance must be positive"));
    }
    Ok(())
}

/// Supercritical values via the ₂F₁ series form
/// `d_k = γ Γ(k+1)Γ(β)/Γ(β+k+1) ₂F₁(β+1, k+1; β+k+1; γ)`.
pub fn degree_dist_hypergeometric(p: f64, truncation: usize) -> Result<DegreeDistribution> {
    let rp = regime_params(p)?;
    if rp.regime != Regime::Supercritical {
        return Err(Error::invalid(
            "p",
            format!("2F1 series form is defined for p > 1/2 only, got {p}"),
        ));
    }
    check_table_args(truncation, 1.0)?;
    let lg_beta = log_gamma(rp.beta)?;
    let mut vals = Vec::with_capacity(truncation + 1);
    for k in 1..=truncation + 1 {
        let kf = k as f64;
        let log_pref = log_gamma(kf + 1.0)? + lg_beta - log_gamma(rp.beta + kf + 1.0)?;
        let series = hypergeometric_2f1(rp.beta + 1.0, kf + 1.0, rp.beta + kf + 1.0, rp.gamma)?;
        vals.push(rp.gamma * log_pref.exp() * series);
    }
    Ok(finish(p, vals, rp.gamma, Method::Hypergeometric, 1e-14))
}

// ---------------------------------------------------------------------------
// Backward recursion (Miller's method)
// ---------------------------------------------------------------------------

/// One backward pass: trial values `d̃_{ext+1} = 0`, `d̃_ext = 1`, recur
/// `d̃_{k-1} = ((k+p) d̃_k - (1-p) k d̃_{k+1}) / (p k)`, then rescale so
/// `d̃_0 = (1-p)/p`. Returns entries `1..=keep`.
///
/// The bounded solution is the minimal solution of the three-term
/// recurrence, so forward recursion diverges and only a backward pass
/// reaches it. Magnitudes are renormalized during the pass to dodge
/// overflow.
pub fn backward_recursion_oracle(
    p: f64,
    truncation: usize,
    extended: usize,
) -> Result<DegreeDistribution> {
    let rp = regime_params(p)?;
    if extended <= truncation {
        return Err(Error::invalid(
            "K_ext",
            format!("need K_ext > K, got {extended} <= {truncation}"),
        ));
    }
    let vals = backward_pass(p, truncation + 1, extended.max(truncation + 2))?;
    Ok(finish(p, vals, rp.gamma, Method::BackwardRecursion, 1e-12))
}

/// Backward recursion with the buffer rule applied automatically:
/// start at `K_ext = 2K + 100` and double until entries `1..=K` are stable
/// to 1e-12 between successive extensions.
pub fn backward_recursion_auto(p: f64, truncation: usize) -> Result<DegreeDistribution> {
    let rp = regime_params(p)?;
    let mut ext = 2 * truncation + 100;
    let mut prev = backward_pass(p, truncation + 1, ext)?;
    for _ in 0..8 {
        ext *= 2;
        let next = backward_pass(p, truncation + 1, ext)?;
        let stable = prev
            .iter()
            .zip(&next)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + 1e-300);
        if stable {
            return Ok(finish(p, next, rp.gamma, Method::BackwardRecursion, 1e-12));
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        worst_k: truncation,
        detail: "backward recursion entries did not stabilize under K_ext doubling".into(),
    })
}

fn backward_pass(p: f64, keep: usize, ext: usize) -> Result<Vec<f64>> {
    let mut d = vec![0.0_f64; ext + 2];
    d[ext] = 1.0;
    for k in (1..=ext).rev() {
        let kf = k as f64;
        let val = ((kf + p) * d[k] - (1.0 - p) * kf * d[k + 1]) / (p * kf);
        d[k - 1] = val;
        if val.abs() > 1e250 {
            for entry in d[k - 1..].iter_mut() {
                *entry *= 1e-250;
            }
        }
    }
    if d[0] == 0.0 || !d[0].is_finite() {
        return Err(Error::NonConvergence {
            worst_k: 0,
            detail: "backward pass produced a degenerate d_0".into(),
        });
    }
    let scale = ((1.0 - p) / p) / d[0];
    Ok(d[1..=keep].iter().map(|v| v * scale).collect())
}

// ---------------------------------------------------------------------------
// Fixed-point lower bound
// ---------------------------------------------------------------------------

/// The monotone fixed-point iteration from the liminf proof:
/// `a_k^(0) = 0`, then
/// `a_1 ← (1-p)(1 + 2 a_2)/(1+p)` and
/// `a_k ← (p(k-1) a_{k-1} + (1-p)(k+1) a_{k+1})/(k+p)`,
/// truncated at `K` (`a_k := 0` for `k > K`). Iterates are entrywise
/// non-decreasing and converge upward to `c_k = d_k/k`.
pub fn lower_bound_fixed_point(
    p: f64,
    truncation: usize,
    iterations: usize,
) -> Result<CliqueSizeDistribution> {
    regime_params(p)?;
    if truncation < 1 {
        return Err(Error::invalid("K", "truncation must be >= 1"));
    }
    // index 0 unused; index K+1 pinned at 0 (truncation).
    let mut a = vec![0.0_f64; truncation + 2];
    let mut next = vec![0.0_f64; truncation + 2];
    for _ in 0..iterations {
        next[1] = (1.0 - p) * (1.0 + 2.0 * a[2]) / (1.0 + p);
        for k in 2..=truncation {
            let kf = k as f64;
            next[k] = (p * (kf - 1.0) * a[k - 1] + (1.0 - p) * (kf + 1.0) * a[k + 1]) / (kf + p);
        }
        std::mem::swap(&mut a, &mut next);
    }
    Ok(CliqueSizeDistribution {
        p,
        values: a[1..=truncation].to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------------

/// Supercritical power law: `d_k ~ γ β^β Γ(β+1) k^-β`.
pub fn asymptotic_supercritical(p: f64, k: usize) -> Result<f64> {
    let rp = regime_params(p)?;
    if rp.regime != Regime::Supercritical {
        return Err(Error::invalid("p", format!("need p > 1/2, got {p}")));
    }
    let b = rp.beta;
    Ok((rp.gamma.ln() + b * b.ln() + log_gamma(b + 1.0)? - b * (k as f64).ln()).exp())
}

/// Subcritical exponential decay:
/// `d_k ~ (-β)^-1 (1-β)^(1-β) Γ(1-β) γ^-k k^β`.
pub fn asymptotic_subcritical(p: f64, k: usize) -> Result<f64> {
    let rp = regime_params(p)?;
    if rp.regime != Regime::Subcritical {
        return Err(Error::invalid("p", format!("need p < 1/2, got {p}")));
    }
    let b = rp.beta;
    let kf = k as f64;
    let log = -(-b).ln() + (1.0 - b) * (1.0 - b).ln() + log_gamma(1.0 - b)? - kf * rp.gamma.ln()
        + b * kf.ln();
    Ok(log.exp())
}

/// Critical stretched-exponential decay: `d_k ~ (eπ)^(1/2) k^(1/4) e^(-2√k)`.
pub fn asymptotic_critical(k: usize) -> f64 {
    let kf = k as f64;
    (0.5 * (1.0 + std::f64::consts::PI.ln()) + 0.25 * kf.ln() - 2.0 * kf.sqrt()).exp()
}

/// Regime dispatch for the tail asymptotic at `k`.
pub fn asymptotic_value(p: f64, k: usize) -> Result<f64> {
    let rp = regime_params(p)?;
    match rp.regime {
        Regime::Subcritical => asymptotic_subcritical(p, k),
        Regime::Critical => Ok(asymptotic_critical(k)),
        Regime::Supercritical => asymptotic_supercritical(p, k),
    }
}

// ---------------------------------------------------------------------------
// Tail rule
// ---------------------------------------------------------------------------

/// Choose the truncation `K` so that the asymptotic-formula tail bound for
/// `Σ_{k>K} d_k` drops below `tol`: a geometric bound with ratio `1/γ` in
/// the subcritical case, an integral-comparison bound of `k^-β` in the
/// supercritical case, and the closed-form stretched exponential in the
/// critical case. `K` is capped at [`MAX_TRUNCATION`].
pub fn choose_truncation(p: f64, tol: f64) -> Result<usize> {
    let rp = regime_params(p)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "tolerance must be positive"));
    }
    let bound = |k: usize| -> Result<f64> {
        let kf = k as f64;
        match rp.regime {
            Regime::Subcritical => {
                // Σ_{j>K} C γ^-j j^β <= C γ^-(K+1) (K+1)^β / (1 - 1/γ), β < 0.
                let head = asymptotic_subcritical(p, k + 1)?;
                Ok(head / (1.0 - 1.0 / rp.gamma))
            }
            Regime::Critical => {
                // ∫_K^∞ x^(1/4) e^(-2√x) dx <= (K^(3/4) + K^(1/4)) e^(-2√K); doubled for
                // the constant and the sum-vs-integral gap.
                Ok(2.0
                    * (std::f64::consts::E * std::f64::consts::PI).sqrt()
                    * (kf.powf(0.75) + kf.powf(0.25))
                    * (-2.0 * kf.sqrt()).exp())
            }
            Regime::Supercritical => {
                // Σ_{j>K} C j^-β <= C K^(1-β) / (β-1).
                let b = rp.beta;
                let c = (rp.gamma.ln() + b * b.ln() + log_gamma(b + 1.0)?).exp();
                Ok(c * kf.powf(1.0 - b) / (b - 1.0))
            }
        }
    };
    let mut k = 10usize;
    while k < MAX_TRUNCATION {
        if bound(k)? <= tol {
            return Ok(k);
        }
        k += (k / 8).max(1);
    }
    Ok(MAX_TRUNCATION)
}
