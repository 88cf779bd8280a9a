//! Gauss–Jacobi rules on `[0, 1]` with weight `(1 - t)^alpha`.
//!
//! Nodes and weights come from the Golub–Welsch eigenvalue method: the
//! symmetric tridiagonal Jacobi matrix of the three-term recurrence is
//! diagonalized by an implicit-shift QL sweep that tracks only the first
//! component of each eigenvector, which is all the weights need. Weights are
//! kept in log space so that rules with large `alpha` (which occur as
//! `p → 1/2`) stay usable next to integrand factors that overflow `f64`.
//!
//! Rules are immutable after construction and cached per `(n, alpha)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{Error, Result};

/// A quadrature rule for `∫₀¹ (1-t)^alpha f(t) dt ≈ Σ_i exp(log_weights[i]) f(nodes[i])`.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub alpha: f64,
    /// Nodes in ascending order, strictly inside (0, 1).
    pub nodes: Vec<f64>,
    /// `1 - nodes[i]`, computed directly from the eigenvalues so the
    /// endpoint distance keeps full relative precision.
    pub one_minus_nodes: Vec<f64>,
    /// Natural logs of the (positive) weights.
    pub log_weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", "rule needs at least 2 nodes"));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("weight exponent must be > -1, got {alpha}"),
            ));
        }

        // Jacobi matrix for weight (1-x)^alpha (1+x)^0 on [-1, 1].
        let a = alpha;
        let mut diag = vec![0.0_f64; n];
        let mut off = vec![0.0_f64; n];
        diag[0] = -a / (a + 2.0);
        for j in 1..n {
            let jf = j as f64;
            let denom = 2.0 * jf + a;
            diag[j] = -a * a / (denom * (denom + 2.0));
            off[j - 1] = 2.0 * jf * (jf + a) / (denom * (denom * denom - 1.0).sqrt());
        }
        let mut first = vec![0.0_f64; n];
        first[0] = 1.0;
        tridiag_eig_first_components(&mut diag, &mut off, &mut first)?;

        // On [0,1]: t = (x+1)/2, total weight ∫₀¹(1-t)^a dt = 1/(a+1),
        // so w_i = first_i^2 / (a+1).
        let log_norm = -(a + 1.0).ln();
        let mut nodes = Vec::with_capacity(n);
        let mut one_minus = Vec::with_capacity(n);
        let mut log_w = Vec::with_capacity(n);
        for i in 0..n {
            nodes.push(0.5 * (diag[i] + 1.0));
            one_minus.push(0.5 * (1.0 - diag[i]));
            log_w.push(2.0 * first[i].abs().ln() + log_norm);
        }
        Ok(JacobiRule {
            alpha,
            nodes,
            one_minus_nodes: one_minus,
            log_weights: log_w,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Implicit-shift QL for a symmetric tridiagonal matrix, rotating a single
/// row vector along so that `first[i]` ends up as the first component of the
/// i-th normalized eigenvector. Eigenvalues are returned in `diag`,
/// ascending.
fn tridiag_eig_first_components(
    diag: &mut [f64],
    off: &mut [f64],
    first: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    worst_k: l,
                    detail: "QL iteration for quadrature nodes stalled".into(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0_f64;
            let mut c = 1.0_f64;
            let mut p = 0.0_f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    // Sort eigenvalues ascending, carrying the first components.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let d_old = diag.to_vec();
    let f_old = first.to_vec();
    for (pos, &i) in idx.iter().enumerate() {
        diag[pos] = d_old[i];
        first[pos] = f_old[i];
    }
    Ok(())
}

static RULE_CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<JacobiRule>>>> = OnceLock::new();

/// Fetch (or build and cache) the `n`-node rule for weight `(1-t)^alpha`.
pub fn cached_rule(n: usize, alpha: f64) -> Result<Arc<JacobiRule>> {
    let cache = RULE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, alpha.to_bits());
    if let Some(rule) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(JacobiRule::new(n, alpha)?);
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// Node budget for entry `k`: `t^k` concentrates mass near `t = 1`, and the
/// endpoint clustering of Gauss nodes covers it with O(sqrt(k)) extra nodes.
/// Rounded up to a multiple of 16 so nearby `k` share one cached rule.
pub fn node_count_for(k: usize) -> usize {
    let raw = 64 + 2 * (k as f64).sqrt().ceil() as usize;
    (raw + 15) & !15
}

/// `ln Σ_i exp(terms[i])` for finite or `-inf` terms, max-shifted.
pub fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for t in terms {
        let d = t - max;
        if d > -45.0 {
            sum += d.exp();
        }
    }
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference nodes/weights for n = 8, alpha = 0.5 on [-1, 1]
    // (scipy.special.roots_jacobi(8, 0.5, 0.0)).
    const REF_NODES: [f64; 8] = [
        -0.96247954,
        -0.8075679,
        -0.54964194,
        -0.22152828,
        0.13493729,
        0.47429683,
        0.7532725,
        0.93628679,
    ];
    const REF_WEIGHTS: [f64; 8] = [
        0.13404072, 0.28354095, 0.37271763, 0.38655911, 0.33064718, 0.22905266, 0.11724179,
        0.03181804,
    ];

    #[test]
    fn matches_reference_jacobi_rule() {
        let rule = JacobiRule::new(8, 0.5).unwrap();
        // Our rule lives on [0,1]; map back to [-1,1] for comparison.
        let scale = 0.5_f64.powf(0.5 + 1.0); // 2^-(alpha+1)
        for i in 0..8 {
            let x = 2.0 * rule.nodes[i] - 1.0;
            assert!((x - REF_NODES[i]).abs() < 1e-7, "node {i}: {x}");
            let w = rule.log_weights[i].exp() / scale;
            assert!((w - REF_WEIGHTS[i]).abs() < 1e-7, "weight {i}: {w}");
        }
    }

    #[test]
    fn weights_sum_to_moment() {
        for &alpha in &[0.0, 0.5, -0.5, 3.0, 248.5] {
            let rule = JacobiRule::new(64, alpha).unwrap();
            let total: f64 = rule.log_weights.iter().map(|lw| lw.exp()).sum();
            let expect = 1.0 / (alpha + 1.0);
            assert!(
                (total - expect).abs() < 1e-12 * expect.max(1.0),
                "alpha={alpha}: {total} vs {expect}"
            );
        }
    }

    #[test]
    fn integrates_polynomial_against_weight() {
        // ∫₀¹ (1-t)^0.5 t^3 dt = B(4, 1.5) = Γ(4)Γ(1.5)/Γ(5.5)
        let rule = JacobiRule::new(16, 0.5).unwrap();
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.log_weights)
            .map(|(&t, &lw)| lw.exp() * t.powi(3))
            .sum();
        let expect = 6.0 * 0.886_226_925_452_758 / 52.342_777_784_553_52; // Γ(4)Γ(1.5)/Γ(5.5)
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn singular_weight_endpoint() {
        // ∫₀¹ (1-t)^(-1/2) dt = 2 exactly; f ≡ 1.
        let rule = JacobiRule::new(32, -0.5).unwrap();
        let got: f64 = rule.log_weights.iter().map(|lw| lw.exp()).sum();
        assert!((got - 2.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(JacobiRule::new(1, 0.0).is_err());
        assert!(JacobiRule::new(8, -1.0).is_err());
    }

    #[test]
    fn nodes_ascending_and_interior() {
        let rule = JacobiRule::new(40, 2.5).unwrap();
        for w in rule.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(rule.nodes[0] > 0.0 && *rule.nodes.last().unwrap() < 1.0);
        for i in 0..rule.len() {
            assert!((rule.nodes[i] + rule.one_minus_nodes[i] - 1.0).abs() < 1e-15);
        }
    }
}
