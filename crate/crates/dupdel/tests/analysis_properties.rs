//! Property and regression tests for the analysis layer: TV metric axioms,
//! the one-step conditional-expectation oracle, and convergence trends.

use dupdel::analysis::{convergence_trace, expected_next_clique_counts, total_variation_lumped};
use dupdel::process::{make_rng, CliqueState, ProcessParams, Snapshot};
use dupdel::theory;
use proptest::prelude::*;

fn mass_vector() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..1.0, 6).prop_map(|mut v| {
        let total: f64 = v.iter().sum();
        if total > 0.0 {
            for x in &mut v {
                *x /= total;
            }
        } else {
            v[0] = 1.0;
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// TV is symmetric, in [0, 1], zero on the diagonal, and satisfies the
    /// triangle inequality on lumped mass vectors.
    #[test]
    fn tv_metric_axioms(a in mass_vector(), b in mass_vector(), c in mass_vector()) {
        let ab = total_variation_lumped(&a, &b);
        let ba = total_variation_lumped(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!(total_variation_lumped(&a, &a) == 0.0);
        let ac = total_variation_lumped(&a, &c);
        let cb = total_variation_lumped(&c, &b);
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    /// Σ_k k·E[C_k'] = N + p on random states: one expected new vertex per
    /// duplication, none per deletion.
    #[test]
    fn one_step_oracle_vertex_conservation(
        counts in proptest::collection::btree_map(1u32..20, 1u64..50, 1..8),
        p in 0.05f64..0.95,
    ) {
        let snap = Snapshot {
            m: 0,
            n_vertices: counts.iter().map(|(&k, &c)| k as u64 * c).sum(),
            counts: counts.into_iter().collect(),
        };
        let state = CliqueState::from_snapshot(&snap);
        let expected = expected_next_clique_counts(&state, p);
        let total: f64 = expected.iter().map(|(&k, v)| k as f64 * v).sum();
        let n = state.num_vertices() as f64;
        prop_assert!((total - (n + p)).abs() < 1e-9 * n, "{total} vs {}", n + p);
    }
}

/// Monte Carlo check of the one-step oracle from a frozen state with a
/// large clique, exercising the `k-1` shed path.
#[test]
fn one_step_oracle_monte_carlo_large_clique() {
    let snap = Snapshot {
        m: 0,
        n_vertices: 26,
        counts: vec![(1, 6), (20, 1)],
    };
    let base = CliqueState::from_snapshot(&snap);
    let p = 0.75;
    let params = ProcessParams::new(p, 0).unwrap();
    let expected = expected_next_clique_counts(&base, p);
    let trials = 400_000u64;
    let mut rng = make_rng(777);
    let mut sums = std::collections::BTreeMap::<u32, f64>::new();
    for _ in 0..trials {
        let mut s = base.clone();
        s.step(&params, &mut rng).unwrap();
        for (k, c) in s.occupied() {
            *sums.entry(k).or_insert(0.0) += c as f64;
        }
    }
    for (&k, &want) in &expected {
        let got = sums.get(&k).copied().unwrap_or(0.0) / trials as f64;
        let sigma = 2.0 / (trials as f64).sqrt();
        assert!((got - want).abs() < 4.0 * sigma, "k={k}: {got} vs {want}");
    }
}

/// TV against theory trends downward along a run: final < first in at
/// least 19 of 20 seeded replicas.
#[test]
fn convergence_trace_trends_downward() {
    let theory = theory::degree_distribution(0.75, 2_000, 1e-10).unwrap();
    let checkpoints = [1_000u64, 10_000, 100_000];
    let mut improved = 0;
    for r in 0..20u64 {
        let seed = dupdel::process::replica_seed(4242, r);
        let params = ProcessParams::new(0.75, seed).unwrap();
        let trace = convergence_trace(&params, &theory, &checkpoints).unwrap();
        let first = trace.first().unwrap().1.tv_distance;
        let last = trace.last().unwrap().1.tv_distance;
        if last < first {
            improved += 1;
        }
    }
    assert!(improved >= 19, "only {improved}/20 replicas improved");
}
