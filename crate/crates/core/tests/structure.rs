use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vclab_core::builders::{distance_graph, dot_product_graph, random_graph};
use vclab_core::graph::{
    prune_against, prune_by_degree, spectral_profile, PruneBounds, VertexSet,
};
use vclab_core::vcdim::{
    is_shattered, vc_at_least, vc_dimension_exact, ExactSearchOptions, SampleMode,
};

fn subset(n: usize, p: f64, seed: u64) -> VertexSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..n as u32).filter(|_| rng.gen_bool(p)).collect();
    VertexSet::new(members, n).unwrap()
}

#[test]
fn field_graph_spectra_are_consistent() {
    for (g, d) in [
        (distance_graph(5, 2).unwrap(), 4),
        (distance_graph(7, 2).unwrap(), 8),
        (dot_product_graph(5, 2).unwrap(), 5),
        (dot_product_graph(3, 3).unwrap(), 9),
    ] {
        let p = spectral_profile(&g, 1e-8).unwrap();
        assert_eq!(p.d, Some(d));
        assert!((p.eigenvalues[0] - d as f64).abs() < 1e-8);
        let trace: f64 = p.eigenvalues.iter().sum();
        assert!((trace - g.loop_count() as f64).abs() < 1e-6);
        let sq: f64 = p.eigenvalues.iter().map(|e| e * e).sum();
        assert!((sq - (g.n() * d) as f64).abs() < 1e-6);
        assert!(p.lambda < d as f64);
    }
}

#[test]
fn dot_product_lambda_is_near_sqrt_q_power() {
    // nonzero eigenvalues of dot(q,2) beyond the first have modulus sqrt(q)
    // up to the loop correction
    let p = spectral_profile(&dot_product_graph(11, 2).unwrap(), 1e-8).unwrap();
    assert!(p.lambda <= 11f64.sqrt() + 1.0 + 1e-9, "{}", p.lambda);
}

#[test]
fn vc_of_small_field_graphs() {
    let g = distance_graph(5, 2).unwrap();
    let u = VertexSet::all(g.n());
    let r = vc_dimension_exact(&g, &u, ExactSearchOptions::default()).unwrap();
    assert!(r.exact);
    assert!(r.witness.validate(&g, &u));
    assert!(r.dimension >= 2);
    let hit = vc_at_least(&g, &u, r.dimension, 200_000, 3, SampleMode::Uniform).unwrap();
    assert!(hit.is_some());
    assert!(vc_at_least(&g, &u, r.dimension + 1, 2_000, 3, SampleMode::Uniform)
        .unwrap()
        .is_none());
}

fn random_case() -> impl Strategy<Value = (usize, u64, f64, f64)> {
    (6usize..28, 0u64..10_000, 0.15f64..0.85, 0.3f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_sum_rules((n, seed, p, _) in random_case()) {
        let g = random_graph(n, p, seed).unwrap();
        let prof = spectral_profile(&g, 1e-9).unwrap();
        let trace: f64 = prof.eigenvalues.iter().sum();
        prop_assert!(trace.abs() < 1e-7);
        let sq: f64 = prof.eigenvalues.iter().map(|e| e * e).sum();
        prop_assert!((sq - 2.0 * g.edge_count() as f64).abs() < 1e-7);
        prop_assert!(prof.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap() as f64;
        prop_assert!(prof.eigenvalues[0] <= max_deg + 1e-9);
    }

    #[test]
    fn pruning_is_idempotent_against_its_reference((n, seed, p, frac) in random_case()) {
        let g = random_graph(n, p, seed).unwrap();
        let u = subset(n, frac, seed + 7);
        let d = (g.edge_count() * 2 / n).max(1);
        let pruned = prune_by_degree(&g, &u, d, n);
        prop_assert!(pruned.is_subset_of(&u));
        let again = prune_against(&g, &pruned, &u, d, n, PruneBounds::default());
        prop_assert_eq!(again.members(), pruned.members());
    }

    #[test]
    fn vc_shattering_is_downward_closed((n, seed, p, frac) in random_case()) {
        let g = random_graph(n, p, seed).unwrap();
        let u = subset(n, frac, seed + 3);
        prop_assume!(!u.is_empty());
        let r = vc_dimension_exact(&g, &u, ExactSearchOptions::default()).unwrap();
        prop_assert!(r.exact);
        prop_assert!(1usize << r.dimension <= u.len());
        prop_assert!(r.witness.validate(&g, &u));
        let x = r.witness.x.clone();
        for drop in 0..x.len() {
            let sub: Vec<u32> = x.iter().enumerate()
                .filter(|&(i, _)| i != drop).map(|(_, &v)| v).collect();
            prop_assert!(is_shattered(&g, &u, &sub).unwrap().is_some());
        }
        for k in 1..=r.dimension + 1 {
            for mode in [SampleMode::Uniform, SampleMode::MedianBiased] {
                if let Some(w) = vc_at_least(&g, &u, k, 300, seed, mode).unwrap() {
                    prop_assert!(k <= r.dimension);
                    prop_assert!(w.validate(&g, &u));
                }
            }
        }
    }

    #[test]
    fn randomized_search_is_deterministic((n, seed, p, _) in random_case()) {
        let g = random_graph(n, p, seed).unwrap();
        let u = VertexSet::all(n);
        let a = vc_at_least(&g, &u, 2, 500, seed, SampleMode::MedianBiased).unwrap();
        let b = vc_at_least(&g, &u, 2, 500, seed, SampleMode::MedianBiased).unwrap();
        prop_assert_eq!(a, b);
    }
}
