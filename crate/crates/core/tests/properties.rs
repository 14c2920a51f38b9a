use proptest::prelude::*;

use mono_clt::bounds::{min_degree_sum_check, poisson_tv_bound, remark_rate, triangle_count_check, wasserstein_bound};
use mono_clt::coloring::{monochromatic_count, sample_coloring, simulate, simulate_range, standardize, ColoringConfig};
use mono_clt::exact::{edge_indicator_moments, exact_pmf, exact_pmf_component, DEFAULT_CAP};
use mono_clt::metrics::{tv_between, tv_to_poisson, wasserstein_to_normal};
use mono_clt::{generate, DiscreteDistribution, Family, Graph, RealDistribution};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let slots = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), slots).prop_map(move |mask| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .zip(&mask)
                .filter(|(_, &keep)| keep)
                .map(|(e, _)| e)
                .collect();
            Graph::from_edge_list(&pairs, n).unwrap()
        })
    })
}

fn brute_triangles(g: &Graph) -> u64 {
    let n = g.vertex_count();
    let adj = |u: usize, v: usize| g.neighbors(u).contains(&v);
    let mut t = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if adj(a, b) && adj(b, c) && adj(a, c) {
                    t += 1;
                }
            }
        }
    }
    t
}

fn law_strategy() -> impl Strategy<Value = RealDistribution> {
    proptest::collection::vec((-6.0f64..6.0, 0.01f64..1.0), 1..12).prop_map(|pairs| {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        RealDistribution::new(pairs.into_iter().map(|(x, p)| (x, p / total))).unwrap()
    })
}

fn pmf_strategy() -> impl Strategy<Value = DiscreteDistribution> {
    proptest::collection::vec((0u64..30, 0.01f64..1.0), 1..10).prop_map(|pairs| {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        DiscreteDistribution::new(pairs.into_iter().map(|(y, p)| (y, p / total))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_sum_is_twice_edge_count(g in graph_strategy(12)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn triangles_match_brute_force(g in graph_strategy(12)) {
        prop_assert_eq!(g.triangle_count(), brute_triangles(&g));
    }

    #[test]
    fn structural_inequalities_hold(g in graph_strategy(14)) {
        prop_assume!(g.edge_count() > 0);
        let stats = g.edge_stats();
        prop_assert!(min_degree_sum_check(&stats).pass);
        prop_assert!(triangle_count_check(&stats).pass);
        let k: u64 = (0..g.edge_count()).map(|i| g.neighborhood(i).unwrap().len() as u64).sum();
        prop_assert_eq!(k, stats.k_m);
    }

    #[test]
    fn erdos_renyi_inequalities_hold(n in 2usize..80, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = generate(Family::ErdosRenyi { n, p }, Some(seed)).unwrap();
        prop_assume!(g.edge_count() > 0);
        let stats = g.edge_stats();
        prop_assert!(min_degree_sum_check(&stats).pass);
        prop_assert!(triangle_count_check(&stats).pass);
    }

    #[test]
    fn edge_list_round_trip(g in graph_strategy(10)) {
        let back: Graph = g.to_edge_list_string().parse().unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.content_hash(), g.content_hash());
    }

    #[test]
    fn convolution_matches_whole_graph_enumeration(g in graph_strategy(8), c in 2u32..4) {
        let whole = exact_pmf_component(&g, c, DEFAULT_CAP).unwrap();
        let split = exact_pmf(&g, c, DEFAULT_CAP).unwrap();
        prop_assert_eq!(whole.support(), split.support());
        for (a, b) in whole.probs().iter().zip(split.probs()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn standardized_law_has_zero_mean_unit_variance(g in graph_strategy(7), c in 2u32..5) {
        prop_assume!(g.edge_count() > 0);
        let m = g.edge_count() as u64;
        let law = exact_pmf(&g, c, DEFAULT_CAP).unwrap();
        let (mean, var) = law.moments();
        prop_assert!((mean - m as f64 / c as f64).abs() <= 1e-12);
        let expected_var = m as f64 * (1.0 / c as f64) * (1.0 - 1.0 / c as f64);
        prop_assert!((var - expected_var).abs() <= 1e-12 * expected_var.max(1.0));
        let w = law.standardized(m, c).unwrap();
        let wm: f64 = w.atoms().iter().zip(w.probs()).map(|(x, p)| x * p).sum();
        let wv: f64 = w.atoms().iter().zip(w.probs()).map(|(x, p)| x * x * p).sum();
        prop_assert!(wm.abs() <= 1e-12);
        prop_assert!((wv - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn monochromatic_count_within_edges(g in graph_strategy(10), c in 2u32..6, seed in any::<u64>()) {
        let cfg = ColoringConfig::new(c, seed).unwrap();
        let col = sample_coloring(&g, &cfg, 0).unwrap();
        prop_assert!(col.iter().all(|&x| x < c));
        prop_assert!(monochromatic_count(&g, &col).unwrap() <= g.edge_count() as u64);
    }

    #[test]
    fn standardize_is_affine(m in 1u64..1000, c in 2u32..100, y in 0u64..1000) {
        prop_assume!(y <= m);
        let w = standardize(y, m, c).unwrap();
        let direct = (c as f64 * y as f64 - m as f64) / (m as f64 * (c as f64 - 1.0)).sqrt();
        prop_assert!((w - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn wasserstein_is_bounded_and_shift_lipschitz(law in law_strategy(), delta in -3.0f64..3.0) {
        let w = wasserstein_to_normal(&law).unwrap();
        let ws = wasserstein_to_normal(&law.shifted(delta)).unwrap();
        prop_assert!(w >= 0.0);
        prop_assert!((w - ws).abs() <= delta.abs() + 1e-12);
        // W1 <= E|X| + E|Z|
        let mean_abs: f64 = law.atoms().iter().zip(law.probs()).map(|(x, p)| x.abs() * p).sum();
        prop_assert!(w <= mean_abs + (2.0 / std::f64::consts::PI).sqrt() + 1e-12);
    }

    #[test]
    fn tv_is_symmetric_and_bounded(a in pmf_strategy(), b in pmf_strategy(), lambda in 0.1f64..20.0) {
        let d = tv_between(&a, &b);
        prop_assert!((d - tv_between(&b, &a)).abs() <= 1e-15);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&d));
        prop_assert!(tv_between(&a, &a) <= 1e-15);
        let t = tv_to_poisson(&a, lambda).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&t));
    }

    #[test]
    fn bounds_are_monotone(m in 1u64..1_000_000, c in 2u32..10_000) {
        prop_assert!(wasserstein_bound(m + 1, c).unwrap() < wasserstein_bound(m, c).unwrap());
        prop_assert!(poisson_tv_bound(m, c + 1).unwrap() < poisson_tv_bound(m, c).unwrap());
        prop_assert!(poisson_tv_bound(m + 1, c).unwrap() > poisson_tv_bound(m, c).unwrap());
        prop_assert!(remark_rate(m, c, m, 1.0).unwrap() <= remark_rate(m, c, m + 1, 1.0).unwrap());
    }

    #[test]
    fn indicator_moments_hold(m in 1u64..10_000, c in 2u32..1_000) {
        prop_assert!(edge_indicator_moments(m, c).unwrap().holds(m));
    }

    #[test]
    fn range_merge_equals_whole(split in 0u64..40_000, seed in any::<u64>()) {
        let g = generate(Family::Cycle { n: 5 }, None).unwrap();
        let cfg = ColoringConfig::new(3, seed).unwrap();
        let total = 40_000;
        let whole = simulate(&g, &cfg, total).unwrap();
        let a = simulate_range(&g, &cfg, 0, split).unwrap();
        let b = simulate_range(&g, &cfg, split, total - split).unwrap();
        let merged = a.merge(&b).unwrap();
        prop_assert_eq!(&merged.histogram, &whole.histogram);
        prop_assert_eq!(merged.n_samples, whole.n_samples);
    }
}

#[test]
fn matching_wasserstein_decreases_with_size() {
    let mut prev = f64::INFINITY;
    for edges in [16, 64, 256, 1024] {
        let g = generate(Family::Matching { edges }, None).unwrap();
        let law = exact_pmf(&g, 2, DEFAULT_CAP).unwrap();
        let w = wasserstein_to_normal(&law.standardized(edges as u64, 2).unwrap()).unwrap();
        assert!(w < prev, "m={edges}: {w} !< {prev}");
        prev = w;
    }
}
