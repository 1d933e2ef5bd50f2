use bsclust_core::network::{
    coherence_block_length, deployment_square_side, generate_network, greedy_associate, link_gain,
    CoherenceBlock, GainMatrix, ScenarioConfig,
};
use bsclust_core::SeedStream;
use proptest::prelude::*;
use rand::Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// A permutation `assoc` (bs -> ms) is a greedy trace if, taking its pairs in
/// decreasing gain order, each pair is the maximum of the rows and columns
/// still unassigned at that point.
fn is_greedy_trace(g: &GainMatrix, assoc: &[usize]) -> bool {
    let n = g.dim();
    let mut pairs: Vec<(usize, usize)> = assoc.iter().enumerate().map(|(bs, &ms)| (ms, bs)).collect();
    pairs.sort_by(|a, b| g.get(b.0, b.1).total_cmp(&g.get(a.0, a.1)));
    let mut ms_used = vec![false; n];
    let mut bs_used = vec![false; n];
    for (ms, bs) in pairs {
        for m in (0..n).filter(|&m| !ms_used[m]) {
            for b in (0..n).filter(|&b| !bs_used[b]) {
                if g.get(m, b) > g.get(ms, bs) {
                    return false;
                }
            }
        }
        ms_used[ms] = true;
        bs_used[bs] = true;
    }
    true
}

#[test]
fn greedy_matches_brute_force_trace() {
    let mut rng = SeedStream::new(11, 0).rng();
    for _ in 0..200 {
        let g = GainMatrix::from_fn(4, |_, _| rng.random::<f64>());
        let traces: Vec<Vec<usize>> = permutations(4)
            .into_iter()
            .filter(|p| is_greedy_trace(&g, p))
            .collect();
        assert_eq!(traces.len(), 1);
        assert_eq!(greedy_associate(&g), traces[0]);
    }
}

#[test]
fn network_is_deterministic_per_stream() {
    let cfg = ScenarioConfig {
        num_users: 2,
        ..ScenarioConfig::default()
    };
    let a = generate_network(&cfg, SeedStream::new(42, 0)).unwrap();
    let b = generate_network(&cfg, SeedStream::new(42, 0)).unwrap();
    let c = generate_network(&cfg, SeedStream::new(42, 1)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn network_invariants() {
    let cfg = ScenarioConfig::default();
    for drop in 0..50 {
        let net = generate_network(&cfg, SeedStream::new(7, drop)).unwrap();
        let k = cfg.num_users;
        let mut seen = vec![false; k];
        for &ms in &net.association {
            assert!(!seen[ms]);
            seen[ms] = true;
        }
        let side = deployment_square_side(k, cfg.cell_apothem_m).unwrap();
        for p in net.bs_positions.iter().chain(&net.ms_positions) {
            assert!((0.0..=side).contains(&p[0]) && (0.0..=side).contains(&p[1]));
        }
        for r in 0..k {
            assert!(net.gamma.row(r).iter().all(|&g| g > 0.0 && g.is_finite()));
        }
    }
}

/// Mean distance between two independent uniform points in a unit square.
const UNIT_SQUARE_MEAN_DISTANCE: f64 = 0.521_405_433_164_720_7;

#[test]
fn mean_link_distance_matches_uniform_square() {
    let cfg = ScenarioConfig::default();
    let side = deployment_square_side(cfg.num_users, cfg.cell_apothem_m).unwrap();
    // One BS-MS pair per drop (BS 0 with MS 0) keeps the samples independent.
    let samples: Vec<f64> = (0..500)
        .map(|drop| {
            let net = generate_network(&cfg, SeedStream::new(2024, drop)).unwrap();
            let (b, m) = (net.bs_positions[0], net.ms_positions[0]);
            ((b[0] - m[0]).powi(2) + (b[1] - m[1]).powi(2)).sqrt() / side
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!(
        (mean - UNIT_SQUARE_MEAN_DISTANCE).abs() < 3.0 * se,
        "mean {mean}, se {se}"
    );
}

#[test]
fn zero_shadow_gain_falls_with_distance() {
    let mut last = f64::INFINITY;
    for d in [0.5, 1.0, 2.0, 10.0, 100.0, 1000.0, 5000.0] {
        let g = link_gain(d, 0.0);
        assert!(g <= last);
        last = g;
    }
}

proptest! {
    #[test]
    fn greedy_is_bijection_and_scale_invariant(
        vals in proptest::collection::vec(0.001f64..10.0, 36),
        scale in 0.01f64..100.0,
    ) {
        let g = GainMatrix::from_fn(6, |r, c| vals[r * 6 + c]);
        let a = greedy_associate(&g);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        prop_assert_eq!(greedy_associate(&g.scaled(scale)), a);
    }

    #[test]
    fn coherence_inversely_proportional_to_speed(v in 0.1f64..500.0) {
        let at = |s: f64| match coherence_block_length(s, 2e9, 300e3) {
            CoherenceBlock::Finite(l) => l,
            CoherenceBlock::Infinite => unreachable!(),
        };
        let product = at(v) * v;
        prop_assert!((product / (2700.0 * 30.0) - 1.0).abs() < 1e-12);
    }
}
