use bsclust_core::network::{Antennas, CoherenceBlock, GainMatrix};
use bsclust_core::partitions::{Coalition, CoalitionStructure};
use bsclust_core::rate_model::{longterm_se_from_snr, RateContext};
use bsclust_core::specfun::exp_scaled_e1;
use bsclust_core::SeedStream;
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

fn arb_context(k: usize) -> impl Strategy<Value = RateContext> {
    (
        proptest::collection::vec(-12.0f64..-6.0, k * k),
        -3.0f64..2.0,
        prop_oneof![Just((2usize, 4usize)), Just((6, 12)), Just((3, 3))],
        300.0f64..50_000.0,
    )
        .prop_map(move |(log_gains, log_p, (n, m), l)| {
            let gamma = GainMatrix::from_fn(k, |r, c| 10f64.powf(log_gains[r * k + c]));
            RateContext::new(
                gamma,
                10f64.powf(log_p),
                1e-12,
                Antennas::new(n, m, 1),
                CoherenceBlock::Finite(l),
            )
            .unwrap()
        })
}

fn arb_case() -> impl Strategy<Value = (RateContext, CoalitionStructure)> {
    (2usize..=7).prop_flat_map(|k| {
        (
            arb_context(k),
            proptest::collection::vec(0usize..k, k)
                .prop_map(|l| CoalitionStructure::from_labels(&l).unwrap()),
        )
    })
}

/// Monte Carlo check of the closed form: the mean of ln(1 + ρ|g|²) over
/// unit complex Gaussian `g` equals e^{1/ρ} E1(1/ρ).
#[test]
fn closed_form_matches_monte_carlo() {
    let samples = 1_000_000;
    for (i, rho) in [0.1, 1.0, 10.0].into_iter().enumerate() {
        let mut rng = SeedStream::new(99, i as u64).rng();
        let (mut sum, mut sum2) = (0.0f64, 0.0f64);
        for _ in 0..samples {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let v = (1.0 + rho * 0.5 * (re * re + im * im)).ln();
            sum += v;
            sum2 += v * v;
        }
        let n = samples as f64;
        let mean = sum / n;
        let se = ((sum2 / n - mean * mean) / (n - 1.0)).sqrt();
        let closed = exp_scaled_e1(1.0 / rho).unwrap();
        assert!(
            (mean - closed).abs() < 3.0 * se,
            "rho {rho}: mc {mean} ± {se}, closed {closed}"
        );
    }
}

fn merge(s: &CoalitionStructure, a: Coalition, b: Coalition) -> CoalitionStructure {
    let mut blocks: Vec<Coalition> = s.blocks().iter().copied().filter(|&c| c != a && c != b).collect();
    blocks.push(a.union(b));
    CoalitionStructure::new(s.num_users(), blocks).unwrap()
}

proptest! {
    #[test]
    fn rate_strictly_increasing_in_snr(a in -4.0f64..4.0, b in -4.0f64..4.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(longterm_se_from_snr(10f64.powf(lo), 1) < longterm_se_from_snr(10f64.powf(hi), 1));
    }

    #[test]
    fn merging_helps_rates_and_costs_prelog((ctx, s) in arb_case(), pick in any::<(usize, usize)>()) {
        prop_assume!(s.num_coalitions() >= 2);
        let p = s.num_coalitions();
        let i = pick.0 % p;
        let j = (i + 1 + pick.1 % (p - 1)) % p;
        let (a, b) = (s.blocks()[i], s.blocks()[j]);
        let merged = merge(&s, a, b);
        for k in a.union(b).members() {
            prop_assert!(ctx.longterm_se(&merged, k).unwrap() >= ctx.longterm_se(&s, k).unwrap());
        }
        prop_assert!(ctx.signed_prelog(&merged) <= ctx.signed_prelog(&s));
    }

    #[test]
    fn report_is_consistent_and_bounded((ctx, s) in arb_case()) {
        let report = ctx.throughput(&s).unwrap();
        let total: f64 = report.per_user.iter().sum();
        prop_assert!((report.sum - total).abs() <= 1e-12 * total.max(1.0));
        prop_assert!((0.0..=1.0).contains(&report.prelog));
        let grand = CoalitionStructure::grand(ctx.num_users());
        for (block, &ok) in s.blocks().iter().zip(&report.feasible) {
            for k in block.members() {
                let t = report.per_user[k];
                if !ok {
                    prop_assert_eq!(t, 0.0);
                }
                let rho_grand = ctx.per_stream_snr(&grand, k).unwrap();
                prop_assert!(t >= 0.0 && t <= report.prelog * (1.0 + rho_grand).log2() + 1e-12);
            }
        }
    }

    #[test]
    fn relabeling_users_permutes_throughputs(
        (ctx, s) in arb_case(),
        perm_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let k = ctx.num_users();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut SeedStream::new(perm_seed, 0).rng());
        // user k becomes perm[k]
        let mut inv = vec![0; k];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let gamma = GainMatrix::from_fn(k, |r, c| ctx.gamma().get(inv[r], inv[c]));
        let relabeled = RateContext::new(gamma, ctx.tx_power_w(), ctx.noise_power_w(), ctx.antennas(), ctx.coherence()).unwrap();
        let labels = s.labels();
        let new_labels: Vec<usize> = (0..k).map(|new| labels[inv[new]]).collect();
        let s2 = CoalitionStructure::from_labels(&new_labels).unwrap();
        let a = ctx.throughput(&s).unwrap();
        let b = relabeled.throughput(&s2).unwrap();
        for (old, &new) in perm.iter().enumerate() {
            prop_assert!((a.per_user[old] - b.per_user[new]).abs() <= 1e-12 * a.per_user[old].max(1e-300));
        }
    }
}
