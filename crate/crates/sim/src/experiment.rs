//! Monte Carlo sweep over network drops and clustering methods.

use bsclust_core::baselines::{exhaustive_best, kmeans_best};
use bsclust_core::formation::{run_formation, AttemptRecord, FormationConfig, VisitOrder};
use bsclust_core::network::generate_network;
use bsclust_core::partitions::random_partition;
use bsclust_core::{CoalitionStructure, MethodId, RateContext, SeedStream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{ExperimentConfig, Result};

/// One (method, sweep point, drop) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: MethodId,
    pub sweep_variable: crate::SweepVariable,
    pub sweep_value: f64,
    pub drop_index: usize,
    /// Bits per channel use.
    pub sum_throughput: f64,
    /// Nats per channel use.
    pub sum_throughput_nats: f64,
    pub num_coalitions: usize,
    pub max_coalition_size: usize,
    pub prelog: f64,
    pub num_deviations: u64,
    pub num_attempts: u64,
    pub structure: CoalitionStructure,
}

/// One formation join request, tagged with where it happened.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceLine {
    pub sweep_value: f64,
    pub drop_index: usize,
    #[serde(flatten)]
    pub record: AttemptRecord,
}

/// Rows (canonical order) and optional formation traces.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub traces: Vec<TraceLine>,
}

/// Stream of drop `drop`: the network depends only on `(master_seed, drop)`.
fn drop_stream(config: &ExperimentConfig, drop: usize) -> SeedStream {
    SeedStream::new(config.master_seed, drop as u64)
}

/// Method-private randomness for one sweep point of one drop.
fn method_stream(config: &ExperimentConfig, drop: usize, point: usize, method: MethodId) -> SeedStream {
    drop_stream(config, drop).derive(((point as u64) << 8) | (method as u64 + 1))
}

/// Run every method on every (sweep point, drop) pair.
///
/// Work items run in parallel; the output is sorted by sweep value, drop
/// and method, and depends only on the config.
pub fn run_experiment(config: &ExperimentConfig, keep_traces: bool) -> Result<ExperimentOutput> {
    config.validate()?;
    let methods = config.methods_sorted();
    let items: Vec<(usize, usize)> = (0..config.sweep.values.len())
        .flat_map(|p| (0..config.num_drops).map(move |d| (p, d)))
        .collect();
    let chunks: Vec<Result<ExperimentOutput>> = items
        .par_iter()
        .map(|&(point, drop)| run_point(config, &methods, point, drop, keep_traces))
        .collect();
    let mut out = ExperimentOutput::default();
    for chunk in chunks {
        let chunk = chunk?;
        out.rows.extend(chunk.rows);
        out.traces.extend(chunk.traces);
    }
    Ok(out)
}

fn run_point(
    config: &ExperimentConfig,
    methods: &[MethodId],
    point: usize,
    drop: usize,
    keep_traces: bool,
) -> Result<ExperimentOutput> {
    let value = config.sweep.values[point];
    let scenario = config.sweep.variable.apply(&config.scenario, value);
    let network = generate_network(&scenario, drop_stream(config, drop))?;
    let ctx = RateContext::from_network(&network, &scenario)?;
    let k = scenario.num_users;
    let mut out = ExperimentOutput::default();

    for &method in methods {
        let stream = method_stream(config, drop, point, method);
        let mut rng = stream.rng();
        let (structure, deviations, attempts) = match method {
            MethodId::Formation => {
                let formation = FormationConfig {
                    budgets: Some(config.budgets_per_user()),
                    order: if config.shuffle_players {
                        VisitOrder::Shuffled(stream)
                    } else {
                        VisitOrder::Ascending
                    },
                    ..FormationConfig::default()
                };
                let result = run_formation(&ctx, &formation)?;
                if keep_traces {
                    out.traces.extend(result.trace.records.iter().map(|r| TraceLine {
                        sweep_value: value,
                        drop_index: drop,
                        record: r.clone(),
                    }));
                }
                let attempts = result.trace.total_attempts();
                (result.structure, result.trace.deviations as u64, attempts)
            }
            MethodId::Exhaustive => (exhaustive_best(&ctx)?.0, 0, 0),
            MethodId::Grand => (CoalitionStructure::grand(k), 0, 0),
            MethodId::Singletons => (CoalitionStructure::singletons(k), 0, 0),
            MethodId::Random => (random_partition(k, &mut rng), 0, 0),
            MethodId::Kmeans => (kmeans_best(&ctx, &network.bs_positions, &mut rng)?, 0, 0),
        };
        let report = ctx.throughput(&structure)?;
        out.rows.push(ResultRow {
            method,
            sweep_variable: config.sweep.variable,
            sweep_value: value,
            drop_index: drop,
            sum_throughput: report.sum,
            sum_throughput_nats: report.sum_nats(),
            num_coalitions: structure.num_coalitions(),
            max_coalition_size: structure.max_coalition_size(),
            prelog: report.prelog,
            num_deviations: deviations,
            num_attempts: attempts,
            structure,
        });
    }
    Ok(out)
}
