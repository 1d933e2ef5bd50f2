//! Per-(method, sweep point) statistics.

use std::cmp::Ordering;

use bsclust_core::MethodId;

use crate::{ResultRow, SweepVariable};

/// Aggregate of all drops for one method at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: MethodId,
    pub sweep_variable: SweepVariable,
    pub sweep_value: f64,
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean; zero for a single drop.
    pub stderr: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
    pub mean_num_coalitions: f64,
    pub mean_num_attempts: f64,
    pub mean_num_deviations: f64,
    pub mean_prelog: f64,
}

/// Linear interpolation between order statistics; `sorted` must be nonempty.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// One summary row per (sweep value, method), sorted the same way.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.method.cmp(&b.method))
            .then(a.drop_index.cmp(&b.drop_index))
    });
    sorted
        .chunk_by(|a, b| a.method == b.method && a.sweep_value.total_cmp(&b.sweep_value) == Ordering::Equal)
        .map(summarize_group)
        .collect()
}

fn summarize_group(group: &[&ResultRow]) -> SummaryRow {
    let n = group.len();
    let mut values: Vec<f64> = group.iter().map(|r| r.sum_throughput).collect();
    let m = mean(values.iter().copied());
    let stderr = if n > 1 {
        let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    values.sort_by(f64::total_cmp);
    SummaryRow {
        method: group[0].method,
        sweep_variable: group[0].sweep_variable,
        sweep_value: group[0].sweep_value,
        count: n,
        mean: m,
        stderr,
        p10: percentile(&values, 0.1),
        p50: percentile(&values, 0.5),
        p90: percentile(&values, 0.9),
        mean_num_coalitions: mean(group.iter().map(|r| r.num_coalitions as f64)),
        mean_num_attempts: mean(group.iter().map(|r| r.num_attempts as f64)),
        mean_num_deviations: mean(group.iter().map(|r| r.num_deviations as f64)),
        mean_prelog: mean(group.iter().map(|r| r.prelog)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsclust_core::CoalitionStructure;

    fn row(method: MethodId, x: f64, drop: usize, t: f64) -> ResultRow {
        ResultRow {
            method,
            sweep_variable: SweepVariable::SpeedKmh,
            sweep_value: x,
            drop_index: drop,
            sum_throughput: t,
            sum_throughput_nats: t / std::f64::consts::LOG2_E,
            num_coalitions: 1,
            max_coalition_size: 2,
            prelog: 0.5,
            num_deviations: 0,
            num_attempts: 0,
            structure: CoalitionStructure::grand(2),
        }
    }

    #[test]
    fn single_row() {
        let s = summarize(&[row(MethodId::Grand, 3.0, 0, 4.5)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean, 4.5);
        assert_eq!(s[0].stderr, 0.0);
        assert_eq!((s[0].p10, s[0].p50, s[0].p90), (4.5, 4.5, 4.5));
    }

    #[test]
    fn constant_rows_have_zero_stderr() {
        let rows: Vec<_> = (0..10).map(|d| row(MethodId::Grand, 3.0, d, 2.0)).collect();
        assert_eq!(summarize(&rows)[0].stderr, 0.0);
    }

    #[test]
    fn groups_and_statistics() {
        let mut rows = Vec::new();
        for d in 0..5 {
            rows.push(row(MethodId::Singletons, 10.0, d, d as f64));
            rows.push(row(MethodId::Grand, 10.0, d, 1.0));
            rows.push(row(MethodId::Grand, 3.0, d, 2.0));
        }
        let s = summarize(&rows);
        let keys: Vec<_> = s.iter().map(|r| (r.sweep_value, r.method)).collect();
        assert_eq!(
            keys,
            vec![
                (3.0, MethodId::Grand),
                (10.0, MethodId::Grand),
                (10.0, MethodId::Singletons)
            ]
        );
        let single = &s[2];
        assert_eq!(single.mean, 2.0);
        // sample sd of 0..4 is sqrt(2.5)
        assert!((single.stderr - (2.5f64 / 5.0).sqrt()).abs() < 1e-15);
        assert!((single.p10 - 0.4).abs() < 1e-15);
        assert_eq!(single.p50, 2.0);
        assert!((single.p90 - 3.6).abs() < 1e-15);
    }
}
