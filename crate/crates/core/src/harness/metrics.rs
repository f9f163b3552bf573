//! Accuracy metrics over replicated estimates.

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mean: f64,
    /// `|mean − truth|`
    pub bias: f64,
    /// Sample standard deviation (`m − 1` denominator).
    pub sd: f64,
    pub rmse: f64,
    pub n_defined: usize,
    pub n_undefined: usize,
}

/// Bias, SD and RMSE of the defined estimates; `None` entries are counted
/// as undefined and otherwise ignored.
pub fn compute_metrics(estimates: &[Option<f64>], truth: f64) -> Result<Metrics, HarnessError> {
    let defined: Vec<f64> = estimates.iter().flatten().copied().collect();
    let n_undefined = estimates.len() - defined.len();
    if defined.len() < 2 {
        return Err(HarnessError::Data(format!(
            "need at least 2 defined estimates, got {} ({} undefined)",
            defined.len(),
            n_undefined
        )));
    }
    let m = defined.len() as f64;
    let mean = defined.iter().sum::<f64>() / m;
    let ss: f64 = defined.iter().map(|x| (x - mean).powi(2)).sum();
    let se: f64 = defined.iter().map(|x| (x - truth).powi(2)).sum();
    Ok(Metrics {
        mean,
        bias: (mean - truth).abs(),
        sd: (ss / (m - 1.0)).sqrt(),
        rmse: (se / m).sqrt(),
        n_defined: defined.len(),
        n_undefined,
    })
}

/// Share of replications in which each estimator is closest to the truth.
/// `rows[r][k]` is estimator `k` in replication `r`. Ties split the credit
/// evenly; an undefined estimate is never closest unless all are undefined.
pub fn compute_p_best(rows: &[Vec<Option<f64>>], truth: f64) -> Vec<f64> {
    let k = rows.first().map_or(0, Vec::len);
    let mut credit = vec![0.0; k];
    if rows.is_empty() {
        return credit;
    }
    for row in rows {
        assert_eq!(row.len(), k, "ragged estimate rows");
        let dist: Vec<f64> = row.iter().map(|e| e.map_or(f64::INFINITY, |v| (v - truth).abs())).collect();
        let best = dist.iter().copied().fold(f64::INFINITY, f64::min);
        let winners: Vec<usize> = (0..k).filter(|&i| dist[i] == best).collect();
        let share = 1.0 / winners.len() as f64;
        for i in winners {
            credit[i] += share;
        }
    }
    let m = rows.len() as f64;
    credit.iter().map(|c| c / m).collect()
}
