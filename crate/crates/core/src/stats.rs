//! Rank correlation statistics: Kendall tau-b and Spearman rho.
//!
//! Tau-b classifies every pair (i, j) as concordant, discordant, tied in the
//! first vector only, tied in the second only, or tied in both:
//!
//! `tau = (P - Q) / sqrt((P + Q + T) * (P + Q + U))`
//!
//! Pairs tied in both vectors count in neither T nor U. Direct O(n^2) pair
//! counting; the vectors here hold at most a few hundred networks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 paired observations, got {0}")]
    TooShort(usize),
    #[error("correlation undefined: a vector is fully tied")]
    UndefinedCorrelation,
}

fn check_lengths(s: &[f64], a: &[f64]) -> Result<(), StatsError> {
    if s.len() != a.len() {
        return Err(StatsError::LengthMismatch {
            left: s.len(),
            right: a.len(),
        });
    }
    if s.len() < 2 {
        return Err(StatsError::TooShort(s.len()));
    }
    Ok(())
}

/// Kendall tau-b between two equally long vectors.
pub fn kendall_tau(s: &[f64], a: &[f64]) -> Result<f64, StatsError> {
    check_lengths(s, a)?;
    let n = s.len();
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut ties_s_only, mut ties_a_only) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let ds = s[i] - s[j];
            let da = a[i] - a[j];
            if ds == 0.0 && da == 0.0 {
                // tied in both: contributes to neither correction term
            } else if ds == 0.0 {
                ties_s_only += 1;
            } else if da == 0.0 {
                ties_a_only += 1;
            } else if ds * da > 0.0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let p = concordant as f64;
    let q = discordant as f64;
    let t = ties_s_only as f64;
    let u = ties_a_only as f64;
    let denom = ((p + q + t) * (p + q + u)).sqrt();
    if denom == 0.0 {
        return Err(StatsError::UndefinedCorrelation);
    }
    Ok(((p - q) / denom).clamp(-1.0, 1.0))
}

/// Spearman rho: Pearson correlation of mid-ranks (ties get average ranks).
pub fn spearman_rho(s: &[f64], a: &[f64]) -> Result<f64, StatsError> {
    check_lengths(s, a)?;
    let rs = midranks(s);
    let ra = midranks(a);
    pearson(&rs, &ra)
}

/// Mid-ranks (1-based); tied values share the average of their rank span.
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end, averaged over the tie group
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Undefined correlations (fully tied proxies) count as zero when scoring
/// individuals, so degenerate solutions earn minimal fitness instead of
/// aborting a run.
pub fn tau_or_zero(s: &[f64], a: &[f64]) -> f64 {
    match kendall_tau(s, a) {
        Ok(t) => t,
        Err(StatsError::UndefinedCorrelation) => 0.0,
        Err(_) => 0.0,
    }
}

/// Same degenerate-input policy for Spearman in validation reports.
pub fn rho_or_zero(s: &[f64], a: &[f64]) -> f64 {
    match spearman_rho(s, a) {
        Ok(r) => r,
        Err(_) => 0.0,
    }
}

/// Mean and standard deviation of |tau| and |rho| over repeated sample sets
/// for one (search space, dataset) combination.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub proxy: String,
    pub search_space: String,
    pub dataset: String,
    pub sampler: String,
    pub mean_abs_tau: f64,
    pub std_tau: f64,
    pub mean_abs_rho: f64,
    pub std_rho: f64,
}

/// Validation report across combos; one row per (search space, dataset).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationReport {
    pub const CSV_HEADER: &'static str =
        "proxy,search_space,dataset,sampler,mean_abs_tau,std_tau,mean_abs_rho,std_rho";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.6},{:.6},{:.6}\n",
                r.proxy,
                r.search_space,
                r.dataset,
                r.sampler,
                r.mean_abs_tau,
                r.std_tau,
                r.mean_abs_rho,
                r.std_rho
            ));
        }
        out
    }
}

/// Mean and population standard deviation (zero for a single observation).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
