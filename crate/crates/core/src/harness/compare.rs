use serde::{Deserialize, Serialize};

use super::experiment::{PnlStats, RunSummary};
use crate::{Error, Result};

/// Paired comparison of two runs over the same evaluation paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub agent_a: String,
    pub agent_b: String,
    pub n_paths: usize,
    /// `pnl_a - pnl_b` per path.
    pub differences: Vec<f64>,
    pub mean_difference: f64,
    /// `std(pnl_a) / std(pnl_b)`; 1 when both are zero.
    pub std_ratio: f64,
    pub mean_sq_a: f64,
    pub mean_sq_b: f64,
    /// Paths where `a` ended closer to zero than `b`.
    pub a_closer: usize,
    /// Two-sided exact sign test on the non-zero differences.
    pub sign_test_p_value: f64,
}

pub fn compare_runs(a: &RunSummary, b: &RunSummary) -> Result<Comparison> {
    let (ca, cb) = (&a.config, &b.config);
    if ca.eval_seed != cb.eval_seed || ca.eval_paths != cb.eval_paths {
        return Err(Error::MismatchedEval(format!(
            "eval seed/paths {}/{} vs {}/{}",
            ca.eval_seed, ca.eval_paths, cb.eval_seed, cb.eval_paths
        )));
    }
    if ca.env != cb.env {
        return Err(Error::MismatchedEval("environments differ".into()));
    }
    if a.agent_pnl.len() != b.agent_pnl.len() {
        return Err(Error::MismatchedEval(format!(
            "{} vs {} evaluated paths",
            a.agent_pnl.len(),
            b.agent_pnl.len()
        )));
    }
    let differences: Vec<f64> = a.agent_pnl.iter().zip(&b.agent_pnl).map(|(x, y)| x - y).collect();
    let (sa, sb) = (PnlStats::of(&a.agent_pnl)?, PnlStats::of(&b.agent_pnl)?);
    let std_ratio = if sa.std == 0.0 && sb.std == 0.0 {
        1.0
    } else {
        sa.std / sb.std
    };
    let positive = differences.iter().filter(|d| **d > 0.0).count();
    let nonzero = differences.iter().filter(|d| **d != 0.0).count();
    Ok(Comparison {
        agent_a: ca.agent.to_string(),
        agent_b: cb.agent.to_string(),
        n_paths: differences.len(),
        mean_difference: differences.iter().sum::<f64>() / differences.len() as f64,
        differences,
        std_ratio,
        mean_sq_a: sa.mean_sq,
        mean_sq_b: sb.mean_sq,
        a_closer: a
            .agent_pnl
            .iter()
            .zip(&b.agent_pnl)
            .filter(|(x, y)| x.abs() < y.abs())
            .count(),
        sign_test_p_value: sign_test(positive, nonzero),
    })
}

/// Exact two-sided binomial test of `successes` out of `n` against p = 1/2.
pub fn sign_test(successes: usize, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let tail = successes.min(n - successes);
    // log P(X = i) built up from P(X = 0) = 2^-n.
    let mut log_pmf = -(n as f64) * std::f64::consts::LN_2;
    let mut terms = Vec::with_capacity(tail + 1);
    for i in 0..=tail {
        terms.push(log_pmf);
        log_pmf += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_tail = max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
    (2.0 * log_tail.exp()).min(1.0)
}
