//! Credit ledger for the keep-or-rollback rule and log-log exponent fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keep a phase iff its cost strictly exceeds `2 * k * n_hat^alpha`.
pub fn keep_rule(alpha: f64, ops: u64, nodes: u64, cost: u64) -> bool {
    cost as f64 > keep_threshold(alpha, ops, nodes)
}

pub fn keep_threshold(alpha: f64, ops: u64, nodes: u64) -> f64 {
    2.0 * ops as f64 * (nodes as f64).powf(alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    /// Nodes plus edges inserted during the phase (`k`).
    pub ops: u64,
    /// Node count sampled at phase start (`n_hat`).
    pub nodes: u64,
    /// Elementary steps spent on the phase's insertions.
    pub cost: u64,
    pub threshold: f64,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreditLedger {
    pub alpha: f64,
    pub phases: Vec<PhaseRecord>,
    pub kept_cost: u64,
    pub rolled_cost: u64,
}

impl CreditLedger {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, phases: Vec::new(), kept_cost: 0, rolled_cost: 0 }
    }

    pub fn record_phase(&mut self, ops: u64, nodes: u64, cost: u64) -> bool {
        let kept = keep_rule(self.alpha, ops, nodes, cost);
        if kept {
            self.kept_cost += cost;
        } else {
            self.rolled_cost += cost;
        }
        self.phases.push(PhaseRecord {
            ops,
            nodes,
            cost,
            threshold: keep_threshold(self.alpha, ops, nodes),
            kept,
        });
        kept
    }

    pub fn kept_phases(&self) -> usize {
        self.phases.iter().filter(|p| p.kept).count()
    }

    /// Recompute every flag and both totals from the stored records.
    pub fn is_consistent(&self) -> bool {
        let flags_ok = self
            .phases
            .iter()
            .all(|p| p.kept == keep_rule(self.alpha, p.ops, p.nodes, p.cost));
        let kept: u64 = self.phases.iter().filter(|p| p.kept).map(|p| p.cost).sum();
        let rolled: u64 = self.phases.iter().filter(|p| !p.kept).map(|p| p.cost).sum();
        let mut last = 0;
        let nodes_ok = self.phases.iter().filter(|p| p.kept).all(|p| {
            let ok = p.nodes >= last;
            last = p.nodes;
            ok
        });
        flags_ok && nodes_ok && kept == self.kept_cost && rolled == self.rolled_cost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub samples: Vec<(u64, u64)>,
    /// Least-squares slope of `ln(steps)` against `ln(size)`.
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_exponent(samples: &[(u64, u64)]) -> Result<ScalingFit> {
    if samples.iter().any(|&(x, y)| x == 0 || y == 0) {
        return Err(Error::DegenerateSamples("sizes and counts must be positive".into()));
    }
    let mut sizes: Vec<u64> = samples.iter().map(|s| s.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::DegenerateSamples("need at least two distinct sizes".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| ((x as f64).ln(), (y as f64).ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(ScalingFit { samples: samples.to_vec(), exponent, intercept, residual })
}
