use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use dynred_core::amortization::CreditLedger;
use dynred_core::dyngraph::OpCounters;

#[derive(Debug, Clone, Serialize)]
pub struct InstanceDigest {
    pub problem: &'static str,
    /// SHA-256 of the canonical serialization.
    pub sha256: String,
    pub params: Value,
}

impl InstanceDigest {
    pub fn new(problem: &'static str, canonical: &str, params: Value) -> Self {
        let hash = Sha256::digest(canonical.as_bytes());
        let sha256 = hash.iter().map(|b| format!("{b:02x}")).collect();
        Self { problem, sha256, params }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Answers {
    pub reduction: Value,
    pub oracle: Value,
}

/// Self-contained record of one run. Everything except `wall_time_ms` is
/// deterministic given the command line and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub seed: u64,
    pub mode: String,
    pub instance: Option<InstanceDigest>,
    pub answers: Answers,
    pub agreement: bool,
    pub counters: OpCounters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub credit_ledger: Option<CreditLedger>,
    pub details: Value,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let c = &self.counters;
        format!(
            "mode,agreement,insertions,node_insertions,queries,elementary_steps,wall_time_ms\n{},{},{},{},{},{},{:.3}\n",
            self.mode, self.agreement, c.insertions, c.node_insertions, c.queries, c.elementary_steps, self.wall_time_ms
        )
    }
}
