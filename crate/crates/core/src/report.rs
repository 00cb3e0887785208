//! Deterministic report structures: a structured JSON document plus a flat
//! comma-separated table keyed by level. All real numbers are rendered with
//! 15 significant digits; exact dyadics are rendered as `p/2^q`.

use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Format tag embedded in every report document.
pub const REPORT_FORMAT: &str = "certification-report/v1";

/// Renders a finite real with 15 significant digits (scientific notation).
pub fn fmt_real(x: f64) -> String {
    debug_assert!(x.is_finite(), "report reals must be finite");
    format!("{x:.14e}")
}

/// Tuning knobs for the full certification run. Caps beyond `n_max` are
/// clamped down to it, so a small `n_max` yields a small report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportOptions {
    /// Levels `2 ..= n_max` appear in the report.
    pub n_max: u32,
    /// Dense SVD cross-checks (norm oracle + operator-norm lower bounds)
    /// run for levels up to this cap.
    pub svd_cap: u32,
    /// Exact block factorization certificates run for levels up to this cap.
    pub factor_cap: u32,
    /// Randomized trace-cyclicity probes run for levels up to this cap.
    pub cyclicity_cap: u32,
    /// Random probes per block in the cyclicity check.
    pub cyclicity_trials: usize,
    /// Matrix dimension for the regrouping-inequality sampler.
    pub psi_dim: usize,
    /// Random families per sampled block.
    pub psi_samples: usize,
    /// Blocks sampled per level (first ones plus the largest block).
    pub psi_blocks_per_level: usize,
    /// Master seed; every randomized unit derives its own stream from it.
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            n_max: 12,
            svd_cap: 8,
            factor_cap: 10,
            cyclicity_cap: 8,
            cyclicity_trials: 20,
            psi_dim: 4,
            psi_samples: 40,
            psi_blocks_per_level: 8,
            seed: 0,
        }
    }
}

impl ReportOptions {
    /// The caps actually used for a given `n_max`.
    pub fn clamped(&self) -> ReportOptions {
        let mut o = self.clone();
        o.svd_cap = o.svd_cap.min(o.n_max);
        o.factor_cap = o.factor_cap.min(o.n_max);
        o.cyclicity_cap = o.cyclicity_cap.min(o.factor_cap);
        o
    }
}

/// One row of the per-level table. Real-valued fields are pre-rendered
/// strings (15 significant digits); absent checks are `None`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LevelRecord {
    pub n: u32,
    /// Exact trace of the level operator, pair dual form.
    pub trace_pair: String,
    /// Exact trace, quadruple dual form.
    pub trace_quad: String,
    pub trace_is_one: bool,
    pub beta_tilde_norm: String,
    /// "svd" when the oracle ran, "closed-form" beyond the SVD cap.
    pub beta_tilde_source: String,
    /// The quoted asymptotic value (half the computed one).
    pub beta_tilde_stated: String,
    pub op_norm_lower: Option<String>,
    pub cond_ii_bound: String,
    pub cond_iii_middle: Option<String>,
    pub cond_iii_final: Option<String>,
    /// Running sums of the middle / final difference bounds through this level.
    pub partial_sum_middle: Option<String>,
    pub partial_sum_final: Option<String>,
    /// Minimum block size of the level-(n+1) grouping used by the bounds.
    pub m_used: Option<u64>,
    /// Exact trace of the difference operator is zero.
    pub diff_trace_zero: Option<bool>,
    /// Pair-form minus previous quadruple-form equals the difference operator,
    /// entry for entry in exact arithmetic.
    pub telescoping_exact: Option<bool>,
    pub blocks_checked: Option<usize>,
    pub factorization_exact: Option<bool>,
    pub cyclicity_trials: Option<usize>,
    pub max_cyclicity_residual: Option<String>,
    pub psi_blocks_sampled: Option<usize>,
    pub psi_max_ratio: Option<String>,
    pub flags: Vec<String>,
}

/// The full certification document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerificationReport {
    pub format: String,
    pub tool_version: String,
    pub n_max: u32,
    pub strategy: String,
    pub seed: u64,
    /// SHA-256 of the canonical partition file the run certified against.
    pub partition_digest: String,
    pub options: ReportOptions,
    /// Highest level whose partition pair was re-verified in this run.
    pub partitions_certified_through: u32,
    pub levels: Vec<LevelRecord>,
    /// Exact reconstruction of the top-level operator from the base level
    /// plus all differences, checked as an action on the generating vectors.
    pub reconstruction_exact: bool,
    /// Observed-vs-stated mismatches; recorded, never silently resolved.
    pub discrepancy_notes: Vec<String>,
    /// Honest-scope notes: asymptotic claims reported, not certified.
    pub informational: Vec<String>,
    /// Names of failed certified checks, in deterministic order.
    pub failures: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    /// Canonical JSON rendering (pretty, trailing newline). Byte-identical
    /// for identical inputs.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Flat comma-separated table, one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "n,trace_pair,trace_quad,trace_is_one,beta_tilde_norm,beta_tilde_source,\
             beta_tilde_stated,op_norm_lower,cond_ii_bound,cond_iii_middle,cond_iii_final,\
             partial_sum_middle,partial_sum_final,m_used,diff_trace_zero,telescoping_exact,\
             blocks_checked,factorization_exact,cyclicity_trials,max_cyclicity_residual,\
             psi_blocks_sampled,psi_max_ratio,flags\n",
        );
        for l in &self.levels {
            let cells: Vec<String> = vec![
                l.n.to_string(),
                csv_escape(&l.trace_pair),
                csv_escape(&l.trace_quad),
                l.trace_is_one.to_string(),
                csv_escape(&l.beta_tilde_norm),
                csv_escape(&l.beta_tilde_source),
                csv_escape(&l.beta_tilde_stated),
                opt_str(&l.op_norm_lower),
                csv_escape(&l.cond_ii_bound),
                opt_str(&l.cond_iii_middle),
                opt_str(&l.cond_iii_final),
                opt_str(&l.partial_sum_middle),
                opt_str(&l.partial_sum_final),
                l.m_used.map(|m| m.to_string()).unwrap_or_default(),
                opt_bool(l.diff_trace_zero),
                opt_bool(l.telescoping_exact),
                l.blocks_checked.map(|b| b.to_string()).unwrap_or_default(),
                opt_bool(l.factorization_exact),
                l.cyclicity_trials.map(|t| t.to_string()).unwrap_or_default(),
                opt_str(&l.max_cyclicity_residual),
                l.psi_blocks_sampled.map(|b| b.to_string()).unwrap_or_default(),
                opt_str(&l.psi_max_ratio),
                csv_escape(&l.flags.join("|")),
            ];
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn opt_str(v: &Option<String>) -> String {
    v.as_deref().map(csv_escape).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
