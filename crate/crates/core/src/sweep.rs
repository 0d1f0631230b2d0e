//! Gate-budget sweeps comparing sparsified compilation with the baselines.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{fmt_num, grid_optimize_with, AnsatzKind, GridSpec};
use crate::bounds::{complete_bound, qdrift_bound, trotter1_bound, ProbabilityAssignment};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;

pub const SWEEP_CSV_HEADER: &str =
    "G,eps_sparsto_linear,eps_sparsto_uniform,eps_r1otrott,eps_qdrift,eps_trotter1,best_active_fraction,best_mu_prime";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "G")]
    pub gates: f64,
    pub eps_sparsto_linear: f64,
    pub eps_sparsto_uniform: f64,
    pub eps_r1otrott: f64,
    pub eps_qdrift: f64,
    pub eps_trotter1: f64,
    pub best_active_fraction: f64,
    pub best_mu_prime: f64,
}

/// `points` gate budgets from `min` to `max`, log- or linearly spaced.
/// Endpoints are reproduced exactly.
pub fn gate_grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::InvalidArgument("points must be at least 1".into()));
    }
    if !(min > 0.0 && min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gate range must be positive and finite, got [{min}, {max}]"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    if max <= min {
        return Err(Error::InvalidArgument(format!(
            "gates-max {max} must exceed gates-min {min}"
        )));
    }
    let last = (points - 1) as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| {
            if i == 0 {
                min
            } else if i == points - 1 {
                max
            } else if log {
                (min.ln() + (max.ln() - min.ln()) * i as f64 / last).exp()
            } else {
                min + (max - min) * i as f64 / last
            }
        })
        .collect();
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "gate grid is not strictly increasing".into(),
        ));
    }
    Ok(grid)
}

/// Gate budget actually used by deterministic Trotter: `rL` with `r = max(1, ⌊G/L⌋)`.
pub fn trotter1_gates(gates: f64, n_terms: usize) -> f64 {
    let l = n_terms as f64;
    (gates / l).floor().max(1.0) * l
}

/// One row per gate budget. The randomized-Trotter column is the complete
/// bound at `p = 1`.
pub fn sweep(
    spec_sorted: &HamiltonianSpec,
    t: f64,
    gates: &[f64],
    grid: &GridSpec,
) -> Result<Vec<SweepRow>> {
    if spec_sorted.len() < 3 {
        return Err(Error::TooFewTerms {
            required: 3,
            found: spec_sorted.len(),
        });
    }
    let ones = ProbabilityAssignment::all_ones(spec_sorted.len());
    gates
        .par_iter()
        .map(|&g| {
            let linear = grid_optimize_with(spec_sorted, t, g, AnsatzKind::Linear, grid)?;
            let uniform = grid_optimize_with(spec_sorted, t, g, AnsatzKind::Uniform, grid)?;
            Ok(SweepRow {
                gates: g,
                eps_sparsto_linear: linear.best_bound.total,
                eps_sparsto_uniform: uniform.best_bound.total,
                eps_r1otrott: complete_bound(spec_sorted, &ones, t, g)?.total,
                eps_qdrift: qdrift_bound(spec_sorted, t, g)?.total,
                eps_trotter1: trotter1_bound(spec_sorted, t, trotter1_gates(g, spec_sorted.len()))?
                    .total,
                best_active_fraction: linear.best_active_fraction(),
                best_mu_prime: linear.best_config.mu_prime,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.gates,
            r.eps_sparsto_linear,
            r.eps_sparsto_uniform,
            r.eps_r1otrott,
            r.eps_qdrift,
            r.eps_trotter1,
            r.best_active_fraction,
            r.best_mu_prime,
        ];
        out.push_str(&fields.map(fmt_num).join(","));
        out.push('\n');
    }
    out
}
