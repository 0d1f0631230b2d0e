//! Probability ansatzes and the grid search over active-set size and
//! sparsity.
//!
//! The active set is always a prefix of the magnitude-sorted term list; those
//! terms are kept with probability 1. The remaining (inactive) terms are kept
//! with probability `c·h_j` (linear ansatz) or a constant `μ′` (uniform).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{complete_bound, AnsatzTag, BoundBreakdown, ProbabilityAssignment};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::moments::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    Linear,
    Uniform,
}

/// One grid point: `|A|` and `μ′ = (μ − |A|)/(L − |A|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub kind: AnsatzKind,
    pub active_count: usize,
    /// Ignored when `active_count == L`.
    pub mu_prime: f64,
}

fn require_sorted(spec: &HamiltonianSpec) -> Result<()> {
    if !spec.is_sorted_desc() {
        return Err(Error::InvalidArgument(
            "ansatz construction needs terms sorted by decreasing magnitude".into(),
        ));
    }
    Ok(())
}

/// Linear ansatz: `p_j = 1` on the first `active_count` terms and
/// `p_j = c h_j` on the rest, with `c = (μ − |A|) / Σ_{Ā} h_j`.
///
/// Fails with [`Error::Infeasible`] when some inactive `p_j >= 1`.
pub fn linear_ansatz_probs(
    spec_sorted: &HamiltonianSpec,
    active_count: usize,
    mu: f64,
) -> Result<ProbabilityAssignment> {
    require_sorted(spec_sorted)?;
    let l = spec_sorted.len();
    if active_count > l {
        return Err(Error::InvalidArgument(format!(
            "active_count {active_count} exceeds L = {l}"
        )));
    }
    if active_count == l {
        let mut p = ProbabilityAssignment::new(vec![1.0; l], l, AnsatzTag::Linear)?;
        p = p.with_budget(l as f64);
        return Ok(p);
    }
    if !(mu > active_count as f64 && mu <= l as f64) {
        return Err(Error::InvalidArgument(format!(
            "mu = {mu} must lie in ({active_count}, {l}]"
        )));
    }
    let h = spec_sorted.magnitudes();
    let inactive_mass = compensated_sum(&h[active_count..]);
    let c = (mu - active_count as f64) / inactive_mass;
    let mut p = vec![1.0; l];
    for j in active_count..l {
        let pj = c * h[j];
        if pj >= 1.0 {
            return Err(Error::Infeasible {
                index: j,
                value: pj,
            });
        }
        p[j] = pj;
    }
    Ok(ProbabilityAssignment::new(p, active_count, AnsatzTag::Linear)?.with_budget(mu))
}

/// Uniform ansatz: `p_j = 1` on the active prefix and `μ′` elsewhere.
pub fn uniform_ansatz_probs(
    spec_sorted: &HamiltonianSpec,
    active_count: usize,
    mu_prime: f64,
) -> Result<ProbabilityAssignment> {
    require_sorted(spec_sorted)?;
    let l = spec_sorted.len();
    if active_count > l {
        return Err(Error::InvalidArgument(format!(
            "active_count {active_count} exceeds L = {l}"
        )));
    }
    if !(mu_prime > 0.0 && mu_prime <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mu_prime = {mu_prime} must lie in (0, 1]"
        )));
    }
    let p: Vec<f64> = (0..l)
        .map(|j| if j < active_count { 1.0 } else { mu_prime })
        .collect();
    let budget = active_count as f64 + mu_prime * (l - active_count) as f64;
    Ok(ProbabilityAssignment::new(p, active_count, AnsatzTag::Uniform)?.with_budget(budget))
}

/// Outcome of checking the optimality conditions of the inactive-set
/// allocation problem `min Σ h_j²/p_j  s.t.  Σ p_j = μ̄, p_j <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub satisfied: bool,
    /// `max_j |p_j / (c h_j) - 1|` with `c = Σ_{Ā} p / Σ_{Ā} h`.
    pub proportionality_residual: f64,
    /// `|Σ_{Ā} p_j - μ̄| / μ̄`.
    pub budget_residual: f64,
    /// `max_j |√u p_j - h_j| / h_j` at the multiplier `√u = Σ_{Ā} h / μ̄`
    /// (scale `r s² = 1`).
    pub stationarity_residual: f64,
    pub primal_feasible: bool,
    pub diagnostics: Vec<String>,
}

/// Verifies that an assignment satisfies the KKT conditions that define the
/// linear ansatz, within `tol`.
pub fn kkt_verify(
    spec_sorted: &HamiltonianSpec,
    assignment: &ProbabilityAssignment,
    tol: f64,
) -> KktReport {
    let mut diagnostics = Vec::new();
    let h = spec_sorted.magnitudes();
    let p = assignment.p();
    let a = assignment.active_count();

    let mut primal_feasible = p.len() == h.len() && a <= p.len();
    if p.len() != h.len() {
        diagnostics.push(format!(
            "length mismatch: {} probabilities for {} terms",
            p.len(),
            h.len()
        ));
    }
    if !spec_sorted.is_sorted_desc() {
        diagnostics.push("terms are not sorted by decreasing magnitude".into());
        primal_feasible = false;
    }
    if !primal_feasible {
        return KktReport {
            satisfied: false,
            proportionality_residual: f64::INFINITY,
            budget_residual: f64::INFINITY,
            stationarity_residual: f64::INFINITY,
            primal_feasible,
            diagnostics,
        };
    }
    for (j, &pj) in p.iter().enumerate() {
        if !(pj > 0.0 && pj <= 1.0) {
            diagnostics.push(format!("p[{j}] = {pj} outside (0, 1]"));
            primal_feasible = false;
        } else if j < a && pj != 1.0 {
            diagnostics.push(format!("active p[{j}] = {pj} != 1"));
            primal_feasible = false;
        } else if j >= a && pj >= 1.0 {
            diagnostics.push(format!("inactive p[{j}] = {pj} violates regularity p < 1"));
            primal_feasible = false;
        }
    }

    if a == p.len() {
        return KktReport {
            satisfied: primal_feasible,
            proportionality_residual: 0.0,
            budget_residual: 0.0,
            stationarity_residual: 0.0,
            primal_feasible,
            diagnostics,
        };
    }

    let (hp, pp) = (&h[a..], &p[a..]);
    let inactive_h = compensated_sum(hp);
    let inactive_p = compensated_sum(pp);
    let c = inactive_p / inactive_h;
    let proportionality_residual = hp
        .iter()
        .zip(pp)
        .map(|(&hj, &pj)| (pj / (c * hj) - 1.0).abs())
        .fold(0.0, f64::max);

    let mu_bar = assignment.budget().map_or(inactive_p, |b| b - a as f64);
    let budget_residual = (inactive_p - mu_bar).abs() / mu_bar.abs().max(f64::MIN_POSITIVE);

    let sqrt_u = inactive_h / mu_bar;
    let stationarity_residual = hp
        .iter()
        .zip(pp)
        .map(|(&hj, &pj)| (sqrt_u * pj - hj).abs() / hj)
        .fold(0.0, f64::max);

    if proportionality_residual > tol {
        diagnostics.push(format!(
            "inactive probabilities not proportional to h (residual {proportionality_residual:e})"
        ));
    }
    if budget_residual > tol {
        diagnostics.push(format!(
            "budget Σ p = {inactive_p} differs from μ̄ = {mu_bar}"
        ));
    }
    if stationarity_residual > tol {
        diagnostics.push(format!("stationarity residual {stationarity_residual:e}"));
    }
    let satisfied = primal_feasible
        && proportionality_residual <= tol
        && budget_residual <= tol
        && stationarity_residual <= tol;
    KktReport {
        satisfied,
        proportionality_residual,
        budget_residual,
        stationarity_residual,
        primal_feasible,
        diagnostics,
    }
}

/// Grid of active fractions `|A|/L` and `μ′` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub active_fractions: Vec<f64>,
    pub mu_primes: Vec<f64>,
}

impl Default for GridSpec {
    /// `|A|/L ∈ {0, 0.1, …, 1}`, `μ′ ∈ {1e-5, 1e-4, 1e-3, 0.1, …, 1}`.
    fn default() -> Self {
        let tenths: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let mut mu_primes = vec![1e-5, 1e-4, 1e-3];
        mu_primes.extend(tenths.iter().skip(1));
        GridSpec {
            active_fractions: tenths,
            mu_primes,
        }
    }
}

impl GridSpec {
    /// Distinct `round(fraction · L)` values in ascending order.
    pub fn active_counts(&self, l: usize) -> Vec<usize> {
        let mut counts: Vec<usize> = self
            .active_fractions
            .iter()
            .map(|f| (f.clamp(0.0, 1.0) * l as f64).round() as usize)
            .collect();
        counts.sort_unstable();
        counts.dedup();
        counts
    }

    /// Grid points in evaluation order: ascending `|A|`, then `μ′` as listed.
    /// `|A| = L` contributes a single point.
    pub fn configs(&self, l: usize, kind: AnsatzKind) -> Vec<AnsatzConfig> {
        let mut mu_primes: Vec<f64> = self
            .mu_primes
            .iter()
            .copied()
            .filter(|m| *m > 0.0 && *m <= 1.0)
            .collect();
        mu_primes.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        mu_primes.dedup();
        let mut out = Vec::new();
        for a in self.active_counts(l) {
            if a == l {
                out.push(AnsatzConfig {
                    kind,
                    active_count: a,
                    mu_prime: 1.0,
                });
            } else {
                out.extend(mu_primes.iter().map(|&mu_prime| AnsatzConfig {
                    kind,
                    active_count: a,
                    mu_prime,
                }));
            }
        }
        out
    }
}

/// Builds the assignment for a grid point.
pub fn assignment_for(
    spec_sorted: &HamiltonianSpec,
    config: &AnsatzConfig,
) -> Result<ProbabilityAssignment> {
    let l = spec_sorted.len();
    match config.kind {
        AnsatzKind::Uniform => {
            uniform_ansatz_probs(spec_sorted, config.active_count, config.mu_prime)
        }
        AnsatzKind::Linear => {
            let a = config.active_count;
            let mu = if a == l {
                l as f64
            } else {
                a as f64 + config.mu_prime * (l - a) as f64
            };
            linear_ansatz_probs(spec_sorted, a, mu)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub config: AnsatzConfig,
    pub active_fraction: f64,
    pub feasible: bool,
    /// `None` for infeasible points.
    pub bound: Option<BoundBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub best_config: AnsatzConfig,
    pub best_assignment: ProbabilityAssignment,
    pub best_bound: BoundBreakdown,
    pub grid: Vec<GridRecord>,
}

impl OptimizationReport {
    pub fn best_active_fraction(&self) -> f64 {
        self.best_config.active_count as f64 / self.best_assignment.len() as f64
    }

    /// Grid records as CSV with header
    /// `active_fraction,mu_prime,feasible,eps1,eps2,eps31,eps32,total`.
    pub fn grid_csv(&self) -> String {
        let mut out =
            String::from("active_fraction,mu_prime,feasible,eps1,eps2,eps31,eps32,total\n");
        for r in &self.grid {
            let (e1, e2, e31, e32, tot) = match &r.bound {
                Some(b) => (
                    fmt_num(b.eps1),
                    fmt_num(b.eps2),
                    fmt_num(b.eps31),
                    fmt_num(b.eps32),
                    fmt_num(b.total),
                ),
                None => Default::default(),
            };
            out.push_str(&format!(
                "{},{},{},{e1},{e2},{e31},{e32},{tot}\n",
                fmt_num(r.active_fraction),
                fmt_num(r.config.mu_prime),
                r.feasible
            ));
        }
        out
    }
}

/// Shortest round-trip decimal, switching to exponent form for very large or
/// small magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Evaluates the complete bound at every point of the default grid and
/// returns the minimizer.
pub fn grid_optimize(
    spec_sorted: &HamiltonianSpec,
    t: f64,
    gates: f64,
    kind: AnsatzKind,
) -> Result<OptimizationReport> {
    grid_optimize_with(spec_sorted, t, gates, kind, &GridSpec::default())
}

/// [`grid_optimize`] over a custom grid.
///
/// Infeasible linear-ansatz points are recorded and skipped. Ties go to the
/// larger `|A|`, then the larger `μ′`. Points are evaluated in parallel and
/// merged in grid order.
pub fn grid_optimize_with(
    spec_sorted: &HamiltonianSpec,
    t: f64,
    gates: f64,
    kind: AnsatzKind,
    grid: &GridSpec,
) -> Result<OptimizationReport> {
    require_sorted(spec_sorted)?;
    let l = spec_sorted.len();
    if l < 3 {
        return Err(Error::TooFewTerms {
            required: 3,
            found: l,
        });
    }
    let configs = grid.configs(l, kind);
    let evaluated: Vec<Result<(GridRecord, Option<ProbabilityAssignment>)>> = configs
        .par_iter()
        .map(|config| {
            let active_fraction = config.active_count as f64 / l as f64;
            match assignment_for(spec_sorted, config) {
                Ok(assignment) => {
                    let bound = complete_bound(spec_sorted, &assignment, t, gates)?;
                    Ok((
                        GridRecord {
                            config: *config,
                            active_fraction,
                            feasible: true,
                            bound: Some(bound),
                        },
                        Some(assignment),
                    ))
                }
                Err(Error::Infeasible { .. }) => Ok((
                    GridRecord {
                        config: *config,
                        active_fraction,
                        feasible: false,
                        bound: None,
                    },
                    None,
                )),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut records = Vec::with_capacity(evaluated.len());
    let mut best: Option<(BoundBreakdown, AnsatzConfig, ProbabilityAssignment)> = None;
    for item in evaluated {
        let (record, assignment) = item?;
        if let (Some(bound), Some(assignment)) = (record.bound, assignment) {
            let better = match &best {
                None => true,
                Some((b, c, _)) => {
                    bound.total < b.total
                        || (bound.total == b.total
                            && (record.config.active_count, record.config.mu_prime)
                                > (c.active_count, c.mu_prime))
                }
            };
            if better {
                best = Some((bound, record.config, assignment));
            }
        }
        records.push(record);
    }
    let (best_bound, best_config, best_assignment) = best.ok_or(Error::NoFeasiblePoint)?;
    Ok(OptimizationReport {
        best_config,
        best_assignment,
        best_bound,
        grid: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{sort_terms_desc, synth_power_law, HamTerm};
    use crate::pauli::PauliString;

    fn spec(coeffs: &[f64]) -> HamiltonianSpec {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| HamTerm::new(c, PauliString::from_code(i as u64 + 1, 4)))
            .collect();
        HamiltonianSpec::new(4, terms, "").unwrap()
    }

    #[test]
    fn linear_worked_example() {
        let s = spec(&[0.5, 0.3, 0.2, 0.1]);
        let a = linear_ansatz_probs(&s, 1, 1.6).unwrap();
        let expected = [1.0, 0.3, 0.2, 0.1];
        for (x, y) in a.p().iter().zip(expected) {
            assert!((x - y).abs() <= 1e-15, "{x} vs {y}");
        }
        assert!(kkt_verify(&s, &a, 1e-10).satisfied);
    }

    #[test]
    fn linear_regularity_violation() {
        let s = spec(&[1.0, 0.9, 0.05, 0.05]);
        match linear_ansatz_probs(&s, 1, 3.0) {
            Err(Error::Infeasible { index, value }) => {
                assert_eq!(index, 1);
                assert!((value - 1.8).abs() < 1e-12);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn full_active_set_is_all_ones() {
        let s = spec(&[0.5, 0.3, 0.2]);
        assert_eq!(linear_ansatz_probs(&s, 3, 0.7).unwrap().p(), &[1.0; 3]);
    }

    #[test]
    fn uniform_examples() {
        let s = spec(&[0.5, 0.3, 0.2, 0.1]);
        let u = uniform_ansatz_probs(&s, 1, 0.5).unwrap();
        assert_eq!(u.p(), &[1.0, 0.5, 0.5, 0.5]);
        assert_eq!(u.mu(), 2.5);
        assert_eq!(uniform_ansatz_probs(&s, 0, 1.0).unwrap().p(), &[1.0; 4]);
        let s3 = spec(&[0.5, 0.3, 0.2]);
        assert!((uniform_ansatz_probs(&s3, 0, 1e-3).unwrap().mu() - 3e-3).abs() < 1e-18);
        assert!(!kkt_verify(&s, &u, 1e-9).satisfied);
    }

    #[test]
    fn perturbed_assignment_fails_kkt() {
        let s = spec(&[0.5, 0.3, 0.2, 0.1]);
        let a = linear_ansatz_probs(&s, 1, 1.6).unwrap();
        let mut p = a.p().to_vec();
        p[1] += 0.01;
        let perturbed = ProbabilityAssignment::new(p, 1, AnsatzTag::Linear)
            .unwrap()
            .with_budget(1.6);
        let report = kkt_verify(&s, &perturbed, 1e-10);
        assert!(!report.satisfied);
        assert!(report.budget_residual > 1e-3);
    }

    #[test]
    fn unsorted_input_rejected() {
        let s = spec(&[0.1, 0.5, 0.3]);
        assert!(linear_ansatz_probs(&s, 0, 1.0).is_err());
        assert!(grid_optimize(&s, 1.0, 100.0, AnsatzKind::Linear).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        assert_eq!(g.mu_primes.len(), 13);
        assert_eq!(g.active_counts(4), vec![0, 1, 2, 3, 4]);
        let configs = g.configs(4, AnsatzKind::Uniform);
        // 4 partial active sets × 13 μ′ values + one full point.
        assert_eq!(configs.len(), 4 * 13 + 1);
        assert_eq!(configs.iter().filter(|c| c.active_count == 4).count(), 1);
    }

    #[test]
    fn huge_budget_selects_full_active_set() {
        let s = sort_terms_desc(&synth_power_law(40, 2.0, 4, 3).unwrap());
        for kind in [AnsatzKind::Linear, AnsatzKind::Uniform] {
            let r = grid_optimize(&s, 1.0, 1e9 * 40.0 * 1e6, kind).unwrap();
            assert_eq!(r.best_config.active_count, 40, "{kind:?}");
        }
    }

    #[test]
    fn every_feasible_grid_point_passes_kkt() {
        let s = sort_terms_desc(&synth_power_law(30, 1.5, 4, 11).unwrap());
        let r = grid_optimize(&s, 2.0, 500.0, AnsatzKind::Linear).unwrap();
        assert!(r.grid.iter().any(|g| !g.feasible));
        for rec in r.grid.iter().filter(|g| g.feasible) {
            let a = assignment_for(&s, &rec.config).unwrap();
            assert!(kkt_verify(&s, &a, 1e-9).satisfied, "{:?}", rec.config);
        }
        let min = r
            .grid
            .iter()
            .filter_map(|g| g.bound.map(|b| b.total))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_bound.total, min);
        assert!((r.best_assignment.mu() / r.best_assignment.budget().unwrap() - 1.0).abs() < 1e-12);
    }
}
