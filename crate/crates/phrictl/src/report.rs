//! Selection report: constraints and policy applied to every front, plus the
//! cross-order recommendation.

use admittance_pareto::pareto::{ParetoFront, ParetoPoint};
use admittance_pareto::select::{
    apply_constraints, choose_design, CutoffContext, EliminatedCounts, SelectionConstraints, SelectionPolicy,
};
use serde::{Deserialize, Serialize};

use crate::config::ConstraintSettings;
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChosenDesign {
    pub alpha: f64,
    #[serde(rename = "m_F")]
    pub m_f: f64,
    #[serde(rename = "b_F")]
    pub b_f: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub rho: f64,
    pub omega_c_hz: Option<f64>,
    pub w: Option<f64>,
}

impl From<&ParetoPoint> for ChosenDesign {
    fn from(p: &ParetoPoint) -> Self {
        Self { alpha: p.alpha, m_f: p.m_f, b_f: p.b_f, c: p.c, rho: p.rho, omega_c_hz: p.omega_c_hz, w: p.weight }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaSelection {
    pub alpha: f64,
    pub front_size: usize,
    pub feasible: usize,
    pub chosen: Option<ChosenDesign>,
    pub eliminated_counts: EliminatedCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionReport {
    pub constraints: ConstraintSettings,
    pub policy: SelectionPolicy,
    /// Lowest-`C` design among the per-order choices.
    pub chosen: Option<ChosenDesign>,
    /// Summed over all orders.
    pub eliminated_counts: EliminatedCounts,
    pub per_alpha: Vec<AlphaSelection>,
}

/// Constrain each front, choose per order under `policy`, then recommend
/// the most transparent of the per-order choices.
pub fn build_report(
    fronts: &[ParetoFront],
    constraints: &ConstraintSettings,
    policy: SelectionPolicy,
    ctx: Option<&CutoffContext<'_>>,
) -> CliResult<SelectionReport> {
    let cons = SelectionConstraints::from(*constraints);
    let mut per_alpha = Vec::with_capacity(fronts.len());
    let mut choices = Vec::new();
    let mut total = EliminatedCounts::default();
    for front in fronts {
        let constrained = apply_constraints(front, &cons, ctx)?;
        let chosen = if constrained.front.is_empty() { None } else { Some(choose_design(&constrained.front.points, policy)?) };
        let e = constrained.eliminated;
        total.c_max += e.c_max;
        total.rho_min += e.rho_min;
        total.omega_c_min += e.omega_c_min;
        total.total += e.total;
        per_alpha.push(AlphaSelection {
            alpha: front.alpha,
            front_size: front.len(),
            feasible: constrained.front.len(),
            chosen: chosen.as_ref().map(ChosenDesign::from),
            eliminated_counts: e,
        });
        choices.extend(chosen);
    }
    let chosen = if choices.is_empty() { None } else { Some(ChosenDesign::from(&choose_design(&choices, SelectionPolicy::MinC)?)) };
    Ok(SelectionReport { constraints: *constraints, policy, chosen, eliminated_counts: total, per_alpha })
}
