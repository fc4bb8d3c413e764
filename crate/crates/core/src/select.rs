//! Design selection on a Pareto front: constraint filtering, the
//! cut-off-frequency criterion, the final choice, and dominance comparison
//! between the fronts of two controller families.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::freqresp::{AdmittanceController, EquivalentImpedance, FrequencyGrid, PlantModel};
use crate::metrics::cutoff_frequency;
use crate::pareto::{scalarize, ParetoFront, ParetoPoint};

/// Environment stiffness (N/m) at which the cut-off frequency is evaluated
/// by default: the lower stiffness bound of the contact scenarios.
pub const DEFAULT_K_E_EVAL: f64 = 610.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionConstraints {
    #[cfg_attr(feature = "serde", serde(rename = "C_max"))]
    pub c_max: Option<f64>,
    pub rho_min: Option<f64>,
    pub omega_c_min_hz: Option<f64>,
    /// N/m
    pub k_e_eval: f64,
}

impl Default for SelectionConstraints {
    fn default() -> Self {
        Self {
            c_max: None,
            rho_min: Some(0.55),
            omega_c_min_hz: Some(2.3),
            k_e_eval: DEFAULT_K_E_EVAL,
        }
    }
}

impl SelectionConstraints {
    pub fn unconstrained() -> Self {
        Self { c_max: None, rho_min: None, omega_c_min_hz: None, k_e_eval: DEFAULT_K_E_EVAL }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: Option<f64>| v.is_none_or(f64::is_finite);
        if !(finite(self.c_max) && finite(self.rho_min) && finite(self.omega_c_min_hz)) {
            return Err(Error::Construction("constraint bounds must be finite"));
        }
        if !(self.k_e_eval > 0.0 && self.k_e_eval.is_finite()) {
            return Err(Error::Construction("k_e_eval must be positive"));
        }
        Ok(())
    }
}

/// What is needed to evaluate cut-off frequencies of front points.
#[derive(Debug, Clone, Copy)]
pub struct CutoffContext<'a> {
    pub plant: &'a PlantModel,
    pub grid: &'a FrequencyGrid,
}

impl CutoffContext<'_> {
    pub fn cutoff_hz(&self, point: &ParetoPoint, k_e: f64) -> Result<f64> {
        let ctrl = AdmittanceController::new(point.alpha, point.m_f, point.b_f)?;
        let env = EquivalentImpedance::spring(k_e)?;
        Ok(cutoff_frequency(self.plant, &ctrl, &env, self.grid)?.hz)
    }
}

/// Number of input points violating each bound (a point may count under
/// several), and the number removed overall.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EliminatedCounts {
    #[cfg_attr(feature = "serde", serde(rename = "C_max"))]
    pub c_max: usize,
    pub rho_min: usize,
    pub omega_c_min: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedFront {
    pub front: ParetoFront,
    pub eliminated: EliminatedCounts,
}

/// Keep points with `C <= C_max`, `rho >= rho_min` and `omega_c >= omega_c_min`
/// (each only when set).
///
/// With a [`CutoffContext`] every point lacking a cut-off frequency is
/// annotated first; without one, points must already carry it whenever the
/// cut-off bound is set. An empty result is not an error.
pub fn apply_constraints(
    front: &ParetoFront,
    cons: &SelectionConstraints,
    ctx: Option<&CutoffContext<'_>>,
) -> Result<ConstrainedFront> {
    cons.validate()?;
    let mut eliminated = EliminatedCounts::default();
    let mut kept = Vec::with_capacity(front.points.len());
    for p in &front.points {
        let mut p = *p;
        if p.omega_c_hz.is_none() {
            if let Some(ctx) = ctx {
                p.omega_c_hz = Some(ctx.cutoff_hz(&p, cons.k_e_eval)?);
            }
        }
        let over_c = cons.c_max.is_some_and(|m| p.c > m);
        let under_rho = cons.rho_min.is_some_and(|m| p.rho < m);
        let slow = match cons.omega_c_min_hz {
            Some(m) => {
                let wc = p
                    .omega_c_hz
                    .ok_or(Error::Inconsistent("cut-off bound set but point has no cut-off frequency"))?;
                wc < m
            }
            None => false,
        };
        eliminated.c_max += over_c as usize;
        eliminated.rho_min += under_rho as usize;
        eliminated.omega_c_min += slow as usize;
        if over_c || under_rho || slow {
            eliminated.total += 1;
        } else {
            kept.push(p);
        }
    }
    Ok(ConstrainedFront {
        front: ParetoFront { alpha: front.alpha, points: kept },
        eliminated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SelectionPolicy {
    /// Most transparent feasible point.
    #[cfg_attr(feature = "serde", serde(rename = "min_C"))]
    MinC,
    MaxRho,
    /// Argmin of the scalarized objective at the given weight.
    ByWeight(f64),
}

/// Pick one design. Ties go to the lowest `m_F`, then the lowest `b_F`.
pub fn choose_design(points: &[ParetoPoint], policy: SelectionPolicy) -> Result<ParetoPoint> {
    let score = |p: &ParetoPoint| -> Result<f64> {
        Ok(match policy {
            SelectionPolicy::MinC => p.c,
            SelectionPolicy::MaxRho => -p.rho,
            SelectionPolicy::ByWeight(w) => scalarize(p.c_n, p.rho_n, w)?,
        })
    };
    let mut best: Option<(f64, ParetoPoint)> = None;
    for p in points {
        let s = score(p)?;
        let better = match &best {
            None => true,
            Some((bs, bp)) => s < *bs || (s == *bs && (p.m_f, p.b_f) < (bp.m_f, bp.b_f)),
        };
        if better {
            best = Some((s, *p));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::EmptyFront)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DominanceVerdict {
    ChallengerDominates,
    ReferenceDominates,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchedSample {
    pub rho: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_ref"))]
    pub c_reference: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_challenger"))]
    pub c_challenger: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominanceReport {
    pub reference_alpha: f64,
    pub challenger_alpha: f64,
    pub verdict: DominanceVerdict,
    pub matched_samples: Vec<MatchedSample>,
}

fn sorted_by_rho(front: &ParetoFront) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = front.points.iter().map(|p| (p.rho, p.c)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

/// `C` of the point with the largest `rho' <= rho`.
fn stepwise_c(curve: &[(f64, f64)], rho: f64) -> Option<f64> {
    let n = curve.partition_point(|p| p.0 <= rho);
    (n > 0).then(|| curve[n - 1].1)
}

/// Compare two fronts at the given `rho` samples (those outside the common
/// `rho` range are dropped) using stepwise interpolation of `C`.
pub fn compare_fronts(
    reference: &ParetoFront,
    challenger: &ParetoFront,
    rho_samples: &[f64],
) -> Result<DominanceReport> {
    if reference.is_empty() || challenger.is_empty() {
        return Err(Error::EmptyFront);
    }
    let a = sorted_by_rho(reference);
    let b = sorted_by_rho(challenger);
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    let mut matched_samples = Vec::new();
    for &rho in rho_samples {
        if rho < lo || rho > hi {
            continue;
        }
        if let (Some(c_reference), Some(c_challenger)) = (stepwise_c(&a, rho), stepwise_c(&b, rho)) {
            matched_samples.push(MatchedSample { rho, c_reference, c_challenger });
        }
    }
    let all = |f: &dyn Fn(&MatchedSample) -> bool| matched_samples.iter().all(f);
    let any = |f: &dyn Fn(&MatchedSample) -> bool| matched_samples.iter().any(f);
    let verdict = if matched_samples.is_empty() {
        DominanceVerdict::Incomparable
    } else if all(&|s| s.c_challenger <= s.c_reference) && any(&|s| s.c_challenger < s.c_reference) {
        DominanceVerdict::ChallengerDominates
    } else if all(&|s| s.c_reference <= s.c_challenger) && any(&|s| s.c_reference < s.c_challenger) {
        DominanceVerdict::ReferenceDominates
    } else {
        DominanceVerdict::Incomparable
    };
    Ok(DominanceReport {
        reference_alpha: reference.alpha,
        challenger_alpha: challenger.alpha,
        verdict,
        matched_samples,
    })
}
