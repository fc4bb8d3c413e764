//! Transparency cost, vector margin and the stability machinery built on
//! them: worst-case impedance corners, stability boundaries and the
//! displayed-compliance cut-off frequency.

mod cutoff;
mod nyquist;

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::freqresp::{
    eval_fractional_power, AdmittanceController, EquivalentImpedance, FrequencyGrid, PlantModel,
};

pub use cutoff::{cutoff_frequency, cutoff_from_response, displayed_compliance, CutoffFrequency, CUTOFF_TOLERANCE_HZ};
pub use nyquist::{is_stable, nyquist_verdict, LoopFunction, StabilityAnalyzer, StabilityVerdict};

/// Butterworth-shaped frequency weighting `W(w) = 1/sqrt(1 + (w/cutoff)^(2n))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingFunction {
    pub order: u32,
    /// rad/s
    pub cutoff: f64,
}

impl WeightingFunction {
    pub fn new(order: u32, cutoff: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::Construction("weighting order must be at least 1"));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::Construction("weighting cutoff must be positive"));
        }
        Ok(Self { order, cutoff })
    }

    /// Constant weight of one, for tests and unweighted sums.
    pub fn unity() -> Self {
        Self { order: 1, cutoff: f64::INFINITY }
    }

    pub fn weight(&self, omega: f64) -> f64 {
        let ratio = (omega / self.cutoff).powi(2 * self.order as i32);
        (1.0 / (1.0 + ratio)).sqrt()
    }
}

/// Ranges of the coupled human/environment impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImpedanceBounds {
    /// kg
    pub m_range: [f64; 2],
    /// N s/m
    pub b_range: [f64; 2],
    /// N/m
    pub k_range: [f64; 2],
}

impl ImpedanceBounds {
    pub fn new(m_range: [f64; 2], b_range: [f64; 2], k_range: [f64; 2]) -> Result<Self> {
        for r in [m_range, b_range, k_range] {
            if !(r[0] >= 0.0 && r[1] >= r[0] && r[1].is_finite()) {
                return Err(Error::Construction("impedance ranges must satisfy 0 <= lo <= hi < inf"));
            }
        }
        Ok(Self { m_range, b_range, k_range })
    }

    /// The four `(m_eq, b_eq)` extreme combinations at a fixed stiffness,
    /// ordered `(lo,lo), (hi,lo), (lo,hi), (hi,hi)`.
    pub fn corners(&self, k_eq: f64) -> Result<[EquivalentImpedance; 4]> {
        let [m_lo, m_hi] = self.m_range;
        let [b_lo, b_hi] = self.b_range;
        Ok([
            EquivalentImpedance::new(m_lo, b_lo, k_eq)?,
            EquivalentImpedance::new(m_hi, b_lo, k_eq)?,
            EquivalentImpedance::new(m_lo, b_hi, k_eq)?,
            EquivalentImpedance::new(m_hi, b_hi, k_eq)?,
        ])
    }
}

/// Interaction scenario presets: free motion with a human (S1), contact
/// with a fixed-stiffness environment (S2) and with a switching-stiffness
/// environment (S3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scenario {
    S1,
    S2,
    S3,
}

impl Scenario {
    pub fn bounds(self) -> ImpedanceBounds {
        let k_range = match self {
            Scenario::S1 => [0.0, 600.0],
            Scenario::S2 => [610.0, 1210.0],
            Scenario::S3 => [610.0, 1610.0],
        };
        ImpedanceBounds { m_range: [0.0, 5.0], b_range: [0.0, 41.0], k_range }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "S1" => Some(Scenario::S1),
            "S2" => Some(Scenario::S2),
            "S3" => Some(Scenario::S3),
            _ => None,
        }
    }
}

#[inline]
fn parasitic_from_parts(gh: Complex64, y: Complex64) -> f64 {
    1.0 / (gh * y).norm()
}

/// Magnitude of the parasitic impedance `1/|G Y H|` at `omega`.
/// A vanishing `|G Y H|` yields `+inf`.
pub fn parasitic_magnitude(plant: &PlantModel, ctrl: &AdmittanceController, omega: f64) -> Result<f64> {
    Ok(parasitic_from_parts(plant.gh(omega)?, ctrl.response(omega)?))
}

/// Plant and `s^alpha` samples on a frequency grid for one integration order.
#[derive(Debug, Clone)]
pub struct GridSamples {
    alpha: f64,
    omega: Vec<f64>,
    gh: Vec<Complex64>,
    s_alpha: Vec<Complex64>,
}

impl GridSamples {
    pub fn new(plant: &PlantModel, alpha: f64, grid: &FrequencyGrid) -> Result<Self> {
        let omega = grid.points().to_vec();
        let gh = omega.iter().map(|&w| plant.gh(w)).collect::<Result<Vec<_>>>()?;
        let s_alpha = omega
            .iter()
            .map(|&w| eval_fractional_power(alpha, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alpha, omega, gh, s_alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn check(&self, ctrl: &AdmittanceController) -> Result<()> {
        if ctrl.alpha != self.alpha {
            return Err(Error::Inconsistent("controller order differs from sampled order"));
        }
        Ok(())
    }

    /// `L(j omega)` at every grid point.
    pub fn loop_values(&self, ctrl: &AdmittanceController, zeq: &EquivalentImpedance) -> Result<Vec<Complex64>> {
        self.check(ctrl)?;
        (0..self.omega.len())
            .map(|i| {
                let w = self.omega[i];
                let y = ctrl.response_from_power(self.s_alpha[i], w)?;
                Ok(self.gh[i] * y * zeq.response(w))
            })
            .collect()
    }
}

/// Weighted transparency cost over a fixed plant, order, grid and weighting.
#[derive(Debug, Clone)]
pub struct TransparencyKernel {
    samples: GridSamples,
    weights: Vec<f64>,
}

impl TransparencyKernel {
    pub fn new(plant: &PlantModel, alpha: f64, grid: &FrequencyGrid, weighting: &WeightingFunction) -> Result<Self> {
        let samples = GridSamples::new(plant, alpha, grid)?;
        let weights = grid.points().iter().map(|&w| weighting.weight(w)).collect();
        Ok(Self { samples, weights })
    }

    /// `sum W(w) log10 |dZ(jw)|` in ascending frequency; `+inf` if any
    /// parasitic magnitude is infinite.
    pub fn cost(&self, ctrl: &AdmittanceController) -> Result<f64> {
        self.samples.check(ctrl)?;
        let s = &self.samples;
        let mut total = 0.0;
        for i in 0..s.omega.len() {
            let y = ctrl.response_from_power(s.s_alpha[i], s.omega[i])?;
            let dz = parasitic_from_parts(s.gh[i], y);
            if dz.is_infinite() {
                return Ok(f64::INFINITY);
            }
            total += self.weights[i] * dz.log10();
        }
        Ok(total)
    }
}

/// Transparency cost `C = sum W(w) log10 |dZ(jw)|` (lower is more transparent).
pub fn transparency_cost(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    grid: &FrequencyGrid,
    weighting: &WeightingFunction,
) -> Result<f64> {
    TransparencyKernel::new(plant, ctrl.alpha, grid, weighting)?.cost(ctrl)
}

/// Loop transfer `L(j omega) = G Y H Z_eq`.
pub fn loop_response(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    zeq: &EquivalentImpedance,
    omega: f64,
) -> Result<Complex64> {
    Ok(plant.gh(omega)? * ctrl.response(omega)? * zeq.response(omega))
}

/// `1 / max |S(jw)|` with `S = 1/(1 + L)` over sampled loop values.
pub fn margin_from_loop(loop_values: &[Complex64]) -> f64 {
    let peak = loop_values
        .iter()
        .map(|l| 1.0 / (l + 1.0).norm())
        .fold(0.0, f64::max);
    1.0 / peak
}

/// Vector margin `rho = 1/max|S(jw)|` over `grid`, after checking stability
/// on `nyquist_grid`. Unstable loops are a contract violation.
pub fn vector_margin(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    zeq: &EquivalentImpedance,
    grid: &FrequencyGrid,
    nyquist_grid: &FrequencyGrid,
) -> Result<f64> {
    let verdict = is_stable(plant, ctrl, zeq, nyquist_grid)?;
    if !verdict.stable {
        return Err(Error::Unstable { winding: verdict.winding_number });
    }
    let samples = GridSamples::new(plant, ctrl.alpha, grid)?;
    Ok(margin_from_loop(&samples.loop_values(ctrl, zeq)?))
}

/// Worst-case vector margin over impedance corners for one plant and order.
#[derive(Debug, Clone)]
pub struct RobustnessKernel<'a> {
    stability: StabilityAnalyzer<'a>,
    samples: GridSamples,
    corners: [EquivalentImpedance; 4],
}

impl<'a> RobustnessKernel<'a> {
    pub fn new(
        plant: &'a PlantModel,
        alpha: f64,
        bounds: &ImpedanceBounds,
        k_eq: f64,
        grid: &FrequencyGrid,
        nyquist_grid: &FrequencyGrid,
    ) -> Result<Self> {
        Ok(Self {
            stability: StabilityAnalyzer::new(plant, alpha, nyquist_grid)?,
            samples: GridSamples::new(plant, alpha, grid)?,
            corners: bounds.corners(k_eq)?,
        })
    }

    pub fn corners(&self) -> &[EquivalentImpedance; 4] {
        &self.corners
    }

    /// `true` when every corner is stable.
    pub fn all_corners_stable(&self, ctrl: &AdmittanceController) -> Result<bool> {
        for zeq in &self.corners {
            if !self.stability.verdict(ctrl, zeq)?.stable {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Minimum corner margin, or `None` when any corner is unstable.
    pub fn margin(&self, ctrl: &AdmittanceController) -> Result<Option<f64>> {
        if !self.all_corners_stable(ctrl)? {
            return Ok(None);
        }
        let mut worst = f64::INFINITY;
        for zeq in &self.corners {
            worst = worst.min(margin_from_loop(&self.samples.loop_values(ctrl, zeq)?));
        }
        Ok(Some(worst))
    }
}

/// Minimum vector margin over the four `(m_eq, b_eq)` corners at `k_eq`;
/// `None` if any corner is unstable.
pub fn worst_case_margin(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    bounds: &ImpedanceBounds,
    k_eq: f64,
    grid: &FrequencyGrid,
    nyquist_grid: &FrequencyGrid,
) -> Result<Option<f64>> {
    RobustnessKernel::new(plant, ctrl.alpha, bounds, k_eq, grid, nyquist_grid)?.margin(ctrl)
}

/// Bisection tolerance of [`stability_boundary`], N s/m.
pub const BOUNDARY_TOLERANCE: f64 = 0.5;

/// Critical damping of the worst-case stability boundary for one `m_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryPoint {
    #[cfg_attr(feature = "serde", serde(rename = "m_F"))]
    pub m_f: f64,
    /// Smallest known stable `b_F` within [`BOUNDARY_TOLERANCE`] of an
    /// unstable one, or `None` when the range does not bracket a boundary.
    #[cfg_attr(feature = "serde", serde(rename = "b_F_critical"))]
    pub b_f_critical: Option<f64>,
}

/// Stability boundary over `m_values`: for each `m_F` the smallest `b_F` in
/// `b_range` for which every impedance corner at `k_eq` is stable.
pub fn stability_boundary(
    plant: &PlantModel,
    alpha: f64,
    k_eq: f64,
    m_values: &[f64],
    bounds: &ImpedanceBounds,
    b_range: [f64; 2],
    nyquist_grid: &FrequencyGrid,
) -> Result<Vec<BoundaryPoint>> {
    let analyzer = StabilityAnalyzer::new(plant, alpha, nyquist_grid)?;
    let corners = bounds.corners(k_eq)?;
    let stable = |m_f: f64, b_f: f64| -> Result<bool> {
        let ctrl = AdmittanceController::new(alpha, m_f, b_f)?;
        for zeq in &corners {
            if !analyzer.verdict(&ctrl, zeq)?.stable {
                return Ok(false);
            }
        }
        Ok(true)
    };
    m_values
        .iter()
        .map(|&m_f| {
            let [mut lo, mut hi] = b_range;
            if stable(m_f, lo)? || !stable(m_f, hi)? {
                return Ok(BoundaryPoint { m_f, b_f_critical: None });
            }
            while hi - lo > BOUNDARY_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if stable(m_f, mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(BoundaryPoint { m_f, b_f_critical: Some(hi) })
        })
        .collect()
}
