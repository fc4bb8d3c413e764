use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::freqresp::{AdmittanceController, EquivalentImpedance, FrequencyGrid, PlantModel};

/// Width of the final bisection bracket, Hz.
pub const CUTOFF_TOLERANCE_HZ: f64 = 1e-3;

/// Cut-off frequency of the displayed compliance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CutoffFrequency {
    pub hz: f64,
    /// The magnitude never fell below the threshold inside the grid; `hz`
    /// is then the upper grid frequency.
    pub saturated: bool,
}

/// Displayed compliance `T_disp(jw) = X/F_h = 1/(jw Z_disp(jw))` with
/// `Z_disp = 1/(G Y H) + Z_e`.
pub fn displayed_compliance(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    z_env: &EquivalentImpedance,
    omega: f64,
) -> Result<Complex64> {
    let gyh = plant.gh(omega)? * ctrl.response(omega)?;
    let jw = Complex64::new(0.0, omega);
    let den = jw / gyh + jw * z_env.response(omega);
    Ok(den.inv())
}

/// First frequency at which `|t(jw)|` drops to `1/sqrt(2)` of its value at
/// the lowest grid frequency, refined by bisection to
/// [`CUTOFF_TOLERANCE_HZ`].
pub fn cutoff_from_response<F>(t: F, grid: &FrequencyGrid) -> Result<CutoffFrequency>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let points = grid.points();
    let reference = t(points[0])?.norm();
    if !(reference > 0.0 && reference.is_finite()) {
        return Err(Error::Domain("reference magnitude must be positive and finite"));
    }
    let threshold = reference * FRAC_1_SQRT_2;
    let mut prev = points[0];
    for &w in &points[1..] {
        if t(w)?.norm() <= threshold {
            let (mut lo, mut hi) = (prev, w);
            while (hi - lo) / (2.0 * PI) > CUTOFF_TOLERANCE_HZ {
                let mid = 0.5 * (lo + hi);
                if t(mid)?.norm() <= threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(CutoffFrequency { hz: 0.5 * (lo + hi) / (2.0 * PI), saturated: false });
        }
        prev = w;
    }
    Ok(CutoffFrequency { hz: grid.omega_u() / (2.0 * PI), saturated: true })
}

/// Cut-off frequency (Hz) of the compliance displayed to the operator when
/// the robot couples to the environment `z_env`.
pub fn cutoff_frequency(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    z_env: &EquivalentImpedance,
    grid: &FrequencyGrid,
) -> Result<CutoffFrequency> {
    cutoff_from_response(|w| displayed_compliance(plant, ctrl, z_env, w), grid)
}
