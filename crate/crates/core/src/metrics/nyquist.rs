//! Numerical Nyquist test for the coupled loop `L = G Y H Z_eq`.
//!
//! The closed Nyquist contour is the imaginary axis indented around the
//! origin by a right half-circle of radius `omega_L` and closed at infinity
//! by a right half-circle of radius `omega_U`. Because every block has real
//! coefficients, only the upper half of the contour is walked:
//!
//! ```text
//!   omega_L (real)  --small arc-->  j omega_L  --axis-->  j omega_U  --large arc-->  omega_U (real)
//! ```
//!
//! Both end points are real, so the full contour accumulates exactly twice
//! the phase of `1 + L` along this path. With open-loop stable blocks the
//! number of closed-loop right half-plane poles is `-phase / pi`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::freqresp::{
    eval_fractional_power, pow_principal, AdmittanceController, EquivalentImpedance,
    FrequencyGrid, PlantModel,
};

/// Samples on each indentation arc before adaptive refinement.
pub const ARC_POINTS: usize = 32;
/// Maximum bisection depth when a phase step exceeds pi/2.
pub const MAX_REFINE_DEPTH: u32 = 24;
const MAX_PHASE_STEP: f64 = FRAC_PI_2;
const CLOSURE_TOLERANCE: f64 = 1e-6;

/// Outcome of the Nyquist test.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Net clockwise encirclements of the origin by `1 + L`, i.e. the number
    /// of closed-loop poles in the right half-plane.
    pub winding_number: i32,
    /// `min |1 + L(j omega)|` over the axis samples.
    pub min_distance_to_critical: f64,
}

/// Any loop transfer function that can be evaluated on and off the axis.
pub trait LoopFunction {
    /// `L(j omega)`.
    fn at_frequency(&self, omega: f64) -> Result<Complex64>;
    /// `L(s)` for `Re s >= 0`.
    fn at(&self, s: Complex64) -> Result<Complex64>;
}

impl<F> LoopFunction for F
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn at_frequency(&self, omega: f64) -> Result<Complex64> {
        self(Complex64::new(0.0, omega))
    }

    fn at(&self, s: Complex64) -> Result<Complex64> {
        self(s)
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    s: Complex64,
    l: Complex64,
}

fn is_axis(s: Complex64) -> bool {
    s.re == 0.0
}

fn midpoint(a: Complex64, b: Complex64) -> Complex64 {
    if is_axis(a) && is_axis(b) {
        Complex64::new(0.0, (a.im * b.im).sqrt())
    } else {
        let r = a.norm();
        let theta = 0.5 * (a.im.atan2(a.re) + b.im.atan2(b.re));
        Complex64::from_polar(r, theta)
    }
}

fn phase_step(
    a: Sample,
    b: Sample,
    eval: &dyn Fn(Complex64) -> Result<Complex64>,
    depth: u32,
) -> Result<f64> {
    let fa = a.l + 1.0;
    let fb = b.l + 1.0;
    let turn = fb * fa.conj();
    if turn.re == 0.0 && turn.im == 0.0 {
        // 1 + L touches the origin: closed-loop pole on the contour
        return Err(Error::OpenContour { residual: 0.5 });
    }
    let step = turn.im.atan2(turn.re);
    if step.abs() <= MAX_PHASE_STEP {
        return Ok(step);
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::GridTooCoarse { omega: a.s.norm() });
    }
    let s = midpoint(a.s, b.s);
    let m = Sample { s, l: eval(s)? };
    Ok(phase_step(a, m, eval, depth + 1)? + phase_step(m, b, eval, depth + 1)?)
}

/// Walk the half contour; returns (accumulated phase, min axis distance).
fn walk<I>(samples: I, eval: &dyn Fn(Complex64) -> Result<Complex64>) -> Result<StabilityVerdict>
where
    I: Iterator<Item = Result<Sample>>,
{
    let mut phase = 0.0;
    let mut min_distance = f64::INFINITY;
    let mut prev: Option<Sample> = None;
    for sample in samples {
        let sample = sample?;
        if is_axis(sample.s) {
            min_distance = min_distance.min((sample.l + 1.0).norm());
        }
        if let Some(p) = prev {
            phase += phase_step(p, sample, eval, 0)?;
        }
        prev = Some(sample);
    }
    let turns = -phase / PI;
    let winding = turns.round();
    if (turns - winding).abs() > CLOSURE_TOLERANCE {
        return Err(Error::OpenContour { residual: turns - winding });
    }
    let winding_number = winding as i32;
    Ok(StabilityVerdict {
        stable: winding_number == 0,
        winding_number,
        min_distance_to_critical: min_distance,
    })
}

/// Points on the upper half contour: small arc, axis grid, large arc.
fn contour_points(grid: &FrequencyGrid) -> impl Iterator<Item = Complex64> + '_ {
    let eps = grid.omega_l();
    let big = grid.omega_u();
    let small_arc = (0..ARC_POINTS)
        .map(move |k| Complex64::from_polar(eps, FRAC_PI_2 * k as f64 / ARC_POINTS as f64));
    let axis = grid.points().iter().map(|&w| Complex64::new(0.0, w));
    let large_arc = (1..=ARC_POINTS).map(move |k| {
        let theta = FRAC_PI_2 * (ARC_POINTS - k) as f64 / ARC_POINTS as f64;
        if k == ARC_POINTS {
            Complex64::new(big, 0.0)
        } else {
            Complex64::from_polar(big, theta)
        }
    });
    small_arc.chain(axis).chain(large_arc)
}

/// Nyquist verdict for an arbitrary loop function.
pub fn nyquist_verdict(loop_fn: &dyn LoopFunction, grid: &FrequencyGrid) -> Result<StabilityVerdict> {
    let eval = |s: Complex64| {
        if is_axis(s) {
            loop_fn.at_frequency(s.im)
        } else {
            loop_fn.at(s)
        }
    };
    let samples = contour_points(grid).map(|s| Ok(Sample { s, l: eval(s)? }));
    walk(samples, &eval)
}

#[derive(Debug, Clone, Copy)]
struct ContourPoint {
    s: Complex64,
    gh: Complex64,
    s_alpha: Complex64,
}

/// Nyquist contour of a fixed plant and integration order, with the plant
/// and `s^alpha` precomputed so that many controllers and impedances can be
/// tested cheaply. Results are identical to [`is_stable`].
#[derive(Debug, Clone)]
pub struct StabilityAnalyzer<'a> {
    plant: &'a PlantModel,
    alpha: f64,
    points: Vec<ContourPoint>,
}

impl<'a> StabilityAnalyzer<'a> {
    pub fn new(plant: &'a PlantModel, alpha: f64, grid: &FrequencyGrid) -> Result<Self> {
        let points = contour_points(grid)
            .map(|s| {
                if is_axis(s) {
                    Ok(ContourPoint {
                        s,
                        gh: plant.gh(s.im)?,
                        s_alpha: eval_fractional_power(alpha, s.im)?,
                    })
                } else {
                    Ok(ContourPoint {
                        s,
                        gh: plant.gh_at(s)?,
                        s_alpha: pow_principal(s, alpha),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { plant, alpha, points })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn verdict(&self, ctrl: &AdmittanceController, zeq: &EquivalentImpedance) -> Result<StabilityVerdict> {
        if ctrl.alpha != self.alpha {
            return Err(Error::Inconsistent("controller order differs from analyzer order"));
        }
        let eval = |s: Complex64| -> Result<Complex64> {
            if is_axis(s) {
                crate::metrics::loop_response(self.plant, ctrl, zeq, s.im)
            } else {
                Ok(self.plant.gh_at(s)? * ctrl.eval_at(s)? * zeq.eval_at(s))
            }
        };
        let samples = self.points.iter().map(|p| {
            let at = p.s.norm();
            let y = ctrl.response_from_power(p.s_alpha, at)?;
            let z = if is_axis(p.s) { zeq.response(p.s.im) } else { zeq.eval_at(p.s) };
            Ok(Sample { s: p.s, l: p.gh * y * z })
        });
        walk(samples, &eval)
    }
}

/// Nyquist stability of the coupled loop for one controller and impedance.
///
/// The grid should span at least 1e-3 to 1e4 Hz with a few thousand points;
/// sharp phase turns are refined automatically.
pub fn is_stable(
    plant: &PlantModel,
    ctrl: &AdmittanceController,
    zeq: &EquivalentImpedance,
    nyquist_grid: &FrequencyGrid,
) -> Result<StabilityVerdict> {
    StabilityAnalyzer::new(plant, ctrl.alpha, nyquist_grid)?.verdict(ctrl, zeq)
}
