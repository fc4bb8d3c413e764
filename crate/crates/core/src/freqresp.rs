//! Fractional-exponent transfer functions and the frequency responses of the
//! blocks in the admittance-control loop: robot `G`, force filter `H`,
//! controller `Y` and coupled human/environment impedance `Z_eq`.
//!
//! All evaluations use the principal branch `(jw)^b = w^b e^{j b pi/2}` and
//! are only defined for `w > 0`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Magnitudes below this are treated as a vanishing denominator.
pub const SINGULAR_MAGNITUDE: f64 = 1e-300;

/// Largest integer exponent that is evaluated by exact quadrant rotation.
const MAX_EXACT_POWER: f64 = 64.0;

fn integer_exponent(beta: f64) -> Option<i32> {
    if beta.fract() == 0.0 && beta.abs() <= MAX_EXACT_POWER {
        Some(beta as i32)
    } else {
        None
    }
}

/// `(cos(beta pi/2), sin(beta pi/2))`, exact for integer `beta`.
pub(crate) fn quarter_turn(beta: f64) -> (f64, f64) {
    match integer_exponent(beta) {
        Some(n) => match n.rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        },
        None => {
            let phase = beta * FRAC_PI_2;
            (phase.cos(), phase.sin())
        }
    }
}

/// Principal-branch `(j omega)^beta` for `omega > 0`.
pub fn eval_fractional_power(beta: f64, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain("frequency must be positive and finite"));
    }
    if !beta.is_finite() {
        return Err(Error::Domain("exponent must be finite"));
    }
    let magnitude = match integer_exponent(beta) {
        Some(n) => omega.powi(n),
        None => omega.powf(beta),
    };
    let (c, s) = quarter_turn(beta);
    Ok(Complex64::new(magnitude * c, magnitude * s))
}

/// Principal-branch `s^beta` for an arbitrary complex `s` with `arg s` in
/// `(-pi, pi]`. Used off the imaginary axis, on the Nyquist indentations.
pub fn pow_principal(s: Complex64, beta: f64) -> Complex64 {
    if let Some(n) = integer_exponent(beta) {
        return s.powi(n);
    }
    let r = s.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let theta = s.im.atan2(s.re);
    let magnitude = r.powf(beta);
    let phase = beta * theta;
    Complex64::new(magnitude * phase.cos(), magnitude * phase.sin())
}

/// One `c s^beta` monomial.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FractionalTerm {
    #[cfg_attr(feature = "serde", serde(rename = "c"))]
    pub coefficient: f64,
    #[cfg_attr(feature = "serde", serde(rename = "beta"))]
    pub exponent: f64,
}

impl FractionalTerm {
    pub fn new(coefficient: f64, exponent: f64) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::Construction("term coefficient must be finite"));
        }
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(Error::Construction("term exponent must be finite and non-negative"));
        }
        Ok(Self { coefficient, exponent })
    }
}

/// Ratio of sums of fractional monomials.
///
/// Term lists are kept sorted by exponent (descending) with duplicate
/// exponents merged and zero coefficients dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalTransferFunction {
    numerator: Vec<FractionalTerm>,
    denominator: Vec<FractionalTerm>,
}

fn normalize_terms(terms: &[FractionalTerm]) -> Result<Vec<FractionalTerm>> {
    let mut out: Vec<FractionalTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        let t = FractionalTerm::new(t.coefficient, t.exponent)?;
        match out.iter_mut().find(|o| o.exponent == t.exponent) {
            Some(o) => o.coefficient += t.coefficient,
            None => out.push(t),
        }
    }
    out.retain(|t| t.coefficient != 0.0);
    out.sort_by(|a, b| b.exponent.total_cmp(&a.exponent));
    Ok(out)
}

fn eval_terms_at_frequency(terms: &[FractionalTerm], omega: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        acc += eval_fractional_power(t.exponent, omega)? * t.coefficient;
    }
    Ok(acc)
}

fn eval_terms_at(terms: &[FractionalTerm], s: Complex64) -> Complex64 {
    terms
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, t| acc + pow_principal(s, t.exponent) * t.coefficient)
}

impl FractionalTransferFunction {
    pub fn new(numerator: &[FractionalTerm], denominator: &[FractionalTerm]) -> Result<Self> {
        let numerator = normalize_terms(numerator)?;
        let denominator = normalize_terms(denominator)?;
        if denominator.is_empty() {
            return Err(Error::Construction("denominator is identically zero"));
        }
        Ok(Self { numerator, denominator })
    }

    /// Integer-order rational function from coefficient slices in ascending
    /// powers of `s` (`coeffs[i]` multiplies `s^i`).
    pub fn from_polynomials(numerator: &[f64], denominator: &[f64]) -> Result<Self> {
        let terms = |c: &[f64]| -> Result<Vec<FractionalTerm>> {
            c.iter().enumerate().map(|(i, &c)| FractionalTerm::new(c, i as f64)).collect()
        };
        Self::new(&terms(numerator)?, &terms(denominator)?)
    }

    pub fn constant(gain: f64) -> Result<Self> {
        Self::from_polynomials(&[gain], &[1.0])
    }

    pub fn numerator(&self) -> &[FractionalTerm] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[FractionalTerm] {
        &self.denominator
    }

    /// Frequency response at `s = j omega`.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        let den = eval_terms_at_frequency(&self.denominator, omega)?;
        if den.norm() < SINGULAR_MAGNITUDE {
            return Err(Error::Singular { omega });
        }
        Ok(eval_terms_at_frequency(&self.numerator, omega)? / den)
    }

    /// Value at an arbitrary complex point (principal branch).
    pub fn eval_at(&self, s: Complex64) -> Result<Complex64> {
        let den = eval_terms_at(&self.denominator, s);
        if den.norm() < SINGULAR_MAGNITUDE {
            return Err(Error::Singular { omega: s.norm() });
        }
        Ok(eval_terms_at(&self.numerator, s) / den)
    }

    /// Product of two transfer functions as a new term-list function.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let product = |a: &[FractionalTerm], b: &[FractionalTerm]| -> Vec<FractionalTerm> {
            let mut out = Vec::with_capacity(a.len() * b.len());
            for x in a {
                for y in b {
                    out.push(FractionalTerm {
                        coefficient: x.coefficient * y.coefficient,
                        exponent: x.exponent + y.exponent,
                    });
                }
            }
            out
        };
        Self::new(
            &product(&self.numerator, &other.numerator),
            &product(&self.denominator, &other.denominator),
        )
    }
}

/// Convenience: `tf.eval(omega)`.
pub fn eval_tf(tf: &FractionalTransferFunction, omega: f64) -> Result<Complex64> {
    tf.eval(omega)
}

/// Admittance controller `Y(s) = 1/(m_F s^alpha + b_F)`.
///
/// `m_F` is in kg s^(alpha-1), `b_F` in N s/m. At `alpha = 1` this is the
/// integer-order mass-damper admittance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdmittanceController {
    pub alpha: f64,
    #[cfg_attr(feature = "serde", serde(rename = "m_F"))]
    pub m_f: f64,
    #[cfg_attr(feature = "serde", serde(rename = "b_F"))]
    pub b_f: f64,
}

impl AdmittanceController {
    pub fn new(alpha: f64, m_f: f64, b_f: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Construction("integration order must lie in (0, 1]"));
        }
        if !(m_f >= 0.0 && m_f.is_finite() && b_f >= 0.0 && b_f.is_finite()) {
            return Err(Error::Construction("controller parameters must be finite and non-negative"));
        }
        if m_f == 0.0 && b_f == 0.0 {
            return Err(Error::Construction("m_F and b_F cannot both be zero"));
        }
        Ok(Self { alpha, m_f, b_f })
    }

    /// `Y(j omega)`.
    pub fn response(&self, omega: f64) -> Result<Complex64> {
        let s_alpha = eval_fractional_power(self.alpha, omega)?;
        self.response_from_power(s_alpha, omega)
    }

    /// `Y` given a precomputed `s^alpha`; `at` is only used in the error.
    #[inline]
    pub(crate) fn response_from_power(&self, s_alpha: Complex64, at: f64) -> Result<Complex64> {
        let den = s_alpha * self.m_f + self.b_f;
        if den.norm() < SINGULAR_MAGNITUDE {
            return Err(Error::Singular { omega: at });
        }
        Ok(den.inv())
    }

    /// `Y(s)` at an arbitrary complex point.
    pub fn eval_at(&self, s: Complex64) -> Result<Complex64> {
        self.response_from_power(pow_principal(s, self.alpha), s.norm())
    }

    pub fn transfer_function(&self) -> Result<FractionalTransferFunction> {
        FractionalTransferFunction::new(
            &[FractionalTerm::new(1.0, 0.0)?],
            &[FractionalTerm::new(self.m_f, self.alpha)?, FractionalTerm::new(self.b_f, 0.0)?],
        )
    }
}

/// `Y(j omega)` of the controller.
pub fn controller_response(ctrl: &AdmittanceController, omega: f64) -> Result<Complex64> {
    ctrl.response(omega)
}

/// Frequency-dependent mass and damping rendered by the controller impedance
/// `m_F (j omega)^alpha + b_F = damping + j omega mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveImpedance {
    /// kg
    pub mass: f64,
    /// N s/m
    pub damping: f64,
}

pub fn effective_impedance(ctrl: &AdmittanceController, omega: f64) -> Result<EffectiveImpedance> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain("frequency must be positive and finite"));
    }
    let (cos, sin) = quarter_turn(ctrl.alpha);
    let (w_alpha, w_alpha_m1) = if ctrl.alpha == 1.0 {
        (omega, 1.0)
    } else {
        (omega.powf(ctrl.alpha), omega.powf(ctrl.alpha - 1.0))
    };
    Ok(EffectiveImpedance {
        mass: ctrl.m_f * w_alpha_m1 * sin,
        damping: ctrl.b_f + ctrl.m_f * w_alpha * cos,
    })
}

/// Coupled human + environment impedance
/// `Z_eq(s) = (m_eq s^2 + b_eq s + k_eq)/s`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivalentImpedance {
    pub m_eq: f64,
    pub b_eq: f64,
    pub k_eq: f64,
}

impl EquivalentImpedance {
    pub fn new(m_eq: f64, b_eq: f64, k_eq: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(m_eq) && ok(b_eq) && ok(k_eq)) {
            return Err(Error::Construction("impedance parameters must be finite and non-negative"));
        }
        Ok(Self { m_eq, b_eq, k_eq })
    }

    /// Pure spring, e.g. an environment of stiffness `k`.
    pub fn spring(k: f64) -> Result<Self> {
        Self::new(0.0, 0.0, k)
    }

    /// `Z_eq(j omega) = b_eq + j (m_eq omega - k_eq/omega)`.
    #[inline]
    pub fn response(&self, omega: f64) -> Complex64 {
        Complex64::new(self.b_eq, self.m_eq * omega - self.k_eq / omega)
    }

    pub fn eval_at(&self, s: Complex64) -> Complex64 {
        s * self.m_eq + self.b_eq + s.inv() * self.k_eq
    }

    pub fn transfer_function(&self) -> Result<FractionalTransferFunction> {
        FractionalTransferFunction::from_polynomials(&[self.k_eq, self.b_eq, self.m_eq], &[0.0, 1.0])
    }
}

/// Strictly increasing list of angular frequencies (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Construction("frequency grid needs at least two points"));
        }
        if !(points[0] > 0.0) || points.iter().any(|w| !w.is_finite()) {
            return Err(Error::Construction("frequency grid must be positive and finite"));
        }
        if points.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::Construction("frequency grid must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn omega_l(&self) -> f64 {
        self.points[0]
    }

    pub fn omega_u(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

/// `n` log-uniform points from `omega_l` to `omega_u`, endpoints exact.
pub fn make_log_grid(omega_l: f64, omega_u: f64, n: usize) -> Result<FrequencyGrid> {
    if !(omega_l > 0.0 && omega_u > omega_l && omega_u.is_finite()) {
        return Err(Error::Construction("need 0 < omega_L < omega_U"));
    }
    if n < 2 {
        return Err(Error::Construction("need at least two grid points"));
    }
    let ratio = omega_u / omega_l;
    let last = (n - 1) as f64;
    let mut points: Vec<f64> = (0..n).map(|i| omega_l * ratio.powf(i as f64 / last)).collect();
    points[0] = omega_l;
    points[n - 1] = omega_u;
    FrequencyGrid::from_points(points)
}

/// Log grid given in Hz, stored in rad/s.
pub fn make_log_grid_hz(f_l: f64, f_u: f64, n: usize) -> Result<FrequencyGrid> {
    make_log_grid(2.0 * PI * f_l, 2.0 * PI * f_u, n)
}

/// Low-pass Butterworth of the given order with unity DC gain.
pub fn butterworth_lowpass(order: u32, cutoff: f64) -> Result<FractionalTransferFunction> {
    if order == 0 || order > 32 {
        return Err(Error::Construction("butterworth order must be in 1..=32"));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::Construction("butterworth cutoff must be positive"));
    }
    let n = order as usize;
    // Normalized polynomial in x = s/cutoff, ascending powers.
    let mut poly: Vec<f64> = alloc::vec![1.0];
    let mul = |p: &[f64], f: &[f64]| -> Vec<f64> {
        let mut out = alloc::vec![0.0; p.len() + f.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    if n % 2 == 1 {
        poly = mul(&poly, &[1.0, 1.0]);
    }
    for k in 1..=n / 2 {
        let damping = 2.0 * (((2 * k - 1) as f64) * PI / (2.0 * n as f64)).sin();
        poly = mul(&poly, &[1.0, damping, 1.0]);
    }
    let mut scale = 1.0;
    for c in poly.iter_mut() {
        *c /= scale;
        scale *= cutoff;
    }
    FractionalTransferFunction::from_polynomials(&[1.0], &poly)
}

/// Plant settings: robot velocity-loop lag and force-filter design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantConfig {
    /// Robot lag time constant in seconds.
    pub tau_r_s: f64,
    pub filter_order: u32,
    pub filter_cutoff_hz: f64,
}

impl Default for PlantConfig {
    fn default() -> Self {
        Self {
            tau_r_s: 1.0 / (2.0 * PI * 10.0),
            filter_order: 2,
            filter_cutoff_hz: 20.0,
        }
    }
}

/// Robot model `G` and force filter `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    pub g: FractionalTransferFunction,
    pub h: FractionalTransferFunction,
}

impl PlantModel {
    pub fn new(g: FractionalTransferFunction, h: FractionalTransferFunction) -> Self {
        Self { g, h }
    }

    /// `G(j omega) H(j omega)`.
    #[inline]
    pub fn gh(&self, omega: f64) -> Result<Complex64> {
        Ok(self.g.eval(omega)? * self.h.eval(omega)?)
    }

    pub fn gh_at(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.g.eval_at(s)? * self.h.eval_at(s)?)
    }
}

/// `G(s) = 1/(tau_r s + 1)`, `H(s)` a unity-DC Butterworth low-pass.
pub fn default_plant(config: &PlantConfig) -> Result<PlantModel> {
    if !(config.tau_r_s > 0.0 && config.tau_r_s.is_finite()) {
        return Err(Error::Construction("robot lag time constant must be positive"));
    }
    if !(config.filter_cutoff_hz > 0.0 && config.filter_cutoff_hz.is_finite()) {
        return Err(Error::Construction("filter cutoff must be positive"));
    }
    let g = FractionalTransferFunction::from_polynomials(&[1.0], &[1.0, config.tau_r_s])?;
    let h = butterworth_lowpass(config.filter_order, 2.0 * PI * config.filter_cutoff_hz)?;
    Ok(PlantModel::new(g, h))
}
