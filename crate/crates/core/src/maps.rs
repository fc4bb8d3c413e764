//! Objective maps over the discretized `(m_F, b_F)` controller grid.
//!
//! Maps are stored row-major with `m_F` as the outer (row) axis. A cell is
//! `None` when it is unstable or could not be evaluated; such cells are
//! excluded from normalization and from every front.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::freqresp::{AdmittanceController, FrequencyGrid, PlantModel};
use crate::metrics::{ImpedanceBounds, RobustnessKernel, TransparencyKernel, WeightingFunction};

pub const DEFAULT_M_RANGE: [f64; 2] = [0.2, 100.0];
pub const DEFAULT_M_STEP: f64 = 0.1;
pub const DEFAULT_B_RANGE: [f64; 2] = [0.001, 500.0];
pub const DEFAULT_B_STEP: f64 = 1.0;

/// Axis values are rounded to this many decimals to keep them printable.
const AXIS_DECIMALS: f64 = 1e9;
const AXIS_SLACK: f64 = 1e-9;

fn snap(x: f64) -> f64 {
    (x * AXIS_DECIMALS).round() / AXIS_DECIMALS
}

/// Discretized controller parameters for one integration order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ControllerGrid {
    pub alpha: f64,
    #[cfg_attr(feature = "serde", serde(rename = "m_F"))]
    m_f: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "b_F"))]
    b_f: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|p| p[1] > p[0])
}

impl ControllerGrid {
    pub fn new(alpha: f64, m_f: Vec<f64>, b_f: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Construction("integration order must lie in (0, 1]"));
        }
        if m_f.is_empty() || b_f.is_empty() {
            return Err(Error::Construction("controller grid axis is empty"));
        }
        let valid = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0) && strictly_increasing(v);
        if !valid(&m_f) || !valid(&b_f) {
            return Err(Error::Construction("grid axes must be finite, non-negative and strictly increasing"));
        }
        if m_f[0] == 0.0 && b_f[0] == 0.0 {
            return Err(Error::Construction("grid contains the m_F = b_F = 0 controller"));
        }
        Ok(Self { alpha, m_f, b_f })
    }

    pub fn m_f(&self) -> &[f64] {
        &self.m_f
    }

    pub fn b_f(&self) -> &[f64] {
        &self.b_f
    }

    /// `(rows, cols)` = `(|m_F|, |b_F|)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.m_f.len(), self.b_f.len())
    }

    pub fn len(&self) -> usize {
        self.m_f.len() * self.b_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row and column of a flat cell index.
    pub fn cell(&self, index: usize) -> (usize, usize) {
        (index / self.b_f.len(), index % self.b_f.len())
    }

    pub fn controller(&self, index: usize) -> Result<AdmittanceController> {
        let (i, j) = self.cell(index);
        AdmittanceController::new(self.alpha, self.m_f[i], self.b_f[j])
    }

    /// Sub-grid keeping every `m_stride`-th row and `b_stride`-th column,
    /// starting from the first.
    pub fn strided(&self, m_stride: usize, b_stride: usize) -> Self {
        let m_stride = m_stride.max(1);
        let b_stride = b_stride.max(1);
        Self {
            alpha: self.alpha,
            m_f: self.m_f.iter().copied().step_by(m_stride).collect(),
            b_f: self.b_f.iter().copied().step_by(b_stride).collect(),
        }
    }

    /// Sub-grid made of the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let pick = |axis: &[f64], idx: &[usize]| -> Result<Vec<f64>> {
            idx.iter()
                .map(|&i| axis.get(i).copied().ok_or(Error::Construction("sub-grid index out of range")))
                .collect()
        };
        Self::new(self.alpha, pick(&self.m_f, rows)?, pick(&self.b_f, cols)?)
    }
}

/// Controller grid from ranges and steps.
///
/// The `m_F` axis is `m_lo, m_lo + step, ...` up to `m_hi`. The `b_F` axis
/// is `b_lo` followed by the multiples of `b_step` above it, so the default
/// `[0.001, 500]` with step 1 gives `0.001, 1, 2, ..., 500`.
pub fn make_param_grid(
    alpha: f64,
    m_range: [f64; 2],
    m_step: f64,
    b_range: [f64; 2],
    b_step: f64,
) -> Result<ControllerGrid> {
    if !(m_step > 0.0 && b_step > 0.0 && m_step.is_finite() && b_step.is_finite()) {
        return Err(Error::Construction("grid steps must be positive"));
    }
    let [m_lo, m_hi] = m_range;
    let [b_lo, b_hi] = b_range;
    if !(m_hi >= m_lo && b_hi >= b_lo) {
        return Err(Error::Construction("empty parameter range"));
    }
    let m_count = ((m_hi - m_lo) / m_step + AXIS_SLACK).floor() as usize + 1;
    let m_f: Vec<f64> = (0..m_count).map(|i| snap(m_lo + i as f64 * m_step)).collect();

    let mut b_f = alloc::vec![b_lo];
    let mut k = (b_lo / b_step + AXIS_SLACK).floor() + 1.0;
    loop {
        let v = snap(k * b_step);
        if v > b_hi + AXIS_SLACK {
            break;
        }
        if v > b_lo {
            b_f.push(v);
        }
        k += 1.0;
    }
    ControllerGrid::new(alpha, m_f, b_f)
}

/// Full-resolution grid of the default feasible ranges.
pub fn default_param_grid(alpha: f64) -> Result<ControllerGrid> {
    make_param_grid(alpha, DEFAULT_M_RANGE, DEFAULT_M_STEP, DEFAULT_B_RANGE, DEFAULT_B_STEP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MapKind {
    Transparency,
    Robustness,
}

/// Objective values over a controller grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveMap {
    pub grid: ControllerGrid,
    pub kind: MapKind,
    values: Vec<Option<f64>>,
}

impl ObjectiveMap {
    pub fn new(grid: ControllerGrid, kind: MapKind, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Construction("map values do not match grid dimensions"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Construction("map values must be finite or absent"));
        }
        Ok(Self { grid, kind, values })
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.grid.b_f.len() + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<f64>]> {
        self.values.chunks(self.grid.b_f.len())
    }

    pub fn stable_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Sentinel-preserving strided sub-map (no interpolation).
    pub fn strided(&self, m_stride: usize, b_stride: usize) -> Self {
        let m_stride = m_stride.max(1);
        let b_stride = b_stride.max(1);
        let cols = self.grid.b_f.len();
        let values = (0..self.grid.m_f.len())
            .step_by(m_stride)
            .flat_map(|i| (0..cols).step_by(b_stride).map(move |j| (i, j)))
            .map(|(i, j)| self.values[i * cols + j])
            .collect();
        Self { grid: self.grid.strided(m_stride, b_stride), kind: self.kind, values }
    }
}

#[cfg(feature = "parallel")]
fn map_cells<F>(n: usize, f: F) -> Vec<Option<f64>>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_cells<F>(n: usize, f: F) -> Vec<Option<f64>>
where
    F: Fn(usize) -> Option<f64>,
{
    (0..n).map(f).collect()
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Transparency cost of every cell. Per-cell failures become sentinels.
pub fn sweep_transparency(
    plant: &PlantModel,
    grid: &ControllerGrid,
    freq: &FrequencyGrid,
    weighting: &WeightingFunction,
) -> Result<ObjectiveMap> {
    let kernel = TransparencyKernel::new(plant, grid.alpha, freq, weighting)?;
    let values = map_cells(grid.len(), |k| {
        let ctrl = grid.controller(k).ok()?;
        kernel.cost(&ctrl).ok().and_then(finite)
    });
    ObjectiveMap::new(grid.clone(), MapKind::Transparency, values)
}

/// Worst-case vector margin of every cell over the four impedance corners
/// at `k_eq`; unstable cells become sentinels.
pub fn sweep_robustness(
    plant: &PlantModel,
    grid: &ControllerGrid,
    bounds: &ImpedanceBounds,
    k_eq: f64,
    freq: &FrequencyGrid,
    nyquist_grid: &FrequencyGrid,
) -> Result<ObjectiveMap> {
    let kernel = RobustnessKernel::new(plant, grid.alpha, bounds, k_eq, freq, nyquist_grid)?;
    let values = map_cells(grid.len(), |k| {
        let ctrl = grid.controller(k).ok()?;
        kernel.margin(&ctrl).ok().flatten().and_then(finite)
    });
    ObjectiveMap::new(grid.clone(), MapKind::Robustness, values)
}

/// Transparency and robustness maps of one sweep with a shared sentinel
/// mask: a cell missing from either map is missing from both.
#[derive(Debug, Clone, PartialEq)]
pub struct MapPair {
    pub transparency: ObjectiveMap,
    pub robustness: ObjectiveMap,
}

impl MapPair {
    pub fn new(transparency: ObjectiveMap, robustness: ObjectiveMap) -> Result<Self> {
        if transparency.grid != robustness.grid {
            return Err(Error::Inconsistent("maps were swept over different grids"));
        }
        if transparency.kind != MapKind::Transparency || robustness.kind != MapKind::Robustness {
            return Err(Error::Inconsistent("map kinds do not form a transparency/robustness pair"));
        }
        let mut transparency = transparency;
        let mut robustness = robustness;
        for (c, r) in transparency.values.iter_mut().zip(robustness.values.iter_mut()) {
            if c.is_none() || r.is_none() {
                *c = None;
                *r = None;
            }
        }
        Ok(Self { transparency, robustness })
    }
}

/// Both maps of one sweep, raw and divided by their maxima over stable cells.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPair {
    pub grid: ControllerGrid,
    pub c: Vec<Option<f64>>,
    pub rho: Vec<Option<f64>>,
    pub c_n: Vec<Option<f64>>,
    pub rho_n: Vec<Option<f64>>,
    pub c_max: f64,
    pub rho_max: f64,
}

impl NormalizedPair {
    /// Flat indices of cells present in both maps.
    pub fn stable_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.c.len()).filter(|&k| self.c[k].is_some())
    }
}

fn max_present(values: &[Option<f64>]) -> Option<f64> {
    values.iter().flatten().copied().reduce(f64::max)
}

/// Divide each map by its maximum over stable cells.
///
/// Both maps must share grid and sentinel pattern (see [`MapPair`]). The
/// maxima must be positive so that the scaling preserves ordering.
pub fn normalize_pair(c_map: &ObjectiveMap, rho_map: &ObjectiveMap) -> Result<NormalizedPair> {
    if c_map.grid != rho_map.grid {
        return Err(Error::Inconsistent("maps were swept over different grids"));
    }
    if c_map.values.iter().zip(&rho_map.values).any(|(c, r)| c.is_some() != r.is_some()) {
        return Err(Error::Inconsistent("maps have different sentinel patterns"));
    }
    let c_max = max_present(&c_map.values).ok_or(Error::Normalization("no stable cells"))?;
    let rho_max = max_present(&rho_map.values).ok_or(Error::Normalization("no stable cells"))?;
    if !(c_max > 0.0) || !(rho_max > 0.0) {
        return Err(Error::Normalization("map maximum is not positive"));
    }
    let scale = |v: &[Option<f64>], m: f64| v.iter().map(|x| x.map(|x| x / m)).collect::<Vec<_>>();
    Ok(NormalizedPair {
        grid: c_map.grid.clone(),
        c_n: scale(&c_map.values, c_max),
        rho_n: scale(&rho_map.values, rho_max),
        c: c_map.values.clone(),
        rho: rho_map.values.clone(),
        c_max,
        rho_max,
    })
}
