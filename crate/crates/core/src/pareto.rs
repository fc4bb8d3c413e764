//! Pareto fronts over (transparency cost `C`, vector margin `rho`): lower `C`
//! and higher `rho` are better.
//!
//! The canonical front is the exhaustive non-dominated set of the stable
//! cells. The weighted-sum scan `J = w C_n - (1 - w) rho_n` is kept for the
//! `w` annotations it provides; it cannot reach concave parts of the front.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::maps::NormalizedPair;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParetoPoint {
    pub alpha: f64,
    #[cfg_attr(feature = "serde", serde(rename = "m_F"))]
    pub m_f: f64,
    #[cfg_attr(feature = "serde", serde(rename = "b_F"))]
    pub b_f: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C"))]
    pub c: f64,
    pub rho: f64,
    #[cfg_attr(feature = "serde", serde(rename = "C_n"))]
    pub c_n: f64,
    pub rho_n: f64,
    /// Smallest scan weight that selected this point, if any did.
    #[cfg_attr(feature = "serde", serde(rename = "w"))]
    pub weight: Option<f64>,
    /// Displayed-compliance cut-off frequency, once evaluated.
    #[cfg_attr(feature = "serde", serde(default))]
    pub omega_c_hz: Option<f64>,
}

impl ParetoPoint {
    /// `self` is at least as good in both objectives and better in one.
    pub fn dominates(&self, other: &Self) -> bool {
        self.c <= other.c && self.rho >= other.rho && (self.c < other.c || self.rho > other.rho)
    }

    pub fn same_controller(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.m_f == other.m_f && self.b_f == other.b_f
    }
}

/// Non-dominated points of one integration order, sorted by `rho` ascending.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParetoFront {
    pub alpha: f64,
    pub points: Vec<ParetoPoint>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sorted by strictly increasing `rho` with strictly increasing `C`, no
    /// repeated controllers and a single integration order.
    pub fn check_invariants(&self) -> Result<()> {
        for p in &self.points {
            if p.alpha != self.alpha {
                return Err(Error::Inconsistent("front mixes integration orders"));
            }
        }
        for w in self.points.windows(2) {
            if !(w[1].rho > w[0].rho && w[1].c > w[0].c) {
                return Err(Error::Inconsistent("front is not a strict trade-off curve"));
            }
        }
        Ok(())
    }
}

/// `J = w C_n + (1 - w)(-rho_n)`; lower is better.
pub fn scalarize(c_n: f64, rho_n: f64, w: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Domain("weight must lie in [0, 1]"));
    }
    Ok(w * c_n + (1.0 - w) * (-rho_n))
}

/// Weights `0, step, 2 step, ..., 1`.
pub fn weight_values(w_step: f64) -> Result<Vec<f64>> {
    if !(w_step > 0.0 && w_step <= 1.0) {
        return Err(Error::Domain("weight step must lie in (0, 1]"));
    }
    let n = (1.0 / w_step).round();
    if (n * w_step - 1.0).abs() < 1e-9 {
        let n = n as usize;
        return Ok((0..=n).map(|i| i as f64 / n as f64).collect());
    }
    let mut out: Vec<f64> = Vec::new();
    let mut i = 0usize;
    loop {
        let w = i as f64 * w_step;
        if w >= 1.0 {
            break;
        }
        out.push(w);
        i += 1;
    }
    out.push(1.0);
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    index: usize,
    c: f64,
    rho: f64,
    c_n: f64,
    rho_n: f64,
}

fn candidates(pair: &NormalizedPair) -> Vec<Candidate> {
    pair.stable_cells()
        .filter_map(|k| {
            Some(Candidate {
                index: k,
                c: pair.c[k]?,
                rho: pair.rho[k]?,
                c_n: pair.c_n[k]?,
                rho_n: pair.rho_n[k]?,
            })
        })
        .collect()
}

fn point_of(pair: &NormalizedPair, cand: &Candidate, weight: Option<f64>) -> ParetoPoint {
    let (i, j) = pair.grid.cell(cand.index);
    ParetoPoint {
        alpha: pair.grid.alpha,
        m_f: pair.grid.m_f()[i],
        b_f: pair.grid.b_f()[j],
        c: cand.c,
        rho: cand.rho,
        c_n: cand.c_n,
        rho_n: cand.rho_n,
        weight,
        omega_c_hz: None,
    }
}

/// Argmin of `J` for one weight. Ties in `J` go to lower raw `C`, then
/// higher raw `rho`, then lower `(m_F, b_F)` (the cell order).
fn argmin(cands: &[Candidate], w: f64) -> usize {
    let mut best = 0;
    let mut best_j = f64::INFINITY;
    for (k, c) in cands.iter().enumerate() {
        let j = w * c.c_n + (1.0 - w) * (-c.rho_n);
        let better = j < best_j
            || (j == best_j
                && (c.c < cands[best].c || (c.c == cands[best].c && c.rho > cands[best].rho)));
        if better {
            best = k;
            best_j = j;
        }
    }
    best
}

#[cfg(feature = "parallel")]
fn scan_all(cands: &[Candidate], weights: &[f64]) -> Vec<usize> {
    use rayon::prelude::*;
    weights.par_iter().map(|&w| argmin(cands, w)).collect()
}

#[cfg(not(feature = "parallel"))]
fn scan_all(cands: &[Candidate], weights: &[f64]) -> Vec<usize> {
    weights.iter().map(|&w| argmin(cands, w)).collect()
}

fn by_rho_then_c(a: &ParetoPoint, b: &ParetoPoint) -> Ordering {
    a.rho.total_cmp(&b.rho).then(a.c.total_cmp(&b.c))
}

/// Weighted-sum scan: the argmin-`J` stable cell for every weight in
/// `{0, w_step, ..., 1}`, deduplicated and annotated with the smallest
/// selecting weight. Sorted by `rho` ascending.
pub fn weight_scan(pair: &NormalizedPair, w_step: f64) -> Result<Vec<ParetoPoint>> {
    let weights = weight_values(w_step)?;
    let cands = candidates(pair);
    if cands.is_empty() {
        return Err(Error::EmptyFront);
    }
    let picks = scan_all(&cands, &weights);
    let mut first_weight: BTreeMap<usize, f64> = BTreeMap::new();
    for (&w, &k) in weights.iter().zip(&picks) {
        first_weight.entry(k).or_insert(w);
    }
    let mut points: Vec<ParetoPoint> = first_weight
        .into_iter()
        .map(|(k, w)| point_of(pair, &cands[k], Some(w)))
        .collect();
    points.sort_by(by_rho_then_c);
    Ok(points)
}

/// All stable cells not weakly dominated by another, sorted by `rho`
/// ascending. Cells with identical `(C, rho)` keep the smallest `(m_F, b_F)`.
pub fn non_dominated_filter(pair: &NormalizedPair) -> Result<ParetoFront> {
    let mut cands = candidates(pair);
    if cands.is_empty() {
        return Err(Error::EmptyFront);
    }
    cands.sort_by(|a, b| {
        a.c.total_cmp(&b.c)
            .then(b.rho.total_cmp(&a.rho))
            .then(a.index.cmp(&b.index))
    });
    let mut points = Vec::new();
    let mut best_rho = f64::NEG_INFINITY;
    for cand in &cands {
        if cand.rho > best_rho {
            best_rho = cand.rho;
            points.push(point_of(pair, cand, None));
        }
    }
    Ok(ParetoFront { alpha: pair.grid.alpha, points })
}

/// The exhaustive front with scan weights copied onto the points the scan
/// also found.
pub fn assemble_front(scan_points: &[ParetoPoint], filtered: &ParetoFront) -> Result<ParetoFront> {
    let mut front = filtered.clone();
    for s in scan_points {
        if s.alpha != front.alpha {
            return Err(Error::Inconsistent("scan and filter use different integration orders"));
        }
        let target = front
            .points
            .iter_mut()
            .find(|p| p.same_controller(s))
            .ok_or(Error::Inconsistent("scan point missing from the exhaustive front"))?;
        if target.c != s.c || target.rho != s.rho {
            return Err(Error::Inconsistent("scan and filter disagree on objective values"));
        }
        target.weight = s.weight;
    }
    Ok(front)
}
