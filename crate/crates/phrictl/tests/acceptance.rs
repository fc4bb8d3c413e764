//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances and golden values are pinned below.

// `!(a <= b)` deliberately treats NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use admittance_pareto::freqresp::{
    default_plant, effective_impedance, make_log_grid_hz, AdmittanceController, EquivalentImpedance, FractionalTerm,
    FractionalTransferFunction, FrequencyGrid, PlantConfig, PlantModel,
};
use admittance_pareto::maps::{
    make_param_grid, normalize_pair, sweep_robustness, sweep_transparency, ControllerGrid, MapKind, MapPair,
    ObjectiveMap,
};
use admittance_pareto::metrics::{nyquist_verdict, vector_margin, Scenario, WeightingFunction};
use admittance_pareto::pareto::{non_dominated_filter, weight_scan, ParetoFront, ParetoPoint};
use admittance_pareto::select::{compare_fronts, DominanceVerdict, SelectionPolicy};
use admittance_pareto::{Complex64, Error};
use phrictl::config::ConstraintSettings;
use phrictl::report::build_report;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const MARGIN_IDENTITY_TOL: f64 = 1e-12;
const MARGIN_IDENTITY_BUDGET: Duration = Duration::from_secs(5);
const IOAC_REL_TOL: f64 = 1e-12;
const EFFECTIVE_IMPEDANCE_TOL: f64 = 1e-9;
const NYQUIST_BUDGET: Duration = Duration::from_secs(30);
const DOMINANCE_BUDGET: Duration = Duration::from_secs(600);

/// Default-plant fronts of the 100x100 grid, alpha = 1 (reference) against
/// alpha = 0.4 (challenger), sampled at rho = 0.40, 0.41, ..., 0.60.
const GOLDEN_VERDICT: DominanceVerdict = DominanceVerdict::ChallengerDominates;
const GOLDEN_C_REFERENCE: [f64; 21] = [
    611.8019796034949,
    634.2514904970949,
    634.2514904970949,
    634.2514904970949,
    634.2514904970949,
    634.2514904970949,
    634.2514904970949,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
    654.1283588131627,
];
const GOLDEN_C_CHALLENGER: [f64; 21] = [
    430.5348211052819,
    430.5348211052819,
    430.5348211052819,
    446.6370981397632,
    446.6370981397632,
    461.36146024616943,
    461.36146024616943,
    481.0910970027865,
    487.4981396115432,
    496.8604264257097,
    504.6682529931261,
    509.3722801335132,
    515.3328880760827,
    525.368936273545,
    528.9638142448571,
    538.3994451204301,
    540.1262249917069,
    547.3235370180178,
    549.182211881594,
    549.5966511526101,
    558.3398927450104,
];

type Outcome = Result<String, String>;

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn objective_grid() -> FrequencyGrid {
    make_log_grid_hz(0.01, 30.0, 500).unwrap()
}

fn nyquist_grid() -> FrequencyGrid {
    make_log_grid_hz(1e-3, 1e4, 4000).unwrap()
}

fn default_weighting() -> WeightingFunction {
    WeightingFunction::new(5, 2.0 * PI * 5.0).unwrap()
}

/// `(j omega)^beta` written out from the polar form.
fn jw_pow(omega: f64, beta: f64) -> Complex64 {
    Complex64::from_polar(omega.powf(beta), beta * PI / 2.0)
}

// ---------------------------------------------------------------------------
// 1. vector-margin identity

/// `1/(a s^beta + 1)` as a library transfer function and as an oracle.
struct Lag {
    a: f64,
    beta: f64,
}

impl Lag {
    fn tf(&self) -> FractionalTransferFunction {
        FractionalTransferFunction::new(
            &[FractionalTerm::new(1.0, 0.0).unwrap()],
            &[FractionalTerm::new(self.a, self.beta).unwrap(), FractionalTerm::new(1.0, 0.0).unwrap()],
        )
        .unwrap()
    }

    fn at(&self, omega: f64) -> Complex64 {
        (jw_pow(omega, self.beta) * self.a + 1.0).inv()
    }
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let grid = objective_grid();
    let nyq = nyquist_grid();
    let start = Instant::now();
    let (mut loops, mut worst, mut tried) = (0, 0.0_f64, 0);
    while loops < 50 {
        tried += 1;
        let g = Lag { a: rng.random_range(0.001..0.05), beta: if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.3..1.0) } };
        let h = Lag { a: rng.random_range(0.001..0.02), beta: if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.3..1.0) } };
        let gain = rng.random_range(0.2..2.0);
        let plant = PlantModel::new(
            g.tf().mul(&FractionalTransferFunction::constant(gain).unwrap()).unwrap(),
            h.tf(),
        );
        let ctrl = AdmittanceController::new(
            rng.random_range(0.2..=1.0),
            rng.random_range(0.2..100.0),
            rng.random_range(0.001..500.0),
        )
        .unwrap();
        let zeq = EquivalentImpedance::new(rng.random_range(0.0..5.0), rng.random_range(0.0..41.0), rng.random_range(0.0..1610.0)).unwrap();
        let rho = match vector_margin(&plant, &ctrl, &zeq, &grid, &nyq) {
            Ok(rho) => rho,
            Err(Error::Unstable { .. }) => continue,
            Err(e) => return Err(format!("vector_margin failed: {e}")),
        };
        let min_return = grid
            .points()
            .iter()
            .map(|&w| {
                let y = (jw_pow(w, ctrl.alpha) * ctrl.m_f + ctrl.b_f).inv();
                let z = Complex64::new(zeq.b_eq, zeq.m_eq * w - zeq.k_eq / w);
                (g.at(w) * gain * h.at(w) * y * z + 1.0).norm()
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max((rho - min_return).abs());
        loops += 1;
    }
    let elapsed = start.elapsed();
    check(
        worst < MARGIN_IDENTITY_TOL && elapsed < MARGIN_IDENTITY_BUDGET,
        format!("50 stable loops ({tried} drawn), max |1/max|S| - min|1+L|| = {worst:.2e}, {elapsed:.2?}"),
        format!("max deviation {worst:.2e} (tol {MARGIN_IDENTITY_TOL:e}), {elapsed:.2?} (budget {MARGIN_IDENTITY_BUDGET:?})"),
    )
}

// ---------------------------------------------------------------------------
// 2. IOAC limit

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (m, b) = (rng.random_range(0.2..100.0), rng.random_range(0.001..500.0));
        let w = 2.0 * PI * rng.random_range(0.01..30.0);
        let got = AdmittanceController::new(1.0, m, b).unwrap().response(w).map_err(|e| e.to_string())?;
        let want = Complex64::new(b, m * w).inv();
        worst = worst.max((got - want).norm() / want.norm());
    }
    check(
        worst < IOAC_REL_TOL,
        format!("100 samples, max relative error {worst:.2e}"),
        format!("max relative error {worst:.2e} (tol {IOAC_REL_TOL:e})"),
    )
}

// ---------------------------------------------------------------------------
// 3. effective impedance reconstruction

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let ctrl = AdmittanceController::new(
            rng.random_range(0.01..=1.0),
            rng.random_range(0.2..100.0),
            rng.random_range(0.001..500.0),
        )
        .unwrap();
        let w = 2.0 * PI * rng.random_range(0.01..30.0);
        let eff = effective_impedance(&ctrl, w).map_err(|e| e.to_string())?;
        let rebuilt = Complex64::new(eff.damping, w * eff.mass);
        let direct = jw_pow(w, ctrl.alpha) * ctrl.m_f + ctrl.b_f;
        worst = worst.max((rebuilt - direct).norm());
    }
    check(
        worst < EFFECTIVE_IMPEDANCE_TOL,
        format!("1000 samples, max |difference| {worst:.2e}"),
        format!("max |difference| {worst:.2e} (tol {EFFECTIVE_IMPEDANCE_TOL:e})"),
    )
}

// ---------------------------------------------------------------------------
// 4. Nyquist verdicts against a characteristic-polynomial oracle

/// Polynomial helpers; coefficients in ascending powers of `s`.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len().max(b.len())).map(|i| a.get(i).unwrap_or(&0.0) + b.get(i).unwrap_or(&0.0)).collect()
}

fn poly_eval(p: &[f64], s: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
}

/// Number of right half-plane roots from the sign changes in the first
/// column of the Routh array. `None` if the array hits an exact zero.
fn routh_rhp_roots(ascending: &[f64]) -> Option<usize> {
    let desc: Vec<f64> = ascending.iter().rev().copied().collect();
    let n = desc.len();
    let width = n.div_ceil(2);
    let mut rows: Vec<Vec<f64>> = vec![
        (0..width).map(|k| *desc.get(2 * k).unwrap_or(&0.0)).collect(),
        (0..width).map(|k| *desc.get(2 * k + 1).unwrap_or(&0.0)).collect(),
    ];
    for r in 2..n {
        let (a, b) = (&rows[r - 2], &rows[r - 1]);
        if b[0] == 0.0 {
            return None;
        }
        let next: Vec<f64> =
            (0..width).map(|k| (b[0] * a.get(k + 1).unwrap_or(&0.0) - a[0] * b.get(k + 1).unwrap_or(&0.0)) / b[0]).collect();
        rows.push(next);
    }
    let first: Vec<f64> = rows.iter().take(n).map(|r| r[0]).collect();
    if first.contains(&0.0) {
        return None;
    }
    Some(first.windows(2).filter(|w| w[0].signum() != w[1].signum()).count())
}

/// All roots by Durand-Kerner iteration.
fn poly_roots(ascending: &[f64]) -> Vec<Complex64> {
    let n = ascending.len() - 1;
    let lead = ascending[n];
    let monic: Vec<f64> = ascending.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1) * radius).collect();
    for _ in 0..2000 {
        for i in 0..n {
            let den = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = poly_eval(&monic, z[i]) / den;
            z[i] -= step;
        }
    }
    z
}

/// The closed-loop roots lie well inside the band the contour resolves:
/// outside the small indentation, inside the large arc, and clear of the
/// imaginary axis.
fn well_posed(characteristic: &[f64], grid: &FrequencyGrid) -> bool {
    poly_roots(characteristic).iter().all(|r| {
        let m = r.norm();
        m > 10.0 * grid.omega_l() && m < 0.1 * grid.omega_u() && r.re.abs() > 1e-3 * m
    })
}

struct RationalLoop {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn random_loop(rng: &mut StdRng) -> RationalLoop {
    let mut den = vec![1.0];
    if rng.random_bool(0.4) {
        den = poly_mul(&den, &[0.0, 1.0]);
    }
    for _ in 0..rng.random_range(1..=2) {
        den = poly_mul(&den, &[rng.random_range(0.5..50.0), 1.0]);
    }
    if rng.random_bool(0.5) {
        let (wn, zeta) = (rng.random_range(1.0..60.0), rng.random_range(0.1..0.9));
        den = poly_mul(&den, &[wn * wn, 2.0 * zeta * wn, 1.0]);
    }
    let mut num = vec![1.0];
    for _ in 0..rng.random_range(0..den.len() - 1) {
        let z = rng.random_range(0.5..40.0);
        num = poly_mul(&num, &[if rng.random_bool(0.2) { -z } else { z }, 1.0]);
    }
    let gain = 10f64.powf(rng.random_range(-1.0..4.0));
    RationalLoop { num: num.iter().map(|c| c * gain).collect(), den }
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let grid = nyquist_grid();
    let start = Instant::now();
    let (mut stable, mut unstable, mut agree, mut windings, mut oracles_agree) = (0, 0, 0, 0, 0);
    while stable + unstable < 20 {
        let l = random_loop(&mut rng);
        let characteristic = poly_add(&l.den, &l.num);
        if !well_posed(&characteristic, &grid) {
            continue;
        }
        let Some(rhp) = routh_rhp_roots(&characteristic) else { continue };
        // ten loops of each kind
        if (rhp == 0 && stable == 10) || (rhp > 0 && unstable == 10) {
            continue;
        }
        if rhp == 0 { stable += 1 } else { unstable += 1 }
        oracles_agree += usize::from(poly_roots(&characteristic).iter().filter(|r| r.re > 0.0).count() == rhp);
        let f = |s: Complex64| Ok(poly_eval(&l.num, s) / poly_eval(&l.den, s));
        let v = nyquist_verdict(&f, &grid).map_err(|e| e.to_string())?;
        agree += usize::from(v.stable == (rhp == 0));
        windings += usize::from(v.winding_number == rhp as i32);
    }
    let elapsed = start.elapsed();
    check(
        agree == 20 && oracles_agree == 20 && elapsed < NYQUIST_BUDGET,
        format!("20/20 verdicts agree (10 stable, 10 unstable; {windings}/20 winding counts equal), {elapsed:.2?}"),
        format!("{agree}/20 verdicts agree ({oracles_agree}/20 Routh/root counts agree), {elapsed:.2?} (budget {NYQUIST_BUDGET:?})"),
    )
}

// ---------------------------------------------------------------------------
// 5. transparency monotonicity

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn criterion_5(plant: &PlantModel) -> Outcome {
    let mut violations = 0;
    let mut missing = 0;
    for alpha in [1.0, 0.7, 0.4] {
        let grid = ControllerGrid::new(alpha, linspace(0.2, 100.0, 50), linspace(0.001, 500.0, 50)).unwrap();
        let map = sweep_transparency(plant, &grid, &objective_grid(), &default_weighting()).map_err(|e| e.to_string())?;
        missing += grid.len() - map.stable_count();
        for i in 0..50 {
            for j in 0..50 {
                let c = map.get(i, j);
                if i + 1 < 50 && !(c <= map.get(i + 1, j)) {
                    violations += 1;
                }
                if j + 1 < 50 && !(c <= map.get(i, j + 1)) {
                    violations += 1;
                }
            }
        }
    }
    check(
        violations == 0 && missing == 0,
        "3 x 50x50 maps, 0 violations along m_F or b_F".into(),
        format!("{violations} monotonicity violations, {missing} missing cells"),
    )
}

// ---------------------------------------------------------------------------
// 6. Pareto filter against brute force

fn synthetic_pair(rng: &mut StdRng, quantized: bool) -> (ObjectiveMap, ObjectiveMap) {
    let grid = ControllerGrid::new(1.0, linspace(1.0, 20.0, 20), linspace(1.0, 20.0, 20)).unwrap();
    let mut c = Vec::with_capacity(400);
    let mut rho = Vec::with_capacity(400);
    for _ in 0..400 {
        if rng.random_bool(0.1) {
            c.push(None);
            rho.push(None);
        } else if quantized {
            c.push(Some(rng.random_range(1..=12) as f64));
            rho.push(Some(rng.random_range(1..=12) as f64 / 12.0));
        } else {
            c.push(Some(rng.random_range(1.0..100.0)));
            rho.push(Some(rng.random_range(0.01..1.0)));
        }
    }
    (
        ObjectiveMap::new(grid.clone(), MapKind::Transparency, c).unwrap(),
        ObjectiveMap::new(grid, MapKind::Robustness, rho).unwrap(),
    )
}

/// Cells no other cell dominates; of identical objective pairs only the
/// first cell is kept.
fn brute_force_front(c: &[Option<f64>], rho: &[Option<f64>]) -> BTreeSet<usize> {
    let cells: Vec<(usize, f64, f64)> =
        (0..c.len()).filter_map(|k| Some((k, c[k]?, rho[k]?))).collect();
    cells
        .iter()
        .filter(|&&(k, ck, rk)| {
            !cells.iter().any(|&(j, cj, rj)| {
                let dominates = cj <= ck && rj >= rk && (cj < ck || rj > rk);
                let earlier_twin = cj == ck && rj == rk && j < k;
                dominates || earlier_twin
            })
        })
        .map(|&(k, _, _)| k)
        .collect()
}

fn cell_index(grid: &ControllerGrid, p: &ParetoPoint) -> usize {
    let i = grid.m_f().iter().position(|&m| m == p.m_f).unwrap();
    let j = grid.b_f().iter().position(|&b| b == p.b_f).unwrap();
    i * grid.b_f().len() + j
}

fn criterion_6(fronts_out: &mut Vec<ParetoFront>) -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let (mut exact, mut contained) = (0, 0);
    for case in 0..25 {
        let (cm, rm) = synthetic_pair(&mut rng, case % 3 == 0);
        let pair = normalize_pair(&cm, &rm).map_err(|e| e.to_string())?;
        let front = non_dominated_filter(&pair).map_err(|e| e.to_string())?;
        let got: BTreeSet<usize> = front.points.iter().map(|p| cell_index(&pair.grid, p)).collect();
        exact += usize::from(got.len() == front.len() && got == brute_force_front(cm.values(), rm.values()));
        let scan = weight_scan(&pair, 0.001).map_err(|e| e.to_string())?;
        contained += usize::from(scan.iter().all(|s| front.points.iter().any(|p| p.same_controller(s))));
        fronts_out.push(front);
    }
    check(
        exact == 25 && contained == 25,
        "25/25 filters equal brute force, 25/25 scans contained".into(),
        format!("{exact}/25 filters equal brute force, {contained}/25 scans contained"),
    )
}

// ---------------------------------------------------------------------------
// 7. trade-off endpoints

fn criterion_7(fronts: &[ParetoFront]) -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for f in fronts.iter().filter(|f| !f.is_empty()) {
        checked += 1;
        let max_rho = f.points.iter().max_by(|a, b| a.rho.total_cmp(&b.rho)).unwrap();
        let min_c = f.points.iter().min_by(|a, b| a.c.total_cmp(&b.c)).unwrap();
        let c_max = f.points.iter().map(|p| p.c).fold(f64::NEG_INFINITY, f64::max);
        let rho_min = f.points.iter().map(|p| p.rho).fold(f64::INFINITY, f64::min);
        violations += usize::from(max_rho.c != c_max) + usize::from(min_c.rho != rho_min);
    }
    check(
        violations == 0 && checked > 0,
        format!("{checked} fronts, 0 endpoint violations"),
        format!("{violations} endpoint violations over {checked} fronts"),
    )
}

// ---------------------------------------------------------------------------
// 8. worst-case corners

fn criterion_8(plant: &PlantModel) -> Outcome {
    let freq = objective_grid();
    let nyq = nyquist_grid();
    let bounds = Scenario::S1.bounds();
    let (mut equal, mut stable, mut total) = (0, 0, 0);
    for alpha in [1.0, 0.7, 0.4] {
        let full = make_param_grid(alpha, [0.2, 100.0], 0.1, [0.001, 500.0], 1.0).unwrap();
        let rows: Vec<usize> = (0..10).map(|i| i * 110).collect();
        let cols: Vec<usize> = (0..10).map(|j| j * 55).collect();
        let sub = full.select(&rows, &cols).unwrap();
        let map = sweep_robustness(plant, &sub, &bounds, 600.0, &freq, &nyq).map_err(|e| e.to_string())?;
        for k in 0..sub.len() {
            let ctrl = sub.controller(k).unwrap();
            let mut expected = Some(f64::INFINITY);
            for (m, b) in [(0.0, 0.0), (5.0, 0.0), (0.0, 41.0), (5.0, 41.0)] {
                let zeq = EquivalentImpedance::new(m, b, 600.0).unwrap();
                expected = match (expected, vector_margin(plant, &ctrl, &zeq, &freq, &nyq)) {
                    (Some(acc), Ok(rho)) => Some(acc.min(rho)),
                    (_, Err(Error::Unstable { .. })) | (None, Ok(_)) => None,
                    (_, Err(e)) => return Err(e.to_string()),
                };
            }
            total += 1;
            stable += usize::from(expected.is_some());
            equal += usize::from(map.values()[k].map(f64::to_bits) == expected.map(f64::to_bits));
        }
    }
    check(
        equal == total,
        format!("{equal}/{total} cells bit-equal ({stable} stable, 3 orders)"),
        format!("{equal}/{total} cells bit-equal"),
    )
}

// ---------------------------------------------------------------------------
// 9. selection fixture

fn fixture_point(alpha: f64, m_f: f64, b_f: f64, rho: f64, c: f64, w: Option<f64>, omega_c: f64) -> ParetoPoint {
    ParetoPoint { alpha, m_f, b_f, c, rho, c_n: c / 20.0, rho_n: rho, weight: w, omega_c_hz: Some(omega_c) }
}

/// Published reference designs (alpha, m_F, b_F, rho, C, w) with cut-off annotations, each
/// embedded in a front whose other points violate one constraint.
fn reference_fronts() -> Vec<ParetoFront> {
    let rows = [(1.0, 3.2, 90.0, 0.553, 16.9, 0.796), (0.7, 6.0, 74.0, 0.568, 14.5, 0.755), (0.4, 16.7, 56.0, 0.594, 13.0, 0.737)];
    rows.iter()
        .map(|&(alpha, m_f, b_f, rho, c, w)| ParetoFront {
            alpha,
            points: vec![
                fixture_point(alpha, m_f * 0.6, b_f * 0.7, rho - 0.06, c - 2.0, None, 3.1),
                fixture_point(alpha, m_f * 0.8, b_f * 0.9, rho - 0.002, c - 0.5, None, 2.2),
                fixture_point(alpha, m_f, b_f, rho, c, Some(w), 2.5),
                fixture_point(alpha, m_f * 1.5, b_f * 1.1, rho + 0.05, c + 1.5, None, 2.0),
            ],
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let fronts = reference_fronts();
    for f in &fronts {
        f.check_invariants().map_err(|e| format!("fixture front: {e}"))?;
    }
    let cons = ConstraintSettings { c_max: None, rho_min: Some(0.55), omega_c_min_hz: Some(2.3), k_e_eval: 610.0 };
    let report = build_report(&fronts, &cons, SelectionPolicy::MinC, None).map_err(|e| e.to_string())?;
    let chosen = report.chosen.ok_or("no design chosen")?;
    let per_alpha_ok = report
        .per_alpha
        .iter()
        .zip(&fronts)
        .all(|(sel, f)| sel.chosen.as_ref().is_some_and(|c| c.m_f == f.points[2].m_f && c.b_f == f.points[2].b_f));
    let got = (chosen.alpha, chosen.m_f, chosen.b_f, chosen.c);
    check(
        got == (0.4, 16.7, 56.0, 13.0) && per_alpha_ok,
        format!("chose alpha={} m_F={} b_F={} C={}; each order picks its reference row", got.0, got.1, got.2, got.3),
        format!("chose {got:?}, per-order rows matched: {per_alpha_ok}"),
    )
}

// ---------------------------------------------------------------------------
// 10. front-dominance regression

fn default_front(plant: &PlantModel, alpha: f64) -> Result<ParetoFront, String> {
    let grid = make_param_grid(alpha, [0.2, 99.2], 1.0, [0.001, 495.0], 5.0).map_err(|e| e.to_string())?;
    let c = sweep_transparency(plant, &grid, &objective_grid(), &default_weighting()).map_err(|e| e.to_string())?;
    let rho = sweep_robustness(plant, &grid, &Scenario::S1.bounds(), 600.0, &objective_grid(), &nyquist_grid())
        .map_err(|e| e.to_string())?;
    let pair = MapPair::new(c, rho).map_err(|e| e.to_string())?;
    let normalized = normalize_pair(&pair.transparency, &pair.robustness).map_err(|e| e.to_string())?;
    non_dominated_filter(&normalized).map_err(|e| e.to_string())
}

fn criterion_10(plant: &PlantModel, fronts_out: &mut Vec<ParetoFront>) -> Outcome {
    let start = Instant::now();
    let reference = default_front(plant, 1.0)?;
    let challenger = default_front(plant, 0.4)?;
    let samples: Vec<f64> = (0..=20).map(|i| 0.4 + i as f64 * 0.01).collect();
    let report = compare_fronts(&reference, &challenger, &samples).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let c_ref: Vec<u64> = report.matched_samples.iter().map(|s| s.c_reference.to_bits()).collect();
    let c_chal: Vec<u64> = report.matched_samples.iter().map(|s| s.c_challenger.to_bits()).collect();
    let golden_ref: Vec<u64> = GOLDEN_C_REFERENCE.iter().map(|c| c.to_bits()).collect();
    let golden_chal: Vec<u64> = GOLDEN_C_CHALLENGER.iter().map(|c| c.to_bits()).collect();
    let ok = report.verdict == GOLDEN_VERDICT && c_ref == golden_ref && c_chal == golden_chal && elapsed < DOMINANCE_BUDGET;
    fronts_out.push(reference);
    fronts_out.push(challenger);
    check(
        ok,
        format!("{:?} over {} samples, bit-identical to golden, {elapsed:.2?}", report.verdict, report.matched_samples.len()),
        format!(
            "verdict {:?} (golden {GOLDEN_VERDICT:?}), samples match: {}, {elapsed:.2?}",
            report.verdict,
            c_ref == golden_ref && c_chal == golden_chal
        ),
    )
}

// ---------------------------------------------------------------------------
// 11. end-to-end determinism

fn run_cli(args: &[&str], threads: usize, cwd: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_phrictl"))
        .args(args)
        .current_dir(cwd)
        .env("PHRICTL_THREADS", threads.to_string())
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("phrictl {args:?} exited with {status}"))
    }
}

fn files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_11(fronts_out: &mut Vec<ParetoFront>) -> Outcome {
    let smoke = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.json");
    let smoke = smoke.to_str().unwrap();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for threads in [1, 8] {
        run_cli(&["sweep", "--config", smoke, "--out", "out"], threads, tmp.path())?;
        run_cli(&["front", "--config", smoke, "--out", "out"], threads, tmp.path())?;
        let kept = tmp.path().join(format!("threads-{threads}"));
        std::fs::rename(tmp.path().join("out"), &kept).map_err(|e| e.to_string())?;
        runs.push(files(&kept));
    }
    for (name, bytes) in &runs[0] {
        if let Some(alpha) = name.strip_prefix("alpha-").and_then(|n| n.strip_suffix("/front.json")) {
            let points: Vec<ParetoPoint> = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
            fronts_out.push(ParetoFront { alpha: alpha.parse().unwrap(), points });
        }
    }
    let identical = runs[0] == runs[1];
    check(
        identical && !runs[0].is_empty(),
        format!("sweep + front with 1 and 8 workers: {} files byte-identical", runs[0].len()),
        format!("artifacts differ between worker counts ({} vs {} files)", runs[0].len(), runs[1].len()),
    )
}

fn main() {
    let plant = default_plant(&PlantConfig::default()).unwrap();
    let mut fronts = Vec::new();
    let outcomes: Vec<(u32, &str, Outcome)> = vec![
        (1, "vector-margin identity", criterion_1()),
        (2, "IOAC limit", criterion_2()),
        (3, "effective-impedance reconstruction", criterion_3()),
        (4, "Nyquist oracle", criterion_4()),
        (5, "transparency monotonicity", criterion_5(&plant)),
        (6, "Pareto oracle", criterion_6(&mut fronts)),
        (8, "worst-case corners", criterion_8(&plant)),
        (9, "selection fixture", criterion_9()),
        (10, "front-dominance regression", criterion_10(&plant, &mut fronts)),
        (11, "determinism", criterion_11(&mut fronts)),
    ];
    let mut outcomes = outcomes;
    outcomes.push((7, "trade-off endpoints", criterion_7(&fronts)));
    outcomes.sort_by_key(|o| o.0);

    let mut failed = 0;
    for (n, name, outcome) in &outcomes {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
