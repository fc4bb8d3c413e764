//! Sweep, front, select and bundle stages sharing one output directory.
//!
//! Every per-order directory carries the resolved config its files were
//! produced with. A stage reuses upstream artifacts when the parts of that
//! config they depend on match the current run, and recomputes them in-line
//! otherwise.

use std::fs;
use std::path::PathBuf;

use admittance_pareto::maps::{normalize_pair, sweep_robustness, sweep_transparency, MapKind, MapPair};
use admittance_pareto::metrics::stability_boundary;
use admittance_pareto::pareto::{assemble_front, non_dominated_filter, weight_scan, ParetoFront};
use admittance_pareto::select::CutoffContext;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::artifacts::{self, alpha_dir};
use crate::bundle::{BundleMaps, ExplorerBundle, BUNDLE_VERSION};
use crate::config::{Resolved, ToolkitConfig};
use crate::error::{CliError, CliResult};
use crate::report::{build_report, SelectionReport};

fn sweep_key(cfg: &ToolkitConfig) -> Value {
    json!({
        "plant": cfg.plant,
        "scenario": cfg.scenario,
        "k_eq": cfg.k_eq,
        "grid": cfg.grid,
        "frequency": cfg.frequency,
        "weighting": cfg.weighting,
        "boundary_k_eq": cfg.boundary_k_eq,
    })
}

fn front_key(cfg: &ToolkitConfig) -> Value {
    json!({
        "sweep": sweep_key(cfg),
        "weight_step": cfg.weight_step,
        "k_e_eval": cfg.constraints.k_e_eval,
    })
}

pub struct Pipeline {
    pub resolved: Resolved,
    pub out: PathBuf,
}

impl Pipeline {
    pub fn new(resolved: Resolved) -> Self {
        let out = resolved.config.output_dir.clone();
        Self { resolved, out }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.resolved.config.alphas
    }

    fn config(&self) -> &ToolkitConfig {
        &self.resolved.config
    }

    fn dir_config_path(&self, alpha: f64) -> PathBuf {
        alpha_dir(&self.out, alpha).join("config.json")
    }

    fn dir_config(&self, alpha: f64) -> CliResult<Option<ToolkitConfig>> {
        artifacts::read_json(&self.dir_config_path(alpha))
    }

    fn write_dir_config(&self, alpha: f64) -> CliResult<()> {
        artifacts::write_json(&self.dir_config_path(alpha), self.config(), true)
    }

    /// Record the resolved config at the top of the output directory.
    pub fn write_run_config(&self) -> CliResult<()> {
        artifacts::write_json(&self.out.join("config.json"), self.config(), true)
    }

    fn context(&self) -> CutoffContext<'_> {
        CutoffContext { plant: &self.resolved.plant, grid: &self.resolved.freq }
    }

    /// Sweep both maps for one order, write them with any requested
    /// stability boundaries, and drop a front that no longer matches.
    pub fn sweep_alpha(&self, alpha: f64) -> CliResult<MapPair> {
        let r = &self.resolved;
        let grid = r.grid(alpha)?;
        let c = sweep_transparency(&r.plant, &grid, &r.freq, &r.weighting)?;
        let rho = sweep_robustness(&r.plant, &grid, &r.bounds, r.k_eq, &r.freq, &r.nyquist)?;
        let pair = MapPair::new(c, rho)?;

        let dir = alpha_dir(&self.out, alpha);
        let stale_front = self.dir_config(alpha)?.is_none_or(|old| front_key(&old) != front_key(self.config()));
        if dir.exists() {
            for entry in fs::read_dir(&dir).map_err(|e| CliError::io(format!("listing {}", dir.display()), e))? {
                let path = entry.map_err(|e| CliError::io(format!("listing {}", dir.display()), e))?.path();
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
                if name.starts_with("boundary_k-") || (stale_front && name.starts_with("front.")) {
                    fs::remove_file(&path).map_err(|e| CliError::io(format!("removing {}", path.display()), e))?;
                }
            }
        }
        artifacts::write_map(&self.out, &pair.transparency)?;
        artifacts::write_map(&self.out, &pair.robustness)?;
        let b_axis = grid.b_f();
        let b_range = [b_axis[0], b_axis[b_axis.len() - 1]];
        for &k in &self.config().boundary_k_eq {
            let points = stability_boundary(&r.plant, alpha, k, grid.m_f(), &r.bounds, b_range, &r.nyquist)?;
            artifacts::write_boundary(&self.out, alpha, k, &points)?;
        }
        self.write_dir_config(alpha)?;
        let total = pair.transparency.grid.len();
        eprintln!("alpha {alpha}: {} of {total} cells stable", pair.robustness.stable_count());
        Ok(pair)
    }

    pub fn sweep(&self) -> CliResult<Vec<MapPair>> {
        self.write_run_config()?;
        self.alphas().iter().map(|&a| self.sweep_alpha(a)).collect()
    }

    /// Maps from disk when they belong to this configuration, else a fresh sweep.
    pub fn maps_for(&self, alpha: f64) -> CliResult<MapPair> {
        if let Some(old) = self.dir_config(alpha)? {
            if sweep_key(&old) == sweep_key(self.config()) {
                let c = artifacts::read_map(&self.out, alpha, MapKind::Transparency)?;
                let rho = artifacts::read_map(&self.out, alpha, MapKind::Robustness)?;
                if let (Some(c), Some(rho)) = (c, rho) {
                    return Ok(MapPair::new(c, rho)?);
                }
            }
        }
        self.sweep_alpha(alpha)
    }

    /// Pareto front of one map pair with weight and cut-off annotations.
    pub fn front_from_maps(&self, pair: &MapPair) -> CliResult<ParetoFront> {
        let alpha = pair.transparency.grid.alpha;
        if pair.robustness.stable_count() == 0 {
            eprintln!("warning: alpha {alpha} has no stable cells; its front is empty");
            return Ok(ParetoFront { alpha, points: Vec::new() });
        }
        let normalized = normalize_pair(&pair.transparency, &pair.robustness)?;
        let scan = weight_scan(&normalized, self.config().weight_step)?;
        let filtered = non_dominated_filter(&normalized)?;
        let mut front = assemble_front(&scan, &filtered)?;
        let ctx = self.context();
        let k_e = self.resolved.constraints.k_e_eval;
        let cutoffs: Vec<CliResult<f64>> =
            front.points.par_iter().map(|p| ctx.cutoff_hz(p, k_e).map_err(CliError::from)).collect();
        for (p, wc) in front.points.iter_mut().zip(cutoffs) {
            p.omega_c_hz = Some(wc?);
        }
        front.check_invariants()?;
        Ok(front)
    }

    fn front_alpha(&self, alpha: f64) -> CliResult<ParetoFront> {
        let pair = self.maps_for(alpha)?;
        let front = self.front_from_maps(&pair)?;
        artifacts::write_front(&self.out, alpha, &front.points)?;
        self.write_dir_config(alpha)?;
        eprintln!("alpha {alpha}: front of {} points", front.len());
        Ok(front)
    }

    pub fn front(&self) -> CliResult<Vec<ParetoFront>> {
        self.write_run_config()?;
        self.alphas().iter().map(|&a| self.front_alpha(a)).collect()
    }

    /// Front from disk when it belongs to this configuration, else recomputed.
    pub fn front_for(&self, alpha: f64) -> CliResult<ParetoFront> {
        if let Some(old) = self.dir_config(alpha)? {
            if front_key(&old) == front_key(self.config()) {
                if let Some(points) = artifacts::read_front(&self.out, alpha)? {
                    let front = ParetoFront { alpha, points };
                    front.check_invariants()?;
                    return Ok(front);
                }
            }
        }
        self.front_alpha(alpha)
    }

    fn fronts(&self) -> CliResult<Vec<ParetoFront>> {
        self.alphas().iter().map(|&a| self.front_for(a)).collect()
    }

    fn report(&self, fronts: &[ParetoFront]) -> CliResult<SelectionReport> {
        let ctx = self.context();
        let report = build_report(fronts, &self.config().constraints, self.config().policy, Some(&ctx))?;
        artifacts::write_json(&artifacts::selection_path(&self.out), &report, true)?;
        if report.chosen.is_none() {
            eprintln!("warning: no design satisfies the constraints");
        }
        Ok(report)
    }

    pub fn select(&self) -> CliResult<SelectionReport> {
        self.write_run_config()?;
        let fronts = self.fronts()?;
        self.report(&fronts)
    }

    pub fn bundle(&self, downsample: usize) -> CliResult<ExplorerBundle> {
        self.write_run_config()?;
        let fronts = self.fronts()?;
        let maps = self
            .alphas()
            .iter()
            .map(|&a| {
                let pair = self.maps_for(a)?;
                Ok(BundleMaps::new(&pair.transparency, &pair.robustness, downsample))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let selection = self.report(&fronts)?;
        let bundle =
            ExplorerBundle { version: BUNDLE_VERSION.to_string(), config: self.config().clone(), fronts, maps, selection };
        bundle.validate()?;
        artifacts::write_json(&artifacts::bundle_path(&self.out), &bundle, false)?;
        Ok(bundle)
    }
}
