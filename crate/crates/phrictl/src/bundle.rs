//! Self-contained explorer bundle: fronts, downsampled maps and the
//! selection report in a single JSON document.

use admittance_pareto::maps::ObjectiveMap;
use admittance_pareto::pareto::ParetoFront;
use serde::{Deserialize, Serialize};

use crate::artifacts::MapJson;
use crate::config::ToolkitConfig;
use crate::error::{CliError, CliResult};
use crate::report::SelectionReport;

pub const BUNDLE_VERSION: &str = "phrictl-bundle/1";

/// Largest map side shipped in a bundle.
pub const MAX_MAP_SIDE: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleMaps {
    pub alpha: f64,
    /// `[m_F stride, b_F stride]` applied to the full-resolution maps.
    pub stride: [usize; 2],
    pub transparency: MapJson,
    pub robustness: MapJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplorerBundle {
    pub version: String,
    pub config: ToolkitConfig,
    pub fronts: Vec<ParetoFront>,
    pub maps: Vec<BundleMaps>,
    pub selection: SelectionReport,
}

/// Smallest stride `>= requested` that brings `n` samples down to at most
/// [`MAX_MAP_SIDE`].
pub fn stride_for(n: usize, requested: usize) -> usize {
    requested.max(1).max(n.div_ceil(MAX_MAP_SIDE))
}

impl BundleMaps {
    pub fn new(transparency: &ObjectiveMap, robustness: &ObjectiveMap, downsample: usize) -> Self {
        let (rows, cols) = transparency.grid.dims();
        let stride = [stride_for(rows, downsample), stride_for(cols, downsample)];
        Self {
            alpha: transparency.grid.alpha,
            stride,
            transparency: MapJson::from(&transparency.strided(stride[0], stride[1])),
            robustness: MapJson::from(&robustness.strided(stride[0], stride[1])),
        }
    }
}

impl ExplorerBundle {
    pub fn validate(&self) -> CliResult<()> {
        if self.version != BUNDLE_VERSION {
            return Err(CliError::Compute(format!("bundle version {:?}, expected {BUNDLE_VERSION:?}", self.version)));
        }
        for f in &self.fronts {
            f.check_invariants()
                .map_err(|e| CliError::Compute(format!("bundle front for alpha {}: {e}", f.alpha)))?;
        }
        for m in &self.maps {
            for map in [&m.transparency, &m.robustness] {
                let rows = map.values.len();
                let cols = map.values.first().map_or(0, Vec::len);
                if rows > MAX_MAP_SIDE || cols > MAX_MAP_SIDE {
                    return Err(CliError::Compute(format!("bundle map for alpha {} is {rows}x{cols}", m.alpha)));
                }
                ObjectiveMap::try_from(map.clone())?;
            }
        }
        Ok(())
    }

    pub fn from_slice(bytes: &[u8]) -> CliResult<Self> {
        let bundle: Self =
            serde_json::from_slice(bytes).map_err(|e| CliError::Compute(format!("malformed bundle: {e}")))?;
        bundle.validate()?;
        Ok(bundle)
    }
}
