//! Tunable parameters with their default values.
//!
//! Everything here round-trips through JSON so scenario files and the CLI
//! `--config` flag can override any subset of fields.

use serde::{Deserialize, Serialize};

use crate::manoeuvrability::GridSpec;

/// Parameters of the tool analysis pipeline.
///
/// Quantities that scale with the object radius are stored as factors:
/// `kappa_thresh = kappa_thresh_factor / r_obj`, `rdp_eps = rdp_eps_factor *
/// r_obj`, `cluster_eps = cluster_eps_factor * r_obj`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisParams {
    /// Grid cell size in meters.
    pub cell_size: f64,
    /// Gaussian sigma of the affordance envelope, as a fraction of the
    /// segment length.
    pub sigma_frac: f64,
    /// Arc tolerance used when polygonizing the offset contour.
    pub arc_tol: f64,
    /// Arc-length resampling step for the contour before curvature.
    pub resample_step: f64,
    /// Moving-average window for curvature smoothing.
    pub smoothing_window: usize,
    pub kappa_thresh_factor: f64,
    pub rdp_eps_factor: f64,
    pub cluster_eps_factor: f64,
    /// DBSCAN core-point threshold.
    pub min_pts: usize,
    /// Explicit grid; auto-fitted around the tool when absent.
    pub grid: Option<GridSpec>,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            cell_size: 0.002,
            sigma_frac: 0.25,
            arc_tol: 1e-3,
            resample_step: 0.002,
            smoothing_window: 5,
            kappa_thresh_factor: 0.5,
            rdp_eps_factor: 0.5,
            cluster_eps_factor: 1.5,
            min_pts: 1,
            grid: None,
        }
    }
}

impl AnalysisParams {
    pub fn kappa_thresh(&self, r_obj: f64) -> f64 {
        self.kappa_thresh_factor / r_obj
    }

    pub fn rdp_eps(&self, r_obj: f64) -> f64 {
        self.rdp_eps_factor * r_obj
    }

    pub fn cluster_eps(&self, r_obj: f64) -> f64 {
        self.cluster_eps_factor * r_obj
    }
}

/// Parameters of the interact controller.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct InteractParams {
    /// Per-step fraction of the remaining gap, in (0, 1].
    pub k_int: f64,
    /// Position tolerance that switches the controller to pure rotation.
    pub pos_tol: f64,
    /// Maximum rotation per step, radians.
    pub rot_rate: f64,
}

impl Default for InteractParams {
    fn default() -> Self {
        InteractParams {
            k_int: 0.5,
            pos_tol: 0.002,
            rot_rate: 15f64.to_radians(),
        }
    }
}

/// Parameters of the confined-area stepping controller.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SteppingParams {
    /// Reposition gain, in (0, 1].
    pub k: f64,
    /// Rotation-drag translation gain, in (0, 1].
    pub w: f64,
    /// Incremental rotation per drag action, radians.
    pub angle_rot: f64,
    /// Angular tolerance of the tip-parallel-to-exit loop guard.
    pub parallel_tol: f64,
    /// Keep the update law's published sign convention; when false the
    /// clockwise branch uses the mirror-symmetric increment instead.
    pub strict_paper_signs: bool,
}

impl Default for SteppingParams {
    fn default() -> Self {
        SteppingParams {
            k: 0.5,
            w: 0.5,
            angle_rot: 10f64.to_radians(),
            parallel_tol: 5f64.to_radians(),
            strict_paper_signs: true,
        }
    }
}

/// Simulator execution settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    /// Frame budget per motion function.
    pub frame_budget: usize,
    /// Success tolerance on the object-to-goal distance.
    pub goal_tol: f64,
    /// Distance slack for reporting tool-object contact.
    pub contact_eps: f64,
    /// Step length of the straight extraction drag, meters per frame.
    pub extract_step: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            frame_budget: 2000,
            goal_tol: 0.005,
            contact_eps: 1e-3,
            extract_step: 0.005,
        }
    }
}

/// Aggregate of every tunable, as accepted by scenario files and `--config`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunParams {
    pub analysis: AnalysisParams,
    pub interact: InteractParams,
    pub stepping: SteppingParams,
    pub sim: SimParams,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_defaults() {
        let params: RunParams =
            serde_json::from_str(r#"{"sim": {"goal_tol": 0.003}}"#).unwrap();
        assert_eq!(params.sim.goal_tol, 0.003);
        assert_eq!(params.sim.frame_budget, 2000);
        assert_eq!(params.analysis.cell_size, 0.002);
        assert_eq!(params.stepping.k, 0.5);
    }
}
