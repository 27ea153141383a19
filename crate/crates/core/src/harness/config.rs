use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::differences::ModulusRequest;
use crate::functions::{corpus, lookup, FunctionSpec};
use crate::geometry::{Exponent, MultiIndex, Parallelepiped, QuadratureSpec, StepVector};
use crate::polyapprox::FitConfig;
use crate::smoother::{KConfig, SmootherConfig};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// The base box, either one interval used on every axis or explicit corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxSpec {
    Cube { a: f64, b: f64 },
    Corners { lower: Vec<f64>, upper: Vec<f64> },
}

impl Default for BoxSpec {
    fn default() -> Self {
        BoxSpec::Cube { a: 0.0, b: 1.0 }
    }
}

impl BoxSpec {
    pub fn for_dim(&self, d: usize) -> Result<Parallelepiped, HarnessError> {
        let q = match self {
            BoxSpec::Cube { a, b } => Parallelepiped::cube(d, *a, *b),
            BoxSpec::Corners { lower, upper } => {
                if lower.len() != d {
                    return Err(HarnessError::Config(format!(
                        "box has dimension {}, but a {d}-dimensional run was requested",
                        lower.len()
                    )));
                }
                Parallelepiped::new(lower.clone(), upper.clone())
            }
        };
        q.map_err(|e| HarnessError::Config(format!("invalid box: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Resolutions {
    pub h_grid: usize,
    pub quad_nodes: usize,
    pub linf_points: usize,
    pub mean_nodes: usize,
    /// Minimax / L1 fitting points per axis; `None` uses `max(4 r_i, 17)`.
    pub minimax_grid: Option<usize>,
    pub knot_nodes: usize,
    pub combine_subdomains: bool,
    /// Nodes per graded panel near a function's singular coordinates for
    /// step-scale quantities; 0 keeps the plain tensor rule.
    pub graded_panel_nodes: usize,
}

impl Resolutions {
    pub const DEFAULT_GRADED_PANEL_NODES: usize = 8;
    /// Smallest graded panel as a fraction of the step.
    pub const GRADING_FLOOR: f64 = 0.25;
}

impl Default for Resolutions {
    fn default() -> Self {
        Resolutions {
            h_grid: ModulusRequest::DEFAULT_H_GRID,
            quad_nodes: QuadratureSpec::DEFAULT_NODES,
            linf_points: QuadratureSpec::DEFAULT_LINF_POINTS,
            mean_nodes: ModulusRequest::DEFAULT_MEAN_NODES,
            minimax_grid: None,
            knot_nodes: SmootherConfig::DEFAULT_KNOT_NODES,
            combine_subdomains: true,
            graded_panel_nodes: Resolutions::DEFAULT_GRADED_PANEL_NODES,
        }
    }
}

/// One JSON document describing a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Corpus ids; empty selects every corpus entry of a listed dimension.
    #[serde(default)]
    pub function_ids: Vec<String>,
    #[serde(default = "default_dimensions")]
    pub dimensions: Vec<usize>,
    /// Orders `r`; each is used with the functions of matching dimension.
    pub orders: Vec<Vec<usize>>,
    pub p_values: Vec<Exponent>,
    #[serde(default, rename = "box")]
    pub box_spec: BoxSpec,
    #[serde(default = "default_shrink_levels")]
    pub shrink_levels: usize,
    #[serde(default = "default_t_sweep")]
    pub t_sweep: usize,
    /// Smallest sweep value as a fraction of the largest.
    #[serde(default = "default_t_span")]
    pub t_span: f64,
    #[serde(default)]
    pub resolutions: Resolutions,
    /// Explicit step vector for the single-evaluation subcommands.
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub record_runtime: bool,
}

fn default_dimensions() -> Vec<usize> {
    vec![1, 2]
}

fn default_shrink_levels() -> usize {
    4
}

fn default_t_sweep() -> usize {
    12
}

fn default_t_span() -> f64 {
    0.01
}

impl ExperimentConfig {
    /// A config with library-default resolutions.
    pub fn new(orders: Vec<Vec<usize>>, p_values: Vec<Exponent>) -> Self {
        ExperimentConfig {
            function_ids: Vec::new(),
            dimensions: default_dimensions(),
            orders,
            p_values,
            box_spec: BoxSpec::default(),
            shrink_levels: default_shrink_levels(),
            t_sweep: default_t_sweep(),
            t_span: default_t_span(),
            resolutions: Resolutions::default(),
            t: None,
            output: None,
            record_runtime: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        for id in &self.function_ids {
            if let Err(e) = lookup(id) {
                return bad(e.to_string());
            }
        }
        if self.dimensions.is_empty() || self.dimensions.contains(&0) {
            return bad("dimensions must be a non-empty list of positive integers".into());
        }
        if self.orders.is_empty() {
            return bad("at least one order r is required".into());
        }
        for r in &self.orders {
            if r.is_empty() || r.contains(&0) {
                return bad(format!("order {r:?} must have positive entries"));
            }
        }
        if self.p_values.is_empty() {
            return bad("at least one exponent p is required".into());
        }
        if self.t_sweep == 0 {
            return bad("t_sweep must be at least 1".into());
        }
        if !(self.t_span > 0.0 && self.t_span <= 1.0) {
            return bad(format!("t_span must lie in (0, 1], got {}", self.t_span));
        }
        let res = &self.resolutions;
        if res.h_grid < 2 {
            return bad(format!("h_grid must be at least 2, got {}", res.h_grid));
        }
        if res.quad_nodes == 0 || res.mean_nodes == 0 || res.knot_nodes == 0 {
            return bad("quadrature node counts must be positive".into());
        }
        if res.linf_points < 2 {
            return bad("linf_points must be at least 2".into());
        }
        if let Some(t) = &self.t {
            if t.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return bad(format!("t must be finite and non-negative, got {t:?}"));
            }
        }
        for d in &self.dimensions {
            self.box_spec.for_dim(*d).or_else(|e| match self.box_spec {
                // explicit corners pin one dimension; others are skipped
                BoxSpec::Corners { .. } => Ok(Parallelepiped::unit(*d)),
                _ => Err(e),
            })?;
        }
        Ok(())
    }

    /// Selected functions in config order, or the corpus order when none are named.
    pub fn functions(&self) -> Vec<FunctionSpec> {
        let all: Vec<FunctionSpec> = if self.function_ids.is_empty() {
            corpus()
        } else {
            self.function_ids
                .iter()
                .map(|id| lookup(id).expect("validated id"))
                .collect()
        };
        all.into_iter()
            .filter(|f| self.dimensions.contains(&f.dim()))
            .collect()
    }

    pub fn orders_for(&self, d: usize) -> Vec<MultiIndex> {
        self.orders
            .iter()
            .filter(|r| r.len() == d)
            .map(|r| MultiIndex::new(r.clone()))
            .collect()
    }

    /// The base box in dimension `d`, or `None` when explicit corners pin another dimension.
    pub fn base_box(&self, d: usize) -> Option<Parallelepiped> {
        self.box_spec.for_dim(d).ok()
    }

    pub fn quad(&self) -> QuadratureSpec {
        QuadratureSpec::uniform(self.resolutions.quad_nodes, self.resolutions.linf_points)
            .expect("validated resolutions")
    }

    /// The quadrature for quantities at step `t`: panels graded toward the
    /// singular coordinates of `f` down to a fraction of the smallest step.
    pub fn quad_near(&self, f: &FunctionSpec, t: &StepVector) -> QuadratureSpec {
        let base = self.quad();
        let n = self.resolutions.graded_panel_nodes;
        let step = t
            .entries()
            .iter()
            .copied()
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min);
        if n == 0 || !step.is_finite() {
            return base;
        }
        base.graded_toward(f.singular_points(), Resolutions::GRADING_FLOOR * step, n)
            .expect("positive floor and node count")
    }

    pub fn k_config_near(&self, f: &FunctionSpec, t: &StepVector) -> KConfig {
        KConfig {
            quad: self.quad_near(f, t),
            ..self.k_config()
        }
    }

    pub fn fit_config(&self) -> FitConfig {
        let cfg = FitConfig::new(self.quad());
        match self.resolutions.minimax_grid {
            Some(n) => cfg.with_grid(vec![n]),
            None => cfg,
        }
    }

    pub fn k_config(&self) -> KConfig {
        KConfig {
            quad: self.quad(),
            h_grid: self.resolutions.h_grid,
            smoother: SmootherConfig {
                knot_nodes: self.resolutions.knot_nodes,
            },
            combine_subdomains: self.resolutions.combine_subdomains,
        }
    }

    /// `t` for single evaluations; defaults to `fallback`.
    pub fn step_or(&self, fallback: StepVector) -> StepVector {
        match &self.t {
            Some(t) if t.len() == fallback.dim() => StepVector::new(t.clone()),
            Some(t) if t.len() == 1 => StepVector::splat(fallback.dim(), t[0]),
            _ => fallback,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inf_and_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"function_ids": ["exp_d1"], "orders": [[2]], "p_values": [1, 2, "inf"]}"#,
        )
        .unwrap();
        assert!(cfg.p_values[2].is_infinite());
        assert_eq!(cfg.shrink_levels, 4);
        assert_eq!(cfg.resolutions, Resolutions::default());
        assert_eq!(cfg.base_box(1).unwrap(), Parallelepiped::unit(1));
        assert_eq!(cfg.functions().len(), 1);
    }

    #[test]
    fn rejects_unknown_ids_and_bad_values() {
        for text in [
            r#"{"function_ids": ["nope"], "orders": [[1]], "p_values": [2]}"#,
            r#"{"orders": [[0]], "p_values": [2]}"#,
            r#"{"orders": [[1]], "p_values": [0.5]}"#,
            r#"{"orders": [[1]], "p_values": ["infinity"]}"#,
            r#"{"orders": [[1]], "p_values": [2], "resolutions": {"h_grid": 1}}"#,
            r#"{"orders": [[1]], "p_values": [2], "surprise": 1}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(HarnessError::Config(_))), "{text}");
        }
    }

    #[test]
    fn explicit_box_pins_dimension() {
        let cfg = ExperimentConfig::from_json(
            r#"{"orders": [[1, 1]], "p_values": [2], "box": {"lower": [0, -1], "upper": [2, 1]}, "dimensions": [2]}"#,
        )
        .unwrap();
        assert_eq!(cfg.base_box(2).unwrap().to_string(), "0:2x-1:1");
        assert!(cfg.base_box(1).is_none());
        assert_eq!(cfg.orders_for(1).len(), 0);
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ExperimentConfig::new(vec![vec![1], vec![2, 2]], vec![Exponent::ONE, Exponent::INFINITY]);
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}
