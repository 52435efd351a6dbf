//! Strict run configuration read from a flat TOML file.

use std::fmt;
use std::path::Path;

use fockgabor::counterexample::ConstructionParams;
use fockgabor::num::QuadratureSpec;
use serde::Deserialize;

/// Keys accepted in the configuration file.
pub const KEYS: [&str; 8] = [
    "q",
    "levels",
    "tol_root",
    "tol_solve",
    "quad_radius",
    "quad_step",
    "trunc",
    "section_sizes",
];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    q: Option<u32>,
    levels: Option<usize>,
    tol_root: Option<f64>,
    tol_solve: Option<f64>,
    quad_radius: Option<f64>,
    quad_step: Option<f64>,
    trunc: Option<f64>,
    section_sizes: Option<Vec<usize>>,
}

/// A configuration problem, anchored to a line of the file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Validated parameters shared by every suite.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ConstructionParams,
    /// Base truncation radius of the lattice-series identities.
    pub trunc: f64,
    pub section_sizes: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_str("").expect("defaults are valid")
    }
}

fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of_offset(text, s.start)),
            message: e.message().to_string(),
        })?;
        let at = |key: &str, message: String| ConfigError { line: key_line(text, key), message };

        let q = raw.q.unwrap_or(8);
        let levels = raw.levels.unwrap_or(3);
        if q < 4 {
            return Err(at("q", format!("q must be at least 4, got {q}")));
        }
        if levels == 0 || levels > 12 {
            return Err(at("levels", format!("levels must be in 1..=12, got {levels}")));
        }
        let mut params = ConstructionParams::new(q, levels).map_err(|e| at("q", e.to_string()))?;
        if let Some(t) = raw.tol_root {
            params.tol_root = t;
        }
        if let Some(t) = raw.tol_solve {
            params.tol_solve = t;
        }
        if let Some(t) = raw.trunc {
            params.trunc = t;
        }
        let radius = raw.quad_radius.unwrap_or(params.spec.truncation_radius);
        let step = raw.quad_step.unwrap_or(params.spec.step);
        for (key, v) in [("quad_radius", radius), ("quad_step", step)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(at(key, format!("{key} must be positive, got {v}")));
            }
        }
        params.spec = QuadratureSpec::new(radius, step).map_err(|e| at("quad_step", e.to_string()))?;
        for (key, v) in [("tol_root", params.tol_root), ("tol_solve", params.tol_solve)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(at(key, format!("{key} must lie in (0, 1), got {v}")));
            }
        }
        if !(params.trunc >= 4.0 && params.trunc <= 40.0) {
            return Err(at("trunc", format!("trunc must lie in [4, 40], got {}", params.trunc)));
        }
        let need = ConstructionParams::required_radius(q, levels);
        if radius < need {
            return Err(at(
                "quad_radius",
                format!("quad_radius {radius} does not cover the construction (needs at least {need:.3})"),
            ));
        }
        params.validate().map_err(|e| at("quad_step", e.to_string()))?;

        let section_sizes = raw.section_sizes.unwrap_or_else(|| vec![8, 12, 16]);
        if section_sizes.is_empty() || section_sizes[0] == 0 || section_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(at("section_sizes", "section_sizes must be positive and increasing".into()));
        }
        if *section_sizes.last().unwrap() > 64 {
            return Err(at("section_sizes", "section sizes above 64 are not supported".into()));
        }
        Ok(RunConfig { trunc: params.trunc, params, section_sizes })
    }

    /// `key = value` lines for every setting, defaults included.
    pub fn echo(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let sizes: Vec<String> = self.section_sizes.iter().map(|s| s.to_string()).collect();
        vec![
            ("q".into(), p.q.to_string()),
            ("levels".into(), p.levels.to_string()),
            ("tol_root".into(), format!("{:e}", p.tol_root)),
            ("tol_solve".into(), format!("{:e}", p.tol_solve)),
            ("quad_radius".into(), format!("{}", p.spec.truncation_radius)),
            ("quad_step".into(), format!("{}", p.spec.step)),
            ("trunc".into(), format!("{}", self.trunc)),
            ("section_sizes".into(), format!("[{}]", sizes.join(", "))),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.params.q, 8);
        assert_eq!(c.params.levels, 3);
        assert_eq!(c.params.spec.truncation_radius, 52.0);
        assert_eq!(c.params.spec.step, 0.1);
        assert_eq!(c.trunc, 12.0);
        assert_eq!(c.section_sizes, vec![8, 12, 16]);
        assert_eq!(c.echo().len(), KEYS.len());
    }

    #[test]
    fn overrides() {
        let c = RunConfig::from_str("q = 16\nlevels = 2\nquad_step = 0.05\nsection_sizes = [4, 6]\n").unwrap();
        assert_eq!(c.params.nodes(), vec![16.0, 32.0]);
        assert_eq!(c.params.spec.step, 0.05);
        assert_eq!(c.section_sizes, vec![4, 6]);
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let e = RunConfig::from_str("q = 8\n\nradius = 3\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("radius"), "{e}");
    }

    #[test]
    fn bad_values_point_at_their_key() {
        let e = RunConfig::from_str("q = 8\nlevels = 3\nquad_radius = 20\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = RunConfig::from_str("tol_root = 2.0\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = RunConfig::from_str("\nsection_sizes = [8, 8]").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = RunConfig::from_str("q = \"eight\"").unwrap_err();
        assert_eq!(e.line, Some(1));
        assert!(RunConfig::from_str("q = 3").is_err());
    }
}
