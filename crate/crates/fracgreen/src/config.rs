//! JSON run configuration. Every table rejects unknown keys and every error
//! names the offending key path.

use std::fs;
use std::path::{Path, PathBuf};

use fracgreen_core::solver::{SolveOptions, SweepOptions};
use fracgreen_core::verify::SUITES;
use fracgreen_core::{AngularScheme, Error as CoreError, ModelParams};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: at `{key}`: {message}")]
    Parse {
        path: PathBuf,
        key: String,
        message: String,
    },
    #[error("invalid config: `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub n: usize,
    pub alpha: f64,
    /// Power exponent for `solve-ball`, `moving-plane` and the single cascade
    /// report of `liouville-scan`.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub kernel: KernelEvalConfig,
    #[serde(default)]
    pub liouville: ScanConfig,
    #[serde(default = "default_suites")]
    pub suites: Vec<SuiteSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub fault_injection: FaultInjection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub ball: BallGridConfig,
    pub slab: SlabGridConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BallGridConfig {
    pub radial: usize,
    pub angular: usize,
    /// Defaults to `icosahedral_orbit` for n = 3 and a seeded random scheme otherwise.
    pub scheme: Option<AngularScheme>,
}

impl Default for BallGridConfig {
    fn default() -> Self {
        Self {
            radial: 16,
            angular: 120,
            scheme: None,
        }
    }
}

/// Box `[lo, hi]` inside the closed half-space; empty vectors pick
/// `[-2, 2]^{n-1} × [0, 2]`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlabGridConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    /// Jacobi nodes per kernel rule.
    pub nodes: usize,
    /// Tolerance of the adaptive reference integrals.
    pub tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            nodes: 48,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Number of λ values, uniform in `(lo, hi]`.
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    /// 1-based axes; empty means all.
    pub axes: Vec<usize>,
    pub options: SweepOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            count: 64,
            lo: -1.0,
            hi: 0.0,
            axes: Vec::new(),
            options: SweepOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelDomain {
    UnitBall,
    HalfSpace,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelEvalConfig {
    pub domain: KernelDomain,
    /// Second argument of `G(x, pole)`; defaults to the origin (ball) or `e_n` (half-space).
    pub pole: Option<Vec<f64>>,
}

impl Default for KernelEvalConfig {
    fn default() -> Self {
        Self {
            domain: KernelDomain::UnitBall,
            pole: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub dims: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Exponents per `(n, α)`, evenly spaced in `(1, (n+α)/(n-α)]`.
    pub p_count: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            dims: vec![3, 4, 5],
            alphas: (1..=9).map(|k| 0.2 * k as f64).collect(),
            p_count: 50,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub name: String,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

/// Test hook: multiplies the Green constant `B` of every kernel the run builds.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultInjection {
    pub b_scale: f64,
}

impl Default for FaultInjection {
    fn default() -> Self {
        Self { b_scale: 1.0 }
    }
}

fn default_samples() -> usize {
    1000
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_suites() -> Vec<SuiteSpec> {
    SUITES
        .iter()
        .map(|s| SuiteSpec {
            name: s.to_string(),
            samples: default_samples(),
        })
        .collect()
}

/// Read, parse and validate a config file.
pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = parse_config(&text).map_err(|e| match e {
        ConfigError::Parse { key, message, .. } => ConfigError::Parse {
            path: path.to_path_buf(),
            key,
            message,
        },
        other => other,
    })?;
    Ok(cfg)
}

/// Parse and validate config text.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        ConfigError::Parse {
            path: PathBuf::from("<config>"),
            key: if key == "." { "<root>".into() } else { key },
            message: e.into_inner().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl Config {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            n: self.n,
            alpha: self.alpha,
            p: self.p,
        }
    }

    /// Exponent used by the solver: `p` if given, else 1.8 when admissible,
    /// else the midpoint of `(1, (n+α)/(n-α)]`.
    pub fn solve_exponent(&self) -> f64 {
        if let Some(p) = self.p {
            return p;
        }
        let crit = self.params().critical_exponent();
        if 1.8 <= crit {
            1.8
        } else {
            0.5 * (1.0 + crit)
        }
    }

    pub fn ball_scheme(&self) -> AngularScheme {
        match self.grid.ball.scheme {
            Some(s) => s,
            None if self.n == 3 => AngularScheme::IcosahedralOrbit,
            None => AngularScheme::QuasiRandom { seed: self.seed },
        }
    }

    /// Slab box with defaults filled in.
    pub fn slab(&self) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
        let n = self.n;
        let s = &self.grid.slab;
        let lo = if s.lo.is_empty() {
            let mut v = vec![-2.0; n];
            v[n - 1] = 0.0;
            v
        } else {
            s.lo.clone()
        };
        let hi = if s.hi.is_empty() {
            vec![2.0; n]
        } else {
            s.hi.clone()
        };
        let counts = if s.counts.is_empty() {
            let mut v = vec![12; n];
            v[n - 1] = 6;
            v
        } else {
            s.counts.clone()
        };
        (lo, hi, counts)
    }

    pub fn sweep_axes(&self) -> Vec<usize> {
        if self.sweep.axes.is_empty() {
            (1..=self.n).collect()
        } else {
            self.sweep.axes.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let params = self.params();
        params.validate().map_err(|e| match e {
            CoreError::Parameter { name, reason } => invalid(name, reason),
            other => invalid("<model>", other.to_string()),
        })?;
        let n = self.n;

        let ball = &self.grid.ball;
        if ball.radial < 2 {
            return Err(invalid("grid.ball.radial", "resolution must be at least 2"));
        }
        if ball.angular < 2 {
            return Err(invalid(
                "grid.ball.angular",
                "resolution must be at least 2",
            ));
        }
        match self.ball_scheme() {
            AngularScheme::IcosahedralOrbit if n != 3 || ball.angular % 120 != 0 => {
                return Err(invalid(
                    "grid.ball.scheme",
                    "icosahedral_orbit needs n = 3 and a multiple of 120 directions",
                ));
            }
            AngularScheme::Fibonacci if n != 3 => {
                return Err(invalid("grid.ball.scheme", "fibonacci needs n = 3"));
            }
            _ => {}
        }

        let (lo, hi, counts) = self.slab();
        if lo.len() != n || hi.len() != n || counts.len() != n {
            return Err(invalid(
                "grid.slab",
                format!("lo, hi and counts need {n} entries"),
            ));
        }
        if counts.iter().any(|&c| c < 2) {
            return Err(invalid(
                "grid.slab.counts",
                "resolutions must be at least 2",
            ));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(invalid("grid.slab", "each axis needs finite lo < hi"));
        }
        if lo[n - 1] < 0.0 {
            return Err(invalid("grid.slab.lo", "the box must lie in x_n >= 0"));
        }

        if self.quad.nodes < 2 {
            return Err(invalid("quad.nodes", "need at least 2 nodes"));
        }
        if !(self.quad.tol > 0.0) {
            return Err(invalid("quad.tol", "tolerance must be positive"));
        }

        self.solver.validate().map_err(|e| match e {
            CoreError::Parameter { name, reason } => invalid(format!("solver.{name}"), reason),
            other => invalid("solver", other.to_string()),
        })?;
        if let fracgreen_core::solver::Init::Custom(v) = &self.solver.init {
            if v.len() != ball.radial * ball.angular {
                return Err(invalid(
                    "solver.init",
                    "custom start needs one value per ball grid point",
                ));
            }
        }
        let p = self.solve_exponent();
        ModelParams::with_exponent(n, self.alpha, p).map_err(|e| invalid("p", e.to_string()))?;

        if self.sweep.count < 1 {
            return Err(invalid("sweep.count", "need at least one lambda value"));
        }
        if !(self.sweep.lo < self.sweep.hi) {
            return Err(invalid("sweep", "need lo < hi"));
        }
        if self.sweep.axes.iter().any(|&a| a < 1 || a > n) {
            return Err(invalid(
                "sweep.axes",
                format!("axes are 1-based and at most {n}"),
            ));
        }
        if !(self.sweep.options.tol >= 0.0) {
            return Err(invalid(
                "sweep.options.tol",
                "tolerance must be nonnegative",
            ));
        }

        if let Some(pole) = &self.kernel.pole {
            if pole.len() != n {
                return Err(invalid("kernel.pole", format!("need {n} coordinates")));
            }
        }

        if self.liouville.dims.iter().any(|&d| d < 3) {
            return Err(invalid("liouville.dims", "dimensions must be at least 3"));
        }
        if self.liouville.alphas.iter().any(|&a| !(a > 0.0 && a < 2.0)) {
            return Err(invalid("liouville.alphas", "orders must lie in (0, 2)"));
        }
        if self.liouville.p_count < 1 {
            return Err(invalid("liouville.p_count", "need at least one exponent"));
        }

        for (i, s) in self.suites.iter().enumerate() {
            if !SUITES.contains(&s.name.as_str()) {
                return Err(invalid(
                    format!("suites[{i}].name"),
                    format!(
                        "unknown suite `{}`; valid suites: {}",
                        s.name,
                        SUITES.join(", ")
                    ),
                ));
            }
            if s.samples < 1 {
                return Err(invalid(
                    format!("suites[{i}].samples"),
                    "need at least one sample",
                ));
            }
        }

        if !(self.fault_injection.b_scale.is_finite() && self.fault_injection.b_scale > 0.0) {
            return Err(invalid("fault_injection.b_scale", "scale must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(r#"{"n": 3, "alpha": 1.0}"#).unwrap();
        assert_eq!(cfg.quad.nodes, 48);
        assert_eq!(cfg.quad.tol, 1e-12);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.suites.len(), SUITES.len());
        assert_eq!(cfg.solve_exponent(), 1.8);
        assert_eq!(cfg.ball_scheme(), AngularScheme::IcosahedralOrbit);
        assert_eq!(cfg.sweep_axes(), vec![1, 2, 3]);
    }

    #[test]
    fn alpha_out_of_range_names_alpha() {
        let err = parse_config(r#"{"n": 3, "alpha": 2.5}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`alpha`"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let msg = parse_config(r#"{"n": 3, "alpha": 1.0, "alpha2": 1.0}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("alpha2"), "{msg}");
        let msg = parse_config(r#"{"n": 3, "alpha": 1.0, "solver": {"tolerance": 1}}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("solver") && msg.contains("tolerance"), "{msg}");
    }

    #[test]
    fn nested_validation_reports_key_paths() {
        let msg = parse_config(r#"{"n": 3, "alpha": 1.0, "grid": {"ball": {"radial": 1}}}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("grid.ball.radial"), "{msg}");
        let msg = parse_config(r#"{"n": 3, "alpha": 1.0, "suites": [{"name": "nope"}]}"#)
            .unwrap_err()
            .to_string();
        assert!(
            msg.contains("suites[0].name") && msg.contains("ball-lemma21"),
            "{msg}"
        );
        let msg = parse_config(r#"{"n": 3, "alpha": 1.0, "p": 3.0}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("`p`"), "{msg}");
        let msg = parse_config(r#"{"n": 3, "alpha": "one"}"#)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("alpha"), "{msg}");
    }

    #[test]
    fn exponent_default_respects_the_critical_value() {
        let cfg = parse_config(r#"{"n": 3, "alpha": 0.5}"#).unwrap();
        let crit = 3.5 / 2.5;
        assert!((cfg.solve_exponent() - 0.5 * (1.0 + crit)).abs() < 1e-15);
    }
}
