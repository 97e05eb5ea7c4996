//! Experiment configuration, read from JSON with unknown keys rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// Exponent in `[1, inf]`; JSON accepts a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "infinity" => Ok(Exponent(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    #[default]
    Lebesgue,
    /// `|x - 1/2|^a`.
    Power { a: f64 },
    /// Two-column CSV `x,w`.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    PartialSum { n: i64 },
    #[default]
    VariationalPartialSums,
    VariationalTruncation,
    CarlesonMaximal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Random complex coefficients on `|k| <= degree` (default `N/4`).
    #[default]
    RandomTrig,
    /// Modulated, translated partial Dirichlet kernels.
    Dirichlet,
    /// Random-sign lacunary sums `sum_j e_j e(2^j x)`.
    Lacunary,
    /// Dirichlet kernels on even trials, lacunary sums on odd ones.
    Adversarial,
    /// Indicators of random arcs with a smooth spectral cutoff.
    SmoothedIndicator,
    SingleTone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecompositionSpec {
    /// Bitile scales (interval levels).
    pub levels: Vec<u32>,
    /// Bitiles drawn per instance.
    pub bitiles: usize,
    /// Thresholds as fractions of the collection's size and density.
    pub alpha_fraction: f64,
    /// Exponent `s` of the tree estimates.
    pub s: f64,
    pub max_shell: u32,
}

impl Default for DecompositionSpec {
    fn default() -> Self {
        Self { levels: vec![2, 6], bitiles: 200, alpha_fraction: 0.5, s: 1.0, max_shell: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LepingleSpec {
    pub c: f64,
}

impl Default for LepingleSpec {
    fn default() -> Self {
        Self { c: 2.0 }
    }
}

/// Limits checked in `--strict` mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub max_ratio: Option<f64>,
    pub max_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub n_grid: Vec<usize>,
    pub weight: WeightSpec,
    /// Power-weight exponents for sweeps.
    pub a_grid: Vec<f64>,
    pub p: f64,
    pub q: Option<f64>,
    pub q0: Option<f64>,
    pub r: Exponent,
    pub r_grid: Vec<Exponent>,
    pub operator: OperatorSpec,
    pub family: FamilySpec,
    pub trials: usize,
    pub seed: u64,
    pub decomposition: DecompositionSpec,
    pub lepingle: LepingleSpec,
    pub thresholds: Thresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 256,
            n_grid: Vec::new(),
            weight: WeightSpec::Lebesgue,
            a_grid: Vec::new(),
            p: 2.0,
            q: None,
            q0: None,
            r: Exponent(4.0),
            r_grid: Vec::new(),
            operator: OperatorSpec::default(),
            family: FamilySpec::default(),
            trials: 8,
            seed: 0,
            decomposition: DecompositionSpec::default(),
            lepingle: LepingleSpec::default(),
            thresholds: Thresholds::default(),
        }
    }
}

fn config_error(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn check_len(name: &str, n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(config_error(format!("{name} = {n} must be a power of two, at least 8")));
    }
    Ok(())
}

fn check_power(a: f64) -> Result<()> {
    if !(a > -0.95 && a < 5.0) {
        return Err(config_error(format!("power weight exponent {a} outside (-0.95, 5)")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        // csv weights resolve relative to the config file
        if let WeightSpec::Csv { path: p } = &mut cfg.weight {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_len("n", self.n)?;
        for &n in &self.n_grid {
            check_len("n_grid entry", n)?;
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("n_grid must increase strictly"));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(config_error(format!("p = {} must be finite and at least 1", self.p)));
        }
        if let Some(q) = self.q {
            if !(q >= 1.0 && q < self.p) {
                return Err(config_error(format!("need 1 <= q < p, got q = {q}, p = {}", self.p)));
            }
        }
        if let Some(q0) = self.q0 {
            if !(q0 > 1.0 && q0.is_finite()) {
                return Err(config_error(format!("q0 = {q0} must exceed 1")));
            }
        }
        for r in std::iter::once(&self.r).chain(&self.r_grid) {
            if r.0.is_nan() || r.0 < 1.0 {
                return Err(config_error(format!("r = {r} must be at least 1")));
            }
        }
        if self.r_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("r_grid must be sorted ascending without repeats"));
        }
        if let WeightSpec::Power { a } = self.weight {
            check_power(a)?;
        }
        for &a in &self.a_grid {
            check_power(a)?;
        }
        if self.a_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("a_grid must increase strictly"));
        }
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        let d = &self.decomposition;
        if d.levels.is_empty() {
            return Err(config_error("decomposition needs at least one bitile level"));
        }
        if !(d.alpha_fraction > 0.0 && d.alpha_fraction.is_finite()) {
            return Err(config_error("alpha_fraction must be positive"));
        }
        if !(d.s >= 1.0) {
            return Err(config_error("tree-estimate exponent s must be at least 1"));
        }
        if !(self.lepingle.c > std::f64::consts::SQRT_2 && self.lepingle.c <= 4.0) {
            return Err(config_error("Littlewood-Paley constant C must lie in (sqrt 2, 4]"));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// `max(2q, pq/(p - q))`, the lower bound on `r` for the weighted theorem, when `q` is set.
    pub fn r_threshold(&self) -> Option<f64> {
        self.q.map(|q| (2.0 * q).max(self.p * q / (self.p - q)))
    }

    /// Human-readable note on whether each exponent clears [`Self::r_threshold`].
    pub fn threshold_annotations(&self) -> Vec<String> {
        let Some(t) = self.r_threshold() else { return Vec::new() };
        let mut rs = vec![self.r];
        rs.extend(self.r_grid.iter().copied());
        rs.dedup();
        rs.iter()
            .map(|r| {
                let verdict = if r.0 > t { "clears" } else { "does not clear" };
                format!("r = {r} {verdict} max(2q, pq/(p-q)) = {t:.6}")
            })
            .collect()
    }

    /// Grid sizes for sweeps: `n_grid` if given, else `[n]`.
    pub fn sizes(&self) -> Vec<usize> {
        if self.n_grid.is_empty() {
            vec![self.n]
        } else {
            self.n_grid.clone()
        }
    }
}
