//! Declarative experiment configuration (TOML).
//!
//! A config names one experiment and the ingredients it needs: coefficient
//! law, weighted compact, basis recipe, degrees, trial count and test forms.
//! [`validate_config`] checks a document in full and returns every problem
//! it finds, each tagged with the field path.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::compact::{CompactKind, Profile, TestForm, Weight, WeightedCompact};
use crate::ensembles::CoefficientLaw;
use crate::poly::{build_orthonormal_basis, normalize_sup, BasisFamily};
use crate::zeros::PairingMethod;
use crate::{Error, Result, C64};

/// Which driver a config runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Expected,
    Exact,
    Variance,
    Trajectory,
    Bm,
    Moment,
    Projective,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Expected => "expected",
            ExperimentKind::Exact => "exact",
            ExperimentKind::Variance => "variance",
            ExperimentKind::Trajectory => "trajectory",
            ExperimentKind::Bm => "bm",
            ExperimentKind::Moment => "moment",
            ExperimentKind::Projective => "projective",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawName {
    Gaussian,
    FubiniStudy,
    HeavyTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub law: LawName,
    /// Exponent of the moment condition.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn default_alpha() -> f64 {
    2.0
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self { law: LawName::Gaussian, alpha: 2.0, gamma: None, delta: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactSpec {
    pub kind: CompactKind,
    #[serde(default = "zero_weight")]
    pub weight: Weight,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn zero_weight() -> Weight {
    Weight::Zero
}

fn default_resolution() -> usize {
    512
}

impl Default for CompactSpec {
    fn default() -> Self {
        Self { kind: CompactKind::UnitDisk, weight: Weight::Zero, resolution: 512 }
    }
}

/// How the degree-`n` basis is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Monomial,
    CircleOrthonormal,
    Chebyshev,
    FsOrthonormal,
    /// Gram–Schmidt against the compact's boundary measure and weight.
    Orthonormal,
    /// Monomials divided by their weighted sups on the compact.
    SupNormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub kind: BasisKind,
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self { kind: BasisKind::Monomial }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFormSpec {
    /// `(re, im)` per coordinate.
    pub center: Vec<[f64; 2]>,
    pub radius: f64,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_profile() -> Profile {
    Profile::SmoothBump
}

fn default_amplitude() -> f64 {
    1.0
}

impl TestFormSpec {
    pub fn build(&self) -> Result<TestForm> {
        let c = self.center.iter().map(|p| C64::new(p[0], p[1])).collect();
        Ok(TestForm::new(c, self.radius, self.profile)?.with_amplitude(self.amplitude))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingChoice {
    /// Root sums when zeros are points, Poincaré–Lelong otherwise.
    #[default]
    Auto,
    RootSum,
    PoincareLelong,
}

impl PairingChoice {
    pub fn resolve(self, m: usize) -> PairingMethod {
        match self {
            PairingChoice::RootSum => PairingMethod::RootSum,
            PairingChoice::PoincareLelong => PairingMethod::PoincareLelong,
            PairingChoice::Auto if m == 1 => PairingMethod::RootSum,
            PairingChoice::Auto => PairingMethod::PoincareLelong,
        }
    }
}

/// Thresholds overriding the per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    /// Largest allowed `|mean − target|` at the top degree (or last-quartile
    /// sup for trajectories).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation_tolerance: Option<f64>,
    /// Accepted interval for the fitted variance slope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    pub n_max: usize,
    #[serde(default = "default_step")]
    pub step: usize,
    /// Further seeds whose paths must reach the same limit.
    #[serde(default)]
    pub extra_seeds: Vec<u64>,
}

fn default_step() -> usize {
    1
}

impl TrajectorySpec {
    pub fn degrees(&self) -> Vec<usize> {
        (self.step..=self.n_max).step_by(self.step.max(1)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    #[default]
    Boundary,
    Area,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BmSpec {
    #[serde(default)]
    pub measure: MeasureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentSpec {
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_draws")]
    pub draws: usize,
    /// Radii `R` of the tail check `P(log|a| > R) ≤ δ/R^γ` (heavy tail only).
    #[serde(default = "default_radii")]
    pub tail_radii: Vec<f64>,
    #[serde(default = "default_tail_draws")]
    pub tail_draws: usize,
    /// Range of the summability audit.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_dims() -> Vec<usize> {
    vec![2, 8, 32]
}

fn default_draws() -> usize {
    20_000
}

fn default_radii() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

fn default_tail_draws() -> usize {
    1_000_000
}

fn default_n_max() -> usize {
    1000
}

impl Default for MomentSpec {
    fn default() -> Self {
        Self {
            dims: default_dims(),
            draws: default_draws(),
            tail_radii: default_radii(),
            tail_draws: default_tail_draws(),
            n_max: default_n_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectiveSpec {
    /// Dimension of the projective space (1 or 2).
    pub m: usize,
    /// Random rotations in the invariance check on `CP¹`.
    #[serde(default = "default_rotations")]
    pub rotations: usize,
}

fn default_rotations() -> usize {
    3
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// Worker threads; never affects results and is left out of reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub ensemble: EnsembleSpec,
    pub compact: CompactSpec,
    pub basis: BasisSpec,
    pub pairing: PairingChoice,
    pub audit: AuditSpec,
    #[serde(default)]
    pub test_forms: Vec<TestFormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bm: Option<BmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment: Option<MomentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective: Option<ProjectiveSpec>,
}

/// One validation problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn err(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.into(), message: message.into() }
}

const KNOWN_KEYS: [&str; 15] = [
    "experiment",
    "seed",
    "workers",
    "degrees",
    "trials",
    "ensemble",
    "compact",
    "basis",
    "pairing",
    "audit",
    "test_forms",
    "trajectory",
    "bm",
    "moment",
    "projective",
];

fn field<T: DeserializeOwned>(table: &toml::Table, key: &str, errors: &mut Vec<ConfigError>) -> Option<T> {
    let v = table.get(key)?;
    match T::deserialize(v.clone()) {
        Ok(t) => Some(t),
        Err(e) => {
            errors.push(err(key, e.message().trim().to_string()));
            None
        }
    }
}

/// Parse and statically check a config; all problems are reported together.
pub fn validate_config(text: &str) -> std::result::Result<ExperimentConfig, Vec<ConfigError>> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| vec![err("<document>", e.message().trim())])?;
    let mut errors = Vec::new();
    for key in table.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            errors.push(err(key.as_str(), "unknown field"));
        }
    }
    let experiment: Option<ExperimentKind> = field(&table, "experiment", &mut errors);
    if !table.contains_key("experiment") {
        errors.push(err("experiment", "missing field"));
    }
    let seed: u64 = field(&table, "seed", &mut errors).unwrap_or(0);
    let workers: Option<usize> = field(&table, "workers", &mut errors);
    let degrees: Vec<usize> = field(&table, "degrees", &mut errors).unwrap_or_default();
    let trials: usize = field(&table, "trials", &mut errors).unwrap_or(100);
    let ensemble: EnsembleSpec = field(&table, "ensemble", &mut errors).unwrap_or_default();
    let compact: CompactSpec = field(&table, "compact", &mut errors).unwrap_or_default();
    let basis: Option<BasisSpec> = field(&table, "basis", &mut errors);
    let pairing: PairingChoice = field(&table, "pairing", &mut errors).unwrap_or_default();
    let audit: AuditSpec = field(&table, "audit", &mut errors).unwrap_or_default();
    let test_forms: Vec<TestFormSpec> = field(&table, "test_forms", &mut errors).unwrap_or_default();
    let trajectory: Option<TrajectorySpec> = field(&table, "trajectory", &mut errors);
    let bm: Option<BmSpec> = field(&table, "bm", &mut errors);
    let moment: Option<MomentSpec> = field(&table, "moment", &mut errors);
    let projective: Option<ProjectiveSpec> = field(&table, "projective", &mut errors);

    let Some(experiment) = experiment else {
        return Err(errors);
    };
    let basis = basis.unwrap_or(BasisSpec {
        kind: if experiment == ExperimentKind::Projective { BasisKind::FsOrthonormal } else { BasisKind::Monomial },
    });
    let mut cfg = ExperimentConfig {
        experiment,
        seed,
        workers,
        degrees,
        trials,
        ensemble,
        compact,
        basis,
        pairing,
        audit,
        test_forms,
        trajectory,
        bm,
        moment,
        projective,
    };
    match experiment {
        ExperimentKind::Bm if cfg.bm.is_none() => cfg.bm = Some(BmSpec::default()),
        ExperimentKind::Moment if cfg.moment.is_none() => cfg.moment = Some(MomentSpec::default()),
        _ => {}
    }
    errors.extend(check(&cfg));
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(errors)
    }
}

/// Semantic checks on an assembled config.
pub fn check(cfg: &ExperimentConfig) -> Vec<ConfigError> {
    use ExperimentKind::*;
    let mut e = Vec::new();
    let kind = cfg.experiment;
    let m = cfg.num_vars();

    if cfg.seed > i64::MAX as u64 {
        e.push(err("seed", "must be below 2^63"));
    }
    if cfg.workers == Some(0) {
        e.push(err("workers", "must be at least 1"));
    }

    let uses_degrees = !matches!(kind, Trajectory | Moment);
    if uses_degrees {
        if cfg.degrees.is_empty() {
            e.push(err("degrees", "at least one degree is required"));
        }
        if cfg.degrees.first() == Some(&0) {
            e.push(err("degrees", "degrees must be positive"));
        }
        if cfg.degrees.windows(2).any(|w| w[0] >= w[1]) {
            e.push(err("degrees", "degrees must be strictly increasing"));
        }
    }
    if kind == Variance && cfg.degrees.len() < 4 {
        e.push(err("degrees", "the variance slope fit needs at least 4 degrees"));
    }
    if kind == Expected && cfg.degrees.len() < 3 && cfg.audit.deviation_tolerance.is_none() {
        e.push(err("degrees", "the deviation trend test needs at least 3 degrees (or set audit.deviation_tolerance)"));
    }
    let needs_trials = matches!(kind, Expected | Exact | Variance | Projective);
    if needs_trials && cfg.trials < 2 {
        e.push(err("trials", "at least 2 trials are required"));
    }

    // ensemble
    let a = cfg.ensemble.alpha;
    if !(a >= 1.0) {
        e.push(err("ensemble.alpha", "alpha must be at least 1"));
    }
    if kind == Variance && a < 2.0 {
        e.push(err("ensemble.alpha", format!("variance runs require alpha >= 2 (got {a})")));
    }
    match cfg.ensemble.law {
        LawName::HeavyTail => match cfg.ensemble.gamma {
            None => e.push(err("ensemble.gamma", "heavy_tail requires gamma")),
            Some(g) => {
                if !(g > 2.0 * m as f64) {
                    e.push(err("ensemble.gamma", format!("gamma must exceed 2m = {} (got {g})", 2 * m)));
                } else if !(a < g) {
                    e.push(err("ensemble.alpha", format!("alpha must be below gamma = {g}")));
                }
                if let Some(d) = cfg.ensemble.delta {
                    if !(d > 0.0) {
                        e.push(err("ensemble.delta", "delta must be positive"));
                    } else if let Err(er) = CoefficientLaw::heavy_tail(g, m, Some(d)) {
                        if g > 2.0 * m as f64 {
                            e.push(err("ensemble.delta", er.to_string()));
                        }
                    }
                }
            }
        },
        _ => {
            if cfg.ensemble.gamma.is_some() || cfg.ensemble.delta.is_some() {
                e.push(err("ensemble", "gamma and delta apply only to heavy_tail"));
            }
        }
    }
    if kind == Exact && cfg.ensemble.law == LawName::HeavyTail {
        e.push(err("ensemble.law", "the exact expectation holds for unitarily invariant laws (gaussian, fubini_study)"));
    }

    // compact and basis
    if cfg.compact.kind == CompactKind::CustomGrid {
        e.push(err("compact.kind", "custom grids cannot be declared in a config"));
    }
    if cfg.compact.resolution < 16 {
        e.push(err("compact.resolution", "must be at least 16"));
    }
    if cfg.compact.resolution > 1 << 16 {
        e.push(err("compact.resolution", "must be at most 65536"));
    }
    let bk = cfg.basis.kind;
    match bk {
        BasisKind::CircleOrthonormal | BasisKind::Chebyshev if m != 1 => {
            e.push(err("basis.kind", "this basis is univariate"));
        }
        _ => {}
    }
    if kind == Projective && bk != BasisKind::FsOrthonormal {
        e.push(err("basis.kind", "projective runs use fs_orthonormal sections"));
    }

    // test forms
    let needs_forms = matches!(kind, Expected | Exact | Variance | Trajectory);
    if needs_forms && cfg.test_forms.is_empty() {
        e.push(err("test_forms", "at least one test form is required"));
    }
    for (i, f) in cfg.test_forms.iter().enumerate() {
        if f.center.len() != m {
            e.push(err(format!("test_forms[{i}].center"), format!("expected {m} coordinate(s), got {}", f.center.len())));
        }
        if !(f.radius > 0.0) || !f.radius.is_finite() {
            e.push(err(format!("test_forms[{i}].radius"), "must be positive"));
        }
        if !f.amplitude.is_finite() {
            e.push(err(format!("test_forms[{i}].amplitude"), "must be finite"));
        }
    }
    if m == 2 && cfg.pairing == PairingChoice::RootSum && needs_forms {
        e.push(err("pairing", "zero sets in C^2 are curves; use poincare_lelong"));
    }

    if let Some([lo, hi]) = cfg.audit.slope_range {
        if !(lo < hi) {
            e.push(err("audit.slope_range", "lower end must be below upper end"));
        }
    }

    // experiment sections
    if kind == Trajectory {
        match &cfg.trajectory {
            None => e.push(err("trajectory", "trajectory runs need a [trajectory] table")),
            Some(t) => {
                if t.step == 0 {
                    e.push(err("trajectory.step", "must be positive"));
                }
                if t.n_max < 4 * t.step.max(1) {
                    e.push(err("trajectory.n_max", "need at least 4 degrees on the path"));
                }
            }
        }
    }
    if let Some(ms) = &cfg.moment {
        if ms.dims.is_empty() || ms.dims.contains(&0) {
            e.push(err("moment.dims", "dimensions must be positive"));
        }
        if ms.draws < 2 {
            e.push(err("moment.draws", "at least 2 draws"));
        }
        if ms.tail_radii.iter().any(|r| !(*r > 0.0)) {
            e.push(err("moment.tail_radii", "radii must be positive"));
        }
        if ms.n_max < 8 {
            e.push(err("moment.n_max", "must be at least 8"));
        }
    }
    if kind == Bm
        && cfg.bm.as_ref().is_some_and(|b| b.measure == MeasureKind::Area)
        && matches!(cfg.compact.kind, CompactKind::Circle | CompactKind::Interval | CompactKind::UnitBall)
    {
        e.push(err("bm.measure", "this compact has no area grid"));
    }
    if kind == Projective {
        match &cfg.projective {
            None => e.push(err("projective", "projective runs need a [projective] table")),
            Some(p) => {
                if !(p.m == 1 || p.m == 2) {
                    e.push(err("projective.m", "must be 1 or 2"));
                }
                if p.m == 2 && cfg.degrees.iter().any(|&n| n > 12) {
                    e.push(err("degrees", "CP^2 systems are limited to degree 12"));
                }
            }
        }
        if cfg.ensemble.law != LawName::Gaussian && cfg.ensemble.law != LawName::FubiniStudy {
            e.push(err("ensemble.law", "projective runs use unitarily invariant laws"));
        }
    }
    e
}

impl ExperimentConfig {
    /// Number of complex variables of the affine model.
    pub fn num_vars(&self) -> usize {
        match (&self.projective, self.experiment) {
            (Some(p), ExperimentKind::Projective) => p.m,
            _ => self.compact.kind.default_num_vars(),
        }
    }

    /// TOML echo of the config.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// The config as embedded in reports: worker count removed.
    pub fn echo(&self) -> Self {
        Self { workers: None, ..self.clone() }
    }

    pub fn build_law(&self) -> Result<CoefficientLaw> {
        Ok(match self.ensemble.law {
            LawName::Gaussian => CoefficientLaw::Gaussian,
            LawName::FubiniStudy => CoefficientLaw::FubiniStudy,
            LawName::HeavyTail => {
                let g = self.ensemble.gamma.ok_or_else(|| Error::Config("heavy_tail requires gamma".into()))?;
                CoefficientLaw::heavy_tail(g, self.num_vars(), self.ensemble.delta)?
            }
        })
    }

    pub fn build_compact(&self) -> Result<WeightedCompact> {
        WeightedCompact::with_resolution(self.compact.kind, self.compact.resolution)?.with_weight(self.compact.weight.clone())
    }

    pub fn build_basis(&self, kq: &WeightedCompact, n: usize) -> Result<BasisFamily> {
        let m = self.num_vars();
        match self.basis.kind {
            BasisKind::Monomial => BasisFamily::monomial(m, n),
            BasisKind::CircleOrthonormal => BasisFamily::circle_orthonormal(n),
            BasisKind::Chebyshev => BasisFamily::chebyshev(n),
            BasisKind::FsOrthonormal => BasisFamily::fs_orthonormal(m, n),
            BasisKind::Orthonormal => build_orthonormal_basis(kq.boundary(), |z| kq.weight_at(z), m, n),
            BasisKind::SupNormalized => normalize_sup(&BasisFamily::monomial(m, n)?, kq),
        }
    }

    pub fn build_forms(&self) -> Result<Vec<TestForm>> {
        self.test_forms.iter().map(TestFormSpec::build).collect()
    }
}

/// Read and validate a config file; validation problems become one
/// [`Error::Config`] listing them all.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    validate_config(&text).map_err(|es| Error::Config(es.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
experiment = "variance"
seed = 7
degrees = [25, 50, 100, 200]
trials = 400

[ensemble]
law = "gaussian"

[compact]
kind = "unit_disk"

[[test_forms]]
center = [[1.0, 0.0]]
radius = 0.5
"#;

    #[test]
    fn valid_config_parses() {
        let c = validate_config(GOOD).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Variance);
        assert_eq!(c.degrees, vec![25, 50, 100, 200]);
        assert_eq!(c.ensemble.alpha, 2.0);
        assert_eq!(c.basis.kind, BasisKind::Monomial);
        assert_eq!(c.test_forms[0].profile, Profile::SmoothBump);
    }

    #[test]
    fn echo_is_a_fixed_point() {
        let c = validate_config(GOOD).unwrap();
        let text = c.to_toml().unwrap();
        let back = validate_config(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn gamma_must_exceed_2m() {
        let t = GOOD.replace("law = \"gaussian\"", "law = \"heavy_tail\"\ngamma = 2.0\nalpha = 1.5").replace("variance", "expected");
        let es = validate_config(&t).unwrap_err();
        assert!(es.iter().any(|e| e.path == "ensemble.gamma" && e.message.contains("gamma must exceed 2m")), "{es:?}");
    }

    #[test]
    fn variance_needs_alpha_two() {
        let t = GOOD.replace("law = \"gaussian\"", "law = \"gaussian\"\nalpha = 1.0");
        let es = validate_config(&t).unwrap_err();
        assert!(es.iter().any(|e| e.path == "ensemble.alpha" && e.message.contains("alpha >= 2")), "{es:?}");
    }

    #[test]
    fn errors_are_aggregated() {
        let t = r#"
experiment = "variance"
degrees = [50, 25]
trials = 1
colour = "blue"
[ensemble]
law = "gaussian"
alpha = 1.0
[compact]
kind = "unit_disk"
resolution = 4
[[test_forms]]
center = [[0.0, 0.0], [1.0, 1.0]]
radius = -1.0
"#;
        let es = validate_config(t).unwrap_err();
        let paths: Vec<&str> = es.iter().map(|e| e.path.as_str()).collect();
        for p in ["colour", "degrees", "trials", "ensemble.alpha", "compact.resolution", "test_forms[0].center", "test_forms[0].radius"] {
            assert!(paths.contains(&p), "missing {p} in {paths:?}");
        }
    }

    #[test]
    fn type_errors_in_several_tables() {
        let t = r#"
experiment = "expected"
trials = "many"
[compact]
kind = "torus"
"#;
        let es = validate_config(t).unwrap_err();
        let paths: Vec<&str> = es.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"trials") && paths.contains(&"compact"), "{paths:?}");
    }

    #[test]
    fn workers_left_out_of_echo() {
        let c = validate_config(&format!("workers = 4\n{GOOD}")).unwrap();
        assert_eq!(c.workers, Some(4));
        assert_eq!(c.echo().workers, None);
    }
}
