//! Experiment reports: JSON for machines, CSV tables for plotting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::ensembles::{MomentCertificate, MomentCheck, SummabilityReport};
use crate::experiments::BMCertificate;
use crate::projective::ProjectiveSection;
use crate::{Error, Result};

/// Statistics of one `(n, φ)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub n: usize,
    pub form: usize,
    pub trials: usize,
    pub mean: f64,
    pub se: f64,
    pub variance: f64,
    pub variance_se: Option<f64>,
    /// `Var · n²`.
    pub variance_n2: f64,
    /// `⟨dd^c V_{K,q}, φ⟩`.
    pub target: f64,
    /// `mean − target`.
    pub deviation: f64,
    /// `(1/2n) ∫ log Γₙ dd^c φ`, for unitarily invariant laws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_n_target: Option<f64>,
    pub c_phi: f64,
    /// `Dₙ` of the moment certificate, when one is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_n: Option<f64>,
    /// `Var · n² / (C_φ² Dₙ^{2/α})`, with its standard error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_ratio_se: Option<f64>,
}

/// Least-squares slope of `log Var` against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub form: usize,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub accepted: [f64; 2],
}

/// One sample path `n ↦ ⟨[Ẑ_{fₙ}], φ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPath {
    pub seed: u64,
    pub form: usize,
    pub target: f64,
    /// `(n, pairing)`.
    pub points: Vec<(usize, f64)>,
    pub first_quartile_sup: f64,
    pub last_quartile_sup: f64,
    /// Mean pairing over the last quartile.
    pub last_quartile_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub radius: f64,
    pub draws: usize,
    pub exceedances: u64,
    pub empirical: f64,
    /// `δ / R^γ`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSection {
    pub certificate: MomentCertificate,
    pub checks: Vec<MomentCheck>,
    /// Signed `α = 1` radial integral (unitarily invariant laws).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed_alpha_one: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail: Vec<TailRow>,
    pub summability: SummabilityReport,
}

/// JSON has no NaN or infinity: such values are written as `null` and read
/// back as NaN.
mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// A pass/fail check with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub name: String,
    #[serde(with = "lenient_f64")]
    pub value: f64,
    #[serde(with = "lenient_f64")]
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Audit {
    /// `value ≤ threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold, detail: String::new() }
    }

    /// `value ≥ threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value >= threshold, detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Counters for measure-zero events that were resampled or flagged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    /// Draws with `f ≡ 0`, resampled.
    pub zero_polynomial: u64,
    /// Systems with a positive-dimensional common zero set, resampled.
    pub non_generic: u64,
    /// Quadrature pairings whose refinement check raised a warning.
    pub quadrature_warnings: u64,
}

impl EventCounts {
    pub fn merge(&mut self, o: &EventCounts) {
        self.zero_polynomial += o.zero_polynomial;
        self.non_generic += o.non_generic;
        self.quadrature_warnings += o.quadrature_warnings;
    }
}

/// Output of one experiment; reproducible bit for bit from `(config, seed)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    /// Short tag naming the statement the experiment probes.
    pub probes: String,
    pub seed: u64,
    pub version: String,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<PairingRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<SlopeFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectories: Vec<TrajectoryPath>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bm: Vec<BMCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment: Option<MomentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective: Option<ProjectiveSection>,
    pub audits: Vec<Audit>,
    pub events: EventCounts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig, probes: &str) -> Self {
        Self {
            experiment: cfg.experiment,
            probes: probes.to_string(),
            seed: cfg.seed,
            version: crate::VERSION.to_string(),
            config: cfg.echo(),
            rows: Vec::new(),
            fits: Vec::new(),
            trajectories: Vec::new(),
            bm: Vec::new(),
            moment: None,
            projective: None,
            audits: Vec::new(),
            events: EventCounts::default(),
            notes: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.audits.iter().all(|a| a.pass)
    }

    pub fn failed_audits(&self) -> impl Iterator<Item = &Audit> {
        self.audits.iter().filter(|a| !a.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// CSV tables keyed by file stem; empty sections are skipped.
    pub fn tables(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if !self.rows.is_empty() {
            let mut s = String::from(
                "n,form,trials,mean,se,variance,variance_se,variance_n2,target,deviation,finite_n_target,c_phi,d_n,audit_ratio,audit_ratio_se\n",
            );
            for r in &self.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{:e},{:e},{:e},{},{:e},{:e},{:e},{},{:e},{},{},{}",
                    r.n,
                    r.form,
                    r.trials,
                    r.mean,
                    r.se,
                    r.variance,
                    csv_opt(r.variance_se),
                    r.variance_n2,
                    r.target,
                    r.deviation,
                    csv_opt(r.finite_n_target),
                    r.c_phi,
                    csv_opt(r.d_n),
                    csv_opt(r.audit_ratio),
                    csv_opt(r.audit_ratio_se)
                );
            }
            out.push(("pairings".to_string(), s));
        }
        if !self.fits.is_empty() {
            let mut s = String::from("form,slope,slope_se,intercept,accepted_lo,accepted_hi\n");
            for f in &self.fits {
                let _ = writeln!(s, "{},{:e},{:e},{:e},{},{}", f.form, f.slope, f.slope_se, f.intercept, f.accepted[0], f.accepted[1]);
            }
            out.push(("slopes".to_string(), s));
        }
        if !self.trajectories.is_empty() {
            let mut s = String::from("seed,form,n,pairing,target\n");
            for t in &self.trajectories {
                for (n, v) in &t.points {
                    let _ = writeln!(s, "{},{},{},{:e},{:e}", t.seed, t.form, n, v, t.target);
                }
            }
            out.push(("trajectory".to_string(), s));
        }
        if !self.bm.is_empty() {
            let mut s = String::from("n,r_n,r_n_root,witness_ratio,measure\n");
            for b in &self.bm {
                let _ = writeln!(s, "{},{:e},{:e},{:e},{}", b.n, b.r_n, b.r_n_root, b.witness_ratio, b.measure);
            }
            out.push(("bm".to_string(), s));
        }
        if let Some(m) = &self.moment {
            let mut s = String::from("dim,alpha,certificate,pooled,pooled_se,max_estimate,max_se,pass\n");
            for c in &m.checks {
                let _ = writeln!(
                    s,
                    "{},{},{:e},{:e},{:e},{:e},{:e},{}",
                    c.dim, c.alpha, c.certificate, c.pooled, c.pooled_se, c.max_estimate, c.max_se, c.pass
                );
            }
            out.push(("moments".to_string(), s));
            if !m.tail.is_empty() {
                let mut s = String::from("radius,draws,exceedances,empirical,bound\n");
                for t in &m.tail {
                    let _ = writeln!(s, "{},{},{},{:e},{:e}", t.radius, t.draws, t.exceedances, t.empirical, t.bound);
                }
                out.push(("tail".to_string(), s));
            }
        }
        if let Some(p) = &self.projective {
            out.extend(p.tables());
        }
        let mut s = String::from("name,value,threshold,pass\n");
        for a in &self.audits {
            let _ = writeln!(s, "\"{}\",{:e},{:e},{}", a.name.replace('"', "'"), a.value, a.threshold, a.pass);
        }
        out.push(("audits".to_string(), s));
        out
    }
}
