//! Coefficient laws and logarithmic moment certificates.
//!
//! A law `μₙ` on `C^{dₙ}` satisfies the moment condition with `(α, Dₙ)` when
//! `∫ |log|⟨a, v⟩||^α dμₙ(a) ≤ Dₙ` for every unit vector `v`.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::poly::{space_dimension, CoefficientVector};
use crate::quad::{integrate, integrate_to_inf, QuadOptions};
use crate::rng::{complex_normal, open_unit, stream, unit_vector, StreamRng};
use crate::stats::{fit_line, mean, std_error, LineFit};
use crate::{Error, Result, C64};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ---------------------------------------------------------------------------
// heavy-tail law

const U_MIN: f64 = -30.0;
const U_MAX: f64 = 40.0;
const U_STEP: f64 = 0.05;
const U_CLAMP: f64 = 700.0;

/// I.i.d. coefficients with planar density `c_γ / (1 + |z|² log(e+|z|)^{γ+1})`.
///
/// The density is bounded by `N = c_γ` and `P(log|a| > R) ≤ δ R^{-γ}` for
/// `R ≥ 1`, with `δ` at least `δ_min = sup_{R≥1} R^γ P(log|a| > R)`.
#[derive(Debug, Clone)]
pub struct HeavyTail {
    gamma: f64,
    delta: f64,
    delta_min: f64,
    c_gamma: f64,
    m: usize,
    table: Arc<TailTable>,
}

/// `S(u) = P(log|a| > u)` on a uniform grid in `u`, with `dS/du`.
#[derive(Debug)]
struct TailTable {
    s: Vec<f64>,
    ds: Vec<f64>,
}

impl HeavyTail {
    /// Law with exponent `γ > 2m`; `delta = None` selects `δ_min`.
    pub fn new(gamma: f64, m: usize, delta: Option<f64>) -> Result<Self> {
        if !(gamma > 2.0 * m as f64) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must exceed 2m = {} (got {gamma})", 2 * m)));
        }
        let opts = QuadOptions::default();
        let radial = move |u: f64| {
            // 2π r² f(r) in the variable u = log r, without the constant c
            let r2 = (2.0 * u).exp();
            let l = (E + u.exp()).ln();
            2.0 * PI * r2 / (1.0 + r2 * l.powf(gamma + 1.0))
        };
        let head = integrate(
            |r: f64| {
                let l = (E + r).ln();
                2.0 * PI * r / (1.0 + r * r * l.powf(gamma + 1.0))
            },
            0.0,
            1.0,
            opts,
        )?
        .value;
        let tail = integrate_to_inf(radial, 0.0, opts)?.value;
        let c_gamma = 1.0 / (head + tail);
        let density_u = move |u: f64| c_gamma * radial(u);

        let count = ((U_MAX - U_MIN) / U_STEP).round() as usize + 1;
        let mut s = vec![0.0; count];
        s[count - 1] = integrate_to_inf(density_u, U_MAX, opts)?.value;
        for i in (0..count - 1).rev() {
            let a = U_MIN + i as f64 * U_STEP;
            s[i] = s[i + 1] + integrate(density_u, a, a + U_STEP, opts)?.value;
        }
        let ds = (0..count).map(|i| -density_u(U_MIN + i as f64 * U_STEP)).collect();
        let table = Arc::new(TailTable { s, ds });

        let mut law = Self { gamma, delta: 0.0, delta_min: 0.0, c_gamma, m, table };
        // sup of R^γ S(e^R) over R ≥ 1: scan the table, then the asymptotic
        // limit 2πc/γ approached from below
        let mut dmin: f64 = 2.0 * PI * c_gamma / gamma;
        let mut r = 1.0;
        while r <= U_MAX {
            dmin = dmin.max(r.powf(gamma) * law.tail_log(r));
            r += 0.01;
        }
        law.delta_min = dmin;
        law.delta = match delta {
            None => dmin,
            Some(d) if d >= dmin * (1.0 - 1e-9) => d,
            Some(d) => {
                return Err(Error::InvalidParameter(format!(
                    "delta = {d} violates the tail bound; the smallest admissible value is {dmin:.6}"
                )))
            }
        };
        Ok(law)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    /// Density bound `N`, attained at the origin.
    pub fn density_bound(&self) -> f64 {
        self.c_gamma
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn density(&self, z: C64) -> f64 {
        let r = z.norm();
        self.c_gamma / (1.0 + r * r * (E + r).ln().powf(self.gamma + 1.0))
    }

    /// `P(log|a| > u)`.
    pub fn tail_log(&self, u: f64) -> f64 {
        let t = &self.table;
        if u <= U_MIN {
            let r2 = (2.0 * u).exp();
            return 1.0 - PI * self.c_gamma * r2;
        }
        if u >= U_MAX {
            let last = t.s[t.s.len() - 1];
            return last * (U_MAX / u).powf(self.gamma);
        }
        let x = (u - U_MIN) / U_STEP;
        let i = (x.floor() as usize).min(t.s.len() - 2);
        hermite(t.s[i], t.s[i + 1], t.ds[i] * U_STEP, t.ds[i + 1] * U_STEP, x - i as f64)
    }

    /// Inverse of [`tail_log`](Self::tail_log): `u` with `P(log|a| > u) = p`.
    fn inverse_tail(&self, p: f64) -> f64 {
        let t = &self.table;
        if p >= t.s[0] {
            let s = ((1.0 - p).max(0.0) / (PI * self.c_gamma)).sqrt();
            return if s > 0.0 { s.ln() } else { f64::NEG_INFINITY };
        }
        let last = t.s[t.s.len() - 1];
        if p <= last {
            return (U_MAX * (last / p).powf(1.0 / self.gamma)).min(U_CLAMP);
        }
        // table is decreasing: find i with s[i] ≥ p > s[i+1]
        let (mut lo, mut hi) = (0usize, t.s.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t.s[mid] >= p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (s0, s1, d0, d1) = (t.s[lo], t.s[lo + 1], t.ds[lo] * U_STEP, t.ds[lo + 1] * U_STEP);
        // safeguarded Newton on the cubic
        let (mut a, mut b) = (0.0, 1.0);
        let mut x = (s0 - p) / (s0 - s1);
        for _ in 0..60 {
            let f = hermite(s0, s1, d0, d1, x) - p;
            if f > 0.0 {
                a = x;
            } else {
                b = x;
            }
            let df = hermite_deriv(s0, s1, d0, d1, x);
            let mut next = x - f / df;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - x).abs() < 1e-15 {
                x = next;
                break;
            }
            x = next;
        }
        U_MIN + (lo as f64 + x) * U_STEP
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        let u = self.inverse_tail(open_unit(rng));
        let theta = 2.0 * PI * rng.random::<f64>();
        C64::from_polar(u.exp(), theta)
    }
}

fn hermite(p0: f64, p1: f64, m0: f64, m1: f64, x: f64) -> f64 {
    let x2 = x * x;
    let x3 = x2 * x;
    (2.0 * x3 - 3.0 * x2 + 1.0) * p0 + (x3 - 2.0 * x2 + x) * m0 + (-2.0 * x3 + 3.0 * x2) * p1 + (x3 - x2) * m1
}

fn hermite_deriv(p0: f64, p1: f64, m0: f64, m1: f64, x: f64) -> f64 {
    let x2 = x * x;
    (6.0 * x2 - 6.0 * x) * p0 + (3.0 * x2 - 4.0 * x + 1.0) * m0 + (-6.0 * x2 + 6.0 * x) * p1 + (3.0 * x2 - 2.0 * x) * m1
}

// ---------------------------------------------------------------------------
// laws

type CustomSampler = Arc<dyn Fn(&mut StreamRng, usize) -> Vec<C64> + Send + Sync>;

/// Probability law on coefficient vectors.
#[derive(Clone)]
pub enum CoefficientLaw {
    /// I.i.d. standard complex normals, density `π^{-d} e^{-‖a‖²}`.
    Gaussian,
    /// Density `d!/π^d (1+‖a‖²)^{-(d+1)}`.
    FubiniStudy,
    HeavyTail(HeavyTail),
    Custom {
        name: String,
        sampler: CustomSampler,
    },
}

impl fmt::Debug for CoefficientLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientLaw::Gaussian => f.write_str("Gaussian"),
            CoefficientLaw::FubiniStudy => f.write_str("FubiniStudy"),
            CoefficientLaw::HeavyTail(h) => write!(f, "HeavyTail(gamma={}, delta={})", h.gamma, h.delta),
            CoefficientLaw::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Which family a law belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Gaussian,
    FubiniStudy,
    HeavyTail,
    Custom,
}

impl CoefficientLaw {
    pub fn kind(&self) -> LawKind {
        match self {
            CoefficientLaw::Gaussian => LawKind::Gaussian,
            CoefficientLaw::FubiniStudy => LawKind::FubiniStudy,
            CoefficientLaw::HeavyTail(_) => LawKind::HeavyTail,
            CoefficientLaw::Custom { .. } => LawKind::Custom,
        }
    }

    pub fn heavy_tail(gamma: f64, m: usize, delta: Option<f64>) -> Result<Self> {
        Ok(CoefficientLaw::HeavyTail(HeavyTail::new(gamma, m, delta)?))
    }

    pub fn custom<F>(name: &str, sampler: F) -> Self
    where
        F: Fn(&mut StreamRng, usize) -> Vec<C64> + Send + Sync + 'static,
    {
        CoefficientLaw::Custom { name: name.to_string(), sampler: Arc::new(sampler) }
    }

    /// Whether `|⟨a, v⟩|` has the same law for every unit `v`.
    pub fn is_unitarily_invariant(&self) -> bool {
        matches!(self, CoefficientLaw::Gaussian | CoefficientLaw::FubiniStudy)
    }
}

/// One draw of `a ∈ C^{dim}`.
pub fn sample_coefficients(law: &CoefficientLaw, dim: usize, rng: &mut StreamRng) -> Result<CoefficientVector> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let v = match law {
        CoefficientLaw::Gaussian => (0..dim).map(|_| complex_normal(rng)).collect(),
        CoefficientLaw::FubiniStudy => {
            // a = w'/w₀ for a Gaussian w ∈ C^{dim+1}
            let w0 = loop {
                let w = complex_normal(rng);
                if w != C64::new(0.0, 0.0) {
                    break w;
                }
            };
            (0..dim).map(|_| complex_normal(rng) / w0).collect()
        }
        CoefficientLaw::HeavyTail(h) => (0..dim).map(|_| h.sample(rng)).collect(),
        CoefficientLaw::Custom { sampler, .. } => {
            let v = sampler(rng, dim);
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            v
        }
    };
    Ok(CoefficientVector(v))
}

// ---------------------------------------------------------------------------
// moment certificates

/// How a certificate's constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMethod {
    ClosedFormRadial,
    Quadrature,
    MonteCarloBound,
}

/// Constants `(α, Dₙ)` of the moment condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCertificate {
    pub law: LawKind,
    pub alpha: f64,
    /// `D₀` for unitarily invariant laws, `B` in `Dₙ = B dₙ^{α/γ}` otherwise.
    pub constant: f64,
    /// Standard error of `constant` (zero for quadrature values).
    pub constant_se: f64,
    /// Exponent `α/γ` of `dₙ` (zero for unitarily invariant laws).
    pub dim_exponent: f64,
    pub method: CertificateMethod,
    pub is_estimate: bool,
}

impl MomentCertificate {
    /// `Dₙ` at coefficient dimension `dim`.
    pub fn d_at(&self, dim: usize) -> f64 {
        self.constant * (dim as f64).powf(self.dim_exponent)
    }
}

/// `2∫₀^∞ r s(log r) w(r) dr` where `s(t) = |t|^α` or, when `signed`, `t|t|^{α-1}`.
fn radial_integral<W: Fn(f64) -> f64 + Copy>(alpha: f64, signed: bool, w: W) -> Result<f64> {
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 20_000 };
    let f = move |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let l = r.ln();
        let p = l.abs().powf(alpha);
        let s = if signed && l < 0.0 { -p } else { p };
        2.0 * r * s * w(r)
    };
    let a = integrate(f, 0.0, 1.0, opts)?;
    let b = integrate_to_inf(f, 1.0, opts)?;
    let v = a.value + b.value;
    if !v.is_finite() {
        return Err(Error::Divergent(format!("radial log-moment with alpha = {alpha}")));
    }
    Ok(v)
}

/// `2∫₀^∞ r|log r|^α e^{-r²} dr` (or its signed variant).
pub fn gaussian_radial_moment(alpha: f64, signed: bool) -> Result<f64> {
    radial_integral(alpha, signed, |r| (-r * r).exp())
}

/// `2∫₀^∞ r|log r|^α (1+r²)^{-2} dr` (or its signed variant).
pub fn fs_radial_moment(alpha: f64, signed: bool) -> Result<f64> {
    radial_integral(alpha, signed, |r| (1.0 + r * r).powi(-2))
}

/// Options for the Monte Carlo estimate of `B` for non-invariant laws.
#[derive(Debug, Clone, Copy)]
pub struct BoundEstimate {
    pub seed: u64,
    pub dims: &'static [usize],
    pub vectors: usize,
    pub draws: usize,
}

impl Default for BoundEstimate {
    fn default() -> Self {
        Self { seed: 0x5eed, dims: &[1, 2, 4, 8, 16, 32], vectors: 8, draws: 20_000 }
    }
}

/// Certificate `(α, Dₙ)` for a law.
///
/// Gaussian and Fubini–Study laws get `D₀` by quadrature of the radial
/// integrals; for the heavy-tail law `B` is the largest upper 3-SE bound of
/// `∫|log|⟨a,v⟩||^α / d^{α/γ}` over the probe dimensions and vectors.
pub fn moment_constant(law: &CoefficientLaw, alpha: f64) -> Result<MomentCertificate> {
    moment_constant_with(law, alpha, BoundEstimate::default())
}

pub fn moment_constant_with(law: &CoefficientLaw, alpha: f64, est: BoundEstimate) -> Result<MomentCertificate> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must be at least 1 (got {alpha})")));
    }
    match law {
        CoefficientLaw::Gaussian => Ok(MomentCertificate {
            law: LawKind::Gaussian,
            alpha,
            constant: gaussian_radial_moment(alpha, false)?,
            constant_se: 0.0,
            dim_exponent: 0.0,
            method: CertificateMethod::Quadrature,
            is_estimate: false,
        }),
        CoefficientLaw::FubiniStudy => Ok(MomentCertificate {
            law: LawKind::FubiniStudy,
            alpha,
            constant: fs_radial_moment(alpha, false)?,
            constant_se: 0.0,
            dim_exponent: 0.0,
            method: CertificateMethod::Quadrature,
            is_estimate: false,
        }),
        CoefficientLaw::HeavyTail(h) => {
            if !(alpha < h.gamma) {
                return Err(Error::Divergent(format!("alpha = {alpha} must be below gamma = {}", h.gamma)));
            }
            let expo = alpha / h.gamma;
            let mut best = (0.0f64, 0.0f64);
            for &d in est.dims {
                let mut rng = stream(est.seed, "moment-bound-vectors", &[d as u64]);
                for k in 0..est.vectors {
                    let v = unit_vector(&mut rng, d);
                    let (m, se) = log_moment_mc(law, &v, alpha, est.draws, est.seed, &[d as u64, k as u64])?;
                    let scale = (d as f64).powf(expo);
                    let upper = (m + 3.0 * se) / scale;
                    if upper > best.0 {
                        best = (upper, se / scale);
                    }
                }
            }
            Ok(MomentCertificate {
                law: LawKind::HeavyTail,
                alpha,
                constant: best.0,
                constant_se: best.1,
                dim_exponent: expo,
                method: CertificateMethod::MonteCarloBound,
                is_estimate: true,
            })
        }
        CoefficientLaw::Custom { name, .. } => {
            Err(Error::InvalidParameter(format!("no moment certificate recipe for custom law {name:?}")))
        }
    }
}

/// MC mean and SE of `|log|⟨a, v⟩||^α`.
fn log_moment_mc(law: &CoefficientLaw, v: &[C64], alpha: f64, draws: usize, seed: u64, key: &[u64]) -> Result<(f64, f64)> {
    let mut rng = stream(seed, "moment-draws", key);
    let mut xs = Vec::with_capacity(draws);
    for _ in 0..draws {
        let a = sample_coefficients(law, v.len(), &mut rng)?;
        let ip: C64 = a.0.iter().zip(v).map(|(x, y)| x * y.conj()).sum();
        xs.push(ip.norm().ln().abs().powf(alpha));
    }
    Ok((mean(&xs), std_error(&xs)))
}

/// Outcome of [`empirical_moment_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub dim: usize,
    pub alpha: f64,
    pub certificate: f64,
    /// Per-vector `(estimate, se)`.
    pub estimates: Vec<(f64, f64)>,
    pub max_estimate: f64,
    pub max_se: f64,
    /// Mean over all vectors' draws, with SE.
    pub pooled: f64,
    pub pooled_se: f64,
    pub pass: bool,
}

/// Estimate `∫|log|⟨a,v⟩||^α dμ` for 32 random unit vectors and compare with
/// the certificate: the largest estimate must stay below `Dₙ + 3 SE`.
pub fn empirical_moment_check(law: &CoefficientLaw, cert: &MomentCertificate, dim: usize, trials: usize, seed: u64) -> Result<MomentCheck> {
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least 2 trials".into()));
    }
    let dn = cert.d_at(dim);
    let mut vrng = stream(seed, "moment-check-vectors", &[dim as u64]);
    let mut estimates = Vec::with_capacity(32);
    for k in 0..32u64 {
        let v = unit_vector(&mut vrng, dim);
        estimates.push(log_moment_mc(law, &v, cert.alpha, trials, seed, &[dim as u64, k, 1])?);
    }
    let (max_estimate, max_se) = estimates.iter().copied().fold((f64::NEG_INFINITY, 0.0), |b, e| if e.0 > b.0 { e } else { b });
    let means: Vec<f64> = estimates.iter().map(|e| e.0).collect();
    let pooled = mean(&means);
    let pooled_se = (estimates.iter().map(|e| e.1 * e.1).sum::<f64>()).sqrt() / estimates.len() as f64;
    Ok(MomentCheck {
        dim,
        alpha: cert.alpha,
        certificate: dn,
        pass: max_estimate <= dn + 3.0 * max_se,
        estimates,
        max_estimate,
        max_se,
        pooled,
        pooled_se,
    })
}

/// Partial sums of `Σ Dₙ^{2/α}/n²` and the fitted power of the terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub alpha: f64,
    pub m: usize,
    pub n_max: usize,
    pub partial_sum: f64,
    /// Partial sums at `n = n_max/8, n_max/4, n_max/2, n_max`.
    pub checkpoints: Vec<(usize, f64)>,
    pub fit: LineFit,
    pub convergent: bool,
}

/// Sum the terms `Dₙ^{2/α}/n²` for `n ≤ n_max` (with `dₙ = C(m+n, n)`) and
/// fit the log-log slope of the terms over the last three quarters.
pub fn summability_audit(cert: &MomentCertificate, m: usize, n_max: usize) -> Result<SummabilityReport> {
    if n_max < 8 {
        return Err(Error::InvalidParameter("n_max must be at least 8".into()));
    }
    let p = 2.0 / cert.alpha;
    let mut sum = 0.0;
    let mut checkpoints = Vec::new();
    let marks = [n_max / 8, n_max / 4, n_max / 2, n_max];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 1..=n_max {
        let d = space_dimension(m, n)?;
        let t = cert.d_at(d).powf(p) / (n as f64 * n as f64);
        sum += t;
        if marks.contains(&n) {
            checkpoints.push((n, sum));
        }
        if n >= n_max / 4 {
            xs.push((n as f64).ln());
            ys.push(t.ln());
        }
    }
    let fit = fit_line(&xs, &ys);
    Ok(SummabilityReport { alpha: cert.alpha, m, n_max, partial_sum: sum, checkpoints, convergent: fit.slope < -1.0, fit })
}

// ---------------------------------------------------------------------------
// certificate cache

/// Certificates keyed by `(kind, alpha, params)`, persisted as JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificateCache {
    pub entries: BTreeMap<String, MomentCertificate>,
}

impl CertificateCache {
    pub fn key(law: &CoefficientLaw, alpha: f64) -> String {
        match law {
            CoefficientLaw::HeavyTail(h) => {
                format!("heavy_tail|alpha={alpha}|gamma={}|delta={}|m={}", h.gamma, h.delta, h.m)
            }
            CoefficientLaw::Custom { name, .. } => format!("custom:{name}|alpha={alpha}"),
            CoefficientLaw::Gaussian => format!("gaussian|alpha={alpha}"),
            CoefficientLaw::FubiniStudy => format!("fubini_study|alpha={alpha}"),
        }
    }

    pub fn get_or_compute(&mut self, law: &CoefficientLaw, alpha: f64) -> Result<MomentCertificate> {
        let key = Self::key(law, alpha);
        if let Some(c) = self.entries.get(&key) {
            return Ok(c.clone());
        }
        let c = moment_constant(law, alpha)?;
        self.entries.insert(key, c.clone());
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
