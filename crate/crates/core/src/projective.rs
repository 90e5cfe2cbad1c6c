//! Random holomorphic sections of `O(n)` over `CP¹` and `CP²` with the
//! Fubini–Study metric.
//!
//! A section is stored through its affine polynomial in the chart
//! `Z₀ = 1`; its pointwise norm is `|p(z)| (1+‖z‖²)^{-n/2}`. Other charts are
//! reached by homogenizing and dehomogenizing, which is how zeros at infinity
//! are located.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compact::{extremal_analytic, Weight, WeightedCompact};
use crate::config::ExperimentConfig;
use crate::ensembles::{sample_coefficients, CoefficientLaw};
use crate::parallel::par_map;
use crate::poly::{space_dimension, BasisFamily, CoefficientVector, MultiIndex, Polynomial};
use crate::report::{Audit, ExperimentReport};
use crate::rng::{complex_normal, stream};
use crate::stats::{ks_two_sample, mean, pairwise_sum, std_error};
use crate::zeros::{roots_with_degree_trim, solve_system_2d, ZeroSample};
use crate::{Error, Result, C64};

const MAX_ATTEMPTS: u64 = 16;

/// `H⁰(CP^m, O(n))` with an orthonormal-type basis of affine polynomials.
#[derive(Debug, Clone)]
pub struct SectionSpace {
    pub m: usize,
    pub n: usize,
    pub basis: BasisFamily,
    pub d_n: usize,
}

impl SectionSpace {
    /// Fubini–Study orthonormal monomial sections.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if !(m == 1 || m == 2) {
            return Err(Error::InvalidParameter(format!("projective dimension must be 1 or 2 (got {m})")));
        }
        Self::with_basis(BasisFamily::fs_orthonormal(m, n)?)
    }

    /// Sections given by any basis of degree-`n` polynomials.
    pub fn with_basis(basis: BasisFamily) -> Result<Self> {
        let (m, n) = (basis.num_vars(), basis.degree());
        Ok(Self { m, n, d_n: space_dimension(m, n)?, basis })
    }

    /// Constants `(B₁, B₂) = (1/m!, e^m)` with `B₁ nᵐ ≤ dₙ ≤ B₂ nᵐ`.
    pub fn growth_constants(m: usize) -> (f64, f64) {
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        (1.0 / fact, (m as f64).exp())
    }
}

fn log1p_norm2(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().ln_1p()
}

/// `log |p_s(z)|` without overflow.
fn log_abs_section(s: &CoefficientVector, basis: &BasisFamily, z: &[C64]) -> Result<f64> {
    if s.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: s.len() });
    }
    let (vals, log_scale) = basis.eval_scaled(z)?;
    let v: C64 = vals.iter().zip(&s.0).map(|(p, a)| p * a).sum();
    Ok(v.norm().ln() + log_scale)
}

/// `‖s(z)‖_{hⁿ} = |p_s(z)| (1+‖z‖²)^{-n/2}` in the chart `Z₀ = 1`.
pub fn fs_section_norm(s: &CoefficientVector, space: &SectionSpace, z: &[C64]) -> Result<f64> {
    let l = log_abs_section(s, &space.basis, z)?;
    Ok((l - 0.5 * space.n as f64 * log1p_norm2(z)).exp())
}

/// The section's polynomial in the chart `Z_k = 1` (variables: the other
/// homogeneous coordinates in increasing order).
pub fn section_in_chart(s: &CoefficientVector, space: &SectionSpace, chart: usize) -> Result<Polynomial> {
    if chart > space.m {
        return Err(Error::InvalidParameter(format!("chart {chart} does not exist on CP^{}", space.m)));
    }
    let coeffs = space.basis.monomial_coeffs(&s.0)?;
    let n = space.n as u32;
    let terms = space.basis.monomials().iter().zip(coeffs).map(|(a, c)| {
        let mut hom = Vec::with_capacity(space.m + 1);
        hom.push(n - a.degree());
        hom.extend_from_slice(&a.0);
        hom.remove(chart);
        (MultiIndex::new(hom), c)
    });
    Ok(Polynomial::from_terms(space.m, terms))
}

/// Affine coordinates in chart `k` of the point with chart-0 coordinates `z`.
pub fn to_chart(z: &[C64], chart: usize) -> Result<Vec<C64>> {
    let mut hom = Vec::with_capacity(z.len() + 1);
    hom.push(C64::new(1.0, 0.0));
    hom.extend_from_slice(z);
    let zk = hom[chart];
    if zk == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter(format!("point lies off chart {chart}")));
    }
    hom.remove(chart);
    Ok(hom.into_iter().map(|c| c / zk).collect())
}

/// Section norm evaluated in chart `k` at chart coordinates `w`.
pub fn fs_section_norm_in_chart(s: &CoefficientVector, space: &SectionSpace, chart: usize, w: &[C64]) -> Result<f64> {
    let p = section_in_chart(s, space, chart)?;
    Ok(p.eval(w)?.norm() * (-0.5 * space.n as f64 * log1p_norm2(w)).exp())
}

/// `Γₙ(z) = Σⱼ ‖s_{nj}(z)‖²`; constant `dₙ` for the FS-orthonormal family.
pub fn bergman_gamma_sections(space: &SectionSpace, z: &[C64]) -> Result<f64> {
    let lg = space.basis.log_bergman_gamma(z)?;
    Ok((lg - space.n as f64 * log1p_norm2(z)).exp())
}

/// Largest relative deviation of `Γₙ` from its mean over `points`.
pub fn gamma_constancy_residual(space: &SectionSpace, points: &[Vec<C64>]) -> Result<f64> {
    let g: Vec<f64> = points.iter().map(|z| bergman_gamma_sections(space, z)).collect::<Result<_>>()?;
    let avg = mean(&g);
    Ok(g.iter().map(|v| (v / avg - 1.0).abs()).fold(0.0, f64::max))
}

/// Limit of `(1/2n) log Γₙ` for sections sup-normalized on `(K, q_FS)`:
/// `V_{K,q}(z) − ½ log(1+‖z‖²)`.
pub fn sections_extremal(kq: &WeightedCompact, z: &[C64]) -> Result<f64> {
    if *kq.weight() != Weight::FubiniStudy {
        return Err(Error::Precondition("sections are normalized against the Fubini–Study weight".into()));
    }
    Ok(extremal_analytic(kq, z)? - 0.5 * log1p_norm2(z))
}

/// `k` independent sections drawn from disjoint streams.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSystem {
    pub k: usize,
    pub sections: Vec<CoefficientVector>,
}

impl SectionSystem {
    pub fn draw(law: &CoefficientLaw, space: &SectionSpace, k: usize, seed: u64, key: &[u64]) -> Result<Self> {
        if k == 0 || k > space.m {
            return Err(Error::InvalidParameter(format!("codimension must be in 1..={}", space.m)));
        }
        let sections = (0..k)
            .map(|i| {
                let mut kk = key.to_vec();
                kk.push(i as u64);
                let mut rng = stream(seed, "section", &kk);
                sample_coefficients(law, space.basis.dim(), &mut rng)
            })
            .collect::<Result<_>>()?;
        Ok(Self { k, sections })
    }
}

/// Zeros of a section system on `CP^m`: the affine part plus points on the
/// hyperplane at infinity, given in homogeneous coordinates `[0 : …]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CpZeros {
    pub affine: ZeroSample,
    pub infinity: Vec<Vec<C64>>,
    /// Multiplicity-weighted count at infinity (`nᵐ` minus the affine count).
    pub at_infinity: u32,
    /// Affine plus infinity; equals `nᵐ` (Bézout).
    pub total: u32,
}

fn leading_form_roots(p: &Polynomial, n: usize) -> Result<ZeroSample> {
    // p_top(1, t) in the variable t = Z₂/Z₁
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    for (a, &v) in p.terms() {
        if a.degree() as usize == n {
            c[a.0[1] as usize] = v;
        }
    }
    roots_with_degree_trim(&c, n, 0.0)
}

/// Simultaneous zeros of `k = m` sections, with zeros at infinity found in
/// the second chart.
pub fn zero_locus_cp(system: &SectionSystem, space: &SectionSpace) -> Result<CpZeros> {
    if system.k != space.m {
        return Err(Error::Precondition("only the point case k = m is supported".into()));
    }
    let n = space.n;
    let zero = C64::new(0.0, 0.0);
    if space.m == 1 {
        let c = space.basis.univariate_coeffs(&system.sections[0].0)?;
        if c.iter().all(|v| *v == zero) {
            return Err(Error::NonGeneric("zero section".into()));
        }
        let affine = roots_with_degree_trim(&c, n, 0.0)?;
        let at_inf = affine.at_infinity;
        let infinity = if at_inf > 0 { vec![vec![zero, C64::new(1.0, 0.0)]] } else { Vec::new() };
        return Ok(CpZeros { total: affine.finite_count() + at_inf, affine, infinity, at_infinity: at_inf });
    }
    let p = space.basis.combine(&system.sections[0])?;
    let q = space.basis.combine(&system.sections[1])?;
    if p.is_zero() || q.is_zero() {
        return Err(Error::NonGeneric("zero section".into()));
    }
    let mut affine = solve_system_2d(&p, &q)?;
    let bezout = (n * n) as u32;
    let finite = affine.finite_count();
    let at_inf = bezout.saturating_sub(finite);
    affine.at_infinity = at_inf;
    let mut infinity = Vec::new();
    if at_inf > 0 {
        // common zeros of the leading forms on the line Z₀ = 0
        let rp = leading_form_roots(&p, n)?;
        let q_top = |t: C64| {
            let (mut v, mut s) = (zero, 0.0);
            for (a, &c) in q.terms() {
                if a.degree() as usize == n {
                    let w = t.powu(a.0[1]);
                    v += c * w;
                    s += c.norm() * w.norm();
                }
            }
            if s > 0.0 {
                v.norm() / s
            } else {
                0.0
            }
        };
        for pt in &rp.points {
            if q_top(pt[0]) <= 1e-8 {
                infinity.push(vec![zero, C64::new(1.0, 0.0), pt[0]]);
            }
        }
        if rp.at_infinity > 0 {
            infinity.push(vec![zero, zero, C64::new(1.0, 0.0)]);
        }
    }
    Ok(CpZeros { total: finite + at_inf, affine, infinity, at_infinity: at_inf })
}

// ---------------------------------------------------------------------------
// sphere and test regions

/// Stereographic image of `z` on the unit sphere; `∞` is the north pole.
pub fn to_sphere(z: C64) -> [f64; 3] {
    let r = z.norm();
    if !r.is_finite() || r > 1e150 {
        return [0.0, 0.0, 1.0];
    }
    let r2 = r * r;
    let d = 1.0 + r2;
    [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
}

/// Spherical cap `{x : x·c ≥ cos θ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: [f64; 3],
    pub angle: f64,
}

impl Cap {
    pub fn from_lat_lon(lat_deg: f64, lon_deg: f64, angle_deg: f64) -> Self {
        let (la, lo) = (lat_deg.to_radians(), lon_deg.to_radians());
        Self { center: [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()], angle: angle_deg.to_radians() }
    }

    pub fn contains(&self, x: &[f64; 3]) -> bool {
        x[0] * self.center[0] + x[1] * self.center[1] + x[2] * self.center[2] >= self.angle.cos()
    }

    /// Normalized area, i.e. the `ω`-mass on `CP¹`.
    pub fn area(&self) -> f64 {
        0.5 * (1.0 - self.angle.cos())
    }
}

/// 16 caps of radius 35° at latitudes ±20°, ±60° and four longitudes per
/// latitude (odd rows shifted by 45°).
pub fn cap_dictionary() -> Vec<Cap> {
    let mut v = Vec::with_capacity(16);
    for (row, lat) in [-60.0, -20.0, 20.0, 60.0].into_iter().enumerate() {
        for k in 0..4 {
            let lon = 90.0 * k as f64 + 45.0 * (row % 2) as f64;
            v.push(Cap::from_lat_lon(lat, lon, 35.0));
        }
    }
    v
}

/// Product window `{s₀ ≤ |z₁|² < s₁} × {t₀ ≤ |z₂|² < t₁}` in the chart `Z₀ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub s: [f64; 2],
    pub t: [f64; 2],
}

impl Window {
    pub fn contains(&self, z: &[C64]) -> bool {
        let (a, b) = (z[0].norm_sqr(), z[1].norm_sqr());
        a >= self.s[0] && a < self.s[1] && b >= self.t[0] && b < self.t[1]
    }

    /// Normalized `ω²`-mass: with density `(2/π²)(1+‖z‖²)^{-3}` and
    /// `G(s, t) = (1+s+t)^{-1}`, the mass is the rectangle difference of `G`.
    pub fn mass(&self) -> f64 {
        let g = |s: f64, t: f64| if s.is_infinite() || t.is_infinite() { 0.0 } else { 1.0 / (1.0 + s + t) };
        g(self.s[1], self.t[1]) - g(self.s[0], self.t[1]) - g(self.s[1], self.t[0]) + g(self.s[0], self.t[0])
    }
}

/// The 3×3 product windows cut at `|zⱼ|² ∈ {0.5, 2}`.
pub fn window_dictionary() -> Vec<Window> {
    let bands = [[0.0, 0.5], [0.5, 2.0], [2.0, f64::INFINITY]];
    let mut v = Vec::with_capacity(9);
    for s in bands {
        for t in bands {
            v.push(Window { s, t });
        }
    }
    v
}

/// Uniformly random rotation of `R³` from a unit quaternion.
pub fn random_rotation(seed: u64, index: u64) -> [[f64; 3]; 3] {
    let mut rng = stream(seed, "rotation", &[index]);
    let (a, b) = (complex_normal(&mut rng), complex_normal(&mut rng));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (w, x, y, z) = (a.re / n, a.im / n, b.re / n, b.im / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn rotate(r: &[[f64; 3]; 3], x: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| r[i][0] * x[0] + r[i][1] * x[1] + r[i][2] * x[2])
}

// ---------------------------------------------------------------------------
// experiment

/// Empirical mass of a test region, averaged over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub n: usize,
    /// `cap`, `hemisphere` or `window`.
    pub kind: String,
    pub index: usize,
    pub target: f64,
    pub mean: f64,
    pub se: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezoutRow {
    pub n: usize,
    pub trials: usize,
    pub expected: u32,
    /// Trials whose total count differs from `nᵐ`.
    pub miscounts: usize,
    pub non_generic: u64,
    /// Trials with zeros at infinity.
    pub with_infinity: usize,
}

/// Two-sample KS test of cap masses, rotated cloud vs original.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationRow {
    pub n: usize,
    pub rotation: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Independence check on pairs of systems: mean of `X·X'` against the
/// product of the means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub n: usize,
    pub window: usize,
    pub mean_product: f64,
    pub product_of_means: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveSection {
    pub m: usize,
    pub regions: Vec<RegionRow>,
    pub bezout: Vec<BezoutRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rotation: Vec<RotationRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub product: Vec<ProductRow>,
    /// `(n, max relative deviation of Γₙ from dₙ)`.
    pub gamma_constancy: Vec<(usize, f64)>,
    /// `(min, max)` of `dₙ/nᵐ` over `n ≤ 512`.
    pub dimension_ratio: (f64, f64),
    /// First trial at the top degree: affine `(re, im…)`, sphere `(x, y, z)` on `CP¹`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cloud: Vec<Vec<f64>>,
}

impl ProjectiveSection {
    pub fn tables(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut s = String::from("n,kind,index,target,mean,se,deviation\n");
        for r in &self.regions {
            let _ = writeln!(s, "{},{},{},{:e},{:e},{:e},{:e}", r.n, r.kind, r.index, r.target, r.mean, r.se, r.deviation);
        }
        out.push(("regions".to_string(), s));
        let mut s = String::from("n,trials,expected,miscounts,non_generic,with_infinity\n");
        for b in &self.bezout {
            let _ = writeln!(s, "{},{},{},{},{},{}", b.n, b.trials, b.expected, b.miscounts, b.non_generic, b.with_infinity);
        }
        out.push(("bezout".to_string(), s));
        if !self.rotation.is_empty() {
            let mut s = String::from("n,rotation,statistic,p_value\n");
            for r in &self.rotation {
                let _ = writeln!(s, "{},{},{:e},{:e}", r.n, r.rotation, r.statistic, r.p_value);
            }
            out.push(("rotation".to_string(), s));
        }
        if !self.product.is_empty() {
            let mut s = String::from("n,window,mean_product,product_of_means,se\n");
            for r in &self.product {
                let _ = writeln!(s, "{},{},{:e},{:e},{:e}", r.n, r.window, r.mean_product, r.product_of_means, r.se);
            }
            out.push(("product".to_string(), s));
        }
        if !self.cloud.is_empty() {
            let mut s = if self.m == 1 { String::from("re,im,x,y,z\n") } else { String::from("re_1,im_1,re_2,im_2\n") };
            for p in &self.cloud {
                let row: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(s, "{}", row.join(","));
            }
            out.push(("zeros".to_string(), s));
        }
        out
    }
}

/// Per-trial output: zeros with multiplicity in chart 0 plus the count at infinity.
struct TrialZeros {
    points: Vec<(Vec<C64>, u32)>,
    at_infinity: u32,
    total: u32,
    non_generic: u64,
}

fn trial_zeros(law: &CoefficientLaw, space: &SectionSpace, seed: u64, n: usize, t: usize) -> Result<TrialZeros> {
    let mut non_generic = 0;
    for attempt in 0..MAX_ATTEMPTS {
        let sys = SectionSystem::draw(law, space, space.m, seed, &[n as u64, t as u64, attempt])?;
        match zero_locus_cp(&sys, space) {
            Ok(z) => {
                let points = z.affine.points.into_iter().zip(z.affine.multiplicities).collect();
                return Ok(TrialZeros { points, at_infinity: z.at_infinity, total: z.total, non_generic });
            }
            Err(Error::NonGeneric(_)) => non_generic += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonGeneric(format!("{MAX_ATTEMPTS} consecutive non-generic draws")))
}

fn summary_row(n: usize, kind: &str, index: usize, target: f64, xs: &[f64]) -> RegionRow {
    let m = mean(xs);
    RegionRow { n, kind: kind.to_string(), index, target, mean: m, se: std_error(xs), deviation: m - target }
}

/// Zeros of random section systems against the Fubini–Study volume on a
/// fixed dictionary of caps (`CP¹`) or product windows (`CP²`).
pub fn global_equidist_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let workers = if workers == 0 { cfg.workers.unwrap_or(1) } else { workers };
    let spec = cfg.projective.clone().ok_or_else(|| Error::Config("missing [projective] table".into()))?;
    let m = spec.m;
    let law = cfg.build_law()?;
    if !law.is_unitarily_invariant() {
        return Err(Error::Precondition("projective runs use unitarily invariant laws".into()));
    }
    let tol = cfg.audit.deviation_tolerance.unwrap_or(if m == 1 { 0.02 } else { 0.05 });
    let mut rep = ExperimentReport::new(cfg, "global-equidistribution");
    let (b1, b2) = SectionSpace::growth_constants(m);
    let ratios: Vec<f64> =
        (1..=512usize).map(|n| space_dimension(m, n).map(|d| d as f64 / (n as f64).powi(m as i32))).collect::<Result<_>>()?;
    let dim_ratio = (ratios.iter().cloned().fold(f64::INFINITY, f64::min), ratios.iter().cloned().fold(0.0, f64::max));
    rep.audits.push(Audit::at_least("d_n / n^m >= 1/m! for n <= 512", dim_ratio.0, b1));
    rep.audits.push(Audit::at_most("d_n / n^m <= e^m for n <= 512", dim_ratio.1, b2));

    let caps = cap_dictionary();
    let windows = window_dictionary();
    let probe: Vec<Vec<C64>> = (0..64)
        .map(|k| {
            let r = 0.05 * k as f64;
            let z = C64::from_polar(r, 2.4 * k as f64);
            if m == 1 {
                vec![z]
            } else {
                vec![z, C64::from_polar(3.0 - r, 1.3 * k as f64)]
            }
        })
        .collect();
    let mut section = ProjectiveSection {
        m,
        regions: Vec::new(),
        bezout: Vec::new(),
        rotation: Vec::new(),
        product: Vec::new(),
        gamma_constancy: Vec::new(),
        dimension_ratio: dim_ratio,
        cloud: Vec::new(),
    };
    let rotations: Vec<[[f64; 3]; 3]> = (0..spec.rotations as u64).map(|i| random_rotation(cfg.seed, i)).collect();
    let rot_cap = Cap::from_lat_lon(90.0, 0.0, 60.0);

    for (di, &n) in cfg.degrees.iter().enumerate() {
        let space = SectionSpace::new(m, n)?;
        let res = gamma_constancy_residual(&space, &probe)?;
        section.gamma_constancy.push((n, res));
        rep.audits.push(Audit::at_most(format!("n = {n}: Gamma_n constant on the manifold"), res, 1e-9));

        let out = par_map(workers, cfg.trials, |t| trial_zeros(&law, &space, cfg.seed, n, t));
        let trials: Vec<TrialZeros> = out.into_iter().collect::<Result<_>>()?;
        let expected = n.pow(m as u32) as u32;
        let nm = expected as f64;
        let ng: u64 = trials.iter().map(|t| t.non_generic).sum();
        rep.events.non_generic += ng;
        let miscounts = trials.iter().filter(|t| t.total != expected).count();
        let with_infinity = trials.iter().filter(|t| t.at_infinity > 0).count();
        section.bezout.push(BezoutRow { n, trials: trials.len(), expected, miscounts, non_generic: ng, with_infinity });
        rep.audits.push(Audit::at_most(format!("n = {n}: trials with count != n^m"), miscounts as f64, 0.0));
        rep.audits.push(Audit::at_most(format!("n = {n}: non-generic rate"), ng as f64 / (ng as f64 + trials.len() as f64), 0.01));

        if m == 1 {
            let clouds: Vec<Vec<([f64; 3], u32)>> = trials
                .iter()
                .map(|t| {
                    let mut c: Vec<([f64; 3], u32)> = t.points.iter().map(|(p, k)| (to_sphere(p[0]), *k)).collect();
                    if t.at_infinity > 0 {
                        c.push(([0.0, 0.0, 1.0], t.at_infinity));
                    }
                    c
                })
                .collect();
            let mass = |cloud: &[([f64; 3], u32)], f: &dyn Fn(&[f64; 3]) -> bool| -> f64 {
                let v: Vec<f64> = cloud.iter().filter(|(x, _)| f(x)).map(|(_, k)| *k as f64).collect();
                pairwise_sum(&v) / nm
            };
            for (ci, cap) in caps.iter().enumerate() {
                let xs: Vec<f64> = clouds.iter().map(|c| mass(c, &|x| cap.contains(x))).collect();
                section.regions.push(summary_row(n, "cap", ci, cap.area(), &xs));
            }
            let xs: Vec<f64> = clouds.iter().map(|c| mass(c, &|x| x[2] > 0.0)).collect();
            section.regions.push(summary_row(n, "hemisphere", 0, 0.5, &xs));
            let base: Vec<f64> = clouds.iter().map(|c| mass(c, &|x| rot_cap.contains(x))).collect();
            for (ri, r) in rotations.iter().enumerate() {
                let xs: Vec<f64> = clouds.iter().map(|c| mass(c, &|x| rot_cap.contains(&rotate(r, x)))).collect();
                let (d, p) = ks_two_sample(&base, &xs);
                section.rotation.push(RotationRow { n, rotation: ri, statistic: d, p_value: p });
                rep.audits.push(Audit::at_least(format!("n = {n}, rotation {ri}: KS p-value"), p, 0.01));
            }
            if di + 1 == cfg.degrees.len() {
                if let Some(t) = trials.first() {
                    section.cloud = t
                        .points
                        .iter()
                        .map(|(p, _)| {
                            let x = to_sphere(p[0]);
                            vec![p[0].re, p[0].im, x[0], x[1], x[2]]
                        })
                        .collect();
                }
            }
        } else {
            let masses: Vec<Vec<f64>> = trials
                .iter()
                .map(|t| {
                    windows
                        .iter()
                        .map(|w| {
                            let v: Vec<f64> = t.points.iter().filter(|(p, _)| w.contains(p)).map(|(_, k)| *k as f64).collect();
                            pairwise_sum(&v) / nm
                        })
                        .collect()
                })
                .collect();
            for (wi, w) in windows.iter().enumerate() {
                let xs: Vec<f64> = masses.iter().map(|v| v[wi]).collect();
                section.regions.push(summary_row(n, "window", wi, w.mass(), &xs));
                // independent consecutive pairs
                let pairs = xs.len() / 2;
                if pairs >= 2 {
                    let a: Vec<f64> = (0..pairs).map(|i| xs[2 * i]).collect();
                    let b: Vec<f64> = (0..pairs).map(|i| xs[2 * i + 1]).collect();
                    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
                    let (mp, pm) = (mean(&prod), mean(&a) * mean(&b));
                    let se = std_error(&prod).hypot(mean(&a) * std_error(&b)).hypot(mean(&b) * std_error(&a));
                    let gap = (mp - pm).abs();
                    let z = if gap == 0.0 { 0.0 } else { gap / se };
                    rep.audits.push(Audit::at_most(format!("n = {n}, window {wi}: |E[XX'] - E[X]E[X']| / SE"), z, 3.0));
                    section.product.push(ProductRow { n, window: wi, mean_product: mp, product_of_means: pm, se });
                }
            }
            if di + 1 == cfg.degrees.len() {
                if let Some(t) = trials.first() {
                    section.cloud = t.points.iter().map(|(p, _)| vec![p[0].re, p[0].im, p[1].re, p[1].im]).collect();
                }
            }
        }
    }
    for r in &section.regions {
        rep.audits.push(Audit::at_most(format!("n = {}, {} {}: |mass - FS mass|", r.n, r.kind, r.index), r.deviation.abs(), tol));
    }
    rep.notes.push("zero masses compared with the normalized Fubini–Study volume".into());
    rep.projective = Some(section);
    Ok(rep)
}

/// Total `ω`-mass of the sphere by the cap formula (used as a sanity value).
pub fn sphere_area_check() -> f64 {
    Cap { center: [0.0, 0.0, 1.0], angle: PI }.area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::CompactKind;
    use crate::poly::normalize_sup;

    #[test]
    fn constant_section_norm() {
        let sp = SectionSpace::with_basis(BasisFamily::monomial(1, 2).unwrap()).unwrap();
        let one = CoefficientVector::unit(3, 0);
        assert!((fs_section_norm(&one, &sp, &[C64::new(0.0, 0.0)]).unwrap() - 1.0).abs() < 1e-15);
        let far = fs_section_norm(&one, &sp, &[C64::new(1e4, 0.0)]).unwrap();
        assert!((far * 1e8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn chart_overlap_agrees() {
        for m in [1, 2] {
            let sp = SectionSpace::new(m, 5).unwrap();
            let mut rng = stream(3, "chart", &[m as u64]);
            let s = sample_coefficients(&CoefficientLaw::Gaussian, sp.basis.dim(), &mut rng).unwrap();
            for k in 0..8 {
                let z: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, 0.7 * k as f64 + j as f64)).collect();
                let a = fs_section_norm(&s, &sp, &z).unwrap();
                for chart in 1..=m {
                    let w = to_chart(&z, chart).unwrap();
                    let b = fs_section_norm_in_chart(&s, &sp, chart, &w).unwrap();
                    assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn fs_gamma_is_constant() {
        let sp = SectionSpace::new(1, 3).unwrap();
        let pts: Vec<Vec<C64>> = (0..50).map(|k| vec![C64::from_polar(0.1 * k as f64, k as f64)]).collect();
        assert!(gamma_constancy_residual(&sp, &pts).unwrap() < 1e-9);
        assert!((bergman_gamma_sections(&sp, &pts[7]).unwrap() - 4.0).abs() < 1e-9);
        let sp = SectionSpace::new(2, 6).unwrap();
        let z = [C64::new(0.3, -2.0), C64::new(1.5, 0.2)];
        assert!((bergman_gamma_sections(&sp, &z).unwrap() / 28.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn roots_of_unity_section() {
        let n = 6;
        let sp = SectionSpace::with_basis(BasisFamily::monomial(1, n).unwrap()).unwrap();
        let mut a = vec![C64::new(0.0, 0.0); n + 1];
        a[0] = C64::new(-1.0, 0.0);
        a[n] = C64::new(1.0, 0.0);
        let z = zero_locus_cp(&SectionSystem { k: 1, sections: vec![CoefficientVector(a)] }, &sp).unwrap();
        assert_eq!(z.total, n as u32);
        assert_eq!(z.at_infinity, 0);
        for p in &z.affine.points {
            assert!((p[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lower_degree_section_has_zero_at_infinity() {
        let n = 5;
        let sp = SectionSpace::new(1, n).unwrap();
        let mut rng = stream(4, "inf", &[]);
        let mut s = sample_coefficients(&CoefficientLaw::Gaussian, n + 1, &mut rng).unwrap();
        s.0[n] = C64::new(0.0, 0.0);
        let z = zero_locus_cp(&SectionSystem { k: 1, sections: vec![s] }, &sp).unwrap();
        assert_eq!(z.at_infinity, 1);
        assert_eq!(z.total, n as u32);
        assert_eq!(z.infinity, vec![vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]]);
    }

    #[test]
    fn cp2_bezout_and_infinity() {
        let sp = SectionSpace::new(2, 4).unwrap();
        let law = CoefficientLaw::Gaussian;
        for t in 0..20 {
            let sys = SectionSystem::draw(&law, &sp, 2, 9, &[t]).unwrap();
            let z = zero_locus_cp(&sys, &sp).unwrap();
            assert_eq!(z.total, 16);
            assert_eq!(z.affine.finite_count(), 16);
        }
        // drop the x^n and x^{n-1}y, ... terms of both: the leading forms share [0:1:0]
        let mut sys = SectionSystem::draw(&law, &sp, 2, 9, &[99]).unwrap();
        for s in &mut sys.sections {
            for (j, a) in sp.basis.monomials().iter().enumerate() {
                if a.degree() == 4 && a.0[1] == 0 {
                    s.0[j] = C64::new(0.0, 0.0);
                }
            }
        }
        let z = zero_locus_cp(&sys, &sp).unwrap();
        assert_eq!(z.total, 16);
        assert!(z.at_infinity >= 1);
        assert!(z.infinity.iter().any(|p| p[2].norm() < 1e-6));
    }

    #[test]
    fn window_masses_partition_unity() {
        let total: f64 = window_dictionary().iter().map(Window::mass).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let caps: f64 = cap_dictionary().iter().map(Cap::area).sum();
        assert!(caps > 1.0);
        assert!((sphere_area_check() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn window_mass_matches_quadrature() {
        // Monte Carlo-free check: integrate (2/π²)(1+|z|²)^{-3} in polar
        // coordinates s = |z₁|², t = |z₂|² with density 2(1+s+t)^{-3}
        let w = Window { s: [0.5, 2.0], t: [0.0, 0.5] };
        let (gx, gw) = crate::quad::gauss_legendre(40);
        let mut acc = 0.0;
        for (xi, wi) in gx.iter().zip(&gw) {
            let s = 1.25 + 0.75 * xi;
            for (yj, wj) in gx.iter().zip(&gw) {
                let t = 0.25 + 0.25 * yj;
                acc += wi * wj * 0.75 * 0.25 * 2.0 / (1.0 + s + t).powi(3);
            }
        }
        assert!((acc - w.mass()).abs() < 1e-12, "{acc} {}", w.mass());
    }

    #[test]
    fn dimension_growth_constants() {
        for m in [1, 2] {
            let (b1, b2) = SectionSpace::growth_constants(m);
            for n in 1..=512 {
                let r = space_dimension(m, n).unwrap() as f64 / (n as f64).powi(m as i32);
                assert!(r >= b1 && r <= b2);
            }
        }
    }

    #[test]
    fn sup_normalized_sections_approach_extremal() {
        let kq = WeightedCompact::new(CompactKind::UnitDisk).unwrap().with_weight(Weight::FubiniStudy).unwrap();
        let n = 100;
        let basis = normalize_sup(&BasisFamily::monomial(1, n).unwrap(), &kq).unwrap();
        let sp = SectionSpace::with_basis(basis).unwrap();
        let z = [C64::new(2.0, 0.0)];
        let v = bergman_gamma_sections(&sp, &z).unwrap().ln() / (2.0 * n as f64);
        let target = sections_extremal(&kq, &z).unwrap();
        assert!((target - 0.2350).abs() < 1e-4, "{target}");
        assert!((v - target).abs() < 0.05, "{v} {target}");
    }

    #[test]
    fn fs_gamma_log_vanishes() {
        for n in [10, 100, 1000] {
            let sp = SectionSpace::new(1, n).unwrap();
            let v = bergman_gamma_sections(&sp, &[C64::new(0.4, 3.0)]).unwrap().ln() / (2.0 * n as f64);
            assert!((v - ((n + 1) as f64).ln() / (2.0 * n as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn stereographic_poles() {
        assert_eq!(to_sphere(C64::new(0.0, 0.0)), [0.0, 0.0, -1.0]);
        let x = to_sphere(C64::new(1.0, 0.0));
        assert!((x[0] - 1.0).abs() < 1e-15 && x[2].abs() < 1e-15);
        assert_eq!(to_sphere(C64::new(1e200, 0.0)), [0.0, 0.0, 1.0]);
    }
}
