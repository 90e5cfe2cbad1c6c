//! Monte Carlo drivers: expected distribution, exact finite-n expectation,
//! variance decay, almost-sure trajectories, Bernstein–Markov constants and
//! moment audits.
//!
//! Every trial draws from its own stream `(seed, label, [n, trial, attempt])`
//! and results are combined in trial order, so reports do not depend on the
//! worker count.

use serde::{Deserialize, Serialize};

use crate::compact::{equilibrium_target, TestForm, WeightedCompact};
use crate::config::{ExperimentConfig, ExperimentKind, MeasureKind};
use crate::ensembles::{
    empirical_moment_check, fs_radial_moment, gaussian_radial_moment, moment_constant, sample_coefficients, summability_audit,
    CoefficientLaw, MomentCertificate,
};
use crate::parallel::par_map;
use crate::poly::{build_orthonormal_basis, BasisFamily, CoefficientVector, WeightedNodes};
use crate::report::{Audit, EventCounts, ExperimentReport, MomentSection, PairingRow, SlopeFit, TailRow, TrajectoryPath};
use crate::rng::stream;
use crate::stats::{fit_line, Summary};
use crate::zeros::{pairing_poincare_lelong, pairing_root_sum, roots_with_degree, PairingMethod};
use crate::{Error, Result, C64};

/// Draws allowed per trial before a run of degenerate samples is an error.
const MAX_ATTEMPTS: u64 = 16;

/// The ingredients shared by the pairing experiments.
pub struct Model {
    pub law: CoefficientLaw,
    pub kq: WeightedCompact,
    pub forms: Vec<TestForm>,
    pub method: PairingMethod,
}

impl Model {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self { law: cfg.build_law()?, kq: cfg.build_compact()?, forms: cfg.build_forms()?, method: cfg.pairing.resolve(cfg.num_vars()) })
    }
}

/// Draw a coefficient vector whose polynomial is not identically zero.
fn draw_nonzero(
    law: &CoefficientLaw,
    basis: &BasisFamily,
    seed: u64,
    label: &str,
    key: &[u64],
    ev: &mut EventCounts,
) -> Result<CoefficientVector> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut k = key.to_vec();
        k.push(attempt);
        let mut rng = stream(seed, label, &k);
        let a = sample_coefficients(law, basis.dim(), &mut rng)?;
        if a.0.iter().any(|c| *c != C64::new(0.0, 0.0)) {
            return Ok(a);
        }
        ev.zero_polynomial += 1;
    }
    Err(Error::Precondition("coefficient law keeps producing the zero polynomial".into()))
}

/// Pairings `⟨[Ẑ_f], φ_k⟩` of one random polynomial with every form.
pub fn trial_pairings(model: &Model, basis: &BasisFamily, seed: u64, label: &str, key: &[u64]) -> Result<(Vec<f64>, EventCounts)> {
    let mut ev = EventCounts::default();
    let n = basis.degree();
    let a = draw_nonzero(&model.law, basis, seed, label, key, &mut ev)?;
    let vals = match model.method {
        PairingMethod::RootSum => {
            let zeros = roots_with_degree(&basis.univariate_coeffs(&a.0)?, n)?;
            model.forms.iter().map(|phi| pairing_root_sum(&zeros, phi).map(|p| p.value)).collect::<Result<Vec<_>>>()?
        }
        PairingMethod::PoincareLelong => {
            let f = basis.combine(&a)?;
            let mut v = Vec::with_capacity(model.forms.len());
            for phi in &model.forms {
                let p = pairing_poincare_lelong(&f, phi, n)?;
                if p.warning.is_some() {
                    ev.quadrature_warnings += 1;
                }
                v.push(p.value);
            }
            v
        }
    };
    Ok((vals, ev))
}

/// `T` trials at degree `n`; returns one sample per form.
pub fn sample_pairings(
    model: &Model,
    basis: &BasisFamily,
    trials: usize,
    seed: u64,
    workers: usize,
    events: &mut EventCounts,
) -> Result<Vec<Vec<f64>>> {
    let n = basis.degree() as u64;
    let out = par_map(workers, trials, |t| trial_pairings(model, basis, seed, "pairing", &[n, t as u64]));
    let mut per_form = vec![Vec::with_capacity(trials); model.forms.len()];
    for r in out {
        let (vals, ev) = r?;
        events.merge(&ev);
        for (k, v) in vals.into_iter().enumerate() {
            per_form[k].push(v);
        }
    }
    Ok(per_form)
}

/// `(1/2n) ∫ log Γₙ · dd^c φ`, the exact expectation for unitarily invariant laws.
pub fn finite_n_expectation(basis: &BasisFamily, phi: &TestForm) -> Result<f64> {
    let n = basis.degree();
    if n == 0 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let li = phi.integrate_ddc(|z| basis.log_bergman_gamma(z).unwrap_or(f64::NAN), phi.default_divisions());
    if !li.value.is_finite() {
        return Err(Error::DegeneratePoint { gamma: 0.0 });
    }
    Ok(li.value / (2.0 * n as f64))
}

fn row(n: usize, form: usize, xs: &[f64], target: f64, phi: &TestForm) -> PairingRow {
    let s = Summary::of(xs);
    PairingRow {
        n,
        form,
        trials: s.count,
        mean: s.mean,
        se: s.se,
        variance: s.variance,
        variance_se: s.variance_se.is_finite().then_some(s.variance_se),
        variance_n2: s.variance * (n * n) as f64,
        target,
        deviation: s.mean - target,
        finite_n_target: None,
        c_phi: phi.c_phi(),
        d_n: None,
        audit_ratio: None,
        audit_ratio_se: None,
    }
}

fn targets(model: &Model) -> Result<Vec<f64>> {
    model.forms.iter().map(|phi| equilibrium_target(&model.kq, phi)).collect()
}

fn workers_of(cfg: &ExperimentConfig, workers: usize) -> usize {
    if workers == 0 {
        cfg.workers.unwrap_or(1)
    } else {
        workers
    }
}

// ---------------------------------------------------------------------------
// expectation

/// Mean pairing per `(n, φ)` against the equilibrium target, with a trend test
/// on the deviations and, for unitarily invariant laws, the exact finite-n
/// target as a bias decomposition.
pub fn expected_distribution_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let workers = workers_of(cfg, workers);
    let model = Model::from_config(cfg)?;
    let tg = targets(&model)?;
    let exact = model.law.is_unitarily_invariant();
    let mut rep = ExperimentReport::new(cfg, "expected-distribution");
    for &n in &cfg.degrees {
        let basis = cfg.build_basis(&model.kq, n)?;
        let samples = sample_pairings(&model, &basis, cfg.trials, cfg.seed, workers, &mut rep.events)?;
        for (k, xs) in samples.iter().enumerate() {
            let mut r = row(n, k, xs, tg[k], &model.forms[k]);
            if exact {
                r.finite_n_target = Some(finite_n_expectation(&basis, &model.forms[k])?);
            }
            rep.rows.push(r);
        }
    }
    for k in 0..model.forms.len() {
        let rows: Vec<&PairingRow> = rep.rows.iter().filter(|r| r.form == k).collect();
        if rows.len() >= 3 {
            // deviations may only grow by MC noise from one degree to the next
            let worst = rows
                .windows(2)
                .map(|w| w[1].deviation.abs() - w[0].deviation.abs() - 3.0 * w[0].se.hypot(w[1].se))
                .fold(f64::NEG_INFINITY, f64::max);
            rep.audits.push(
                Audit::at_most(format!("form {k}: deviation non-increasing in n"), worst, 0.0)
                    .with_detail("max over consecutive degrees of |dev_next| - |dev_prev| - 3 SE"),
            );
        }
        if let (Some(tol), Some(last)) = (cfg.audit.deviation_tolerance, rows.last()) {
            rep.audits.push(Audit::at_most(format!("form {k}: |mean - target| at n = {}", last.n), last.deviation.abs(), tol));
        }
    }
    for r in &rep.rows {
        if let Some(e) = r.finite_n_target {
            rep.audits.push(Audit::at_most(
                format!("n = {}, form {}: |mean - finite-n target| / SE", r.n, r.form),
                (r.mean - e).abs() / r.se,
                3.0,
            ));
        }
    }
    if exact {
        rep.notes.push("finite-n target uses (1/2n) dd^c log Gamma_n; a (1/n) factor would double the bias term".into());
    }
    Ok(rep)
}

/// MC mean against `(1/2n) ∫ log Γₙ dd^c φ` at each degree (3-SE agreement).
pub fn exact_expectation_check(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let workers = workers_of(cfg, workers);
    let model = Model::from_config(cfg)?;
    if !model.law.is_unitarily_invariant() {
        return Err(Error::Precondition("exact expectation requires a unitarily invariant law".into()));
    }
    let tg = targets(&model)?;
    let mut rep = ExperimentReport::new(cfg, "exact-expectation");
    for &n in &cfg.degrees {
        let basis = cfg.build_basis(&model.kq, n)?;
        let samples = sample_pairings(&model, &basis, cfg.trials, cfg.seed, workers, &mut rep.events)?;
        for (k, xs) in samples.iter().enumerate() {
            let mut r = row(n, k, xs, tg[k], &model.forms[k]);
            let e = finite_n_expectation(&basis, &model.forms[k])?;
            r.finite_n_target = Some(e);
            rep.audits.push(Audit::at_most(format!("n = {n}, form {k}: |mean - finite-n target| / SE"), (r.mean - e).abs() / r.se, 3.0));
            rep.rows.push(r);
        }
    }
    rep.notes.push("deterministic side is (1/2n) dd^c log Gamma_n paired with phi".into());
    Ok(rep)
}

// ---------------------------------------------------------------------------
// variance

/// Default accepted slope interval: `−2 ± 0.4` for unitarily invariant laws,
/// up to `−2 + 2m/γ + 0.1` for the heavy-tail law.
pub fn default_slope_range(cfg: &ExperimentConfig) -> [f64; 2] {
    match (cfg.ensemble.law, cfg.ensemble.gamma) {
        (crate::config::LawName::HeavyTail, Some(g)) => [-4.0, -2.0 + 2.0 * cfg.num_vars() as f64 / g + 0.1],
        _ => [-2.4, -1.6],
    }
}

/// Sample variances, the fitted log-log slope, and the audit ratio
/// `Var·n² / (C_φ² Dₙ^{2/α}) ≤ 1`.
pub fn variance_decay_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let workers = workers_of(cfg, workers);
    if cfg.trials < 2 {
        return Err(Error::Precondition("variance needs at least 2 trials".into()));
    }
    if cfg.ensemble.alpha < 2.0 {
        return Err(Error::Precondition("variance bounds require alpha >= 2".into()));
    }
    let model = Model::from_config(cfg)?;
    let cert = moment_constant(&model.law, cfg.ensemble.alpha)?;
    let tg = targets(&model)?;
    let mut rep = ExperimentReport::new(cfg, "variance-bound");
    let p = 2.0 / cert.alpha;
    for &n in &cfg.degrees {
        let basis = cfg.build_basis(&model.kq, n)?;
        let dn = cert.d_at(basis.dim());
        let samples = sample_pairings(&model, &basis, cfg.trials, cfg.seed, workers, &mut rep.events)?;
        for (k, xs) in samples.iter().enumerate() {
            let mut r = row(n, k, xs, tg[k], &model.forms[k]);
            let denom = r.c_phi.powi(2) * dn.powf(p);
            let ratio = r.variance_n2 / denom;
            let ratio_se = r.variance_se.map(|s| s * (n * n) as f64 / denom);
            r.d_n = Some(dn);
            r.audit_ratio = Some(ratio);
            r.audit_ratio_se = ratio_se;
            rep.audits.push(Audit::at_most(
                format!("n = {n}, form {k}: Var n^2 / (C_phi^2 D_n^(2/alpha))"),
                ratio,
                1.0 + 3.0 * ratio_se.unwrap_or(0.0),
            ));
            rep.rows.push(r);
        }
    }
    let range = cfg.audit.slope_range.unwrap_or_else(|| default_slope_range(cfg));
    for k in 0..model.forms.len() {
        let (xs, ys): (Vec<f64>, Vec<f64>) = rep.rows.iter().filter(|r| r.form == k).map(|r| ((r.n as f64).ln(), r.variance.ln())).unzip();
        let f = fit_line(&xs, &ys);
        rep.fits.push(SlopeFit { form: k, slope: f.slope, slope_se: f.slope_se, intercept: f.intercept, accepted: range });
        let inside = f.slope >= range[0] && f.slope <= range[1];
        rep.audits.push(Audit {
            name: format!("form {k}: variance slope in [{}, {}]", range[0], range[1]),
            value: f.slope,
            threshold: range[1],
            pass: inside,
            detail: format!("slope SE {:.3}", f.slope_se),
        });
    }
    rep.notes.push(format!(
        "moment certificate: alpha = {}, constant = {:.6e} ({:?}{})",
        cert.alpha,
        cert.constant,
        cert.method,
        if cert.is_estimate { ", estimated" } else { "" }
    ));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// almost-sure trajectory

fn quartile_stats(points: &[(usize, f64)], target: f64) -> (f64, f64, f64) {
    let len = points.len();
    let q = (len / 4).max(1);
    let dev = |s: &[(usize, f64)]| s.iter().map(|(_, v)| (v - target).abs()).fold(0.0, f64::max);
    let last = &points[len - q..];
    let mean = last.iter().map(|p| p.1).sum::<f64>() / last.len() as f64;
    (dev(&points[..q]), dev(last), mean)
}

/// One trial per degree along a common seed: the path of pairings, its
/// last-quartile sup deviation, and agreement of limits across seeds.
pub fn almost_sure_trajectory(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let workers = workers_of(cfg, workers);
    let spec = cfg.trajectory.as_ref().ok_or_else(|| Error::Config("missing [trajectory] table".into()))?;
    let model = Model::from_config(cfg)?;
    let m = cfg.num_vars();
    let cert = moment_constant(&model.law, cfg.ensemble.alpha)?;
    let summ = summability_audit(&cert, m, spec.n_max.max(8))?;
    if !summ.convergent {
        return Err(Error::Precondition(format!("sum of D_n^(2/alpha)/n^2 does not converge (fitted exponent {:.3})", summ.fit.slope)));
    }
    let tg = targets(&model)?;
    let degrees = spec.degrees();
    let bases: Vec<BasisFamily> = degrees.iter().map(|&n| cfg.build_basis(&model.kq, n)).collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new(cfg, "almost-sure-equidistribution");
    let tol = cfg.audit.deviation_tolerance.unwrap_or(0.05);
    let mut seeds = vec![cfg.seed];
    seeds.extend(spec.extra_seeds.iter().copied());
    for &seed in &seeds {
        let out = par_map(workers, bases.len(), |i| trial_pairings(&model, &bases[i], seed, "trajectory", &[degrees[i] as u64]));
        let mut per_form = vec![Vec::with_capacity(degrees.len()); model.forms.len()];
        for (i, r) in out.into_iter().enumerate() {
            let (vals, ev) = r?;
            rep.events.merge(&ev);
            for (k, v) in vals.into_iter().enumerate() {
                per_form[k].push((degrees[i], v));
            }
        }
        for (k, points) in per_form.into_iter().enumerate() {
            let (first, last, mean) = quartile_stats(&points, tg[k]);
            rep.audits.push(Audit::at_most(format!("seed {seed}, form {k}: last-quartile sup deviation"), last, tol));
            rep.audits.push(
                Audit::at_most(format!("seed {seed}, form {k}: envelope decreasing"), last, first)
                    .with_detail("last-quartile sup vs first-quartile sup"),
            );
            rep.trajectories.push(TrajectoryPath {
                seed,
                form: k,
                target: tg[k],
                points,
                first_quartile_sup: first,
                last_quartile_sup: last,
                last_quartile_mean: mean,
            });
        }
    }
    if seeds.len() > 1 {
        for k in 0..model.forms.len() {
            let means: Vec<f64> = rep.trajectories.iter().filter(|t| t.form == k).map(|t| t.last_quartile_mean).collect();
            let spread = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - means.iter().cloned().fold(f64::INFINITY, f64::min);
            rep.audits.push(Audit::at_most(format!("form {k}: limits agree across seeds"), spread, tol));
        }
    }
    rep.audits.push(Audit::at_most("summability: fitted exponent of D_n^(2/alpha)/n^2", summ.fit.slope, -1.0));
    rep.notes.push("each seed is one sample path of the product measure".into());
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Bernstein–Markov

/// Sharp sup-to-L² constant at degree `n` for a discrete measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BMCertificate {
    pub n: usize,
    /// `sup_K √(Σⱼ |qⱼ|² e^{-2nq})` for the orthonormal `{qⱼ}`.
    pub r_n: f64,
    pub r_n_root: f64,
    pub measure: String,
    /// Point of the sup grid attaining `R_n`.
    pub witness: Vec<(f64, f64)>,
    /// Sup/L² ratio of the kernel section at the witness; `≥ R_n` up to grid error.
    pub witness_ratio: f64,
}

/// `R_n` for the `L²(e^{-2nq} σ)`-orthonormal basis of degree `n`, with the
/// kernel section at the maximizing node as the equality witness.
pub fn bm_constant(kq: &WeightedCompact, measure: &WeightedNodes, measure_id: &str, n: usize) -> Result<BMCertificate> {
    let m = kq.num_vars();
    let basis = build_orthonormal_basis(measure, |z| kq.weight_at(z), m, n)?;
    let nf = n as f64;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for z in kq.sup_nodes() {
        let lg = basis.log_bergman_gamma(z)? - 2.0 * nf * kq.weight_at(z);
        if lg > best.0 {
            best = (lg, z.to_vec());
        }
    }
    let r_n = (0.5 * best.0).exp();
    let x = best.1;
    // K(·, x) = Σ qⱼ conj(qⱼ(x)) has L² norm √Γ(x) and value Γ(x) at x
    let qx = basis.eval_basis(&x)?;
    let l2 = qx.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut sup: f64 = 0.0;
    for z in kq.sup_nodes() {
        let qz = basis.eval_basis(z)?;
        let v: C64 = qz.iter().zip(&qx).map(|(a, b)| a * b.conj()).sum();
        sup = sup.max(v.norm() * (-nf * kq.weight_at(z)).exp());
    }
    let witness_ratio = sup / l2;
    Ok(BMCertificate {
        n,
        r_n,
        r_n_root: r_n.powf(1.0 / nf.max(1.0)),
        measure: measure_id.to_string(),
        witness: x.iter().map(|c| (c.re, c.im)).collect(),
        witness_ratio,
    })
}

/// [`bm_constant`] over the configured degrees with monotonicity audits.
pub fn bm_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let kq = cfg.build_compact()?;
    let mk = cfg.bm.as_ref().map(|b| b.measure).unwrap_or_default();
    let (nodes, id) = match mk {
        MeasureKind::Boundary => (kq.boundary().clone(), "boundary"),
        MeasureKind::Area => (kq.area().cloned().ok_or_else(|| Error::Config("compact has no area grid".into()))?, "area"),
    };
    let mut rep = ExperimentReport::new(cfg, "bernstein-markov");
    for &n in &cfg.degrees {
        let c = bm_constant(&kq, &nodes, id, n)?;
        rep.audits.push(
            Audit::at_least(format!("n = {n}: witness ratio >= R_n"), c.witness_ratio, c.r_n * (1.0 - 1e-9))
                .with_detail("kernel section attains the constant"),
        );
        rep.audits.push(Audit::at_least(format!("n = {n}: R_n >= 1"), c.r_n, 1.0 - 1e-12));
        rep.bm.push(c);
    }
    let worst = rep.bm.windows(2).map(|w| w[1].r_n_root - w[0].r_n_root).fold(f64::NEG_INFINITY, f64::max);
    if rep.bm.len() >= 2 {
        rep.audits.push(Audit::at_most("R_n^(1/n) non-increasing", worst, 1e-12));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// moments

/// Certificate, empirical checks at several dimensions, the heavy-tail tail
/// bound, and the summability audit.
pub fn moment_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let workers = workers_of(cfg, workers);
    let spec = cfg.moment.clone().unwrap_or_default();
    let law = cfg.build_law()?;
    let alpha = cfg.ensemble.alpha;
    let cert = moment_constant(&law, alpha)?;
    let mut rep = ExperimentReport::new(cfg, "moment-condition");
    let checks = par_map(workers, spec.dims.len(), |i| empirical_moment_check(&law, &cert, spec.dims[i], spec.draws, cfg.seed));
    let checks: Vec<_> = checks.into_iter().collect::<Result<_>>()?;
    for c in &checks {
        rep.audits.push(Audit::at_most(
            format!("dim {}: max estimate <= D_n + 3 SE", c.dim),
            c.max_estimate,
            c.certificate + 3.0 * c.max_se,
        ));
        if law.is_unitarily_invariant() {
            rep.audits.push(Audit::at_most(
                format!("dim {}: |pooled - D_0| / SE", c.dim),
                (c.pooled - cert.constant).abs() / c.pooled_se,
                3.0,
            ));
        }
    }
    let signed = match &law {
        CoefficientLaw::Gaussian => {
            let v = gaussian_radial_moment(1.0, true)?;
            rep.audits.push(Audit::at_most(
                "signed alpha=1 integral vs -gamma_E/2",
                (v + crate::ensembles::EULER_GAMMA / 2.0).abs(),
                1e-10,
            ));
            Some(v)
        }
        CoefficientLaw::FubiniStudy => {
            let v = fs_radial_moment(1.0, true)?;
            rep.audits.push(Audit::at_most("signed alpha=1 integral vs 0", v.abs(), 1e-8));
            Some(v)
        }
        _ => None,
    };
    let mut tail = Vec::new();
    if let CoefficientLaw::HeavyTail(h) = &law {
        tail = tail_check(h, &spec.tail_radii, spec.tail_draws, cfg.seed, workers);
        for t in &tail {
            rep.audits.push(Audit::at_most(format!("R = {}: P(log|a| > R) <= 1.1 delta / R^gamma", t.radius), t.empirical, 1.1 * t.bound));
        }
    }
    let summability = summability_audit(&cert, cfg.num_vars(), spec.n_max)?;
    rep.audits.push(Audit::at_most("summability: fitted exponent", summability.fit.slope, -1.0));
    if cert.is_estimate {
        rep.notes.push("heavy-tail constant B is a Monte Carlo upper estimate".into());
    }
    rep.moment = Some(MomentSection { certificate: cert, checks, signed_alpha_one: signed, tail, summability });
    Ok(rep)
}

/// Empirical `P(log|a| > R)` for each radius from `draws` samples.
pub fn tail_check(h: &crate::ensembles::HeavyTail, radii: &[f64], draws: usize, seed: u64, workers: usize) -> Vec<TailRow> {
    const CHUNK: usize = 65_536;
    let chunks = draws.div_ceil(CHUNK);
    let counts = par_map(workers, chunks, |c| {
        let mut rng = stream(seed, "tail", &[c as u64]);
        let len = CHUNK.min(draws - c * CHUNK);
        let mut k = vec![0u64; radii.len()];
        for _ in 0..len {
            let l = h.sample(&mut rng).norm().ln();
            for (i, r) in radii.iter().enumerate() {
                if l > *r {
                    k[i] += 1;
                }
            }
        }
        k
    });
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let e: u64 = counts.iter().map(|k| k[i]).sum();
            TailRow { radius: r, draws, exceedances: e, empirical: e as f64 / draws as f64, bound: h.delta() / r.powf(h.gamma()) }
        })
        .collect()
}

/// Run the driver named by `cfg.experiment`.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    match cfg.experiment {
        ExperimentKind::Expected => expected_distribution_experiment(cfg, workers),
        ExperimentKind::Exact => exact_expectation_check(cfg, workers),
        ExperimentKind::Variance => variance_decay_experiment(cfg, workers),
        ExperimentKind::Trajectory => almost_sure_trajectory(cfg, workers),
        ExperimentKind::Bm => bm_experiment(cfg),
        ExperimentKind::Moment => moment_experiment(cfg, workers),
        ExperimentKind::Projective => crate::projective::global_equidist_experiment(cfg, workers),
    }
}

/// Certificate used by variance audits, exposed for callers building their own.
pub fn certificate_for(cfg: &ExperimentConfig) -> Result<MomentCertificate> {
    moment_constant(&cfg.build_law()?, cfg.ensemble.alpha)
}
