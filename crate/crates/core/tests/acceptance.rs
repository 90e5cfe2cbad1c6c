//! Acceptance criteria, one line per criterion. Runs as a plain binary so the
//! summary is always printed; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use plurizero::compact::TestForm;
use plurizero::config::{load_config, ExperimentConfig};
use plurizero::ensembles::{fs_radial_moment, gaussian_radial_moment};
use plurizero::experiments::run_experiment;
use plurizero::poly::{BasisFamily, Polynomial};
use plurizero::report::ExperimentReport;
use plurizero::rng::{complex_normal, open_unit, stream};
use plurizero::zeros::{pairing_poincare_lelong, pairing_root_sum, roots_univariate};
use plurizero::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

type Axis = (f64, f64, Box<dyn Fn(f64) -> (f64, f64)>);
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
}

fn config(name: &str) -> ExperimentConfig {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    load_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn run(cfg: &ExperimentConfig) -> ExperimentReport {
    run_experiment(cfg, workers()).unwrap_or_else(|e| panic!("{} run failed: {e}", cfg.experiment.name()))
}

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed <= Duration::from_secs(budget_s)
}

// --- independent oracles -------------------------------------------------

/// `exp(1 − 1/(1 − t²))` with `t = |z − c| / r`.
fn bump(z: C64, c: C64, r: f64) -> f64 {
    let t2 = (z - c).norm_sqr() / (r * r);
    if t2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t2)).exp()
    }
}

fn circle_average(c: C64, r: f64) -> f64 {
    let k = 8192;
    (0..k).map(|j| bump(C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64), c, r)).sum::<f64>() / k as f64
}

/// Composite Simpson on `[a, b]` with `2k` panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, k: usize) -> f64 {
    let h = (b - a) / (2 * k) as f64;
    let mut s = f(a) + f(b);
    for i in 1..2 * k {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `E[(1/n) Σ φ(ζ)]` for an invariant ensemble over the monomial basis: the
/// zero density is `(1/π) d/dt (t Γ'(t)/Γ(t))` with `Γ(t) = Σₖ tᵏ`, `t = |z|²`.
fn kac_expectation(n: usize, c: C64, r: f64) -> f64 {
    let density = |t: f64| {
        let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for k in 0..=n {
            let kf = k as f64;
            g += t.powi(k as i32);
            if k >= 1 {
                g1 += kf * t.powi(k as i32 - 1);
            }
            if k >= 2 {
                g2 += kf * (kf - 1.0) * t.powi(k as i32 - 2);
            }
        }
        (g1 * g + t * g2 * g - t * g1 * g1) / (g * g) / PI
    };
    let (lo, hi) = ((c.norm() - r).max(0.0), c.norm() + r);
    let th = 2048;
    let ring = |rho: f64| {
        let s: f64 = (0..th).map(|j| bump(C64::from_polar(rho, 2.0 * PI * j as f64 / th as f64), c, r)).sum();
        s * 2.0 * PI / th as f64 * density(rho * rho) * rho
    };
    simpson(ring, lo, hi, 2000) / n as f64
}

/// Normalized Fubini–Study volume of `{s₀ ≤ |z₁|² < s₁, t₀ ≤ |z₂|² < t₁}`,
/// integrating `2(1+s+t)^{-3} ds dt` with `s = u/(1−u)` on unbounded bands.
fn window_volume(s: [f64; 2], t: [f64; 2]) -> f64 {
    let axis = |b: [f64; 2]| -> Axis {
        if b[1].is_finite() {
            (b[0], b[1], Box::new(|x| (x, 1.0)))
        } else {
            (b[0] / (1.0 + b[0]), 1.0, Box::new(|u: f64| (u / (1.0 - u), 1.0 / ((1.0 - u) * (1.0 - u)))))
        }
    };
    let (sa, sb, sm) = axis(s);
    let (ta, tb, tm) = axis(t);
    simpson(
        |x| {
            let (ss, js) = sm(x);
            if !ss.is_finite() {
                return 0.0;
            }
            js * simpson(
                |y| {
                    let (tt, jt) = tm(y);
                    if !tt.is_finite() {
                        return 0.0;
                    }
                    jt * 2.0 / (1.0 + ss + tt).powi(3)
                },
                ta,
                tb,
                400,
            )
        },
        sa,
        sb,
        400,
    )
}

// --- criteria ------------------------------------------------------------

fn dual_pairing() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    let mut count = 0;
    for (i, &n) in [5usize, 20, 50].iter().cycle().take(200).enumerate() {
        let mut rng = stream(2024, "acceptance-dual", &[i as u64]);
        let c: Vec<C64> = (0..=n).map(|_| complex_normal(&mut rng)).collect();
        let f = Polynomial::univariate(&c);
        let center = C64::from_polar(0.5 + open_unit(&mut rng), 2.0 * PI * open_unit(&mut rng));
        let radius = 0.3 + 0.7 * open_unit(&mut rng);
        let phi = TestForm::bump(center, radius);
        let rs = pairing_root_sum(&roots_univariate(&f).unwrap(), &phi).unwrap().value;
        let pl = pairing_poincare_lelong(&f, &phi, n).unwrap().value;
        let tol = 1e-5 + 1e-4 * phi.c_phi() / n as f64;
        let err = (rs - pl).abs();
        worst = worst.max(err / tol);
        fails += (err > tol) as usize;
        count += 1;
    }
    let el = t0.elapsed();
    Outcome {
        pass: fails == 0 && within(el, 60),
        detail: format!("{count} pairs, {fails} over tolerance, worst error/tolerance {worst:.3}, {:.1}s", el.as_secs_f64()),
    }
}

fn extremal_consistency() -> Outcome {
    let t0 = Instant::now();
    let n = 100;
    let b = BasisFamily::circle_orthonormal(n).unwrap();
    let mut sup: f64 = 0.0;
    for i in 0..=120 {
        for j in 0..=120 {
            let z = C64::new(-3.0 + 0.05 * i as f64, -3.0 + 0.05 * j as f64);
            let r = z.norm();
            if r > 0.9 && r < 1.1 {
                continue;
            }
            let v = b.log_bergman_gamma(&[z]).unwrap() / (2.0 * n as f64);
            sup = sup.max((v - r.ln().max(0.0)).abs());
        }
    }
    let el = t0.elapsed();
    Outcome { pass: sup <= 0.05 && within(el, 10), detail: format!("sup deviation {sup:.4} (tol 0.05), {:.1}s", el.as_secs_f64()) }
}

fn expected_distribution() -> Outcome {
    let t0 = Instant::now();
    let mut cfg = config("expected.toml");
    cfg.degrees = vec![100];
    cfg.trials = 200;
    let rep = run(&cfg);
    let mut worst: f64 = 0.0;
    for r in &rep.rows {
        let spec = &cfg.test_forms[r.form];
        let oracle = circle_average(C64::new(spec.center[0][0], spec.center[0][1]), spec.radius);
        worst = worst.max((r.mean - oracle).abs());
    }
    let el = t0.elapsed();
    Outcome {
        pass: rep.rows.len() == 3 && worst <= 0.02 && within(el, 120),
        detail: format!("{} bumps, max |mean - circle average| {worst:.4} (tol 0.02), {:.1}s", rep.rows.len(), el.as_secs_f64()),
    }
}

fn exact_expectation() -> Outcome {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for name in ["exact.toml", "exact_fs.toml"] {
        let cfg = config(name);
        assert_eq!(cfg.degrees, vec![10]);
        assert_eq!(cfg.trials, 2000);
        let rep = run(&cfg);
        for r in &rep.rows {
            let spec = &cfg.test_forms[r.form];
            let oracle = kac_expectation(r.n, C64::new(spec.center[0][0], spec.center[0][1]), spec.radius);
            let z = (r.mean - oracle).abs() / r.se;
            let lib = r.finite_n_target.unwrap_or(f64::NAN);
            pass &= z <= 3.0 && (lib - oracle).abs() <= 1e-6;
            lines.push(format!("{name} form {}: {z:.2} SE, library target off by {:.1e}", r.form, (lib - oracle).abs()));
        }
    }
    let el = t0.elapsed();
    Outcome { pass: pass && within(el, 120), detail: format!("{}; {:.1}s", lines.join("; "), el.as_secs_f64()) }
}

fn variance_decay() -> Outcome {
    let t0 = Instant::now();
    let cfg = config("variance.toml");
    assert_eq!(cfg.degrees, vec![25, 50, 100, 200]);
    assert_eq!(cfg.trials, 400);
    let rep = run(&cfg);
    let d0 = (EULER_GAMMA * EULER_GAMMA + PI * PI / 6.0) / 4.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rep.rows.iter().map(|r| ((r.n as f64).ln(), r.variance.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / xs.len() as f64, ys.iter().sum::<f64>() / ys.len() as f64);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let mut ratios_ok = true;
    let mut worst: f64 = 0.0;
    for r in &rep.rows {
        let ratio = r.variance_n2 / (r.c_phi * r.c_phi * d0);
        let se = r.variance_se.unwrap_or(f64::INFINITY) * (r.n * r.n) as f64 / (r.c_phi * r.c_phi * d0);
        ratios_ok &= ratio <= 1.0 + 3.0 * se;
        worst = worst.max(ratio);
    }
    let el = t0.elapsed();
    Outcome {
        pass: (-2.4..=-1.6).contains(&slope) && ratios_ok && within(el, 600),
        detail: format!("slope {slope:.3} (accepted [-2.4, -1.6]), max audit ratio {worst:.3e}, {:.1}s", el.as_secs_f64()),
    }
}

fn moment_constants() -> Outcome {
    let fs1 = fs_radial_moment(1.0, true).unwrap();
    let g1 = gaussian_radial_moment(1.0, true).unwrap();
    let g2 = gaussian_radial_moment(2.0, false).unwrap();
    let d0 = (EULER_GAMMA * EULER_GAMMA + PI * PI / 6.0) / 4.0;
    let cfg = config("moment.toml");
    let rep = run(&cfg);
    let m = rep.moment.as_ref().expect("moment section");
    let dims: Vec<usize> = m.checks.iter().map(|c| c.dim).collect();
    let mut worst: f64 = 0.0;
    for c in &m.checks {
        worst = worst.max((c.pooled - g2).abs() / c.pooled_se);
    }
    let pass =
        fs1.abs() <= 1e-8 && (g1 + EULER_GAMMA / 2.0).abs() <= 1e-10 && (g2 - d0).abs() <= 1e-10 && dims == vec![2, 8, 32] && worst <= 3.0;
    Outcome {
        pass,
        detail: format!(
            "FS signed {fs1:.1e}, Gaussian signed + gamma_E/2 = {:.1e}, alpha=2 quadrature - closed form {:.1e}, MC dims {dims:?} worst {worst:.2} SE",
            g1 + EULER_GAMMA / 2.0,
            g2 - d0
        ),
    }
}

fn heavy_tail() -> Outcome {
    let t0 = Instant::now();
    let cfg = config("moment_heavy.toml");
    assert_eq!(cfg.ensemble.gamma, Some(5.0));
    let rep = run(&cfg);
    let m = rep.moment.as_ref().expect("moment section");
    let delta = cfg.ensemble.delta.unwrap();
    let mut tail_ok = m.tail.len() == 3;
    let mut tails = Vec::new();
    for t in &m.tail {
        let bound = delta / t.radius.powf(5.0);
        tail_ok &= t.draws >= 1_000_000 && t.empirical <= 1.1 * bound;
        tails.push(format!("R={} {:.2e}/{:.2e}", t.radius, t.empirical, bound));
    }
    let slope = m.summability.fit.slope;
    let tcfg = config("trajectory.toml");
    let spec = tcfg.trajectory.as_ref().unwrap();
    assert!(spec.n_max <= 300);
    let trep = run(&tcfg);
    let form = &tcfg.test_forms[0];
    let target = circle_average(C64::new(form.center[0][0], form.center[0][1]), form.radius);
    let mut last: f64 = 0.0;
    for p in &trep.trajectories {
        let q = (p.points.len() / 4).max(1);
        let dev = p.points[p.points.len() - q..].iter().map(|(_, v)| (v - target).abs()).fold(0.0, f64::max);
        last = last.max(dev);
    }
    let el = t0.elapsed();
    Outcome {
        pass: tail_ok && slope <= -1.5 && !trep.trajectories.is_empty() && last <= 0.05,
        detail: format!(
            "tail {}; summability exponent {slope:.3} (tol -1.5); {} paths, last-quartile deviation {last:.4} (tol 0.05); {:.1}s",
            tails.join(", "),
            trep.trajectories.len(),
            el.as_secs_f64()
        ),
    }
}

fn bernstein_markov() -> Outcome {
    let cfg = config("bm.toml");
    assert_eq!(cfg.degrees, vec![10, 50, 200]);
    let rep = run(&cfg);
    let err = rep.bm.iter().map(|b| (b.r_n - ((b.n + 1) as f64).sqrt()).abs()).fold(0.0, f64::max);
    let roots: Vec<f64> = rep.bm.iter().map(|b| ((b.n + 1) as f64).sqrt().powf(1.0 / b.n as f64)).collect();
    let reported: Vec<f64> = rep.bm.iter().map(|b| b.r_n_root).collect();
    let decreasing = reported.windows(2).all(|w| w[1] < w[0]) && reported.iter().all(|&r| r >= 1.0);
    let agree = roots.iter().zip(&reported).all(|(a, b)| (a - b).abs() <= 1e-9);
    Outcome {
        pass: rep.bm.len() == 3 && err <= 1e-9 && decreasing && agree,
        detail: format!("max |R_n - sqrt(n+1)| {err:.1e}, R_n^(1/n) = {reported:.4?}"),
    }
}

fn projective() -> Outcome {
    let t0 = Instant::now();
    let mut cfg = config("sphere.toml");
    cfg.degrees = vec![500];
    cfg.trials = 50;
    let rep = run(&cfg);
    let sec = rep.projective.as_ref().expect("projective section");
    let area = (1.0 - 35f64.to_radians().cos()) / 2.0;
    let caps: Vec<_> = sec.regions.iter().filter(|r| r.kind == "cap").collect();
    let cap_dev = caps.iter().map(|r| (r.mean - area).abs()).fold(0.0, f64::max);
    let mut cfg2 = config("cp2.toml");
    cfg2.degrees = vec![8];
    cfg2.trials = 100;
    let rep2 = run(&cfg2);
    let sec2 = rep2.projective.as_ref().expect("projective section");
    let b = &sec2.bezout[0];
    let bands = [[0.0, 0.5], [0.5, 2.0], [2.0, f64::INFINITY]];
    let mut win_dev: f64 = 0.0;
    let mut nwin = 0;
    for r in sec2.regions.iter().filter(|r| r.kind == "window") {
        let oracle = window_volume(bands[r.index / 3], bands[r.index % 3]);
        win_dev = win_dev.max((r.mean - oracle).abs());
        nwin += 1;
    }
    let el = t0.elapsed();
    Outcome {
        pass: caps.len() == 16
            && cap_dev <= 0.02
            && b.expected == 64
            && b.miscounts == 0
            && nwin == 9
            && win_dev <= 0.05
            && within(el, 1200),
        detail: format!(
            "CP1 n=500: 16 caps, max deviation {cap_dev:.4} (tol 0.02); CP2 n=8: {} trials, {} miscounted, {} resampled, max window deviation {win_dev:.4} (tol 0.05); {:.1}s",
            b.trials,
            b.miscounts,
            b.non_generic,
            el.as_secs_f64()
        ),
    }
}

fn determinism() -> Outcome {
    let mut checked = Vec::new();
    let mut pass = true;
    for name in ["expected.toml", "cp2.toml", "trajectory.toml", "bm.toml"] {
        let cfg = config(name);
        let a = run_experiment(&cfg, 1).unwrap().to_json().unwrap();
        let b = run_experiment(&cfg, 1).unwrap().to_json().unwrap();
        let c = run_experiment(&cfg, workers().max(3)).unwrap().to_json().unwrap();
        pass &= a == b && a == c;
        checked.push(name);
    }
    Outcome { pass, detail: format!("reruns and worker counts byte-identical for {}", checked.join(", ")) }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("dual pairing identity", dual_pairing),
        ("extremal function consistency", extremal_consistency),
        ("expected distribution", expected_distribution),
        ("exact finite-n expectation", exact_expectation),
        ("variance decay", variance_decay),
        ("moment constants", moment_constants),
        ("heavy-tail regime", heavy_tail),
        ("Bernstein-Markov constants", bernstein_markov),
        ("projective equidistribution", projective),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {:>2} {:<32} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.pass) as usize;
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
