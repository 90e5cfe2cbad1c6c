//! Aberth–Ehrlich simultaneous root finding with a companion-matrix fallback.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

const EPS: f64 = f64::EPSILON;
const MAX_SWEEPS: usize = 600;
/// Leading coefficients below this fraction of the largest are trimmed.
pub const TRIM_REL: f64 = 1e-14;
/// Roots closer than this (relative to their modulus, floor 1) are merged.
pub const MERGE_REL: f64 = 1e-8;
const CLUSTER_REL: f64 = 1e-4;

/// Roots of a univariate polynomial, with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateRoots {
    pub roots: Vec<C64>,
    pub multiplicities: Vec<u32>,
    /// Degree lost to trimmed leading coefficients (roots at infinity).
    pub at_infinity: u32,
    /// Largest backward error `|p(ζ)| / Σ|cⱼ||ζ|ʲ` over the roots.
    pub residual: f64,
    pub used_fallback: bool,
}

impl UnivariateRoots {
    pub fn finite_count(&self) -> u32 {
        self.multiplicities.iter().sum()
    }
}

/// `(p(z), p'(z), Σ|cⱼ||z|ʲ)` scaled by `max(1,|z|)^{-n}`, plus the Newton ratio `p/p'`.
struct Eval {
    ratio: C64,
    /// `|p| ≤ bound` means `z` is a root up to rounding.
    small: bool,
    backward: f64,
}

fn eval_newton(c: &[C64], z: C64) -> Eval {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = c[n];
        let mut dp = C64::new(0.0, 0.0);
        let mut s = c[n].norm();
        let az = z.norm();
        for j in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[j];
            s = s * az + c[j].norm();
        }
        let bound = 4.0 * (n + 1) as f64 * EPS * s;
        Eval { ratio: p / dp, small: p.norm() <= bound, backward: if s > 0.0 { p.norm() / s } else { 0.0 } }
    } else {
        // r(w) = Σ cⱼ w^{n-j} = wⁿ p(1/w)
        let w = z.inv();
        let aw = w.norm();
        let mut r = c[0];
        let mut dr = C64::new(0.0, 0.0);
        let mut s = c[0].norm();
        for cj in c.iter().skip(1) {
            dr = dr * w + r;
            r = r * w + cj;
            s = s * aw + cj.norm();
        }
        let bound = 4.0 * (n + 1) as f64 * EPS * s;
        let denom = r * n as f64 - w * dr;
        Eval { ratio: z * r / denom, small: r.norm() <= bound, backward: if s > 0.0 { r.norm() / s } else { 0.0 } }
    }
}

/// Backward error of `z` as a root of `c`.
pub fn backward_error(c: &[C64], z: C64) -> f64 {
    eval_newton(c, z).backward
}

/// Initial approximations on the circles of the Newton polygon of `|cⱼ|`.
fn initial_guesses(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let logs: Vec<f64> = c.iter().map(|x| if x.norm() > 0.0 { x.norm().ln() } else { f64::NEG_INFINITY }).collect();
    // upper convex hull of (j, log|cⱼ|)
    let mut hull: Vec<usize> = Vec::new();
    for j in 0..=n {
        if logs[j] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b - a) as f64 * (logs[j] - logs[a]) - (j - a) as f64 * (logs[b] - logs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }
    let mut z = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let k = b - a;
        let u = ((logs[a] - logs[b]) / k as f64).exp();
        for i in 0..k {
            let ang = 2.0 * PI * i as f64 / k as f64 + 2.0 * PI * a as f64 / n as f64 + 0.7;
            z.push(C64::from_polar(u, ang));
        }
    }
    z
}

/// Aberth–Ehrlich iteration on coefficients with nonzero `c₀` and `cₙ`.
fn aberth(c: &[C64]) -> Option<Vec<C64>> {
    let n = c.len() - 1;
    if n == 1 {
        return Some(vec![-c[0] / c[1]]);
    }
    let mut z = initial_guesses(c);
    let mut done = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let e = eval_newton(c, z[k]);
            if e.small {
                done[k] = true;
                continue;
            }
            all = false;
            let s: C64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let corr = e.ratio / (C64::new(1.0, 0.0) - e.ratio * s);
            if corr.re.is_finite() && corr.im.is_finite() {
                z[k] -= corr;
                if corr.norm() <= EPS * z[k].norm() {
                    done[k] = true;
                }
            }
        }
        if all {
            break;
        }
    }
    let ok = z.iter().all(|x| x.re.is_finite() && x.im.is_finite()) && done.iter().all(|&d| d);
    ok.then_some(z)
}

/// Eigenvalues of the companion matrix of `c` (monic after scaling).
fn companion_roots(c: &[C64]) -> Option<Vec<C64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let schur = nalgebra::linalg::Schur::try_new(m, EPS, 10_000)?;
    let ev = schur.eigenvalues()?;
    Some(ev.iter().copied().collect())
}

/// Newton steps that keep improving the backward error.
fn polish(c: &[C64], z: C64) -> C64 {
    let mut best = z;
    let mut err = backward_error(c, z);
    for _ in 0..3 {
        let e = eval_newton(c, best);
        let next = best - e.ratio;
        let ne = backward_error(c, next);
        if ne < err {
            best = next;
            err = ne;
        } else {
            break;
        }
    }
    best
}

/// Coefficients of the `k`-th derivative.
fn derivative(c: &[C64], k: usize) -> Vec<C64> {
    let mut d = c.to_vec();
    for _ in 0..k {
        if d.len() <= 1 {
            return vec![C64::new(0.0, 0.0)];
        }
        d = d.iter().enumerate().skip(1).map(|(j, x)| x * j as f64).collect();
    }
    d
}

fn rel_dist(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Group numerically multiple roots and confirm each group by derivatives.
fn cluster(c: &[C64], roots: &[C64]) -> (Vec<C64>, Vec<u32>) {
    let n = roots.len();
    let mut group = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        group[i] = g;
        let mut members = vec![i];
        let mut q = 0;
        while q < members.len() {
            let a = roots[members[q]];
            for j in 0..n {
                if group[j] == usize::MAX && rel_dist(a, roots[j]) <= CLUSTER_REL {
                    group[j] = g;
                    members.push(j);
                }
            }
            q += 1;
        }
        groups.push(members);
    }
    let mut out_r = Vec::new();
    let mut out_m = Vec::new();
    let tol = 1e3 * (c.len() as f64) * EPS;
    for members in groups {
        let k = members.len();
        if k == 1 {
            out_r.push(roots[members[0]]);
            out_m.push(1);
            continue;
        }
        let centroid = members.iter().map(|&i| roots[i]).sum::<C64>() / k as f64;
        // the (k-1)-th derivative has a simple root at a k-fold root of p
        let dk = derivative(c, k - 1);
        let mut zeta = centroid;
        for _ in 0..50 {
            let e = eval_newton(&dk, zeta);
            if e.small || !(e.ratio.norm() > 0.0) {
                break;
            }
            let next = zeta - e.ratio;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            zeta = next;
        }
        let radius = members.iter().map(|&i| (roots[i] - centroid).norm()).fold(0.0, f64::max);
        let close = (zeta - centroid).norm() <= 2.0 * radius + EPS * centroid.norm().max(1.0);
        let verified = close && (0..k).all(|j| backward_error(&derivative(c, j), zeta) <= tol);
        if verified {
            out_r.push(zeta);
            out_m.push(k as u32);
        } else {
            for &i in &members {
                out_r.push(roots[i]);
                out_m.push(1);
            }
        }
    }
    // final merge at the fine threshold
    let mut merged_r: Vec<C64> = Vec::new();
    let mut merged_m: Vec<u32> = Vec::new();
    for (r, m) in out_r.into_iter().zip(out_m) {
        if let Some(j) = merged_r.iter().position(|&x| rel_dist(x, r) <= MERGE_REL) {
            let tot = merged_m[j] + m;
            merged_r[j] = (merged_r[j] * merged_m[j] as f64 + r * m as f64) / tot as f64;
            merged_m[j] = tot;
        } else {
            merged_r.push(r);
            merged_m.push(m);
        }
    }
    (merged_r, merged_m)
}

/// All roots of `Σ cⱼ zʲ` (ascending coefficients).
///
/// Leading coefficients below `1e-14` of the largest are trimmed and counted
/// as roots at infinity; exact zero low-order coefficients give roots at 0.
pub fn roots_of_coeffs(coeffs: &[C64]) -> Result<UnivariateRoots> {
    roots_of_coeffs_trim(coeffs, TRIM_REL)
}

/// [`roots_of_coeffs`] dropping leading coefficients below `trim_rel` times
/// the largest one. `trim_rel = 0` keeps every nonzero coefficient, which is
/// right when coefficient magnitudes legitimately span many decades.
pub fn roots_of_coeffs_trim(coeffs: &[C64], trim_rel: f64) -> Result<UnivariateRoots> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if coeffs.is_empty() || scale == 0.0 || !scale.is_finite() {
        return Err(Error::Precondition("polynomial is zero or not finite".into()));
    }
    let nominal = coeffs.len() - 1;
    let mut top = nominal;
    while coeffs[top].norm() <= trim_rel * scale {
        top -= 1;
    }
    if top == 0 {
        return Err(Error::Precondition("polynomial has degree 0 after trimming".into()));
    }
    let low = coeffs.iter().position(|c| *c != C64::new(0.0, 0.0)).unwrap_or(0);
    let c: Vec<C64> = coeffs[low..=top].iter().map(|x| x / scale).collect();
    let mut used_fallback = false;
    let mut roots = if c.len() > 1 {
        match aberth(&c) {
            Some(z) => z,
            None => {
                used_fallback = true;
                companion_roots(&c)
                    .ok_or_else(|| Error::RootFinding(format!("Aberth and companion both failed at degree {}", c.len() - 1)))?
            }
        }
    } else {
        Vec::new()
    };
    for z in roots.iter_mut() {
        *z = polish(&c, *z);
    }
    let (mut r, mut m) = cluster(&c, &roots);
    if low > 0 {
        r.push(C64::new(0.0, 0.0));
        m.push(low as u32);
    }
    roots.clear();
    let full: Vec<C64> = coeffs[..=top].to_vec();
    let residual = r.iter().map(|&z| backward_error(&full, z)).fold(0.0, f64::max);
    Ok(UnivariateRoots { roots: r, multiplicities: m, at_infinity: (nominal - top) as u32, residual, used_fallback })
}
