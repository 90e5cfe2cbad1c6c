//! Simultaneous zeros of two bivariate polynomials by elimination.
//!
//! `Res_y(p, q)(x)` is sampled at scaled roots of unity (each sample is the
//! determinant of a numeric Sylvester matrix), interpolated by an inverse
//! DFT, and its roots are lifted back to points by matching the `y`-roots of
//! `p(x*, ·)` against `|q(x*, ·)|`, then polished by Newton on the system.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::univariate::{roots_of_coeffs, TRIM_REL};
use crate::poly::{MultiIndex, Polynomial};
use crate::{Error, Result, C64};

/// Points of a zero-dimensional system with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub points: Vec<[C64; 2]>,
    pub multiplicities: Vec<u32>,
    /// Degree of the resultant in `x` (finite solutions with multiplicity).
    pub expected: u32,
    /// Largest backward error over points and both equations.
    pub residual: f64,
    /// Coordinate changes tried before all points were recovered.
    pub retries: u32,
}

/// `Σ_i P_i(x) yⁱ`: coefficient polynomials in x (ascending) for each power of y.
fn y_slices(p: &Polynomial) -> Vec<Vec<C64>> {
    let d = p.degree() as usize;
    let mut out = vec![vec![C64::new(0.0, 0.0); d + 1]; d + 1];
    for (m, &c) in p.terms() {
        out[m.0[1] as usize][m.0[0] as usize] = c;
    }
    while out.len() > 1 && out.last().is_some_and(|v| v.iter().all(|c| *c == C64::new(0.0, 0.0))) {
        out.pop();
    }
    out
}

fn horner(c: &[C64], x: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &v| acc * x + v)
}

/// Sylvester matrix of `a(y)`, `b(y)` (ascending coefficients).
fn sylvester(a: &[C64], b: &[C64]) -> DMatrix<C64> {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let size = da + db;
    let mut s = DMatrix::<C64>::zeros(size, size);
    for i in 0..db {
        for (k, &c) in a.iter().rev().enumerate() {
            s[(i, i + k)] = c;
        }
    }
    for i in 0..da {
        for (k, &c) in b.iter().rev().enumerate() {
            s[(db + i, i + k)] = c;
        }
    }
    s
}

/// Backward error `|f(z)| / Σ|c||z^α|`.
fn backward(p: &Polynomial, z: &[C64]) -> f64 {
    let v = p.eval(z).unwrap_or(C64::new(f64::NAN, 0.0));
    let s: f64 = p.terms().map(|(m, c)| c.norm() * m.eval(z).norm()).sum();
    if s > 0.0 {
        v.norm() / s
    } else {
        0.0
    }
}

/// Newton on the 2×2 system, keeping the best iterate.
fn newton2(p: &Polynomial, q: &Polynomial, z0: [C64; 2]) -> [C64; 2] {
    let (px, py, qx, qy) = (p.derivative(0), p.derivative(1), q.derivative(0), q.derivative(1));
    let mut z = z0;
    let score = |z: &[C64; 2]| backward(p, z).max(backward(q, z));
    let mut best = (score(&z), z);
    for _ in 0..30 {
        let f = p.eval(&z).unwrap();
        let g = q.eval(&z).unwrap();
        let a = px.eval(&z).unwrap();
        let b = py.eval(&z).unwrap();
        let c = qx.eval(&z).unwrap();
        let d = qy.eval(&z).unwrap();
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            break;
        }
        let dx = (f * d - b * g) / det;
        let dy = (a * g - c * f) / det;
        z = [z[0] - dx, z[1] - dy];
        if !(z[0].re.is_finite() && z[0].im.is_finite() && z[1].re.is_finite() && z[1].im.is_finite()) {
            break;
        }
        let s = score(&z);
        if s < best.0 {
            best = (s, z);
        }
        if dx.norm() + dy.norm() <= 1e-15 * (z[0].norm() + z[1].norm()).max(1.0) {
            break;
        }
    }
    best.1
}

/// `p(U·ξ)` for a 2×2 matrix `U`.
fn compose_linear(p: &Polynomial, u: [[C64; 2]; 2]) -> Polynomial {
    let lin = |a: C64, b: C64| Polynomial::from_terms(2, [(MultiIndex(vec![1, 0]), a), (MultiIndex(vec![0, 1]), b)]);
    let x = lin(u[0][0], u[0][1]);
    let y = lin(u[1][0], u[1][1]);
    let d = p.degree() as usize;
    let pow = |base: &Polynomial| {
        let mut v = vec![Polynomial::constant(2, C64::new(1.0, 0.0))];
        for k in 1..=d {
            let next = v[k - 1].mul(base);
            v.push(next);
        }
        v
    };
    let (xp, yp) = (pow(&x), pow(&y));
    let mut out = Polynomial::zero(2);
    for (m, &c) in p.terms() {
        out = out.add(&xp[m.0[0] as usize].mul(&yp[m.0[1] as usize]).scale(c));
    }
    out
}

/// Fixed unitary coordinate changes for retries.
fn rotation(k: u32) -> [[C64; 2]; 2] {
    let t = 0.3 + 0.61 * k as f64;
    let ph = 1.1 + 0.37 * k as f64;
    let (c, s) = (t.cos(), t.sin());
    let e = C64::from_polar(1.0, ph);
    [[C64::new(c, 0.0), -e.conj() * s], [e * s, C64::new(c, 0.0)]]
}

fn rel_dist(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    let d = ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();
    let s = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt().max((b[0].norm_sqr() + b[1].norm_sqr()).sqrt()).max(1.0);
    d / s
}

struct Attempt {
    points: Vec<[C64; 2]>,
    expected: u32,
}

fn attempt(p: &Polynomial, q: &Polynomial) -> Result<Attempt> {
    let ps = y_slices(p);
    let qs = y_slices(q);
    let (dp, dq) = (ps.len() - 1, qs.len() - 1);
    if dp == 0 || dq == 0 {
        return Err(Error::NonGeneric("an equation does not involve y".into()));
    }
    let bound = (p.degree() as usize) * (q.degree() as usize);
    let nodes = bound + 1;
    // resultant samples on the unit circle
    let mut samples = Vec::with_capacity(nodes);
    let mut hadamard: f64 = 0.0;
    for k in 0..nodes {
        let x = C64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        let a: Vec<C64> = ps.iter().map(|c| horner(c, x)).collect();
        let b: Vec<C64> = qs.iter().map(|c| horner(c, x)).collect();
        let s = sylvester(&a, &b);
        let h: f64 = s.row_iter().map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).product();
        hadamard = hadamard.max(h);
        samples.push(s.determinant());
    }
    let smax = samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(smax > 1e-11 * hadamard) {
        return Err(Error::NonGeneric("resultant vanishes identically".into()));
    }
    let coeffs: Vec<C64> = (0..nodes)
        .map(|j| {
            let s: C64 = samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * ((j * k) % nodes) as f64 / nodes as f64))
                .sum();
            s / nodes as f64
        })
        .collect();
    // round-off floor of the interpolated coefficients
    let floor = 64.0 * f64::EPSILON * smax;
    let mut c = coeffs;
    while c.len() > 1 && c.last().is_some_and(|v| v.norm() <= floor.max(TRIM_REL * smax)) {
        c.pop();
    }
    if c.len() == 1 {
        return Ok(Attempt { points: Vec::new(), expected: 0 });
    }
    let xr = roots_of_coeffs(&c)?;
    let expected: u32 = xr.finite_count();
    let mut points: Vec<[C64; 2]> = Vec::new();
    for (&x, &mult) in xr.roots.iter().zip(&xr.multiplicities) {
        let a: Vec<C64> = ps.iter().map(|c| horner(c, x)).collect();
        let b: Vec<C64> = qs.iter().map(|c| horner(c, x)).collect();
        // y-roots of the equation with the better-conditioned leading term
        let (src, other) = if a.last().unwrap().norm() >= b.last().unwrap().norm() { (&a, &b) } else { (&b, &a) };
        let Ok(yr) = roots_of_coeffs(src) else { continue };
        let mut cand: Vec<(f64, C64)> = yr
            .roots
            .iter()
            .map(|&y| {
                let v = horner(other, y).norm();
                let s: f64 = other.iter().enumerate().map(|(i, c)| c.norm() * y.norm().powi(i as i32)).sum();
                (v / s.max(f64::MIN_POSITIVE), y)
            })
            .collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(_, y) in cand.iter().take(mult as usize) {
            points.push(newton2(p, q, [x, y]));
        }
    }
    Ok(Attempt { points, expected })
}

/// Deduplicate points closer than `1e-7` (relative); multiplicities add.
fn dedupe(points: Vec<[C64; 2]>) -> (Vec<[C64; 2]>, Vec<u32>) {
    let mut out: Vec<[C64; 2]> = Vec::new();
    let mut mult: Vec<u32> = Vec::new();
    for z in points {
        if let Some(j) = out.iter().position(|w| rel_dist(w, &z) <= 1e-7) {
            mult[j] += 1;
        } else {
            out.push(z);
            mult.push(1);
        }
    }
    (out, mult)
}

/// Common zeros of `p` and `q` in `C²`.
pub fn solve_system(p: &Polynomial, q: &Polynomial) -> Result<SystemSolution> {
    if p.num_vars() != 2 || q.num_vars() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: p.num_vars().max(q.num_vars()) });
    }
    if p.is_zero() || q.is_zero() {
        return Err(Error::NonGeneric("an equation is identically zero".into()));
    }
    let mut last_err = None;
    for retry in 0..4u32 {
        let (pp, qq, u) = if retry == 0 {
            (p.clone(), q.clone(), None)
        } else {
            let u = rotation(retry);
            (compose_linear(p, u), compose_linear(q, u), Some(u))
        };
        let att = match attempt(&pp, &qq) {
            Ok(a) => a,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let pts: Vec<[C64; 2]> = att
            .points
            .into_iter()
            .map(|xi| match u {
                None => xi,
                Some(u) => [u[0][0] * xi[0] + u[0][1] * xi[1], u[1][0] * xi[0] + u[1][1] * xi[1]],
            })
            .map(|z| newton2(p, q, z))
            .collect();
        let residual = pts.iter().map(|z| backward(p, z).max(backward(q, z))).fold(0.0, f64::max);
        let (points, multiplicities) = dedupe(pts);
        // a point reached twice while the count is short means a lost solution
        let distinct_ok = multiplicities.iter().all(|&m| m == 1);
        let total: u32 = multiplicities.iter().sum();
        if total == att.expected && distinct_ok && residual <= 1e-7 {
            return Ok(SystemSolution { points, multiplicities, expected: att.expected, residual, retries: retry });
        }
        last_err =
            Some(Error::RootFinding(format!("recovered {} distinct of {} points (residual {residual:.1e})", points.len(), att.expected)));
    }
    Err(last_err.unwrap_or_else(|| Error::RootFinding("system solve failed".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[((u32, u32), f64)]) -> Polynomial {
        Polynomial::from_terms(2, terms.iter().map(|&((i, j), c)| (MultiIndex(vec![i, j]), C64::new(c, 0.0))))
    }

    fn has(points: &[[C64; 2]], x: f64, y: f64) -> bool {
        points.iter().any(|p| (p[0] - x).norm() < 1e-10 && (p[1] - y).norm() < 1e-10)
    }

    #[test]
    fn hyperbola_and_diagonal() {
        let p = poly(&[((1, 1), 1.0), ((0, 0), -1.0)]);
        let q = poly(&[((1, 0), 1.0), ((0, 1), -1.0)]);
        let s = solve_system(&p, &q).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!(has(&s.points, 1.0, 1.0) && has(&s.points, -1.0, -1.0));
    }

    #[test]
    fn circle_and_axis() {
        let p = poly(&[((2, 0), 1.0), ((0, 2), 1.0), ((0, 0), -1.0)]);
        let q = poly(&[((0, 1), 1.0)]);
        let s = solve_system(&p, &q).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!(has(&s.points, 1.0, 0.0) && has(&s.points, -1.0, 0.0));
    }

    #[test]
    fn common_component_is_non_generic() {
        // p = x·y, q = x·(y+1): share the line x = 0
        let p = poly(&[((1, 1), 1.0)]);
        let q = poly(&[((1, 1), 1.0), ((1, 0), 1.0)]);
        assert!(matches!(solve_system(&p, &q), Err(Error::NonGeneric(_))));
    }

    #[test]
    fn linear_change_round_trip() {
        let p = poly(&[((2, 0), 1.0), ((1, 1), -3.0), ((0, 0), 2.0)]);
        let u = rotation(2);
        let pu = compose_linear(&p, u);
        let xi = [C64::new(0.3, -0.1), C64::new(1.2, 0.4)];
        let z = [u[0][0] * xi[0] + u[0][1] * xi[1], u[1][0] * xi[0] + u[1][1] * xi[1]];
        assert!((pu.eval(&xi).unwrap() - p.eval(&z).unwrap()).norm() < 1e-13);
    }
}
