//! Zero sets of sampled polynomials and their pairings with test forms.

mod pairing;
mod system;
mod univariate;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::poly::Polynomial;
use crate::{Error, Result, C64};

pub use pairing::{pairing_poincare_lelong, pairing_poincare_lelong_with, pairing_root_sum, CurrentPairing, PairingMethod};
pub use system::{solve_system, SystemSolution};
pub use univariate::{backward_error, roots_of_coeffs, roots_of_coeffs_trim, UnivariateRoots, MERGE_REL, TRIM_REL};

/// Zeros of one sampled polynomial (codim 1 in `C`) or system (codim 2 in `C²`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSample {
    pub points: Vec<Vec<C64>>,
    pub multiplicities: Vec<u32>,
    pub codim: usize,
    pub source_degree: usize,
    /// Largest backward error `|f(ζ)| / Σ|c||ζ^α|` over the points.
    pub residual: f64,
    /// Zeros lost to vanishing leading terms; they sit at infinity.
    #[serde(default)]
    pub at_infinity: u32,
}

impl ZeroSample {
    pub fn num_vars(&self) -> usize {
        self.points.first().map_or(self.codim, Vec::len)
    }

    /// Multiplicity-weighted count of finite zeros.
    pub fn finite_count(&self) -> u32 {
        self.multiplicities.iter().sum()
    }

    /// One row per point: `re_1,im_1[,re_2,im_2],multiplicity`.
    pub fn to_csv(&self) -> String {
        let m = self.num_vars();
        let mut s = String::new();
        for k in 1..=m {
            let _ = write!(s, "re_{k},im_{k},");
        }
        s.push_str("multiplicity\n");
        for (p, mult) in self.points.iter().zip(&self.multiplicities) {
            for c in p {
                let _ = write!(s, "{:e},{:e},", c.re, c.im);
            }
            let _ = writeln!(s, "{mult}");
        }
        s
    }

    pub fn from_csv(text: &str, codim: usize, source_degree: usize) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Serialization("empty CSV".into()))?;
        let cols = header.split(',').count();
        if cols < 3 || cols % 2 == 0 {
            return Err(Error::Serialization(format!("unexpected header {header:?}")));
        }
        let m = (cols - 1) / 2;
        let mut points = Vec::new();
        let mut multiplicities = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != cols {
                return Err(Error::Serialization(format!("row {line:?} has {} fields, expected {cols}", f.len())));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Serialization(format!("{s:?}: {e}")));
            let mut p = Vec::with_capacity(m);
            for k in 0..m {
                p.push(C64::new(num(f[2 * k])?, num(f[2 * k + 1])?));
            }
            points.push(p);
            multiplicities.push(f[cols - 1].trim().parse().map_err(|e| Error::Serialization(format!("{e}")))?);
        }
        Ok(Self { points, multiplicities, codim, source_degree, residual: f64::NAN, at_infinity: 0 })
    }
}

/// All roots of a univariate polynomial of nominal degree `p.degree()`.
pub fn roots_univariate(p: &Polynomial) -> Result<ZeroSample> {
    if p.num_vars() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: p.num_vars() });
    }
    if p.degree() < 1 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    roots_with_degree(&p.univariate_coeffs(), p.degree() as usize)
}

/// Roots of `Σ cⱼ zʲ` regarded as a polynomial of degree `degree`
/// (`coeffs.len() ≤ degree + 1`); missing degree is reported at infinity.
pub fn roots_with_degree(coeffs: &[C64], degree: usize) -> Result<ZeroSample> {
    roots_with_degree_trim(coeffs, degree, TRIM_REL)
}

/// [`roots_with_degree`] with an explicit leading-coefficient trim level.
pub fn roots_with_degree_trim(coeffs: &[C64], degree: usize, trim_rel: f64) -> Result<ZeroSample> {
    if coeffs.len() > degree + 1 {
        return Err(Error::DimensionMismatch { expected: degree + 1, got: coeffs.len() });
    }
    let r = roots_of_coeffs_trim(coeffs, trim_rel)?;
    let at_infinity = r.at_infinity + (degree + 1 - coeffs.len()) as u32;
    Ok(ZeroSample {
        points: r.roots.iter().map(|&z| vec![z]).collect(),
        multiplicities: r.multiplicities,
        codim: 1,
        source_degree: degree,
        residual: r.residual,
        at_infinity,
    })
}

/// Common zeros in `C²` of two polynomials of degree `n`.
pub fn solve_system_2d(p: &Polynomial, q: &Polynomial) -> Result<ZeroSample> {
    let s = solve_system(p, q)?;
    let n = p.degree().max(q.degree()) as usize;
    let bezout = p.degree() * q.degree();
    Ok(ZeroSample {
        points: s.points.iter().map(|z| z.to_vec()).collect(),
        multiplicities: s.multiplicities,
        codim: 2,
        source_degree: n,
        residual: s.residual,
        at_infinity: bezout.saturating_sub(s.expected),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal, stream};

    #[test]
    fn random_degree_fifty_residual() {
        let mut rng = stream(1, "roots", &[]);
        let c: Vec<C64> = (0..=50).map(|_| complex_normal(&mut rng)).collect();
        let z = roots_univariate(&Polynomial::univariate(&c)).unwrap();
        assert_eq!(z.finite_count(), 50);
        assert!(z.residual <= 1e-8);
    }

    #[test]
    fn csv_round_trip() {
        let z = roots_with_degree(&[C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], 3).unwrap();
        assert_eq!(z.at_infinity, 1);
        let back = ZeroSample::from_csv(&z.to_csv(), 1, 3).unwrap();
        assert_eq!(back.points, z.points);
        assert_eq!(back.multiplicities, z.multiplicities);
    }
}
