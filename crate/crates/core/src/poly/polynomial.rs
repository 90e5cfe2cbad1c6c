use std::collections::BTreeMap;

use crate::poly::MultiIndex;
use crate::{Error, Result, C64};

/// Complex polynomial in `num_vars` variables with sparse coefficient storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    num_vars: usize,
    coeffs: BTreeMap<MultiIndex, C64>,
    degree: u32,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, coeffs: BTreeMap::new(), degree: 0 }
    }

    pub fn constant(num_vars: usize, c: C64) -> Self {
        Self::from_terms(num_vars, [(MultiIndex::zero(num_vars), c)])
    }

    /// Build from `(exponents, coefficient)` pairs; repeated monomials add up
    /// and exact zeros are dropped.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.num_vars(), num_vars, "multi-index arity");
            *coeffs.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c: &mut C64| *c != C64::new(0.0, 0.0));
        let degree = coeffs.keys().map(MultiIndex::degree).max().unwrap_or(0);
        Self { num_vars, coeffs, degree }
    }

    /// Univariate polynomial from ascending coefficients `c₀ + c₁z + …`.
    pub fn univariate(coeffs: &[C64]) -> Self {
        Self::from_terms(1, coeffs.iter().enumerate().map(|(j, &c)| (MultiIndex(vec![j as u32]), c)))
    }

    /// Bivariate polynomial from a grid `grid[i][j]` = coefficient of `xⁱyʲ`.
    pub fn bivariate(grid: &[Vec<C64>]) -> Self {
        let mut terms = Vec::new();
        for (i, row) in grid.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                terms.push((MultiIndex(vec![i as u32, j as u32]), c));
            }
        }
        Self::from_terms(2, terms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, m: &MultiIndex) -> C64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    /// Largest coefficient modulus.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: z.len() });
        }
        if self.num_vars == 1 {
            return Ok(horner(&self.univariate_coeffs(), z[0]));
        }
        let d = self.degree as usize;
        let powers: Vec<Vec<C64>> = z
            .iter()
            .map(|&zi| {
                let mut p = Vec::with_capacity(d + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=d {
                    p.push(acc);
                    acc *= zi;
                }
                p
            })
            .collect();
        Ok(self.coeffs.iter().map(|(m, &c)| m.0.iter().enumerate().fold(c, |acc, (v, &e)| acc * powers[v][e as usize])).sum())
    }

    /// Ascending coefficients `[c₀, …, c_deg]` of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Vec<C64> {
        assert_eq!(self.num_vars, 1, "univariate_coeffs on a multivariate polynomial");
        let mut out = vec![C64::new(0.0, 0.0); self.degree as usize + 1];
        for (m, &c) in &self.coeffs {
            out[m.0[0] as usize] = c;
        }
        out
    }

    /// Coefficient grid `g[i][j]` of `xⁱyʲ`, sized `(deg+1)×(deg+1)`.
    pub fn bivariate_grid(&self) -> Vec<Vec<C64>> {
        assert_eq!(self.num_vars, 2, "bivariate_grid on a non-bivariate polynomial");
        let d = self.degree as usize;
        let mut g = vec![vec![C64::new(0.0, 0.0); d + 1]; d + 1];
        for (m, &c) in &self.coeffs {
            g[m.0[0] as usize][m.0[1] as usize] = c;
        }
        g
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.num_vars, self.coeffs.iter().map(|(m, c)| (m.clone(), c.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(self.num_vars, self.coeffs.iter().map(|(m, &c)| (m.clone(), c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        Self::from_terms(self.num_vars, self.coeffs.iter().chain(other.coeffs.iter()).map(|(m, &c)| (m.clone(), c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                terms.push((MultiIndex(e), ca * cb));
            }
        }
        Self::from_terms(self.num_vars, terms)
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        Self::from_terms(
            self.num_vars,
            self.coeffs.iter().filter(|(m, _)| m.0[v] > 0).map(|(m, &c)| {
                let mut e = m.0.clone();
                let k = e[v];
                e[v] -= 1;
                (MultiIndex(e), c * k as f64)
            }),
        )
    }
}

/// Horner evaluation of ascending coefficients.
pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `log|p(z)|` for ascending coefficients, robust to coefficient and argument
/// ranges far beyond what direct evaluation tolerates.
pub fn log_abs_eval(coeffs: &[C64], z: C64) -> f64 {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = coeffs.len() - 1;
    let r = z.norm();
    let v = if r <= 1.0 {
        coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c / scale).norm().ln()
    } else {
        let w = z.inv();
        let rev = coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * w + c / scale);
        rev.norm().ln() + n as f64 * r.ln()
    };
    v + scale.ln()
}
