use serde::{Deserialize, Serialize};

use crate::compact::WeightedCompact;
use crate::poly::{monomials_up_to, space_dimension, MultiIndex, Polynomial};
use crate::{Error, Result, C64};

/// How the members of a [`BasisFamily`] are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `‖p e^{-nq}‖_K ≤ 1` on the discretized compact.
    #[serde(rename = "sup-normalized")]
    SupNormalized,
    /// Orthonormal in `L²(e^{-2nq} σ)` for a discrete measure `σ`.
    #[serde(rename = "L2-orthonormal")]
    L2Orthonormal,
    /// Orthonormal sections of `O(n)` for the Fubini–Study metric and volume.
    #[serde(rename = "fs-orthonormal")]
    FsOrthonormal,
    #[serde(rename = "raw")]
    Raw,
}

/// Coefficients `a⁽ⁿ⁾` of a polynomial in a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(pub Vec<C64>);

impl CoefficientVector {
    pub fn entries(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Unit coordinate vector `e_j`.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[j] = C64::new(1.0, 0.0);
        Self(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Member `j` is `w_j · monomial_j`.
    Diagonal(Vec<C64>),
    /// Member `j` is `Σ_k rows[j][k] · monomial_k`.
    Dense(Vec<Vec<C64>>),
}

/// Ordered family `{p_{nj}}` spanning polynomials of degree ≤ n in m variables.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFamily {
    num_vars: usize,
    degree: usize,
    normalization: Normalization,
    first_is_constant: bool,
    monomials: Vec<MultiIndex>,
    repr: Repr,
    scales: Vec<f64>,
}

impl BasisFamily {
    fn diagonal(m: usize, n: usize, weights: Vec<C64>, normalization: Normalization) -> Result<Self> {
        let d = space_dimension(m, n)?;
        debug_assert_eq!(weights.len(), d);
        Ok(Self {
            num_vars: m,
            degree: n,
            normalization,
            first_is_constant: true,
            monomials: monomials_up_to(m, n),
            repr: Repr::Diagonal(weights),
            scales: vec![1.0; d],
        })
    }

    /// Monomials `z^α`, `|α| ≤ n`, in graded-lex order.
    pub fn monomial(m: usize, n: usize) -> Result<Self> {
        let d = space_dimension(m, n)?;
        Self::diagonal(m, n, vec![C64::new(1.0, 0.0); d], Normalization::Raw)
    }

    /// `1, z, …, zⁿ`: orthonormal for normalized arclength on the unit circle
    /// and sup-normalized on the closed unit disk.
    pub fn circle_orthonormal(n: usize) -> Result<Self> {
        Self::diagonal(1, n, vec![C64::new(1.0, 0.0); n + 1], Normalization::L2Orthonormal)
    }

    /// Chebyshev polynomials `T₀, …, Tₙ`; each has sup norm 1 on `[-1, 1]`.
    pub fn chebyshev(n: usize) -> Result<Self> {
        let mut rows: Vec<Vec<C64>> = Vec::with_capacity(n + 1);
        let zero = C64::new(0.0, 0.0);
        for j in 0..=n {
            let mut r = vec![zero; n + 1];
            match j {
                0 => r[0] = C64::new(1.0, 0.0),
                1 => r[1] = C64::new(1.0, 0.0),
                _ => {
                    for k in 0..=n {
                        let up = if k > 0 { rows[j - 1][k - 1] * 2.0 } else { zero };
                        r[k] = up - rows[j - 2][k];
                    }
                }
            }
            rows.push(r);
        }
        Ok(Self {
            num_vars: 1,
            degree: n,
            normalization: Normalization::SupNormalized,
            first_is_constant: true,
            monomials: monomials_up_to(1, n),
            repr: Repr::Dense(rows),
            scales: vec![1.0; n + 1],
        })
    }

    /// Fubini–Study orthonormal sections of `O(n)` over `CP^m` in the affine
    /// chart: `√(dₙ · n!/(α!(n-|α|)!)) z^α`.
    ///
    /// With this normalization `Γₙ(z)(1+‖z‖²)^{-n} ≡ dₙ`.
    pub fn fs_orthonormal(m: usize, n: usize) -> Result<Self> {
        let d = space_dimension(m, n)?;
        let monomials = monomials_up_to(m, n);
        let ln_fact = |k: u32| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        let ln_n = ln_fact(n as u32);
        let ln_d = (d as f64).ln();
        let w = monomials
            .iter()
            .map(|a| {
                let rest = n as u32 - a.degree();
                let ln_multi = ln_n - a.0.iter().map(|&e| ln_fact(e)).sum::<f64>() - ln_fact(rest);
                C64::new((0.5 * (ln_d + ln_multi)).exp(), 0.0)
            })
            .collect();
        Self::diagonal(m, n, w, Normalization::FsOrthonormal)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn first_is_constant(&self) -> bool {
        self.first_is_constant
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    /// Scaling constants applied by [`normalize_sup`] (1 for untouched members).
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Whether every member is a multiple of a single monomial.
    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    /// Monomial coefficients of member `j`.
    fn row(&self, j: usize) -> Vec<C64> {
        match &self.repr {
            Repr::Diagonal(w) => {
                let mut r = vec![C64::new(0.0, 0.0); w.len()];
                r[j] = w[j];
                r
            }
            Repr::Dense(rows) => rows[j].clone(),
        }
    }

    pub fn member(&self, j: usize) -> Polynomial {
        let row = self.row(j);
        Polynomial::from_terms(self.num_vars, self.monomials.iter().cloned().zip(row))
    }

    pub fn members(&self) -> Vec<Polynomial> {
        (0..self.dim()).map(|j| self.member(j)).collect()
    }

    /// Monomial coefficients (basis order) of `f = Σⱼ aⱼ pⱼ`.
    pub fn monomial_coeffs(&self, a: &[C64]) -> Result<Vec<C64>> {
        if a.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: a.len() });
        }
        Ok(match &self.repr {
            Repr::Diagonal(w) => a.iter().zip(w).map(|(x, y)| x * y).collect(),
            Repr::Dense(rows) => {
                let mut c = vec![C64::new(0.0, 0.0); self.dim()];
                for (aj, row) in a.iter().zip(rows) {
                    for (ck, r) in c.iter_mut().zip(row) {
                        *ck += aj * r;
                    }
                }
                c
            }
        })
    }

    /// `f = Σⱼ aⱼ pⱼ` as a polynomial.
    pub fn combine(&self, a: &CoefficientVector) -> Result<Polynomial> {
        let c = self.monomial_coeffs(&a.0)?;
        Ok(Polynomial::from_terms(self.num_vars, self.monomials.iter().cloned().zip(c)))
    }

    /// Ascending univariate coefficients of `Σⱼ aⱼ pⱼ` (m = 1 only).
    pub fn univariate_coeffs(&self, a: &[C64]) -> Result<Vec<C64>> {
        if self.num_vars != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.num_vars });
        }
        self.monomial_coeffs(a)
    }

    /// Basis values scaled by `R^{-n}`, `R = max(1, maxᵢ|zᵢ|)`, with `n log R`.
    pub fn eval_scaled(&self, z: &[C64]) -> Result<(Vec<C64>, f64)> {
        if z.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: z.len() });
        }
        let r = z.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let n = self.degree;
        let zs: Vec<C64> = z.iter().map(|c| c / r).collect();
        // powers of the scaled coordinates; the remaining factor R^{|α|-n}
        // multiplies each monomial of lower degree
        let inv = 1.0 / r;
        let mut inv_pow = Vec::with_capacity(n + 1);
        let mut acc = 1.0;
        for _ in 0..=n {
            inv_pow.push(acc);
            acc *= inv;
        }
        let tables: Vec<Vec<C64>> = zs
            .iter()
            .map(|&c| {
                let mut p = Vec::with_capacity(n + 1);
                let mut a = C64::new(1.0, 0.0);
                for _ in 0..=n {
                    p.push(a);
                    a *= c;
                }
                p
            })
            .collect();
        let mono: Vec<C64> = self
            .monomials
            .iter()
            .map(|m| {
                let v = m.0.iter().enumerate().fold(C64::new(1.0, 0.0), |acc, (i, &e)| acc * tables[i][e as usize]);
                v * inv_pow[n - m.degree() as usize]
            })
            .collect();
        let vals = match &self.repr {
            Repr::Diagonal(w) => mono.iter().zip(w).map(|(x, y)| x * y).collect(),
            Repr::Dense(rows) => rows.iter().map(|row| row.iter().zip(&mono).map(|(a, b)| a * b).sum()).collect(),
        };
        Ok((vals, n as f64 * r.ln()))
    }

    /// `(p_{n1}(z), …, p_{nd}(z))` in basis order.
    pub fn eval_basis(&self, z: &[C64]) -> Result<Vec<C64>> {
        let (v, log_scale) = self.eval_scaled(z)?;
        let s = log_scale.exp();
        Ok(v.into_iter().map(|c| c * s).collect())
    }

    /// `Γₙ(z) = Σⱼ |p_{nj}(z)|²`.
    pub fn bergman_gamma(&self, z: &[C64]) -> Result<f64> {
        Ok(self.log_bergman_gamma(z)?.exp())
    }

    /// `log Γₙ(z)` evaluated without overflow.
    pub fn log_bergman_gamma(&self, z: &[C64]) -> Result<f64> {
        let (v, log_scale) = self.eval_scaled(z)?;
        let s: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        Ok(s.ln() + 2.0 * log_scale)
    }

    /// `β(z) = p(z)/√Γₙ(z)`, a unit vector in `C^{dₙ}`.
    pub fn unit_section(&self, z: &[C64]) -> Result<Vec<C64>> {
        let (v, log_scale) = self.eval_scaled(z)?;
        let s: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::DegeneratePoint { gamma: s * (2.0 * log_scale).exp() });
        }
        let norm = s.sqrt();
        Ok(v.into_iter().map(|c| c / norm).collect())
    }

    /// Apply a `d×d` matrix to the members: new member `i` is `Σⱼ U[i][j] pⱼ`.
    pub fn transform(&self, u: &[Vec<C64>], normalization: Normalization) -> Result<Self> {
        let d = self.dim();
        if u.len() != d || u.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: u.len() });
        }
        let old: Vec<Vec<C64>> = (0..d).map(|j| self.row(j)).collect();
        let rows = u
            .iter()
            .map(|ui| {
                let mut r = vec![C64::new(0.0, 0.0); d];
                for (uij, oj) in ui.iter().zip(&old) {
                    for (rk, ok) in r.iter_mut().zip(oj) {
                        *rk += uij * ok;
                    }
                }
                r
            })
            .collect::<Vec<_>>();
        let first_is_constant = rows[0].iter().skip(1).all(|c| *c == C64::new(0.0, 0.0));
        Ok(Self {
            num_vars: self.num_vars,
            degree: self.degree,
            normalization,
            first_is_constant,
            monomials: self.monomials.clone(),
            repr: Repr::Dense(rows),
            scales: vec![1.0; d],
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&BasisDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BasisDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Log-decomposition `(1/n) log|⟨a, β(z)⟩|` and `(1/2n) log Γₙ(z)`; the two
/// terms sum to `(1/n) log|fₙ(z)|`.
pub fn log_decompose(coeffs: &CoefficientVector, basis: &BasisFamily, z: &[C64]) -> Result<(f64, f64)> {
    let n = basis.degree();
    if n == 0 {
        return Err(Error::Precondition("log decomposition needs degree n ≥ 1".into()));
    }
    if coeffs.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: coeffs.len() });
    }
    let beta = basis.unit_section(z)?;
    let inner: C64 = coeffs.0.iter().zip(&beta).map(|(a, b)| a * b).sum();
    if inner == C64::new(0.0, 0.0) {
        return Err(Error::OnZeroSet);
    }
    let nf = n as f64;
    Ok((inner.norm().ln() / nf, basis.log_bergman_gamma(z)? / (2.0 * nf)))
}

/// Discrete measure on a compact: nodes with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNodes {
    pub points: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
}

/// Orthonormalize the monomials of degree ≤ n against
/// `⟨p, q⟩ = Σᵢ wᵢ p(zᵢ) conj(q(zᵢ)) e^{-2n q(zᵢ)}` by modified Gram–Schmidt
/// with one reorthogonalization pass.
pub fn build_orthonormal_basis<W>(nodes: &WeightedNodes, weight: W, m: usize, n: usize) -> Result<BasisFamily>
where
    W: Fn(&[C64]) -> f64,
{
    let d = space_dimension(m, n)?;
    if nodes.points.len() != nodes.weights.len() {
        return Err(Error::DimensionMismatch { expected: nodes.points.len(), got: nodes.weights.len() });
    }
    if nodes.weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidParameter("quadrature weights must be positive".into()));
    }
    let monomials = monomials_up_to(m, n);
    let sq: Vec<f64> =
        nodes.points.iter().zip(&nodes.weights).map(|(z, w)| (w.ln() - 2.0 * n as f64 * weight(z)).mul_add(0.5, 0.0).exp()).collect();
    // sampled monomials, one column per monomial
    let cols: Vec<Vec<C64>> = monomials.iter().map(|a| nodes.points.iter().zip(&sq).map(|(z, s)| a.eval(z) * *s).collect()).collect();
    let zero = C64::new(0.0, 0.0);
    let mut q_vals: Vec<Vec<C64>> = Vec::with_capacity(d);
    let mut q_coef: Vec<Vec<C64>> = Vec::with_capacity(d);
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>();
    for (k, col) in cols.iter().enumerate() {
        let mut u = col.clone();
        let mut c = vec![zero; d];
        c[k] = C64::new(1.0, 0.0);
        let orig = dot(&u, &u).re.sqrt();
        if orig == 0.0 {
            return Err(Error::SingularGram { index: k, condition: f64::INFINITY });
        }
        for _pass in 0..2 {
            for (qv, qc) in q_vals.iter().zip(&q_coef) {
                let r = dot(&u, qv);
                for (ui, qi) in u.iter_mut().zip(qv) {
                    *ui -= r * qi;
                }
                for (ci, qi) in c.iter_mut().zip(qc) {
                    *ci -= r * qi;
                }
            }
        }
        let norm = dot(&u, &u).re.sqrt();
        if norm <= 1e-13 * orig {
            return Err(Error::SingularGram { index: k, condition: orig / norm });
        }
        q_vals.push(u.iter().map(|x| x / norm).collect());
        q_coef.push(c.iter().map(|x| x / norm).collect());
    }
    Ok(BasisFamily {
        num_vars: m,
        degree: n,
        normalization: Normalization::L2Orthonormal,
        first_is_constant: true,
        monomials,
        repr: Repr::Dense(q_coef),
        scales: vec![1.0; d],
    })
}

/// Gram matrix of a basis under the discrete weighted product used by
/// [`build_orthonormal_basis`].
pub fn gram_matrix<W>(basis: &BasisFamily, nodes: &WeightedNodes, weight: W) -> Result<Vec<Vec<C64>>>
where
    W: Fn(&[C64]) -> f64,
{
    let d = basis.dim();
    let n = basis.degree() as f64;
    let mut g = vec![vec![C64::new(0.0, 0.0); d]; d];
    for (z, w) in nodes.points.iter().zip(&nodes.weights) {
        let v = basis.eval_basis(z)?;
        let f = w * (-2.0 * n * weight(z)).exp();
        for i in 0..d {
            for j in 0..d {
                g[i][j] += v[i] * v[j].conj() * f;
            }
        }
    }
    Ok(g)
}

/// Divide every member by its weighted sup over the compact's grid.
///
/// The constant member stays `≡ 1`; this requires `e^{-nq} ≤ 1` on the grid.
pub fn normalize_sup(basis: &BasisFamily, kq: &WeightedCompact) -> Result<BasisFamily> {
    if basis.num_vars() != kq.num_vars() {
        return Err(Error::DimensionMismatch { expected: kq.num_vars(), got: basis.num_vars() });
    }
    let n = basis.degree() as f64;
    let d = basis.dim();
    let mut sup = vec![0.0f64; d];
    for z in kq.sup_nodes() {
        let (v, log_scale) = basis.eval_scaled(z)?;
        let f = (log_scale - n * kq.weight_at(z)).exp();
        for (s, c) in sup.iter_mut().zip(&v) {
            *s = s.max(c.norm() * f);
        }
    }
    let mut rows: Vec<Vec<C64>> = (0..d).map(|j| basis.row(j)).collect();
    let mut scales = basis.scales.clone();
    for (j, s) in sup.iter().enumerate() {
        if !(*s > 0.0) {
            return Err(Error::ZeroMember(j));
        }
        if j == 0 && basis.first_is_constant {
            let c0 = rows[0][0];
            let const_sup = s / c0.norm();
            if const_sup > 1.0 + 1e-12 {
                return Err(Error::Precondition(format!("constant member has weighted sup {const_sup} > 1 (weight negative on K)")));
            }
            rows[0][0] = C64::new(1.0, 0.0);
            scales[0] = 1.0 / c0.norm();
            continue;
        }
        for c in rows[j].iter_mut() {
            *c /= *s;
        }
        scales[j] /= s;
    }
    let repr = if basis.is_diagonal() { Repr::Diagonal((0..d).map(|j| rows[j][j]).collect()) } else { Repr::Dense(rows) };
    Ok(BasisFamily {
        num_vars: basis.num_vars,
        degree: basis.degree,
        normalization: Normalization::SupNormalized,
        first_is_constant: basis.first_is_constant,
        monomials: basis.monomials.clone(),
        repr,
        scales,
    })
}

/// Weighted sup of every member over the compact's grid.
pub fn weighted_sups(basis: &BasisFamily, kq: &WeightedCompact) -> Result<Vec<f64>> {
    let n = basis.degree() as f64;
    let mut sup = vec![0.0f64; basis.dim()];
    for z in kq.sup_nodes() {
        let (v, log_scale) = basis.eval_scaled(z)?;
        let f = (log_scale - n * kq.weight_at(z)).exp();
        for (s, c) in sup.iter_mut().zip(&v) {
            *s = s.max(c.norm() * f);
        }
    }
    Ok(sup)
}

/// JSON form: `{m, n, order: "grlex", normalization, members}` with each
/// member a list of `(multi-index, re, im)` triples.
#[derive(Debug, Serialize, Deserialize)]
struct BasisDocument {
    m: usize,
    n: usize,
    order: String,
    normalization: Normalization,
    first_is_constant: bool,
    scales: Vec<f64>,
    members: Vec<Vec<(Vec<u32>, f64, f64)>>,
}

impl From<&BasisFamily> for BasisDocument {
    fn from(b: &BasisFamily) -> Self {
        let members = (0..b.dim())
            .map(|j| {
                b.row(j)
                    .iter()
                    .zip(&b.monomials)
                    .filter(|(c, _)| **c != C64::new(0.0, 0.0))
                    .map(|(c, m)| (m.0.clone(), c.re, c.im))
                    .collect()
            })
            .collect();
        Self {
            m: b.num_vars,
            n: b.degree,
            order: "grlex".into(),
            normalization: b.normalization,
            first_is_constant: b.first_is_constant,
            scales: b.scales.clone(),
            members,
        }
    }
}

impl TryFrom<BasisDocument> for BasisFamily {
    type Error = Error;

    fn try_from(doc: BasisDocument) -> Result<Self> {
        if doc.order != "grlex" {
            return Err(Error::Serialization(format!("unsupported order {:?}", doc.order)));
        }
        let monomials = monomials_up_to(doc.m, doc.n);
        let d = monomials.len();
        if doc.members.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: doc.members.len() });
        }
        let index = |e: &Vec<u32>| -> Result<usize> {
            let mi = MultiIndex(e.clone());
            monomials
                .binary_search(&mi)
                .map_err(|_| Error::Serialization(format!("monomial {e:?} outside degree {} in {} variables", doc.n, doc.m)))
        };
        let mut rows = vec![vec![C64::new(0.0, 0.0); d]; d];
        for (j, member) in doc.members.iter().enumerate() {
            for (e, re, im) in member {
                rows[j][index(e)?] += C64::new(*re, *im);
            }
        }
        let diagonal = rows.iter().enumerate().all(|(j, r)| r.iter().enumerate().all(|(k, c)| k == j || *c == C64::new(0.0, 0.0)));
        let repr = if diagonal { Repr::Diagonal((0..d).map(|j| rows[j][j]).collect()) } else { Repr::Dense(rows) };
        Ok(Self {
            num_vars: doc.m,
            degree: doc.n,
            normalization: doc.normalization,
            first_is_constant: doc.first_is_constant,
            monomials,
            repr,
            scales: if doc.scales.len() == d { doc.scales } else { vec![1.0; d] },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::{CompactKind, WeightedCompact};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_values_and_gamma() {
        let b = BasisFamily::monomial(1, 2).unwrap();
        assert_eq!(b.eval_basis(&[c(2.0, 0.0)]).unwrap(), vec![c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!((b.bergman_gamma(&[c(2.0, 0.0)]).unwrap() - 21.0).abs() < 1e-12);
        let b3 = BasisFamily::monomial(1, 3).unwrap();
        assert!((b3.bergman_gamma(&[C64::from_polar(1.0, 0.7)]).unwrap() - 4.0).abs() < 1e-12);
        let co = BasisFamily::circle_orthonormal(5).unwrap();
        assert_eq!(co.bergman_gamma(&[c(0.0, 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn unit_sections() {
        let b = BasisFamily::monomial(1, 1).unwrap();
        assert_eq!(b.unit_section(&[c(0.0, 0.0)]).unwrap(), vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let u = b.unit_section(&[c(1.0, 0.0)]).unwrap();
        assert!((u[0].re - 0.5f64.sqrt()).abs() < 1e-15 && (u[1].re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_is_sup_normalized_on_interval() {
        let b = BasisFamily::chebyshev(6).unwrap();
        let v = b.eval_basis(&[c(1.0, 0.0)]).unwrap();
        assert!(v.iter().all(|x| x.norm() <= 1.0 + 1e-14));
        let x: f64 = 0.3;
        let t5 = b.eval_basis(&[c(x, 0.0)]).unwrap()[5];
        assert!((t5.re - (5.0 * x.acos()).cos()).abs() < 1e-13);
    }

    #[test]
    fn decomposition_of_constant() {
        let b = BasisFamily::monomial(1, 1).unwrap();
        let (a, g) = log_decompose(&CoefficientVector::unit(2, 0), &b, &[c(0.0, 0.0)]).unwrap();
        assert_eq!(a + g, 0.0);
        // a ⟂ β(1) = (1, 1)/√2
        let a = CoefficientVector(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(log_decompose(&a, &b, &[c(1.0, 0.0)]), Err(Error::OnZeroSet));
    }

    #[test]
    fn trapezoid_circle_gives_monomials() {
        let n = 2;
        let k = 4 * n + 4;
        let nodes = WeightedNodes {
            points: (0..k).map(|j| vec![C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64)]).collect(),
            weights: vec![1.0 / k as f64; k],
        };
        let b = build_orthonormal_basis(&nodes, |_| 0.0, 1, n).unwrap();
        for j in 0..=n {
            let m = b.member(j);
            for (idx, coef) in m.terms() {
                let expect = if idx.0[0] as usize == j { 1.0 } else { 0.0 };
                assert!((coef.norm() - expect).abs() < 1e-12);
            }
        }
        let g = gram_matrix(&b, &nodes, |_| 0.0).unwrap();
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn gauss_chebyshev_gives_chebyshev() {
        let k = 64;
        let nodes = WeightedNodes {
            points: (1..=k).map(|j| vec![c(((2 * j - 1) as f64 * PI / (2 * k) as f64).cos(), 0.0)]).collect(),
            weights: vec![1.0 / k as f64; k],
        };
        let b = build_orthonormal_basis(&nodes, |_| 0.0, 1, 1).unwrap();
        // T₀ = 1, T₁ = x has arcsine norm 1/√2
        assert!((b.member(0).coeff(&MultiIndex(vec![0])).norm() - 1.0).abs() < 1e-12);
        assert!((b.member(1).coeff(&MultiIndex(vec![1])).norm() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_measure_is_singular() {
        let nodes = WeightedNodes { points: vec![vec![c(0.3, 0.0)]], weights: vec![1.0] };
        assert!(matches!(build_orthonormal_basis(&nodes, |_| 0.0, 1, 1), Err(Error::SingularGram { index: 1, .. })));
    }

    #[test]
    fn sup_normalization() {
        let disk = WeightedCompact::new(CompactKind::UnitDisk).unwrap();
        let mono = BasisFamily::monomial(1, 4).unwrap();
        let s = normalize_sup(&mono, &disk).unwrap();
        for z in [c(0.5, 0.5), c(2.0, 1.0)] {
            let a = mono.eval_basis(&[z]).unwrap();
            let b = s.eval_basis(&[z]).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
        }
        assert_eq!(s.normalization(), Normalization::SupNormalized);
        let two_z = BasisFamily::monomial(1, 1)
            .unwrap()
            .transform(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]], Normalization::Raw)
            .unwrap();
        let s = normalize_sup(&two_z, &disk).unwrap();
        assert!((s.member(1).coeff(&MultiIndex(vec![1])) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s.scales()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sup_normalized_chebyshev_survives_refinement() {
        let kq = WeightedCompact::new(CompactKind::Interval).unwrap();
        let raw = BasisFamily::monomial(1, 12).unwrap();
        let s = normalize_sup(&raw, &kq).unwrap();
        let sups = weighted_sups(&s, &kq.refined(2).unwrap()).unwrap();
        assert!(sups.iter().all(|&x| x <= 1.0 + 5e-3));
    }

    #[test]
    fn fs_kernel_is_constant() {
        for m in [1, 2] {
            let b = BasisFamily::fs_orthonormal(m, 5).unwrap();
            let d = b.dim() as f64;
            for z in [vec![c(0.3, 0.1); m], vec![c(-2.0, 5.0); m]] {
                let r2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
                let g = b.bergman_gamma(&z).unwrap() * (1.0 + r2).powi(-5);
                assert!((g / d - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for b in [BasisFamily::chebyshev(4).unwrap(), BasisFamily::fs_orthonormal(2, 3).unwrap()] {
            let back = BasisFamily::from_json(&b.to_json().unwrap()).unwrap();
            assert_eq!(back, b);
        }
    }

    #[test]
    fn overflow_free_gamma() {
        let b = BasisFamily::circle_orthonormal(300).unwrap();
        let lg = b.log_bergman_gamma(&[c(1e6, 0.0)]).unwrap();
        assert!((lg / 600.0 - 1e6f64.ln()).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn decomposition_identity(
            seed in 0u64..1_000_000,
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
            n in 1usize..12,
        ) {
            let b = BasisFamily::monomial(1, n).unwrap();
            let mut rng = crate::rng::stream(seed, "decomp", &[]);
            let a = CoefficientVector((0..=n).map(|_| crate::rng::complex_normal(&mut rng)).collect());
            let z = [c(re, im)];
            let (x, y) = log_decompose(&a, &b, &z).unwrap();
            let f = b.combine(&a).unwrap().eval(&z).unwrap();
            let direct = f.norm().ln() / n as f64;
            prop_assert!((x + y - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
        }
    }
}
