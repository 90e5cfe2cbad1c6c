//! Weighted compacts `(K, q)`, extremal functions and test forms.
//!
//! `dd^c` is normalized as `(i/π)∂∂̄`, so that in one variable it acts as
//! `(1/2π)Δ` and `dd^c log|z|` is the unit point mass at the origin. For
//! `m = 2`, pairings against codimension-one currents use the radial form
//! `χ·ω₀` where `dd^c u ∧ ω₀ = (1/2π)Δu dV`; both cases therefore reduce to
//! integrating against `(1/2π)Δχ` on `R^{2m}`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::poly::{BasisFamily, Normalization, WeightedNodes};
use crate::{Error, Result, C64};

/// Canonical compacts with known discretizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactKind {
    UnitDisk,
    Circle,
    Interval,
    Polydisk,
    UnitBall,
    CustomGrid,
}

impl CompactKind {
    pub fn default_num_vars(self) -> usize {
        match self {
            CompactKind::Polydisk | CompactKind::UnitBall => 2,
            _ => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// weight expressions

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    R2,
    Re,
    Im,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
}

impl Node {
    fn eval(&self, r2: f64, x: f64, y: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::R2 => r2,
            Node::Re => x,
            Node::Im => y,
            Node::Neg(a) => -a.eval(r2, x, y),
            Node::Add(a, b) => a.eval(r2, x, y) + b.eval(r2, x, y),
            Node::Sub(a, b) => a.eval(r2, x, y) - b.eval(r2, x, y),
            Node::Mul(a, b) => a.eval(r2, x, y) * b.eval(r2, x, y),
            Node::Pow(a, k) => a.eval(r2, x, y).powi(*k as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    AbsZ2,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| Error::Config(format!("bad number {text:?} in weight expression")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if c == '|' {
            let rest: String = chars[i..].iter().filter(|c| !c.is_whitespace()).take(6).collect();
            if rest.starts_with("|z|^2") {
                // consume "|z|^2" with any interior whitespace
                let mut seen = 0;
                while seen < 5 {
                    if !chars[i].is_whitespace() {
                        seen += 1;
                    }
                    i += 1;
                }
                out.push(Tok::AbsZ2);
            } else {
                return Err(Error::Config(format!("expected |z|^2 in weight expression {s:?}")));
            }
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Config(format!("unexpected character {c:?} in weight expression {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' { Node::Add(lhs.into(), rhs.into()) } else { Node::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op('*')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Mul(lhs.into(), rhs.into());
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(self.unary()?.into()))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.bump() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 => {
                    return Ok(Node::Pow(base.into(), v as u32));
                }
                _ => return Err(Error::Config("exponent must be a non-negative integer ≤ 64".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::AbsZ2) => Ok(Node::R2),
            Some(Tok::Ident(name)) => match name.as_str() {
                "r2" => Ok(Node::R2),
                "x" | "re" => Ok(Node::Re),
                "y" | "im" => Ok(Node::Im),
                _ => Err(Error::Config(format!("unknown variable {name:?} (use r2, |z|^2, x, re, y, im)"))),
            },
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::Op(')')) => Ok(e),
                    _ => Err(Error::Config("unbalanced parenthesis in weight expression".into())),
                }
            }
            Some(t) => Err(Error::Config(format!("unexpected token {t:?} in weight expression"))),
            None => Err(Error::Config("weight expression ended early".into())),
        }
    }
}

/// Polynomial weight in `r2 = ‖z‖²`, `x = Re z₁`, `y = Im z₁`.
#[derive(Debug, Clone)]
pub struct WeightExpr {
    source: String,
    ast: Node,
}

impl PartialEq for WeightExpr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl WeightExpr {
    pub fn parse(source: &str) -> Result<Self> {
        let toks = tokenize(source)?;
        if toks.is_empty() {
            return Err(Error::Config("empty weight expression".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let ast = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Config(format!("trailing input in weight expression {source:?}")));
        }
        Ok(Self { source: source.trim().to_string(), ast })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, z: &[C64]) -> f64 {
        let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        self.ast.eval(r2, z[0].re, z[0].im)
    }
}

/// The weight `q` of a weighted compact.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Weight {
    #[default]
    Zero,
    Expr(WeightExpr),
    /// `q(z) = ½ log(1 + ‖z‖²)`, the Fubini–Study potential in the affine chart.
    FubiniStudy,
}

impl Weight {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "" | "0" | "0.0" | "zero" => Ok(Weight::Zero),
            "fubini_study" | "fs" => Ok(Weight::FubiniStudy),
            other => Ok(Weight::Expr(WeightExpr::parse(other)?)),
        }
    }

    pub fn eval(&self, z: &[C64]) -> f64 {
        match self {
            Weight::Zero => 0.0,
            Weight::Expr(e) => e.eval(z),
            Weight::FubiniStudy => 0.5 * (z.iter().map(|c| c.norm_sqr()).sum::<f64>()).ln_1p(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Weight::Zero)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Zero => f.write_str("0"),
            Weight::Expr(e) => f.write_str(e.source()),
            Weight::FubiniStudy => f.write_str("fubini_study"),
        }
    }
}

impl TryFrom<String> for Weight {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Weight::parse(&s)
    }
}

impl From<Weight> for String {
    fn from(w: Weight) -> String {
        w.to_string()
    }
}

// ---------------------------------------------------------------------------
// compacts

/// A compact `K ⊂ C^m` with weight `q` and its discretizations.
#[derive(Debug, Clone)]
pub struct WeightedCompact {
    kind: CompactKind,
    num_vars: usize,
    weight: Weight,
    resolution: usize,
    boundary: WeightedNodes,
    area: Option<WeightedNodes>,
    sup_grid: Vec<Vec<C64>>,
}

fn circle_nodes(count: usize, radius: f64) -> Vec<C64> {
    (0..count).map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / count as f64)).collect()
}

fn disk_area_nodes(radial: usize, angular: usize) -> WeightedNodes {
    let mut points = Vec::with_capacity(radial * angular);
    let mut weights = Vec::with_capacity(radial * angular);
    let dr = 1.0 / radial as f64;
    let dt = 2.0 * PI / angular as f64;
    for i in 0..radial {
        let r = (i as f64 + 0.5) * dr;
        for k in 0..angular {
            // half-step angular stagger between rings
            let t = (k as f64 + 0.5 * (i % 2) as f64) * dt;
            points.push(vec![C64::from_polar(r, t)]);
            weights.push(r * dr * dt);
        }
    }
    WeightedNodes { points, weights }
}

impl WeightedCompact {
    /// Canonical compact with the default resolution (512 boundary points in
    /// one variable, a 64×64 torus grid in two).
    pub fn new(kind: CompactKind) -> Result<Self> {
        Self::with_resolution(kind, 512)
    }

    /// Canonical compact discretized with `resolution` boundary points in one
    /// variable (and `resolution/8` points per torus circle in two).
    pub fn with_resolution(kind: CompactKind, resolution: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::InvalidParameter("grid resolution must be at least 16".into()));
        }
        let (boundary, area, sup_grid) = match kind {
            CompactKind::Circle | CompactKind::UnitDisk => {
                let pts = circle_nodes(resolution, 1.0);
                let boundary =
                    WeightedNodes { points: pts.iter().map(|&z| vec![z]).collect(), weights: vec![1.0 / resolution as f64; resolution] };
                let mut sup: Vec<Vec<C64>> = boundary.points.clone();
                let area = if kind == CompactKind::UnitDisk {
                    let a = disk_area_nodes(resolution / 8, resolution / 4);
                    sup.push(vec![C64::new(0.0, 0.0)]);
                    sup.extend(a.points.iter().cloned());
                    Some(a)
                } else {
                    None
                };
                (boundary, area, sup)
            }
            CompactKind::Interval => {
                // Gauss–Chebyshev nodes carry the arcsine measure; the sup grid
                // uses Chebyshev–Lobatto points, endpoints included.
                let nq = resolution;
                let boundary = WeightedNodes {
                    points: (1..=nq).map(|k| vec![C64::new(((2 * k - 1) as f64 * PI / (2 * nq) as f64).cos(), 0.0)]).collect(),
                    weights: vec![1.0 / nq as f64; nq],
                };
                let sup = (0..=nq).map(|k| vec![C64::new((k as f64 * PI / nq as f64).cos(), 0.0)]).collect();
                (boundary, None, sup)
            }
            CompactKind::Polydisk => {
                let k = (resolution / 8).max(8);
                let c = circle_nodes(k, 1.0);
                let mut points = Vec::with_capacity(k * k);
                for &a in &c {
                    for &b in &c {
                        points.push(vec![a, b]);
                    }
                }
                let boundary = WeightedNodes { weights: vec![1.0 / (k * k) as f64; k * k], points };
                let d = disk_area_nodes(8, 16);
                let mut ap = Vec::with_capacity(d.points.len().pow(2));
                let mut aw = Vec::with_capacity(d.points.len().pow(2));
                for (p, wp) in d.points.iter().zip(&d.weights) {
                    for (q, wq) in d.points.iter().zip(&d.weights) {
                        ap.push(vec![p[0], q[0]]);
                        aw.push(wp * wq);
                    }
                }
                let area = WeightedNodes { points: ap, weights: aw };
                let mut sup = boundary.points.clone();
                sup.extend(area.points.iter().cloned());
                (boundary, Some(area), sup)
            }
            CompactKind::UnitBall => {
                // z₁ = cos θ e^{iα}, z₂ = sin θ e^{iβ}; uniform measure on S³ has
                // density ∝ cos θ sin θ in θ ∈ [0, π/2].
                let k = (resolution / 16).max(8);
                let nt = k / 2;
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for i in 0..nt {
                    let th = (i as f64 + 0.5) * 0.5 * PI / nt as f64;
                    let w = th.sin() * th.cos();
                    for a in 0..k {
                        for b in 0..k {
                            let al = 2.0 * PI * a as f64 / k as f64;
                            let be = 2.0 * PI * (b as f64 + 0.5 * (i % 2) as f64) / k as f64;
                            points.push(vec![C64::from_polar(th.cos(), al), C64::from_polar(th.sin(), be)]);
                            weights.push(w);
                        }
                    }
                }
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
                let boundary = WeightedNodes { points, weights };
                let mut sup = boundary.points.clone();
                for i in 1..8 {
                    let s = i as f64 / 8.0;
                    for p in boundary.points.iter().step_by(7) {
                        sup.push(vec![p[0] * s, p[1] * s]);
                    }
                }
                (boundary, None, sup)
            }
            CompactKind::CustomGrid => return Err(Error::InvalidParameter("custom grids are built with WeightedCompact::custom".into())),
        };
        Ok(Self { kind, num_vars: kind.default_num_vars(), weight: Weight::Zero, resolution, boundary, area, sup_grid })
    }

    /// User-supplied grid; the nodes double as the sup grid.
    pub fn custom(nodes: WeightedNodes) -> Result<Self> {
        let m = nodes.points.first().map(Vec::len).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
        if nodes.points.len() != nodes.weights.len() {
            return Err(Error::DimensionMismatch { expected: nodes.points.len(), got: nodes.weights.len() });
        }
        if nodes.points.iter().any(|p| p.len() != m) {
            return Err(Error::InvalidParameter("grid points of mixed dimension".into()));
        }
        if nodes.weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter("quadrature weights must be positive".into()));
        }
        Ok(Self {
            kind: CompactKind::CustomGrid,
            num_vars: m,
            weight: Weight::Zero,
            resolution: nodes.points.len(),
            sup_grid: nodes.points.clone(),
            boundary: nodes,
            area: None,
        })
    }

    pub fn with_weight(mut self, weight: Weight) -> Result<Self> {
        if let Some(z) = self.sup_grid.iter().find(|z| !weight.eval(z).is_finite()) {
            return Err(Error::InvalidParameter(format!("weight not finite at grid node {z:?}")));
        }
        self.weight = weight;
        Ok(self)
    }

    /// Same compact and weight on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if self.kind == CompactKind::CustomGrid {
            return Ok(self.clone());
        }
        Self::with_resolution(self.kind, self.resolution * factor)?.with_weight(self.weight.clone())
    }

    pub fn kind(&self) -> CompactKind {
        self.kind
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn weight_at(&self, z: &[C64]) -> f64 {
        self.weight.eval(z)
    }

    pub fn boundary(&self) -> &WeightedNodes {
        &self.boundary
    }

    pub fn area(&self) -> Option<&WeightedNodes> {
        self.area.as_ref()
    }

    /// Nodes used for sup-norm estimates.
    pub fn sup_nodes(&self) -> impl Iterator<Item = &[C64]> + '_ {
        self.sup_grid.iter().map(Vec::as_slice)
    }

    /// Membership test for the canonical kinds (grid nodes for custom grids).
    pub fn contains(&self, z: &[C64]) -> bool {
        const TOL: f64 = 1e-12;
        match self.kind {
            CompactKind::UnitDisk => z[0].norm() <= 1.0 + TOL,
            CompactKind::Circle => (z[0].norm() - 1.0).abs() <= TOL,
            CompactKind::Interval => z[0].im.abs() <= TOL && z[0].re.abs() <= 1.0 + TOL,
            CompactKind::Polydisk => z.iter().all(|c| c.norm() <= 1.0 + TOL),
            CompactKind::UnitBall => z.iter().map(|c| c.norm_sqr()).sum::<f64>() <= 1.0 + TOL,
            CompactKind::CustomGrid => self.sup_grid.iter().any(|p| p.iter().zip(z).all(|(a, b)| (a - b).norm() <= TOL)),
        }
    }
}

// ---------------------------------------------------------------------------
// extremal functions

/// How an [`ExtremalFunction`] is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum ExtremalSource {
    Analytic { kind: CompactKind, weight: String },
    BergmanNumeric { degree: usize },
    Custom,
}

type Evaluator = Arc<dyn Fn(&[C64]) -> f64 + Send + Sync>;

/// The weighted extremal function `V_{K,q}` or a numerical proxy for it.
#[derive(Clone)]
pub struct ExtremalFunction {
    source: ExtremalSource,
    num_vars: usize,
    eval: Evaluator,
}

impl fmt::Debug for ExtremalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtremalFunction").field("source", &self.source).field("num_vars", &self.num_vars).finish()
    }
}

impl ExtremalFunction {
    /// Closed-form `V_{K,q}`; see [`extremal_analytic`].
    pub fn analytic(kq: &WeightedCompact) -> Result<Self> {
        let kind = kq.kind();
        let weight = kq.weight().clone();
        // probe once so unsupported combinations fail here
        extremal_analytic(kq, &vec![C64::new(0.0, 0.0); kq.num_vars()])?;
        let kq2 = kq.clone();
        Ok(Self {
            source: ExtremalSource::Analytic { kind, weight: weight.to_string() },
            num_vars: kq.num_vars(),
            eval: Arc::new(move |z| extremal_analytic(&kq2, z).unwrap_or(f64::NAN)),
        })
    }

    /// `(1/2n) log Γₙ` for the given basis.
    pub fn numeric(basis: BasisFamily) -> Self {
        let n = basis.degree();
        Self {
            source: ExtremalSource::BergmanNumeric { degree: n },
            num_vars: basis.num_vars(),
            eval: Arc::new(move |z| basis.log_bergman_gamma(z).map(|g| g / (2.0 * n as f64)).unwrap_or(f64::NAN)),
        }
    }

    pub fn custom<F>(num_vars: usize, f: F) -> Self
    where
        F: Fn(&[C64]) -> f64 + Send + Sync + 'static,
    {
        Self { source: ExtremalSource::Custom, num_vars, eval: Arc::new(f) }
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::custom(num_vars, |_| 0.0)
    }

    pub fn source(&self) -> &ExtremalSource {
        &self.source
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn eval(&self, z: &[C64]) -> f64 {
        (self.eval)(z)
    }

    /// `V(t·u) − log t` at `t ∈ {10³, 10⁶}` along the ray through `u`.
    pub fn lelong_defects(&self, direction: &[C64]) -> [f64; 2] {
        let norm = direction.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        [1e3, 1e6].map(|t| {
            let z: Vec<C64> = direction.iter().map(|c| c * (t / norm)).collect();
            self.eval(&z) - t.ln()
        })
    }
}

/// Green function of `[-1, 1]`: `log|z + √(z²−1)|` on the branch with modulus ≥ 1.
fn interval_green(z: C64) -> f64 {
    let s = (z * z - 1.0).sqrt();
    let a = (z + s).norm();
    let b = (z - s).norm();
    a.max(b).ln().max(0.0)
}

/// Closed-form `V_{K,q}` for the canonical compacts.
///
/// Supported: `q = 0` on the disk, circle, interval, polydisk and ball, and the
/// Fubini–Study weight on the disk and ball, where
/// `V = max(½ log(1+‖z‖²), log‖z‖ + ½ log 2)`.
pub fn extremal_analytic(kq: &WeightedCompact, z: &[C64]) -> Result<f64> {
    if z.len() != kq.num_vars() {
        return Err(Error::DimensionMismatch { expected: kq.num_vars(), got: z.len() });
    }
    let norm = || z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    match (kq.weight(), kq.kind()) {
        (Weight::Zero, CompactKind::UnitDisk | CompactKind::Circle) => Ok(z[0].norm().ln().max(0.0)),
        (Weight::Zero, CompactKind::Interval) => Ok(interval_green(z[0])),
        (Weight::Zero, CompactKind::Polydisk) => Ok(z.iter().map(|c| c.norm().ln().max(0.0)).fold(0.0, f64::max)),
        (Weight::Zero, CompactKind::UnitBall) => Ok(norm().ln().max(0.0)),
        (Weight::FubiniStudy, CompactKind::UnitDisk | CompactKind::UnitBall) => {
            let r = norm();
            Ok((0.5 * (r * r).ln_1p()).max(r.ln() + 0.5 * LN_2))
        }
        (w, k) => Err(Error::NoClosedForm(format!("kind {k:?} with weight {w}"))),
    }
}

/// `(1/2n) log Γₙ(z)`, converging to `V_{K,q}` for sup-normalized bases and
/// for orthonormal bases of a Bernstein–Markov measure. The error away from
/// `∂K` is of order `(log dₙ)/(2n)`.
pub fn extremal_numeric(kq: &WeightedCompact, basis: &BasisFamily, z: &[C64]) -> Result<f64> {
    if basis.num_vars() != kq.num_vars() {
        return Err(Error::DimensionMismatch { expected: kq.num_vars(), got: basis.num_vars() });
    }
    if basis.normalization() == Normalization::Raw {
        return Err(Error::Precondition("basis must be sup-normalized or orthonormal".into()));
    }
    let n = basis.degree();
    if n == 0 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let lg = basis.log_bergman_gamma(z)?;
    if lg == f64::NEG_INFINITY {
        return Err(Error::DegeneratePoint { gamma: 0.0 });
    }
    Ok(lg / (2.0 * n as f64))
}

// ---------------------------------------------------------------------------
// test forms

/// Radial profile of a [`TestForm`] as a function of `t = ‖z − c‖/r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `exp(1 − 1/(1 − t²))`.
    SmoothBump,
    /// `(1 − t²)⁴`.
    PolynomialBump,
}

const POLY_BUMP_POWER: i32 = 4;

impl Profile {
    /// `(g(t), g'(t)/t, g''(t))` for `0 ≤ t < 1`.
    fn jet(self, t: f64) -> (f64, f64, f64) {
        let s = 1.0 - t * t;
        if s <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        match self {
            Profile::SmoothBump => {
                let g = (1.0 - 1.0 / s).exp();
                if g == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let s2 = s * s;
                let g1t = -2.0 * g / s2;
                let g2 = -2.0 * g / s2 + 4.0 * t * t * g / (s2 * s2) - 8.0 * t * t * g / (s2 * s);
                (g, g1t, g2)
            }
            Profile::PolynomialBump => {
                let k = POLY_BUMP_POWER;
                let kf = k as f64;
                let g = s.powi(k);
                let g1t = -2.0 * kf * s.powi(k - 1);
                let g2 = g1t + 4.0 * kf * (kf - 1.0) * t * t * s.powi(k - 2);
                (g, g1t, g2)
            }
        }
    }
}

/// Radial test function `χ(z) = A·g(‖z − c‖/r)` on `C^m`, `m ∈ {1, 2}`.
///
/// For `m = 1` it is the (0,0)-form paired with zero sets of points and the
/// potential of the (1,1)-form `dd^c χ`; for `m = 2` it stands for the
/// (1,1)-form `χ·ω₀` paired with zero divisors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestForm {
    pub center: Vec<C64>,
    pub radius: f64,
    pub profile: Profile,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(skip)]
    c_phi: OnceLock<f64>,
}

fn one() -> f64 {
    1.0
}

impl PartialEq for TestForm {
    fn eq(&self, o: &Self) -> bool {
        self.center == o.center && self.radius == o.radius && self.profile == o.profile && self.amplitude == o.amplitude
    }
}

/// Result of integrating a function against `dd^c χ` on a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeIntegral {
    pub value: f64,
    /// Same sum on the sublattice of twice the spacing.
    pub coarse: f64,
}

impl LatticeIntegral {
    pub fn refinement_change(&self) -> f64 {
        (self.value - self.coarse).abs()
    }
}

/// Fractional lattice offsets; irrational so nodes avoid algebraic points.
const JITTER: [f64; 4] = [0.207_106_781_186_547_5, 0.366_025_403_784_438_6, 0.118_033_988_749_894_9, 0.322_875_655_532_295_3];

impl TestForm {
    pub fn new(center: Vec<C64>, radius: f64, profile: Profile) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("test form radius must be positive, got {radius}")));
        }
        if center.is_empty() || center.len() > 2 {
            return Err(Error::InvalidParameter("test forms are implemented for m ∈ {1, 2}".into()));
        }
        Ok(Self { center, radius, profile, amplitude: 1.0, c_phi: OnceLock::new() })
    }

    pub fn bump(center: C64, radius: f64) -> Self {
        Self::new(vec![center], radius, Profile::SmoothBump).expect("valid bump")
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self.c_phi = OnceLock::new();
        self
    }

    pub fn num_vars(&self) -> usize {
        self.center.len()
    }

    fn real_dim(&self) -> usize {
        2 * self.center.len()
    }

    fn t_of(&self, z: &[C64]) -> f64 {
        z.iter().zip(&self.center).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() / self.radius
    }

    pub fn value(&self, z: &[C64]) -> f64 {
        let t = self.t_of(z);
        if t >= 1.0 {
            return 0.0;
        }
        self.amplitude * self.profile.jet(t).0
    }

    /// Euclidean Laplacian on `R^{2m}`, in closed form.
    pub fn laplacian(&self, z: &[C64]) -> f64 {
        self.laplacian_at_t(self.t_of(z))
    }

    fn laplacian_at_t(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        let (_, g1t, g2) = self.profile.jet(t);
        let dim = self.real_dim() as f64;
        self.amplitude * (g2 + (dim - 1.0) * g1t) / (self.radius * self.radius)
    }

    /// Density of `dd^c χ`, i.e. `(1/2π)Δχ`.
    pub fn ddc_density(&self, z: &[C64]) -> f64 {
        self.laplacian(z) / (2.0 * PI)
    }

    /// Central-difference Laplacian with `2·(2m) + 1` points (5 in `C`, 9 in `C²`).
    pub fn laplacian_stencil(&self, z: &[C64], h: f64) -> f64 {
        let f0 = self.value(z);
        let mut acc = 0.0;
        let mut w = z.to_vec();
        for i in 0..z.len() {
            for dir in [C64::new(h, 0.0), C64::new(0.0, h)] {
                w[i] = z[i] + dir;
                acc += self.value(&w);
                w[i] = z[i] - dir;
                acc += self.value(&w);
                w[i] = z[i];
            }
        }
        (acc - 2.0 * self.real_dim() as f64 * f0) / (h * h)
    }

    /// Euclidean volume of the support ball in `R^{2m}`.
    pub fn support_volume(&self) -> f64 {
        let r = self.radius;
        match self.num_vars() {
            1 => PI * r * r,
            _ => 0.5 * PI * PI * r.powi(4),
        }
    }

    /// `C_φ`: grid sup of `|(1/2π)Δχ|` times the support volume. Cached.
    pub fn c_phi(&self) -> f64 {
        *self.c_phi.get_or_init(|| self.c_phi_on_grid(8192))
    }

    /// `C_φ` on a radial grid of `points` nodes (uncached).
    pub fn c_phi_on_grid(&self, points: usize) -> f64 {
        let sup = (0..points).map(|i| self.laplacian_at_t(i as f64 / points as f64).abs()).fold(0.0, f64::max);
        sup / (2.0 * PI) * self.support_volume()
    }

    /// `∫ f · dd^c χ` over `R^{2m}` by a shifted lattice of spacing
    /// `radius/divisions`; also reports the estimate on the sublattice of
    /// twice the spacing.
    ///
    /// The integrand is smooth except for logarithmic or Lipschitz
    /// singularities of `f`; the offset keeps nodes off lattice-aligned sets.
    pub fn integrate_ddc<F>(&self, f: F, divisions: usize) -> LatticeIntegral
    where
        F: Fn(&[C64]) -> f64,
    {
        let dim = self.real_dim();
        let h = self.radius / divisions as f64;
        let half = divisions as i64 + 1;
        let offs: Vec<f64> = JITTER[..dim].iter().map(|j| j * h).collect();
        let mut fine = Vec::new();
        let mut coarse = Vec::new();
        let mut idx = vec![-half; dim];
        let mut x = vec![0.0; dim];
        let mut z = vec![C64::new(0.0, 0.0); dim / 2];
        loop {
            let mut r2 = 0.0;
            for d in 0..dim {
                x[d] = idx[d] as f64 * h + offs[d];
                r2 += x[d] * x[d];
            }
            let t = r2.sqrt() / self.radius;
            if t < 1.0 {
                let w = self.laplacian_at_t(t);
                if w != 0.0 {
                    for (k, zk) in z.iter_mut().enumerate() {
                        *zk = self.center[k] + C64::new(x[2 * k], x[2 * k + 1]);
                    }
                    let term = f(&z) * w;
                    fine.push(term);
                    if idx.iter().all(|i| i.rem_euclid(2) == 0) {
                        coarse.push(term);
                    }
                }
            }
            // odometer over the cube [-half, half]^dim
            let mut d = 0;
            loop {
                if d == dim {
                    let vol = h.powi(dim as i32) / (2.0 * PI);
                    return LatticeIntegral {
                        value: crate::stats::pairwise_sum(&fine) * vol,
                        coarse: crate::stats::pairwise_sum(&coarse) * vol * (1u64 << dim) as f64,
                    };
                }
                idx[d] += 1;
                if idx[d] <= half {
                    break;
                }
                idx[d] = -half;
                d += 1;
            }
        }
    }

    /// Default lattice divisions: `r/128` in `C`, `r/16` in `C²`.
    pub fn default_divisions(&self) -> usize {
        if self.num_vars() == 1 {
            128
        } else {
            16
        }
    }

    /// `∫ dd^c χ` over the plane; zero up to quadrature error.
    pub fn total_ddc_mass(&self) -> f64 {
        self.integrate_ddc(|_| 1.0, self.default_divisions()).value
    }
}

/// Outcome of an equilibrium pairing with the refinement diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPairing {
    pub value: f64,
    pub refinement_change: f64,
    pub warning: Option<String>,
}

/// `⟨dd^c V, φ⟩ = ∫ V · dd^c φ` by lattice quadrature.
pub fn equilibrium_pairing(v: &ExtremalFunction, phi: &TestForm) -> Result<EquilibriumPairing> {
    if v.num_vars() != phi.num_vars() {
        return Err(Error::DimensionMismatch { expected: phi.num_vars(), got: v.num_vars() });
    }
    let li = phi.integrate_ddc(|z| v.eval(z), phi.default_divisions() * 2);
    let change = li.refinement_change();
    let tol = 1e-4 * (1.0 + phi.c_phi());
    let warning = (change > tol).then(|| format!("lattice refinement changed the pairing by {change:.2e}"));
    if !li.value.is_finite() {
        return Err(Error::Precondition("extremal function not finite on the test form's support".into()));
    }
    Ok(EquilibriumPairing { value: li.value, refinement_change: change, warning })
}

/// `C_φ` of the form (cached on first use).
pub fn c_phi_norm(phi: &TestForm) -> f64 {
    phi.c_phi()
}

/// Average of `φ` over the unit circle (normalized arclength).
pub fn circle_average(phi: &TestForm) -> f64 {
    let n = 4096;
    let s: Vec<f64> = circle_nodes(n, 1.0).into_iter().map(|z| phi.value(&[z])).collect();
    crate::stats::pairwise_sum(&s) / n as f64
}

/// `∫ φ dμ` for the arcsine law `dx/(π√(1−x²))` on `[-1, 1]`.
pub fn arcsine_average(phi: &TestForm) -> f64 {
    let n = 4096;
    let s: Vec<f64> = (1..=n).map(|k| phi.value(&[C64::new(((2 * k - 1) as f64 * PI / (2 * n) as f64).cos(), 0.0)])).collect();
    crate::stats::pairwise_sum(&s) / n as f64
}

/// Pairing of the equilibrium current with `φ`, by the known equilibrium
/// measure when there is one, by lattice quadrature otherwise.
pub fn equilibrium_target(kq: &WeightedCompact, phi: &TestForm) -> Result<f64> {
    if kq.weight().is_zero() && phi.num_vars() == 1 {
        match kq.kind() {
            CompactKind::UnitDisk | CompactKind::Circle => return Ok(circle_average(phi)),
            CompactKind::Interval => return Ok(arcsine_average(phi)),
            _ => {}
        }
    }
    let v = ExtremalFunction::analytic(kq)?;
    Ok(equilibrium_pairing(&v, phi)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1(re: f64, im: f64) -> Vec<C64> {
        vec![C64::new(re, im)]
    }

    #[test]
    fn weight_grammar() {
        let w = Weight::parse("0.5*r2 - (x^2 + 2*y)").unwrap();
        let z = z1(1.0, 2.0);
        assert!((w.eval(&z) - (0.5 * 5.0 - (1.0 + 4.0))).abs() < 1e-15);
        let w = Weight::parse("|z|^2 + 1e-1").unwrap();
        assert!((w.eval(&z) - 5.1).abs() < 1e-15);
        assert!(Weight::parse("sin(x)").is_err());
        assert!(Weight::parse("x^-1").is_err());
        assert!(Weight::parse("(x").is_err());
        assert_eq!(Weight::parse("0").unwrap(), Weight::Zero);
    }

    #[test]
    fn analytic_values() {
        let disk = WeightedCompact::new(CompactKind::UnitDisk).unwrap();
        assert!((extremal_analytic(&disk, &z1(2.0, 0.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(extremal_analytic(&disk, &z1(0.5, 0.0)).unwrap(), 0.0);
        let int = WeightedCompact::new(CompactKind::Interval).unwrap();
        assert!(extremal_analytic(&int, &z1(1.0, 0.0)).unwrap().abs() < 1e-12);
        assert!(extremal_analytic(&int, &z1(0.3, 0.0)).unwrap().abs() < 1e-12);
        // real axis beyond the interval: log(x + √(x²−1))
        let x: f64 = 2.0;
        assert!((extremal_analytic(&int, &z1(-x, 0.0)).unwrap() - (x + (x * x - 1.0).sqrt()).ln()).abs() < 1e-14);
        let fs = WeightedCompact::new(CompactKind::UnitDisk).unwrap().with_weight(Weight::FubiniStudy).unwrap();
        assert!((extremal_analytic(&fs, &z1(2.0, 0.0)).unwrap() - 1.5 * LN_2).abs() < 1e-14);
    }

    #[test]
    fn weighted_expression_has_no_closed_form() {
        let kq = WeightedCompact::new(CompactKind::UnitDisk).unwrap().with_weight(Weight::parse("r2").unwrap()).unwrap();
        assert!(matches!(extremal_analytic(&kq, &z1(0.0, 0.0)), Err(Error::NoClosedForm(_))));
    }

    #[test]
    fn lelong_class() {
        for kind in [CompactKind::UnitDisk, CompactKind::Interval] {
            let v = ExtremalFunction::analytic(&WeightedCompact::new(kind).unwrap()).unwrap();
            let [a, b] = v.lelong_defects(&[C64::new(0.6, 0.8)]);
            assert!((a - b).abs() < 1e-6, "{kind:?}: {a} {b}");
        }
    }

    #[test]
    fn stencil_agrees_with_closed_form() {
        for profile in [Profile::SmoothBump, Profile::PolynomialBump] {
            let phi = TestForm::new(vec![C64::new(0.3, -0.2)], 0.8, profile).unwrap();
            for z in [z1(0.3, -0.2), z1(0.5, 0.1), z1(0.0, -0.5)] {
                let exact = phi.laplacian(&z);
                let approx = phi.laplacian_stencil(&z, 1e-3);
                assert!((exact - approx).abs() < 1e-4 * (1.0 + exact.abs()), "{exact} {approx}");
            }
            let phi2 = TestForm::new(vec![C64::new(0.1, 0.0), C64::new(0.0, 0.2)], 0.9, profile).unwrap();
            let z = vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.4)];
            let exact = phi2.laplacian(&z);
            assert!((exact - phi2.laplacian_stencil(&z, 1e-3)).abs() < 1e-4 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn ddc_integrates_to_zero() {
        let phi = TestForm::bump(C64::new(0.2, 0.1), 1.0);
        assert!(phi.total_ddc_mass().abs() <= 1e-6 * phi.c_phi());
    }

    #[test]
    fn ddc_of_log_is_point_mass() {
        let phi = TestForm::bump(C64::new(0.0, 0.0), 0.7);
        let li = phi.integrate_ddc(|z| z[0].norm().ln(), 128);
        assert!((li.value - 1.0).abs() < 1e-5, "{}", li.value);
    }

    #[test]
    fn c_phi_linear_and_stable() {
        let phi = TestForm::bump(C64::new(0.0, 0.0), 1.0);
        let c = c_phi_norm(&phi);
        assert!(c > 0.0 && c.is_finite());
        assert!((phi.clone().with_amplitude(2.0).c_phi() - 2.0 * c).abs() < 1e-12 * c);
        assert!((phi.c_phi_on_grid(16384) - c).abs() < 1e-3 * c);
        assert_eq!(phi.clone().with_amplitude(0.0).c_phi(), 0.0);
    }

    #[test]
    fn disk_equilibrium_is_circle_average() {
        let disk = WeightedCompact::new(CompactKind::UnitDisk).unwrap();
        let v = ExtremalFunction::analytic(&disk).unwrap();
        let phi = TestForm::bump(C64::new(0.4, 0.2), 1.1);
        let p = equilibrium_pairing(&v, &phi).unwrap();
        assert!((p.value - circle_average(&phi)).abs() < 1e-4, "{} {}", p.value, circle_average(&phi));
        let inner = TestForm::bump(C64::new(0.0, 0.0), 0.5);
        assert!(equilibrium_pairing(&v, &inner).unwrap().value.abs() < 1e-12);
    }
}
