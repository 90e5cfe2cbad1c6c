//! Browser bindings: sample zeros, compare `(1/2n) log Γₙ` with the extremal
//! function, and scatter zeros of random sections on the sphere.

use plurizero::compact::{extremal_analytic, CompactKind, WeightedCompact};
use plurizero::ensembles::{sample_coefficients, CoefficientLaw};
use plurizero::poly::{BasisFamily, CoefficientVector};
use plurizero::projective::{cap_dictionary, to_sphere, zero_locus_cp, SectionSpace, SectionSystem};
use plurizero::rng::stream;
use plurizero::zeros::roots_with_degree;
use plurizero::C64;
use wasm_bindgen::prelude::*;

fn js_err(e: plurizero::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn law(name: &str, gamma: f64) -> Result<CoefficientLaw, JsValue> {
    match name {
        "gaussian" => Ok(CoefficientLaw::Gaussian),
        "fubini_study" => Ok(CoefficientLaw::FubiniStudy),
        "heavy_tail" => CoefficientLaw::heavy_tail(gamma, 1, Some(1.0)).map_err(js_err),
        other => Err(JsValue::from_str(&format!("unknown law {other}"))),
    }
}

fn draw(law: &CoefficientLaw, dim: usize, seed: u64, key: &[u64]) -> Result<CoefficientVector, JsValue> {
    let mut rng = stream(seed, "web", key);
    sample_coefficients(law, dim, &mut rng).map_err(js_err)
}

/// Zeros of `Σ aⱼ zʲ` with i.i.d. coefficients, as `[re₀, im₀, re₁, im₁, …]`.
#[wasm_bindgen]
pub fn zeros_sample(law_name: &str, gamma: f64, n: usize, seed: u64) -> Result<Vec<f64>, JsValue> {
    if n == 0 || n > 2000 {
        return Err(JsValue::from_str("degree must be in 1..=2000"));
    }
    let l = law(law_name, gamma)?;
    let a = draw(&l, n + 1, seed, &[n as u64])?;
    let z = roots_with_degree(&a.0, n).map_err(js_err)?;
    let mut out = Vec::with_capacity(2 * n);
    for (p, &k) in z.points.iter().zip(&z.multiplicities) {
        for _ in 0..k {
            out.push(p[0].re);
            out.push(p[0].im);
        }
    }
    Ok(out)
}

/// `(1/2n) log Γₙ` along the positive real axis against `V_K`, as rows
/// `[r, approximation, limit]`. `kind` is `disk` (circle-orthonormal basis)
/// or `interval` (Chebyshev basis on `[−1, 1]`).
#[wasm_bindgen]
pub fn extremal_profile(kind: &str, n: usize, r_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    let (basis, compact) = match kind {
        "disk" => (BasisFamily::circle_orthonormal(n), CompactKind::UnitDisk),
        "interval" => (BasisFamily::chebyshev(n), CompactKind::Interval),
        other => return Err(JsValue::from_str(&format!("unknown compact {other}"))),
    };
    let basis = basis.map_err(js_err)?;
    let kq = WeightedCompact::new(compact).map_err(js_err)?;
    let points = points.clamp(2, 4000);
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let r = r_max * i as f64 / (points - 1) as f64;
        // off the real axis slightly so the interval's extremal function is not 0 everywhere
        let z = if kind == "interval" { [C64::new(0.0, r)] } else { [C64::new(r, 0.0)] };
        let v = basis.log_bergman_gamma(&z).map_err(js_err)? / (2.0 * n as f64);
        out.extend([r, v, extremal_analytic(&kq, &z).map_err(js_err)?]);
    }
    Ok(out)
}

/// Zeros of a random Fubini–Study section of `O(n)` on the sphere: flat
/// `[x, y, z, …]` followed by the 16 cap masses and their FS areas.
#[wasm_bindgen]
pub fn sphere_zeros(n: usize, seed: u64) -> Result<Vec<f64>, JsValue> {
    if n == 0 || n > 1000 {
        return Err(JsValue::from_str("degree must be in 1..=1000"));
    }
    let space = SectionSpace::new(1, n).map_err(js_err)?;
    let sys = SectionSystem::draw(&CoefficientLaw::Gaussian, &space, 1, seed, &[n as u64]).map_err(js_err)?;
    let z = zero_locus_cp(&sys, &space).map_err(js_err)?;
    let mut pts: Vec<[f64; 3]> = Vec::with_capacity(n);
    for (p, &k) in z.affine.points.iter().zip(&z.affine.multiplicities) {
        pts.extend(std::iter::repeat_n(to_sphere(p[0]), k as usize));
    }
    pts.extend(std::iter::repeat_n([0.0, 0.0, 1.0], z.at_infinity as usize));
    let mut out: Vec<f64> = pts.iter().flatten().copied().collect();
    for cap in cap_dictionary() {
        let inside = pts.iter().filter(|x| cap.contains(x)).count();
        out.push(inside as f64 / n as f64);
        out.push(cap.area());
    }
    Ok(out)
}
