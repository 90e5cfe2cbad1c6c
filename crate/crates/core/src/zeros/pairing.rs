use serde::{Deserialize, Serialize};

use super::ZeroSample;
use crate::compact::TestForm;
use crate::poly::{log_abs_eval, Polynomial};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMethod {
    RootSum,
    PoincareLelong,
}

/// `⟨[Ẑ_f], φ⟩` with the `1/nᵏ` normalization applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentPairing {
    pub value: f64,
    pub method: PairingMethod,
    pub normalized: bool,
    /// Change between the lattice and its coarse sublattice (quadrature only).
    pub refinement_change: Option<f64>,
    pub warning: Option<String>,
}

/// `(1/nᵏ) Σ mult · φ(ζ)` over the finite zeros.
pub fn pairing_root_sum(zeros: &ZeroSample, phi: &TestForm) -> Result<CurrentPairing> {
    if zeros.codim != phi.num_vars() {
        return Err(Error::UnsupportedPairing(format!(
            "root sums pair point masses only (codim {} in C^{}); use the Poincaré–Lelong pairing",
            zeros.codim,
            phi.num_vars()
        )));
    }
    if zeros.points.iter().any(|p| p.len() != phi.num_vars()) {
        return Err(Error::DimensionMismatch { expected: phi.num_vars(), got: zeros.num_vars() });
    }
    let terms: Vec<f64> = zeros.points.iter().zip(&zeros.multiplicities).map(|(p, &m)| m as f64 * phi.value(p)).collect();
    let norm = (zeros.source_degree as f64).powi(zeros.codim as i32);
    Ok(CurrentPairing {
        value: crate::stats::pairwise_sum(&terms) / norm,
        method: PairingMethod::RootSum,
        normalized: true,
        refinement_change: None,
        warning: None,
    })
}

/// `(1/n) ∫ log|f| · dd^c φ` by shifted-lattice quadrature.
///
/// In `C²` the form is `φ·ω₀` and the pairing is with the divisor of `f`.
pub fn pairing_poincare_lelong(f: &Polynomial, phi: &TestForm, n: usize) -> Result<CurrentPairing> {
    pairing_poincare_lelong_with(f, phi, n, phi.default_divisions())
}

/// [`pairing_poincare_lelong`] on a lattice of spacing `radius/divisions`.
pub fn pairing_poincare_lelong_with(f: &Polynomial, phi: &TestForm, n: usize, divisions: usize) -> Result<CurrentPairing> {
    if n == 0 {
        return Err(Error::Precondition("degree n must be at least 1".into()));
    }
    if f.num_vars() != phi.num_vars() {
        return Err(Error::DimensionMismatch { expected: phi.num_vars(), got: f.num_vars() });
    }
    if f.is_zero() {
        return Err(Error::Precondition("f vanishes identically".into()));
    }
    let li = if f.num_vars() == 1 {
        let c = f.univariate_coeffs();
        phi.integrate_ddc(|z| log_abs_eval(&c, z[0]), divisions)
    } else {
        phi.integrate_ddc(|z| f.eval(z).map(|v| v.norm().ln()).unwrap_or(f64::NAN), divisions)
    };
    if !li.value.is_finite() {
        return Err(Error::Precondition("log|f| not finite on the quadrature lattice".into()));
    }
    let change = li.refinement_change() / n as f64;
    let warning = (change > 1e-4).then(|| format!("lattice refinement changed the pairing by {change:.2e}"));
    Ok(CurrentPairing {
        value: li.value / n as f64,
        method: PairingMethod::PoincareLelong,
        normalized: true,
        refinement_change: Some(change),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::roots_univariate;
    use crate::C64;

    #[test]
    fn linear_factor_gives_point_value() {
        let phi = TestForm::bump(C64::new(0.1, -0.2), 0.6);
        let f = Polynomial::univariate(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let p = pairing_poincare_lelong(&f, &phi, 1).unwrap();
        assert!((p.value - phi.value(&[C64::new(0.0, 0.0)])).abs() < 1e-4);
        let p = pairing_poincare_lelong_with(&f, &phi, 1, 512).unwrap();
        assert!((p.value - phi.value(&[C64::new(0.0, 0.0)])).abs() < 1e-6);
    }

    #[test]
    fn two_roots_average() {
        let (a, b) = (C64::new(0.3, 0.1), C64::new(-0.2, -0.4));
        let f = Polynomial::univariate(&[a * b, -(a + b), C64::new(1.0, 0.0)]);
        let phi = TestForm::bump(C64::new(0.0, 0.0), 0.9);
        let p = pairing_poincare_lelong_with(&f, &phi, 2, 1024).unwrap();
        let oracle = 0.5 * (phi.value(&[a]) + phi.value(&[b]));
        assert!((p.value - oracle).abs() < 1e-6, "{} {}", p.value, oracle);
        let z = roots_univariate(&f).unwrap();
        assert!((pairing_root_sum(&z, &phi).unwrap().value - oracle).abs() < 1e-14);
    }

    #[test]
    fn constant_is_rejected() {
        let phi = TestForm::bump(C64::new(0.0, 0.0), 0.5);
        let f = Polynomial::univariate(&[C64::new(2.0, 0.0)]);
        assert!(matches!(pairing_poincare_lelong(&f, &phi, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn roots_of_unity_mass() {
        let f = Polynomial::univariate(&[C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let z = roots_univariate(&f).unwrap();
        let phi = TestForm::new(vec![C64::new(0.0, 0.0)], 3.0, crate::compact::Profile::PolynomialBump).unwrap();
        // φ is not ≡ 1 on the circle; compare with (1/3)Σφ(ζ)
        let expect = phi.value(&[C64::new(1.0, 0.0)]);
        assert!((pairing_root_sum(&z, &phi).unwrap().value - expect).abs() < 1e-12);
        let far = TestForm::bump(C64::new(5.0, 5.0), 1.0);
        assert_eq!(pairing_root_sum(&z, &far).unwrap().value, 0.0);
    }
}
