use std::path::Path;

use plurizero::compact::TestForm;
use plurizero::config::{load_config, validate_config};
use plurizero::ensembles::{sample_coefficients, CoefficientLaw};
use plurizero::poly::Polynomial;
use plurizero::projective::{fs_section_norm, fs_section_norm_in_chart, to_chart, to_sphere, SectionSpace};
use plurizero::rng::{complex_normal, stream};
use plurizero::zeros::{pairing_root_sum, roots_univariate};
use plurizero::C64;
use proptest::prelude::*;

fn from_roots(roots: &[C64]) -> Polynomial {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    Polynomial::univariate(&c)
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn root_sum_matches_prescribed_roots(roots in prop::collection::vec(complex(), 1..8), c in complex(), r in 0.2f64..1.5) {
        // keep roots apart so clustering does not merge them
        for i in 0..roots.len() {
            for j in 0..i {
                prop_assume!((roots[i] - roots[j]).norm() > 1e-2);
            }
        }
        let phi = TestForm::bump(c, r);
        let z = roots_univariate(&from_roots(&roots)).unwrap();
        let direct: f64 = roots.iter().map(|p| phi.value(&[*p])).sum::<f64>() / roots.len() as f64;
        let got = pairing_root_sum(&z, &phi).unwrap().value;
        prop_assert!((got - direct).abs() < 1e-8, "{} {}", got, direct);
    }

    #[test]
    fn stereographic_image_is_on_the_sphere(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let x = to_sphere(C64::new(re, im));
        prop_assert!((x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn section_norm_is_chart_independent(seed in 0u64..1000, a in complex(), b in complex()) {
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
        let sp = SectionSpace::new(2, 4).unwrap();
        let mut rng = stream(seed, "prop-chart", &[]);
        let s = sample_coefficients(&CoefficientLaw::Gaussian, sp.basis.dim(), &mut rng).unwrap();
        let z = [a, b];
        let v0 = fs_section_norm(&s, &sp, &z).unwrap();
        for chart in 1..=2 {
            let w = to_chart(&z, chart).unwrap();
            let v = fs_section_norm_in_chart(&s, &sp, chart, &w).unwrap();
            prop_assert!((v - v0).abs() <= 1e-9 * v0.max(1e-3));
        }
    }
}

#[test]
fn random_roots_reconstruct_polynomial() {
    let mut rng = stream(1, "reconstruct", &[]);
    let c: Vec<C64> = (0..=30).map(|_| complex_normal(&mut rng)).collect();
    let z = roots_univariate(&Polynomial::univariate(&c)).unwrap();
    let lead = c[30];
    for k in 0..12 {
        let x = C64::from_polar(0.9, k as f64);
        let direct: C64 = c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a);
        let prod: C64 = z.points.iter().zip(&z.multiplicities).fold(lead, |acc, (p, &m)| acc * (x - p[0]).powu(m));
        assert!((direct - prod).norm() <= 1e-8 * direct.norm().max(1.0));
    }
}

#[test]
fn shipped_configs_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let cfg = load_config(&p).unwrap();
        let text = cfg.to_toml().unwrap();
        let again = validate_config(&text).unwrap();
        assert_eq!(cfg, again, "{}", p.display());
        assert_eq!(again.to_toml().unwrap(), text);
    }
}
