use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmoyal_core::moyal::{bracket_kappa, poisson};
use qmoyal_core::qdiff::{
    dq2, dq2_symbolic, nabla_check, nabla_check_symbolic, nabla_hat, nabla_hat_symbolic, GridFn, QParams,
};
use qmoyal_core::qmoyal::{qstar_classical, OrderingKind};
use qmoyal_core::ring::ExactScalar;
use qmoyal_core::verify::{self, random_poly, RandomPolySpec};
use qmoyal_core::wigner::{wigner_transform, PhaseGridSpec, WaveFn, WignerOptions};
use qmoyal_core::{Poly, Rational};

fn poly(seed: u64, spec: RandomPolySpec) -> Poly {
    random_poly(&mut ChaCha8Rng::seed_from_u64(seed), &spec)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bracket_at_kappa_zero_is_poisson(s1 in any::<u64>(), s2 in any::<u64>()) {
        let spec = RandomPolySpec { max_kappa: 0, ..RandomPolySpec::polynomial(4) };
        let (f, g) = (poly(s1, spec), poly(s2, spec));
        let b = bracket_kappa(&f, &g).unwrap().at_kappa(&Rational::from_i64(0));
        prop_assert_eq!(b, poisson(&f, &g));
    }

    #[test]
    fn weyl_weight_is_geometric_mean(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3) {
        let (f, g) = (Poly::unit_monomial(a, b), Poly::unit_monomial(c, d));
        let w = qstar_classical(&f, &g, OrderingKind::Weyl).coefficient(a + c, b + d);
        let s = qstar_classical(&f, &g, OrderingKind::Standard).coefficient(a + c, b + d);
        let t = qstar_classical(&f, &g, OrderingKind::Antistandard).coefficient(a + c, b + d);
        prop_assert_eq!(&w * &w, &s * &t);
    }

    #[test]
    fn exact_and_float_evaluation_agree(seed in any::<u64>(), num in 1i64..=9, den in 2i64..=9, x in 0.5f64..2.0, p in 0.5f64..2.0) {
        let f = poly(seed, RandomPolySpec::laurent(3));
        let q = Rational::from_fraction(num, den);
        let exact = f.at_q(&q).unwrap().eval(x, p, 7.0, 0.0).unwrap();
        let float = f.eval(x, p, q.to_f64(), 0.0).unwrap();
        prop_assert!(close(exact, float, 1e-12), "{} vs {}", exact, float);
    }

    #[test]
    fn symbolic_dq2_matches_numeric(seed in any::<u64>(), x in 0.5f64..2.0, q in 0.2f64..0.9) {
        let spec = RandomPolySpec { max_exp: 5, max_kappa: 0, max_total_degree: Some(5), ..RandomPolySpec::polynomial(5) };
        let f = poly(seed, spec);
        let f = f.terms().filter(|(&(_, b), _)| b == 0).fold(Poly::zero(), |mut acc, (&e, c)| {
            acc.add_term(e, c.clone());
            acc
        });
        let params = QParams::new(q);
        let numeric = dq2(&|y: f64| f.eval(y, 1.0, q, 0.0).unwrap(), x, &params).unwrap();
        let symbolic = dq2_symbolic(&f).eval(x, 1.0, q, 0.0).unwrap();
        prop_assert!(close(numeric, symbolic, 1e-9), "{} vs {}", numeric, symbolic);
    }

    #[test]
    fn symbolic_nabla_matches_numeric(
        seed in any::<u64>(),
        m in 1i64..=2,
        n in 1i64..=2,
        x in 0.5f64..2.0,
        p in 0.5f64..2.0,
    ) {
        let f = poly(seed, RandomPolySpec { max_q_exp: 0, ..RandomPolySpec::laurent(3) });
        let params = QParams::new(0.5);
        let g = GridFn::from_poly(&f, &params).unwrap();
        let hat = nabla_hat(&g, x, p, m, n, &params).unwrap();
        let check = nabla_check(&g, x, p, m, n, &params).unwrap();
        let hat_s = nabla_hat_symbolic(&f, m, n).unwrap().eval(x, p, 0.5, 0.0).unwrap();
        let check_s = nabla_check_symbolic(&f, m, n).unwrap().eval(x, p, 0.5, 0.0).unwrap();
        prop_assert!(close(hat, hat_s, 1e-9), "{} vs {}", hat, hat_s);
        prop_assert!(close(check, check_s, 1e-9), "{} vs {}", check, check_s);
    }
}

#[test]
fn seeded_sweeps_are_reproducible() {
    assert_eq!(verify::jacobi(30, 3, 7), verify::jacobi(30, 3, 7));
    assert_eq!(verify::qmoyal_antisymmetry(50, 3, 1), verify::qmoyal_antisymmetry(50, 3, 1));
}

#[test]
fn hermite_states_match_closed_form() {
    let spec = PhaseGridSpec::new(6.0, 6.0, 48).unwrap();
    for n in 0..4 {
        let psi = WaveFn::<f64>::hermite(n, 1.0).unwrap();
        let w = wigner_transform(&psi, spec, &WignerOptions::default()).unwrap();
        let err = w.grid.linf_distance(|x, p| psi.wigner_closed_form(x, p));
        assert!(err < 1e-9, "n = {n}: {err}");
        assert!((w.grid.mass() - 1.0).abs() < 1e-6, "n = {n}: mass {}", w.grid.mass());
        // every excited state has a negative region
        assert_eq!(w.grid.min() < -1e-3, n > 0);
    }
}
