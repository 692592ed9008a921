//! Exhaustive and randomized identity sweeps.
//!
//! Every sweep evaluates its cases in parallel and aggregates in case order, so a
//! report (including which counterexample is shown first) does not depend on the
//! thread count.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::moyal::{bracket_kappa, star_kappa};
use crate::phase::PhasePoly;
use crate::qmoyal::{
    qmoyal_bracket, qmoyal_bracket_quantum, qstar_classical, qstar_commutation_check, qstar_discrete, OrderingKind,
};
use crate::ring::{Coefficient, ExactScalar, QConvention};
use crate::{Poly, Rational};

/// Outcome of a sweep: how many cases ran, how many failed, and the first failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    /// Human-readable description of the first violating case.
    pub first_violation: Option<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn collect(name: &str, outcomes: Vec<Option<String>>) -> Self {
        let cases = outcomes.len();
        let mut failures = outcomes.into_iter().flatten();
        let first_violation = failures.next();
        let violations = failures.count() + usize::from(first_violation.is_some());
        Self { name: name.into(), cases, violations, first_violation }
    }

    fn merge(name: &str, parts: Vec<SweepReport>) -> Self {
        Self {
            name: name.into(),
            cases: parts.iter().map(|r| r.cases).sum(),
            violations: parts.iter().map(|r| r.violations).sum(),
            first_violation: parts.into_iter().find_map(|r| r.first_violation),
        }
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} violations / {} cases", self.name, self.violations, self.cases)?;
        if let Some(v) = &self.first_violation {
            write!(f, "\nfirst counterexample: {v}")?;
        }
        Ok(())
    }
}

fn grid4(lo: i64, hi: i64) -> Vec<[i64; 4]> {
    let r: Vec<i64> = (lo..=hi).collect();
    let mut out = Vec::with_capacity(r.len().pow(4));
    for &a in &r {
        for &b in &r {
            for &c in &r {
                for &d in &r {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

fn monomials(lo: i64, hi: i64) -> Vec<(i64, i64)> {
    (lo..=hi).flat_map(|a| (lo..=hi).map(move |b| (a, b))).collect()
}

fn triples<T: Clone + Send + Sync>(items: &[T]) -> Vec<(T, T, T)> {
    let mut out = Vec::with_capacity(items.len().pow(3));
    for a in items {
        for b in items {
            for c in items {
                out.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    out
}

/// `q^{nk} (p^m x^n * p^k x^l) - q^{ml} (p^k x^l * p^m x^n) = 0` over `(m,n,k,l) in [0,max]^4`
/// for all three orderings.
pub fn ordering_identity(max_degree: i64) -> SweepReport {
    let cases: Vec<(OrderingKind, [i64; 4])> =
        OrderingKind::ALL.iter().flat_map(|&o| grid4(0, max_degree).into_iter().map(move |c| (o, c))).collect();
    let outcomes = cases
        .par_iter()
        .map(|&(o, [m, n, k, l])| {
            let r = qstar_commutation_check::<Rational>(m, n, k, l, o);
            (!r.is_zero()).then(|| format!("{o} (m,n,k,l)=({m},{n},{k},{l}) leaves {r}"))
        })
        .collect();
    SweepReport::collect("eq291", outcomes)
}

/// Jacobi identity of the q-Moyal bracket on all monomial triples with exponents in `[0, max]`.
pub fn qjacobi(max_exp: i64) -> SweepReport {
    let mons = monomials(0, max_exp);
    let outcomes = triples(&mons)
        .par_iter()
        .map(|&(u, v, w)| {
            let (f, g, h) =
                (Poly::unit_monomial(u.0, u.1), Poly::unit_monomial(v.0, v.1), Poly::unit_monomial(w.0, w.1));
            let sum = &(&qmoyal_bracket(&f, &qmoyal_bracket(&g, &h)) + &qmoyal_bracket(&g, &qmoyal_bracket(&h, &f)))
                + &qmoyal_bracket(&h, &qmoyal_bracket(&f, &g));
            (!sum.is_zero()).then(|| format!("{f}, {g}, {h} leave {sum}"))
        })
        .collect();
    SweepReport::collect("qjacobi", outcomes)
}

fn assoc_case(label: &str, f: &Poly, g: &Poly, h: &Poly, star: impl Fn(&Poly, &Poly) -> Poly) -> Option<String> {
    let lhs = star(&star(f, g), h);
    let rhs = star(f, &star(g, h));
    (lhs != rhs).then(|| format!("{label}: ({f}, {g}, {h})"))
}

/// Associativity of the discrete and classical q-star products on monomial triples with
/// exponents in `[-laurent_range, laurent_range]`, and of the kappa-star on monomial
/// triples of total degree at most `max_total_degree`.
pub fn assoc(laurent_range: i64, max_total_degree: i64) -> SweepReport {
    let mons: Vec<Poly> =
        monomials(-laurent_range, laurent_range).into_iter().map(|(a, b)| Poly::unit_monomial(a, b)).collect();
    let laurent = triples(&mons);
    let q_part = SweepReport::collect(
        "assoc",
        laurent
            .par_iter()
            .map(|(f, g, h)| {
                assoc_case("discrete", f, g, h, qstar_discrete).or_else(|| {
                    OrderingKind::ALL
                        .iter()
                        .find_map(|&o| assoc_case(&o.to_string(), f, g, h, |a, b| qstar_classical(a, b, o)))
                })
            })
            .collect(),
    );
    let kappa_mons: Vec<Poly> = monomials(0, max_total_degree)
        .into_iter()
        .filter(|(a, b)| a + b <= max_total_degree)
        .map(|(a, b)| Poly::unit_monomial(a, b))
        .collect();
    let kappa_part = SweepReport::collect(
        "assoc",
        triples(&kappa_mons)
            .par_iter()
            .map(|(f, g, h)| {
                assoc_case("kappa-star", f, g, h, |a, b| star_kappa(a, b).expect("polynomial star terminates"))
            })
            .collect(),
    );
    SweepReport::merge("assoc", vec![q_part, kappa_part])
}

/// Shape of random polynomials for randomized sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomPolySpec {
    pub min_exp: i64,
    pub max_exp: i64,
    /// Bound on `a + b`; `None` for no bound.
    pub max_total_degree: Option<i64>,
    pub max_terms: usize,
    /// Largest `|e|` of the `q^e` factor on a coefficient; 0 keeps coefficients q-free.
    pub max_q_exp: i64,
    /// Largest kappa power on a coefficient.
    pub max_kappa: u32,
}

impl RandomPolySpec {
    /// q-free polynomials of total degree `<= degree` with small rational coefficients.
    pub fn polynomial(degree: i64) -> Self {
        Self { min_exp: 0, max_exp: degree, max_total_degree: Some(degree), max_terms: 4, max_q_exp: 0, max_kappa: 1 }
    }

    /// Laurent polynomials with q-dependent coefficients.
    pub fn laurent(range: i64) -> Self {
        Self { min_exp: -range, max_exp: range, max_total_degree: None, max_terms: 4, max_q_exp: 3, max_kappa: 0 }
    }
}

pub fn random_poly<T: ExactScalar>(rng: &mut impl Rng, spec: &RandomPolySpec) -> PhasePoly<T> {
    let mut out = PhasePoly::zero();
    let n = rng.gen_range(1..=spec.max_terms.max(1));
    while out.len() < n {
        let a = rng.gen_range(spec.min_exp..=spec.max_exp);
        let b = rng.gen_range(spec.min_exp..=spec.max_exp);
        if spec.max_total_degree.is_some_and(|d| a + b > d) {
            continue;
        }
        let num = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let den = rng.gen_range(1..=4);
        let qe = rng.gen_range(-spec.max_q_exp..=spec.max_q_exp);
        let ke = rng.gen_range(0..=spec.max_kappa);
        out.add_term((a, b), Coefficient::term(T::from_fraction(num, den), 2 * qe, ke));
    }
    out
}

fn random_cases<T: Send>(seed: u64, cases: usize, gen: impl Fn(&mut ChaCha8Rng) -> T) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases).map(|_| gen(&mut rng)).collect()
}

/// Jacobi identity of the kappa-Moyal bracket on random polynomial triples.
pub fn jacobi(cases: usize, max_degree: i64, seed: u64) -> SweepReport {
    let spec = RandomPolySpec::polynomial(max_degree);
    let inputs = random_cases(seed, cases, |rng| {
        (random_poly::<Rational>(rng, &spec), random_poly(rng, &spec), random_poly(rng, &spec))
    });
    let outcomes = inputs
        .par_iter()
        .map(|(f, g, h)| {
            let br = |a: &Poly, b: &Poly| bracket_kappa(a, b).expect("polynomial bracket terminates");
            let sum = &(&br(f, &br(g, h)) + &br(g, &br(h, f))) + &br(h, &br(f, g));
            (!sum.is_zero()).then(|| format!("({f}, {g}, {h}) leaves {sum}"))
        })
        .collect();
    SweepReport::collect("jacobi", outcomes)
}

/// `{f,g} + {g,f} = 0` for the q-Moyal bracket on random Laurent pairs.
pub fn qmoyal_antisymmetry(cases: usize, range: i64, seed: u64) -> SweepReport {
    let spec = RandomPolySpec::laurent(range);
    let inputs = random_cases(seed, cases, |rng| (random_poly::<Rational>(rng, &spec), random_poly(rng, &spec)));
    let outcomes = inputs
        .par_iter()
        .map(|(f, g)| {
            let sum = &qmoyal_bracket(f, g) + &qmoyal_bracket(g, f);
            (!sum.is_zero()).then(|| format!("({f}, {g})"))
        })
        .collect();
    SweepReport::collect("qmoyal-antisymmetry", outcomes)
}

/// The q-Moyal bracket at `q = 1` against the Poisson bracket on all monomial pairs in `[-range, range]`.
pub fn qmoyal_classical_limit(range: i64) -> SweepReport {
    let outcomes = grid4(-range, range)
        .par_iter()
        .map(|&[a, b, c, d]| {
            let (f, g) = (Poly::unit_monomial(a, b), Poly::unit_monomial(c, d));
            (qmoyal_bracket(&f, &g).at_q_one() != crate::moyal::poisson(&f, &g))
                .then(|| format!("x^{a} p^{b}, x^{c} p^{d}"))
        })
        .collect();
    SweepReport::collect("qmoyal-classical-limit", outcomes)
}

/// Exact kappa-divisibility of the quantum q-Moyal bracket for `p^m x^n`, `p^k x^l` with
/// `m + n, k + l <= max_degree`, both orderings and both q-integer conventions.
pub fn quantum_divisibility(max_degree: i64) -> SweepReport {
    let mut cases = Vec::new();
    for conv in [QConvention::Symmetric, QConvention::Basic] {
        for o in [OrderingKind::Standard, OrderingKind::Antistandard] {
            for [m, n, k, l] in grid4(0, max_degree) {
                if m + n <= max_degree && k + l <= max_degree {
                    cases.push((conv, o, [m, n, k, l]));
                }
            }
        }
    }
    let outcomes = cases
        .par_iter()
        .map(|&(conv, o, [m, n, k, l])| {
            qmoyal_bracket_quantum::<Rational>(m, n, k, l, o, conv)
                .err()
                .map(|e| format!("{o} {conv:?} (m,n,k,l)=({m},{n},{k},{l}): {e}"))
        })
        .collect();
    SweepReport::collect("quantum-divisibility", outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_identity_counts() {
        let r = ordering_identity(4);
        assert_eq!(r.cases, 1875);
        assert!(r.passed());
        assert_eq!(r.to_string(), "eq291: 0 violations / 1875 cases");
    }

    #[test]
    fn qjacobi_reports_failures() {
        let r = qjacobi(1);
        assert_eq!(r.cases, 64);
        let r = qjacobi(3);
        assert_eq!((r.cases, r.violations), (4096, 1956));
        assert!(r.to_string().contains("first counterexample"));
    }

    #[test]
    fn small_sweeps_pass() {
        assert!(assoc(1, 3).passed());
        assert!(jacobi(20, 3, 1).passed());
        assert!(qmoyal_antisymmetry(50, 3, 2).passed());
        assert!(qmoyal_classical_limit(2).passed());
        assert!(quantum_divisibility(3).passed());
    }

    #[test]
    fn random_polys_are_seeded() {
        let spec = RandomPolySpec::laurent(3);
        let a: Vec<Poly> = random_cases(9, 5, |rng| random_poly(rng, &spec));
        let b: Vec<Poly> = random_cases(9, 5, |rng| random_poly(rng, &spec));
        assert_eq!(a, b);
        let spec = RandomPolySpec::polynomial(4);
        for f in random_cases(3, 50, |rng| random_poly::<Rational>(rng, &spec)) {
            assert!(f.terms().all(|(&(a, b), _)| a >= 0 && b >= 0 && a + b <= 4));
            assert!(!f.is_zero());
        }
    }

    #[test]
    fn report_merges_in_order() {
        let a = SweepReport::collect("x", vec![None, Some("first".into()), Some("second".into())]);
        assert_eq!((a.cases, a.violations, a.first_violation.as_deref()), (3, 2, Some("first")));
        let m = SweepReport::merge("y", vec![SweepReport::collect("x", vec![None]), a]);
        assert_eq!((m.cases, m.violations, m.first_violation.as_deref()), (4, 2, Some("first")));
    }
}
