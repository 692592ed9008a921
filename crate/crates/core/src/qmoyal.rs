//! Ordering-dependent q-star products and the q-Moyal brackets.
//!
//! Degree bookkeeping follows two conventions. The ordering products are stated for
//! `f = p^m x^n`, `g = p^k x^l`; the discrete product and bracket for
//! `f = x^a p^b`, `g = x^c p^d`. Both live on the same [`PhasePoly`] storage,
//! keyed by `(x exponent, p exponent)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::phase::{Derivation, PhasePoly};
use crate::ring::{qfactorial, qint, Coefficient, ExactScalar, QConvention};

/// Operator ordering behind a classical q-star product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderingKind {
    Standard,
    Antistandard,
    Weyl,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 3] = [OrderingKind::Standard, OrderingKind::Antistandard, OrderingKind::Weyl];

    /// Exponent of `q`, in half units, picked up by `(p^m x^n) * (p^k x^l)`.
    fn q_half_weight(self, f: MonomialDegrees, g: MonomialDegrees) -> i64 {
        let (m, n, k, l) = (f.p, f.x, g.p, g.x);
        match self {
            OrderingKind::Standard => 2 * m * l,
            OrderingKind::Antistandard => -2 * n * k,
            OrderingKind::Weyl => m * l - n * k,
        }
    }
}

impl fmt::Display for OrderingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderingKind::Standard => "standard",
            OrderingKind::Antistandard => "antistandard",
            OrderingKind::Weyl => "weyl",
        })
    }
}

/// Degrees of a single monomial `x^x p^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MonomialDegrees {
    pub x: i64,
    pub p: i64,
}

impl MonomialDegrees {
    pub fn new(x: i64, p: i64) -> Self {
        Self { x, p }
    }

    /// `p^m x^n`
    pub fn from_pm_xn(m: i64, n: i64) -> Self {
        Self { x: n, p: m }
    }

    pub fn monomial<T: ExactScalar>(self) -> PhasePoly<T> {
        PhasePoly::unit_monomial(self.x, self.p)
    }
}

fn bilinear<T: ExactScalar>(
    f: &PhasePoly<T>,
    g: &PhasePoly<T>,
    mut pair: impl FnMut(MonomialDegrees, MonomialDegrees) -> Coefficient<T>,
) -> PhasePoly<T> {
    let mut out = PhasePoly::zero();
    for (&(a, b), cf) in f.terms() {
        for (&(c, d), cg) in g.terms() {
            let w = pair(MonomialDegrees::new(a, b), MonomialDegrees::new(c, d));
            out.add_term((a + c, b + d), &(cf * cg) * &w);
        }
    }
    out
}

/// Classical q-star product: `(p^m x^n) * (p^k x^l) = q^w p^{m+k} x^{n+l}` with
/// `w = ml` (standard), `-nk` (antistandard) or `(ml - nk)/2` (Weyl).
pub fn qstar_classical<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>, ordering: OrderingKind) -> PhasePoly<T> {
    bilinear(f, g, |u, v| Coefficient::q_half_pow(ordering.q_half_weight(u, v)))
}

/// `q^{nk} (p^m x^n * p^k x^l) - q^{ml} (p^k x^l * p^m x^n)`; identically zero.
pub fn qstar_commutation_check<T: ExactScalar>(m: i64, n: i64, k: i64, l: i64, ordering: OrderingKind) -> PhasePoly<T> {
    let f = MonomialDegrees::from_pm_xn(m, n).monomial::<T>();
    let g = MonomialDegrees::from_pm_xn(k, l).monomial::<T>();
    let lhs = qstar_classical(&f, &g, ordering).scale(&Coefficient::q_pow(n * k));
    let rhs = qstar_classical(&g, &f, ordering).scale(&Coefficient::q_pow(m * l));
    &lhs - &rhs
}

fn sign_i64(sign: i64, r: u32) -> i64 {
    if sign < 0 && r % 2 == 1 {
        -1
    } else {
        1
    }
}

fn polynomial_sector<T: ExactScalar>(f: &PhasePoly<T>, what: &str) -> Result<()> {
    if f.has_negative_exponents() {
        return Err(Error::NegativeExponent(format!("{what} must be a polynomial in x and p")));
    }
    Ok(())
}

/// Quantum q-star product for the standard or antistandard ordering.
///
/// ```text
/// standard:      sum_r kappa^r / [r]!                    (D_p^r f) *_S (D_x^r g)
/// antistandard:  sum_r (-kappa)^r q^{r(r-1)/2} / [r]!    (D_x^r f) *_A (D_p^r g)
/// ```
///
/// `D` is the q-derivative under `convention`. The series stops once a derivative
/// vanishes; division by `[r]!` is exact because each term carries a q-binomial.
pub fn qstar_quantum<T: ExactScalar>(
    f: &PhasePoly<T>,
    g: &PhasePoly<T>,
    ordering: OrderingKind,
    convention: QConvention,
) -> Result<PhasePoly<T>> {
    polynomial_sector(f, "left factor")?;
    polynomial_sector(g, "right factor")?;
    let (df, dg, sign) = match ordering {
        OrderingKind::Standard => (Derivation::QDp(convention), Derivation::QDx(convention), 1),
        OrderingKind::Antistandard => (Derivation::QDx(convention), Derivation::QDp(convention), -1),
        OrderingKind::Weyl => {
            return Err(Error::OutOfRange("the quantum q-star product has no Weyl-ordered form".into()))
        }
    };
    let mut out = PhasePoly::zero();
    let (mut fr, mut gr) = (f.clone(), g.clone());
    let mut r: u32 = 0;
    while !fr.is_zero() && !gr.is_zero() {
        let ri = i64::from(r);
        let mut weight = Coefficient::term(T::from_i64(sign_i64(sign, r)), 0, r);
        if ordering == OrderingKind::Antistandard {
            weight = weight.shift_q_half(ri * (ri - 1));
        }
        let fact = qfactorial::<T>(r, convention)?;
        let term = qstar_classical(&fr, &gr, ordering).try_map_coefficients(|c| c.div_exact(&fact))?;
        out += &term.scale(&weight);
        fr = fr.apply(df)?;
        gr = gr.apply(dg)?;
        r += 1;
    }
    Ok(out)
}

/// Quantum q-Moyal bracket of `p^m x^n` and `p^k x^l`:
/// `(q^{nk} f * g - q^{ml} g * f) / kappa`, the division being exact.
pub fn qmoyal_bracket_quantum<T: ExactScalar>(
    m: i64,
    n: i64,
    k: i64,
    l: i64,
    ordering: OrderingKind,
    convention: QConvention,
) -> Result<PhasePoly<T>> {
    let f = MonomialDegrees::from_pm_xn(m, n).monomial::<T>();
    let g = MonomialDegrees::from_pm_xn(k, l).monomial::<T>();
    let lhs = qstar_quantum(&f, &g, ordering, convention)?.scale(&Coefficient::q_pow(n * k));
    let rhs = qstar_quantum(&g, &f, ordering, convention)?.scale(&Coefficient::q_pow(m * l));
    (&lhs - &rhs).try_map_coefficients(|c| {
        c.div_kappa().map_err(|_| {
            Error::DivisionNotExact(format!(
                "kappa-free remainder in quantum bracket (m,n,k,l)=({m},{n},{k},{l}), {ordering} ordering"
            ))
        })
    })
}

/// Bilinear extension of [`qmoyal_bracket_quantum`] to polynomials.
pub fn qmoyal_bracket_quantum_poly<T: ExactScalar>(
    f: &PhasePoly<T>,
    g: &PhasePoly<T>,
    ordering: OrderingKind,
    convention: QConvention,
) -> Result<PhasePoly<T>> {
    polynomial_sector(f, "left argument")?;
    polynomial_sector(g, "right argument")?;
    let mut out = PhasePoly::zero();
    for (&(a, b), cf) in f.terms() {
        for (&(c, d), cg) in g.terms() {
            let br = qmoyal_bracket_quantum::<T>(b, a, d, c, ordering, convention)?;
            out += &br.scale(&(cf * cg));
        }
    }
    Ok(out)
}

/// Discrete q-star product: `(x^a p^b) * (x^c p^d) = q^{ad - bc} x^{a+c} p^{b+d}`.
pub fn qstar_discrete<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> PhasePoly<T> {
    bilinear(f, g, |u, v| Coefficient::q_pow(u.x * v.p - u.p * v.x))
}

/// The discrete product written as `f(x q^{-p d/dp}, p q^{x d/dx}) g`: each monomial
/// `x^a p^b` of `f` multiplies `g` after dilating it by `x -> q^{-b} x`, `p -> q^a p`.
pub fn qstar_discrete_operator_form<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> PhasePoly<T> {
    let mut out = PhasePoly::zero();
    for (&(a, b), c) in f.terms() {
        out += &g.dilate(-b, a).shift(a, b).scale(c);
    }
    out
}

/// q-Moyal bracket: `{x^a p^b, x^c p^d} = [bc - ad] x^{a+c-1} p^{b+d-1}` with the
/// symmetric q-integer.
pub fn qmoyal_bracket<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> PhasePoly<T> {
    bilinear(f, g, |u, v| {
        qint(u.p * v.x - u.x * v.p, QConvention::Symmetric).expect("symmetric q-integers exist for all n")
    })
    .shift(-1, -1)
}

/// The bracket as a difference action built from the discrete product:
/// `(g * f - f * g) / ((q - q^{-1}) x p)`.
pub fn xfd_action<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> PhasePoly<T> {
    let den = &Coefficient::q_pow(1) - &Coefficient::q_pow(-1);
    (&qstar_discrete(g, f) - &qstar_discrete(f, g))
        .try_map_coefficients(|c| c.div_exact(&den))
        .expect("q^e - q^-e is divisible by q - q^-1")
        .shift(-1, -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::poisson;
    use crate::ring::{qfalling, CoeffKey};
    use crate::{Coeff, Poly, Rational};
    use proptest::prelude::*;

    fn mono(a: i64, b: i64) -> Poly {
        Poly::unit_monomial(a, b)
    }

    fn kappa() -> Coeff {
        Coeff::kappa_pow(1)
    }

    #[test]
    fn classical_examples() {
        let (x, p) = (Poly::x(), Poly::p());
        assert_eq!(qstar_classical(&p, &x, OrderingKind::Standard), Poly::monomial(1, 1, Coeff::q_pow(1)));
        assert_eq!(qstar_classical(&x, &p, OrderingKind::Antistandard), Poly::monomial(1, 1, Coeff::q_pow(-1)));
        assert_eq!(qstar_classical(&x, &p, OrderingKind::Standard), mono(1, 1));
        assert_eq!(qstar_classical(&p, &x, OrderingKind::Weyl), Poly::monomial(1, 1, Coeff::q_half_pow(1)));
        assert_eq!(qstar_classical(&x, &p, OrderingKind::Weyl), Poly::monomial(1, 1, Coeff::q_half_pow(-1)));
        let mut f = Poly::zero();
        f.add_term((2, -1), Coeff::integer(3));
        f.add_term((0, 4), Coeff::q_pow(2));
        for o in OrderingKind::ALL {
            assert_eq!(qstar_classical(&Poly::one(), &f, o), f);
            assert_eq!(qstar_classical(&f, &Poly::one(), o), f);
        }
    }

    /// Expands `exp(nu A (x) B)` with Euler operators term by term in `nu = ln q`,
    /// compared against the collapsed q-power through the series of `q^w` at a
    /// rational point: `sum_j (w ln q)^j / j!` = `q^w`, so checking at `q = 2` numerically.
    #[test]
    fn classical_weights_match_euler_series() {
        let q: f64 = 1.7;
        let nu = q.ln();
        for (m, n, k, l) in [(1, 0, 0, 1), (2, 3, 1, 4), (0, 2, 3, 0), (3, 3, 2, 2)] {
            let f = MonomialDegrees::from_pm_xn(m, n).monomial::<Rational>();
            let g = MonomialDegrees::from_pm_xn(k, l).monomial::<Rational>();
            // exp(nu p d/dp (x) x d/dx) on f (x) g, exp(-nu x d/dx (x) p d/dp), and their half-sum
            let series = |w: f64| (0..60).fold((0.0, 1.0), |(acc, t), j| (acc + t, t * nu * w / f64::from(j + 1))).0;
            let weights = [
                (OrderingKind::Standard, series((m * l) as f64)),
                (OrderingKind::Antistandard, series(-(n * k) as f64)),
                (OrderingKind::Weyl, series(((m * l - n * k) as f64) / 2.0)),
            ];
            for (o, w) in weights {
                let got = qstar_classical(&f, &g, o).eval(1.0, 1.0, q, 0.0).unwrap();
                assert!((got - w).abs() < 1e-12 * w.abs(), "{o} {m}{n}{k}{l}");
            }
        }
    }

    #[test]
    fn commutation_examples() {
        assert!(qstar_commutation_check::<Rational>(1, 1, 1, 1, OrderingKind::Standard).is_zero());
        assert!(qstar_commutation_check::<Rational>(2, 3, 1, 4, OrderingKind::Antistandard).is_zero());
        for o in OrderingKind::ALL {
            assert!(qstar_commutation_check::<Rational>(0, 0, 5, 2, o).is_zero());
        }
    }

    #[test]
    fn commutation_sweep() {
        for o in OrderingKind::ALL {
            for m in 0..=6 {
                for n in 0..=6 {
                    for k in 0..=6 {
                        for l in 0..=6 {
                            assert!(qstar_commutation_check::<Rational>(m, n, k, l, o).is_zero());
                        }
                    }
                }
            }
        }
    }

    /// Closed monomial form of the quantum products, straight from the q-derivative falling products.
    fn quantum_oracle(f: MonomialDegrees, g: MonomialDegrees, ordering: OrderingKind, conv: QConvention) -> Poly {
        let mut out = Poly::zero();
        let r_max = match ordering {
            OrderingKind::Standard => f.p.min(g.x),
            _ => f.x.min(g.p),
        };
        for r in 0..=r_max.max(0) {
            let ru = r as u32;
            let (fr, gr, sign, extra) = match ordering {
                OrderingKind::Standard => {
                    (MonomialDegrees::new(f.x, f.p - r), MonomialDegrees::new(g.x - r, g.p), 1, 0)
                }
                _ => (
                    MonomialDegrees::new(f.x - r, f.p),
                    MonomialDegrees::new(g.x, g.p - r),
                    if r % 2 == 0 { 1 } else { -1 },
                    r * (r - 1),
                ),
            };
            let num = match ordering {
                OrderingKind::Standard => {
                    &qfalling::<Rational>(f.p, ru, conv).unwrap() * &qfalling(g.x, ru, conv).unwrap()
                }
                _ => &qfalling::<Rational>(f.x, ru, conv).unwrap() * &qfalling(g.p, ru, conv).unwrap(),
            };
            let w = num.div_exact(&qfactorial(ru, conv).unwrap()).unwrap();
            let mut c = Coeff::zero();
            c.add_term(CoeffKey::new(ordering.q_half_weight(fr, gr) + extra, ru), Rational::from_i64(sign));
            out.add_term((fr.x + gr.x, fr.p + gr.p), &w * &c);
        }
        out
    }

    #[test]
    fn quantum_examples() {
        let (x, p) = (Poly::x(), Poly::p());
        let conv = QConvention::Symmetric;
        assert_eq!(qstar_quantum(&x, &p, OrderingKind::Standard, conv).unwrap(), mono(1, 1));
        let mut expect = Poly::monomial(1, 1, Coeff::q_pow(1));
        expect.add_term((0, 0), kappa());
        assert_eq!(qstar_quantum(&p, &x, OrderingKind::Standard, conv).unwrap(), expect);
        let mut f = Poly::zero();
        f.add_term((3, 2), Coeff::integer(2));
        f.add_term((0, 1), Coeff::q_pow(-1));
        for o in [OrderingKind::Standard, OrderingKind::Antistandard] {
            assert_eq!(qstar_quantum(&f, &Poly::one(), o, conv).unwrap(), f);
            assert_eq!(qstar_quantum(&Poly::one(), &f, o, conv).unwrap(), f);
        }
        assert!(matches!(
            qstar_quantum(&mono(-1, 0), &p, OrderingKind::Standard, conv),
            Err(Error::NegativeExponent(_))
        ));
        assert!(qstar_quantum(&x, &p, OrderingKind::Weyl, conv).is_err());
    }

    #[test]
    fn quantum_matches_oracle() {
        for conv in [QConvention::Symmetric, QConvention::Basic] {
            for o in [OrderingKind::Standard, OrderingKind::Antistandard] {
                for (a, b, c, d) in [(1, 2, 3, 1), (0, 3, 3, 0), (2, 2, 2, 2), (4, 1, 1, 4), (0, 0, 2, 5)] {
                    let (f, g) = (MonomialDegrees::new(a, b), MonomialDegrees::new(c, d));
                    let got = qstar_quantum(&f.monomial(), &g.monomial(), o, conv).unwrap();
                    assert_eq!(got, quantum_oracle(f, g, o, conv), "{o} {conv:?} {a}{b}{c}{d}");
                }
            }
        }
    }

    #[test]
    fn quantum_bracket_examples() {
        let conv = QConvention::Symmetric;
        // {x, p}: f = x (m=0, n=1), g = p (k=1, l=0)
        let xp = qmoyal_bracket_quantum::<Rational>(0, 1, 1, 0, OrderingKind::Standard, conv).unwrap();
        assert_eq!(xp, Poly::constant(Coeff::integer(-1)));
        let px = qmoyal_bracket_quantum::<Rational>(1, 0, 0, 1, OrderingKind::Standard, conv).unwrap();
        assert_eq!(px, Poly::one());
        let anti = qmoyal_bracket_quantum::<Rational>(0, 1, 1, 0, OrderingKind::Antistandard, conv).unwrap();
        assert_eq!(anti, Poly::constant(-Coeff::q_pow(1)));
        for o in [OrderingKind::Standard, OrderingKind::Antistandard] {
            assert!(qmoyal_bracket_quantum::<Rational>(2, 3, 2, 3, o, conv).unwrap().is_zero());
        }
    }

    #[test]
    fn quantum_bracket_divisible_and_classical() {
        for conv in [QConvention::Symmetric, QConvention::Basic] {
            for o in [OrderingKind::Standard, OrderingKind::Antistandard] {
                for m in 0..=5i64 {
                    for n in 0..=5 - m {
                        for k in 0..=5i64 {
                            for l in 0..=5 - k {
                                let br = qmoyal_bracket_quantum::<Rational>(m, n, k, l, o, conv).unwrap();
                                let f = MonomialDegrees::from_pm_xn(m, n).monomial::<Rational>();
                                let g = MonomialDegrees::from_pm_xn(k, l).monomial::<Rational>();
                                assert_eq!(br.at_q_one().at_kappa(&Rational::from_i64(0)), poisson(&f, &g));
                            }
                        }
                    }
                }
            }
        }
    }

    /// Only the standard ordering with basic q-integers is associative for generic q.
    #[test]
    fn quantum_associativity_failures() {
        let (x, p) = (Poly::x(), Poly::p());
        let assoc = |f: &Poly, g: &Poly, h: &Poly, o, conv| {
            let lhs = qstar_quantum(&qstar_quantum(f, g, o, conv).unwrap(), h, o, conv).unwrap();
            let rhs = qstar_quantum(f, &qstar_quantum(g, h, o, conv).unwrap(), o, conv).unwrap();
            lhs == rhs
        };
        assert!(!assoc(&p, &p, &x, OrderingKind::Standard, QConvention::Symmetric));
        assert!(assoc(&p, &p, &x, OrderingKind::Standard, QConvention::Basic));
        assert!(!assoc(&x, &x, &p, OrderingKind::Antistandard, QConvention::Basic));
        assert!(!assoc(&x, &x, &p, OrderingKind::Antistandard, QConvention::Symmetric));
    }

    #[test]
    fn discrete_examples() {
        let (x, p) = (Poly::x(), Poly::p());
        assert_eq!(qstar_discrete(&x, &p), Poly::monomial(1, 1, Coeff::q_pow(1)));
        assert_eq!(qstar_discrete(&p, &x), Poly::monomial(1, 1, Coeff::q_pow(-1)));
        let f = Poly::monomial(-2, 3, Coeff::integer(5));
        assert_eq!(qstar_discrete(&Poly::one(), &f), f);
        let left = qstar_discrete(&qstar_discrete(&x, &p), &x);
        let right = qstar_discrete(&x, &qstar_discrete(&p, &x));
        assert_eq!(left, mono(2, 1));
        assert_eq!(right, mono(2, 1));
        let c = Poly::constant(Coeff::q_pow(2));
        assert_eq!(qstar_discrete_operator_form(&c, &f), &c * &f);
        assert_eq!(qstar_discrete_operator_form(&f, &c), &f * &c);
    }

    #[test]
    fn bracket_examples() {
        let (x, p) = (Poly::x(), Poly::p());
        assert_eq!(qmoyal_bracket(&p, &x), Poly::one());
        assert_eq!(xfd_action(&p, &x), Poly::one());
        let f = &mono(2, 1) + &mono(0, 3);
        assert!(qmoyal_bracket(&f, &f).is_zero());
        let b = qmoyal_bracket(&mono(2, 0), &mono(0, 2));
        let minus_q4 = -qint::<Rational>(4, QConvention::Symmetric).unwrap();
        assert_eq!(b, Poly::monomial(1, 1, minus_q4));
        assert_eq!(b.at_q_one(), Poly::monomial(1, 1, Coeff::integer(-4)));
        assert_eq!(b.at_q_one(), poisson(&mono(2, 0), &mono(0, 2)));
        assert!(xfd_action(&f, &Poly::constant(Coeff::integer(7))).is_zero());
    }

    #[test]
    fn classical_limit_monomials() {
        for a in -4..=4 {
            for b in -4..=4 {
                for c in -4..=4 {
                    for d in -4..=4 {
                        let (f, g) = (mono(a, b), mono(c, d));
                        assert_eq!(qmoyal_bracket(&f, &g).at_q_one(), poisson(&f, &g));
                    }
                }
            }
        }
    }

    /// Cyclic Jacobi sum of the q-Moyal bracket.
    fn jacobi(f: &Poly, g: &Poly, h: &Poly) -> Poly {
        let a = qmoyal_bracket(f, &qmoyal_bracket(g, h));
        let b = qmoyal_bracket(g, &qmoyal_bracket(h, f));
        let c = qmoyal_bracket(h, &qmoyal_bracket(f, g));
        &(&a + &b) + &c
    }

    #[test]
    fn jacobi_holds_only_at_q_one() {
        let mut total = 0;
        let mut failing = 0;
        for t in 0..16 * 16 * 16 {
            let e = |i: usize| mono(((t >> (4 * i)) & 3) as i64, ((t >> (4 * i + 2)) & 3) as i64);
            let j = jacobi(&e(0), &e(1), &e(2));
            total += 1;
            if !j.is_zero() {
                failing += 1;
                assert!(j.at_q_one().is_zero());
            }
        }
        assert_eq!(total, 4096);
        assert_eq!(failing, 1956);
        // (p^2, x^2, x): [2]^2 x - [4] x
        let j = jacobi(&mono(0, 2), &mono(2, 0), &mono(1, 0));
        let q2 = qint::<Rational>(2, QConvention::Symmetric).unwrap();
        let q4 = qint::<Rational>(4, QConvention::Symmetric).unwrap();
        assert_eq!(j, Poly::monomial(1, 0, &(&q2 * &q2) - &q4));
    }

    fn arb_poly(lo: i64, hi: i64) -> impl Strategy<Value = Poly> {
        prop::collection::vec((lo..=hi, lo..=hi, -3i64..=3, -9i64..=9, 1i64..=4), 0..5).prop_map(|v| {
            let mut f = Poly::zero();
            for (a, b, qe, n, d) in v {
                f.add_term((a, b), Coeff::term(Rational::from_fraction(n, d), 2 * qe, 0));
            }
            f
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn operator_form_matches(f in arb_poly(-4, 4), g in arb_poly(-4, 4)) {
            prop_assert_eq!(qstar_discrete_operator_form(&f, &g), qstar_discrete(&f, &g));
        }

        #[test]
        fn xfd_matches_bracket(f in arb_poly(-3, 3), g in arb_poly(-3, 3)) {
            prop_assert_eq!(xfd_action(&f, &g), qmoyal_bracket(&f, &g));
        }

        #[test]
        fn bracket_antisymmetric(f in arb_poly(-4, 4), g in arb_poly(-4, 4)) {
            prop_assert!((&qmoyal_bracket(&f, &g) + &qmoyal_bracket(&g, &f)).is_zero());
        }

        #[test]
        fn bracket_classical_limit(f in arb_poly(-3, 3), g in arb_poly(-3, 3)) {
            prop_assert_eq!(qmoyal_bracket(&f, &g).at_q_one(), poisson(&f.at_q_one(), &g.at_q_one()));
        }

        #[test]
        fn products_associative(f in arb_poly(-3, 3), g in arb_poly(-3, 3), h in arb_poly(-3, 3)) {
            prop_assert_eq!(
                qstar_discrete(&qstar_discrete(&f, &g), &h),
                qstar_discrete(&f, &qstar_discrete(&g, &h))
            );
            for o in OrderingKind::ALL {
                prop_assert_eq!(
                    qstar_classical(&qstar_classical(&f, &g, o), &h, o),
                    qstar_classical(&f, &qstar_classical(&g, &h, o), o)
                );
            }
        }

        #[test]
        fn quantum_standard_basic_associative(f in arb_poly(0, 3), g in arb_poly(0, 3), h in arb_poly(0, 2)) {
            let (o, conv) = (OrderingKind::Standard, QConvention::Basic);
            let lhs = qstar_quantum(&qstar_quantum(&f, &g, o, conv).unwrap(), &h, o, conv).unwrap();
            let rhs = qstar_quantum(&f, &qstar_quantum(&g, &h, o, conv).unwrap(), o, conv).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn quantum_associative_at_q_one(f in arb_poly(0, 3), g in arb_poly(0, 3), h in arb_poly(0, 2)) {
            for o in [OrderingKind::Standard, OrderingKind::Antistandard] {
                let conv = QConvention::Symmetric;
                let lhs = qstar_quantum(&qstar_quantum(&f, &g, o, conv).unwrap(), &h, o, conv).unwrap();
                let rhs = qstar_quantum(&f, &qstar_quantum(&g, &h, o, conv).unwrap(), o, conv).unwrap();
                prop_assert_eq!(lhs.at_q_one(), rhs.at_q_one());
            }
        }
    }
}
