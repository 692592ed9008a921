//! Exact scalar ring: Laurent polynomials in a formal `q` and ordinary
//! polynomials in a formal `kappa`, with exact rational coefficients.
//!
//! The q-exponent lattice is stored in half-units so that the Weyl-ordered
//! star product (which needs `q^{1/2}`) stays exact. Everything else only
//! ever produces even half-exponents.

use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar used for coefficients. Implemented for every `Ratio<I>`
/// over a signed integer type, e.g. [`BigRational`](num_rational::BigRational)
/// or `Ratio<i64>`.
pub trait ExactScalar: Clone + Debug + Eq + Ord + Signed + Send + Sync + 'static {
    fn from_i64(n: i64) -> Self;
    fn from_fraction(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_integral(&self) -> bool;
    fn numer_string(&self) -> String;
    fn denom_string(&self) -> String;
    /// Builds `num/den` from decimal strings; `None` on malformed input or zero denominator.
    fn from_decimal_parts(num: &str, den: &str) -> Option<Self>;
}

impl<I> ExactScalar for Ratio<I>
where
    I: Integer + Signed + Clone + Debug + Display + FromStr + FromPrimitive + ToPrimitive + Send + Sync + 'static,
{
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n).expect("integer type too narrow"))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        Ratio::new(
            I::from_i64(num).expect("integer type too narrow"),
            I::from_i64(den).expect("integer type too narrow"),
        )
    }

    fn to_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn numer_string(&self) -> String {
        self.numer().to_string()
    }

    fn denom_string(&self) -> String {
        self.denom().to_string()
    }

    fn from_decimal_parts(num: &str, den: &str) -> Option<Self> {
        let n: I = num.parse().ok()?;
        let d: I = den.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Ratio::new(n, d))
    }
}

/// Monomial key `kappa^kappa * q^(q_half/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoeffKey {
    pub kappa: u32,
    pub q_half: i64,
}

impl CoeffKey {
    pub fn new(q_half: i64, kappa: u32) -> Self {
        Self { kappa, q_half }
    }
}

/// Sparse exact element of `Q[q^{1/2}, q^{-1/2}][kappa]`. No stored value is zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coefficient<T> {
    terms: BTreeMap<CoeffKey, T>,
}

impl<T: ExactScalar> Default for Coefficient<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: ExactScalar> Coefficient<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(value: T) -> Self {
        Self::term(value, 0, 0)
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(T::from_i64(n))
    }

    /// `value * q^(q_half/2) * kappa^kappa`.
    pub fn term(value: T, q_half: i64, kappa: u32) -> Self {
        let mut c = Self::zero();
        c.add_term(CoeffKey::new(q_half, kappa), value);
        c
    }

    /// `q^e` for an integer exponent.
    pub fn q_pow(e: i64) -> Self {
        Self::term(T::one(), 2 * e, 0)
    }

    /// `q^(h/2)`.
    pub fn q_half_pow(h: i64) -> Self {
        Self::term(T::one(), h, 0)
    }

    pub fn kappa_pow(k: u32) -> Self {
        Self::term(T::one(), 0, k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in storage order (kappa ascending, then q ascending).
    pub fn terms(&self) -> impl Iterator<Item = (&CoeffKey, &T)> {
        self.terms.iter()
    }

    /// Terms in canonical print order: kappa ascending, q descending.
    pub fn canonical_terms(&self) -> Vec<(CoeffKey, &T)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, t)| (*k, t)).collect();
        v.sort_by(|a, b| a.0.kappa.cmp(&b.0.kappa).then(b.0.q_half.cmp(&a.0.q_half)));
        v
    }

    pub fn get(&self, q_half: i64, kappa: u32) -> Option<&T> {
        self.terms.get(&CoeffKey::new(q_half, kappa))
    }

    /// Adds `value` at `key`, dropping the entry if it cancels.
    pub fn add_term(&mut self, key: CoeffKey, value: T) {
        if value.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = v.clone() + value;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, value);
            }
        }
    }

    /// The plain rational if this coefficient has no `q` or `kappa` dependence.
    pub fn as_constant(&self) -> Option<T> {
        match self.terms.len() {
            0 => Some(T::zero()),
            1 => {
                let (k, v) = self.terms.iter().next().unwrap();
                (k.kappa == 0 && k.q_half == 0).then(|| v.clone())
            }
            _ => None,
        }
    }

    pub fn has_half_exponents(&self) -> bool {
        self.terms.keys().any(|k| k.q_half % 2 != 0)
    }

    pub fn has_kappa(&self) -> bool {
        self.terms.keys().any(|k| k.kappa > 0)
    }

    pub fn max_kappa(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.kappa).max()
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.clone() * s.clone())).collect() }
    }

    /// Multiplies by `q^(h/2)`.
    pub fn shift_q_half(&self, h: i64) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (CoeffKey::new(k.q_half + h, k.kappa), v.clone())).collect() }
    }

    pub fn shift_q(&self, e: i64) -> Self {
        self.shift_q_half(2 * e)
    }

    /// Substitutes `q = 1`, keeping `kappa` formal. Exact, also for half exponents.
    pub fn at_q_one(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(CoeffKey::new(0, k.kappa), v.clone());
        }
        out
    }

    /// Substitutes a value for `kappa`, keeping `q` formal.
    pub fn at_kappa(&self, kappa: &T) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(CoeffKey::new(k.q_half, 0), v.clone() * pow_exact(kappa, k.kappa as i64));
        }
        out
    }

    /// Substitutes an exact value for `q`, keeping `kappa` formal.
    pub fn at_q(&self, q: &T) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroQ);
        }
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            if k.q_half % 2 != 0 {
                return Err(Error::HalfExponentNotExact);
            }
            out.add_term(CoeffKey::new(0, k.kappa), v.clone() * pow_exact(q, k.q_half / 2));
        }
        Ok(out)
    }

    /// Exact evaluation at rational `q` and `kappa`.
    pub fn eval_exact(&self, q: &T, kappa: &T) -> Result<T> {
        let c = self.at_q(q)?;
        let mut acc = T::zero();
        for (k, v) in &c.terms {
            acc = acc + v.clone() * pow_exact(kappa, k.kappa as i64);
        }
        Ok(acc)
    }

    /// Floating-point evaluation. Half exponents use `sqrt(q)`, so `q` must be positive for them.
    pub fn eval_float<F: Float>(&self, q: F, kappa: F) -> Result<F> {
        if q.is_zero() {
            return Err(Error::ZeroQ);
        }
        let mut acc = F::zero();
        for (k, v) in &self.terms {
            let qf = if k.q_half % 2 == 0 {
                q.powi(to_i32(k.q_half / 2))
            } else {
                if q < F::zero() {
                    return Err(Error::HalfExponentNotExact);
                }
                q.sqrt().powi(to_i32(k.q_half))
            };
            let c = F::from(v.to_f64()).unwrap_or_else(F::nan);
            acc = acc + c * qf * kappa.powi(to_i32(k.kappa as i64));
        }
        Ok(acc)
    }

    /// Exact division by `kappa`. Fails when a `kappa^0` term is present.
    pub fn div_kappa(&self) -> Result<Self> {
        if let Some(k) = self.terms.keys().find(|k| k.kappa == 0) {
            return Err(Error::DivisionNotExact(format!("kappa-free remainder at q^({}/2)", k.q_half)));
        }
        Ok(Self { terms: self.terms.iter().map(|(k, v)| (CoeffKey::new(k.q_half, k.kappa - 1), v.clone())).collect() })
    }

    /// Exact Laurent division by a `kappa`-free divisor. Fails if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::DivisionNotExact("division by zero".into()));
        }
        if divisor.has_kappa() {
            return Err(Error::DivisionNotExact("divisor depends on kappa".into()));
        }
        let d: Vec<(i64, T)> = divisor.terms.iter().map(|(k, v)| (k.q_half, v.clone())).collect();
        let (d_lo, d_hi) = (d.first().unwrap().0, d.last().unwrap().0);
        let d_lead = d.last().unwrap().1.clone();

        let mut by_kappa: BTreeMap<u32, BTreeMap<i64, T>> = BTreeMap::new();
        for (k, v) in &self.terms {
            by_kappa.entry(k.kappa).or_default().insert(k.q_half, v.clone());
        }
        let mut out = Self::zero();
        for (kappa, mut rem) in by_kappa {
            let lo = *rem.keys().next().unwrap();
            let floor = lo - d_lo;
            while let Some((&top, top_v)) = rem.iter().next_back() {
                let e = top - d_hi;
                if e < floor {
                    return Err(Error::DivisionNotExact(format!("nonzero remainder dividing by {:?}", divisor)));
                }
                let c = top_v.clone() / d_lead.clone();
                for (de, dv) in &d {
                    let key = de + e;
                    let prod = c.clone() * dv.clone();
                    let entry = rem.entry(key).or_insert_with(T::zero);
                    *entry = entry.clone() - prod;
                    if entry.is_zero() {
                        rem.remove(&key);
                    }
                }
                out.add_term(CoeffKey::new(e, kappa), c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

fn to_i32(n: i64) -> i32 {
    i32::try_from(n).expect("exponent out of i32 range")
}

/// `base^e` for integer `e`; negative powers invert.
pub fn pow_exact<T: ExactScalar>(base: &T, e: i64) -> T {
    let mut acc = T::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * base.clone();
    }
    if e < 0 {
        T::one() / acc
    } else {
        acc
    }
}

impl<T: ExactScalar> From<T> for Coefficient<T> {
    fn from(v: T) -> Self {
        Self::constant(v)
    }
}

impl<T: ExactScalar> AddAssign<&Coefficient<T>> for Coefficient<T> {
    fn add_assign(&mut self, rhs: &Coefficient<T>) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, v.clone());
        }
    }
}

impl<T: ExactScalar> SubAssign<&Coefficient<T>> for Coefficient<T> {
    fn sub_assign(&mut self, rhs: &Coefficient<T>) {
        for (k, v) in &rhs.terms {
            self.add_term(*k, -v.clone());
        }
    }
}

impl<T: ExactScalar> Add for &Coefficient<T> {
    type Output = Coefficient<T>;
    fn add(self, rhs: &Coefficient<T>) -> Coefficient<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: ExactScalar> Sub for &Coefficient<T> {
    type Output = Coefficient<T>;
    fn sub(self, rhs: &Coefficient<T>) -> Coefficient<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: ExactScalar> Mul for &Coefficient<T> {
    type Output = Coefficient<T>;
    fn mul(self, rhs: &Coefficient<T>) -> Coefficient<T> {
        let mut out = Coefficient::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(CoeffKey::new(ka.q_half + kb.q_half, ka.kappa + kb.kappa), va.clone() * vb.clone());
            }
        }
        out
    }
}

impl<T: ExactScalar> Neg for &Coefficient<T> {
    type Output = Coefficient<T>;
    fn neg(self) -> Coefficient<T> {
        Coefficient { terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect() }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: ExactScalar> $tr for Coefficient<T> {
            type Output = Coefficient<T>;
            fn $m(self, rhs: Coefficient<T>) -> Coefficient<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: ExactScalar> $tr<&Coefficient<T>> for Coefficient<T> {
            type Output = Coefficient<T>;
            fn $m(self, rhs: &Coefficient<T>) -> Coefficient<T> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<T: ExactScalar> Neg for Coefficient<T> {
    type Output = Coefficient<T>;
    fn neg(self) -> Coefficient<T> {
        -&self
    }
}

impl<T: ExactScalar> Zero for Coefficient<T> {
    fn zero() -> Self {
        Coefficient::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: ExactScalar> One for Coefficient<T> {
    fn one() -> Self {
        Coefficient::one()
    }
}

/// Which q-bracket `[n]` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum QConvention {
    /// `(q^n - q^{-n}) / (q - q^{-1})`
    #[default]
    Symmetric,
    /// `(q^n - 1) / (q - 1)`, defined for `n >= 0`
    Basic,
}

/// A q-integer `[n]` under a fixed convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QInt {
    pub n: i64,
    pub convention: QConvention,
}

impl QInt {
    pub fn new(n: i64, convention: QConvention) -> Self {
        Self { n, convention }
    }

    pub fn to_coefficient<T: ExactScalar>(self) -> Result<Coefficient<T>> {
        qint(self.n, self.convention)
    }
}

/// `[n]` as an exact Laurent polynomial in `q`.
pub fn qint<T: ExactScalar>(n: i64, convention: QConvention) -> Result<Coefficient<T>> {
    let mut c = Coefficient::zero();
    match convention {
        QConvention::Symmetric => {
            let m = n.abs();
            let sign = if n < 0 { -T::one() } else { T::one() };
            for j in 0..m {
                c.add_term(CoeffKey::new(2 * (m - 1 - 2 * j), 0), sign.clone());
            }
        }
        QConvention::Basic => {
            if n < 0 {
                return Err(Error::NegativeBasicQInt(n));
            }
            for j in 0..n {
                c.add_term(CoeffKey::new(2 * j, 0), T::one());
            }
        }
    }
    Ok(c)
}

/// `[r]! = [1][2]...[r]`, with `[0]! = 1`.
pub fn qfactorial<T: ExactScalar>(r: u32, convention: QConvention) -> Result<Coefficient<T>> {
    let mut acc = Coefficient::one();
    for j in 1..=r as i64 {
        acc = &acc * &qint(j, convention)?;
    }
    Ok(acc)
}

/// `[a][a-1]...[a-r+1]`, the coefficient produced by `r` q-derivatives of `z^a`.
pub fn qfalling<T: ExactScalar>(a: i64, r: u32, convention: QConvention) -> Result<Coefficient<T>> {
    let mut acc = Coefficient::one();
    for j in 0..r as i64 {
        acc = &acc * &qint(a - j, convention)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    type C = Coefficient<Rational>;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_fraction(n, d)
    }

    fn q(e: i64) -> C {
        C::q_pow(e)
    }

    #[test]
    fn add_examples() {
        let half = C::constant(r(1, 2));
        assert_eq!(&half + &half, C::one());

        let lhs = &(&q(1) + &q(-1)) + &(-q(-1));
        assert_eq!(lhs, q(1));

        let kq2 = &C::kappa_pow(1) * &q(2);
        assert_eq!(&kq2 + &kq2, C::term(r(2, 1), 4, 1));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&q(1) * &q(-1), C::one());
        let a = &q(1) - &q(-1);
        let b = &q(1) + &q(-1);
        assert_eq!(&a * &b, &q(2) - &q(-2));
        assert_eq!(&C::kappa_pow(1) * &C::kappa_pow(1), C::kappa_pow(2));
    }

    #[test]
    fn qint_examples() {
        assert_eq!(qint::<Rational>(2, QConvention::Symmetric).unwrap(), &q(1) + &q(-1));
        let three = &(&q(2) + &C::one()) + &q(-2);
        assert_eq!(qint::<Rational>(3, QConvention::Symmetric).unwrap(), three);
        assert!(qint::<Rational>(0, QConvention::Basic).unwrap().is_zero());
        assert!(qint::<Rational>(0, QConvention::Symmetric).unwrap().is_zero());
        assert_eq!(qint::<Rational>(1, QConvention::Basic).unwrap(), C::one());
        assert!(matches!(qint::<Rational>(-1, QConvention::Basic), Err(Error::NegativeBasicQInt(-1))));
    }

    #[test]
    fn symmetric_qint_matches_long_division() {
        let denom = &q(1) - &q(-1);
        for n in -20..=20 {
            let num = &q(n) - &q(-n);
            let oracle = num.div_exact(&denom).unwrap();
            assert_eq!(qint::<Rational>(n, QConvention::Symmetric).unwrap(), oracle, "n = {n}");
        }
    }

    #[test]
    fn basic_qint_matches_long_division() {
        let denom = &q(1) - &C::one();
        for n in 0..=20 {
            let num = &q(n) - &C::one();
            assert_eq!(qint::<Rational>(n, QConvention::Basic).unwrap(), num.div_exact(&denom).unwrap());
        }
    }

    #[test]
    fn qint_laws() {
        for n in -20..=20i64 {
            let a = qint::<Rational>(n, QConvention::Symmetric).unwrap();
            assert_eq!(qint::<Rational>(-n, QConvention::Symmetric).unwrap(), -&a);
            assert_eq!(a.eval_exact(&r(1, 1), &r(0, 1)).unwrap(), r(n, 1));
            for m in -20..=20i64 {
                let b = qint::<Rational>(m, QConvention::Symmetric).unwrap();
                assert!((&(&a * &b) - &(&b * &a)).is_zero());
            }
        }
        for n in 0..=20 {
            let a = qint::<Rational>(n, QConvention::Basic).unwrap();
            assert_eq!(a.at_q_one().as_constant().unwrap(), r(n, 1));
        }
    }

    #[test]
    fn eval_examples() {
        let c = &q(1) + &q(-1);
        assert_eq!(c.eval_exact(&r(2, 1), &r(0, 1)).unwrap(), r(5, 2));
        let three = qint::<Rational>(3, QConvention::Symmetric).unwrap();
        assert_eq!(three.eval_exact(&r(1, 1), &r(0, 1)).unwrap(), r(3, 1));
        assert_eq!(C::kappa_pow(1).eval_exact(&r(1, 1), &r(1, 2)).unwrap(), r(1, 2));
        assert!(matches!(c.eval_exact(&r(0, 1), &r(0, 1)), Err(Error::ZeroQ)));
        assert!((c.eval_float(2.0f64, 0.0).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn half_exponents() {
        let s = C::q_half_pow(1);
        assert!(s.has_half_exponents());
        assert_eq!(&s * &s, q(1));
        assert!(matches!(s.eval_exact(&r(4, 1), &r(0, 1)), Err(Error::HalfExponentNotExact)));
        assert!((s.eval_float(4.0f64, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(s.at_q_one(), C::one());
    }

    #[test]
    fn inexact_division_is_rejected() {
        let num = &q(2) + &C::one();
        let den = &q(1) - &q(-1);
        assert!(matches!(num.div_exact(&den), Err(Error::DivisionNotExact(_))));
        assert!(matches!(C::one().div_kappa(), Err(Error::DivisionNotExact(_))));
    }

    #[test]
    fn qfactorial_small() {
        let f3 = qfactorial::<Rational>(3, QConvention::Symmetric).unwrap();
        assert_eq!(f3.at_q_one().as_constant().unwrap(), r(6, 1));
        assert_eq!(qfactorial::<Rational>(0, QConvention::Basic).unwrap(), C::one());
    }

    #[test]
    fn narrow_integer_backend() {
        type C64 = Coefficient<Ratio<i64>>;
        let a = qint::<Ratio<i64>>(4, QConvention::Symmetric).unwrap();
        let b = C64::constant(Ratio::new(1, 3));
        assert_eq!((&a * &b).eval_exact(&Ratio::from_integer(1), &Ratio::from_integer(0)).unwrap(), Ratio::new(4, 3));
    }

    fn arb_coeff() -> impl Strategy<Value = C> {
        prop::collection::vec((-6i64..=6, 0u32..=3, -100i64..=100, 1i64..=100), 0..5).prop_map(|v| {
            let mut c = C::zero();
            for (qe, ke, n, d) in v {
                c.add_term(CoeffKey::new(2 * qe, ke), r(n, d));
            }
            c
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ring_axioms(a in arb_coeff(), b in arb_coeff(), c in arb_coeff()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!(a.terms().all(|(_, v)| !v.is_zero()));
        }

        #[test]
        fn division_inverts_multiplication(a in arb_coeff(), n in 1i64..6) {
            let d = qint::<Rational>(n, QConvention::Symmetric).unwrap();
            let prod = &a * &d;
            prop_assert_eq!(prod.div_exact(&d).unwrap(), a);
        }
    }
}
