//! Phase-space Laurent polynomials `sum c_{ab} x^a p^b` over [`Coefficient`]s.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::ring::{qint, Coefficient, ExactScalar, QConvention};

/// Exponent pair `(x_exponent, p_exponent)`.
pub type Exponents = (i64, i64);

/// Sparse Laurent polynomial in `x` and `p`. Multiplication is the
/// commutative pointwise product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhasePoly<T> {
    terms: BTreeMap<Exponents, Coefficient<T>>,
}

impl<T: ExactScalar> Default for PhasePoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: ExactScalar> PhasePoly<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Coefficient::one())
    }

    pub fn constant(c: Coefficient<T>) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(xe: i64, pe: i64, c: Coefficient<T>) -> Self {
        let mut f = Self::zero();
        f.add_term((xe, pe), c);
        f
    }

    /// `x^xe p^pe` with unit coefficient.
    pub fn unit_monomial(xe: i64, pe: i64) -> Self {
        Self::monomial(xe, pe, Coefficient::one())
    }

    pub fn x() -> Self {
        Self::unit_monomial(1, 0)
    }

    pub fn p() -> Self {
        Self::unit_monomial(0, 1)
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

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Coefficient<T>)> {
        self.terms.iter()
    }

    /// Terms ordered by x-exponent descending, then p-exponent descending.
    pub fn canonical_terms(&self) -> impl Iterator<Item = (&Exponents, &Coefficient<T>)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, xe: i64, pe: i64) -> Coefficient<T> {
        self.terms.get(&(xe, pe)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: Exponents, c: Coefficient<T>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    /// The single term, if this polynomial is a monomial.
    pub fn as_monomial(&self) -> Option<(Exponents, &Coefficient<T>)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|&(a, b)| a < 0 || b < 0)
    }

    /// Largest `a + b` over the support; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&Coefficient<T>) -> Coefficient<T>) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn try_map_coefficients(&self, mut f: impl FnMut(&Coefficient<T>) -> Result<Coefficient<T>>) -> Result<Self> {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient<T>) -> Self {
        self.map_coefficients(|v| v * c)
    }

    /// Multiplies by `x^dx p^dp`.
    pub fn shift(&self, dx: i64, dp: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&(a, b), c)| ((a + dx, b + dp), c.clone())).collect() }
    }

    /// Realizes `f(q^r x, q^s p)`: each `x^a p^b` gains `q^{r a + s b}`.
    pub fn dilate(&self, x_power: i64, p_power: i64) -> Self {
        self.map_terms(|(a, b), c| ((a, b), c.shift_q(x_power * a + p_power * b)))
    }

    fn map_terms(&self, f: impl Fn(Exponents, &Coefficient<T>) -> (Exponents, Coefficient<T>)) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let (e2, c2) = f(*e, c);
            out.add_term(e2, c2);
        }
        out
    }

    pub fn apply(&self, d: Derivation) -> Result<Self> {
        apply_derivation(d, self)
    }

    /// Substitutes `q = 1` in every coefficient.
    pub fn at_q_one(&self) -> Self {
        self.map_coefficients(Coefficient::at_q_one)
    }

    pub fn at_kappa(&self, kappa: &T) -> Self {
        self.map_coefficients(|c| c.at_kappa(kappa))
    }

    pub fn at_q(&self, q: &T) -> Result<Self> {
        self.try_map_coefficients(|c| c.at_q(q))
    }

    /// Numeric value at `(x, p)` with `q` and `kappa` substituted.
    pub fn eval<F: Float>(&self, x: F, p: F, q: F, kappa: F) -> Result<F> {
        let mut acc = F::zero();
        for (&(a, b), c) in &self.terms {
            acc = acc + c.eval_float(q, kappa)? * float_pow(x, a, 'x')? * float_pow(p, b, 'p')?;
        }
        Ok(acc)
    }

    /// Converts to `(x_exponent, p_exponent, value)` triples at fixed `q`, `kappa`.
    pub fn to_numeric<F: Float>(&self, q: F, kappa: F) -> Result<Vec<(i64, i64, F)>> {
        self.terms.iter().map(|(&(a, b), c)| Ok((a, b, c.eval_float(q, kappa)?))).collect()
    }
}

pub(crate) fn float_pow<F: Float>(v: F, e: i64, var: char) -> Result<F> {
    if e < 0 && v.is_zero() {
        return Err(Error::Pole { var });
    }
    Ok(v.powi(i32::try_from(e).expect("exponent out of i32 range")))
}

/// Evaluates `f` at `(x, p)` using `q` and `kappa` from the parameters.
pub fn eval_poly<T: ExactScalar, F: Float>(
    f: &PhasePoly<T>,
    x: F,
    p: F,
    params: &crate::qdiff::QParams<F>,
) -> Result<F> {
    f.eval(x, p, params.q, params.kappa)
}

/// Linear operators acting monomial-wise on [`PhasePoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    /// `d/dx`
    Dx,
    /// `d/dp`
    Dp,
    /// Euler operator `x d/dx`
    XDx,
    /// Euler operator `p d/dp`
    PDp,
    /// q-derivative in `x`: `x^a -> [a] x^{a-1}`
    QDx(QConvention),
    /// q-derivative in `p`: `p^b -> [b] p^{b-1}`
    QDp(QConvention),
}

pub fn apply_derivation<T: ExactScalar>(d: Derivation, f: &PhasePoly<T>) -> Result<PhasePoly<T>> {
    let mut out = PhasePoly::zero();
    for (&(a, b), c) in &f.terms {
        let (e, factor) = match d {
            Derivation::Dx => ((a - 1, b), Coefficient::integer(a)),
            Derivation::Dp => ((a, b - 1), Coefficient::integer(b)),
            Derivation::XDx => ((a, b), Coefficient::integer(a)),
            Derivation::PDp => ((a, b), Coefficient::integer(b)),
            Derivation::QDx(conv) => ((a - 1, b), qint(a, conv)?),
            Derivation::QDp(conv) => ((a, b - 1), qint(b, conv)?),
        };
        out.add_term(e, c * &factor);
    }
    Ok(out)
}

/// Commutative product.
pub fn poly_mul<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> PhasePoly<T> {
    let mut out = PhasePoly::zero();
    for (&(a, b), cf) in &f.terms {
        for (&(c, d), cg) in &g.terms {
            out.add_term((a + c, b + d), cf * cg);
        }
    }
    out
}

impl<T: ExactScalar> From<Coefficient<T>> for PhasePoly<T> {
    fn from(c: Coefficient<T>) -> Self {
        Self::constant(c)
    }
}

impl<T: ExactScalar> AddAssign<&PhasePoly<T>> for PhasePoly<T> {
    fn add_assign(&mut self, rhs: &PhasePoly<T>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<T: ExactScalar> SubAssign<&PhasePoly<T>> for PhasePoly<T> {
    fn sub_assign(&mut self, rhs: &PhasePoly<T>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl<T: ExactScalar> Add for &PhasePoly<T> {
    type Output = PhasePoly<T>;
    fn add(self, rhs: &PhasePoly<T>) -> PhasePoly<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: ExactScalar> Sub for &PhasePoly<T> {
    type Output = PhasePoly<T>;
    fn sub(self, rhs: &PhasePoly<T>) -> PhasePoly<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: ExactScalar> Mul for &PhasePoly<T> {
    type Output = PhasePoly<T>;
    fn mul(self, rhs: &PhasePoly<T>) -> PhasePoly<T> {
        poly_mul(self, rhs)
    }
}

impl<T: ExactScalar> Neg for &PhasePoly<T> {
    type Output = PhasePoly<T>;
    fn neg(self) -> PhasePoly<T> {
        self.map_coefficients(|c| -c)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: ExactScalar> $tr for PhasePoly<T> {
            type Output = PhasePoly<T>;
            fn $m(self, rhs: PhasePoly<T>) -> PhasePoly<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: ExactScalar> $tr<&PhasePoly<T>> for PhasePoly<T> {
            type Output = PhasePoly<T>;
            fn $m(self, rhs: &PhasePoly<T>) -> PhasePoly<T> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<T: ExactScalar> Neg for PhasePoly<T> {
    type Output = PhasePoly<T>;
    fn neg(self) -> PhasePoly<T> {
        -&self
    }
}

impl<T: ExactScalar> Zero for PhasePoly<T> {
    fn zero() -> Self {
        PhasePoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: ExactScalar> One for PhasePoly<T> {
    fn one() -> Self {
        PhasePoly::one()
    }
}
