//! q-difference operators on the line and on the `q`-lattice of the phase plane,
//! with their Jackson-type series inverses.
//!
//! Two backends share the same formulas:
//! * numeric, on anything implementing [`LineFn`] / [`PlaneFn`] (named families,
//!   sampled grids, closures), with geometric tail bounds on every inverse series;
//! * symbolic, on [`PhasePoly`], where dilations are exact; the result is a
//!   polynomial over the operator's fixed `q`-denominator ([`QuotientPoly`]).
//!
//! Lattice inverses (fixed `0 < q < 1`, `m, n > 0`):
//!
//! ```text
//! jackson(f)(y)            = y (1 - q^2) sum_k q^{2k} f(y q^{2k})
//! nabla_hat^{-1} g (x, p)  = -(q^{2m}-1)(q^{2n}-1) x p sum_k q^{2(m+n)k} g(q^{2mk} x, q^{2nk} p)
//! nabla_check^{-1} g (x,p) = -(q^m-q^{-m})(q^n-q^{-n}) x p sum_k q^{(2k+1)(m+n)} g(q^{(2k+1)m} x, q^{(2k+1)n} p)
//! ```
//!
//! The shift inverse works on a constant step `2 lam` instead:
//! `G(y) = -2 lam sum_n g(y + 2 n lam)` satisfies `(G(y + 2 lam) - G(y)) / (2 lam) = g(y)`.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::phase::{Exponents, PhasePoly};
use crate::ring::{Coefficient, ExactScalar};

/// Numeric evaluation context.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QParams<F> {
    /// Lattice ratio, `q > 0`, `q != 1`.
    pub q: F,
    /// Constant step for [`shift_inverse`]; unused by the lattice operators.
    pub lam: Option<F>,
    /// Value substituted for `kappa` when evaluating symbolic coefficients.
    pub kappa: F,
    /// Absolute truncation tolerance for series.
    pub tol: F,
    pub max_terms: usize,
}

impl<F: Float> QParams<F> {
    pub fn new(q: F) -> Self {
        Self { q, lam: None, kappa: F::zero(), tol: F::epsilon() * F::from(8.0).unwrap(), max_terms: 100_000 }
    }

    pub fn with_tol(mut self, tol: F) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_lam(mut self, lam: F) -> Self {
        self.lam = Some(lam);
        self
    }

    pub fn with_max_terms(mut self, n: usize) -> Self {
        self.max_terms = n;
        self
    }

    fn check_q(&self) -> Result<()> {
        if !(self.q > F::zero()) || self.q == F::one() {
            return Err(Error::OutOfRange(format!(
                "q must be positive and != 1, got {}",
                self.q.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }

    fn check_contracting(&self) -> Result<()> {
        self.check_q()?;
        if self.q >= F::one() {
            return Err(Error::OutOfRange("inverse series need 0 < q < 1".into()));
        }
        Ok(())
    }
}

/// Result of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue<F> {
    pub value: F,
    /// Number of terms summed.
    pub terms: usize,
    /// Bound on the neglected tail.
    pub tail_bound: F,
}

/// A real function of one variable.
pub trait LineFn<F> {
    fn eval(&self, x: F) -> F;
}

impl<F, T: Fn(F) -> F> LineFn<F> for T {
    fn eval(&self, x: F) -> F {
        self(x)
    }
}

/// A real function on the phase plane.
pub trait PlaneFn<F> {
    fn eval(&self, x: F, p: F) -> F;
}

impl<F, T: Fn(F, F) -> F> PlaneFn<F> for T {
    fn eval(&self, x: F, p: F) -> F {
        self(x, p)
    }
}

/// Named one-variable families, evaluable anywhere.
#[derive(Clone, Debug, PartialEq)]
pub enum LineFamily<F> {
    /// `exp(-((x - center)/width)^2)`
    Gaussian { center: F, width: F },
    /// `exp(-rate x)`
    ExpDecay { rate: F },
    /// `sum c x^e`
    Polynomial(Vec<(i64, F)>),
}

impl<F: Float> LineFn<F> for LineFamily<F> {
    fn eval(&self, x: F) -> F {
        match self {
            LineFamily::Gaussian { center, width } => {
                let u = (x - *center) / *width;
                (-u * u).exp()
            }
            LineFamily::ExpDecay { rate } => (-*rate * x).exp(),
            LineFamily::Polynomial(terms) => terms.iter().fold(F::zero(), |acc, &(e, c)| acc + c * x.powi(e as i32)),
        }
    }
}

/// Regularly sampled function on a box, bilinearly interpolated. NaN outside the box.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGrid<F> {
    pub x_range: (F, F),
    pub p_range: (F, F),
    pub nx: usize,
    pub np: usize,
    /// Row-major: `values[i * np + j]` at `(x_i, p_j)`.
    pub values: Vec<F>,
}

impl<F: Float> SampledGrid<F> {
    pub fn from_fn(x_range: (F, F), p_range: (F, F), nx: usize, np: usize, f: impl PlaneFn<F>) -> Self {
        let mut values = Vec::with_capacity(nx * np);
        for i in 0..nx {
            for j in 0..np {
                values.push(f.eval(axis_point(x_range, nx, i), axis_point(p_range, np, j)));
            }
        }
        Self { x_range, p_range, nx, np, values }
    }
}

fn axis_point<F: Float>(range: (F, F), n: usize, i: usize) -> F {
    if n < 2 {
        return range.0;
    }
    range.0 + (range.1 - range.0) * F::from(i).unwrap() / F::from(n - 1).unwrap()
}

fn axis_locate<F: Float>(range: (F, F), n: usize, v: F) -> Option<(usize, F)> {
    if n < 2 || v < range.0 || v > range.1 {
        return None;
    }
    let t = (v - range.0) / (range.1 - range.0) * F::from(n - 1).unwrap();
    let i = t.floor().to_usize()?.min(n - 2);
    Some((i, t - F::from(i).unwrap()))
}

impl<F: Float> PlaneFn<F> for SampledGrid<F> {
    fn eval(&self, x: F, p: F) -> F {
        let (Some((i, tx)), Some((j, tp))) =
            (axis_locate(self.x_range, self.nx, x), axis_locate(self.p_range, self.np, p))
        else {
            return F::nan();
        };
        let at = |a: usize, b: usize| self.values[a * self.np + b];
        let one = F::one();
        at(i, j) * (one - tx) * (one - tp)
            + at(i + 1, j) * tx * (one - tp)
            + at(i, j + 1) * (one - tx) * tp
            + at(i + 1, j + 1) * tx * tp
    }
}

/// Phase-plane test functions.
#[derive(Clone, Debug, PartialEq)]
pub enum GridFn<F> {
    /// `exp(-((x - x0)^2 + (p - p0)^2) / width^2)`
    Gaussian {
        x0: F,
        p0: F,
        width: F,
    },
    /// `exp(-rate (|x| + |p|))`
    ExpDecay {
        rate: F,
    },
    /// `sum c x^a p^b`
    Polynomial(Vec<(i64, i64, F)>),
    Sampled(SampledGrid<F>),
}

impl<F: Float> GridFn<F> {
    /// Numeric snapshot of a symbolic polynomial at fixed `q`, `kappa`.
    pub fn from_poly<T: ExactScalar>(f: &PhasePoly<T>, params: &QParams<F>) -> Result<Self> {
        Ok(GridFn::Polynomial(f.to_numeric(params.q, params.kappa)?))
    }
}

impl<F: Float> PlaneFn<F> for GridFn<F> {
    fn eval(&self, x: F, p: F) -> F {
        match self {
            GridFn::Gaussian { x0, p0, width } => {
                let dx = x - *x0;
                let dp = p - *p0;
                (-(dx * dx + dp * dp) / (*width * *width)).exp()
            }
            GridFn::ExpDecay { rate } => (-*rate * (x.abs() + p.abs())).exp(),
            GridFn::Polynomial(terms) => {
                terms.iter().fold(F::zero(), |acc, &(a, b, c)| acc + c * x.powi(a as i32) * p.powi(b as i32))
            }
            GridFn::Sampled(s) => s.eval(x, p),
        }
    }
}

fn powi<F: Float>(v: F, e: i64) -> F {
    v.powi(i32::try_from(e).expect("exponent out of i32 range"))
}

fn nonzero<F: Float>(v: F, what: &str) -> Result<F> {
    if v.is_zero() {
        Err(Error::ZeroDenominator(what.into()))
    } else {
        Ok(v)
    }
}

/// Sums `prefactor * sum_k ratio^k * sample(k)` for `0 < ratio < 1`.
///
/// The tail after term `K` is bounded by `|prefactor| M ratio^{K+1} / (1 - ratio)`
/// where `M` is the larger of the last two sample magnitudes; the samples are
/// taken ever closer to the origin, where the function is assumed bounded by them.
fn lattice_series<F: Float>(
    prefactor: F,
    ratio: F,
    params: &QParams<F>,
    mut sample: impl FnMut(usize) -> F,
) -> Result<SeriesValue<F>> {
    let mut terms = Vec::new();
    let mut weight = F::one();
    let mut prev_mag = F::zero();
    let one = F::one();
    for k in 0..params.max_terms {
        let s = sample(k);
        if !s.is_finite() {
            return Err(Error::OutOfRange(format!("non-finite sample at lattice index {k}")));
        }
        let term = prefactor * weight * s;
        terms.push(term);
        let m = s.abs().max(prev_mag);
        prev_mag = s.abs();
        weight = weight * ratio;
        let tail = prefactor.abs() * m * weight / (one - ratio);
        if k >= 1 && term.abs() <= params.tol && tail <= params.tol {
            terms.reverse();
            return Ok(SeriesValue { value: pairwise_sum(&terms, F::zero()), terms: k + 1, tail_bound: tail });
        }
    }
    Err(Error::NonConvergent {
        terms: params.max_terms,
        last_term: terms.last().map_or(f64::NAN, |t| t.to_f64().unwrap_or(f64::NAN)),
    })
}

/// `(f(q^2 x) - f(x)) / ((q^2 - 1) x)`
pub fn dq2<F: Float>(f: &impl LineFn<F>, x: F, params: &QParams<F>) -> Result<F> {
    params.check_q()?;
    let q2 = params.q * params.q;
    let den = nonzero((q2 - F::one()) * x, "x = 0 in dq2")?;
    Ok((f.eval(q2 * x) - f.eval(x)) / den)
}

/// Jackson integral `int_0^y f d_{q^2}x = y (1 - q^2) sum_n f(y q^{2n}) q^{2n}`, `0 < q < 1`.
pub fn jackson<F: Float>(f: &impl LineFn<F>, y: F, params: &QParams<F>) -> Result<SeriesValue<F>> {
    params.check_contracting()?;
    let q2 = params.q * params.q;
    let mut point = y;
    lattice_series(y * (F::one() - q2), q2, params, |k| {
        if k > 0 {
            point = point * q2;
        }
        f.eval(point)
    })
}

/// `G(y) = -2 lam sum_{n >= 0} g(y + 2 n lam)`, so that `(G(y + 2 lam) - G(y)) / (2 lam) = g(y)`.
///
/// The tail is estimated from the observed term ratio `r < 1` as `2 lam |t_n| r / (1 - r)`;
/// `g` must decay at least geometrically along the step.
pub fn shift_inverse<F: Float>(g: &impl LineFn<F>, y: F, lam: F, params: &QParams<F>) -> Result<SeriesValue<F>> {
    if !(lam > F::zero()) {
        return Err(Error::OutOfRange("lam must be positive".into()));
    }
    let step = lam + lam;
    let mut samples = Vec::new();
    let mut prev = F::zero();
    for n in 0..params.max_terms {
        let t = g.eval(y + step * F::from(n).unwrap());
        if !t.is_finite() {
            return Err(Error::OutOfRange(format!("non-finite sample at step {n}")));
        }
        samples.push(t);
        let tail = if t.is_zero() && prev.is_zero() {
            F::zero()
        } else if n > 0 && t.abs() < prev.abs() {
            let r = t.abs() / prev.abs();
            step * t.abs() * r / (F::one() - r)
        } else {
            F::infinity()
        };
        prev = t;
        if n >= 1 && step * t.abs() <= params.tol && tail <= params.tol {
            samples.reverse();
            return Ok(SeriesValue {
                value: -step * pairwise_sum(&samples, F::zero()),
                terms: n + 1,
                tail_bound: tail,
            });
        }
    }
    Err(Error::NonConvergent { terms: params.max_terms, last_term: prev.to_f64().unwrap_or(f64::NAN) })
}

/// The shift inverse written on the `q`-lattice through `2 lam = (q^2 - 1) y`:
/// `(1 - q^2) y sum_n g(y + (q^2 - 1) n y)`. Needs `(q^2 - 1) y > 0`.
pub fn modified_jackson<F: Float>(g: &impl LineFn<F>, y: F, params: &QParams<F>) -> Result<SeriesValue<F>> {
    params.check_q()?;
    let two = F::one() + F::one();
    let lam = (params.q * params.q - F::one()) * y / two;
    shift_inverse(g, y, lam, params)
}

fn check_indices(m: i64, n: i64) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroDenominator("lattice indices m, n must be nonzero".into()));
    }
    Ok(())
}

/// `(f(x q^{2m}, p q^{2n}) - f(x, p)) / ((q^{2m} - 1) x (q^{2n} - 1) p)`
pub fn nabla_hat<F: Float>(f: &impl PlaneFn<F>, x: F, p: F, m: i64, n: i64, params: &QParams<F>) -> Result<F> {
    params.check_q()?;
    check_indices(m, n)?;
    let (qm, qn) = (powi(params.q, 2 * m), powi(params.q, 2 * n));
    let den = nonzero((qm - F::one()) * x * (qn - F::one()) * p, "x p = 0 in nabla_hat")?;
    Ok((f.eval(x * qm, p * qn) - f.eval(x, p)) / den)
}

/// `(f(x q^m, p q^n) - f(x q^{-m}, p q^{-n})) / ((q^m - q^{-m})(q^n - q^{-n}) x p)`
pub fn nabla_check<F: Float>(f: &impl PlaneFn<F>, x: F, p: F, m: i64, n: i64, params: &QParams<F>) -> Result<F> {
    params.check_q()?;
    check_indices(m, n)?;
    let (qm, qn) = (powi(params.q, m), powi(params.q, n));
    let den = nonzero((qm - qm.recip()) * (qn - qn.recip()) * x * p, "x p = 0 in nabla_check")?;
    Ok((f.eval(x * qm, p * qn) - f.eval(x / qm, p / qn)) / den)
}

fn check_inverse_indices(m: i64, n: i64) -> Result<()> {
    if m <= 0 || n <= 0 {
        return Err(Error::OutOfRange("lattice inverses need m, n > 0".into()));
    }
    Ok(())
}

/// Extended Jackson integral inverting [`nabla_hat`].
pub fn nabla_hat_inverse<F: Float>(
    g: &impl PlaneFn<F>,
    x: F,
    p: F,
    m: i64,
    n: i64,
    params: &QParams<F>,
) -> Result<SeriesValue<F>> {
    params.check_contracting()?;
    check_inverse_indices(m, n)?;
    let (qm, qn) = (powi(params.q, 2 * m), powi(params.q, 2 * n));
    let pre = -(qm - F::one()) * (qn - F::one()) * x * p;
    let (mut xs, mut ps) = (x, p);
    lattice_series(pre, qm * qn, params, |k| {
        if k > 0 {
            xs = xs * qm;
            ps = ps * qn;
        }
        g.eval(xs, ps)
    })
}

/// Extended Jackson integral inverting [`nabla_check`]; equals
/// `q^{-m-n} nabla_hat^{-1} g (x q^m, p q^n)`.
pub fn nabla_check_inverse<F: Float>(
    g: &impl PlaneFn<F>,
    x: F,
    p: F,
    m: i64,
    n: i64,
    params: &QParams<F>,
) -> Result<SeriesValue<F>> {
    params.check_contracting()?;
    check_inverse_indices(m, n)?;
    let (qm, qn) = (powi(params.q, m), powi(params.q, n));
    let pre = -(qm - qm.recip()) * (qn - qn.recip()) * x * p * qm * qn;
    let (step_x, step_p) = (qm * qm, qn * qn);
    let (mut xs, mut ps) = (x * qm, p * qn);
    lattice_series(pre, step_x * step_p, params, |k| {
        if k > 0 {
            xs = xs * step_x;
            ps = ps * step_p;
        }
        g.eval(xs, ps)
    })
}

fn q_difference<T: ExactScalar>(hi: i64, lo: i64) -> Coefficient<T> {
    &Coefficient::q_pow(hi) - &Coefficient::q_pow(lo)
}

/// `numerator / denominator` with a `kappa`-free Laurent denominator shared by every term.
///
/// The lattice operators divide by a fixed `q`-polynomial, so their exact image of a
/// polynomial is a polynomial over that denominator; [`QuotientPoly::reduce`] cancels it
/// when every coefficient is divisible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPoly<T> {
    pub numerator: PhasePoly<T>,
    pub denominator: Coefficient<T>,
}

impl<T: ExactScalar> QuotientPoly<T> {
    /// The plain polynomial, if the denominator divides every coefficient.
    pub fn reduce(&self) -> Result<PhasePoly<T>> {
        self.numerator.try_map_coefficients(|c| c.div_exact(&self.denominator))
    }

    pub fn eval<F: Float>(&self, x: F, p: F, q: F, kappa: F) -> Result<F> {
        let den = nonzero(self.denominator.eval_float(q, kappa)?, "denominator vanishes at q")?;
        Ok(self.numerator.eval(x, p, q, kappa)? / den)
    }
}

fn divided<T: ExactScalar>(
    f: &PhasePoly<T>,
    denominator: Coefficient<T>,
    shift: Exponents,
    numerator: impl Fn(i64, i64) -> Coefficient<T>,
) -> QuotientPoly<T> {
    let mut out = PhasePoly::zero();
    for (&(a, b), c) in f.terms() {
        out.add_term((a + shift.0, b + shift.1), c * &numerator(a, b));
    }
    QuotientPoly { numerator: out, denominator }
}

/// Exact `dq2`: `x^a -> (q^{2a} - 1) x^{a-1} / (q^2 - 1)`. Always reduces for `a >= 0`.
pub fn dq2_symbolic<T: ExactScalar>(f: &PhasePoly<T>) -> QuotientPoly<T> {
    divided(f, q_difference(2, 0), (-1, 0), |a, _| q_difference(2 * a, 0))
}

/// Exact [`nabla_hat`]: `x^a p^b -> (q^{2(ma+nb)} - 1) x^{a-1} p^{b-1} / ((q^{2m}-1)(q^{2n}-1))`.
pub fn nabla_hat_symbolic<T: ExactScalar>(f: &PhasePoly<T>, m: i64, n: i64) -> Result<QuotientPoly<T>> {
    check_indices(m, n)?;
    let den = &q_difference(2 * m, 0) * &q_difference(2 * n, 0);
    Ok(divided(f, den, (-1, -1), |a, b| q_difference(2 * (m * a + n * b), 0)))
}

/// Exact [`nabla_check`]: `x^a p^b -> (q^e - q^{-e}) x^{a-1} p^{b-1} / ((q^m-q^{-m})(q^n-q^{-n}))`, `e = ma + nb`.
pub fn nabla_check_symbolic<T: ExactScalar>(f: &PhasePoly<T>, m: i64, n: i64) -> Result<QuotientPoly<T>> {
    check_indices(m, n)?;
    let den = &q_difference(m, -m) * &q_difference(n, -n);
    Ok(divided(f, den, (-1, -1), |a, b| {
        let e = m * a + n * b;
        q_difference(e, -e)
    }))
}
