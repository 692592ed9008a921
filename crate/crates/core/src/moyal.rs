//! The kappa-deformed Moyal star product and bracket on phase-space polynomials.
//!
//! With `kappa` standing in for `i hbar / 2`,
//!
//! ```text
//! f * g     = sum_s kappa^s / s!        sum_j (-1)^j C(s, j)     (dx^j dp^(s-j) f)(dx^(s-j) dp^j g)
//! {f, g}_k  = sum_s kappa^2s / (2s+1)!  sum_j (-1)^j C(2s+1, j) (dx^j dp^(2s+1-j) f)(dx^(2s+1-j) dp^j g)
//! ```
//!
//! so that `2 kappa {f, g}_k = f * g - g * f` and `{f, g}_k` at `kappa = 0` is
//! `dp f dx g - dx f dp g`.
//!
//! Both series are evaluated pairwise on monomials. For nonnegative exponents the
//! series stop by themselves; Laurent arguments need [`StarSeriesLimit::Order`]
//! unless the opposing factor is polynomial in the relevant variable.

use crate::error::{Error, Result};
use crate::phase::{Exponents, PhasePoly};
use crate::ring::{CoeffKey, Coefficient, ExactScalar};

/// Upper bound on the summation index `s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StarSeriesLimit {
    /// Sum until every term vanishes identically.
    #[default]
    Auto,
    /// Keep terms with `s <= n`.
    Order(u32),
}

/// `a (a-1) ... (a-j+1)`; nonzero for all `j` when `a < 0`.
fn falling<T: ExactScalar>(a: i64, j: i64) -> T {
    (0..j).fold(T::one(), |acc, i| acc * T::from_i64(a - i))
}

fn factorial<T: ExactScalar>(n: i64) -> T {
    falling(n, n)
}

/// Largest `j` for which `dx^j` of `x^a` times `dp^j` of `p^d` can be nonzero.
fn derivative_cap(a: i64, d: i64) -> Option<i64> {
    match (a >= 0, d >= 0) {
        (true, true) => Some(a.min(d)),
        (true, false) => Some(a),
        (false, true) => Some(d),
        (false, false) => None,
    }
}

/// `(j_max, k_max, s_max)` for the pair `x^a p^b`, `x^c p^d`: only terms with
/// `j <= j_max` x-derivatives on `f` and `s - j <= k_max` p-derivatives on `f` survive.
fn series_bounds(f: Exponents, g: Exponents, limit: StarSeriesLimit) -> Result<(i64, i64, i64)> {
    let (a, b) = f;
    let (c, d) = g;
    let j_cap = derivative_cap(a, d);
    let k_cap = derivative_cap(b, c);
    match limit {
        StarSeriesLimit::Auto => match (j_cap, k_cap) {
            (Some(j), Some(k)) => Ok((j, k, j + k)),
            _ => Err(Error::NonTerminatingSeries),
        },
        StarSeriesLimit::Order(n) => {
            let n = n as i64;
            let j = j_cap.unwrap_or(n).min(n);
            let k = k_cap.unwrap_or(n).min(n);
            Ok((j, k, (j + k).min(n)))
        }
    }
}

/// Coefficient of `kappa^s` for the monomial pair, i.e.
/// `sum_j (-1)^j ff(a,j) ff(d,j) ff(b,s-j) ff(c,s-j) / (j! (s-j)!)`.
fn order_s_weight<T: ExactScalar>(f: Exponents, g: Exponents, s: i64, j_max: i64, k_max: i64) -> T {
    let (a, b) = f;
    let (c, d) = g;
    let mut acc = T::zero();
    let lo = (s - k_max).max(0);
    let hi = s.min(j_max);
    for j in lo..=hi {
        let k = s - j;
        let num = falling::<T>(a, j) * falling(d, j) * falling(b, k) * falling(c, k);
        if num.is_zero() {
            continue;
        }
        let term = num / (factorial::<T>(j) * factorial(k));
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Kappa-star product with automatic termination.
pub fn star_kappa<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> Result<PhasePoly<T>> {
    star_kappa_with(f, g, StarSeriesLimit::Auto)
}

pub fn star_kappa_with<T: ExactScalar>(
    f: &PhasePoly<T>,
    g: &PhasePoly<T>,
    limit: StarSeriesLimit,
) -> Result<PhasePoly<T>> {
    let mut out = PhasePoly::zero();
    for (&ef, cf) in f.terms() {
        for (&eg, cg) in g.terms() {
            let (j_max, k_max, s_max) = series_bounds(ef, eg, limit)?;
            let base = cf * cg;
            for s in 0..=s_max {
                let w: T = order_s_weight(ef, eg, s, j_max, k_max);
                if w.is_zero() {
                    continue;
                }
                let factor = Coefficient::term(w, 0, s as u32);
                out.add_term((ef.0 + eg.0 - s, ef.1 + eg.1 - s), &base * &factor);
            }
        }
    }
    Ok(out)
}

/// Moyal bracket `(f * g - g * f) / (2 kappa)`, summed as its own odd-order series.
pub fn bracket_kappa<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> Result<PhasePoly<T>> {
    bracket_kappa_with(f, g, StarSeriesLimit::Auto)
}

pub fn bracket_kappa_with<T: ExactScalar>(
    f: &PhasePoly<T>,
    g: &PhasePoly<T>,
    limit: StarSeriesLimit,
) -> Result<PhasePoly<T>> {
    let mut out = PhasePoly::zero();
    for (&ef, cf) in f.terms() {
        for (&eg, cg) in g.terms() {
            let (j_max, k_max, s_max) = series_bounds(ef, eg, limit)?;
            let base = cf * cg;
            // order 2t+1 in the derivatives carries kappa^{2t}
            let mut s = 1;
            while s <= s_max {
                let w: T = order_s_weight(ef, eg, s, j_max, k_max);
                if !w.is_zero() {
                    let mut factor = Coefficient::zero();
                    factor.add_term(CoeffKey::new(0, (s - 1) as u32), w);
                    out.add_term((ef.0 + eg.0 - s, ef.1 + eg.1 - s), &base * &factor);
                }
                s += 2;
            }
        }
    }
    Ok(out)
}

/// Poisson bracket `dp f dx g - dx f dp g`.
pub fn poisson<T: ExactScalar>(f: &PhasePoly<T>, g: &PhasePoly<T>) -> PhasePoly<T> {
    let mut out = PhasePoly::zero();
    for (&(a, b), cf) in f.terms() {
        for (&(c, d), cg) in g.terms() {
            let w = b * c - a * d;
            if w != 0 {
                out.add_term((a + c - 1, b + d - 1), &(cf * cg) * &Coefficient::integer(w));
            }
        }
    }
    out
}
