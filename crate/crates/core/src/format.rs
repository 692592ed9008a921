//! Canonical text rendering and the JSON exchange format.
//!
//! Text: terms of a [`PhasePoly`] in descending `x` then `p` exponent, each as
//! `coefficient*x^a*p^b`. Coefficient terms run in ascending `kappa`, descending `q`,
//! with factors ordered rational, `kappa`, `q`; fractions are parenthesized and half
//! q-exponents are written `q^(n/2)`. A coefficient with several terms is parenthesized
//! with its leading sign pulled out, except on the constant monomial where it is
//! spliced into the sum.
//!
//! JSON: `{"terms":[{"xe":..,"pe":..,"coeff":[{"qe":..,"ke":..,"num":"..","den":".."}]}]}`
//! where `qe` is an integer, or the string `"n/2"` for half exponents.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhasePoly;
use crate::ring::{CoeffKey, Coefficient, ExactScalar};

fn write_rational<T: ExactScalar>(out: &mut String, v: &T) {
    if v.is_integral() {
        out.push_str(&v.numer_string());
    } else {
        let _ = write!(out, "({}/{})", v.numer_string(), v.denom_string());
    }
}

fn q_power(h: i64) -> Option<String> {
    match h {
        0 => None,
        2 => Some("q".into()),
        _ if h % 2 == 0 => Some(format!("q^{}", h / 2)),
        _ => Some(format!("q^({h}/2)")),
    }
}

/// One coefficient term with a non-negative magnitude; the sign is handled by the caller.
fn write_key_term<T: ExactScalar>(out: &mut String, key: CoeffKey, magnitude: &T, trailing: &[String]) {
    let mut factors: Vec<String> = Vec::new();
    match key.kappa {
        0 => {}
        1 => factors.push("kappa".into()),
        k => factors.push(format!("kappa^{k}")),
    }
    factors.extend(q_power(key.q_half));
    factors.extend(trailing.iter().cloned());
    let unit = magnitude.is_one();
    if !unit || factors.is_empty() {
        write_rational(out, magnitude);
        if !factors.is_empty() {
            out.push('*');
        }
    }
    out.push_str(&factors.join("*"));
}

/// Appends `t` with its sign: `"- "`/`"+ "` separators unless `first`.
fn push_signed(out: &mut String, negative: bool, first: bool, body: &str) {
    match (first, negative) {
        (true, false) => {}
        (true, true) => out.push('-'),
        (false, false) => out.push_str(" + "),
        (false, true) => out.push_str(" - "),
    }
    out.push_str(body);
}

fn coefficient_terms<T: ExactScalar>(c: &Coefficient<T>, out: &mut String, mut first: bool, trailing: &[String]) {
    for (key, v) in c.canonical_terms() {
        let mut body = String::new();
        write_key_term(&mut body, key, &v.abs(), trailing);
        push_signed(out, v.is_negative(), first, &body);
        first = false;
    }
}

impl<T: ExactScalar> fmt::Display for Coefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        coefficient_terms(self, &mut s, true, &[]);
        f.write_str(&s)
    }
}

fn monomial_factors(a: i64, b: i64) -> Vec<String> {
    let mut v = Vec::new();
    for (name, e) in [("x", a), ("p", b)] {
        match e {
            0 => {}
            1 => v.push(name.to_string()),
            _ => v.push(format!("{name}^{e}")),
        }
    }
    v
}

impl<T: ExactScalar> fmt::Display for PhasePoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        let mut first = true;
        for (&(a, b), c) in self.canonical_terms() {
            let mono = monomial_factors(a, b);
            if c.len() == 1 || mono.is_empty() {
                coefficient_terms(c, &mut s, first, &mono);
            } else {
                let terms = c.canonical_terms();
                let negative = terms[0].1.is_negative();
                let inner = if negative { -c.clone() } else { c.clone() };
                let body = format!("({inner})*{}", mono.join("*"));
                push_signed(&mut s, negative, first, &body);
            }
            first = false;
        }
        f.write_str(&s)
    }
}

/// JSON q-exponent: an integer, or `"n/2"` for odd half-units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QExponent {
    Int(i64),
    Half(String),
}

impl QExponent {
    fn from_half(h: i64) -> Self {
        if h % 2 == 0 {
            QExponent::Int(h / 2)
        } else {
            QExponent::Half(format!("{h}/2"))
        }
    }

    fn to_half(&self) -> Result<i64> {
        match self {
            QExponent::Int(e) => Ok(2 * e),
            QExponent::Half(s) => s
                .strip_suffix("/2")
                .and_then(|n| n.trim().parse::<i64>().ok())
                .ok_or_else(|| Error::OutOfRange(format!("bad q exponent {s:?}, expected \"n/2\""))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffTermJson {
    pub qe: QExponent,
    pub ke: u32,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub xe: i64,
    pub pe: i64,
    pub coeff: Vec<CoeffTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

pub fn coefficient_to_json<T: ExactScalar>(c: &Coefficient<T>) -> Vec<CoeffTermJson> {
    c.canonical_terms()
        .into_iter()
        .map(|(k, v)| CoeffTermJson {
            qe: QExponent::from_half(k.q_half),
            ke: k.kappa,
            num: v.numer_string(),
            den: v.denom_string(),
        })
        .collect()
}

pub fn coefficient_from_json<T: ExactScalar>(terms: &[CoeffTermJson]) -> Result<Coefficient<T>> {
    let mut c = Coefficient::zero();
    for t in terms {
        let v = T::from_decimal_parts(&t.num, &t.den)
            .ok_or_else(|| Error::OutOfRange(format!("bad rational {}/{}", t.num, t.den)))?;
        c.add_term(CoeffKey::new(t.qe.to_half()?, t.ke), v);
    }
    Ok(c)
}

pub fn to_json<T: ExactScalar>(f: &PhasePoly<T>) -> PolyJson {
    PolyJson {
        terms: f.canonical_terms().map(|(&(xe, pe), c)| TermJson { xe, pe, coeff: coefficient_to_json(c) }).collect(),
    }
}

pub fn from_json<T: ExactScalar>(j: &PolyJson) -> Result<PhasePoly<T>> {
    let mut f = PhasePoly::zero();
    for t in &j.terms {
        f.add_term((t.xe, t.pe), coefficient_from_json(&t.coeff)?);
    }
    Ok(f)
}
