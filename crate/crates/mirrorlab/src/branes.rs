//! Brane K-classes as Laurent polynomials in the fundamental character `T`.
//!
//! Sign convention: central charges follow the opposite sign to the usual
//! matrix-factorization literature; the overall minus of the hemisphere
//! integral lives in `mb`, not here.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rug::float::Constant;
use rug::{Complex, Float};
use serde_json::{json, Map, Value};

use crate::exact::{binomial, int};
use crate::{Error, Rational, Result};

/// `Σ c_n T^n` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentChar {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentChar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(n: i64, c: i64) -> Self {
        Self::from_terms(&[(n, c)])
    }

    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut out = Self::zero();
        for &(n, c) in terms {
            out.add_term(n, BigInt::from(c));
        }
        out
    }

    fn add_term(&mut self, n: i64, c: BigInt) {
        let e = self.coeffs.entry(n).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn coeff(&self, n: i64) -> BigInt {
        self.coeffs.get(&n).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest `|n|` in the support.
    pub fn max_abs_exp(&self) -> Option<i64> {
        self.coeffs.keys().map(|n| n.abs()).max()
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentChar { coeffs: self.coeffs.iter().map(|(n, c)| (n + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for (n, a) in &self.coeffs {
            out.add_term(*n, a * c);
        }
        out
    }

    /// Value at `T = x` for a nonzero rational `x`.
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (n, c)| {
            let p = if *n >= 0 { x.pow(*n as i32) } else { x.recip().pow((-n) as i32) };
            acc + p * Rational::from_integer(c.clone())
        })
    }

    /// Chern-character insertion `σ ↦ Σ c_n e^{2πinσ}`.
    pub fn insertion(&self, sigma: &Complex, prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        let two_pi_i = {
            let pi = Float::with_val(prec, Constant::Pi);
            Complex::with_val(prec, (Float::new(prec), pi * 2u32))
        };
        let base = Complex::with_val(prec, &two_pi_i * sigma);
        for (n, c) in &self.coeffs {
            let e = Complex::with_val(prec, &base * *n).exp();
            let cf = Float::with_val(prec, rug::Integer::from_str_radix(&c.to_string(), 10).unwrap());
            acc += e * cf;
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (n, c) in &self.coeffs {
            m.insert(n.to_string(), crate::series::bigint_json(c));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Domain("character must be a JSON object".into()))?;
        let mut out = Self::zero();
        for (k, c) in obj {
            let n: i64 = k.trim().parse().map_err(|_| Error::Domain(format!("bad exponent `{k}`")))?;
            let c: BigInt = c
                .to_string()
                .trim_matches('"')
                .parse()
                .map_err(|_| Error::Domain(format!("bad coefficient for T^{n}")))?;
            out.add_term(n, c);
        }
        Ok(out)
    }

    /// Quotient and remainder for division by a divisor whose lowest term has
    /// coefficient `±1`. Terms are eliminated from the bottom exponent up, so
    /// the remainder sits strictly above `self.max_exp() - deg(divisor)`.
    pub fn div_rem(&self, divisor: &LaurentChar) -> Result<(LaurentChar, LaurentChar)> {
        let (lo, hi) = match (divisor.min_exp(), divisor.max_exp()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Domain("division by zero character".into())),
        };
        let lead = divisor.coeff(lo);
        if !lead.abs().is_one() {
            return Err(Error::Domain("divisor must have a unit lowest coefficient".into()));
        }
        let mut rem = self.clone();
        let mut quot = LaurentChar::zero();
        let Some(top) = self.max_exp() else { return Ok((quot, rem)) };
        while let Some(m) = rem.min_exp() {
            if m + (hi - lo) > top {
                break;
            }
            let c = rem.coeff(m) * &lead;
            let k = m - lo;
            quot.add_term(k, c.clone());
            rem = &rem - &divisor.shift(k).scale(&c);
        }
        Ok((quot, rem))
    }
}

impl Add for &LaurentChar {
    type Output = LaurentChar;
    fn add(self, o: &LaurentChar) -> LaurentChar {
        let mut out = self.clone();
        for (n, c) in &o.coeffs {
            out.add_term(*n, c.clone());
        }
        out
    }
}

impl Neg for &LaurentChar {
    type Output = LaurentChar;
    fn neg(self) -> LaurentChar {
        self.scale(&-BigInt::one())
    }
}

impl Sub for &LaurentChar {
    type Output = LaurentChar;
    fn sub(self, o: &LaurentChar) -> LaurentChar {
        self + &-o
    }
}

impl Mul for &LaurentChar {
    type Output = LaurentChar;
    fn mul(self, o: &LaurentChar) -> LaurentChar {
        let mut out = LaurentChar::zero();
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl fmt::Display for LaurentChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.coeffs.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            match *n {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if *n == 1 { write!(f, "T")? } else { write!(f, "T^{n}")? }
                }
            }
        }
        Ok(())
    }
}

/// `T^twist ∏ (1 - T^{-w})`.
pub fn koszul_char(weights: &[i64], twist: i64) -> LaurentChar {
    weights.iter().fold(LaurentChar::monomial(twist, 1), |acc, &w| {
        &acc * &LaurentChar::from_terms(&[(0, 1), (-w, -1)])
    })
}

/// Closed form of `T^a (1 - T^{-1})^n` via the binomial theorem.
pub fn koszul_binomial(n: u64, twist: i64) -> LaurentChar {
    let mut out = LaurentChar::zero();
    for k in 0..=n {
        let c = binomial(n, k);
        out.add_term(twist - k as i64, if k % 2 == 0 { c } else { -c });
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradeReport {
    pub pass: bool,
    pub violations: Vec<i64>,
}

/// Window test `|B + n| < half_width` on every exponent of the support.
pub fn grade_restriction_check(ch: &LaurentChar, half_width: &Rational, b: &Rational) -> Result<GradeReport> {
    if !half_width.is_positive() {
        return Err(Error::Domain("window half-width must be positive".into()));
    }
    let violations: Vec<i64> = ch.support().into_iter().filter(|n| (b + int(*n)).abs() >= *half_width).collect();
    Ok(GradeReport { pass: violations.is_empty(), violations })
}

/// Half-width `¼ Σ|D_i|` of the grade-restriction window.
pub fn window_half_width(weights: &[i64]) -> Rational {
    Rational::new(weights.iter().map(|w| w.abs()).sum::<i64>().into(), 4.into())
}

/// Split `ch = f (1 + T^{-1}) + g (1 - T^{-5})` with `g` a single monomial at
/// the top exponent of `ch`.
pub fn decompose_for_continuation(ch: &LaurentChar) -> Result<(LaurentChar, LaurentChar)> {
    let plus = LaurentChar::from_terms(&[(0, 1), (-1, 1)]);
    let minus = LaurentChar::from_terms(&[(0, 1), (-5, -1)]);
    let Some(top) = ch.max_exp() else { return Ok((LaurentChar::zero(), LaurentChar::zero())) };
    // (1 + T^{-1}) | h  iff  h(-1) = 0, and (1 - T^{-5})(-1) = 2
    let at_minus_one = ch.eval_rational(&int(-1));
    let half = at_minus_one / int(2);
    let g = if half.is_integer() {
        let c = half.to_integer() * if top.rem_euclid(2) == 0 { 1 } else { -1 };
        let mut g = LaurentChar::zero();
        g.add_term(top, c);
        g
    } else {
        LaurentChar::zero()
    };
    let rest = ch - &(&g * &minus);
    let (f, r) = rest.div_rem(&plus)?;
    if !r.is_zero() {
        return Err(Error::NoDecomposition { remainder: r.to_string() });
    }
    Ok((f, g))
}

/// True when `ch = f (1 + T^{-1}) + g (1 - T^{-5})` holds exactly.
pub fn verify_decomposition(ch: &LaurentChar, f: &LaurentChar, g: &LaurentChar) -> bool {
    let plus = LaurentChar::from_terms(&[(0, 1), (-1, 1)]);
    let minus = LaurentChar::from_terms(&[(0, 1), (-5, -1)]);
    &(f * &plus) + &(g * &minus) == *ch
}

#[derive(Clone, Debug, PartialEq)]
pub struct Brane {
    pub char: LaurentChar,
    pub window_offset: Rational,
    pub label: String,
}

impl Brane {
    pub fn new(char: LaurentChar, window_offset: Rational, label: &str) -> Self {
        Brane { char, window_offset, label: label.into() }
    }

    /// Named fixtures, or an inline JSON character.
    pub fn parse(spec: &str) -> Result<Self> {
        let half = Rational::new(1.into(), 2.into());
        match spec {
            "extended-walcher" => Ok(Brane::new(koszul_char(&[1, 1, 1, 1, 1], 2), half, spec)),
            "structure-sheaf" => Ok(Brane::new(koszul_char(&[5], 0), half, spec)),
            "t-c" => Ok(Brane::new(split_pair().0, half, spec)),
            "walcher-g" => Ok(Brane::new(split_pair().1, half, spec)),
            s => {
                let v: Value = serde_json::from_str(s)
                    .map_err(|_| Error::Domain(format!("unknown brane `{s}` (not a fixture name or JSON map)")))?;
                Ok(Brane::new(LaurentChar::from_json(&v)?, half, "inline"))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "label": self.label, "char": self.char.to_json(), "text": self.char.to_string() })
    }
}

/// The pair `f = -15T^2 + 10T - 10T^{-1} + 15T^{-2}`, `g = 16T^2`.
pub fn split_pair() -> (LaurentChar, LaurentChar) {
    (LaurentChar::from_terms(&[(2, -15), (1, 10), (-1, -10), (-2, 15)]), LaurentChar::monomial(2, 16))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn koszul() {
        let k = koszul_char(&[1, 1, 1, 1, 1], 2);
        assert_eq!(k, LaurentChar::from_terms(&[(2, 1), (1, -5), (0, 10), (-1, -10), (-2, 5), (-3, -1)]));
        assert_eq!(k, koszul_binomial(5, 2));
        assert_eq!(koszul_char(&[], 0), LaurentChar::one());
        assert_eq!(koszul_char(&[5], 0), LaurentChar::from_terms(&[(0, 1), (-5, -1)]));
        assert_eq!(k.to_string(), "T^2 - 5T + 10 - 10T^-1 + 5T^-2 - T^-3");
    }

    #[test]
    fn windows() {
        let k = koszul_char(&[1, 1, 1, 1, 1], 2);
        for b in [rat(1, 10), rat(1, 2), rat(9, 10)] {
            assert!(grade_restriction_check(&k, &int(3), &b).unwrap().pass);
        }
        let r = grade_restriction_check(&LaurentChar::monomial(3, 1), &int(3), &rat(1, 2)).unwrap();
        assert_eq!(r.violations, vec![3]);
        assert!(grade_restriction_check(&LaurentChar::zero(), &int(1), &int(0)).unwrap().pass);
        assert_eq!(window_half_width(&[1, 1, 1, 1, 1, -5]), rat(5, 2));
        assert_eq!(window_half_width(&[1, 1, 1, 1, 1, -5, 1, -1]), int(3));
        assert!(grade_restriction_check(&k, &int(0), &int(0)).is_err());
    }

    #[test]
    fn decomposition() {
        let k = koszul_char(&[1, 1, 1, 1, 1], 2);
        let (f, g) = split_pair();
        assert!(verify_decomposition(&k, &f, &g));
        let (f2, g2) = decompose_for_continuation(&k).unwrap();
        assert!(verify_decomposition(&k, &f2, &g2));
        assert_eq!((f2, g2), (f, g));
        let m = LaurentChar::from_terms(&[(0, 1), (-5, -1)]);
        assert_eq!(decompose_for_continuation(&m).unwrap(), (LaurentChar::zero(), LaurentChar::one()));
        let p = LaurentChar::from_terms(&[(0, 1), (-1, 1)]);
        assert_eq!(decompose_for_continuation(&p).unwrap(), (LaurentChar::one(), LaurentChar::zero()));
        assert!(matches!(decompose_for_continuation(&LaurentChar::one()), Err(Error::NoDecomposition { .. })));
    }

    #[test]
    fn insertion_values() {
        let prec = 128;
        let s = Complex::with_val(prec, (0.25, 0));
        let v = LaurentChar::monomial(1, 1).insertion(&s, prec);
        assert!(Float::with_val(prec, v.real()).abs() < 1e-35);
        assert!((Float::with_val(prec, v.imag()) - 1u32).abs() < 1e-35);
        let k = koszul_char(&[1, 1, 1, 1, 1], 2);
        assert!(k.insertion(&Complex::new(prec), prec).abs().real().clone() < 1e-35);
        let one = LaurentChar::one().insertion(&Complex::with_val(prec, (0.3, -0.7)), prec);
        assert!(Float::with_val(prec, one.real() - 1u32).abs() < 1e-35);
    }

    #[test]
    fn json_roundtrip() {
        let k = koszul_char(&[1, 1, 1, 1, 1], 2);
        assert_eq!(LaurentChar::from_json(&k.to_json()).unwrap(), k);
        assert_eq!(Brane::parse(r#"{"2": 1, "-3": -1}"#).unwrap().char, LaurentChar::from_terms(&[(2, 1), (-3, -1)]));
        assert!(Brane::parse("nonsense").is_err());
    }
}
