//! Truncated Puiseux series over exact rationals, optionally with polynomial `log q` dependence.
//!
//! Exponents live on the lattice `(1/r) Z`. Internally an exponent is stored as its numerator
//! over the ramification `r`; `order` is an exclusive bound in the same units. A series whose
//! order is [`EXACT`] is a finite sum known exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rug::Complex;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{binomial, int, Rational};

/// Default ramification: fits both half-integer and fifth-integer exponents.
pub const DEFAULT_RAMIFICATION: u32 = 10;

/// Order sentinel for exactly known (finite) series.
pub const EXACT: i64 = i64::MAX / 4;

fn oadd(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// Truncated Puiseux series `sum c_e x^e`, exponents `e` in `(1/r) Z`, all below `order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PuiseuxSeries {
    ram: u32,
    order: i64,
    coeffs: BTreeMap<i64, Rational>,
}

impl PuiseuxSeries {
    /// Zero series known up to (excluding) exponent `order`.
    pub fn zero(ram: u32, order: &Rational) -> Result<Self> {
        Ok(Self { ram, order: Self::lattice(ram, order)?, coeffs: BTreeMap::new() })
    }

    /// Exact zero.
    pub fn exact_zero(ram: u32) -> Self {
        Self { ram, order: EXACT, coeffs: BTreeMap::new() }
    }

    /// Exact constant.
    pub fn constant(ram: u32, c: Rational) -> Self {
        let mut s = Self::exact_zero(ram);
        s.insert(0, c);
        s
    }

    /// Exact monomial `c x^e`.
    pub fn monomial(ram: u32, c: Rational, e: &Rational) -> Result<Self> {
        let mut s = Self::exact_zero(ram);
        let k = Self::lattice(ram, e)?;
        s.insert(k, c);
        Ok(s)
    }

    /// Builds a series from `(exponent, coefficient)` pairs, dropping terms at or above `order`.
    pub fn from_terms(ram: u32, order: Option<&Rational>, terms: &[(Rational, Rational)]) -> Result<Self> {
        let order = match order {
            Some(o) => Self::lattice(ram, o)?,
            None => EXACT,
        };
        let mut s = Self { ram, order, coeffs: BTreeMap::new() };
        for (e, c) in terms {
            let k = Self::lattice(ram, e)?;
            if k < order {
                let cur = s.coeffs.remove(&k).unwrap_or_else(Rational::zero);
                s.insert(k, cur + c);
            }
        }
        Ok(s)
    }

    /// Exponent as a lattice numerator; errors if `e` is not a multiple of `1/ram`.
    pub fn lattice(ram: u32, e: &Rational) -> Result<i64> {
        let scaled = e * int(ram as i64);
        if !scaled.is_integer() {
            return Err(Error::Domain(format!("exponent {e} is not on the 1/{ram} lattice")));
        }
        scaled.to_integer().to_i64().ok_or_else(|| Error::Domain("exponent out of range".into()))
    }

    pub(crate) fn from_raw(ram: u32, order: i64, coeffs: BTreeMap<i64, Rational>) -> Self {
        let mut s = Self { ram, order, coeffs: BTreeMap::new() };
        for (k, c) in coeffs {
            if k < order {
                s.insert(k, c);
            }
        }
        s
    }

    fn insert(&mut self, k: i64, c: Rational) {
        if !c.is_zero() {
            self.coeffs.insert(k, c);
        } else {
            self.coeffs.remove(&k);
        }
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    /// Truncation order, `None` when exact.
    pub fn order(&self) -> Option<Rational> {
        (self.order < EXACT).then(|| Rational::new(BigInt::from(self.order), BigInt::from(self.ram)))
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn exp_of(&self, k: i64) -> Rational {
        Rational::new(BigInt::from(k), BigInt::from(self.ram))
    }

    /// Coefficient of `x^e` (zero when absent or off-lattice).
    pub fn coeff(&self, e: &Rational) -> Rational {
        match Self::lattice(self.ram, e) {
            Ok(k) => self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero),
            Err(_) => Rational::zero(),
        }
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> Vec<(Rational, Rational)> {
        self.coeffs.iter().map(|(k, c)| (self.exp_of(*k), c.clone())).collect()
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<Rational> {
        self.coeffs.keys().next().map(|k| self.exp_of(*k))
    }

    fn raw_val(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.order)
    }

    /// Same series on a finer lattice; `ram` must be a multiple of the current one.
    pub fn with_ramification(&self, ram: u32) -> Result<Self> {
        if ram % self.ram != 0 {
            return Err(Error::Domain(format!("cannot refine ramification {} to {ram}", self.ram)));
        }
        let f = (ram / self.ram) as i64;
        let order = if self.order >= EXACT { EXACT } else { self.order * f };
        Ok(Self { ram, order, coeffs: self.coeffs.iter().map(|(k, c)| (k * f, c.clone())).collect() })
    }

    /// Drops to the smallest lattice that holds every exponent and the order.
    pub fn reduce_ramification(&self) -> Self {
        let mut g = self.ram as i64;
        for k in self.coeffs.keys() {
            g = g.gcd(k);
        }
        if self.order < EXACT {
            g = g.gcd(&self.order);
        }
        let g = g.max(1);
        let order = if self.order >= EXACT { EXACT } else { self.order / g };
        Self {
            ram: (self.ram as i64 / g) as u32,
            order,
            coeffs: self.coeffs.iter().map(|(k, c)| (k / g, c.clone())).collect(),
        }
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        let r = lcm(a.ram, b.ram);
        (a.with_ramification(r).unwrap(), b.with_ramification(r).unwrap())
    }

    /// Forget everything at or above `order`.
    pub fn truncate(&self, order: &Rational) -> Result<Self> {
        let k = Self::lattice(self.ram, order)?;
        let k = k.min(self.order);
        Ok(Self::from_raw(self.ram, k, self.coeffs.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = Self::unify(self, other);
        a.order = a.order.min(b.order);
        for (k, c) in b.coeffs {
            let cur = a.coeffs.remove(&k).unwrap_or_else(Rational::zero);
            a.insert(k, cur + c);
        }
        let ord = a.order;
        a.coeffs.retain(|k, _| *k < ord);
        a
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self { ram: self.ram, order: self.order, coeffs: BTreeMap::new() };
        }
        Self { ram: self.ram, order: self.order, coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Multiplication by the monomial `x^e`; shifts the order as well.
    pub fn shift(&self, e: &Rational) -> Result<Self> {
        let r = lcm(self.ram, e.denom().to_u32().unwrap_or(1).max(1));
        let s = self.with_ramification(r)?;
        let k = Self::lattice(r, e)?;
        Ok(Self { ram: r, order: oadd(s.order, k), coeffs: s.coeffs.into_iter().map(|(j, c)| (j + k, c)).collect() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        let order = oadd(a.order, b.raw_val()).min(oadd(b.order, a.raw_val()));
        let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ka, ca) in &a.coeffs {
            for (kb, cb) in &b.coeffs {
                let k = ka + kb;
                if k >= order {
                    break;
                }
                *out.entry(k).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { ram: a.ram, order, coeffs: out }
    }

    /// `theta = x d/dx`.
    pub fn theta(&self) -> Self {
        let r = int(self.ram as i64);
        let mut out = BTreeMap::new();
        for (k, c) in &self.coeffs {
            if *k != 0 {
                out.insert(*k, c * int(*k) / &r);
            }
        }
        Self { ram: self.ram, order: self.order, coeffs: out }
    }

    /// Multiplicative inverse. The leading term must be nonzero.
    pub fn invert(&self) -> Result<Self> {
        let (&v, lead) = self
            .coeffs
            .iter()
            .next()
            .ok_or_else(|| Error::Domain("cannot invert a zero series".into()))?;
        let lead_inv = lead.recip();
        // self = lead x^v (1 + h), h known below order - v
        let rel_order = if self.order >= EXACT { EXACT } else { self.order - v };
        if rel_order >= EXACT {
            // exact non-monomial inverses are infinite series
            if self.coeffs.len() > 1 {
                return Err(Error::Domain("inverse of an exact non-monomial needs a truncation order".into()));
            }
        }
        let h: BTreeMap<i64, Rational> =
            self.coeffs.iter().skip(1).map(|(k, c)| (k - v, c * &lead_inv)).collect();
        // w = 1/(1+h): w_0 = 1, w_n = -sum_{j>0} h_j w_{n-j}
        let mut w: BTreeMap<i64, Rational> = BTreeMap::new();
        w.insert(0, Rational::one());
        if rel_order < EXACT {
            for n in 1..rel_order {
                let mut acc = Rational::zero();
                for (j, hj) in h.range(1..=n) {
                    if let Some(wn) = w.get(&(n - j)) {
                        acc -= hj * wn;
                    }
                }
                if !acc.is_zero() {
                    w.insert(n, acc);
                }
            }
        }
        let order = if rel_order >= EXACT { EXACT } else { rel_order - v };
        let coeffs = w.into_iter().map(|(k, c)| (k - v, c * &lead_inv)).filter(|(k, _)| *k < order).collect();
        Ok(Self { ram: self.ram, order, coeffs })
    }

    fn require_positive(&self, what: &str) -> Result<()> {
        if let Some((&k, _)) = self.coeffs.iter().next() {
            if k <= 0 {
                return Err(Error::Domain(format!("{what} needs strictly positive exponents, found {}", self.exp_of(k))));
            }
        }
        if self.order >= EXACT && !self.coeffs.is_empty() {
            return Err(Error::Domain(format!("{what} of an exact series needs a truncation order")));
        }
        Ok(())
    }

    /// `exp(a)` for `a` with positive exponents only.
    pub fn exp_series(&self) -> Result<Self> {
        self.require_positive("exp_series")?;
        if self.coeffs.is_empty() {
            return Ok(Self { ram: self.ram, order: self.order, coeffs: BTreeMap::from([(0, Rational::one())]) }
                .clipped());
        }
        // theta E = E * theta a  =>  n E_n = sum_j j a_j E_{n-j}
        let mut e: BTreeMap<i64, Rational> = BTreeMap::new();
        e.insert(0, Rational::one());
        for n in 1..self.order {
            let mut acc = Rational::zero();
            for (j, aj) in self.coeffs.range(1..=n) {
                if let Some(en) = e.get(&(n - j)) {
                    acc += aj * en * int(*j);
                }
            }
            if !acc.is_zero() {
                e.insert(n, acc / int(n));
            }
        }
        Ok(Self { ram: self.ram, order: self.order, coeffs: e })
    }

    fn clipped(mut self) -> Self {
        let o = self.order;
        self.coeffs.retain(|k, _| *k < o);
        self
    }

    /// `log(1 + a)` for `a` with positive exponents only.
    pub fn log1p_series(&self) -> Result<Self> {
        self.require_positive("log1p_series")?;
        if self.coeffs.is_empty() {
            return Ok(self.clone());
        }
        let one_plus = Self::constant(self.ram, Rational::one()).add(self);
        let quot = self.theta().mul(&one_plus.invert()?);
        let r = int(self.ram as i64);
        let coeffs = quot.coeffs.iter().map(|(k, c)| (*k, c * &r / int(*k))).collect();
        Ok(Self { ram: self.ram, order: self.order, coeffs })
    }

    /// `u^e` for a unit `u = 1 + (positive exponents)` and rational `e`.
    pub fn pow_unit(&self, e: &Rational) -> Result<Self> {
        let h = self.sub(&Self::constant(self.ram, Rational::one()));
        if self.coeff(&Rational::zero()) != Rational::one() {
            return Err(Error::Domain("pow_unit needs constant term 1".into()));
        }
        h.log1p_series()?.scale(e).exp_series()
    }

    /// Compositional inverse of `m = c x + ...` (integer exponents, leading exponent 1).
    pub fn reversion(&self) -> Result<Self> {
        let s = self.reduce_ramification();
        if s.ram != 1 {
            return Err(Error::Domain("reversion needs integer exponents".into()));
        }
        let (&v, c) = s.coeffs.iter().next().ok_or_else(|| Error::Domain("cannot revert zero".into()))?;
        if v != 1 {
            return Err(Error::Domain(format!("reversion needs leading exponent 1, found {v}")));
        }
        let c_inv = c.recip();
        let order = s.order;
        let h: Vec<(i64, Rational)> = s.coeffs.iter().skip(1).map(|(k, c)| (*k, c.clone())).collect();
        let x = Self { ram: 1, order, coeffs: BTreeMap::from([(1, c_inv.clone())]) }.clipped();
        if h.is_empty() {
            return Ok(x);
        }
        if order >= EXACT {
            return Err(Error::Domain("reversion of an exact polynomial needs a truncation order".into()));
        }
        let q = Self { ram: 1, order, coeffs: BTreeMap::from([(1, Rational::one())]) }.clipped();
        let mut x = x;
        // fixed point x = (Q - h(x)) / c, each step fixes at least one more order
        for _ in 0..order {
            let hx = compose_poly(&h, &x);
            let next = q.sub(&hx).scale(&c_inv);
            if next == x {
                break;
            }
            x = next;
        }
        Ok(x)
    }

    /// Partial sum at a complex point given `log x` (the branch is carried by `log x`).
    pub fn eval(&self, log_x: &Complex, prec: u32) -> Complex {
        let step = Complex::with_val(prec, log_x / self.ram);
        let mut acc = Complex::new(prec);
        for (k, c) in &self.coeffs {
            let mut term = Complex::with_val(prec, &step * *k);
            term.exp_mut();
            term *= rational_to_float(c, prec);
            acc += term;
        }
        acc
    }

    /// `{ramification, order, terms}` JSON; exact series carry `"order": null`.
    pub fn to_json(&self) -> Value {
        json!({
            "ramification": self.ram,
            "order": self.order().map(|o| rational_json(&o)),
            "terms": self.terms_json(0),
        })
    }

    pub(crate) fn terms_json(&self, log_power: u32) -> Vec<Value> {
        self.terms()
            .into_iter()
            .map(|(e, c)| {
                json!([bigint_json(e.numer()), bigint_json(e.denom()), bigint_json(c.numer()), bigint_json(c.denom()), log_power])
            })
            .collect()
    }
}

/// Horner evaluation of `sum_k h_k x^k` (with `k >= 1`).
fn compose_poly(h: &[(i64, Rational)], x: &PuiseuxSeries) -> PuiseuxSeries {
    let mut acc = PuiseuxSeries::exact_zero(1);
    let mut prev = h.last().map(|(k, _)| *k).unwrap_or(0);
    for (k, c) in h.iter().rev() {
        for _ in 0..(prev - k) {
            acc = acc.mul(x);
        }
        acc = acc.add(&PuiseuxSeries::constant(1, c.clone()));
        prev = *k;
    }
    for _ in 0..prev {
        acc = acc.mul(x);
    }
    acc
}

pub(crate) fn rational_to_float(c: &Rational, prec: u32) -> rug::Float {
    let n = rug::Integer::from_str_radix(&c.numer().to_str_radix(16), 16).unwrap();
    let d = rug::Integer::from_str_radix(&c.denom().to_str_radix(16), 16).unwrap();
    rug::Float::with_val(prec, rug::Rational::from((n, d)))
}

/// Rational as an exact `[num, den]` pair.
pub fn rational_json(r: &Rational) -> Value {
    json!([bigint_json(r.numer()), bigint_json(r.denom())])
}

pub(crate) fn bigint_json(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse().expect("integer literal is valid JSON"))
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})x^({e})")?;
        }
        if first {
            write!(f, "0")?;
        }
        match self.order() {
            Some(o) => write!(f, " + O(x^({o}))"),
            None => Ok(()),
        }
    }
}

/// Maximum log rank carried by [`PuiseuxLogSeries`].
pub const MAX_LOG_RANK: usize = 3;

/// `sum_j S_j(x) (log x)^j / j!`, `j <= 3`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PuiseuxLogSeries {
    parts: Vec<PuiseuxSeries>,
}

impl PuiseuxLogSeries {
    /// Builds from parts (index = power of log, divided by its factorial). Parts are brought to a
    /// common lattice and a common order; trailing zero parts are dropped.
    pub fn new(parts: Vec<PuiseuxSeries>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("log series needs at least one part".into()));
        }
        let ram = parts.iter().fold(1, |r, p| lcm(r, p.ram));
        let order = parts.iter().map(|p| p.order).min().unwrap();
        let mut parts: Vec<PuiseuxSeries> = parts
            .into_iter()
            .map(|p| {
                let mut p = p.with_ramification(ram).unwrap();
                p.order = order;
                p.clipped()
            })
            .collect();
        while parts.len() > 1 && parts.last().unwrap().is_zero() {
            parts.pop();
        }
        if parts.len() > MAX_LOG_RANK + 1 {
            return Err(Error::Domain(format!("log rank {} exceeds {MAX_LOG_RANK}", parts.len() - 1)));
        }
        Ok(Self { parts })
    }

    pub fn from_series(s: PuiseuxSeries) -> Self {
        Self { parts: vec![s] }
    }

    /// `log x` itself, exactly.
    pub fn log(ram: u32) -> Self {
        Self { parts: vec![PuiseuxSeries::exact_zero(ram), PuiseuxSeries::constant(ram, Rational::one())] }
    }

    pub fn parts(&self) -> &[PuiseuxSeries] {
        &self.parts
    }

    /// Part multiplying `(log x)^j / j!` (zero if beyond the rank).
    pub fn part(&self, j: usize) -> PuiseuxSeries {
        self.parts.get(j).cloned().unwrap_or_else(|| {
            let p = &self.parts[0];
            PuiseuxSeries { ram: p.ram, order: p.order, coeffs: BTreeMap::new() }
        })
    }

    pub fn log_rank(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn order(&self) -> Option<Rational> {
        self.parts[0].order()
    }

    pub fn ramification(&self) -> u32 {
        self.parts[0].ram
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    /// The log-free part, erroring if logs are present.
    pub fn log_free(&self) -> Result<PuiseuxSeries> {
        if self.parts.len() > 1 {
            return Err(Error::Domain("series carries log terms".into()));
        }
        Ok(self.parts[0].clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&PuiseuxSeries, &PuiseuxSeries) -> PuiseuxSeries) -> Self {
        let n = self.parts.len().max(other.parts.len());
        let parts = (0..n).map(|j| f(&self.part(j), &other.part(j))).collect();
        Self::new(parts).expect("rank cannot grow under addition")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { parts: self.parts.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn truncate(&self, order: &Rational) -> Result<Self> {
        Self::new(self.parts.iter().map(|p| p.truncate(order)).collect::<Result<_>>()?)
    }

    /// Product; `(L^i/i!)(L^j/j!) = C(i+j, i) L^{i+j}/(i+j)!`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.parts.len() + other.parts.len() - 1;
        let mut out: Vec<Option<PuiseuxSeries>> = vec![None; n];
        for (i, a) in self.parts.iter().enumerate() {
            for (j, b) in other.parts.iter().enumerate() {
                let term = a.mul(b).scale(&Rational::from_integer(binomial((i + j) as u64, i as u64)));
                out[i + j] = Some(match out[i + j].take() {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
        }
        Self::new(out.into_iter().map(|p| p.unwrap()).collect())
    }

    /// `theta`: part `j` becomes `theta S_j + S_{j+1}`.
    pub fn theta(&self) -> Self {
        let n = self.parts.len();
        let parts = (0..n)
            .map(|j| {
                let t = self.parts[j].theta();
                if j + 1 < n { t.add(&self.parts[j + 1]) } else { t }
            })
            .collect();
        Self::new(parts).unwrap()
    }

    /// Inverse; the leading term must be a log-free monomial.
    pub fn invert(&self) -> Result<Self> {
        let a0 = &self.parts[0];
        let v = a0.valuation().ok_or_else(|| Error::Domain("leading term of series is zero or log-bearing".into()))?;
        for p in &self.parts[1..] {
            if let Some(vp) = p.valuation() {
                if vp <= v {
                    return Err(Error::Domain("leading term is log-bearing".into()));
                }
            }
        }
        let inv0 = Self::from_series(a0.invert()?);
        if self.parts.len() == 1 {
            return Ok(inv0);
        }
        // 1/a = inv0 * sum_n (-u)^n with u = (a - a0) * inv0, u has positive valuation
        let mut rest = self.clone();
        rest.parts[0] = PuiseuxSeries { ram: a0.ram, order: a0.order, coeffs: BTreeMap::new() };
        let u = rest.mul(&inv0)?.scale(&-Rational::one());
        let mut acc = Self::from_series(PuiseuxSeries::constant(a0.ram, Rational::one()));
        let mut pow = acc.clone();
        loop {
            pow = pow.mul(&u)?;
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        acc.mul(&inv0)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    pub fn to_json(&self) -> Value {
        let mut terms = Vec::new();
        for (j, p) in self.parts.iter().enumerate() {
            terms.extend(p.terms_json(j as u32));
        }
        json!({
            "ramification": self.ramification(),
            "order": self.order().map(|o| rational_json(&o)),
            "terms": terms,
        })
    }

    /// Numeric value at a point given `log x`.
    pub fn eval(&self, log_x: &Complex, prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        let mut lpow = Complex::with_val(prec, 1);
        for (j, p) in self.parts.iter().enumerate() {
            if j > 0 {
                lpow *= log_x;
                lpow /= j as u32;
            }
            acc += p.eval(log_x, prec) * &lpow;
        }
        acc
    }
}

impl fmt::Debug for PuiseuxLogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, p) in self.parts.iter().enumerate() {
            writeln!(f, "[L^{j}/{j}!] {p}")?;
        }
        Ok(())
    }
}

/// Parses a series written by [`PuiseuxSeries::to_json`] or [`PuiseuxLogSeries::to_json`].
pub fn log_series_from_json(v: &Value) -> Result<PuiseuxLogSeries> {
    let bad = || Error::Domain("malformed series JSON".into());
    let ram = v.get("ramification").and_then(Value::as_u64).ok_or_else(bad)? as u32;
    let order = match v.get("order") {
        Some(Value::Null) | None => None,
        Some(o) => Some(rational_from_json(o)?),
    };
    let mut by_log: BTreeMap<usize, Vec<(Rational, Rational)>> = BTreeMap::new();
    for t in v.get("terms").and_then(Value::as_array).ok_or_else(bad)? {
        let a = t.as_array().ok_or_else(bad)?;
        if a.len() != 5 {
            return Err(bad());
        }
        let e = Rational::new(big(&a[0])?, big(&a[1])?);
        let c = Rational::new(big(&a[2])?, big(&a[3])?);
        let j = a[4].as_u64().ok_or_else(bad)? as usize;
        by_log.entry(j).or_default().push((e, c));
    }
    let rank = by_log.keys().max().copied().unwrap_or(0);
    let parts = (0..=rank)
        .map(|j| PuiseuxSeries::from_terms(ram, order.as_ref(), by_log.get(&j).map(Vec::as_slice).unwrap_or(&[])))
        .collect::<Result<Vec<_>>>()?;
    PuiseuxLogSeries::new(parts)
}

/// Reads a `[num, den]` pair.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Domain("expected [num, den]".into()))?;
    let d = big(&a[1])?;
    if d.is_zero() {
        return Err(Error::Domain("zero denominator".into()));
    }
    Ok(Rational::new(big(&a[0])?, d))
}

fn big(v: &Value) -> Result<BigInt> {
    let s = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::Domain("expected an integer".into())),
    };
    s.parse().map_err(|_| Error::Domain(format!("not an integer: {s}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn s(ram: u32, order: Option<Rational>, t: &[(Rational, Rational)]) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(ram, order.as_ref(), t).unwrap()
    }

    #[test]
    fn theta_examples() {
        let a = PuiseuxSeries::monomial(10, int(1), &rat(3, 2)).unwrap();
        assert_eq!(a.theta().coeff(&rat(3, 2)), rat(3, 2));
        let l = PuiseuxLogSeries::log(10);
        let t = l.theta();
        assert_eq!(t.log_rank(), 0);
        assert_eq!(t.part(0).coeff(&int(0)), int(1));
        // q (log q)^2 is stored as 2q in the L^2/2! slot
        let z = PuiseuxSeries::exact_zero(10);
        let q2 = PuiseuxLogSeries::new(vec![z.clone(), z, PuiseuxSeries::monomial(10, int(2), &int(1)).unwrap()]).unwrap();
        let t = q2.theta();
        assert_eq!(t.part(2).coeff(&int(1)), int(2));
        assert_eq!(t.part(1).coeff(&int(1)), int(2));
    }

    #[test]
    fn invert_examples() {
        let a = s(1, Some(int(3)), &[(int(0), int(1)), (int(1), int(120))]);
        let inv = a.invert().unwrap();
        assert_eq!(inv.terms(), vec![(int(0), int(1)), (int(1), int(-120)), (int(2), int(14400))]);
        let m = PuiseuxSeries::monomial(10, int(1), &rat(1, 2)).unwrap();
        assert_eq!(m.invert().unwrap().terms(), vec![(rat(-1, 2), int(1))]);
        let p = s(1, None, &[(int(0), int(1)), (int(1), int(1))]);
        let m2 = s(1, None, &[(int(0), int(1)), (int(1), int(-1))]);
        assert_eq!(p.mul(&m2).terms(), vec![(int(0), int(1)), (int(2), int(-1))]);
        assert!(PuiseuxSeries::exact_zero(1).invert().is_err());
    }

    #[test]
    fn exp_log_examples() {
        let a = s(1, Some(int(3)), &[(int(1), int(770))]);
        assert_eq!(a.exp_series().unwrap().terms(), vec![(int(0), int(1)), (int(1), int(770)), (int(2), int(296450))]);
        let z = PuiseuxSeries::zero(1, &int(3)).unwrap();
        assert_eq!(z.exp_series().unwrap().terms(), vec![(int(0), int(1))]);
        let q = s(1, Some(int(3)), &[(int(1), int(1))]);
        assert_eq!(q.log1p_series().unwrap().terms(), vec![(int(1), int(1)), (int(2), rat(-1, 2))]);
        let c = s(1, Some(int(3)), &[(int(0), int(1))]);
        assert!(c.exp_series().is_err());
    }

    #[test]
    fn reversion_examples() {
        let m = s(1, Some(int(4)), &[(int(1), int(1)), (int(2), int(770))]);
        let r = m.reversion().unwrap();
        assert_eq!(r.terms(), vec![(int(1), int(1)), (int(2), int(-770)), (int(3), int(1_185_800))]);
        let id = s(1, Some(int(4)), &[(int(1), int(1))]);
        assert_eq!(id.reversion().unwrap().terms(), vec![(int(1), int(1))]);
        let two = s(1, Some(int(4)), &[(int(1), int(2))]);
        assert_eq!(two.reversion().unwrap().terms(), vec![(int(1), rat(1, 2))]);
        let bad = s(1, Some(int(4)), &[(int(2), int(1))]);
        assert!(bad.reversion().is_err());
    }

    #[test]
    fn mixed_ramification() {
        let a = PuiseuxSeries::monomial(2, int(1), &rat(1, 2)).unwrap();
        let b = PuiseuxSeries::monomial(5, int(1), &rat(1, 5)).unwrap();
        let c = a.mul(&b);
        assert_eq!(c.ramification(), 10);
        assert_eq!(c.coeff(&rat(7, 10)), int(1));
    }

    #[test]
    fn json_roundtrip() {
        let a = s(10, Some(rat(7, 2)), &[(rat(1, 2), rat(3, 7)), (int(3), int(-5))]);
        let l = PuiseuxLogSeries::new(vec![a.clone(), a.scale(&int(2))]).unwrap();
        let back = log_series_from_json(&l.to_json()).unwrap();
        assert_eq!(back, l);
    }
}
