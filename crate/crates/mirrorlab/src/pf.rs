//! Differential operators `sum_s q^s P_s(theta)` with `theta = q d/dq`, and a Frobenius solver.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{int, rat, Rational};
use crate::series::{bigint_json, rational_from_json, PuiseuxLogSeries, PuiseuxSeries, MAX_LOG_RANK};

/// Polynomial in theta, index = power.
pub type ThetaPoly = Vec<Rational>;

fn poly_trim(mut p: ThetaPoly) -> ThetaPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add(a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    poly_trim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

fn poly_mul(a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

/// `p(theta + u)`.
fn poly_shift(p: &ThetaPoly, u: &Rational) -> ThetaPoly {
    let lin = vec![u.clone(), Rational::one()];
    let mut acc: ThetaPoly = Vec::new();
    for c in p.iter().rev() {
        acc = poly_add(&poly_mul(&acc, &lin), &vec![c.clone()]);
    }
    acc
}

fn poly_eval(p: &ThetaPoly, x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Differential operator in normal order: coefficients to the left of theta powers.
#[derive(Clone, PartialEq, Eq)]
pub struct ThetaOperator {
    ram: u32,
    terms: BTreeMap<i64, ThetaPoly>,
}

impl ThetaOperator {
    pub fn zero(ram: u32) -> Self {
        Self { ram, terms: BTreeMap::new() }
    }

    /// `c q^e theta^k`.
    pub fn monomial(ram: u32, e: &Rational, c: Rational, k: usize) -> Result<Self> {
        let mut p = vec![Rational::zero(); k + 1];
        p[k] = c;
        let mut op = Self::zero(ram);
        op.insert(PuiseuxSeries::lattice(ram, e)?, poly_trim(p));
        Ok(op)
    }

    /// `q^e p(theta)`.
    pub fn from_poly(ram: u32, e: &Rational, p: ThetaPoly) -> Result<Self> {
        let mut op = Self::zero(ram);
        op.insert(PuiseuxSeries::lattice(ram, e)?, poly_trim(p));
        Ok(op)
    }

    /// From `(q-exponent, coefficient, theta-power)` triples.
    pub fn from_triples(ram: u32, triples: &[(Rational, Rational, usize)]) -> Result<Self> {
        let mut op = Self::zero(ram);
        for (e, c, k) in triples {
            op = op.add(&Self::monomial(ram, e, c.clone(), *k)?);
        }
        Ok(op)
    }

    fn insert(&mut self, k: i64, p: ThetaPoly) {
        if p.is_empty() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, p);
        }
    }

    pub fn theta(ram: u32) -> Self {
        Self::monomial(ram, &Rational::zero(), Rational::one(), 1).unwrap()
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    fn with_ramification(&self, ram: u32) -> Self {
        let f = (ram / self.ram) as i64;
        Self { ram, terms: self.terms.iter().map(|(k, p)| (k * f, p.clone())).collect() }
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        let r = a.ram.lcm(&b.ram);
        (a.with_ramification(r), b.with_ramification(r))
    }

    fn exp_of(&self, k: i64) -> Rational {
        Rational::new(BigInt::from(k), BigInt::from(self.ram))
    }

    /// `(q-exponent, theta-polynomial)` pairs.
    pub fn terms(&self) -> Vec<(Rational, ThetaPoly)> {
        self.terms.iter().map(|(k, p)| (self.exp_of(*k), p.clone())).collect()
    }

    /// `(q-exponent, coefficient, theta-power)` triples.
    pub fn triples(&self) -> Vec<(Rational, Rational, usize)> {
        let mut out = Vec::new();
        for (e, p) in self.terms() {
            for (k, c) in p.into_iter().enumerate() {
                if !c.is_zero() {
                    out.push((e.clone(), c, k));
                }
            }
        }
        out
    }

    pub fn theta_degree(&self) -> usize {
        self.terms.values().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = Self::unify(self, other);
        for (k, p) in b.terms {
            let cur = a.terms.remove(&k).unwrap_or_default();
            a.insert(k, poly_add(&cur, &p));
        }
        a
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.ram);
        for (k, p) in &self.terms {
            out.insert(*k, poly_trim(p.iter().map(|x| x * c).collect()));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `a o b`, normal-ordered via `theta q^u = q^u (theta + u)`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        let mut out = Self::zero(a.ram);
        for (s, p) in &a.terms {
            for (u, q) in &b.terms {
                let shifted = poly_shift(p, &a.exp_of(*u));
                let term = Self { ram: a.ram, terms: BTreeMap::from([(s + u, poly_mul(&shifted, q))]) };
                out = out.add(&term);
            }
        }
        out
    }

    /// Lowest q-exponent and its theta-polynomial (the indicial polynomial).
    pub fn indicial(&self) -> Option<(Rational, ThetaPoly)> {
        self.terms.iter().next().map(|(k, p)| (self.exp_of(*k), p.clone()))
    }

    /// Divides by the top theta coefficient of the lowest-exponent term.
    pub fn normalized(&self) -> Self {
        match self.terms.values().next().and_then(|p| p.last()) {
            Some(c) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Rewrites in `t` with `q = t^{-n}`, so `theta_q = -theta_t / n`.
    pub fn substitute_inverse_power(&self, n: u32) -> Self {
        let mut out = Self::zero(self.ram);
        let f = rat(-1, n as i64);
        for (k, p) in &self.terms {
            let mut fp = Rational::one();
            let mut np = Vec::with_capacity(p.len());
            for c in p {
                np.push(c * &fp);
                fp *= &f;
            }
            out.insert(-k * n as i64, np);
        }
        out
    }

    /// Applies the operator. The certified order of the image is the input order plus the
    /// lowest q-exponent of the operator (coefficients with negative exponents pull unknown
    /// terms down; positive ones never do).
    pub fn apply(&self, s: &PuiseuxLogSeries) -> Result<PuiseuxLogSeries> {
        let deg = self.theta_degree();
        let mut powers = vec![s.clone()];
        for _ in 0..deg {
            let next = powers.last().unwrap().theta();
            powers.push(next);
        }
        let mut acc: Option<PuiseuxLogSeries> = None;
        for (k, p) in &self.terms {
            let mut inner: Option<PuiseuxLogSeries> = None;
            for (j, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let t = powers[j].scale(c);
                inner = Some(match inner {
                    Some(x) => x.add(&t),
                    None => t,
                });
            }
            let Some(inner) = inner else { continue };
            let e = self.exp_of(*k);
            let shifted = PuiseuxLogSeries::new(inner.parts().iter().map(|x| x.shift(&e)).collect::<Result<_>>()?)?;
            acc = Some(match acc {
                Some(x) => x.add(&shifted),
                None => shifted,
            });
        }
        Ok(acc.unwrap_or_else(|| s.scale(&Rational::zero())))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.triples()
                .into_iter()
                .map(|(e, c, k)| json!([[bigint_json(e.numer()), bigint_json(e.denom())], [bigint_json(c.numer()), bigint_json(c.denom())], k]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, ram: u32) -> Result<Self> {
        let bad = || Error::Domain("malformed operator JSON".into());
        let mut triples = Vec::new();
        for t in v.as_array().ok_or_else(bad)? {
            let a = t.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
            triples.push((rational_from_json(&a[0])?, rational_from_json(&a[1])?, a[2].as_u64().ok_or_else(bad)? as usize));
        }
        Self::from_triples(ram, &triples)
    }
}

impl fmt::Debug for ThetaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ThetaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c, k) in self.triples() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})q^({e})θ^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn linear(a: i64, b: i64) -> ThetaPoly {
    vec![int(b), int(a)]
}

/// `(5 theta + 1)(5 theta + 2)(5 theta + 3)(5 theta + 4)`.
fn quartic_product() -> ThetaPoly {
    (1..=4).fold(vec![Rational::one()], |acc, j| poly_mul(&acc, &linear(5, j)))
}

/// `L = theta^4 - 5 q (5 theta + 1)(5 theta + 2)(5 theta + 3)(5 theta + 4)`.
pub fn pf_l() -> ThetaOperator {
    let r = crate::series::DEFAULT_RAMIFICATION;
    let top = ThetaOperator::monomial(r, &Rational::zero(), Rational::one(), 4).unwrap();
    let inst = ThetaOperator::from_poly(r, &Rational::one(), quartic_product().iter().map(|c| c * int(-5)).collect()).unwrap();
    top.add(&inst)
}

/// Picard-Fuchs operator of the quintic; the same operator as [`pf_l`].
pub fn quintic_pf() -> ThetaOperator {
    pf_l()
}

/// `(2 theta - 1) o L`, whose kernel is spanned by the four periods and the disk potential.
pub fn extended_pf() -> ThetaOperator {
    let r = crate::series::DEFAULT_RAMIFICATION;
    ThetaOperator::from_poly(r, &Rational::zero(), linear(2, -1)).unwrap().compose(&pf_l())
}

/// LG-side operator in `t` (`q = t^{-5}`, `theta_t = -5 theta_q`):
/// `theta^4 - 5^5 t^{-5} (theta - 1)(theta - 2)(theta - 3)(theta - 4)`.
pub fn lg_pf() -> ThetaOperator {
    let r = crate::series::DEFAULT_RAMIFICATION;
    let top = ThetaOperator::monomial(r, &Rational::zero(), Rational::one(), 4).unwrap();
    let p = (1..=4).fold(vec![Rational::one()], |acc, j| poly_mul(&acc, &linear(1, -j)));
    let low = ThetaOperator::from_poly(r, &int(-5), p.iter().map(|c| c * int(-3125)).collect()).unwrap();
    top.add(&low)
}

/// Truncated power series in an auxiliary `eps`.
#[derive(Clone, Debug)]
struct EpsSeries(Vec<Rational>);

impl EpsSeries {
    fn valuation(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(self.0.len())
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.0.len();
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Self(out)
    }

    /// `self / d`, allowing `d` to vanish at `eps = 0` when `self` vanishes at least as fast.
    /// The top `val(d)` coefficients of the quotient are unknown and filled with zero.
    fn div(&self, d: &Self) -> std::result::Result<Self, usize> {
        let n = self.0.len();
        let v = d.valuation();
        if v >= n {
            return Err(v);
        }
        if self.valuation() < v {
            return Err(v - self.valuation());
        }
        let num = &self.0[v..];
        let den = &d.0[v..];
        let mut out = vec![Rational::zero(); n];
        let inv = den[0].recip();
        for k in 0..num.len() {
            let mut acc = num[k].clone();
            for j in 1..=k {
                if j < den.len() {
                    acc -= &den[j] * &out[k - j];
                }
            }
            out[k] = acc * &inv;
        }
        Ok(Self(out))
    }
}

/// `p(x0 + eps)` as an eps-series of length `n`.
fn poly_at(p: &ThetaPoly, x0: &Rational, n: usize) -> EpsSeries {
    let lin = EpsSeries((0..n).map(|i| match i {
        0 => x0.clone(),
        1 => Rational::one(),
        _ => Rational::zero(),
    }).collect());
    let mut acc = EpsSeries(vec![Rational::zero(); n]);
    for c in p.iter().rev() {
        acc = acc.mul(&lin);
        acc.0[0] += c;
    }
    acc
}

/// Frobenius solution at `indicial_root` with log rank `log_rank`, computed by the
/// eps-deformation `y(eps) = sum_n a_n(eps) q^{rho + eps + n}` and read off from the
/// coefficient of `eps^log_rank` (shifted by any resonance escalation).
pub fn frobenius_solve(op: &ThetaOperator, indicial_root: &Rational, log_rank: usize, order: &Rational) -> Result<PuiseuxLogSeries> {
    let (s_min_e, p0) = op.indicial().ok_or_else(|| Error::Domain("zero operator".into()))?;
    let mult = {
        let mut p = p0.clone();
        let mut m = 0;
        loop {
            if p.is_empty() || !poly_eval(&p, indicial_root).is_zero() {
                break;
            }
            m += 1;
            // divide by (theta - rho)
            let mut qt = vec![Rational::zero(); p.len() - 1];
            let mut carry = Rational::zero();
            for i in (1..p.len()).rev() {
                carry = &p[i] + carry * indicial_root;
                qt[i - 1] = carry.clone();
            }
            p = qt;
        }
        m
    };
    if mult == 0 {
        return Err(Error::Domain(format!("{indicial_root} is not a root of the indicial polynomial")));
    }
    if mult <= log_rank {
        return Err(Error::Domain(format!("root {indicial_root} has multiplicity {mult}, log rank {log_rank} requested")));
    }
    let ram_out = op.ram.lcm(&indicial_root.denom().to_u32().unwrap_or(1)).lcm(&order.denom().to_u32().unwrap_or(1));
    let op = op.with_ramification(ram_out);
    let s_min = PuiseuxSeries::lattice(ram_out, &s_min_e)?;
    let step = op.terms.keys().fold(0i64, |g, k| g.gcd(&(k - s_min))).max(1);
    let rho = PuiseuxSeries::lattice(ram_out, indicial_root)?;
    let ord = PuiseuxSeries::lattice(ram_out, order)?;
    let n_max = if ord > rho { (ord - rho - 1) / step } else { -1 };
    // total possible valuation loss from resonant steps
    let mut loss = 0usize;
    for n in 1..=n_max.max(0) {
        let x = op.exp_of(rho + n * step);
        let v = poly_at(&p0, &x, MAX_LOG_RANK + 2).valuation();
        loss += v.min(MAX_LOG_RANK + 1);
    }
    let mut escalate = 0usize;
    'outer: loop {
        if escalate + log_rank > MAX_LOG_RANK {
            return Err(Error::Domain(format!("log rank escalation beyond {MAX_LOG_RANK} needed")));
        }
        let len = escalate + log_rank + 1 + loss;
        let mut a: Vec<EpsSeries> = Vec::with_capacity((n_max + 1).max(1) as usize);
        let mut a0 = vec![Rational::zero(); len];
        a0[escalate] = Rational::one();
        a.push(EpsSeries(a0));
        for n in 1..=n_max {
            let mut rhs = EpsSeries(vec![Rational::zero(); len]);
            for (s, p) in op.terms.iter().skip(1) {
                let back = (s - s_min) / step;
                if back > n {
                    continue;
                }
                let prev = &a[(n - back) as usize];
                if prev.valuation() >= len {
                    continue;
                }
                let x = op.exp_of(rho + (n - back) * step);
                let t = poly_at(p, &x, len).mul(prev);
                for (r, c) in rhs.0.iter_mut().zip(t.0) {
                    *r -= c;
                }
            }
            let x = op.exp_of(rho + n * step);
            let d = poly_at(&p0, &x, len);
            match rhs.div(&d) {
                Ok(v) => a.push(v),
                Err(deficit) => {
                    if rhs.valuation() >= len {
                        a.push(EpsSeries(vec![Rational::zero(); len]));
                        continue;
                    }
                    if escalate >= MAX_LOG_RANK {
                        return Err(Error::Resonance { exponent: format!("{}", op.exp_of(rho + n * step)) });
                    }
                    escalate += deficit.max(1);
                    continue 'outer;
                }
            }
        }
        let target = escalate + log_rank;
        let mut parts: Vec<BTreeMap<i64, Rational>> = vec![BTreeMap::new(); target + 1];
        for (n, an) in a.iter().enumerate() {
            for (i, part) in parts.iter_mut().enumerate() {
                let c = &an.0[target - i];
                if !c.is_zero() {
                    part.insert(rho + n as i64 * step, c.clone());
                }
            }
        }
        let series: Vec<PuiseuxSeries> = parts.into_iter().map(|m| PuiseuxSeries::from_raw(ram_out, ord, m)).collect();
        return PuiseuxLogSeries::new(series);
    }
}

/// Distinct rational roots of the indicial polynomial (searched among `k/den`, |k| <= bound).
pub fn rational_indicial_roots(op: &ThetaOperator, den: i64, bound: i64) -> Vec<Rational> {
    let Some((_, p)) = op.indicial() else { return Vec::new() };
    (-bound * den..=bound * den)
        .map(|k| rat(k, den))
        .filter(|x| poly_eval(&p, x).is_zero())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> u32 {
        crate::series::DEFAULT_RAMIFICATION
    }

    #[test]
    fn compose_examples() {
        let th = ThetaOperator::theta(r());
        let q = ThetaOperator::monomial(r(), &int(1), int(1), 0).unwrap();
        let c = th.compose(&q);
        assert_eq!(c.triples(), vec![(int(1), int(1), 0), (int(1), int(1), 1)]);
        assert_eq!(th.compose(&th).triples(), vec![(int(0), int(1), 2)]);
        let a = ThetaOperator::from_poly(r(), &int(0), linear(2, -1)).unwrap();
        let t4 = ThetaOperator::monomial(r(), &int(0), int(1), 4).unwrap();
        assert_eq!(a.compose(&t4).triples(), vec![(int(0), int(-1), 4), (int(0), int(2), 5)]);
    }

    #[test]
    fn apply_simple() {
        let t4 = ThetaOperator::monomial(r(), &int(0), int(1), 4).unwrap();
        let q2 = PuiseuxLogSeries::from_series(PuiseuxSeries::monomial(r(), int(1), &int(2)).unwrap());
        let out = t4.apply(&q2).unwrap().log_free().unwrap();
        assert_eq!(out.terms(), vec![(int(2), int(16))]);
        let one = PuiseuxLogSeries::from_series(PuiseuxSeries::constant(r(), int(1)));
        let out = pf_l().apply(&one).unwrap().log_free().unwrap();
        assert_eq!(out.terms(), vec![(int(1), int(-120))]);
    }

    #[test]
    fn extended_operator_shape() {
        // (2 theta - 1) o L = (2 theta - 1) theta^4 - 5 q (2 theta + 1) prod (5 theta + j)
        let expect = ThetaOperator::from_poly(r(), &int(0), poly_mul(&linear(2, -1), &vec![int(0), int(0), int(0), int(0), int(1)]))
            .unwrap()
            .add(&ThetaOperator::from_poly(r(), &int(1), poly_mul(&linear(2, 1), &quartic_product()).iter().map(|c| c * int(-5)).collect()).unwrap());
        assert_eq!(extended_pf(), expect);
    }

    #[test]
    fn lg_operator_from_substitution() {
        let sub = quintic_pf().substitute_inverse_power(5).normalized();
        assert_eq!(sub, lg_pf().normalized());
    }

    #[test]
    fn resonant_root_escalates() {
        // theta (theta - 1) - q (theta + 2): roots 0 and 1 differ by an integer and the step
        // from 0 to 1 is obstructed, so the solution at 0 acquires a log.
        let op = ThetaOperator::from_poly(r(), &int(0), vec![int(0), int(-1), int(1)])
            .unwrap()
            .add(&ThetaOperator::from_poly(r(), &int(1), vec![int(-2), int(-1)]).unwrap());
        let y = frobenius_solve(&op, &int(0), 0, &int(8)).unwrap();
        assert_eq!(y.log_rank(), 1);
        let res = op.apply(&y).unwrap();
        assert!(res.is_zero(), "{res:?}");
        let y1 = frobenius_solve(&op, &int(1), 0, &int(8)).unwrap();
        assert_eq!(y1.log_rank(), 0);
        assert!(op.apply(&y1).unwrap().is_zero());
    }

    #[test]
    fn non_root_rejected() {
        assert!(frobenius_solve(&pf_l(), &int(1), 0, &int(3)).is_err());
        assert!(frobenius_solve(&pf_l(), &int(0), 4, &int(3)).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let op = extended_pf();
        assert_eq!(ThetaOperator::from_json(&op.to_json(), r()).unwrap(), op);
    }
}
