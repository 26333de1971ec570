//! Exact scalars: rationals, factorials, Pochhammer symbols and Gamma at half-integers.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-size rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n!`.
pub fn factorial(n: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::Domain(format!("factorial of negative integer {n}")));
    }
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Ok(Rational::from_integer(acc))
}

/// `n!! = n (n-2) (n-4) ...`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> Result<Rational> {
    if n < -1 {
        return Err(Error::Domain(format!("double factorial of {n}")));
    }
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(Rational::from_integer(acc))
}

/// Rising factorial `x (x+1) ... (x+m-1)`.
pub fn pochhammer(x: &Rational, m: u32) -> Rational {
    let mut acc = Rational::one();
    let mut y = x.clone();
    for _ in 0..m {
        acc *= &y;
        y += Rational::one();
    }
    acc
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Element `coeff * pi^(half_pi_power / 2)` of the graded ring Q[sqrt(pi)].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiHalfScalar {
    coeff: Rational,
    half_pi_power: u32,
}

impl PiHalfScalar {
    pub fn new(coeff: Rational, half_pi_power: u32) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self { coeff, half_pi_power }
        }
    }

    pub fn zero() -> Self {
        Self { coeff: Rational::zero(), half_pi_power: 0 }
    }

    pub fn rational(c: Rational) -> Self {
        Self::new(c, 0)
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn half_pi_power(&self) -> u32 {
        self.half_pi_power
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(&self.coeff * c, self.half_pi_power)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::rational(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Mul for &PiHalfScalar {
    type Output = PiHalfScalar;
    fn mul(self, rhs: &PiHalfScalar) -> PiHalfScalar {
        PiHalfScalar::new(&self.coeff * &rhs.coeff, self.half_pi_power + rhs.half_pi_power)
    }
}

impl Mul for PiHalfScalar {
    type Output = PiHalfScalar;
    fn mul(self, rhs: PiHalfScalar) -> PiHalfScalar {
        &self * &rhs
    }
}

impl fmt::Display for PiHalfScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.half_pi_power {
            0 => write!(f, "{}", self.coeff),
            p if p % 2 == 0 => write!(f, "({})*pi^{}", self.coeff, p / 2),
            p => write!(f, "({})*pi^({}/2)", self.coeff, p),
        }
    }
}

/// `Gamma(k)` for `k = n + 1/2`, exactly, as a rational multiple of `sqrt(pi)`.
pub fn gamma_half_integer(k: &Rational) -> Result<PiHalfScalar> {
    if *k.denom() != BigInt::from(2) {
        return Err(Error::Domain(format!("gamma_half_integer needs a half-integer, got {k}")));
    }
    // k = n + 1/2 with n = floor(k)
    let n = k.floor().to_integer().to_i64().ok_or_else(|| Error::Domain("argument too large".into()))?;
    let half = rat(1, 2);
    let c = if n >= 0 {
        pochhammer(&half, n as u32)
    } else {
        // Gamma(1/2 - m) = Gamma(1/2) / ((1/2 - m)_m)
        let m = (-n) as u32;
        pochhammer(&(&half - int(m as i64)), m).recip()
    };
    Ok(PiHalfScalar::new(c, 1))
}

/// True when `x` is an integer.
pub fn is_integer(x: &Rational) -> bool {
    x.is_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Least common multiple of the denominators.
pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// `(-1)^n` as a rational.
pub fn sign_pow(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(double_factorial(5).unwrap(), int(15));
        assert_eq!(double_factorial(15).unwrap(), int(2_027_025));
        assert_eq!(double_factorial(-1).unwrap(), int(1));
        assert_eq!(double_factorial(0).unwrap(), int(1));
        assert_eq!(factorial(10).unwrap(), int(3_628_800));
        assert!(factorial(-1).is_err());
        assert!(double_factorial(-2).is_err());
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&rat(1, 5), 0), int(1));
        assert_eq!(pochhammer(&rat(1, 5), 1), rat(1, 5));
        assert_eq!(pochhammer(&rat(1, 5), 2), rat(6, 25));
        assert_eq!(pochhammer(&int(-2), 4), int(0));
    }

    #[test]
    fn gamma_halves() {
        assert_eq!(gamma_half_integer(&rat(1, 2)).unwrap(), PiHalfScalar::new(int(1), 1));
        assert_eq!(gamma_half_integer(&rat(7, 2)).unwrap(), PiHalfScalar::new(rat(15, 8), 1));
        assert_eq!(gamma_half_integer(&rat(-3, 2)).unwrap(), PiHalfScalar::new(rat(4, 3), 1));
        assert_eq!(gamma_half_integer(&rat(-1, 2)).unwrap(), PiHalfScalar::new(int(-2), 1));
        assert!(gamma_half_integer(&int(3)).is_err());
    }

    #[test]
    fn zero_is_canonical() {
        let z = PiHalfScalar::new(int(0), 7);
        assert_eq!(z, PiHalfScalar::zero());
        let s = PiHalfScalar::new(int(3), 2);
        assert_eq!(&s * &z, PiHalfScalar::zero());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }
}
