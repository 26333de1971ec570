//! Closed-form generators: I-functions of both phases, disk potentials, the LG-side
//! continuation coefficients and the exact Gamma identities behind the oscillatory periods.

use num_traits::{One, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::error::Result;
use crate::exact::{double_factorial, factorial, gamma_half_integer, int, pochhammer, rat, sign_pow, PiHalfScalar, Rational};
use crate::par::ExecPolicy;
use crate::series::{PuiseuxLogSeries, PuiseuxSeries, DEFAULT_RAMIFICATION};

const R: u32 = DEFAULT_RAMIFICATION;

/// `H`-polynomial truncated mod `H^4`.
type HPoly = [Rational; 4];

fn h_mul(a: &HPoly, b: &HPoly) -> HPoly {
    let mut out: HPoly = Default::default();
    for i in 0..4 {
        for j in 0..4 - i {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

/// `prod_{m=1}^{5d} (5H + m) / prod_{m=1}^{d} (H + m)^5` mod `H^4`.
pub fn cy_h_coefficient(d: u64) -> HPoly {
    let mut acc: HPoly = [Rational::one(), Rational::zero(), Rational::zero(), Rational::zero()];
    for m in 1..=5 * d as i64 {
        let x = rat(5, m);
        acc = h_mul(&acc, &[int(m), x * int(m), Rational::zero(), Rational::zero()]);
    }
    for m in 1..=d as i64 {
        // 1/(m + H) = (1/m) (1 - H/m + H^2/m^2 - H^3/m^3)
        let u = rat(1, m);
        let inv: HPoly = [u.clone(), -(&u * &u), &u * &u * &u, -(&u * &u * &u * &u)];
        for _ in 0..5 {
            acc = h_mul(&acc, &inv);
        }
    }
    acc
}

fn degrees_below(order: &Rational) -> Vec<u64> {
    let top = order.ceil().to_integer();
    let top: i64 = top.try_into().unwrap_or(0);
    (0..top.max(0) as u64).collect()
}

/// Component `k` (0..=3) of the CY I-function, with the `e^{H log q}` factor expanded.
pub fn i_cy(k: usize, order: &Rational) -> Result<PuiseuxLogSeries> {
    i_cy_with(k, order, ExecPolicy::default())
}

/// [`i_cy`] with an explicit execution policy for the per-degree coefficients.
pub fn i_cy_with(k: usize, order: &Rational, policy: ExecPolicy) -> Result<PuiseuxLogSeries> {
    assert!(k <= 3, "component index must be 0..=3");
    let coeffs = policy.map(degrees_below(order), |d| (d, cy_h_coefficient(d)));
    let mut parts = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let terms: Vec<(Rational, Rational)> = coeffs.iter().map(|(d, h)| (int(*d as i64), h[k - i].clone())).collect();
        parts.push(PuiseuxSeries::from_terms(R, Some(order), &terms)?);
    }
    PuiseuxLogSeries::new(parts)
}

/// All four CY components at once.
pub fn i_cy_all(order: &Rational) -> Result<[PuiseuxLogSeries; 4]> {
    Ok([i_cy(0, order)?, i_cy(1, order)?, i_cy(2, order)?, i_cy(3, order)?])
}

/// Component `k` (0..=3) of the LG I-function, a series in `t` supported on `t^{k+1+5Z}`.
pub fn i_lg(k: usize, order: &Rational) -> Result<PuiseuxSeries> {
    i_lg_with(k, order, ExecPolicy::default())
}

pub fn i_lg_with(k: usize, order: &Rational, policy: ExecPolicy) -> Result<PuiseuxSeries> {
    assert!(k <= 3, "component index must be 0..=3");
    let base = rat(k as i64 + 1, 5);
    let ds: Vec<u64> = degrees_below(&(order - int(1))).into_iter().filter(|d| *d as usize % 5 == k).collect();
    let terms = policy.map(ds, |d| {
        let m = ((d as usize - k) / 5) as u32;
        let c = pochhammer(&base, m);
        let c5 = &c * &c * &c * &c * &c;
        (int(d as i64 + 1), c5 / factorial(d as i64).unwrap())
    });
    PuiseuxSeries::from_terms(R, Some(order), &terms)
}

/// The same LG component from the Gamma-quotient form
/// `Gamma((d+1)/5)^5 / Gamma({(d+1)/5})^5`, built as a product of ratios `Gamma(x+1)/Gamma(x) = x`.
pub fn i_lg_gamma_form(k: usize, order: &Rational) -> Result<PuiseuxSeries> {
    let mut terms = Vec::new();
    for d in degrees_below(&(order - int(1))) {
        if d as usize % 5 != k {
            continue;
        }
        let mut x = rat(d as i64 + 1, 5);
        let mut ratio = Rational::one();
        while x > Rational::one() {
            x -= Rational::one();
            ratio *= &x;
        }
        let r5 = &ratio * &ratio * &ratio * &ratio * &ratio;
        terms.push((int(d as i64 + 1), r5 / factorial(d as i64)?));
    }
    PuiseuxSeries::from_terms(R, Some(order), &terms)
}

/// `T^CY = 2 sum_{d odd} (5d)!! / (d!!)^5 q^{d/2}`.
pub fn t_cy(order: &Rational) -> Result<PuiseuxSeries> {
    let mut terms = Vec::new();
    let mut d = 1i64;
    while rat(d, 2) < *order {
        let num = double_factorial(5 * d)?;
        let den = double_factorial(d)?;
        terms.push((rat(d, 2), int(2) * num / (&den * &den * &den * &den * &den)));
        d += 2;
    }
    PuiseuxSeries::from_terms(R, Some(order), &terms)
}

/// LG disk potential in both forms.
#[derive(Clone, Debug)]
pub struct TlgSeries {
    /// Series in `t`, supported on `t^{5/2 + 5Z}`.
    pub t_form: PuiseuxSeries,
    /// The same terms as `(q-exponent, coefficient)` with exponents `-d/2`, `d` odd.
    pub q_terms: Vec<(Rational, Rational)>,
}

/// `T^LG = -2 sum_{d odd} (d!!)^5 / (d^5 (5d-2)!!) q^{-d/2}` with `q = t^{-5}`; `order` bounds
/// the `t`-exponent.
pub fn t_lg(order: &Rational) -> Result<TlgSeries> {
    let mut t_terms = Vec::new();
    let mut q_terms = Vec::new();
    let mut d = 1i64;
    while rat(5 * d, 2) < *order {
        let n = double_factorial(d)?;
        let n5 = &n * &n * &n * &n * &n;
        let c = int(-2) * n5 / (int(d).pow(5) * double_factorial(5 * d - 2)?);
        t_terms.push((rat(5 * d, 2), c.clone()));
        q_terms.push((rat(-d, 2), c));
        d += 2;
    }
    Ok(TlgSeries { t_form: PuiseuxSeries::from_terms(R, Some(order), &t_terms)?, q_terms })
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// The four coefficients as printed for the LG-side continuation term:
/// `c_m = -i (pi^3/10) e^{4 pi i m/5} / (Gamma(1 - m/5)^5 cos(pi m/5))`, `m = 1..4`.
pub fn t_c_coefficients(precision_bits: u32) -> [Complex; 4] {
    let prec = precision_bits.max(64) + 32;
    let out: Vec<Complex> = (1..=4)
        .map(|m: u32| {
            let p = pi(prec);
            let pi3 = Float::with_val(prec, p.clone() * &p * &p) / 10u32;
            let g = Float::with_val(prec, 1 - Float::with_val(prec, m) / 5u32).gamma();
            let g5 = Float::with_val(prec, g.pow(5u32));
            let cosv = (Float::with_val(prec, &p * m) / 5u32).cos();
            let ang = Float::with_val(prec, &p * (4 * m)) / 5u32;
            let phase = Complex::with_val(prec, (0, ang)).exp();
            let mag = pi3 / (g5 * cosv);
            let c = phase * Complex::with_val(prec, (0, -mag));
            Complex::with_val(precision_bits.max(64), c)
        })
        .collect();
    out.try_into().unwrap()
}

/// Path along which `T^CY` is continued from small `|q|` to the LG side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    /// `Im q < 0` along the way; this is also the side on which the hemisphere integral with the
    /// principal branch of `q^{-sigma}` converges, so it is what `hemisphere_z` continues along.
    Lower,
    Upper,
}

/// Continuation coefficients `d_m` with `T^CY = T^LG + sum_m d_m I^LG_{m-1}(t)` after continuing
/// along the given half plane. Lower: `d_m = -c_m`; upper: the complex conjugate of that.
pub fn continuation_coefficients(path: HalfPlane, precision_bits: u32) -> [Complex; 4] {
    let c = t_c_coefficients(precision_bits);
    c.map(|x| {
        let lower = -x;
        match path {
            HalfPlane::Lower => lower,
            HalfPlane::Upper => lower.conj(),
        }
    })
}

/// `sum_m coeffs[m-1] I^LG_{m-1}(t)` with the LG components summed to `order` in `t`.
pub fn t_c_value(coeffs: &[Complex; 4], log_t: &Complex, order: &Rational, prec: u32) -> Result<Complex> {
    let mut acc = Complex::new(prec);
    for (m, c) in coeffs.iter().enumerate() {
        acc += i_lg(m, order)?.eval(log_t, prec) * c;
    }
    Ok(acc)
}

/// Which identity family a check belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OscSide {
    Cy,
    Lg,
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub side: OscSide,
    pub m: u32,
    pub lhs: PiHalfScalar,
    pub rhs: PiHalfScalar,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug)]
pub struct OscillatoryReport {
    pub checks: Vec<IdentityCheck>,
}

impl OscillatoryReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }

    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }
}

/// Termwise Gamma identities in Q[sqrt(pi)]:
/// `16 (-1)^m Gamma(5m+7/2) Gamma(-m-1/2)^5 = -32 pi^3 [q^{m+1/2}] T^CY` and
/// `32 (-1)^m Gamma(-5m-3/2) Gamma(m+1/2)^5 = -64 pi^3 [t^{5/2+5m}] T^LG`.
pub fn verify_oscillatory_identities(m_max: u32) -> Result<OscillatoryReport> {
    let tcy = t_cy(&rat(2 * m_max as i64 + 3, 2))?;
    let tlg = t_lg(&(rat(5, 2) + int(5 * m_max as i64 + 1)))?.t_form;
    let pi3 = PiHalfScalar::new(Rational::one(), 6);
    let mut checks = Vec::new();
    for m in 0..=m_max {
        let mi = m as i64;
        let g1 = gamma_half_integer(&rat(10 * mi + 7, 2))?;
        let g2 = gamma_half_integer(&rat(-2 * mi - 1, 2))?.pow(5);
        let lhs = (&g1 * &g2).scale(&(int(16) * sign_pow(mi)));
        let rhs = pi3.scale(&(int(-32) * tcy.coeff(&rat(2 * mi + 1, 2))));
        checks.push(IdentityCheck { side: OscSide::Cy, m, lhs, rhs });

        let g1 = gamma_half_integer(&rat(-10 * mi - 3, 2))?;
        let g2 = gamma_half_integer(&rat(2 * mi + 1, 2))?.pow(5);
        let lhs = (&g1 * &g2).scale(&(int(32) * sign_pow(mi)));
        let rhs = pi3.scale(&(int(-64) * tlg.coeff(&(rat(5, 2) + int(5 * mi)))));
        checks.push(IdentityCheck { side: OscSide::Lg, m, lhs, rhs });
    }
    Ok(OscillatoryReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_cy_low_terms() {
        let i0 = i_cy(0, &int(3)).unwrap().log_free().unwrap();
        assert_eq!(i0.terms(), vec![(int(0), int(1)), (int(1), int(120)), (int(2), int(113400))]);
        let i1 = i_cy(1, &int(3)).unwrap();
        assert_eq!(i1.part(1), i0);
        assert_eq!(i1.part(0).coeff(&int(1)), int(770));
        assert_eq!(i1.part(0).coeff(&int(0)), int(0));
    }

    #[test]
    fn i_lg_low_terms() {
        let i0 = i_lg(0, &int(12)).unwrap();
        assert_eq!(i0.coeff(&int(1)), int(1));
        assert_eq!(i0.coeff(&int(6)), rat(1, 375000));
        assert_eq!(i_lg(1, &int(12)).unwrap().valuation(), Some(int(2)));
        for k in 0..4 {
            assert_eq!(i_lg(k, &int(40)).unwrap(), i_lg_gamma_form(k, &int(40)).unwrap());
        }
    }

    #[test]
    fn disk_terms() {
        let t = t_cy(&int(2)).unwrap();
        assert_eq!(t.coeff(&rat(1, 2)), int(30));
        assert_eq!(t.coeff(&rat(3, 2)), rat(50050, 3));
        let tl = t_lg(&int(8)).unwrap();
        assert_eq!(tl.t_form.coeff(&rat(5, 2)), rat(-2, 3));
        assert_eq!(tl.q_terms[0], (rat(-1, 2), rat(-2, 3)));
    }

    #[test]
    fn oscillatory_anchor() {
        let rep = verify_oscillatory_identities(0).unwrap();
        assert_eq!(rep.checks[0].lhs, PiHalfScalar::new(int(-960), 6));
        assert_eq!(rep.checks[1].lhs, PiHalfScalar::new(rat(128, 3), 6));
        assert!(rep.all_pass());
    }

    #[test]
    fn t_c_finite() {
        for c in t_c_coefficients(128) {
            assert!(c.real().is_finite() && c.imag().is_finite() && !c.is_zero());
        }
    }
}
