//! Multiprecision Mellin-Barnes engine: complex Gamma, hemisphere contour
//! integrals, residue closures, and an ODE continuation of the disk potential.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, ToPrimitive, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};
use serde::Serialize;

use crate::branes::LaurentChar;
use crate::exact::{factorial, int, rat};
use crate::ifunc::{t_cy, HalfPlane};
use crate::par::{tree_sum, ExecPolicy};
use crate::series::rational_to_float;
use crate::{Error, Rational, Result};

/// Working precision and target accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Precision {
    pub bits: u32,
    pub target_rel_error: f64,
}

impl Precision {
    /// Target `2^{-bits/2}`.
    pub fn new(bits: u32) -> Self {
        let bits = bits.max(64);
        Precision { bits, target_rel_error: 2f64.powi(-(bits as i32) / 2) }
    }

    pub fn with_target(bits: u32, target_rel_error: f64) -> Self {
        Precision { bits: bits.max(64), target_rel_error }
    }
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

fn cx(prec: u32, re: impl Into<f64>, im: impl Into<f64>) -> Complex {
    Complex::with_val(prec, (re.into(), im.into()))
}

fn rat_c(r: &Rational, prec: u32) -> Complex {
    Complex::with_val(prec, (rational_to_float(r, prec), 0))
}

/// `|z|` as f64 in log2 form; handles values outside the f64 range.
fn log2_abs(z: &Complex) -> f64 {
    let a = Float::with_val(z.prec().0, z.abs_ref());
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    a.log2().to_f64()
}

/// `|a - b| / max(|a|, |b|)`, zero when equal.
pub fn rel_diff(a: &Complex, b: &Complex) -> f64 {
    let d = log2_abs(&Complex::with_val(a.prec().0, a - b));
    let s = log2_abs(b).max(log2_abs(a));
    if d == f64::NEG_INFINITY {
        return 0.0;
    }
    2f64.powf(d - s)
}

struct Spouge {
    a: u32,
    prec: u32,
    c0: Float,
    c: Vec<Float>,
}

fn spouge(bits: u32) -> Arc<Spouge> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Spouge>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap().get(&bits) {
        return s.clone();
    }
    // (2π)^{-a} below 2^{-bits}; the alternating coefficients cost about 1.5a bits
    let a = (bits as f64 * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI).ln()).ceil() as u32 + 2;
    let prec = bits + (a as f64 * 1.6) as u32 + 32;
    let c0 = Float::with_val(prec, pi(prec) * 2u32).sqrt();
    let mut c = Vec::with_capacity(a as usize);
    let mut fact = Float::with_val(prec, 1u32);
    for k in 1..a {
        if k > 1 {
            fact *= k - 1;
        }
        let base = Float::with_val(prec, a - k);
        let p = Float::with_val(prec, base.ln_ref()) * (Float::with_val(prec, k) - 0.5f64) + (a - k);
        let mut v = p.exp() / &fact;
        if k % 2 == 0 {
            v = -v;
        }
        c.push(v);
    }
    let s = Arc::new(Spouge { a, prec, c0, c });
    cache.lock().unwrap().insert(bits, s.clone());
    s
}

fn gamma_right(z: &Complex, bits: u32) -> Complex {
    let sp = spouge(bits);
    let p = sp.prec;
    let w = Complex::with_val(p, z - 1u32);
    let mut sum = Complex::with_val(p, (&sp.c0, 0));
    let mut den = Complex::with_val(p, &w);
    for ck in &sp.c {
        den += 1u32;
        sum += Complex::with_val(p, ck / &den);
    }
    let wa = Complex::with_val(p, &w + sp.a);
    let expo = Complex::with_val(p, &w + 0.5f64) * Complex::with_val(p, wa.ln_ref()) - &wa;
    Complex::with_val(bits, expo.exp() * sum)
}

/// Complex Gamma via Spouge's formula, reflection for `Re z < 1/2`.
pub fn gamma_numeric(z: &Complex, bits: u32) -> Result<Complex> {
    if z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0 {
        return Err(Error::Pole(z.real().to_f64() as i64));
    }
    if *z.real() >= 0.5f64 {
        return Ok(gamma_right(z, bits));
    }
    let wp = bits + 16;
    let one_minus = Complex::with_val(wp, 1u32 - z);
    let g = gamma_right(&one_minus, wp);
    let s = Complex::with_val(wp, z * pi(wp)).sin();
    Ok(Complex::with_val(bits, pi(wp) / (s * g)))
}

/// Which way a contour closes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Contour,
    Residues,
}

/// `∏ Γ(a_i σ + b_i) · q^{-σ} · Σ c_n e^{2πinσ}` on `Re σ = δ`.
#[derive(Clone, Debug)]
pub struct MBIntegrand {
    /// `(a, b, multiplicity)`.
    pub factors: Vec<(Rational, Rational, u32)>,
    pub insertion: LaurentChar,
    pub log_q: Complex,
    pub delta: Rational,
}

#[derive(Clone, Debug)]
pub struct NumericResult {
    pub value: Complex,
    pub est_error: f64,
    pub method: &'static str,
    pub n_terms: usize,
}

impl NumericResult {
    pub fn scaled(mut self, c: &Complex) -> Self {
        let prec = self.value.prec().0;
        self.value = Complex::with_val(prec, &self.value * c);
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let digits = ((self.value.prec().0 as f64) * 0.30103) as usize;
        serde_json::json!({
            "value_re": format!("{:.*e}", digits, self.value.real()),
            "value_im": format!("{:.*e}", digits, self.value.imag()),
            "est_error": self.est_error,
            "method": self.method,
            "n_terms": self.n_terms,
        })
    }
}

impl MBIntegrand {
    /// Groups repeated factors and checks that `Re σ = δ` separates the poles.
    pub fn new(factors: &[(Rational, Rational)], insertion: LaurentChar, log_q: Complex, delta: Rational) -> Result<Self> {
        let mut grouped: Vec<(Rational, Rational, u32)> = Vec::new();
        for (a, b) in factors {
            if a.is_zero() {
                return Err(Error::Domain("gamma factor without σ dependence".into()));
            }
            if (a * &delta + b) <= Rational::zero() {
                return Err(Error::Domain(format!("δ = {delta} does not separate the poles of Γ({a}σ + {b})")));
            }
            match grouped.iter_mut().find(|(x, y, _)| x == a && y == b) {
                Some(g) => g.2 += 1,
                None => grouped.push((a.clone(), b.clone(), 1)),
            }
        }
        Ok(MBIntegrand { factors: grouped, insertion, log_q, delta })
    }

    fn all_factors(&self) -> impl Iterator<Item = (&Rational, &Rational, u32)> {
        self.factors.iter().map(|(a, b, m)| (a, b, *m))
    }

    pub fn eval(&self, sigma: &Complex, bits: u32) -> Result<Complex> {
        let mut acc = Complex::with_val(bits, (1, 0));
        for (a, b, m) in self.all_factors() {
            let z = Complex::with_val(bits, sigma * rational_to_float(a, bits)) + rational_to_float(b, bits);
            let g = gamma_numeric(&z, bits)?;
            acc *= if m == 1 { g } else { g.pow(m) };
        }
        Ok(acc * self.rest(sigma, bits))
    }

    /// `q^{-σ}` times the insertion.
    fn rest(&self, sigma: &Complex, bits: u32) -> Complex {
        let qpart = (-Complex::with_val(bits, sigma * &self.log_q)).exp();
        qpart * self.insertion.insertion(sigma, bits)
    }

    /// `log` of the closure threshold in `|q|`: left closures converge below it, right above.
    pub fn log_threshold(&self) -> f64 {
        self.all_factors()
            .map(|(a, _, m)| {
                let a = a.to_f64().unwrap();
                m as f64 * a * a.abs().ln()
            })
            .sum()
    }

    fn balanced(&self) -> bool {
        self.all_factors().map(|(a, _, m)| a * int(m as i64)).sum::<Rational>().is_zero()
    }

    /// Exponential growth rate of the integrand along `σ = r e^{iα}`, `r → ∞`.
    pub fn indicator(&self, alpha: f64) -> f64 {
        let (c, s) = (alpha.cos(), alpha.sin());
        let mut re = 0.0;
        for (a, _, m) in self.all_factors() {
            let a = a.to_f64().unwrap();
            // Re[u a Log(a u)] with u = e^{iα}
            let mut arg = alpha + if a < 0.0 { std::f64::consts::PI } else { 0.0 };
            if arg > std::f64::consts::PI {
                arg -= 2.0 * std::f64::consts::PI;
            }
            re += m as f64 * a * (c * a.abs().ln() - s * arg);
        }
        let lq_re = self.log_q.real().to_f64();
        let lq_im = self.log_q.imag().to_f64();
        let ins = self
            .insertion
            .support()
            .into_iter()
            .map(|n| -2.0 * std::f64::consts::PI * n as f64 * s)
            .fold(f64::NEG_INFINITY, f64::max);
        if ins == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        re + ins - (c * lq_re - s * lq_im)
    }

    /// Power of `|s|` multiplying the exponential on the vertical line.
    fn vertical_power(&self) -> f64 {
        self.all_factors()
            .map(|(a, b, m)| m as f64 * ((a * &self.delta + b).to_f64().unwrap() - 0.5))
            .sum()
    }

    /// Decay on the vertical line, each direction; the offending insertion
    /// exponent is reported when the Gamma decay loses.
    pub fn check_decay(&self) -> Result<()> {
        if !self.balanced() {
            return Err(Error::Domain("unbalanced gamma factors (Σ a_i ≠ 0) are not supported".into()));
        }
        let gamma_decay: f64 =
            self.all_factors().map(|(a, _, m)| m as f64 * a.to_f64().unwrap().abs()).sum::<f64>() * std::f64::consts::FRAC_PI_2;
        let arg = self.log_q.imag().to_f64();
        for up in [true, false] {
            for n in self.insertion.support() {
                // e^{2πinσ} ~ e^{∓2πn s}, q^{-σ} ~ e^{± s arg q}
                let grow = if up { -2.0 * std::f64::consts::PI * n as f64 + arg } else { 2.0 * std::f64::consts::PI * n as f64 - arg };
                let rate = grow - gamma_decay;
                if rate > 1e-12 || (rate.abs() <= 1e-12 && self.vertical_power() >= -1.0) {
                    return Err(Error::Divergent { exponent: n });
                }
            }
        }
        Ok(())
    }

    fn ray_angle(&self, upper: bool) -> (f64, f64) {
        // walk away from the vertical while the indicator stays negative
        let sgn = if upper { 1.0 } else { -1.0 };
        let mut best = (sgn * std::f64::consts::FRAC_PI_2, self.indicator(sgn * std::f64::consts::FRAC_PI_2));
        for dir in [-1.0, 1.0] {
            let mut a = std::f64::consts::FRAC_PI_2;
            while a > 0.25 && a < std::f64::consts::PI - 0.25 {
                a += dir * 0.02;
                let h = self.indicator(sgn * a);
                if h >= 0.0 {
                    break;
                }
                if h < best.1 {
                    best = (sgn * a, h);
                }
            }
        }
        best
    }
}

fn gl_nodes(n: usize, bits: u32) -> Arc<Vec<(Float, Float)>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Vec<(Float, Float)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(n, bits)) {
        return v.clone();
    }
    let wp = bits + 32;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(wp, guess);
        let mut dp = Float::new(wp);
        for it in 0..200 {
            let (p, d) = legendre(n, &x, wp);
            let dx = Float::with_val(wp, &p / &d);
            x -= &dx;
            dp = d;
            if it > 2 && (dx.is_zero() || dx.clone().abs().log2().to_f64() < -(wp as f64) + 4.0) {
                let (_, d) = legendre(n, &x, wp);
                dp = d;
                break;
            }
        }
        let one_m = Float::with_val(wp, 1u32 - Float::with_val(wp, &x * &x));
        let w = Float::with_val(wp, 2u32) / (one_m * Float::with_val(wp, &dp * &dp));
        out.push((Float::with_val(bits, &x), Float::with_val(bits, &w)));
    }
    let v = Arc::new(out);
    cache.lock().unwrap().insert((n, bits), v.clone());
    v
}

fn legendre(n: usize, x: &Float, wp: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(wp, 1u32);
    let mut p1 = x.clone();
    for k in 2..=n {
        let p2 = (Float::with_val(wp, x * &p1) * (2 * k - 1) as u32 - Float::with_val(wp, &p0 * (k - 1) as u32)) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    let xx = Float::with_val(wp, x * x) - 1u32;
    let d = (Float::with_val(wp, x * &p1) - &p0) * n as u32 / xx;
    (p1, d)
}

fn gl_panel(ig: &MBIntegrand, start: &Complex, dir: &Complex, r0: f64, r1: f64, n: usize, bits: u32) -> Result<Complex> {
    let nodes = gl_nodes(n, bits);
    // endpoints are exact f64 values; midpoint and half-width must not round
    let half = (Float::with_val(bits, r1) - r0) / 2u32;
    let mid = (Float::with_val(bits, r1) + r0) / 2u32;
    let mut acc = Complex::new(bits);
    for (x, w) in nodes.iter() {
        let r = Float::with_val(bits, x * &half) + &mid;
        let sigma = Complex::with_val(bits, dir * &r) + start;
        acc += ig.eval(&sigma, bits)? * w;
    }
    Ok(acc * &half * dir)
}

#[derive(Clone)]
struct Panel {
    r0: f64,
    r1: f64,
    value: Complex,
    err: f64,
}

fn ray_integral(ig: &MBIntegrand, alpha: f64, rate: f64, prec: Precision, policy: ExecPolicy) -> Result<(Complex, f64, usize)> {
    let bits = prec.bits + 32;
    let start = rat_c(&ig.delta, bits);
    let dir = Complex::with_val(bits, (alpha.cos(), alpha.sin()));
    let n_hi = (prec.bits as usize / 4 + 8).max(24);
    let n_lo = n_hi * 2 / 3;
    let sin_a = alpha.sin().abs().max(0.2);
    let mut breaks = vec![0.0, 0.025, 0.05, 0.1, 0.2, 0.4, 0.8];
    let extend = |breaks: &mut Vec<f64>, upto: f64| {
        while *breaks.last().unwrap() < upto {
            let r = *breaks.last().unwrap();
            breaks.push(r + (0.5 * r * sin_a).clamp(0.4, 2.0));
        }
    };
    let ln_target = prec.target_rel_error.ln();
    let mut reach = (-ln_target + 20.0) / rate.abs().max(1e-3);
    extend(&mut breaks, reach.min(400.0));
    let eval_panel = |(r0, r1): (f64, f64)| -> Result<Panel> {
        let hi = gl_panel(ig, &start, &dir, r0, r1, n_hi, bits)?;
        let lo = gl_panel(ig, &start, &dir, r0, r1, n_lo, bits)?;
        let err = 2f64.powf(log2_abs(&Complex::with_val(bits, &hi - &lo)));
        Ok(Panel { r0, r1, value: hi, err })
    };
    let mut panels: Vec<Panel> = policy
        .map(breaks.windows(2).map(|w| (w[0], w[1])).collect(), eval_panel)
        .into_iter()
        .collect::<Result<_>>()?;
    for _round in 0..8 {
        let scale = panels.iter().map(|p| 2f64.powf(log2_abs(&p.value))).sum::<f64>().max(f64::MIN_POSITIVE);
        let total_log2 = log2_abs(&tree_sum(panels.iter().map(|p| p.value.clone()).collect(), bits));
        let total = 2f64.powf(total_log2).max(scale * 1e-30);
        let tol = prec.target_rel_error * total / panels.len() as f64;
        // tail: the last panel must be negligible
        let last = panels.last().unwrap();
        let tail_big = 2f64.powf(log2_abs(&last.value)) > tol * 1e-2;
        let bad: Vec<usize> = (0..panels.len()).filter(|&i| panels[i].err > tol).collect();
        if bad.is_empty() && !tail_big {
            break;
        }
        let mut work: Vec<(f64, f64)> = Vec::new();
        let mut keep: Vec<Panel> = Vec::new();
        for (i, p) in panels.iter().enumerate() {
            if bad.contains(&i) {
                let m = (p.r0 + p.r1) / 2.0;
                work.push((p.r0, m));
                work.push((m, p.r1));
            } else {
                keep.push(p.clone());
            }
        }
        if tail_big {
            let r = panels.last().unwrap().r1;
            reach = r * 1.5 + 5.0;
            let mut b = vec![r];
            extend(&mut b, reach);
            work.extend(b.windows(2).map(|w| (w[0], w[1])));
        }
        let new: Vec<Panel> = policy.map(work, eval_panel).into_iter().collect::<Result<_>>()?;
        keep.extend(new);
        keep.sort_by(|a, b| a.r0.partial_cmp(&b.r0).unwrap());
        panels = keep;
    }
    let n = panels.len() * (n_hi + n_lo);
    let err: f64 = panels.iter().map(|p| p.err).sum();
    let value = tree_sum(panels.into_iter().map(|p| p.value).collect(), bits);
    Ok((value, err, n))
}

/// `(1/2πi) ∫ dσ` upward along `Re σ = δ`, evaluated on two rays from `δ`
/// tilted into the directions of fastest decay.
pub fn contour_integrate(ig: &MBIntegrand, prec: Precision, policy: ExecPolicy) -> Result<NumericResult> {
    let bits = prec.bits;
    if ig.insertion.is_zero() {
        return Ok(NumericResult { value: Complex::new(bits), est_error: 0.0, method: "contour", n_terms: 0 });
    }
    ig.check_decay()?;
    let (au, hu) = ig.ray_angle(true);
    let (ad, hd) = ig.ray_angle(false);
    if hu >= 0.0 || hd >= 0.0 {
        let worst = ig.insertion.support().into_iter().max_by_key(|n| n.abs()).unwrap_or(0);
        return Err(Error::Divergent { exponent: worst });
    }
    let (up, eu, nu) = ray_integral(ig, au, hu, prec, policy)?;
    let (dn, ed, nd) = ray_integral(ig, ad, hd, prec, policy)?;
    let wp = bits + 32;
    let two_pi_i = Complex::with_val(wp, (0, pi(wp) * 2u32));
    let value = Complex::with_val(bits, (up - dn) / two_pi_i);
    let est_error = (eu + ed) / (2.0 * std::f64::consts::PI);
    Ok(NumericResult { value, est_error, method: "contour", n_terms: nu + nd })
}

/// Pole location and total order.
fn poles(ig: &MBIntegrand, side: Side, count: usize) -> Vec<(Rational, u32)> {
    let mut map: BTreeMap<Rational, u32> = BTreeMap::new();
    let per = count as i64 + 2;
    for (a, b, m) in ig.all_factors() {
        let left = a.is_positive();
        if left != (side == Side::Left) {
            continue;
        }
        for k in 0..per {
            let s = (-b - int(k)) / a;
            *map.entry(s).or_insert(0) += m;
        }
    }
    let mut v: Vec<(Rational, u32)> = map.into_iter().collect();
    v.sort_by(|x, y| (&x.0 - &ig.delta).abs().cmp(&(&y.0 - &ig.delta).abs()));
    v.truncate(count);
    v
}

fn residue_at(ig: &MBIntegrand, s0: &Rational, order: u32, bits: u32) -> Result<Complex> {
    if order == 1 {
        let mut acc = Complex::with_val(bits, (1, 0));
        let sc = rat_c(s0, bits);
        for (a, b, m) in ig.all_factors() {
            let z = a * s0 + b;
            if z <= Rational::zero() && z.is_integer() {
                // Res Γ(aσ+b) at aσ+b = -k is (-1)^k / (k! a)
                let k = (-z).to_integer().to_i64().unwrap();
                let r = crate::exact::sign_pow(k) / (factorial(k)? * a);
                acc *= rat_c(&r, bits);
            } else {
                let g = gamma_numeric(&rat_c(&z, bits), bits)?;
                acc *= if m == 1 { g } else { g.pow(m) };
            }
        }
        return Ok(acc * ig.rest(&sc, bits));
    }
    // small-circle Cauchy quadrature
    let wp = bits + order * bits / 4 + 64;
    let nodes = 64usize.max(4 * order as usize);
    let radius = Float::with_val(wp, Float::i_exp(1, -((bits / 4) as i32)));
    let center = rat_c(s0, wp);
    let mut terms = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let theta = Float::with_val(wp, pi(wp) * 2u32) * (j as f64 + 0.5) / nodes as f64;
        let e = Complex::with_val(wp, (Float::with_val(wp, theta.cos_ref()), Float::with_val(wp, theta.sin_ref())));
        let off = Complex::with_val(wp, &e * &radius);
        let s = Complex::with_val(wp, &center + &off);
        terms.push(ig.eval(&s, wp)? * off);
    }
    let sum = tree_sum(terms, wp);
    Ok(Complex::with_val(bits, sum / nodes as u32))
}

/// Individual residues `(location, pole order, residue)` at the poles nearest `δ`.
pub fn pole_residues(ig: &MBIntegrand, side: Side, count: usize, bits: u32, policy: ExecPolicy) -> Result<Vec<(Rational, u32, Complex)>> {
    let ps = poles(ig, side, count);
    let res: Vec<Complex> = policy.map(ps.clone(), |(s, k)| residue_at(ig, &s, k, bits)).into_iter().collect::<Result<_>>()?;
    Ok(ps.into_iter().zip(res).map(|((s, k), r)| (s, k, r)).collect())
}

/// Sum of residues at the first `n_terms` pole locations on one side.
/// Left closures add residues, right closures subtract them.
pub fn residue_sum(ig: &MBIntegrand, side: Side, n_terms: usize, prec: Precision, policy: ExecPolicy) -> Result<NumericResult> {
    check_side(ig, side)?;
    let bits = prec.bits + 16;
    let ps = poles(ig, side, n_terms);
    let res: Vec<Complex> = policy.map(ps.clone(), |(s, k)| residue_at(ig, &s, k, bits)).into_iter().collect::<Result<_>>()?;
    let tail = res.iter().rev().take(3).map(|r| 2f64.powf(log2_abs(r))).sum::<f64>();
    let mut value = tree_sum(res, bits);
    if side == Side::Right {
        value = -value;
    }
    let value = Complex::with_val(prec.bits, value);
    let scale = 2f64.powf(log2_abs(&value)).max(f64::MIN_POSITIVE);
    Ok(NumericResult { value, est_error: tail / scale, method: side_name(side), n_terms: ps.len() })
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "residues-left",
        Side::Right => "residues-right",
    }
}

fn check_side(ig: &MBIntegrand, side: Side) -> Result<()> {
    let lr = ig.log_q.real().to_f64() - ig.log_threshold();
    let ok = match side {
        Side::Left => lr < 0.0,
        Side::Right => lr > 0.0,
    };
    if !ok {
        return Err(Error::Convergence(format!(
            "|q|/threshold = {:.4e}; {} closure needs a ratio {} 1",
            lr.exp(),
            if side == Side::Left { "left" } else { "right" },
            if side == Side::Left { "<" } else { ">" }
        )));
    }
    Ok(())
}

/// Adds pole batches until three consecutive batches are below the target.
pub fn residue_sum_auto(ig: &MBIntegrand, side: Side, prec: Precision, policy: ExecPolicy) -> Result<NumericResult> {
    check_side(ig, side)?;
    let bits = prec.bits + 16;
    let batch = 16usize;
    let mut all = poles(ig, side, 4096).into_iter();
    let mut sum = Complex::new(bits);
    let mut quiet = 0;
    let mut n = 0;
    let mut last = f64::INFINITY;
    while quiet < 3 && n < 4096 {
        let chunk: Vec<(Rational, u32)> = all.by_ref().take(batch).collect();
        if chunk.is_empty() {
            break;
        }
        n += chunk.len();
        let res: Vec<Complex> = policy.map(chunk, |(s, k)| residue_at(ig, &s, k, bits)).into_iter().collect::<Result<_>>()?;
        let part = tree_sum(res, bits);
        last = 2f64.powf(log2_abs(&part));
        sum += &part;
        let scale = 2f64.powf(log2_abs(&sum));
        if last <= prec.target_rel_error * scale * 1e-3 || last == 0.0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
    }
    if side == Side::Right {
        sum = -sum;
    }
    let value = Complex::with_val(prec.bits, sum);
    let scale = 2f64.powf(log2_abs(&value)).max(f64::MIN_POSITIVE);
    Ok(NumericResult { value, est_error: last / scale, method: side_name(side), n_terms: n })
}

/// Built-in gauge theories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Quintic,
    Extended,
}

impl Model {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quintic" => Ok(Model::Quintic),
            "extended" => Ok(Model::Extended),
            o => Err(Error::Domain(format!("unknown model `{o}`"))),
        }
    }

    pub fn gamma_factors(self) -> Vec<(Rational, Rational)> {
        let mut f = vec![(int(1), int(0)); 5];
        f.push((int(-5), int(1)));
        if self == Model::Extended {
            f.push((int(1), rat(1, 2)));
            f.push((int(-1), rat(1, 2)));
        }
        f
    }

    /// Grade-restriction half width `¼ Σ |D_i|`.
    pub fn window(self) -> Rational {
        match self {
            Model::Quintic => rat(5, 2),
            Model::Extended => int(3),
        }
    }
}

/// Every constant relating bare integrals to central charges and potentials.
pub mod normalization {
    /// Overall sign in front of the hemisphere integral (both models).
    pub const HEMISPHERE_SIGN: i32 = -1;
    /// `Z(walcher brane) = 64 π^3 T^CY`: coefficient of `π^3`.
    pub const OPEN_CLOSED_PI3: u32 = 64;
    /// `∫_{Bμ_2} 1`, the groupoid measure of the finite factor.
    pub const MU2_MEASURE: (i64, i64) = (1, 2);
    /// The `T_c` integral is `1/(32π^2)` times the quintic integral with
    /// `q → e^{iπ} q` and the `f` character inserted.
    pub const TC_OVER_QUINTIC_PI2: u32 = 32;
    /// `T^LG` integral prefactor `i/(2π^2)`.
    pub const TLG_PI2: u32 = 2;
}

/// `64 π^3`.
pub fn open_closed_factor(bits: u32) -> Complex {
    Complex::with_val(bits, (pi(bits).pow(3u32) * normalization::OPEN_CLOSED_PI3, 0))
}

pub fn model_integrand(model: Model, insertion: &LaurentChar, log_q: &Complex) -> Result<MBIntegrand> {
    MBIntegrand::new(&model.gamma_factors(), insertion.clone(), log_q.clone(), rat(1, 10))
}

/// Hemisphere partition function `-(1/2πi) ∫ Γ-factors q^{-σ} Ch dσ`.
pub fn hemisphere_z(
    model: Model,
    insertion: &LaurentChar,
    log_q: &Complex,
    method: Method,
    prec: Precision,
    policy: ExecPolicy,
) -> Result<NumericResult> {
    let ig = model_integrand(model, insertion, log_q)?;
    let ratio = log_q.real().to_f64() - ig.log_threshold();
    let r = match method {
        Method::Contour => contour_integrate(&ig, prec, policy)?,
        Method::Residues => residue_sum_auto(&ig, if ratio < 0.0 { Side::Left } else { Side::Right }, prec, policy)?,
        Method::Auto => {
            if ratio < -3.5 {
                residue_sum_auto(&ig, Side::Left, prec, policy)?
            } else if ratio > 3.5 {
                residue_sum_auto(&ig, Side::Right, prec, policy)?
            } else {
                contour_integrate(&ig, prec, policy)?
            }
        }
    };
    let sign = Complex::with_val(prec.bits, (normalization::HEMISPHERE_SIGN, 0));
    Ok(r.scaled(&sign))
}

/// `log q` from a decimal magnitude and a phase in units of `π`.
pub fn log_q_from(magnitude: &str, arg_over_pi: f64, bits: u32) -> Result<Complex> {
    let parsed = Float::parse(magnitude).map_err(|_| Error::Domain(format!("bad q `{magnitude}`")))?;
    let m = Float::with_val(bits + 16, parsed);
    if m <= 0 {
        return Err(Error::Domain("|q| must be positive".into()));
    }
    let im = pi(bits + 16) * arg_over_pi;
    Ok(Complex::with_val(bits, (m.ln(), im)))
}

/// `T^CY` continued from small `|q|` to `log_q` by Taylor-stepping its
/// inhomogeneous ODE in `x = log q`; when the end point lies past the
/// conifold `|q| = 5^{-5}` the path passes it on the given side.
pub fn t_cy_continued(log_q: &Complex, side: HalfPlane, bits: u32) -> Result<Complex> {
    let wp = bits + 40;
    let x_c = -5.0 * 5f64.ln();
    let x0 = -18.0f64;
    let target = Complex::with_val(wp, log_q);
    let tre = target.real().to_f64();
    let mut state = series_state(x0, wp)?;
    let mut here = cx(wp, x0, 0.0);
    let mut way: Vec<Complex> = Vec::new();
    if tre > x_c - 0.5 {
        let s = if side == HalfPlane::Lower { -1.0 } else { 1.0 };
        way.push(cx(wp, x_c - 1.0, 0.0));
        way.push(cx(wp, x_c, s));
    }
    way.push(target);
    for w in way {
        loop {
            let d = Complex::with_val(wp, &w - &here);
            let len = Float::with_val(53, d.abs_ref()).to_f64();
            if len == 0.0 {
                break;
            }
            let (hr, hi) = (here.real().to_f64(), here.imag().to_f64());
            let rho = (-1..=1)
                .map(|k| ((hr - x_c).powi(2) + (hi - 2.0 * std::f64::consts::PI * k as f64).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            let hmax = rho / 3.0;
            let h = if len <= hmax { d.clone() } else { Complex::with_val(wp, &d * (hmax / len)) };
            state = taylor_step(&here, &state, &h, wp);
            here += &h;
            if len <= hmax {
                here = w.clone();
                break;
            }
        }
    }
    Ok(Complex::with_val(bits, &state[0]))
}

fn series_state(x0: f64, wp: u32) -> Result<[Complex; 4]> {
    let order = int(((wp as f64) / 12.0).ceil() as i64 + 4);
    let s = t_cy(&order)?;
    let mut st: [Complex; 4] = std::array::from_fn(|_| Complex::new(wp));
    for (e, c) in s.terms() {
        let ef = rational_to_float(&e, wp);
        let term = Complex::with_val(wp, (Float::with_val(wp, &ef * x0).exp() * rational_to_float(&c, wp), 0));
        let mut p = Float::with_val(wp, 1u32);
        for slot in st.iter_mut() {
            *slot += Complex::with_val(wp, &term * &p);
            p *= &ef;
        }
    }
    Ok(st)
}

/// One Taylor step of `(1-3125q)θ^4T = 5q(1250θ^3+875θ^2+250θ+24)T + (15/8) q^{1/2}`.
fn taylor_step(x: &Complex, st: &[Complex; 4], h: &Complex, wp: u32) -> [Complex; 4] {
    let habs = Float::with_val(53, h.abs_ref()).to_f64().max(1e-300);
    let kmax = ((wp as f64) * std::f64::consts::LN_2 / 3f64.ln()).ceil() as usize + 8;
    let kmax = if habs < 1e-30 { 4 } else { kmax };
    let q = Complex::with_val(wp, x.exp_ref());
    let e = Complex::with_val(wp, x / 2u32).exp();
    let n = kmax + 4;
    let mut a: Vec<Complex> = Vec::with_capacity(n + 1);
    let mut fact = Float::with_val(wp, 1u32);
    for (j, s) in st.iter().enumerate() {
        if j > 0 {
            fact *= j as u32;
        }
        a.push(Complex::with_val(wp, s / &fact));
    }
    let mut inv_fact = vec![Float::with_val(wp, 1u32)];
    for m in 1..=n {
        let f = Float::with_val(wp, &inv_fact[m - 1] / m as u32);
        inv_fact.push(f);
    }
    // b_j[k] = (k+1)...(k+j) a[k+j]
    let fall = |k: usize, j: usize| -> u64 { ((k + 1)..=(k + j)).map(|v| v as u64).product::<u64>().max(1) };
    let one_m = Complex::with_val(wp, 1u32 - Complex::with_val(wp, &q * 3125u32));
    let mut rhs_inh = Complex::with_val(wp, &e * 15u32) / 8u32;
    for k in 0..kmax {
        // (15/8) E 2^{-k}/k!
        if k > 0 {
            rhs_inh /= 2 * k as u32;
        }
        let mut acc = rhs_inh.clone();
        let mut conv3125 = Complex::new(wp);
        let mut conv5 = Complex::new(wp);
        for m in 0..=k {
            let kk = k - m;
            let mut lin = Complex::with_val(wp, &a[kk + 3] * (1250 * fall(kk, 3)) as f64);
            lin += Complex::with_val(wp, &a[kk + 2] * (875 * fall(kk, 2)) as f64);
            lin += Complex::with_val(wp, &a[kk + 1] * (250 * fall(kk, 1)) as f64);
            lin += Complex::with_val(wp, &a[kk] * 24u32);
            conv5 += lin * &inv_fact[m];
            if m >= 1 {
                conv3125 += Complex::with_val(wp, &a[kk + 4] * fall(kk, 4) as f64) * &inv_fact[m];
            }
        }
        acc += Complex::with_val(wp, &conv3125 * &q) * 3125u32;
        acc += Complex::with_val(wp, &conv5 * &q) * 5u32;
        let next = acc / &one_m / fall(k, 4) as f64;
        a.push(next);
    }
    let mut out: [Complex; 4] = std::array::from_fn(|_| Complex::new(wp));
    for (j, slot) in out.iter_mut().enumerate() {
        let mut hp = Complex::with_val(wp, (1, 0));
        let mut acc = Complex::new(wp);
        for k in 0..(a.len() - j) {
            acc += Complex::with_val(wp, &a[k + j] * &hp) * fall(k, j) as f64;
            hp *= h;
        }
        slot.assign(acc);
    }
    out
}
