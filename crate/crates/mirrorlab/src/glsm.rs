//! Rank-one abelian GLSM combinatorics: anticones, box elements and ages,
//! Chen-Ruan Poincaré polynomials, loop-space dimensions.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::exact::{frac, int, rat};
use crate::series::rational_json;
use crate::{Error, Rational, Result};

/// One coordinate of the charge table.
#[derive(Clone, Debug, PartialEq)]
pub struct Coord {
    pub name: String,
    /// Weight under the connected torus.
    pub weight: i64,
    /// True when the finite `μ_2` factor acts by `-1`.
    pub odd: bool,
    pub r_charge: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlsmCharges {
    pub coords: Vec<Coord>,
    /// Whether a finite `μ_2` factor is part of the gauge group.
    pub has_mu2: bool,
    /// Ray generators as columns (rows of the matrix stored here).
    pub fan: Option<Vec<Vec<i64>>>,
}

fn coord(name: &str, weight: i64, odd: bool, r: i64) -> Coord {
    Coord { name: name.into(), weight, odd, r_charge: int(r) }
}

impl GlsmCharges {
    /// `x_1..x_5` of weight 1, `p` of weight -5 and R-charge 2.
    pub fn quintic() -> Self {
        let mut coords: Vec<Coord> = (1..=5).map(|i| coord(&format!("x{i}"), 1, false, 0)).collect();
        coords.push(coord("p", -5, false, 2));
        GlsmCharges { coords, has_mu2: false, fan: None }
    }

    /// Quintic plus `u`, `v` of weights `±1`, both odd under `μ_2`.
    pub fn extended() -> Self {
        let mut c = Self::quintic();
        c.coords.push(coord("u", 1, true, 1));
        c.coords.push(coord("v", -1, true, 1));
        c.has_mu2 = true;
        c.fan = Some(vec![
            vec![1, 1, 1, 1, 1, 1, 1, 1],
            vec![1, 0, 0, 0, -1, 0, 0, 0],
            vec![0, 1, 0, 0, -1, 0, 0, 0],
            vec![0, 0, 1, 0, -1, 0, 0, 0],
            vec![0, 0, 0, 1, -1, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 1, 1],
            vec![0, 0, 0, 0, 2, 0, -1, 1],
        ]);
        c
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "quintic" => Ok(Self::quintic()),
            "extended" => Ok(Self::extended()),
            other => Err(Error::Domain(format!("unknown model `{other}`"))),
        }
    }

    pub fn is_calabi_yau(&self) -> bool {
        self.coords.iter().map(|c| c.weight).sum::<i64>() == 0
    }

    /// `Σ D_i v_i = 0` for the stored fan (vacuously true without one).
    pub fn fan_relation_holds(&self) -> bool {
        let Some(fan) = &self.fan else { return true };
        fan.iter().all(|row| {
            row.len() == self.coords.len()
                && row.iter().zip(&self.coords).map(|(v, c)| v * c.weight).sum::<i64>() == 0
        })
    }

    fn check(&self) -> Result<()> {
        if self.coords.iter().any(|c| c.weight == 0) {
            return Err(Error::Domain("zero torus weight".into()));
        }
        Ok(())
    }

    fn stable(&self, zeta_sign: i32) -> Vec<usize> {
        (0..self.coords.len())
            .filter(|&i| self.coords[i].weight.signum() == zeta_sign.signum() as i64)
            .collect()
    }
}

fn check_sign(zeta_sign: i32) -> Result<()> {
    if zeta_sign == 0 {
        return Err(Error::Domain("zeta sign must be +1 or -1".into()));
    }
    Ok(())
}

/// Minimal anticones, 0-based coordinate indices.
pub fn minimal_anticones(charges: &GlsmCharges, zeta_sign: i32) -> Result<Vec<BTreeSet<usize>>> {
    check_sign(zeta_sign)?;
    charges.check()?;
    let s = charges.stable(zeta_sign);
    if s.is_empty() {
        return Err(Error::EmptyPhase);
    }
    Ok(s.into_iter().map(|i| BTreeSet::from([i])).collect())
}

/// Group element `(e^{2πiθ}, sign)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement {
    pub theta: Rational,
    pub odd: bool,
}

impl GroupElement {
    pub fn inverse(&self) -> GroupElement {
        GroupElement { theta: frac(&-&self.theta), odd: self.odd }
    }

    /// Fractional weight on one coordinate, in `[0, 1)`.
    pub fn weight_on(&self, c: &Coord) -> Rational {
        let mut w = &self.theta * int(c.weight);
        if self.odd && c.odd {
            w += rat(1, 2);
        }
        frac(&w)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.theta, if self.odd { "-1" } else { "+1" })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxElement {
    pub element: GroupElement,
    pub age: Rational,
    pub fixed_coords: BTreeSet<usize>,
    pub label: String,
}

impl BoxElement {
    pub fn to_json(&self) -> Value {
        json!({
            "element": { "theta": rational_json(&self.element.theta), "finite": if self.element.odd { -1 } else { 1 } },
            "age": rational_json(&self.age),
            "fixed": self.fixed_coords.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "label": self.label,
        })
    }
}

fn make_box(charges: &GlsmCharges, g: GroupElement) -> BoxElement {
    let mut age = Rational::zero();
    let mut fixed = BTreeSet::new();
    for (i, c) in charges.coords.iter().enumerate() {
        let w = g.weight_on(c);
        if w.is_zero() {
            fixed.insert(i);
        }
        age += w;
    }
    let names: Vec<&str> = fixed.iter().map(|&i| charges.coords[i].name.as_str()).collect();
    let label = format!("g{} fixes {{{}}}", g, names.join(","));
    BoxElement { element: g, age, fixed_coords: fixed, label }
}

/// Twisted sectors: torsion elements whose fixed locus meets the semistable locus.
pub fn box_elements(charges: &GlsmCharges, zeta_sign: i32) -> Result<Vec<BoxElement>> {
    let stable = charges.stable(zeta_sign);
    minimal_anticones(charges, zeta_sign)?;
    let l = charges.coords.iter().fold(1i64, |a, c| a.lcm(&c.weight.abs()));
    // the finite factor can combine with half-integral torus angles
    let n = if charges.has_mu2 { 2 * l } else { l };
    let odds: &[bool] = if charges.has_mu2 { &[false, true] } else { &[false] };
    let mut out = Vec::new();
    for k in 0..n {
        for &odd in odds {
            let b = make_box(charges, GroupElement { theta: rat(k, n), odd });
            if b.fixed_coords.iter().any(|i| stable.contains(i)) {
                out.push(b);
            }
        }
    }
    out.sort_by(|a, b| a.age.cmp(&b.age).then(a.element.cmp(&b.element)));
    Ok(out)
}

/// Integer polynomial in `t`, coefficient `i` of `t^i`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly(pub Vec<i64>);

impl IntPoly {
    pub fn from_terms(terms: &[(usize, i64)]) -> Self {
        let mut p = IntPoly::default();
        for &(e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: usize, c: i64) {
        if self.0.len() <= e {
            self.0.resize(e + 1, 0);
        }
        self.0[e] += c;
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn eval(&self, t: i64) -> i64 {
        self.0.iter().rev().fold(0, |a, c| a * t + c)
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if e == 1 { write!(f, "t")? } else { write!(f, "t^{e}")? }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn age_degree(age: &Rational) -> Result<usize> {
    let two = age * int(2);
    if !two.is_integer() || two.is_negative() {
        return Err(Error::Domain(format!("age {age} gives a non-integral degree")));
    }
    two.to_integer().to_usize().ok_or_else(|| Error::Domain("age too large".into()))
}

/// `Σ t^{2 age} P(core)` over box elements; the core is the projective space
/// on the fixed coordinates of the phase's sign.
pub fn chen_ruan_poincare(charges: &GlsmCharges, zeta_sign: i32) -> Result<IntPoly> {
    let stable = charges.stable(zeta_sign);
    let mut p = IntPoly::default();
    for b in box_elements(charges, zeta_sign)? {
        let n = b.fixed_coords.iter().filter(|i| stable.contains(i)).count();
        let shift = age_degree(&b.age)?;
        for j in 0..n {
            p.add_term(shift + 2 * j, 1);
        }
    }
    Ok(p)
}

/// Graded dimensions of the `μ_5`-invariant Fermat quintic Jacobi ring,
/// by `Σ a_i / 5`.
pub fn jacobi_invariant_dims() -> [u64; 4] {
    let mut dims = [0u64; 4];
    for m in 0..4u32.pow(5) {
        let s: u32 = (0..5).map(|i| (m >> (2 * i)) & 3).sum();
        if s % 5 == 0 {
            dims[(s / 5) as usize] += 1;
        }
    }
    dims
}

/// `2(1 + t^2 + M t^3 + t^4 + t^6)`, `M` the total invariant Jacobi dimension.
pub fn state_space_poincare_extended() -> IntPoly {
    let m: u64 = jacobi_invariant_dims().iter().sum();
    IntPoly::from_terms(&[(0, 2), (2, 2), (3, 2 * m as i64), (4, 2), (6, 2)])
}

/// `h^0` of `O(x)` on the orbifold line.
pub fn h0(x: &Rational) -> i64 {
    let v = x.floor().to_integer() + num_bigint::BigInt::one();
    v.to_i64().unwrap_or(i64::MAX).max(0)
}

/// `h^1` of `O(x)` on the orbifold line.
pub fn h1(x: &Rational) -> i64 {
    let v = (-x - Rational::one()).ceil().to_integer();
    v.to_i64().unwrap_or(i64::MAX).max(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpaceData {
    pub degree: Rational,
    pub dim_v: i64,
    pub dim_w: i64,
    pub dim_l: i64,
    pub rank_e: i64,
    pub virtual_dim: i64,
}

impl LoopSpaceData {
    pub fn to_json(&self) -> Value {
        json!({
            "d": rational_json(&self.degree),
            "dim_V": self.dim_v,
            "dim_W": self.dim_w,
            "dim_L": self.dim_l,
            "rank_E": self.rank_e,
            "virtual_dim": self.virtual_dim,
        })
    }
}

pub fn loop_space_data(charges: &GlsmCharges, zeta_sign: i32, d: &Rational) -> Result<LoopSpaceData> {
    minimal_anticones(charges, zeta_sign)?;
    let stable = charges.stable(zeta_sign);
    let (mut v, mut w, mut stable_sections) = (0, 0, 0);
    for (i, c) in charges.coords.iter().enumerate() {
        let x = d * int(c.weight) - &c.r_charge / int(2);
        v += h0(&x);
        w += h1(&x);
        if stable.contains(&i) {
            stable_sections += h0(&x);
        }
    }
    // a quasimap needs some stable coordinate to be a nonzero section
    if v == 0 || stable_sections == 0 {
        return Err(Error::NotEffective(d.to_string()));
    }
    Ok(LoopSpaceData { degree: d.clone(), dim_v: v, dim_w: w, dim_l: v - 1, rank_e: w, virtual_dim: v - 1 - w })
}

/// Everything `glsm inspect` reports.
pub fn inspect(charges: &GlsmCharges, zeta_sign: i32, degrees: &[Rational]) -> Result<Value> {
    let cones = minimal_anticones(charges, zeta_sign)?;
    let boxes = box_elements(charges, zeta_sign)?;
    let loops: Result<Vec<Value>> =
        degrees.iter().map(|d| loop_space_data(charges, zeta_sign, d).map(|l| l.to_json())).collect();
    Ok(json!({
        "phase": if zeta_sign > 0 { "+" } else { "-" },
        "anticones": cones.iter().map(|s| s.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "box": boxes.iter().map(BoxElement::to_json).collect::<Vec<_>>(),
        "cr_poincare": chen_ruan_poincare(charges, zeta_sign)?.to_json(),
        "cr_poincare_text": chen_ruan_poincare(charges, zeta_sign)?.to_string(),
        "loop_spaces": loops?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ages(c: &GlsmCharges, s: i32) -> Vec<Rational> {
        box_elements(c, s).unwrap().into_iter().map(|b| b.age).collect()
    }

    #[test]
    fn anticones() {
        let e = GlsmCharges::extended();
        let plus: Vec<usize> = minimal_anticones(&e, 1).unwrap().iter().map(|s| *s.first().unwrap()).collect();
        assert_eq!(plus, vec![0, 1, 2, 3, 4, 6]);
        let minus: Vec<usize> = minimal_anticones(&e, -1).unwrap().iter().map(|s| *s.first().unwrap()).collect();
        assert_eq!(minus, vec![5, 7]);
        assert_eq!(minimal_anticones(&GlsmCharges::quintic(), -1).unwrap().len(), 1);
        assert!(e.is_calabi_yau() && e.fan_relation_holds());
        let lopsided = GlsmCharges { coords: vec![coord("a", 1, false, 0)], has_mu2: false, fan: None };
        assert_eq!(minimal_anticones(&lopsided, -1), Err(Error::EmptyPhase));
    }

    #[test]
    fn boxes() {
        let e = GlsmCharges::extended();
        assert_eq!(ages(&e, 1), vec![int(0), int(1), int(3)]);
        let b = box_elements(&e, 1).unwrap();
        assert_eq!(b[1].element, GroupElement { theta: int(0), odd: true });
        assert_eq!(b[2].element, GroupElement { theta: rat(1, 2), odd: true });
        let m = ages(&e, -1);
        assert_eq!(m.len(), 11);
        for a in 2..=5 {
            assert_eq!(m.iter().filter(|x| **x == int(a)).count(), if a == 3 { 3 } else { 2 });
        }
        assert_eq!(ages(&GlsmCharges::quintic(), -1), (0..5).map(int).collect::<Vec<_>>());
    }

    #[test]
    fn age_plus_inverse_age() {
        for (c, s) in [(GlsmCharges::extended(), 1), (GlsmCharges::extended(), -1), (GlsmCharges::quintic(), -1)] {
            for b in box_elements(&c, s).unwrap() {
                let inv = make_box(&c, b.element.inverse());
                let moving = c.coords.len() - b.fixed_coords.len();
                assert_eq!(&b.age + &inv.age, int(moving as i64));
            }
        }
    }

    #[test]
    fn poincare() {
        let target = IntPoly::from_terms(&[(0, 1), (2, 2), (4, 2), (6, 3), (8, 2), (10, 2)]);
        let e = GlsmCharges::extended();
        assert_eq!(chen_ruan_poincare(&e, 1).unwrap(), target);
        assert_eq!(chen_ruan_poincare(&e, -1).unwrap(), target);
        assert_eq!(target.to_string(), "1 + 2t^2 + 2t^4 + 3t^6 + 2t^8 + 2t^10");
        let q = IntPoly::from_terms(&[(0, 1), (2, 1), (4, 1), (6, 1), (8, 1)]);
        assert_eq!(chen_ruan_poincare(&GlsmCharges::quintic(), 1).unwrap(), q);
        assert_eq!(chen_ruan_poincare(&GlsmCharges::quintic(), -1).unwrap(), q);
    }

    #[test]
    fn state_space() {
        assert_eq!(jacobi_invariant_dims(), [1, 101, 101, 1]);
        assert_eq!(state_space_poincare_extended().to_string(), "2 + 2t^2 + 408t^3 + 2t^4 + 2t^6");
    }

    #[test]
    fn loop_spaces() {
        let e = GlsmCharges::extended();
        let l = loop_space_data(&e, 1, &int(1)).unwrap();
        assert_eq!((l.dim_l, l.rank_e, l.virtual_dim), (10, 6, 4));
        let l = loop_space_data(&e, 1, &rat(1, 2)).unwrap();
        assert_eq!(l.rank_e, 3);
        let l = loop_space_data(&GlsmCharges::quintic(), -1, &rat(-1, 5)).unwrap();
        assert_eq!((l.dim_l, l.rank_e), (0, 0));
        assert!(matches!(loop_space_data(&e, 1, &int(-3)), Err(Error::NotEffective(_))));
    }

    #[test]
    fn riemann_roch() {
        for n in -60..60 {
            let x = rat(n, 10);
            assert_eq!(h0(&x) - h1(&x), x.floor().to_integer().to_i64().unwrap() + 1);
        }
    }
}
