//! Mirror maps and extraction of genus-zero closed and disk invariants.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{factorial, int, rat, Rational};
use crate::ifunc::{i_cy, i_lg, t_cy, t_lg};
use crate::pf::{extended_pf, frobenius_solve, pf_l};
use crate::series::{rational_json, PuiseuxLogSeries, PuiseuxSeries, DEFAULT_RAMIFICATION};

const R: u32 = DEFAULT_RAMIFICATION;

/// Where the CY periods come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Source {
    /// Hypergeometric closed forms.
    #[default]
    ClosedForm,
    /// Recursive Frobenius solutions of the Picard-Fuchs operators.
    Frobenius,
}

fn periods(source: Source, order: &Rational) -> Result<Vec<PuiseuxLogSeries>> {
    (0..4)
        .map(|k| match source {
            Source::ClosedForm => i_cy(k, order),
            Source::Frobenius => frobenius_solve(&pf_l(), &Rational::zero(), k, order),
        })
        .collect()
}

fn disk_potential(source: Source, order: &Rational) -> Result<PuiseuxSeries> {
    match source {
        Source::ClosedForm => t_cy(order),
        Source::Frobenius => Ok(frobenius_solve(&extended_pf(), &rat(1, 2), 0, order)?.log_free()?.scale(&int(30))),
    }
}

/// `S(q)` with `q = Q exp(-g(Q))` substituted; `g` has positive exponents.
pub fn substitute(s: &PuiseuxSeries, g: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    let mut acc: Option<PuiseuxSeries> = None;
    for (e, c) in s.terms() {
        let unit = g.scale(&-e.clone()).exp_series()?;
        let term = unit.shift(&e)?.scale(&c);
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    let base = match acc {
        Some(a) => a,
        None => PuiseuxSeries::zero(R, &g.order().unwrap_or_else(|| int(1)))?,
    };
    match s.order() {
        Some(o) => base.truncate(&o),
        None => Ok(base),
    }
}

/// Log-series version of [`substitute`]: also rewrites `log q = log Q - g(Q)`.
pub fn substitute_log(s: &PuiseuxLogSeries, g: &PuiseuxSeries) -> Result<PuiseuxLogSeries> {
    let rank = s.log_rank();
    let composed: Vec<PuiseuxSeries> = s.parts().iter().map(|p| substitute(p, g)).collect::<Result<_>>()?;
    let neg_g = g.neg();
    let mut g_pows = vec![PuiseuxSeries::constant(R, Rational::one())];
    for k in 1..=rank {
        let next = g_pows[k - 1].mul(&neg_g);
        g_pows.push(next);
    }
    let mut parts = Vec::with_capacity(rank + 1);
    for i in 0..=rank {
        let mut acc = composed[i].clone();
        for j in i + 1..=rank {
            let fact = factorial((j - i) as i64)?.recip();
            acc = acc.add(&composed[j].mul(&g_pows[j - i]).scale(&fact));
        }
        parts.push(acc);
    }
    PuiseuxLogSeries::new(parts)
}

/// CY mirror map data.
#[derive(Clone, Debug)]
pub struct MirrorMap {
    /// `log Q = log q + f(q)`.
    pub log_q: PuiseuxLogSeries,
    /// `f(q)`.
    pub f: PuiseuxSeries,
    /// `q` as a series in `Q`.
    pub inverse: PuiseuxSeries,
    /// `g(Q) = f(q(Q))`, so that `q = Q exp(-g(Q))`.
    pub g: PuiseuxSeries,
}

pub fn mirror_map_cy(order: &Rational) -> Result<MirrorMap> {
    mirror_map_from(Source::ClosedForm, order)
}

pub fn mirror_map_from(source: Source, order: &Rational) -> Result<MirrorMap> {
    if *order < int(2) {
        return Err(Error::Domain("mirror map needs order >= 2".into()));
    }
    let p = periods(source, order)?;
    mirror_from_periods(&p[0], &p[1])
}

fn mirror_from_periods(i0: &PuiseuxLogSeries, i1: &PuiseuxLogSeries) -> Result<MirrorMap> {
    let log_q = i1.div(i0)?;
    if log_q.log_rank() != 1 || log_q.part(1) != PuiseuxSeries::constant(R, Rational::one()).truncate(&log_q.order().unwrap())? {
        return Err(Error::Consistency("I_1/I_0 is not log q + f(q)".into()));
    }
    let f = log_q.part(0);
    let big_q = f.exp_series()?.shift(&Rational::one())?;
    let inverse = big_q.reversion()?.with_ramification(R)?;
    let ratio = inverse.shift(&-Rational::one())?;
    let g = ratio.sub(&PuiseuxSeries::constant(R, Rational::one())).log1p_series()?.neg();
    Ok(MirrorMap { log_q, f, inverse, g })
}

/// Which invariants a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    GwClosed,
    DiskCy,
    DiskLg,
}

/// Degree to exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTable {
    pub kind: TableKind,
    pub entries: BTreeMap<Rational, Rational>,
    /// Largest degree the table certifies.
    pub truncation: Rational,
}

impl InvariantTable {
    pub fn get(&self, d: i64) -> Option<&Rational> {
        self.entries.get(&int(d))
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(d, v)| {
                let (a, b) = (rational_json(d), rational_json(v));
                json!([a[0], a[1], b[0], b[1]])
            })
            .collect();
        json!({ "kind": self.kind, "entries": entries, "truncation": rational_json(&self.truncation) })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,value\n");
        for (d, v) in &self.entries {
            out.push_str(&format!("{d},{v}\n"));
        }
        out
    }
}

/// The composed `5 I_2/I_0` in the flat coordinate, i.e. `D F_0(Q)`.
fn d_f0(source: Source, order: &Rational) -> Result<(PuiseuxLogSeries, MirrorMap, Vec<PuiseuxLogSeries>)> {
    let p = periods(source, order)?;
    let mm = mirror_from_periods(&p[0], &p[1])?;
    let ratio = p[2].div(&p[0])?;
    let g_series = substitute_log(&ratio, &mm.g)?.scale(&int(5));
    Ok((g_series, mm, p))
}

/// Genus-zero Gromov-Witten invariants `N_d`, `d = 1..=max_degree`.
pub fn gw_invariants(max_degree: u32) -> Result<InvariantTable> {
    gw_invariants_from(Source::ClosedForm, max_degree)
}

pub fn gw_invariants_from(source: Source, max_degree: u32) -> Result<InvariantTable> {
    if max_degree < 1 {
        return Err(Error::Domain("max_degree must be at least 1".into()));
    }
    let order = int(max_degree as i64 + 1);
    let (g, _, _) = d_f0(source, &order)?;
    let o = g.order().unwrap();
    // D F_0 = (5/2) (log Q)^2 + sum d N_d Q^d, and (log Q)^2 = 2 (log Q)^2/2!
    let classical = PuiseuxSeries::constant(R, int(5)).truncate(&o)?;
    if g.log_rank() != 2 || g.part(2) != classical || !g.part(1).is_zero() {
        return Err(Error::Consistency(format!("log terms survive the classical subtraction: {g:?}")));
    }
    let inst = g.part(0);
    let mut entries = BTreeMap::new();
    for d in 1..=max_degree as i64 {
        entries.insert(int(d), inst.coeff(&int(d)) / int(d));
    }
    if !inst.coeff(&Rational::zero()).is_zero() {
        return Err(Error::Consistency("constant term in D F_0".into()));
    }
    Ok(InvariantTable { kind: TableKind::GwClosed, entries, truncation: int(max_degree as i64) })
}

/// Checks `(I_3/I_0)(Q) = (1/5) log Q D F_0 - (2/5) F_0` with `F_0 = (5/6)(log Q)^3 + sum N_d Q^d`.
pub fn h3_consistency(max_degree: u32) -> Result<()> {
    let order = int(max_degree as i64 + 1);
    let table = gw_invariants(max_degree)?;
    let (_, mm, p) = d_f0(Source::ClosedForm, &order)?;
    let lhs = substitute_log(&p[3].div(&p[0])?, &mm.g)?;
    let o = lhs.order().unwrap();
    let mut d_inst = Vec::new();
    let mut inst = Vec::new();
    for (d, n) in &table.entries {
        d_inst.push((d.clone(), d * n / int(5)));
        inst.push((d.clone(), n * rat(-2, 5)));
    }
    let expect = PuiseuxLogSeries::new(vec![
        PuiseuxSeries::from_terms(R, Some(&o), &inst)?,
        PuiseuxSeries::from_terms(R, Some(&o), &d_inst)?,
        PuiseuxSeries::zero(R, &o)?,
        PuiseuxSeries::constant(R, Rational::one()).truncate(&o)?,
    ])?;
    let diff = lhs.sub(&expect);
    if diff.is_zero() {
        Ok(())
    } else {
        Err(Error::Consistency(format!("H^3 component residual {diff:?}")))
    }
}

/// Disk invariants `N^disk_d` (odd `d <= max_degree`) from `(T/I_0)(q(Q))`, coefficient of `Q^{d/2}`.
pub fn disk_invariants_cy(max_degree: u32) -> Result<InvariantTable> {
    disk_invariants_from(Source::ClosedForm, max_degree)
}

pub fn disk_invariants_from(source: Source, max_degree: u32) -> Result<InvariantTable> {
    if max_degree < 1 {
        return Err(Error::Domain("max_degree must be at least 1".into()));
    }
    let series = disk_series(source, max_degree)?;
    let mut entries = BTreeMap::new();
    for (e, c) in series.terms() {
        let d = e * int(2);
        if d.is_integer() && d.to_integer() % 2 == 0.into() {
            return Err(Error::Consistency(format!("even-degree disk term at Q^{}", d / int(2))));
        }
        if d <= int(max_degree as i64) {
            entries.insert(d, c);
        }
    }
    Ok(InvariantTable { kind: TableKind::DiskCy, entries, truncation: int(max_degree as i64) })
}

/// `F^CY_{0,1}(Q) = (T/I_0)(q(Q))` as a series in `Q`.
pub fn disk_series(source: Source, max_degree: u32) -> Result<PuiseuxSeries> {
    let order = int(max_degree as i64 / 2 + 1);
    let p = periods(source, &order)?;
    let mm = mirror_from_periods(&p[0], &p[1])?;
    let t = disk_potential(source, &order)?;
    let ratio = t.mul(&p[0].log_free()?.invert()?);
    substitute(&ratio, &mm.g)
}

/// LG mirror map and the conjectural open potential.
#[derive(Clone, Debug)]
pub struct LgMirror {
    /// `tau(t) = I_1/I_0 = t (1 + f^LG(t))`.
    pub tau: PuiseuxSeries,
    /// `t` as a series in `tau`.
    pub inverse: PuiseuxSeries,
    /// Conjectural `F^LG_{0,1}(tau) = (T^LG/I^LG_0)(t(tau))`.
    pub f_lg_01: PuiseuxSeries,
}

pub fn lg_mirror_series(order: &Rational) -> Result<LgMirror> {
    if *order < rat(5, 2) {
        return Err(Error::Domain("LG mirror series needs order >= 5/2".into()));
    }
    // one extra unit absorbs the division by I_0 = t(1 + ...)
    let work = order + int(2);
    let i0 = i_lg(0, &work)?;
    let i1 = i_lg(1, &work)?;
    let tau = i1.mul(&i0.invert()?).truncate(order)?;
    let inverse = tau.reversion()?.with_ramification(R)?;
    let g = inverse.shift(&-Rational::one())?.sub(&PuiseuxSeries::constant(R, Rational::one())).log1p_series()?.neg();
    let tlg = t_lg(&work)?.t_form;
    let ratio = tlg.mul(&i0.invert()?);
    let f_lg_01 = substitute(&ratio, &g)?;
    let f_lg_01 = f_lg_01.truncate(&order.min(&f_lg_01.order().unwrap()).clone())?;
    Ok(LgMirror { tau, inverse, f_lg_01 })
}

/// LG-side disk table: coefficients of `tau^e` in the conjectural potential.
pub fn disk_invariants_lg(order: &Rational) -> Result<InvariantTable> {
    let m = lg_mirror_series(order)?;
    let entries = m.f_lg_01.terms().into_iter().collect();
    Ok(InvariantTable { kind: TableKind::DiskLg, entries, truncation: m.f_lg_01.order().unwrap() })
}

/// `F^+(Q) = -F^CY_{0,1}(Q)` and `F^-(tau) = -F^LG_{0,1}(tau)` (the latter conjectural).
pub fn extended_potentials(order: &Rational) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    let max_degree = (order * int(2)).floor().to_integer();
    let max_degree: u32 = max_degree.try_into().map_err(|_| Error::Domain("order too large".into()))?;
    let plus = disk_series(Source::ClosedForm, max_degree.max(1))?.neg();
    let minus = lg_mirror_series(&order.max(&rat(5, 2)).clone())?.f_lg_01.neg();
    Ok((plus, minus))
}

/// BPS numbers `n_d` from `N_d = sum_{k | d} n_{d/k} / k^3`.
pub fn multiple_cover_bps(table: &InvariantTable) -> BTreeMap<i64, Rational> {
    let mut n: BTreeMap<i64, Rational> = BTreeMap::new();
    for (d, v) in &table.entries {
        if !d.is_integer() {
            continue;
        }
        let d: i64 = d.to_integer().try_into().unwrap();
        let mut acc = v.clone();
        for k in 2..=d {
            if d % k == 0 {
                if let Some(m) = n.get(&(d / k)) {
                    acc -= m / int(k * k * k);
                }
            }
        }
        n.insert(d, acc);
    }
    n
}

/// Integer open BPS numbers `n_d` from `N^disk_d = sum_{k odd, k | d} n_{d/k} / k^2`.
pub fn disk_bps(table: &InvariantTable) -> BTreeMap<i64, Rational> {
    let mut n: BTreeMap<i64, Rational> = BTreeMap::new();
    for (d, v) in &table.entries {
        if !d.is_integer() {
            continue;
        }
        let d: i64 = d.to_integer().try_into().unwrap();
        let mut acc = v.clone();
        for k in (3..=d).step_by(2) {
            if d % k == 0 {
                if let Some(m) = n.get(&(d / k)) {
                    acc -= m / int(k * k);
                }
            }
        }
        n.insert(d, acc);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_map_first_terms() {
        let mm = mirror_map_cy(&int(3)).unwrap();
        assert_eq!(mm.f.coeff(&int(1)), int(770));
        assert_eq!(mm.f.coeff(&int(0)), int(0));
        assert_eq!(mm.inverse.coeff(&int(1)), int(1));
        assert_eq!(mm.inverse.coeff(&int(2)), int(-770));
    }

    #[test]
    fn gw_low_degrees() {
        let t = gw_invariants(2).unwrap();
        assert_eq!(t.get(1), Some(&int(2875)));
        assert_eq!(t.get(2), Some(&rat(4876875, 8)));
    }

    #[test]
    fn disk_low_degrees() {
        let t = disk_invariants_cy(3).unwrap();
        assert_eq!(t.get(1), Some(&int(30)));
        assert_eq!(t.get(3), Some(&rat(4600, 3)));
        let n = disk_bps(&t);
        assert_eq!(n[&1], int(30));
        assert_eq!(n[&3], int(1530));
    }

    #[test]
    fn substitution_identity() {
        // substituting with g = 0 is the identity
        let s = t_cy(&int(4)).unwrap();
        let g = PuiseuxSeries::zero(R, &int(4)).unwrap();
        assert_eq!(substitute(&s, &g).unwrap(), s);
    }
}
