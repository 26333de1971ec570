//! End-to-end acceptance checks, one [`Outcome`] per criterion.
//!
//! Used by the `acceptance` test target and by `mirrorlab selftest`.

use std::time::Instant;

use rug::Complex;

use crate::branes::{decompose_for_continuation, grade_restriction_check, koszul_binomial, koszul_char, split_pair, verify_decomposition, window_half_width};
use crate::enumerative::{disk_bps, disk_invariants_cy, gw_invariants};
use crate::exact::{int, rat, PiHalfScalar};
use crate::glsm::{box_elements, chen_ruan_poincare, jacobi_invariant_dims, loop_space_data, minimal_anticones, state_space_poincare_extended, GlsmCharges, IntPoly};
use crate::ifunc::{continuation_coefficients, i_cy, i_lg, t_c_coefficients, t_c_value, t_cy, t_lg, verify_oscillatory_identities, HalfPlane, OscSide};
use crate::mb::{hemisphere_z, log_q_from, model_integrand, open_closed_factor, rel_diff, residue_sum_auto, t_cy_continued, Method, Model, Precision, Side};
use crate::pf::{extended_pf, frobenius_solve, lg_pf, pf_l};
use crate::{ExecPolicy, PuiseuxLogSeries, Result};

/// Pinned tolerances and time budgets (seconds).
pub mod tolerances {
    pub const OPEN_CLOSED_REL: f64 = 1e-12;
    pub const WALL_CROSSING_REL: f64 = 1e-9;
    pub const OPEN_CLOSED_BITS: u32 = 256;
    pub const WALL_CROSSING_BITS: u32 = 192;
    pub const BUDGET_PF: f64 = 5.0;
    pub const BUDGET_INHOMOGENEOUS: f64 = 5.0;
    pub const BUDGET_ENUMERATIVE: f64 = 30.0;
    pub const BUDGET_OPEN_CLOSED: f64 = 60.0;
    pub const BUDGET_WALL_CROSSING: f64 = 120.0;
    pub const BUDGET_GLSM: f64 = 5.0;
}
use tolerances::*;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: Option<f64>,
}

impl Outcome {
    pub fn line(&self) -> String {
        let time = match self.budget {
            Some(b) => format!("{:.2}s/{b:.0}s", self.seconds),
            None => format!("{:.2}s", self.seconds),
        };
        format!("[{}] {:<4} {:<40} {:>12}  {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.title, time, self.detail)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "id": self.id,
            "title": self.title,
            "pass": self.pass,
            "detail": self.detail,
            "seconds": self.seconds,
            "budget": self.budget,
        })
    }
}

fn timed(id: &'static str, title: &'static str, budget: Option<f64>, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let t0 = Instant::now();
    let r = f();
    let seconds = t0.elapsed().as_secs_f64();
    let (ok, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    let in_time = budget.map_or(true, |b| seconds < b);
    let detail = if ok && !in_time { format!("{detail}; over time budget") } else { detail };
    Outcome { id, title, pass: ok && in_time, detail, seconds, budget }
}

fn lift(s: crate::PuiseuxSeries) -> PuiseuxLogSeries {
    PuiseuxLogSeries::from_series(s)
}

pub fn pf_annihilation() -> Outcome {
    timed("1", "Picard-Fuchs annihilation", Some(BUDGET_PF), || {
        let mut bad = Vec::new();
        for k in 0..4 {
            let out = pf_l().apply(&i_cy(k, &int(12))?)?;
            if !out.is_zero() || out.order() < Some(int(12)) {
                bad.push(format!("I^CY_{k}"));
            }
            let out = lg_pf().apply(&lift(i_lg(k, &int(45))?))?;
            if !out.is_zero() || out.order() < Some(int(40)) {
                bad.push(format!("I^LG_{k}"));
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { "CY to q^12, LG to t^40".into() } else { format!("nonzero: {}", bad.join(", ")) }))
    })
}

pub fn inhomogeneous() -> Outcome {
    timed("2", "inhomogeneous disk equation", Some(BUDGET_INHOMOGENEOUS), || {
        let out = pf_l().apply(&lift(t_cy(&int(12))?))?.log_free()?;
        let ok = out.terms() == vec![(rat(1, 2), rat(15, 8))] && out.order().map_or(false, |o| o > rat(23, 2));
        Ok((ok, format!("L T = {:?} through order {}", out.terms().iter().map(|(e, c)| format!("{c} q^{e}")).collect::<Vec<_>>(), out.order().map(|o| o.to_string()).unwrap_or_default())))
    })
}

pub fn extended_operator() -> Outcome {
    timed("3", "extended operator kernel", None, || {
        let op = extended_pf();
        let mut bad = Vec::new();
        for k in 0..4 {
            if !op.apply(&i_cy(k, &int(10))?)?.is_zero() {
                bad.push(format!("I^CY_{k}"));
            }
        }
        if !op.apply(&lift(t_cy(&int(10))?))?.is_zero() {
            bad.push("T^CY".into());
        }
        Ok((bad.is_empty(), if bad.is_empty() { "5 solutions to q^10".into() } else { format!("not killed: {}", bad.join(", ")) }))
    })
}

pub fn frobenius_oracle() -> Outcome {
    timed("4", "Frobenius vs closed forms", None, || {
        let order = int(10);
        let mut bad = Vec::new();
        for k in 0..4 {
            if frobenius_solve(&pf_l(), &int(0), k, &order)? != i_cy(k, &order)? {
                bad.push(format!("I^CY_{k}"));
            }
            let norm = crate::exact::factorial(k as i64)?.recip();
            if frobenius_solve(&lg_pf(), &int(k as i64 + 1), 0, &order)?.scale(&norm) != lift(i_lg(k, &order)?) {
                bad.push(format!("I^LG_{k}"));
            }
        }
        if frobenius_solve(&extended_pf(), &rat(1, 2), 0, &order)?.scale(&int(30)) != lift(t_cy(&order)?) {
            bad.push("T^CY".into());
        }
        Ok((bad.is_empty(), if bad.is_empty() { "9 series equal to q^10".into() } else { format!("differ: {}", bad.join(", ")) }))
    })
}

pub fn enumerative_tables() -> Outcome {
    timed("5", "enumerative tables", Some(BUDGET_ENUMERATIVE), || {
        let a = gw_invariants(6)?;
        let b = gw_invariants(9)?;
        let stable = (1..=6).all(|d| a.get(d) == b.get(d));
        let disk = disk_invariants_cy(7)?;
        let disk_hi = disk_invariants_cy(11)?;
        let disk_stable = [1, 3, 5, 7].iter().all(|&d| disk.get(d) == disk_hi.get(d));
        let n1 = a.get(1) == Some(&int(2875));
        let n2 = a.get(2) == Some(&rat(4876875, 8));
        let d1 = disk.get(1) == Some(&int(30));
        let d3 = disk.get(3) == Some(&int(1530));
        let show = |x: Option<&crate::Rational>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        Ok((
            stable && disk_stable && n1 && n2 && d1 && d3,
            format!("N_1={} N_2={} N^disk_1={} N^disk_3={} stable={}", show(a.get(1)), show(a.get(2)), show(disk.get(1)), show(disk.get(3)), stable && disk_stable),
        ))
    })
}

/// Degree-3 disk number after removing the `1/k^2` multiple covers.
pub fn enumerative_disk_bps() -> Outcome {
    timed("5b", "disk BPS numbers", Some(BUDGET_ENUMERATIVE), || {
        let n = disk_bps(&disk_invariants_cy(7)?);
        let ok = n.get(&1) == Some(&int(30)) && n.get(&3) == Some(&int(1530)) && n.values().all(|v| v.is_integer());
        Ok((ok, format!("n_1={} n_3={} all integral={}", n[&1], n[&3], n.values().all(|v| v.is_integer()))))
    })
}

fn pi3_64(bits: u32) -> Complex {
    open_closed_factor(bits)
}

/// Criterion 6 and, sharing the same contour value, the comparison with the
/// literal 25-term partial sum of `T^CY` (outside its disc at `q = 1e-3`).
pub fn open_closed(policy: ExecPolicy) -> [Outcome; 2] {
    let bits = OPEN_CLOSED_BITS;
    let mut z = None;
    let main = timed("6", "hemisphere = 64pi^3 T^CY at q=1e-3", Some(BUDGET_OPEN_CLOSED), || {
        let q = log_q_from("1e-3", 0.0, bits)?;
        let v = hemisphere_z(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q, Method::Auto, Precision::new(bits), policy)?;
        let reference = t_cy_continued(&q, HalfPlane::Lower, bits)? * pi3_64(bits);
        let r = rel_diff(&v.value, &reference);
        let detail = format!("rel {r:.2e} vs continued T^CY ({}, {} nodes)", v.method, v.n_terms);
        z = Some(v.value);
        Ok((r < OPEN_CLOSED_REL, detail))
    });
    let partial = timed("6p", "same, against 25-term partial sum", None, || {
        let z = z.ok_or_else(|| crate::Error::Domain("no contour value".into()))?;
        let q = log_q_from("1e-3", 0.0, bits)?;
        let partial = t_cy(&rat(49, 2))?.eval(&q, bits) * pi3_64(bits);
        let r = rel_diff(&z, &partial);
        Ok((r < OPEN_CLOSED_REL, format!("rel {r:.2e}; the series diverges for |q| > 5^-5")))
    });
    [main, partial]
}

/// Inside the disc the series itself is the reference.
pub fn open_closed_inside(policy: ExecPolicy) -> Outcome {
    timed("6s", "same at q=1e-4 against the series", Some(BUDGET_OPEN_CLOSED), || {
        let bits = OPEN_CLOSED_BITS;
        let q = log_q_from("1e-4", 0.0, bits)?;
        let z = hemisphere_z(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q, Method::Auto, Precision::new(bits), policy)?;
        let series = t_cy(&int(90))?.eval(&q, bits) * pi3_64(bits);
        let r = rel_diff(&z.value, &series);
        Ok((r < OPEN_CLOSED_REL, format!("rel {r:.2e} ({})", z.method)))
    })
}

fn wall_crossing_with(coeffs: impl FnOnce(u32) -> [Complex; 4], policy: ExecPolicy) -> Result<(bool, String)> {
    let bits = WALL_CROSSING_BITS;
    let q = log_q_from("1e4", 0.0, bits)?;
    let ig = model_integrand(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q)?;
    let res = residue_sum_auto(&ig, Side::Right, Precision::new(bits), policy)?;
    // hemisphere normalization of the closed contour
    let z = Complex::with_val(bits, -&res.value);
    let log_t = Complex::with_val(bits, &q / -5i32);
    let order = int(60);
    let tlg = t_lg(&order)?.t_form.eval(&log_t, bits);
    let tc = t_c_value(&coeffs(bits), &log_t, &order, bits)?;
    let rhs = Complex::with_val(bits, &tlg + &tc) * pi3_64(bits);
    let r = rel_diff(&z, &rhs);
    Ok((r < WALL_CROSSING_REL, format!("rel {r:.2e} ({} residues)", res.n_terms)))
}

pub fn wall_crossing(policy: ExecPolicy) -> Outcome {
    timed("7", "right closure = 64pi^3(T^LG + sum c_m I^LG)", Some(BUDGET_WALL_CROSSING), || wall_crossing_with(t_c_coefficients, policy))
}

/// Same identity with the coefficients of the continuation below the conifold.
pub fn wall_crossing_continued(policy: ExecPolicy) -> Outcome {
    timed("7b", "same with continuation coefficients", Some(BUDGET_WALL_CROSSING), || {
        wall_crossing_with(|b| continuation_coefficients(HalfPlane::Lower, b), policy)
    })
}

pub fn glsm_combinatorics() -> Outcome {
    timed("8", "GLSM combinatorics", Some(BUDGET_GLSM), || {
        let ext = GlsmCharges::extended();
        let quintic = GlsmCharges::quintic();
        let mut notes = Vec::new();
        let cones = minimal_anticones(&ext, 1)?;
        let want: Vec<_> = [0usize, 1, 2, 3, 4, 6].iter().map(|&i| [i].into_iter().collect()).collect();
        if cones != want {
            notes.push("anticones".to_string());
        }
        let plus = box_elements(&ext, 1)?;
        let minus = box_elements(&ext, -1)?;
        let mut ages: Vec<_> = plus.iter().map(|b| b.age.clone()).collect();
        ages.sort();
        if plus.len() != 3 || ages != vec![int(0), int(1), int(3)] {
            notes.push(format!("{} boxes for zeta>0", plus.len()));
        }
        if minus.len() != 11 {
            notes.push(format!("{} boxes for zeta<0", minus.len()));
        }
        let cr = IntPoly::from_terms(&[(0, 1), (2, 2), (4, 2), (6, 3), (8, 2), (10, 2)]);
        for s in [1, -1] {
            if chen_ruan_poincare(&ext, s)? != cr {
                notes.push(format!("CR polynomial at sign {s}"));
            }
        }
        if chen_ruan_poincare(&quintic, 1)? != chen_ruan_poincare(&quintic, -1)? {
            notes.push("quintic CR phases differ".into());
        }
        if jacobi_invariant_dims() != [1, 101, 101, 1] || state_space_poincare_extended() != IntPoly::from_terms(&[(0, 2), (2, 2), (3, 408), (4, 2), (6, 2)]) {
            notes.push("state space".into());
        }
        let v1 = loop_space_data(&ext, 1, &int(1))?.virtual_dim;
        let vh = loop_space_data(&ext, 1, &rat(1, 2))?.virtual_dim;
        if (v1, vh) != (4, 1) {
            notes.push(format!("virtual dims ({v1}, {vh})"));
        }
        Ok((notes.is_empty(), if notes.is_empty() { "all combinatorial data match".into() } else { format!("mismatch: {}", notes.join(", ")) }))
    })
}

pub fn brane_algebra() -> Outcome {
    timed("9", "brane algebra", None, || {
        let walcher = koszul_char(&[1, 1, 1, 1, 1], 2);
        let (f, g) = split_pair();
        let mut notes = Vec::new();
        if !verify_decomposition(&walcher, &f, &g) {
            notes.push("split pair".to_string());
        }
        let target = koszul_binomial(5, 2);
        let (f2, g2) = decompose_for_continuation(&target)?;
        if !verify_decomposition(&target, &f2, &g2) {
            notes.push("solver".into());
        }
        let quintic_w = window_half_width(&[1, 1, 1, 1, 1, -5]);
        let ext_w = window_half_width(&[1, 1, 1, 1, 1, -5, 1, -1]);
        if quintic_w != rat(5, 2) || ext_w != int(3) {
            notes.push("window widths".into());
        }
        for k in 1..20 {
            let b = rat(k, 20);
            if !grade_restriction_check(&walcher, &ext_w, &b)?.pass {
                notes.push(format!("extended window rejects B={b}"));
            }
            if grade_restriction_check(&walcher, &quintic_w, &b)?.pass {
                notes.push(format!("quintic window accepts B={b}"));
            }
        }
        Ok((notes.is_empty(), if notes.is_empty() { "decomposition exact; windows 5/2 and 3 as expected".into() } else { notes.join(", ") }))
    })
}

pub fn oscillatory() -> Outcome {
    timed("10", "oscillatory identities m<=25", None, || {
        let rep = verify_oscillatory_identities(25)?;
        let anchor = |side: OscSide| rep.checks.iter().find(|c| c.side == side && c.m == 0).map(|c| c.lhs.clone());
        let cy_ok = anchor(OscSide::Cy) == Some(PiHalfScalar::new(int(-960), 6));
        let lg_ok = anchor(OscSide::Lg) == Some(PiHalfScalar::new(rat(128, 3), 6));
        let n_fail = rep.failures().len();
        Ok((
            rep.all_pass() && cy_ok && lg_ok && rep.checks.len() == 52,
            format!("{} identities, {n_fail} failures, anchors {}", rep.checks.len(), if cy_ok && lg_ok { "ok" } else { "wrong" }),
        ))
    })
}

/// Every check in order.
pub fn run_all(policy: ExecPolicy) -> Vec<Outcome> {
    let [oc, oc_partial] = open_closed(policy);
    vec![
        pf_annihilation(),
        inhomogeneous(),
        extended_operator(),
        frobenius_oracle(),
        enumerative_tables(),
        enumerative_disk_bps(),
        oc,
        oc_partial,
        open_closed_inside(policy),
        wall_crossing(policy),
        wall_crossing_continued(policy),
        glsm_combinatorics(),
        brane_algebra(),
        oscillatory(),
    ]
}
