use mirrorlab::exact::{int, rat};
use mirrorlab::ifunc::{i_cy, i_lg, t_cy};
use mirrorlab::pf::{extended_pf, frobenius_solve, lg_pf, pf_l, quintic_pf};
use mirrorlab::{PuiseuxLogSeries, Rational};

fn lift(s: mirrorlab::PuiseuxSeries) -> PuiseuxLogSeries {
    PuiseuxLogSeries::from_series(s)
}

#[test]
fn quintic_operator_kills_cy_periods() {
    for k in 0..4 {
        let out = quintic_pf().apply(&i_cy(k, &int(12)).unwrap()).unwrap();
        assert!(out.is_zero(), "k = {k}");
        assert_eq!(out.order(), Some(int(12)));
    }
}

#[test]
fn lg_operator_kills_lg_periods() {
    for k in 0..4 {
        let s = i_lg(k, &int(45)).unwrap();
        let out = lg_pf().apply(&lift(s)).unwrap();
        assert!(out.is_zero(), "k = {k}");
        assert!(out.order().unwrap() >= int(40));
    }
}

#[test]
fn disk_potential_is_inhomogeneous_solution() {
    let t = t_cy(&int(12)).unwrap();
    let out = pf_l().apply(&lift(t)).unwrap().log_free().unwrap();
    assert_eq!(out.terms(), vec![(rat(1, 2), rat(15, 8))]);
    assert!(out.order().unwrap() > rat(23, 2));
}

#[test]
fn extended_operator_kernel() {
    let op = extended_pf();
    for k in 0..4 {
        assert!(op.apply(&i_cy(k, &int(10)).unwrap()).unwrap().is_zero());
    }
    assert!(op.apply(&lift(t_cy(&int(10)).unwrap())).unwrap().is_zero());
}

#[test]
fn negative_exponents_lower_certified_order() {
    let s = lift(i_lg(0, &int(20)).unwrap());
    assert_eq!(lg_pf().apply(&s).unwrap().order(), Some(int(15)));
}

#[test]
fn frobenius_matches_closed_forms() {
    for k in 0..4 {
        let f = frobenius_solve(&pf_l(), &int(0), k, &int(10)).unwrap();
        assert_eq!(f, i_cy(k, &int(10)).unwrap(), "k = {k}");
    }
    let f = frobenius_solve(&extended_pf(), &rat(1, 2), 0, &int(10)).unwrap();
    assert_eq!(f.scale(&int(30)), lift(t_cy(&int(10)).unwrap()));
    for k in 0..4 {
        let f = frobenius_solve(&lg_pf(), &int(k as i64 + 1), 0, &int(10)).unwrap();
        // the closed form starts with t^{k+1}/k!
        let norm = mirrorlab::exact::factorial(k as i64).unwrap().recip();
        assert_eq!(f.scale(&norm), lift(i_lg(k, &int(10)).unwrap()), "k = {k}");
    }
}

#[test]
fn frobenius_log_block() {
    let f = frobenius_solve(&pf_l(), &int(0), 1, &int(3)).unwrap();
    assert_eq!(f.part(1), i_cy(0, &int(3)).unwrap().part(0));
    assert_eq!(f.part(0).coeff(&int(1)), int(770));
    let f0 = frobenius_solve(&pf_l(), &int(0), 0, &int(5)).unwrap().log_free().unwrap();
    assert_eq!(f0.coeff(&int(2)), int(113400));
    let _: Rational = f0.coeff(&int(1));
}
