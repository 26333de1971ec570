use mirrorlab::enumerative::*;
use mirrorlab::exact::{int, rat};

#[test]
fn closed_invariants_stable_under_truncation() {
    let a = gw_invariants(6).unwrap();
    let b = gw_invariants(9).unwrap();
    for d in 1..=6 {
        assert_eq!(a.get(d), b.get(d), "d = {d}");
    }
    assert_eq!(a.get(1), Some(&int(2875)));
    assert_eq!(a.get(2), Some(&rat(4876875, 8)));
}

#[test]
fn bps_numbers_are_integers() {
    let t = gw_invariants(5).unwrap();
    let n = multiple_cover_bps(&t);
    for (d, v) in &n {
        assert!(v.is_integer(), "n_{d} = {v}");
    }
    assert_eq!(n[&2], int(609250));
    assert_eq!(n[&3], int(317206375));
}

#[test]
fn h3_component_consistent() {
    h3_consistency(5).unwrap();
}

#[test]
fn frobenius_source_gives_identical_tables() {
    assert_eq!(gw_invariants_from(Source::Frobenius, 5).unwrap(), gw_invariants(5).unwrap());
    assert_eq!(disk_invariants_from(Source::Frobenius, 7).unwrap(), disk_invariants_cy(7).unwrap());
}

#[test]
fn disk_tables() {
    let a = disk_invariants_cy(7).unwrap();
    let b = disk_invariants_cy(11).unwrap();
    for d in [1, 3, 5, 7] {
        assert_eq!(a.get(d), b.get(d));
    }
    for (d, _) in &b.entries {
        assert!(!(d.to_integer() % 2u32 == 0.into()), "even degree {d}");
    }
    let n = disk_bps(&b);
    assert_eq!(n[&1], int(30));
    assert_eq!(n[&3], int(1530));
    assert_eq!(n[&5], int(1088250));
    for v in n.values() {
        assert!(v.is_integer());
    }
}

#[test]
fn lg_side_series() {
    let m = lg_mirror_series(&int(30)).unwrap();
    assert_eq!(m.tau.valuation(), Some(int(1)));
    assert_eq!(m.tau.coeff(&int(1)), int(1));
    for (e, _) in m.tau.terms().into_iter().skip(1) {
        assert!((e - int(1)).to_integer() % 5u32 == 0.into());
    }
    let (lead, c) = m.f_lg_01.terms()[0].clone();
    assert_eq!(lead, rat(3, 2));
    assert_eq!(c, rat(-2, 3));
    for (e, _) in m.f_lg_01.terms() {
        assert!(((e - rat(3, 2)) / int(5)).is_integer());
    }
}

#[test]
fn extended_potential_signs() {
    let (plus, minus) = extended_potentials(&int(4)).unwrap();
    assert_eq!(plus.coeff(&rat(1, 2)), int(-30));
    assert_eq!(plus, disk_series(Source::ClosedForm, 8).unwrap().neg());
    assert_eq!(minus.coeff(&rat(3, 2)), rat(2, 3));
}
