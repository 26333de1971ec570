use mirrorlab::branes::{decompose_for_continuation, koszul_char, verify_decomposition, LaurentChar};
use mirrorlab::exact::{gamma_half_integer, int, pochhammer, rat, PiHalfScalar};
use mirrorlab::glsm::{box_elements, h0, h1, loop_space_data, GlsmCharges};
use mirrorlab::mb::{contour_integrate, gamma_numeric, hemisphere_z, log_q_from, model_integrand, rel_diff, residue_sum_auto, Method, Model, Precision, Side};
use mirrorlab::{ExecPolicy, PuiseuxLogSeries, PuiseuxSeries, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rug::Complex;

fn series_strategy(ram: u32, min_exp: i64, max_lattice: i64, order: i64) -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((min_exp..max_lattice, -50i64..50, 1i64..6), 0..8).prop_map(move |terms| {
        let t: Vec<(Rational, Rational)> = terms.into_iter().map(|(k, n, d)| (rat(k, ram as i64), rat(n, d))).collect();
        PuiseuxSeries::from_terms(ram, Some(&int(order)), &t).unwrap()
    })
}

fn unit_strategy() -> impl Strategy<Value = PuiseuxSeries> {
    (1i64..5, series_strategy(2, 1, 20, 10)).prop_map(|(c, s)| s.add(&PuiseuxSeries::constant(2, int(c))))
}

fn char_strategy() -> impl Strategy<Value = LaurentChar> {
    prop::collection::vec((-6i64..7, -20i64..21), 0..7).prop_map(|t| LaurentChar::from_terms(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz(a in series_strategy(2, -4, 20, 10), b in series_strategy(2, -4, 20, 10)) {
        let lhs = a.mul(&b).theta();
        let rhs = a.theta().mul(&b).add(&a.mul(&b.theta()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_is_two_sided(u in unit_strategy()) {
        let inv = u.invert().unwrap();
        let one = PuiseuxSeries::constant(2, Rational::one()).truncate(&int(10)).unwrap();
        prop_assert_eq!(u.mul(&inv).truncate(&int(10)).unwrap(), one.clone());
        prop_assert_eq!(inv.mul(&u).truncate(&int(10)).unwrap(), one);
    }

    #[test]
    fn truncation_commutes_with_products(a in series_strategy(2, 0, 30, 15), b in series_strategy(2, 0, 30, 15)) {
        let hi = a.mul(&b).truncate(&int(6)).unwrap();
        let lo = a.truncate(&int(6)).unwrap().mul(&b.truncate(&int(6)).unwrap()).truncate(&int(6)).unwrap();
        prop_assert_eq!(hi, lo);
    }

    #[test]
    fn log_inverts_exp(a in series_strategy(2, 1, 20, 8)) {
        let e = a.exp_series().unwrap();
        let back = e.sub(&PuiseuxSeries::constant(2, Rational::one())).log1p_series().unwrap();
        prop_assert_eq!(back, a.truncate(&int(8)).unwrap());
    }

    #[test]
    fn reversion_composes_to_identity(cs in prop::collection::vec(-9i64..10, 1..7), lead in prop::sample::select(vec![-2i64, -1, 1, 3])) {
        let mut terms = vec![(int(1), int(lead))];
        terms.extend(cs.iter().enumerate().map(|(i, c)| (int(i as i64 + 2), int(*c))));
        let order = int(8);
        let m = PuiseuxSeries::from_terms(1, Some(&order), &terms).unwrap();
        let r = m.reversion().unwrap();
        // m(r(x)) by Horner in r
        let mut acc = PuiseuxSeries::exact_zero(1);
        for k in (1..8).rev() {
            acc = acc.add(&PuiseuxSeries::constant(1, m.coeff(&int(k)))).mul(&r);
        }
        let x = PuiseuxSeries::monomial(1, Rational::one(), &int(1)).unwrap();
        prop_assert_eq!(acc.truncate(&order).unwrap().with_ramification(1).unwrap(), x.truncate(&order).unwrap());
    }

    #[test]
    fn log_series_json_roundtrip(a in series_strategy(10, -20, 40, 5), b in series_strategy(10, 0, 40, 5)) {
        let s = PuiseuxLogSeries::new(vec![a, b]).unwrap();
        let back = mirrorlab::series::log_series_from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), s.to_json());
    }

    #[test]
    fn gamma_half_integer_recurrence(n in -12i64..12) {
        let k = rat(2 * n + 1, 2);
        let g = gamma_half_integer(&k).unwrap();
        let g1 = gamma_half_integer(&(&k + int(1))).unwrap();
        prop_assert_eq!(g1, g.scale(&k));
    }

    #[test]
    fn pochhammer_step(n in -20i64..20, d in 1i64..7, m in 0u32..12) {
        let x = rat(n, d);
        prop_assert_eq!(pochhammer(&x, m + 1), pochhammer(&x, m) * (&x + int(m as i64)));
    }

    #[test]
    fn decomposition_reassembles(f in char_strategy(), c in -9i64..10, top in -3i64..8) {
        let plus = LaurentChar::from_terms(&[(0, 1), (-1, 1)]);
        let minus = LaurentChar::from_terms(&[(0, 1), (-5, -1)]);
        let ch = &(&f * &plus) + &(&LaurentChar::monomial(top, c) * &minus);
        let (f2, g2) = decompose_for_continuation(&ch).unwrap();
        prop_assert!(verify_decomposition(&ch, &f2, &g2));
        prop_assert!(g2.support().len() <= 1);
    }

    #[test]
    fn decomposition_or_clean_error(ch in char_strategy()) {
        match decompose_for_continuation(&ch) {
            Ok((f, g)) => prop_assert!(verify_decomposition(&ch, &f, &g)),
            Err(e) => {
                let clean = matches!(e, mirrorlab::Error::NoDecomposition { .. });
                prop_assert!(clean, "{}", e);
            }
        }
    }

    #[test]
    fn division_identity(a in char_strategy(), d in char_strategy(), lead in prop::sample::select(vec![-1i64, 1]), low in -4i64..2) {
        let divisor = &LaurentChar::monomial(low, lead) + &d.shift(low + 1 - d.min_exp().unwrap_or(0));
        let (q, r) = a.div_rem(&divisor).unwrap();
        prop_assert_eq!(&(&q * &divisor) + &r, a);
    }

    #[test]
    fn char_json_roundtrip(a in char_strategy()) {
        prop_assert_eq!(LaurentChar::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn riemann_roch(n in -200i64..200) {
        let x = rat(n, 10);
        prop_assert_eq!(h0(&x) - h1(&x), x.floor().to_integer().to_string().parse::<i64>().unwrap() + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn insertion_is_a_ring_map(a in char_strategy(), b in char_strategy(), re in -0.4f64..0.4, im in -0.6f64..0.6) {
        let prec = 128;
        let s = Complex::with_val(prec, (re, im));
        let lhs = (&a * &b).insertion(&s, prec);
        let rhs = Complex::with_val(prec, a.insertion(&s, prec) * b.insertion(&s, prec));
        let scale = 1.0 + rug::Float::with_val(64, rhs.abs_ref()).to_f64();
        let diff = rug::Float::with_val(64, Complex::with_val(prec, &lhs - &rhs).abs_ref()).to_f64();
        prop_assert!(diff < 1e-30 * scale);
    }

    #[test]
    fn koszul_insertion_vanishes_to_order_five(twist in -4i64..5) {
        let prec = 192;
        let k = koszul_char(&[1, 1, 1, 1, 1], twist);
        let e = Complex::with_val(prec, (1e-6, 0.0));
        let e2 = Complex::with_val(prec, (2e-6, 0.0));
        let r = Complex::with_val(prec, k.insertion(&e2, prec) / k.insertion(&e, prec));
        prop_assert!((r.real().to_f64() - 32.0).abs() < 1e-3);
    }

    #[test]
    fn gamma_recurrence(re in -6.0f64..6.0, im in 0.1f64..8.0) {
        let bits = 160;
        let z = Complex::with_val(bits, (re, im));
        let g = gamma_numeric(&z, bits).unwrap();
        let g1 = gamma_numeric(&Complex::with_val(bits, &z + 1u32), bits).unwrap();
        prop_assert!(rel_diff(&g1, &Complex::with_val(bits, &z * &g)) < 1e-40);
    }

    #[test]
    fn age_plus_inverse_age_counts_moving(sign in prop::sample::select(vec![1i32, -1]), ext in any::<bool>()) {
        let c = if ext { GlsmCharges::extended() } else { GlsmCharges::quintic() };
        for b in box_elements(&c, sign).unwrap() {
            let inv = b.element.inverse();
            let inv_age: Rational = c.coords.iter().map(|x| inv.weight_on(x)).fold(Rational::zero(), |a, w| a + w);
            let moving = c.coords.iter().filter(|x| !b.element.weight_on(x).is_zero()).count() as i64;
            prop_assert_eq!(&b.age + inv_age, int(moving));
        }
    }

    #[test]
    fn virtual_dim_depends_on_coset(d2 in 1i64..21) {
        let c = GlsmCharges::extended();
        let d = rat(d2, 2);
        let v = loop_space_data(&c, 1, &d).unwrap().virtual_dim;
        let base = loop_space_data(&c, 1, &rat(d2 % 2 + (1 - d2 % 2) * 2, 2)).unwrap().virtual_dim;
        prop_assert_eq!(v, base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn residues_agree_with_contour(exp in 3.2f64..5.0) {
        // the insertion sits on the decay borderline, so the line integral needs real q
        let bits = 128;
        let q = log_q_from(&format!("{}", 10f64.powf(exp)), 0.0, bits).unwrap();
        let ig = model_integrand(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q).unwrap();
        let prec = Precision::new(bits);
        let res = residue_sum_auto(&ig, Side::Right, prec, ExecPolicy::Parallel).unwrap();
        let con = contour_integrate(&ig, prec, ExecPolicy::Parallel).unwrap();
        prop_assert!(rel_diff(&res.value, &con.value) < 1e-25);
    }

    #[test]
    fn doubling_precision_confirms_digits(exp in 3.0f64..6.0) {
        let mag = format!("{}", 10f64.powf(exp));
        let run = |bits: u32| {
            let q = log_q_from(&mag, 0.0, bits).unwrap();
            hemisphere_z(Model::Extended, &koszul_char(&[1, 1, 1, 1, 1], 2), &q, Method::Residues, Precision::new(bits), ExecPolicy::Parallel).unwrap().value
        };
        let lo = run(128);
        let hi = run(256);
        prop_assert!(rel_diff(&lo, &hi) < 1e-30);
    }

    #[test]
    fn schedule_does_not_change_bits(exp in -6.0f64..-4.0) {
        let bits = 128;
        let q = log_q_from(&format!("{}", 10f64.powf(exp)), 0.0, bits).unwrap();
        let ch = koszul_char(&[1, 1, 1, 1, 1], 2);
        let a = hemisphere_z(Model::Extended, &ch, &q, Method::Residues, Precision::new(bits), ExecPolicy::Parallel).unwrap();
        let b = hemisphere_z(Model::Extended, &ch, &q, Method::Residues, Precision::new(bits), ExecPolicy::Sequential).unwrap();
        prop_assert_eq!(a.value, b.value);
    }
}

#[test]
fn pi_half_scalar_zero_is_absorbing() {
    let z = PiHalfScalar::zero();
    assert!(z.scale(&int(5)).is_zero());
}
