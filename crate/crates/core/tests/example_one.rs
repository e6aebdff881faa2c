//! The F_3 counterexample `alpha^-1 = t^-3 + 1 + t + t^2`, end to end.

use ascoder_core::{
    as_solve, as_verify, choose_n, coding_check, coding_scan, normalize_pth_power, parse_field,
    pdiv_oracle, Alpha, FqElement, Prec, Series, Valuation, WorkingPrecision,
};

fn f3() -> ascoder_core::Field {
    parse_field("3").unwrap()
}

fn alpha_inv() -> Series {
    Series::parse("t^-3 + 1 + t + t^2", &f3()).unwrap()
}

fn alpha() -> Alpha {
    Alpha::from_inverse(alpha_inv()).unwrap()
}

/// `t^-2 + t^-1 - t + t^2 + sum_i s^i (-t^(4*3^i) + t^(6*3^i))` below `t^bound`,
/// with `s = -1` (alternating tail) or `s = 1`.
fn tail_series(bound: i64, alternating: bool) -> Series {
    let field = f3();
    let mut terms: Vec<(i64, i64)> = vec![(-2, 1), (-1, 1), (1, -1), (2, 1)];
    let mut i = 0u32;
    loop {
        let sign = if alternating && i % 2 == 1 { -1 } else { 1 };
        let (lo, hi) = (4 * 3i64.pow(i), 6 * 3i64.pow(i));
        if lo >= bound {
            break;
        }
        terms.push((lo, -sign));
        terms.push((hi, sign));
        i += 1;
    }
    let terms: Vec<_> = terms
        .into_iter()
        .map(|(e, c)| (e, FqElement::from_int(&field, c)))
        .collect();
    Series::new(&field, &terms, Prec::Finite(bound)).unwrap()
}

fn x_for(m: i64, n: i64) -> Series {
    let a = alpha();
    a.pow(-m, Prec::Infinite)
        .unwrap()
        .sub(&a.pow(-n, Prec::Infinite).unwrap())
        .unwrap()
}

#[test]
fn valuations_of_alpha() {
    let a = alpha_inv().inv(40).unwrap();
    assert_eq!(a.vt(), Valuation::Finite(3));
    assert_eq!(a.vhat(), Valuation::Finite(7));
    assert_eq!(alpha_inv().vhat(), Valuation::Finite(1));
    assert_eq!(alpha().valuation(), 3);
}

fn nonconstant_difference(a: &Series, b: &Series) -> Vec<i64> {
    let diff = a.sub(b).unwrap();
    diff.terms().map(|(e, _)| e).filter(|&e| e != 0).collect()
}

#[test]
fn witness_is_the_non_alternating_tail_up_to_a_constant() {
    let x = x_for(2, 1);
    let out = as_solve(&x, 120).unwrap();
    let w = out.witness().expect("solvable").clone();
    assert!(as_verify(&w, &x, 120).unwrap());

    let expected = tail_series(120, false);
    assert!(as_verify(&expected, &x, 120).unwrap());
    assert!(nonconstant_difference(&w, &expected).is_empty());
}

#[test]
fn alternating_tail_is_not_a_witness() {
    // With the alternating sign the tail stops telescoping under cubing;
    // the first wrong coefficient of a^3 - a sits at t^12.
    let x = x_for(2, 1);
    let alternating = tail_series(55, true);
    assert!(as_verify(&alternating, &x, 12).unwrap());
    assert!(!as_verify(&alternating, &x, 13).unwrap());
    let w = as_solve(&x, 55).unwrap().witness().cloned().unwrap();
    assert_eq!(nonconstant_difference(&w, &alternating), vec![12, 18]);
}

#[test]
fn one_does_not_divide_two() {
    assert!(!pdiv_oracle(3, 1, 2).unwrap());
}

#[test]
fn n_equal_one_is_fooled() {
    let params = choose_n(&alpha()).unwrap().with_multiplier(1).unwrap();
    assert!(coding_check(&params, 2, 1, WorkingPrecision::Auto).unwrap());
    let report = coding_scan(&params, 2, WorkingPrecision::Auto).unwrap();
    assert!(report.mismatches.contains(&(2, 1, true, false)));
}

#[test]
fn n_equal_two_is_chosen_and_scans_clean() {
    assert_eq!(normalize_pth_power(&alpha()).1, 0);
    let params = choose_n(&alpha()).unwrap();
    assert_eq!(params.beta_valuation, 3);
    assert_eq!(params.beta_inv_vhat, Some(1));
    assert_eq!(params.multiplier, 2);
    assert!(!coding_check(&params, 2, 1, WorkingPrecision::Auto).unwrap());
    let report = coding_scan(&params, 10, WorkingPrecision::Auto).unwrap();
    assert!(report.is_clean(), "{report}");
    assert_eq!(report.checked, 100);
}
