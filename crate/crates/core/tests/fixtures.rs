//! Regression fixtures for the first nonzero curvature coefficients.

use arithcurv_core::chern::{FormSpec, LiftParams};
use arithcurv_core::curvature::{curvature_pair, theorem_checks, Status};
use arithcurv_core::global::globalize;
use arithcurv_core::ring::Rational;

fn pair(form: &FormSpec, p: u64, p2: u64, d: u32) -> arithcurv_core::curvature::CurvatureReport {
    let a = globalize(form, &LiftParams::new(p, 16, d).unwrap(), false).unwrap();
    let b = globalize(form, &LiftParams::new(p2, 16, d).unwrap(), false).unwrap();
    curvature_pair(&a, &b).unwrap()
}

#[test]
fn sp4_and_so4_first_nonzero_in_degree_six() {
    for form in [FormSpec::split_sp(2).unwrap(), FormSpec::split_so_even(2).unwrap()] {
        let r = pair(&form, 3, 5, 6);
        assert_eq!(r.lowest_degree, Some(6), "{}", form.label());
        let w = r.witness.clone().unwrap();
        assert_eq!((w.row, w.col, w.name.as_str()), (1, 1, "T12^3*T21^2*T34"));
        assert_eq!(w.value, Rational::new(1.into(), 4.into()));
        assert_eq!(r.worst_status(), Some(Status::Pass));
    }
}

#[test]
fn so5_first_nonzero_in_degree_six() {
    let r = pair(&FormSpec::split_so_odd(2).unwrap(), 3, 5, 6);
    assert_eq!(r.lowest_degree, Some(6));
    let w = r.witness.unwrap();
    assert_eq!((w.row, w.col, w.name.as_str()), (1, 1, "T12^3*T14^2*T21"));
    assert_eq!(w.value, Rational::new(1.into(), 4.into()));
}

#[test]
fn default_search_window_is_inconclusive_for_rank_four() {
    let s = theorem_checks(&[FormSpec::split_sp(2).unwrap()], &[3, 5], 16, 4, true).unwrap();
    assert_eq!(s.reports.len(), 1);
    assert_eq!(s.reports[0].d, 5);
    assert_eq!(s.worst_status(), Some(Status::Inconclusive));
}

#[test]
fn rank_two_forms_flat_through_degree_seven() {
    for form in [FormSpec::split_sp(1).unwrap(), FormSpec::split_so_even(1).unwrap()] {
        assert!(pair(&form, 3, 5, 7).is_zero(), "{}", form.label());
    }
}
