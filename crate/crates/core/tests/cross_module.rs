//! End-to-end checks through the public API, crossing module boundaries.

use quadwaring_core::additive::{additive_energy_squares, cyclic_sumset};
use quadwaring_core::charsums::{reduced_gauss_closed_form, reduced_gauss_sum, square_gauss_sum};
use quadwaring_core::comblemma::{
    canonical_t_tuples, generate_lp, small_moduli_adversary_check, threshold_big_d, threshold_d,
};
use quadwaring_core::exactlp::{simplex_solve, verify_certificate, vertex_enumerate, LpStatus};
use quadwaring_core::{factorize, squares_mod, Rational, SquareKind};

#[test]
fn base_case_optima_never_exceed_threshold_and_are_certified() {
    let d = threshold_d(7).unwrap();
    for t in canonical_t_tuples(7, 3) {
        let lp = generate_lp(7, 3, &t).unwrap();
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(verify_certificate(&lp, &sol).unwrap());
        assert!(sol.value.as_ref().unwrap() <= &d, "t = {t:?}");
    }
}

#[test]
fn lp_round_trips_through_json() {
    let lp = generate_lp(6, 3, &[1, 2, 3, 3, 3, 3]).unwrap();
    let back = serde_json::from_str(&serde_json::to_string(&lp).unwrap()).unwrap();
    assert_eq!(lp, back);
    assert_eq!(simplex_solve(&lp).value, simplex_solve(&back).value);
}

#[test]
fn adversary_maxima_sit_between_thresholds() {
    for s in [6, 7, 9] {
        let r = small_moduli_adversary_check(s).unwrap();
        assert!(r.passed());
        assert!(r.max_value <= threshold_big_d(s).unwrap());
        assert!(threshold_d(s).unwrap() <= threshold_big_d(s).unwrap());
    }
}

#[test]
fn square_gauss_sums_recover_the_quadratic_gauss_sum() {
    // Over the distinct squares mod p (0 included), 2 S(t) - 1 is the quadratic Gauss sum.
    for p in [7u64, 11, 13, 101] {
        let f = factorize(p).unwrap();
        for t in 1..p as i64 {
            let g = square_gauss_sum(&f, t).unwrap() * 2.0 - 1.0;
            assert!((g.norm() - (p as f64).sqrt()).abs() < 1e-9, "p={p} t={t}");
        }
    }
    for t in 1..13 {
        let direct = reduced_gauss_sum(13, 2, t).unwrap();
        let closed = reduced_gauss_closed_form(13, 2, t).unwrap();
        assert!((direct - closed).norm() < 1e-9);
    }
}

#[test]
fn five_unit_squares_cover_small_prime_moduli() {
    for p in [7u64, 11, 13, 17, 19] {
        let units = squares_mod(p, SquareKind::UnitSquares).unwrap();
        let sets = vec![units.elements().to_vec(); 5];
        assert_eq!(cyclic_sumset(&sets, p).count_ones(), p);
    }
}

#[test]
fn energy_of_squares_is_multiplicative_on_a_coprime_pair() {
    let e = |w| additive_energy_squares(w).unwrap().energy;
    assert_eq!(e(35), e(5) * e(7));
    assert_eq!(e(9 * 11), e(9) * e(11));
}

#[test]
fn vertex_enumeration_agrees_with_simplex_on_a_toy() {
    use quadwaring_core::exactlp::{Bound, Constraint};
    let r = |n, d| Rational::new(n, d);
    let lp = quadwaring_core::LpProblem::new(
        vec![r(1, 1), r(1, 1)],
        vec![Constraint::new(vec![(0, r(1, 1)), (1, r(2, 1))], r(1, 1))],
        vec![Bound::unit(); 2],
        "toy",
    )
    .unwrap();
    let v = vertex_enumerate(&lp).unwrap();
    assert_eq!(v.value(), simplex_solve(&lp).value.as_ref());
    assert_eq!(v.value(), Some(&r(1, 1)));
}
