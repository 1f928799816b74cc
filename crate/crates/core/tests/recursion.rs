use hypersre::recursion::{chain_sre_series, dominant_eigenvalue, FIT_TOLERANCE};
use hypersre::sre::{pow2_rational, sre_from_moment};
use hypersre::{
    asymptotic_fit, chain, chain_pl_moment, exact_pl_moment, fixed_moment, Alpha, ChainOptions, EnumOptions, Error,
    Moment,
};
use num_rational::BigRational;

fn opts() -> EnumOptions {
    EnumOptions::default()
}

fn exact(m: Moment) -> BigRational {
    m.as_exact().cloned().expect("exact moment")
}

fn beta(alpha: Alpha) -> BigRational {
    pow2_rational(2 - alpha.twice_integral().unwrap())
}

fn fm(n: usize, alpha: Alpha, fixed: &[(usize, bool)]) -> BigRational {
    exact(fixed_moment(n, alpha, fixed, &opts()).unwrap())
}

#[test]
fn decoupling_cases() {
    for alpha in [Alpha::Finite(2.0), Alpha::Finite(3.0)] {
        let b = beta(alpha);
        for n in 6..=12 {
            for y0 in [false, true] {
                for y1 in [false, true] {
                    for y3 in [false, true] {
                        // (i) x2 = 1
                        assert_eq!(
                            fm(n, alpha, &[(0, y0), (1, y1), (2, true), (3, y3)]),
                            &b * fm(n - 2, alpha, &[(0, true), (1, y3)]),
                            "case (i) n={n}"
                        );
                        // (ii) x1 = 1, x2 = 0
                        assert_eq!(
                            fm(n, alpha, &[(0, y0), (1, true), (2, false), (3, y3)]),
                            &b * fm(n - 3, alpha, &[(0, y3)]),
                            "case (ii) n={n}"
                        );
                    }
                }
            }
            for y3 in [false, true] {
                // (iii) x1 = x2 = 0, x0 + x3 = 1
                assert_eq!(
                    fm(n, alpha, &[(0, !y3), (1, false), (2, false), (3, y3)]),
                    &b * fm(n - 3, alpha, &[(0, y3)]),
                    "case (iii) n={n}"
                );
                // (iv) x1 = x2 = 0, x0 + x3 = 0
                assert_eq!(
                    fm(n, alpha, &[(0, y3), (1, false), (2, false), (3, y3)]),
                    fm(n - 2, alpha, &[(0, false), (1, y3)]),
                    "case (iv) n={n}"
                );
            }
        }
    }
}

#[test]
fn initial_conditions_in_beta() {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    for alpha in [2.0, 3.0, 4.0] {
        let alpha = Alpha::Finite(alpha);
        let b = beta(alpha);
        let one = r(1, 1);
        assert_eq!(fm(3, alpha, &[(0, false), (1, false)]), (&one + &b) * r(1, 2));
        assert_eq!(fm(3, alpha, &[(0, false), (1, true)]), b.clone());
        assert_eq!(fm(3, alpha, &[(0, true)]), b.clone());
        assert_eq!(fm(4, alpha, &[(0, false), (1, false)]), (&one + &b * r(3, 1)) * r(1, 4));
        assert_eq!(fm(4, alpha, &[(0, false), (1, true)]), b.clone());
        assert_eq!(fm(4, alpha, &[(0, true)]), (&one + &b * r(7, 1)) * r(1, 8));
    }
}

#[test]
fn recursion_matches_enumeration() {
    let no_check = ChainOptions {
        cross_check_up_to: 0,
        ..ChainOptions::default()
    };
    for alpha in [Alpha::Finite(2.0), Alpha::Finite(3.0)] {
        for n in 3..=20 {
            let rec = chain_pl_moment(n, alpha, &no_check).unwrap();
            let direct = exact_pl_moment(&chain(n).unwrap(), alpha, &opts()).unwrap();
            assert_eq!(rec, direct, "n = {n}, alpha = {alpha}");
        }
    }
}

#[test]
fn non_dyadic_alpha_recursion_matches_enumeration() {
    let alpha = Alpha::Finite(2.3);
    for n in [6, 11, 15] {
        let rec = chain_pl_moment(n, alpha, &ChainOptions::default()).unwrap().to_f64();
        let direct = exact_pl_moment(&chain(n).unwrap(), alpha, &opts()).unwrap().to_f64();
        assert!((rec - direct).abs() <= 1e-12 * direct, "n = {n}: {rec} vs {direct}");
    }
}

#[test]
fn scaled_float_agrees_with_exact() {
    let alpha = Alpha::Finite(2.0);
    let exact_opts = ChainOptions {
        float_above: usize::MAX,
        ..ChainOptions::default()
    };
    let float_opts = ChainOptions {
        float_above: 0,
        ..ChainOptions::default()
    };
    for n in [40, 300, 700] {
        let a = chain_pl_moment(n, alpha, &exact_opts).unwrap();
        let b = chain_pl_moment(n, alpha, &float_opts).unwrap();
        assert!(a.is_exact());
        assert!((a.log2() - b.log2()).abs() <= 1e-12 * a.log2().abs(), "n = {n}");
    }
}

#[test]
fn series_matches_single_lengths() {
    let alpha = Alpha::Finite(2.0);
    let series = chain_sre_series(30, alpha, &ChainOptions::default()).unwrap();
    assert_eq!(series.first().unwrap().0, 3);
    for &(n, s) in &series {
        let m = chain_pl_moment(n, alpha, &ChainOptions::default()).unwrap();
        assert!((s - sre_from_moment(&m, 2.0)).abs() < 1e-12);
    }
}

#[test]
fn fit_is_stable() {
    let alpha = Alpha::Finite(2.0);
    let a = asymptotic_fit(alpha, 150, 200, &ChainOptions::default()).unwrap();
    let b = asymptotic_fit(alpha, 250, 300, &ChainOptions::default()).unwrap();
    assert!((a.slope - b.slope).abs() < FIT_TOLERANCE);
    assert!((a.intercept - b.intercept).abs() < FIT_TOLERANCE);
    assert!((a.slope - 0.6637).abs() < 5e-4);
    assert!((a.intercept + 0.9125).abs() < 5e-3);
}

#[test]
fn slope_is_log_of_dominant_eigenvalue() {
    for alpha in [2.0, 3.0] {
        let fit = asymptotic_fit(Alpha::Finite(alpha), 150, 200, &ChainOptions::default()).unwrap();
        let predicted = dominant_eigenvalue(alpha).log2() / (1.0 - alpha);
        assert!((fit.slope - predicted).abs() < 1e-6, "alpha = {alpha}");
    }
}

#[test]
fn fit_rejects_bad_ranges() {
    let o = ChainOptions::default();
    assert!(matches!(
        asymptotic_fit(Alpha::Finite(2.0), 200, 200, &o),
        Err(Error::InvalidArgument { .. })
    ));
    assert!(matches!(
        asymptotic_fit(Alpha::Finite(2.0), 5, 8, &o),
        Err(Error::NonConvergence(_))
    ));
    assert!(chain_pl_moment(2, Alpha::Finite(2.0), &o).is_err());
    assert!(chain_pl_moment(10, Alpha::One, &o).is_err());
}

