use urnpde::closed_form::p_rule3;
use urnpde::exact_arith::{frac, int};
use urnpde::series_verify::{
    apply_d, f_series_from_pmf, pde_source, rule3_total_via_unit_3f2, series_from_pmf,
    verify_identity_3f2_unit, verify_identity_bio2, verify_identity_c1, verify_pde,
};
use urnpde::{Rational, Rule};

#[test]
fn pde_holds_for_both_rules() {
    for rule in [Rule::RuleIII, Rule::RuleIV] {
        for k in 0..=4 {
            let report = verify_pde(rule, k, 10).unwrap();
            assert!(report.passed(), "{report}");
            assert_eq!(report.trusted_window, (8, 8));
        }
    }
}

#[test]
fn operator_image_is_the_source_on_rule3_k1() {
    let image = apply_d(&series_from_pmf(Rule::RuleIII, 1, 10).unwrap());
    let source = pde_source(Rule::RuleIII, 1, 10).unwrap();
    for a in -2..=8 {
        for b in -2..=8 {
            assert_eq!(image.coeff(a, b), source.coeff(a, b), "({a},{b})");
        }
    }
}

/// Fourth-order expansion tables, rows indexed by the power of `1/z`.
#[test]
fn printed_expansion_tables() {
    let y0: [[i64; 5]; 5] = [
        [1, 0, 0, 0, 0],
        [1, 3, 6, 10, 15],
        [1, 8, 30, 80, 175],
        [1, 15, 90, 350, 1050],
        [1, 24, 210, 1120, 4410],
    ];
    let s = f_series_from_pmf(Rule::RuleIII, 0, 4).unwrap();
    for (a, row) in y0.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            assert_eq!(s.coeff(a as i64, b as i64), int(*v), "k=0 ({a},{b})");
        }
    }

    let y2: [[Rational; 5]; 5] = [
        [int(0), int(0), int(1), int(0), int(0)],
        [int(0), int(0), int(1), frac(5, 3), frac(5, 2)],
        [int(0), int(0), int(1), int(4), frac(21, 2)],
        [int(0), int(0), int(1), int(7), int(28)],
        [int(0), int(0), int(1), frac(32, 3), int(60)],
    ];
    let s = f_series_from_pmf(Rule::RuleIII, 2, 4).unwrap();
    for (a, row) in y2.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            assert_eq!(s.coeff(a as i64, b as i64), *v, "k=2 ({a},{b})");
        }
    }
}

#[test]
fn c1_and_bio2_grids() {
    for r in 1..=25 {
        for w in 1..=25 {
            assert!(verify_identity_c1(r, w), "C1 r={r} w={w}");
            assert!(verify_identity_bio2(r, w), "bio2 r={r} w={w}");
        }
    }
}

#[test]
fn unit_summation_normalisation_route() {
    for r in 1..=15u64 {
        for w in 1..=15u64 {
            assert!(verify_identity_3f2_unit(&int(1), &int(1), w, &int(2 + r as i64)).unwrap());
            let total = rule3_total_via_unit_3f2(r, w).unwrap();
            let brute: Rational = (0..=w).map(|k| p_rule3(r, w, k)).sum();
            assert_eq!(total, int(1));
            assert_eq!(total, brute);
        }
    }
}
