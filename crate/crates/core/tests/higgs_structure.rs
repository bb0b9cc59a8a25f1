mod common;

use higgsmot_core::{higgs, oracle, CurveContext, Engine};
use num_bigint::BigInt;
use num_traits::{One, Zero};

fn check_structure(g: u32, n: i64, d: i64) {
    let half = (n * n * (g as i64 - 1) + 1) as usize;
    let e = Engine::new(CurveContext::new(g, 2 * half + 2)).unwrap();
    let (series, rows) = higgs::higgs_space_with_breakdown(&e, n, d).unwrap();
    let tag = format!("g={g} n={n} d={d}");
    assert!(series.constant().is_one(), "{tag}");
    assert!(series.is_nonnegative(), "{tag}");
    assert_eq!(series.degree(), Some(2 * half), "{tag}");
    let nonempty = rows.iter().filter(|r| !r.series.is_zero()).count();
    assert_eq!(series.coeff(2 * half), BigInt::from(nonempty), "{tag}");
    for r in &rows {
        let c = &r.component;
        assert!(c.twist >= 0);
        assert_eq!(c.twist == 0, c.invariants.length() == 0, "{tag}");
        if r.series.is_zero() {
            continue;
        }
        assert_eq!(r.series.degree(), Some(2 * c.dim as usize), "{tag} {}", c.invariants);
        assert!(r.series.is_palindromic(2 * c.dim as usize), "{tag} {}", c.invariants);
        assert!(r.series.constant().is_one());
    }
    assert_eq!(higgs::de_rham_series(&e, n, d).unwrap(), series);
    let stack = higgs::higgs_stack_series(&e, n, d).unwrap();
    assert_eq!(&stack * &e.context().gerbe_strip(), series);
}

#[test]
fn rank_one_is_jacobian() {
    for g in 2..=4u32 {
        let e = Engine::new(CurveContext::new(g, 20)).unwrap();
        for d in [-3i64, 0, 1, 7] {
            assert_eq!(higgs::higgs_space_series(&e, 1, d).unwrap(), e.context().jacobian_class());
        }
    }
}

#[test]
fn structure_rank_two_and_three() {
    for (g, n, d) in [(2, 1, 0), (3, 1, 2), (2, 2, 1), (3, 2, 1), (4, 2, 3), (2, 3, 1), (2, 3, 2)] {
        check_structure(g, n, d);
    }
}

#[test]
fn rank_two_matches_oracle() {
    for (g, n) in [(2u32, 22usize), (3, 38), (4, 30)] {
        let e = Engine::new(CurveContext::new(g, n)).unwrap();
        for d in [1i64, 3, -1] {
            assert_eq!(
                higgs::higgs_space_series(&e, 2, d).unwrap(),
                oracle::rank2_higgs_direct(e.context(), d).unwrap(),
                "g={g} d={d}"
            );
        }
    }
}

#[test]
fn rank_three_is_independent_of_degree() {
    let e = Engine::new(CurveContext::new(2, 40)).unwrap();
    let a = higgs::higgs_space_series(&e, 3, 1).unwrap();
    assert_eq!(a, higgs::higgs_space_series(&e, 3, 2).unwrap());
    assert_eq!(a, higgs::higgs_space_series(&e, 3, 4).unwrap());
    assert!(a.coeffs()[21..].iter().all(Zero::is_zero));
}

#[test]
fn fixed_types_shift_with_degree() {
    for (n, d) in [(2i64, 1i64), (3, 1), (3, 2)] {
        let a = higgs::enumerate_fixed_types(n, d, 2).unwrap();
        let b = higgs::enumerate_fixed_types(n, d + n, 2).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            let shifted: Vec<i64> = x
                .invariants
                .degrees()
                .iter()
                .zip(x.invariants.ranks())
                .map(|(d, n)| d + n)
                .collect();
            assert_eq!(y.invariants.degrees(), shifted.as_slice());
            assert_eq!((x.dim, x.twist), (y.dim, y.twist));
        }
    }
}

#[test]
fn non_coprime_is_rejected() {
    assert!(higgs::enumerate_fixed_types(2, 2, 2).is_err());
    assert!(higgs::enumerate_fixed_types(3, 0, 2).is_err());
}

#[test]
fn structure_rank_four() {
    for d in [1i64, 3] {
        check_structure(2, 4, d);
    }
    let e = Engine::new(CurveContext::new(2, 36)).unwrap();
    assert_eq!(
        higgs::higgs_space_series(&e, 4, 1).unwrap(),
        higgs::higgs_space_series(&e, 4, 3).unwrap()
    );
}
