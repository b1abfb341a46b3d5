mod common;

use autgrp::pencil::{KroneckerBlock, KroneckerSpec};
use autgrp::{dim_from_structure, dim_report, Field, Involution, Mat, Space, Tolerances, C64};
use common::{from_rows, random, rank_deficient, rng, structured};

fn jordan(lambda: f64, m: usize) -> KroneckerBlock {
    KroneckerBlock::Jordan {
        lambda: C64::new(lambda, 0.0),
        m,
    }
}

#[test]
fn identity_gives_skew_dimension() {
    for n in 1..=6 {
        let spec = KroneckerSpec::from_blocks(vec![jordan(1.0, 1); n], Involution::T, Field::Complex);
        let r = dim_from_structure(&spec, Space::Sol);
        assert_eq!(r.term("D_1"), Some(n * (n - 1) / 2));
        assert_eq!(r.total, n * (n - 1) / 2);
    }
}

#[test]
fn symplectic_form_gives_ten() {
    let spec = KroneckerSpec::from_blocks(vec![jordan(-1.0, 1); 4], Involution::T, Field::Real);
    let r = dim_from_structure(&spec, Space::Sol);
    assert_eq!(r.total, 10);
    let omega = from_rows(&[
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[-1.0, 0.0, 0.0, 0.0],
        &[0.0, -1.0, 0.0, 0.0],
    ]);
    let r = dim_report(&omega, Involution::T, Space::Sol, &Tolerances::default()).unwrap();
    assert_eq!(r.total, 10);
    assert_eq!(r.agrees, Some(true));
}

#[test]
fn nilpotent_pair_gives_one() {
    let spec = KroneckerSpec::from_blocks(
        vec![KroneckerBlock::ZeroInfPair { t: 1 }],
        Involution::T,
        Field::Real,
    );
    let r = dim_from_structure(&spec, Space::Sol);
    assert_eq!(r.term("D_Z"), Some(1));
    assert_eq!(r.total, 1);
}

#[test]
fn rank_one_diagonal_gives_two() {
    let spec = KroneckerSpec::from_blocks(
        vec![KroneckerBlock::SingularPair { s: 0 }, jordan(1.0, 1)],
        Involution::T,
        Field::Real,
    );
    let r = dim_from_structure(&spec, Space::Sol);
    assert_eq!(r.term("D_L"), Some(1));
    assert_eq!(r.term("D_1"), Some(0));
    assert_eq!(r.term("D_I"), Some(1));
    assert_eq!(r.total, 2);
}

#[test]
fn totals_are_sums_of_terms() {
    let mut r = rng(77);
    for _ in 0..40 {
        let j = structured(6, &mut r);
        for space in [Space::Sol, Space::Cosol] {
            let d = dim_report(&j, Involution::T, space, &Tolerances::default()).unwrap();
            assert_eq!(d.total, d.terms.iter().map(|(_, v)| v).sum::<usize>());
        }
    }
}

fn check(j: &Mat, inv: Involution, label: &str) {
    for space in [Space::Sol, Space::Cosol] {
        let d = dim_report(j, inv, space, &Tolerances::default())
            .unwrap_or_else(|e| panic!("{label} {space}: {e}"));
        assert_eq!(
            d.agrees,
            Some(true),
            "{label} {space}: formula {} vs oracle {:?}, terms {:?}\nJ = {j}",
            d.total,
            d.oracle,
            d.terms
        );
    }
}

#[test]
fn formula_agrees_with_oracle_on_random_input() {
    for seed in 0..40u64 {
        let mut r = rng(2000 + seed);
        let n = 2 + seed as usize % 5;
        for field in [Field::Real, Field::Complex] {
            for inv in [Involution::T, Involution::H] {
                check(&random(n, n, field, &mut r), inv, &format!("seed {seed} {field} {inv}"));
                check(
                    &rank_deficient(n, field, &mut r),
                    inv,
                    &format!("seed {seed} {field} {inv} deficient"),
                );
            }
        }
    }
}

#[test]
fn formula_agrees_with_oracle_on_structured_input() {
    for seed in 0..150u64 {
        let j = structured(6, &mut rng(1000 + seed));
        check(&j, Involution::T, &format!("structured seed {seed} real"));
        let jc = Mat::complex(j.cm().clone());
        for inv in [Involution::T, Involution::H] {
            check(&jc, inv, &format!("structured seed {seed} complex {inv}"));
        }
    }
}

#[test]
fn real_interaction_alternative_is_flagged() {
    let j = from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let d = dim_report(&j, Involution::T, Space::Sol, &Tolerances::default()).unwrap();
    assert_eq!(d.total, 2);
    assert_eq!(d.agrees, Some(true));
    assert_eq!(d.d_i_alternative, Some(2));
    assert!(d.note.as_deref().unwrap().contains("differs from oracle"));
}
