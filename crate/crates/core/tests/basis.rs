mod common;

use autgrp::basis::{
    basis_from_matrices, build_pair_matrix, element_residual, project_centralizer, PairKind,
};
use autgrp::eigen::{centralizer_dimension, cosquare, jordan_structure};
use autgrp::{
    basis_with, cosol_basis, oracle_basis, sol_basis, span_equal, Field, Involution, Mat, Space,
    SolveOptions, Tolerances, C64,
};
use common::{from_rows, random, rank_deficient, rng, structured};

fn worked_j() -> Mat {
    from_rows(&[
        &[5.0, 6.0, -9.0, -9.0],
        &[1.0, 0.0, -1.0, 1.0],
        &[-3.0, -6.0, 7.0, 7.0],
        &[-6.0, 2.0, 2.0, 0.0],
    ])
}

#[test]
fn worked_example_builders() {
    let j = worked_j();
    let w = from_rows(&[&[6.0, 1.0], &[12.0, 8.0], &[6.0, 1.0], &[0.0, 0.0]]);
    let u = from_rows(&[&[-4.0, 7.0], &[-8.0, 15.0], &[-4.0, 8.0], &[-4.0, 7.0]]);
    let x1 = build_pair_matrix(PairKind::XT, 1, &j, &w, &u).unwrap();
    let e1 = from_rows(&[
        &[5.0, -1.0, -3.0, 0.0],
        &[10.0, -2.0, -6.0, 0.0],
        &[5.0, -1.0, -3.0, 0.0],
        &[4.0, 0.0, -4.0, 0.0],
    ])
    .scale(C64::new(24.0, 0.0));
    assert!((&x1 - &e1).norm() < 1e-9);
    let x2 = build_pair_matrix(PairKind::XT, 2, &j, &w, &u).unwrap();
    let e2 = from_rows(&[
        &[-23.0, 4.0, 12.0, 6.0],
        &[-46.0, 5.0, 30.0, 12.0],
        &[-26.0, 4.0, 15.0, 6.0],
        &[-16.0, 0.0, 16.0, 3.0],
    ])
    .scale(C64::new(8.0, 0.0));
    assert!((&x2 - &e2).norm() < 1e-9);
    let z = Mat::zeros(4, 2, Field::Real);
    assert_eq!(
        build_pair_matrix(PairKind::XT, 1, &j, &z, &z).unwrap().norm(),
        0.0
    );
    assert!(build_pair_matrix(PairKind::XT, 3, &j, &w, &u).is_err());
    assert!(build_pair_matrix(PairKind::XR, 1, &j, &w, &from_rows(&[&[1.0], &[0.0], &[0.0], &[0.0]])).is_err());
}

#[test]
fn project_centralizer_examples() {
    let id = Mat::identity(3, Field::Real);
    let mut r = rng(3);
    let z = random(3, 3, Field::Real, &mut r);
    let p = project_centralizer(&z, &id, Involution::T, Space::Sol).unwrap();
    assert!((&p - &(&z - &z.transpose())).norm() < 1e-14);
    let p = project_centralizer(&id, &id, Involution::T, Space::Sol).unwrap();
    assert_eq!(p.norm(), 0.0);
    assert!(project_centralizer(&z, &Mat::zeros(3, 3, Field::Real), Involution::T, Space::Sol).is_err());
}

#[test]
fn small_dimensions() {
    let id = Mat::identity(2, Field::Real);
    let s = sol_basis(&id, Involution::T).unwrap();
    assert_eq!(s.dim(), 1);
    let skew = from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    assert!(span_equal(&s, &basis_from_matrices(vec![skew.clone()], &id, Involution::T, Space::Sol), 1e-12));
    assert_eq!(cosol_basis(&id, Involution::T).unwrap().dim(), 3);
    assert_eq!(sol_basis(&skew, Involution::T).unwrap().dim(), 3);
    assert_eq!(cosol_basis(&skew, Involution::T).unwrap().dim(), 1);
    let z = Mat::zeros(3, 3, Field::Real);
    assert_eq!(sol_basis(&z, Involution::T).unwrap().dim(), 9);
    assert_eq!(sol_basis(&Mat::identity(4, Field::Real), Involution::T).unwrap().dim(), 6);
}

fn check_against_oracle(j: &Mat, inv: Involution, label: &str) {
    for space in [Space::Sol, Space::Cosol] {
        let b = basis_with(j, inv, space, &SolveOptions::default())
            .unwrap_or_else(|e| panic!("{label} {space}: {e}\nJ = {j}"));
        let o = oracle_basis(j, inv, space, 1e-9).unwrap();
        assert!(
            span_equal(&b, &o, 1e-8),
            "{label} {space}: dim {} vs oracle {}\nJ = {j}",
            b.dim(),
            o.dim()
        );
        assert!(b.max_residual() < 1e-8, "{label} {space}: residual {}", b.max_residual());
    }
}

#[test]
fn random_matrices_match_oracle() {
    for seed in 0..40u64 {
        let mut r = rng(seed);
        let n = 2 + (seed as usize % 5);
        for field in [Field::Real, Field::Complex] {
            for inv in [Involution::T, Involution::H] {
                let j = random(n, n, field, &mut r);
                check_against_oracle(&j, inv, &format!("seed {seed} {field} {inv} nonsingular"));
                let j = rank_deficient(n, field, &mut r);
                check_against_oracle(&j, inv, &format!("seed {seed} {field} {inv} deficient"));
            }
        }
    }
}

#[test]
fn structured_matrices_match_oracle() {
    for seed in 0..150u64 {
        let mut r = rng(1000 + seed);
        let j = structured(6, &mut r);
        check_against_oracle(&j, Involution::T, &format!("structured seed {seed} real"));
        let jc = Mat::complex(j.cm().clone());
        for inv in [Involution::T, Involution::H] {
            check_against_oracle(&jc, inv, &format!("structured seed {seed} complex {inv}"));
        }
    }
}

#[test]
fn direct_sum_of_sol_and_cosol() {
    for seed in 0..30u64 {
        let mut r = rng(500 + seed);
        let n = 2 + seed as usize % 5;
        for field in [Field::Real, Field::Complex] {
            for inv in [Involution::T, Involution::H] {
                let j = random(n, n, field, &mut r);
                let c = cosquare(&j, inv).unwrap();
                let spec = jordan_structure(&c, inv, &Tolerances::default()).unwrap();
                let cent = centralizer_dimension(&spec);
                let s = sol_basis(&j, inv).unwrap();
                let co = cosol_basis(&j, inv).unwrap();
                let factor = if field == Field::Complex && inv == Involution::H { 2 } else { 1 };
                assert_eq!(s.dim() + co.dim(), factor * cent);
            }
        }
    }
}

#[test]
fn residual_helper() {
    let id = Mat::identity(2, Field::Real);
    let skew = from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    assert_eq!(element_residual(&skew, &id, Involution::T, Space::Sol), 0.0);
    assert!(element_residual(&id, &id, Involution::T, Space::Sol) > 0.5);
}

fn span_of(mats: Vec<Mat>, j: &Mat, space: Space) -> autgrp::SolutionBasis {
    basis_from_matrices(mats, j, Involution::T, space)
}

#[test]
fn worked_example_sol_span() {
    let j = worked_j();
    let s = sol_basis(&j, Involution::T).unwrap();
    assert_eq!(s.dim(), 2);
    let e1 = from_rows(&[
        &[5.0, -1.0, -3.0, 0.0],
        &[10.0, -2.0, -6.0, 0.0],
        &[5.0, -1.0, -3.0, 0.0],
        &[4.0, 0.0, -4.0, 0.0],
    ]);
    let e2 = from_rows(&[
        &[-23.0, 4.0, 12.0, 6.0],
        &[-46.0, 5.0, 30.0, 12.0],
        &[-26.0, 4.0, 15.0, 6.0],
        &[-16.0, 0.0, 16.0, 3.0],
    ]);
    assert!(span_equal(&s, &span_of(vec![e1, e2], &j, Space::Sol), 1e-8));
}

#[test]
fn complex_eigenvalue_example_sol_span() {
    let j = from_rows(&[
        &[-1.0, 0.0, -3.0, -2.0],
        &[1.0, 0.0, 1.0, 0.0],
        &[-2.0, 2.0, 4.0, -1.0],
        &[0.0, -1.0, -1.0, -2.0],
    ]);
    let s = sol_basis(&j, Involution::T).unwrap();
    assert_eq!(s.dim(), 2);
    let third = C64::new(1.0 / 3.0, 0.0);
    let a = from_rows(&[
        &[13.0, -8.0, -34.0, 14.0],
        &[2.0, -13.0, -62.0, -20.0],
        &[8.0, 8.0, 7.0, 10.0],
        &[-32.0, 16.0, 20.0, -7.0],
    ])
    .scale(third);
    let b = from_rows(&[
        &[-39.0, 9.0, 22.0, -32.0],
        &[-51.0, 39.0, 86.0, -10.0],
        &[-9.0, -9.0, -16.0, 5.0],
        &[36.0, -18.0, 10.0, 16.0],
    ])
    .scale(third);
    for x in [&a, &b] {
        assert!(element_residual(x, &j, Involution::T, Space::Sol) < 1e-12);
    }
    assert!(span_equal(&s, &span_of(vec![a, b], &j, Space::Sol), 1e-8));
}

#[test]
fn orthogonal_symplectic_intersection_span() {
    let j = from_rows(&[
        &[1.0, 1.0, -1.0, -1.0],
        &[-1.0, 1.0, 0.0, -1.0],
        &[1.0, 0.0, 1.0, -1.0],
        &[1.0, 1.0, 1.0, 1.0],
    ]);
    let s = sol_basis(&j, Involution::T).unwrap();
    assert_eq!(s.dim(), 2);
    let a = from_rows(&[
        &[0.0, 1.0, -1.0, -2.0],
        &[-1.0, 0.0, -1.0, -1.0],
        &[1.0, 1.0, 0.0, -1.0],
        &[2.0, 1.0, 1.0, 0.0],
    ]);
    let b = from_rows(&[
        &[0.0, -1.0, 1.0, -1.0],
        &[1.0, 0.0, -2.0, 1.0],
        &[-1.0, 2.0, 0.0, 1.0],
        &[1.0, -1.0, -1.0, 0.0],
    ]);
    assert!(span_equal(&s, &span_of(vec![a, b], &j, Space::Sol), 1e-8));
}

#[test]
fn span_equal_examples() {
    let j = worked_j();
    let s = sol_basis(&j, Involution::T).unwrap();
    assert!(span_equal(&s, &s, 1e-12));
    let scaled: Vec<Mat> = s.elements.iter().map(|x| x.scale(C64::new(7.0, 0.0))).collect();
    assert!(span_equal(&s, &span_of(scaled, &j, Space::Sol), 1e-12));
    let c = cosol_basis(&j, Involution::T).unwrap();
    assert!(!span_equal(&s, &c, 1e-8));
}

#[test]
fn oracle_small_cases() {
    let id = Mat::identity(2, Field::Real);
    assert_eq!(oracle_basis(&id, Involution::T, Space::Sol, 1e-9).unwrap().dim(), 1);
    let z = Mat::zeros(2, 2, Field::Real);
    assert_eq!(oracle_basis(&z, Involution::T, Space::Sol, 1e-9).unwrap().dim(), 4);
}
