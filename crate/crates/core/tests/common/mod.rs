#![allow(dead_code)]

use autgrp::mat::CMat;
use autgrp::{Field, Mat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry(rng: &mut ChaCha8Rng, field: Field) -> C64 {
    let re = rng.random::<f64>() * 2.0 - 1.0;
    let im = match field {
        Field::Real => 0.0,
        Field::Complex => rng.random::<f64>() * 2.0 - 1.0,
    };
    C64::new(re, im)
}

pub fn random(n: usize, m: usize, field: Field, rng: &mut ChaCha8Rng) -> Mat {
    Mat::new(CMat::from_fn(n, m, |_, _| entry(rng, field)), field)
}

/// Product of random `n×r` and `r×n` factors, `r < n`.
pub fn rank_deficient(n: usize, field: Field, rng: &mut ChaCha8Rng) -> Mat {
    let r = rng.random_range(0..n);
    let a = random(n, r, field, rng);
    let b = random(r, n, field, rng);
    Mat::new(a.cm() * b.cm(), field)
}

/// Small integer matrix with a chosen canonical shape.
fn piece(k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; k]; k];
    match rng.random_range(0..6) {
        0 => (0..k.saturating_sub(1)).for_each(|i| m[i][i + 1] = 1.0),
        1 => (0..k).for_each(|i| m[i][i] = 1.0),
        2 => (0..k).for_each(|i| m[i][k - 1 - i] = 1.0),
        3 => (0..k).for_each(|i| {
            m[i][k - 1 - i] = 1.0;
            if i + 1 < k {
                m[i][k - 2 - i] = 1.0;
            }
        }),
        4 => {}
        _ => (0..k).for_each(|i| {
            m[i][i] = i as f64 - 1.0;
            if i + 1 < k {
                m[i][i + 1] = 2.0;
            }
        }),
    }
    m
}

/// Block-diagonal integer canonical pieces under a random integer congruence `KᵀDK`.
/// Produces repeated eigenvalues, `±1` blocks and singular blocks.
pub fn structured(n_max: usize, rng: &mut ChaCha8Rng) -> Mat {
    let mut blocks = Vec::new();
    let mut n = 0;
    while n < n_max {
        let k = rng.random_range(1..=(n_max - n).min(3));
        blocks.push(piece(k, rng));
        n += k;
        if rng.random_bool(0.3) {
            break;
        }
    }
    let mut d = CMat::zeros(n, n);
    let mut off = 0;
    for b in &blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                d[(off + i, off + j)] = C64::new(x, 0.0);
            }
        }
        off += b.len();
    }
    let k = loop {
        let k = CMat::from_fn(n, n, |_, _| C64::new(rng.random_range(-2..=2) as f64, 0.0));
        let det = k.clone().determinant();
        if det.norm() > 0.5 {
            break k;
        }
    };
    Mat::new(k.transpose() * d * k, Field::Real)
}

pub fn from_rows(rows: &[&[f64]]) -> Mat {
    Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}
