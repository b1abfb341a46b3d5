mod common;

use std::process::ExitCode;
use std::time::Instant;

use autgrp::basis::{basis_from_matrices, element_residual};
use autgrp::eigen::{centralizer_dimension, cosquare, jordan_structure};
use autgrp::group::{
    classify_2x2, exp_map, membership_residual, sample_group, write_samples_csv, Case2x2,
    SampleConfig,
};
use autgrp::pencil::{ef_block_basis, kronecker_structure, CanonicalBlock, KroneckerBlock};
use autgrp::{
    basis_with, cosol_basis, dim_from_structure, oracle_basis, sol_basis, span_equal, Field,
    Involution, Mat, Representative, SolveOptions, Space, Tolerances, C64,
};
use common::{from_rows, random, rank_deficient, rng};
use rand::Rng;

const ANGLE: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn span_of(mats: Vec<Mat>, j: &Mat) -> autgrp::SolutionBasis {
    basis_from_matrices(mats, j, Involution::T, Space::Sol)
}

fn worked_real_pair() -> Outcome {
    let start = Instant::now();
    let j = from_rows(&[
        &[5.0, 6.0, -9.0, -9.0],
        &[1.0, 0.0, -1.0, 1.0],
        &[-3.0, -6.0, 7.0, 7.0],
        &[-6.0, 2.0, 2.0, 0.0],
    ]);
    let spec = kronecker_structure(&j, Involution::T, &Tolerances::default()).unwrap();
    let structure_ok = match spec.blocks.as_slice() {
        [KroneckerBlock::PairedJordan { lambda, p: 2, quad: false }] => {
            (lambda - C64::new(2.0, 0.0)).norm() < 1e-8
        }
        _ => false,
    };
    let s = sol_basis(&j, Involution::T).unwrap();
    let printed = vec![
        from_rows(&[
            &[5.0, -1.0, -3.0, 0.0],
            &[10.0, -2.0, -6.0, 0.0],
            &[5.0, -1.0, -3.0, 0.0],
            &[4.0, 0.0, -4.0, 0.0],
        ])
        .scale(C64::new(24.0, 0.0)),
        from_rows(&[
            &[-23.0, 4.0, 12.0, 6.0],
            &[-46.0, 5.0, 30.0, 12.0],
            &[-26.0, 4.0, 15.0, 6.0],
            &[-16.0, 0.0, 16.0, 3.0],
        ])
        .scale(C64::new(8.0, 0.0)),
    ];
    let spans = span_equal(&s, &span_of(printed, &j), ANGLE);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        structure_ok && s.dim() == 2 && spans && secs < 1.0,
        format!("structure J_2^2 + J_2^(1/2): {structure_ok}, dim {}, span {spans}, {secs:.3}s", s.dim()),
    )
}

fn complex_eigenvalue_example() -> Outcome {
    let j = from_rows(&[
        &[-1.0, 0.0, -3.0, -2.0],
        &[1.0, 0.0, 1.0, 0.0],
        &[-2.0, 2.0, 4.0, -1.0],
        &[0.0, -1.0, -1.0, -2.0],
    ]);
    let s = sol_basis(&j, Involution::T).unwrap();
    let third = C64::new(1.0 / 3.0, 0.0);
    let printed = vec![
        from_rows(&[
            &[13.0, -8.0, -34.0, 14.0],
            &[2.0, -13.0, -62.0, -20.0],
            &[8.0, 8.0, 7.0, 10.0],
            &[-32.0, 16.0, 20.0, -7.0],
        ])
        .scale(third),
        from_rows(&[
            &[-39.0, 9.0, 22.0, -32.0],
            &[-51.0, 39.0, 86.0, -10.0],
            &[-9.0, -9.0, -16.0, 5.0],
            &[36.0, -18.0, 10.0, 16.0],
        ])
        .scale(third),
    ];
    let spans = span_equal(&s, &span_of(printed, &j), ANGLE);
    outcome(s.dim() == 2 && spans, format!("dim {}, span {spans}", s.dim()))
}

fn orthogonal_symplectic_example() -> Outcome {
    let j = from_rows(&[
        &[1.0, 1.0, -1.0, -1.0],
        &[-1.0, 1.0, 0.0, -1.0],
        &[1.0, 0.0, 1.0, -1.0],
        &[1.0, 1.0, 1.0, 1.0],
    ]);
    let s = sol_basis(&j, Involution::T).unwrap();
    let printed = vec![
        from_rows(&[
            &[0.0, 1.0, -1.0, -2.0],
            &[-1.0, 0.0, -1.0, -1.0],
            &[1.0, 1.0, 0.0, -1.0],
            &[2.0, 1.0, 1.0, 0.0],
        ]),
        from_rows(&[
            &[0.0, -1.0, 1.0, -1.0],
            &[1.0, 0.0, -2.0, 1.0],
            &[-1.0, 2.0, 0.0, 1.0],
            &[1.0, -1.0, -1.0, 0.0],
        ]),
    ];
    let spans = span_equal(&s, &span_of(printed, &j), ANGLE);
    let mut r = rng(12);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let mut x = Mat::zeros(4, 4, Field::Real).cm().clone();
        for e in &s.elements {
            x += e.cm() * C64::new(r.random::<f64>() * 4.0 - 2.0, 0.0);
        }
        let g = exp_map(&Mat::new(x, Field::Real)).unwrap();
        worst = worst.max(membership_residual(&g, &j, Involution::T));
    }
    outcome(
        s.dim() == 2 && spans && worst <= 1e-8,
        format!("dim {}, span {spans}, worst exp residual {worst:.2e}", s.dim()),
    )
}

fn two_by_two_table() -> Outcome {
    let table = [
        (from_rows(&[&[1.0, 1.0], &[-1.0, -1.5]]), 1),
        (from_rows(&[&[1.0, 1.0], &[-1.0, 1.0]]), 1),
        (from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]), 1),
        (from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]), 1),
        (from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]), 3),
        (from_rows(&[&[0.0, -1.0], &[1.0, 1.0]]), 1),
        (from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), 1),
        (from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]), 2),
        (from_rows(&[&[0.0, 0.0], &[0.0, 0.0]]), 4),
    ];
    let mut bad = Vec::new();
    for (idx, (j, dim)) in table.iter().enumerate() {
        let c = classify_2x2(j).unwrap();
        let basis_dim = sol_basis(j, Involution::T).unwrap().dim();
        if c.case != Case2x2::ALL[idx] || c.dimension != *dim || basis_dim != *dim {
            bad.push(idx + 1);
        }
    }
    outcome(bad.is_empty(), format!("mismatched cases {bad:?}"))
}

struct Sweep {
    configs: usize,
    span_failures: Vec<String>,
    formula_failures: Vec<String>,
    d_i_printed_form_mismatches: usize,
    errors: Vec<String>,
    secs: f64,
}

fn sweep() -> Sweep {
    let start = Instant::now();
    let mut out = Sweep {
        configs: 0,
        span_failures: Vec::new(),
        formula_failures: Vec::new(),
        d_i_printed_form_mismatches: 0,
        errors: Vec::new(),
        secs: 0.0,
    };
    let tol = Tolerances::default();
    for field in [Field::Real, Field::Complex] {
        for inv in [Involution::T, Involution::H] {
            for deficient in [false, true] {
                out.configs += 1;
                for k in 0..200u64 {
                    let seed = 10_000 + k;
                    let mut r = rng(seed);
                    let n = 2 + (k as usize % 5);
                    let j = if deficient {
                        rank_deficient(n, field, &mut r)
                    } else {
                        random(n, n, field, &mut r)
                    };
                    let label = format!("{field} {inv} deficient={deficient} n={n} seed={seed}");
                    let spec = match kronecker_structure(&j, inv, &tol) {
                        Ok(s) => s,
                        Err(e) => {
                            out.errors.push(format!("{label}: {e}"));
                            continue;
                        }
                    };
                    for space in [Space::Sol, Space::Cosol] {
                        let b = match basis_with(&j, inv, space, &SolveOptions::default()) {
                            Ok(b) => b,
                            Err(e) => {
                                out.errors.push(format!("{label} {space}: {e}"));
                                continue;
                            }
                        };
                        let o = oracle_basis(&j, inv, space, tol.rank).unwrap();
                        if !span_equal(&b, &o, ANGLE) || b.max_residual() > 1e-8 {
                            out.span_failures.push(format!("{label} {space}"));
                        }
                        let report = dim_from_structure(&spec, space).with_oracle(o.dim());
                        if report.agrees != Some(true) {
                            out.formula_failures.push(format!("{label} {space}"));
                        }
                        if let Some(alt) = report.d_i_alternative {
                            let d_i = report.term("D_I").unwrap_or(0);
                            if report.total - d_i + alt != o.dim() {
                                out.d_i_printed_form_mismatches += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    out.secs = start.elapsed().as_secs_f64();
    out
}

fn oracle_equivalence(s: &Sweep) -> Outcome {
    let mut detail = format!(
        "{} configurations x 200, span failures {}, errors {}, {:.1}s",
        s.configs,
        s.span_failures.len(),
        s.errors.len(),
        s.secs
    );
    for f in s.span_failures.iter().chain(&s.errors).take(5) {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(
        s.span_failures.is_empty() && s.errors.is_empty() && s.secs < 120.0,
        detail,
    )
}

fn dimension_formulas(s: &Sweep) -> Outcome {
    let mut detail = format!(
        "formula totals disagreeing with oracle {}; real interaction term in the form a(n - sum s) \
         would disagree on {} instances (reported, not used)",
        s.formula_failures.len(),
        s.d_i_printed_form_mismatches
    );
    for f in s.formula_failures.iter().take(5) {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(
        s.formula_failures.is_empty() && s.span_failures.is_empty() && s.errors.is_empty(),
        detail,
    )
}

fn direct_sum() -> Outcome {
    let mut bad = Vec::new();
    let configs = [
        (Field::Real, Involution::T),
        (Field::Complex, Involution::T),
        (Field::Complex, Involution::H),
        (Field::Real, Involution::H),
    ];
    for k in 0..100u64 {
        let (field, inv) = configs[k as usize % 4];
        let n = 2 + k as usize % 5;
        let j = random(n, n, field, &mut rng(20_000 + k));
        let c = cosquare(&j, inv).unwrap();
        let spec = jordan_structure(&c, inv, &Tolerances::default()).unwrap();
        let factor = if field == Field::Complex && inv == Involution::H { 2 } else { 1 };
        let total = sol_basis(&j, inv).unwrap().dim() + cosol_basis(&j, inv).unwrap().dim();
        if total != factor * centralizer_dimension(&spec) {
            bad.push(k);
        }
    }
    outcome(bad.is_empty(), format!("100 matrices, failures {bad:?}"))
}

fn block_pair_lists() -> Outcome {
    let mut blocks = Vec::new();
    for s in 0..=4 {
        blocks.push(CanonicalBlock::Singular { s });
    }
    for m in 1..=9 {
        for lambda in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-0.6, 1.3)] {
            blocks.push(CanonicalBlock::Jordan { lambda, m });
        }
        blocks.push(CanonicalBlock::Infinite { m });
    }
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut checked = 0;
    for (a, k1) in blocks.iter().enumerate() {
        for k2 in &blocks[a..] {
            let fwd = ef_block_basis(k1, k2).unwrap();
            let bwd = ef_block_basis(k2, k1).unwrap();
            for p in &fwd {
                worst = worst.max(p.residual(k1, k2));
            }
            for p in &bwd {
                worst = worst.max(p.residual(k2, k1));
            }
            let expected = match (*k1, *k2) {
                (CanonicalBlock::Singular { s: s1 }, CanonicalBlock::Singular { s: s2 }) => {
                    let m = 2 * s1.max(s2) + 1;
                    if s1 == s2 {
                        // One block with itself, and two distinct blocks of equal size.
                        if fwd.len() != m + 1 {
                            bad.push(format!("{k1} alone: {}", fwd.len()));
                        }
                        Some(2 * m + 2)
                    } else {
                        Some(2 * m)
                    }
                }
                (CanonicalBlock::Singular { .. }, CanonicalBlock::Jordan { m, .. })
                | (CanonicalBlock::Singular { .. }, CanonicalBlock::Infinite { m }) => Some(2 * m),
                _ => None,
            };
            if let Some(e) = expected {
                checked += 1;
                if fwd.len() + bwd.len() != e {
                    bad.push(format!("({k1}, {k2}): {} vs {e}", fwd.len() + bwd.len()));
                }
            }
        }
    }
    outcome(
        bad.is_empty() && worst <= 1e-12,
        format!("{checked} singular interactions counted, worst residual {worst:.1e}, bad {bad:?}"),
    )
}

fn sampling() -> Outcome {
    let j = random(8, 8, Field::Real, &mut rng(8));
    let cfg = SampleConfig {
        n: 10_000,
        seed: 2024,
        scale: 1.0,
    };
    let start = Instant::now();
    let samples = sample_group(&j, Involution::T, &cfg).unwrap();
    let worst = samples
        .iter()
        .map(|g| membership_residual(g, &j, Involution::T))
        .fold(0.0, f64::max);
    let mut first = Vec::new();
    write_samples_csv(&samples, &mut first).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut second = Vec::new();
    write_samples_csv(&sample_group(&j, Involution::T, &cfg).unwrap(), &mut second).unwrap();
    let same = first == second;
    outcome(
        samples.len() == 10_000 && worst <= 1e-8 && same && secs < 30.0,
        format!("worst residual {worst:.2e}, identical CSV {same}, {secs:.2}s"),
    )
}

fn invariance() -> Outcome {
    let mut bad = Vec::new();
    let configs = [
        (Field::Real, Involution::T),
        (Field::Complex, Involution::T),
        (Field::Complex, Involution::H),
    ];
    for k in 0..50u64 {
        let n = 2 + k as usize % 5;
        for (field, inv) in configs {
            let j = random(n, n, field, &mut rng(30_000 + k));
            for space in [Space::Sol, Space::Cosol] {
                let base = basis_with(&j, inv, space, &SolveOptions::default()).unwrap();
                let rechained = SolveOptions {
                    chain_seed: Some(k + 1),
                    ..Default::default()
                };
                let partner = SolveOptions {
                    representative: Representative::Partner,
                    ..Default::default()
                };
                for (name, opts) in [("chains", rechained), ("representative", partner)] {
                    let other = basis_with(&j, inv, space, &opts).unwrap();
                    let residual = other
                        .elements
                        .iter()
                        .map(|x| element_residual(x, &j, inv, space))
                        .fold(0.0, f64::max);
                    if !span_equal(&base, &other, ANGLE) || residual > 1e-8 {
                        bad.push(format!("{name} {field} {inv} {space} k={k}"));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("50 matrices x 3 settings, failures {bad:?}"))
}

fn main() -> ExitCode {
    let sweep_data = sweep();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("worked real-pair example", worked_real_pair()),
        ("complex-eigenvalue real example", complex_eigenvalue_example()),
        ("orthogonal-symplectic intersection example", orthogonal_symplectic_example()),
        ("2x2 classification table", two_by_two_table()),
        ("oracle equivalence sweep", oracle_equivalence(&sweep_data)),
        ("dimension formulas", dimension_formulas(&sweep_data)),
        ("sol + cosol = centralizer", direct_sum()),
        ("(E, F) block pair lists", block_pair_lists()),
        ("group sampling", sampling()),
        ("chain and representative invariance", invariance()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in criteria.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
