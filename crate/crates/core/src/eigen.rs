//! Cosquares, Jordan structure by rank sequences, Jordan chains and centralizers.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, bid, jordan_block, null_cm_fixed, orth_cm, realify_cm};
use crate::mat::{frob, CMat, Field, Involution, Mat, C64, ZERO};
use crate::options::Tolerances;
use crate::spectrum::{self, representative};

/// One eigenvalue with its Jordan block sizes in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenEntry {
    pub eigenvalue: C64,
    pub blocks: Vec<usize>,
}

/// Eigenvalues grouped by `λ ~ 1/λ` (T) or `λ ~ 1/λ̄` (H), plus conjugation for real input.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingClass {
    /// Indices into [`JordanSpec::entries`].
    pub members: Vec<usize>,
    /// Index of the canonical representative.
    pub representative: usize,
}

/// Jordan structure of a cosquare together with its pairing classes.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanSpec {
    pub field: Field,
    pub involution: Involution,
    pub entries: Vec<EigenEntry>,
    /// For each entry, the entry holding its reciprocal partner.
    pub partner: Vec<usize>,
    pub classes: Vec<PairingClass>,
}

impl JordanSpec {
    pub fn n(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.blocks.iter().sum::<usize>())
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let pair = |z: C64| json!([z.re, z.im]);
        json!({
            "eigenvalues": self.entries.iter().map(|e| json!({
                "eigenvalue": pair(e.eigenvalue),
                "blocks": e.blocks,
            })).collect::<Vec<_>>(),
            "pairing": self.classes.iter().map(|c| json!({
                "members": c.members.iter().map(|&i| pair(self.entries[i].eigenvalue)).collect::<Vec<_>>(),
                "representative": pair(self.entries[c.representative].eigenvalue),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Jordan chains for one block: `C·W = W·J_r^λ` and `C⁻¹·U = U·J_r^μ` with
/// `μ = λ` (T) or `μ = λ̄` (H). Realified chains have `2r` columns.
#[derive(Clone, Debug)]
pub struct ChainSet {
    pub entry: usize,
    pub block: usize,
    pub eigenvalue: C64,
    pub size: usize,
    pub w: Mat,
    pub u: Mat,
    pub realified: bool,
    pub involution: Involution,
}

/// `J^{-T}J` (T) or `J^{-H}J` (H), with the default `n·ε` singularity threshold.
pub fn cosquare(j: &Mat, inv: Involution) -> Result<Mat> {
    cosquare_with_tol(j, inv, linalg::default_tol(j.rows()))
}

pub fn cosquare_with_tol(j: &Mat, inv: Involution, tol: f64) -> Result<Mat> {
    if !j.is_square() {
        return Err(Error::domain("cosquare needs a square matrix"));
    }
    let inv = inv.effective(j.field());
    let js = j.star(inv);
    let sv = linalg::singular_values(j.cm());
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= tol * smax {
        return Err(Error::SingularInput(format!(
            "J is numerically singular (σ_min/σ_max = {:.3e}); use the pencil path",
            if smax == 0.0 { 0.0 } else { smin / smax }
        )));
    }
    let c = js
        .cm()
        .clone()
        .lu()
        .solve(j.cm())
        .ok_or_else(|| Error::SingularInput("LU solve failed".into()))?;
    Ok(Mat::new(c, j.field()))
}

/// Expected nullity of `(A − λI)^k` for blocks of the given sizes.
fn nullity(sizes: &[usize], k: usize) -> usize {
    sizes.iter().map(|&s| s.min(k)).sum()
}

/// Jordan block sizes at `lambda` from the rank sequence of `(A − λI)^k`.
pub(crate) fn block_sizes(a: &CMat, lambda: C64, mult: usize, tol: f64) -> Result<Vec<usize>> {
    let n = a.nrows();
    let shifted = a - CMat::identity(n, n) * lambda;
    // Rank cuts are absolute in the scale of `a`, so a shift that is nearly zero is not rescaled.
    let scale = linalg::singular_values(a).first().copied().unwrap_or(0.0) + lambda.norm();
    let mut power = CMat::identity(n, n);
    let mut d = vec![0usize];
    for k in 1..=mult {
        power = &power * &shifted;
        let cut = tol * scale.powi(k as i32);
        let dk = n - linalg::rank_above(&power, cut);
        if dk < d[k - 1] {
            return Err(Error::structure(
                "jordan-ranks",
                tol,
                format!("nullity sequence decreased at λ = {lambda}"),
            ));
        }
        d.push(dk);
        if dk >= mult {
            break;
        }
    }
    let last = *d.last().expect("nonempty");
    if last != mult {
        return Err(Error::structure(
            "jordan-ranks",
            tol,
            format!("λ = {lambda}: nullity {last} does not reach multiplicity {mult}"),
        ));
    }
    // at_least[k] = number of blocks of size ≥ k
    let at_least: Vec<usize> = (1..d.len()).map(|k| d[k] - d[k - 1]).collect();
    let mut sizes = Vec::new();
    for k in (1..=at_least.len()).rev() {
        let here = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        if at_least.get(k).copied().unwrap_or(0) > at_least[k - 1] {
            return Err(Error::structure(
                "jordan-ranks",
                tol,
                format!("inconsistent Weyr characteristic at λ = {lambda}"),
            ));
        }
        sizes.extend(std::iter::repeat(k).take(here));
    }
    Ok(sizes)
}

/// Jordan structure of a (cosquare) matrix with pairing classes for the involution.
pub fn jordan_structure(c: &Mat, inv: Involution, tol: &Tolerances) -> Result<JordanSpec> {
    if !c.is_square() {
        return Err(Error::domain("jordan_structure needs a square matrix"));
    }
    let inv = inv.effective(c.field());
    let raw = linalg::eigenvalues(c.cm())?;
    let spec = spectrum::analyze(&raw, inv, c.field(), tol.cluster)?;
    let mut entries = Vec::with_capacity(spec.values.len());
    for (k, &lambda) in spec.values.iter().enumerate() {
        let blocks = block_sizes(c.cm(), lambda, spec.mult[k], tol.rank)?;
        entries.push(EigenEntry {
            eigenvalue: lambda,
            blocks,
        });
    }
    for (k, e) in entries.iter().enumerate() {
        if e.blocks != entries[spec.partner[k]].blocks {
            return Err(Error::structure(
                "pairing",
                tol.rank,
                format!(
                    "blocks at {} differ from blocks at its partner",
                    e.eigenvalue
                ),
            ));
        }
    }
    let classes = spec
        .classes
        .iter()
        .map(|members| PairingClass {
            members: members.clone(),
            representative: representative(&spec.values, members),
        })
        .collect();
    Ok(JordanSpec {
        field: c.field(),
        involution: inv,
        entries,
        partner: spec.partner,
        classes,
    })
}

/// Chains of `a` at `lambda` for blocks of the given sizes (descending), built top-down
/// from nested kernels of `(a − λI)^k`. Each returned matrix has columns `w_1..w_r`
/// with `(a − λI)w_1 = 0` and `(a − λI)w_j = w_{j−1}`.
pub(crate) fn chains_at(a: &CMat, lambda: C64, sizes: &[usize], tol: f64) -> Result<Vec<CMat>> {
    let n = a.nrows();
    let shifted = a - CMat::identity(n, n) * lambda;
    let top = sizes.iter().copied().max().unwrap_or(0);
    let mut kernels: Vec<CMat> = vec![CMat::zeros(n, 0)];
    // Kernel exactness is measured against the scale of `a`, as in `block_sizes`.
    let scale = linalg::singular_values(a).first().copied().unwrap_or(0.0) + lambda.norm();
    let mut power = CMat::identity(n, n);
    for k in 1..=top {
        power = &power * &shifted;
        let (ker, inner, _) = null_cm_fixed(&power, nullity(sizes, k));
        let pmax = linalg::singular_values(&power).first().copied().unwrap_or(0.0);
        let inner = inner * pmax / scale.powi(k as i32).max(f64::MIN_POSITIVE);
        if inner > tol.sqrt() {
            return Err(Error::structure(
                "chain-extension",
                tol,
                format!("kernel of (C − λI)^{k} at λ = {lambda} is not numerically exact (σ = {inner:.2e})"),
            ));
        }
        kernels.push(ker);
    }
    let mut heads: Vec<(usize, usize, CMat)> = Vec::new(); // (size, position in sizes, head)
    for level in (1..=top).rev() {
        let slots: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] == level).collect();
        if slots.is_empty() {
            continue;
        }
        let mut span = kernels[level - 1].clone();
        for (size, _, v) in &heads {
            let mut img = v.clone();
            for _ in 0..(size - level) {
                img = &shifted * img;
            }
            let last = span.ncols();
            span = span.insert_columns(last, 1, ZERO);
            span.set_column(last, &img.column(0));
        }
        let span = orth_cm(&span, 1e-10);
        let ker = &kernels[level];
        let proj = span.adjoint() * ker;
        let (y, _, _) = null_cm_fixed(&proj, slots.len());
        let fresh = ker * y;
        for (idx, &slot) in slots.iter().enumerate() {
            heads.push((level, slot, fresh.columns(idx, 1).into_owned()));
        }
    }
    let mut out: Vec<Option<CMat>> = vec![None; sizes.len()];
    for (size, slot, head) in heads {
        let mut cols = vec![head];
        for _ in 1..size {
            let next = &shifted * cols.last().expect("nonempty");
            cols.push(next);
        }
        cols.reverse();
        let mut w = CMat::zeros(n, size);
        for (j, col) in cols.iter().enumerate() {
            w.set_column(j, &col.column(0));
        }
        out[slot] = Some(w);
    }
    Ok(out
        .into_iter()
        .map(|w| w.expect("every slot filled"))
        .collect())
}

/// Relative chain residual `‖A·W − W·B‖ / (‖A‖·‖W‖)`.
pub(crate) fn chain_residual(a: &CMat, w: &CMat, b: &CMat) -> f64 {
    let denom = frob(a) * frob(w);
    if denom == 0.0 {
        0.0
    } else {
        frob(&(a * w - w * b)) / denom
    }
}

/// Jordan chains of `C` (and of `C⁻¹` for the `U` matrices) for every block of `spec`.
pub fn jordan_chains(c: &Mat, spec: &JordanSpec, inv: Involution) -> Result<Vec<ChainSet>> {
    jordan_chains_with(c, spec, inv, &Tolerances::default())
}

pub fn jordan_chains_with(
    c: &Mat,
    spec: &JordanSpec,
    inv: Involution,
    tol: &Tolerances,
) -> Result<Vec<ChainSet>> {
    let inv = inv.effective(c.field());
    let n = c.rows();
    let cinv = linalg::inverse(c.cm(), linalg::default_tol(n))
        .ok_or_else(|| Error::SingularInput("cosquare is singular".into()))?;
    let mut out = Vec::new();
    for (e, entry) in spec.entries.iter().enumerate() {
        let lambda = entry.eigenvalue;
        let mu = inv.apply_scalar(lambda);
        let ws = chains_at(c.cm(), lambda, &entry.blocks, tol.rank)?;
        let us = chains_at(&cinv, mu, &entry.blocks, tol.rank)?;
        let realified = c.field() == Field::Real && lambda.im != 0.0;
        for (b, (w, u)) in ws.into_iter().zip(us).enumerate() {
            let r = entry.blocks[b];
            let res_w = chain_residual(c.cm(), &w, &jordan_block(lambda, r));
            let res_u = chain_residual(&cinv, &u, &jordan_block(mu, r));
            if res_w.max(res_u) > tol.residual.sqrt() {
                return Err(Error::structure(
                    "chain-extension",
                    tol.rank,
                    format!("chain residual {:.2e} at λ = {lambda}", res_w.max(res_u)),
                ));
            }
            let (w, u) = if realified {
                (realified_chain(&w), realified_chain(&u))
            } else {
                (w, u)
            };
            let field = if c.field() == Field::Real {
                Field::Real
            } else {
                Field::Complex
            };
            out.push(ChainSet {
                entry: e,
                block: b,
                eigenvalue: lambda,
                size: r,
                w: Mat::new(w, field),
                u: Mat::new(u, field),
                realified,
                involution: inv,
            });
        }
    }
    Ok(out)
}

/// `[Re W, Im W]`, which satisfies `C·[Re W, Im W] = [Re W, Im W]·realify(J)` for real `C`.
pub(crate) fn realified_chain(w: &CMat) -> CMat {
    let (n, r) = w.shape();
    CMat::from_fn(n, 2 * r, |i, j| {
        if j < r {
            C64::new(w[(i, j)].re, 0.0)
        } else {
            C64::new(w[(i, j - r)].im, 0.0)
        }
    })
}

/// Realified Jordan block, the right factor for realified chains.
pub fn realified_jordan(lambda: C64, r: usize) -> CMat {
    realify_cm(&jordan_block(lambda, r))
}

/// `[[0, E], [E, 0]]`, i.e. `E_2 ⊗ E`.
pub(crate) fn swap_kron(e: &CMat) -> CMat {
    let (a, b) = e.shape();
    let mut m = CMat::zeros(2 * a, 2 * b);
    m.view_mut((0, b), (a, b)).copy_from(e);
    m.view_mut((a, 0), (a, b)).copy_from(e);
    m
}

/// `[[E, 0], [0, −E]]`, i.e. `diag(1, −1) ⊗ E`.
fn diag_kron(e: &CMat) -> CMat {
    let (a, b) = e.shape();
    let mut m = CMat::zeros(2 * a, 2 * b);
    m.view_mut((0, 0), (a, b)).copy_from(e);
    m.view_mut((a, b), (a, b)).copy_from(&(-e));
    m
}

/// Spanning set of the centralizer `{Z : ZC = CZ}` from chains of `C` (`chains`)
/// and of `Cᵀ` (`chains_t`): all `W_s·E_k·P_tᵀ` per eigenvalue.
///
/// For real `C` with non-real eigenvalues the chains are realified and both
/// `E_2 ⊗ E_k` and `diag(1, −1) ⊗ E_k` are used, giving a real spanning set.
pub fn centralizer_basis(
    c: &Mat,
    spec: &JordanSpec,
    chains: &[ChainSet],
    chains_t: &[ChainSet],
) -> Result<Vec<Mat>> {
    let field = c.field();
    let mut out = Vec::new();
    for (e, entry) in spec.entries.iter().enumerate() {
        if field == Field::Real && entry.eigenvalue.im < 0.0 {
            continue;
        }
        let ws: Vec<&ChainSet> = chains.iter().filter(|ch| ch.entry == e).collect();
        let ps: Vec<&ChainSet> = chains_t.iter().filter(|ch| ch.entry == e).collect();
        if ws.len() != entry.blocks.len() || ps.len() != entry.blocks.len() {
            return Err(Error::domain("chain sets do not match the Jordan spec"));
        }
        for w in &ws {
            for p in &ps {
                for k in 1..=w.size.min(p.size) {
                    let ek = bid(k, w.size, p.size);
                    let mids: Vec<CMat> = if w.realified {
                        vec![swap_kron(&ek), diag_kron(&ek)]
                    } else {
                        vec![ek]
                    };
                    for mid in mids {
                        let z = w.w.cm() * mid * p.w.cm().transpose();
                        out.push(Mat::new(z, field));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Centralizer spanning set computed from scratch (structure, chains of `C` and `Cᵀ`).
pub fn centralizer_of(c: &Mat, tol: &Tolerances) -> Result<Vec<Mat>> {
    let spec = jordan_structure(c, Involution::T, tol)?;
    let chains = jordan_chains_with(c, &spec, Involution::T, tol)?;
    let ct = c.transpose();
    let chains_t = jordan_chains_with(&ct, &spec, Involution::T, tol)?;
    centralizer_basis(c, &spec, &chains, &chains_t)
}

/// `Σ r_j + Σ_{j<k, λ_j = λ_k} 2·min(r_j, r_k)`.
pub fn centralizer_dimension(spec: &JordanSpec) -> usize {
    spec.entries
        .iter()
        .map(|e| {
            let own: usize = e.blocks.iter().sum();
            let mut cross = 0;
            for a in 0..e.blocks.len() {
                for b in (a + 1)..e.blocks.len() {
                    cross += 2 * e.blocks[a].min(e.blocks[b]);
                }
            }
            own + cross
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutation_operator, null_cm};

    fn worked_j() -> Mat {
        Mat::from_rows(&[
            vec![5.0, 6.0, -9.0, -9.0],
            vec![1.0, 0.0, -1.0, 1.0],
            vec![-3.0, -6.0, 7.0, 7.0],
            vec![-6.0, 2.0, 2.0, 0.0],
        ])
    }

    #[test]
    fn cosquare_examples() {
        let c = cosquare(&Mat::identity(3, Field::Real), Involution::T).unwrap();
        assert_eq!(c, Mat::identity(3, Field::Real));
        let omega = Mat::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
        let c = cosquare(&omega, Involution::T).unwrap();
        assert!(frob(&(c.cm() + CMat::identity(2, 2))) < 1e-15);
        let c = cosquare(&worked_j(), Involution::T).unwrap();
        let expect = Mat::from_rows(&[
            vec![0.0, 2.0, 0.0, -3.0],
            vec![-5.0, 8.0, -3.0, -6.0],
            vec![-1.0, 2.0, 1.0, -3.0],
            vec![-2.0, 0.0, 2.0, 1.0],
        ])
        .scale(C64::new(0.5, 0.0));
        assert!((&c - &expect).norm() < 1e-12);
        assert!(matches!(
            cosquare(&Mat::zeros(2, 2, Field::Real), Involution::T),
            Err(Error::SingularInput(_))
        ));
    }

    #[test]
    fn structure_of_identity_and_worked_example() {
        let tol = Tolerances::default();
        let s = jordan_structure(&Mat::identity(4, Field::Real), Involution::T, &tol).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].blocks, vec![1, 1, 1, 1]);
        assert_eq!(s.classes.len(), 1);

        let c = cosquare(&worked_j(), Involution::T).unwrap();
        let s = jordan_structure(&c, Involution::T, &tol).unwrap();
        assert_eq!(s.entries.len(), 2);
        assert!((s.entries[0].eigenvalue - C64::new(0.5, 0.0)).norm() < 1e-8);
        assert!((s.entries[1].eigenvalue - C64::new(2.0, 0.0)).norm() < 1e-8);
        assert_eq!(
            s.entries[0].eigenvalue * s.entries[1].eigenvalue,
            C64::new(1.0, 0.0)
        );
        assert_eq!(s.entries[0].blocks, vec![2]);
        assert_eq!(s.entries[1].blocks, vec![2]);
        assert_eq!(s.classes.len(), 1);
        assert_eq!(s.classes[0].representative, 1);
        assert_eq!(centralizer_dimension(&s), 4);
    }

    #[test]
    fn rotation_gives_conjugate_unit_pair() {
        let (cs, sn) = (0.3f64.cos(), 0.3f64.sin());
        let c = Mat::from_rows(&[vec![cs, sn], vec![-sn, cs]]);
        let s = jordan_structure(&c, Involution::T, &Tolerances::default()).unwrap();
        assert_eq!(s.entries.len(), 2);
        assert!(s
            .entries
            .iter()
            .all(|e| (e.eigenvalue.norm() - 1.0).abs() < 1e-14));
        assert_eq!(s.classes.len(), 1);
    }

    #[test]
    fn worked_chain_span_matches() {
        let c = cosquare(&worked_j(), Involution::T).unwrap();
        let s = jordan_structure(&c, Involution::T, &Tolerances::default()).unwrap();
        let chains = jordan_chains(&c, &s, Involution::T).unwrap();
        let w2 = chains
            .iter()
            .find(|ch| (ch.eigenvalue - C64::new(2.0, 0.0)).norm() < 1e-8)
            .unwrap();
        let printed = Mat::from_rows(&[
            vec![6.0, 1.0],
            vec![12.0, 8.0],
            vec![6.0, 1.0],
            vec![0.0, 0.0],
        ]);
        // Eigenvector direction and the chain span agree with the printed chain.
        let e1 = printed.cm().columns(0, 1).into_owned();
        assert!(linalg::max_angle_sin(&w2.w.cm().columns(0, 1).into_owned(), &e1, 1e-12) < 1e-8);
        assert!(linalg::max_angle_sin(w2.w.cm(), printed.cm(), 1e-12) < 1e-8);
        let printed_residual =
            chain_residual(c.cm(), printed.cm(), &jordan_block(C64::new(2.0, 0.0), 2));
        assert!(printed_residual < 1e-14);
    }

    #[test]
    fn centralizer_of_nilpotent_pair() {
        let mut c = CMat::zeros(5, 5);
        c[(0, 1)] = C64::new(1.0, 0.0);
        c[(2, 3)] = C64::new(1.0, 0.0);
        c[(3, 4)] = C64::new(1.0, 0.0);
        let c = Mat::new(c, Field::Real);
        let blocks = block_sizes(c.cm(), ZERO, 5, 1e-9).unwrap();
        assert_eq!(blocks, vec![3, 2]);
        let ch = chains_at(c.cm(), ZERO, &blocks, 1e-9).unwrap();
        let cht = chains_at(&c.cm().transpose(), ZERO, &blocks, 1e-9).unwrap();
        let mut zs = Vec::new();
        for w in &ch {
            for p in &cht {
                for k in 1..=w.ncols().min(p.ncols()) {
                    zs.push(w * bid(k, w.ncols(), p.ncols()) * p.transpose());
                }
            }
        }
        assert_eq!(zs.len(), 9);
        let nullity = null_cm(&commutation_operator(c.cm()), 1e-10).ncols();
        assert_eq!(nullity, 9);
        for z in &zs {
            assert!(linalg::commutator_residual(z, c.cm()) < 1e-12);
        }
    }
}
