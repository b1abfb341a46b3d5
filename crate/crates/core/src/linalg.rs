//! Combinatorial matrices, the realify map, and rank/nullspace primitives.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::mat::{frob, CMat, Field, Involution, Mat, C64, ONE, ZERO};

/// Default relative tolerance `n·ε` for an operator with `n` columns.
pub fn default_tol(cols: usize) -> f64 {
    (cols.max(1) as f64) * f64::EPSILON
}

/// `s×t` matrix whose upper-left `j×j` corner is the backward identity.
pub fn backwards_identity(j: usize, s: usize, t: usize) -> Result<Mat> {
    if j == 0 || j > s.min(t) {
        return Err(Error::domain(format!(
            "backwards_identity needs 1 <= j <= min(s, t); got j={j}, s={s}, t={t}"
        )));
    }
    Ok(Mat::new(bid(j, s, t), Field::Real))
}

/// Unchecked `s×t` matrix with ones at 0-based `(a, b)` where `a + b = k - 1`.
/// For `k <= min(s, t)` this is the upper-left backward identity.
pub fn bid(k: usize, s: usize, t: usize) -> CMat {
    CMat::from_fn(s, t, |a, b| if a + b + 1 == k { ONE } else { ZERO })
}

/// Jordan block `J_m^λ` (λ on the diagonal, ones on the superdiagonal).
pub fn jordan_block(lambda: C64, m: usize) -> CMat {
    CMat::from_fn(m, m, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            ONE
        } else {
            ZERO
        }
    })
}

/// The map `A ↦ [[Re A, Im A], [−Im A, Re A]]`.
pub fn realify(a: &Mat) -> Mat {
    Mat::new(realify_cm(a.cm()), Field::Real)
}

pub(crate) fn realify_cm(a: &CMat) -> CMat {
    let (n, m) = a.shape();
    CMat::from_fn(2 * n, 2 * m, |i, j| {
        let z = a[(i % n, j % m)];
        let v = match (i < n, j < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => z.im,
            (false, true) => -z.im,
        };
        C64::new(v, 0.0)
    })
}

fn is_real(a: &CMat) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

fn faer_real(a: &CMat) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re)
}

fn faer_complex(a: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Singular values (descending) and the full right singular basis `V` (columns).
/// Real input stays in real arithmetic so the basis is real.
fn svd_full(a: &CMat) -> (Vec<f64>, CMat) {
    let c = a.ncols();
    if c == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    // Rows past min(r, c) report zero singular values.
    let mut sv = vec![0.0; c];
    let v = if is_real(a) {
        let svd = faer_real(a).svd().expect("SVD converges");
        for (k, s) in svd.S().column_vector().iter().enumerate() {
            sv[k] = *s;
        }
        let v = svd.V();
        CMat::from_fn(c, c, |i, j| C64::new(v[(i, j)], 0.0))
    } else {
        let svd = faer_complex(a).svd().expect("SVD converges");
        for (k, s) in svd.S().column_vector().iter().enumerate() {
            sv[k] = s.re;
        }
        let v = svd.V();
        CMat::from_fn(c, c, |i, j| v[(i, j)])
    };
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let sorted = order.iter().map(|&i| sv[i]).collect();
    (sorted, CMat::from_fn(c, c, |i, j| v[(i, order[j])]))
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = if is_real(a) {
        faer_real(a).singular_values().expect("SVD converges")
    } else {
        faer_complex(a).singular_values().expect("SVD converges")
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Orthonormal basis (as columns) of `{v : ‖Av‖ ≤ tol·‖A‖₂·‖v‖}`.
pub fn null_cm(a: &CMat, tol: f64) -> CMat {
    let c = a.ncols();
    if c == 0 {
        return CMat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return CMat::identity(c, c);
    }
    let (sv, v) = svd_full(a);
    let smax = sv[0];
    let keep = sv.iter().filter(|&&s| s > tol * smax).count();
    v.columns(keep, c - keep).into_owned()
}

/// The `d` right singular vectors with the smallest singular values, plus the
/// singular values at the cut: (largest discarded-from-null, smallest kept-in-range) relative to σ_max.
pub fn null_cm_fixed(a: &CMat, d: usize) -> (CMat, f64, f64) {
    let c = a.ncols();
    if a.nrows() == 0 {
        return (
            CMat::identity(c, c).columns(0, d).into_owned(),
            0.0,
            f64::INFINITY,
        );
    }
    let (sv, v) = svd_full(a);
    let smax = sv[0].max(f64::MIN_POSITIVE);
    let inner = if d > 0 { sv[c - d] / smax } else { 0.0 };
    let outer = if d < c {
        sv[c - d - 1] / smax
    } else {
        f64::INFINITY
    };
    (v.columns(c - d, d).into_owned(), inner, outer)
}

/// Orthonormal nullspace basis as a list of column vectors.
pub fn nullspace(a: &Mat, tol: f64) -> Result<Vec<Mat>> {
    if !(tol > 0.0) {
        return Err(Error::domain("nullspace tolerance must be positive"));
    }
    let field = if is_real(a.cm()) {
        Field::Real
    } else {
        Field::Complex
    };
    let n = null_cm(a.cm(), tol);
    Ok((0..n.ncols())
        .map(|j| Mat::new(n.columns(j, 1).into_owned(), field))
        .collect())
}

/// Numerical rank at relative tolerance `tol`.
pub fn rank(a: &CMat, tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        None => 0,
        Some(&smax) => sv.iter().filter(|&&s| s > tol * smax && s > 0.0).count(),
    }
}

/// Number of singular values above the absolute level `cut`.
pub(crate) fn rank_above(a: &CMat, cut: f64) -> usize {
    singular_values(a)
        .iter()
        .filter(|&&s| s > cut && s > 0.0)
        .count()
}

/// Orthonormal basis (columns) of the range of `a`, at relative tolerance `tol`.
pub fn orth_cm(a: &CMat, tol: f64) -> CMat {
    let smax = singular_values(a).first().copied().unwrap_or(0.0);
    orth_above(a, tol * smax)
}

/// Orthonormal basis (columns) of the left singular vectors with singular value above `cut`.
pub(crate) fn orth_above(a: &CMat, cut: f64) -> CMat {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return CMat::zeros(r, 0);
    }
    let (u, sv): (CMat, Vec<f64>) = if is_real(a) {
        let svd = faer_real(a).thin_svd().expect("SVD converges");
        let u = svd.U();
        (
            CMat::from_fn(r, u.ncols(), |i, j| C64::new(u[(i, j)], 0.0)),
            svd.S().column_vector().iter().copied().collect(),
        )
    } else {
        let svd = faer_complex(a).thin_svd().expect("SVD converges");
        let u = svd.U();
        (
            CMat::from_fn(r, u.ncols(), |i, j| u[(i, j)]),
            svd.S().column_vector().iter().map(|s| s.re).collect(),
        )
    };
    let cols: Vec<usize> = (0..sv.len())
        .filter(|&i| sv[i] > cut && sv[i] > 0.0)
        .collect();
    CMat::from_fn(r, cols.len(), |i, j| u[(i, cols[j])])
}

/// Orthonormal basis of the orthogonal complement of the range of `a` (which has `n` rows).
pub fn complement_cm(a: &CMat, tol: f64) -> CMat {
    if a.ncols() == 0 {
        return CMat::identity(a.nrows(), a.nrows());
    }
    null_cm(&a.adjoint(), tol)
}

/// Inverse via LU; `None` when numerically singular at relative tolerance `tol`.
pub fn inverse(a: &CMat, tol: f64) -> Option<CMat> {
    let sv = singular_values(a);
    let smax = *sv.first()?;
    let smin = *sv.last()?;
    if smax == 0.0 || smin <= tol * smax {
        return None;
    }
    a.clone().try_inverse()
}

/// Eigenvalues of a square matrix. Real input uses the real Schur form, so
/// non-real eigenvalues come in exact conjugate pairs.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let fail = |_| {
        Error::structure(
            "eigenvalues",
            f64::EPSILON,
            "eigenvalue iteration did not converge",
        )
    };
    if is_real(a) {
        faer_real(a).eigenvalues().map_err(fail)
    } else {
        faer_complex(a).eigenvalues().map_err(fail)
    }
}

/// Sine of the largest principal angle between the column spans of `a` and `b`.
/// Both spans are orthonormalized first; spans of different dimension give 1.
pub fn max_angle_sin(a: &CMat, b: &CMat, tol: f64) -> f64 {
    let qa = orth_cm(a, tol);
    let qb = orth_cm(b, tol);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let resid = &qb - &qa * (qa.adjoint() * &qb);
    let resid2 = &qa - &qb * (qb.adjoint() * &qa);
    let s1 = singular_values(&resid).first().copied().unwrap_or(0.0);
    let s2 = singular_values(&resid2).first().copied().unwrap_or(0.0);
    s1.max(s2).min(1.0)
}

/// How the entries of an `n×n` matrix are laid out as coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    /// `n²` complex coordinates (column-major); complex-linear spaces.
    Complex,
    /// `n²` real coordinates (column-major).
    Real,
    /// `2n²` real coordinates `[Re vec; Im vec]`; real-linear spaces of complex matrices.
    RealPairs,
}

impl Coords {
    pub fn for_problem(field: Field, inv: Involution) -> Coords {
        match (field, inv) {
            (Field::Real, _) => Coords::Real,
            (Field::Complex, Involution::T) => Coords::Complex,
            (Field::Complex, Involution::H) => Coords::RealPairs,
        }
    }

    pub fn len(self, n: usize) -> usize {
        match self {
            Coords::Complex | Coords::Real => n * n,
            Coords::RealPairs => 2 * n * n,
        }
    }

    /// Whether spans in these coordinates are complex-linear.
    pub fn complex_linear(self) -> bool {
        self == Coords::Complex
    }
}

/// Coordinates of a square matrix.
pub fn to_coords(x: &CMat, coords: Coords) -> DVector<C64> {
    let n2 = x.len();
    match coords {
        Coords::Complex => DVector::from_iterator(n2, x.iter().copied()),
        Coords::Real => DVector::from_iterator(n2, x.iter().map(|z| C64::new(z.re, 0.0))),
        Coords::RealPairs => DVector::from_iterator(
            2 * n2,
            x.iter()
                .map(|z| C64::new(z.re, 0.0))
                .chain(x.iter().map(|z| C64::new(z.im, 0.0))),
        ),
    }
}

/// Inverse of [`to_coords`] for an `n×n` matrix.
pub fn from_coords(v: &DVector<C64>, n: usize, coords: Coords) -> CMat {
    let n2 = n * n;
    match coords {
        Coords::Complex => CMat::from_iterator(n, n, v.iter().copied()),
        Coords::Real => CMat::from_iterator(n, n, v.iter().map(|z| C64::new(z.re, 0.0))),
        Coords::RealPairs => {
            CMat::from_fn(n, n, |i, j| C64::new(v[i + j * n].re, v[n2 + i + j * n].re))
        }
    }
}

/// Matrix of `X ↦ X*J + sign·JX` acting on the coordinates of `X`.
///
/// Real `J` uses `n²` real coordinates (and `H` reduces to `T`); complex `J` under `T`
/// uses `n²` complex coordinates; complex `J` under `H` uses `2n²` real coordinates.
pub fn vec_operator(j: &Mat, inv: Involution, sign: f64) -> Result<Mat> {
    if !j.is_square() {
        return Err(Error::domain("vec_operator needs a square J"));
    }
    let inv = inv.effective(j.field());
    let coords = Coords::for_problem(j.field(), inv);
    let op = linear_operator(j.cm(), inv, sign, coords);
    let field = if coords == Coords::Complex {
        Field::Complex
    } else {
        Field::Real
    };
    Ok(Mat::new(op, field))
}

pub(crate) fn linear_operator(j: &CMat, inv: Involution, sign: f64, coords: Coords) -> CMat {
    let n = j.nrows();
    let dim = coords.len(n);
    let mut op = CMat::zeros(dim, dim);
    for col in 0..dim {
        let mut e = DVector::<C64>::zeros(dim);
        e[col] = ONE;
        let x = from_coords(&e, n, coords);
        let xs = match inv {
            Involution::T => x.transpose(),
            Involution::H => x.adjoint(),
        };
        let img = &xs * j + (j * &x) * C64::new(sign, 0.0);
        op.set_column(col, &to_coords(&img, coords));
    }
    op
}

/// Matrix of `Z ↦ ZC − CZ` on `n²` complex coordinates.
pub fn commutation_operator(c: &CMat) -> CMat {
    let n = c.nrows();
    let mut op = CMat::zeros(n * n, n * n);
    for col in 0..n * n {
        let mut e = DVector::<C64>::zeros(n * n);
        e[col] = ONE;
        let z = from_coords(&e, n, Coords::Complex);
        let img = &z * c - c * &z;
        op.set_column(col, &to_coords(&img, Coords::Complex));
    }
    op
}

/// Relative residual `‖AB − BA‖ / (‖A‖‖B‖)`, zero when either is zero.
pub fn commutator_residual(a: &CMat, b: &CMat) -> f64 {
    let denom = frob(a) * frob(b);
    if denom == 0.0 {
        0.0
    } else {
        frob(&(a * b - b * a)) / denom
    }
}

/// Greedy rank reduction: keeps each vector whose component orthogonal to the
/// kept ones exceeds `tol` times its norm. Returns the kept indices.
pub fn independent_subset(vectors: &[DVector<C64>], tol: f64) -> Vec<usize> {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let mut kept = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let rn = r.norm();
        if rn > tol * norm {
            basis.push(r / C64::new(rn, 0.0));
            kept.push(idx);
        }
    }
    kept
}

/// Extends `kept` by column pivoting: repeatedly adds the vector with the largest
/// relative residual against the current span until `limit` or the residual drops to `tol`.
pub fn extend_pivoted(vectors: &[DVector<C64>], kept: &[usize], tol: f64, limit: usize) -> Vec<usize> {
    let mut out = kept.to_vec();
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let project = |basis: &[DVector<C64>], v: &DVector<C64>| {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in basis {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        r
    };
    for &i in kept {
        let r = project(&basis, &vectors[i]);
        let rn = r.norm();
        if rn > 0.0 {
            basis.push(r / C64::new(rn, 0.0));
        }
    }
    let norms: Vec<f64> = vectors.iter().map(|v| v.norm()).collect();
    let mut resid: Vec<Option<DVector<C64>>> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (norms[i] > 0.0 && !out.contains(&i)).then(|| project(&basis, v)))
        .collect();
    while out.len() < limit {
        let best = resid
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|r| (i, r.norm() / norms[i])))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, rel)) = best else { break };
        if rel <= tol {
            break;
        }
        let r = resid[i].take().expect("present");
        let q = r.clone() / C64::new(r.norm(), 0.0);
        for other in resid.iter_mut().flatten() {
            let c = q.dotc(other);
            *other -= &q * c;
        }
        basis.push(q);
        out.push(i);
    }
    out
}
