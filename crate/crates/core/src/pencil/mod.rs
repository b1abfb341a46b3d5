//! Kronecker structure of the palindromic pencil `J − λJ*`, reducing chains, the
//! canonical `(E, F)` bases, and solution bases for singular `J`.

mod assemble;
mod chains;
mod ef;

pub use assemble::{singular_basis_with, singular_cosol_basis, singular_sol_basis, z_pairs, ZPair};
pub use chains::{all_reducing_chains, reducing_chains, ReducingChains};
pub use ef::{
    ef_block_basis, ef_dimension, g_matrix, path_reversal, s_matrix, CanonicalBlock, EFPair,
};

use serde_json::{json, Value};

use crate::eigen::{block_sizes, JordanSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, complement_cm, null_cm, orth_cm, rank};
use crate::mat::{frob, CMat, Field, Involution, Mat, C64};
use crate::options::Tolerances;
use crate::spectrum::{self, partner_value, representative};

/// One block of the paired Kronecker structure of `J − λJ*`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KroneckerBlock {
    /// `𝓛_s = L_s ⊕ L_sᵀ`, size `2s + 1`.
    SingularPair { s: usize },
    /// `𝓩_t = J_t^0 ⊕ J_t^∞`, size `2t`.
    ZeroInfPair { t: usize },
    /// A self-paired Jordan block: `±1` (T) or on the unit circle (H).
    Jordan { lambda: C64, m: usize },
    /// A block at `λ` together with its partners: size `2p`, or `4p` for real
    /// input with `λ` off both the real line and the unit circle.
    PairedJordan { lambda: C64, p: usize, quad: bool },
}

impl KroneckerBlock {
    pub fn size(&self) -> usize {
        match *self {
            KroneckerBlock::SingularPair { s } => 2 * s + 1,
            KroneckerBlock::ZeroInfPair { t } => 2 * t,
            KroneckerBlock::Jordan { m, .. } => m,
            KroneckerBlock::PairedJordan { p, quad, .. } => {
                if quad {
                    4 * p
                } else {
                    2 * p
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let pair = |z: C64| json!([z.re, z.im]);
        match *self {
            KroneckerBlock::SingularPair { s } => json!({"kind": "L", "s": s}),
            KroneckerBlock::ZeroInfPair { t } => json!({"kind": "Z", "t": t}),
            KroneckerBlock::Jordan { lambda, m } => {
                json!({"kind": "Jordan", "lambda": pair(lambda), "m": m})
            }
            KroneckerBlock::PairedJordan { lambda, p, quad } => {
                json!({"kind": if quad { "PairedJordanReal" } else { "PairedJordan" }, "lambda": pair(lambda), "p": p})
            }
        }
    }
}

/// Paired Kronecker structure plus its expansion into unpaired canonical blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerSpec {
    pub field: Field,
    pub involution: Involution,
    pub blocks: Vec<KroneckerBlock>,
    /// Unpaired canonical blocks in the order used by the chain matrices.
    pub canonical: Vec<CanonicalBlock>,
    /// For each canonical block, the index of the paired block it belongs to.
    pub owner: Vec<usize>,
}

impl KroneckerSpec {
    pub fn n(&self) -> usize {
        self.blocks.iter().map(KroneckerBlock::size).sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field,
            "involution": self.involution.to_string(),
            "blocks": self.blocks.iter().map(KroneckerBlock::to_json).collect::<Vec<_>>(),
        })
    }

    /// Builds a spec from paired blocks, expanding partners per the involution and field.
    pub fn from_blocks(blocks: Vec<KroneckerBlock>, inv: Involution, field: Field) -> Self {
        let inv = inv.effective(field);
        let mut canonical = Vec::new();
        let mut owner = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            let expanded: Vec<CanonicalBlock> = match *b {
                KroneckerBlock::SingularPair { s } => vec![CanonicalBlock::Singular { s }],
                KroneckerBlock::ZeroInfPair { t } => vec![
                    CanonicalBlock::Jordan {
                        lambda: C64::new(0.0, 0.0),
                        m: t,
                    },
                    CanonicalBlock::Infinite { m: t },
                ],
                KroneckerBlock::Jordan { lambda, m } => vec![CanonicalBlock::Jordan { lambda, m }],
                KroneckerBlock::PairedJordan { lambda, p, quad } => {
                    let mut vals = vec![lambda, partner_value(lambda, inv)];
                    if quad {
                        vals.push(lambda.conj());
                        vals.push(partner_value(lambda.conj(), inv));
                    }
                    vals.into_iter()
                        .map(|l| CanonicalBlock::Jordan { lambda: l, m: p })
                        .collect()
                }
            };
            for c in expanded {
                canonical.push(c);
                owner.push(i);
            }
        }
        KroneckerSpec {
            field,
            involution: inv,
            blocks,
            canonical,
            owner,
        }
    }

    /// Paired structure of `J − λJ*` for nonsingular `J` from the cosquare's Jordan structure.
    pub fn from_jordan(spec: &JordanSpec) -> Self {
        let mut blocks = Vec::new();
        for class in &spec.classes {
            let rep = class.representative;
            let lambda = spec.entries[rep].eigenvalue;
            let self_paired = class.members.len() == 1;
            let quad = class.members.len() == 4;
            for &m in &spec.entries[rep].blocks {
                if self_paired {
                    blocks.push(KroneckerBlock::Jordan { lambda, m });
                } else {
                    blocks.push(KroneckerBlock::PairedJordan { lambda, p: m, quad });
                }
            }
        }
        KroneckerSpec::from_blocks(blocks, spec.involution, spec.field)
    }
}

/// Block matrix `M_d` whose nullspace holds the coefficients of polynomial right
/// null vectors of `A − λB` of degree at most `d`.
fn stacked(a: &CMat, b: &CMat, d: usize) -> CMat {
    let (m, n) = a.shape();
    let mut md = CMat::zeros((d + 2) * m, (d + 1) * n);
    for k in 0..=d {
        md.view_mut((k * m, k * n), (m, n)).copy_from(a);
        md.view_mut(((k + 1) * m, k * n), (m, n)).copy_from(&(-b));
    }
    md
}

const PROBES: [C64; 3] = [
    C64::new(0.723_606_797_749_979, 0.414_213_562_373_095),
    C64::new(-1.324_717_957_244_746, 0.577_215_664_901_533),
    C64::new(0.302_775_637_731_995, -1.618_033_988_749_895),
];

/// Right minimal indices of `A − λB` and an orthonormal basis of the minimal right reducing subspace.
fn right_minimal(a: &CMat, b: &CMat, tol: f64) -> Result<(Vec<usize>, CMat)> {
    let (_, n) = a.shape();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let nrank = PROBES
        .iter()
        .map(|&l| rank(&(a - b * l), tol))
        .max()
        .unwrap_or(0);
    let count = n - nrank;
    if count == 0 {
        return Ok((Vec::new(), CMat::zeros(n, 0)));
    }
    let mut indices = Vec::new();
    let mut prev_null = 0usize;
    let mut prev_le = 0usize;
    let mut d = 0usize;
    loop {
        let md = stacked(a, b, d);
        let nullity = md.ncols() - rank(&md, tol);
        let le = nullity.checked_sub(prev_null).ok_or_else(|| {
            Error::structure("minimal-indices", tol, "nullity sequence decreased")
        })?;
        if le < prev_le {
            return Err(Error::structure(
                "minimal-indices",
                tol,
                "inconsistent nullity increments",
            ));
        }
        indices.extend(std::iter::repeat(d).take(le - prev_le));
        if le >= count {
            if le > count {
                return Err(Error::structure(
                    "minimal-indices",
                    tol,
                    format!("found {le} minimal indices, normal rank predicts {count}"),
                ));
            }
            break;
        }
        prev_null = nullity;
        prev_le = le;
        d += 1;
        if d > n {
            return Err(Error::structure(
                "minimal-indices",
                tol,
                "minimal indices exceed the pencil size",
            ));
        }
    }
    let dmax = *indices.iter().max().expect("nonempty");
    let kernel = null_cm(&stacked(a, b, dmax), tol);
    let mut coeffs = CMat::zeros(n, kernel.ncols() * (dmax + 1));
    for c in 0..kernel.ncols() {
        for k in 0..=dmax {
            coeffs.set_column(
                c * (dmax + 1) + k,
                &kernel.view((k * n, c), (n, 1)).column(0),
            );
        }
    }
    let x = orth_cm(&coeffs, tol);
    let expect: usize = indices.iter().map(|e| e + 1).sum();
    if x.ncols() != expect {
        return Err(Error::structure(
            "minimal-indices",
            tol,
            format!(
                "reducing subspace has dimension {}, expected {expect}",
                x.ncols()
            ),
        ));
    }
    Ok((indices, x))
}

/// Removes the right singular part of `A − λB`; returns the minimal indices and the reduced pair.
fn deflate_right(a: &CMat, b: &CMat, tol: f64) -> Result<(Vec<usize>, CMat, CMat)> {
    let (indices, x1) = right_minimal(a, b, tol)?;
    if indices.is_empty() {
        return Ok((indices, a.clone(), b.clone()));
    }
    let mut img = CMat::zeros(a.nrows(), 2 * x1.ncols());
    img.view_mut((0, 0), (a.nrows(), x1.ncols()))
        .copy_from(&(a * &x1));
    img.view_mut((0, x1.ncols()), (a.nrows(), x1.ncols()))
        .copy_from(&(b * &x1));
    // A and B have unit norm and X1 is orthonormal, so the cut is absolute.
    let y1 = linalg::orth_above(&img, tol);
    let expect: usize = indices.iter().sum();
    if y1.ncols() != expect {
        return Err(Error::structure(
            "deflation",
            tol,
            format!(
                "image of reducing subspace has dimension {}, expected {expect}",
                y1.ncols()
            ),
        ));
    }
    let x2 = complement_cm(&x1, tol);
    let y2 = complement_cm(&y1, tol);
    let a2 = y2.adjoint() * a * &x2;
    let b2 = y2.adjoint() * b * &x2;
    Ok((indices, a2, b2))
}

/// Square regular part of `A − λB` after removing both singular parts.
fn regular_part(a: &CMat, b: &CMat, tol: f64) -> Result<(Vec<usize>, CMat, CMat)> {
    let (right, a2, b2) = deflate_right(a, b, tol)?;
    let (left, a3, b3) = deflate_right(&a2.transpose(), &b2.transpose(), tol)?;
    let mut r = right.clone();
    let mut l = left.clone();
    r.sort_unstable();
    l.sort_unstable();
    if r != l {
        return Err(Error::structure(
            "minimal-indices",
            tol,
            format!("left indices {l:?} differ from right indices {r:?}"),
        ));
    }
    if a3.nrows() != a3.ncols() {
        return Err(Error::structure(
            "deflation",
            tol,
            "regular part is not square",
        ));
    }
    Ok((r, a3, b3))
}

/// Möbius-shifted matrix `(A − σB)⁻¹B` normalized to unit 2-norm, with the shift and scale.
fn shifted_operator(a: &CMat, b: &CMat, real: bool) -> Result<(CMat, C64, f64)> {
    let shifts: &[C64] = if real {
        &[
            C64::new(0.587_3, 0.0),
            C64::new(-0.412_7, 0.0),
            C64::new(1.371_9, 0.0),
            C64::new(-2.236_1, 0.0),
        ]
    } else {
        &[
            C64::new(0.587_3, 0.334_1),
            C64::new(-0.412_7, 0.721_3),
            C64::new(1.371_9, -0.223_7),
        ]
    };
    let mut best: Option<(f64, C64)> = None;
    for &s in shifts {
        let sv = linalg::singular_values(&(a - b * s));
        let ratio = sv.last().copied().unwrap_or(0.0)
            / sv.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
        if best.map_or(true, |(r, _)| ratio > r) {
            best = Some((ratio, s));
        }
        if ratio > 1e-3 {
            break;
        }
    }
    let (ratio, sigma) = best.expect("at least one shift");
    if ratio < 1e-10 {
        return Err(Error::structure(
            "regular-part",
            ratio,
            "no admissible Möbius shift: the regular part looks singular",
        ));
    }
    let m = (a - b * sigma)
        .lu()
        .solve(b)
        .ok_or_else(|| Error::structure("regular-part", ratio, "shifted solve failed"))?;
    let norm = linalg::singular_values(&m).first().copied().unwrap_or(0.0);
    let scale = if norm > 0.0 { norm } else { 1.0 };
    Ok((m / C64::new(scale, 0.0), sigma, scale))
}

/// Paired Kronecker structure of `J − λJ*`.
pub fn kronecker_structure(j: &Mat, inv: Involution, tol: &Tolerances) -> Result<KroneckerSpec> {
    if !j.is_square() {
        return Err(Error::domain("kronecker_structure needs a square J"));
    }
    let field = j.field();
    let inv = inv.effective(field);
    let n = j.rows();
    let norm = frob(j.cm());
    if n == 0 || norm == 0.0 {
        let blocks = vec![KroneckerBlock::SingularPair { s: 0 }; n];
        return Ok(KroneckerSpec::from_blocks(blocks, inv, field));
    }
    let a = j.cm() / C64::new(norm, 0.0);
    let b = match inv {
        Involution::T => a.transpose(),
        Involution::H => a.adjoint(),
    };
    let (minimal, a3, b3) = regular_part(&a, &b, tol.rank)?;
    let mut blocks: Vec<KroneckerBlock> = minimal
        .iter()
        .map(|&s| KroneckerBlock::SingularPair { s })
        .collect();

    let r = a3.nrows();
    if r > 0 {
        let real = field == Field::Real;
        let (m, sigma, scale) = shifted_operator(&a3, &b3, real)?;
        let m = if real {
            m.map(|z| C64::new(z.re, 0.0))
        } else {
            m
        };
        let thetas = linalg::eigenvalues(&m)?;
        let ctol = tol.cluster;
        let theta_of = |l: C64| (l - sigma).inv() / scale;
        let mut n_inf = 0usize;
        let mut n_zero = 0usize;
        let mut finite = Vec::new();
        for &t in &thetas {
            if t.norm() < ctol {
                n_inf += 1;
                continue;
            }
            let l = sigma + (t * scale).inv();
            if l.norm() < ctol {
                n_zero += 1;
            } else {
                finite.push(l);
            }
        }
        if n_inf != n_zero {
            return Err(Error::structure(
                "zero-infinity pairing",
                ctol,
                format!("{n_zero} zero eigenvalues but {n_inf} infinite ones"),
            ));
        }
        if n_inf > 0 {
            let inf_sizes = block_sizes(&m, C64::new(0.0, 0.0), n_inf, tol.rank)?;
            let zero_sizes = block_sizes(&m, theta_of(C64::new(0.0, 0.0)), n_zero, tol.rank)?;
            if inf_sizes != zero_sizes {
                return Err(Error::structure(
                    "zero-infinity pairing",
                    tol.rank,
                    format!("zero blocks {zero_sizes:?} differ from infinite blocks {inf_sizes:?}"),
                ));
            }
            blocks.extend(
                inf_sizes
                    .into_iter()
                    .map(|t| KroneckerBlock::ZeroInfPair { t }),
            );
        }
        let spec = spectrum::analyze(&finite, inv, field, ctol)?;
        let sizes: Vec<Vec<usize>> = spec
            .values
            .iter()
            .zip(&spec.mult)
            .map(|(&l, &mult)| block_sizes(&m, theta_of(l), mult, tol.rank))
            .collect::<Result<_>>()?;
        for class in &spec.classes {
            let rep = representative(&spec.values, class);
            if class.iter().any(|&c| sizes[c] != sizes[rep]) {
                return Err(Error::structure(
                    "pairing",
                    tol.rank,
                    format!("partners of {} carry different blocks", spec.values[rep]),
                ));
            }
            let lambda = spec.values[rep];
            for &size in &sizes[rep] {
                blocks.push(match class.len() {
                    1 => KroneckerBlock::Jordan { lambda, m: size },
                    2 => KroneckerBlock::PairedJordan {
                        lambda,
                        p: size,
                        quad: false,
                    },
                    _ => KroneckerBlock::PairedJordan {
                        lambda,
                        p: size,
                        quad: true,
                    },
                });
            }
        }
    }
    let spec = KroneckerSpec::from_blocks(blocks, inv, field);
    if spec.n() != n {
        return Err(Error::structure(
            "kronecker",
            tol.rank,
            format!("block sizes sum to {}, expected {n}", spec.n()),
        ));
    }
    Ok(spec)
}
