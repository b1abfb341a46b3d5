//! Canonical pencil blocks and the bases of pairs `(E, F)` with `E·K₁(λ)ᵀ − K₂(λ)·F = 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{bid, jordan_block};
use crate::mat::{frob, CMat, C64, ONE, ZERO};

/// One unpaired canonical block of a pencil `K(λ) = K_A − λ·K_B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CanonicalBlock {
    /// `𝒮_{2s+1}`, equivalent to `L_s ⊕ L_sᵀ`.
    Singular { s: usize },
    /// `J_m^λ − λ·I`.
    Jordan { lambda: C64, m: usize },
    /// `I − λ·J_m^0`.
    Infinite { m: usize },
}

impl CanonicalBlock {
    pub fn size(&self) -> usize {
        match *self {
            CanonicalBlock::Singular { s } => 2 * s + 1,
            CanonicalBlock::Jordan { m, .. } | CanonicalBlock::Infinite { m } => m,
        }
    }

    /// Coefficient matrices `(K_A, K_B)` of `K(λ) = K_A − λ·K_B`.
    pub fn coefficients(&self) -> (CMat, CMat) {
        match *self {
            CanonicalBlock::Singular { s } => {
                let sm = s_matrix(2 * s + 1);
                let st = sm.transpose();
                (sm, st)
            }
            CanonicalBlock::Jordan { lambda, m } => (jordan_block(lambda, m), CMat::identity(m, m)),
            CanonicalBlock::Infinite { m } => (CMat::identity(m, m), jordan_block(ZERO, m)),
        }
    }

    /// Involutory permutation `Π` with `Π·K_A·Π = K_Aᵀ` and `Π·K_B·Π = K_Bᵀ`.
    pub fn reversal(&self) -> CMat {
        match *self {
            CanonicalBlock::Singular { s } => path_reversal(2 * s + 1),
            CanonicalBlock::Jordan { m, .. } | CanonicalBlock::Infinite { m } => bid(m, m, m),
        }
    }

    /// The block with conjugated eigenvalue.
    pub fn conj(&self) -> CanonicalBlock {
        match *self {
            CanonicalBlock::Jordan { lambda, m } => CanonicalBlock::Jordan {
                lambda: lambda.conj(),
                m,
            },
            other => other,
        }
    }
}

impl fmt::Display for CanonicalBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CanonicalBlock::Singular { s } => write!(f, "S_{}", 2 * s + 1),
            CanonicalBlock::Jordan { lambda, m } => write!(f, "J_{m}^({lambda})"),
            CanonicalBlock::Infinite { m } => write!(f, "J_{m}^inf"),
        }
    }
}

/// Constant coefficient `S` of `𝒮_n = S − λSᵀ` (`n = 2n'+1`): upper-right block is the
/// diagonal part of `L̃_{n'}` and lower-left block is `L_{n'}ᵀ`'s constant part.
pub fn s_matrix(n: usize) -> CMat {
    assert!(n % 2 == 1, "S blocks have odd size");
    let p = (n - 1) / 2;
    let mut s = CMat::zeros(n, n);
    for i in 0..p {
        s[(i, p + 1 + i)] = ONE;
        s[(p + 1 + i, i + 1)] = ONE;
    }
    s
}

/// Permutation reversing `0..=n'` and `n'+1..n` separately.
pub fn path_reversal(n: usize) -> CMat {
    let p = (n - 1) / 2;
    let mut pi = CMat::zeros(n, n);
    for k in 0..=p {
        pi[(k, p - k)] = ONE;
    }
    for k in 0..p {
        pi[(p + 1 + k, n - 1 - k)] = ONE;
    }
    pi
}

/// A pair `(E, F)` for the ordered block pair `(K₁, K₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EFPair {
    pub e: CMat,
    pub f: CMat,
}

impl EFPair {
    fn transposed(&self) -> EFPair {
        EFPair {
            e: self.f.transpose(),
            f: self.e.transpose(),
        }
    }

    /// Largest coefficient residual of `E·K₁ᵀ − K₂·F` over both powers of λ.
    pub fn residual(&self, k1: &CanonicalBlock, k2: &CanonicalBlock) -> f64 {
        let (a1, b1) = k1.coefficients();
        let (a2, b2) = k2.coefficients();
        let r0 = &self.e * a1.transpose() - &a2 * &self.f;
        let r1 = &self.e * b1.transpose() - &b2 * &self.f;
        max_abs(&r0).max(max_abs(&r1))
    }
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut(a.shape(), b.shape()).copy_from(b);
    m
}

/// Single `𝒮_n` block, `n = 2n'+1`: `n + 1` pairs.
fn single_s(n: usize) -> Vec<EFPair> {
    let p = (n - 1) / 2;
    let e1 = block_diag(&bid(p + 1, p + 1, p + 1), &CMat::zeros(p, p));
    let f1 = block_diag(&CMat::zeros(p + 1, p + 1), &bid(p, p, p));
    let mut out = vec![EFPair {
        e: e1.clone(),
        f: f1.clone(),
    }];
    for j in 2..=n {
        let mut e = CMat::zeros(n, n);
        let mut f = CMat::zeros(n, n);
        e.view_mut((p + 1, 0), (p, p + 1))
            .copy_from(&bid(j - 1, p, p + 1));
        f.view_mut((0, p + 1), (p + 1, p))
            .copy_from(&bid(j - 1, p + 1, p));
        out.push(EFPair { e, f });
    }
    out.push(EFPair { e: f1, f: e1 });
    out
}

/// `E·𝒮_nᵀ − 𝒮_m·F = 0` with `m > n`: `m` pairs of `m×n` matrices.
fn s_pair(m: usize, n: usize) -> Vec<EFPair> {
    let (mp, np) = ((m - 1) / 2, (n - 1) / 2);
    let mut out = Vec::with_capacity(m);
    let split = (m - n) / 2 + 1;
    for j in 1..=split {
        let mut e = CMat::zeros(m, n);
        let mut f = CMat::zeros(m, n);
        e.view_mut((0, 0), (mp + 1, np + 1))
            .copy_from(&bid(np + j, mp + 1, np + 1));
        f.view_mut((mp + 1, np + 1), (mp, np))
            .copy_from(&bid(np + j - 1, mp, np));
        out.push(EFPair { e, f });
    }
    for j in (split + 1)..=m {
        let k = j - (mp - np + 1);
        let mut e = CMat::zeros(m, n);
        let mut f = CMat::zeros(m, n);
        e.view_mut((mp + 1, 0), (mp, np + 1))
            .copy_from(&bid(k, mp, np + 1));
        f.view_mut((0, np + 1), (mp + 1, np))
            .copy_from(&bid(k, mp + 1, np));
        out.push(EFPair { e, f });
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `[G_m^α]_{jk} = C(j−1, e)·α^e` with `e = j + k − m − 1` (1-based), zero outside `0 ≤ e ≤ j−1`.
pub fn g_matrix(m: usize, alpha: C64) -> CMat {
    CMat::from_fn(m, m, |j0, k0| {
        let (j, k) = (j0 + 1, k0 + 1);
        if j + k < m + 1 {
            return ZERO;
        }
        let e = j + k - m - 1;
        if e > j - 1 {
            return ZERO;
        }
        alpha.powu(e as u32) * binomial(j - 1, e)
    })
}

/// `E·(J_m^α − λI)ᵀ − 𝒮_n·F = 0`: `m` pairs of `n×m` matrices.
fn s_jordan(n: usize, m: usize, alpha: C64) -> Vec<EFPair> {
    let p = (n - 1) / 2;
    let gp = g_matrix(p, alpha);
    let gp1 = g_matrix(p + 1, alpha);
    (1..=m)
        .map(|j| {
            let mut e = CMat::zeros(n, m);
            let mut f = CMat::zeros(n, m);
            for k in 1..=p {
                if j >= k {
                    let col = j - k;
                    e.view_mut((n - p, col), (p, 1))
                        .copy_from(&gp.column(p - k));
                }
            }
            for k in 1..=(p + 1) {
                if j >= k {
                    let col = j - k;
                    f.view_mut((0, col), (p + 1, 1))
                        .copy_from(&gp1.column(p + 1 - k));
                }
            }
            EFPair { e, f }
        })
        .collect()
}

/// `E·(I − λJ_m^0)ᵀ − 𝒮_n·F = 0`, obtained from the eigenvalue-zero list by the reversal of `𝒮_n`.
fn s_infinite(n: usize, m: usize) -> Vec<EFPair> {
    let pi = path_reversal(n);
    s_jordan(n, m, ZERO)
        .into_iter()
        .map(|p| EFPair {
            e: &pi * p.e,
            f: &pi * p.f,
        })
        .collect()
}

/// `(B_k, B_k)` pairs, `k = 1..min(a, b)`, for two blocks with the same finite or infinite eigenvalue.
fn same_eigenvalue(a: usize, b: usize) -> Vec<EFPair> {
    (1..=a.min(b))
        .map(|k| {
            let e = bid(k, b, a);
            EFPair { e: e.clone(), f: e }
        })
        .collect()
}

/// Basis of `{(E, F) : E·K₁(λ)ᵀ − K₂(λ)·F = 0}` for the ordered pair `(K₁, K₂)`.
///
/// Pairs of blocks whose interaction is provably trivial (distinct eigenvalues,
/// zero against infinite) give an empty list.
pub fn ef_block_basis(k1: &CanonicalBlock, k2: &CanonicalBlock) -> Result<Vec<EFPair>> {
    use CanonicalBlock::*;
    let out = match (*k1, *k2) {
        (Singular { s: s1 }, Singular { s: s2 }) => {
            let (n1, n2) = (2 * s1 + 1, 2 * s2 + 1);
            if n1 == n2 {
                single_s(n1)
            } else if n2 > n1 {
                s_pair(n2, n1)
            } else {
                s_pair(n1, n2).iter().map(EFPair::transposed).collect()
            }
        }
        (Jordan { lambda, m }, Singular { s }) => s_jordan(2 * s + 1, m, lambda),
        (Singular { s }, Jordan { lambda, m }) => s_jordan(2 * s + 1, m, lambda)
            .iter()
            .map(EFPair::transposed)
            .collect(),
        (Infinite { m }, Singular { s }) => s_infinite(2 * s + 1, m),
        (Singular { s }, Infinite { m }) => s_infinite(2 * s + 1, m)
            .iter()
            .map(EFPair::transposed)
            .collect(),
        (Jordan { lambda: l1, m: a }, Jordan { lambda: l2, m: b }) => {
            if l1 == l2 {
                same_eigenvalue(a, b)
            } else {
                Vec::new()
            }
        }
        (Infinite { m: a }, Infinite { m: b }) => same_eigenvalue(a, b),
        (Jordan { .. }, Infinite { .. }) | (Infinite { .. }, Jordan { .. }) => Vec::new(),
    };
    for pair in &out {
        let r = pair.residual(k1, k2);
        let scale = 1.0 + frob(&pair.e) + frob(&pair.f);
        if r > 1e-12 * scale {
            return Err(Error::domain(format!(
                "internal (E, F) list for ({k1}, {k2}) fails its identity by {r:.2e}"
            )));
        }
    }
    Ok(out)
}

/// Dimension of `{(E, F) : E·K₁ᵀ − K₂·F = 0}` computed from the linear system directly.
pub fn ef_dimension(k1: &CanonicalBlock, k2: &CanonicalBlock) -> usize {
    let sys = ef_system(k1, k2);
    crate::linalg::null_cm(&sys, 1e-10).ncols()
}

/// Matrix of `(E, F) ↦ (E·K_{1A}ᵀ − K_{2A}·F, E·K_{1B}ᵀ − K_{2B}·F)` on column-major `[vec E; vec F]`.
pub(crate) fn ef_system(k1: &CanonicalBlock, k2: &CanonicalBlock) -> CMat {
    let (a1, b1) = k1.coefficients();
    let (a2, b2) = k2.coefficients();
    let (r, c) = (k2.size(), k1.size());
    let unknowns = 2 * r * c;
    let mut sys = CMat::zeros(2 * r * c, unknowns);
    let id_r = CMat::identity(r, r);
    let id_c = CMat::identity(c, c);
    // vec(E·Mᵀ) = (M ⊗ I_r) vec E ; vec(N·F) = (I_c ⊗ N) vec F
    for (blk, (m1, n2)) in [(&a1, &a2), (&b1, &b2)].into_iter().enumerate() {
        let left = kron(m1, &id_r);
        let right = kron(&id_c, n2);
        sys.view_mut((blk * r * c, 0), (r * c, r * c))
            .copy_from(&left);
        sys.view_mut((blk * r * c, r * c), (r * c, r * c))
            .copy_from(&(-right));
    }
    sys
}

pub(crate) fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
