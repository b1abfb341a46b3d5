//! Reducing chains: `(A − λB)W = Q·K(λ)` for each canonical block `K`, with dual chains
//! `(A* − λB*)U = P·K̄(λ)` where `A = J`, `B = J*` and `K̄` conjugates under `H`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ef::{ef_block_basis, kron, CanonicalBlock};
use super::KroneckerSpec;
use crate::eigen::ChainSet;
use crate::error::{Error, Result};
use crate::linalg::{null_cm_fixed, singular_values};
use crate::mat::{frob, CMat, Involution, Mat, C64};

const COND_LIMIT: f64 = 1e8;
const ATTEMPTS: u64 = 8;

/// Chains `W, Q` and dual chains `U, P` for one canonical block.
#[derive(Clone, Debug)]
pub struct ReducingChains {
    pub block: CanonicalBlock,
    pub w: Mat,
    pub q: Mat,
    pub u: Mat,
    pub p: Mat,
}

fn star(a: &CMat, inv: Involution) -> CMat {
    match inv {
        Involution::T => a.transpose(),
        Involution::H => a.adjoint(),
    }
}

fn dual_block(block: &CanonicalBlock, inv: Involution) -> CanonicalBlock {
    match inv {
        Involution::T => *block,
        Involution::H => block.conj(),
    }
}

impl ReducingChains {
    /// Chains of a Jordan block of the cosquare, `Q = J*W`, `P = JU`.
    pub fn from_jordan_chain(j: &Mat, chain: &ChainSet) -> Result<ReducingChains> {
        if chain.realified {
            return Err(Error::domain(
                "reducing chains need a complex Jordan chain, not a realified one",
            ));
        }
        let inv = chain.involution;
        let q = star(j.cm(), inv) * chain.w.cm();
        let p = j.cm() * chain.u.cm();
        Ok(ReducingChains {
            block: CanonicalBlock::Jordan {
                lambda: chain.eigenvalue,
                m: chain.size,
            },
            w: Mat::complex(chain.w.cm().clone()),
            q: Mat::complex(q),
            u: chain.u.clone(),
            p: Mat::complex(p),
        })
    }

    /// Largest relative residual of the four chain identities.
    pub fn residual(&self, j: &Mat, inv: Involution) -> f64 {
        let a = j.cm();
        let b = star(a, inv);
        let (ka, kb) = self.block.coefficients();
        let (da, db) = dual_block(&self.block, inv).coefficients();
        let (w, q, u, p) = (self.w.cm(), self.q.cm(), self.u.cm(), self.p.cm());
        let rel = |r: CMat, x: &CMat, y: &CMat| {
            let s = frob(a) * frob(x) + frob(y);
            if s == 0.0 {
                0.0
            } else {
                frob(&r) / s
            }
        };
        [
            rel(a * w - q * &ka, w, q),
            rel(&b * w - q * &kb, w, q),
            rel(&b * u - p * &da, u, p),
            rel(a * u - p * &db, u, p),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Scale applied to the `Q` unknowns so that large eigenvalues do not dominate the system.
fn q_scale(block: &CanonicalBlock) -> f64 {
    match *block {
        CanonicalBlock::Jordan { lambda, .. } => 1.0 / lambda.norm().max(1.0),
        _ => 1.0,
    }
}

/// Matrix of `(W, Q') ↦ (AW − c·Q'·K_A, BW − c·Q'·K_B)` on `[vec W; vec Q']`, `c` from [`q_scale`].
fn chain_system(a: &CMat, b: &CMat, block: &CanonicalBlock) -> CMat {
    let n = a.nrows();
    let r = block.size();
    let (ka, kb) = block.coefficients();
    let id_r = CMat::identity(r, r);
    let id_n = CMat::identity(n, n);
    let nr = n * r;
    let mut sys = CMat::zeros(2 * nr, 2 * nr);
    for (row, (m, k)) in [(a, &ka), (b, &kb)].into_iter().enumerate() {
        sys.view_mut((row * nr, 0), (nr, nr))
            .copy_from(&kron(&id_r, m));
        sys.view_mut((row * nr, nr), (nr, nr))
            .copy_from(&(-kron(&k.transpose(), &id_n) * C64::new(q_scale(block), 0.0)));
    }
    sys
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

fn cond(a: &CMat) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Solution spaces of the chain equations, one per canonical block.
fn chain_spaces(a: &CMat, b: &CMat, spec: &KroneckerSpec, tol: f64) -> Result<Vec<CMat>> {
    let mut out = Vec::with_capacity(spec.canonical.len());
    for blk in &spec.canonical {
        let d: usize = spec
            .canonical
            .iter()
            .map(|c| ef_block_basis(c, blk).map(|l| l.len()))
            .sum::<Result<usize>>()?;
        let (basis, inner, outer) = null_cm_fixed(&chain_system(a, b, blk), d);
        if inner > tol || outer <= tol {
            return Err(Error::structure(
                "reducing-chains",
                tol,
                format!(
                    "chain space of {blk} has no clean gap at dimension {d} \
                     (kept {inner:.2e}, next {outer:.2e})"
                ),
            ));
        }
        out.push(basis);
    }
    Ok(out)
}

fn block_reversal(spec: &KroneckerSpec) -> CMat {
    let n: usize = spec.canonical.iter().map(CanonicalBlock::size).sum();
    let mut pi = CMat::zeros(n, n);
    let mut off = 0;
    for blk in &spec.canonical {
        let r = blk.size();
        pi.view_mut((off, off), (r, r)).copy_from(&blk.reversal());
        off += r;
    }
    pi
}

/// Reducing chains of every canonical block of `spec`.
pub fn all_reducing_chains(
    j: &Mat,
    spec: &KroneckerSpec,
    seed: u64,
    tol: f64,
) -> Result<Vec<ReducingChains>> {
    let n = j.rows();
    let norm = frob(j.cm());
    if norm == 0.0 {
        let id = CMat::identity(n, n);
        return Ok(spec
            .canonical
            .iter()
            .enumerate()
            .map(|(k, blk)| {
                let col = Mat::complex(id.columns(k, 1).into_owned());
                ReducingChains {
                    block: *blk,
                    w: col.clone(),
                    q: col.clone(),
                    u: col.clone(),
                    p: col,
                }
            })
            .collect());
    }
    let inv = spec.involution;
    let a = j.cm() / C64::new(norm, 0.0);
    let b = star(&a, inv);
    let spaces = chain_spaces(&a, &b, spec, tol.sqrt())?;
    let pi = block_reversal(spec);
    let mut last_cond = f64::INFINITY;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut w = CMat::zeros(n, n);
        let mut q = CMat::zeros(n, n);
        let mut off = 0;
        for (blk, space) in spec.canonical.iter().zip(&spaces) {
            let r = blk.size();
            let coeffs = nalgebra::DVector::from_fn(space.ncols(), |_, _| random_c64(&mut rng));
            let v = space * coeffs;
            let nr = n * r;
            w.view_mut((0, off), (n, r))
                .copy_from(&CMat::from_column_slice(n, r, &v.as_slice()[..nr]));
            q.view_mut((0, off), (n, r)).copy_from(
                &(CMat::from_column_slice(n, r, &v.as_slice()[nr..]) * C64::new(q_scale(blk), 0.0)),
            );
            off += r;
        }
        let (cw, cq) = (cond(&w), cond(&q));
        last_cond = cw.max(cq);
        if last_cond > COND_LIMIT {
            continue;
        }
        let (Some(wi), Some(qi)) = (w.clone().try_inverse(), q.clone().try_inverse()) else {
            continue;
        };
        let u = star(&qi, inv) * &pi;
        let p = star(&wi, inv) * &pi * C64::new(norm, 0.0);
        let q = q * C64::new(norm, 0.0);
        let mut out = Vec::with_capacity(spec.canonical.len());
        let mut off = 0;
        for blk in &spec.canonical {
            let r = blk.size();
            let take = |m: &CMat| Mat::complex(m.columns(off, r).into_owned());
            out.push(ReducingChains {
                block: *blk,
                w: take(&w),
                q: take(&q),
                u: take(&u),
                p: take(&p),
            });
            off += r;
        }
        return Ok(out);
    }
    Err(Error::structure(
        "reducing-chains",
        COND_LIMIT,
        format!("chain matrices stay ill-conditioned (condition {last_cond:.2e})"),
    ))
}

/// Reducing chains of one canonical block.
pub fn reducing_chains(
    j: &Mat,
    spec: &KroneckerSpec,
    block: usize,
    seed: u64,
    tol: f64,
) -> Result<ReducingChains> {
    if block >= spec.canonical.len() {
        return Err(Error::domain(format!(
            "block index {block} out of range ({} blocks)",
            spec.canonical.len()
        )));
    }
    let mut all = all_reducing_chains(j, spec, seed, tol)?;
    Ok(all.swap_remove(block))
}
