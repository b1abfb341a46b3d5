//! Solution bases for arbitrary (possibly singular) `J` from reducing chains and `(E, F)` pairs.

use super::chains::{all_reducing_chains, ReducingChains};
use super::ef::ef_block_basis;
use super::{kronecker_structure, KroneckerSpec};
use crate::basis::{Builder, PencilPart, Source};
use crate::error::{Error, Result};
use crate::linalg::{independent_subset, to_coords, Coords};
use crate::mat::{frob, CMat, Field, Involution, Mat, C64, I};
use crate::options::SolveOptions;

/// An element `(Z₁, Z₂)` of `{Z₁J = JZ₂, Z₁J* = J*Z₂}`.
#[derive(Clone, Debug)]
pub struct ZPair {
    pub z1: Mat,
    pub z2: Mat,
    /// Source blocks `(s, t)` and pair index `k`.
    pub source: (usize, usize, usize),
}

impl ZPair {
    /// Relative residual of both defining identities.
    pub fn residual(&self, j: &Mat, inv: Involution) -> f64 {
        let a = j.cm();
        let b = j.star(inv).into_cmat();
        let (z1, z2) = (self.z1.cm(), self.z2.cm());
        let scale = frob(a) * (frob(z1) + frob(z2));
        if scale == 0.0 {
            return 0.0;
        }
        let r1 = frob(&(z1 * a - a * z2));
        let r2 = frob(&(z1 * &b - &b * z2));
        r1.max(r2) / scale
    }
}

fn star(a: &CMat, inv: Involution) -> CMat {
    match inv {
        Involution::T => a.transpose(),
        Involution::H => a.adjoint(),
    }
}

/// Block pairs in emission order: each block with itself, then interactions by block index.
fn pair_order(count: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..count).map(|s| (s, s)).collect();
    for s in 0..count {
        for t in (s + 1)..count {
            out.push((s, t));
            out.push((t, s));
        }
    }
    out
}

fn pairs_from_chains(chains: &[ReducingChains], inv: Involution) -> Result<Vec<ZPair>> {
    let mut out = Vec::new();
    for (s, t) in pair_order(chains.len()) {
        let (cs, ct) = (&chains[s], &chains[t]);
        for (k, ef) in ef_block_basis(&cs.block, &ct.block)?
            .into_iter()
            .enumerate()
        {
            let z1 = ct.q.cm() * &ef.e * star(cs.u.cm(), inv);
            let z2 = ct.w.cm() * &ef.f * star(cs.p.cm(), inv);
            out.push(ZPair {
                z1: Mat::complex(z1),
                z2: Mat::complex(z2),
                source: (s, t, k),
            });
        }
    }
    Ok(out)
}

/// Spanning set of `{(Z₁, Z₂) : Z₁J = JZ₂, Z₁J* = J*Z₂}` over ℂ, one element per `(E, F)` pair.
pub fn z_pairs(
    j: &Mat,
    inv: Involution,
    opts: &SolveOptions,
) -> Result<(KroneckerSpec, Vec<ZPair>)> {
    let spec = kronecker_structure(j, inv, &opts.tol)?;
    let chains = all_reducing_chains(j, &spec, opts.pencil_seed, opts.tol.rank)?;
    let pairs = pairs_from_chains(&chains, spec.involution)?;
    Ok((spec, pairs))
}

/// Basis of `{X : X*J + sign·JX = 0}` (`sign = +1` for sol, `−1` for cosol) for any square `J`,
/// with the source blocks of each element.
pub fn singular_basis_with(
    j: &Mat,
    inv: Involution,
    sign: f64,
    opts: &SolveOptions,
) -> Result<Vec<(Mat, Source)>> {
    if !j.is_square() {
        return Err(Error::domain("J must be square"));
    }
    let field = j.field();
    let inv = inv.effective(field);
    let coords = Coords::for_problem(field, inv);
    let (spec, pairs) = z_pairs(j, inv, opts)?;
    let mut candidates: Vec<(CMat, Source)> = Vec::new();
    let prune = opts.tol.prune;
    // Parts below the pruning level of their source element are rounding noise.
    let mut push = |x: CMat, reference: f64, source: Source| {
        let nx = frob(&x);
        if nx > prune * reference {
            candidates.push((x / C64::new(nx, 0.0), source));
        }
    };
    // X = Z₁* − Z₂ lies in sol; Z₁* + Z₂ lies in cosol.
    let combine = |z1: &CMat, z2: &CMat| star(z1, inv) - z2 * C64::new(sign, 0.0);
    for zp in &pairs {
        let (s, t, k) = zp.source;
        let source = |part| Source {
            class: format!("{}x{}", spec.canonical[s], spec.canonical[t]),
            pair: (s, t),
            k,
            builder: Builder::Pencil { part },
        };
        let mut scaled = vec![(C64::new(1.0, 0.0), PencilPart::Whole)];
        if inv == Involution::H && field == Field::Complex {
            scaled.push((I, PencilPart::TimesI));
        }
        for (c, part) in scaled {
            let x = combine(&(zp.z1.cm() * c), &(zp.z2.cm() * c));
            let reference = frob(zp.z1.cm()) + frob(zp.z2.cm());
            if field == Field::Real {
                push(
                    x.map(|z| C64::new(z.re, 0.0)),
                    reference,
                    source(PencilPart::Re),
                );
                push(
                    x.map(|z| C64::new(z.im, 0.0)),
                    reference,
                    source(PencilPart::Im),
                );
            } else {
                push(x, reference, source(part));
            }
        }
    }
    let vectors: Vec<_> = candidates
        .iter()
        .map(|(x, _)| to_coords(x, coords))
        .collect();
    let keep = independent_subset(&vectors, opts.tol.prune);
    let jn = frob(j.cm());
    let mut out = Vec::with_capacity(keep.len());
    for idx in keep {
        let (x, tag) = &candidates[idx];
        let res = frob(&(star(x, inv) * j.cm() + j.cm() * x * C64::new(sign, 0.0)));
        if jn > 0.0 && res / jn > opts.tol.residual.sqrt() {
            return Err(Error::structure(
                "singular-assembly",
                opts.tol.residual,
                format!("element {tag} has relative residual {:.2e}", res / jn),
            ));
        }
        out.push((Mat::new(x.clone(), field), tag.clone()));
    }
    Ok(out)
}

/// Basis of `sol(J)` for any square `J`.
pub fn singular_sol_basis(j: &Mat, inv: Involution) -> Result<Vec<Mat>> {
    Ok(singular_basis_with(j, inv, 1.0, &SolveOptions::default())?
        .into_iter()
        .map(|(x, _)| x)
        .collect())
}

/// Basis of `cosol(J)` for any square `J`.
pub fn singular_cosol_basis(j: &Mat, inv: Involution) -> Result<Vec<Mat>> {
    Ok(singular_basis_with(j, inv, -1.0, &SolveOptions::default())?
        .into_iter()
        .map(|(x, _)| x)
        .collect())
}
