//! Tolerances and knobs shared by the structure and basis computations.

/// Relative tolerances used by the numerical pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Rank decisions (singular value cut relative to the largest one).
    pub rank: f64,
    /// Eigenvalue clustering radius, scaled by `max(1, |λ|)`.
    pub cluster: f64,
    /// Independence guard for the final basis.
    pub prune: f64,
    /// Relative residual accepted for emitted basis elements and chains.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-9,
            cluster: 1e-5,
            prune: 1e-8,
            residual: 1e-8,
        }
    }
}

impl Tolerances {
    /// Overrides the rank tolerance, keeping the others.
    pub fn with_rank(rank: f64) -> Self {
        Tolerances {
            rank,
            ..Tolerances::default()
        }
    }
}

/// Which member of a reciprocal eigenvalue class drives basis generation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Representative {
    /// `|λ| > 1`, or `Im λ ≥ 0` on the unit circle.
    #[default]
    Canonical,
    /// The reciprocal partner of the canonical member.
    Partner,
}

/// Options for the basis constructions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    pub tol: Tolerances,
    /// When set, every chain matrix is right-multiplied by a random invertible
    /// upper-triangular Toeplitz matrix drawn from this seed.
    pub chain_seed: Option<u64>,
    pub representative: Representative,
    /// Seed for the random combinations used when solving for pencil chains.
    pub pencil_seed: u64,
}
