//! Sampling the identity component of `{G : G*JG = J}` through the exponential map,
//! random 3-D projections of the samples, and the small-case classifiers.

use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::basis::{sol_basis, SolutionBasis};
use crate::eigen::{cosquare_with_tol, jordan_structure, JordanSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, rank};
use crate::mat::{frob, CMat, Field, Involution, Mat, C64};
use crate::options::Tolerances;

/// `‖G*JG − J‖_F`.
pub fn membership_residual(g: &Mat, j: &Mat, inv: Involution) -> f64 {
    let inv = inv.effective(g.field().join(j.field()));
    let gs = g.star(inv);
    frob(&(gs.cm() * j.cm() * g.cm() - j.cm()))
}

/// Matrix exponential (scaling and squaring with a Padé kernel).
pub fn exp_map(x: &Mat) -> Result<Mat> {
    if !x.is_square() {
        return Err(Error::domain("exp_map needs a square matrix"));
    }
    Ok(Mat::new(x.cm().clone().exp(), x.field()))
}

/// Sampling parameters: `n` samples with coefficients uniform on `[−scale, scale]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub seed: u64,
    pub scale: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            n: 1000,
            seed: 0,
            scale: 1.0,
        }
    }
}

/// Stream reserved for the projection matrix; sample `i` uses stream `i`.
const PROJECTION_STREAM: u64 = u64::MAX;

/// Coefficients of sample `index`: one ChaCha8 stream per index, so any subset
/// of samples can be regenerated independently.
fn coefficients(cfg: &SampleConfig, index: u64, count: usize, complex: bool) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let mut draw = || (rng.random::<f64>() * 2.0 - 1.0) * cfg.scale;
    (0..count)
        .map(|_| {
            let re = draw();
            let im = if complex { draw() } else { 0.0 };
            C64::new(re, im)
        })
        .collect()
}

/// `Σ r_j S_j` for the basis elements `S_j`.
fn combine(basis: &SolutionBasis, r: &[C64], n: usize) -> CMat {
    let mut x = CMat::zeros(n, n);
    for (s, &c) in basis.elements.iter().zip(r) {
        x += s.cm() * c;
    }
    x
}

/// Samples `exp(Σ r_j S_j)` over a precomputed basis of `sol`.
pub fn sample_from_basis(basis: &SolutionBasis, n: usize, cfg: &SampleConfig) -> Vec<Mat> {
    let complex = basis.coords().complex_linear();
    (0..cfg.n as u64)
        .map(|i| {
            let r = coefficients(cfg, i, basis.dim(), complex);
            let x = combine(basis, &r, n);
            Mat::new(x.exp(), basis.field)
        })
        .collect()
}

/// `cfg.n` random elements of the identity component of `{G : G*JG = J}`.
///
/// Coefficients are complex for complex `J` under `T`, where `sol` is a complex space.
pub fn sample_group(j: &Mat, inv: Involution, cfg: &SampleConfig) -> Result<Vec<Mat>> {
    if cfg.n == 0 {
        return Ok(Vec::new());
    }
    let basis = sol_basis(j, inv)?;
    Ok(sample_from_basis(&basis, j.rows(), cfg))
}

/// How projected points are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectMode {
    /// `cfg.n` random samples.
    Scatter,
    /// Ordered `g × g` grid of coefficients over `[−scale, scale]²`; needs a two-dimensional `sol`.
    SurfaceGrid { g: usize },
}

/// Projected point cloud with the orthonormal projection used.
#[derive(Clone, Debug)]
pub struct Cloud {
    /// `2n² × 3` (complex `J`) or `n² × 3` (real `J`) orthonormal columns.
    pub q: DMatrix<f64>,
    pub points: Vec<[f64; 3]>,
    /// Membership residual of the group element behind each point.
    pub residuals: Vec<f64>,
}

impl Cloud {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Real coordinates of `vec(G)`: column-major entries, with real and imaginary parts for complex `G`.
fn real_vec(g: &Mat) -> Vec<f64> {
    let complex = g.field() == Field::Complex;
    let mut out = Vec::with_capacity(g.rows() * g.cols() * if complex { 2 } else { 1 });
    for z in g.cm().iter() {
        out.push(z.re);
        if complex {
            out.push(z.im);
        }
    }
    out
}

/// Orthonormal `d × 3` matrix from a Gaussian draw and a QR factorization.
pub fn projection_matrix(d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if d < 3 {
        return Err(Error::domain(format!(
            "projection needs at least 3 coordinates, got {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PROJECTION_STREAM);
    let normal = rand_distr::StandardNormal;
    let a = DMatrix::<f64>::from_fn(d, 3, |_, _| rng.sample::<f64, _>(normal));
    let mut q = a.qr().q();
    // Fix column signs so the matrix depends on the seed only.
    for mut c in q.column_iter_mut() {
        if c[0] < 0.0 {
            c.neg_mut();
        }
    }
    Ok(q)
}

fn project_point(q: &DMatrix<f64>, g: &Mat) -> [f64; 3] {
    let v = real_vec(g);
    let mut p = [0.0; 3];
    for (k, out) in p.iter_mut().enumerate() {
        *out = q.column(k).iter().zip(&v).map(|(a, b)| a * b).sum();
    }
    p
}

/// Random 3-D projection of group samples (scatter) or of a coefficient grid (surface).
pub fn project_cloud(j: &Mat, inv: Involution, cfg: &SampleConfig, mode: ProjectMode) -> Result<Cloud> {
    let n = j.rows();
    let basis = sol_basis(j, inv)?;
    let samples = match mode {
        ProjectMode::Scatter => sample_from_basis(&basis, n, cfg),
        ProjectMode::SurfaceGrid { g } => {
            if basis.dim() != 2 {
                return Err(Error::domain(format!(
                    "surface grid needs a two-dimensional tangent space, found dimension {}",
                    basis.dim()
                )));
            }
            let step = |i: usize| {
                if g <= 1 {
                    0.0
                } else {
                    cfg.scale * (2.0 * i as f64 / (g - 1) as f64 - 1.0)
                }
            };
            let mut out = Vec::with_capacity(g * g);
            for a in 0..g {
                for b in 0..g {
                    let r = [C64::new(step(a), 0.0), C64::new(step(b), 0.0)];
                    out.push(Mat::new(combine(&basis, &r, n).exp(), basis.field));
                }
            }
            out
        }
    };
    let d = real_vec(&Mat::identity(n, j.field())).len();
    let q = projection_matrix(d, cfg.seed)?;
    let points = samples.iter().map(|g| project_point(&q, g)).collect();
    let residuals = samples
        .iter()
        .map(|g| membership_residual(g, j, inv))
        .collect();
    Ok(Cloud {
        q,
        points,
        residuals,
    })
}

fn fmt_f64(x: f64) -> String {
    // `Debug` for f64 is the shortest round-trip string, in exponent form for tiny or huge values.
    format!("{x:?}")
}

/// CSV with header `x,y,z`.
pub fn write_points_csv(points: &[[f64; 3]], mut w: impl Write) -> Result<()> {
    writeln!(w, "x,y,z")?;
    for p in points {
        writeln!(w, "{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]))?;
    }
    Ok(())
}

/// CSV with one row per sample, row-major entries under `g11,g12,…`; complex samples
/// use `g11_re,g11_im,…`.
pub fn write_samples_csv(samples: &[Mat], mut w: impl Write) -> Result<()> {
    let Some(first) = samples.first() else {
        return Ok(());
    };
    let (r, c) = (first.rows(), first.cols());
    let complex = samples.iter().any(|g| g.field() == Field::Complex);
    let mut header = Vec::new();
    for i in 1..=r {
        for j in 1..=c {
            if complex {
                header.push(format!("g{i}{j}_re"));
                header.push(format!("g{i}{j}_im"));
            } else {
                header.push(format!("g{i}{j}"));
            }
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for g in samples {
        let mut row = Vec::with_capacity(header.len());
        for i in 0..r {
            for j in 0..c {
                let z = g.get(i, j);
                row.push(fmt_f64(z.re));
                if complex {
                    row.push(fmt_f64(z.im));
                }
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// ASCII PLY point cloud.
pub fn write_ply(points: &[[f64; 3]], mut w: impl Write) -> Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", points.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    writeln!(w, "end_header")?;
    for p in points {
        writeln!(w, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]))?;
    }
    Ok(())
}

/// One of the nine congruence types of a real 2×2 `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case2x2 {
    /// Indefinite `S`, nonsingular: a hyperbola.
    Hyperbola,
    /// Definite `S`, nonzero `A`: a circle.
    Circle,
    /// `I_2`: `O(2)`.
    TwoCircles,
    /// `I_{1,1}`: `O(1,1)`.
    TwoHyperbolae,
    /// Skew: `SL(2, ℝ)`.
    Symplectic,
    /// Cosquare `J_2^{−1}`: two real lines.
    TwoLines,
    /// Nilpotent `J`: a hyperbola.
    SingularHyperbola,
    /// Rank-one symmetric `J`: `{±1} × Aff(1, ℝ)`.
    Affine,
    /// `J = 0`: `GL(2, ℝ)`.
    General,
}

impl Case2x2 {
    pub const ALL: [Case2x2; 9] = [
        Case2x2::Hyperbola,
        Case2x2::Circle,
        Case2x2::TwoCircles,
        Case2x2::TwoHyperbolae,
        Case2x2::Symplectic,
        Case2x2::TwoLines,
        Case2x2::SingularHyperbola,
        Case2x2::Affine,
        Case2x2::General,
    ];

    /// Case number 1 through 9.
    pub fn id(self) -> usize {
        Case2x2::ALL.iter().position(|&c| c == self).expect("listed") + 1
    }

    /// Circled case label.
    pub fn label(self) -> char {
        ['①', '②', '③', '④', '⑤', '⑥', '⑦', '⑧', '⑨'][self.id() - 1]
    }

    pub fn dimension(self) -> usize {
        match self {
            Case2x2::Symplectic => 3,
            Case2x2::Affine => 2,
            Case2x2::General => 4,
            _ => 1,
        }
    }

    pub fn group(self) -> &'static str {
        match self {
            Case2x2::Hyperbola | Case2x2::SingularHyperbola => "{diag(x, 1/x) : x ≠ 0} (hyperbola)",
            Case2x2::Circle => "{[[c, s], [-s, c]] : c² + s² = 1} (circle)",
            Case2x2::TwoCircles => "O(2) (two circles)",
            Case2x2::TwoHyperbolae => "O(1,1) (two hyperbolae)",
            Case2x2::Symplectic => "SL(2,R) = Sp(2,R)",
            Case2x2::TwoLines => "{±[[1, x], [0, 1]] : x ∈ R} (two real lines)",
            Case2x2::Affine => "{[[±1, 0], [x, y]] : y ≠ 0} = {-1, 1} × Aff(1,R)",
            Case2x2::General => "GL(2,R)",
        }
    }
}

impl fmt::Display for Case2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Classification of a real 2×2 `J = S + A` by the congruence invariants of its parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification2x2 {
    pub case: Case2x2,
    /// Signature of `S` as an unordered pair, larger count first.
    pub signature: (usize, usize),
    pub rank_a: usize,
    /// Jordan structure of the cosquare, or `None` for singular `J`.
    pub cosquare: Option<String>,
    pub group: String,
    pub dimension: usize,
}

impl Classification2x2 {
    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.id(),
            "label": self.case.label().to_string(),
            "signature": [self.signature.0, self.signature.1],
            "rank_a": self.rank_a,
            "cosquare": self.cosquare,
            "group": self.group,
            "dimension": self.dimension,
        })
    }
}

fn describe_jordan(spec: &JordanSpec) -> String {
    let mut parts = Vec::new();
    for e in &spec.entries {
        let l = e.eigenvalue;
        let value = if l.im.abs() < 1e-12 {
            format!("{}", round(l.re))
        } else {
            format!("{}{:+}i", round(l.re), round(l.im))
        };
        for &m in &e.blocks {
            parts.push(format!("J_{m}^({value})"));
        }
    }
    parts.join(" ⊕ ")
}

fn round(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    r + 0.0
}

/// Table of the nine real 2×2 types keyed by the signature of `S`, the rank of `A`
/// and, for indefinite `S` with nonzero `A`, whether `J` is singular.
pub fn classify_2x2(j: &Mat) -> Result<Classification2x2> {
    classify_2x2_with(j, &Tolerances::default())
}

pub fn classify_2x2_with(j: &Mat, tol: &Tolerances) -> Result<Classification2x2> {
    if j.field() != Field::Real || j.rows() != 2 || j.cols() != 2 {
        return Err(Error::domain("classify_2x2 needs a real 2×2 matrix"));
    }
    let m = j.cm();
    let scale = frob(m).max(f64::MIN_POSITIVE);
    let s = (m + m.transpose()) * C64::new(0.5, 0.0);
    let a = (m - m.transpose()) * C64::new(0.5, 0.0);
    let cut = tol.rank * scale;
    let (mut pos, mut neg) = (0, 0);
    let sr = s.map(|z| z.re);
    for ev in sr.symmetric_eigenvalues().iter() {
        if *ev > cut {
            pos += 1;
        } else if *ev < -cut {
            neg += 1;
        }
    }
    let signature = (pos.max(neg), pos.min(neg));
    let rank_a = if a[(0, 1)].norm() > cut { 2 } else { 0 };
    let singular = rank(m, tol.rank) < 2;
    let case = match (signature, rank_a) {
        ((0, 0), 0) => Case2x2::General,
        ((1, 0), 0) => Case2x2::Affine,
        ((2, 0), 0) => Case2x2::TwoCircles,
        ((1, 1), 0) => Case2x2::TwoHyperbolae,
        ((0, 0), _) => Case2x2::Symplectic,
        ((1, 0), _) => Case2x2::TwoLines,
        ((2, 0), _) => Case2x2::Circle,
        ((1, 1), _) if singular => Case2x2::SingularHyperbola,
        _ => Case2x2::Hyperbola,
    };
    let cosquare = if singular {
        None
    } else {
        let c = cosquare_with_tol(j, Involution::T, tol.rank)?;
        Some(describe_jordan(&jordan_structure(&c, Involution::T, tol)?))
    };
    Ok(Classification2x2 {
        case,
        signature,
        rank_a,
        cosquare,
        group: case.group().to_string(),
        dimension: case.dimension(),
    })
}

/// Eigenvalue profile of a generic real 4×4 `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile4x4 {
    /// Two conjugate pairs on the unit circle: `S¹ × S¹`.
    CircleCircle,
    /// A quadruple `λ, λ̄, 1/λ, 1/λ̄`: `ℂ \ {0}`.
    PuncturedPlane,
    /// One real reciprocal pair and one unit-circle pair.
    HyperbolaCircle,
    /// Two real reciprocal pairs: four copies of a hyperbola-like surface.
    HyperbolaHyperbola,
    /// Singular `J` or repeated cosquare eigenvalues.
    NonGeneric,
}

impl fmt::Display for Profile4x4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Profile4x4::CircleCircle => "circle×circle",
            Profile4x4::PuncturedPlane => "punctured-plane",
            Profile4x4::HyperbolaCircle => "hyperbola×circle",
            Profile4x4::HyperbolaHyperbola => "hyperbola×hyperbola",
            Profile4x4::NonGeneric => "non-generic",
        };
        f.write_str(s)
    }
}

/// Generic profile from the cosquare eigenvalues of a real 4×4 `J`.
pub fn profile_4x4(j: &Mat) -> Result<Profile4x4> {
    profile_4x4_with(j, &Tolerances::default())
}

pub fn profile_4x4_with(j: &Mat, tol: &Tolerances) -> Result<Profile4x4> {
    if j.field() != Field::Real || j.rows() != 4 || j.cols() != 4 {
        return Err(Error::domain("profile_4x4 needs a real 4×4 matrix"));
    }
    let Ok(c) = cosquare_with_tol(j, Involution::T, tol.rank) else {
        return Ok(Profile4x4::NonGeneric);
    };
    let vals = linalg::eigenvalues(c.cm())?;
    let close = |a: C64, b: C64| (a - b).norm() <= tol.cluster * a.norm().max(1.0);
    for a in 0..vals.len() {
        for b in (a + 1)..vals.len() {
            if close(vals[a], vals[b]) {
                return Ok(Profile4x4::NonGeneric);
            }
        }
    }
    let on_circle = |z: C64| (z.norm() - 1.0).abs() <= tol.cluster;
    let on_line = |z: C64| z.im.abs() <= tol.cluster * z.norm().max(1.0);
    let circle = vals.iter().filter(|&&z| on_circle(z) && !on_line(z)).count();
    let line = vals.iter().filter(|&&z| on_line(z) && !on_circle(z)).count();
    Ok(match (circle, line) {
        (4, 0) => Profile4x4::CircleCircle,
        (2, 2) => Profile4x4::HyperbolaCircle,
        (0, 4) => Profile4x4::HyperbolaHyperbola,
        (0, 0) => Profile4x4::PuncturedPlane,
        _ => Profile4x4::NonGeneric,
    })
}
