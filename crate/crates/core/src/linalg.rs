//! Dense complex linear algebra on small finite-dimensional spaces.
//!
//! Every operator identity in this crate is evaluated through the handful of
//! primitives here: adjoints, checked inverses, spectral norms, and the
//! Gramian-matched partial isometries together with their unitary extensions.
//!
//! Inner products are linear in the first argument: `<x, y> = sum x_i conj(y_i)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Default tolerance for operator identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Default tolerance for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-12;
/// A matrix whose smallest singular value falls below this fraction of its
/// norm is reported as singular.
pub const SINGULAR_RATIO: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag(entries: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(entries))
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// `<x, y>`, linear in `x` and conjugate-linear in `y`.
pub fn inner(x: &ComplexVector, y: &ComplexVector) -> C64 {
    y.dotc(x)
}

/// The rank-one operator `u ⊗ v : x ↦ <x, v> u`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// Matrix of pairwise inner products, `G[i][j] = <v_i, v_j>`.
pub fn gram(vectors: &[ComplexVector]) -> ComplexMatrix {
    let k = vectors.len();
    ComplexMatrix::from_fn(k, k, |i, j| inner(&vectors[i], &vectors[j]))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular values, largest first.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value (the operator norm); zero for empty matrices.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn check_invertible(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_finite(m) {
        return Err(Error::NonFinite("matrix to invert".into()));
    }
    let sv = singular_values(m);
    let norm = sv.first().copied().unwrap_or(0.0);
    let smallest = sv.last().copied().unwrap_or(0.0);
    if norm == 0.0 || smallest < SINGULAR_RATIO * norm {
        return Err(Error::SingularMatrix { smallest, norm });
    }
    Ok(())
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_invertible(m)?;
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    m.clone().lu().try_inverse().ok_or(Error::SingularMatrix {
        smallest: 0.0,
        norm: spectral_norm(m),
    })
}

/// Solves `m x = b` with the same singularity test as [`inverse`].
pub fn solve(m: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector> {
    check_invertible(m)?;
    if m.nrows() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            m.nrows(),
            m.ncols(),
            b.len()
        )));
    }
    m.clone().lu().solve(b).ok_or(Error::SingularMatrix {
        smallest: 0.0,
        norm: spectral_norm(m),
    })
}

/// `max(‖M*M − I‖, ‖MM* − I‖)` in spectral norm.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let id = identity(n);
    let a = spectral_norm(&(m.adjoint() * m - &id));
    let b = spectral_norm(&(m * m.adjoint() - &id));
    a.max(b)
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && is_finite(m) && unitarity_defect(m) <= tol
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eigenvalue(m: &ComplexMatrix) -> f64 {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of the Hermitian part of `m`.
pub fn max_hermitian_eigenvalue(m: &ComplexMatrix) -> f64 {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal folded back into `Q`).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// A linear isometry between two subspaces, described by matched orthonormal
/// bases: `domain_basis[k] ↦ image_basis[k]`.
#[derive(Debug, Clone)]
pub struct PartialIsometry {
    pub domain_basis: Vec<ComplexVector>,
    pub image_basis: Vec<ComplexVector>,
    pub rank: usize,
    pub domain_dim: usize,
    pub image_dim: usize,
    /// `max_i ‖V(A_i) − B_i‖` over the families it was built from.
    pub residual: f64,
    /// Largest entrywise Gramian discrepancy observed while building it.
    pub gramian_residual: f64,
}

impl PartialIsometry {
    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.image_dim);
        for (d, y) in self.domain_basis.iter().zip(&self.image_basis) {
            out += y * inner(x, d);
        }
        out
    }

    /// Largest deviation from orthonormality over both bases.
    pub fn orthonormality_defect(&self) -> f64 {
        let defect = |b: &[ComplexVector]| {
            let g = gram(b);
            (g - identity(b.len()))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        };
        defect(&self.domain_basis).max(defect(&self.image_basis))
    }
}

fn check_family(vs: &[ComplexVector], what: &str) -> Result<usize> {
    let n = vs.first().map(|v| v.len()).unwrap_or(0);
    if vs.iter().any(|v| v.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "{what} vectors differ in length"
        )));
    }
    if vs
        .iter()
        .any(|v| v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
    {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(n)
}

fn columns(vs: &[ComplexVector], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, vs.len(), |i, j| vs[j][i])
}

/// Builds the isometry `V` with `V(a[i]) = b[i]` from two families whose
/// Gramians agree.
///
/// The rank of `span(a)` is the number of singular values of the column
/// matrix above `tol · σ_max`. Gramians are compared entrywise relative to
/// `max(1, largest Gramian entry)`.
pub fn isometry_from_gramians(
    a: &[ComplexVector],
    b: &[ComplexVector],
    tol: f64,
) -> Result<PartialIsometry> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "families have {} and {} members",
            a.len(),
            b.len()
        )));
    }
    let n = check_family(a, "domain family")?;
    let m = check_family(b, "image family")?;
    if a.is_empty() {
        return Ok(PartialIsometry {
            domain_basis: Vec::new(),
            image_basis: Vec::new(),
            rank: 0,
            domain_dim: 0,
            image_dim: 0,
            residual: 0.0,
            gramian_residual: 0.0,
        });
    }

    let ga = gram(a);
    let gb = gram(b);
    let scale = ga.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let gramian_residual = (&ga - &gb).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if gramian_residual > tol * scale {
        return Err(Error::GramianMismatch {
            check: "gramian".into(),
            residual: gramian_residual,
            tol: tol * scale,
        });
    }

    let am = columns(a, n);
    let bm = columns(b, m);
    let svd = am.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => {
            return Err(Error::NotInvertible(
                "svd of the domain family failed".into(),
            ))
        }
    };
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&j| sigma_max > 0.0 && svd.singular_values[j] > tol * sigma_max)
        .collect();
    keep.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let rank = keep.len();

    let domain_basis: Vec<ComplexVector> = keep.iter().map(|&j| u.column(j).into_owned()).collect();
    let raw_image: Vec<ComplexVector> = keep
        .iter()
        .map(|&j| {
            let q = v_t.row(j).adjoint();
            (&bm * q) / c64(svd.singular_values[j], 0.0)
        })
        .collect();
    let image_basis = polar_orthonormalize(&raw_image, m)?;

    let mut iso = PartialIsometry {
        domain_basis,
        image_basis,
        rank,
        domain_dim: n,
        image_dim: m,
        residual: 0.0,
        gramian_residual,
    };
    iso.residual = a
        .iter()
        .zip(b)
        .map(|(x, y)| (iso.apply(x) - y).norm())
        .fold(0.0, f64::max);
    Ok(iso)
}

/// Nearest orthonormal family (the unitary factor of the polar decomposition).
fn polar_orthonormalize(vs: &[ComplexVector], n: usize) -> Result<Vec<ComplexVector>> {
    if vs.is_empty() {
        return Ok(Vec::new());
    }
    let y = columns(vs, n);
    let svd = y.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => {
            let w = u * v_t;
            Ok((0..vs.len()).map(|j| w.column(j).into_owned()).collect())
        }
        _ => Err(Error::NotInvertible(
            "svd of the image family failed".into(),
        )),
    }
}

fn pad(v: &ComplexVector, dim: usize) -> ComplexVector {
    let mut out = ComplexVector::zeros(dim);
    out.rows_mut(0, v.len()).copy_from(v);
    out
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in
/// `C^dim`, built by pivoted Gram–Schmidt over the standard basis: at each
/// step the standard vector with the largest residual wins, ties going to the
/// lowest index.
pub fn orthonormal_complement(basis: &[ComplexVector], dim: usize) -> Vec<ComplexVector> {
    let mut q: Vec<ComplexVector> = basis.to_vec();
    let mut out = Vec::with_capacity(dim.saturating_sub(basis.len()));
    while q.len() < dim {
        let mut best: Option<(f64, ComplexVector)> = None;
        for k in 0..dim {
            let mut r = ComplexVector::zeros(dim);
            r[k] = c64(1.0, 0.0);
            for _ in 0..2 {
                for b in &q {
                    let p = inner(&r, b);
                    r -= b * p;
                }
            }
            let nr = r.norm();
            if best.as_ref().is_none_or(|(bn, _)| nr > bn + 1e-12) {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.expect("dim > 0 here");
        let v = r / c64(nr, 0.0);
        out.push(v.clone());
        q.push(v);
    }
    out
}

/// Extends a partial isometry to a unitary on `C^dim` by matching the
/// complements of its domain and image in the order produced by
/// [`orthonormal_complement`]. Bases shorter than `dim` are zero-padded.
pub fn unitary_extension(v: &PartialIsometry, dim: usize) -> Result<ComplexMatrix> {
    if dim < v.rank {
        return Err(Error::DimensionTooSmall { dim, rank: v.rank });
    }
    if v.domain_dim > dim || v.image_dim > dim {
        return Err(Error::ShapeMismatch(format!(
            "isometry acts between C^{} and C^{}, cannot extend inside C^{dim}",
            v.domain_dim, v.image_dim
        )));
    }
    let dom: Vec<ComplexVector> = v.domain_basis.iter().map(|x| pad(x, dim)).collect();
    let img: Vec<ComplexVector> = v.image_basis.iter().map(|x| pad(x, dim)).collect();
    let dom_c = orthonormal_complement(&dom, dim);
    let img_c = orthonormal_complement(&img, dim);

    let mut w = ComplexMatrix::zeros(dim, dim);
    for (d, y) in dom.iter().chain(&dom_c).zip(img.iter().chain(&img_c)) {
        w += outer(y, d);
    }
    Ok(w)
}
