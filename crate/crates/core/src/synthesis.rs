//! From a σ-symmetric model `(u₁, u₂)` of a Schur function `F` on the bidisc
//! to a model of `f = F ∘ lift` on `r·G`.
//!
//! The pipeline: stack `v(λ) = (u₁(λ), u₂(λ^σ))/√2`, match the families
//! `R⁻¹(λ₁v(λ) − rλ₂v(λ^σ))` and `v(λ) − v(λ^σ)` by an isometry, extend it to
//! a unitary `U`, then `w = (1 − rλ₂UR⁻¹)⁻¹v`, `x = w ∘ lift` and
//! `u(s) = (2 − s₁UR⁻¹)x(s)/√2`.

use std::sync::Arc;

use serde::Serialize;

use crate::colligation::{build_r, ROperator, SubspaceSplit};
use crate::domains::{
    halton_rd_times_d, lift_rg, require_rd_times_d, require_rg, sample_bidisc, sample_rd_times_d,
    sigma, Point2, SkewParam,
};
use crate::error::{Error, Result};
use crate::kernels::{bidisc_model_residual, kernel_z, KernelContext};
use crate::linalg::{
    c64, identity, inner, isometry_from_gramians, solve, unitarity_defect, unitary_extension,
    ComplexMatrix, ComplexVector, C64,
};
use crate::realization::GrModel;

/// Scale toward the origin for the default synthesis points.
pub const DEFAULT_POINT_SCALE: f64 = 0.8;

const SPEC_GRID: usize = 16;
const SPEC_SEED: u64 = 0x5eed;

/// One monomial `λ₁ʲλ₂ᵏ` with a vector coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTerm {
    pub j: u32,
    pub k: u32,
    pub coeff: ComplexVector,
}

/// A polynomial map `D² → C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorMap {
    pub dim: usize,
    pub terms: Vec<VectorTerm>,
}

impl PolyVectorMap {
    pub fn new(dim: usize, terms: Vec<VectorTerm>) -> Result<Self> {
        for t in &terms {
            if t.coeff.len() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient of λ₁^{}λ₂^{} has length {}, expected {dim}",
                    t.j,
                    t.k,
                    t.coeff.len()
                )));
            }
            if t.coeff
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
            {
                return Err(Error::NonFinite("polynomial coefficient".into()));
            }
        }
        Ok(PolyVectorMap { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        PolyVectorMap {
            dim,
            terms: Vec::new(),
        }
    }

    /// A single monomial `λ₁ʲλ₂ᵏ · coeff`.
    pub fn monomial(j: u32, k: u32, coeff: ComplexVector) -> Self {
        PolyVectorMap {
            dim: coeff.len(),
            terms: vec![VectorTerm { j, k, coeff }],
        }
    }

    pub fn eval(&self, l: &Point2) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.dim);
        for t in &self.terms {
            out += &t.coeff * monomial(l, t.j, t.k);
        }
        out
    }
}

/// A scalar polynomial in `(λ₁, λ₂)` as `(j, k, coefficient)` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyScalar {
    pub terms: Vec<(u32, u32, C64)>,
}

impl PolyScalar {
    pub fn new(terms: Vec<(u32, u32, C64)>) -> Self {
        PolyScalar { terms }
    }

    pub fn eval(&self, l: &Point2) -> C64 {
        self.terms
            .iter()
            .map(|&(j, k, c)| c * monomial(l, j, k))
            .sum()
    }
}

fn monomial(l: &Point2, j: u32, k: u32) -> C64 {
    l.z1.powu(j) * l.z2.powu(k)
}

/// A Schur function `F` on `D²` with model maps `u₁: D² → C^{d1}` and
/// `u₂: D² → C^{d2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiscModelSpec {
    pub r: SkewParam,
    pub d1: usize,
    pub d2: usize,
    pub u1: PolyVectorMap,
    pub u2: PolyVectorMap,
    pub f: PolyScalar,
}

/// Residuals of the two conditions a model spec must meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecCheck {
    pub bidisc_model: f64,
    pub sigma_symmetry: f64,
}

impl BidiscModelSpec {
    /// Checks shapes only; the model identity and σ-symmetry are measured by
    /// [`BidiscModelSpec::check`].
    pub fn new(r: SkewParam, u1: PolyVectorMap, u2: PolyVectorMap, f: PolyScalar) -> Result<Self> {
        let (d1, d2) = (u1.dim, u2.dim);
        SubspaceSplit::new(d1, d2)?;
        Ok(BidiscModelSpec {
            r,
            d1,
            d2,
            u1,
            u2,
            f,
        })
    }

    pub fn dim(&self) -> usize {
        self.d1 + self.d2
    }

    pub fn split(&self) -> SubspaceSplit {
        SubspaceSplit {
            d1: self.d1,
            d2: self.d2,
        }
    }

    /// Residuals on a fixed seeded grid together with any extra points.
    pub fn check(&self, extra: &[Point2]) -> Result<SpecCheck> {
        let mut model_pts = sample_bidisc(SPEC_GRID, SPEC_SEED);
        model_pts.extend_from_slice(extra);
        let mut sym_pts = sample_rd_times_d(SPEC_GRID, self.r, SPEC_SEED);
        sym_pts.extend_from_slice(extra);
        Ok(SpecCheck {
            bidisc_model: self.model_residual_on(&model_pts)?,
            sigma_symmetry: self.sigma_residual_on(&sym_pts)?,
        })
    }

    fn model_residual_on(&self, pts: &[Point2]) -> Result<f64> {
        let u1 = |l: &Point2| Ok(self.u1.eval(l));
        let u2 = |l: &Point2| Ok(self.u2.eval(l));
        let f = |l: &Point2| Ok(self.f.eval(l));
        let mut worst: f64 = 0.0;
        for l in pts {
            for m in pts {
                worst = worst.max(bidisc_model_residual(&u1, &u2, &f, l, m)?);
            }
        }
        Ok(worst)
    }

    fn sigma_residual_on(&self, pts: &[Point2]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for l in pts {
            require_rd_times_d(l, self.r, "symmetry point")?;
            worst = worst.max((self.f.eval(&sigma(l, self.r)) - self.f.eval(l)).norm());
        }
        Ok(worst)
    }
}

/// `v(λ) = (u₁(λ), u₂(λ^σ))/√2`.
pub fn eval_v(spec: &BidiscModelSpec, l: &Point2) -> Result<ComplexVector> {
    require_rd_times_d(l, spec.r, "λ")?;
    Ok(eval_v_unchecked(spec, l))
}

fn eval_v_unchecked(spec: &BidiscModelSpec, l: &Point2) -> ComplexVector {
    let mut v = ComplexVector::zeros(spec.dim());
    v.rows_mut(0, spec.d1).copy_from(&spec.u1.eval(l));
    v.rows_mut(spec.d1, spec.d2)
        .copy_from(&spec.u2.eval(&sigma(l, spec.r)));
    v / c64(2f64.sqrt(), 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisReport {
    pub sample_count: usize,
    pub rank: usize,
    pub bidisc_model: f64,
    pub sigma_symmetry: f64,
    pub gramian: f64,
    pub isometry: f64,
    /// `max ‖(1 − λ₁UR⁻¹)v(λ) − (1 − rλ₂UR⁻¹)v(λ^σ)‖` over the sample points.
    pub intertwining: f64,
    pub unitarity: f64,
    /// Whether `M` had to be enlarged beyond `C^{d1+d2}`.
    pub enlarged: bool,
}

/// The `(M, U, R)` built from a spec.
#[derive(Debug, Clone)]
pub struct SynthesizedModel {
    pub dim: usize,
    pub u: ComplexMatrix,
    pub r_op: ROperator,
    pub spec: BidiscModelSpec,
    pub residual_report: SynthesisReport,
    ur_inv: ComplexMatrix,
}

/// `n` interior points of `rD × D` for [`synthesize`].
pub fn default_points(spec: &BidiscModelSpec, n: usize) -> Vec<Point2> {
    halton_rd_times_d(n, spec.r, DEFAULT_POINT_SCALE)
}

pub fn default_point_count(spec: &BidiscModelSpec) -> usize {
    4 * spec.dim()
}

pub fn synthesize(
    spec: &BidiscModelSpec,
    sample_pts: &[Point2],
    tol: f64,
) -> Result<SynthesizedModel> {
    let r = spec.r;
    let n = spec.dim();
    for l in sample_pts {
        require_rd_times_d(l, r, "sample point")?;
    }
    if sample_pts.len() < 2 * n {
        return Err(Error::InvalidParams(format!(
            "{} sample points given, at least {} needed",
            sample_pts.len(),
            2 * n
        )));
    }

    let checks = spec.check(sample_pts)?;
    if checks.sigma_symmetry > tol {
        return Err(Error::GramianMismatch {
            check: "sigma_symmetry".into(),
            residual: checks.sigma_symmetry,
            tol,
        });
    }
    if checks.bidisc_model > tol {
        return Err(Error::GramianMismatch {
            check: "bidisc_model".into(),
            residual: checks.bidisc_model,
            tol,
        });
    }

    let r_op = build_r(spec.split(), r);
    let r_inv = r_op.inv();
    let rv = c64(r.value(), 0.0);
    let mut a = Vec::with_capacity(sample_pts.len());
    let mut b = Vec::with_capacity(sample_pts.len());
    let mut pairs = Vec::with_capacity(sample_pts.len());
    for l in sample_pts {
        let v = eval_v_unchecked(spec, l);
        let vs = eval_v_unchecked(spec, &sigma(l, r));
        a.push(&r_inv * (&v * l.z1 - &vs * (rv * l.z2)));
        b.push(&v - &vs);
        pairs.push((v, vs));
    }
    let iso = isometry_from_gramians(&a, &b, tol)?;
    if iso.rank == sample_pts.len() {
        return Err(Error::InsufficientSamples {
            rank: iso.rank,
            samples: sample_pts.len(),
        });
    }
    let u = unitary_extension(&iso, n)?;
    let ur_inv = &u * &r_inv;

    let id = identity(n);
    let intertwining = sample_pts
        .iter()
        .zip(&pairs)
        .map(|(l, (v, vs))| {
            let lhs = (&id - &ur_inv * l.z1) * v;
            let rhs = (&id - &ur_inv * (rv * l.z2)) * vs;
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max);

    let residual_report = SynthesisReport {
        sample_count: sample_pts.len(),
        rank: iso.rank,
        bidisc_model: checks.bidisc_model,
        sigma_symmetry: checks.sigma_symmetry,
        gramian: iso.gramian_residual,
        isometry: iso.residual,
        intertwining,
        unitarity: unitarity_defect(&u),
        enlarged: false,
    };
    Ok(SynthesizedModel {
        dim: n,
        u,
        r_op,
        spec: spec.clone(),
        residual_report,
        ur_inv,
    })
}

impl SynthesizedModel {
    pub fn r(&self) -> SkewParam {
        self.spec.r
    }

    pub fn kernel_context(&self) -> Result<KernelContext> {
        KernelContext::new(self.u.clone(), self.r_op.clone())
    }

    /// `F` at the preimage of `s ∈ r·G` chosen by [`lift_rg`].
    pub fn eval_f(&self, s: &Point2) -> Result<C64> {
        require_rg(s, self.r(), "s")?;
        Ok(self.spec.f.eval(&lift_rg(s, self.r())))
    }
}

/// `w(λ) = (1 − rλ₂UR⁻¹)⁻¹v(λ)`.
pub fn eval_w(m: &SynthesizedModel, l: &Point2) -> Result<ComplexVector> {
    let v = eval_v(&m.spec, l)?;
    let op = identity(m.dim) - &m.ur_inv * (l.z2 * m.r().value());
    solve(&op, &v)
}

/// `x(s) = w(λ)` for either preimage `λ ∈ rD × D` of `s`.
pub fn eval_x(m: &SynthesizedModel, s: &Point2) -> Result<ComplexVector> {
    require_rg(s, m.r(), "s")?;
    eval_w(m, &lift_rg(s, m.r()))
}

/// `u(s) = (2 − s₁UR⁻¹)x(s)/√2`.
pub fn eval_u_model(m: &SynthesizedModel, s: &Point2) -> Result<ComplexVector> {
    let x = eval_x(m, s)?;
    let op = identity(m.dim) * c64(2.0, 0.0) - &m.ur_inv * s.z1;
    Ok(op * x / c64(2f64.sqrt(), 0.0))
}

pub fn wrap_as_gr_model(m: &SynthesizedModel) -> Result<GrModel> {
    let mu = m.clone();
    let mf = m.clone();
    GrModel::new(
        m.u.clone(),
        m.r_op.clone(),
        Arc::new(move |s| eval_u_model(&mu, s)),
        Arc::new(move |s| mf.eval_f(s)),
    )
}

/// `max |1 − conj(F(μ))F(λ) − <Z_r(λ,μ)w(λ), w(μ)>|` over all pairs.
pub fn kernel_identity_residual(m: &SynthesizedModel, pts: &[Point2]) -> Result<f64> {
    let ctx = m.kernel_context()?;
    let ws = pts
        .iter()
        .map(|l| eval_w(m, l))
        .collect::<Result<Vec<_>>>()?;
    let fs: Vec<C64> = pts.iter().map(|l| m.spec.f.eval(l)).collect();
    let mut worst: f64 = 0.0;
    for (i, l) in pts.iter().enumerate() {
        for (j, mu) in pts.iter().enumerate() {
            let z = kernel_z(&ctx, l, mu)?;
            let lhs = c64(1.0, 0.0) - fs[j].conj() * fs[i];
            worst = worst.max((lhs - inner(&(z * &ws[i]), &ws[j])).norm());
        }
    }
    Ok(worst)
}

/// `max ‖w(λ^σ) − w(λ)‖`.
pub fn w_symmetry_residual(m: &SynthesizedModel, pts: &[Point2]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in pts {
        let d = eval_w(m, &sigma(l, m.r()))? - eval_w(m, l)?;
        worst = worst.max(d.norm());
    }
    Ok(worst)
}

/// The `r·G` model identity for the wrapped model over all pairs.
pub fn gr_model_residual(m: &SynthesizedModel, pts: &[Point2]) -> Result<f64> {
    let g = wrap_as_gr_model(m)?;
    let mut worst: f64 = 0.0;
    for s in pts {
        for t in pts {
            worst = worst.max(g.residual(s, t)?);
        }
    }
    Ok(worst)
}

/// The model spec for `F = λ₁λ₂` with `u₁ ≡ 1`, `u₂ = λ₁`.
pub fn product_spec(r: SkewParam) -> BidiscModelSpec {
    let one = ComplexVector::from_element(1, c64(1.0, 0.0));
    BidiscModelSpec {
        r,
        d1: 1,
        d2: 1,
        u1: PolyVectorMap::monomial(0, 0, one.clone()),
        u2: PolyVectorMap::monomial(1, 0, one),
        f: PolyScalar::new(vec![(1, 1, c64(1.0, 0.0))]),
    }
}
