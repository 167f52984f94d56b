//! Evaluation of realized functions
//! `f(s) = a + <s_{U,R}(1 − D s_{U,R})⁻¹γ, β>` on `r·G`, the model identity
//! they satisfy, Schur-class certification, and recovery of a colligation
//! from a model by Gramian matching.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::colligation::{
    build_r, s_t, s_ur, validate_colligation, Colligation, ROperator, SubspaceSplit,
};
use crate::domains::{require_rg, sample_rg, Point2, SkewParam};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, identity, inner, is_unitary, isometry_from_gramians, min_hermitian_eigenvalue, solve,
    spectral_norm, unitary_extension, ComplexMatrix, ComplexVector, C64,
};

/// Evaluator for a vector-valued map on `r·G`.
pub type VectorEval = Arc<dyn Fn(&Point2) -> Result<ComplexVector> + Send + Sync>;
/// Evaluator for a scalar function on `r·G`.
pub type ScalarEval = Arc<dyn Fn(&Point2) -> Result<C64> + Send + Sync>;

/// Validation tolerance a colligation must meet to be wrapped as a
/// [`RealizedFunction`].
pub const REALIZED_TOL: f64 = 1e-8;

/// `u(s) = (1 − D s_{U,R})⁻¹γ`.
pub fn eval_u(c: &Colligation, s: &Point2) -> Result<ComplexVector> {
    let su = s_ur(s, &c.u, &c.r_operator())?;
    eval_u_with(c, &su)
}

fn eval_u_with(c: &Colligation, su: &ComplexMatrix) -> Result<ComplexVector> {
    let m = identity(c.dim()) - &c.d * su;
    solve(&m, &c.gamma)
}

/// `f(s) = a + <s_{U,R} u(s), β>`.
pub fn eval_f(c: &Colligation, s: &Point2) -> Result<C64> {
    let su = s_ur(s, &c.u, &c.r_operator())?;
    let u = eval_u_with(c, &su)?;
    Ok(c.a + inner(&(&su * u), &c.beta))
}

/// A colligation known to be unitary, viewed as the function it realizes.
#[derive(Debug, Clone)]
pub struct RealizedFunction {
    colligation: Colligation,
}

impl RealizedFunction {
    pub fn new(colligation: Colligation) -> Result<Self> {
        let report = validate_colligation(&colligation, REALIZED_TOL);
        if !report.passed {
            let worst = report
                .checks
                .iter()
                .filter(|c| !c.passed())
                .map(|c| format!("{} = {:e}", c.name, c.residual))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::InvalidParams(format!(
                "colligation is not unitary: {worst}"
            )));
        }
        Ok(RealizedFunction { colligation })
    }

    pub fn colligation(&self) -> &Colligation {
        &self.colligation
    }

    pub fn eval(&self, s: &Point2) -> Result<C64> {
        eval_f(&self.colligation, s)
    }
}

/// A model `(M, (U, R), u)` of a function `f` on `r·G`.
#[derive(Clone)]
pub struct GrModel {
    pub dim: usize,
    pub u: ComplexMatrix,
    pub r_op: ROperator,
    pub u_eval: VectorEval,
    pub f_eval: ScalarEval,
}

impl fmt::Debug for GrModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrModel")
            .field("dim", &self.dim)
            .field("u", &self.u)
            .field("r_op", &self.r_op)
            .finish_non_exhaustive()
    }
}

impl GrModel {
    pub fn new(
        u: ComplexMatrix,
        r_op: ROperator,
        u_eval: VectorEval,
        f_eval: ScalarEval,
    ) -> Result<Self> {
        let dim = r_op.dim();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "U is {}x{}, R acts on C^{dim}",
                u.nrows(),
                u.ncols()
            )));
        }
        if !is_unitary(&u, 1e-9) {
            return Err(Error::InvalidParams(
                "model operator U is not unitary".into(),
            ));
        }
        Ok(GrModel {
            dim,
            u,
            r_op,
            u_eval,
            f_eval,
        })
    }

    /// The model carried by a colligation: `u` from [`eval_u`], `f` from
    /// [`eval_f`].
    pub fn from_colligation(c: &Colligation) -> Result<Self> {
        let c1 = c.clone();
        let c2 = c.clone();
        GrModel::new(
            c.u.clone(),
            c.r_operator(),
            Arc::new(move |s| eval_u(&c1, s)),
            Arc::new(move |s| eval_f(&c2, s)),
        )
    }

    pub fn r(&self) -> SkewParam {
        self.r_op.r
    }

    /// `|1 − conj(f(t))f(s) − <(1 − t*_{U,R} s_{U,R}) u(s), u(t)>|`.
    pub fn residual(&self, s: &Point2, t: &Point2) -> Result<f64> {
        let ss = s_ur(s, &self.u, &self.r_op)?;
        let ts = s_ur(t, &self.u, &self.r_op)?;
        let us = (self.u_eval)(s)?;
        let ut = (self.u_eval)(t)?;
        let fs = (self.f_eval)(s)?;
        let ft = (self.f_eval)(t)?;
        Ok(model_identity_gap(fs, ft, &ss, &ts, &us, &ut))
    }
}

fn model_identity_gap(
    fs: C64,
    ft: C64,
    ss: &ComplexMatrix,
    ts: &ComplexMatrix,
    us: &ComplexVector,
    ut: &ComplexVector,
) -> f64 {
    let lhs = c64(1.0, 0.0) - ft.conj() * fs;
    let op = identity(ss.nrows()) - ts.adjoint() * ss;
    let rhs = inner(&(op * us), ut);
    (lhs - rhs).norm()
}

/// Residual of `1 − conj(f(t))f(s) = <(1 − t*_{U,R}s_{U,R})u(s), u(t)>` with
/// `f, u` computed from the colligation.
pub fn model_residual(c: &Colligation, s: &Point2, t: &Point2) -> Result<f64> {
    let r_op = c.r_operator();
    let ss = s_ur(s, &c.u, &r_op)?;
    let ts = s_ur(t, &c.u, &r_op)?;
    let us = eval_u_with(c, &ss)?;
    let ut = eval_u_with(c, &ts)?;
    let fs = c.a + inner(&(&ss * &us), &c.beta);
    let ft = c.a + inner(&(&ts * &ut), &c.beta);
    Ok(model_identity_gap(fs, ft, &ss, &ts, &us, &ut))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub sample_count: usize,
    pub max_abs_f: f64,
    pub max_diag_residual: f64,
    /// Smallest eigenvalue of `1 − s*_{U,R}s_{U,R}` over the samples.
    pub min_defect_eigenvalue: f64,
    /// Smallest `1 − |f(s)|²` over the samples.
    pub min_one_minus_abs_f_sq: f64,
    pub passed: bool,
}

/// Samples `r·G` and checks `|f| ≤ 1 + tol` along with the diagonal model
/// identity.
pub fn schur_certify(c: &Colligation, n: usize, seed: u64, tol: f64) -> Result<CertReport> {
    let r_op = c.r_operator();
    let mut report = CertReport {
        sample_count: n,
        max_abs_f: 0.0,
        max_diag_residual: 0.0,
        min_defect_eigenvalue: f64::INFINITY,
        min_one_minus_abs_f_sq: f64::INFINITY,
        passed: true,
    };
    for s in sample_rg(n, c.r, seed) {
        let su = s_ur(&s, &c.u, &r_op)?;
        let u = eval_u_with(c, &su)?;
        let f = c.a + inner(&(&su * &u), &c.beta);
        let defect = identity(c.dim()) - su.adjoint() * &su;
        report.max_abs_f = report.max_abs_f.max(f.norm());
        report.min_one_minus_abs_f_sq = report.min_one_minus_abs_f_sq.min(1.0 - f.norm_sqr());
        report.min_defect_eigenvalue = report
            .min_defect_eigenvalue
            .min(min_hermitian_eigenvalue(&defect));
        report.max_diag_residual = report
            .max_diag_residual
            .max(model_identity_gap(f, f, &su, &su, &u, &u));
    }
    if n == 0 {
        report.min_defect_eigenvalue = 0.0;
        report.min_one_minus_abs_f_sq = 0.0;
    }
    report.passed = report.max_abs_f <= 1.0 + tol;
    Ok(report)
}

/// The default number of Gramian sample points for a model on `C^dim`.
pub fn default_sample_count(dim: usize) -> usize {
    4 * (dim + 1)
}

/// Recovers a colligation from a model on `r·G`.
///
/// The families `[1; s_{U,R}u(s)]` and `[f(s); u(s)]` in `C ⊕ M` have equal
/// Gramians exactly when the model identity holds; the isometry matching them
/// is extended to a unitary `L` whose blocks are `(a, β, γ, D)`. The model's
/// `U` and `R` are kept; no enlargement of `M` is needed at finite dimension.
pub fn realization_from_model(m: &GrModel, sample_pts: &[Point2], tol: f64) -> Result<Colligation> {
    let r = m.r();
    for s in sample_pts {
        require_rg(s, r, "sample point")?;
    }
    let mut su = Vec::with_capacity(sample_pts.len());
    let mut us = Vec::with_capacity(sample_pts.len());
    let mut fs = Vec::with_capacity(sample_pts.len());
    for s in sample_pts {
        let u = (m.u_eval)(s)?;
        if u.len() != m.dim {
            return Err(Error::ShapeMismatch(format!(
                "model map returned a vector of length {}, expected {}",
                u.len(),
                m.dim
            )));
        }
        su.push(s_ur(s, &m.u, &m.r_op)?);
        us.push(u);
        fs.push((m.f_eval)(s)?);
    }

    let scale = us.iter().map(|u| u.norm_squared()).fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..sample_pts.len() {
        for j in 0..sample_pts.len() {
            worst = worst.max(model_identity_gap(
                fs[i], fs[j], &su[i], &su[j], &us[i], &us[j],
            ));
        }
    }
    if worst > tol * scale {
        return Err(Error::GramianMismatch {
            check: "model_identity".into(),
            residual: worst,
            tol: tol * scale,
        });
    }

    let n = m.dim;
    let stack = |head: C64, tail: &ComplexVector| {
        let mut v = ComplexVector::zeros(n + 1);
        v[0] = head;
        v.rows_mut(1, n).copy_from(tail);
        v
    };
    let domain: Vec<ComplexVector> = su
        .iter()
        .zip(&us)
        .map(|(s, u)| stack(c64(1.0, 0.0), &(s * u)))
        .collect();
    let image: Vec<ComplexVector> = fs.iter().zip(&us).map(|(&f, u)| stack(f, u)).collect();
    let iso = isometry_from_gramians(&domain, &image, tol)?;
    let l = unitary_extension(&iso, n + 1)?;
    let c = Colligation::from_block(r, m.r_op.split, &l, m.u.clone())?;

    let mut drift: f64 = 0.0;
    for (s, f) in sample_pts.iter().zip(&fs) {
        drift = drift.max((eval_f(&c, s)? - f).norm());
    }
    if drift > 10.0 * tol * scale {
        return Err(Error::GramianMismatch {
            check: "reproduction".into(),
            residual: drift,
            tol: 10.0 * tol * scale,
        });
    }
    Ok(c)
}

/// Residual of the scaled `G`-model identity on `r·G`:
/// `1 − conj(f(t))f(s) = <(1 − r⁻² t_X* s_X) v(s), v(t)>` with `X = r⁻¹T`.
pub fn scaled_model_residual(
    t_op: &ComplexMatrix,
    v_eval: &dyn Fn(&Point2) -> Result<ComplexVector>,
    f_eval: &dyn Fn(&Point2) -> Result<C64>,
    s: &Point2,
    t: &Point2,
    r: SkewParam,
) -> Result<f64> {
    if spectral_norm(t_op) > 1.0 + 1e-12 {
        return Err(Error::InvalidParams("T must be a contraction".into()));
    }
    require_rg(s, r, "s")?;
    require_rg(t, r, "t")?;
    let rv = r.value();
    let x = t_op / c64(rv, 0.0);
    let sx = s_t(s, &x)?;
    let tx = s_t(t, &x)?;
    let vs = v_eval(s)?;
    let vt = v_eval(t)?;
    let lhs = c64(1.0, 0.0) - f_eval(t)?.conj() * f_eval(s)?;
    let op = identity(t_op.nrows()) - tx.adjoint() * sx / c64(rv * rv, 0.0);
    Ok((lhs - inner(&(op * vs), &vt)).norm())
}

/// Convenience for building [`GrModel`]s by hand.
pub fn model_r_operator(d1: usize, d2: usize, r: SkewParam) -> Result<ROperator> {
    Ok(build_r(SubspaceSplit::new(d1, d2)?, r))
}
