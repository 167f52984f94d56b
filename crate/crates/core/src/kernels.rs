//! The hereditary kernels `Z_r(λ, μ)` on `rD × D` and `Y_{R,U}(s, t)` on
//! `r·G`, materialized as explicit matrices.

use crate::colligation::{s_ur, ROperator};
use crate::domains::{in_bidisc, require_rd_times_d, require_rg, Point2, SkewParam};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, identity, inner, is_unitary, spectral_norm, ComplexMatrix, ComplexVector, C64,
};

const KERNEL_UNITARY_TOL: f64 = 1e-10;

/// The pair `(U, R)` both kernels are built from.
#[derive(Debug, Clone)]
pub struct KernelContext {
    u: ComplexMatrix,
    r_op: ROperator,
    ur_inv: ComplexMatrix,
    r_inv_u_star: ComplexMatrix,
    r_inv_sq: ComplexMatrix,
}

impl KernelContext {
    pub fn new(u: ComplexMatrix, r_op: ROperator) -> Result<Self> {
        let n = r_op.dim();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "U is {}x{}, R acts on C^{n}",
                u.nrows(),
                u.ncols()
            )));
        }
        if !is_unitary(&u, KERNEL_UNITARY_TOL) {
            return Err(Error::InvalidParams("U is not unitary".into()));
        }
        let r_inv = r_op.inv();
        Ok(KernelContext {
            ur_inv: &u * &r_inv,
            r_inv_u_star: &r_inv * u.adjoint(),
            r_inv_sq: r_op.inv_sq(),
            u,
            r_op,
        })
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn r_op(&self) -> &ROperator {
        &self.r_op
    }

    pub fn r(&self) -> SkewParam {
        self.r_op.r
    }

    pub fn dim(&self) -> usize {
        self.r_op.dim()
    }
}

/// `Z_r(λ, μ) = (1 − r μ̄₂R⁻¹U*)(1 − μ̄₁λ₁R⁻²)(1 − rλ₂UR⁻¹)
///            + (1 − μ̄₁R⁻¹U*)(1 − r²μ̄₂λ₂R⁻²)(1 − λ₁UR⁻¹)`.
pub fn kernel_z(ctx: &KernelContext, l: &Point2, m: &Point2) -> Result<ComplexMatrix> {
    let r = ctx.r();
    require_rd_times_d(l, r, "λ")?;
    require_rd_times_d(m, r, "μ")?;
    let rv = c64(r.value(), 0.0);
    let id = identity(ctx.dim());
    let (l1, l2) = (l.z1, l.z2);
    let (m1, m2) = (m.z1.conj(), m.z2.conj());
    let first = (&id - &ctx.r_inv_u_star * (rv * m2))
        * (&id - &ctx.r_inv_sq * (m1 * l1))
        * (&id - &ctx.ur_inv * (rv * l2));
    let second = (&id - &ctx.r_inv_u_star * m1)
        * (&id - &ctx.r_inv_sq * (rv * rv * m2 * l2))
        * (&id - &ctx.ur_inv * l1);
    Ok(first + second)
}

/// `Y_{R,U}(s, t) = 2(1 − t̄₂s₂R⁻¹U*R⁻²UR⁻¹) + (t̄₁s₂R⁻² − s₁)UR⁻¹
///                + R⁻¹U*(t̄₂s₁R⁻² − t̄₁)`.
pub fn kernel_y(ctx: &KernelContext, s: &Point2, t: &Point2) -> Result<ComplexMatrix> {
    let r = ctx.r();
    require_rg(s, r, "s")?;
    require_rg(t, r, "t")?;
    let id = identity(ctx.dim());
    let (s1, s2) = (s.z1, s.z2);
    let (t1, t2) = (t.z1.conj(), t.z2.conj());
    let two = c64(2.0, 0.0);
    let quad = &ctx.r_inv_u_star * &ctx.r_inv_sq * &ctx.ur_inv;
    let a = (&id - quad * (t2 * s2)) * two;
    let b = (&ctx.r_inv_sq * (t1 * s2) - &id * s1) * &ctx.ur_inv;
    let c = &ctx.r_inv_u_star * (&ctx.r_inv_sq * (t2 * s1) - &id * t1);
    Ok(a + b + c)
}

/// `‖Y(s,t) − ½(2 − t₁UR⁻¹)*(1 − t*_{U,R}s_{U,R})(2 − s₁UR⁻¹)‖`.
pub fn factorization_residual(ctx: &KernelContext, s: &Point2, t: &Point2) -> Result<f64> {
    let y = kernel_y(ctx, s, t)?;
    let ss = s_ur(s, &ctx.u, &ctx.r_op)?;
    let ts = s_ur(t, &ctx.u, &ctx.r_op)?;
    let id = identity(ctx.dim());
    let two = c64(2.0, 0.0);
    let left = (&id * two - &ctx.ur_inv * t.z1).adjoint();
    let right = &id * two - &ctx.ur_inv * s.z1;
    let rhs = left * (&id - ts.adjoint() * ss) * right * c64(0.5, 0.0);
    Ok(spectral_norm(&(y - rhs)))
}

/// Residual of the bidisc model identity
/// `1 − conj(φ(μ))φ(λ) = Σᵢ (1 − μ̄ᵢλᵢ)<uᵢ(λ), uᵢ(μ)>`.
pub fn bidisc_model_residual(
    u1: &dyn Fn(&Point2) -> Result<ComplexVector>,
    u2: &dyn Fn(&Point2) -> Result<ComplexVector>,
    phi: &dyn Fn(&Point2) -> Result<C64>,
    l: &Point2,
    m: &Point2,
) -> Result<f64> {
    for (p, what) in [(l, "λ"), (m, "μ")] {
        if !in_bidisc(p, 0.0) {
            return Err(Error::OutsideDomain(format!(
                "{what} = ({}, {}) is not in D²",
                p.z1, p.z2
            )));
        }
    }
    let one = c64(1.0, 0.0);
    let lhs = one - phi(m)?.conj() * phi(l)?;
    let rhs = (one - m.z1.conj() * l.z1) * inner(&u1(l)?, &u1(m)?)
        + (one - m.z2.conj() * l.z2) * inner(&u2(l)?, &u2(m)?);
    Ok((lhs - rhs).norm())
}
