//! The operator `R`, the operator-valued map `s ↦ s_{U,R}`, the classical
//! `s_T`, the von Neumann norm bound, and unitary colligations.

use serde::Serialize;

use crate::domains::{fq_disc, in_g, require_rg, Point2, SkewParam};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, identity, inverse, is_finite, unitarity_defect, ComplexMatrix, ComplexVector, C64,
};

/// Default tolerance for colligation validation.
pub const COLLIGATION_TOL: f64 = 1e-10;

/// `M = H₁ ⊕ H₁⊥` with `dim H₁ = d1`, `dim H₁⊥ = d2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubspaceSplit {
    pub d1: usize,
    pub d2: usize,
}

impl SubspaceSplit {
    /// Both parts must be non-trivial.
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        let split = SubspaceSplit { d1, d2 };
        if split.is_proper() {
            Ok(split)
        } else {
            Err(Error::InvalidParams(format!(
                "H₁ must be a non-trivial proper subspace, got split ({d1}, {d2})"
            )))
        }
    }

    pub fn total(&self) -> usize {
        self.d1 + self.d2
    }

    pub fn is_proper(&self) -> bool {
        self.d1 >= 1 && self.d2 >= 1
    }
}

/// `R = diag(1_{H₁}, r·1_{H₁⊥})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ROperator {
    pub split: SubspaceSplit,
    pub r: SkewParam,
    pub matrix: ComplexMatrix,
}

impl ROperator {
    pub fn dim(&self) -> usize {
        self.split.total()
    }

    fn diag_power(&self, p: i32) -> ComplexMatrix {
        let rp = self.r.value().powi(p);
        let d = self.split.d1;
        ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i != j {
                c64(0.0, 0.0)
            } else if i < d {
                c64(1.0, 0.0)
            } else {
                c64(rp, 0.0)
            }
        })
    }

    /// `R⁻¹ = diag(1, r⁻¹)`, formed entrywise.
    pub fn inv(&self) -> ComplexMatrix {
        self.diag_power(-1)
    }

    /// `R⁻² = diag(1, r⁻²)`.
    pub fn inv_sq(&self) -> ComplexMatrix {
        self.diag_power(-2)
    }
}

pub fn build_r(split: SubspaceSplit, r: SkewParam) -> ROperator {
    let mut op = ROperator {
        split,
        r,
        matrix: ComplexMatrix::zeros(0, 0),
    };
    op.matrix = op.diag_power(1);
    op
}

fn check_square(m: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `s_{U,R} = (2s₂R⁻¹U − s₁)(2R − s₁U)⁻¹` for `s ∈ r·G`.
pub fn s_ur(s: &Point2, u: &ComplexMatrix, r_op: &ROperator) -> Result<ComplexMatrix> {
    let n = r_op.dim();
    check_square(u, n, "U")?;
    require_rg(s, r_op.r, "s")?;
    let id = identity(n);
    let num = r_op.inv() * u * (s.z2 * 2.0) - &id * s.z1;
    let den = &r_op.matrix * c64(2.0, 0.0) - u * s.z1;
    let den_inv = inverse(&den)
        .map_err(|e| Error::NotInvertible(format!("2R − s₁U at s = ({}, {}): {e}", s.z1, s.z2)))?;
    Ok(num * den_inv)
}

/// The classical `s_T = (2s₂T − s₁)(2 − s₁T)⁻¹`.
pub fn s_t(q: &Point2, t: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !t.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "T is {}x{}, expected square",
            t.nrows(),
            t.ncols()
        )));
    }
    let id = identity(t.nrows());
    let num = t * (q.z2 * 2.0) - &id * q.z1;
    let den = &id * c64(2.0, 0.0) - t * q.z1;
    let den_inv = inverse(&den)
        .map_err(|e| Error::NotInvertible(format!("2 − q₁T at q = ({}, {}): {e}", q.z1, q.z2)))?;
    Ok(num * den_inv)
}

/// `sup_D |f_q| = (2|q̄₁q₂ − q₁| + |q₁² − 4q₂|)/(4 − |q₁|²)`, which bounds
/// `‖s_{U,R}‖` at `s = ψ_r(q)`.
pub fn norm_bound(q: &Point2) -> Result<f64> {
    if !in_g(q, 0.0) {
        return Err(Error::OutsideDomain(format!(
            "({}, {}) is not in G",
            q.z1, q.z2
        )));
    }
    let (centre, radius) = fq_disc(q)?;
    Ok(centre.norm() + radius)
}

/// Realization data `(r, split, a, β, γ, D, U)`; the block operator
/// `L = [[a, 1⊗β], [γ⊗1, D]]` should be unitary on `C ⊕ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Colligation {
    pub r: SkewParam,
    pub split: SubspaceSplit,
    pub a: C64,
    pub beta: ComplexVector,
    pub gamma: ComplexVector,
    pub d: ComplexMatrix,
    pub u: ComplexMatrix,
}

impl Colligation {
    /// Checks shapes and finiteness only; unitarity is the business of
    /// [`validate_colligation`].
    pub fn new(
        r: SkewParam,
        split: SubspaceSplit,
        a: C64,
        beta: ComplexVector,
        gamma: ComplexVector,
        d: ComplexMatrix,
        u: ComplexMatrix,
    ) -> Result<Self> {
        let n = split.total();
        if n == 0 {
            return Err(Error::ShapeMismatch(
                "colligation space is zero-dimensional".into(),
            ));
        }
        if beta.len() != n || gamma.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "beta/gamma have lengths {}/{}, expected {n}",
                beta.len(),
                gamma.len()
            )));
        }
        check_square(&d, n, "D")?;
        check_square(&u, n, "U")?;
        let vectors_finite = beta
            .iter()
            .chain(gamma.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !(a.re.is_finite()
            && a.im.is_finite()
            && vectors_finite
            && is_finite(&d)
            && is_finite(&u))
        {
            return Err(Error::NonFinite("colligation".into()));
        }
        Ok(Colligation {
            r,
            split,
            a,
            beta,
            gamma,
            d,
            u,
        })
    }

    /// Splits a unitary on `C ⊕ M` into its blocks.
    pub fn from_block(
        r: SkewParam,
        split: SubspaceSplit,
        l: &ComplexMatrix,
        u: ComplexMatrix,
    ) -> Result<Self> {
        let n = split.total();
        check_square(l, n + 1, "L")?;
        let a = l[(0, 0)];
        let beta = ComplexVector::from_fn(n, |i, _| l[(0, i + 1)].conj());
        let gamma = ComplexVector::from_fn(n, |i, _| l[(i + 1, 0)]);
        let d = l.view((1, 1), (n, n)).into_owned();
        Colligation::new(r, split, a, beta, gamma, d, u)
    }

    pub fn dim(&self) -> usize {
        self.split.total()
    }

    pub fn r_operator(&self) -> ROperator {
        build_r(self.split, self.r)
    }

    /// The block operator `L`.
    pub fn l_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut l = ComplexMatrix::zeros(n + 1, n + 1);
        l[(0, 0)] = self.a;
        l.view_mut((0, 1), (1, n)).copy_from(&self.beta.adjoint());
        l.view_mut((1, 0), (n, 1)).copy_from(&self.gamma);
        l.view_mut((1, 1), (n, n)).copy_from(&self.d);
        l
    }
}

/// One named residual against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Residuals `‖L*L − I‖`, `‖LL* − I‖`, `‖U*U − I‖`, `‖UU* − I‖` and the
/// split sanity check; failures are reported, never raised.
pub fn validate_colligation(c: &Colligation, tol: f64) -> ValidationReport {
    let l = c.l_matrix();
    let id_l = identity(l.nrows());
    let id_u = identity(c.u.nrows());
    let norm = crate::linalg::spectral_norm;
    let checks = vec![
        Check::new("l_star_l", norm(&(l.adjoint() * &l - &id_l)), tol),
        Check::new("l_l_star", norm(&(&l * l.adjoint() - &id_l)), tol),
        Check::new("u_star_u", norm(&(c.u.adjoint() * &c.u - &id_u)), tol),
        Check::new("u_u_star", norm(&(&c.u * c.u.adjoint() - &id_u)), tol),
        Check::new("split", if c.split.is_proper() { 0.0 } else { 1.0 }, 0.0),
    ];
    let passed = checks.iter().all(Check::passed);
    ValidationReport { checks, passed }
}

/// `max(‖L*L − I‖, ‖LL* − I‖)`.
pub fn l_unitarity_defect(c: &Colligation) -> f64 {
    unitarity_defect(&c.l_matrix())
}
