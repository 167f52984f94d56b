//! Rank-one colligations on `C²` and the closed forms of the functions they
//! realize, addressable by name.
//!
//! The closed form uses scalar arithmetic on top of [`mobius_phi`] only, so
//! comparing it with [`eval_f`] exercises two independent evaluation paths.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::colligation::{Colligation, SubspaceSplit};
use crate::domains::{mobius_phi, require_rg, sample_rg, Point2, SkewParam};
use crate::error::{Error, Result};
use crate::linalg::{c64, diag, inner, outer, ComplexVector, C64};
use crate::realization::eval_f;

/// Tolerance for the rank-one parameter conditions.
pub const PARAM_TOL: f64 = 1e-10;

/// Catalog names accepted by [`catalog_entry`].
pub const CATALOG_NAMES: [&str; 4] = ["upsilon", "magic", "blend", "rank-one"];

const OMEGA1_ARG: f64 = 0.7;
const OMEGA2_ARG: f64 = -1.3;

/// Data of a colligation with `a = 0`, `D = u v*`, `U = diag(ω₁, ω₂)` on
/// `C = C ⊕ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneParams {
    pub r: SkewParam,
    pub w1: C64,
    pub w2: C64,
    pub gamma: ComplexVector,
    pub beta: ComplexVector,
    pub u: ComplexVector,
    pub v: ComplexVector,
}

impl RankOneParams {
    /// `|ωᵢ| = 1`, and `{γ, u}`, `{β, v}` orthonormal bases of `C²`.
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("ω₁", self.w1), ("ω₂", self.w2)] {
            if (w.norm() - 1.0).abs() > PARAM_TOL {
                return Err(Error::InvalidParams(format!(
                    "|{name}| = {} is not 1",
                    w.norm()
                )));
            }
        }
        let vecs = [
            ("γ", &self.gamma),
            ("β", &self.beta),
            ("u", &self.u),
            ("v", &self.v),
        ];
        for (name, x) in vecs {
            if x.len() != 2 {
                return Err(Error::InvalidParams(format!("{name} must lie in C²")));
            }
            if (x.norm() - 1.0).abs() > PARAM_TOL {
                return Err(Error::InvalidParams(format!(
                    "‖{name}‖ = {} is not 1",
                    x.norm()
                )));
            }
        }
        let ug = inner(&self.u, &self.gamma).norm();
        if ug > PARAM_TOL {
            return Err(Error::InvalidParams(format!("<u, γ> = {ug:e} is not 0")));
        }
        let vb = inner(&self.v, &self.beta).norm();
        if vb > PARAM_TOL {
            return Err(Error::InvalidParams(format!("<v, β> = {vb:e} is not 0")));
        }
        Ok(())
    }

    pub fn closed_form(&self) -> RankOneClosedForm {
        RankOneClosedForm { p: self.clone() }
    }
}

/// `f(s) = <S adj(1 − DS) γ, β>/det(1 − DS)` written out entrywise, with
/// `S = diag(φ_{ω₁}, r⁻¹φ_{ω₂/r})` and
/// `det(1 − DS) = 1 − u₁v̄₁φ_{ω₁}(s) − u₂v̄₂r⁻¹φ_{ω₂/r}(s)`.
#[derive(Debug, Clone)]
pub struct RankOneClosedForm {
    p: RankOneParams,
}

impl RankOneClosedForm {
    fn phis(&self, s: &Point2) -> Result<(C64, C64)> {
        require_rg(s, self.p.r, "s")?;
        let r = self.p.r.value();
        Ok((mobius_phi(self.p.w1, s)?, mobius_phi(self.p.w2 / r, s)? / r))
    }

    pub fn denominator(&self, s: &Point2) -> Result<C64> {
        let (p1, p2) = self.phis(s)?;
        let (u, v) = (&self.p.u, &self.p.v);
        Ok(c64(1.0, 0.0) - u[0] * v[0].conj() * p1 - u[1] * v[1].conj() * p2)
    }

    pub fn eval(&self, s: &Point2) -> Result<C64> {
        let (p1, p2) = self.phis(s)?;
        let (g, b, u, v) = (&self.p.gamma, &self.p.beta, &self.p.u, &self.p.v);
        let one = c64(1.0, 0.0);
        let (a11, a22) = (u[0] * v[0].conj(), u[1] * v[1].conj());
        let den = one - a11 * p1 - a22 * p2;
        if den.norm() < 1e-14 {
            return Err(Error::PoleAtInput(den.norm()));
        }
        let m = [
            [p1 * (one - a22 * p2), u[0] * v[1].conj() * p1 * p2],
            [u[1] * v[0].conj() * p1 * p2, p2 * (one - a11 * p1)],
        ];
        let mg0 = m[0][0] * g[0] + m[0][1] * g[1];
        let mg1 = m[1][0] * g[0] + m[1][1] * g[1];
        Ok((mg0 * b[0].conj() + mg1 * b[1].conj()) / den)
    }
}

/// Builds the colligation without checking the parameter conditions.
pub fn rank_one_colligation_unchecked(p: &RankOneParams) -> Result<Colligation> {
    Colligation::new(
        p.r,
        SubspaceSplit::new(1, 1)?,
        c64(0.0, 0.0),
        p.beta.clone(),
        p.gamma.clone(),
        outer(&p.u, &p.v),
        diag(&[p.w1, p.w2]),
    )
}

pub fn rank_one_build(p: &RankOneParams) -> Result<(Colligation, RankOneClosedForm)> {
    p.validate()?;
    Ok((rank_one_colligation_unchecked(p)?, p.closed_form()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub max_difference: f64,
    pub min_denominator: f64,
    pub sample_count: usize,
}

/// Largest `|closed form − eval_f|` over `n` seeded samples of `r·G`.
pub fn catalog_crosscheck(p: &RankOneParams, n: usize, seed: u64) -> Result<CrossCheck> {
    let (c, cf) = rank_one_build(p)?;
    let mut out = CrossCheck {
        max_difference: 0.0,
        min_denominator: f64::INFINITY,
        sample_count: n,
    };
    for s in sample_rg(n, p.r, seed) {
        let diff = (cf.eval(&s)? - eval_f(&c, &s)?).norm();
        out.max_difference = out.max_difference.max(diff);
        out.min_denominator = out.min_denominator.min(cf.denominator(&s)?.norm());
    }
    Ok(out)
}

fn e(k: usize) -> ComplexVector {
    let mut x = ComplexVector::zeros(2);
    x[k] = c64(1.0, 0.0);
    x
}

fn cvec(a: f64, b: f64) -> ComplexVector {
    ComplexVector::from_vec(vec![c64(a, 0.0), c64(b, 0.0)])
}

/// `Υ_{ω,r}`: `β = γ = e₂`, `u = v = e₁`.
pub fn upsilon_params(r: SkewParam, w: C64) -> RankOneParams {
    RankOneParams {
        r,
        w1: w,
        w2: w,
        gamma: e(1),
        beta: e(1),
        u: e(0),
        v: e(0),
    }
}

/// `Φ_ω`: `β = γ = e₁`, `u = v = e₂`.
pub fn magic_params(r: SkewParam, w: C64) -> RankOneParams {
    RankOneParams {
        r,
        w1: w,
        w2: w,
        gamma: e(0),
        beta: e(0),
        u: e(1),
        v: e(1),
    }
}

/// `φ_{ω₁}(r − √2φ_{ω₂/r})/(r√2 − φ_{ω₂/r})`.
pub fn blend_params(r: SkewParam, w1: C64, w2: C64) -> RankOneParams {
    RankOneParams {
        r,
        w1,
        w2,
        gamma: cvec(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        beta: e(0),
        u: cvec(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        v: e(1),
    }
}

fn random_unit<R: Rng>(rng: &mut R) -> ComplexVector {
    let x = ComplexVector::from_fn(2, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = x.norm();
    x / c64(n, 0.0)
}

/// A unit vector orthogonal to `x ∈ C²`, rotated by a random phase.
fn random_orthogonal<R: Rng>(rng: &mut R, x: &ComplexVector) -> ComplexVector {
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    ComplexVector::from_vec(vec![-x[1].conj() * phase, x[0].conj() * phase])
}

pub fn random_rank_one_params(r: SkewParam, seed: u64) -> RankOneParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let w1 = C64::from_polar(1.0, rng.random_range(0.0..tau));
    let w2 = C64::from_polar(1.0, rng.random_range(0.0..tau));
    let gamma = random_unit(&mut rng);
    let u = random_orthogonal(&mut rng, &gamma);
    let beta = random_unit(&mut rng);
    let v = random_orthogonal(&mut rng, &beta);
    RankOneParams {
        r,
        w1,
        w2,
        gamma,
        beta,
        u,
        v,
    }
}

/// Parameters of a named catalog entry. `seed` only matters for "rank-one".
pub fn catalog_entry(name: &str, r: SkewParam, seed: u64) -> Result<RankOneParams> {
    let w1 = C64::from_polar(1.0, OMEGA1_ARG);
    let w2 = C64::from_polar(1.0, OMEGA2_ARG);
    match name {
        "upsilon" => Ok(upsilon_params(r, w1)),
        "magic" => Ok(magic_params(r, w1)),
        "blend" => Ok(blend_params(r, w1, w2)),
        "rank-one" => Ok(random_rank_one_params(r, seed)),
        other => Err(Error::Config(format!(
            "unknown catalog entry `{other}`; expected one of {}",
            CATALOG_NAMES.join(", ")
        ))),
    }
}
