//! Geometry of the bidisc `D²`, the symmetrized bidisc `G`, the skew domain
//! `G_r = π(D × rD)` and its scaled core `r·G = π(rD × rD)`.
//!
//! Membership is decided through the roots of `z² − s₁z + s₂`, which invert
//! the symmetrization map `π`. Sampling is deterministic in `(n, seed)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};

/// Default margin for the open-domain membership tests.
pub const DEFAULT_MARGIN: f64 = 1e-9;

const POLE_TOL: f64 = 1e-14;
const UNIMODULAR_TOL: f64 = 1e-12;

/// A point of `C²`. It carries no domain tag; membership is always checked
/// explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub z1: C64,
    pub z2: C64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 {
        z1: C64::new(0.0, 0.0),
        z2: C64::new(0.0, 0.0),
    };

    pub fn new(z1: C64, z2: C64) -> Self {
        Point2 { z1, z2 }
    }

    pub fn real(x1: f64, x2: f64) -> Self {
        Point2::new(c64(x1, 0.0), c64(x2, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        [self.z1, self.z2]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Componentwise modulus of the difference.
    pub fn dist(&self, other: &Point2) -> f64 {
        (self.z1 - other.z1).norm().max((self.z2 - other.z2).norm())
    }
}

/// The skew parameter `r`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SkewParam(f64);

impl SkewParam {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 && r < 1.0 {
            Ok(SkewParam(r))
        } else {
            Err(Error::InvalidSkew(r))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `π(λ) = (λ₁ + λ₂, λ₁λ₂)`.
pub fn pi_map(l: &Point2) -> Point2 {
    Point2::new(l.z1 + l.z2, l.z1 * l.z2)
}

/// `T_r(λ) = (λ₁, rλ₂)`.
pub fn t_r(l: &Point2, r: SkewParam) -> Point2 {
    Point2::new(l.z1, l.z2 * r.value())
}

/// The involution `λ^σ = (rλ₂, r⁻¹λ₁)`.
pub fn sigma(l: &Point2, r: SkewParam) -> Point2 {
    let r = r.value();
    Point2::new(l.z2 * r, l.z1 / r)
}

/// The scaling map `ψ_r(q) = (rq₁, r²q₂)` from `G` onto `r·G`.
pub fn scale_psi(q: &Point2, r: SkewParam) -> Point2 {
    let r = r.value();
    Point2::new(q.z1 * r, q.z2 * (r * r))
}

/// `ψ_r⁻¹(s) = (s₁/r, s₂/r²)`.
pub fn scale_psi_inv(s: &Point2, r: SkewParam) -> Point2 {
    let r = r.value();
    Point2::new(s.z1 / r, s.z2 / (r * r))
}

/// The roots of `z² − s₁z + s₂`, ordered by modulus descending and then by
/// argument ascending.
pub fn quad_roots(s: &Point2) -> (C64, C64) {
    let disc = (s.z1 * s.z1 - s.z2 * 4.0).sqrt();
    // Pick the sign that avoids cancellation, then recover the partner from
    // the product of the roots.
    let big = if (s.z1 + disc).norm() >= (s.z1 - disc).norm() {
        (s.z1 + disc) * 0.5
    } else {
        (s.z1 - disc) * 0.5
    };
    let small = if big.norm() > 0.0 {
        s.z2 / big
    } else {
        c64(0.0, 0.0)
    };
    let (ma, mb) = (big.norm(), small.norm());
    let tie = (ma - mb).abs() <= 1e-14 * ma.max(mb);
    if (!tie && ma > mb) || (tie && big.arg() <= small.arg()) {
        (big, small)
    } else {
        (small, big)
    }
}

pub fn in_disc(z: C64, radius: f64) -> bool {
    z.norm() < radius
}

/// `s ∈ G`: both roots of `z² − s₁z + s₂` have modulus below `1 − margin`.
pub fn in_g(s: &Point2, margin: f64) -> bool {
    if !s.is_finite() {
        return false;
    }
    let (a, b) = quad_roots(s);
    let bound = 1.0 - margin;
    a.norm() < bound && b.norm() < bound
}

/// `s ∈ G_r`: some assignment of the roots puts one in `D` and the other in
/// `rD`, both shrunk by `margin`.
pub fn in_gr(s: &Point2, r: SkewParam, margin: f64) -> bool {
    if !s.is_finite() {
        return false;
    }
    let (a, b) = quad_roots(s);
    let one = 1.0 - margin;
    let small = r.value() * (1.0 - margin);
    (a.norm() < one && b.norm() < small) || (b.norm() < one && a.norm() < small)
}

/// `s ∈ r·G`, i.e. `ψ_r⁻¹(s) ∈ G`.
pub fn in_rg(s: &Point2, r: SkewParam, margin: f64) -> bool {
    in_g(&scale_psi_inv(s, r), margin)
}

pub fn in_bidisc(l: &Point2, margin: f64) -> bool {
    l.is_finite() && in_disc(l.z1, 1.0 - margin) && in_disc(l.z2, 1.0 - margin)
}

/// `λ ∈ rD × D`, the home of the involution `σ`.
pub fn in_rd_times_d(l: &Point2, r: SkewParam, margin: f64) -> bool {
    l.is_finite() && in_disc(l.z1, r.value() * (1.0 - margin)) && in_disc(l.z2, 1.0 - margin)
}

pub(crate) fn require_rg(s: &Point2, r: SkewParam, what: &str) -> Result<()> {
    if in_rg(s, r, 0.0) {
        Ok(())
    } else {
        Err(Error::OutsideDomain(format!(
            "{what} = ({}, {}) is not in r·G for r = {}",
            s.z1,
            s.z2,
            r.value()
        )))
    }
}

pub(crate) fn require_rd_times_d(l: &Point2, r: SkewParam, what: &str) -> Result<()> {
    if in_rd_times_d(l, r, 0.0) {
        Ok(())
    } else {
        Err(Error::OutsideDomain(format!(
            "{what} = ({}, {}) is not in rD × D for r = {}",
            l.z1,
            l.z2,
            r.value()
        )))
    }
}

/// The preimage `λ = (ρ₁, ρ₂/r) ∈ rD × D` of `s ∈ r·G` under
/// `λ ↦ (λ₁ + rλ₂, rλ₁λ₂)`, with `ρ₁, ρ₂` the roots from [`quad_roots`].
/// The other preimage is `σ(λ)`.
pub fn lift_rg(s: &Point2, r: SkewParam) -> Point2 {
    let (a, b) = quad_roots(s);
    Point2::new(a, b / r.value())
}

/// `s = (λ₁ + rλ₂, rλ₁λ₂)`, which equals `π(T_r(λ))`.
pub fn symmetric_coords(l: &Point2, r: SkewParam) -> Point2 {
    pi_map(&t_r(l, r))
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the open unit disc by rejection from the square.
pub fn sample_disc<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    loop {
        let x: f64 = rng.random_range(-1.0..1.0);
        let y: f64 = rng.random_range(-1.0..1.0);
        if x * x + y * y < 1.0 {
            return c64(x, y);
        }
    }
}

/// `n` points `s = (r(a+b), r²ab)` with `a, b` uniform in `D`.
pub fn sample_rg(n: usize, r: SkewParam, seed: u64) -> Vec<Point2> {
    let mut rng = rng_for(seed);
    let rv = r.value();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = sample_disc(&mut rng);
        let b = sample_disc(&mut rng);
        let s = Point2::new((a + b) * rv, a * b * (rv * rv));
        // Re-deriving the roots can push a point within an ulp of the
        // boundary outside; those are rejected as well.
        if in_rg(&s, r, 0.0) {
            out.push(s);
        }
    }
    out
}

/// `n` points `π(a, b)` of `G` with `a, b` uniform in `D`.
pub fn sample_g(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = rng_for(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = pi_map(&Point2::new(sample_disc(&mut rng), sample_disc(&mut rng)));
        if in_g(&s, 0.0) {
            out.push(s);
        }
    }
    out
}

/// `n` points of `rD × D`.
pub fn sample_rd_times_d(n: usize, r: SkewParam, seed: u64) -> Vec<Point2> {
    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| Point2::new(sample_disc(&mut rng) * r.value(), sample_disc(&mut rng)))
        .collect()
}

/// `n` points of `D²`.
pub fn sample_bidisc(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| Point2::new(sample_disc(&mut rng), sample_disc(&mut rng)))
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Deterministic low-discrepancy points of `rD × D`, scaled by `scale` toward
/// the origin (Halton sequence in bases 2, 3, 5, 7 mapped to polar
/// coordinates with area-uniform radii).
pub fn halton_rd_times_d(n: usize, r: SkewParam, scale: f64) -> Vec<Point2> {
    (1..=n as u64)
        .map(|i| {
            let rad1 = radical_inverse(i, 2).sqrt();
            let ang1 = 2.0 * PI * radical_inverse(i, 3);
            let rad2 = radical_inverse(i, 5).sqrt();
            let ang2 = 2.0 * PI * radical_inverse(i, 7);
            Point2::new(
                C64::from_polar(scale * r.value() * rad1, ang1),
                C64::from_polar(scale * rad2, ang2),
            )
        })
        .collect()
}

/// `φ_z(s) = (s₂z − ½s₁)/(1 − ½s₁z)`.
pub fn mobius_phi(z: C64, s: &Point2) -> Result<C64> {
    let den = c64(1.0, 0.0) - s.z1 * z * 0.5;
    if den.norm() < POLE_TOL {
        return Err(Error::PoleAtInput(den.norm()));
    }
    Ok((s.z2 * z - s.z1 * 0.5) / den)
}

fn require_unimodular(w: C64) -> Result<()> {
    if (w.norm() - 1.0).abs() > UNIMODULAR_TOL {
        Err(Error::NotUnimodular(w.norm()))
    } else {
        Ok(())
    }
}

/// The magic function `Φ_ω` of `G`, for `|ω| = 1` and `s ∈ G`.
pub fn magic_phi(w: C64, s: &Point2) -> Result<C64> {
    require_unimodular(w)?;
    if !in_g(s, 0.0) {
        return Err(Error::OutsideDomain(format!(
            "({}, {}) is not in G",
            s.z1, s.z2
        )));
    }
    mobius_phi(w, s)
}

/// `Υ_{ω,r}(s) = r⁻¹ φ_{ω/r}(s)` on `r·G`.
pub fn upsilon(w: C64, r: SkewParam, s: &Point2) -> Result<C64> {
    require_unimodular(w)?;
    require_rg(s, r, "s")?;
    let rv = r.value();
    Ok(mobius_phi(w / rv, s)? / rv)
}

/// `f_q(λ) = (q₂λ − ½q₁)/(1 − ½q₁λ)`.
pub fn f_q(q: &Point2, l: C64) -> Result<C64> {
    mobius_phi(l, q)
}

/// Centre and radius of the disc `f_q(D)`.
pub fn fq_disc(q: &Point2) -> Result<(C64, f64)> {
    let m1 = q.z1.norm();
    if !(m1 < 2.0) {
        return Err(Error::DegenerateDenominator(m1));
    }
    let den = 4.0 - m1 * m1;
    let centre = (q.z1.conj() * q.z2 - q.z1) * (2.0 / den);
    let radius = (q.z1 * q.z1 - q.z2 * 4.0).norm() / den;
    Ok((centre, radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> SkewParam {
        SkewParam::new(v).unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn skew_param_bounds() {
        assert!(SkewParam::new(0.0).is_err());
        assert!(SkewParam::new(1.0).is_err());
        assert!(SkewParam::new(f64::NAN).is_err());
        assert_eq!(SkewParam::new(0.5).unwrap().value(), 0.5);
    }

    #[test]
    fn pi_map_examples() {
        assert_eq!(pi_map(&Point2::ORIGIN), Point2::ORIGIN);
        let p = pi_map(&Point2::real(0.3, 0.2));
        assert!(close(p.z1, c64(0.5, 0.0), 1e-15) && close(p.z2, c64(0.06, 0.0), 1e-15));
        for l in sample_bidisc(50, 1) {
            let swapped = Point2::new(l.z2, l.z1);
            assert!(pi_map(&l).dist(&pi_map(&swapped)) < 1e-15);
        }
    }

    #[test]
    fn t_r_examples() {
        let p = t_r(&Point2::real(0.3, 0.4), r(0.5));
        assert!(p.dist(&Point2::real(0.3, 0.2)) < 1e-15);
        let z = c64(0.1, -0.7);
        assert_eq!(
            t_r(&Point2::new(z, c64(0.0, 0.0)), r(0.9)),
            Point2::new(z, c64(0.0, 0.0))
        );
        let rr = r(0.6);
        for l in sample_rd_times_d(200, rr, 2) {
            let a = pi_map(&t_r(&l, rr));
            let b = pi_map(&t_r(&sigma(&l, rr), rr));
            assert!(a.dist(&b) < 1e-12);
        }
    }

    #[test]
    fn sigma_examples() {
        let p = sigma(&Point2::real(0.2, 0.5), r(0.5));
        assert!(p.dist(&Point2::real(0.25, 0.4)) < 1e-15);
        let rr = r(0.35);
        for l in sample_rd_times_d(500, rr, 3) {
            assert!(sigma(&sigma(&l, rr), rr).dist(&l) < 1e-14);
            assert!(in_rd_times_d(&sigma(&l, rr), rr, 0.0));
        }
    }

    #[test]
    fn scale_psi_examples() {
        assert_eq!(scale_psi(&Point2::ORIGIN, r(0.3)), Point2::ORIGIN);
        assert!(
            scale_psi(&Point2::real(1.0, 0.25), r(0.5)).dist(&Point2::real(0.5, 0.0625)) < 1e-15
        );
        let rr = r(0.45);
        for q in sample_g(500, 4) {
            assert!(in_rg(&scale_psi(&q, rr), rr, 0.0));
            assert!(scale_psi_inv(&scale_psi(&q, rr), rr).dist(&q) < 1e-14);
        }
    }

    #[test]
    fn quad_roots_examples() {
        let (a, b) = quad_roots(&Point2::ORIGIN);
        assert_eq!((a, b), (c64(0.0, 0.0), c64(0.0, 0.0)));

        let (a, b) = quad_roots(&Point2::real(0.5, 0.06));
        assert!(close(a, c64(0.3, 0.0), 1e-15) && close(b, c64(0.2, 0.0), 1e-15));

        // Complex pair 0.25 ± i·sqrt(0.07)/2 from the quadratic formula.
        let s = Point2::real(0.5, 0.08);
        let (a, b) = quad_roots(&s);
        let im = 0.07f64.sqrt() / 2.0;
        assert!(close(a, c64(0.25, -im), 1e-15), "{a}");
        assert!(close(b, c64(0.25, im), 1e-15), "{b}");
        assert!(close(a * b, s.z2, 1e-12) && close(a + b, s.z1, 1e-12));
        assert!((a.norm_sqr() - 0.08).abs() < 1e-15);
    }

    #[test]
    fn quad_roots_reconstruct_random_points() {
        for l in sample_bidisc(300, 5) {
            let s = pi_map(&l);
            let (a, b) = quad_roots(&s);
            assert!(a.norm() >= b.norm());
            assert!(close(a + b, s.z1, 1e-12) && close(a * b, s.z2, 1e-12));
        }
    }

    #[test]
    fn membership_examples() {
        assert!(in_g(&Point2::ORIGIN, DEFAULT_MARGIN));
        let rr = r(0.5);
        // λ₁ = 0.9, λ₂ = 0.9 gives (λ₁ + rλ₂, rλ₁λ₂).
        assert!(in_gr(&Point2::real(1.35, 0.405), rr, DEFAULT_MARGIN));
        assert!(!in_rg(&Point2::real(1.0, 0.25), rr, 0.0));
        assert!(!in_g(&Point2::real(2.0, 1.0), 0.0));
        assert!(in_bidisc(&Point2::real(0.5, -0.5), DEFAULT_MARGIN));
        assert!(!in_bidisc(&Point2::real(1.0, 0.0), 0.0));
        // (1.35, 0.405) is in G_r but not in r·G: its roots are 0.9 and 0.45.
        assert!(!in_rg(&Point2::real(1.35, 0.405), rr, 0.0));
    }

    #[test]
    fn membership_consistency() {
        let rr = r(0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let a = sample_disc(&mut rng);
            let b = sample_disc(&mut rng);
            assert!(in_gr(&pi_map(&Point2::new(a, b * rr.value())), rr, 0.0));
            assert!(in_rg(&scale_psi(&pi_map(&Point2::new(a, b)), rr), rr, 0.0));
        }
    }

    #[test]
    fn sampling_contract() {
        let rr = r(0.5);
        assert!(sample_rg(0, rr, 9).is_empty());
        assert_eq!(sample_rg(20, rr, 9), sample_rg(20, rr, 9));
        assert_ne!(sample_rg(20, rr, 9), sample_rg(20, rr, 10));
        assert!(sample_rg(1000, rr, 11).iter().all(|s| in_rg(s, rr, 0.0)));
    }

    #[test]
    fn lift_inverts_symmetric_coords() {
        let rr = r(0.7);
        for s in sample_rg(200, rr, 12) {
            let l = lift_rg(&s, rr);
            assert!(in_rd_times_d(&l, rr, 0.0));
            assert!(symmetric_coords(&l, rr).dist(&s) < 1e-14);
            assert!(symmetric_coords(&sigma(&l, rr), rr).dist(&s) < 1e-14);
        }
    }

    #[test]
    fn halton_points_are_interior() {
        let rr = r(0.5);
        let pts = halton_rd_times_d(64, rr, 0.8);
        assert!(pts.iter().all(|l| in_rd_times_d(l, rr, 0.2 - 1e-12)));
        assert_eq!(pts, halton_rd_times_d(64, rr, 0.8));
    }

    #[test]
    fn mobius_phi_examples() {
        assert_eq!(
            mobius_phi(c64(0.3, 0.8), &Point2::ORIGIN).unwrap(),
            c64(0.0, 0.0)
        );
        // (z0² − z0)/(1 − z0) = −z0
        let z0 = 0.3;
        let v = mobius_phi(c64(1.0, 0.0), &Point2::real(2.0 * z0, z0 * z0)).unwrap();
        assert!(close(v, c64(-z0, 0.0), 1e-15));
        let v = mobius_phi(c64(0.0, 0.0), &Point2::new(c64(1.0, 0.0), c64(0.4, 0.2))).unwrap();
        assert!(close(v, c64(-0.5, 0.0), 1e-15));
        assert!(matches!(
            mobius_phi(c64(1.0, 0.0), &Point2::real(2.0, 0.0)),
            Err(Error::PoleAtInput(_))
        ));
    }

    #[test]
    fn magic_phi_examples() {
        let w = C64::from_polar(1.0, 1.3);
        assert_eq!(magic_phi(w, &Point2::ORIGIN).unwrap(), c64(0.0, 0.0));
        let v = magic_phi(c64(1.0, 0.0), &Point2::real(0.5, 0.06)).unwrap();
        assert!(close(v, c64(-0.19 / 0.75, 0.0), 1e-15));
        assert!(matches!(
            magic_phi(c64(0.5, 0.0), &Point2::ORIGIN),
            Err(Error::NotUnimodular(_))
        ));
        assert!(matches!(
            magic_phi(w, &Point2::real(2.5, 0.0)),
            Err(Error::OutsideDomain(_))
        ));
        for s in sample_g(1000, 13) {
            assert!(magic_phi(w, &s).unwrap().norm() < 1.0);
        }
    }

    #[test]
    fn magic_phi_sup_grows_toward_boundary() {
        let w = C64::from_polar(1.0, -0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let pts: Vec<(C64, C64)> = (0..2000)
            .map(|_| (sample_disc(&mut rng), sample_disc(&mut rng)))
            .collect();
        let mut last = 0.0;
        for scale in [0.5, 0.8, 0.95, 0.999] {
            let sup = pts
                .iter()
                .map(|&(a, b)| {
                    magic_phi(w, &pi_map(&Point2::new(a * scale, b * scale)))
                        .unwrap()
                        .norm()
                })
                .fold(0.0, f64::max);
            assert!(sup < 1.0);
            assert!(sup >= last);
            last = sup;
        }
        assert!(last > 0.9);
    }

    #[test]
    fn upsilon_examples() {
        let w = C64::from_polar(1.0, 2.2);
        let rr = r(0.6);
        assert_eq!(upsilon(w, rr, &Point2::ORIGIN).unwrap(), c64(0.0, 0.0));
        for s in sample_rg(1000, rr, 15) {
            let u = upsilon(w, rr, &s).unwrap();
            let alt = mobius_phi(w / rr.value(), &s).unwrap() / rr.value();
            assert!(close(u, alt, 1e-12));
            assert!(u.norm() <= 1.0);
        }
        assert!(matches!(
            upsilon(w, rr, &Point2::real(2.0 * 0.6, 0.36)),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn fq_disc_examples() {
        assert_eq!(fq_disc(&Point2::ORIGIN).unwrap(), (c64(0.0, 0.0), 0.0));
        let p = c64(0.3, -0.2);
        let (c, rad) = fq_disc(&Point2::new(c64(0.0, 0.0), p)).unwrap();
        assert!(close(c, c64(0.0, 0.0), 1e-15) && (rad - p.norm()).abs() < 1e-15);
        assert!(matches!(
            fq_disc(&Point2::real(2.0, 0.0)),
            Err(Error::DegenerateDenominator(_))
        ));

        let q = Point2::real(0.6, 0.2);
        let (c, rad) = fq_disc(&q).unwrap();
        for k in 0..200 {
            let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / 200.0);
            let w = f_q(&q, z).unwrap();
            assert!(((w - c).norm() - rad).abs() < 1e-10);
        }
    }
}
