use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use skewbidisc::colligation::{
    build_r, norm_bound, s_ur, validate_colligation, Colligation, SubspaceSplit,
};
use skewbidisc::domains::{
    in_rd_times_d, in_rg, lift_rg, scale_psi_inv, sigma, symmetric_coords, Point2, SkewParam,
};
use skewbidisc::linalg::{
    c64, gram, identity, inverse, isometry_from_gramians, random_unitary, spectral_norm,
    unitarity_defect, unitary_extension, ComplexMatrix, ComplexVector, C64,
};
use skewbidisc::realization::{eval_f, model_residual};

fn skew() -> impl Strategy<Value = SkewParam> {
    (0.05f64..0.95).prop_map(|r| SkewParam::new(r).unwrap())
}

fn disc_point(radius: f64) -> impl Strategy<Value = C64> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(move |(t, a)| C64::from_polar(radius * t.sqrt(), a))
}

/// `(r, λ)` with `λ ∈ rD × D`, kept a little inside the boundary.
fn skew_and_lambda() -> impl Strategy<Value = (SkewParam, Point2)> {
    skew().prop_flat_map(|r| {
        let rv = r.value();
        (Just(r), disc_point(0.98 * rv), disc_point(0.98))
            .prop_map(|(r, a, b)| (r, Point2::new(a, b)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sigma_is_an_involution((r, l) in skew_and_lambda()) {
        let back = sigma(&sigma(&l, r), r);
        prop_assert!(back.dist(&l) < 1e-14);
        prop_assert!(in_rd_times_d(&sigma(&l, r), r, 0.0));
        let s = symmetric_coords(&l, r);
        prop_assert!(symmetric_coords(&sigma(&l, r), r).dist(&s) < 1e-14);
    }

    #[test]
    fn lift_inverts_symmetrization((r, l) in skew_and_lambda()) {
        let s = symmetric_coords(&l, r);
        prop_assert!(in_rg(&s, r, 0.0));
        let lifted = lift_rg(&s, r);
        let d = lifted.dist(&l).min(lifted.dist(&sigma(&l, r)));
        prop_assert!(d < 1e-7, "distance {}", d);
        prop_assert!(symmetric_coords(&lifted, r).dist(&s) < 1e-12);
    }

    #[test]
    fn s_ur_is_a_strict_contraction((r, l) in skew_and_lambda(), seed in any::<u64>(), d1 in 1usize..3, d2 in 1usize..3) {
        let s = symmetric_coords(&l, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, d1 + d2);
        let op = build_r(SubspaceSplit::new(d1, d2).unwrap(), r);
        let n = spectral_norm(&s_ur(&s, &u, &op).unwrap());
        prop_assert!(n < 1.0);
        prop_assert!(n <= norm_bound(&scale_psi_inv(&s, r)).unwrap() + 1e-10);
    }

    #[test]
    fn inverse_is_accurate(seed in any::<u64>(), n in 1usize..6, shift in 0.5f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_unitary(&mut rng, n) + identity(n) * c64(shift, 0.0);
        if let Ok(inv) = inverse(&m) {
            let cond = spectral_norm(&m) * spectral_norm(&inv);
            prop_assert!(spectral_norm(&(&m * inv - identity(n))) < 1e-13 * cond.max(1.0));
        }
    }

    #[test]
    fn unitary_extension_of_gramian_matched_families(seed in any::<u64>(), n in 1usize..5, k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_unitary(&mut rng, n);
        let a: Vec<ComplexVector> = (0..k).map(|i| random_unitary(&mut rng, n).column(i % n).into_owned() * c64(1.0 + i as f64, 0.0)).collect();
        let b: Vec<ComplexVector> = a.iter().map(|x| &w * x).collect();
        prop_assert!(spectral_norm(&(gram(&a) - gram(&b))) < 1e-12);
        let iso = isometry_from_gramians(&a, &b, 1e-10).unwrap();
        let ext = unitary_extension(&iso, n).unwrap();
        prop_assert!(unitarity_defect(&ext) < 1e-12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((&ext * x - y).norm() < 1e-10 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn random_colligations_are_schur(seed in any::<u64>(), r in skew(), d1 in 1usize..3, d2 in 1usize..3, l in disc_point(0.98), m in disc_point(0.98)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d1 + d2;
        let big: ComplexMatrix = random_unitary(&mut rng, n + 1);
        let c = Colligation::from_block(r, SubspaceSplit::new(d1, d2).unwrap(), &big, random_unitary(&mut rng, n)).unwrap();
        prop_assert!(validate_colligation(&c, 1e-12).passed);
        let rv = r.value();
        let s = symmetric_coords(&Point2::new(l * rv, m), r);
        let t = symmetric_coords(&Point2::new(m * rv, l), r);
        prop_assert!(eval_f(&c, &s).unwrap().norm() <= 1.0 + 1e-12);
        prop_assert!(model_residual(&c, &s, &t).unwrap() < 1e-9);
    }
}
