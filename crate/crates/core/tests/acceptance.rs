//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use skewbidisc::catalog::{
    catalog_crosscheck, catalog_entry, random_rank_one_params, rank_one_build,
    rank_one_colligation_unchecked, upsilon_params, CATALOG_NAMES,
};
use skewbidisc::colligation::{
    build_r, norm_bound, s_t, s_ur, validate_colligation, Colligation, SubspaceSplit,
};
use skewbidisc::domains::{
    in_rg, mobius_phi, sample_g, sample_rd_times_d, sample_rg, scale_psi, scale_psi_inv,
    symmetric_coords, upsilon, Point2, SkewParam,
};
use skewbidisc::kernels::{factorization_residual, kernel_y, kernel_z, KernelContext};
use skewbidisc::linalg::{
    c64, identity, inverse, random_unitary, spectral_norm, ComplexMatrix, C64,
};
use skewbidisc::realization::{eval_f, model_residual, realization_from_model, schur_certify};
use skewbidisc::synthesis::{
    default_points, gr_model_residual, kernel_identity_residual, product_spec, synthesize,
    w_symmetry_residual, wrap_as_gr_model, BidiscModelSpec, PolyScalar, PolyVectorMap,
};
use skewbidisc::Error;

const RS: [f64; 3] = [0.25, 0.5, 0.9];
const SPLITS: [(usize, usize); 2] = [(1, 1), (2, 3)];
const UNITARIES: u64 = 5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn skew(r: f64) -> SkewParam {
    SkewParam::new(r).unwrap()
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Every `(r, split, U)` configuration of the contraction sweep.
fn configurations() -> Vec<(SkewParam, usize, usize, u64, ComplexMatrix)> {
    let mut out = Vec::new();
    for (i, &r) in RS.iter().enumerate() {
        for (j, &(d1, d2)) in SPLITS.iter().enumerate() {
            for k in 0..UNITARIES {
                let seed = 1000 * i as u64 + 100 * j as u64 + k;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                out.push((skew(r), d1, d2, seed, random_unitary(&mut rng, d1 + d2)));
            }
        }
    }
    out
}

fn contraction_sweep() -> Outcome {
    let (mut worst_norm, mut worst_gap): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for (r, d1, d2, seed, u) in configurations() {
        let op = build_r(SubspaceSplit::new(d1, d2).unwrap(), r);
        for s in sample_rg(1000, r, seed) {
            let n = spectral_norm(&s_ur(&s, &u, &op).unwrap());
            let bound = norm_bound(&scale_psi_inv(&s, r)).unwrap();
            worst_norm = worst_norm.max(n);
            worst_gap = worst_gap.max(n - bound);
        }
    }
    verdict(
        worst_norm < 1.0 && worst_gap <= 1e-10,
        format!("max ‖s_UR‖ = {worst_norm:.6}, max(‖s_UR‖ − bound) = {worst_gap:.2e}"),
    )
}

fn kernel_factorization() -> Outcome {
    let mut worst: f64 = 0.0;
    for (r, d1, d2, seed, u) in configurations() {
        let ctx = KernelContext::new(u, build_r(SubspaceSplit::new(d1, d2).unwrap(), r)).unwrap();
        let ss = sample_rg(101, r, seed + 7);
        for w in ss.windows(2) {
            worst = worst.max(factorization_residual(&ctx, &w[0], &w[1]).unwrap());
        }
    }
    verdict(
        worst < 1e-10,
        format!("max residual = {worst:.2e} over 100 pairs × 30 configurations"),
    )
}

fn substitution_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (r, d1, d2, seed, u) in configurations() {
        let ctx = KernelContext::new(u, build_r(SubspaceSplit::new(d1, d2).unwrap(), r)).unwrap();
        let ls = sample_rd_times_d(101, r, seed + 11);
        for w in ls.windows(2) {
            let z = kernel_z(&ctx, &w[0], &w[1]).unwrap();
            let s = symmetric_coords(&w[0], r);
            let t = symmetric_coords(&w[1], r);
            worst = worst.max(spectral_norm(&(z - kernel_y(&ctx, &s, &t).unwrap())));
        }
    }
    verdict(
        worst < 1e-10,
        format!("max ‖Z − Y‖ = {worst:.2e} over 100 pairs × 30 configurations"),
    )
}

fn random_valid_colligation(seed: u64, r: SkewParam, d1: usize, d2: usize) -> Colligation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = d1 + d2;
    let l = random_unitary(&mut rng, n + 1);
    let u = random_unitary(&mut rng, n);
    Colligation::from_block(r, SubspaceSplit::new(d1, d2).unwrap(), &l, u).unwrap()
}

/// The catalog colligations at r = 0.5 followed by three random ones.
fn test_colligations() -> Vec<(String, Colligation)> {
    let r = skew(0.5);
    let mut out: Vec<(String, Colligation)> = CATALOG_NAMES
        .iter()
        .map(|&name| {
            let p = catalog_entry(name, r, 17).unwrap();
            (name.to_string(), rank_one_build(&p).unwrap().0)
        })
        .collect();
    for (k, &(rv, d1, d2)) in [(0.25, 1, 2), (0.5, 2, 2), (0.9, 3, 1)].iter().enumerate() {
        let c = random_valid_colligation(500 + k as u64, skew(rv), d1, d2);
        assert!(validate_colligation(&c, 1e-12).passed);
        out.push((format!("random-{k}"), c));
    }
    out
}

fn model_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    for (i, (name, c)) in test_colligations().into_iter().enumerate() {
        let pts = sample_rg(20, c.r, 600 + i as u64);
        for s in &pts {
            for t in &pts {
                let res = model_residual(&c, s, t).unwrap();
                if res > worst {
                    worst = res;
                    worst_name = name.clone();
                }
            }
        }
    }
    verdict(
        worst < 1e-9,
        format!("max residual = {worst:.2e} ({worst_name}) on 20×20 grids"),
    )
}

fn schur_certification() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut all = true;
    for (i, (_, c)) in test_colligations().into_iter().enumerate() {
        let rep = schur_certify(&c, 1000, 700 + i as u64, 1e-12).unwrap();
        all &= rep.passed;
        worst = worst.max(rep.max_abs_f);
    }
    verdict(
        all && worst <= 1.0 + 1e-12,
        format!("max |f| = {worst:.12} over 1000 samples × 7 colligations"),
    )
}

fn catalog_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_den = f64::INFINITY;
    for &rv in &RS {
        for name in CATALOG_NAMES {
            let p = catalog_entry(name, skew(rv), 23).unwrap();
            let cc = catalog_crosscheck(&p, 500, 800).unwrap();
            worst = worst.max(cc.max_difference);
            min_den = min_den.min(cc.min_denominator);
        }
    }

    let mut ident: f64 = 0.0;
    for &rv in &RS {
        let r = skew(rv);
        for k in 0..4 {
            let w = C64::from_polar(1.0, 0.4 + 1.5 * k as f64);
            let (c, _) = rank_one_build(&upsilon_params(r, w)).unwrap();
            for s in sample_rg(500, r, 900 + k) {
                let via_phi = mobius_phi(w / rv, &s).unwrap() / rv;
                let defn =
                    (s.z2 * w / rv - s.z1 * 0.5) / (c64(1.0, 0.0) - s.z1 * w * 0.5 / rv) / rv;
                ident = ident
                    .max((eval_f(&c, &s).unwrap() - via_phi).norm())
                    .max((upsilon(w, r, &s).unwrap() - via_phi).norm())
                    .max((defn - via_phi).norm());
            }
        }
    }
    verdict(
        worst < 1e-10 && ident < 1e-12,
        format!("max |closed − realized| = {worst:.2e}, min |denominator| = {min_den:.3}, Υ identity gap = {ident:.2e}"),
    )
}

fn synthesis_pipeline() -> Outcome {
    let r = skew(0.5);
    let spec = product_spec(r);
    let m = synthesize(&spec, &default_points(&spec, 8), 1e-10).map_err(|e| e.to_string())?;
    let gram = m.residual_report.gramian;
    let grid = sample_rd_times_d(10, r, 31);
    let wsym = w_symmetry_residual(&m, &grid).unwrap();
    let kern = kernel_identity_residual(&m, &grid).unwrap();
    let gr = gr_model_residual(&m, &sample_rg(12, r, 32)).unwrap();
    let g = wrap_as_gr_model(&m).unwrap();
    let c = realization_from_model(&g, &sample_rg(12, r, 33), 1e-10).map_err(|e| e.to_string())?;
    let mut repro: f64 = 0.0;
    for s in sample_rg(200, r, 34) {
        repro = repro.max((eval_f(&c, &s).unwrap() - s.z2 / r.value()).norm());
    }
    let l = c.l_matrix();
    let l_defect = spectral_norm(&(l.adjoint() * &l - identity(l.nrows())))
        .max(spectral_norm(&(&l * l.adjoint() - identity(l.nrows()))));
    verdict(
        gram < 1e-10 && wsym < 1e-9 && kern < 1e-9 && gr < 1e-8 && repro < 1e-8 && l_defect < 1e-8,
        format!(
            "gramian {gram:.1e}, w-symmetry {wsym:.1e}, kernel {kern:.1e}, r·G model {gr:.1e}, f = s₂/r {repro:.1e}, L {l_defect:.1e}"
        ),
    )
}

fn algebraic_bridges() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut b1, mut b2, mut comm): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (i, &rv) in RS.iter().enumerate() {
        let r = skew(rv);
        let op = build_r(SubspaceSplit::new(2, 1).unwrap(), r);
        let u = random_unitary(&mut rng, 3);
        let rinv_u = op.inv() * &u;
        for s in sample_rg(200, r, 42 + i as u64) {
            let lhs = s_ur(&s, &u, &op).unwrap();
            b1 = b1.max(max_abs(&(lhs - s_t(&s, &rinv_u).unwrap() * op.inv())));
        }
        let t = random_unitary(&mut rng, 3) * c64(0.9, 0.0);
        let x = &t / c64(rv, 0.0);
        for q in sample_g(200, 52 + i as u64) {
            let lhs = s_t(&q, &t).unwrap();
            b2 = b2.max(max_abs(
                &(lhs - s_t(&scale_psi(&q, r), &x).unwrap() / c64(rv, 0.0)),
            ));
        }
        let ur = &u * op.inv();
        let id = identity(3);
        for l in sample_rd_times_d(200, r, 62 + i as u64) {
            let a = &id - &ur * l.z1;
            let b = &id - &ur * (l.z2 * rv);
            let ainv = inverse(&a).unwrap();
            comm = comm.max(max_abs(&(&ainv * &b - &b * &ainv)));
        }
    }
    verdict(
        b1 < 1e-11 && b2 < 1e-11 && comm < 1e-10,
        format!("s_UR bridge {b1:.1e}, scaling bridge {b2:.1e}, commutation {comm:.1e}"),
    )
}

fn negative_controls() -> Outcome {
    let r = skew(0.5);
    let spec = BidiscModelSpec::new(
        r,
        PolyVectorMap::monomial(
            0,
            0,
            skewbidisc::linalg::ComplexVector::from_element(1, c64(1.0, 0.0)),
        ),
        PolyVectorMap::zero(1),
        PolyScalar::new(vec![(1, 0, c64(1.0, 0.0))]),
    )
    .unwrap();
    let sym = matches!(
        synthesize(&spec, &default_points(&spec, 8), 1e-10),
        Err(Error::GramianMismatch { .. })
    );

    let mut p = random_rank_one_params(r, 71);
    p.u *= c64(1.01, 0.0);
    let perturbed = p.validate().is_err()
        && !validate_colligation(&rank_one_colligation_unchecked(&p).unwrap(), 1e-10).passed;

    let mut boundary = true;
    for &rv in &RS {
        boundary &= !in_rg(&Point2::real(2.0 * rv, rv * rv), skew(rv), 0.0);
    }
    verdict(
        sym && perturbed && boundary,
        format!("λ₁ spec rejected: {sym}, perturbed rank-one rejected: {perturbed}, (2r, r²) outside: {boundary}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("strict contraction sweep", contraction_sweep),
        ("kernel factorization", kernel_factorization),
        ("Z/Y substitution identity", substitution_identity),
        ("model identity for realizations", model_identity),
        ("Schur certification", schur_certification),
        ("catalog dual-path equivalence", catalog_equivalence),
        ("end-to-end synthesis pipeline", synthesis_pipeline),
        ("algebraic bridges", algebraic_bridges),
        ("negative controls", negative_controls),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS  {} {name}: {detail} [{ms} ms]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {} {name}: {detail} [{ms} ms]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
