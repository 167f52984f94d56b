//! Command-line driver: argument parsing, the verification campaigns behind
//! each subcommand, and the JSON report they emit.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{catalog_crosscheck, catalog_entry, rank_one_build};
use crate::colligation::{
    build_r, l_unitarity_defect, validate_colligation, Check, Colligation, SubspaceSplit,
};
use crate::domains::{
    in_rg, mobius_phi, sample_rd_times_d, sample_rg, symmetric_coords, SkewParam,
};
use crate::error::{Error, Result};
use crate::io;
use crate::kernels::{factorization_residual, kernel_y, kernel_z, KernelContext};
use crate::linalg::{min_hermitian_eigenvalue, random_unitary, spectral_norm};
use crate::realization::{
    default_sample_count, eval_f, model_residual, realization_from_model, schur_certify,
};
use crate::synthesis::{
    default_point_count, default_points, gr_model_residual, kernel_identity_residual, synthesize,
    w_symmetry_residual, wrap_as_gr_model,
};

/// Random unitaries drawn per kernel-check campaign.
const KERNEL_UNITARIES: u64 = 5;
/// Side of the pair grid used for model residuals in `certify`.
const CERTIFY_GRID: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Check unitarity of a colligation file.
    Validate,
    /// Sample r·G and certify |f| ≤ 1 and the model identity.
    Certify,
    /// Run the bidisc-to-r·G pipeline on a model spec file.
    Synthesize,
    /// Check the kernel factorization and substitution identities.
    KernelCheck,
    /// Compare closed-form and realized evaluation of a catalog entry.
    Catalog,
    /// Draw seeded points of r·G.
    Sample,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Validate => "validate",
            CommandKind::Certify => "certify",
            CommandKind::Synthesize => "synthesize",
            CommandKind::KernelCheck => "kernel-check",
            CommandKind::Catalog => "catalog",
            CommandKind::Sample => "sample",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "skewbidisc",
    version,
    about = "Realizations and models of Schur functions on r·G"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[arg(long = "r", global = true, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Catalog entry: upsilon, magic, blend or rank-one.
    #[arg(long, global = true)]
    pub name: Option<String>,
    /// Subspace split as `d1,d2`.
    #[arg(long, global = true, default_value = "2,2")]
    pub dims: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub r: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub name: Option<String>,
    pub dims: (usize, usize),
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let bad = || {
        Error::Config(format!(
            "--dims expects `d1,d2` with positive integers, got `{s}`"
        ))
    };
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let d1: usize = a.trim().parse().map_err(|_| bad())?;
    let d2: usize = b.trim().parse().map_err(|_| bad())?;
    if d1 == 0 || d2 == 0 {
        return Err(bad());
    }
    Ok((d1, d2))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        if !(cli.r > 0.0 && cli.r < 1.0) {
            return Err(Error::Config(format!(
                "--r must lie in (0, 1), got {}",
                cli.r
            )));
        }
        if !(cli.tol > 0.0 && cli.tol.is_finite()) {
            return Err(Error::Config(format!(
                "--tol must be positive, got {}",
                cli.tol
            )));
        }
        Ok(RunConfig {
            command: cli.command,
            r: cli.r,
            samples: cli.samples,
            seed: cli.seed,
            tol: cli.tol,
            input_path: cli.input.clone(),
            output_path: cli.output.clone(),
            name: cli.name.clone(),
            dims: parse_dims(&cli.dims)?,
        })
    }

    pub fn skew(&self) -> Result<SkewParam> {
        SkewParam::new(self.r).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub max_residual: f64,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub sample_count: usize,
    pub elapsed_ms: f64,
}

impl Report {
    fn new(cfg: &RunConfig, checks: Vec<Check>, sample_count: usize, start: Instant) -> Self {
        Report {
            command: cfg.command.name().to_string(),
            passed: checks.iter().all(Check::passed),
            max_residual: checks.iter().map(|c| c.residual).fold(0.0, f64::max),
            checks,
            seed: cfg.seed,
            sample_count,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Result<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    run(&RunConfig::from_cli(&cli)?)
}

/// 0 when the report passed, 1 for failed checks or numerical errors, 2 for
/// configuration, parse and file errors.
pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) if r.passed => 0,
        Ok(_) => 1,
        Err(Error::Config(_) | Error::Parse(_) | Error::Io(_) | Error::InvalidSkew(_)) => 2,
        Err(_) => 1,
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        CommandKind::Validate => cmd_validate(cfg),
        CommandKind::Certify => cmd_certify(cfg),
        CommandKind::Synthesize => cmd_synthesize(cfg),
        CommandKind::KernelCheck => cmd_kernel_check(cfg),
        CommandKind::Catalog => cmd_catalog(cfg),
        CommandKind::Sample => cmd_sample(cfg),
    }
}

fn require_input(cfg: &RunConfig) -> Result<&PathBuf> {
    cfg.input_path
        .as_ref()
        .ok_or_else(|| Error::Config(format!("`{}` needs --input", cfg.command.name())))
}

fn load_colligation(cfg: &RunConfig) -> Result<Colligation> {
    io::colligation_from_json(&io::read_text(require_input(cfg)?)?)
}

fn catalog_colligation(cfg: &RunConfig, name: &str) -> Result<Colligation> {
    let p = catalog_entry(name, cfg.skew()?, cfg.seed)?;
    Ok(rank_one_build(&p)?.0)
}

fn cmd_validate(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let c = load_colligation(cfg)?;
    let report = validate_colligation(&c, cfg.tol);
    Ok(Report::new(cfg, report.checks, 0, start))
}

fn cmd_certify(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let c = match (&cfg.input_path, &cfg.name) {
        (Some(_), _) => load_colligation(cfg)?,
        (None, Some(name)) => catalog_colligation(cfg, name)?,
        (None, None) => return Err(Error::Config("`certify` needs --input or --name".into())),
    };
    let cert = schur_certify(&c, cfg.samples, cfg.seed, cfg.tol)?;
    let grid = sample_rg(cfg.samples.min(CERTIFY_GRID), c.r, cfg.seed.wrapping_add(1));
    let mut grid_res: f64 = 0.0;
    for s in &grid {
        for t in &grid {
            grid_res = grid_res.max(model_residual(&c, s, t)?);
        }
    }
    let checks = vec![
        Check::new("schur_bound", cert.max_abs_f, 1.0 + cfg.tol),
        Check::new("diag_model", cert.max_diag_residual, 1e-9),
        Check::new("model_grid", grid_res, 1e-9),
        Check::new("positivity", (-cert.min_defect_eigenvalue).max(0.0), 1e-12),
        Check::new("l_unitary", l_unitarity_defect(&c), 1e-8),
    ];
    Ok(Report::new(cfg, checks, cfg.samples, start))
}

fn cmd_synthesize(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let spec = io::spec_from_json(&io::read_text(require_input(cfg)?)?)?;
    let r = spec.r;
    let tol = cfg.tol;
    let pts = default_points(&spec, default_point_count(&spec));
    let sc = spec.check(&pts)?;
    let mut checks = vec![
        Check::new("bidisc_model", sc.bidisc_model, tol),
        Check::new("sigma_symmetry", sc.sigma_symmetry, tol),
    ];
    if !checks.iter().all(Check::passed) {
        return Ok(Report::new(cfg, checks, 0, start));
    }
    let m = match synthesize(&spec, &pts, tol) {
        Ok(m) => m,
        Err(Error::GramianMismatch {
            check,
            residual,
            tol,
        }) => {
            checks.push(Check::new(check, residual, tol));
            return Ok(Report::new(cfg, checks, 0, start));
        }
        Err(e) => return Err(e),
    };
    let rep = &m.residual_report;
    checks.push(Check::new("gramian", rep.gramian, tol));
    checks.push(Check::new("intertwining", rep.intertwining, 1e-9));

    let lgrid = sample_rd_times_d(10, r, cfg.seed);
    checks.push(Check::new(
        "w_symmetry",
        w_symmetry_residual(&m, &lgrid)?,
        1e-9,
    ));
    checks.push(Check::new(
        "kernel_identity",
        kernel_identity_residual(&m, &lgrid)?,
        1e-9,
    ));
    let sgrid = sample_rg(12, r, cfg.seed.wrapping_add(1));
    checks.push(Check::new("gr_model", gr_model_residual(&m, &sgrid)?, 1e-8));

    let g = wrap_as_gr_model(&m)?;
    let gpts = sample_rg(default_sample_count(m.dim), r, cfg.seed.wrapping_add(2));
    let c = match realization_from_model(&g, &gpts, tol) {
        Ok(c) => c,
        Err(Error::GramianMismatch {
            check,
            residual,
            tol,
        }) => {
            checks.push(Check::new(check, residual, tol));
            return Ok(Report::new(cfg, checks, 0, start));
        }
        Err(e) => return Err(e),
    };
    let mut roundtrip: f64 = 0.0;
    for s in sample_rg(cfg.samples, r, cfg.seed.wrapping_add(3)) {
        roundtrip = roundtrip.max((eval_f(&c, &s)? - m.eval_f(&s)?).norm());
    }
    checks.push(Check::new("roundtrip", roundtrip, 1e-8));
    checks.push(Check::new("l_unitary", l_unitarity_defect(&c), 1e-8));
    if let Some(path) = &cfg.output_path {
        io::write_text(path, &io::colligation_to_json(&c))?;
    }
    Ok(Report::new(cfg, checks, cfg.samples, start))
}

fn cmd_kernel_check(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let r = cfg.skew()?;
    let (d1, d2) = cfg.dims;
    let r_op = build_r(SubspaceSplit::new(d1, d2)?, r);
    let (mut fact, mut subst, mut herm, mut pos): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..KERNEL_UNITARIES {
        let seed = cfg.seed.wrapping_add(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = KernelContext::new(random_unitary(&mut rng, d1 + d2), r_op.clone())?;
        let ss = sample_rg(cfg.samples + 1, r, seed);
        for w in ss.windows(2) {
            fact = fact.max(factorization_residual(&ctx, &w[0], &w[1])?);
            let y = kernel_y(&ctx, &w[0], &w[0])?;
            pos = pos.max(-min_hermitian_eigenvalue(&y));
        }
        let ls = sample_rd_times_d(cfg.samples + 1, r, seed);
        for w in ls.windows(2) {
            let z = kernel_z(&ctx, &w[0], &w[1])?;
            let (s, t) = (symmetric_coords(&w[0], r), symmetric_coords(&w[1], r));
            subst = subst.max(spectral_norm(&(&z - kernel_y(&ctx, &s, &t)?)));
            herm = herm.max(spectral_norm(
                &(z.adjoint() - kernel_z(&ctx, &w[1], &w[0])?),
            ));
        }
    }
    let checks = vec![
        Check::new("factorization", fact, 1e-10),
        Check::new("substitution", subst, 1e-10),
        Check::new("hermitian", herm, 1e-12),
        Check::new("y_positivity", pos.max(0.0), 1e-10),
    ];
    Ok(Report::new(cfg, checks, cfg.samples, start))
}

fn cmd_catalog(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let name = cfg
        .name
        .as_deref()
        .ok_or_else(|| Error::Config("`catalog` needs --name".into()))?;
    let r = cfg.skew()?;
    let p = catalog_entry(name, r, cfg.seed)?;
    let cross = catalog_crosscheck(&p, cfg.samples, cfg.seed)?;
    let (c, _) = rank_one_build(&p)?;
    let cert = schur_certify(&c, cfg.samples, cfg.seed, cfg.tol)?;
    let mut checks = vec![
        Check::new("crosscheck", cross.max_difference, 1e-10),
        Check::new("schur_bound", cert.max_abs_f, 1.0 + cfg.tol),
        Check::new("l_unitary", l_unitarity_defect(&c), 1e-10),
    ];
    if name == "upsilon" {
        let mut gap: f64 = 0.0;
        for s in sample_rg(cfg.samples, r, cfg.seed) {
            let direct = mobius_phi(p.w1 / r.value(), &s)? / r.value();
            gap = gap.max((eval_f(&c, &s)? - direct).norm());
        }
        checks.push(Check::new("upsilon_identity", gap, 1e-12));
    }
    Ok(Report::new(cfg, checks, cfg.samples, start))
}

fn cmd_sample(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let r = cfg.skew()?;
    let pts = sample_rg(cfg.samples, r, cfg.seed);
    let outside = pts.iter().filter(|s| !in_rg(s, r, 0.0)).count();
    if let Some(path) = &cfg.output_path {
        io::write_text(path, &io::points_to_json(&pts))?;
    }
    let checks = vec![Check::new("membership", outside as f64, 0.0)];
    Ok(Report::new(cfg, checks, pts.len(), start))
}
