#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use packcover::disc::{
    audit_constants, calibrate, chase, derive_constants, random_greedy_packing, AuditReport, Constants,
    DiscPackingFile, OrientedSquare, RandomPackingParams,
};
use packcover::io::PackingFile;
use packcover::periodic::{build_cell, PackingConfig, PeriodicPacking};
use packcover::render::{render_svg, RenderOptions};
use packcover::verify::{verify_covering, verify_packing, CellStatus};
use packcover::{Aabb, Triangle, Vec2};
use serde_json::json;

const PACKING_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "packcover", version, about = "Periodic ellipse packings whose enlargements cover the plane, and the disc-packing chase")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one fundamental cell of the periodic packing for a given λ.
    Pack {
        #[arg(long)]
        lambda: f64,
        /// Override the polygon order chosen from λ.
        #[arg(long)]
        n: Option<usize>,
        /// Tile budget per upward triangle.
        #[arg(long)]
        max_tiles: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check disjointness and λ-covering of a packing file.
    Verify {
        #[arg(long)]
        packing: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        min_cell: f64,
    },
    /// Draw a packing file as SVG.
    Render {
        #[arg(long)]
        packing: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also draw the λ-enlargements.
        #[arg(long)]
        enlarged: bool,
        /// Include the eight neighbouring translates.
        #[arg(long)]
        neighbors: bool,
    },
    /// Evaluate the inequality checks for a set of disc-bound constants.
    DiscAudit {
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = std::f64::consts::PI / 16.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0 / 16.0)]
        beta: f64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Derive the numeric constants and the largest admissible ε.
    DiscCalibrate {
        #[arg(long, default_value_t = std::f64::consts::PI / 16.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0 / 16.0)]
        beta: f64,
    },
    /// Find a point missed by every ε-enlarged disc of a packing.
    DiscChase {
        #[arg(long)]
        packing: PathBuf,
        /// Defaults to the value stored in the file.
        #[arg(long)]
        eps: Option<f64>,
        /// Half side of the starting square, centered at the origin.
        #[arg(long, default_value_t = 2.0)]
        half_side: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random greedy disc packing.
    DiscRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        r_min: f64,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        /// Half side of the square region, centered at the origin.
        #[arg(long, default_value_t = 3.0)]
        half_extent: f64,
    },
}

/// A failure together with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

impl From<packcover::Error> for Failure {
    fn from(e: packcover::Error) -> Self {
        let code = match e {
            packcover::Error::InvalidArgument(_) | packcover::Error::Format(_) => 2,
            _ => 1,
        };
        Failure { code, error: e.into() }
    }
}

type Outcome = Result<bool, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::usage)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(|error| Failure { code: 1, error }),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn load_packing(path: &Path) -> Result<PeriodicPacking, Failure> {
    let file = PackingFile::from_json(&read_input(path)?)?;
    Ok(file.to_packing()?)
}

fn pack(lambda: f64, n: Option<usize>, max_tiles: Option<usize>, out: Option<&Path>) -> Outcome {
    let mut cfg = PackingConfig::new(lambda);
    cfg.n_override = n;
    if let Some(m) = max_tiles {
        cfg.max_tiles = m;
    }
    let p = build_cell(&cfg)?;
    let s = p.stats();
    eprintln!(
        "lambda {lambda}: n = {}, {} ellipses, min width {:.3e}, max diameter {:.3e}",
        p.n, s.ellipse_count, s.min_width, s.max_diameter
    );
    write_output(out, &PackingFile::from_packing(&p).to_json())?;
    Ok(true)
}

fn fundamental_region(side: f64) -> Aabb {
    Aabb::new(Vec2::ZERO, Vec2::new(side, side * 3f64.sqrt() / 2.0))
}

fn verify(path: &Path, min_cell: f64) -> Outcome {
    let p = load_packing(path)?;
    let all = p.with_neighbors();
    let packing = verify_packing(&all, PACKING_TOL);
    let covering = verify_covering(&all, p.lambda, fundamental_region(p.triangle_side), min_cell)?;
    let summary = json!({
        "lambda": p.lambda,
        "n": p.n,
        "cell_ellipses": p.cell.len(),
        "packing": {
            "ok": packing.ok,
            "tolerance": PACKING_TOL,
            "tangent_pairs": packing.tangent_pairs,
            "overlapping_pairs": packing.overlapping.len(),
            "first_overlaps": packing.overlapping.iter().take(10).collect::<Vec<_>>(),
        },
        "covering": {
            "certified": covering.certified,
            "min_cell": min_cell,
            "certified_cells": covering.stats.certified_cells,
            "uncovered": covering.count(CellStatus::Uncovered),
            "needs_refinement": covering.count(CellStatus::NeedsRefinement),
        },
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(packing.ok && covering.certified)
}

fn render(path: &Path, out: &Path, enlarged: bool, neighbors: bool) -> Outcome {
    let p = load_packing(path)?;
    let ellipses = if neighbors { p.with_neighbors() } else { p.ellipses().copied().collect() };
    let s = p.triangle_side;
    let h = s * 3f64.sqrt() / 2.0;
    let triangles = [
        [Vec2::ZERO, Vec2::new(s, 0.0), Vec2::new(0.5 * s, h)],
        [Vec2::new(s, 0.0), Vec2::new(1.5 * s, h), Vec2::new(0.5 * s, h)],
    ]
    .into_iter()
    .map(|v| Triangle::new(v, 0))
    .collect::<packcover::Result<Vec<_>>>()?;
    let opts = RenderOptions {
        enlarged: enlarged.then_some(p.lambda),
        triangles,
        ..RenderOptions::default()
    };
    write_output(Some(out), &render_svg(&ellipses, &opts))?;
    Ok(true)
}

fn print_audit(report: &AuditReport) {
    let k = &report.constants;
    println!(
        "constants: eps = {:e}, alpha = {}, beta = {}, ring_frac = {}, r_small = {}, r_big = {}, arc_prime = {:.7}, r_prime_max = {:.7}",
        k.eps, k.alpha, k.beta, k.ring_frac, k.r_small, k.r_big, k.arc_prime, k.r_prime_max
    );
    for c in &report.checks {
        println!(
            "{:<9} {:<5} {:.7} {} {:.7}  {}",
            c.id,
            if c.pass { "ok" } else { "FAIL" },
            c.value,
            c.relation,
            c.bound,
            c.description
        );
    }
    println!("{}", if report.pass { "all checks pass" } else { "some checks fail" });
}

fn disc_audit(eps: f64, alpha: f64, beta: f64, as_json: bool) -> Outcome {
    let (k, _, _) = derive_constants(&Constants::base(eps, alpha, beta)).map_err(Failure::from)?;
    let report = audit_constants(&k);
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_audit(&report);
    }
    Ok(report.pass)
}

fn disc_calibrate(alpha: f64, beta: f64) -> Outcome {
    let cal = calibrate(&Constants::base(1e-5, alpha, beta))?;
    println!("{}", serde_json::to_string_pretty(&cal).expect("calibration serializes"));
    Ok(true)
}

fn disc_chase(path: &Path, eps: Option<f64>, half_side: f64, out: Option<&Path>) -> Outcome {
    let file: DiscPackingFile = serde_json::from_str(&read_input(path)?)
        .with_context(|| format!("{} is not a disc packing file", path.display()))
        .map_err(Failure::usage)?;
    let packing = file.to_packing()?;
    let eps = eps.unwrap_or(file.eps);
    let base = Constants::default_base();
    let cal = calibrate(&Constants::base(eps, base.alpha, base.beta))?;
    let start = OrientedSquare { center: Vec2::ZERO, half_side, angle: 0.0 };
    let outcome = chase(&packing, start, &cal.constants)?;
    let certified = packing.is_uncovered(outcome.point, eps);
    eprintln!(
        "point ({}, {}) after {} regions: {}",
        outcome.point.x,
        outcome.point.y,
        outcome.trace.regions.len(),
        if certified { "uncovered by every enlarged disc" } else { "NOT certified" }
    );
    write_output(out, &serde_json::to_string_pretty(&outcome).expect("trace serializes"))?;
    Ok(certified)
}

fn disc_random(seed: u64, out: &Path, eps: f64, r_min: f64, r_max: f64, half_extent: f64) -> Outcome {
    if !(half_extent > 0.0) {
        return Err(Failure::usage(anyhow!("half extent must be positive")));
    }
    let params = RandomPackingParams {
        region: Aabb::new(Vec2::new(-half_extent, -half_extent), Vec2::new(half_extent, half_extent)),
        r_min,
        r_max,
        ..RandomPackingParams::default()
    };
    let p = random_greedy_packing(seed, &params)?;
    eprintln!("{} discs", p.discs.len());
    let text = serde_json::to_string_pretty(&DiscPackingFile::from_packing(&p, eps)).expect("packing serializes");
    write_output(Some(out), &text)?;
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Pack { lambda, n, max_tiles, out } => pack(lambda, n, max_tiles, out.as_deref()),
        Command::Verify { packing, min_cell } => verify(&packing, min_cell),
        Command::Render { packing, out, enlarged, neighbors } => render(&packing, &out, enlarged, neighbors),
        Command::DiscAudit { eps, alpha, beta, json } => disc_audit(eps, alpha, beta, json),
        Command::DiscCalibrate { alpha, beta } => disc_calibrate(alpha, beta),
        Command::DiscChase { packing, eps, half_side, out } => disc_chase(&packing, eps, half_side, out.as_deref()),
        Command::DiscRandom { seed, out, eps, r_min, r_max, half_extent } => {
            disc_random(seed, &out, eps, r_min, r_max, half_extent)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
