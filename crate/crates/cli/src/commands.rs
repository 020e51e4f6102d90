//! One function per subcommand. Each computes a serializable report, writes
//! it under the output directory and says whether every check held.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use widthlab_core::complexity::{
    entropy_contradiction_check, pseudo_dim_bruteforce, sample_complexity, EntropyReport,
    EvaluationMatrix, PseudoDimension,
};
use widthlab_core::family::{
    assemble_family, default_code_target, guaranteed_size, gv_code, membership_report,
    verify_separation, AdversarialFamily, BumpProfile, FamilyManifest, MembershipReport,
    SeparationReport, SignCode,
};
use widthlab_core::model_space::{
    bishop_gromov_profile, choose_r, croke_lower_bound, sinh_ratio, sinh_ratio_envelope,
    ConstantsTable, ProfileSample, RadiusBranch, RadiusChoice,
};
use widthlab_core::packing::{maximal_packing, verify_packing, BallPacking, PackingDiagnostics};
use widthlab_core::width::{
    auto_resolution, make_hypothesis_class, width_sweep, ClassKind, SolverOptions, SweepConfig,
    WidthReport,
};
use widthlab_core::{ManifoldKind, ManifoldSpec, QuadratureGrid};

use crate::config::{ConfigError, PseudodimClass, RunConfig};
use crate::output::{write_json, write_width, Format, Loaded, Meta};

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    /// Short human-readable lines for stdout.
    pub summary: Vec<String>,
}

fn grid_points(m: &ManifoldSpec, resolution: usize) -> usize {
    match m.kind {
        ManifoldKind::Torus => resolution.checked_pow(m.d as u32).unwrap_or(usize::MAX),
        ManifoldKind::Sphere => resolution,
    }
}

fn make_grid(cfg: &RunConfig, m: &ManifoldSpec, resolution: usize) -> Result<QuadratureGrid> {
    let points = grid_points(m, resolution);
    if points > cfg.max_grid_points {
        return Err(ConfigError(format!(
            "resolution {resolution} gives {points} grid points, above max_grid_points = {}",
            cfg.max_grid_points
        ))
        .into());
    }
    Ok(QuadratureGrid::new(*m, resolution)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BishopGromovCheck {
    pub samples: Vec<ProfileSample>,
    pub tolerance: f64,
    /// Largest relative increase of the ratio between consecutive radii.
    pub max_relative_increase: f64,
    pub non_increasing: bool,
    pub below_model: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrokeSample {
    pub r: f64,
    pub ball_volume: f64,
    pub lower_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinhSample {
    pub r: f64,
    pub ratio: f64,
    pub power_of_two: f64,
    pub envelope: f64,
    pub within_power: bool,
    pub within_envelope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub manifold: ManifoldSpec,
    pub resolution: usize,
    pub grid_points: usize,
    pub constants: ConstantsTable,
    pub bishop_gromov: BishopGromovCheck,
    pub croke: Vec<CrokeSample>,
    pub croke_ok: bool,
    pub sinh_sweep: Vec<SinhSample>,
    /// Radii where the shell-integral ratio exceeds `2^d`. Reported, not
    /// failed: only the cosh envelope holds in general.
    pub sinh_warnings: usize,
    pub passes: bool,
}

/// Default geometry grid: fine enough that the smallest profile radius
/// spans many cells.
pub fn geometry_resolution(m: &ManifoldSpec) -> usize {
    match (m.kind, m.d) {
        (ManifoldKind::Sphere, _) => 200_000,
        (_, 1) => 20_000,
        (_, 2) => 1_000,
        _ => 160,
    }
}

pub fn geometry_report(cfg: &RunConfig, m: &ManifoldSpec) -> Result<GeometryReport> {
    let resolution = cfg.resolution.unwrap_or_else(|| geometry_resolution(m));
    let grid = make_grid(cfg, m, resolution)?;
    let tol = cfg.tolerances.bishop_gromov;
    let radii: Vec<f64> = (1..=20).map(|i| m.diam * i as f64 / 20.0).collect();
    let samples = bishop_gromov_profile(&grid, 0, &radii)?;
    let max_relative_increase = samples
        .windows(2)
        .map(|w| w[1].ratio / w[0].ratio - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let non_increasing = samples.windows(2).all(|w| w[1].ratio <= w[0].ratio * (1.0 + tol));
    let below_model = samples.iter().all(|s| s.ball_volume <= s.model_volume * (1.0 + tol));
    let croke: Vec<CrokeSample> = (1..=10)
        .map(|j| {
            let r = m.inj / 2.0 * j as f64 / 10.0;
            let ball_volume = grid.ball_volume(0, r);
            let lower_bound = croke_lower_bound(m.d, r);
            CrokeSample {
                r,
                ball_volume,
                lower_bound,
                holds: ball_volume >= lower_bound,
            }
        })
        .collect();
    let croke_ok = croke.iter().all(|c| c.holds);
    let power_of_two = 2f64.powi(m.d as i32);
    let sinh_sweep: Vec<SinhSample> = (1..=20)
        .map(|i| {
            let r = m.inj * i as f64 / 20.0;
            let ratio = sinh_ratio(m.d, m.k, r);
            let envelope = sinh_ratio_envelope(m.d, m.k, r);
            SinhSample {
                r,
                ratio,
                power_of_two,
                envelope,
                within_power: ratio <= power_of_two * (1.0 + 1e-12),
                within_envelope: ratio <= envelope * (1.0 + 1e-12),
            }
        })
        .collect();
    let sinh_warnings = sinh_sweep.iter().filter(|s| !s.within_power).count();
    let envelope_ok = sinh_sweep.iter().all(|s| s.within_envelope);
    Ok(GeometryReport {
        manifold: *m,
        resolution,
        grid_points: grid.n_points(),
        constants: ConstantsTable::for_manifold(m, cfg.p, cfg.q),
        bishop_gromov: BishopGromovCheck {
            samples,
            tolerance: tol,
            max_relative_increase,
            non_increasing,
            below_model,
        },
        croke,
        croke_ok,
        sinh_sweep,
        sinh_warnings,
        passes: non_increasing && below_model && croke_ok && envelope_ok,
    })
}

pub fn cmd_verify_geometry(cfg: &RunConfig, m: &ManifoldSpec, out: &Path) -> Result<Outcome> {
    let rep = geometry_report(cfg, m)?;
    let file = write_json(out, "geometry.json", &Meta::new("verify-geometry", cfg), &rep)?;
    let bg = &rep.bishop_gromov;
    let mut summary = vec![
        format!(
            "Bishop-Gromov: non-increasing {} (max step {:+.4}), below model {}",
            bg.non_increasing, bg.max_relative_increase, bg.below_model
        ),
        format!("Croke small balls: {}", rep.croke_ok),
    ];
    if rep.sinh_warnings > 0 {
        summary.push(format!(
            "warning: shell ratio above 2^d at {} of {} radii (cosh envelope holds)",
            rep.sinh_warnings,
            rep.sinh_sweep.len()
        ));
    }
    Ok(Outcome {
        passed: rep.passes,
        files: vec![file],
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingRun {
    pub resolution: usize,
    pub diagnostics: PackingDiagnostics,
    /// `⌊L/2r⌋` on the circle, where the packing number is known exactly.
    pub exact_count: Option<usize>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackReport {
    pub runs: Vec<PackingRun>,
    pub passes: bool,
}

/// Grid for a bump radius: the configured resolution, or the smallest one
/// with spacing below `r/8` and at least `10⁴` points.
pub fn family_resolution(cfg: &RunConfig, m: &ManifoldSpec, r: f64) -> usize {
    cfg.resolution.unwrap_or_else(|| {
        let floor = match m.kind {
            ManifoldKind::Torus => (1e4f64.powf(1.0 / m.d as f64) - 1e-9).ceil() as usize,
            ManifoldKind::Sphere => 10_000,
        };
        auto_resolution(m, r).max(floor)
    })
}

pub fn pack_report(cfg: &RunConfig, m: &ManifoldSpec) -> Result<PackReport> {
    let radii = match cfg.r {
        Some(r) => vec![r],
        None => vec![m.inj / 4.0, m.inj / 8.0, m.inj / 16.0],
    };
    let mut runs = Vec::new();
    for r in radii {
        let resolution = family_resolution(cfg, m, r);
        let grid = make_grid(cfg, m, resolution)?;
        let packing = maximal_packing(&grid, r, 0)?;
        let diagnostics = verify_packing(&grid, &packing)?;
        let exact_count = (m.kind == ManifoldKind::Torus && m.d == 1)
            .then(|| (m.scale / (2.0 * r) * (1.0 + 1e-12)).floor() as usize);
        let passes = diagnostics.disjoint
            && diagnostics.bounds_ok
            && diagnostics.covered_fraction_at_2r == 1.0
            && exact_count.is_none_or(|c| c == diagnostics.count);
        runs.push(PackingRun {
            resolution,
            diagnostics,
            exact_count,
            passes,
        });
    }
    let passes = runs.iter().all(|r| r.passes);
    Ok(PackReport { runs, passes })
}

pub fn cmd_pack(cfg: &RunConfig, m: &ManifoldSpec, out: &Path) -> Result<Outcome> {
    let rep = pack_report(cfg, m)?;
    let file = write_json(out, "packing.json", &Meta::new("pack", cfg), &rep)?;
    let summary = rep
        .runs
        .iter()
        .map(|r| {
            let d = &r.diagnostics;
            format!(
                "r = {}: N_r = {} in [{:.3}, {:.3}], disjoint {}, covered {}",
                d.radius, d.count, d.lower_bound, d.upper_bound, d.disjoint, d.covered_fraction_at_2r
            )
        })
        .collect();
    Ok(Outcome {
        passed: rep.passes,
        files: vec![file],
        summary,
    })
}

/// Everything needed to inspect one adversarial family.
pub struct BuiltFamily {
    pub grid: QuadratureGrid,
    pub table: ConstantsTable,
    pub choice: RadiusChoice,
    /// Whether `r` came from the configuration instead of the schedule.
    pub explicit_radius: bool,
    pub packing: BallPacking,
    pub code: SignCode,
    pub family: AdversarialFamily,
}

pub fn build_family(cfg: &RunConfig, m: &ManifoldSpec) -> Result<BuiltFamily> {
    let table = ConstantsTable::for_manifold(m, cfg.p, cfg.q);
    let choice = choose_r(m, cfg.n, &table)?;
    let r = cfg.r.unwrap_or(choice.r);
    let grid = make_grid(cfg, m, family_resolution(cfg, m, r))?;
    let packing = maximal_packing(&grid, r, 0)?;
    let target = cfg.max_members.min(default_code_target(packing.count()));
    let code = gv_code(packing.count(), Some(target), cfg.seed, 100_000)?;
    let profile = BumpProfile::new(cfg.k, if cfg.k == 1 { 1.0 } else { cfg.bump_constant })?;
    let family = assemble_family(&grid, &packing, &code, cfg.p, profile)?;
    Ok(BuiltFamily {
        grid,
        table,
        choice,
        explicit_radius: cfg.r.is_some(),
        packing,
        code,
        family,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingFile {
    pub resolution: usize,
    pub grid_points: usize,
    pub packing: BallPacking,
    pub diagnostics: PackingDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    pub m: usize,
    pub size: usize,
    pub target: usize,
    pub guaranteed_size: usize,
    pub min_hamming_distance: Option<usize>,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub radius_choice: RadiusChoice,
    pub explicit_radius: bool,
    pub manifest: FamilyManifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationFile {
    pub membership: MembershipReport,
    pub separation: SeparationReport,
    pub c1_positive: bool,
    pub passes: bool,
}

pub fn cmd_build_family(cfg: &RunConfig, m: &ManifoldSpec, out: &Path) -> Result<Outcome> {
    let b = build_family(cfg, m)?;
    let meta = Meta::new("build-family", cfg);
    let diagnostics = verify_packing(&b.grid, &b.packing)?;
    let packing_ok = diagnostics.disjoint;
    let resolution = b.grid.lattice_resolution().unwrap_or(b.grid.n_points());
    let mut files = vec![write_json(
        out,
        "packing.json",
        &meta,
        &PackingFile {
            resolution,
            grid_points: b.grid.n_points(),
            packing: b.packing.clone(),
            diagnostics,
        },
    )?];
    let code = CodeFile {
        m: b.code.m,
        size: b.code.len(),
        target: cfg.max_members.min(default_code_target(b.code.m)),
        guaranteed_size: guaranteed_size(b.code.m),
        min_hamming_distance: b.code.min_l1_distance.map(|v| v / 2),
        words: (0..b.code.len()).map(|j| b.code.word_string(j)).collect(),
    };
    files.push(write_json(out, "code.json", &meta, &code)?);
    let manifest = b.family.manifest(false);
    files.push(write_json(
        out,
        "family.json",
        &meta,
        &FamilyFile {
            radius_choice: b.choice,
            explicit_radius: b.explicit_radius,
            manifest: manifest.clone(),
        },
    )?);
    let membership = membership_report(&b.family, &b.grid, cfg.tolerances.membership, true)?;
    let separation = verify_separation(&b.family, &b.grid, cfg.tolerances.separation);
    let c1_positive = b.family.c1 > 0.0;
    let passes = packing_ok && membership.passes && separation.passes && c1_positive;
    files.push(write_json(
        out,
        "verification.json",
        &meta,
        &VerificationFile {
            membership,
            separation: separation.clone(),
            c1_positive,
            passes,
        },
    )?);
    let summary = vec![
        format!(
            "r = {:.6e} ({}), N_r = {}, members = {}, C1 = {:.6e}",
            manifest.r,
            if b.explicit_radius { "configured" } else { branch_name(b.choice.branch) },
            manifest.n_r,
            manifest.members,
            manifest.c1
        ),
        format!(
            "membership: max |f|_p = {:.4}, max |grad f|_p = {:.4}, ok {}",
            membership.max_member_lp, membership.max_member_grad_lp, membership.passes
        ),
        separation_line(&separation),
    ];
    Ok(Outcome {
        passed: passes,
        files,
        summary,
    })
}

fn branch_name(b: RadiusBranch) -> &'static str {
    match b {
        RadiusBranch::Entropy => "entropy branch",
        RadiusBranch::Curvature => "curvature branch",
        RadiusBranch::Injectivity => "injectivity branch",
        RadiusBranch::Cap => "cap branch",
    }
}

fn separation_line(s: &SeparationReport) -> String {
    match s.min_distance {
        Some(d) => format!(
            "separation: min L1 distance {:.6e} vs C1 {:.6e} over {} pairs, ok {}",
            d, s.c1, s.pairs, s.passes
        ),
        None => format!("separation: single member, vacuous, ok {}", s.passes),
    }
}

pub fn cmd_verify_separation(cfg: &RunConfig, m: &ManifoldSpec, out: &Path) -> Result<Outcome> {
    let b = build_family(cfg, m)?;
    let rep = verify_separation(&b.family, &b.grid, cfg.tolerances.separation);
    let file = write_json(out, "separation.json", &Meta::new("verify-separation", cfg), &rep)?;
    Ok(Outcome {
        passed: rep.passes,
        files: vec![file],
        summary: vec![separation_line(&rep)],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyFile {
    pub radius_choice: RadiusChoice,
    pub explicit_radius: bool,
    pub entropy: EntropyReport,
}

pub fn entropy_report(cfg: &RunConfig, m: &ManifoldSpec) -> Result<EntropyFile> {
    let b = build_family(cfg, m)?;
    let in_regime = !b.explicit_radius && b.choice.branch == RadiusBranch::Entropy;
    let entropy = entropy_contradiction_check(&b.family, &b.grid, cfg.n, &b.table, in_regime)?;
    Ok(EntropyFile {
        radius_choice: b.choice,
        explicit_radius: b.explicit_radius,
        entropy,
    })
}

pub fn cmd_entropy_check(cfg: &RunConfig, m: &ManifoldSpec, out: &Path) -> Result<Outcome> {
    let rep = entropy_report(cfg, m)?;
    let file = write_json(out, "entropy.json", &Meta::new("entropy-check", cfg), &rep)?;
    let e = &rep.entropy;
    let top = e.rhs_chain_log2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut summary = vec![format!(
        "n = {}, r = {:.6e}, N_r = {}: log2 lhs {:.2} vs largest bound {:.2}, contradiction {}",
        e.n, e.r, e.n_r, e.lhs_log2, top, e.contradiction
    )];
    if e.flagged {
        summary.push("flagged: no contradiction, radius outside the entropy regime".to_string());
    }
    Ok(Outcome {
        passed: e.passes,
        files: vec![file],
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudodimReport {
    pub class: PseudodimClass,
    pub points: usize,
    pub functions: usize,
    /// The dimension the class is known to have.
    pub expected: usize,
    pub n_max: usize,
    pub result: PseudoDimension,
    pub passes: bool,
}

fn product(levels: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|c| {
                levels.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    out
}

pub fn pseudodim_report(cfg: &RunConfig) -> Result<PseudodimReport> {
    let pd = cfg.pseudodim;
    let (rows, expected) = match pd.class {
        PseudodimClass::Affine => {
            let xs: Vec<f64> = (0..pd.points).map(|i| i as f64 / (pd.points - 1) as f64).collect();
            let levels: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
            let rows: Vec<Vec<f64>> = product(&levels, 2)
                .iter()
                .map(|c| xs.iter().map(|x| c[0] * x + c[1]).collect())
                .collect();
            (rows, 2)
        }
        PseudodimClass::Span => {
            let spm = ManifoldSpec::torus(1, 1.0, -1.0)?;
            let grid = QuadratureGrid::new(spm, 8 * pd.points)?;
            let class = make_hypothesis_class(&grid, ClassKind::Span, pd.dim)?;
            let basis: Vec<Vec<f64>> = (0..pd.dim).map(|j| class.basis_field(&grid, j)).collect();
            let idx: Vec<usize> = (0..pd.points).map(|i| 8 * i + 3).collect();
            let rows: Vec<Vec<f64>> = product(&[-1.0, 0.0, 1.0], pd.dim)
                .iter()
                .map(|c| {
                    idx.iter()
                        .map(|&i| c.iter().zip(&basis).map(|(a, b)| a * b[i]).sum())
                        .collect()
                })
                .collect();
            (rows, pd.dim)
        }
    };
    let n_max = (expected + 1).min(pd.points);
    let matrix = EvaluationMatrix::from_rows(&rows)?;
    let result = pseudo_dim_bruteforce(&matrix, n_max)?;
    Ok(PseudodimReport {
        class: pd.class,
        points: pd.points,
        functions: rows.len(),
        expected,
        n_max,
        passes: result.dim == expected,
        result,
    })
}

pub fn cmd_pseudodim(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let rep = pseudodim_report(cfg)?;
    let file = write_json(out, "pseudodim.json", &Meta::new("pseudodim", cfg), &rep)?;
    Ok(Outcome {
        passed: rep.passes,
        files: vec![file],
        summary: vec![format!(
            "{:?} class, {} functions on {} points: pseudo-dimension {} (expected {})",
            rep.class, rep.functions, rep.points, rep.result.dim, rep.expected
        )],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub epsilon: f64,
    pub delta: f64,
    pub pdim: usize,
    pub samples: u64,
}

pub fn cmd_sample_complexity(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let rows = cfg
        .sample_complexity
        .iter()
        .map(|s| {
            Ok(SampleRow {
                epsilon: s.epsilon,
                delta: s.delta,
                pdim: s.pdim,
                samples: sample_complexity(s.epsilon, s.delta, s.pdim)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let file = write_json(out, "sample_complexity.json", &Meta::new("sample-complexity", cfg), &rows)?;
    let summary = rows
        .iter()
        .map(|r| format!("eps = {}, delta = {}, pdim = {}: {} samples", r.epsilon, r.delta, r.pdim, r.samples))
        .collect();
    Ok(Outcome {
        passed: true,
        files: vec![file],
        summary,
    })
}

pub fn sweep_config(cfg: &RunConfig, m: &ManifoldSpec) -> SweepConfig {
    SweepConfig {
        manifold: *m,
        n_list: cfg.n_list.clone(),
        p: cfg.p,
        q: cfg.q,
        k: cfg.k,
        bump_constant: cfg.bump_constant,
        seed: cfg.seed,
        classes: cfg.classes.clone(),
        max_members: cfg.max_members,
        resolution: cfg.resolution,
        max_grid_points: cfg.max_grid_points,
        dominance_tolerance: cfg.tolerances.dominance,
        slope_tolerance: cfg.tolerances.slope,
        entropy: true,
        solver: SolverOptions::default(),
    }
}

fn width_summary(rep: &WidthReport) -> Vec<String> {
    let mut s: Vec<String> = rep
        .rows
        .iter()
        .map(|row| {
            let widths: Vec<String> = row
                .widths
                .iter()
                .map(|w| format!("{} {:.4e}", w.label, w.lower))
                .collect();
            format!(
                "n = {:>5}: bound {:.4e}, {}, dominance {}",
                row.n,
                row.theoretical_lower_bound,
                widths.join(", "),
                row.dominance_ok
            )
        })
        .collect();
    match rep.slope {
        Some(v) => s.push(format!(
            "slope {:.4} (expected {:.4}), ok {}",
            v,
            rep.expected_slope,
            rep.slope_ok == Some(true)
        )),
        None => s.push("slope check skipped: fewer than two rows".to_string()),
    }
    if let Some(e) = &rep.error {
        s.push(format!("incomplete: {e}"));
    }
    s
}

pub fn cmd_width_sweep(cfg: &RunConfig, m: &ManifoldSpec, out: &Path, formats: &[Format]) -> Result<Outcome> {
    let rep = width_sweep(&sweep_config(cfg, m))?;
    let files = write_width(out, &Meta::new("width-sweep", cfg), &rep, formats)?;
    Ok(Outcome {
        passed: rep.passes,
        files,
        summary: width_summary(&rep),
    })
}

/// Re-renders a saved width report in the requested formats.
pub fn cmd_report(input: &Path, out: &Path, formats: &[Format]) -> Result<Outcome> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let loaded: Loaded<WidthReport> = serde_json::from_str(&text)
        .map_err(|e| ConfigError(format!("{} is not a width report: {e}", input.display())))?;
    let files = write_width(out, &loaded.meta, &loaded.report, formats)?;
    Ok(Outcome {
        passed: loaded.report.passes,
        files,
        summary: width_summary(&loaded.report),
    })
}
