use std::path::Path;

use serde::Serialize;

use enclosure::forward::{build_mesh, extract_cauchy, solve_transmission, CauchyData, Scene, SceneFile};
use enclosure::probe::{indicator_series, linear_grid};
use enclosure::reconstruction::{add_noise, reconstruct_hull, EstimatorConfig, FitModel};
use enclosure::spectrum::{corner_exponents, write_det_trace_csv, write_spectrum_csv, CornerParams};
use enclosure::Direction;

use crate::exit::CliError;
use crate::grid::parse_grid;
use crate::record::{write_atomic, RunRecord};
use crate::{ForwardArgs, IndicatorArgs, ModelArg, ReconstructArgs, SpectrumArgs};

pub fn load_scene_file(path: Option<&Path>) -> Result<SceneFile, CliError> {
    match path {
        None => Ok(SceneFile::default_square()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read scene {}: {e}", p.display())))?;
            Ok(SceneFile::from_json(&text)?)
        }
    }
}

/// Builds the scene and applies the `diam D < dist(D, ∂Ω)` check.
pub fn checked_scene(file: &SceneFile, allow_violation: bool) -> Result<Scene, CliError> {
    let scene = file.build()?;
    if !scene.satisfies_restriction() {
        let msg = format!(
            "diam D = {:.4} is not below dist(D, ∂Ω) = {:.4}; the recovery guarantee does not cover this scene",
            scene.inclusion().diameter(),
            scene.margin()
        );
        if !allow_violation {
            return Err(CliError::config(format!("{msg} (pass --allow-restriction-violation to run anyway)")));
        }
        eprintln!("warning: {msg}");
    }
    Ok(scene)
}

fn read_cauchy(path: &Path) -> Result<CauchyData, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read Cauchy data {}: {e}", path.display())))?;
    Ok(CauchyData::from_json(&text)?)
}

fn check_h(h: f64) -> Result<(), CliError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(CliError::config(format!("--h must be positive, got {h}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ForwardConfig<'a> {
    scene: &'a SceneFile,
    h: f64,
    grading: u32,
    allow_restriction_violation: bool,
}

pub fn forward(a: &ForwardArgs) -> Result<(), CliError> {
    check_h(a.h)?;
    let file = load_scene_file(a.scene.as_deref())?;
    let scene = checked_scene(&file, a.allow_restriction_violation)?;
    let mut rec = RunRecord::new(
        "forward",
        &ForwardConfig {
            scene: &file,
            h: a.h,
            grading: a.grading,
            allow_restriction_violation: a.allow_restriction_violation,
        },
    );
    let mesh = rec.time("mesh", || build_mesh(&scene, a.h, a.grading))?;
    let sol = rec.time("solve", || solve_transmission(&mesh, scene.k(), scene.current()))?;
    let cd = rec.time("extract", || extract_cauchy(&sol, scene.current(), &file.digest()))?;
    std::fs::create_dir_all(&a.out)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", a.out.display())))?;
    rec.write(&a.out.join("cauchy.json"), cd.to_json().as_bytes())?;
    rec.write(&a.out.join("scene.json"), file.to_json().as_bytes())?;
    write_atomic(&a.out.join("run_record.json"), rec.to_json().as_bytes())?;
    println!(
        "nodes {}  triangles {}  cg iterations {}  boundary samples {}  flux {:.3e}",
        mesh.num_nodes(),
        mesh.triangles.len(),
        sol.iterations,
        cd.len(),
        cd.total_flux()
    );
    Ok(())
}

pub fn indicator(a: &IndicatorArgs) -> Result<(), CliError> {
    let cd = read_cauchy(&a.cauchy)?;
    let taus = parse_grid(&a.tau).map_err(CliError::config)?;
    let series = indicator_series(&cd, Direction::from_degrees(a.phi_deg), a.t, &taus)?.capped(a.tau_cap);
    let mut buf = Vec::new();
    series.write_csv(&mut buf, true)?;
    write_atomic(&a.out, &buf)
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<(), CliError> {
    let mut cd = read_cauchy(&a.cauchy)?;
    if a.noise > 0.0 {
        cd = add_noise(&cd, a.noise, a.seed)?;
    }
    let truth = match &a.truth {
        Some(p) => Some(load_scene_file(Some(p))?.build()?.inclusion().clone()),
        None => None,
    };
    let cfg = EstimatorConfig {
        taus: parse_grid(&a.tau).map_err(CliError::config)?,
        tau_cap: a.tau_cap,
        model: match a.model {
            ModelArg::Linear => FitModel::Linear,
            ModelArg::LogCorrected => FitModel::LogCorrected { m: a.power },
        },
        ..EstimatorConfig::default()
    };
    let result = reconstruct_hull(&cd, a.directions, &cfg, truth.as_ref())?;
    write_atomic(&a.out, result.to_json().as_bytes())?;
    print!("usable directions {}/{}", result.usable_count(), a.directions);
    if let Some(m) = &result.metrics {
        print!("  hausdorff {:.4}", m.hausdorff);
    }
    println!();
    Ok(())
}

/// Step of the optional determinant trace.
const DET_TRACE_STEP: f64 = 0.005;

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let cp = CornerParams::new(a.k, a.theta_deg.to_radians())?;
    let list = corner_exponents(&cp, a.mu_max)?;
    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &cp, &list)?;
    write_atomic(&a.out, &buf)?;
    if let Some(p) = &a.det_trace {
        let n = (a.mu_max / DET_TRACE_STEP).round().max(1.0) as usize;
        let mus = linear_grid(DET_TRACE_STEP, n as f64 * DET_TRACE_STEP, n);
        let mut buf = Vec::new();
        write_det_trace_csv(&mut buf, &cp, &mus)?;
        write_atomic(p, &buf)?;
    }
    println!("{} exponents up to {}", list.mus.len(), a.mu_max);
    Ok(())
}
