//! Self-check suite run by `enclosure validate`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use enclosure::forward::{build_mesh, disc_trace_error, extract_cauchy, solve_transmission, CauchyData, FieldSolution, Scene};
use enclosure::geometry::{regularity_margin, support_function};
use enclosure::probe::{
    indicator_boundary, indicator_inclusion_oracle, indicator_series, laplace_corner_integral, linear_grid, ProbeParams,
};
use enclosure::spectrum::{corner_exponents, corner_system_det, CornerParams};
use enclosure::{Direction, Polygon};

use crate::commands::{checked_scene, load_scene_file};
use crate::exit::CliError;
use crate::ValidateArgs;

/// Mesh sizes above this use the relaxed oracle threshold.
const COARSE_H: f64 = 0.1;

struct Check {
    name: &'static str,
    measured: String,
    pass: bool,
}

impl Check {
    fn bound(name: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            measured: format!("{value:.3e} (limit {limit:.1e})"),
            pass: value <= limit,
        }
    }
}

/// Regular direction with the widest margin among 16 uniform ones.
fn probe_direction(d: &Polygon) -> Direction {
    Direction::uniform(16)
        .into_iter()
        .max_by(|a, b| regularity_margin(d, *a).total_cmp(&regularity_margin(d, *b)))
        .expect("non-empty")
}

fn rel(a: f64, b: f64) -> f64 {
    a / b.max(f64::MIN_POSITIVE)
}

fn oracle_checks(scene: &Scene, sol: &FieldSolution, cd: &CauchyData, h: f64, out: &mut Vec<Check>) -> Result<(), CliError> {
    let d = probe_direction(scene.inclusion());
    let t = support_function(scene.inclusion(), d);
    let k = scene.k();
    let taus = linear_grid(2.0, 8.0, 7);
    if k == 1.0 {
        let s = indicator_series(cd, d, t, &taus)?;
        let worst = s.samples.iter().map(|p| p.abs() / p.noise_floor).fold(0.0, f64::max);
        out.push(Check {
            name: "indicator vanishes without contrast",
            measured: format!("max |I|/floor {worst:.2e}, all samples untrusted: {}", s.samples.iter().all(|p| !p.trusted())),
            pass: s.samples.iter().all(|p| !p.trusted()),
        });
        return Ok(());
    }
    let mut worst: f64 = 0.0;
    for &tau in &taus {
        let pp = ProbeParams::new(d, tau, t)?;
        let b = indicator_boundary(cd, &pp)?;
        let o = indicator_inclusion_oracle(sol, scene.inclusion(), k, &pp, 0.0)?;
        worst = worst.max(rel((b - o).norm(), o.norm()));
    }
    let limit = if h <= COARSE_H { 0.05 } else { 0.15 };
    out.push(Check::bound("boundary vs inclusion-side indicator, tau 2..8", worst, limit));

    let trace = sol.interface_trace();
    let lambda = trace.iter().map(|(_, u)| u).sum::<f64>() / trace.len() as f64;
    let pp = ProbeParams::new(d, 5.0, t)?;
    let o0 = indicator_inclusion_oracle(sol, scene.inclusion(), k, &pp, 0.0)?;
    let o1 = indicator_inclusion_oracle(sol, scene.inclusion(), k, &pp, lambda)?;
    out.push(Check::bound("inclusion-side value independent of lambda", rel((o1 - o0).norm(), o0.norm()), 1e-6));
    Ok(())
}

fn identity_checks(scene: &Scene, cd: &CauchyData, out: &mut Vec<Check>) -> Result<(), CliError> {
    let d = probe_direction(scene.inclusion());
    let t = support_function(scene.inclusion(), d);
    let mut worst: f64 = 0.0;
    for tau in [2.0, 5.0, 8.0] {
        let a = indicator_boundary(cd, &ProbeParams::new(d, tau, t)?)?;
        let b = indicator_boundary(cd, &ProbeParams::new(d, tau, t + 0.3)?)? * (0.3 * tau).exp();
        worst = worst.max(rel((a - b).norm(), a.norm()));
    }
    out.push(Check::bound("exact shift identity", worst, 1e-12));

    let mut shifted = cd.clone();
    shifted.u.iter_mut().for_each(|u| *u += 1.0);
    let tau = 5.0;
    let pp = ProbeParams::new(d, tau, t)?;
    let delta = (indicator_boundary(&shifted, &pp)? - indicator_boundary(cd, &pp)?).norm();
    let h_omega = support_function(scene.omega(), d);
    out.push(Check::bound(
        "constant added to the voltage (scaled by e^{tau(h_Omega - t)})",
        delta / (tau * (h_omega - t)).exp(),
        1e-8,
    ));
    Ok(())
}

fn disc_check(h: f64, out: &mut Vec<Check>) -> Result<(), CliError> {
    let hs = [h, h / SQRT_2, h / 2.0];
    let errs = hs
        .iter()
        .map(|&hh| disc_trace_error(3.0, 1.0, 2.0, 1, hh))
        .collect::<Result<Vec<_>, _>>()?;
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    out.push(Check {
        name: "concentric-disc trace error, 3 meshes",
        measured: format!("{:.2e} {:.2e} {:.2e} (first ≤ 1e-2, decreasing)", errs[0], errs[1], errs[2]),
        pass: errs[0] <= 1e-2 && decreasing,
    });
    Ok(())
}

fn laplace_checks(out: &mut Vec<Check>) -> Result<(), CliError> {
    let mut worst: f64 = 0.0;
    for mu in [0.5, 1.0, 1.5] {
        let (num, lead) = laplace_corner_integral(mu, -FRAC_PI_4, 0.5, 200.0)?;
        worst = worst.max(rel((num - lead).norm(), lead.norm()));
    }
    out.push(Check::bound("corner integral vs leading term at tau = 200", worst, 1e-6));
    let (eta, tau) = (0.5, 10.0);
    let (num, _) = laplace_corner_integral(1.0, -FRAC_PI_2, eta, tau)?;
    let exact = (1.0 - (-eta * tau).exp() * (1.0 + eta * tau)) / (tau * tau);
    out.push(Check::bound("corner integral closed form (mu = 1, p = -pi/2)", rel((num.re - exact).abs() + num.im.abs(), exact), 1e-12));
    Ok(())
}

/// Outside angle `2π − interior` at every vertex.
fn outside_angles(p: &Polygon) -> Vec<f64> {
    let n = p.len();
    (0..n)
        .map(|i| {
            let a = p.vertex(i + n - 1) - p.vertex(i);
            let b = p.vertex(i + 1) - p.vertex(i);
            2.0 * PI - a.cross(b).abs().atan2(a.dot(b))
        })
        .collect()
}

fn spectrum_checks(scene: &Scene, out: &mut Vec<Check>) -> Result<(), CliError> {
    let cp = CornerParams::new(2.0, 1.5 * PI)?;
    let list = corner_exponents(&cp, 5.0)?;
    let mu1 = (1.0f64 / 6.0).acos() * 2.0 / PI;
    let expect = [mu1, 2.0 - mu1, 2.0];
    let dev = if list.mus.len() >= 3 {
        expect.iter().zip(&list.mus).map(|(e, m)| (e - m).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    out.push(Check::bound("first exponents for k = 2, outside angle 3pi/2", dev, 1e-6));

    let k = if scene.k() == 1.0 { 2.0 } else { scene.k() };
    let (mut swap, mut det): (f64, f64) = (0.0, 0.0);
    for theta in outside_angles(scene.inclusion()) {
        let a = corner_exponents(&CornerParams::new(k, theta)?, 5.0)?;
        let b = corner_exponents(&CornerParams::new(1.0 / k, theta)?, 5.0)?;
        if a.mus.len() != b.mus.len() {
            swap = f64::INFINITY;
            continue;
        }
        for (x, y) in a.mus.iter().zip(&b.mus) {
            swap = swap.max((x - y).abs());
        }
        let cp = CornerParams::new(k, theta)?;
        for &mu in &a.mus {
            det = det.max(corner_system_det(&cp, mu)?.det.abs());
        }
    }
    out.push(Check::bound("exponents invariant under k -> 1/k at the scene corners", swap, 1e-10));
    out.push(Check::bound("compatibility determinant at the scene exponents", det, 1e-8));
    Ok(())
}

pub fn run(a: &ValidateArgs) -> Result<(), CliError> {
    let file = load_scene_file(a.scene.as_deref())?;
    let scene = checked_scene(&file, a.allow_restriction_violation)?;
    let mesh = build_mesh(&scene, a.h, a.grading)?;
    let sol = solve_transmission(&mesh, scene.k(), scene.current())?;
    let cd = extract_cauchy(&sol, scene.current(), &file.digest())?;

    let mut checks = Vec::new();
    oracle_checks(&scene, &sol, &cd, a.h, &mut checks)?;
    identity_checks(&scene, &cd, &mut checks)?;
    disc_check(a.h, &mut checks)?;
    laplace_checks(&mut checks)?;
    spectrum_checks(&scene, &mut checks)?;

    for c in &checks {
        println!("{}  {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.measured);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::numeric(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
