//! Closed-form solution for concentric discs driven by `g = cos nθ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::cauchy::{extract_cauchy, CauchyData};
use crate::forward::fem::solve_transmission;
use crate::forward::mesh::{build_mesh, TANGENTIAL_FACTOR};
use crate::forward::scene::Scene;
use crate::geometry::{Point2, Polygon};

/// `u = A rⁿ cos nθ` for `r < ρ`, `(B rⁿ + C r⁻ⁿ) cos nθ` for `ρ < r < R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscSolution {
    pub r_out: f64,
    pub rho: f64,
    pub k: f64,
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DiscSolution {
    /// Solves continuity of `u` and `γ∂u/∂r` at `ρ` and `∂u/∂r = cos nθ` at `R`.
    pub fn new(r_out: f64, rho: f64, k: f64, n: u32) -> Result<Self> {
        if !(rho > 0.0 && rho < r_out) || !r_out.is_finite() {
            return Err(Error::Geometry(format!(
                "need 0 < rho < R_out, got rho = {rho}, R_out = {r_out}"
            )));
        }
        if n == 0 {
            return Err(Error::Config("mode number must be at least 1".into()));
        }
        if !(k > 0.0) {
            return Err(Error::Config(format!("conductivity contrast must be positive, got {k}")));
        }
        let nf = n as f64;
        // A = B + C ρ^{-2n}, kA = B − C ρ^{-2n}  ⇒  C ρ^{-2n} = B (1−k)/(1+k)
        let ratio = (1.0 - k) / (1.0 + k) * rho.powi(2 * n as i32);
        // n(B R^{n−1} − C R^{−n−1}) = 1
        let b = 1.0 / (nf * (r_out.powi(n as i32 - 1) - ratio * r_out.powi(-(n as i32) - 1)));
        let c = ratio * b;
        let a = b + c * rho.powi(-2 * n as i32);
        Ok(Self { r_out, rho, k, n, a, b, c })
    }

    /// Radial profile `f(r)` with `u = f(r) cos nθ`.
    pub fn radial(&self, r: f64) -> f64 {
        let n = self.n as i32;
        if r <= self.rho {
            self.a * r.powi(n)
        } else {
            self.b * r.powi(n) + self.c * r.powi(-n)
        }
    }

    pub fn eval(&self, x: Point2) -> f64 {
        let r = x.norm();
        if r == 0.0 {
            return 0.0;
        }
        self.radial(r) * (self.n as f64 * x.y.atan2(x.x)).cos()
    }

    /// Amplitude of the trace on `r = R`.
    pub fn boundary_amplitude(&self) -> f64 {
        self.radial(self.r_out)
    }
}

/// Exact Cauchy data sampled at the vertices of the regular `segments`-gon
/// inscribed in the outer circle, together with the interior evaluator.
pub fn analytic_disc_cauchy(
    r_out: f64,
    rho: f64,
    k: f64,
    n: u32,
    segments: usize,
) -> Result<(CauchyData, DiscSolution)> {
    let sol = DiscSolution::new(r_out, rho, k, n)?;
    let poly = Polygon::regular(segments, r_out, Point2::default(), 0.0)?;
    let nodes = poly.vertices().to_vec();
    let u = nodes.iter().map(|&p| sol.eval(p)).collect();
    let g = nodes
        .iter()
        .map(|p| (n as f64 * p.y.atan2(p.x)).cos())
        .collect();
    let cd = CauchyData::new(nodes, u, g, format!("disc:R={r_out},rho={rho},k={k},n={n}"))?;
    Ok((cd, sol))
}

/// Relative L² error of the finite element trace on `r = R` against the
/// closed form. Both circles are replaced by regular polygons whose sides
/// match the boundary mesh spacing, so the polygonal error shrinks with `h`.
pub fn disc_trace_error(r_out: f64, rho: f64, k: f64, n: u32, h: f64) -> Result<f64> {
    let exact = DiscSolution::new(r_out, rho, k, n)?;
    let side = h * TANGENTIAL_FACTOR;
    let n_out = ((2.0 * PI * r_out / side).ceil() as usize).max(8);
    let n_in = ((2.0 * PI * rho / side).ceil() as usize).max(8);
    let scene = Scene::concentric_disc(r_out, rho, k, n, n_out, n_in)?;
    let mesh = build_mesh(&scene, h, 0)?;
    let sol = solve_transmission(&mesh, k, scene.current())?;
    let cd = extract_cauchy(&sol, scene.current(), "disc")?;
    let (mut num, mut den) = (0.0, 0.0);
    for ((p, u), w) in cd.boundary_nodes.iter().zip(&cd.u).zip(&cd.weights) {
        let e = exact.eval(*p);
        num += w * (u - e).powi(2);
        den += w * e * e;
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_solved_coefficients() {
        let s = DiscSolution::new(3.0, 1.0, 2.0, 1).unwrap();
        assert!((s.b - 27.0 / 28.0).abs() < 1e-15);
        assert!((s.c + 9.0 / 28.0).abs() < 1e-15);
        assert!((s.a - 18.0 / 28.0).abs() < 1e-15);
        assert!((s.boundary_amplitude() - 39.0 / 14.0).abs() < 1e-14);
    }

    #[test]
    fn interface_conditions_hold() {
        for &(k, n) in &[(2.0, 1u32), (0.3, 2), (7.0, 3)] {
            let s = DiscSolution::new(2.5, 0.8, k, n).unwrap();
            let nf = n as f64;
            let inner = s.a * 0.8f64.powi(n as i32);
            let outer = s.b * 0.8f64.powi(n as i32) + s.c * 0.8f64.powi(-(n as i32));
            assert!((inner - outer).abs() < 1e-12);
            let d_in = k * nf * s.a * 0.8f64.powi(n as i32 - 1);
            let d_out = nf * (s.b * 0.8f64.powi(n as i32 - 1) - s.c * 0.8f64.powi(-(n as i32) - 1));
            assert!((d_in - d_out).abs() < 1e-12);
            let d_r = nf * (s.b * 2.5f64.powi(n as i32 - 1) - s.c * 2.5f64.powi(-(n as i32) - 1));
            assert!((d_r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_contrast_is_plain_harmonic() {
        let s = DiscSolution::new(3.0, 1.0, 1.0, 1).unwrap();
        assert!((s.boundary_amplitude() - 3.0).abs() < 1e-14);
        assert!(s.c.abs() < 1e-15);
    }

    #[test]
    fn perfect_conductor_limit() {
        let gaps: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&k| {
                let s = DiscSolution::new(3.0, 1.0, k, 1).unwrap();
                s.c / s.b + 1.0
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1].abs() < w[0].abs()), "{gaps:?}");
        assert!(gaps[2].abs() < 3e-3);
    }

    #[test]
    fn coarse_fem_trace_is_close() {
        let e = disc_trace_error(3.0, 1.0, 2.0, 1, 0.2).unwrap();
        assert!(e < 1e-3, "{e}");
    }

    #[test]
    fn sampled_data_are_compatible() {
        let (cd, _) = analytic_disc_cauchy(3.0, 1.0, 2.0, 1, 64).unwrap();
        assert!(cd.total_flux().abs() < 1e-12);
        assert!(DiscSolution::new(1.0, 2.0, 2.0, 1).is_err());
    }
}
