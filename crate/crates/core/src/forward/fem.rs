//! P1 Galerkin solver for `∇·γ∇u = 0` with Neumann data, `γ = k` on D.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::mesh::{Mesh, Region};
use crate::forward::scene::BoundaryCurrent;
use crate::quadrature::gauss_legendre;

/// Relative residual at which the conjugate gradient iteration stops.
pub const SOLVER_TOL: f64 = 1e-12;

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut s = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[idx] * x[self.cols[idx]];
            }
            *yi = s;
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&idx| self.cols[idx] == i)
                    .map_or(0.0, |idx| self.vals[idx])
            })
            .collect()
    }
}

/// Gradients of the three hat functions on triangle `t`, and its area.
fn hat_gradients(mesh: &Mesh, t: usize) -> ([[f64; 2]; 3], f64) {
    let [a, b, c] = mesh.triangles[t];
    let p = [mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]];
    let area = mesh.triangle_area(t);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (pj, pk) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        g[i] = [(pj.y - pk.y) / (2.0 * area), (pk.x - pj.x) / (2.0 * area)];
    }
    (g, area)
}

fn conductivity(mesh: &Mesh, t: usize, k: f64) -> f64 {
    match mesh.regions[t] {
        Region::Inclusion => k,
        Region::Background => 1.0,
    }
}

/// Assembles the γ-weighted stiffness matrix.
pub fn assemble_stiffness(mesh: &Mesh, k: f64) -> Csr {
    let n = mesh.num_nodes();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(9 * mesh.triangles.len());
    for t in 0..mesh.triangles.len() {
        let (g, area) = hat_gradients(mesh, t);
        let gamma = conductivity(mesh, t, k);
        let tri = mesh.triangles[t];
        for i in 0..3 {
            for j in 0..3 {
                let v = gamma * area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                triplets.push((tri[i], tri[j], v));
            }
        }
    }
    // stable sort keeps the per-entry summation order fixed
    triplets.sort_by_key(|&(r, c, _)| (r, c));
    let mut row_ptr = vec![0usize; n + 1];
    let mut cols = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    let mut last: Option<(usize, usize)> = None;
    for (r, c, v) in triplets {
        if last == Some((r, c)) {
            *vals.last_mut().unwrap() += v;
        } else {
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
    }
    for i in 0..n {
        row_ptr[i + 1] += row_ptr[i];
    }
    Csr { n, row_ptr, cols, vals }
}

/// Load vector `∮ g φ_i` over the boundary loop.
pub fn assemble_load(mesh: &Mesh, current: &BoundaryCurrent) -> Vec<f64> {
    let mut b = vec![0.0; mesh.num_nodes()];
    let (xs, ws) = gauss_legendre(6);
    for e in &mesh.boundary_edges {
        let (pa, pb) = (mesh.nodes[e.a], mesh.nodes[e.b]);
        let len = pa.dist(pb);
        if current.is_piecewise_constant() {
            let g = current.eval(pa.lerp(pb, 0.5), e.normal);
            b[e.a] += 0.5 * g * len;
            b[e.b] += 0.5 * g * len;
        } else {
            for (x, w) in xs.iter().zip(&ws) {
                let s = 0.5 * (x + 1.0);
                let g = current.eval(pa.lerp(pb, s), e.normal);
                b[e.a] += 0.5 * w * len * g * (1.0 - s);
                b[e.b] += 0.5 * w * len * g * s;
            }
        }
    }
    b
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative reduction asked of each inner conjugate-gradient sweep.
const SWEEP_TOL: f64 = 1e-8;

/// Jacobi-preconditioned conjugate gradients for the consistent singular
/// Neumann system. Iterates stay in the range of the matrix up to a constant,
/// which the caller removes.
///
/// The recursively updated residual drifts from the true one well before
/// 1e-12, so the solve is split into sweeps, each restarted from the true
/// residual `b − Ax` (iterative refinement). A sweep that fails to halve the
/// true residual means the attainable accuracy has been reached.
pub fn pcg(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize, f64)> {
    let n = a.n;
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut ax = vec![0.0; n];
    let mut r = b.to_vec();
    let mut rel = 1.0;
    let mut total = 0;
    while total < max_iter {
        let (dx, it) = pcg_sweep(a, &r, &inv_diag, (tol / rel).max(SWEEP_TOL), max_iter - total);
        total += it;
        for i in 0..n {
            x[i] += dx[i];
        }
        a.mul(&x, &mut ax);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
        let mean = r.iter().sum::<f64>() / n as f64;
        r.iter_mut().for_each(|v| *v -= mean);
        let new_rel = dot(&r, &r).sqrt() / bnorm;
        if new_rel <= tol {
            return Ok((x, total, new_rel));
        }
        if new_rel > 0.5 * rel {
            return Err(Error::Numeric(format!(
                "conjugate gradients stalled at relative residual {new_rel:.2e}, asked for {tol:e}"
            )));
        }
        rel = new_rel;
    }
    Err(Error::Numeric(format!(
        "conjugate gradients did not reach {tol:e} in {max_iter} iterations"
    )))
}

/// One preconditioned CG run on `Aδ = r` from zero, stopped when the
/// recursive residual has dropped by `rtol`. Returns `δ` and the iterations used.
fn pcg_sweep(a: &Csr, rhs: &[f64], inv_diag: &[f64], rtol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let n = a.n;
    let rnorm = dot(rhs, rhs).sqrt();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= rtol * rnorm {
            return (x, it);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (x, max_iter)
}

/// Discrete potential on an interface-fitted mesh.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub mesh: Mesh,
    pub u: Vec<f64>,
    pub k: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl FieldSolution {
    /// `∫ γ |∇u|²`.
    pub fn energy(&self) -> f64 {
        self.energy_of(&self.u)
    }

    fn energy_of(&self, u: &[f64]) -> f64 {
        (0..self.mesh.triangles.len())
            .map(|t| {
                let (g, area) = hat_gradients(&self.mesh, t);
                let tri = self.mesh.triangles[t];
                let mut grad = [0.0; 2];
                for i in 0..3 {
                    grad[0] += u[tri[i]] * g[i][0];
                    grad[1] += u[tri[i]] * g[i][1];
                }
                conductivity(&self.mesh, t, self.k) * area * (grad[0].powi(2) + grad[1].powi(2))
            })
            .sum()
    }

    /// Relative residual `‖b − K u‖/‖b‖` of the assembled Galerkin system.
    pub fn weak_residual(&self, current: &BoundaryCurrent) -> f64 {
        weak_residual(&self.mesh, self.k, current, &self.u)
    }

    /// Arc-length mean of `u` over the outer boundary.
    pub fn boundary_mean(&self) -> f64 {
        boundary_mean(&self.mesh, &self.u)
    }

    /// `u` on the inclusion boundary, in loop order.
    pub fn interface_trace(&self) -> Vec<(crate::geometry::Point2, f64)> {
        self.mesh
            .interface_loop
            .iter()
            .map(|&i| (self.mesh.nodes[i], self.u[i]))
            .collect()
    }
}

pub fn weak_residual(mesh: &Mesh, k: f64, current: &BoundaryCurrent, u: &[f64]) -> f64 {
    let a = assemble_stiffness(mesh, k);
    let mut b = assemble_load(mesh, current);
    project_constants(&mut b);
    let mut au = vec![0.0; u.len()];
    a.mul(u, &mut au);
    let bnorm = dot(&b, &b).sqrt().max(f64::MIN_POSITIVE);
    b.iter().zip(&au).map(|(b, y)| (b - y).powi(2)).sum::<f64>().sqrt() / bnorm
}

fn project_constants(b: &mut [f64]) {
    let mean = b.iter().sum::<f64>() / b.len() as f64;
    b.iter_mut().for_each(|x| *x -= mean);
}

fn boundary_mean(mesh: &Mesh, u: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut len = 0.0;
    for e in &mesh.boundary_edges {
        let l = mesh.nodes[e.a].dist(mesh.nodes[e.b]);
        s += 0.5 * l * (u[e.a] + u[e.b]);
        len += l;
    }
    s / len
}

/// Solves `∫ γ∇u·∇ψ = ∮ gψ` and normalizes `u` to zero boundary mean.
pub fn solve_transmission(mesh: &Mesh, k: f64, current: &BoundaryCurrent) -> Result<FieldSolution> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Config(format!("conductivity contrast must be positive, got {k}")));
    }
    let a = assemble_stiffness(mesh, k);
    let mut b = assemble_load(mesh, current);
    let total: f64 = b.iter().sum();
    let scale: f64 = b.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    if total.abs() > 1e-9 * scale {
        return Err(Error::Data(format!("boundary current has nonzero mean: ∮g = {total:.3e}")));
    }
    project_constants(&mut b);
    let max_iter = 20 * mesh.num_nodes() + 100;
    let (mut u, iterations, residual) = pcg(&a, &b, SOLVER_TOL, max_iter)?;
    let m = boundary_mean(mesh, &u);
    u.iter_mut().for_each(|x| *x -= m);
    Ok(FieldSolution {
        mesh: mesh.clone(),
        u,
        k,
        iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::mesh::build_mesh;
    use crate::forward::scene::Scene;
    use crate::geometry::Point2;

    fn linear() -> BoundaryCurrent {
        BoundaryCurrent::Linear {
            direction: Point2::new(1.0, 0.0),
        }
    }

    #[test]
    fn unit_contrast_reproduces_linear_field() {
        let scene = Scene::default_square().with_k(1.0).unwrap();
        let mesh = build_mesh(&scene, 0.2, 2).unwrap();
        let sol = solve_transmission(&mesh, 1.0, &linear()).unwrap();
        let mean_x = boundary_mean(&mesh, &mesh.nodes.iter().map(|p| p.x).collect::<Vec<_>>());
        let err = mesh
            .nodes
            .iter()
            .zip(&sol.u)
            .map(|(p, u)| (p.x - mean_x - u).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn zero_current_gives_zero_field() {
        let scene = Scene::default_square();
        let mesh = build_mesh(&scene, 0.3, 1).unwrap();
        let g = BoundaryCurrent::Linear {
            direction: Point2::new(0.0, 0.0),
        };
        let sol = solve_transmission(&mesh, 2.0, &g).unwrap();
        assert!(sol.u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn residual_energy_and_normalization() {
        let scene = Scene::default_square();
        let mesh = build_mesh(&scene, 0.15, 3).unwrap();
        let sol = solve_transmission(&mesh, 2.0, scene.current()).unwrap();
        assert!(sol.weak_residual(scene.current()) <= 1e-10);
        assert!(sol.boundary_mean().abs() < 1e-14);
        let b = assemble_load(&mesh, scene.current());
        let bu: f64 = b.iter().zip(&sol.u).map(|(b, u)| b * u).sum();
        let e = sol.energy();
        assert!(e > 0.0);
        assert!((e - bu).abs() <= 1e-8 * e, "{e} vs {bu}");
    }

    #[test]
    fn constant_shift_leaves_residual_unchanged() {
        let scene = Scene::default_square();
        let mesh = build_mesh(&scene, 0.25, 2).unwrap();
        let sol = solve_transmission(&mesh, 2.0, scene.current()).unwrap();
        let shifted: Vec<f64> = sol.u.iter().map(|u| u + 3.7).collect();
        let r0 = weak_residual(&mesh, 2.0, scene.current(), &sol.u);
        let r1 = weak_residual(&mesh, 2.0, scene.current(), &shifted);
        assert!((r0 - r1).abs() < 1e-12);
    }

    #[test]
    fn reflection_equivariance() {
        let scene = Scene::default_square();
        let mesh = build_mesh(&scene, 0.2, 2).unwrap();
        let g = BoundaryCurrent::Linear {
            direction: Point2::new(0.6, 0.8),
        };
        let sol = solve_transmission(&mesh, 2.0, &g).unwrap();
        let mirrored = mesh.reflect_x();
        let sol_m = solve_transmission(&mirrored, 2.0, &g.reflect_x()).unwrap();
        let scale = sol.u.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let err = sol.u.iter().zip(&sol_m.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8 * scale, "{err}");
    }

    #[test]
    fn incompatible_current_is_rejected() {
        let scene = Scene::default_square();
        let mesh = build_mesh(&scene, 0.3, 1).unwrap();
        let g = BoundaryCurrent::Mode {
            n: 0,
            center: Point2::default(),
        };
        assert!(matches!(solve_transmission(&mesh, 2.0, &g), Err(Error::Data(_))));
    }
}
