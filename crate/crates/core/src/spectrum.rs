//! Corner exponents of the transmission problem and power-law decay fits.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::probe::{fmt17, IndicatorSeries};

/// Scan step for sign changes of the factored residual.
pub const SCAN_STEP: f64 = 1e-3;
/// Largest supported `mu_max`.
pub const MU_MAX_LIMIT: f64 = 10.0;

/// Contrast and outside angle at a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerParams {
    k: f64,
    theta: f64,
}

impl CornerParams {
    pub fn new(k: f64, theta: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() || (k - 1.0).abs() < 1e-12 {
            return Err(Error::Config(format!("contrast must be positive and different from 1, got {k}")));
        }
        if !(PI < theta && theta < 2.0 * PI) {
            return Err(Error::Config(format!("outside angle must lie in (π, 2π), got {theta}")));
        }
        Ok(Self { k, theta })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `(1+k)² sin²πμ − (1−k)² sin²((π−Θ)μ)`.
    pub fn residual(&self, mu: f64) -> f64 {
        self.factor(mu, 1.0) * self.factor(mu, -1.0)
    }

    /// `(1+k) sin πμ − sign·(1−k) sin((π−Θ)μ)`; the residual is the product
    /// of the two signs.
    fn factor(&self, mu: f64, sign: f64) -> f64 {
        (1.0 + self.k) * (PI * mu).sin() - sign * (1.0 - self.k) * ((PI - self.theta) * mu).sin()
    }
}

/// Positive roots of the corner equation, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentList {
    pub mus: Vec<f64>,
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > 1e-14 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while b - a > 1e-13 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

/// Zeros of one factor in `(0, mu_max]`: sign changes on the scan grid are
/// bisected, and grid-level local minima of `|factor|` are refined by golden
/// section and kept when they reach zero to rounding (tangential zeros).
fn factor_roots(cp: &CornerParams, sign: f64, mu_max: f64) -> Vec<f64> {
    let f = |m: f64| cp.factor(m, sign);
    // one step past mu_max so a root sitting on the end point is bracketed
    let steps = (mu_max / SCAN_STEP).ceil() as usize + 1;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * SCAN_STEP).collect();
    let vals: Vec<f64> = grid.iter().map(|&m| f(m)).collect();
    let mut roots = Vec::new();
    for i in 1..grid.len() {
        let (a, b) = (grid[i - 1], grid[i]);
        let (fa, fb) = (vals[i - 1], vals[i]);
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(&f, a, b));
        } else if i + 1 < grid.len() {
            let fc = vals[i + 1];
            if fb.abs() < fa.abs() && fb.abs() < fc.abs() && (fb < 0.0) == (fc < 0.0) {
                let m = golden_min(&|x: f64| f(x).abs(), a, grid[i + 1]);
                if f(m).abs() <= 1e-14 * (1.0 + cp.k) {
                    roots.push(m);
                }
            }
        }
    }
    roots.retain(|&m| m > 1e-9 && m <= mu_max + 1e-9);
    roots
}

/// All roots in `(0, mu_max]`. The residual factors as
/// `[(1+k) sin πμ − (1−k) sin((π−Θ)μ)]·[(1+k) sin πμ + (1−k) sin((π−Θ)μ)]`;
/// each factor is scanned on its own, which also catches the double roots of
/// the squared equation where both factors vanish.
pub fn corner_exponents(cp: &CornerParams, mu_max: f64) -> Result<ExponentList> {
    if !(mu_max > 0.0) || mu_max > MU_MAX_LIMIT {
        return Err(Error::Config(format!("mu_max must lie in (0, {MU_MAX_LIMIT}], got {mu_max}")));
    }
    let mut roots = factor_roots(cp, 1.0, mu_max);
    roots.extend(factor_roots(cp, -1.0, mu_max));
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < 1e-9);
    Ok(ExponentList { mus: roots })
}

/// Transmission matrices relating interior and exterior corner coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerSystem {
    /// Continuation of the interior expansion once around the vertex.
    pub m_angle: [[f64; 2]; 2],
    /// Transmission across the second edge of the corner.
    pub m_mix: [[f64; 2]; 2],
    pub det: f64,
    /// Unit interior coefficient vector `(A_i, B_i)` when the system is singular.
    pub interior: Option<[f64; 2]>,
    /// `(A_e, B_e) = M_angle (A_i, B_i)`.
    pub exterior: Option<[f64; 2]>,
}

/// Assembles both matrices at `mu` and returns `det(M_angle − M_mix)`;
/// near a root also a unit null vector, checked against the scalar
/// compatibility relation taken from the first row.
pub fn corner_system_det(cp: &CornerParams, mu: f64) -> Result<CornerSystem> {
    if !(mu > 0.0) {
        return Err(Error::Config(format!("mu must be positive, got {mu}")));
    }
    let k = cp.k;
    let (s2, c2) = (2.0 * PI * mu).sin_cos();
    let (s, c) = (cp.theta * mu).sin_cos();
    let m_angle = [[c2, s2], [-k * s2, k * c2]];
    let m_mix = [[c * c + k * s * s, (1.0 - k) * c * s], [(1.0 - k) * c * s, s * s + k * c * c]];
    let d = [
        [m_angle[0][0] - m_mix[0][0], m_angle[0][1] - m_mix[0][1]],
        [m_angle[1][0] - m_mix[1][0], m_angle[1][1] - m_mix[1][1]],
    ];
    let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
    let mut sys = CornerSystem {
        m_angle,
        m_mix,
        det,
        interior: None,
        exterior: None,
    };
    if det.abs() <= 1e-8 {
        let row = if d[0][0].hypot(d[0][1]) >= d[1][0].hypot(d[1][1]) { d[0] } else { d[1] };
        let norm = row[0].hypot(row[1]);
        // a vanishing matrix leaves every direction admissible
        let v = if norm < 1e-12 { [1.0, 0.0] } else { [-row[1] / norm, row[0] / norm] };
        let compat = v[0] * (c2 - c * c - k * s * s) + v[1] * (s2 + (k - 1.0) * c * s);
        if compat.abs() > 1e-8 {
            return Err(Error::Numeric(format!(
                "null vector violates the compatibility relation by {compat:e}"
            )));
        }
        sys.interior = Some(v);
        sys.exterior = Some([
            m_angle[0][0] * v[0] + m_angle[0][1] * v[1],
            m_angle[1][0] * v[0] + m_angle[1][1] * v[1],
        ]);
    }
    Ok(sys)
}

/// Power-law fit `|I| ≈ L τ^{−μ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub mu_hat: f64,
    pub l_hat: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples_used: usize,
}

/// Ordinary least squares `y = a + b x`, returning `(a, b, r²)`.
pub fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = x.iter().zip(y).map(|(a_, b_)| (b_ - a - b * a_).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    (a, b, r2)
}

/// Fits `log|I|` against `log τ` for a series taken at, or shifted to, `t = h`.
///
/// The two smallest τ are dropped and so is every sample below ten times its
/// noise floor; at least eight samples must remain.
pub fn fit_decay_exponent(series: &IndicatorSeries, h: f64) -> Result<DecayFit> {
    let s = if series.t == h { series.clone() } else { series.shifted(h) };
    let usable: Vec<_> = s.samples.iter().skip(2).filter(|p| p.trusted() && p.abs() > 0.0).collect();
    if usable.len() < 8 {
        return Err(Error::Window(format!(
            "{} usable samples after dropping the two smallest τ, need 8",
            usable.len()
        )));
    }
    let x: Vec<f64> = usable.iter().map(|p| p.tau.ln()).collect();
    let y: Vec<f64> = usable.iter().map(|p| p.abs().ln()).collect();
    let (a, b, r2) = line_fit(&x, &y);
    Ok(DecayFit {
        mu_hat: -b,
        l_hat: a.exp(),
        window: (usable[0].tau, usable[usable.len() - 1].tau),
        r_squared: r2,
        samples_used: usable.len(),
    })
}

/// Spectrum CSV with header `k,theta_rad,index,mu`; indices start at 1.
pub fn write_spectrum_csv<W: Write>(mut out: W, cp: &CornerParams, list: &ExponentList) -> std::io::Result<()> {
    writeln!(out, "k,theta_rad,index,mu")?;
    for (i, mu) in list.mus.iter().enumerate() {
        writeln!(out, "{},{},{},{}", fmt17(cp.k), fmt17(cp.theta), i + 1, fmt17(*mu))?;
    }
    Ok(())
}

/// Determinant trace CSV with header `mu,det,residual`.
pub fn write_det_trace_csv<W: Write>(mut out: W, cp: &CornerParams, mus: &[f64]) -> std::io::Result<()> {
    writeln!(out, "mu,det,residual")?;
    for &mu in mus {
        let det = corner_system_det(cp, mu).map(|s| s.det).unwrap_or(f64::NAN);
        writeln!(out, "{},{},{}", fmt17(mu), fmt17(det), fmt17(cp.residual(mu)))?;
    }
    Ok(())
}
