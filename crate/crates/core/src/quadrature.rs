//! Quadrature rules shared by the solver and the indicator code.

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    ((kron * h), ((kron - gauss) * h).norm())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a complex integrand.
///
/// Intervals are bisected until the Kronrod–Gauss difference drops below
/// `abs_tol + rel_tol·|I|`; endpoint algebraic singularities such as `r^μ`
/// are handled by repeated bisection towards the endpoint.
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Complex64 {
    let mut stack = vec![(a, b, gk15(&f, a, b))];
    let mut done = Vec::new();
    let mut total_est = stack[0].2 .0;
    let mut iterations = 0;
    while let Some((lo, hi, (val, err))) = stack.pop() {
        iterations += 1;
        let tol = (abs_tol + rel_tol * total_est.norm()) * ((hi - lo) / (b - a)).sqrt();
        if err <= tol || iterations > 20_000 || hi - lo < 1e-15 * (b - a).abs() {
            done.push(val);
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let left = gk15(&f, lo, mid);
        let right = gk15(&f, mid, hi);
        total_est += left.0 + right.0 - val;
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }
    // fixed summation order: smallest magnitudes first
    done.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    done.into_iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
}

/// `∫₀¹ (f_a (1 − s) + f_b s) e^{c s} ds` for `|c| ≤ 1`, by power series.
///
/// Used on sub-edges where the probe phase changes by at most one radian,
/// so the series converges to machine precision within 30 terms.
pub fn linear_times_exp(fa: Complex64, fb: Complex64, c: Complex64) -> Complex64 {
    // E0 = Σ c^k/(k+1)!, E1 = Σ c^k/(k!(k+2))
    let mut e0 = Complex64::new(0.0, 0.0);
    let mut e1 = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0); // c^k / k!
    for k in 0..40 {
        let kf = k as f64;
        let a0 = term / (kf + 1.0);
        let a1 = term / (kf + 2.0);
        e0 += a0;
        e1 += a1;
        if a0.norm() < 1e-18 * e0.norm() && k > 2 {
            break;
        }
        term = term * c / (kf + 1.0);
    }
    // ∫(1−s)e^{cs} = E0 − E1
    fa * (e0 - e1) + fb * e1
}
