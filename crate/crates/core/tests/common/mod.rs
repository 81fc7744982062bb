//! Reference values computed independently of the library's integrators.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use vacfluct::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(newton_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

/// Newton iteration on the three-term recurrence.
fn newton_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Fixed-order Gauss-Legendre integral of a complex function over [a, b].
pub fn gl_integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let rule = gauss_legendre(n);
    let (x, w) = (&rule.0, &rule.1);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter()
        .zip(w)
        .map(|(xi, wi)| f(m + h * xi) * (wi * h))
        .sum()
}

/// Single-pole amplitudes `(s, r)`.
pub fn single_pole(cut: f64, w: Complex64) -> (Complex64, Complex64) {
    let den = w + I * cut;
    (w / den, -I * cut / den)
}

/// Brute-force kernel `∫_0^w a (w - a) {1 - s s + r r} da` for a single-pole mirror.
pub fn kernel_brute(cut: f64, w: f64, nodes: usize) -> Complex64 {
    gl_integrate(
        |a| {
            let (s1, r1) = single_pole(cut, a.into());
            let (s2, r2) = single_pole(cut, (w - a).into());
            (1.0 - s1 * s2 + r1 * r2) * (a * (w - a))
        },
        0.0,
        w,
        nodes,
    )
}

/// Closed form of the same kernel, valid in the closed upper half plane:
/// `i W (w + 2 i W) w + 2 W^2 (w + i W) Log(1 - i w / W)`.
pub fn kernel_closed(cut: f64, w: Complex64) -> Complex64 {
    let c = Complex64::from(cut);
    I * c * (w + 2.0 * I * c) * w + 2.0 * c * c * (w + I * c) * (1.0 - I * w / c).ln()
}

pub fn chi_closed(cut: f64, w: Complex64, hbar: f64) -> Complex64 {
    I * hbar * kernel_closed(cut, w) / (2.0 * PI)
}

pub fn c_ff_closed(cut: f64, w: f64, hbar: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else {
        hbar * hbar * kernel_closed(cut, w.into()).re / PI
    }
}

/// Casimir force between two single-pole mirrors from the imaginary-frequency
/// form `(hbar/pi) ∫ xi rho / (1 - rho) dxi`, `rho = W1 W2 e^{-2 xi q} / ((xi + W1)(xi + W2))`,
/// by composite Gauss-Legendre.
pub fn casimir_single_pole_oracle(cut1: f64, cut2: f64, q: f64, hbar: f64) -> f64 {
    let f = |xi: f64| {
        let rho = cut1 * cut2 / ((xi + cut1) * (xi + cut2)) * (-2.0 * xi * q).exp();
        Complex64::from(xi * rho / (1.0 - rho))
    };
    // panels in units of 1/q; beyond 40/q the integrand is below e^-80
    let edges = [0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];
    let mut total = 0.0;
    for p in edges.windows(2) {
        total += gl_integrate(f, p[0] / q, p[1] / q, 200).re;
    }
    hbar / PI * total
}

/// Relative difference `|a - b| / |b|`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
