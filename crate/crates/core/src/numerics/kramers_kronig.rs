//! Dispersion-relation (Kramers-Kronig) consistency check for sampled
//! susceptibilities.
//!
//! For a causal response obeying `chi(-w) = conj(chi(w))`, the real part is
//! fixed by the imaginary part up to polynomial subtraction terms. With `n`
//! subtractions the anchors are `n/2` symmetric pairs `±w_j` taken from the
//! grid, plus the origin when `n` is odd. Writing `L` for the polynomial
//! interpolating `chi` at the anchors and `P(w)` for the anchor polynomial,
//! `h = (chi - L) / P` is again causal and decays, so
//!
//! ```text
//! Re chi(w) = Re L(w) + P(w) / pi * PV ∫ Im h(u) / (u - w) du
//! ```
//!
//! The principal value is taken on the grid by subtracting the singular
//! value (equivalently, pairing samples symmetrically about the pole), and
//! the part of the integral beyond the grid is extrapolated from a fitted
//! asymptotic form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::lstsq::least_squares;
use crate::spectrum::{Spectrum, SpectrumKind};

#[derive(Debug, Clone, Copy)]
pub struct KramersKronig {
    pub subtractions: usize,
    /// Largest accepted uncertainty of the extrapolated tail, relative to the
    /// susceptibility scale on the central half of the grid.
    pub tail_accuracy: f64,
}

impl Default for KramersKronig {
    fn default() -> Self {
        KramersKronig {
            subtractions: 4,
            tail_accuracy: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KramersKronigReport {
    /// Max over the central half of `|Re chi_rec - Re chi| / max|chi|`.
    pub defect: f64,
    pub omega: Vec<f64>,
    pub reconstructed_re: Vec<f64>,
    pub anchors: Vec<f64>,
    /// Spread between two tail extrapolations, same normalisation as `defect`.
    pub tail_uncertainty: f64,
}

/// Convenience wrapper returning only the defect.
pub fn kramers_kronig_defect(chi: &Spectrum, subtractions: usize) -> Result<f64> {
    KramersKronig {
        subtractions,
        ..Default::default()
    }
    .check(chi)
    .map(|r| r.defect)
}

impl KramersKronig {
    pub fn check(&self, chi: &Spectrum) -> Result<KramersKronigReport> {
        chi.expect_kind(SpectrumKind::Susceptibility)?;
        let grid = chi.grid();
        let values = chi.complex_values()?;
        let n = grid.len();
        if n < 16 {
            return Err(Error::arg("dispersion check needs at least 16 grid points"));
        }
        if grid[0] < 0.0 {
            return Err(Error::arg("dispersion check expects a grid on w >= 0"));
        }
        let odd = self.subtractions % 2 == 1;
        if odd && grid[0] != 0.0 {
            return Err(Error::arg("an odd number of subtractions needs a grid point at w = 0"));
        }
        let pairs = self.subtractions / 2;
        let re: Vec<f64> = values.iter().map(|c| c.re).collect();
        let im: Vec<f64> = values.iter().map(|c| c.im).collect();

        // anchor indices spread through the interior of the grid
        let mut anchor_idx: Vec<usize> = (1..=pairs)
            .map(|j| ((j as f64 / (pairs + 1) as f64) * (n - 1) as f64).round() as usize)
            .collect();
        anchor_idx.dedup();
        if anchor_idx.len() != pairs || anchor_idx.iter().any(|&i| i == 0 || grid[i] <= 0.0) {
            return Err(Error::arg("grid too small for the requested subtractions"));
        }
        let anchors: Vec<f64> = anchor_idx.iter().map(|&i| grid[i]).collect();

        // Re L: polynomial in w^2 through (w_j^2, Re chi_j) and (0, Re chi(0)) if odd.
        let mut re_nodes: Vec<(f64, f64)> =
            anchor_idx.iter().map(|&i| (grid[i] * grid[i], re[i])).collect();
        if odd {
            re_nodes.push((0.0, re[0]));
        }
        // Im L: w * q(w^2), q through (w_j^2, Im chi_j / w_j).
        let im_nodes: Vec<(f64, f64)> = anchor_idx
            .iter()
            .map(|&i| (grid[i] * grid[i], im[i] / grid[i]))
            .collect();
        let re_l = |w: f64| lagrange(&re_nodes, w * w);
        let im_l = |w: f64| w * lagrange(&im_nodes, w * w);
        let poly = |w: f64| {
            let base: f64 = anchors.iter().map(|a| w * w - a * a).product();
            if odd {
                w * base
            } else {
                base
            }
        };

        // Im h on the grid, with removable points filled from neighbours.
        let mut h: Vec<f64> = (0..n)
            .map(|i| {
                let p = poly(grid[i]);
                if p == 0.0 {
                    f64::NAN
                } else {
                    (im[i] - im_l(grid[i])) / p
                }
            })
            .collect();
        for i in 0..n {
            if h[i].is_nan() {
                h[i] = if i == 0 {
                    if odd {
                        linear(grid[1], h[1], grid[2], h[2], grid[0])
                    } else {
                        0.0
                    }
                } else if i + 1 < n {
                    linear(grid[i - 1], h[i - 1], grid[i + 1], h[i + 1], grid[i])
                } else {
                    linear(grid[i - 2], h[i - 2], grid[i - 1], h[i - 1], grid[i])
                };
            }
        }
        // a susceptibility the subtraction polynomial already reproduces leaves
        // only rounding noise, whose sign changes would defeat the tail fit
        let im_max = im.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let residual_max = (0..n).fold(0.0f64, |m, i| m.max((im[i] - im_l(grid[i])).abs()));
        if residual_max <= 1e-12 * im_max {
            h.iter_mut().for_each(|x| *x = 0.0);
        }

        // value of the (odd or even) extension at the origin when the grid starts above 0
        let h_origin = if odd { h[0] } else { 0.0 };

        let lo = grid[0];
        let hi = grid[n - 1];
        let c_lo = lo + 0.25 * (hi - lo);
        let c_hi = lo + 0.75 * (hi - lo);
        let central: Vec<usize> = (1..n - 1)
            .filter(|&i| grid[i] >= c_lo && grid[i] <= c_hi)
            .collect();
        if central.is_empty() {
            return Err(Error::arg("grid has no interior points in its central half"));
        }
        let scale = central
            .iter()
            .map(|&i| values[i].norm())
            .fold(0.0f64, f64::max);
        let scale = if scale > 0.0 { scale } else { 1.0 };

        let tail = Tail::fit(grid, &h, &anchors)?;
        let sign = if odd { -1.0 } else { 1.0 };

        let mut omega = Vec::with_capacity(central.len());
        let mut rec = Vec::with_capacity(central.len());
        let mut defect = 0.0f64;
        let mut tail_uncertainty = 0.0f64;
        for &k in &central {
            let w = grid[k];
            // PV ∫_0^W h(u)/(u-w) du by singularity subtraction
            let dh = derivative(grid, &h, k);
            let g = |i: usize| {
                if i == k {
                    dh
                } else {
                    (h[i] - h[k]) / (grid[i] - w)
                }
            };
            let mut singular = trapezoid(grid, g) + h[k] * ((hi - w) / w).ln();
            // the regular partner term ± ∫ h(u)/(u+w) du
            let mut regular = trapezoid(grid, |i| h[i] / (grid[i] + w));
            if lo > 0.0 {
                // [0, lo], with h linear between its origin value and h[0]
                let g0 = (h_origin - h[k]) / (0.0 - w);
                singular += 0.5 * lo * (g0 + g(0));
                regular += 0.5 * lo * (h_origin / w + h[0] / (lo + w));
            }
            let (t_near, t_far) = tail.integrals(w, odd)?;
            let pv = singular + sign * regular + t_near;
            let value = re_l(w) + poly(w) * pv / PI;
            defect = defect.max((value - re[k]).abs() / scale);
            tail_uncertainty = tail_uncertainty.max((poly(w) * (t_near - t_far) / PI).abs() / scale);
            omega.push(w);
            rec.push(value);
        }
        if !defect.is_finite() {
            return Err(Error::Coverage("dispersion reconstruction produced a non-finite value".into()));
        }
        if !(tail_uncertainty <= self.tail_accuracy) {
            return Err(Error::Coverage(format!(
                "tail extrapolation uncertain at the {tail_uncertainty:.3e} level \
                 (accepted {:.1e}); widen the grid or add subtractions",
                self.tail_accuracy
            )));
        }
        Ok(KramersKronigReport {
            defect,
            omega,
            reconstructed_re: rec,
            anchors,
            tail_uncertainty,
        })
    }
}

fn lagrange(nodes: &[(f64, f64)], x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &(xj, yj))| {
            let basis: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, &(xm, _))| (x - xm) / (xj - xm))
                .product();
            yj * basis
        })
        .sum()
}

fn linear(x0: f64, y0: f64, x1: f64, y1: f64, x: f64) -> f64 {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn derivative(x: &[f64], y: &[f64], k: usize) -> f64 {
    let (h0, h1) = (x[k] - x[k - 1], x[k + 1] - x[k]);
    (-h1 / (h0 * (h0 + h1))) * y[k - 1]
        + ((h1 - h0) / (h0 * h1)) * y[k]
        + (h0 / (h1 * (h0 + h1))) * y[k + 1]
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut prev = f(0);
    for i in 1..x.len() {
        let cur = f(i);
        acc += 0.5 * (x[i] - x[i - 1]) * (prev + cur);
        prev = cur;
    }
    acc
}

/// Continuation of `h` beyond the last grid point `W`.
///
/// The anchor zeros of `P` sit inside the grid, so `h` itself is a poor
/// candidate for a short asymptotic expansion. Instead
/// `g(u) = h(u) Π (1 - a_j^2/u^2)` is fitted as a sum of `(u/W)^-k` and
/// `(u/W)^-k ln(u/W)` terms over the outer part of the grid, and the anchor
/// factor is restored as the series `Σ e_k (u/W)^-2k`. Two fits with
/// different windows and bases give the value and its uncertainty.
struct Tail {
    w: f64,
    /// Expansion of `1 / Π (1 - alpha_j z)`, `alpha_j = (a_j/W)^2`.
    anchor_series: Vec<f64>,
    primary: Vec<(Term, f64)>,
    alternate: Vec<(Term, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    power: u32,
    log: bool,
}

const PRIMARY_BASIS: [Term; 4] = [
    Term { power: 1, log: false },
    Term { power: 3, log: false },
    Term { power: 3, log: true },
    Term { power: 4, log: false },
];
const ALTERNATE_BASIS: [Term; 5] = [
    Term { power: 1, log: false },
    Term { power: 3, log: false },
    Term { power: 3, log: true },
    Term { power: 4, log: false },
    Term { power: 5, log: false },
];

impl Tail {
    fn fit(grid: &[f64], h: &[f64], anchors: &[f64]) -> Result<Tail> {
        let n = grid.len();
        let w = grid[n - 1];
        let h_end = h[n - 1];
        let alpha: Vec<f64> = anchors.iter().map(|a| (a / w) * (a / w)).collect();
        let mut anchor_series = vec![1.0];
        let top = alpha.iter().fold(0.0f64, |m, &a| m.max(a));
        let len = if top > 0.0 { ((1e-18f64).ln() / top.ln()).ceil() as usize + 2 } else { 1 };
        let len = len.max(1);
        anchor_series.resize(len, 0.0);
        for &a in &alpha {
            // multiply by 1 / (1 - a z)
            for k in 1..len {
                anchor_series[k] += a * anchor_series[k - 1];
            }
        }
        if h.iter().rev().take(n / 4).all(|&x| x == 0.0) {
            return Ok(Tail {
                w,
                anchor_series,
                primary: vec![],
                alternate: vec![],
            });
        }
        let slope = |i: usize| -> f64 {
            let (a, b) = (h[i], h_end);
            if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
                f64::NAN
            } else {
                (b / a).ln() / (w / grid[i]).ln()
            }
        };
        let far = ((n - 1) as f64 * 0.9).round() as usize;
        let p_near = slope(n - 2);
        let p_far = slope(far.min(n - 3));
        if !(p_near <= -0.05 && p_far <= -0.05) {
            return Err(Error::Coverage(format!(
                "subtracted integrand does not decay past the grid \
                 (local exponents {p_near:.3}, {p_far:.3}); add subtractions or widen the grid"
            )));
        }
        let fit = |from: f64, basis: &[Term]| -> Result<Vec<(Term, f64)>> {
            let idx: Vec<usize> = (0..n).filter(|&i| grid[i] >= from * w && grid[i] > 0.0).collect();
            if idx.len() < 2 * basis.len() {
                return Err(Error::Coverage(
                    "too few grid points near the upper end to model the tail".into(),
                ));
            }
            let columns: Vec<Vec<f64>> = basis
                .iter()
                .map(|t| idx.iter().map(|&i| t.eval(grid[i] / w)).collect())
                .collect();
            let y: Vec<f64> = idx
                .iter()
                .map(|&i| {
                    let v = grid[i] / w;
                    h[i] * alpha.iter().map(|a| 1.0 - a / (v * v)).product::<f64>()
                })
                .collect();
            let (c, _) = least_squares(&columns, &y)?;
            Ok(basis.iter().copied().zip(c).collect())
        };
        Ok(Tail {
            w,
            anchor_series,
            primary: fit(2.0 / 3.0, &PRIMARY_BASIS)?,
            alternate: fit(0.5, &ALTERNATE_BASIS)?,
        })
    }

    /// ∫_W^∞ h(u) [1/(u-w) ± 1/(u+w)] du for both fits.
    ///
    /// For `u > W > w` the kernel is `(2/u) Σ (w/u)^j` over even (`+`) or
    /// odd (`-`) `j`; with `v = u/W` each term integrates in closed form,
    /// `∫_1^∞ v^(-s-1) dv = 1/s` and `∫_1^∞ v^(-s-1) ln v dv = 1/s^2`.
    fn integrals(&self, w: f64, odd: bool) -> Result<(f64, f64)> {
        let x = w / self.w;
        if !(0.0..1.0).contains(&x) {
            return Err(Error::arg("tail expansion needs 0 <= w < W"));
        }
        let parity = if odd { 1 } else { 0 };
        // Σ_j x^j G(s0 + j) over j of the kernel's parity
        let kernel_sum = |s0: usize, log: bool| -> f64 {
            let mut j = parity;
            let mut power = x.powi(j as i32);
            let mut acc = 0.0;
            loop {
                let s = (s0 + j) as f64;
                let term = power * if log { 1.0 / (s * s) } else { 1.0 / s };
                acc += term;
                if term.abs() <= 1e-17 * acc.abs() || power == 0.0 {
                    break acc;
                }
                j += 2;
                power *= x * x;
            }
        };
        let one = |terms: &[(Term, f64)]| -> f64 {
            let mut total = 0.0;
            for &(t, c) in terms {
                let acc: f64 = self
                    .anchor_series
                    .iter()
                    .enumerate()
                    .map(|(k, e)| e * kernel_sum(t.power as usize + 2 * k, t.log))
                    .sum();
                total += 2.0 * c * acc;
            }
            total
        };
        Ok((one(&self.primary), one(&self.alternate)))
    }
}

impl Term {
    fn eval(self, v: f64) -> f64 {
        let p = v.powi(-(self.power as i32));
        if self.log {
            p * v.ln()
        } else {
            p
        }
    }
}
