//! Vacuum stress-tensor correlations of the electromagnetic field in four
//! space-time dimensions.
//!
//! Momenta carry lower indices and the metric is `diag(1, -1, -1, -1)`.

use std::f64::consts::PI;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Hbar;

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const LIGHT_LIKE_RATIO: f64 = 1e-12;

pub type Matrix4 = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourMomentum {
    k: [f64; 4],
}

impl FourMomentum {
    pub fn new(k0: f64, k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let k = [k0, k1, k2, k3];
        if k.iter().any(|c| !c.is_finite()) {
            return Err(Error::arg(format!("four-momentum components must be finite, got {k:?}")));
        }
        Ok(FourMomentum { k })
    }

    pub fn components(&self) -> [f64; 4] {
        self.k
    }

    /// `k^mu`
    pub fn raised(&self) -> [f64; 4] {
        std::array::from_fn(|m| METRIC[m] * self.k[m])
    }

    /// `k^2 = k_mu k^mu`
    pub fn square(&self) -> f64 {
        self.k[0] * self.k[0] - self.k[1] * self.k[1] - self.k[2] * self.k[2] - self.k[3] * self.k[3]
    }

    /// Euclidean norm squared of the components.
    pub fn euclidean_norm_sqr(&self) -> f64 {
        self.k.iter().map(|c| c * c).sum()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        FourMomentum {
            k: self.k.map(|c| lambda * c),
        }
    }

    pub fn transformed(&self, l: &Matrix4) -> Self {
        FourMomentum {
            k: std::array::from_fn(|m| (0..4).map(|a| l[m][a] * self.k[a]).sum()),
        }
    }

    fn check_off_light_cone(&self) -> Result<f64> {
        let k2 = self.square();
        if k2.abs() < LIGHT_LIKE_RATIO * self.euclidean_norm_sqr() || k2 == 0.0 {
            return Err(Error::LightLike { k2 });
        }
        Ok(k2)
    }
}

/// Dense tensor with four lower indices in `(mu, nu, rho, sigma)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank4Tensor {
    data: Box<[f64; 256]>,
}

#[inline]
fn flat(m: usize, n: usize, r: usize, s: usize) -> usize {
    ((m * 4 + n) * 4 + r) * 4 + s
}

impl Index<[usize; 4]> for Rank4Tensor {
    type Output = f64;
    fn index(&self, [m, n, r, s]: [usize; 4]) -> &f64 {
        &self.data[flat(m, n, r, s)]
    }
}

impl Rank4Tensor {
    pub fn zeros() -> Self {
        Rank4Tensor {
            data: Box::new([0.0; 256]),
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros();
        for m in 0..4 {
            for n in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        t.data[flat(m, n, r, s)] = f(m, n, r, s);
                    }
                }
            }
        }
        t
    }

    pub fn get(&self, m: usize, n: usize, r: usize, s: usize) -> f64 {
        self.data[flat(m, n, r, s)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Rank4Tensor {
            data: Box::new(self.data.map(|x| c * x)),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// Largest violation of `(mu nu)`, `(rho sigma)` and pair-exchange symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        let x = self.get(m, n, r, s);
                        d = d
                            .max((x - self.get(n, m, r, s)).abs())
                            .max((x - self.get(m, n, s, r)).abs())
                            .max((x - self.get(r, s, m, n)).abs());
                    }
                }
            }
        }
        d
    }

    /// `eta^{mu nu} T_{mu nu rho sigma}`
    pub fn trace_first_pair(&self) -> Matrix4 {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (s, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|m| METRIC[m] * self.get(m, m, r, s)).sum();
            }
        }
        out
    }

    /// Largest component of `k^alpha T` contracted on each of the four slots.
    pub fn transversality_defect(&self, k: &FourMomentum) -> f64 {
        let up = k.raised();
        let mut d: f64 = 0.0;
        for slot in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        let rest = [a, b, c];
                        let v: f64 = (0..4)
                            .map(|x| {
                                let mut full = [0; 4];
                                let mut it = rest.iter();
                                for (i, f) in full.iter_mut().enumerate() {
                                    *f = if i == slot { x } else { *it.next().unwrap() };
                                }
                                up[x] * self[full]
                            })
                            .sum();
                        d = d.max(v.abs());
                    }
                }
            }
        }
        d
    }

    /// `L_m^a L_n^b L_r^c L_s^d T_abcd`
    pub fn transformed(&self, l: &Matrix4) -> Self {
        // one index at a time
        let mut cur = self.clone();
        for slot in 0..4 {
            let prev = cur.clone();
            cur = Rank4Tensor::from_fn(|m, n, r, s| {
                let idx = [m, n, r, s];
                (0..4)
                    .map(|a| {
                        let mut j = idx;
                        j[slot] = a;
                        l[idx[slot]][a] * prev[j]
                    })
                    .sum()
            });
        }
        cur
    }
}

/// Boost along x with the given rapidity.
pub fn boost_x(rapidity: f64) -> Matrix4 {
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    [
        [ch, sh, 0.0, 0.0],
        [sh, ch, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// `pi_{mu nu} = eta_{mu nu} - k_mu k_nu / k^2`
pub fn transverse_projector(k: &FourMomentum) -> Result<Matrix4> {
    let k2 = k.check_off_light_cone()?;
    let c = k.components();
    let mut p = [[0.0; 4]; 4];
    for (m, row) in p.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            let eta = if m == n { METRIC[m] } else { 0.0 };
            *v = eta - c[m] * c[n] / k2;
        }
    }
    Ok(p)
}

/// `½(pi_{mu rho} pi_{nu sigma} + pi_{mu sigma} pi_{nu rho}) - ⅓ pi_{mu nu} pi_{rho sigma}`
pub fn stress_projector(k: &FourMomentum) -> Result<Rank4Tensor> {
    let p = transverse_projector(k)?;
    Ok(Rank4Tensor::from_fn(|m, n, r, s| {
        0.5 * (p[m][r] * p[n][s] + p[m][s] * p[n][r]) - p[m][n] * p[r][s] / 3.0
    }))
}

/// Spectral density of the stress-tensor correlations,
/// `(hbar^2 / 40 pi) theta(k0) theta(k^2) (k^2)^2 pi_{mu nu rho sigma}`.
///
/// Zero (not an error) outside the forward light cone, including its boundary.
pub fn stress_correlation(k: &FourMomentum, hbar: Hbar) -> Rank4Tensor {
    let k2 = k.square();
    let c = k.components();
    if c[0] <= 0.0 || k2 <= 0.0 {
        return Rank4Tensor::zeros();
    }
    match stress_projector(k) {
        Ok(p) => {
            let h = hbar.get();
            p.scaled(h * h / (40.0 * PI) * k2 * k2)
        }
        // inside the cone but numerically on it: the prefactor (k^2)^2 vanishes
        Err(_) => Rank4Tensor::zeros(),
    }
}
