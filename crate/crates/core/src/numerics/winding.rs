use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tuning for [`winding_number`].
#[derive(Debug, Clone, Copy)]
pub struct WindingOptions {
    /// Largest phase step accepted between neighbouring samples.
    pub max_phase_step: f64,
    /// Initial uniform samples per polyline edge.
    pub samples_per_edge: usize,
    /// Hard cap on function evaluations per pass.
    pub max_evaluations: usize,
    /// The contour is degenerate if `min|f| <= ratio * max|f|` along it.
    pub degeneracy_ratio: f64,
    /// Accepted distance of the raw winding from an integer.
    pub integer_tolerance: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            max_phase_step: PI / 6.0,
            samples_per_edge: 8,
            max_evaluations: 400_000,
            degeneracy_ratio: 1e-9,
            integer_tolerance: 0.01,
        }
    }
}

struct Pass {
    turns: f64,
    min_modulus: f64,
    min_at: Complex64,
    max_modulus: f64,
}

/// Number of times `f` winds around the origin along the closed polyline
/// `contour` (the last vertex connects back to the first).
///
/// By the argument principle this is the number of zeros minus poles of an
/// analytic `f` enclosed by a counter-clockwise contour.
pub fn winding_number<F>(f: F, contour: &[Complex64]) -> Result<i64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    winding_number_with(f, contour, &WindingOptions::default())
}

pub fn winding_number_with<F>(mut f: F, contour: &[Complex64], opts: &WindingOptions) -> Result<i64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if contour.len() < 3 {
        return Err(Error::arg("contour needs at least three vertices"));
    }
    let mut step = opts.max_phase_step;
    let mut last_turns = f64::NAN;
    for _ in 0..5 {
        let pass = trace(&mut f, contour, step, opts)?;
        if pass.min_modulus <= opts.degeneracy_ratio * pass.max_modulus {
            return Err(Error::ContourDegeneracy {
                min_modulus: pass.min_modulus,
                near: format!("{}", pass.min_at),
            });
        }
        let rounded = pass.turns.round();
        let settled = (pass.turns - rounded).abs() <= opts.integer_tolerance;
        // A finer pass that agrees with the previous one confirms the count.
        if settled && (last_turns.is_nan() || (last_turns - pass.turns).abs() < 0.5) {
            return Ok(rounded as i64);
        }
        last_turns = pass.turns;
        step *= 0.5;
    }
    Err(Error::ContourDegeneracy {
        min_modulus: f64::NAN,
        near: format!("winding did not settle to an integer (last {last_turns:.4})"),
    })
}

fn trace<F>(f: &mut F, contour: &[Complex64], step: f64, opts: &WindingOptions) -> Result<Pass>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let mut evaluations = 0usize;
    let mut eval = |z: Complex64, evaluations: &mut usize| -> Result<Complex64> {
        *evaluations += 1;
        let v = f(z)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::ContourDegeneracy {
                min_modulus: f64::NAN,
                near: format!("{z} (non-finite value)"),
            });
        }
        Ok(v)
    };

    let mut phase = 0.0;
    let mut min_modulus = f64::INFINITY;
    let mut min_at = contour[0];
    let mut max_modulus = 0.0f64;
    let n = contour.len();
    for i in 0..n {
        let z0 = contour[i];
        let z1 = contour[(i + 1) % n];
        let at = |t: f64| z0 + (z1 - z0) * t;
        let m = opts.samples_per_edge.max(1);
        let mut ts: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
        let mut vals = Vec::with_capacity(ts.len());
        for &t in &ts {
            vals.push(eval(at(t), &mut evaluations)?);
        }
        // Walk left to right, bisecting any step whose phase change is too big.
        let mut k = 0;
        while k + 1 < ts.len() {
            let (ta, tb) = (ts[k], ts[k + 1]);
            let dphi = (vals[k + 1] / vals[k]).arg();
            if dphi.abs() > step {
                if tb - ta < 1e-13 {
                    return Err(Error::ContourDegeneracy {
                        min_modulus: vals[k].norm().min(vals[k + 1].norm()),
                        near: format!("{}", at(ta)),
                    });
                }
                if evaluations >= opts.max_evaluations {
                    return Err(Error::ContourDegeneracy {
                        min_modulus: f64::NAN,
                        near: format!("evaluation budget exhausted near {}", at(ta)),
                    });
                }
                let tm = 0.5 * (ta + tb);
                let vm = eval(at(tm), &mut evaluations)?;
                ts.insert(k + 1, tm);
                vals.insert(k + 1, vm);
                continue;
            }
            phase += dphi;
            k += 1;
        }
        for (t, v) in ts.iter().zip(&vals) {
            let r = v.norm();
            if r < min_modulus {
                min_modulus = r;
                min_at = at(*t);
            }
            max_modulus = max_modulus.max(r);
        }
    }
    Ok(Pass {
        turns: phase / (2.0 * PI),
        min_modulus,
        min_at,
        max_modulus,
    })
}

/// Counter-clockwise boundary of `{ |z| < radius, Im z > lift }` as a
/// polyline: the chord at height `lift` followed by `arc_points` vertices on
/// the upper arc.
pub fn semicircle_contour(radius: f64, lift: f64, arc_points: usize) -> Result<Vec<Complex64>> {
    if !(radius > 0.0 && radius.is_finite()) || !(lift >= 0.0) || lift >= radius {
        return Err(Error::arg(format!(
            "semicircle needs 0 <= lift < radius (radius {radius}, lift {lift})"
        )));
    }
    let theta0 = (lift / radius).asin();
    let n = arc_points.max(8);
    let mut pts = Vec::with_capacity(n + 2);
    for k in 0..=n {
        let theta = theta0 + (PI - 2.0 * theta0) * k as f64 / n as f64;
        pts.push(Complex64::from_polar(radius, theta));
    }
    // arc runs from the right chord end over the top to the left chord end;
    // the closing edge is the chord itself.
    Ok(pts)
}
