use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values the adaptive integrator can accumulate.
pub trait Scalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn modulus(self) -> f64;
    /// Real projection used when reporting a partial value in an error.
    fn real_part(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn real_part(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn real_part(self) -> f64 {
        self.re
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_478,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod21<T: Scalar, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::default();
    let mut resabs = WGK[10] * fc.modulus();
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.modulus() + f2.modulus());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).modulus();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).modulus() + (fv2[j] - mean).modulus());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).modulus();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Globally adaptive Gauss-Kronrod integrator.
///
/// Refinement always bisects the segment with the largest error estimate and
/// stops once the summed estimate is below `max(abs_tol, rel_tol * |value|)`.
/// Segment values are summed in left-to-right order so results are
/// reproducible regardless of refinement history.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_evals: 2_000_000,
        }
    }
}

impl Quadrature {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            ..Default::default()
        }
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok_abs = self.abs_tol.is_finite() && self.abs_tol >= 0.0;
        let ok_rel = self.rel_tol.is_finite() && self.rel_tol >= 0.0;
        if !ok_abs || !ok_rel || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(Error::arg(format!(
                "quadrature tolerances must be non-negative and not both zero \
                 (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        Ok(())
    }

    /// Integrates over `[a, b]`.
    pub fn integrate<T, F>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult<T>>
    where
        T: Scalar,
        F: FnMut(f64) -> T,
    {
        self.integrate_pieces(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, starting from the given
    /// breakpoints as the initial partition.
    pub fn integrate_pieces<T, F>(&self, mut f: F, points: &[f64]) -> Result<QuadratureResult<T>>
    where
        T: Scalar,
        F: FnMut(f64) -> T,
    {
        self.validate()?;
        if points.len() < 2 {
            return Err(Error::arg("need at least two integration breakpoints"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::arg("integration limits must be finite"));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::arg("integration breakpoints must be non-decreasing"));
        }

        let mut heap = BinaryHeap::new();
        let mut evaluations = 0usize;
        let mut done: Vec<Segment<T>> = Vec::new();
        for w in points.windows(2) {
            if w[1] == w[0] {
                continue;
            }
            heap.push(kronrod21(&mut f, w[0], w[1]));
            evaluations += 21;
        }

        let scale = points[points.len() - 1].abs().max(points[0].abs()).max(1e-300);
        let (mut value, mut error) = totals(heap.iter());
        let mut steps = 0usize;
        loop {
            steps += 1;
            if steps.is_multiple_of(1024) {
                // resynchronise the running sums
                (value, error) = totals(heap.iter().chain(done.iter()));
            }
            let target = self.abs_tol.max(self.rel_tol * value.modulus());
            if error <= target {
                return Ok(finish(heap, done, evaluations));
            }
            let next = if evaluations + 42 > self.max_evals {
                None
            } else {
                heap.pop()
            };
            let Some(worst) = next else {
                // Budget spent, or every segment is at the resolution floor.
                let (value, error) = totals(heap.iter().chain(done.iter()));
                return Err(Error::Convergence {
                    partial: value.real_part(),
                    abs_error: error,
                    evaluations,
                });
            };
            if (worst.b - worst.a).abs() <= 64.0 * f64::EPSILON * scale {
                done.push(worst);
                continue;
            }
            let mid = 0.5 * (worst.a + worst.b);
            let left = kronrod21(&mut f, worst.a, mid);
            let right = kronrod21(&mut f, mid, worst.b);
            evaluations += 42;
            value = value + (left.value + right.value - worst.value);
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
    }
}

fn totals<'a, T: Scalar + 'a>(segments: impl Iterator<Item = &'a Segment<T>>) -> (T, f64) {
    segments.fold((T::default(), 0.0), |(v, e), s| (v + s.value, e + s.error))
}

fn finish<T: Scalar>(
    heap: BinaryHeap<Segment<T>>,
    mut done: Vec<Segment<T>>,
    evaluations: usize,
) -> QuadratureResult<T> {
    done.extend(heap);
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<T> = done.iter().map(|s| s.value).collect();
    QuadratureResult {
        value: pairwise_sum(&values),
        abs_error: done.iter().map(|s| s.error).sum(),
        evaluations,
    }
}

fn pairwise_sum<T: Scalar>(values: &[T]) -> T {
    match values.len() {
        0 => T::default(),
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    Quadrature::with_abs_tol(tol).integrate(f, a, b)
}

/// Remainder of a semi-infinite integral past some point: a value to add
/// (zero when only a bound is known) and a bound on what is left unaccounted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub value: f64,
    pub bound: f64,
}

impl TailEstimate {
    pub fn bound_only(bound: f64) -> Self {
        TailEstimate { value: 0.0, bound }
    }
}

/// Integrates `f` from `splits[0]` to infinity.
///
/// The finite part `[splits[0], splits[last]]` is integrated adaptively with
/// the splits as initial breakpoints; `tail(splits[last])` supplies the rest.
/// The reported error is the finite-part estimate plus the tail bound.
pub fn integrate_semi_infinite<F, G>(
    f: F,
    splits: &[f64],
    tail: G,
    tol: f64,
) -> Result<QuadratureResult<f64>>
where
    F: FnMut(f64) -> f64,
    G: FnOnce(f64) -> Result<TailEstimate>,
{
    integrate_semi_infinite_with(&Quadrature::with_abs_tol(tol), f, splits, tail)
}

pub(crate) fn integrate_semi_infinite_with<F, G>(
    quad: &Quadrature,
    f: F,
    splits: &[f64],
    tail: G,
) -> Result<QuadratureResult<f64>>
where
    F: FnMut(f64) -> f64,
    G: FnOnce(f64) -> Result<TailEstimate>,
{
    let tol = quad.abs_tol;
    if !(tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    let Some(&last) = splits.last() else {
        return Err(Error::arg("need at least one split point"));
    };
    let rest = tail(last)?;
    if !(rest.bound >= 0.0) || rest.bound > tol {
        return Err(Error::Convergence {
            partial: rest.value,
            abs_error: rest.bound,
            evaluations: 0,
        });
    }
    if splits.len() == 1 {
        return Ok(QuadratureResult {
            value: rest.value,
            abs_error: rest.bound,
            evaluations: 0,
        });
    }
    let budget = Quadrature {
        abs_tol: (tol - rest.bound).max(0.5 * tol),
        ..*quad
    };
    let body = budget.integrate_pieces(f, splits).map_err(|e| match e {
        Error::Convergence {
            partial,
            abs_error,
            evaluations,
        } => Error::Convergence {
            partial: partial + rest.value,
            abs_error: abs_error + rest.bound,
            evaluations,
        },
        other => other,
    })?;
    Ok(QuadratureResult {
        value: body.value + rest.value,
        abs_error: body.abs_error + rest.bound,
        evaluations: body.evaluations,
    })
}
