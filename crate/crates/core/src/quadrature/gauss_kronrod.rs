use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Axis, Method, QuadError, QuadratureResult, DEFAULT_MAX_EVALUATIONS};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_223_048,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and budget for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: u64,
}

impl AdaptiveOptions {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }

    pub fn with_budget(mut self, max_evaluations: u64) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }

    pub(crate) fn validate(&self) -> Result<(), QuadError> {
        let ok = |t: f64| t.is_finite() && t >= 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) || (self.rel_tol == 0.0 && self.abs_tol == 0.0) {
            return Err(QuadError::InvalidTolerance(format!(
                "rel_tol = {}, abs_tol = {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_evaluations < 21 {
            return Err(QuadError::InvalidTolerance(format!(
                "evaluation budget {} is below one rule application",
                self.max_evaluations
            )));
        }
        Ok(())
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    // ∫|f| over the segment, for the round-off floor.
    magnitude: f64,
    // Integrated uncertainty reported by the integrand itself.
    noise: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn kronrod21<F>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadError>
where
    F: FnMut(f64) -> Result<(f64, f64), QuadError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, nc) = f(center)?;
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut resnoise = WGK[10] * nc;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, n1) = f(center - dx)?;
        let (f2, n2) = f(center + dx)?;
        resnoise += WGK[j] * (n1 + n2);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        if j % 2 == 1 {
            resg += WG[j / 2] * sum;
        }
        resk += WGK[j] * sum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let err = rescale_error((resk - resg) * half, resabs * h, resasc * h);
    Ok(Segment {
        a,
        b,
        value: resk * half,
        error: err,
        magnitude: resabs * h,
        noise: resnoise * h,
    })
}

/// Globally adaptive bisection on a finite interval with a fallible integrand.
///
/// The integrand returns a value and its own absolute uncertainty (zero for
/// plain functions). The integrated uncertainty is a floor for the tolerance
/// and is added to the returned error.
pub(crate) fn adapt<F>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &AdaptiveOptions,
) -> Result<(f64, f64, u64), QuadError>
where
    F: FnMut(f64) -> Result<(f64, f64), QuadError>,
{
    opts.validate()?;
    let first = kronrod21(&mut f, a, b)?;
    let mut evaluations: u64 = 21;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_mag = first.magnitude;
    let mut total_noise = first.noise;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Segments that can no longer be bisected in floating point.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut frozen_noise = 0.0;

    // Cancellation can leave a result far below the integrand's magnitude;
    // accuracy is then limited by round-off, not by the rule.
    let tolerance = |total: f64, mag: f64, noise: f64| {
        opts.abs_tol
            .max(opts.rel_tol * total.abs())
            .max(100.0 * f64::EPSILON * mag)
            .max(2.0 * noise)
    };
    loop {
        if total_err <= tolerance(total, total_mag, total_noise) {
            // Running sums drift; confirm with an exact resummation.
            let (v, e, m, n) = heap.iter().fold(
                (frozen_value, frozen_err, 0.0, frozen_noise),
                |(v, e, m, n), s| (v + s.value, e + s.error, m + s.magnitude, n + s.noise),
            );
            total = v;
            total_err = e;
            total_mag = m;
            total_noise = n;
            if total_err <= tolerance(total, total_mag, total_noise) {
                return Ok((total, total_err + total_noise, evaluations));
            }
        }
        if evaluations + 42 > opts.max_evaluations {
            return Err(QuadError::NonConvergence {
                value: total,
                error: total_err,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadError::NonConvergence {
                value: total,
                error: total_err,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a).abs() < 1e3 * f64::MIN_POSITIVE {
            frozen_value += worst.value;
            frozen_err += worst.error;
            frozen_noise += worst.noise;
            continue;
        }
        let left = kronrod21(&mut f, worst.a, mid)?;
        let right = kronrod21(&mut f, mid, worst.b)?;
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_mag += left.magnitude + right.magnitude - worst.magnitude;
        total_noise += left.noise + right.noise - worst.noise;
        heap.push(left);
        heap.push(right);
    }
}

/// Integrate a function over one axis, applying the axis' substitution.
pub fn integrate_axis<F>(f: F, axis: Axis, opts: &AdaptiveOptions) -> Result<QuadratureResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    axis.validate()?;
    let checked = |x: f64| -> Result<(f64, f64), QuadError> {
        let v = f(x);
        if v.is_finite() {
            Ok((v, 0.0))
        } else {
            Err(QuadError::NonFinite {
                coordinate: vec![x],
                value: v,
            })
        }
    };
    let (value, error, evaluations) = adapt_on_axis(checked, axis, opts)?;
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
        method: Method::Adaptive1d,
    })
}

/// Fallible variant used by the nested integrator.
pub(crate) fn adapt_on_axis<F>(
    f: F,
    axis: Axis,
    opts: &AdaptiveOptions,
) -> Result<(f64, f64, u64), QuadError>
where
    F: Fn(f64) -> Result<(f64, f64), QuadError>,
{
    match axis {
        Axis::Finite { lower, upper } => adapt(f, lower, upper, opts),
        _ => adapt(
            |u| {
                let (x, jac) = axis.map_unit(u);
                if !x.is_finite() {
                    // Rounding put the node on the open end itself.
                    return Ok((0.0, 0.0));
                }
                let (v, n) = f(x)?;
                // Jacobian blow-up at the open end meets a vanishing integrand.
                Ok(if v == 0.0 && n == 0.0 { (0.0, 0.0) } else { (v * jac, n * jac) })
            },
            0.0,
            1.0,
            opts,
        ),
    }
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]`.
///
/// Infinite bounds are accepted and handled with the default algebraic
/// substitution; use [`integrate_axis`] to pick another one. The result meets
/// `|error| ≤ max(abs_tol, rel_tol·|value|)` or an error is returned.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() {
        return Err(QuadError::InvalidDomain("NaN bound".into()));
    }
    let opts = AdaptiveOptions::new(rel_tol, abs_tol);
    if a > b {
        return integrate_1d(f, b, a, rel_tol, abs_tol).map(|r| r.scaled(-1.0));
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_axis(f, Axis::finite(a, b), &opts),
        (true, false) => integrate_axis(f, Axis::semi_infinite(a), &opts),
        (false, true) => integrate_axis(|y| f(-y), Axis::semi_infinite(-b), &opts),
        (false, false) => integrate_axis(f, Axis::Infinite, &opts),
    }
}
