//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CompensatedSum, IntegralEstimate, QuadConfig, QuadError, Quadrand};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EVALS_PER_SEGMENT: usize = 15;

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
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod_segment<T, F, E>(f: &F, a: f64, b: f64) -> Result<Segment<T>, E>
where
    T: Quadrand,
    F: Fn(f64) -> Result<(T, f64), E>,
    E: From<QuadError<T>>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<(T, f64), E> {
        let (v, e) = f(x)?;
        if !v.is_finite() || !e.is_finite() {
            return Err(QuadError::NonFinite { at: x }.into());
        }
        Ok((v, e))
    };

    let mut fv = [T::default(); 15];
    let mut inner = [0.0; 15];
    let (fc, ec) = eval(center)?;
    fv[7] = fc;
    inner[7] = ec;
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, e1) = eval(center - dx)?;
        let (f2, e2) = eval(center + dx)?;
        fv[j] = f1;
        fv[14 - j] = f2;
        inner[j] = e1;
        inner[14 - j] = e2;
    }

    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.magnitude() * WGK[7];
    let mut inner_err = ec * WGK[7];
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        resk = resk + pair * WGK[j];
        resabs += WGK[j] * (fv[j].magnitude() + fv[14 - j].magnitude());
        inner_err += WGK[j] * (inner[j] + inner[14 - j]);
        if j % 2 == 1 {
            resg = resg + pair * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[14 - j] - mean).magnitude());
    }

    let scale = half.abs();
    let value = resk * half;
    resabs *= scale;
    resasc *= scale;
    inner_err *= scale;
    let mut err = ((resk - resg) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment { a, b, value, error: err.hypot(inner_err) })
}

fn can_split(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid > a && mid < b && (b - a) > 64.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// Adaptive integral of `f` over `points[0]..points[last]`, starting from
/// the segments delimited by `points` (which must be ascending).
pub fn integrate_adaptive<T, F>(f: &F, points: &[f64], cfg: &QuadConfig) -> Result<IntegralEstimate<T>, QuadError<T>>
where
    T: Quadrand,
    F: Fn(f64) -> T,
{
    let wrapped = |x: f64| -> Result<(T, f64), QuadError<T>> { Ok((f(x), 0.0)) };
    integrate_adaptive_with_error(&wrapped, points, cfg)
}

/// Like [`integrate_adaptive`] for an integrand that reports its own
/// (inner) error. Inner errors are weighted by the quadrature rule and
/// combined with the rule's own estimate.
pub fn integrate_adaptive_with_error<T, F, E>(f: &F, points: &[f64], cfg: &QuadConfig) -> Result<IntegralEstimate<T>, E>
where
    T: Quadrand,
    F: Fn(f64) -> Result<(T, f64), E>,
    E: From<QuadError<T>>,
{
    let (Some(&first), Some(&last)) = (points.first(), points.last()) else {
        return Ok(IntegralEstimate::zero());
    };
    if !first.is_finite() || !last.is_finite() || last < first {
        return Err(QuadError::InvalidRange { lower: first, upper: last }.into());
    }

    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut evaluations = 0;
    let mut total = T::default();
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let seg = kronrod_segment(f, w[0], w[1])?;
        evaluations += EVALS_PER_SEGMENT;
        total = total + seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    loop {
        if total_err <= cfg.target(total.magnitude()) {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        if !can_split(worst.a, worst.b) {
            frozen.push(worst);
            continue;
        }
        if evaluations + 2 * EVALS_PER_SEGMENT > cfg.max_evaluations {
            heap.push(worst);
            let best = finish(heap.into_iter().chain(frozen), evaluations);
            return Err(QuadError::BudgetExceeded { best, budget: cfg.max_evaluations }.into());
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod_segment(f, worst.a, mid)?;
        let right = kronrod_segment(f, mid, worst.b)?;
        evaluations += 2 * EVALS_PER_SEGMENT;
        total = total + (left.value + right.value - worst.value);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    Ok(finish(heap.into_iter().chain(frozen), evaluations))
}

fn finish<T: Quadrand>(segments: impl Iterator<Item = Segment<T>>, evaluations: usize) -> IntegralEstimate<T> {
    let mut segs: Vec<_> = segments.collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut sum = CompensatedSum::default();
    let mut err = 0.0;
    for s in &segs {
        sum.add(s.value);
        err += s.error;
    }
    IntegralEstimate { value: sum.total(), abs_error: err, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_adaptive(&|x: f64| x.powi(5) - 2.0 * x, &[0.0, 2.0], &QuadConfig::new(1e-12)).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn sharp_lorentzian_with_breakpoint() {
        let w = 1e-6;
        let f = |x: f64| w / ((x - 0.3).powi(2) + w * w);
        let r = integrate_adaptive(&f, &[0.0, 0.3, 1.0], &QuadConfig::new(1e-10)).unwrap();
        let exact = (0.7 / w).atan() + (0.3 / w).atan();
        assert!((r.value - exact).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn budget_exceeded_carries_best_estimate() {
        let f = |x: f64| (1.0 / x).sin();
        let r = integrate_adaptive(&f, &[1e-8, 1.0], &QuadConfig::new(1e-14).with_budget(600));
        match r {
            Err(QuadError::BudgetExceeded { best, budget }) => {
                assert_eq!(budget, 600);
                assert!(best.evaluations <= 600);
                assert!(best.value.is_finite());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_adaptive(&|_x: f64| f64::NAN, &[0.0, 1.0], &QuadConfig::new(1e-8));
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn empty_and_reversed_ranges() {
        let r = integrate_adaptive(&|x: f64| x, &[1.0, 1.0], &QuadConfig::new(1e-8)).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(integrate_adaptive(&|x: f64| x, &[1.0, 0.0], &QuadConfig::new(1e-8)).is_err());
    }
}
