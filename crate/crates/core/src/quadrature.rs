//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, SpectrumError};

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
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
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

fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    settings: &QuadSettings,
) -> Result<QuadResult> {
    let first = kronrod15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);

    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(SpectrumError::QuadratureFailure(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if error <= settings.abs_tol.max(settings.rel_tol * value.abs()) {
            break;
        }
        if heap.len() >= settings.max_intervals {
            return Err(SpectrumError::QuadratureFailure(format!(
                "error estimate {error:e} above tolerance after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer divisible in floating point.
            heap.push(worst);
            return Err(SpectrumError::QuadratureFailure(format!(
                "interval exhausted with error {error:e}"
            )));
        }
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed drift from the running updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x| x.powi(5) - 3.0 * x * x,
            0.0,
            2.0,
            &QuadSettings::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 64.0 / 6.0 - 8.0, epsilon = 1e-13);
    }

    #[test]
    fn peaked_integrand_converges() {
        // Lorentzian of width 1e-3 centred at 0.3.
        let w = 1e-3;
        let f = |x: f64| w / ((x - 0.3).powi(2) + w * w);
        let r = integrate(f, 0.0, 1.0, &QuadSettings::default()).unwrap();
        let exact = (0.7 / w).atan() + (0.3 / w).atan();
        assert_relative_eq!(r.value, exact, max_relative = 1e-12);
        assert!(r.error < 1e-11);
    }

    #[test]
    fn substituted_endpoint_singularity() {
        // int_0^1 dx / sqrt(x (1 - x)) = pi, with x = sin^2 t.
        let r = integrate(
            |t: f64| {
                let (s, c) = t.sin_cos();
                2.0 * s * c / (s * c)
            },
            0.0,
            PI / 2.0,
            &QuadSettings::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, PI, epsilon = 1e-13);
    }

    #[test]
    fn reports_failure_when_budget_is_exhausted() {
        let settings = QuadSettings {
            max_intervals: 2,
            ..QuadSettings::default()
        };
        let err = integrate(|x: f64| x.sqrt().recip(), 1e-300, 1.0, &settings).unwrap_err();
        assert!(matches!(err, SpectrumError::QuadratureFailure(_)));
    }

    #[test]
    fn nan_integrand_is_an_error() {
        assert!(integrate(|_| f64::NAN, 0.0, 1.0, &QuadSettings::default()).is_err());
    }
}
