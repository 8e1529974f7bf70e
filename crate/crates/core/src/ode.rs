//! Dormand-Prince 5(4) integration of two-component linear systems whose
//! solutions may grow or decay over hundreds of orders of magnitude.
//!
//! The state is rescaled whenever its norm leaves `[1e-100, 1e100]`; the
//! accumulated factor is kept as a natural logarithm so that values on either
//! side of a matching point can be compared without overflow.

use crate::error::{Result, SpectrumError};

pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rtol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Disables step control; used to measure the order of the scheme.
    pub fixed_step: Option<f64>,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            fixed_step: None,
        }
    }
}

/// Solution value at a requested abscissa: the true first component is
/// `u * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub u: f64,
    pub log_scale: f64,
}

impl Sample {
    pub fn ln_abs(&self) -> f64 {
        self.u.abs().ln() + self.log_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub y: State,
    pub log_scale: f64,
    /// Sign changes of the first component along the path.
    pub sign_changes: u32,
    pub steps: usize,
    pub rejected: usize,
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (w, k) in terms {
        out[0] += h * w * k[0];
        out[1] += h * w * k[1];
    }
    out
}

struct Stepper<F> {
    f: F,
}

impl<F: Fn(f64, &State) -> State> Stepper<F> {
    /// One Dormand-Prince step from `(x, y)` with `k1 = f(x, y)`.
    /// Returns the fifth-order state, the error vector and `f` at the new point.
    fn step(&self, x: f64, y: &State, k1: &State, h: f64) -> (State, State, State) {
        let f = &self.f;
        let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, k1)]));
        let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(
            x + C4 * h,
            &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            x + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + h,
            &axpy(
                y,
                h,
                &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            y,
            h,
            &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(x + h, &y_new);
        let mut err = [0.0; 2];
        for i in 0..2 {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (y_new, err, k7)
    }
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
///
/// `norm(x, v)` measures a state or error vector at `x`; the step is accepted
/// when `norm(err) <= rtol * norm(y)`. Values of the first component at each
/// abscissa in `sample_at` (ordered in the direction of travel, within the
/// span) are appended to `samples`.
#[allow(clippy::too_many_arguments)]
pub fn integrate<F, N>(
    f: F,
    norm: N,
    x0: f64,
    y0: State,
    x1: f64,
    settings: &OdeSettings,
    sample_at: &[f64],
    samples: &mut Vec<Sample>,
) -> Result<Trajectory>
where
    F: Fn(f64, &State) -> State,
    N: Fn(f64, &State) -> f64,
{
    let stepper = Stepper { f };
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut log_scale = 0.0;
    let mut k1 = (stepper.f)(x, &y);
    let mut h = settings
        .fixed_step
        .unwrap_or_else(|| {
            let guess = if x0 != 0.0 {
                1e-3 * x0.abs()
            } else {
                1e-6 * span
            };
            guess.min(settings.h_max)
        })
        .min(span);
    let mut last_sign = y[0].signum();
    let mut sign_changes = 0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut next_sample = 0;

    while next_sample < sample_at.len() && (sample_at[next_sample] - x0) * dir <= 0.0 {
        if sample_at[next_sample] == x0 {
            samples.push(Sample {
                x: x0,
                u: y[0],
                log_scale,
            });
        }
        next_sample += 1;
    }

    while (x1 - x) * dir > 0.0 {
        if steps + rejected >= settings.max_steps {
            return Err(SpectrumError::IntegrationOverflow(format!(
                "step budget {} exhausted at x = {x:e}",
                settings.max_steps
            )));
        }
        let mut target = x1;
        if next_sample < sample_at.len() && (sample_at[next_sample] - x) * dir > 0.0 {
            target = sample_at[next_sample];
        }
        let remaining = (target - x).abs();
        let mut h_try = h.min(settings.h_max);
        let mut hits_target = false;
        if h_try >= remaining {
            h_try = remaining;
            hits_target = true;
        } else if h_try > 0.5 * remaining && settings.fixed_step.is_none() {
            // Avoid leaving a sliver before the target.
            h_try = 0.5 * remaining;
        }

        let (y_new, err, k7) = stepper.step(x, &y, &k1, dir * h_try);
        let x_new = if hits_target { target } else { x + dir * h_try };

        let ratio = if settings.fixed_step.is_some() {
            0.0
        } else {
            let size = norm(x, &y).max(norm(x_new, &y_new));
            norm(x_new, &err) / (settings.rtol * size)
        };
        if !ratio.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
            return Err(SpectrumError::IntegrationOverflow(format!(
                "non-finite state near x = {x:e}"
            )));
        }

        if ratio <= 1.0 {
            steps += 1;
            x = x_new;
            y = y_new;
            k1 = k7;
            let sign = y[0].signum();
            if y[0] != 0.0 {
                if last_sign != 0.0 && sign != last_sign {
                    sign_changes += 1;
                }
                last_sign = sign;
            }

            let size = y[0].abs().max(y[1].abs());
            if size > RESCALE_HIGH || (size < RESCALE_LOW && size > 0.0) {
                y = [y[0] / size, y[1] / size];
                k1 = [k1[0] / size, k1[1] / size];
                log_scale += size.ln();
            }
            if hits_target && next_sample < sample_at.len() && target == sample_at[next_sample] {
                samples.push(Sample {
                    x,
                    u: y[0],
                    log_scale,
                });
                next_sample += 1;
            }
            if settings.fixed_step.is_none() {
                let grow = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                // A step shortened to reach a target says nothing about the scale.
                h = if hits_target {
                    h.max(h_try * grow)
                } else {
                    h_try * grow
                };
            }
        } else {
            rejected += 1;
            h = h_try * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
            if h < 1e-15 * x.abs().max(f64::MIN_POSITIVE) {
                return Err(SpectrumError::IntegrationOverflow(format!(
                    "step size underflow at x = {x:e}"
                )));
            }
        }
    }

    Ok(Trajectory {
        y,
        log_scale,
        sign_changes,
        steps,
        rejected,
    })
}
