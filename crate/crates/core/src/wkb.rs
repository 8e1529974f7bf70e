//! Leading-order WKB quantization of the Langer-corrected radial equation.
//!
//! The classically allowed interval `[r2, r3]` is bounded by the two positive
//! roots of the turning-point cubic. The action integral over it is computed
//! after the substitution `r = r2 + (r3 - r2) sin^2(theta)`, which removes the
//! square-root endpoint behaviour exactly, and the level is the energy at which
//! the action equals `pi (n' + 1/2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedFormTerms;
use crate::cubic::{quadratic_roots, Cubic};
use crate::error::{Result, SpectrumError};
use crate::model::{
    l_prime, lambda_sq, AnyonParams, Diagnostics, EnergyResult, Method, QuantumNumbers,
    RadialCoefficients,
};
use crate::quadrature::{integrate, QuadResult, QuadSettings};
use crate::roots::{brent, scan_for_sign_change};

/// Deepest binding fraction probed when bracketing a level.
const SCAN_START: f64 = 0.9;
const SCAN_RATIO: f64 = 0.8;
const SCAN_STOP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbSettings {
    pub quadrature: QuadSettings,
    /// Largest accepted quadrature error estimate for the action.
    pub max_quadrature_error: f64,
    /// Relative tolerance on the binding fraction.
    pub root_rel_tol: f64,
}

impl Default for WkbSettings {
    fn default() -> Self {
        Self {
            quadrature: QuadSettings::default(),
            max_quadrature_error: 1e-10,
            root_rel_tol: 1e-14,
        }
    }
}

/// The three real roots `r1 < r2 < r3` of the turning-point cubic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub roots: [f64; 3],
    /// `r > 0` for each root.
    pub physical: [bool; 3],
}

impl TurningPoints {
    #[inline]
    pub fn inner(&self) -> f64 {
        self.roots[1]
    }

    #[inline]
    pub fn outer(&self) -> f64 {
        self.roots[2]
    }

    pub fn width(&self) -> f64 {
        self.roots[2] - self.roots[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationResidual {
    pub phase: f64,
    pub target: f64,
    pub residual: f64,
}

/// Squared radial momentum `E^2 - m^2 + 2 xi Z E / r - lambda^2 / r^2 - 4 xi S Z l' / (m r^3)`.
pub fn momentum_sq(params: &AnyonParams, l: u32, e: f64, r: f64) -> Result<f64> {
    Ok(RadialCoefficients::semiclassical(params, l, e)?.at(r))
}

pub fn turning_points(params: &AnyonParams, l: u32, e: f64) -> Result<TurningPoints> {
    check_bound_energy(params, e)?;
    turning_points_of(&RadialCoefficients::semiclassical(params, l, e)?)
}

pub(crate) fn check_bound_energy(params: &AnyonParams, e: f64) -> Result<()> {
    if !(e > 0.0 && e < params.mass) {
        return Err(SpectrumError::Domain(format!(
            "energy {e} outside the bound window (0, {})",
            params.mass
        )));
    }
    Ok(())
}

pub(crate) fn turning_points_of(coeffs: &RadialCoefficients) -> Result<TurningPoints> {
    let roots = Cubic::new(coeffs.cubic()).real_roots();
    let [r1, r2, r3] = match roots.as_slice() {
        [a, b, c] => [*a, *b, *c],
        _ => {
            return Err(SpectrumError::NoClassicalRegion(format!(
                "turning-point cubic has {} real root(s)",
                roots.len()
            )))
        }
    };
    if r2 <= 0.0 || r2 >= r3 {
        return Err(SpectrumError::NoClassicalRegion(format!(
            "no positive interval between turning points ({r1:e}, {r2:e}, {r3:e})"
        )));
    }
    Ok(TurningPoints {
        roots: [r1, r2, r3],
        physical: [r1 > 0.0, true, true],
    })
}

/// Action `int_{r2}^{r3} sqrt(p^2(r)) dr` with default settings.
pub fn phase_integral(params: &AnyonParams, l: u32, e: f64) -> Result<f64> {
    phase_integral_with(params, l, e, &WkbSettings::default()).map(|q| q.value)
}

pub fn phase_integral_with(
    params: &AnyonParams,
    l: u32,
    e: f64,
    settings: &WkbSettings,
) -> Result<QuadResult> {
    check_bound_energy(params, e)?;
    let coeffs = RadialCoefficients::semiclassical(params, l, e)?;
    let tp = turning_points_of(&coeffs)?;
    let [r1, r2, r3] = tp.roots;
    let width = r3 - r2;
    let kappa_sq = -coeffs.k_sq;

    // p^2 = |k^2| (r - r1)(r - r2)(r3 - r) / r^3; the middle factors are
    // width^2 sin^2 cos^2 after substitution, and dr brings 2 width sin cos.
    let mut worst_violation: Option<(f64, f64)> = None;
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let sc = s * c;
        let r = r2 + width * s * s;
        let direct = coeffs.at(r);
        let scale = kappa_sq
            + (coeffs.coulomb / r).abs()
            + coeffs.centrifugal / (r * r)
            + (coeffs.spin_orbit / (r * r * r)).abs();
        if direct < -1e-9 * scale && worst_violation.is_none_or(|(_, v)| direct < v) {
            worst_violation = Some((r, direct));
        }
        2.0 * width * width * sc * sc * (kappa_sq * (r - r1) / (r * r * r)).sqrt()
    };
    let result = integrate(integrand, 0.0, PI / 2.0, &settings.quadrature)?;
    if let Some((r, v)) = worst_violation {
        return Err(SpectrumError::QuadratureFailure(format!(
            "squared momentum {v:e} < 0 at r = {r:e} inside [{r2:e}, {r3:e}]"
        )));
    }
    if result.error > settings.max_quadrature_error {
        return Err(SpectrumError::QuadratureFailure(format!(
            "action error estimate {:e} exceeds {:e}",
            result.error, settings.max_quadrature_error
        )));
    }
    Ok(result)
}

pub fn quantization_residual(
    params: &AnyonParams,
    qn: QuantumNumbers,
    e: f64,
) -> Result<QuantizationResidual> {
    let phase = phase_integral(params, qn.l, e)?;
    let target = PI * (f64::from(qn.n_r) + 0.5);
    Ok(QuantizationResidual {
        phase,
        target,
        residual: phase - target,
    })
}

fn require_coupling(params: &AnyonParams, qn: QuantumNumbers) -> Result<()> {
    qn.check(params)?;
    if params.xi_z() == 0.0 {
        return Err(SpectrumError::BracketFailure(
            "no bound levels without coupling".into(),
        ));
    }
    Ok(())
}

/// Level from the full quantization condition on the exact cubic turning points.
pub fn energy_wkb_full(params: &AnyonParams, qn: QuantumNumbers) -> Result<EnergyResult> {
    energy_wkb_full_with(params, qn, &WkbSettings::default())
}

pub fn energy_wkb_full_with(
    params: &AnyonParams,
    qn: QuantumNumbers,
    settings: &WkbSettings,
) -> Result<EnergyResult> {
    require_coupling(params, qn)?;
    let target = PI * (f64::from(qn.n_r) + 0.5);
    let m = params.mass;
    let residual = |binding: f64| -> Result<f64> {
        Ok(phase_integral_with(params, qn.l, m * (1.0 - binding), settings)?.value - target)
    };

    // The action grows monotonically with E, so walking the binding fraction
    // down from deep levels meets exactly one crossing per n'.
    let (deep, shallow) =
        scan_for_sign_change(residual, SCAN_START, SCAN_RATIO, SCAN_STOP, |err| {
            matches!(err, SpectrumError::NoClassicalRegion(_)).then_some(-target)
        })
        .map_err(|e| match e {
            SpectrumError::BracketFailure(msg) => {
                SpectrumError::BracketFailure(format!("{qn}: {msg}"))
            }
            other => other,
        })?;
    let root = brent(
        residual,
        shallow,
        deep,
        settings.root_rel_tol * shallow,
        200,
    )?;

    let e = m * (1.0 - root.x);
    let q = phase_integral_with(params, qn.l, e, settings)?;
    let h = root.x * 1e-7;
    let slope = (residual(root.x + h)? - residual(root.x - h)?) / (2.0 * h);
    let binding_err = (q.error + root.fx.abs()) / slope.abs() + 2.0 * f64::EPSILON * root.x;
    Ok(EnergyResult::from_binding(
        params,
        root.x,
        Method::WkbFull,
        Diagnostics {
            iterations: root.iterations,
            residual: q.value - target,
            error_estimate: m * binding_err,
        },
    ))
}

/// Left side minus right side of the implicit level equation obtained by
/// integrating the split action in closed form.
fn split_equation(params: &AnyonParams, qn: QuantumNumbers, binding: f64) -> Result<f64> {
    let terms = ClosedFormTerms::new(params, qn)?;
    let sigma = terms.sigma_l;
    let xz = params.xi_z();
    let e_over_m = 1.0 - binding;
    let root_gap = (binding * (2.0 - binding)).sqrt();
    Ok(xz * e_over_m / root_gap - sigma * e_over_m - (f64::from(qn.n_r) + 0.5 + terms.lambda))
}

/// Level from the implicit equation in `E`, solved numerically rather than as
/// a quartic.
pub fn energy_wkb_split(params: &AnyonParams, qn: QuantumNumbers) -> Result<EnergyResult> {
    energy_wkb_split_with(params, qn, &WkbSettings::default())
}

pub fn energy_wkb_split_with(
    params: &AnyonParams,
    qn: QuantumNumbers,
    settings: &WkbSettings,
) -> Result<EnergyResult> {
    require_coupling(params, qn)?;
    let f = |binding: f64| split_equation(params, qn, binding);
    let (deep, shallow) = scan_for_sign_change(f, SCAN_START, SCAN_RATIO, SCAN_STOP, |_| None)?;
    let root = brent(f, shallow, deep, settings.root_rel_tol * shallow, 200)?;
    Ok(EnergyResult::from_binding(
        params,
        root.x,
        Method::WkbSplit,
        Diagnostics {
            iterations: root.iterations,
            residual: root.fx,
            error_estimate: params.mass * 4.0 * f64::EPSILON * root.x,
        },
    ))
}

/// The two pieces of the perturbatively split action, each integrated
/// numerically between the roots of `k^2 r^2 + 2 xi Z E r - lambda^2`, next to
/// their closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPhase {
    pub r_minus: f64,
    pub r_plus: f64,
    /// `int sqrt(k^2 + 2 xi Z E / r - lambda^2 / r^2) dr`.
    pub coulomb: f64,
    pub coulomb_analytic: f64,
    /// `(2 xi S Z l' / m) int dr / (r^2 sqrt(k^2 r^2 + 2 xi Z E r - lambda^2))`.
    pub spin_orbit: f64,
    pub spin_orbit_analytic: f64,
    pub quadrature_error: f64,
}

impl SplitPhase {
    pub fn phase(&self) -> f64 {
        self.coulomb - self.spin_orbit
    }
}

pub fn split_phase(params: &AnyonParams, l: u32, e: f64) -> Result<SplitPhase> {
    check_bound_energy(params, e)?;
    let lam2 = lambda_sq(params, l)?;
    let lambda = lam2.sqrt();
    let kappa_sq = -crate::model::k_sq(params, e);
    let b = params.xi_z() * e;
    let roots = quadratic_roots(-kappa_sq, 2.0 * b, -lam2);
    let [r_minus, r_plus] = match roots.as_slice() {
        [lo, hi] if *lo > 0.0 && lo < hi => [*lo, *hi],
        _ => {
            return Err(SpectrumError::NoClassicalRegion(format!(
                "Coulomb quadratic has no positive interval at E = {e}"
            )))
        }
    };
    let width = r_plus - r_minus;
    let kappa = kappa_sq.sqrt();
    let settings = QuadSettings::default();

    let coulomb = integrate(
        |t: f64| {
            let (s, c) = t.sin_cos();
            let r = r_minus + width * s * s;
            2.0 * width * width * (s * c).powi(2) * kappa / r
        },
        0.0,
        PI / 2.0,
        &settings,
    )?;
    let inverse = integrate(
        |t: f64| {
            let r = r_minus + width * t.sin().powi(2);
            2.0 / (r * r * kappa)
        },
        0.0,
        PI / 2.0,
        &settings,
    )?;
    let strength = 2.0 * params.xi_z() * params.spin * l_prime(l) / params.mass;
    Ok(SplitPhase {
        r_minus,
        r_plus,
        coulomb: coulomb.value,
        coulomb_analytic: PI * (b / kappa - lambda),
        spin_orbit: strength * inverse.value,
        spin_orbit_analytic: strength * PI * b / (lam2 * lambda),
        quadrature_error: coulomb.error + strength.abs() * inverse.error,
    })
}
