//! Physical parameters, quantum numbers and the quantities every solver shares.
//!
//! Units are natural (hbar = c = 1). Energies are carried in the same units as
//! the rest mass `m`; the electron-volt rendering only happens on output, using
//! the separate display mass `mass_ev`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectrumError};

/// CODATA 2018 fine-structure constant.
pub const ALPHA_CODATA: f64 = 7.297_352_569_3e-3;
/// CODATA 2018 electron rest energy, eV.
pub const ELECTRON_MASS_EV: f64 = 510_998.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    pub electron_mass_ev: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            alpha: ALPHA_CODATA,
            electron_mass_ev: ELECTRON_MASS_EV,
        }
    }
}

/// Anyon of rest mass `mass`, fractional spin `spin` and coupling `xi = e q`
/// bound to a static nucleus of charge number `charge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnyonParams {
    /// Rest mass in natural units.
    pub mass: f64,
    /// Rest energy in eV, used only to render kinetic energies.
    pub mass_ev: f64,
    pub spin: f64,
    pub xi: f64,
    pub charge: f64,
}

impl AnyonParams {
    /// Unit rest mass carrying the electron rest energy for display.
    pub fn new(spin: f64, xi: f64, charge: f64) -> Result<Self> {
        Self {
            mass: 1.0,
            mass_ev: ELECTRON_MASS_EV,
            spin,
            xi,
            charge,
        }
        .validated()
    }

    /// S = 1/2, xi = alpha, Z = 1, m = m_e: the reference configuration.
    pub fn reference(constants: &PhysicalConstants) -> Self {
        Self {
            mass: 1.0,
            mass_ev: constants.electron_mass_ev,
            spin: 0.5,
            xi: constants.alpha,
            charge: 1.0,
        }
    }

    pub fn with_mass(mut self, mass: f64, mass_ev: f64) -> Result<Self> {
        self.mass = mass;
        self.mass_ev = mass_ev;
        self.validated()
    }

    pub fn with_spin(mut self, spin: f64) -> Result<Self> {
        self.spin = spin;
        self.validated()
    }

    pub fn with_xi(mut self, xi: f64) -> Result<Self> {
        self.xi = xi;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let finite = [self.mass, self.mass_ev, self.spin, self.xi, self.charge]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(SpectrumError::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if self.mass <= 0.0 || self.mass_ev <= 0.0 {
            return Err(SpectrumError::InvalidParams(format!(
                "mass must be positive (m = {}, m_ev = {})",
                self.mass, self.mass_ev
            )));
        }
        if self.charge <= 0.0 {
            return Err(SpectrumError::InvalidParams(format!(
                "nuclear charge must be positive, got {}",
                self.charge
            )));
        }
        if self.xi < 0.0 {
            return Err(SpectrumError::InvalidParams(format!(
                "coupling must be non-negative, got {}",
                self.xi
            )));
        }
        if self.xi_z() >= 1.0 {
            return Err(SpectrumError::InvalidParams(format!(
                "xi * Z = {} must be below 1",
                self.xi_z()
            )));
        }
        Ok(self)
    }

    #[inline]
    pub fn xi_z(&self) -> f64 {
        self.xi * self.charge
    }
}

/// Radial quantum number `n_r` (interior zeros of the radial function) and
/// orbital quantum number `l >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n_r: u32,
    pub l: u32,
}

impl QuantumNumbers {
    pub fn new(n_r: u32, l: u32) -> Result<Self> {
        if l == 0 {
            return Err(SpectrumError::Domain(
                "l = 0 gives lambda^2 = -(xi Z)^2 < 0; only l >= 1 is supported".into(),
            ));
        }
        Ok(Self { n_r, l })
    }

    /// Checks `l > xi Z` for the given parameters.
    pub fn check(&self, params: &AnyonParams) -> Result<()> {
        if self.l == 0 {
            return Err(SpectrumError::Domain("l must be >= 1".into()));
        }
        lambda_sq(params, self.l).map(|_| ())
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n'={}, l={})", self.n_r, self.l)
    }
}

/// `lambda^2 = l^2 - (xi Z)^2`.
pub fn lambda_sq(params: &AnyonParams, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(SpectrumError::Domain("l must be >= 1".into()));
    }
    let l = f64::from(l);
    let xz = params.xi_z();
    let value = (l - xz) * (l + xz);
    if value <= 0.0 {
        return Err(SpectrumError::Domain(format!(
            "lambda^2 = {value} <= 0 (l = {l}, xi Z = {xz})"
        )));
    }
    Ok(value)
}

/// `l' = sqrt(l^2 + 1/4)`.
#[inline]
pub fn l_prime(l: u32) -> f64 {
    let l = f64::from(l);
    l.hypot(0.5)
}

/// Kinetic energy in eV for a total energy given as a fraction of the rest mass.
#[inline]
pub fn kinetic_ev(e_total_over_m: f64, mass_ev: f64) -> f64 {
    (e_total_over_m - 1.0) * mass_ev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "closed")]
    ClosedForm,
    #[serde(rename = "wkb-full")]
    WkbFull,
    #[serde(rename = "wkb-split")]
    WkbSplit,
    #[serde(rename = "oracle")]
    Oracle,
    #[serde(rename = "nonrel")]
    NonRelativistic,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ClosedForm,
        Method::WkbFull,
        Method::WkbSplit,
        Method::Oracle,
        Method::NonRelativistic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::WkbFull => "wkb-full",
            Method::WkbSplit => "wkb-split",
            Method::Oracle => "oracle",
            Method::NonRelativistic => "nonrel",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SpectrumError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed" | "closed-form" => Ok(Method::ClosedForm),
            "wkb-full" => Ok(Method::WkbFull),
            "wkb-split" => Ok(Method::WkbSplit),
            "oracle" => Ok(Method::Oracle),
            "nonrel" => Ok(Method::NonRelativistic),
            other => Err(SpectrumError::Config(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: u32,
    /// Residual of the equation that defines the level.
    pub residual: f64,
    /// Estimated numerical error of `e_total`, natural units.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub e_total: f64,
    /// `E - m`, computed without forming the difference of two nearly equal numbers.
    pub e_kinetic: f64,
    pub kinetic_ev: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl EnergyResult {
    /// Builds a result from the binding fraction `(m - E) / m`.
    pub fn from_binding(
        params: &AnyonParams,
        binding: f64,
        method: Method,
        diagnostics: Diagnostics,
    ) -> Self {
        Self {
            e_total: params.mass * (1.0 - binding),
            // `0.0 - x` rather than `-x` so that zero binding is +0.
            e_kinetic: 0.0 - params.mass * binding,
            kinetic_ev: 0.0 - params.mass_ev * binding,
            method,
            diagnostics,
        }
    }

    #[inline]
    pub fn e_over_m(&self, params: &AnyonParams) -> f64 {
        self.e_total / params.mass
    }

    /// Binding fraction `(m - E) / m`.
    #[inline]
    pub fn binding(&self, params: &AnyonParams) -> f64 {
        -self.e_kinetic / params.mass
    }
}

/// Coefficient multiplying `U` in the canonical radial equation
/// `U'' + [k^2 + coulomb / r - centrifugal / r^2 - spin_orbit / r^3] U = 0`.
///
/// Both the semiclassical momentum and the eigensolver's effective term are
/// evaluated through this one type; they differ only in how the centrifugal
/// and spin-orbit strengths are built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoefficients {
    /// `E^2 - m^2`.
    pub k_sq: f64,
    /// `2 xi Z E`.
    pub coulomb: f64,
    pub centrifugal: f64,
    pub spin_orbit: f64,
}

impl RadialCoefficients {
    /// Langer-corrected form used for WKB quantization:
    /// centrifugal `lambda^2`, spin-orbit `4 xi Z S l' / m`.
    pub fn semiclassical(params: &AnyonParams, l: u32, e: f64) -> Result<Self> {
        let lam2 = lambda_sq(params, l)?;
        Ok(Self {
            k_sq: k_sq(params, e),
            coulomb: 2.0 * params.xi_z() * e,
            centrifugal: lam2,
            spin_orbit: 4.0 * params.xi_z() * params.spin * l_prime(l) / params.mass,
        })
    }

    /// Canonical form of the radial wave equation for `U = f sqrt(r)` without
    /// the Langer replacement: centrifugal `lambda^2 - 1/4`, spin-orbit
    /// `4 xi Z S l / m`.
    pub fn exact(params: &AnyonParams, l: u32, e: f64) -> Result<Self> {
        let lam2 = lambda_sq(params, l)?;
        Ok(Self {
            k_sq: k_sq(params, e),
            coulomb: 2.0 * params.xi_z() * e,
            centrifugal: lam2 - 0.25,
            spin_orbit: 4.0 * params.xi_z() * params.spin * f64::from(l) / params.mass,
        })
    }

    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        let inv = 1.0 / r;
        self.k_sq + inv * (self.coulomb - inv * (self.centrifugal + self.spin_orbit * inv))
    }

    /// Coefficients of `r^3 * at(r) = 0`, highest power first.
    pub fn cubic(&self) -> [f64; 4] {
        [self.k_sq, self.coulomb, -self.centrifugal, -self.spin_orbit]
    }
}

/// `E^2 - m^2`, with `E - m` formed exactly for `E` near `m`.
#[inline]
pub fn k_sq(params: &AnyonParams, e: f64) -> f64 {
    (e - params.mass) * (e + params.mass)
}
