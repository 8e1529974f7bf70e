//! Analytic spectrum: the spin-orbit shift of the principal quantum number,
//! the relativistic closed-form level formula, its small-coupling expansion and
//! the nonrelativistic planar Coulomb limit.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectrumError};
use crate::model::{
    l_prime, lambda_sq, AnyonParams, Diagnostics, EnergyResult, Method, QuantumNumbers,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormTerms {
    pub lambda: f64,
    pub sigma_l: f64,
    pub principal_n: f64,
    pub sigma_tilde: f64,
}

impl ClosedFormTerms {
    pub fn new(params: &AnyonParams, qn: QuantumNumbers) -> Result<Self> {
        let lambda = lambda_sq(params, qn.l)?.sqrt();
        let sigma_l = sigma_from_lambda(params, qn.l, lambda);
        let principal_n = f64::from(qn.n_r) + 0.5 + lambda + sigma_l;
        // Only reachable for strongly negative spin.
        if principal_n <= 0.0 {
            return Err(SpectrumError::Domain(format!(
                "principal quantum number {principal_n} <= 0 for {qn}"
            )));
        }
        Ok(Self {
            lambda,
            sigma_l,
            principal_n,
            sigma_tilde: sigma_tilde(params, qn.l),
        })
    }
}

fn sigma_from_lambda(params: &AnyonParams, l: u32, lambda: f64) -> f64 {
    let xz = params.xi_z();
    2.0 * xz * xz * params.spin * l_prime(l) / (lambda * lambda * lambda)
}

fn sigma_tilde(params: &AnyonParams, l: u32) -> f64 {
    let xz = params.xi_z();
    let lf = f64::from(l);
    2.0 * xz * xz * params.spin * l_prime(l) / (lf * lf * lf)
}

/// Spin-orbit correction `2 (xi Z)^2 S l' / lambda^3`.
pub fn sigma_l(params: &AnyonParams, l: u32) -> Result<f64> {
    let lambda = lambda_sq(params, l)?.sqrt();
    Ok(sigma_from_lambda(params, l, lambda))
}

/// `E = m [1 + (xi Z)^2 / N^2]^(-1/2)` with `N = n' + 1/2 + lambda + sigma_l`.
pub fn energy_closed_form(params: &AnyonParams, qn: QuantumNumbers) -> Result<EnergyResult> {
    let terms = ClosedFormTerms::new(params, qn)?;
    let xz = params.xi_z();
    let ratio = xz / terms.principal_n;
    let binding = relativistic_binding(ratio * ratio);
    Ok(EnergyResult::from_binding(
        params,
        binding,
        Method::ClosedForm,
        Diagnostics::default(),
    ))
}

/// `1 - (1 + x)^(-1/2)` written as `x / (sqrt(1+x) (1 + sqrt(1+x)))`.
#[inline]
pub(crate) fn relativistic_binding(x: f64) -> f64 {
    let s = (1.0 + x).sqrt();
    x / (s * (1.0 + s))
}

/// Planar nonrelativistic Coulomb levels `E' = -(xi Z)^2 m / (2 (n' + l + 1/2)^2)`.
pub fn energy_nonrel(params: &AnyonParams, qn: QuantumNumbers) -> Result<EnergyResult> {
    qn.check(params)?;
    let xz = params.xi_z();
    let n = f64::from(qn.n_r) + f64::from(qn.l) + 0.5;
    let binding = 0.5 * xz * xz / (n * n);
    Ok(EnergyResult::from_binding(
        params,
        binding,
        Method::NonRelativistic,
        Diagnostics::default(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalExpansion {
    /// `n' + 1/2 + lambda + sigma_l`.
    pub exact: f64,
    /// The same quantity truncated at order `(xi Z)^2`.
    pub order_xi2: f64,
    pub sigma_tilde: f64,
}

pub fn principal_expansion(params: &AnyonParams, qn: QuantumNumbers) -> Result<PrincipalExpansion> {
    let terms = ClosedFormTerms::new(params, qn)?;
    let xz = params.xi_z();
    let l = f64::from(qn.l);
    let shift = (2.0 * params.spin * l_prime(qn.l) / (l * l) - 0.5) * xz * xz / l;
    Ok(PrincipalExpansion {
        exact: terms.principal_n,
        order_xi2: f64::from(qn.n_r) + 0.5 + l + shift,
        sigma_tilde: terms.sigma_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PhysicalConstants, ALPHA_CODATA};
    use approx::assert_relative_eq;

    fn reference() -> AnyonParams {
        AnyonParams::reference(&PhysicalConstants::default())
    }

    fn qn(n: u32, l: u32) -> QuantumNumbers {
        QuantumNumbers::new(n, l).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let p = reference();
        assert_eq!(sigma_l(&p.with_spin(0.0).unwrap(), 1).unwrap(), 0.0);
        assert_relative_eq!(sigma_l(&p, 1).unwrap(), 5.9542e-5, max_relative = 1e-4);
        assert_relative_eq!(sigma_l(&p, 2).unwrap(), 1.3722e-5, max_relative = 1e-4);
    }

    #[test]
    fn closed_form_reference_levels() {
        let p = reference();
        let e01 = energy_closed_form(&p, qn(0, 1)).unwrap();
        assert!(
            (e01.kinetic_ev - -6.0464).abs() <= 1e-3,
            "{}",
            e01.kinetic_ev
        );
        let e12 = energy_closed_form(&p, qn(1, 2)).unwrap();
        assert!(
            (e12.kinetic_ev - -1.1107).abs() <= 1e-3,
            "{}",
            e12.kinetic_ev
        );
    }

    #[test]
    fn no_coupling_means_no_binding() {
        let p = AnyonParams::new(0.5, 0.0, 1.0).unwrap();
        for (n, l) in [(0, 1), (3, 4)] {
            let e = energy_closed_form(&p, qn(n, l)).unwrap();
            assert_eq!(e.e_total, p.mass);
            assert_eq!(e.e_kinetic, 0.0);
            assert_eq!(energy_nonrel(&p, qn(n, l)).unwrap().e_kinetic, 0.0);
        }
    }

    #[test]
    fn nonrel_examples() {
        let p = reference();
        let a = energy_nonrel(&p, qn(0, 1)).unwrap();
        assert_relative_eq!(a.kinetic_ev, -6.046_974_721_4, epsilon = 1e-9);
        let b = energy_nonrel(&p, qn(1, 1)).unwrap();
        assert_relative_eq!(b.kinetic_ev, -2.176_910_899_7, epsilon = 1e-9);
    }

    #[test]
    fn kinetic_form_matches_naive_difference_at_moderate_coupling() {
        // At xi Z = 0.5 there is no cancellation to speak of.
        let p = AnyonParams::new(0.5, 0.5, 1.0).unwrap();
        let terms = ClosedFormTerms::new(&p, qn(1, 2)).unwrap();
        let naive = (1.0 + 0.25 / (terms.principal_n * terms.principal_n)).powf(-0.5) - 1.0;
        let e = energy_closed_form(&p, qn(1, 2)).unwrap();
        assert_relative_eq!(e.e_kinetic, naive, max_relative = 1e-13);
    }

    #[test]
    fn zero_spin_is_klein_gordon_like() {
        let p = reference().with_spin(0.0).unwrap();
        for (n, l) in [(0, 1), (2, 3)] {
            let lam = (f64::from(l * l) - ALPHA_CODATA * ALPHA_CODATA).sqrt();
            let big_n = f64::from(n) + 0.5 + lam;
            let expect = (1.0 + ALPHA_CODATA * ALPHA_CODATA / (big_n * big_n)).powf(-0.5);
            let e = energy_closed_form(&p, qn(n, l)).unwrap();
            assert_relative_eq!(e.e_total, expect, max_relative = 1e-15);
        }
    }

    #[test]
    fn expansion_examples() {
        let free = AnyonParams::new(0.5, 0.0, 1.0).unwrap();
        let x = principal_expansion(&free, qn(2, 3)).unwrap();
        assert_eq!(x.exact, 5.5);
        assert_eq!(x.order_xi2, 5.5);
        assert_eq!(x.sigma_tilde, 0.0);

        let p = reference();
        let x = principal_expansion(&p, qn(0, 1)).unwrap();
        assert_relative_eq!(x.exact, 1.500_032_9, epsilon = 1e-7);
        // The remainder is fourth order: 1.552 (xi Z)^4 for (0, 1).
        let x4 = ALPHA_CODATA.powi(4);
        assert_relative_eq!((x.exact - x.order_xi2) / x4, 1.552_159, max_relative = 1e-3);

        let x = principal_expansion(&p, qn(0, 2)).unwrap();
        let by_hand = 2.0 * ALPHA_CODATA * ALPHA_CODATA * 0.5 * 2.061_552_812_8 / 8.0;
        assert_relative_eq!(x.sigma_tilde, by_hand, max_relative = 1e-10);
        assert_relative_eq!(x.sigma_tilde, 1.3722e-5, max_relative = 1e-4);
    }

    #[test]
    fn expansion_error_is_fourth_order() {
        let base = reference();
        for (n, l) in [(0, 1), (1, 2), (0, 3)] {
            let err = |xi: f64| {
                let x = principal_expansion(&base.with_xi(xi).unwrap(), qn(n, l)).unwrap();
                (x.exact - x.order_xi2).abs()
            };
            let ratio = err(0.08) / err(0.04);
            assert!((14.0..18.0).contains(&ratio), "ratio {ratio} for ({n},{l})");
        }
    }

    #[test]
    fn relativistic_correction_is_second_order() {
        let base = reference();
        for (n, l) in [(0, 1), (2, 2)] {
            let rel = |xi: f64| {
                let p = base.with_xi(xi).unwrap();
                let c = energy_closed_form(&p, qn(n, l)).unwrap().e_kinetic;
                let nr = energy_nonrel(&p, qn(n, l)).unwrap().e_kinetic;
                ((c - nr) / nr).abs()
            };
            let ratio = rel(0.02) / rel(0.01);
            assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn levels_rise_with_n_and_l() {
        let p = reference();
        for l in 1..5 {
            for n in 0..5 {
                let e = energy_closed_form(&p, qn(n, l)).unwrap().e_total;
                assert!(e < energy_closed_form(&p, qn(n + 1, l)).unwrap().e_total);
                assert!(e < energy_closed_form(&p, qn(n, l + 1)).unwrap().e_total);
                assert!(e < p.mass);
            }
        }
    }

    #[test]
    fn near_critical_coupling_is_still_bound() {
        let p = AnyonParams {
            charge: 1.5,
            ..AnyonParams::new(0.5, 0.6, 1.0).unwrap()
        };
        let e = energy_closed_form(&p, qn(0, 1)).unwrap();
        assert!(e.e_kinetic < 0.0 && e.e_total > 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn every_level_is_bound(
                spin in -1.0f64..2.0,
                xi in 1e-4f64..0.5,
                n in 0u32..20,
                l in 1u32..20,
            ) {
                let p = AnyonParams::new(spin, xi, 1.0).unwrap();
                let e = energy_closed_form(&p, qn(n, l)).unwrap();
                prop_assert!(e.e_kinetic < 0.0);
                prop_assert!(e.e_total > 0.0 && e.e_total < p.mass);
            }
        }
    }
}
