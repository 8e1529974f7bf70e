use std::f64::consts::PI;

use anyon_spectrum::closed_form::{energy_closed_form, energy_nonrel, sigma_l};
use anyon_spectrum::model::{AnyonParams, Method, PhysicalConstants, QuantumNumbers};
use anyon_spectrum::oracle::{solve_level, OracleSettings};
use anyon_spectrum::spectrum::{solve, Tolerances};
use anyon_spectrum::wkb::{energy_wkb_full, energy_wkb_split, quantization_residual, split_phase};
use approx::assert_relative_eq;
use proptest::prelude::*;

fn reference() -> AnyonParams {
    AnyonParams::reference(&PhysicalConstants::default())
}

fn qn(n_r: u32, l: u32) -> QuantumNumbers {
    QuantumNumbers::new(n_r, l).unwrap()
}

#[test]
fn reference_levels_frozen() {
    // Closed form with CODATA constants, evaluated independently in
    // double precision from the principal-number formula.
    let expected = [
        ((0, 1), -6.046_602_019_119_113),
        ((0, 2), -2.176_896_275_043_219),
        ((1, 1), -2.176_839_667_467_064),
        ((1, 2), -1.110_664_945_105_985_8),
        ((2, 1), -1.110_644_315_275_849_6),
        ((2, 2), -0.671_884_632_594_678_5),
    ];
    let p = reference();
    for ((n, l), ev) in expected {
        let got = energy_closed_form(&p, qn(n, l)).unwrap().kinetic_ev;
        assert_relative_eq!(got, ev, max_relative = 1e-13);
    }
}

#[test]
fn all_routes_agree_across_spins() {
    let tol = Tolerances::default();
    for spin in [0.0, 0.25, 0.5, 1.0] {
        let p = reference().with_spin(spin).unwrap();
        for (n, l) in [(0, 1), (1, 2), (3, 1)] {
            let closed = energy_closed_form(&p, qn(n, l)).unwrap().kinetic_ev;
            for method in [Method::WkbFull, Method::WkbSplit, Method::Oracle] {
                let v = solve(method, &p, qn(n, l), &tol).unwrap().kinetic_ev;
                assert!(
                    (v - closed).abs() < 1e-3,
                    "S={spin} ({n},{l}) {method}: {v} vs {closed}"
                );
            }
        }
    }
}

#[test]
fn split_phase_pieces_match_their_analytic_forms() {
    let p = reference();
    let e = energy_wkb_split(&p, qn(1, 1)).unwrap().e_total;
    let s = split_phase(&p, 1, e).unwrap();
    assert_relative_eq!(s.coulomb, s.coulomb_analytic, max_relative = 1e-9);
    assert_relative_eq!(s.spin_orbit, s.spin_orbit_analytic, max_relative = 1e-6);
    assert_relative_eq!(s.phase(), 1.5 * PI, max_relative = 1e-9);
}

#[test]
fn levels_increase_with_quantum_numbers() {
    let p = reference();
    for l in 1..=4 {
        let mut last = f64::NEG_INFINITY;
        for n in 0..=5 {
            let e = energy_wkb_full(&p, qn(n, l)).unwrap().e_total;
            assert!(e > last);
            last = e;
        }
    }
    for n in 0..=3 {
        let mut last = f64::NEG_INFINITY;
        for l in 1..=5 {
            let e = solve_level(&p, qn(n, l), &OracleSettings::default())
                .unwrap()
                .energy
                .e_total;
            assert!(e > last);
            last = e;
        }
    }
}

#[test]
fn hydrogen_like_scaling_with_charge() {
    // At small coupling the levels scale as (xi Z)^2 to leading order.
    let base = AnyonParams::new(0.5, 1e-3, 1.0).unwrap();
    let heavy = AnyonParams::new(0.5, 1e-3, 3.0).unwrap();
    for (n, l) in [(0, 1), (2, 3)] {
        let e1 = energy_nonrel(&base, qn(n, l)).unwrap().e_kinetic;
        let e3 = energy_nonrel(&heavy, qn(n, l)).unwrap().e_kinetic;
        assert_relative_eq!(e3 / e1, 9.0, max_relative = 1e-12);
        let c1 = energy_closed_form(&base, qn(n, l)).unwrap().e_kinetic;
        let c3 = energy_closed_form(&heavy, qn(n, l)).unwrap().e_kinetic;
        assert_relative_eq!(c3 / c1, 9.0, max_relative = 1e-4);
    }
}

#[test]
fn stronger_coupling_still_agrees() {
    let p = AnyonParams::new(0.5, 0.1, 2.0).unwrap();
    for (n, l) in [(0, 1), (1, 2)] {
        let closed = energy_closed_form(&p, qn(n, l)).unwrap().binding(&p);
        let oracle = solve_level(&p, qn(n, l), &OracleSettings::default())
            .unwrap()
            .energy
            .binding(&p);
        assert!(sigma_l(&p, l).unwrap() > 0.0);
        assert_relative_eq!(closed, oracle, max_relative = 0.05);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wkb_full_satisfies_quantization(
        spin in 0.0f64..1.5,
        xi in 1e-3f64..0.2,
        n in 0u32..5,
        l in 1u32..5,
    ) {
        let p = AnyonParams::new(spin, xi, 1.0).unwrap();
        let e = energy_wkb_full(&p, qn(n, l)).unwrap();
        let r = quantization_residual(&p, qn(n, l), e.e_total).unwrap();
        prop_assert!(r.residual.abs() < 1e-9, "{r:?}");
        prop_assert!(e.e_kinetic < 0.0);
    }

    #[test]
    fn closed_form_tracks_wkb_full(
        spin in 0.0f64..1.0,
        xi in 1e-3f64..0.05,
        n in 0u32..4,
        l in 1u32..4,
    ) {
        let p = AnyonParams::new(spin, xi, 1.0).unwrap();
        let closed = energy_closed_form(&p, qn(n, l)).unwrap().binding(&p);
        let full = energy_wkb_full(&p, qn(n, l)).unwrap().binding(&p);
        // The closed form drops terms of relative order (xi Z)^2 beyond sigma.
        prop_assert!((closed - full).abs() / full < 10.0 * xi * xi, "{closed} vs {full}");
    }
}
