//! Property tests for the structural invariants: shift round trips,
//! deformation counting, adjoint pairing on random weight pairs, state
//! normalization, and the lowering-chain support rule.

use num_complex::Complex64;
use proptest::prelude::*;

use vacuumless::coherent::CoherentState;
use vacuumless::doubled::{PhiVector, ThetaSequence};
use vacuumless::graphene::{coefficients_for_choice, Choice, GrapheneParams};
use vacuumless::ladder::{LadderCoefficients, TruncatedVector};
use vacuumless::spectra::{Deformation, IndexWindow, Spectrum};

fn affine_spectrum(slope: f64, intercept: f64) -> Spectrum {
    Spectrum::from_fn("affine", move |p| slope * p as f64 + intercept)
}

fn theta(choice: Choice) -> ThetaSequence {
    let c = coefficients_for_choice(&GrapheneParams::default(), choice);
    ThetaSequence::from_coefficients(&c, 64).unwrap()
}

proptest! {
    #[test]
    fn shift_roundtrip_is_bitwise(
        slope in 0.5f64..2.0,
        intercept in -1.0f64..1.0,
        gamma in -10.0f64..10.0,
        p in -64i64..64,
    ) {
        let s = affine_spectrum(slope, intercept);
        let back = s.shifted(gamma).shifted(-gamma);
        prop_assert_eq!(s.eval(p).to_bits(), back.eval(p).to_bits());
    }

    #[test]
    fn deformation_changes_exactly_its_indices(
        indices in proptest::collection::btree_set(-20i64..20, 1..6),
        magnitudes in proptest::collection::vec(0.25f64..4.0, 6),
        signs in proptest::collection::vec(proptest::bool::ANY, 6),
    ) {
        let s = affine_spectrum(1.0, 0.3);
        let pairs: Vec<(i64, f64)> = indices
            .iter()
            .zip(magnitudes.iter().zip(&signs))
            .map(|(&q, (&m, &neg))| (q, if neg { -m } else { m }))
            .collect();
        let d = Deformation::from_pairs(pairs.clone()).unwrap();
        let t = s.deformed(&d);
        let w = IndexWindow::new(-24, 24).unwrap();
        let changed: Vec<i64> = w.iter().filter(|&p| t.eval(p) != s.eval(p)).collect();
        prop_assert_eq!(changed.len(), d.len());
        for (q, _) in pairs {
            prop_assert!(changed.contains(&q));
        }
    }

    #[test]
    fn adjoints_pair_for_random_real_weights(
        alphas in proptest::collection::vec(0.2f64..3.0, 17),
        betas in proptest::collection::vec(0.2f64..3.0, 17),
        u_seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
        v_seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
    ) {
        let w = IndexWindow::new(-8, 8).unwrap();
        let spectrum = affine_spectrum(1.0, 10.0);
        let a_tab = alphas.clone();
        let b_tab = betas.clone();
        let c = LadderCoefficients::new(
            "random",
            spectrum,
            move |p| a_tab[(p + 8).clamp(0, 16) as usize],
            move |p| b_tab[(p + 8).clamp(0, 16) as usize],
        );
        // interior support only: indices -7..=7
        let u = TruncatedVector::from_fn(w, |p| {
            if p.abs() <= 7 {
                let (re, im) = u_seed[(p + 7) as usize];
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let v = TruncatedVector::from_fn(w, |p| {
            if p.abs() <= 7 {
                let (re, im) = v_seed[(p + 7) as usize];
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let lhs = c.lower_adjoint(&u).strict().unwrap().inner(&v);
        let rhs = u.inner(&c.lower(&v).strict().unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm().max(1.0));
        let lhs_b = c.raise_adjoint(&u).strict().unwrap().inner(&v);
        let rhs_b = u.inner(&c.raise(&v).strict().unwrap());
        prop_assert!((lhs_b - rhs_b).norm() <= 1e-13 * rhs_b.norm().max(1.0));
    }

    #[test]
    fn sign_fixed_square_root_factorization_has_tiny_residual(
        intercept in 3.0f64..20.0,
        slope in 0.5f64..2.0,
    ) {
        // strictly positive on the window, so α = β = √ε works
        let s = affine_spectrum(slope, intercept + 2.0 * slope * 64.0);
        let s_a = s.clone();
        let s_b = s.clone();
        let c = LadderCoefficients::new(
            "sqrt-fact",
            s,
            move |p| s_a.eval(p).sqrt(),
            move |p| s_b.eval(p).sqrt(),
        );
        let w = IndexWindow::new(-64, 64).unwrap();
        let scale = c.spectrum().eval(64).abs();
        prop_assert!(c.factorization_residual(w) <= 1e-14 * scale);
    }

    #[test]
    fn coherent_states_stay_normalized(
        choice_idx in 0usize..2,
        radius_frac in 0.0f64..0.9,
        angle in 0.0f64..std::f64::consts::TAU,
        tol_exp in 8u32..14,
    ) {
        let (choice, r_scale) = match choice_idx {
            0 => (Choice::FlatTheta, 1.0),   // disk radius 1
            _ => (Choice::BosonicTheta, 3.0), // entire; cap at 2.7
        };
        let t = theta(choice);
        let tol = 10f64.powi(-(tol_exp as i32));
        let r = radius_frac * r_scale;
        let z = Complex64::from_polar(r, angle);
        let state = CoherentState::build(&t, z, tol).unwrap();
        prop_assert!(state.tail_bound() <= tol);
        prop_assert!((state.norm_sq() - 1.0).abs() <= tol * 4.0 + 1e-12);
        // the residual is carried by the top coefficient alone; its size is
        // √tol amplified by at most the local weight θ_{K+1}
        let residual = state.eigen_residual(&t);
        let amplification = 10.0 + 4.0 * z.norm();
        prop_assert!(residual <= tol.sqrt() * amplification + 1e-12);
    }

    #[test]
    fn lowering_chain_support_is_exactly_one_step_down(
        choice_idx in 0usize..3,
        k in 1usize..12,
    ) {
        let choice = Choice::ALL[choice_idx];
        let t = theta(choice);
        let e_k = PhiVector::basis(12, k).unwrap();
        let image = t.lower(&e_k);
        for j in 0..=12usize {
            if j == k - 1 {
                prop_assert!(image.get(j).norm() > 0.0);
            } else {
                prop_assert_eq!(image.get(j), Complex64::new(0.0, 0.0));
            }
        }
        // and the bottom of the chain is annihilated
        let e_0 = PhiVector::basis(12, 0).unwrap();
        prop_assert_eq!(t.lower(&e_0).norm(), 0.0);
    }

    #[test]
    fn strict_truncation_refuses_to_drop_mass(
        len in 1usize..12,
        cut in 0usize..12,
    ) {
        let v = PhiVector::from_coeffs(
            (0..=len).map(|k| Complex64::new(1.0 + k as f64, 0.0)).collect(),
        );
        let strict = v.truncated_strict(cut);
        if cut >= v.trunc_order() {
            prop_assert!(strict.is_ok());
        } else {
            prop_assert!(strict.is_err());
        }
    }
}
