//! Brute-force dense-matrix oracles for the ladder pair. Matrices here are
//! built straight from the raw coefficient sequences — never through the
//! banded representation or the apply operations they are checking.

use num_complex::Complex64;

use vacuumless::graphene::{coefficients_for_choice, Choice, GrapheneParams};
use vacuumless::ladder::{LadderCoefficients, LadderOp, TruncatedVector};
use vacuumless::spectra::IndexWindow;

/// Dense matrix on a window: entry (row, col) multiplies the amplitude at
/// basis index (lo + col) into basis index (lo + row).
struct Dense {
    lo: i64,
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    fn zeros(window: IndexWindow) -> Self {
        Self {
            lo: window.lo(),
            n: window.len(),
            data: vec![0.0; window.len() * window.len()],
        }
    }

    fn at(&self, row: i64, col: i64) -> f64 {
        self.data[(row - self.lo) as usize * self.n + (col - self.lo) as usize]
    }

    fn set(&mut self, row: i64, col: i64, v: f64) {
        self.data[(row - self.lo) as usize * self.n + (col - self.lo) as usize] = v;
    }

    fn matmul(&self, other: &Dense) -> Dense {
        assert_eq!(self.n, other.n);
        let mut out = Dense {
            lo: self.lo,
            n: self.n,
            data: vec![0.0; self.n * self.n],
        };
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = 0.0;
                for k in 0..self.n {
                    acc += self.data[i * self.n + k] * other.data[k * self.n + j];
                }
                out.data[i * self.n + j] = acc;
            }
        }
        out
    }

    fn transpose(&self) -> Dense {
        let mut out = Dense {
            lo: self.lo,
            n: self.n,
            data: vec![0.0; self.n * self.n],
        };
        for i in 0..self.n {
            for j in 0..self.n {
                out.data[j * self.n + i] = self.data[i * self.n + j];
            }
        }
        out
    }

    fn sub(&self, other: &Dense) -> Dense {
        let mut out = Dense {
            lo: self.lo,
            n: self.n,
            data: vec![0.0; self.n * self.n],
        };
        for i in 0..self.data.len() {
            out.data[i] = self.data[i] - other.data[i];
        }
        out
    }
}

/// a as a dense matrix, straight from the α sequence: a φ_p = α_p φ_{p-1}.
fn dense_lowering(c: &LadderCoefficients, w: IndexWindow) -> Dense {
    let mut m = Dense::zeros(w);
    for p in w.iter() {
        if w.contains(p - 1) {
            m.set(p - 1, p, c.alpha(p));
        }
    }
    m
}

/// b as a dense matrix: b φ_p = β_{p+1} φ_{p+1}.
fn dense_raising(c: &LadderCoefficients, w: IndexWindow) -> Dense {
    let mut m = Dense::zeros(w);
    for p in w.iter() {
        if w.contains(p + 1) {
            m.set(p + 1, p, c.beta(p + 1));
        }
    }
    m
}

fn graphene(choice: Choice) -> LadderCoefficients {
    coefficients_for_choice(&GrapheneParams::default(), choice)
}

#[test]
fn lowering_spot_values_from_the_piecewise_sequences() {
    let w = IndexWindow::new(-8, 8).unwrap();
    // flat choice: a φ_1 = 1·φ_0
    let flat = graphene(Choice::FlatTheta);
    let image = flat
        .lower(&TruncatedVector::basis(w, 1).unwrap())
        .strict()
        .unwrap();
    assert_eq!(image.get(0), Complex64::new(1.0, 0.0));
    // standard choice: a φ_4 = 2·φ_3
    let bosonic = graphene(Choice::BosonicTheta);
    let image = bosonic
        .lower(&TruncatedVector::basis(w, 4).unwrap())
        .strict()
        .unwrap();
    assert_eq!(image.get(3), Complex64::new(2.0, 0.0));
}

#[test]
fn raising_spot_values_from_the_piecewise_sequences() {
    let w = IndexWindow::new(-8, 8).unwrap();
    // flat choice: b φ_0 = β_1 φ_1 = 3 φ_1 at c = 1
    let flat = graphene(Choice::FlatTheta);
    let image = flat
        .raise(&TruncatedVector::basis(w, 0).unwrap())
        .strict()
        .unwrap();
    assert_eq!(image.get(1), Complex64::new(3.0, 0.0));
    // standard choice: b φ_{-1} = β_0 φ_0 = √1·φ_0
    let bosonic = graphene(Choice::BosonicTheta);
    let image = bosonic
        .raise(&TruncatedVector::basis(w, -1).unwrap())
        .strict()
        .unwrap();
    assert_eq!(image.get(0), Complex64::new(1.0, 0.0));
}

#[test]
fn adjoint_spot_values() {
    let w = IndexWindow::new(-8, 8).unwrap();
    // a† φ_3 = α_4 φ_4 = 2 φ_4 for the standard choice
    let bosonic = graphene(Choice::BosonicTheta);
    let image = bosonic
        .lower_adjoint(&TruncatedVector::basis(w, 3).unwrap())
        .strict()
        .unwrap();
    assert_eq!(image.get(4), Complex64::new(2.0, 0.0));
    // zero maps to zero under every operation
    let zero = TruncatedVector::zeros(w);
    assert!(bosonic.lower_adjoint(&zero).strict().unwrap().is_zero());
    assert!(bosonic.raise_adjoint(&zero).strict().unwrap().is_zero());
}

#[test]
fn no_vacuum_on_a_wide_window_for_every_choice() {
    let w = IndexWindow::new(-32, 32).unwrap();
    for choice in Choice::ALL {
        let c = graphene(choice);
        c.validate_no_vacuum(w).unwrap();
        for p in w.iter() {
            assert!(c.alpha(p).abs() > 0.0, "‖a φ_p‖ vanishes at {p}");
            assert!(c.beta(p + 1).abs() > 0.0, "‖b φ_p‖ vanishes at {p}");
        }
    }
}

#[test]
fn dense_transpose_is_the_adjoint() {
    // real coefficients: the adjoint matrix is exactly the transpose
    let w = IndexWindow::new(-8, 8).unwrap();
    for choice in Choice::ALL {
        let c = graphene(choice);
        let a = dense_lowering(&c, w);
        // build a† from the apply operation on basis vectors
        let mut adag = Dense::zeros(w);
        for p in w.iter() {
            let image = c
                .lower_adjoint(&TruncatedVector::basis(w, p).unwrap())
                .lenient();
            for q in w.iter() {
                let amp = image.get(q);
                assert_eq!(amp.im, 0.0);
                adag.set(q, p, amp.re);
            }
        }
        let defect = a.transpose().sub(&adag);
        for v in &defect.data {
            assert_eq!(*v, 0.0);
        }
    }
}

#[test]
fn adjoint_pairing_on_interior_vectors() {
    let w = IndexWindow::new(-8, 8).unwrap();
    let c = graphene(Choice::SpectralTheta);
    // deterministic pseudo-random interior vectors
    let u = TruncatedVector::from_fn(w, |p| {
        if p.abs() >= 8 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((p as f64 * 0.37).sin(), (p as f64 * 0.71).cos())
        }
    });
    let v = TruncatedVector::from_fn(w, |p| {
        if p.abs() >= 8 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((p as f64 * 1.13).cos(), (p as f64 * 0.29).sin())
        }
    });
    let lhs = c.lower_adjoint(&u).strict().unwrap().inner(&v);
    let rhs = u.inner(&c.lower(&v).strict().unwrap());
    assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm().max(1.0));
    let lhs_b = c.raise_adjoint(&u).strict().unwrap().inner(&v);
    let rhs_b = u.inner(&c.raise(&v).strict().unwrap());
    assert!((lhs_b - rhs_b).norm() <= 1e-13 * rhs_b.norm().max(1.0));
}

#[test]
fn raising_times_lowering_is_the_spectrum_diagonal() {
    let w = IndexWindow::new(-32, 32).unwrap();
    for choice in Choice::ALL {
        let c = graphene(choice);
        let product = dense_raising(&c, w).matmul(&dense_lowering(&c, w));
        for p in w.iter() {
            if p == w.lo() {
                continue; // the lowering row leaves the window there
            }
            let expected = c.spectrum().eval(p);
            assert!(
                (product.at(p, p) - expected).abs() <= 1e-12,
                "choice {choice:?}: (ba)_{{{p},{p}}} = {} vs ε = {expected}",
                product.at(p, p)
            );
            for q in w.iter() {
                if q != p && w.contains(q) {
                    assert_eq!(product.at(p, q), 0.0);
                }
            }
        }
    }
}

#[test]
fn commutator_gap_matches_the_dense_commutator() {
    let w = IndexWindow::new(-32, 32).unwrap();
    for choice in Choice::ALL {
        let c = graphene(choice);
        let a = dense_lowering(&c, w);
        let b = dense_raising(&c, w);
        let ab = a.matmul(&b);
        let ba = b.matmul(&a);
        let comm = ab.sub(&ba);
        for p in -16..=16i64 {
            assert!(
                (comm.at(p, p) - c.commutator_gap(p)).abs() <= 1e-12,
                "choice {choice:?} at p = {p}"
            );
        }
    }
}

#[test]
fn commutator_gap_spot_values() {
    let c = graphene(Choice::FlatTheta);
    assert!((c.commutator_gap(0) - 2.0).abs() <= 1e-15);
    let expect = 2.0 * (2.0f64.sqrt() - 1.0);
    assert!((c.commutator_gap(1) - expect).abs() <= 1e-15);
}

#[test]
fn banded_subdiagonal_weights() {
    let c = graphene(Choice::BosonicTheta);
    let w = IndexWindow::new(0, 3).unwrap();
    let m = c.banded(LadderOp::Lowering, w);
    assert_eq!(m.offset(), -1);
    assert_eq!(m.boundary_rows(), &[0]);
    let weights = m.interior_weights();
    let expect = [1.0, 2.0f64.sqrt(), 3.0f64.sqrt()];
    assert_eq!(weights.len(), 3);
    for (got, want) in weights.iter().zip(expect) {
        assert_eq!(*got, want);
    }
}

#[test]
fn banded_product_reproduces_the_spectrum_on_interior_rows() {
    let w = IndexWindow::new(-12, 12).unwrap();
    let c = graphene(Choice::SpectralTheta);
    let lower = c.banded(LadderOp::Lowering, w);
    let raise = c.banded(LadderOp::Raising, w);
    for p in w.iter().skip(1) {
        let v = TruncatedVector::basis(w, p).unwrap();
        let through = raise
            .apply(&lower.apply(&v).unwrap().lenient())
            .unwrap()
            .lenient();
        let expected = c.spectrum().eval(p);
        assert!((through.get(p).re - expected).abs() <= 1e-12);
        assert_eq!(through.get(p).im, 0.0);
    }
}

#[test]
fn perturbed_weight_shows_up_as_the_exact_product_defect() {
    // perturb α_5 of the flat choice by 1e-3; the residual is |Δα·β_5|
    let base = graphene(Choice::FlatTheta);
    let alpha_src = base.clone();
    let beta_src = base.clone();
    let perturbed = LadderCoefficients::new(
        "flat-perturbed",
        base.spectrum().clone(),
        move |p| alpha_src.alpha(p) + if p == 5 { 1e-3 } else { 0.0 },
        move |p| beta_src.beta(p),
    );
    let w = IndexWindow::new(-8, 8).unwrap();
    let residual = perturbed.factorization_residual(w);
    let oracle = (1e-3 * base.beta(5)).abs(); // β_5 = 1 + 2√5
    assert!((residual - oracle).abs() <= 1e-15);
    assert!((oracle - 1e-3 * (1.0 + 2.0 * 5.0f64.sqrt())).abs() <= 1e-18);
}
