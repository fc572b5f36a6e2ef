//! The vacuum-free lowering/raising pair on the bi-infinite basis {φ_p}.
//!
//! Two real weight sequences α, β define
//!
//! ```text
//! a φ_p = α_p φ_{p-1}        b  φ_p = β_{p+1} φ_{p+1}
//! a†φ_p = α_{p+1} φ_{p+1}    b† φ_p = β_p     φ_{p-1}
//! ```
//!
//! and the product rule b a φ_p = α_p β_p φ_p makes the pair factorize a
//! spectrum whenever α_p β_p = ε_p. Because ε_p never vanishes on an
//! admissible spectrum, neither sequence does: no basis vector is
//! annihilated. Coefficients are kept real throughout, so adjoints need no
//! conjugation.
//!
//! On the full space all four operators are densely defined — their domains
//! contain the span of the basis — which is a mathematical fact about the
//! untruncated setting; code here only ever touches finite windows.
//!
//! Operators never wrap or clamp at a window edge. A row whose image would
//! leave the window is flagged on the returned [`LadderImage`]; strict
//! callers turn the flag into an error, verification paths exclude it.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectra::{IndexWindow, Spectrum};
use crate::util::{KahanComplex, KahanSum};

type CoeffFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

/// Finite slice of an element of span{φ_p}: complex amplitudes on a window,
/// implicitly zero outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedVector {
    window: IndexWindow,
    coeffs: Vec<Complex64>,
}

impl TruncatedVector {
    pub fn zeros(window: IndexWindow) -> Self {
        Self {
            window,
            coeffs: vec![Complex64::new(0.0, 0.0); window.len()],
        }
    }

    /// The basis vector φ_p.
    pub fn basis(window: IndexWindow, p: i64) -> Result<Self> {
        let mut v = Self::zeros(window);
        v.set(p, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    pub fn from_fn<F: FnMut(i64) -> Complex64>(window: IndexWindow, f: F) -> Self {
        Self {
            window,
            coeffs: window.iter().map(f).collect(),
        }
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    /// Amplitude at index `p`; zero outside the window.
    pub fn get(&self, p: i64) -> Complex64 {
        match self.window.offset_of(p) {
            Ok(i) => self.coeffs[i],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, p: i64, value: Complex64) -> Result<()> {
        let i = self.window.offset_of(p)?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn add_at(&mut self, p: i64, value: Complex64) -> Result<()> {
        let i = self.window.offset_of(p)?;
        self.coeffs[i] += value;
        Ok(())
    }

    /// Indices carrying a nonzero amplitude, ascending.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.window
            .iter()
            .zip(self.coeffs.iter())
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(p, _)| p)
    }

    pub fn is_zero(&self) -> bool {
        self.support().next().is_none()
    }

    /// ⟨self, other⟩, conjugate-linear in `self`, accumulated in ascending
    /// index order over the window overlap.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let lo = self.window.lo().max(other.window.lo());
        let hi = self.window.hi().min(other.window.hi());
        if lo > hi {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = KahanComplex::new();
        for p in lo..=hi {
            acc.add(self.get(p).conj() * other.get(p));
        }
        acc.value()
    }

    pub fn norm_sq(&self) -> f64 {
        let mut acc = KahanSum::new();
        for c in &self.coeffs {
            acc.add(c.norm_sqr());
        }
        acc.value()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            window: self.window,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Entrywise difference on the union window (both vectors are zero
    /// outside their own windows).
    pub fn sub(&self, other: &Self) -> Self {
        let lo = self.window.lo().min(other.window.lo());
        let hi = self.window.hi().max(other.window.hi());
        let window = IndexWindow::new(lo, hi).expect("union of valid windows");
        Self::from_fn(window, |p| self.get(p) - other.get(p))
    }
}

/// Result of applying a ladder operator: the in-window image plus the source
/// rows whose contribution left the window.
#[derive(Clone, Debug)]
pub struct LadderImage {
    vector: TruncatedVector,
    boundary_rows: Vec<i64>,
}

impl LadderImage {
    pub fn boundary_rows(&self) -> &[i64] {
        &self.boundary_rows
    }

    /// Discards boundary information and keeps the truncated image.
    pub fn lenient(self) -> TruncatedVector {
        self.vector
    }

    /// Rejects the application if any populated row left the window.
    pub fn strict(self) -> Result<TruncatedVector> {
        if self.boundary_rows.is_empty() {
            Ok(self.vector)
        } else {
            Err(Error::BoundarySupport {
                rows: self.boundary_rows,
            })
        }
    }

    pub fn vector(&self) -> &TruncatedVector {
        &self.vector
    }
}

/// Which member of the pair (or adjoint) a banded matrix should represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderOp {
    /// a: index down, weight α_p.
    Lowering,
    /// b: index up, weight β_{p+1}.
    Raising,
    /// a†: index up, weight α_{p+1}.
    LoweringAdjoint,
    /// b†: index down, weight β_p.
    RaisingAdjoint,
}

impl LadderOp {
    pub fn offset(&self) -> i64 {
        match self {
            LadderOp::Lowering | LadderOp::RaisingAdjoint => -1,
            LadderOp::Raising | LadderOp::LoweringAdjoint => 1,
        }
    }
}

/// The weight pair (α, β) tied to the spectrum it factorizes.
#[derive(Clone)]
pub struct LadderCoefficients {
    label: String,
    alpha: CoeffFn,
    beta: CoeffFn,
    spectrum: Spectrum,
}

impl LadderCoefficients {
    pub fn new<A, B>(label: impl Into<String>, spectrum: Spectrum, alpha: A, beta: B) -> Self
    where
        A: Fn(i64) -> f64 + Send + Sync + 'static,
        B: Fn(i64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            spectrum,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alpha(&self, p: i64) -> f64 {
        (self.alpha)(p)
    }

    pub fn beta(&self, p: i64) -> f64 {
        (self.beta)(p)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Checks that no basis vector in the window is annihilated by either
    /// operator of the pair.
    pub fn validate_no_vacuum(&self, w: IndexWindow) -> Result<()> {
        for p in w.iter() {
            if self.alpha(p) == 0.0 {
                return Err(Error::ZeroCoefficient {
                    name: "alpha",
                    index: p,
                });
            }
            if self.beta(p) == 0.0 {
                return Err(Error::ZeroCoefficient {
                    name: "beta",
                    index: p,
                });
            }
        }
        Ok(())
    }

    fn apply(&self, op: LadderOp, v: &TruncatedVector) -> LadderImage {
        let w = v.window();
        let mut out = TruncatedVector::zeros(w);
        let mut boundary = Vec::new();
        for p in w.iter() {
            let amp = v.get(p);
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let weight = match op {
                LadderOp::Lowering => self.alpha(p),
                LadderOp::Raising => self.beta(p + 1),
                LadderOp::LoweringAdjoint => self.alpha(p + 1),
                LadderOp::RaisingAdjoint => self.beta(p),
            };
            let target = p + op.offset();
            if w.contains(target) {
                out.add_at(target, amp * weight).expect("target in window");
            } else {
                boundary.push(p);
            }
        }
        LadderImage {
            vector: out,
            boundary_rows: boundary,
        }
    }

    /// a v, with a φ_p = α_p φ_{p-1}.
    pub fn lower(&self, v: &TruncatedVector) -> LadderImage {
        self.apply(LadderOp::Lowering, v)
    }

    /// b v, with b φ_p = β_{p+1} φ_{p+1}.
    pub fn raise(&self, v: &TruncatedVector) -> LadderImage {
        self.apply(LadderOp::Raising, v)
    }

    /// a† v, with a† φ_p = α_{p+1} φ_{p+1}.
    pub fn lower_adjoint(&self, v: &TruncatedVector) -> LadderImage {
        self.apply(LadderOp::LoweringAdjoint, v)
    }

    /// b† v, with b† φ_p = β_p φ_{p-1}.
    pub fn raise_adjoint(&self, v: &TruncatedVector) -> LadderImage {
        self.apply(LadderOp::RaisingAdjoint, v)
    }

    /// max_{p in window} |α_p β_p - ε_p|; zero iff the pair factorizes the
    /// spectrum on the window.
    pub fn factorization_residual(&self, w: IndexWindow) -> f64 {
        let mut worst: f64 = 0.0;
        for p in w.iter() {
            let res = (self.alpha(p) * self.beta(p) - self.spectrum.eval(p)).abs();
            worst = worst.max(res);
        }
        worst
    }

    /// Diagonal entry of the commutator of the pair at φ_p,
    /// α_{p+1}β_{p+1} - α_p β_p. When the pair factorizes the spectrum this
    /// is the level gap ε_{p+1} - ε_p, independent of the particular weights.
    pub fn commutator_gap(&self, p: i64) -> f64 {
        self.alpha(p + 1) * self.beta(p + 1) - self.alpha(p) * self.beta(p)
    }

    /// Materializes one operator of the pair as a single-off-diagonal banded
    /// matrix on a window.
    pub fn banded(&self, op: LadderOp, w: IndexWindow) -> BandedOperator {
        let weights = w
            .iter()
            .map(|p| match op {
                LadderOp::Lowering => self.alpha(p),
                LadderOp::Raising => self.beta(p + 1),
                LadderOp::LoweringAdjoint => self.alpha(p + 1),
                LadderOp::RaisingAdjoint => self.beta(p),
            })
            .collect();
        let boundary_rows = w.iter().filter(|p| !w.contains(p + op.offset())).collect();
        BandedOperator {
            window: w,
            offset: op.offset(),
            weights,
            boundary_rows,
        }
    }
}

impl std::fmt::Debug for LadderCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LadderCoefficients")
            .field("label", &self.label)
            .field("spectrum", &self.spectrum)
            .finish()
    }
}

/// A ladder operator materialized on a window: one off-diagonal of real
/// weights plus the set of rows whose image leaves the window.
#[derive(Clone, Debug)]
pub struct BandedOperator {
    window: IndexWindow,
    offset: i64,
    weights: Vec<f64>,
    boundary_rows: Vec<i64>,
}

impl BandedOperator {
    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Weight attached to source index `p` (φ_p ↦ weight·φ_{p+offset}).
    pub fn weight_at(&self, p: i64) -> Result<f64> {
        Ok(self.weights[self.window.offset_of(p)?])
    }

    pub fn boundary_rows(&self) -> &[i64] {
        &self.boundary_rows
    }

    /// Weights of the rows whose image stays inside the window, ascending.
    pub fn interior_weights(&self) -> Vec<f64> {
        self.window
            .iter()
            .zip(self.weights.iter())
            .filter(|(p, _)| !self.boundary_rows.contains(p))
            .map(|(_, w)| *w)
            .collect()
    }

    /// Applies the banded matrix; must match the vector's window.
    pub fn apply(&self, v: &TruncatedVector) -> Result<LadderImage> {
        if v.window() != self.window {
            return Err(Error::WindowMismatch {
                expected_lo: self.window.lo(),
                expected_hi: self.window.hi(),
                got_lo: v.window().lo(),
                got_hi: v.window().hi(),
            });
        }
        let mut out = TruncatedVector::zeros(self.window);
        let mut boundary = Vec::new();
        for (i, p) in self.window.iter().enumerate() {
            let amp = v.get(p);
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let target = p + self.offset;
            if self.window.contains(target) {
                out.add_at(target, amp * self.weights[i])
                    .expect("target in window");
            } else {
                boundary.push(p);
            }
        }
        Ok(LadderImage {
            vector: out,
            boundary_rows: boundary,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(lo: i64, hi: i64) -> IndexWindow {
        IndexWindow::new(lo, hi).unwrap()
    }

    /// Square-root factorization of a strictly positive spectrum.
    fn sqrt_pair() -> LadderCoefficients {
        let s = Spectrum::from_fn("positive-linear", |p| p as f64 + 10.0);
        let s2 = s.clone();
        let s3 = s.clone();
        LadderCoefficients::new(
            "sqrt",
            s,
            move |p| s2.eval(p).sqrt(),
            move |p| s3.eval(p).sqrt(),
        )
    }

    #[test]
    fn lowering_moves_one_step_down() {
        let c = sqrt_pair();
        let w = window(-4, 4);
        let v = TruncatedVector::basis(w, 1).unwrap();
        let image = c.lower(&v).strict().unwrap();
        assert_eq!(image.get(0), Complex64::new(c.alpha(1), 0.0));
        assert_eq!(image.support().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let c = sqrt_pair();
        let w = window(-4, 4);
        let v = TruncatedVector::zeros(w);
        assert!(c.lower(&v).strict().unwrap().is_zero());
        assert!(c.raise(&v).strict().unwrap().is_zero());
    }

    #[test]
    fn boundary_row_is_flagged_not_clamped() {
        let c = sqrt_pair();
        let w = window(-2, 2);
        let v = TruncatedVector::basis(w, -2).unwrap();
        let image = c.lower(&v);
        assert_eq!(image.boundary_rows(), &[-2]);
        assert!(image.vector().is_zero());
        assert!(matches!(
            c.lower(&v).strict(),
            Err(Error::BoundarySupport { .. })
        ));
        // raising at the top edge mirrors this
        let top = TruncatedVector::basis(w, 2).unwrap();
        assert_eq!(c.raise(&top).boundary_rows(), &[2]);
    }

    #[test]
    fn square_root_factorization_has_negligible_residual() {
        // sqrt(eps)² reproduces eps only to rounding, not bitwise
        let c = sqrt_pair();
        assert!(c.factorization_residual(window(-8, 8)) <= 1e-14);
    }

    #[test]
    fn no_vacuum_validation_catches_zero_weight() {
        let s = Spectrum::from_fn("linear", |p| p as f64);
        let c = LadderCoefficients::new("broken", s, |p| p as f64, |_| 1.0);
        let err = c.validate_no_vacuum(window(-2, 2)).unwrap_err();
        assert!(matches!(
            err,
            Error::ZeroCoefficient {
                name: "alpha",
                index: 0
            }
        ));
    }

    #[test]
    fn banded_matrix_agrees_with_direct_application() {
        let c = sqrt_pair();
        let w = window(-3, 3);
        for op in [
            LadderOp::Lowering,
            LadderOp::Raising,
            LadderOp::LoweringAdjoint,
            LadderOp::RaisingAdjoint,
        ] {
            let m = c.banded(op, w);
            for p in w.iter() {
                let v = TruncatedVector::basis(w, p).unwrap();
                let via_matrix = m.apply(&v).unwrap().lenient();
                let direct = c.apply(op, &v).lenient();
                assert_eq!(via_matrix, direct);
            }
        }
    }

    #[test]
    fn banded_rejects_foreign_window() {
        let c = sqrt_pair();
        let m = c.banded(LadderOp::Lowering, window(-3, 3));
        let v = TruncatedVector::zeros(window(-2, 2));
        assert!(matches!(m.apply(&v), Err(Error::WindowMismatch { .. })));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_slot() {
        let w = window(0, 2);
        let mut u = TruncatedVector::zeros(w);
        u.set(0, Complex64::new(0.0, 1.0)).unwrap();
        let v = TruncatedVector::basis(w, 0).unwrap();
        assert_eq!(u.inner(&v), Complex64::new(0.0, -1.0));
        assert_eq!(v.inner(&u), Complex64::new(0.0, 1.0));
    }
}
