//! The doubled space and the lowering operator that regains a vacuum.
//!
//! Folding positive and negative indices into Φ_k = (φ_k, φ_{-k})/√2 yields
//! an orthonormal family indexed by k ≥ 0. It is not total — the witness
//! (φ_1, -φ_{-1}) is orthogonal to every Φ_k — but on its closed span the
//! block operator
//!
//! ```text
//! A = diag(Q_{-1} a, Q_{+1} b)
//! ```
//!
//! acts as A Φ_k = θ_k Φ_{k-1} with θ_0 = 0 and θ_k = α_k = β_{1-k}, so Φ_0
//! is annihilated even though neither a nor b has a vacuum.
//!
//! Two coordinate systems coexist: raw pairs of truncated vectors
//! ([`DoubledVector`]) and amplitude arrays over k ([`PhiVector`]).
//! Conversions are explicit; structural checks round-trip through both.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::{LadderCoefficients, TruncatedVector};
use crate::spectra::IndexWindow;
use crate::util::{KahanComplex, KahanSum};

/// Relative tolerance for the α_k = β_{1-k} compatibility test.
pub const COMPATIBILITY_REL_TOL: f64 = 1e-14;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// An element of the doubled space: a pair of truncated vectors with
/// ‖f‖² = ‖upper‖² + ‖lower‖².
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledVector {
    pub upper: TruncatedVector,
    pub lower: TruncatedVector,
}

impl DoubledVector {
    pub fn zeros(window: IndexWindow) -> Self {
        Self {
            upper: TruncatedVector::zeros(window),
            lower: TruncatedVector::zeros(window),
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.upper.inner(&other.upper) + self.lower.inner(&other.lower)
    }

    pub fn norm_sq(&self) -> f64 {
        self.upper.norm_sq() + self.lower.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            upper: self.upper.scaled(factor),
            lower: self.lower.scaled(factor),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            upper: self.upper.sub(&other.upper),
            lower: self.lower.sub(&other.lower),
        }
    }

    /// Largest amplitude modulus across both components.
    pub fn max_abs(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in [&self.upper, &self.lower] {
            for p in w.window().iter() {
                worst = worst.max(w.get(p).norm());
            }
        }
        worst
    }
}

/// Φ_k = (φ_k, φ_{-k})/√2. Both ±k must lie in the window.
pub fn make_phi(k: usize, window: IndexWindow) -> Result<DoubledVector> {
    let k = k as i64;
    for idx in [k, -k] {
        if !window.contains(idx) {
            return Err(Error::WindowTooSmall { index: idx });
        }
    }
    let mut out = DoubledVector::zeros(window);
    let amp = Complex64::new(FRAC_1_SQRT_2, 0.0);
    out.upper.set(k, amp)?;
    out.lower.set(-k, amp)?;
    Ok(out)
}

/// The vector (φ_1, -φ_{-1}): nonzero, yet orthogonal to every Φ_k. Its
/// existence is what keeps the doubled family from being total.
pub fn nontotality_witness(window: IndexWindow) -> Result<DoubledVector> {
    for idx in [1i64, -1] {
        if !window.contains(idx) {
            return Err(Error::WindowTooSmall { index: idx });
        }
    }
    let mut out = DoubledVector::zeros(window);
    out.upper.set(1, Complex64::new(1.0, 0.0))?;
    out.lower.set(-1, Complex64::new(-1.0, 0.0))?;
    Ok(out)
}

/// Rank-one projector P_q f = ⟨φ_q, f⟩ φ_q.
pub fn project_onto(v: &TruncatedVector, q: i64) -> TruncatedVector {
    let mut out = TruncatedVector::zeros(v.window());
    if v.window().contains(q) {
        out.set(q, v.get(q)).expect("q in window");
    }
    out
}

/// Complement Q_q = 1 - P_q: zeroes the amplitude at index q.
pub fn project_out(v: &TruncatedVector, q: i64) -> TruncatedVector {
    let mut out = v.clone();
    if v.window().contains(q) {
        out.set(q, Complex64::new(0.0, 0.0)).expect("q in window");
    }
    out
}

/// True iff α_k = β_{1-k} for 1 ≤ k ≤ k_max within [`COMPATIBILITY_REL_TOL`].
pub fn check_compatibility(c: &LadderCoefficients, k_max: usize) -> bool {
    first_incompatibility(c, k_max).is_none()
}

fn first_incompatibility(c: &LadderCoefficients, k_max: usize) -> Option<(i64, f64, f64)> {
    for k in 1..=k_max as i64 {
        let a = c.alpha(k);
        let b = c.beta(1 - k);
        let scale = a.abs().max(b.abs());
        if (a - b).abs() > COMPATIBILITY_REL_TOL * scale {
            return Some((k, a, b));
        }
    }
    None
}

/// The lowering weights of the doubled-space operator: θ_0 = 0 and
/// θ_k = α_k for k ≥ 1, extracted from a compatible coefficient pair.
///
/// θ-factorials θ_k! = θ_1 ⋯ θ_k are exposed in sign/log form because they
/// overflow quickly for growing weight sequences.
#[derive(Clone, Debug)]
pub struct ThetaSequence {
    coeffs: LadderCoefficients,
    checked_to: usize,
}

impl ThetaSequence {
    /// Validates α_k = β_{1-k} and θ_k ≠ 0 for 1 ≤ k ≤ k_check, then adopts
    /// θ_k = α_k.
    pub fn from_coefficients(c: &LadderCoefficients, k_check: usize) -> Result<Self> {
        if let Some((k, alpha, beta)) = first_incompatibility(c, k_check) {
            return Err(Error::Incompatible { k, alpha, beta });
        }
        for k in 1..=k_check as i64 {
            if c.alpha(k) == 0.0 {
                return Err(Error::ZeroCoefficient {
                    name: "theta",
                    index: k,
                });
            }
        }
        Ok(Self {
            coeffs: c.clone(),
            checked_to: k_check,
        })
    }

    pub fn source(&self) -> &LadderCoefficients {
        &self.coeffs
    }

    pub fn checked_to(&self) -> usize {
        self.checked_to
    }

    pub fn theta(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.coeffs.alpha(k as i64)
        }
    }

    /// ln|θ_k!| with θ_0! = 1.
    pub fn log_abs_factorial(&self, k: usize) -> f64 {
        let mut acc = KahanSum::new();
        for j in 1..=k {
            acc.add(self.theta(j).abs().ln());
        }
        acc.value()
    }

    /// Product of the signs of θ_1 … θ_k (+1 for k = 0).
    pub fn factorial_sign(&self, k: usize) -> f64 {
        let mut sign = 1.0;
        for j in 1..=k {
            if self.theta(j) < 0.0 {
                sign = -sign;
            }
        }
        sign
    }

    /// (θ_k!)², computed through the log form; may overflow to infinity.
    pub fn factorial_sq(&self, k: usize) -> f64 {
        (2.0 * self.log_abs_factorial(k)).exp()
    }

    /// Diagonal of [A, A†] at Φ_k: θ_{k+1}² - θ_k².
    pub fn commutator_diag(&self, k: usize) -> f64 {
        let up = self.theta(k + 1);
        let down = self.theta(k);
        up * up - down * down
    }

    /// A in Φ-coordinates: (A v)_k = θ_{k+1} v_{k+1}. Exact — the image of a
    /// finite array is finite, and the bottom needs no special casing
    /// because θ_0 multiplies nothing.
    pub fn lower(&self, v: &PhiVector) -> PhiVector {
        let n = v.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, slot) in coeffs.iter_mut().enumerate().take(n.saturating_sub(1)) {
            *slot = v.get(k + 1) * self.theta(k + 1);
        }
        PhiVector { coeffs }
    }

    /// A† in Φ-coordinates: (A† v)_{k+1} = θ_{k+1} v_k. The array grows by
    /// one so no mass is dropped; fixed-truncation callers re-truncate.
    pub fn raise(&self, v: &PhiVector) -> PhiVector {
        let n = v.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..n {
            coeffs[k + 1] = v.get(k) * self.theta(k + 1);
        }
        PhiVector { coeffs }
    }
}

/// Amplitudes over the Φ_k coordinate system, k from 0 up to a truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiVector {
    coeffs: Vec<Complex64>,
}

impl PhiVector {
    pub fn zeros(k_max: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); k_max + 1],
        }
    }

    pub fn basis(k_max: usize, k: usize) -> Result<Self> {
        if k > k_max {
            return Err(Error::WindowTooSmall { index: k as i64 });
        }
        let mut v = Self::zeros(k_max);
        v.coeffs[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest representable k.
    pub fn trunc_order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, k: usize, value: Complex64) -> Result<()> {
        if k >= self.coeffs.len() {
            return Err(Error::WindowTooSmall { index: k as i64 });
        }
        self.coeffs[k] = value;
        Ok(())
    }

    /// ⟨self, other⟩, conjugate-linear in `self`; the shorter array is
    /// implicitly zero-padded.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let n = self.len().min(other.len());
        let mut acc = KahanComplex::new();
        for k in 0..n {
            acc.add(self.coeffs[k].conj() * other.coeffs[k]);
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
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Entrywise combination self + factor·other, zero-padded to the longer
    /// length.
    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Self {
        let n = self.len().max(other.len());
        let coeffs = (0..n).map(|k| self.get(k) + other.get(k) * factor).collect();
        Self { coeffs }
    }

    /// Drops amplitudes above k_max, returning the dropped squared mass.
    pub fn truncated(&self, k_max: usize) -> (Self, f64) {
        if self.trunc_order() <= k_max {
            return (self.clone(), 0.0);
        }
        let kept = Self {
            coeffs: self.coeffs[..=k_max].to_vec(),
        };
        let mut dropped = KahanSum::new();
        for c in &self.coeffs[k_max + 1..] {
            dropped.add(c.norm_sqr());
        }
        (kept, dropped.value())
    }

    /// As [`Self::truncated`], but refuses to drop nonzero mass.
    pub fn truncated_strict(&self, k_max: usize) -> Result<Self> {
        let (kept, dropped) = self.truncated(k_max);
        if dropped > 0.0 {
            return Err(Error::TruncationOverflow { k_max, dropped });
        }
        Ok(kept)
    }

    /// Expands Σ v_k Φ_k into a raw doubled vector on the given window.
    pub fn to_doubled(&self, window: IndexWindow) -> Result<DoubledVector> {
        let mut out = DoubledVector::zeros(window);
        for (k, amp) in self.coeffs.iter().enumerate() {
            if *amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k_i = k as i64;
            for idx in [k_i, -k_i] {
                if !window.contains(idx) {
                    return Err(Error::WindowTooSmall { index: idx });
                }
            }
            let half = amp * FRAC_1_SQRT_2;
            out.upper.add_at(k_i, half)?;
            out.lower.add_at(-k_i, half)?;
        }
        Ok(out)
    }

    /// Projects a doubled vector onto the Φ family: v_k = ⟨Φ_k, f⟩.
    pub fn from_doubled(f: &DoubledVector, k_max: usize) -> Self {
        let coeffs = (0..=k_max)
            .map(|k| {
                let k_i = k as i64;
                (f.upper.get(k_i) + f.lower.get(-k_i)) * FRAC_1_SQRT_2
            })
            .collect();
        Self { coeffs }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.coeffs.iter()
    }
}

/// Application of a block operator on the doubled space with the boundary
/// rows its two components hit.
#[derive(Clone, Debug)]
pub struct DoubledImage {
    pub vector: DoubledVector,
    pub upper_boundary: Vec<i64>,
    pub lower_boundary: Vec<i64>,
}

impl DoubledImage {
    pub fn has_boundary(&self) -> bool {
        !self.upper_boundary.is_empty() || !self.lower_boundary.is_empty()
    }
}

/// The block lowering operator diag(Q_{-1} a, Q_{+1} b) assembled from the
/// ladder pair and the rank-one projectors, without reference to θ.
pub fn apply_block_lowering(c: &LadderCoefficients, f: &DoubledVector) -> DoubledImage {
    let upper_img = c.lower(&f.upper);
    let lower_img = c.raise(&f.lower);
    let upper_boundary = upper_img.boundary_rows().to_vec();
    let lower_boundary = lower_img.boundary_rows().to_vec();
    let vector = DoubledVector {
        upper: project_out(&upper_img.lenient(), -1),
        lower: project_out(&lower_img.lenient(), 1),
    };
    DoubledImage {
        vector,
        upper_boundary,
        lower_boundary,
    }
}

/// Diagonal rescaling that turns the block lowering operator into one with
/// standard √k weights, regardless of the underlying α, β.
///
/// The two defining branches overlap at p = 0, so the construction is only
/// consistent when α_1 = β_0; construction fails otherwise.
#[derive(Clone, Debug)]
pub struct Rescaler {
    coeffs: LadderCoefficients,
}

impl Rescaler {
    pub fn from_coefficients(c: &LadderCoefficients) -> Result<Self> {
        let alpha1 = c.alpha(1);
        let beta0 = c.beta(0);
        let scale = alpha1.abs().max(beta0.abs());
        if (alpha1 - beta0).abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::RescalerConstraint { alpha1, beta0 });
        }
        Ok(Self { coeffs: c.clone() })
    }

    /// Diagonal weight at φ_p: √(p+1)/α_{p+1} for p ≥ 0, √(1-p)/β_p for
    /// p < 0 (the p = 0 overlap is resolved by the construction constraint).
    pub fn weight(&self, p: i64) -> Result<f64> {
        if p >= 0 {
            let alpha = self.coeffs.alpha(p + 1);
            if alpha == 0.0 {
                return Err(Error::ZeroCoefficient {
                    name: "alpha",
                    index: p + 1,
                });
            }
            Ok(((p + 1) as f64).sqrt() / alpha)
        } else {
            let beta = self.coeffs.beta(p);
            if beta == 0.0 {
                return Err(Error::ZeroCoefficient {
                    name: "beta",
                    index: p,
                });
            }
            Ok(((1 - p) as f64).sqrt() / beta)
        }
    }

    pub fn apply(&self, v: &TruncatedVector) -> Result<TruncatedVector> {
        let mut out = TruncatedVector::zeros(v.window());
        for p in v.window().iter() {
            let amp = v.get(p);
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            out.set(p, amp * self.weight(p)?)?;
        }
        Ok(out)
    }
}

/// The rescaled block lowering operator diag(R Q_{-1} a, R Q_{+1} b); on the
/// Φ family it acts with weights √k independently of α and β.
pub fn apply_rescaled_lowering(c: &LadderCoefficients, f: &DoubledVector) -> Result<DoubledImage> {
    let rescaler = Rescaler::from_coefficients(c)?;
    let raw = apply_block_lowering(c, f);
    Ok(DoubledImage {
        vector: DoubledVector {
            upper: rescaler.apply(&raw.vector.upper)?,
            lower: rescaler.apply(&raw.vector.lower)?,
        },
        upper_boundary: raw.upper_boundary,
        lower_boundary: raw.lower_boundary,
    })
}
