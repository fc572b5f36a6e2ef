//! Bi-infinite real eigenvalue sequences and the two constructions that
//! modify them while keeping every eigenvector: a global shift and a finite
//! rank-one deformation.
//!
//! A [`Spectrum`] is a pure function from the integer index `p` to the energy
//! ε_p. Nothing is materialized: arbitrarily large windows cost only the
//! evaluations actually requested. Shift offsets and deformation deltas are
//! stored explicitly (not folded into closures), so composing a shift with
//! its inverse restores the original evaluation path bit-for-bit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Closed index range [lo, hi] on which bi-infinite objects are materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexWindow {
    lo: i64,
    hi: i64,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Windows are never empty: construction enforces lo ≤ hi.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: i64) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// Position of `p` relative to `lo`, for indexing into window-sized arrays.
    pub fn offset_of(&self, p: i64) -> Result<usize> {
        if !self.contains(p) {
            return Err(Error::WindowTooSmall { index: p });
        }
        Ok((p - self.lo) as usize)
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite set of indices together with nonzero energy offsets δ_j.
#[derive(Clone, Debug, Default)]
pub struct Deformation {
    deltas: BTreeMap<i64, f64>,
}

impl Deformation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, index: i64, delta: f64) -> Result<Self> {
        if delta == 0.0 || !delta.is_finite() {
            return Err(Error::InvalidDeformation { index });
        }
        self.deltas.insert(index, delta);
        Ok(self)
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, f64)>>(pairs: I) -> Result<Self> {
        let mut d = Self::new();
        for (index, delta) in pairs {
            d = d.with(index, delta)?;
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.deltas.keys().copied()
    }

    pub fn delta(&self, index: i64) -> Option<f64> {
        self.deltas.get(&index).copied()
    }
}

type EvalFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

/// A real eigenvalue sequence over p ∈ ℤ.
///
/// The strict-increase contract is not enforced at construction; deformed
/// spectra may violate it, and [`Spectrum::strictly_increasing_nonzero_on`]
/// is the detector. `monotone_hint` records the builder's claim only.
#[derive(Clone)]
pub struct Spectrum {
    base: EvalFn,
    offset: f64,
    tweaks: BTreeMap<i64, f64>,
    label: String,
    monotone_hint: bool,
}

impl Spectrum {
    /// Wraps an evaluation rule claimed to be strictly increasing.
    pub fn from_fn<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(i64) -> f64 + Send + Sync + 'static,
    {
        Self {
            base: Arc::new(eval),
            offset: 0.0,
            tweaks: BTreeMap::new(),
            label: label.into(),
            monotone_hint: true,
        }
    }

    pub fn without_monotone_hint(mut self) -> Self {
        self.monotone_hint = false;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_flagged_monotone(&self) -> bool {
        self.monotone_hint
    }

    /// ε_p. Evaluation order is fixed: base, then shift, then deformation.
    pub fn eval(&self, p: i64) -> f64 {
        let mut v = (self.base)(p) + self.offset;
        if let Some(delta) = self.tweaks.get(&p) {
            v += delta;
        }
        v
    }

    /// The spectrum shifted by γ: same eigenvectors, ε_p + γ.
    ///
    /// Offsets accumulate additively, so `shifted(g).shifted(-g)` carries an
    /// offset of exactly zero and evaluates identically to `self`.
    pub fn shifted(&self, gamma: f64) -> Spectrum {
        let mut out = self.clone();
        out.offset += gamma;
        out
    }

    /// Adds δ_j at each index of the deformation, leaving all other values
    /// untouched. The result is no longer flagged monotone.
    pub fn deformed(&self, d: &Deformation) -> Spectrum {
        let mut out = self.clone();
        for q in d.indices() {
            let delta = d.delta(q).expect("index comes from the map");
            let slot = out.tweaks.entry(q).or_insert(0.0);
            *slot += delta;
            if *slot == 0.0 {
                out.tweaks.remove(&q);
            }
        }
        out.monotone_hint = false;
        out
    }

    /// True iff the sequence is strictly increasing and nowhere zero on the
    /// window. This is the detector for broken factorizability.
    pub fn strictly_increasing_nonzero_on(&self, w: IndexWindow) -> bool {
        let mut prev = None;
        for p in w.iter() {
            let v = self.eval(p);
            if v == 0.0 || !v.is_finite() {
                return false;
            }
            if let Some(q) = prev {
                if v <= q {
                    return false;
                }
            }
            prev = Some(v);
        }
        true
    }
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectrum")
            .field("label", &self.label)
            .field("offset", &self.offset)
            .field("tweaks", &self.tweaks)
            .field("monotone_hint", &self.monotone_hint)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear() -> Spectrum {
        Spectrum::from_fn("linear", |p| p as f64 + 0.5)
    }

    #[test]
    fn window_rejects_inverted_bounds() {
        assert!(matches!(
            IndexWindow::new(3, -3),
            Err(Error::InvalidWindow { lo: 3, hi: -3 })
        ));
        let w = IndexWindow::new(-3, 3).unwrap();
        assert_eq!(w.len(), 7);
        assert!(w.contains(0));
        assert!(!w.contains(4));
    }

    #[test]
    fn zero_shift_is_identity() {
        let s = linear();
        let shifted = s.shifted(0.0);
        for p in -8..=8 {
            assert_eq!(s.eval(p), shifted.eval(p));
        }
    }

    #[test]
    fn shift_roundtrip_is_bitwise_exact() {
        let s = linear();
        let back = s.shifted(0.7531).shifted(-0.7531);
        for p in -64..=64 {
            assert_eq!(s.eval(p).to_bits(), back.eval(p).to_bits());
        }
    }

    #[test]
    fn shift_clears_a_zero_eigenvalue() {
        // ε_0 = 0; γ = max(ε_{-1}, ε_1)/2 makes every value nonzero.
        let s = Spectrum::from_fn("through-zero", |p| p as f64);
        assert_eq!(s.eval(0), 0.0);
        let gamma = 0.5 * s.eval(-1).max(s.eval(1));
        let t = s.shifted(gamma);
        let w = IndexWindow::new(-16, 16).unwrap();
        assert!(t.eval(0) != 0.0);
        assert!(t.strictly_increasing_nonzero_on(w));
    }

    #[test]
    fn empty_deformation_changes_nothing() {
        let s = linear();
        let t = s.deformed(&Deformation::new());
        for p in -8..=8 {
            assert_eq!(s.eval(p).to_bits(), t.eval(p).to_bits());
        }
        assert!(!t.is_flagged_monotone());
    }

    #[test]
    fn deformation_moves_exactly_its_indices() {
        let s = linear();
        let d = Deformation::from_pairs([(2, 0.5), (-1, -0.25)]).unwrap();
        let t = s.deformed(&d);
        let w = IndexWindow::new(-8, 8).unwrap();
        let changed: Vec<i64> = w.iter().filter(|&p| t.eval(p) != s.eval(p)).collect();
        assert_eq!(changed, vec![-1, 2]);
        assert_eq!(t.eval(2), s.eval(2) + 0.5);
    }

    #[test]
    fn deformation_rejects_zero_delta() {
        assert!(matches!(
            Deformation::new().with(0, 0.0),
            Err(Error::InvalidDeformation { index: 0 })
        ));
    }

    #[test]
    fn constant_spectrum_fails_strictness() {
        let s = Spectrum::from_fn("flat", |_| 1.0);
        let w = IndexWindow::new(0, 2).unwrap();
        assert!(!s.strictly_increasing_nonzero_on(w));
    }

    #[test]
    fn zero_value_fails_the_detector() {
        let s = Spectrum::from_fn("through-zero", |p| p as f64);
        let w = IndexWindow::new(-2, 2).unwrap();
        assert!(!s.strictly_increasing_nonzero_on(w));
    }
}
