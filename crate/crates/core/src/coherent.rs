//! Coherent states on the doubled space and their verification machinery.
//!
//! For a lowering weight sequence θ the states are
//!
//! ```text
//! Φ(z) = N(|z|) Σ_k z^k/θ_k! Φ_k,       N(r) = (Σ_k r^{2k}/(θ_k!)²)^{-1/2}
//! ```
//!
//! defined on the disk |z| < ρ with ρ the limit of the θ sequence (or the
//! whole plane when θ grows without bound). This module estimates ρ, sums
//! the normalization series with a certified tail bound, builds truncated
//! states, and verifies the three classic coherent-state properties:
//! the eigenvalue equation, the uncertainty product, and — through a radial
//! measure matching the moments 2π ∫ r^{2k} dλ = (θ_k!)² — the resolution
//! of the identity.
//!
//! θ-factorials are handled in sign/log form throughout; weight sequences
//! that grow like the spectrum itself overflow (θ_k!)² long before the
//! states become uninteresting.
//!
//! Summation order is fixed (ascending k, compensated), so every result is
//! reproducible bit-for-bit regardless of how callers parallelize around
//! this module.

use std::sync::Arc;

use num_complex::Complex64;

use crate::doubled::{PhiVector, ThetaSequence};
use crate::error::{Error, Result};
use crate::quad::{AngularGrid, GaussLegendre};
use crate::util::KahanSum;

/// Probe depth used when an operation needs a convergence radius and the
/// caller did not estimate one explicitly.
pub const DEFAULT_RADIUS_PROBE: usize = 64;

/// Relative growth over the probe tail above which the θ sequence is
/// declared divergent.
const RADIUS_GROWTH_TOL: f64 = 0.01;

const TERM_CAP: usize = 200_000;
const DIVERGENCE_RUN: usize = 64;

/// Convergence radius of the coherent-state series.
///
/// Unbounded radii are an explicit variant, never a large float: disk
/// membership must be an exact decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Finite(f64),
    Unbounded,
}

impl Radius {
    pub fn contains(&self, abs_z: f64) -> bool {
        match self {
            Radius::Finite(rho) => abs_z < *rho,
            Radius::Unbounded => true,
        }
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self {
            Radius::Finite(rho) => Some(*rho),
            Radius::Unbounded => None,
        }
    }
}

/// Radius estimate together with a flag recording whether the probe tail was
/// monotone; non-monotone tails make the tail average unreliable.
#[derive(Clone, Copy, Debug)]
pub struct RadiusEstimate {
    pub radius: Radius,
    pub monotone_tail: bool,
}

/// Estimates lim |θ_k| from the last quarter of a finite probe.
///
/// The sequence is declared unbounded when the tail is nondecreasing and
/// still growing by more than [`RADIUS_GROWTH_TOL`] relative over the probed
/// stretch; otherwise the tail average is reported.
pub fn radius_of_convergence(t: &ThetaSequence, k_probe: usize) -> Result<RadiusEstimate> {
    if k_probe < 8 {
        return Err(Error::InvalidParameter(
            "radius probe needs k_probe >= 8".into(),
        ));
    }
    let thetas: Vec<f64> = (1..=k_probe).map(|k| t.theta(k).abs()).collect();
    let tail_len = (k_probe / 4).max(2);
    let tail = &thetas[k_probe - tail_len..];
    let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0]);
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let first = tail[0];
    let last = tail[tail_len - 1];
    let growth = last - first;
    if nondecreasing && growth > 0.0 && growth > RADIUS_GROWTH_TOL * last.abs() {
        return Ok(RadiusEstimate {
            radius: Radius::Unbounded,
            monotone_tail: true,
        });
    }
    let mut acc = KahanSum::new();
    for v in tail {
        acc.add(*v);
    }
    Ok(RadiusEstimate {
        radius: Radius::Finite(acc.value() / tail_len as f64),
        monotone_tail: nondecreasing || nonincreasing,
    })
}

/// One scan of the series Σ_k r^{2k}/(θ_k!)²: kept terms, their compensated
/// sum, and a geometric bound on everything dropped.
struct SeriesScan {
    terms: Vec<f64>,
    sum: f64,
    tail_bound: f64,
}

/// Sums the normalization series until the certified remaining tail drops
/// below `rel_tail_tol` relative to the partial sum.
///
/// The geometric tail bound uses the term ratio r²/θ_{k+1}² and is only
/// applied at a locally nondecreasing step of θ; it is a true bound whenever
/// θ keeps growing past that point, which holds for every weight family
/// built here. Sequences that keep dipping simply accumulate further, and
/// ones that never settle hit the term cap as a hard error.
fn scan_series(t: &ThetaSequence, r: f64, rel_tail_tol: f64) -> Result<SeriesScan> {
    let mut terms = vec![1.0];
    if r == 0.0 {
        return Ok(SeriesScan {
            terms,
            sum: 1.0,
            tail_bound: 0.0,
        });
    }
    let ln_r2 = 2.0 * r.ln();
    let mut sum = KahanSum::new();
    sum.add(1.0);
    let mut ln_fact = KahanSum::new();
    let mut nongrowing_run = 0usize;
    let mut prev_term = 1.0f64;
    for k in 0..TERM_CAP {
        let theta_next = t.theta(k + 1).abs();
        if theta_next == 0.0 {
            return Err(Error::ZeroCoefficient {
                name: "theta",
                index: (k + 1) as i64,
            });
        }
        let ratio = (r / theta_next) * (r / theta_next);
        if ratio < 1.0 && theta_next >= t.theta(k).abs() {
            let tail_bound = prev_term * ratio / (1.0 - ratio);
            if tail_bound <= rel_tail_tol * sum.value() {
                return Ok(SeriesScan {
                    terms,
                    sum: sum.value(),
                    tail_bound,
                });
            }
        }
        // Terms can only keep growing forever if θ has stopped growing; a
        // rising θ eventually pushes the ratio below one however large r is.
        if ratio >= 1.0 && theta_next <= t.theta(k).abs() {
            nongrowing_run += 1;
            if nongrowing_run >= DIVERGENCE_RUN {
                return Err(Error::Divergent { r });
            }
        } else {
            nongrowing_run = 0;
        }
        ln_fact.add(theta_next.ln());
        let term = ((k + 1) as f64 * ln_r2 - 2.0 * ln_fact.value()).exp();
        terms.push(term);
        sum.add(term);
        prev_term = term;
    }
    Err(Error::NonConvergent { terms: TERM_CAP })
}

fn check_disk(t: &ThetaSequence, abs_z: f64) -> Result<()> {
    let est = radius_of_convergence(t, DEFAULT_RADIUS_PROBE)?;
    match est.radius {
        Radius::Finite(rho) if abs_z >= rho => Err(Error::OutsideDisk { abs_z, radius: rho }),
        _ => Ok(()),
    }
}

/// N(r) = (Σ_k r^{2k}/(θ_k!)²)^{-1/2}, summed until the certified tail is
/// below `tol` relative to the partial sum.
pub fn normalization(t: &ThetaSequence, r: f64, tol: f64) -> Result<f64> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(
            "normalization takes a nonnegative finite radius".into(),
        ));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    check_disk(t, r)?;
    let scan = scan_series(t, r, tol)?;
    Ok(1.0 / scan.sum.sqrt())
}

/// A coherent state truncated at an adaptively chosen order K, with the
/// dropped squared mass certified by `tail_bound`.
#[derive(Clone, Debug)]
pub struct CoherentState {
    z: Complex64,
    normalization: f64,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl CoherentState {
    /// Builds Φ(z) with coefficients N(|z|) z^k/θ_k!, keeping terms until
    /// the dropped squared mass falls below `tol`.
    ///
    /// The stored normalization is the truncated-series value; it differs
    /// from the full N(|z|) by O(tail_bound).
    pub fn build(t: &ThetaSequence, z: Complex64, tol: f64) -> Result<Self> {
        if tol <= 0.0 {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidParameter("label must be finite".into()));
        }
        let r = z.norm();
        check_disk(t, r)?;
        let scan = scan_series(t, r, tol)?;
        let norm_const = 1.0 / scan.sum.sqrt();
        let k_top = scan.terms.len() - 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k_top + 1];
        coeffs[0] = Complex64::new(norm_const, 0.0);
        if r > 0.0 {
            let ln_n = norm_const.ln();
            let ln_r = r.ln();
            let phase_step = z.arg();
            let mut ln_fact = KahanSum::new();
            let mut sign = 1.0;
            for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
                let theta_k = t.theta(k);
                ln_fact.add(theta_k.abs().ln());
                if theta_k < 0.0 {
                    sign = -sign;
                }
                let magnitude = (ln_n + k as f64 * ln_r - ln_fact.value()).exp();
                let phase = phase_step * k as f64;
                *slot = Complex64::new(phase.cos(), phase.sin()) * (sign * magnitude);
            }
        }
        Ok(Self {
            z,
            normalization: norm_const,
            coeffs,
            tail_bound: scan.tail_bound / scan.sum,
        })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Bound on the squared mass dropped above the truncation order.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn phi_vector(&self) -> PhiVector {
        PhiVector::from_coeffs(self.coeffs.clone())
    }

    pub fn norm_sq(&self) -> f64 {
        let mut acc = KahanSum::new();
        for c in &self.coeffs {
            acc.add(c.norm_sqr());
        }
        acc.value()
    }

    /// ‖A Φ(z) - z Φ(z)‖ / ‖Φ(z)‖ at the stored truncation. For an exact
    /// state this vanishes; the truncated value is dominated by the top
    /// coefficient, of order |z|·√tail_bound.
    pub fn eigen_residual(&self, t: &ThetaSequence) -> f64 {
        let v = self.phi_vector();
        let lowered = t.lower(&v);
        let diff = lowered.add_scaled(&v, -self.z);
        diff.norm() / v.norm()
    }
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Point mass of a radial measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Upper end of the support of a radial density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Bounded(f64),
    Unbounded,
}

/// A candidate measure dλ(r) on the radial half-line, either a density or a
/// finite list of atoms. Verification routines test it against the moment
/// targets (θ_k!)².
#[derive(Clone)]
pub enum RadialMeasure {
    Density { density: DensityFn, support: Support },
    Atomic { atoms: Vec<Atom> },
}

impl RadialMeasure {
    pub fn from_density<F>(density: F, support: Support) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Support::Bounded(hi) = support {
            if hi.is_nan() || hi <= 0.0 || !hi.is_finite() {
                return Err(Error::InvalidParameter(
                    "bounded support needs a positive finite endpoint".into(),
                ));
            }
        }
        Ok(Self::Density {
            density: Arc::new(density),
            support,
        })
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter(
                "atomic measure needs at least one atom".into(),
            ));
        }
        for a in &atoms {
            if a.location.is_nan() || a.location < 0.0 || !a.location.is_finite() {
                return Err(Error::InvalidParameter(
                    "atom locations must be nonnegative and finite".into(),
                ));
            }
            if a.mass.is_nan() || a.mass < 0.0 || !a.mass.is_finite() {
                return Err(Error::InvalidParameter(
                    "atom masses must be nonnegative and finite".into(),
                ));
            }
        }
        Ok(Self::Atomic { atoms })
    }

    /// dλ(r) = (1/π) r e^{-r²} dr. Its scaled moments 2π ∫ r^{2k} dλ equal
    /// k!, the factorial targets of the standard √k weight sequence.
    pub fn gaussian() -> Self {
        Self::Density {
            density: Arc::new(|r: f64| r * (-r * r).exp() / std::f64::consts::PI),
            support: Support::Unbounded,
        }
    }

    /// The single atom at r = 1 with mass 1/(2π); every scaled moment is
    /// exactly 1, matching a constant weight sequence.
    pub fn unit_boundary_atom() -> Self {
        Self::Atomic {
            atoms: vec![Atom {
                location: 1.0,
                mass: 1.0 / std::f64::consts::TAU,
            }],
        }
    }

    /// Piecewise-linear density through `(r, value)` samples; zero outside
    /// the sampled range. Radii must be strictly increasing and nonnegative,
    /// values nonnegative.
    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "piecewise-linear density needs at least two samples".into(),
            ));
        }
        for (i, (r, v)) in points.iter().enumerate() {
            if !r.is_finite() || *r < 0.0 || !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "invalid density sample ({r}, {v})"
                )));
            }
            if i > 0 && points[i - 1].0 >= *r {
                return Err(Error::InvalidParameter(
                    "density sample radii must be strictly increasing".into(),
                ));
            }
        }
        let hi = points.last().expect("nonempty").0;
        let eval = move |r: f64| -> f64 {
            if r < points[0].0 || r > points[points.len() - 1].0 {
                return 0.0;
            }
            let idx = points.partition_point(|(x, _)| *x <= r);
            if idx == 0 {
                return points[0].1;
            }
            if idx >= points.len() {
                return points[points.len() - 1].1;
            }
            let (x0, y0) = points[idx - 1];
            let (x1, y1) = points[idx];
            y0 + (y1 - y0) * (r - x0) / (x1 - x0)
        };
        Self::from_density(eval, Support::Bounded(hi))
    }

    /// Largest radius carrying mass, when finite.
    pub fn support_hi(&self) -> Option<f64> {
        match self {
            Self::Density {
                support: Support::Bounded(hi),
                ..
            } => Some(*hi),
            Self::Density {
                support: Support::Unbounded,
                ..
            } => None,
            Self::Atomic { atoms } => atoms
                .iter()
                .map(|a| a.location)
                .fold(None, |acc: Option<f64>, x| {
                    Some(acc.map_or(x, |m| m.max(x)))
                }),
        }
    }
}

impl std::fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Density { support, .. } => f
                .debug_struct("RadialMeasure::Density")
                .field("support", support)
                .finish(),
            Self::Atomic { atoms } => f
                .debug_struct("RadialMeasure::Atomic")
                .field("atoms", atoms)
                .finish(),
        }
    }
}

/// The unique single-atom measure matching the k = 0 and k = 1 moment
/// targets: location √((θ_1!)²/(θ_0!)²) = |θ_1|, mass 1/(2π).
///
/// For a constant weight sequence this atom matches every moment, but it
/// sits exactly on the convergence-disk boundary — which is what the
/// support flag of [`moment_check`] reports.
pub fn unique_single_atom(t: &ThetaSequence) -> Atom {
    Atom {
        location: t.theta(1).abs(),
        mass: 1.0 / std::f64::consts::TAU,
    }
}

/// Quadrature controls for the measure-verification routines.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Radial Gauss-Legendre node count (doubled internally for the
    /// stability cross-check).
    pub radial_nodes: usize,
    /// Explicit truncation radius; `None` selects the support endpoint or,
    /// for unbounded densities, doubles the radius until the heaviest moment
    /// stabilizes to 1e-13 relative.
    pub r_max: Option<f64>,
    /// Angular node count; `None` selects the smallest exact order.
    pub angular_order: Option<usize>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 200,
            r_max: None,
            angular_order: None,
        }
    }
}

fn truncation_radius(density: &DensityFn, power: usize) -> Result<f64> {
    let gl = GaussLegendre::new(128)?;
    let raw = |r_hi: f64| {
        gl.integrate(0.0, r_hi, |r| {
            let d = density(r);
            if d <= 0.0 || r <= 0.0 {
                return if power == 0 { d.max(0.0) } else { 0.0 };
            }
            (power as f64 * r.ln() + d.ln()).exp()
        })
    };
    let mut r_hi = 2.0;
    let mut prev = raw(r_hi);
    for _ in 0..24 {
        let next = raw(2.0 * r_hi);
        let scale = next.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
        if (next - prev).abs() <= 1e-13 * scale {
            return Ok(2.0 * r_hi);
        }
        prev = next;
        r_hi *= 2.0;
    }
    Err(Error::InvalidParameter(
        "density tail does not decay; supply an explicit r_max".into(),
    ))
}

fn effective_radius(m: &RadialMeasure, heaviest_power: usize, spec: &QuadratureSpec) -> Result<f64> {
    if let Some(user) = spec.r_max {
        if user.is_nan() || user <= 0.0 || !user.is_finite() {
            return Err(Error::InvalidParameter(
                "r_max must be positive and finite".into(),
            ));
        }
        return Ok(user);
    }
    match m {
        RadialMeasure::Atomic { .. } => Ok(0.0), // unused for atoms
        RadialMeasure::Density {
            support: Support::Bounded(hi),
            ..
        } => Ok(*hi),
        RadialMeasure::Density {
            density,
            support: Support::Unbounded,
        } => truncation_radius(density, heaviest_power),
    }
}

/// ∫ exp(power·ln r - ln_scale) dλ(r), with the scale applied inside the
/// integrand so growing factorial targets never overflow.
fn scaled_radial_integral(
    m: &RadialMeasure,
    power: usize,
    ln_scale: f64,
    gl: &GaussLegendre,
    r_hi: f64,
) -> f64 {
    match m {
        RadialMeasure::Density { density, .. } => gl.integrate(0.0, r_hi, |r| {
            let d = density(r);
            if d <= 0.0 {
                return 0.0;
            }
            let ln_pow = if power == 0 {
                0.0
            } else if r <= 0.0 {
                return 0.0;
            } else {
                power as f64 * r.ln()
            };
            (ln_pow - ln_scale + d.ln()).exp()
        }),
        RadialMeasure::Atomic { atoms } => {
            let mut acc = KahanSum::new();
            for a in atoms {
                if a.mass == 0.0 {
                    continue;
                }
                let ln_pow = if power == 0 {
                    0.0
                } else if a.location <= 0.0 {
                    continue;
                } else {
                    power as f64 * a.location.ln()
                };
                acc.add(a.mass * (ln_pow - ln_scale).exp());
            }
            acc.value()
        }
    }
}

/// One verified moment: the quadrature value of 2π ∫ r^{2k} dλ against the
/// target (θ_k!)², with linear values accompanied by their logs because the
/// targets overflow for fast-growing weights.
#[derive(Clone, Copy, Debug)]
pub struct MomentRow {
    pub k: usize,
    pub integral: f64,
    pub target: f64,
    pub log_integral: f64,
    pub log_target: f64,
    /// |2π∫r^{2k}dλ - (θ_k!)²| / max(1, (θ_k!)²)
    pub residual: f64,
}

/// Moment verification summary for one measure against one θ sequence.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub max_residual: f64,
    /// Max residual recomputed with twice the radial nodes.
    pub doubled_max_residual: f64,
    /// Largest movement of any residual under node doubling.
    pub disagreement: f64,
    /// Set when the measure carries mass on or beyond the convergence-disk
    /// boundary of the θ sequence.
    pub support_on_boundary: bool,
    /// Radial truncation actually used for a density (absent for atoms).
    pub truncation_radius: Option<f64>,
    pub radial_nodes: usize,
}

fn residuals_for_grid(
    t: &ThetaSequence,
    m: &RadialMeasure,
    k_max: usize,
    gl: &GaussLegendre,
    r_hi: f64,
) -> Vec<MomentRow> {
    (0..=k_max)
        .map(|k| {
            let log_target = 2.0 * t.log_abs_factorial(k);
            let target = log_target.exp();
            let scaled = scaled_radial_integral(m, 2 * k, log_target, gl, r_hi);
            let rel = (std::f64::consts::TAU * scaled - 1.0).abs();
            let residual = rel * target.min(1.0);
            let log_integral = if scaled > 0.0 {
                std::f64::consts::TAU.ln() + scaled.ln() + log_target
            } else {
                f64::NEG_INFINITY
            };
            MomentRow {
                k,
                integral: log_integral.exp(),
                target,
                log_integral,
                log_target,
                residual,
            }
        })
        .collect()
}

/// Verifies the moment condition 2π ∫ r^{2k} dλ = (θ_k!)² for 0 ≤ k ≤ k_max.
///
/// Every integral is recomputed with doubled radial nodes; a disagreement
/// above 1e-6 is reported as an under-resolution error rather than silently
/// returned.
pub fn moment_check(
    t: &ThetaSequence,
    m: &RadialMeasure,
    k_max: usize,
    spec: &QuadratureSpec,
) -> Result<MomentReport> {
    if spec.radial_nodes < 2 {
        return Err(Error::InvalidParameter(
            "moment check needs at least two radial nodes".into(),
        ));
    }
    let r_hi = effective_radius(m, 2 * k_max, spec)?;
    let base = GaussLegendre::new(spec.radial_nodes)?;
    let fine = GaussLegendre::new(2 * spec.radial_nodes)?;
    let rows = residuals_for_grid(t, m, k_max, &base, r_hi);
    let rows_fine = residuals_for_grid(t, m, k_max, &fine, r_hi);
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let doubled_max_residual = rows_fine.iter().map(|r| r.residual).fold(0.0, f64::max);
    let disagreement = rows
        .iter()
        .zip(&rows_fine)
        .map(|(a, b)| (a.residual - b.residual).abs())
        .fold(0.0, f64::max);
    if disagreement > 1e-6 {
        return Err(Error::UnderResolved { disagreement });
    }
    let est = radius_of_convergence(t, DEFAULT_RADIUS_PROBE.max(k_max))?;
    let support_on_boundary = match est.radius {
        Radius::Unbounded => false,
        Radius::Finite(rho) => match m.support_hi() {
            None => true,
            Some(hi) => hi >= rho - 1e-12,
        },
    };
    let truncation_radius = match m {
        RadialMeasure::Atomic { .. } => None,
        RadialMeasure::Density { .. } => Some(r_hi),
    };
    Ok(MomentReport {
        rows,
        max_residual,
        doubled_max_residual,
        disagreement,
        support_on_boundary,
        truncation_radius,
        radial_nodes: spec.radial_nodes,
    })
}

/// One entry of the resolution-of-identity residual matrix.
#[derive(Clone, Copy, Debug)]
pub struct ResolutionEntry {
    pub p: usize,
    pub q: usize,
    pub value: Complex64,
}

/// Resolution residuals for all 0 ≤ p, q ≤ pq_max.
#[derive(Clone, Debug)]
pub struct ResolutionReport {
    pub pq_max: usize,
    pub entries: Vec<ResolutionEntry>,
    pub max_abs: f64,
    pub angular_order: usize,
    pub truncation_radius: Option<f64>,
}

fn resolution_entry(
    t: &ThetaSequence,
    m: &RadialMeasure,
    p: usize,
    q: usize,
    gl: &GaussLegendre,
    r_hi: f64,
    angular: &AngularGrid,
) -> Complex64 {
    let ln_scale = t.log_abs_factorial(p) + t.log_abs_factorial(q);
    let sign = t.factorial_sign(p) * t.factorial_sign(q);
    let radial = scaled_radial_integral(m, p + q, ln_scale, gl, r_hi) * sign;
    let angular_part = angular.circular_moment(p as i64 - q as i64);
    let delta = if p == q { 1.0 } else { 0.0 };
    angular_part * radial - Complex64::new(delta, 0.0)
}

/// ∫ dν ⟨Φ_p, Φ(z)⟩⟨Φ(z), Φ_q⟩ - δ_pq with dν = N(|z|)^{-2} dλ(r) dθ.
///
/// The normalization in the coefficients cancels the N^{-2} of the measure
/// identically, leaving the radial moment of dλ scaled by the θ-factorials
/// and the discrete circular moment of order p - q, which the equispaced
/// grid reproduces exactly below its aliasing order.
pub fn resolution_residual(
    t: &ThetaSequence,
    m: &RadialMeasure,
    p: usize,
    q: usize,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let report = resolution_grid_inner(t, m, p.max(q), spec, Some((p, q)))?;
    Ok(report.entries[0].value)
}

/// Full residual matrix for p, q ≤ pq_max.
pub fn resolution_grid(
    t: &ThetaSequence,
    m: &RadialMeasure,
    pq_max: usize,
    spec: &QuadratureSpec,
) -> Result<ResolutionReport> {
    resolution_grid_inner(t, m, pq_max, spec, None)
}

fn resolution_grid_inner(
    t: &ThetaSequence,
    m: &RadialMeasure,
    pq_max: usize,
    spec: &QuadratureSpec,
    single: Option<(usize, usize)>,
) -> Result<ResolutionReport> {
    if spec.radial_nodes < 2 {
        return Err(Error::InvalidParameter(
            "resolution check needs at least two radial nodes".into(),
        ));
    }
    let min_order = 2 * pq_max + 1;
    let order = match spec.angular_order {
        None => 2 * pq_max + 3,
        Some(m_user) => {
            if m_user < min_order {
                return Err(Error::InvalidParameter(format!(
                    "angular order {m_user} aliases moments up to {pq_max}; need at least {min_order}"
                )));
            }
            m_user
        }
    };
    let angular = AngularGrid::new(order)?;
    let r_hi = effective_radius(m, 2 * pq_max, spec)?;
    let base = GaussLegendre::new(spec.radial_nodes)?;
    let fine = GaussLegendre::new(2 * spec.radial_nodes)?;
    let pairs: Vec<(usize, usize)> = match single {
        Some((p, q)) => vec![(p, q)],
        None => (0..=pq_max)
            .flat_map(|p| (0..=pq_max).map(move |q| (p, q)))
            .collect(),
    };
    let mut entries = Vec::with_capacity(pairs.len());
    let mut max_abs: f64 = 0.0;
    let mut disagreement: f64 = 0.0;
    for (p, q) in pairs {
        let value = resolution_entry(t, m, p, q, &base, r_hi, &angular);
        let value_fine = resolution_entry(t, m, p, q, &fine, r_hi, &angular);
        disagreement = disagreement.max((value - value_fine).norm());
        max_abs = max_abs.max(value.norm());
        entries.push(ResolutionEntry { p, q, value });
    }
    if disagreement > 1e-6 {
        return Err(Error::UnderResolved { disagreement });
    }
    let truncation_radius = match m {
        RadialMeasure::Atomic { .. } => None,
        RadialMeasure::Density { .. } => Some(r_hi),
    };
    Ok(ResolutionReport {
        pq_max,
        entries,
        max_abs,
        angular_order: order,
        truncation_radius,
    })
}

/// The three routes to the uncertainty product on Φ(z):
/// operator moments, the closed form ½(‖A†Φ‖² - |z|²), and the lower bound
/// ½|⟨[X, P]⟩| that a saturating state must attain.
#[derive(Clone, Copy, Debug)]
pub struct UncertaintyProduct {
    pub direct: f64,
    pub closed_form: f64,
    pub commutator_bound: f64,
}

/// Computes ΔX·ΔP on Φ(z) for X = (A + A†)/√2, P = (A - A†)/(√2 i).
///
/// All expectations are taken on the truncated state and normalized by its
/// stored mass, so the three reported numbers agree up to O(tail) — not
/// merely up to the eigenvalue property, which `direct` never assumes.
pub fn uncertainty_product(
    t: &ThetaSequence,
    z: Complex64,
    tol: f64,
) -> Result<UncertaintyProduct> {
    let state = CoherentState::build(t, z, tol)?;
    let v = state.phi_vector();
    let mass = v.norm_sq();
    let lowered = t.lower(&v);
    let raised = t.raise(&v);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let x_v = lowered
        .add_scaled(&raised, Complex64::new(1.0, 0.0))
        .scaled(inv_sqrt2);
    let p_v = lowered
        .add_scaled(&raised, Complex64::new(-1.0, 0.0))
        .scaled(Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2));
    let mean_x = v.inner(&x_v).re / mass;
    let mean_p = v.inner(&p_v).re / mass;
    let var_x = (x_v.norm_sq() / mass - mean_x * mean_x).max(0.0);
    let var_p = (p_v.norm_sq() / mass - mean_p * mean_p).max(0.0);
    let direct = (var_x * var_p).sqrt();
    let closed_form = 0.5 * (raised.norm_sq() / mass - z.norm_sqr());
    let mut comm = KahanSum::new();
    for k in 0..=v.trunc_order() {
        comm.add(t.commutator_diag(k) * v.get(k).norm_sqr());
    }
    let commutator_bound = 0.5 * (comm.value() / mass).abs();
    Ok(UncertaintyProduct {
        direct,
        closed_form,
        commutator_bound,
    })
}

/// Whether Φ(z) attains the commutator lower bound, i.e. saturates the
/// uncertainty relation, to 1e-8 absolute.
pub fn saturation_check(t: &ThetaSequence, z: Complex64) -> Result<bool> {
    let product = uncertainty_product(t, z, 1e-14)?;
    Ok((product.direct - product.commutator_bound).abs() <= 1e-8)
}
