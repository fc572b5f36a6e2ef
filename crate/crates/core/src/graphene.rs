//! The graphene Dirac-point instantiation.
//!
//! In a constant magnetic field the Dirac-point block acts, inside one
//! degeneracy sector, as an off-diagonal combination of a single boson mode:
//! its levels are ±2c√n₂ with c = v_F/ξ, unbounded in both directions and
//! with a doubly-flat zero level. Shifting by c and relabelling the two
//! branches onto p ∈ ℤ gives the strictly increasing, nowhere-zero spectrum
//!
//! ```text
//! ε_p = c(1 + 2√p)   p ≥ 1,    ε_0 = c,    ε_p = c(1 - 2√(-p))   p ≤ -1,
//! ```
//!
//! which the three factorization choices below split as α_p β_p = ε_p while
//! staying compatible with the doubled-space construction (α_p = β_{1-p}).
//!
//! Everything abstract is cross-checked here against a dense, finite
//! Fock-space truncation of the block Hamiltonian, diagonalized numerically:
//! an oracle that knows nothing about ladder weights.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::LadderCoefficients;
use crate::spectra::Spectrum;

/// Physical scale and degeneracy label for one Dirac-point sector.
///
/// `c` is the single energy scale v_F/ξ; every formula is linear in it, so
/// one parameter rescales the whole construction. The degeneracy index n₁ is
/// carried as metadata only: all computations live in a fixed-n₁ sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrapheneParams {
    c: f64,
    n1: u32,
}

impl GrapheneParams {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_nan() || c <= 0.0 || !c.is_finite() {
            return Err(Error::InvalidParameter(
                "energy scale c = v_F/xi must be positive and finite".into(),
            ));
        }
        Ok(Self { c, n1: 0 })
    }

    pub fn with_degeneracy_label(mut self, n1: u32) -> Self {
        self.n1 = n1;
        self
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn degeneracy_label(&self) -> u32 {
        self.n1
    }
}

impl Default for GrapheneParams {
    fn default() -> Self {
        Self { c: 1.0, n1: 0 }
    }
}

/// Which Landau branch an energy belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandSign {
    Plus,
    Minus,
}

/// The unshifted Landau ladder folded onto p ∈ ℤ: ±2c√|p|, zero at p = 0.
/// Not factorizable as it stands — that is the point of the shift.
pub fn landau_spectrum(params: &GrapheneParams) -> Spectrum {
    let c = params.c;
    Spectrum::from_fn(format!("landau(c={c})"), move |p| {
        if p >= 0 {
            2.0 * c * (p as f64).sqrt()
        } else {
            -2.0 * c * ((-p) as f64).sqrt()
        }
    })
}

/// The shifted spectrum ε_p: strictly increasing and nowhere zero.
pub fn graphene_spectrum(params: &GrapheneParams) -> Spectrum {
    let c = params.c;
    Spectrum::from_fn(format!("graphene(c={c})"), move |p| {
        if p >= 1 {
            c * (1.0 + 2.0 * (p as f64).sqrt())
        } else if p == 0 {
            c
        } else {
            c * (1.0 - 2.0 * ((-p) as f64).sqrt())
        }
    })
}

/// Landau level energy E^± = ±2c√n₂ of the unshifted block.
pub fn landau_energy(params: &GrapheneParams, n2: u32, sign: BandSign) -> f64 {
    let magnitude = 2.0 * params.c * (n2 as f64).sqrt();
    match sign {
        BandSign::Plus => magnitude,
        BandSign::Minus => -magnitude,
    }
}

/// The three factorizations of the graphene spectrum. All satisfy
/// α_p β_p = ε_p and α_p = β_{1-p}; they differ in the lowering weights they
/// induce on the doubled space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    /// θ_k = 1: geometric states on the unit disk.
    FlatTheta,
    /// θ_k = ε_k: entire states, at the price of factorially exploding
    /// normalization targets.
    SpectralTheta,
    /// θ_k = √k: canonical commutation relations, standard states.
    BosonicTheta,
}

impl Choice {
    pub const ALL: [Choice; 3] = [Choice::FlatTheta, Choice::SpectralTheta, Choice::BosonicTheta];

    /// The public one-based index used on the command line.
    pub fn index(&self) -> u8 {
        match self {
            Choice::FlatTheta => 1,
            Choice::SpectralTheta => 2,
            Choice::BosonicTheta => 3,
        }
    }

    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Choice::FlatTheta),
            2 => Ok(Choice::SpectralTheta),
            3 => Ok(Choice::BosonicTheta),
            other => Err(Error::InvalidParameter(format!(
                "choice must be 1, 2 or 3, got {other}"
            ))),
        }
    }
}

impl std::fmt::Display for Choice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// The exact piecewise weight pair of the requested factorization.
pub fn coefficients_for_choice(params: &GrapheneParams, choice: Choice) -> LadderCoefficients {
    let c = params.c;
    let spectrum = graphene_spectrum(params);
    let label = format!("graphene-choice-{}(c={c})", choice.index());
    match choice {
        Choice::FlatTheta => LadderCoefficients::new(
            label,
            spectrum,
            move |p| {
                if p >= 1 {
                    1.0
                } else {
                    c * (1.0 - 2.0 * ((-p) as f64).sqrt())
                }
            },
            move |p| {
                if p >= 1 {
                    c * (1.0 + 2.0 * (p as f64).sqrt())
                } else {
                    1.0
                }
            },
        ),
        Choice::SpectralTheta => LadderCoefficients::new(
            label,
            spectrum,
            move |p| {
                if p >= 1 {
                    c * (1.0 + 2.0 * (p as f64).sqrt())
                } else {
                    (1.0 - 2.0 * ((-p) as f64).sqrt()) / (1.0 + 2.0 * ((1 - p) as f64).sqrt())
                }
            },
            move |p| {
                if p >= 1 {
                    1.0
                } else {
                    c * (1.0 + 2.0 * ((1 - p) as f64).sqrt())
                }
            },
        ),
        Choice::BosonicTheta => LadderCoefficients::new(
            label,
            spectrum,
            move |p| {
                if p >= 1 {
                    (p as f64).sqrt()
                } else {
                    c * (1.0 - 2.0 * ((-p) as f64).sqrt()) / ((1 - p) as f64).sqrt()
                }
            },
            move |p| {
                if p >= 1 {
                    c * (1.0 + 2.0 * (p as f64).sqrt()) / (p as f64).sqrt()
                } else {
                    ((1 - p) as f64).sqrt()
                }
            },
        ),
    }
}

/// Human-readable branch label for the index folding: positive p sits on the
/// upper Landau branch, negative p on the lower one.
pub fn map_phi_index(p: i64) -> String {
    if p >= 1 {
        format!("v⁺(n₂={p})")
    } else if p == 0 {
        "v(n₂=0)".to_string()
    } else {
        format!("v⁻(n₂={})", -p)
    }
}

/// Dense truncation of the Dirac-point block in one boson sector:
/// 2c · i [[0, A†],[-A, 0]] with A the standard (N+1)-level lowering matrix.
#[derive(Clone, Debug)]
pub struct FockBlockMatrix {
    boson_trunc: usize,
    matrix: DMatrix<Complex64>,
}

impl FockBlockMatrix {
    /// Builds the 2(N+1)-dimensional truncated block. Hermitian by
    /// construction: the two off-diagonal blocks are filled from the same
    /// real square roots.
    pub fn build(params: &GrapheneParams, boson_trunc: usize) -> Result<Self> {
        if boson_trunc < 2 {
            return Err(Error::InvalidParameter(
                "Fock truncation must be at least 2".into(),
            ));
        }
        let n = boson_trunc;
        let dim = 2 * (n + 1);
        let two_c = 2.0 * params.c;
        let mut matrix = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for j in 1..=n {
            let root = (j as f64).sqrt();
            // upper-right block: 2ic·A†, entry (j, j-1) of the block
            matrix[(j, (n + 1) + (j - 1))] = Complex64::new(0.0, two_c * root);
            // lower-left block: -2ic·A, entry (j-1, j) of the block
            matrix[((n + 1) + (j - 1), j)] = Complex64::new(0.0, -two_c * root);
        }
        Ok(Self {
            boson_trunc,
            matrix,
        })
    }

    pub fn boson_trunc(&self) -> usize {
        self.boson_trunc
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// max |H_ij - conj(H_ji)|; zero for this construction.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            t += self.matrix[(i, i)];
        }
        t
    }

    /// The other Dirac point is the transpose of this block; it shares the
    /// spectrum, so no separate code path exists for it.
    pub fn transposed_block(&self) -> DMatrix<Complex64> {
        self.matrix.transpose()
    }
}

/// Eigen verification of one truncated level against the analytic ansatz.
#[derive(Clone, Copy, Debug)]
pub struct FockLevel {
    pub n2: usize,
    /// |λ - 2c√n₂| for the best-matching eigenvalue.
    pub dev_plus: f64,
    pub dev_minus: f64,
    /// | |⟨ansatz, eigvec⟩| - 1 | for the two branches.
    pub overlap_defect_plus: f64,
    pub overlap_defect_minus: f64,
}

/// Outcome of diagonalizing the truncated block and checking every interior
/// level, the zero mode, and the orthonormality of the analytic eigenbasis.
#[derive(Clone, Debug)]
pub struct FockReport {
    pub boson_trunc: usize,
    pub hermiticity_defect: f64,
    pub levels: Vec<FockLevel>,
    pub max_eigenvalue_dev: f64,
    pub max_overlap_defect: f64,
    /// Squared norm of the projection of (e₀, 0) onto the numerical zero
    /// eigenspace; 1 when the analytic zero mode is present.
    pub zero_mode_projection: f64,
    /// Largest deviation of the analytic eigenbasis Gram matrix from the
    /// identity (the basis resolves the identity on the truncated sector).
    pub gram_defect: f64,
}

impl FockReport {
    /// The oracle passes when the matrix is exactly Hermitian and every
    /// analytic prediction is reproduced within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.hermiticity_defect == 0.0
            && self.max_eigenvalue_dev <= tol
            && self.max_overlap_defect <= tol
            && (self.zero_mode_projection - 1.0).abs() <= tol
    }
}

fn basis_pair(n: usize, upper_idx: Option<usize>, lower_idx: Option<usize>, lower_phase: Complex64) -> DVector<Complex64> {
    let dim = 2 * (n + 1);
    let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    match (upper_idx, lower_idx) {
        (Some(u), Some(l)) => {
            v[u] = Complex64::new(amp, 0.0);
            v[(n + 1) + l] = lower_phase * amp;
        }
        (Some(u), None) => v[u] = Complex64::new(1.0, 0.0),
        (None, Some(l)) => v[(n + 1) + l] = lower_phase,
        (None, None) => {}
    }
    v
}

/// Diagonalizes the truncated block and verifies, for every interior level
/// n₂ ≤ N - 2, the eigenvalues ±2c√n₂ and the eigenvector ansatz
/// (e_{n₂}, ∓i e_{n₂-1})/√2, plus the zero mode (e₀, 0). The top two levels
/// are truncation artifacts and are excluded.
pub fn fock_eigencheck(params: &GrapheneParams, boson_trunc: usize) -> Result<FockReport> {
    if boson_trunc < 4 {
        return Err(Error::InvalidParameter(
            "eigencheck needs a Fock truncation of at least 4".into(),
        ));
    }
    let fock = FockBlockMatrix::build(params, boson_trunc)?;
    let hermiticity_defect = fock.hermiticity_defect();
    let n = boson_trunc;
    let eig = nalgebra::SymmetricEigen::try_new(fock.matrix.clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?;

    let mut levels = Vec::new();
    let mut max_eigenvalue_dev: f64 = 0.0;
    let mut max_overlap_defect: f64 = 0.0;
    for n2 in 1..=(n - 2) {
        let target = 2.0 * params.c * (n2 as f64).sqrt();
        let mut level = FockLevel {
            n2,
            dev_plus: f64::INFINITY,
            dev_minus: f64::INFINITY,
            overlap_defect_plus: f64::INFINITY,
            overlap_defect_minus: f64::INFINITY,
        };
        for sign in [1.0, -1.0] {
            let wanted = sign * target;
            let mut best = 0usize;
            let mut best_dev = f64::INFINITY;
            for (i, lambda) in eig.eigenvalues.iter().enumerate() {
                let dev = (lambda - wanted).abs();
                if dev < best_dev {
                    best_dev = dev;
                    best = i;
                }
            }
            // (e_{n2}, ∓i e_{n2-1})/√2; the minus branch carries +i
            let lower_phase = Complex64::new(0.0, -sign);
            let ansatz = basis_pair(n, Some(n2), Some(n2 - 1), lower_phase);
            let column = eig.eigenvectors.column(best);
            let overlap = ansatz.dotc(&column).norm();
            let overlap_defect = (overlap - 1.0).abs();
            if sign > 0.0 {
                level.dev_plus = best_dev;
                level.overlap_defect_plus = overlap_defect;
            } else {
                level.dev_minus = best_dev;
                level.overlap_defect_minus = overlap_defect;
            }
            max_eigenvalue_dev = max_eigenvalue_dev.max(best_dev);
            max_overlap_defect = max_overlap_defect.max(overlap_defect);
        }
        levels.push(level);
    }

    // The zero eigenvalue is twofold in truncation: the analytic mode
    // (e₀, 0) and the artifact (0, e_N). Project the analytic mode onto the
    // numerical zero eigenspace instead of comparing single columns.
    let zero_cut = params.c; // well below the first true level 2c
    let zero_vector = basis_pair(n, Some(0), None, Complex64::new(0.0, 0.0));
    let mut zero_mode_projection = 0.0;
    for (i, lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() < zero_cut {
            let column = eig.eigenvectors.column(i);
            zero_mode_projection += zero_vector.dotc(&column).norm_sqr();
        }
    }

    // Gram check of the analytic eigenbasis on the verified sector.
    let mut ansatz_set: Vec<DVector<Complex64>> =
        vec![zero_vector];
    for n2 in 1..=(n - 2) {
        for sign in [1.0, -1.0] {
            ansatz_set.push(basis_pair(
                n,
                Some(n2),
                Some(n2 - 1),
                Complex64::new(0.0, -sign),
            ));
        }
    }
    let mut gram_defect: f64 = 0.0;
    for (i, u) in ansatz_set.iter().enumerate() {
        for (j, v) in ansatz_set.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((u.dotc(v) - Complex64::new(expected, 0.0)).norm());
        }
    }

    Ok(FockReport {
        boson_trunc,
        hermiticity_defect,
        levels,
        max_eigenvalue_dev,
        max_overlap_defect,
        zero_mode_projection,
        gram_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::IndexWindow;

    #[test]
    fn spectrum_matches_the_closed_form_values() {
        let params = GrapheneParams::default();
        let s = graphene_spectrum(&params);
        assert_eq!(s.eval(0), 1.0);
        assert_eq!(s.eval(4), 5.0);
        assert_eq!(s.eval(-9), -5.0);
        assert_eq!(s.eval(1), 3.0);
    }

    #[test]
    fn spectrum_is_increasing_and_nonzero_on_a_wide_window() {
        let s = graphene_spectrum(&GrapheneParams::default());
        let w = IndexWindow::new(-64, 64).unwrap();
        assert!(s.strictly_increasing_nonzero_on(w));
        for p in -64..64 {
            assert!(s.eval(p + 1) - s.eval(p) > 0.0);
            assert!(s.eval(p) != 0.0);
        }
    }

    #[test]
    fn shifting_the_landau_ladder_reproduces_the_spectrum() {
        let params = GrapheneParams::default();
        let shifted = landau_spectrum(&params).shifted(params.c());
        let target = graphene_spectrum(&params);
        for p in [-1i64, 0, 1] {
            assert_eq!(shifted.eval(p).to_bits(), target.eval(p).to_bits());
        }
    }

    #[test]
    fn landau_energies_are_symmetric() {
        let params = GrapheneParams::default();
        assert_eq!(landau_energy(&params, 0, BandSign::Plus), 0.0);
        assert_eq!(landau_energy(&params, 0, BandSign::Minus), 0.0);
        assert_eq!(landau_energy(&params, 4, BandSign::Plus), 4.0);
        for n2 in 0..=32 {
            assert_eq!(
                landau_energy(&params, n2, BandSign::Plus),
                -landau_energy(&params, n2, BandSign::Minus)
            );
        }
    }

    #[test]
    fn params_reject_nonpositive_scale() {
        assert!(GrapheneParams::new(0.0).is_err());
        assert!(GrapheneParams::new(-1.0).is_err());
        assert!(GrapheneParams::new(f64::NAN).is_err());
    }

    #[test]
    fn coefficient_spot_values() {
        let params = GrapheneParams::default();
        let flat = coefficients_for_choice(&params, Choice::FlatTheta);
        assert_eq!(flat.alpha(-4), 1.0 - 4.0);
        assert_eq!(flat.beta(4), 5.0);
        let spectral = coefficients_for_choice(&params, Choice::SpectralTheta);
        assert_eq!(spectral.alpha(0), 1.0 / 3.0);
        assert_eq!(spectral.beta(0), 3.0);
        let bosonic = coefficients_for_choice(&params, Choice::BosonicTheta);
        assert_eq!(bosonic.alpha(-3), 0.5 * (1.0 - 2.0 * 3.0f64.sqrt()));
        assert_eq!(bosonic.beta(-3), 2.0);
    }

    #[test]
    fn branch_labels() {
        assert_eq!(map_phi_index(3), "v⁺(n₂=3)");
        assert_eq!(map_phi_index(0), "v(n₂=0)");
        assert_eq!(map_phi_index(-2), "v⁻(n₂=2)");
    }

    #[test]
    fn fock_block_is_exactly_hermitian_and_traceless() {
        let fock = FockBlockMatrix::build(&GrapheneParams::default(), 8).unwrap();
        assert_eq!(fock.hermiticity_defect(), 0.0);
        assert_eq!(fock.trace(), Complex64::new(0.0, 0.0));
        assert_eq!(fock.dim(), 18);
    }

    #[test]
    fn smallest_truncation_has_the_two_level_spectrum() {
        // N = 2 keeps levels {0, ±2c, ±2c√2}; check the first pair appears.
        let fock = FockBlockMatrix::build(&GrapheneParams::default(), 2).unwrap();
        let eig = nalgebra::SymmetricEigen::try_new(fock.matrix().clone(), f64::EPSILON, 0)
            .expect("hermitian eigen");
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        let has = |x: f64| vals.iter().any(|v| (v - x).abs() < 1e-12);
        assert!(has(2.0) && has(-2.0));
    }

    #[test]
    fn fock_truncation_bounds_are_enforced() {
        let params = GrapheneParams::default();
        assert!(FockBlockMatrix::build(&params, 1).is_err());
        assert!(fock_eigencheck(&params, 3).is_err());
    }

    #[test]
    fn transpose_block_shares_the_spectrum() {
        let fock = FockBlockMatrix::build(&GrapheneParams::default(), 6).unwrap();
        let direct = nalgebra::SymmetricEigen::try_new(fock.matrix().clone(), f64::EPSILON, 0)
            .expect("hermitian eigen");
        let transposed = nalgebra::SymmetricEigen::try_new(
            fock.transposed_block(),
            f64::EPSILON,
            0,
        )
        .expect("hermitian eigen");
        let mut a: Vec<f64> = direct.eigenvalues.iter().copied().collect();
        let mut b: Vec<f64> = transposed.eigenvalues.iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
