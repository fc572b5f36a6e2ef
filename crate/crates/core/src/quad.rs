//! Quadrature rules used by the measure-verification routines: a
//! Gauss-Legendre rule for radial integrals and an equispaced angular grid
//! whose trigonometric moments are exact below the aliasing order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::util::{KahanComplex, KahanSum};

/// A Gauss-Legendre rule on [-1, 1], nodes stored in ascending order.
///
/// An n-point rule integrates polynomials of degree 2n - 1 exactly; for
/// analytic integrands the error decays geometrically in n.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(
                "Gauss-Legendre rule needs at least one node".into(),
            ));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (p2, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Guesses come out descending in x; mirror to fill both halves.
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_with_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over [a, b], accumulating in ascending node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = KahanSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equispaced angles on the circle with uniform weight 2π/M.
///
/// The discrete moment (2π/M) Σ_m e^{i d θ_m} equals 2π when M divides d and
/// vanishes otherwise, so moments with |d| < M are reproduced exactly.
#[derive(Clone, Copy, Debug)]
pub struct AngularGrid {
    order: usize,
}

impl AngularGrid {
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidParameter(
                "angular grid needs at least one node".into(),
            ));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Discrete trigonometric moment of order `d`.
    pub fn circular_moment(&self, d: i64) -> Complex64 {
        let m = self.order as f64;
        let mut acc = KahanComplex::new();
        for j in 0..self.order {
            let theta = std::f64::consts::TAU * j as f64 / m;
            let phase = d as f64 * theta;
            acc.add(Complex64::new(phase.cos(), phase.sin()));
        }
        acc.value() * (std::f64::consts::TAU / m)
    }
}
