//! Deterministic quadrature over the group with normalized Haar measure.
//!
//! In z-y-z Euler coordinates the measure is
//! (1/16 pi^2) sin(beta) d(alpha) d(beta) d(gamma) with alpha in [0, 2pi),
//! gamma in [0, 4pi). Substituting u = cos(beta) and applying Gauss-Legendre
//! in u makes every integrand that is a trigonometric polynomial of bounded
//! frequency exact to rounding: the periodic directions use the rectangle
//! rule, which integrates e^{i k t} exactly whenever |k| is below the node
//! count.

use std::f64::consts::TAU;
use std::ops::{AddAssign, Mul};

use crate::error::{Error, Result};
use crate::su2::{EulerZyz, GroupElement};

/// Newton iteration on the Legendre recurrence. Returns nodes and weights
/// for the interval [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Product quadrature grid over the group. Nodes come with weights that sum
/// to one, so integration is a plain weighted sum.
#[derive(Clone, Debug)]
pub struct HaarGrid {
    n_alpha: usize,
    n_gamma: usize,
    beta_nodes: Vec<f64>,
    beta_weights: Vec<f64>,
}

impl HaarGrid {
    /// Grid with independent resolutions per angle. Every resolution must be
    /// at least 2.
    pub fn new(n_alpha: usize, n_beta: usize, n_gamma: usize) -> Result<Self> {
        if n_alpha < 2 || n_beta < 2 || n_gamma < 2 {
            return Err(Error::DegenerateGrid {
                n_alpha,
                n_beta,
                n_gamma,
            });
        }
        let (beta_nodes, beta_weights) = gauss_legendre(n_beta);
        Ok(HaarGrid {
            n_alpha,
            n_gamma,
            beta_nodes,
            beta_weights,
        })
    }

    /// Cubic grid with `n` nodes per angle.
    pub fn cubic(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.beta_nodes.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.n_gamma
    }

    /// All quadrature nodes with their weights, in a fixed deterministic
    /// order. Weights sum to 1 to rounding.
    pub fn nodes(&self) -> impl Iterator<Item = (GroupElement, f64)> + '_ {
        let na = self.n_alpha;
        let ng = self.n_gamma;
        self.beta_nodes
            .iter()
            .zip(self.beta_weights.iter())
            .flat_map(move |(&u, &wu)| {
                let beta = u.clamp(-1.0, 1.0).acos();
                // Weight per node: (w_u / 2) * (1 / n_alpha) * (1 / n_gamma).
                let w = wu / (2.0 * na as f64 * ng as f64);
                (0..na).flat_map(move |ia| {
                    let alpha = TAU * ia as f64 / na as f64;
                    (0..ng).map(move |ig| {
                        let gamma = 2.0 * TAU * ig as f64 / ng as f64;
                        (GroupElement::from_euler(&EulerZyz { alpha, beta, gamma }), w)
                    })
                })
            })
    }
}

/// Integrates `f` over the group against normalized Haar measure.
///
/// Works for any value type closed under addition and scaling by f64, in
/// particular f64 and Complex64. Accumulation order is fixed, so repeated
/// runs are bit-identical.
pub fn haar_integrate<T, F>(grid: &HaarGrid, mut f: F) -> T
where
    T: Default + Copy + AddAssign + Mul<f64, Output = T>,
    F: FnMut(&GroupElement) -> T,
{
    let mut acc = T::default();
    for (g, w) in grid.nodes() {
        acc += f(&g) * w;
    }
    acc
}
