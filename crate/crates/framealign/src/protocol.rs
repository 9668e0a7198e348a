//! Alignment protocol: signal states, the maximum-likelihood measurement,
//! and error estimation.
//!
//! The signal state spreads its weight over total-spin classes; inside
//! every class below the stretched one it occupies 2j + 1 equivalent
//! copies, each pinned to a distinct projection m(alpha). For that layout
//! the measurement amplitude collapses to a sum of characters plus one
//! highest-weight matrix element, so the likelihood never touches the
//! 2^N-dimensional space:
//!
//!   p(g|e) = |sum_{j<J} A_j chi_j(g) + sqrt(2J+1) A_J D^J_JJ(g)|^2
//!
//! Estimates are drawn by rejection from this density under a constant
//! envelope and left-translated to the true rotation; every Monte Carlo
//! trial derives its own random stream from (seed, trial index), so
//! results do not depend on execution order.

use crate::error::{Error, Result};
use crate::half::{HalfInt, Projection};
use crate::quadrature::{haar_integrate, HaarGrid};
use crate::representation::{classes_for, orbit_dimension};
use crate::spectral::fidelity_matrix;
use crate::su2::{haar_sample, transmission_error, GroupElement};
use crate::wigner::{character, highest_weight_element};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

const NORM_TOL: f64 = 1e-12;
const PROPOSAL_CAP: u64 = 1_000_000;

/// Signal state: class amplitudes plus the projection assignment that
/// pins each equivalent copy below the stretched class.
#[derive(Debug, Clone)]
pub struct ReferenceState {
    n_spins: u32,
    classes: Vec<HalfInt>,
    coefficients: Vec<f64>,
    assignments: Vec<Vec<Projection>>,
}

fn canonical_assignments(classes: &[HalfInt]) -> Vec<Vec<Projection>> {
    classes[1..].iter().map(|j| j.projections()).collect()
}

impl ReferenceState {
    /// State maximizing the average fidelity, with the canonical
    /// ascending projection assignment.
    pub fn optimal(n_spins: u32) -> Result<Self> {
        let protocol = crate::spectral::optimal_protocol(n_spins)?;
        Self::with_coefficients(n_spins, protocol.coefficients)
    }

    /// Custom class amplitudes, canonical assignment. Amplitudes are
    /// indexed by descending class, must be non-negative and unit norm.
    pub fn with_coefficients(n_spins: u32, coefficients: Vec<f64>) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::SpinCountTooSmall { n_spins, min: 2 });
        }
        let classes = classes_for(n_spins)?;
        let assignments = canonical_assignments(&classes);
        Self::build(n_spins, classes, coefficients, assignments)
    }

    /// Custom amplitudes and a custom projection assignment.
    /// `assignments[i]` lists m(alpha) for the class `classes()[i + 1]`;
    /// the stretched class is always pinned to m = J.
    pub fn with_assignments(
        n_spins: u32,
        coefficients: Vec<f64>,
        assignments: Vec<Vec<Projection>>,
    ) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::SpinCountTooSmall { n_spins, min: 2 });
        }
        let classes = classes_for(n_spins)?;
        Self::build(n_spins, classes, coefficients, assignments)
    }

    /// Skips the injectivity check so tests can build broken states.
    #[cfg(test)]
    pub(crate) fn with_assignments_unchecked(
        n_spins: u32,
        coefficients: Vec<f64>,
        assignments: Vec<Vec<Projection>>,
    ) -> Self {
        Self {
            n_spins,
            classes: classes_for(n_spins).expect("valid spin count"),
            coefficients,
            assignments,
        }
    }

    fn build(
        n_spins: u32,
        classes: Vec<HalfInt>,
        coefficients: Vec<f64>,
        assignments: Vec<Vec<Projection>>,
    ) -> Result<Self> {
        if coefficients.len() != classes.len() {
            return Err(Error::CoefficientCountMismatch {
                expected: classes.len(),
                got: coefficients.len(),
            });
        }
        let mut norm = 0.0;
        for (index, value) in coefficients.iter().copied().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeCoefficient { index, value });
            }
            norm += value * value;
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotUnitNorm {
                norm,
                tol: NORM_TOL,
            });
        }
        if assignments.len() != classes.len() - 1 {
            return Err(Error::CoefficientCountMismatch {
                expected: classes.len() - 1,
                got: assignments.len(),
            });
        }
        for (j, slots) in classes[1..].iter().zip(&assignments) {
            let expected = j.dimension() as usize;
            if slots.len() != expected {
                return Err(Error::AssignmentLengthMismatch {
                    twice_j: j.twice(),
                    expected,
                    got: slots.len(),
                });
            }
            for m in slots {
                m.validate_for(*j)?;
            }
            let mut seen: Vec<i32> = slots.iter().map(|m| m.twice()).collect();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != slots.len() {
                return Err(Error::NonInjectiveAssignment { twice_j: j.twice() });
            }
        }
        Ok(Self {
            n_spins,
            classes,
            coefficients,
            assignments,
        })
    }

    pub fn n_spins(&self) -> u32 {
        self.n_spins
    }

    /// Total-spin classes, descending; index 0 is the stretched class J.
    pub fn classes(&self) -> &[HalfInt] {
        &self.classes
    }

    /// Amplitudes parallel to `classes()`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Projection assignments for the classes below J, parallel to
    /// `classes()[1..]`.
    pub fn assignments(&self) -> &[Vec<Projection>] {
        &self.assignments
    }

    /// The fixed projection of the stretched component.
    pub fn stretched_projection(&self) -> Projection {
        self.classes[0].top_projection()
    }

    /// Average transmitted character A' M A, evaluated on the bands of
    /// the fidelity matrix.
    pub fn average_character_analytic(&self) -> Result<f64> {
        let m = fidelity_matrix(self.n_spins)?;
        let a = &self.coefficients;
        let mut acc = 0.0;
        for i in 0..a.len() {
            acc += m.diagonal()[i] * a[i] * a[i];
            if i + 1 < a.len() {
                acc += 2.0 * m.off_diagonal()[i] * a[i] * a[i + 1];
            }
        }
        Ok(acc)
    }

    /// Average transmission error 6 - 2 A' M A.
    pub fn average_error(&self) -> Result<f64> {
        Ok(6.0 - 2.0 * self.average_character_analytic()?)
    }
}

/// Closed-form likelihood of the maximum-likelihood measurement for a
/// fixed signal state.
#[derive(Debug, Clone)]
pub struct LikelihoodModel {
    reference: ReferenceState,
    envelope: f64,
}

impl LikelihoodModel {
    pub fn new(reference: &ReferenceState) -> Result<Self> {
        let envelope = orbit_dimension(reference.n_spins())? as f64;
        Ok(Self {
            reference: reference.clone(),
            envelope,
        })
    }

    pub fn reference(&self) -> &ReferenceState {
        &self.reference
    }

    /// Outcome density p(g|e) with respect to the invariant measure.
    pub fn likelihood(&self, g: &GroupElement) -> f64 {
        let a = &self.reference.coefficients;
        let classes = &self.reference.classes;
        let mut amp = (a[0] * (classes[0].dimension() as f64).sqrt())
            * highest_weight_element(classes[0], g);
        let mut real = 0.0;
        for (j, coeff) in classes[1..].iter().zip(&a[1..]) {
            real += coeff * character(*j, g);
        }
        amp.re += real;
        amp.norm_sqr()
    }

    /// Density at the true rotation, the maximum the measurement attains.
    pub fn peak_likelihood(&self) -> f64 {
        let a = &self.reference.coefficients;
        let classes = &self.reference.classes;
        let mut amp = a[0] * (classes[0].dimension() as f64).sqrt();
        for (j, coeff) in classes[1..].iter().zip(&a[1..]) {
            amp += coeff * classes_dim(*j);
        }
        amp * amp
    }

    /// Constant rejection envelope: the dimension of the rotation orbit
    /// subspace bounds the density by Cauchy-Schwarz.
    pub fn envelope_bound(&self) -> f64 {
        self.envelope
    }

    /// Average character by direct quadrature of chi_1 against the
    /// density; agrees with the analytic bilinear form.
    pub fn average_character_quadrature(&self, grid: &HaarGrid) -> f64 {
        haar_integrate(grid, |g| character(HalfInt::ONE, g) * self.likelihood(g))
    }

    fn sample_from_origin<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(GroupElement, u64)> {
        let mut proposals = 0;
        while proposals < PROPOSAL_CAP {
            proposals += 1;
            let g = haar_sample(rng);
            let u: f64 = rng.random();
            if u * self.envelope < self.likelihood(&g) {
                return Ok((g, proposals));
            }
        }
        Err(Error::SamplerCapExceeded { proposals })
    }

    /// One estimate of the unknown rotation `g_star`, distributed with
    /// density p(g_star^-1 g | e): sample at the origin, left-translate.
    pub fn sample_estimate<R: Rng + ?Sized>(
        &self,
        g_star: &GroupElement,
        rng: &mut R,
    ) -> Result<GroupElement> {
        let (h, _) = self.sample_from_origin(rng)?;
        Ok(g_star.compose(&h))
    }

    /// Estimate the average transmission error over Haar-random truths.
    pub fn monte_carlo_error(&self, trials: u64, seed: u64) -> Result<EstimationResult> {
        if trials < 100 {
            return Err(Error::TrialCountTooSmall { trials, min: 100 });
        }
        let mut errors = Vec::with_capacity(trials as usize);
        let mut proposals_total: u64 = 0;
        for trial in 0..trials {
            // Stream-per-trial keeps every trial's randomness independent
            // of how the loop is scheduled.
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let g_star = haar_sample(&mut rng);
            let (h, proposals) = self.sample_from_origin(&mut rng)?;
            proposals_total += proposals;
            let estimate = g_star.compose(&h);
            errors.push(transmission_error(&estimate, &g_star));
        }
        let n = trials as f64;
        let mean_error = pairwise_sum(&errors) / n;
        let squares: Vec<f64> = errors
            .iter()
            .map(|e| (e - mean_error) * (e - mean_error))
            .collect();
        let variance = pairwise_sum(&squares) / (n - 1.0);
        Ok(EstimationResult {
            n_spins: self.reference.n_spins,
            trials,
            seed,
            mean_error,
            std_error: (variance / n).sqrt(),
            analytic_error: self.reference.average_error()?,
            acceptance_rate: n / proposals_total as f64,
        })
    }
}

fn classes_dim(j: HalfInt) -> f64 {
    j.dimension() as f64
}

/// Deterministic summation independent of accumulation chunking.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Monte Carlo outcome with the matching analytic prediction.
#[derive(Debug, Clone, Serialize)]
pub struct EstimationResult {
    pub n_spins: u32,
    pub trials: u64,
    pub seed: u64,
    pub mean_error: f64,
    pub std_error: f64,
    pub analytic_error: f64,
    pub acceptance_rate: f64,
}

impl EstimationResult {
    /// Distance between sampled and analytic error in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mean_error - self.analytic_error).abs() / self.std_error
    }
}
