//! Exact tensor-space oracle for small spin counts.
//!
//! Everything here works in the full 2^N-dimensional product space, with
//! no closed-form shortcuts: the basis comes from coupling one spin at a
//! time, rotations are Kronecker powers of the defining matrix, and the
//! checks integrate or multiply matrices directly. The point is to give
//! the fast routines an independent route to the same numbers.
//!
//! Capped at six spins; beyond that the dense checks stop paying for
//! themselves.

use crate::error::{Error, Result};
use crate::half::{HalfInt, Projection};
use crate::protocol::ReferenceState;
use crate::quadrature::HaarGrid;
use crate::representation::cg_coefficient;
use crate::spectral::fidelity_matrix;
use crate::su2::GroupElement;
use crate::wigner::{character, wigner_d};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Largest spin count the dense oracle accepts.
pub const MAX_ORACLE_SPINS: u32 = 6;

type CVec = DVector<Complex64>;
type CMat = DMatrix<Complex64>;

struct CopyBlock {
    /// Intermediate total spins (as 2j) after each coupled spin.
    path: Vec<u32>,
    /// Multiplet vectors, projections ascending.
    vectors: Vec<CVec>,
}

struct ClassBlock {
    j: HalfInt,
    copies: Vec<CopyBlock>,
}

/// Orthonormal total-spin basis of the N-spin product space, built by
/// coupling spins left to right. Copies within a class are ordered by
/// their coupling path, lexicographically.
pub struct SchurBasis {
    n_spins: u32,
    dim: usize,
    classes: Vec<ClassBlock>,
}

fn tensor_with_site(u: &CVec, spin_index: usize) -> CVec {
    let d = u.len();
    let mut out = CVec::zeros(2 * d);
    for i in 0..d {
        out[2 * i + spin_index] = u[i];
    }
    out
}

impl SchurBasis {
    pub fn new(n_spins: u32) -> Result<Self> {
        if n_spins < 1 {
            return Err(Error::SpinCountTooSmall { n_spins, min: 1 });
        }
        if n_spins > MAX_ORACLE_SPINS {
            return Err(Error::SpinCountTooLarge {
                n_spins,
                max: MAX_ORACLE_SPINS,
            });
        }
        let half = HalfInt::HALF;
        let mut blocks: Vec<CopyBlock> = vec![CopyBlock {
            path: vec![1],
            vectors: vec![
                tensor_with_site(&CVec::from_element(1, Complex64::new(1.0, 0.0)), 0),
                tensor_with_site(&CVec::from_element(1, Complex64::new(1.0, 0.0)), 1),
            ],
        }];
        for _ in 1..n_spins {
            let mut next = Vec::new();
            for block in &blocks {
                let j = HalfInt::from_twice(*block.path.last().unwrap());
                let mut targets = vec![j.twice() + 1];
                if j.twice() >= 1 {
                    targets.push(j.twice() - 1);
                }
                for tj_new in targets {
                    let j_new = HalfInt::from_twice(tj_new);
                    let dim = 2 * block.vectors[0].len();
                    let mut vectors = Vec::with_capacity(j_new.dimension());
                    for m_new in j_new.projections() {
                        let mut v = CVec::zeros(dim);
                        for (spin_index, s) in half.projections().into_iter().enumerate() {
                            let tm_old = m_new.twice() - s.twice();
                            if tm_old.abs() > j.twice() as i32 {
                                continue;
                            }
                            let m_old = Projection::from_twice(tm_old);
                            let c = cg_coefficient(j, m_old, half, s, j_new, m_new)?;
                            if c == 0.0 {
                                continue;
                            }
                            let old = &block.vectors[m_old.index_in(j)];
                            v += tensor_with_site(old, spin_index).scale(c);
                        }
                        vectors.push(v);
                    }
                    let mut path = block.path.clone();
                    path.push(tj_new);
                    next.push(CopyBlock { path, vectors });
                }
            }
            blocks = next;
        }
        blocks.sort_by(|a, b| a.path.cmp(&b.path));
        let mut finals: Vec<u32> = blocks.iter().map(|b| *b.path.last().unwrap()).collect();
        finals.sort_unstable();
        finals.dedup();
        finals.reverse();
        let mut classes = Vec::with_capacity(finals.len());
        for tj in finals {
            let (copies, rest): (Vec<_>, Vec<_>) = blocks
                .into_iter()
                .partition(|b| *b.path.last().unwrap() == tj);
            blocks = rest;
            classes.push(ClassBlock {
                j: HalfInt::from_twice(tj),
                copies,
            });
        }
        Ok(Self {
            n_spins,
            dim: 1usize << n_spins,
            classes,
        })
    }

    pub fn n_spins(&self) -> u32 {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total-spin labels, descending.
    pub fn classes(&self) -> Vec<HalfInt> {
        self.classes.iter().map(|c| c.j).collect()
    }

    pub fn multiplicity_of(&self, j: HalfInt) -> usize {
        self.class(j).map_or(0, |c| c.copies.len())
    }

    fn class(&self, j: HalfInt) -> Option<&ClassBlock> {
        self.classes.iter().find(|c| c.j == j)
    }

    /// Basis vector |j, alpha, m> in the product space.
    pub fn vector(&self, j: HalfInt, alpha: usize, m: Projection) -> Option<&CVec> {
        let class = self.class(j)?;
        m.validate_for(j).ok()?;
        class.copies.get(alpha).map(|c| &c.vectors[m.index_in(j)])
    }

    /// Coupling path that distinguishes copy alpha of class j.
    pub fn alpha_path(&self, j: HalfInt, alpha: usize) -> Option<&[u32]> {
        self.class(j)?.copies.get(alpha).map(|c| c.path.as_slice())
    }

    fn check_state(&self, state: &ReferenceState) -> Result<()> {
        if state.n_spins() != self.n_spins {
            return Err(Error::SpinCountMismatch {
                expected: self.n_spins,
                got: state.n_spins(),
            });
        }
        Ok(())
    }

    /// The signal state as an explicit product-space vector.
    pub fn embed_reference(&self, state: &ReferenceState) -> Result<CVec> {
        self.check_state(state)?;
        let classes = state.classes();
        let a = state.coefficients();
        let mut v = CVec::zeros(self.dim);
        let top = classes[0];
        let top_vec = self
            .vector(top, 0, top.top_projection())
            .expect("stretched copy present");
        v += top_vec.scale(a[0]);
        for ((j, coeff), slots) in classes[1..].iter().zip(&a[1..]).zip(state.assignments()) {
            let scale = coeff / (j.dimension() as f64).sqrt();
            for (alpha, m) in slots.iter().enumerate() {
                v += self
                    .vector(*j, alpha, *m)
                    .expect("retained copy present")
                    .scale(scale);
            }
        }
        Ok(v)
    }

    /// Measurement seed with explicit per-class weights.
    pub fn povm_vector_with_weights(
        &self,
        state: &ReferenceState,
        weights: &[f64],
    ) -> Result<CVec> {
        self.check_state(state)?;
        let classes = state.classes();
        if weights.len() != classes.len() {
            return Err(Error::CoefficientCountMismatch {
                expected: classes.len(),
                got: weights.len(),
            });
        }
        let mut v = CVec::zeros(self.dim);
        let top = classes[0];
        v += self
            .vector(top, 0, top.top_projection())
            .expect("stretched copy present")
            .scale(weights[0]);
        for ((j, weight), slots) in classes[1..].iter().zip(&weights[1..]).zip(state.assignments())
        {
            for (alpha, m) in slots.iter().enumerate() {
                v += self
                    .vector(*j, alpha, *m)
                    .expect("retained copy present")
                    .scale(*weight);
            }
        }
        Ok(v)
    }

    /// Maximum-likelihood measurement seed: weight sqrt(2j + 1) on every
    /// class, same projection layout as the signal state.
    pub fn ml_povm_vector(&self, state: &ReferenceState) -> Result<CVec> {
        let weights: Vec<f64> = state
            .classes()
            .iter()
            .map(|j| (j.dimension() as f64).sqrt())
            .collect();
        self.povm_vector_with_weights(state, &weights)
    }

    /// Outcome density evaluated with dense tensor-space algebra.
    pub fn likelihood(&self, state: &ReferenceState, g: &GroupElement) -> Result<f64> {
        let a = self.embed_reference(state)?;
        let b = self.ml_povm_vector(state)?;
        let u = tensor_rotation(self.n_spins, g);
        let amp = b.dotc(&(u.adjoint() * a));
        Ok(amp.norm_sqr())
    }

    /// Projector onto the retained copies: min(multiplicity, 2j + 1) per
    /// class, every projection.
    pub fn subspace_projector(&self) -> CMat {
        let mut p = CMat::zeros(self.dim, self.dim);
        for class in &self.classes {
            let keep = class.copies.len().min(class.j.dimension());
            for copy in &class.copies[..keep] {
                for v in &copy.vectors {
                    p += v * v.adjoint();
                }
            }
        }
        p
    }

    /// Largest entry of | int U |B><B| U' dg  -  P |, the defect of the
    /// measurement seed as a resolution of the retained subspace.
    pub fn completeness_residual_with_weights(
        &self,
        state: &ReferenceState,
        weights: &[f64],
        grid: &HaarGrid,
    ) -> Result<f64> {
        let b = self.povm_vector_with_weights(state, weights)?;
        let mut acc = CMat::zeros(self.dim, self.dim);
        for (g, w) in grid.nodes() {
            let rotated = tensor_rotation(self.n_spins, &g) * &b;
            acc += (&rotated * rotated.adjoint()).scale(w);
        }
        let defect = acc - self.subspace_projector();
        Ok(defect.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    pub fn completeness_residual(&self, state: &ReferenceState, grid: &HaarGrid) -> Result<f64> {
        let weights: Vec<f64> = state
            .classes()
            .iter()
            .map(|j| (j.dimension() as f64).sqrt())
            .collect();
        self.completeness_residual_with_weights(state, &weights, grid)
    }

    /// Recomputes the fidelity matrix by cross-likelihood quadrature and
    /// reports (largest band deviation, largest entry beyond the bands).
    pub fn m_entry_deviation(&self, grid: &HaarGrid) -> Result<(f64, f64)> {
        let k = self.classes.len();
        let mut unit_states = Vec::with_capacity(k);
        for r in 0..k {
            let mut coeffs = vec![0.0; k];
            coeffs[r] = 1.0;
            unit_states.push(ReferenceState::with_coefficients(self.n_spins, coeffs)?);
        }
        let embedded: Vec<CVec> = unit_states
            .iter()
            .map(|s| self.embed_reference(s))
            .collect::<Result<_>>()?;
        let b = self.ml_povm_vector(&unit_states[0])?;

        let mut recomputed = CMat::zeros(k, k);
        for (g, w) in grid.nodes() {
            let u_dagger = tensor_rotation(self.n_spins, &g).adjoint();
            let f: Vec<Complex64> = embedded.iter().map(|a| b.dotc(&(&u_dagger * a))).collect();
            let chi = character(HalfInt::ONE, &g) * w;
            for r in 0..k {
                for c in 0..k {
                    recomputed[(r, c)] += chi * f[r] * f[c].conj();
                }
            }
        }

        let reference = fidelity_matrix(self.n_spins)?;
        let mut band_dev = 0.0f64;
        let mut beyond = 0.0f64;
        for r in 0..k {
            for c in 0..k {
                if r.abs_diff(c) <= 1 {
                    let expect = if r == c {
                        reference.diagonal()[r]
                    } else {
                        reference.off_diagonal()[r.min(c)]
                    };
                    band_dev = band_dev.max((recomputed[(r, c)] - Complex64::from(expect)).norm());
                } else {
                    beyond = beyond.max(recomputed[(r, c)].norm());
                }
            }
        }
        Ok((band_dev, beyond))
    }

    /// Largest deviation of any basis vector from its Casimir eigenvalue
    /// j(j + 1), using ladder operators assembled site by site.
    pub fn casimir_residual(&self) -> f64 {
        let n = self.n_spins;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // Ascending single-site basis (down, up).
        let sz = CMat::from_row_slice(2, 2, &[-0.5 * one, zero, zero, 0.5 * one]);
        let s_plus = CMat::from_row_slice(2, 2, &[zero, zero, one, zero]);
        let s_minus = CMat::from_row_slice(2, 2, &[zero, one, zero, zero]);
        let total = |op: &CMat| -> CMat {
            let mut acc = CMat::zeros(self.dim, self.dim);
            for site in 0..n {
                let mut factor = CMat::identity(1, 1);
                for i in 0..n {
                    let next = if i == site {
                        op.clone()
                    } else {
                        CMat::identity(2, 2)
                    };
                    factor = factor.kronecker(&next);
                }
                acc += factor;
            }
            acc
        };
        let jz = total(&sz);
        let jp = total(&s_plus);
        let jm = total(&s_minus);
        let casimir = &jz * &jz + ((&jp * &jm) + (&jm * &jp)).scale(0.5);
        let mut worst = 0.0f64;
        for class in &self.classes {
            let eig = class.j.as_f64() * (class.j.as_f64() + 1.0);
            for copy in &class.copies {
                for v in &copy.vectors {
                    let r = &casimir * v - v.scale(eig);
                    worst = worst.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
        worst
    }

    /// Largest deviation of <j,a,n| U |j,b,m> from delta_ab D^j_nm.
    pub fn block_action_residual(&self, g: &GroupElement) -> f64 {
        let u = tensor_rotation(self.n_spins, g);
        let mut worst = 0.0f64;
        for class in &self.classes {
            let d = wigner_d(class.j, g);
            let rotated: Vec<Vec<CVec>> = class
                .copies
                .iter()
                .map(|c| c.vectors.iter().map(|v| &u * v).collect())
                .collect();
            for (a, copy_a) in class.copies.iter().enumerate() {
                for b in 0..class.copies.len() {
                    for (ni, bra) in copy_a.vectors.iter().enumerate() {
                        for mi in 0..class.j.dimension() {
                            let got = bra.dotc(&rotated[b][mi]);
                            let expect = if a == b { d[(ni, mi)] } else { Complex64::from(0.0) };
                            worst = worst.max((got - expect).norm());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Copy-transfer operator T = sum_m |j,a,m><j,b,m|, the canonical
    /// isometry between two copies of class j.
    pub fn transfer_operator(&self, j: HalfInt, alpha: usize, beta: usize) -> Result<CMat> {
        let class = self.class(j).ok_or(Error::IncompatibleSpin {
            n_spins: self.n_spins,
            twice_j: j.twice(),
        })?;
        let copies = class.copies.len();
        if alpha >= copies || beta >= copies {
            return Err(Error::IncompatibleSpin {
                n_spins: self.n_spins,
                twice_j: j.twice(),
            });
        }
        let mut t = CMat::zeros(self.dim, self.dim);
        for m in 0..j.dimension() {
            t += &class.copies[alpha].vectors[m] * class.copies[beta].vectors[m].adjoint();
        }
        Ok(t)
    }

    /// Cross-copy overlaps of a signal state through the transfer
    /// operators: (largest off-diagonal magnitude, largest deviation of a
    /// self-overlap from its class weight).
    pub fn iso_overlaps(&self, state: &ReferenceState) -> Result<(f64, f64)> {
        let a = self.embed_reference(state)?;
        let classes = state.classes();
        let coeffs = state.coefficients();
        let mut cross = 0.0f64;
        let mut self_dev = 0.0f64;
        for (i, j) in classes.iter().enumerate() {
            let keep = if i == 0 {
                1
            } else {
                self.multiplicity_of(*j).min(j.dimension())
            };
            let expected_self = if i == 0 {
                coeffs[0] * coeffs[0]
            } else {
                coeffs[i] * coeffs[i] / j.dimension() as f64
            };
            for alpha in 0..keep {
                for beta in 0..keep {
                    let t = self.transfer_operator(*j, alpha, beta)?;
                    let value = a.dotc(&(&t * &a));
                    if alpha == beta {
                        self_dev = self_dev.max((value - Complex64::from(expected_self)).norm());
                    } else {
                        cross = cross.max(value.norm());
                    }
                }
            }
        }
        Ok((cross, self_dev))
    }

    /// Schmidt coefficients of each occupied class component across the
    /// (copy, projection) split, normalized per class.
    pub fn schmidt_spectra(&self, state: &ReferenceState) -> Result<Vec<(HalfInt, Vec<f64>)>> {
        let a = self.embed_reference(state)?;
        let classes = state.classes();
        let coeffs = state.coefficients();
        let mut out = Vec::new();
        for (i, j) in classes.iter().enumerate() {
            if coeffs[i] == 0.0 {
                continue;
            }
            let keep = if i == 0 {
                1
            } else {
                self.multiplicity_of(*j).min(j.dimension())
            };
            let rows = j.dimension();
            let mut c = CMat::zeros(rows, keep);
            for alpha in 0..keep {
                for (mi, m) in j.projections().into_iter().enumerate() {
                    let basis = self.vector(*j, alpha, m).expect("retained copy present");
                    c[(mi, alpha)] = basis.dotc(&a) / Complex64::from(coeffs[i]);
                }
            }
            let singular = c.svd(false, false).singular_values;
            out.push((*j, singular.iter().copied().collect()));
        }
        Ok(out)
    }
}

/// N-fold Kronecker power of the defining spin-1/2 matrix.
pub fn tensor_rotation(n_spins: u32, g: &GroupElement) -> CMat {
    let half = wigner_d(HalfInt::HALF, g);
    let mut acc = CMat::identity(1, 1);
    for _ in 0..n_spins {
        acc = acc.kronecker(&half);
    }
    acc
}
