//! Unit-quaternion representation of SU(2) rotations.
//!
//! A group element q = (w, x, y, z) with w^2 + x^2 + y^2 + z^2 = 1 maps to the
//! special unitary matrix
//!
//! ```text
//! U(q) = w I - i (x sx + y sy + z sz) = [ w - i z    -y - i x ]
//!                                       [ y - i x     w + i z ]
//! ```
//!
//! where sx, sy, sz are the Pauli matrices. Quaternion multiplication matches
//! matrix multiplication under this map, and q and -q describe the same
//! spatial rotation (double cover). Rotations are active: `rotation_matrix`
//! applied to a column vector rotates the vector, not the frame.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Norm below which a quaternion is rejected instead of normalized.
const MIN_NORM: f64 = 1e-8;

/// Rotation encoded as a unit quaternion. Always unit-norm by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub(crate) w: f64,
    pub(crate) x: f64,
    pub(crate) y: f64,
    pub(crate) z: f64,
}

/// Euler angles in the z-y-z convention: a rotation by `gamma` about z, then
/// `beta` about y, then `alpha` about z.
///
/// Canonical ranges are alpha in [0, 2pi), beta in [0, pi], gamma in [0, 4pi).
/// The extended gamma range covers the double cover: shifting gamma by 2pi
/// flips the sign of the quaternion while fixing the spatial rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerZyz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Builds a rotation from raw quaternion components, renormalizing.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !(norm >= MIN_NORM) {
            return Err(Error::ZeroQuaternion { norm });
        }
        Ok(GroupElement {
            w: w / norm,
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    /// Rotation by `angle` about the x axis.
    pub fn rot_x(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        GroupElement {
            w: c,
            x: s,
            y: 0.0,
            z: 0.0,
        }
    }

    /// Rotation by `angle` about the y axis.
    pub fn rot_y(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        GroupElement {
            w: c,
            x: 0.0,
            y: s,
            z: 0.0,
        }
    }

    /// Rotation by `angle` about the z axis.
    pub fn rot_z(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        GroupElement {
            w: c,
            x: 0.0,
            y: 0.0,
            z: s,
        }
    }

    /// Rotation by `angle` about an arbitrary axis (need not be unit length).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm >= MIN_NORM) {
            return Err(Error::ZeroAxis { norm });
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Ok(GroupElement {
            w: c,
            x: s * axis[0] / norm,
            y: s * axis[1] / norm,
            z: s * axis[2] / norm,
        })
    }

    /// Builds the element Rz(alpha) Ry(beta) Rz(gamma).
    pub fn from_euler(e: &EulerZyz) -> Self {
        Self::rot_z(e.alpha)
            .compose(&Self::rot_y(e.beta))
            .compose(&Self::rot_z(e.gamma))
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Group product: `self.compose(h)` is the rotation h followed by self.
    pub fn compose(&self, rhs: &GroupElement) -> Self {
        let (aw, ax, ay, az) = (self.w, self.x, self.y, self.z);
        let (bw, bx, by, bz) = (rhs.w, rhs.x, rhs.y, rhs.z);
        let w = aw * bw - ax * bx - ay * by - az * bz;
        let x = aw * bx + ax * bw + ay * bz - az * by;
        let y = aw * by - ax * bz + ay * bw + az * bx;
        let z = aw * bz + ax * by - ay * bx + az * bw;
        // Products of unit quaternions drift only by rounding; renormalize to
        // keep the unit invariant tight under long chains.
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        GroupElement {
            w: w / norm,
            x: x / norm,
            y: y / norm,
            z: z / norm,
        }
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// The antipodal quaternion -q: same spatial rotation, opposite sheet.
    pub fn antipode(&self) -> Self {
        GroupElement {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Rotation angle theta in [0, 2pi] with w = cos(theta / 2).
    ///
    /// Angles above pi occur on the lower sheet of the double cover.
    pub fn rotation_angle(&self) -> f64 {
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        2.0 * v.atan2(self.w)
    }

    /// The 3x3 special orthogonal matrix of this rotation.
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// Extracts z-y-z Euler angles in canonical ranges.
    ///
    /// The round trip `from_euler(&g.euler_zyz())` reproduces g as a
    /// quaternion, sign included, not merely the same spatial rotation.
    pub fn euler_zyz(&self) -> EulerZyz {
        // With a = cos(b/2) e^{-i(alpha+gamma)/2} and the half-angle sums
        // s = (alpha + gamma)/2, d = (alpha - gamma)/2:
        //   w = cos(b/2) cos s,  z = cos(b/2) sin s,
        //   y = sin(b/2) cos d,  x = -sin(b/2) sin d.
        let cos_half = (self.w * self.w + self.z * self.z).sqrt();
        let sin_half = (self.x * self.x + self.y * self.y).sqrt();
        let beta = 2.0 * sin_half.atan2(cos_half);
        let s = self.z.atan2(self.w);
        let d = (-self.x).atan2(self.y);
        let mut alpha = s + d;
        let mut gamma = s - d;
        // Shifting alpha and gamma together by 2pi multiplies the element by
        // (-1)(-1) = +1, so these folds preserve the exact quaternion.
        if alpha < 0.0 {
            alpha += TAU;
            gamma += TAU;
        }
        if alpha >= TAU {
            alpha -= TAU;
            gamma -= TAU;
        }
        // A lone 4pi shift of gamma is the identity.
        gamma = gamma.rem_euclid(2.0 * TAU);
        EulerZyz { alpha, beta, gamma }
    }
}

/// Squared Frobenius distance between the two rotation matrices:
/// 6 - 2 tr[R(estimate)^T R(truth)], in [0, 8].
pub fn transmission_error(estimate: &GroupElement, truth: &GroupElement) -> f64 {
    let rel = estimate.inverse().compose(truth);
    // tr R = 4 w^2 - 1 for a unit quaternion.
    let trace = 4.0 * rel.w * rel.w - 1.0;
    6.0 - 2.0 * trace
}

/// Draws a Haar-distributed rotation: four standard normals, normalized.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    loop {
        let w: f64 = rng.sample(StandardNormal);
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Ok(g) = GroupElement::new(w, x, y, z) {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    /// Independent oracle: the explicit 2x2 special unitary matrix of q.
    fn unitary(g: &GroupElement) -> [[(f64, f64); 2]; 2] {
        [
            [(g.w, -g.z), (-g.y, -g.x)],
            [(g.y, -g.x), (g.w, g.z)],
        ]
    }

    fn mat_mul(a: [[(f64, f64); 2]; 2], b: [[(f64, f64); 2]; 2]) -> [[(f64, f64); 2]; 2] {
        let mut out = [[(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let mut re = 0.0;
                let mut im = 0.0;
                for k in 0..2 {
                    let (ar, ai) = a[r][k];
                    let (br, bi) = b[k][c];
                    re += ar * br - ai * bi;
                    im += ar * bi + ai * br;
                }
                out[r][c] = (re, im);
            }
        }
        out
    }

    fn random_elements(n: usize, seed: u64) -> Vec<GroupElement> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n).map(|_| haar_sample(&mut rng)).collect()
    }

    #[test]
    fn compose_matches_matrix_product() {
        for pair in random_elements(200, 7).chunks(2) {
            let (g, h) = (&pair[0], &pair[1]);
            let gh = g.compose(h);
            let oracle = mat_mul(unitary(g), unitary(h));
            let direct = unitary(&gh);
            for r in 0..2 {
                for c in 0..2 {
                    assert!(
                        (oracle[r][c].0 - direct[r][c].0).abs() < TOL
                            && (oracle[r][c].1 - direct[r][c].1).abs() < TOL,
                        "compose disagrees with 2x2 matrix product at ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn construction_normalizes_and_rejects_zero() {
        let g = GroupElement::new(2.0, 0.0, 0.0, 0.0).unwrap();
        assert!((g.w - 1.0).abs() < TOL);
        assert!(GroupElement::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(GroupElement::new(1e-12, 0.0, 0.0, 0.0).is_err());
        assert!(GroupElement::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn inverse_composes_to_identity() {
        for g in random_elements(100, 11) {
            let e = g.compose(&g.inverse());
            assert!((e.w - 1.0).abs() < TOL && e.x.abs() < TOL && e.y.abs() < TOL && e.z.abs() < TOL);
        }
    }

    #[test]
    fn rotation_matrix_is_special_orthogonal() {
        for g in random_elements(100, 13) {
            let r = g.rotation_matrix();
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < TOL, "row orthonormality");
                }
            }
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert!((det - 1.0).abs() < TOL, "determinant");
        }
    }

    #[test]
    fn rotation_matrix_is_a_homomorphism() {
        for pair in random_elements(100, 17).chunks(2) {
            let (g, h) = (&pair[0], &pair[1]);
            let rg = g.rotation_matrix();
            let rh = h.rotation_matrix();
            let rgh = g.compose(h).rotation_matrix();
            for i in 0..3 {
                for j in 0..3 {
                    let prod: f64 = (0..3).map(|k| rg[i][k] * rh[k][j]).sum();
                    assert!((prod - rgh[i][j]).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn antipode_shares_the_rotation_matrix() {
        for g in random_elements(50, 19) {
            let r = g.rotation_matrix();
            let ra = g.antipode().rotation_matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((r[i][j] - ra[i][j]).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn rotation_matrix_about_z_is_plane_rotation() {
        let t = 0.7319;
        let r = GroupElement::rot_z(t).rotation_matrix();
        assert!((r[0][0] - t.cos()).abs() < TOL);
        assert!((r[0][1] + t.sin()).abs() < TOL);
        assert!((r[1][0] - t.sin()).abs() < TOL);
        assert!((r[2][2] - 1.0).abs() < TOL);
    }

    #[test]
    fn trace_identity() {
        for g in random_elements(100, 23) {
            let r = g.rotation_matrix();
            let tr = r[0][0] + r[1][1] + r[2][2];
            assert!((tr - (4.0 * g.w * g.w - 1.0)).abs() < TOL);
        }
    }

    #[test]
    fn axis_angle_agrees_with_axis_constructors() {
        let t = 1.234;
        for (axis, reference) in [
            ([1.0, 0.0, 0.0], GroupElement::rot_x(t)),
            ([0.0, 2.0, 0.0], GroupElement::rot_y(t)),
            ([0.0, 0.0, 0.5], GroupElement::rot_z(t)),
        ] {
            let g = GroupElement::from_axis_angle(axis, t).unwrap();
            assert!((g.w - reference.w).abs() < TOL);
            assert!((g.x - reference.x).abs() < TOL);
            assert!((g.y - reference.y).abs() < TOL);
            assert!((g.z - reference.z).abs() < TOL);
        }
        assert!(GroupElement::from_axis_angle([0.0; 3], 1.0).is_err());
    }

    #[test]
    fn rotation_angle_tracks_the_half_angle() {
        for t in [0.0, 0.3, PI / 2.0, PI, 1.5 * PI, 1.99 * PI] {
            let g = GroupElement::rot_y(t);
            assert!((g.rotation_angle() - t).abs() < 1e-10, "angle {t}");
        }
    }

    #[test]
    fn euler_round_trip_preserves_the_exact_element() {
        let mut cases = random_elements(500, 29);
        // Edge cases: identity, antipode, pure beta = 0 and beta = pi planes.
        cases.push(GroupElement::IDENTITY);
        cases.push(GroupElement::IDENTITY.antipode());
        cases.push(GroupElement::rot_z(1.1));
        cases.push(GroupElement::rot_z(1.1).antipode());
        cases.push(GroupElement::rot_y(PI));
        cases.push(GroupElement::rot_x(PI));
        cases.push(GroupElement::rot_z(-0.4));
        for g in cases {
            let e = g.euler_zyz();
            assert!(
                (0.0..TAU).contains(&e.alpha),
                "alpha {} out of range",
                e.alpha
            );
            assert!((0.0..=PI).contains(&e.beta), "beta {} out of range", e.beta);
            assert!(
                (0.0..2.0 * TAU).contains(&e.gamma),
                "gamma {} out of range",
                e.gamma
            );
            let back = GroupElement::from_euler(&e);
            assert!(
                (g.w - back.w).abs() < 1e-10
                    && (g.x - back.x).abs() < 1e-10
                    && (g.y - back.y).abs() < 1e-10
                    && (g.z - back.z).abs() < 1e-10,
                "round trip moved the element: {g:?} -> {back:?}"
            );
        }
    }

    #[test]
    fn transmission_error_extremes_and_symmetry() {
        let e = GroupElement::identity();
        assert!(transmission_error(&e, &e).abs() < TOL);
        // A half-turn flips two axes: the Frobenius distance is maximal.
        let half_turn = GroupElement::rot_z(PI);
        assert!((transmission_error(&half_turn, &e) - 8.0).abs() < TOL);
        for pair in random_elements(50, 31).chunks(2) {
            let (g, h) = (&pair[0], &pair[1]);
            let fwd = transmission_error(g, h);
            let rev = transmission_error(h, g);
            assert!((fwd - rev).abs() < TOL);
            assert!((0.0..=8.0 + TOL).contains(&fwd));
            // Left invariance under a common rotation.
            let k = &random_elements(1, 37)[0];
            let shifted = transmission_error(&k.compose(g), &k.compose(h));
            assert!((fwd - shifted).abs() < 1e-10);
        }
    }

    #[test]
    fn haar_sample_matches_first_moments() {
        // E[w] = E[x] = ... = 0 and E[4w^2 - 1] = 0 under Haar measure.
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let n = 1_000_000;
        let mut sums = [0.0; 4];
        let mut chi = 0.0;
        for _ in 0..n {
            let g = haar_sample(&mut rng);
            sums[0] += g.w;
            sums[1] += g.x;
            sums[2] += g.y;
            sums[3] += g.z;
            chi += 4.0 * g.w * g.w - 1.0;
        }
        let scale = 1.0 / n as f64;
        // Component standard error is 1/(2 sqrt n) ~ 5e-4; allow 5 sigma.
        for s in sums {
            assert!((s * scale).abs() < 2.5e-3, "component mean {}", s * scale);
        }
        // chi_1 has unit variance under Haar; same margin.
        assert!((chi * scale).abs() < 5e-3, "character mean {}", chi * scale);
    }
}
