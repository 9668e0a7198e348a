//! Irreducible rotation matrices, characters, and matrix elements.
//!
//! `wigner_d` returns the (2j+1)-dimensional rotation matrix D^j(g) in the
//! Condon-Shortley phase convention with basis states ordered by ascending
//! projection m = -j, ..., +j. Matrix elements factorize over z-y-z Euler
//! angles as D^j_{m'm} = e^{-i m' alpha} d^j_{m'm}(beta) e^{-i m gamma}.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::half::{HalfInt, Projection};
use crate::su2::GroupElement;

const MAX_FACTORIAL: usize = 512;

/// ln(n!) from a lazily built table. Panics beyond the table, which covers
/// every spin this crate can represent in factorial space (2j < 128).
pub(crate) fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_FACTORIAL + 1);
        t.push(0.0);
        for k in 1..=MAX_FACTORIAL {
            t.push(t[k - 1] + (k as f64).ln());
        }
        t
    });
    table[n]
}

/// Reduced rotation matrix element d^j_{m_row, m_col}(beta).
///
/// Evaluated by the alternating factorial sum in log space; exact zeros of
/// the formula come out as exact zeros of the sum range.
pub fn wigner_small_d(j: HalfInt, m_row: Projection, m_col: Projection, beta: f64) -> Result<f64> {
    m_row.validate_for(j)?;
    m_col.validate_for(j)?;
    let tj = j.twice() as i64;
    let tmp = m_row.twice() as i64;
    let tm = m_col.twice() as i64;
    // Integer factorial arguments.
    let jpm = ((tj + tm) / 2) as usize;
    let jmm = ((tj - tm) / 2) as usize;
    let jpmp = ((tj + tmp) / 2) as usize;
    let jmmp = ((tj - tmp) / 2) as usize;
    let m_minus_mp = (tm - tmp) / 2;

    let half = beta / 2.0;
    let (sin_h, cos_h) = half.sin_cos();

    let prefactor = 0.5
        * (ln_factorial(jpm) + ln_factorial(jmm) + ln_factorial(jpmp) + ln_factorial(jmmp));
    let s_min = m_minus_mp.max(0);
    let s_max = (jpm as i64).min(jmmp as i64);
    let mut sum = 0.0;
    for s in s_min..=s_max {
        let denom = ln_factorial((jpm as i64 - s) as usize)
            + ln_factorial(s as usize)
            + ln_factorial((s - m_minus_mp) as usize)
            + ln_factorial((jmmp as i64 - s) as usize);
        let cos_exp = (tj + m_minus_mp - 2 * s) as i32;
        let sin_exp = (2 * s - m_minus_mp) as i32;
        let magnitude = (prefactor - denom).exp() * cos_h.powi(cos_exp) * sin_h.powi(sin_exp);
        // (-1)^{m' - m + s}
        if (s - m_minus_mp) % 2 == 0 {
            sum += magnitude;
        } else {
            sum -= magnitude;
        }
    }
    Ok(sum)
}

/// Full rotation matrix D^j(g), ascending projection basis.
pub fn wigner_d(j: HalfInt, g: &GroupElement) -> DMatrix<Complex64> {
    let e = g.euler_zyz();
    let dim = j.dimension();
    let ms = j.projections();
    let mut out = DMatrix::zeros(dim, dim);
    for (r, m_row) in ms.iter().enumerate() {
        for (c, m_col) in ms.iter().enumerate() {
            // Validated labels straight from the projection list.
            let small = wigner_small_d(j, *m_row, *m_col, e.beta).expect("labels are valid");
            let phase = -(m_row.as_f64() * e.alpha + m_col.as_f64() * e.gamma);
            out[(r, c)] = Complex64::from_polar(small, phase);
        }
    }
    out
}

/// Character chi_j(g) = tr D^j(g), evaluated as the degree-2j Chebyshev
/// polynomial of the second kind in the scalar part w = cos(theta/2).
pub fn character(j: HalfInt, g: &GroupElement) -> f64 {
    let n = j.twice();
    let x = g.w();
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for _ in 1..n {
        (prev, cur) = (cur, 2.0 * x * cur - prev);
    }
    cur
}

/// Top corner matrix element D^j_{jj}(g) = (w - i z)^{2j}.
pub fn highest_weight_element(j: HalfInt, g: &GroupElement) -> Complex64 {
    Complex64::new(g.w(), -g.z()).powu(j.twice())
}
