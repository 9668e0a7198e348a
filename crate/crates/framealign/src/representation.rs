//! Decomposition of the N-spin space into total-spin sectors.
//!
//! The tensor power of N spin-1/2 systems splits into irreducible blocks
//! labelled by total spin j, where j runs from N/2 down to 0 or 1/2 in
//! integer steps. Each label j occurs with a multiplicity n_j given by a
//! difference of binomial coefficients; multiplicities are kept as exact
//! u128 integers. Clebsch-Gordan coefficients follow the Condon-Shortley
//! phase convention and are evaluated with the single-sum Racah formula
//! in log-factorial space.

use crate::error::{Error, Result};
use crate::half::{HalfInt, Projection};
use crate::wigner::ln_factorial;

/// Largest spin count for which exact multiplicity bookkeeping is
/// guaranteed: central binomials past this overflow u128. Only the
/// counting operations enforce it; class enumeration has no cap.
pub const MAX_SPINS: u32 = 120;

fn check_positive(n_spins: u32) -> Result<()> {
    if n_spins < 1 {
        return Err(Error::SpinCountTooSmall { n_spins, min: 1 });
    }
    Ok(())
}

fn check_countable(n_spins: u32) -> Result<()> {
    check_positive(n_spins)?;
    if n_spins > MAX_SPINS {
        return Err(Error::SpinCountTooLarge {
            n_spins,
            max: MAX_SPINS,
        });
    }
    Ok(())
}

/// C(n, k) by the incremental product; each intermediate division is exact.
fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or(Error::ArithmeticOverflow {
                what: "binomial coefficient",
            })?
            / i as u128;
    }
    Ok(acc)
}

/// Total-spin labels present in the N-spin decomposition, descending from
/// j = N/2 to 1/2 (N odd) or 0 (N even).
pub fn classes_for(n_spins: u32) -> Result<Vec<HalfInt>> {
    check_positive(n_spins)?;
    let mut out = Vec::with_capacity(n_spins as usize / 2 + 1);
    let mut twice = n_spins;
    loop {
        out.push(HalfInt::from_twice(twice));
        if twice < 2 {
            break;
        }
        twice -= 2;
    }
    Ok(out)
}

/// Number of times total spin j appears among N coupled spin-1/2 systems:
/// n_j = C(N, N/2 + j) - C(N, N/2 + j + 1), exactly.
pub fn multiplicity(n_spins: u32, j: HalfInt) -> Result<u128> {
    check_countable(n_spins)?;
    let tj = j.twice();
    if tj > n_spins || (n_spins - tj) % 2 != 0 {
        return Err(Error::IncompatibleSpin {
            n_spins,
            twice_j: tj,
        });
    }
    let n = n_spins as u64;
    let k_hi = (n + tj as u64) / 2;
    let with = binomial(n, k_hi)?;
    let above = binomial(n, k_hi + 1)?;
    Ok(with - above)
}

/// One row of the decomposition: a total-spin label and its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSector {
    pub j: HalfInt,
    pub multiplicity: u128,
}

/// Full decomposition of the N-spin space, sectors in descending j.
#[derive(Debug, Clone)]
pub struct IrrepDecomposition {
    n_spins: u32,
    sectors: Vec<SpinSector>,
}

impl IrrepDecomposition {
    pub fn n_spins(&self) -> u32 {
        self.n_spins
    }

    /// Sectors in descending j; the first is the stretched spin J = N/2
    /// with multiplicity 1.
    pub fn sectors(&self) -> &[SpinSector] {
        &self.sectors
    }

    /// Multiplicity of label j, zero when j does not appear.
    pub fn multiplicity_of(&self, j: HalfInt) -> u128 {
        self.sectors
            .iter()
            .find(|s| s.j == j)
            .map_or(0, |s| s.multiplicity)
    }

    /// Sum of n_j * (2j + 1) over all sectors; equals 2^N.
    pub fn total_dimension(&self) -> Result<u128> {
        let mut acc: u128 = 0;
        for s in &self.sectors {
            let block = s
                .multiplicity
                .checked_mul(s.j.dimension() as u128)
                .ok_or(Error::ArithmeticOverflow {
                    what: "sector dimension",
                })?;
            acc = acc.checked_add(block).ok_or(Error::ArithmeticOverflow {
                what: "total dimension",
            })?;
        }
        Ok(acc)
    }
}

/// Decompose the N-fold tensor power of spin-1/2 into total-spin sectors.
pub fn clebsch_series(n_spins: u32) -> Result<IrrepDecomposition> {
    check_countable(n_spins)?;
    let sectors = classes_for(n_spins)?
        .into_iter()
        .map(|j| {
            Ok(SpinSector {
                multiplicity: multiplicity(n_spins, j)?,
                j,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IrrepDecomposition { n_spins, sectors })
}

/// Copies of sector j a covariant strategy can exploit: min(n_j, 2j + 1).
/// Beyond 2j + 1 copies no further orthogonal directions exist inside the
/// block, so extra multiplicity is dead weight.
pub fn max_useful_reps(n_spins: u32, j: HalfInt) -> Result<u128> {
    let n_j = multiplicity(n_spins, j)?;
    Ok(n_j.min(j.dimension() as u128))
}

/// Dimension of the orbit subspace spanned by rotations of the optimal
/// input state: (2J + 1) + sum over j < J of (2j + 1)^2, with every
/// sector below the stretched one saturated at its useful-copy cap.
pub fn orbit_dimension(n_spins: u32) -> Result<u64> {
    check_positive(n_spins)?;
    let mut acc = n_spins as u64 + 1;
    let mut tj = n_spins as u64;
    while tj >= 2 {
        tj -= 2;
        acc = (tj + 1)
            .checked_pow(2)
            .and_then(|sq| acc.checked_add(sq))
            .ok_or(Error::ArithmeticOverflow {
                what: "orbit dimension",
            })?;
    }
    Ok(acc)
}

/// Clebsch-Gordan coefficient <j1 m1, j2 m2 | j m> in the Condon-Shortley
/// convention. Malformed labels are errors; selection-rule violations
/// (projection mismatch, triangle failure, parity) return Ok(0.0).
pub fn cg_coefficient(
    j1: HalfInt,
    m1: Projection,
    j2: HalfInt,
    m2: Projection,
    j: HalfInt,
    m: Projection,
) -> Result<f64> {
    m1.validate_for(j1)?;
    m2.validate_for(j2)?;
    m.validate_for(j)?;

    if m1.twice() + m2.twice() != m.twice() {
        return Ok(0.0);
    }
    let (tj1, tj2, tj) = (j1.twice() as i32, j2.twice() as i32, j.twice() as i32);
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }

    let lf = |v: i32| ln_factorial(v as usize);
    let (tm1, tm2, tm) = (m1.twice(), m2.twice(), m.twice());

    // Triangle weight and the projection factorials, all as half-sums of
    // twice-integers; parity checks above make every division exact.
    let g1 = (tj1 + tj2 - tj) / 2;
    let g2 = (tj1 - tj2 + tj) / 2;
    let g3 = (-tj1 + tj2 + tj) / 2;
    let ln_delta = lf(g1) + lf(g2) + lf(g3) - lf((tj1 + tj2 + tj) / 2 + 1);
    let ln_pref = 0.5
        * (((tj + 1) as f64).ln()
            + ln_delta
            + lf((tj + tm) / 2)
            + lf((tj - tm) / 2)
            + lf((tj1 + tm1) / 2)
            + lf((tj1 - tm1) / 2)
            + lf((tj2 + tm2) / 2)
            + lf((tj2 - tm2) / 2));

    let k_min = 0.max(-(tj - tj2 + tm1) / 2).max(-(tj - tj1 - tm2) / 2);
    let k_max = g1.min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);

    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = lf(k)
            + lf(g1 - k)
            + lf((tj1 - tm1) / 2 - k)
            + lf((tj2 + tm2) / 2 - k)
            + lf((tj - tj2 + tm1) / 2 + k)
            + lf((tj - tj1 - tm2) / 2 + k);
        let term = (ln_pref - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(sum)
}
