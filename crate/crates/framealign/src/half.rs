//! Half-integer spin labels and magnetic projections.
//!
//! Both types store twice the physical value so that every label is an exact
//! integer. `HalfInt` is a non-negative total spin j, `Projection` a signed
//! magnetic quantum number m with |m| <= j and the same parity as j.

use std::fmt;

use crate::error::{Error, Result};

/// Non-negative half-integer spin label j, stored as 2j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(into = "f64")]
pub struct HalfInt {
    twice: u32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    /// Builds j from 2j.
    pub const fn from_twice(twice: u32) -> Self {
        HalfInt { twice }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Dimension 2j + 1 of the spin-j irreducible space.
    pub const fn dimension(self) -> usize {
        self.twice as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// All projections m = -j, -j + 1, ..., +j in ascending order.
    pub fn projections(self) -> Vec<Projection> {
        let tj = self.twice as i32;
        (0..=self.twice)
            .map(|i| Projection {
                twice: 2 * i as i32 - tj,
            })
            .collect()
    }

    /// The projection m = +j.
    pub const fn top_projection(self) -> Projection {
        Projection {
            twice: self.twice as i32,
        }
    }
}

impl From<HalfInt> for f64 {
    fn from(j: HalfInt) -> f64 {
        j.as_f64()
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Signed magnetic projection m, stored as 2m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Projection {
    twice: i32,
}

impl Projection {
    /// Builds m from 2m.
    pub const fn from_twice(twice: i32) -> Self {
        Projection { twice }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Checks |m| <= j and 2m = 2j (mod 2).
    pub fn validate_for(self, j: HalfInt) -> Result<()> {
        let tj = j.twice() as i32;
        if self.twice.abs() > tj || (self.twice - tj).rem_euclid(2) != 0 {
            return Err(Error::InvalidProjection {
                twice_j: j.twice(),
                twice_m: self.twice,
            });
        }
        Ok(())
    }

    /// Row or column index of this projection in the ascending m basis of spin j.
    ///
    /// Callers must pass a projection valid for j.
    pub fn index_in(self, j: HalfInt) -> usize {
        ((self.twice + j.twice() as i32) / 2) as usize
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_whole_and_half() {
        assert_eq!(HalfInt::from_twice(4).to_string(), "2");
        assert_eq!(HalfInt::from_twice(3).to_string(), "3/2");
        assert_eq!(Projection::from_twice(-3).to_string(), "-3/2");
        assert_eq!(Projection::from_twice(2).to_string(), "1");
    }

    #[test]
    fn projections_ascend_and_index() {
        let j = HalfInt::from_twice(3);
        let ms = j.projections();
        assert_eq!(ms.len(), 4);
        assert_eq!(ms[0], Projection::from_twice(-3));
        assert_eq!(ms[3], Projection::from_twice(3));
        for (i, m) in ms.iter().enumerate() {
            assert_eq!(m.index_in(j), i);
            m.validate_for(j).unwrap();
        }
    }

    #[test]
    fn projection_validation_rejects_bad_labels() {
        let j = HalfInt::ONE;
        assert!(Projection::from_twice(4).validate_for(j).is_err());
        assert!(Projection::from_twice(1).validate_for(j).is_err());
        assert!(Projection::from_twice(-2).validate_for(j).is_ok());
    }

    #[test]
    fn dimension_counts_projections() {
        for tj in 0..12 {
            let j = HalfInt::from_twice(tj);
            assert_eq!(j.dimension(), j.projections().len());
        }
    }
}
