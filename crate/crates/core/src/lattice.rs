//! Integer lattice for rational voter sets.
//!
//! Every value the solver produces is either a voter coordinate or a value
//! `x + 2 (v_j - v_i)` built from earlier ones, so after multiplying all
//! voters by the common denominator the whole computation stays on the
//! integers. The fast path runs on `i64` when the scaled coordinates leave
//! enough headroom for those sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::game::{Strategy, VoterSet};
use crate::scalar::{common_denominator, Coord, Ext};

/// Largest scaled magnitude accepted; intermediate values stay below `16x` this.
const HEADROOM: i64 = 1 << 58;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    scale: BigInt,
}

impl Lattice {
    /// Scales `voters` onto the integers, or `None` if the result would not
    /// fit comfortably in `i64`.
    pub fn embed(voters: &VoterSet<Coord>) -> Option<(Lattice, VoterSet<i64>)> {
        let scale = common_denominator(voters.as_slice());
        let scaled: Option<Vec<i64>> = voters
            .as_slice()
            .iter()
            .map(|v| {
                let s = (v.numer() * &scale) / v.denom();
                s.to_i64().filter(|x| x.abs() < HEADROOM)
            })
            .collect();
        let scaled = scaled?;
        let lo = scaled.first().copied().unwrap_or(0);
        let hi = scaled.last().copied().unwrap_or(0);
        if hi.checked_sub(lo)? >= HEADROOM {
            return None;
        }
        Some((Lattice { scale }, VoterSet::new(scaled)))
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn to_coord(&self, x: i64) -> Coord {
        Coord::from_ratio(BigRational::new(BigInt::from(x), self.scale.clone()))
    }

    pub fn ext_to_coord(&self, x: Ext<i64>) -> Ext<Coord> {
        x.map(|v| self.to_coord(v))
    }

    pub fn strategy_to_coord(&self, p: &Strategy<i64>) -> Strategy<Coord> {
        Strategy::new(
            p.points().iter().map(|&x| self.to_coord(x)).collect(),
            p.role(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeds_rationals() {
        let v = VoterSet::new(vec![
            Coord::new(1, 2).unwrap(),
            Coord::new(2, 3).unwrap(),
            Coord::integer(-1),
        ]);
        let (lat, s) = Lattice::embed(&v).unwrap();
        assert_eq!(lat.scale(), &BigInt::from(6));
        assert_eq!(s.as_slice(), &[-6, 3, 4]);
        assert_eq!(lat.to_coord(3), Coord::new(1, 2).unwrap());
    }

    #[test]
    fn rejects_huge_coordinates() {
        let v = VoterSet::new(vec![Coord::integer(0), Coord::integer(i64::MAX)]);
        assert!(Lattice::embed(&v).is_none());
        let v = VoterSet::new(vec![Coord::integer(-(1 << 57)), Coord::integer(1 << 57)]);
        assert!(Lattice::embed(&v).is_none());
    }
}
