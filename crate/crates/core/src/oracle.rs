//! Exhaustive ground truth for small integer instances, and a randomized
//! adversary for checking claimed leader payoffs.
//!
//! With integer voters, the leader's payoff against the best response is
//! constant on the cells of the arrangement cut by `p_i = v_j` and
//! `p_{i+1} - p_i = 2(v_b - v_a)`. All of those hyperplanes pass through
//! integer points, so a grid of step `1/4` meets the interior of every
//! full-dimensional cell, and voter coordinates cover the tie-favouring
//! boundary placements.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    canonical_response, normalize_instance, payoff, GameInstance, Strategy, VoterSet,
};
use crate::scalar::{Coord, Scalar};

pub const MAX_ORACLE_VOTERS: usize = 7;
pub const MAX_ORACLE_POINTS: usize = 3;

/// Candidate leader positions: `[v_1 - 1, v_n + 1]` in steps of `step`,
/// plus every voter coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateGrid {
    pub step: Coord,
    pub lo: Coord,
    pub hi: Coord,
    pub extra: Vec<Coord>,
}

impl CandidateGrid {
    pub fn for_voters(voters: &VoterSet<Coord>) -> Self {
        let one = Coord::integer(1);
        let (lo, hi) = match (voters.as_slice().first(), voters.as_slice().last()) {
            (Some(a), Some(b)) => (a.sub(&one), b.add(&one)),
            _ => (Coord::integer(-1), one),
        };
        CandidateGrid {
            step: Coord::new(1, 4).expect("nonzero"),
            lo,
            hi,
            extra: voters.as_slice().to_vec(),
        }
    }

    pub fn points(&self) -> Vec<Coord> {
        let mut out = self.extra.clone();
        let mut x = self.lo.clone();
        while x <= self.hi {
            out.push(x.clone());
            x = x.add(&self.step);
        }
        out.sort();
        out.dedup();
        out
    }
}

fn guard(voters: &VoterSet<Coord>, k: usize) -> Result<()> {
    if voters.len() > MAX_ORACLE_VOTERS || k > MAX_ORACLE_POINTS {
        return Err(Error::OracleTooLarge(format!(
            "n = {}, k = {k}; the oracle handles n <= {MAX_ORACLE_VOTERS} and k <= {MAX_ORACLE_POINTS}",
            voters.len()
        )));
    }
    if !voters.as_slice().iter().all(Coord::is_integer) {
        return Err(Error::InvalidInstance(
            "the oracle needs integer voter coordinates".into(),
        ));
    }
    Ok(())
}

/// `Gamma` by trying every set of at most `k` grid positions against the
/// canonical best response. Returns the first best set in lexicographic order.
pub fn oracle_gamma(
    voters: &VoterSet<Coord>,
    k: usize,
    l: usize,
) -> Result<(usize, Strategy<Coord>)> {
    guard(voters, k)?;
    if k == 0 {
        return Ok((
            if l == 0 { voters.len() } else { 0 },
            Strategy::leader(Vec::new()),
        ));
    }
    // Quarter grid, scaled by 4 onto the integers.
    let scaled: VoterSet<i64> = VoterSet::new(
        voters
            .as_slice()
            .iter()
            .map(|v| v.numer().try_into().map(|x: i64| 4 * x))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::OracleTooLarge("coordinates out of range".into()))?,
    );
    let lo = scaled.as_slice().first().copied().unwrap_or(0) - 4;
    let hi = scaled.as_slice().last().copied().unwrap_or(0) + 4;
    let grid: Vec<i64> = (lo..=hi).collect();
    let n = voters.len();
    let value = |p: &[i64]| n - canonical_response(&scaled, &Strategy::leader(p.to_vec()), l).1;

    let best = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut best: (usize, Vec<i64>) = (0, Vec::new());
            let mut current = vec![grid[i]];
            search(&grid, i, k, &mut current, &value, &mut best);
            best
        })
        .reduce(
            || (0, Vec::new()),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && a.1.is_empty()) {
                    b
                } else {
                    a
                }
            },
        );
    let p = best
        .1
        .iter()
        .map(|&x| Coord::new(x, 4).expect("nonzero"))
        .collect();
    Ok((best.0, Strategy::leader(p)))
}

/// Depth-first over increasing index tuples starting with `current`.
fn search(
    grid: &[i64],
    last: usize,
    k: usize,
    current: &mut Vec<i64>,
    value: &(impl Fn(&[i64]) -> usize + Sync),
    best: &mut (usize, Vec<i64>),
) {
    let v = value(current);
    if v > best.0 || best.1.is_empty() {
        *best = (v, current.clone());
    }
    if current.len() == k {
        return;
    }
    for j in last + 1..grid.len() {
        current.push(grid[j]);
        search(grid, j, k, current, value, best);
        current.pop();
    }
}

/// Samples `trials` follower strategies of at most `l` points and checks
/// that none of them pushes the leader below `claimed`.
pub fn adversary_check(
    voters: &VoterSet<Coord>,
    leader: &Strategy<Coord>,
    l: usize,
    claimed: usize,
    trials: usize,
    seed: u64,
) -> bool {
    if l == 0 {
        return claimed <= voters.len();
    }
    let mut pool = CandidateGrid::for_voters(voters).points();
    // Positions hugging the leader's points are the strongest single moves.
    let eps = Coord::new(1, 1024).expect("nonzero");
    for p in leader.points() {
        pool.push(p.add(&eps));
        pool.push(p.sub(&eps));
    }
    let (lo, hi) = match (pool.first(), pool.last()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return claimed <= voters.len(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).all(|_| {
        let size = rng.gen_range(1..=l);
        let q: Vec<Coord> = (0..size)
            .map(|_| {
                if rng.gen_bool(0.7) {
                    pool.choose(&mut rng).expect("non-empty pool").clone()
                } else {
                    random_rational(&mut rng, &lo, &hi)
                }
            })
            .collect();
        payoff(voters, leader, &Strategy::follower(q)) >= claimed
    })
}

fn random_rational(rng: &mut impl Rng, lo: &Coord, hi: &Coord) -> Coord {
    let den: i64 = rng.gen_range(1..=16);
    let t = Coord::new(rng.gen_range(0..=den), den).expect("nonzero");
    let span = hi.sub(lo);
    let scaled = Coord::from_ratio(span.as_ratio() * t.as_ratio());
    lo.add(&scaled)
}

/// A random instance with distinct integer voters in `[0, 40]`,
/// `n` in `[2, max_n]`, `k` in `[1, max_k]` and `l` in `[1, min(2k + 1, n)]`.
pub fn random_instance(rng: &mut impl Rng, max_n: usize, max_k: usize) -> GameInstance {
    let n = rng.gen_range(2..=max_n.max(2));
    let k = rng.gen_range(1..=max_k.max(1));
    let l = rng.gen_range(1..=(2 * k + 1).min(n));
    let mut all: Vec<i64> = (0..=40).collect();
    all.shuffle(rng);
    let voters = all[..n].iter().map(|&v| Coord::integer(v)).collect();
    normalize_instance(voters, k, l).expect("valid by construction")
}
