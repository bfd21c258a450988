//! Game semantics: voters, strategies, payoffs, interval gains, gain
//! sequences and the follower's canonical best response.
//!
//! Every function here accepts multisets of voters. Only the dynamic program
//! in [`crate::dp`] insists on distinct voters.

use std::cmp::Ordering;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Coord, Ext, Scalar};

/// Sorted (non-decreasing) voter coordinates `v_1 <= ... <= v_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VoterSet<S = Coord> {
    voters: Vec<S>,
    distinct: usize,
}

impl<S: Scalar> VoterSet<S> {
    pub fn new(mut voters: Vec<S>) -> Self {
        voters.sort();
        Self::from_sorted_unchecked(voters)
    }

    fn from_sorted_unchecked(voters: Vec<S>) -> Self {
        let distinct =
            voters.windows(2).filter(|w| w[0] != w[1]).count() + usize::from(!voters.is_empty());
        VoterSet { voters, distinct }
    }

    pub fn len(&self) -> usize {
        self.voters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voters.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.voters
    }

    /// `v_i` with the usual 1-based numbering.
    pub fn voter(&self, i: usize) -> &S {
        &self.voters[i - 1]
    }

    /// `v_{i}` for `0 <= i <= n + 1`, with `v_0 = -inf` and `v_{n+1} = +inf`.
    pub fn voter_ext(&self, i: usize) -> Ext<S> {
        if i == 0 {
            Ext::NegInf
        } else if i > self.len() {
            Ext::PosInf
        } else {
            Ext::Finite(self.voters[i - 1].clone())
        }
    }

    /// The leftmost `n` voters.
    pub fn prefix(&self, n: usize) -> VoterSet<S> {
        Self::from_sorted_unchecked(self.voters[..n].to_vec())
    }

    /// Number of distinct positions, `||V||`.
    pub fn distinct_count(&self) -> usize {
        self.distinct
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.distinct == self.voters.len()
    }

    /// Index range (0-based) of the voters lying in the open interval `(x, y)`.
    pub fn open_range(&self, x: &Ext<S>, y: &Ext<S>) -> Range<usize> {
        let lo = self
            .voters
            .partition_point(|v| x.cmp_finite(v) != Ordering::Less);
        let hi = self
            .voters
            .partition_point(|v| y.cmp_finite(v) == Ordering::Greater);
        lo..hi.max(lo)
    }

    /// Number of voters sitting exactly at `x`.
    pub fn multiplicity(&self, x: &S) -> usize {
        let lo = self.voters.partition_point(|v| v < x);
        let hi = self.voters.partition_point(|v| v <= x);
        hi - lo
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> VoterSet<T> {
        VoterSet::new(self.voters.iter().map(f).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Leader,
    Follower,
}

/// A sorted set of played points for one of the two players.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy<S = Coord> {
    points: Vec<S>,
    role: Role,
}

impl<S: Scalar> Strategy<S> {
    pub fn new(mut points: Vec<S>, role: Role) -> Self {
        points.sort();
        Strategy { points, role }
    }

    pub fn leader(points: Vec<S>) -> Self {
        Self::new(points, Role::Leader)
    }

    pub fn follower(points: Vec<S>) -> Self {
        Self::new(points, Role::Follower)
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    pub fn into_points(self) -> Vec<S> {
        self.points
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Interval boundaries `p_0 = -inf, p_1, ..., p_k, p_{k+1} = +inf`.
    pub fn boundaries(&self) -> Vec<Ext<S>> {
        let mut b = Vec::with_capacity(self.points.len() + 2);
        b.push(Ext::NegInf);
        b.extend(self.points.iter().cloned().map(Ext::Finite));
        b.push(Ext::PosInf);
        b
    }
}

/// A validated game `<V, k, l>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameInstance {
    pub voters: VoterSet<Coord>,
    pub k: usize,
    pub l: usize,
}

impl GameInstance {
    /// `k >= ||V||`: the leader can sit on every distinct voter position.
    pub fn leader_covers_all(&self) -> bool {
        self.k >= self.voters.distinct_count()
    }

    /// `l >= 2k`: the follower can surround every leader point.
    pub fn follower_surrounds_all(&self) -> bool {
        self.l >= 2 * self.k
    }

    pub fn is_trivial(&self) -> bool {
        self.leader_covers_all() || self.follower_surrounds_all()
    }
}

pub fn normalize_instance(raw_voters: Vec<Coord>, k: usize, l: usize) -> Result<GameInstance> {
    if raw_voters.is_empty() {
        return Err(Error::InvalidInstance("empty voter list".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInstance(
            "the leader needs at least one point (k >= 1)".into(),
        ));
    }
    if l == 0 {
        return Err(Error::InvalidInstance(
            "the follower needs at least one point (l >= 1)".into(),
        ));
    }
    Ok(GameInstance {
        voters: VoterSet::new(raw_voters),
        k,
        l,
    })
}

fn abs_diff<S: Scalar>(a: &S, b: &S) -> S {
    if a >= b {
        a.sub(b)
    } else {
        b.sub(a)
    }
}

/// Distance from `v` to the nearest point of a sorted, non-empty slice.
fn nearest<S: Scalar>(points: &[S], v: &S) -> Option<S> {
    let i = points.partition_point(|p| p < v);
    let right = points.get(i).map(|p| p.sub(v));
    let left = i.checked_sub(1).map(|j| abs_diff(v, &points[j]));
    match (left, right) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// `|V[P >= Q]|`: voters at least as close to `P` as to `Q`, counted with
/// multiplicity. Ties go to the leader.
pub fn payoff<S: Scalar>(
    voters: &VoterSet<S>,
    leader: &Strategy<S>,
    follower: &Strategy<S>,
) -> usize {
    voters
        .as_slice()
        .iter()
        .filter(
            |v| match (nearest(leader.points(), v), nearest(follower.points(), v)) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(dp), Some(dq)) => dp <= dq,
            },
        )
        .count()
}

/// Voters won by the follower with one (`alpha`) and with a second (`beta`)
/// point inside an open interval between consecutive leader points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GainPair {
    pub alpha: usize,
    pub beta: usize,
}

impl GainPair {
    pub fn population(&self) -> usize {
        self.alpha + self.beta
    }
}

/// Largest number of consecutive voters of `window` whose span `E`
/// satisfies `2E < len`, i.e. that fit in an open interval of length `len/2`.
pub(crate) fn max_coverable<S: Scalar>(window: &[S], len: &S) -> usize {
    let mut best = 0;
    let mut i = 0;
    for j in 0..window.len() {
        while window[j].sub(&window[i]).double() >= *len {
            i += 1;
        }
        best = best.max(j + 1 - i);
    }
    best
}

fn gains_unchecked<S: Scalar>(voters: &VoterSet<S>, x: &Ext<S>, y: &Ext<S>) -> GainPair {
    if x >= y {
        return GainPair { alpha: 0, beta: 0 };
    }
    let range = voters.open_range(x, y);
    let population = range.len();
    let alpha = match (x, y) {
        (Ext::Finite(x), Ext::Finite(y)) => max_coverable(&voters.as_slice()[range], &y.sub(x)),
        _ => population,
    };
    GainPair {
        alpha,
        beta: population - alpha,
    }
}

pub fn interval_gains<S: Scalar>(voters: &VoterSet<S>, x: &Ext<S>, y: &Ext<S>) -> Result<GainPair> {
    if x >= y {
        return Err(Error::InvalidInterval);
    }
    Ok(gains_unchecked(voters, x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GainKind {
    Alpha,
    Beta,
}

/// One entry of a gain sequence.
///
/// `Ord` is the sequence order: larger values first, then earlier intervals,
/// then the alpha-gain before the beta-gain of the same interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GainEntry {
    pub value: usize,
    pub interval: usize,
    pub kind: GainKind,
}

impl Ord for GainEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .cmp(&self.value)
            .then(self.interval.cmp(&other.interval))
            .then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for GainEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainSequence {
    entries: Vec<GainEntry>,
    intervals: usize,
}

impl GainSequence {
    pub fn from_pairs(pairs: &[GainPair]) -> Self {
        let mut entries = Vec::with_capacity(2 * pairs.len());
        for (interval, g) in pairs.iter().enumerate() {
            entries.push(GainEntry {
                value: g.alpha,
                interval,
                kind: GainKind::Alpha,
            });
            entries.push(GainEntry {
                value: g.beta,
                interval,
                kind: GainKind::Beta,
            });
        }
        entries.sort();
        GainSequence {
            entries,
            intervals: pairs.len(),
        }
    }

    pub fn entries(&self) -> &[GainEntry] {
        &self.entries
    }

    pub fn values(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Number of leader intervals, `k + 1`.
    pub fn interval_count(&self) -> usize {
        self.intervals
    }

    /// `tau_i` (1-based). `tau_0` is `+inf` (`None`); positions past the end
    /// read as zero.
    pub fn tau(&self, i: usize) -> Option<usize> {
        match i {
            0 => None,
            _ => Some(self.entries.get(i - 1).map_or(0, |e| e.value)),
        }
    }
}

pub fn gain_sequence<S: Scalar>(voters: &VoterSet<S>, leader: &Strategy<S>) -> GainSequence {
    let bounds = leader.boundaries();
    let pairs: Vec<GainPair> = bounds
        .windows(2)
        .map(|w| gains_unchecked(voters, &w[0], &w[1]))
        .collect();
    GainSequence::from_pairs(&pairs)
}

/// `M(V, P, Q)`: how many follower points go into each leader interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceRepresentation {
    pub m: Vec<u8>,
}

impl SequenceRepresentation {
    pub fn points(&self) -> usize {
        self.m.iter().map(|&c| c as usize).sum()
    }
}

/// The follower's canonical `l`-point response: the first `l` entries of the
/// gain sequence. Returns the representation and the follower's winnings.
pub fn canonical_response<S: Scalar>(
    voters: &VoterSet<S>,
    leader: &Strategy<S>,
    l: usize,
) -> (SequenceRepresentation, usize) {
    let seq = gain_sequence(voters, leader);
    let mut m = vec![0u8; seq.interval_count()];
    let mut won = 0;
    for e in seq.entries().iter().take(l) {
        m[e.interval] += 1;
        won += e.value;
    }
    (SequenceRepresentation { m }, won)
}

/// Leader's guaranteed payoff against the best `l`-point follower response.
pub fn guaranteed_payoff<S: Scalar>(voters: &VoterSet<S>, leader: &Strategy<S>, l: usize) -> usize {
    voters.len() - canonical_response(voters, leader, l).1
}

/// Voters won by the follower for a given representation.
pub fn representation_winnings<S: Scalar>(
    voters: &VoterSet<S>,
    leader: &Strategy<S>,
    rep: &SequenceRepresentation,
) -> Result<usize> {
    let bounds = leader.boundaries();
    check_representation(rep, bounds.len() - 1)?;
    Ok(bounds
        .windows(2)
        .zip(&rep.m)
        .map(|(w, &c)| {
            let g = gains_unchecked(voters, &w[0], &w[1]);
            match c {
                0 => 0,
                1 => g.alpha,
                _ => g.population(),
            }
        })
        .sum())
}

fn check_representation(rep: &SequenceRepresentation, intervals: usize) -> Result<()> {
    if rep.m.len() != intervals {
        return Err(Error::InvalidRepresentation(format!(
            "expected {intervals} interval counts, got {}",
            rep.m.len()
        )));
    }
    if let Some(c) = rep.m.iter().find(|&&c| c > 2) {
        return Err(Error::InvalidRepresentation(format!(
            "interval count {c} exceeds 2"
        )));
    }
    Ok(())
}

/// Chooses a follower point in `(lo, hi)` that wins exactly the voters of
/// the leftmost alpha-achieving group.
fn single_point(voters: &VoterSet<Coord>, x: &Ext<Coord>, y: &Ext<Coord>) -> Option<Coord> {
    let range = voters.open_range(x, y);
    let inside = &voters.as_slice()[range];
    let (first, last) = match (inside.first(), inside.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return match (x, y) {
                (Ext::Finite(x), Ext::Finite(y)) => Some(Coord::midpoint(x, y)),
                (Ext::Finite(x), _) => Some(x.add(&Coord::integer(1))),
                (_, Ext::Finite(y)) => Some(y.sub(&Coord::integer(1))),
                _ => Some(Coord::integer(0)),
            };
        }
    };
    // A follower point q inside (x, y) wins exactly the voters in the open
    // interval ((x + q) / 2, (q + y) / 2).
    let (group_lo, group_hi, lo, hi) = match (x, y) {
        (Ext::Finite(x), Ext::Finite(y)) => {
            let len = y.sub(x);
            let alpha = max_coverable(inside, &len);
            let start = (0..=inside.len() - alpha)
                .find(|&i| inside[i + alpha - 1].sub(&inside[i]).double() < len)?;
            let (a, b) = (&inside[start], &inside[start + alpha - 1]);
            let lo = x.clone().max(b.double().sub(y));
            let hi = y.clone().min(a.double().sub(x));
            (a.clone(), b.clone(), Ext::Finite(lo), Ext::Finite(hi))
        }
        (Ext::Finite(x), _) => (
            first.clone(),
            last.clone(),
            Ext::Finite(x.clone()),
            Ext::Finite(first.double().sub(x)),
        ),
        (_, Ext::Finite(y)) => (
            first.clone(),
            last.clone(),
            Ext::Finite(last.double().sub(y)),
            Ext::Finite(y.clone()),
        ),
        _ => return Some(Coord::midpoint(first, last)),
    };
    let center = Coord::midpoint(&group_lo, &group_hi);
    let inside_range =
        lo.cmp_finite(&center) == Ordering::Less && hi.cmp_finite(&center) == Ordering::Greater;
    if inside_range {
        return Some(center);
    }
    match (lo, hi) {
        (Ext::Finite(lo), Ext::Finite(hi)) => Some(Coord::midpoint(&lo, &hi)),
        _ => None,
    }
}

/// Turns a sequence representation into explicit follower coordinates.
///
/// One point in an interval sits in the middle of the feasible placements
/// for the leftmost alpha-achieving voter group (the group's center when
/// that is feasible). Two points in a bounded interval `(x, y)` sit at
/// `x + eps` and `y - eps`, where `eps` is half the smallest distance from
/// an inside voter to the interval ends, or `(y - x) / 4` without voters.
pub fn realize_response(
    voters: &VoterSet<Coord>,
    leader: &Strategy<Coord>,
    rep: &SequenceRepresentation,
) -> Result<Strategy<Coord>> {
    let bounds = leader.boundaries();
    check_representation(rep, bounds.len() - 1)?;
    let mut points = Vec::with_capacity(rep.points());
    for (w, &count) in bounds.windows(2).zip(&rep.m) {
        let (x, y) = (&w[0], &w[1]);
        if count == 0 || x >= y {
            continue;
        }
        if count == 2 {
            if let (Ext::Finite(xf), Ext::Finite(yf)) = (x, y) {
                let range = voters.open_range(x, y);
                let eps = voters.as_slice()[range]
                    .iter()
                    .map(|v| v.sub(xf).min(yf.sub(v)))
                    .min()
                    .map(|d| d.half())
                    .unwrap_or_else(|| yf.sub(xf).div_int(4));
                points.push(xf.add(&eps));
                points.push(yf.sub(&eps));
                continue;
            }
        }
        let q = single_point(voters, x, y)
            .ok_or_else(|| Error::InternalError("no feasible follower placement".into()))?;
        if count == 2 {
            // Unbounded interval: the second point wins nothing extra.
            let extra = if matches!(y, Ext::PosInf) {
                q.add(&Coord::integer(1))
            } else {
                q.sub(&Coord::integer(1))
            };
            points.push(extra);
        }
        points.push(q);
    }
    Ok(Strategy::follower(points))
}

/// Strictness of an `l`-threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strictness {
    Loose,
    Strict,
}

impl Strictness {
    pub const BOTH: [Strictness; 2] = [Strictness::Loose, Strictness::Strict];

    pub fn index(self) -> usize {
        match self {
            Strictness::Loose => 0,
            Strictness::Strict => 1,
        }
    }
}

/// A valid `l`-threshold together with its strictness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThresholdClass {
    pub tau: usize,
    pub strictness: Strictness,
}

/// Strict iff `tau_l >= tau > tau_{l+1}`, loose iff `tau == tau_{l+1}`,
/// `None` otherwise. `tau_0` counts as `+inf`.
pub fn classify_threshold(seq: &GainSequence, l: usize, tau: usize) -> Option<Strictness> {
    let upper_ok = seq.tau(l).is_none_or(|t| t >= tau);
    let next = seq.tau(l + 1).unwrap_or(0);
    if upper_ok && tau > next {
        Some(Strictness::Strict)
    } else if tau == next {
        Some(Strictness::Loose)
    } else {
        None
    }
}

/// The leader's trivial strategy: the `k` most frequent voter positions,
/// smaller coordinates first among equal multiplicities.
pub fn trivial_strategy<S: Scalar>(
    voters: &VoterSet<S>,
    k: usize,
    l: usize,
) -> (Strategy<S>, usize) {
    let mut groups: Vec<(usize, &S)> = Vec::new();
    for v in voters.as_slice() {
        match groups.last_mut() {
            Some((count, pos)) if *pos == v => *count += 1,
            _ => groups.push((1, v)),
        }
    }
    // Stable sort keeps ascending coordinates within equal multiplicity.
    groups.sort_by_key(|g| std::cmp::Reverse(g.0));
    let leader = Strategy::leader(groups.iter().take(k).map(|(_, p)| (*p).clone()).collect());
    let value = guaranteed_payoff(voters, &leader, l);
    (leader, value)
}
