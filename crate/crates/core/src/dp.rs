//! The threshold dynamic program.
//!
//! For a fixed threshold `tau`, the subproblem `<n, k, l, gamma, delta>` asks
//! for a leader strategy of `k + 1` points on the prefix `V_n` that wins at
//! least `gamma` voters against `l` follower points, induces an `l`-threshold
//! `tau` of strictness `delta`, and pushes its last point as far right as
//! possible inside `(v_n, v_{n+1}]`. Its value `X(I)` is that rightmost
//! position, `-inf` if infeasible, and `+inf` for `n = n*` when the last point
//! is not needed at all.
//!
//! Values are filled by a left-to-right sweep: when the sweep reaches the
//! final value of a solved subproblem it pushes that value forward to every
//! larger subproblem that can extend it by one point.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gainmap::{AMap, SpanEntry};
use crate::game::{
    canonical_response, classify_threshold, interval_gains, trivial_strategy, GainPair,
    GainSequence, GameInstance, Strategy, Strictness, VoterSet,
};
use crate::lattice::Lattice;
use crate::scalar::{Coord, Ext, Scalar};

/// `a (+)_j b`: voters the follower takes from an interval with `j` points.
pub fn oplus(a: usize, b: usize, j: u8) -> usize {
    match j {
        0 => 0,
        1 => a,
        _ => a + b,
    }
}

/// `(delta', j, delta)`: extending a solution of strictness `delta'` by an
/// interval that receives `j` follower points yields strictness `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TransitionTriple {
    pub from: Strictness,
    pub j: u8,
    pub to: Strictness,
}

const fn triple(from: Strictness, j: u8, to: Strictness) -> TransitionTriple {
    TransitionTriple { from, j, to }
}

use Strictness::{Loose as L, Strict as S};

const GT_GT: &[TransitionTriple] = &[triple(L, 2, L), triple(S, 2, S)];
const GT_EQ: &[TransitionTriple] = &[triple(L, 1, L), triple(S, 1, L), triple(S, 2, S)];
const GT_LT: &[TransitionTriple] = &[triple(L, 1, L), triple(S, 1, S)];
const EQ_EQ: &[TransitionTriple] = &[
    triple(L, 0, L),
    triple(S, 0, L),
    triple(S, 1, L),
    triple(S, 2, S),
];
const EQ_LT: &[TransitionTriple] = &[triple(L, 0, L), triple(S, 0, L), triple(S, 1, S)];
const LT_LT: &[TransitionTriple] = &[triple(L, 0, L), triple(S, 0, S)];

/// The admissible transitions for an interval with gains `(a, b)`.
pub fn delta_triples(tau: usize, a: usize, b: usize) -> Result<&'static [TransitionTriple]> {
    if a < b {
        return Err(Error::InvalidGains { alpha: a, beta: b });
    }
    Ok(match (a.cmp(&tau), b.cmp(&tau)) {
        (Ordering::Greater, Ordering::Greater) => GT_GT,
        (Ordering::Greater, Ordering::Equal) => GT_EQ,
        (Ordering::Greater, Ordering::Less) => GT_LT,
        (Ordering::Equal, Ordering::Equal) => EQ_EQ,
        (Ordering::Equal, Ordering::Less) => EQ_LT,
        (Ordering::Less, Ordering::Less) => LT_LT,
        _ => unreachable!("a >= b"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubproblemKey {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub gamma: usize,
    pub delta: Strictness,
}

/// How a cell got its value: extend `<n', k-1, l-j, gamma', delta'>` by an
/// interval with gains `(a, b)` receiving `j` follower points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BackPointer {
    pub n_prev: u32,
    pub a: u32,
    pub b: u32,
    pub j: u8,
    pub delta_prev: Strictness,
}

impl BackPointer {
    pub fn predecessor(&self, key: &SubproblemKey) -> Option<SubproblemKey> {
        let (n_prev, a, b) = (self.n_prev as usize, self.a as usize, self.b as usize);
        let gamma = (key.gamma + oplus(a, b, self.j)).checked_sub(key.n - n_prev)?;
        Some(SubproblemKey {
            n: n_prev,
            k: key.k.checked_sub(1)?,
            l: key.l.checked_sub(self.j as usize)?,
            gamma,
            delta: self.delta_prev,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell<S = Coord> {
    pub x_max: Ext<S>,
    pub back: Option<BackPointer>,
}

/// Which keys the sweep stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KeySpace {
    /// Every key with `k <= k*`, `l <= l*` and `l < 2(k + 1)`.
    #[default]
    Full,
    /// Only keys that can still lead to `<n*, k*, l*, _, _>`. Leaves the
    /// extracted value and the reconstructed strategy unchanged.
    GoalDirected,
}

/// One row of cells sharing `(n, k, l, delta)`, indexed by `gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row<S> {
    x: Vec<Ext<S>>,
    back: Vec<Option<BackPointer>>,
}

/// One improving write: key, old value, new value.
pub type TraceEntry<S> = (SubproblemKey, Ext<S>, Ext<S>);

/// `X(I)` for every stored key of one threshold run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubproblemTable<S = Coord> {
    tau: usize,
    n_star: usize,
    k_star: usize,
    l_star: usize,
    space: KeySpace,
    rows: Vec<Option<Row<S>>>,
    trace: Option<Vec<TraceEntry<S>>>,
}

impl<S: Scalar> SubproblemTable<S> {
    fn new(
        tau: usize,
        n_star: usize,
        k_star: usize,
        l_star: usize,
        space: KeySpace,
        trace: bool,
    ) -> Self {
        let count = (n_star + 1) * (k_star + 1) * (l_star + 1) * 2;
        SubproblemTable {
            tau,
            n_star,
            k_star,
            l_star,
            space,
            rows: vec![None; count],
            trace: trace.then(Vec::new),
        }
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_star, self.k_star, self.l_star)
    }

    fn row_index(&self, n: usize, k: usize, l: usize, delta: Strictness) -> usize {
        ((n * (self.k_star + 1) + k) * (self.l_star + 1) + l) * 2 + delta.index()
    }

    fn row_key(&self, row: usize) -> (usize, usize, usize, Strictness) {
        let delta = Strictness::BOTH[row % 2];
        let rest = row / 2;
        let l = rest % (self.l_star + 1);
        let rest = rest / (self.l_star + 1);
        (rest / (self.k_star + 1), rest % (self.k_star + 1), l, delta)
    }

    /// Whether `(n, k, l)` is ever stored.
    pub fn admits(&self, n: usize, k: usize, l: usize) -> bool {
        if n > self.n_star || k > self.k_star || l > self.l_star || l >= 2 * (k + 1) || k > n {
            return false;
        }
        match self.space {
            KeySpace::Full => true,
            KeySpace::GoalDirected => {
                let (ns, ks, ls) = (self.n_star, self.k_star, self.l_star);
                let reaches = ns - n >= ks - k && l + 2 * (ks - k) >= ls;
                let at_end = n == ns || k == ks;
                reaches && (!at_end || (n == ns && k == ks && l == ls))
            }
        }
    }

    fn row_mut(&mut self, n: usize, k: usize, l: usize, delta: Strictness) -> &mut Row<S> {
        let i = self.row_index(n, k, l, delta);
        self.rows[i].get_or_insert_with(|| Row {
            x: vec![Ext::NegInf; n + 1],
            back: vec![None; n + 1],
        })
    }

    pub fn get(&self, key: &SubproblemKey) -> Ext<S> {
        self.cell(key).x_max
    }

    pub fn cell(&self, key: &SubproblemKey) -> Cell<S> {
        if key.n > self.n_star || key.k > self.k_star || key.l > self.l_star || key.gamma > key.n {
            return Cell {
                x_max: Ext::NegInf,
                back: None,
            };
        }
        match &self.rows[self.row_index(key.n, key.k, key.l, key.delta)] {
            Some(row) => Cell {
                x_max: row.x[key.gamma].clone(),
                back: row.back[key.gamma],
            },
            None => Cell {
                x_max: Ext::NegInf,
                back: None,
            },
        }
    }

    /// All keys with a value above `-inf`, in key order.
    pub fn finite_cells(&self) -> Vec<(SubproblemKey, Cell<S>)> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let Some(row) = row else { continue };
            let (n, k, l, delta) = self.row_key(i);
            for (gamma, x) in row.x.iter().enumerate() {
                if *x != Ext::NegInf {
                    let key = SubproblemKey {
                        n,
                        k,
                        l,
                        gamma,
                        delta,
                    };
                    out.push((
                        key,
                        Cell {
                            x_max: x.clone(),
                            back: row.back[gamma],
                        },
                    ));
                }
            }
        }
        out.sort_by_key(|e| e.0);
        out
    }

    /// Every improving write `(key, old, new)` in order, when tracing was on.
    pub fn trace(&self) -> Option<&[TraceEntry<S>]> {
        self.trace.as_deref()
    }

    fn relax(&mut self, key: SubproblemKey, y: &Ext<S>, back: Option<BackPointer>) {
        let row = self.row_mut(key.n, key.k, key.l, key.delta);
        if *y > row.x[key.gamma] {
            let old = std::mem::replace(&mut row.x[key.gamma], y.clone());
            row.back[key.gamma] = back;
            if let Some(t) = &mut self.trace {
                t.push((key, old, y.clone()));
            }
        }
    }
}

/// Gain sequence of `{v_{n+1}}` on `V_n`, with `v_{n*+1} = +inf`, and the
/// number of voters the leader keeps against `l` follower points.
fn elementary_profile<S: Scalar>(
    voters: &VoterSet<S>,
    n: usize,
    l: usize,
) -> (GainSequence, usize) {
    let prefix = voters.prefix(n);
    let p = voters.voter_ext(n + 1);
    let left = interval_gains(&prefix, &Ext::NegInf, &p).expect("p above -inf");
    let right = if p == Ext::PosInf {
        GainPair { alpha: 0, beta: 0 }
    } else {
        interval_gains(&prefix, &p, &Ext::PosInf).expect("p below +inf")
    };
    let seq = GainSequence::from_pairs(&[left, right]);
    let lost: usize = seq.values().iter().take(l).sum();
    (seq, n - lost)
}

/// `X(<n, 0, l, gamma, delta>)`: `v_{n+1}` if `{v_{n+1}}` keeps at least
/// `gamma` voters of `V_n` against `l` points and induces the threshold
/// `tau` with strictness `delta` there, else `-inf`.
pub fn solve_elementary<S: Scalar>(
    voters: &VoterSet<S>,
    n: usize,
    l: usize,
    gamma: usize,
    delta: Strictness,
    tau: usize,
) -> Ext<S> {
    let (seq, kept) = elementary_profile(voters, n, l);
    elementary_value(voters, n, &seq, kept, l, gamma, delta, tau)
}

#[allow(clippy::too_many_arguments)]
fn elementary_value<S: Scalar>(
    voters: &VoterSet<S>,
    n: usize,
    seq: &GainSequence,
    kept: usize,
    l: usize,
    gamma: usize,
    delta: Strictness,
    tau: usize,
) -> Ext<S> {
    if gamma <= kept && classify_threshold(seq, l, tau) == Some(delta) {
        voters.voter_ext(n + 1)
    } else {
        Ext::NegInf
    }
}

/// A sweep event. Map events are applied through [`crate::gainmap::SweepState`];
/// the queue itself holds subproblem batches and update events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SweepEvent<S = Coord> {
    AMap {
        x: S,
        level: usize,
    },
    BMap {
        x: S,
        n: usize,
    },
    /// Cells of one row that share the value `x`.
    Subproblem {
        x: Ext<S>,
        row: usize,
        gammas: Vec<u32>,
    },
    /// The sweep reaches `v_n`: every solved cell of size `n` is queued.
    Update {
        x: S,
        n: usize,
    },
}

impl<S: Scalar> SweepEvent<S> {
    pub fn x(&self) -> Ext<S> {
        match self {
            SweepEvent::AMap { x, .. }
            | SweepEvent::BMap { x, .. }
            | SweepEvent::Update { x, .. } => Ext::Finite(x.clone()),
            SweepEvent::Subproblem { x, .. } => x.clone(),
        }
    }

    pub fn rank(&self) -> u8 {
        match self {
            SweepEvent::AMap { .. } => 0,
            SweepEvent::BMap { .. } => 1,
            SweepEvent::Subproblem { .. } => 2,
            SweepEvent::Update { .. } => 3,
        }
    }

    fn tiebreak(&self) -> usize {
        match self {
            SweepEvent::AMap { level, .. } => *level,
            SweepEvent::BMap { n, .. } | SweepEvent::Update { n, .. } => *n,
            SweepEvent::Subproblem { row, .. } => *row,
        }
    }
}

impl<S: Scalar> Ord for SweepEvent<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.x()
            .cmp(&other.x())
            .then(self.rank().cmp(&other.rank()))
            .then(self.tiebreak().cmp(&other.tiebreak()))
    }
}

impl<S: Scalar> PartialOrd for SweepEvent<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Run options for [`compute_solutions_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub space: KeySpace,
    pub trace: bool,
}

/// Fills the table for one threshold over the full key space.
pub fn compute_solutions<S: Scalar>(
    tau: usize,
    voters: &VoterSet<S>,
    k_star: usize,
    l_star: usize,
    map: &AMap<S>,
) -> Result<SubproblemTable<S>> {
    compute_solutions_with(tau, voters, k_star, l_star, map, RunOptions::default())
}

pub fn compute_solutions_with<S: Scalar>(
    tau: usize,
    voters: &VoterSet<S>,
    k_star: usize,
    l_star: usize,
    map: &AMap<S>,
    opts: RunOptions,
) -> Result<SubproblemTable<S>> {
    if !voters.is_strictly_increasing() {
        return Err(Error::RequiresDistinctVoters);
    }
    if map.voters() != voters {
        return Err(Error::InternalError(
            "gain map built for a different voter set".into(),
        ));
    }
    let n_star = voters.len();
    let mut table = SubproblemTable::new(tau, n_star, k_star, l_star, opts.space, opts.trace);

    for n in 0..=n_star {
        for l in 0..=l_star.min(1) {
            if !table.admits(n, 0, l) {
                continue;
            }
            let (seq, kept) = elementary_profile(voters, n, l);
            for delta in Strictness::BOTH {
                for gamma in 0..=n {
                    let x = elementary_value(voters, n, &seq, kept, l, gamma, delta, tau);
                    if x != Ext::NegInf {
                        table.relax(
                            SubproblemKey {
                                n,
                                k: 0,
                                l,
                                gamma,
                                delta,
                            },
                            &x,
                            None,
                        );
                    }
                }
            }
        }
    }

    let mut queue: BinaryHeap<Reverse<SweepEvent<S>>> = BinaryHeap::new();
    enqueue_solved(&table, 0, &mut queue);
    for n in 1..n_star {
        queue.push(Reverse(SweepEvent::Update {
            x: voters.voter(n).clone(),
            n,
        }));
    }

    let mut sweep = map.sweep();
    let mut spans: Option<(Ext<S>, Vec<SpanEntry<S>>)> = None;
    while let Some(Reverse(event)) = queue.pop() {
        match event {
            SweepEvent::Update { n, .. } => enqueue_solved(&table, n, &mut queue),
            SweepEvent::Subproblem { x, row, gammas } => {
                let Ext::Finite(x0) = &x else { continue };
                if spans.as_ref().is_none_or(|(at, _)| *at != x) {
                    sweep.advance_to(x0)?;
                    spans = Some((x.clone(), sweep.span_all()));
                }
                let entries = &spans.as_ref().expect("spans computed").1;
                expand(&mut table, tau, row, &gammas, entries)?;
            }
            SweepEvent::AMap { .. } | SweepEvent::BMap { .. } => {
                return Err(Error::InternalError(
                    "map events are applied by the sweep state".into(),
                ))
            }
        }
    }
    Ok(table)
}

/// Queues one batch per `(row, value)` for the solved cells of size `n`.
/// `+inf` cells have no successors.
fn enqueue_solved<S: Scalar>(
    table: &SubproblemTable<S>,
    n: usize,
    queue: &mut BinaryHeap<Reverse<SweepEvent<S>>>,
) {
    for k in 0..table.k_star {
        for l in 0..=table.l_star {
            for delta in Strictness::BOTH {
                let row_id = table.row_index(n, k, l, delta);
                let Some(row) = &table.rows[row_id] else {
                    continue;
                };
                let mut cells: Vec<(Ext<S>, u32)> = row
                    .x
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.is_finite())
                    .map(|(g, x)| (x.clone(), g as u32))
                    .collect();
                cells.sort();
                for chunk in cells.chunk_by(|a, b| a.0 == b.0) {
                    let gammas = chunk.iter().map(|c| c.1).collect();
                    queue.push(Reverse(SweepEvent::Subproblem {
                        x: chunk[0].0.clone(),
                        row: row_id,
                        gammas,
                    }));
                }
            }
        }
    }
}

/// Pushes the cells `gammas` of `row` forward through every span region.
fn expand<S: Scalar>(
    table: &mut SubproblemTable<S>,
    tau: usize,
    row: usize,
    gammas: &[u32],
    entries: &[SpanEntry<S>],
) -> Result<()> {
    let (n_prev, k_prev, l_prev, delta_prev) = table.row_key(row);
    let k = k_prev + 1;
    for e in entries.iter().filter(|e| e.n > n_prev) {
        for t in delta_triples(tau, e.a, e.b)? {
            if t.from != delta_prev {
                continue;
            }
            let l = l_prev + t.j as usize;
            if !table.admits(e.n, k, l) {
                continue;
            }
            let shift = e.n - n_prev - oplus(e.a, e.b, t.j);
            let back = BackPointer {
                n_prev: n_prev as u32,
                a: e.a as u32,
                b: e.b as u32,
                j: t.j,
                delta_prev,
            };
            let target = table.row_index(e.n, k, l, t.to);
            let tracing = table.trace.is_some();
            let target_row = table.rows[target].get_or_insert_with(|| Row {
                x: vec![Ext::NegInf; e.n + 1],
                back: vec![None; e.n + 1],
            });
            for &g in gammas {
                let gamma = g as usize + shift;
                if gamma > e.n {
                    continue;
                }
                if e.y > target_row.x[gamma] {
                    let old = std::mem::replace(&mut target_row.x[gamma], e.y.clone());
                    target_row.back[gamma] = Some(back);
                    if tracing {
                        let key = SubproblemKey {
                            n: e.n,
                            k,
                            l,
                            gamma,
                            delta: t.to,
                        };
                        table
                            .trace
                            .as_mut()
                            .expect("tracing")
                            .push((key, old, e.y.clone()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Largest `gamma` with `X(<n*, k*, l*, gamma, delta>) = +inf` for some `delta`.
pub fn extract_gamma<S: Scalar>(table: &SubproblemTable<S>) -> usize {
    terminal_key(table).map_or(0, |k| k.gamma)
}

/// The `+inf` cell behind [`extract_gamma`]; loose wins ties on `gamma`.
pub fn terminal_key<S: Scalar>(table: &SubproblemTable<S>) -> Option<SubproblemKey> {
    let (n, k, l) = table.dims();
    (0..=n).rev().find_map(|gamma| {
        Strictness::BOTH.into_iter().find_map(|delta| {
            let key = SubproblemKey {
                n,
                k,
                l,
                gamma,
                delta,
            };
            (table.get(&key) == Ext::PosInf).then_some(key)
        })
    })
}

/// Follows backpointers from `terminal` down to the elementary cell and
/// returns the leader points along the chain, sorted.
pub fn reconstruct_strategy<S: Scalar>(
    table: &SubproblemTable<S>,
    terminal: &SubproblemKey,
) -> Result<Strategy<S>> {
    let broken = |why: &str| {
        Error::InternalError(format!("broken backpointer chain at {terminal:?}: {why}"))
    };
    let mut key = *terminal;
    let mut cell = table.cell(&key);
    if cell.x_max == Ext::NegInf {
        return Err(broken("terminal cell is unsolved"));
    }
    let mut points = Vec::with_capacity(key.k);
    while key.k > 0 {
        let back = cell.back.ok_or_else(|| broken("missing backpointer"))?;
        key = back
            .predecessor(&key)
            .ok_or_else(|| broken("predecessor out of range"))?;
        cell = table.cell(&key);
        match &cell.x_max {
            Ext::Finite(x) => points.push(x.clone()),
            _ => return Err(broken("predecessor is not finite")),
        }
    }
    Ok(Strategy::leader(points))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dp,
    Trivial,
}

/// Outcome of [`solve_game`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub gamma: usize,
    pub strategy: Strategy<Coord>,
    /// Extracted value of each threshold run, `tau = 1, 2, ...`.
    pub per_tau: Vec<usize>,
    pub trivial_value: usize,
    pub method: Method,
    /// Threshold whose run produced the strategy.
    pub tau: Option<usize>,
}

impl Solution {
    /// The leader keeps at least half the voters (ties count for the leader).
    pub fn wins_majority(&self, voters: usize) -> bool {
        2 * self.gamma >= voters
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub space: KeySpace,
    /// Run thresholds on the rayon pool.
    pub parallel: bool,
    /// Use the `i64` lattice when the coordinates allow it.
    pub lattice: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            space: KeySpace::GoalDirected,
            parallel: true,
            lattice: true,
        }
    }
}

pub fn solve_game(game: &GameInstance) -> Result<Solution> {
    solve_game_with(game, SolveOptions::default())
}

pub fn solve_game_with(game: &GameInstance, opts: SolveOptions) -> Result<Solution> {
    let (k, l) = (game.k, game.l);
    let (trivial, trivial_value) = trivial_strategy(&game.voters, k, l);
    let trivial_solution = |per_tau| Solution {
        gamma: trivial_value,
        strategy: trivial.clone(),
        per_tau,
        trivial_value,
        method: Method::Trivial,
        tau: None,
    };
    if game.is_trivial() {
        return Ok(trivial_solution(Vec::new()));
    }
    if !game.voters.is_strictly_increasing() {
        return Err(Error::RequiresDistinctVoters);
    }
    let embedded = if opts.lattice {
        Lattice::embed(&game.voters)
    } else {
        None
    };
    let best = match embedded {
        Some((lattice, voters)) => solve_dp(&voters, k, l, opts)?
            .map(|(p, per_tau, tau)| (lattice.strategy_to_coord(&p), per_tau, tau)),
        None => solve_dp(&game.voters, k, l, opts)?,
    };
    let Some((strategy, per_tau, tau)) = best else {
        return Ok(trivial_solution(Vec::new()));
    };
    let dp_value = per_tau[tau - 1];
    if dp_value >= trivial_value && !strategy.is_empty() {
        Ok(Solution {
            gamma: dp_value,
            strategy,
            per_tau,
            trivial_value,
            method: Method::Dp,
            tau: Some(tau),
        })
    } else {
        Ok(trivial_solution(per_tau))
    }
}

/// Runs every threshold `1..=n*/l*`; returns the strategy of the smallest
/// best threshold, all per-threshold values and that threshold.
#[allow(clippy::type_complexity)]
fn solve_dp<S: Scalar>(
    voters: &VoterSet<S>,
    k: usize,
    l: usize,
    opts: SolveOptions,
) -> Result<Option<(Strategy<S>, Vec<usize>, usize)>> {
    let taus: Vec<usize> = (1..=voters.len() / l).collect();
    if taus.is_empty() {
        return Ok(None);
    }
    let map = AMap::new(voters)?;
    let run = |tau: usize| -> Result<usize> {
        let table = compute_solutions_with(
            tau,
            voters,
            k,
            l,
            &map,
            RunOptions {
                space: opts.space,
                trace: false,
            },
        )?;
        Ok(extract_gamma(&table))
    };
    let per_tau: Vec<usize> = if opts.parallel {
        taus.par_iter().map(|&t| run(t)).collect::<Result<_>>()?
    } else {
        taus.iter().map(|&t| run(t)).collect::<Result<_>>()?
    };
    let best = per_tau.iter().copied().max().expect("non-empty");
    let tau = per_tau
        .iter()
        .position(|&g| g == best)
        .expect("max present")
        + 1;
    let table = compute_solutions_with(
        tau,
        voters,
        k,
        l,
        &map,
        RunOptions {
            space: opts.space,
            trace: false,
        },
    )?;
    let strategy = match terminal_key(&table) {
        Some(key) => reconstruct_strategy(&table, &key)?,
        // Nothing reached +inf for any threshold; the trivial strategy wins.
        None => return Ok(Some((Strategy::leader(Vec::new()), per_tau, tau))),
    };
    if strategy.len() != k {
        return Err(Error::InternalError(format!(
            "reconstructed {} points, expected {k}",
            strategy.len()
        )));
    }
    let won = voters.len() - canonical_response(voters, &strategy, l).1;
    if won < best {
        return Err(Error::InternalError(format!(
            "reconstructed strategy keeps {won} voters, table claims {best}"
        )));
    }
    Ok(Some((strategy, per_tau, tau)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::normalize_instance;

    fn vs(v: &[i64]) -> VoterSet<i64> {
        VoterSet::new(v.to_vec())
    }

    fn key(n: usize, k: usize, l: usize, gamma: usize, delta: Strictness) -> SubproblemKey {
        SubproblemKey {
            n,
            k,
            l,
            gamma,
            delta,
        }
    }

    const FIG: [i64; 6] = [1, 4, 6, 13, 17, 23];

    #[test]
    fn oplus_examples() {
        assert_eq!(oplus(3, 1, 0), 0);
        assert_eq!(oplus(3, 1, 1), 3);
        assert_eq!(oplus(3, 1, 2), 4);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_triples(2, 3, 3).unwrap(), GT_GT);
        assert_eq!(
            delta_triples(2, 3, 2).unwrap(),
            &[triple(L, 1, L), triple(S, 1, L), triple(S, 2, S)]
        );
        assert_eq!(
            delta_triples(2, 1, 1).unwrap(),
            &[triple(L, 0, L), triple(S, 0, S)]
        );
        assert_eq!(
            delta_triples(2, 1, 2),
            Err(Error::InvalidGains { alpha: 1, beta: 2 })
        );
    }

    #[test]
    fn elementary_examples() {
        let v = vs(&FIG);
        assert_eq!(solve_elementary(&v, 2, 0, 2, L, 2), Ext::Finite(6));
        assert_eq!(solve_elementary(&v, 2, 1, 0, S, 1), Ext::Finite(6));
        assert_eq!(solve_elementary(&v, 2, 1, 1, S, 1), Ext::NegInf);
        assert_eq!(solve_elementary(&v, 2, 2, 0, S, 1), Ext::NegInf);
        assert_eq!(solve_elementary(&v, 6, 0, 6, S, 7), Ext::PosInf);
    }

    #[test]
    fn elementary_matches_closed_form() {
        let v = vs(&FIG);
        for n in 0..=6 {
            for l in 0..=3 {
                for gamma in 0..=n {
                    for delta in Strictness::BOTH {
                        for tau in 1..=8 {
                            let expect = match l {
                                0 => {
                                    gamma <= n
                                        && ((tau > n && delta == S) || (tau == n && delta == L))
                                }
                                1 => gamma == 0 && tau <= n && delta == S,
                                _ => false,
                            };
                            let got = solve_elementary(&v, n, l, gamma, delta, tau) != Ext::NegInf;
                            assert_eq!(
                                got, expect,
                                "n={n} l={l} gamma={gamma} {delta:?} tau={tau}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_voter_trace() {
        let v = vs(&[0, 10]);
        let map = AMap::new(&v).unwrap();
        let table = compute_solutions(1, &v, 1, 1, &map).unwrap();
        assert_eq!(table.get(&key(2, 1, 1, 1, S)), Ext::PosInf);
        assert_eq!(table.get(&key(1, 1, 0, 1, S)), Ext::Finite(10));
        assert_eq!(table.get(&key(0, 0, 0, 0, S)), Ext::Finite(0));
        assert_eq!(extract_gamma(&table), 1);
        let p = reconstruct_strategy(&table, &terminal_key(&table).unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.points()[0] == 0 || p.points()[0] == 10);
    }

    #[test]
    fn empty_table_extracts_zero() {
        let v = vs(&[0, 10]);
        let table: SubproblemTable<i64> = SubproblemTable::new(1, 2, 1, 1, KeySpace::Full, false);
        assert_eq!(extract_gamma(&table), 0);
        assert!(reconstruct_strategy(&table, &key(2, 1, 1, 1, S)).is_err());
        drop(v);
    }

    #[test]
    fn extract_takes_max_over_both_strictness() {
        let mut table: SubproblemTable<i64> =
            SubproblemTable::new(1, 3, 1, 1, KeySpace::Full, false);
        table.relax(key(3, 1, 1, 2, L), &Ext::PosInf, None);
        table.relax(key(3, 1, 1, 1, S), &Ext::PosInf, None);
        assert_eq!(extract_gamma(&table), 2);
    }

    #[test]
    fn named_values() {
        let g = |v: &[i64], k, l| {
            let inst =
                normalize_instance(v.iter().map(|&x| Coord::integer(x)).collect(), k, l).unwrap();
            solve_game(&inst).unwrap().gamma
        };
        assert_eq!(g(&[0, 10], 1, 1), 1);
        assert_eq!(g(&FIG, 2, 1), 5);
        for l in 1..=6 {
            assert_eq!(g(&FIG, 6, l), 6);
        }
        assert_eq!(g(&[0, 4, 10], 1, 2), 1);
    }

    #[test]
    fn full_and_goal_directed_agree() {
        let v = vs(&FIG);
        let map = AMap::new(&v).unwrap();
        for k in 1..=3 {
            for l in 1..2 * k {
                for tau in 1..=6 / l {
                    let full = compute_solutions(tau, &v, k, l, &map).unwrap();
                    let opts = RunOptions {
                        space: KeySpace::GoalDirected,
                        trace: false,
                    };
                    let goal = compute_solutions_with(tau, &v, k, l, &map, opts).unwrap();
                    assert_eq!(
                        extract_gamma(&full),
                        extract_gamma(&goal),
                        "k={k} l={l} tau={tau}"
                    );
                }
            }
        }
    }

    #[test]
    fn duplicates_rejected_outside_trivial_regimes() {
        let inst = normalize_instance(vec![1.into(), 1.into(), 5.into(), 9.into()], 1, 1).unwrap();
        assert_eq!(solve_game(&inst), Err(Error::RequiresDistinctVoters));
        let inst = normalize_instance(vec![1.into(), 1.into(), 5.into()], 2, 1).unwrap();
        assert_eq!(solve_game(&inst).unwrap().gamma, 3);
    }
}
