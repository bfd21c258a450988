//! The gain map over the half-plane of intervals `(x, y)`, `x < y`.
//!
//! For a level `t`, the A-map region `A^{>=t}` holds the intervals whose
//! alpha-gain is at least `t`. It is the union over `i` of
//! `{x < v_i, y > v_{i+t-1}, y > x + 2(v_{i+t-1} - v_i)}`, so a point lies in
//! it iff `y > f_t(x)` where
//!
//! ```text
//! f_t(x) = min over i with v_i > x, i + t - 1 <= n of max(v_{i+t-1}, x + 2(v_{i+t-1} - v_i))
//! ```
//!
//! Each `f_t` is drawn as an xy-monotone polyline of horizontal, diagonal
//! (slope one) and vertical segments. The B-map level `t` is the simpler
//! staircase `y = v_{i+t}` over `[v_i, v_{i+1})`.
//!
//! A [`SweepState`] walks a vertical line left to right over the map and
//! answers [`SweepState::span_all`] queries in time linear in `n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{interval_gains, VoterSet};
use crate::scalar::{Coord, Ext, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SegmentKind {
    Horizontal,
    Vertical,
    Diagonal,
}

impl SegmentKind {
    pub fn name(self) -> &'static str {
        match self {
            SegmentKind::Horizontal => "horizontal",
            SegmentKind::Vertical => "vertical",
            SegmentKind::Diagonal => "diagonal",
        }
    }
}

/// A polyline piece from `(x1, y1)` to `(x2, y2)`. Only the top end of a
/// vertical segment may be `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolySegment<S = Coord> {
    pub kind: SegmentKind,
    pub x1: S,
    pub y1: Ext<S>,
    pub x2: S,
    pub y2: Ext<S>,
}

impl<S: Scalar> PolySegment<S> {
    /// Height of a non-vertical segment at `x`, for `x1 <= x <= x2`.
    pub fn y_at(&self, x: &S) -> Ext<S> {
        match (&self.kind, &self.y1) {
            (SegmentKind::Diagonal, Ext::Finite(y1)) => Ext::Finite(y1.add(&x.sub(&self.x1))),
            _ => self.y1.clone(),
        }
    }
}

/// The lower boundary of `A^{>=t}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPolyline<S = Coord> {
    pub level: usize,
    pub segments: Vec<PolySegment<S>>,
}

impl<S: Scalar> BoundaryPolyline<S> {
    fn first_flat(&self) -> Option<usize> {
        self.next_flat(0)
    }

    /// First non-vertical segment at index `from` or later.
    fn next_flat(&self, from: usize) -> Option<usize> {
        (from..self.segments.len()).find(|&i| self.segments[i].kind != SegmentKind::Vertical)
    }
}

/// Direct evaluation of `f_t(x)` from its defining formula.
pub fn boundary_value<S: Scalar>(voters: &VoterSet<S>, t: usize, x: &S) -> Ext<S> {
    let v = voters.as_slice();
    let n = v.len();
    if t == 0 || t > n {
        return Ext::PosInf;
    }
    let first = v.partition_point(|p| p <= x);
    (first..=n - t)
        .map(|i| {
            let c = &v[i + t - 1];
            let diag = x.add(&c.sub(&v[i]).double());
            c.clone().max(diag)
        })
        .min()
        .map_or(Ext::PosInf, Ext::Finite)
}

/// Appends pieces, dropping empty ones and merging collinear neighbours.
struct ChainBuilder<S> {
    segments: Vec<PolySegment<S>>,
}

impl<S: Scalar> ChainBuilder<S> {
    fn push(&mut self, kind: SegmentKind, x1: S, y1: Ext<S>, x2: S, y2: Ext<S>) {
        if x1 == x2 && y1 == y2 {
            return;
        }
        if let Some(last) = self.segments.last_mut() {
            if last.kind == kind && last.x2 == x1 && last.y2 == y1 {
                last.x2 = x2;
                last.y2 = y2;
                return;
            }
        }
        self.segments.push(PolySegment {
            kind,
            x1,
            y1,
            x2,
            y2,
        });
    }

    fn flat(&mut self, x1: &S, x2: &S, y: &S) {
        let y = Ext::Finite(y.clone());
        self.push(
            SegmentKind::Horizontal,
            x1.clone(),
            y.clone(),
            x2.clone(),
            y,
        );
    }

    fn diagonal(&mut self, x1: &S, x2: &S, offset: &S) {
        let y1 = Ext::Finite(x1.add(offset));
        let y2 = Ext::Finite(x2.add(offset));
        self.push(SegmentKind::Diagonal, x1.clone(), y1, x2.clone(), y2);
    }
}

/// Builds the level-`t` polyline starting at `x_start < v_1`.
fn build_level<S: Scalar>(v: &[S], t: usize, x_start: &S) -> BoundaryPolyline<S> {
    let n = v.len();
    let last = n - t; // 0-based index of the last admissible i
    let c = |i: usize| v[i + t - 1].clone();
    let d = |i: usize| v[i + t - 1].sub(&v[i]).double();
    let e = |i: usize| v[i].double().sub(&v[i + t - 1]);
    let mut chain = ChainBuilder {
        segments: Vec::new(),
    };

    // Gap m covers [v_{m-1}, v_m) in 0-based terms: [left, v[m]) with
    // indices m..=last active.
    for m in 0..=last {
        let left = if m == 0 {
            x_start.clone()
        } else {
            v[m - 1].clone()
        };
        let right = v[m].clone();
        let mut cuts: Vec<S> = (m..=last)
            .map(e)
            .filter(|b| *b > left && *b < right)
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut stops = Vec::with_capacity(cuts.len() + 2);
        stops.push(left);
        stops.extend(cuts);
        stops.push(right.clone());
        for w in stops.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let flat = (m..=last).filter(|&i| e(i) >= *b).map(c).min();
            let slope = (m..=last).filter(|&i| e(i) <= *a).map(d).min();
            match (flat, slope) {
                (Some(cv), None) => chain.flat(a, b, &cv),
                (None, Some(dv)) => chain.diagonal(a, b, &dv),
                (Some(cv), Some(dv)) => {
                    // min(C, x + D): diagonal up to x = C - D, flat after.
                    let cross = cv.sub(&dv);
                    if cross > *a {
                        chain.diagonal(a, &cross.clone().min(b.clone()), &dv);
                    }
                    if cross < *b {
                        chain.flat(&cross.max(a.clone()), b, &cv);
                    }
                }
                (None, None) => unreachable!("every active index is flat or diagonal"),
            }
        }
        // Jump at v_m, where index m leaves the active set.
        let below = chain
            .segments
            .last()
            .map(|s| s.y2.clone())
            .expect("gap produced no piece");
        let above = if m == last {
            Ext::PosInf
        } else {
            (m + 1..=last)
                .map(|i| c(i).max(right.add(&d(i))))
                .min()
                .map_or(Ext::PosInf, Ext::Finite)
        };
        chain.push(SegmentKind::Vertical, right.clone(), below, right, above);
    }
    BoundaryPolyline {
        level: t,
        segments: chain.segments,
    }
}

/// A sweep event of the gain map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapEvent<S = Coord> {
    /// The non-vertical segment of level `level` ends at `x`; `next` is the
    /// following non-vertical segment, if any.
    A {
        x: S,
        level: usize,
        segment: usize,
        next: Option<usize>,
    },
    /// The sweep line reaches voter `v_n`.
    B { x: S, n: usize },
}

impl<S: Scalar> MapEvent<S> {
    pub fn x(&self) -> &S {
        match self {
            MapEvent::A { x, .. } | MapEvent::B { x, .. } => x,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            MapEvent::A { .. } => 0,
            MapEvent::B { .. } => 1,
        }
    }
}

/// The precomputed A-map of a voter set together with its sorted event list.
#[derive(Clone, Debug)]
pub struct AMap<S = Coord> {
    voters: VoterSet<S>,
    x_start: S,
    levels: Vec<BoundaryPolyline<S>>,
    events: Vec<MapEvent<S>>,
}

pub fn build_a_map<S: Scalar>(voters: &VoterSet<S>) -> Result<AMap<S>> {
    AMap::new(voters)
}

impl<S: Scalar> AMap<S> {
    pub fn new(voters: &VoterSet<S>) -> Result<Self> {
        if !voters.is_strictly_increasing() {
            return Err(Error::RequiresDistinctVoters);
        }
        let v = voters.as_slice();
        let x_start = v
            .first()
            .map_or_else(|| S::from_int(0), |v1| v1.sub(&S::from_int(1)));
        let levels: Vec<_> = (1..=v.len()).map(|t| build_level(v, t, &x_start)).collect();
        let mut events = Vec::new();
        for (a, line) in levels.iter().enumerate() {
            for (i, s) in line.segments.iter().enumerate() {
                if s.kind != SegmentKind::Vertical {
                    events.push(MapEvent::A {
                        x: s.x2.clone(),
                        level: a + 1,
                        segment: i,
                        next: line.next_flat(i + 1),
                    });
                }
            }
        }
        events.extend(v.iter().enumerate().map(|(i, x)| MapEvent::B {
            x: x.clone(),
            n: i + 1,
        }));
        events.sort_by(|p, q| p.x().cmp(q.x()).then(p.rank().cmp(&q.rank())));
        Ok(AMap {
            voters: voters.clone(),
            x_start,
            levels,
            events,
        })
    }

    pub fn voters(&self) -> &VoterSet<S> {
        &self.voters
    }

    /// Left end of every polyline, `v_0 = v_1 - 1`.
    pub fn x_start(&self) -> &S {
        &self.x_start
    }

    /// Polylines for `t = 1..=n`.
    pub fn levels(&self) -> &[BoundaryPolyline<S>] {
        &self.levels
    }

    pub fn events(&self) -> &[MapEvent<S>] {
        &self.events
    }

    pub fn segment_count(&self) -> usize {
        self.levels.iter().map(|l| l.segments.len()).sum()
    }

    pub fn sweep(&self) -> SweepState<'_, S> {
        SweepState::new(self)
    }
}

/// Number of voters strictly inside `(x, y)`: the B-map level of the point.
pub fn b_gain_at<S: Scalar>(voters: &VoterSet<S>, x: &S, y: &Ext<S>) -> usize {
    voters.open_range(&Ext::Finite(x.clone()), y).len()
}

/// One region of the vertical line above `x0`: the largest `y` in
/// `(v_n, v_{n+1}]` for which `(x0, y)` has gains `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpanEntry<S = Coord> {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub y: Ext<S>,
}

/// Sweep-line state: the A-map segment crossed on every level and the voters
/// above the line.
#[derive(Clone, Debug)]
pub struct SweepState<'m, S = Coord> {
    map: &'m AMap<S>,
    x0: S,
    /// `a[i]`: current non-vertical segment of level `i + 1`.
    a: Vec<Option<usize>>,
    /// `b[i] = v_{n0 + i}` where `v_{n0}` is the first voter right of `x0`.
    b: VecDeque<Option<S>>,
    n0: usize,
    cursor: usize,
}

impl<'m, S: Scalar> SweepState<'m, S> {
    pub fn new(map: &'m AMap<S>) -> Self {
        let n = map.voters.len();
        let mut a: Vec<Option<usize>> = map.levels.iter().map(|l| l.first_flat()).collect();
        a.push(None);
        let mut b: VecDeque<Option<S>> = map.voters.as_slice().iter().cloned().map(Some).collect();
        b.push_back(None);
        debug_assert_eq!(a.len(), n + 1);
        SweepState {
            map,
            x0: map.x_start.clone(),
            a,
            b,
            n0: 1,
            cursor: 0,
        }
    }

    pub fn x0(&self) -> &S {
        &self.x0
    }

    /// Index of the first voter strictly right of the sweep line.
    pub fn first_voter_above(&self) -> usize {
        self.n0
    }

    pub fn a_slots(&self) -> &[Option<usize>] {
        &self.a
    }

    pub fn b_slots(&self) -> Vec<Option<S>> {
        self.b.iter().cloned().collect()
    }

    /// Applies one map event.
    pub fn sweep_advance(&mut self, event: &MapEvent<S>) -> Result<()> {
        if *event.x() < self.x0 {
            return Err(Error::SweepOrderViolation {
                sweep: format!("{:?}", self.x0),
                event: format!("{:?}", event.x()),
            });
        }
        self.x0 = event.x().clone();
        match event {
            MapEvent::A { level, next, .. } => self.a[level - 1] = *next,
            MapEvent::B { .. } => {
                self.b.pop_front();
                self.b.push_back(None);
                self.n0 += 1;
            }
        }
        Ok(())
    }

    /// Applies every pending map event with `x <= x0` and moves the line to `x0`.
    pub fn advance_to(&mut self, x0: &S) -> Result<()> {
        if *x0 < self.x0 {
            return Err(Error::SweepOrderViolation {
                sweep: format!("{:?}", self.x0),
                event: format!("{x0:?}"),
            });
        }
        let events = &self.map.events;
        while let Some(ev) = events.get(self.cursor) {
            if ev.x() > x0 {
                break;
            }
            self.sweep_advance(ev)?;
            self.cursor += 1;
        }
        self.x0 = x0.clone();
        Ok(())
    }

    /// `f_t(x0)` read off the current A-map slot of level `t`.
    pub fn level_height(&self, t: usize) -> Ext<S> {
        match self.a.get(t - 1).copied().flatten() {
            Some(i) => self.map.levels[t - 1].segments[i].y_at(&self.x0),
            None => Ext::PosInf,
        }
    }

    /// All regions of the line above `x0`, bottom to top, from one merged
    /// scan of the A and B slots. Regions below `v_1` are skipped.
    pub fn span_all(&self) -> Vec<SpanEntry<S>> {
        let mut out = Vec::new();
        let (mut alpha, mut pop) = (0usize, 0usize);
        loop {
            let f = self.level_height(alpha + 1);
            let top = self
                .b
                .get(pop)
                .cloned()
                .flatten()
                .map_or(Ext::PosInf, Ext::Finite);
            let n = self.n0 - 1 + pop;
            let hi = f.clone().min(top.clone());
            if n > 0 {
                out.push(SpanEntry {
                    n,
                    a: alpha,
                    b: pop - alpha,
                    y: hi.clone(),
                });
            }
            if hi == Ext::PosInf {
                return out;
            }
            if f <= top {
                alpha += 1;
            }
            if top <= f {
                pop += 1;
            }
        }
    }
}

/// Slow span: the largest `y` in `(v_n, v_{n+1}]`, `y > x`, with
/// `interval_gains(x, y) = (a, b)`, or `-inf`.
pub fn span_reference<S: Scalar>(
    voters: &VoterSet<S>,
    x: &S,
    n: usize,
    a: usize,
    b: usize,
) -> Ext<S> {
    span_reference_all(voters, x, n)
        .into_iter()
        .find(|e| e.a == a && e.b == b)
        .map_or(Ext::NegInf, |e| e.y)
}

/// Every `(a, b)` with a finite or infinite span for the given `x` and `n`,
/// by evaluating the gains at each candidate breakpoint.
pub fn span_reference_all<S: Scalar>(voters: &VoterSet<S>, x: &S, n: usize) -> Vec<SpanEntry<S>> {
    let v = voters.as_slice();
    let lo = voters.voter_ext(n);
    let hi = voters.voter_ext(n + 1);
    let xe = Ext::Finite(x.clone());
    let mut candidates = vec![hi.clone()];
    for i in 0..v.len() {
        for j in i..v.len() {
            candidates.push(Ext::Finite(x.add(&v[j].sub(&v[i]).double())));
        }
    }
    candidates.retain(|y| *y > lo && *y <= hi && *y > xe);
    candidates.sort();
    candidates.dedup();
    let mut out: Vec<SpanEntry<S>> = Vec::new();
    for y in candidates.into_iter().rev() {
        let g = interval_gains(voters, &xe, &y).expect("candidate above x");
        if !out.iter().any(|e| e.a == g.alpha && e.b == g.beta) {
            out.push(SpanEntry {
                n,
                a: g.alpha,
                b: g.beta,
                y,
            });
        }
    }
    out.reverse();
    out
}

impl AMap<Coord> {
    /// One `t,kind,x1,y1,x2,y2` row per A-map and B-map segment.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,kind,x1,y1,x2,y2\n");
        for line in &self.levels {
            for s in &line.segments {
                let _ = writeln!(
                    out,
                    "{},a_{},{},{},{},{}",
                    line.level,
                    s.kind.name(),
                    s.x1.to_ratio_string(),
                    s.y1.to_ratio_string(),
                    s.x2.to_ratio_string(),
                    s.y2.to_ratio_string()
                );
            }
        }
        for (t, s) in self.b_map_segments() {
            let _ = writeln!(
                out,
                "{t},b_{},{},{},{},{}",
                s.kind.name(),
                s.x1.to_ratio_string(),
                s.y1.to_ratio_string(),
                s.x2.to_ratio_string(),
                s.y2.to_ratio_string()
            );
        }
        out
    }

    /// Staircase boundaries of the B-map: level `t` is `y = v_{i+t}` over
    /// `[v_i, v_{i+1})` followed by a rise at `v_{i+1}`.
    pub fn b_map_segments(&self) -> Vec<(usize, PolySegment<Coord>)> {
        let n = self.voters.len();
        let at = |i: usize| {
            if i == 0 {
                self.x_start.clone()
            } else {
                self.voters.voter(i).clone()
            }
        };
        let mut out = Vec::new();
        for t in 1..=n {
            for i in 0..=n - t {
                let y = self.voters.voter_ext(i + t);
                let (x1, x2) = (at(i), at(i + 1));
                out.push((
                    t,
                    PolySegment {
                        kind: SegmentKind::Horizontal,
                        x1,
                        y1: y.clone(),
                        x2: x2.clone(),
                        y2: y.clone(),
                    },
                ));
                let up = self.voters.voter_ext(i + t + 1);
                out.push((
                    t,
                    PolySegment {
                        kind: SegmentKind::Vertical,
                        x1: x2.clone(),
                        y1: y,
                        x2,
                        y2: up,
                    },
                ));
            }
        }
        out
    }

    /// A static picture of both maps. Infinite ends are clipped just above
    /// the last voter.
    pub fn to_svg(&self) -> String {
        let v = self.voters.as_slice();
        let lo = self.x_start.to_f64();
        let hi = v.last().map_or(lo + 1.0, |x| x.to_f64()) + 2.0;
        let (size, pad) = (600.0, 20.0);
        let scale = (size - 2.0 * pad) / (hi - lo).max(1e-9);
        let px = |x: f64| pad + (x.min(hi) - lo) * scale;
        let py = |y: f64| size - pad - (y.min(hi) - lo) * scale;
        let val = |y: &Ext<Coord>| match y {
            Ext::Finite(c) => c.to_f64(),
            Ext::PosInf => hi,
            Ext::NegInf => lo,
        };
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        );
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"4\"/>",
            px(lo),
            py(lo),
            px(hi),
            py(hi)
        );
        let mut line = |s: &PolySegment<Coord>, color: &str| {
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\"/>",
                px(s.x1.to_f64()),
                py(val(&s.y1)),
                px(s.x2.to_f64()),
                py(val(&s.y2))
            );
        };
        for (_, s) in self.b_map_segments() {
            line(&s, "#4a90d9");
        }
        for l in &self.levels {
            for s in &l.segments {
                line(s, "#d0021b");
            }
        }
        for x in v {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>",
                px(x.to_f64()),
                py(lo)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
