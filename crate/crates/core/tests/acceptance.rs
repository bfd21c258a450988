//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use linevoronoi::dp::{
    compute_solutions_with, solve_game_with, KeySpace, RunOptions, SolveOptions, SubproblemKey,
};
use linevoronoi::gainmap::{span_reference_all, AMap};
use linevoronoi::game::{
    canonical_response, classify_threshold, gain_sequence, interval_gains, normalize_instance,
    GameInstance, Strategy, Strictness, VoterSet,
};
use linevoronoi::io::{verify_certificate, InstanceFile, ResultFile};
use linevoronoi::oracle::{oracle_gamma, random_instance, CandidateGrid};
use linevoronoi::scalar::Scalar;
use linevoronoi::{solve_game, Coord, Ext, Solution};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIFFERENTIAL_INSTANCES: usize = 500;
const DIFFERENTIAL_BUDGET: Duration = Duration::from_secs(600);
const CERTIFICATE_TRIALS: usize = 1000;
const SPAN_INSTANCES: usize = 50;
const SPAN_MAX_N: usize = 20;
const SCALING_SIZES: [usize; 3] = [50, 100, 200];
const SCALING_BUDGET: Duration = Duration::from_secs(60);
const SCALING_RATIO: f64 = 3.0 * 16.0;
const GAINMAP_INSTANCES: usize = 100;
const GAINMAP_MAX_N: usize = 200;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!(
            "[{}] {id} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
}

fn ints(v: &[i64]) -> Vec<Coord> {
    v.iter().map(|&x| Coord::integer(x)).collect()
}

fn distinct_ints(
    rng: &mut ChaCha8Rng,
    n: impl rand::distributions::uniform::SampleRange<usize>,
    hi: i64,
) -> Vec<i64> {
    let n = rng.gen_range(n);
    let mut all: Vec<i64> = (0..=hi).collect();
    all.shuffle(rng);
    all.truncate(n);
    all
}

struct Solved {
    game: GameInstance,
    sol: Solution,
    oracle: usize,
}

fn differential(report: &mut Report) -> Vec<Solved> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let start = Instant::now();
    let mut solved = Vec::with_capacity(DIFFERENTIAL_INSTANCES);
    let mut mismatches = Vec::new();
    for _ in 0..DIFFERENTIAL_INSTANCES {
        let game = random_instance(&mut rng, 6, 3);
        let sol = solve_game(&game).expect("solver runs");
        let (oracle, _) = oracle_gamma(&game.voters, game.k, game.l).expect("oracle runs");
        if sol.gamma != oracle {
            mismatches.push(format!(
                "{} -> dp {} oracle {oracle}",
                InstanceFile::from_instance(&game).to_json(),
                sol.gamma
            ));
        }
        solved.push(Solved { game, sol, oracle });
    }
    let took = start.elapsed();
    let ok = mismatches.is_empty() && took <= DIFFERENTIAL_BUDGET;
    let mut detail = format!(
        "{}/{} instances agree with the oracle in {:.1} s (budget {} s)",
        DIFFERENTIAL_INSTANCES - mismatches.len(),
        DIFFERENTIAL_INSTANCES,
        took.as_secs_f64(),
        DIFFERENTIAL_BUDGET.as_secs()
    );
    if let Some(first) = mismatches.first() {
        detail += &format!("; first mismatch {first}");
    }
    report.line("1", "differential equivalence", ok, detail);
    solved
}

fn named_values(report: &mut Report) {
    let fig = [1, 4, 6, 13, 17, 23];
    let mut cases: Vec<(Vec<i64>, usize, usize, usize)> =
        vec![(vec![0, 10], 1, 1, 1), (fig.to_vec(), 2, 1, 5)];
    for l in 1..=6 {
        cases.push((fig.to_vec(), 6, l, 6));
    }
    cases.push((vec![0, 4, 10], 1, 2, 1));
    let mut wrong = Vec::new();
    for (v, k, l, want) in &cases {
        let game = normalize_instance(ints(v), *k, *l).unwrap();
        let got = solve_game(&game).unwrap().gamma;
        if got != *want {
            wrong.push(format!("{v:?} k={k} l={l}: got {got}, want {want}"));
        }
    }
    let detail = if wrong.is_empty() {
        format!("{} exact values reproduced", cases.len())
    } else {
        wrong.join("; ")
    };
    report.line("2", "named values", wrong.is_empty(), detail);
}

fn certificates(report: &mut Report, solved: &[Solved]) {
    let mut bad = Vec::new();
    for (i, s) in solved.iter().enumerate() {
        let res = ResultFile::from_solution(&s.game, &s.sol).expect("result builds");
        let kept =
            s.game.voters.len() - canonical_response(&s.game.voters, &s.sol.strategy, s.game.l).1;
        if kept != s.sol.gamma {
            bad.push(format!(
                "#{i}: canonical payoff {kept} != gamma {}",
                s.sol.gamma
            ));
            continue;
        }
        if let Err(e) = verify_certificate(&s.game, &res, CERTIFICATE_TRIALS, i as u64) {
            bad.push(format!("#{i}: {e}"));
        }
    }
    let detail = match bad.first() {
        None => format!("{} strategies keep exactly gamma; {CERTIFICATE_TRIALS} adversary trials each never beat it", solved.len()),
        Some(first) => format!("{} failures, first {first}", bad.len()),
    };
    report.line("3", "certificate soundness", bad.is_empty(), detail);
}

fn span_equivalence(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut checked, mut mismatches) = (0usize, Vec::new());
    for _ in 0..SPAN_INSTANCES {
        let n = rng.gen_range(1..=SPAN_MAX_N);
        let voters = VoterSet::new(ints(&distinct_ints(&mut rng, n..=n, 3 * SPAN_MAX_N as i64)));
        let map = AMap::new(&voters).unwrap();
        let mut sweep = map.sweep();
        for x0 in CandidateGrid::for_voters(&voters).points() {
            sweep.advance_to(&x0).unwrap();
            let fast: BTreeSet<(usize, usize, usize, Ext<Coord>)> = sweep
                .span_all()
                .into_iter()
                .map(|e| (e.n, e.a, e.b, e.y))
                .collect();
            let slow: BTreeSet<(usize, usize, usize, Ext<Coord>)> = (1..=n)
                .flat_map(|m| span_reference_all(&voters, &x0, m))
                .map(|e| (e.n, e.a, e.b, e.y))
                .collect();
            checked += (n + 1) * (n + 1) * n;
            if fast != slow {
                let diff: Vec<_> = fast.symmetric_difference(&slow).take(3).collect();
                mismatches.push(format!("V={:?} x0={x0}: {diff:?}", voters.as_slice()));
            }
        }
    }
    let detail = match mismatches.first() {
        None => {
            format!("{checked} (n, a, b) queries over {SPAN_INSTANCES} instances, zero mismatches")
        }
        Some(first) => format!("{} grid points disagree, first {first}", mismatches.len()),
    };
    report.line("4", "span equivalence", mismatches.is_empty(), detail);
}

fn per_tau_bounds(report: &mut Report, solved: &[Solved]) {
    let mut bad = Vec::new();
    for (i, s) in solved.iter().enumerate() {
        let over = s.sol.per_tau.iter().any(|&g| g > s.oracle);
        let best = s
            .sol
            .per_tau
            .iter()
            .copied()
            .chain([s.sol.trivial_value])
            .max()
            .unwrap();
        if over || best != s.oracle {
            bad.push(format!(
                "#{i}: per_tau {:?} trivial {} oracle {}",
                s.sol.per_tau, s.sol.trivial_value, s.oracle
            ));
            continue;
        }
        // The goal-directed key space must not change any threshold's value.
        let opts = SolveOptions {
            space: KeySpace::Full,
            parallel: false,
            lattice: false,
        };
        let full = solve_game_with(&s.game, opts).unwrap();
        if full.per_tau != s.sol.per_tau {
            bad.push(format!(
                "#{i}: full key space per_tau {:?} != {:?}",
                full.per_tau, s.sol.per_tau
            ));
        }
    }
    let detail = match bad.first() {
        None => format!(
            "{} instances: every per_tau <= oracle, max with trivial = oracle",
            solved.len()
        ),
        Some(first) => format!("{} failures, first {first}", bad.len()),
    };
    report.line("5", "per-threshold lower bound", bad.is_empty(), detail);
}

fn scaling(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut times = Vec::new();
    for &n in &SCALING_SIZES {
        let game =
            normalize_instance(ints(&distinct_ints(&mut rng, n..=n, 20 * n as i64)), 5, 5).unwrap();
        // Best of three damps scheduler noise on the small sizes.
        let best = (0..3)
            .map(|_| {
                let t = Instant::now();
                solve_game(&game).unwrap();
                t.elapsed()
            })
            .min()
            .unwrap();
        times.push(best);
    }
    let within = times.iter().all(|t| *t <= SCALING_BUDGET);
    let r1 = times[1].as_secs_f64() / times[0].as_secs_f64();
    let r2 = times[2].as_secs_f64() / times[1].as_secs_f64();
    let ok = within && r1 <= SCALING_RATIO && r2 <= SCALING_RATIO;
    let detail = format!(
        "t(50)={:.3}s t(100)={:.3}s t(200)={:.3}s; ratios {r1:.1}, {r2:.1} (limit {SCALING_RATIO})",
        times[0].as_secs_f64(),
        times[1].as_secs_f64(),
        times[2].as_secs_f64()
    );
    report.line("6", "complexity trend", ok, detail);
}

fn gainmap_bound(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut bad) = (0.0f64, Vec::new());
    for _ in 0..GAINMAP_INSTANCES {
        let n = rng.gen_range(1..=GAINMAP_MAX_N);
        let voters = VoterSet::new(distinct_ints(&mut rng, n..=n, 10 * GAINMAP_MAX_N as i64));
        let count = AMap::new(&voters).unwrap().segment_count();
        worst = worst.max(count as f64 / (n * n) as f64);
        if count > 8 * n * n {
            bad.push(format!("n={n}: {count} segments"));
        }
    }
    let detail = match bad.first() {
        None => format!("{GAINMAP_INSTANCES} instances, worst segments/n^2 = {worst:.2} (limit 8)"),
        Some(first) => format!("{} over the bound, first {first}", bad.len()),
    };
    report.line("7", "gain-map size", bad.is_empty(), detail);
}

/// Compact versions of the invariant suites; the property-based versions
/// live in `tests/properties.rs`.
fn invariants(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, ok: bool, what: String| {
        if !ok {
            failures.push(format!("{name}: {what}"));
        }
    };

    // Gain pairs, with repeated voters allowed.
    for _ in 0..2000 {
        let n = rng.gen_range(0..10);
        let voters = VoterSet::new(
            (0..n)
                .map(|_| Coord::integer(rng.gen_range(0..12)))
                .collect(),
        );
        let x = Coord::new(rng.gen_range(-4..50), 4).unwrap();
        let y = x.add(&Coord::new(rng.gen_range(1..60), 4).unwrap());
        for (lo, hi) in [
            (Ext::Finite(x.clone()), Ext::Finite(y.clone())),
            (Ext::NegInf, Ext::Finite(y)),
            (Ext::Finite(x), Ext::PosInf),
        ] {
            let g = interval_gains(&voters, &lo, &hi).unwrap();
            let pop = voters.open_range(&lo, &hi).len();
            check(
                "gain pair",
                g.alpha >= g.beta && g.alpha + g.beta == pop,
                format!("{g:?} pop {pop}"),
            );
        }
    }

    // Threshold partition: every tau >= 1 is strict for exactly one l, and
    // for fixed l the valid thresholds are exactly [tau_{l+1}, tau_l].
    for _ in 0..500 {
        let voters = VoterSet::new(ints(&distinct_ints(&mut rng, 1..9, 30)));
        let k = rng.gen_range(1..4);
        let p = Strategy::leader(
            (0..k)
                .map(|_| Coord::new(rng.gen_range(-4..124), 4).unwrap())
                .collect(),
        );
        let seq = gain_sequence(&voters, &p);
        for tau in 1..=voters.len() + 1 {
            let strict = (0..=2 * k + 2)
                .filter(|&l| classify_threshold(&seq, l, tau) == Some(Strictness::Strict))
                .count();
            check(
                "threshold partition",
                strict == 1,
                format!("tau {tau} strict for {strict} budgets"),
            );
        }
        for l in 0..=2 * k + 2 {
            let lo = seq.tau(l + 1).unwrap_or(0);
            let hi = seq.tau(l).unwrap_or(usize::MAX);
            for tau in 0..=voters.len() + 1 {
                let valid = classify_threshold(&seq, l, tau).is_some();
                check(
                    "threshold partition",
                    valid == (lo <= tau && tau <= hi),
                    format!("l {l} tau {tau}"),
                );
            }
        }
    }

    // Budget monotonicity.
    for _ in 0..60 {
        let v = ints(&distinct_ints(&mut rng, 2..7, 40));
        let gamma = |k: usize, l: usize| {
            solve_game(&normalize_instance(v.clone(), k, l).unwrap())
                .unwrap()
                .gamma
        };
        for k in 1..=3 {
            for l in 1..=4 {
                check(
                    "budget monotonicity",
                    gamma(k + 1, l) >= gamma(k, l),
                    format!("{v:?} k {k} l {l}"),
                );
                check(
                    "budget monotonicity",
                    gamma(k, l + 1) <= gamma(k, l),
                    format!("{v:?} k {k} l {l}"),
                );
            }
        }
    }

    // Monotone relaxation and final value ranges, plus deterministic replay.
    for _ in 0..40 {
        let voters = VoterSet::new(distinct_ints(&mut rng, 2..12, 50));
        let n = voters.len();
        let map = AMap::new(&voters).unwrap();
        let k = rng.gen_range(1..4);
        let l = rng.gen_range(1..2 * k);
        let tau = rng.gen_range(1..=(n / l).max(1));
        let opts = RunOptions {
            space: KeySpace::Full,
            trace: true,
        };
        let table = compute_solutions_with(tau, &voters, k, l, &map, opts).unwrap();
        for (key, old, new) in table.trace().unwrap() {
            check(
                "monotone relaxation",
                new > old,
                format!("{key:?} {old:?} -> {new:?}"),
            );
        }
        for (key, cell) in table.finite_cells() {
            let SubproblemKey { n: m, .. } = key;
            let in_range = match &cell.x_max {
                Ext::PosInf => m == n,
                x => *x > voters.voter_ext(m) && *x <= voters.voter_ext(m + 1),
            };
            check(
                "monotone relaxation",
                in_range,
                format!("{key:?} = {:?}", cell.x_max),
            );
        }
        let again = compute_solutions_with(tau, &voters, k, l, &map, opts).unwrap();
        check(
            "deterministic replay",
            again == table,
            format!("{:?} k {k} l {l} tau {tau}", voters.as_slice()),
        );
    }
    for _ in 0..20 {
        let game = random_instance(&mut rng, 12, 4);
        if game.is_trivial() {
            continue;
        }
        let seq = SolveOptions {
            parallel: false,
            ..SolveOptions::default()
        };
        let a = solve_game_with(&game, seq).unwrap();
        let b = solve_game(&game).unwrap();
        check(
            "deterministic replay",
            a == b,
            InstanceFile::from_instance(&game).to_json(),
        );
    }

    // I/O round trip with rational voters.
    for _ in 0..200 {
        let voters: Vec<Coord> = (0..rng.gen_range(1..8))
            .map(|_| Coord::new(rng.gen_range(-1000..1000), rng.gen_range(1..50)).unwrap())
            .collect();
        let file = InstanceFile {
            voters,
            k: rng.gen_range(1..4),
            l: rng.gen_range(1..4),
        };
        let back = InstanceFile::parse(&file.to_json()).unwrap();
        check("I/O round trip", back == file, file.to_json());
        let game = file.to_instance().unwrap();
        check(
            "I/O round trip",
            InstanceFile::from_instance(&game).to_instance().unwrap() == game,
            file.to_json(),
        );
    }

    let detail = match failures.first() {
        None => "gain pairs, threshold partition, budget monotonicity, monotone relaxation, deterministic replay, I/O round trip".to_string(),
        Some(first) => format!("{} violations, first {first}", failures.len()),
    };
    report.line("8", "invariant suites", failures.is_empty(), detail);
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    let solved = differential(&mut report);
    named_values(&mut report);
    certificates(&mut report, &solved);
    span_equivalence(&mut report);
    per_tau_bounds(&mut report, &solved);
    scaling(&mut report);
    gainmap_bound(&mut report);
    invariants(&mut report);
    if report.failed == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 8 criteria fail", report.failed);
        ExitCode::FAILURE
    }
}
