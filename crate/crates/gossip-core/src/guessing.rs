//! Pair-guessing game between a guesser and a hidden target set, plus a
//! mirror that replays a gossip run on a gadget graph as a sequence of
//! guesses.
//!
//! The universe is `A x B` with both sides indexed `0..m`. A round submits a
//! set of at most `2m` pairs; every submitted pair that lies in the target
//! set is revealed, and the reveal clears *all* remaining target pairs that
//! share a right endpoint with a revealed pair. The game halts once the
//! target set is empty.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::generate::{Gadget, TargetPredicate};
use crate::graph::{LatencyGraph, NodeId};
use crate::sim::{Metrics, Round};
use crate::util::seeded_rng;

/// A pair of side indices, both in `0..m`.
pub type Pair = (usize, usize);

const GAME_SALT: u64 = 0x4755_4553;

/// One submitted round: the (deduplicated, sorted) guess set and the subset
/// of it that was revealed as targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub guesses: Vec<Pair>,
    pub revealed: Vec<Pair>,
}

/// Guesser-vs-target state. The target set is inspectable; strategies that
/// want to play fair should only look at what `submit` returns.
#[derive(Clone, Debug)]
pub struct GuessingGame {
    m: usize,
    target: BTreeSet<Pair>,
    round: u64,
    history: Vec<RoundRecord>,
}

/// Draw a fresh game over `A x B` with `|A| = |B| = m`.
pub fn new_game(m: usize, predicate: &TargetPredicate, seed: u64) -> Result<GuessingGame> {
    if m == 0 {
        return Err(Error::InvalidParam("guessing game needs m >= 1".into()));
    }
    let mut rng = seeded_rng(seed, GAME_SALT);
    let mut target = BTreeSet::new();
    match predicate {
        TargetPredicate::Singleton => {
            target.insert((rng.gen_range(0..m), rng.gen_range(0..m)));
        }
        TargetPredicate::RandomP(p) => {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(Error::InvalidParam(format!("p={p} outside (0, 1]")));
            }
            for a in 0..m {
                for b in 0..m {
                    if rng.gen_bool(*p) {
                        target.insert((a, b));
                    }
                }
            }
        }
        TargetPredicate::Explicit(pairs) => {
            for &(a, b) in pairs {
                if a >= m || b >= m {
                    return Err(Error::GuessOutOfRange { a, b, m });
                }
                target.insert((a, b));
            }
        }
    }
    Ok(GuessingGame {
        m,
        target,
        round: 0,
        history: Vec::new(),
    })
}

impl GuessingGame {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Rounds submitted so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn is_halted(&self) -> bool {
        self.target.is_empty()
    }

    pub fn target_size(&self) -> usize {
        self.target.len()
    }

    pub fn target_pairs(&self) -> Vec<Pair> {
        self.target.iter().copied().collect()
    }

    pub fn history(&self) -> &[RoundRecord] {
        &self.history
    }

    /// Submit one round of guesses. Duplicates collapse (the round is a set);
    /// the deduplicated set must fit the `2m` budget and stay inside the
    /// universe. Returns the revealed pairs in sorted order; afterwards every
    /// target pair sharing a right endpoint with a revealed pair is gone.
    pub fn submit(&mut self, guesses: &[Pair]) -> Result<Vec<Pair>> {
        let mut x = BTreeSet::new();
        for &(a, b) in guesses {
            if a >= self.m || b >= self.m {
                return Err(Error::GuessOutOfRange { a, b, m: self.m });
            }
            x.insert((a, b));
        }
        let budget = 2 * self.m;
        if x.len() > budget {
            return Err(Error::GuessBudget {
                got: x.len(),
                budget,
            });
        }
        let revealed: Vec<Pair> = x.iter().copied().filter(|p| self.target.contains(p)).collect();
        let hit_b: BTreeSet<usize> = revealed.iter().map(|&(_, b)| b).collect();
        self.target.retain(|&(_, b)| !hit_b.contains(&b));
        self.round += 1;
        self.history.push(RoundRecord {
            guesses: x.into_iter().collect(),
            revealed: revealed.clone(),
        });
        Ok(revealed)
    }
}

/// Oblivious baseline: every round pairs each left index with a uniform right
/// index and vice versa. Returns the round count at halt; check
/// `game.is_halted()` if the cap might bind.
pub fn strategy_random_per_endpoint(
    game: &mut GuessingGame,
    seed: u64,
    max_rounds: u64,
) -> Result<u64> {
    let m = game.m();
    let mut rng = seeded_rng(seed, GAME_SALT ^ 0x52_4e44);
    while !game.is_halted() && game.round() < max_rounds {
        let mut x = BTreeSet::new();
        for a in 0..m {
            x.insert((a, rng.gen_range(0..m)));
        }
        for b in 0..m {
            x.insert((rng.gen_range(0..m), b));
        }
        let x: Vec<Pair> = x.into_iter().collect();
        game.submit(&x)?;
    }
    Ok(game.round())
}

/// Deterministic sweep: spend the whole budget each round, spread evenly over
/// right endpoints that are neither revealed nor exhausted, and never repeat
/// a guess. Halts within `ceil(m/2)` rounds on any target set.
pub fn strategy_adaptive_exhaustive(game: &mut GuessingGame) -> Result<u64> {
    let m = game.m();
    let budget = 2 * m;
    let mut next_a = vec![0usize; m];
    let mut alive: Vec<bool> = vec![true; m];
    while !game.is_halted() {
        let mut x = Vec::with_capacity(budget);
        while x.len() < budget {
            let mut advanced = false;
            for b in 0..m {
                if x.len() >= budget {
                    break;
                }
                if alive[b] && next_a[b] < m {
                    x.push((next_a[b], b));
                    next_a[b] += 1;
                    advanced = true;
                }
            }
            if !advanced {
                break;
            }
        }
        if x.is_empty() {
            break;
        }
        let revealed = game.submit(&x)?;
        for (_, b) in revealed {
            alive[b] = false;
        }
        for b in 0..m {
            if next_a[b] >= m {
                alive[b] = false;
            }
        }
    }
    Ok(game.round())
}

/// One mirrored guess: a cross edge the gossip run initiated, stamped with
/// the engine round and whether the game revealed it as a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessEvent {
    pub round: Round,
    pub pair: Pair,
    pub revealed: bool,
}

/// Outcome of replaying a gossip run as a guessing game.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub metrics: Metrics,
    /// Engine round in which the mirrored game halted, if it did.
    pub halt_round: Option<u64>,
    pub guesses: Vec<GuessEvent>,
    /// No slow cross edge can have delivered by the completion round, so the
    /// run finished on fast edges alone.
    pub premise_holds: bool,
    /// Vacuously true when the premise fails; otherwise the run completed no
    /// earlier than the mirrored game halted.
    pub sound: bool,
}

/// Run a gossip algorithm on a gadget and mirror every cross-edge initiation
/// as a guess against the gadget's target pairs, round for round. The
/// algorithm must record a full trace.
pub fn gossip_as_guessing<F>(gadget: &Gadget, run: F) -> Result<ReductionReport>
where
    F: FnOnce(&LatencyGraph) -> Result<Metrics>,
{
    let metrics = run(&gadget.graph)?;
    if metrics.trace.is_empty() && metrics.exchanges_initiated > 0 {
        return Err(Error::InvalidParam(
            "gossip_as_guessing needs a full trace; enable SimConfig::with_trace".into(),
        ));
    }
    let m = gadget.m;
    let cross_pair = |u: NodeId, v: NodeId| -> Option<Pair> {
        match (u < m, v < m) {
            (true, false) => Some((u, v - m)),
            (false, true) => Some((v, u - m)),
            _ => None,
        }
    };

    let mut game = new_game(m, &TargetPredicate::Explicit(gadget.targets.clone()), 0)?;
    let mut halt_round = if game.is_halted() { Some(0) } else { None };
    let mut guesses = Vec::new();
    let mut idx = 0;
    for r in 1..=metrics.rounds_elapsed {
        if halt_round.is_some() {
            break;
        }
        let mut x = BTreeSet::new();
        while idx < metrics.trace.len() && metrics.trace[idx].round == r {
            if let Some(p) = cross_pair(metrics.trace[idx].initiator, metrics.trace[idx].responder)
            {
                x.insert(p);
            }
            idx += 1;
        }
        let x: Vec<Pair> = x.into_iter().collect();
        let revealed = game.submit(&x)?;
        for &pair in &x {
            guesses.push(GuessEvent {
                round: r,
                pair,
                revealed: revealed.binary_search(&pair).is_ok(),
            });
        }
        if game.is_halted() {
            halt_round = Some(r);
        } else if idx == metrics.trace.len() {
            break;
        }
    }

    // Slow initiations at round r >= 1 land at r + hi > hi, so a run that is
    // complete by round hi never saw a slow delivery.
    let premise_holds = metrics.completed && metrics.rounds_elapsed <= gadget.hi;
    let sound = !premise_holds || halt_round.is_some_and(|h| h <= metrics.rounds_elapsed);
    Ok(ReductionReport {
        metrics,
        halt_round,
        guesses,
        premise_holds,
        sound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{self, TargetPredicate};
    use crate::protocols::{push_pull, PushPullMode};
    use crate::sim::{self, NodeView, Protocol, SimConfig, TraceLevel};
    use proptest::prelude::*;

    #[test]
    fn singleton_picks_one_pair() {
        let g = new_game(4, &TargetPredicate::Singleton, 11).unwrap();
        assert_eq!(g.target_size(), 1);
        let (a, b) = g.target_pairs()[0];
        assert!(a < 4 && b < 4);
        let again = new_game(4, &TargetPredicate::Singleton, 11).unwrap();
        assert_eq!(g.target_pairs(), again.target_pairs());
    }

    #[test]
    fn full_probability_targets_every_pair() {
        let g = new_game(3, &TargetPredicate::RandomP(1.0), 0).unwrap();
        assert_eq!(g.target_size(), 9);
    }

    #[test]
    fn empty_target_is_already_solved() {
        let g = new_game(5, &TargetPredicate::Explicit(vec![]), 0).unwrap();
        assert!(g.is_halted());
        assert_eq!(g.round(), 0);
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(new_game(3, &TargetPredicate::RandomP(0.0), 0).is_err());
        assert!(new_game(3, &TargetPredicate::RandomP(1.5), 0).is_err());
    }

    #[test]
    fn rejects_oversized_guess_sets() {
        let mut g = new_game(3, &TargetPredicate::Singleton, 0).unwrap();
        let too_many: Vec<Pair> = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .take(7)
            .collect();
        match g.submit(&too_many) {
            Err(Error::GuessBudget { got, budget }) => {
                assert_eq!((got, budget), (7, 6));
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        assert_eq!(g.round(), 0);
    }

    #[test]
    fn rejects_out_of_range_guesses() {
        let mut g = new_game(3, &TargetPredicate::Singleton, 0).unwrap();
        assert!(matches!(
            g.submit(&[(0, 3)]),
            Err(Error::GuessOutOfRange { a: 0, b: 3, m: 3 })
        ));
        assert!(new_game(3, &TargetPredicate::Explicit(vec![(3, 0)]), 0).is_err());
    }

    #[test]
    fn direct_hit_ends_the_game() {
        let mut g = new_game(4, &TargetPredicate::Explicit(vec![(1, 2)]), 0).unwrap();
        let revealed = g.submit(&[(0, 0), (1, 2)]).unwrap();
        assert_eq!(revealed, vec![(1, 2)]);
        assert!(g.is_halted());
        assert_eq!(g.round(), 1);
    }

    #[test]
    fn hit_clears_every_pair_sharing_its_right_endpoint() {
        let mut g =
            new_game(4, &TargetPredicate::Explicit(vec![(0, 1), (2, 1), (3, 1)]), 0).unwrap();
        let revealed = g.submit(&[(2, 1)]).unwrap();
        assert_eq!(revealed, vec![(2, 1)]);
        assert!(g.is_halted());
    }

    #[test]
    fn distinct_right_endpoints_survive_a_single_hit() {
        let mut g = new_game(4, &TargetPredicate::Explicit(vec![(0, 1), (0, 2)]), 0).unwrap();
        let revealed = g.submit(&[(0, 1)]).unwrap();
        assert_eq!(revealed, vec![(0, 1)]);
        assert!(!g.is_halted());
        assert_eq!(g.target_pairs(), vec![(0, 2)]);
    }

    #[test]
    fn misses_reveal_nothing_and_clear_nothing() {
        let mut g = new_game(4, &TargetPredicate::Explicit(vec![(0, 1)]), 0).unwrap();
        // (3, 1) shares the right endpoint but is not a target: no effect.
        let revealed = g.submit(&[(3, 1), (2, 2)]).unwrap();
        assert!(revealed.is_empty());
        assert!(!g.is_halted());
        assert_eq!(g.target_pairs(), vec![(0, 1)]);
    }

    /// Independent encoding of the update as set algebra: remove the product
    /// of T's left endpoints with the hit right endpoints from T, where hits
    /// are the guesses that landed in T.
    fn oracle_update(t: &BTreeSet<Pair>, x: &BTreeSet<Pair>) -> BTreeSet<Pair> {
        let hits: BTreeSet<Pair> = x.intersection(t).copied().collect();
        let t_a: BTreeSet<usize> = t.iter().map(|&(a, _)| a).collect();
        let t_b: BTreeSet<usize> = t.iter().map(|&(_, b)| b).collect();
        let hit_b: BTreeSet<usize> = hits.iter().map(|&(_, b)| b).collect();
        let mut product = BTreeSet::new();
        for &a in &t_a {
            for b in t_b.intersection(&hit_b) {
                product.insert((a, *b));
            }
        }
        t.difference(&product).copied().collect()
    }

    #[test]
    fn update_matches_the_set_formula_exhaustively() {
        for m in 1..=3usize {
            let pairs: Vec<Pair> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
            let npairs = pairs.len();
            for t_mask in 0u32..(1 << npairs) {
                let t: BTreeSet<Pair> = (0..npairs)
                    .filter(|i| t_mask >> i & 1 == 1)
                    .map(|i| pairs[i])
                    .collect();
                for x_mask in 0u32..(1 << npairs) {
                    if (x_mask.count_ones() as usize) > 2 * m {
                        continue;
                    }
                    let x: BTreeSet<Pair> = (0..npairs)
                        .filter(|i| x_mask >> i & 1 == 1)
                        .map(|i| pairs[i])
                        .collect();
                    let expect = oracle_update(&t, &x);
                    let mut game = new_game(
                        m,
                        &TargetPredicate::Explicit(t.iter().copied().collect()),
                        0,
                    )
                    .unwrap();
                    let guess: Vec<Pair> = x.iter().copied().collect();
                    let revealed = game.submit(&guess).unwrap();
                    let revealed: BTreeSet<Pair> = revealed.into_iter().collect();
                    let hits: BTreeSet<Pair> = x.intersection(&t).copied().collect();
                    assert_eq!(revealed, hits);
                    let after: BTreeSet<Pair> = game.target_pairs().into_iter().collect();
                    assert_eq!(after, expect, "m={m} t={t:?} x={x:?}");
                    assert!(after.is_subset(&t));
                    assert_eq!(game.is_halted(), after.is_empty());
                }
            }
        }
    }

    #[test]
    fn random_endpoint_strategy_solves_m1_immediately() {
        let mut g = new_game(1, &TargetPredicate::Singleton, 3).unwrap();
        let rounds = strategy_random_per_endpoint(&mut g, 4, 100).unwrap();
        assert_eq!(rounds, 1);
        assert!(g.is_halted());
    }

    #[test]
    fn random_endpoint_strategy_halts_on_random_targets() {
        for seed in 0..10 {
            let mut g = new_game(8, &TargetPredicate::RandomP(0.3), seed).unwrap();
            strategy_random_per_endpoint(&mut g, seed ^ 0xabc, 100_000).unwrap();
            assert!(g.is_halted(), "seed {seed} did not halt");
            for rec in g.history() {
                assert!(rec.guesses.len() <= 16);
            }
        }
    }

    #[test]
    fn adaptive_strategy_covers_a_singleton_within_half_m_rounds() {
        for a in 0..8 {
            for b in 0..8 {
                let mut g =
                    new_game(8, &TargetPredicate::Explicit(vec![(a, b)]), 0).unwrap();
                let rounds = strategy_adaptive_exhaustive(&mut g).unwrap();
                assert!(g.is_halted());
                assert!(rounds <= 4, "target ({a},{b}) took {rounds} rounds");
            }
        }
    }

    #[test]
    fn adaptive_strategy_clears_a_full_target_in_one_round() {
        let mut g = new_game(5, &TargetPredicate::RandomP(1.0), 0).unwrap();
        let rounds = strategy_adaptive_exhaustive(&mut g).unwrap();
        assert_eq!(rounds, 1);
        assert!(g.is_halted());
    }

    #[test]
    fn adaptive_strategy_never_repeats_and_skips_revealed_endpoints() {
        let mut g = new_game(6, &TargetPredicate::RandomP(0.4), 9).unwrap();
        strategy_adaptive_exhaustive(&mut g).unwrap();
        assert!(g.is_halted());
        let mut seen = BTreeSet::new();
        let mut cleared: BTreeSet<usize> = BTreeSet::new();
        for rec in g.history() {
            assert!(rec.guesses.len() <= 12);
            for &p in &rec.guesses {
                assert!(seen.insert(p), "repeated guess {p:?}");
                assert!(!cleared.contains(&p.1), "guessed a cleared endpoint {p:?}");
            }
            cleared.extend(rec.revealed.iter().map(|&(_, b)| b));
        }
    }

    proptest! {
        #[test]
        fn target_only_shrinks_and_halts_exactly_on_empty(
            m in 1usize..6,
            masks in proptest::collection::vec(0u64..(1 << 25), 1..8),
            t_mask in 0u64..(1 << 25),
        ) {
            let pairs: Vec<Pair> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
            let t: Vec<Pair> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| t_mask >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            let mut game = new_game(m, &TargetPredicate::Explicit(t), 0).unwrap();
            for mask in masks {
                let before: BTreeSet<Pair> = game.target_pairs().into_iter().collect();
                let x: Vec<Pair> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| *p)
                    .take(2 * m)
                    .collect();
                let revealed = game.submit(&x).unwrap();
                let after: BTreeSet<Pair> = game.target_pairs().into_iter().collect();
                prop_assert!(after.is_subset(&before));
                for p in revealed {
                    prop_assert!(before.contains(&p));
                    prop_assert!(!after.contains(&p));
                }
                prop_assert_eq!(game.is_halted(), after.is_empty());
            }
        }
    }

    fn traced(seed: u64, max_rounds: u64) -> SimConfig {
        SimConfig::new(seed, max_rounds).with_trace(TraceLevel::Full)
    }

    #[test]
    fn mirrored_pushpull_cannot_finish_before_the_game_halts() {
        let gadget =
            generate::gadget(8, 1, 4096, &TargetPredicate::Singleton, true, 5).unwrap();
        let report = gossip_as_guessing(&gadget, |g| {
            let (m, _) = push_pull(g, PushPullMode::LocalBroadcast { ell: 1 }, &traced(21, 3000))?;
            Ok(m)
        })
        .unwrap();
        assert!(report.metrics.completed);
        assert!(report.premise_holds);
        let halt = report.halt_round.expect("mirrored game should halt");
        assert!(halt <= report.metrics.rounds_elapsed);
        assert!(report.sound);
    }

    #[test]
    fn asymmetric_gadget_mirror_stays_sound_with_many_targets() {
        let gadget =
            generate::gadget(6, 1, 4096, &TargetPredicate::RandomP(0.5), false, 7).unwrap();
        let report = gossip_as_guessing(&gadget, |g| {
            let (m, _) = push_pull(g, PushPullMode::LocalBroadcast { ell: 1 }, &traced(3, 3000))?;
            Ok(m)
        })
        .unwrap();
        assert!(report.metrics.completed);
        assert!(report.premise_holds);
        assert!(report.sound);
        assert!(report.halt_round.unwrap() <= report.metrics.rounds_elapsed);
    }

    /// Chats only within its own side, so it can never finish a local
    /// broadcast across the bridge and never produces a mirrored guess.
    struct SameSideOnly {
        m: usize,
        adj: Vec<Vec<NodeId>>,
        ptr: Vec<usize>,
    }

    impl Protocol for SameSideOnly {
        type Payload = ();

        fn init(&mut self, g: &LatencyGraph, _seed: u64) {
            self.adj = (0..g.n())
                .map(|v| {
                    g.neighbors(v)
                        .filter(|&u| (u < self.m) == (v < self.m))
                        .collect()
                })
                .collect();
            self.ptr = vec![0; g.n()];
        }

        fn on_round(&mut self, view: &NodeView<'_>) -> Option<NodeId> {
            let v = view.node();
            if self.adj[v].is_empty() {
                return None;
            }
            let pick = self.adj[v][self.ptr[v] % self.adj[v].len()];
            self.ptr[v] += 1;
            Some(pick)
        }

        fn snapshot(&self, _node: NodeId) {}

        fn on_deliver(&mut self, _n: NodeId, _f: NodeId, _p: &(), _v: &NodeView<'_>) {}

        fn is_done(&self, _node: NodeId) -> bool {
            false
        }
    }

    #[test]
    fn clique_only_chatter_never_finishes_and_never_guesses() {
        let gadget =
            generate::gadget(4, 1, 64, &TargetPredicate::Singleton, true, 2).unwrap();
        let report = gossip_as_guessing(&gadget, |g| {
            let mut p = SameSideOnly {
                m: 4,
                adj: Vec::new(),
                ptr: Vec::new(),
            };
            sim::run(g, &mut p, &traced(0, 50))
        })
        .unwrap();
        assert!(!report.metrics.completed);
        assert!(report.guesses.is_empty());
        assert_eq!(report.halt_round, None);
        assert!(!report.premise_holds);
        assert!(report.sound);
    }

    #[test]
    fn revealed_guesses_land_exactly_when_fast_edges_fire() {
        let gadget =
            generate::gadget(5, 1, 2048, &TargetPredicate::RandomP(0.3), true, 13).unwrap();
        let report = gossip_as_guessing(&gadget, |g| {
            let (m, _) = push_pull(g, PushPullMode::AllToAll, &traced(8, 2000))?;
            Ok(m)
        })
        .unwrap();
        let targets: BTreeSet<Pair> = gadget.targets.iter().copied().collect();
        // Fast-edge initiations in the trace, keyed by engine round.
        let fast_fires: BTreeSet<(Round, Pair)> = report
            .metrics
            .trace
            .iter()
            .filter(|rec| rec.latency == 1)
            .filter_map(|rec| {
                let (u, v) = (rec.initiator, rec.responder);
                match (u < 5, v < 5) {
                    (true, false) => Some((rec.round, (u, v - 5))),
                    (false, true) => Some((rec.round, (v, u - 5))),
                    _ => None,
                }
            })
            .collect();
        for ev in &report.guesses {
            if ev.revealed {
                assert!(targets.contains(&ev.pair));
                assert!(fast_fires.contains(&(ev.round, ev.pair)));
            }
        }
        // A fast edge's first firing is revealed unless an earlier hit on the
        // same right endpoint had already cleared it from the target set.
        let mirrored_until = report.halt_round.unwrap_or(u64::MAX);
        let mut first_seen: BTreeSet<Pair> = BTreeSet::new();
        for &(r, p) in &fast_fires {
            if r <= mirrored_until && first_seen.insert(p) {
                let cleared_earlier = report
                    .guesses
                    .iter()
                    .any(|ev| ev.revealed && ev.pair.1 == p.1 && ev.round < r);
                if !cleared_earlier {
                    assert!(
                        report
                            .guesses
                            .iter()
                            .any(|ev| ev.pair == p && ev.round == r && ev.revealed),
                        "fast edge {p:?} fired at {r} without a revealed mirror"
                    );
                }
            }
        }
    }

    #[test]
    fn mirror_requires_a_trace() {
        let gadget =
            generate::gadget(4, 1, 64, &TargetPredicate::Singleton, true, 2).unwrap();
        let err = gossip_as_guessing(&gadget, |g| {
            let (m, _) = push_pull(g, PushPullMode::AllToAll, &SimConfig::new(0, 100))?;
            Ok(m)
        });
        assert!(err.is_err());
    }
}
