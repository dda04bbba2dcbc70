//! The coalition game induced by a situation: one canonical solve per
//! nonempty coalition, plus reduced situations, subgames, ordering-period
//! sets and consolidated periods.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::model::{coalition_costs, Coalition, CoalitionCosts, OrderingPlan, SISituation};
use crate::scalar::Scalar;
use crate::solver::{solve, SolveResult};

/// Default cap on the number of players (the game stores `2^n - 1` entries).
pub const DEFAULT_PLAYER_CAP: usize = 16;

/// One coalition's record: optimal value, canonical plan, pooled costs and
/// order periods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionEntry<R> {
    pub value: R,
    pub plan: OrderingPlan,
    pub costs: CoalitionCosts<R>,
    pub order_periods: BTreeSet<usize>,
}

/// A fully enumerated coalition game over a situation.
///
/// Immutable once built; the empty coalition has value zero by convention
/// and is not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SIGame<R> {
    situation: SISituation<R>,
    entries: Vec<CoalitionEntry<R>>,
}

impl<R: Scalar> SIGame<R> {
    pub fn situation(&self) -> &SISituation<R> {
        &self.situation
    }

    pub fn players(&self) -> usize {
        self.situation.players()
    }

    pub fn periods(&self) -> usize {
        self.situation.periods()
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.players())
    }

    pub fn entry(&self, coalition: Coalition) -> Result<&CoalitionEntry<R>, Error> {
        self.situation.check_coalition(coalition)?;
        Ok(&self.entries[coalition.mask() - 1])
    }

    /// Characteristic value `c(S)`.
    pub fn value(&self, coalition: Coalition) -> Result<R, Error> {
        Ok(self.entry(coalition)?.value.clone())
    }

    /// Nonempty coalitions in ascending bitmask order.
    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> {
        Coalition::all_nonempty(self.players())
    }
}

fn solve_entry<R: Scalar>(situation: &SISituation<R>, coalition: Coalition) -> CoalitionEntry<R> {
    let costs = coalition_costs(situation, coalition).expect("coalition validated by caller");
    let SolveResult {
        plan,
        value,
        order_periods,
    } = solve(&costs);
    CoalitionEntry {
        value,
        plan,
        costs,
        order_periods,
    }
}

/// Builds the game with the default player cap, single-threaded.
pub fn build_game<R: Scalar>(situation: &SISituation<R>) -> Result<SIGame<R>, Error> {
    build_game_with(situation, DEFAULT_PLAYER_CAP, 1)
}

/// Builds the game, solving every nonempty coalition with the canonical
/// solver. `jobs > 1` splits the coalition range across threads; assembly
/// order, and therefore the result, is independent of `jobs`.
pub fn build_game_with<R: Scalar>(
    situation: &SISituation<R>,
    cap: usize,
    jobs: usize,
) -> Result<SIGame<R>, Error> {
    let n = situation.players();
    if n > cap {
        return Err(Error::TooManyPlayers { players: n, cap });
    }
    let total = (1usize << n) - 1;
    let entries = if jobs <= 1 || total < 2 * jobs {
        (1..=total)
            .map(|mask| solve_entry(situation, Coalition::from_mask(mask).unwrap()))
            .collect()
    } else {
        let chunk = total.div_ceil(jobs);
        let mut parts: Vec<Vec<CoalitionEntry<R>>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let lo = 1 + w * chunk;
                    let hi = (lo + chunk).min(total + 1);
                    scope.spawn(move || {
                        (lo..hi)
                            .map(|mask| solve_entry(situation, Coalition::from_mask(mask).unwrap()))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                parts.push(h.join().expect("solver thread panicked"));
            }
        });
        parts.into_iter().flatten().collect()
    };
    Ok(SIGame {
        situation: situation.clone(),
        entries,
    })
}

/// Restriction of the game to the subsets of `coalition`, re-indexed over
/// its members. Entries are copied, not re-solved; they coincide with what
/// building the restricted situation would produce.
pub fn subgame<R: Scalar>(game: &SIGame<R>, coalition: Coalition) -> Result<SIGame<R>, Error> {
    let situation = game.situation.restrict(coalition)?;
    let members = coalition.members();
    let entries = (1..(1usize << members.len()))
        .map(|sub| {
            let parent_mask: usize = members
                .iter()
                .enumerate()
                .filter(|(k, _)| (sub >> k) & 1 == 1)
                .map(|(_, &p)| 1usize << (p - 1))
                .sum();
            game.entries[parent_mask - 1].clone()
        })
        .collect();
    Ok(SIGame { situation, entries })
}

/// Replaces every player's cost rows by the grand-coalition minima; demand
/// is unchanged. The reduced game bounds the original from below coalition
/// by coalition and agrees on the grand coalition.
pub fn reduce_situation<R: Scalar>(situation: &SISituation<R>) -> SISituation<R> {
    let n = situation.players();
    let grand = coalition_costs(situation, Coalition::grand(n)).expect("grand coalition");
    SISituation::new(
        situation.demand().to_vec(),
        vec![grand.setup; n],
        vec![grand.holding; n],
        vec![grand.backlog; n],
        vec![grand.purchase; n],
    )
    .expect("reduced situation preserves validity")
}

/// Consolidated periods of a game with their witnessing players.
///
/// Period `t` is consolidated when some player forces an order at `t` on
/// every coalition containing them; the situation is consolidated when every
/// coalition orders only in consolidated periods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsolidatedReport {
    pub upsilon: BTreeSet<usize>,
    pub witnesses: BTreeMap<usize, BTreeSet<usize>>,
    pub is_consolidated: bool,
}

/// Computes the consolidated-period set over the game's canonical plans.
pub fn consolidated_report<R: Scalar>(game: &SIGame<R>) -> ConsolidatedReport {
    let n = game.players();
    let t_len = game.periods();
    assert!(t_len <= 128, "period bitmask limited to 128 periods");
    let order_mask: Vec<u128> = game
        .entries
        .iter()
        .map(|e| e.order_periods.iter().fold(0u128, |m, &t| m | (1 << (t - 1))))
        .collect();

    let mut witnesses: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for i in 1..=n {
        let mut forced = !0u128;
        for mask in 1..=(1usize << n) - 1 {
            if (mask >> (i - 1)) & 1 == 1 {
                forced &= order_mask[mask - 1];
            }
        }
        for t in 1..=t_len {
            if (forced >> (t - 1)) & 1 == 1 {
                witnesses.entry(t).or_default().insert(i);
            }
        }
    }
    let upsilon: BTreeSet<usize> = witnesses.keys().copied().collect();
    let upsilon_mask = upsilon.iter().fold(0u128, |m, &t| m | (1 << (t - 1)));
    let is_consolidated = order_mask.iter().all(|&m| m & !upsilon_mask == 0);
    ConsolidatedReport {
        upsilon,
        witnesses,
        is_consolidated,
    }
}

/// The order periods `T^S` of a coalition's canonical plan.
pub fn ordering_periods<R: Scalar>(
    game: &SIGame<R>,
    coalition: Coalition,
) -> Result<BTreeSet<usize>, Error> {
    Ok(game.entry(coalition)?.order_periods.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::int;

    fn c(members: &[usize]) -> Coalition {
        Coalition::from_members(members).unwrap()
    }

    #[test]
    fn consolidated_game_values() {
        let game = build_game(&fixtures::three_firms_consolidated()).unwrap();
        let expected = [
            (&[1][..], 8),
            (&[2], 12),
            (&[3], 20),
            (&[1, 2], 13),
            (&[1, 3], 17),
            (&[2, 3], 31),
            (&[1, 2, 3], 22),
        ];
        for (members, v) in expected {
            assert_eq!(game.value(c(members)).unwrap(), int(v), "c({members:?})");
        }
    }

    #[test]
    fn residual_setup_game_grand_value() {
        let game = build_game(&fixtures::three_firms_residual_setup()).unwrap();
        assert_eq!(game.value(c(&[1, 2, 3])).unwrap(), int(43));
    }

    #[test]
    fn single_player_game_matches_direct_solve() {
        let s = fixtures::three_firms_consolidated().restrict(c(&[2])).unwrap();
        let game = build_game(&s).unwrap();
        assert_eq!(game.value(c(&[1])).unwrap(), int(12));
    }

    #[test]
    fn player_cap_enforced() {
        let s = fixtures::three_firms_consolidated();
        assert!(matches!(
            build_game_with(&s, 2, 1),
            Err(Error::TooManyPlayers { players: 3, cap: 2 })
        ));
    }

    #[test]
    fn parallel_build_is_deterministic() {
        let s = fixtures::three_firms_residual_setup();
        let a = build_game_with(&s, 16, 1).unwrap();
        let b = build_game_with(&s, 16, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subgame_copies_parent_values() {
        let game = build_game(&fixtures::three_firms_consolidated()).unwrap();
        let sub = subgame(&game, c(&[2, 3])).unwrap();
        assert_eq!(sub.value(c(&[1])).unwrap(), int(12));
        assert_eq!(sub.value(c(&[2])).unwrap(), int(20));
        assert_eq!(sub.value(c(&[1, 2])).unwrap(), int(31));
    }

    #[test]
    fn subgame_of_grand_is_identity() {
        let game = build_game(&fixtures::three_firms_consolidated()).unwrap();
        let sub = subgame(&game, game.grand()).unwrap();
        assert_eq!(sub, game);
    }

    #[test]
    fn subgame_equals_rebuilt_restriction() {
        let s = fixtures::three_firms_residual_setup();
        let game = build_game(&s).unwrap();
        for coalition in game.coalitions() {
            let sub = subgame(&game, coalition).unwrap();
            let rebuilt = build_game(&s.restrict(coalition).unwrap()).unwrap();
            assert_eq!(sub, rebuilt);
        }
    }

    #[test]
    fn reduce_uses_grand_minima() {
        let reduced = reduce_situation(&fixtures::three_firms_heterogeneous());
        for i in 0..3 {
            assert_eq!(reduced.purchase()[i], vec![int(2), int(1), int(1)]);
            assert_eq!(reduced.setup()[i], vec![int(0), int(0), int(4)]);
        }
    }

    #[test]
    fn reduce_is_identity_on_homogeneous_costs() {
        let s = fixtures::three_firms_shared_costs();
        assert_eq!(reduce_situation(&s), s);
    }

    #[test]
    fn consolidated_report_consolidated_fixture() {
        let game = build_game(&fixtures::three_firms_consolidated()).unwrap();
        let report = consolidated_report(&game);
        assert_eq!(report.upsilon, [1, 2].into());
        assert!(report.is_consolidated);
        assert_eq!(report.witnesses[&1], [2, 3].into());
        assert_eq!(report.witnesses[&2], [1].into());
    }

    #[test]
    fn consolidated_report_residual_fixture() {
        let game = build_game(&fixtures::three_firms_residual_setup()).unwrap();
        let report = consolidated_report(&game);
        assert_eq!(report.upsilon, [2, 3].into());
        assert!(!report.is_consolidated);
        assert!(report.witnesses[&3].contains(&1));
        // the grand plan orders in all three periods, so period 1 stays
        // outside the consolidated set with setup mass 2
        let grand = game.entry(game.grand()).unwrap();
        assert_eq!(grand.order_periods, [1, 2, 3].into());
        assert_eq!(grand.costs.setup[0], int(2));
    }

    #[test]
    fn single_player_always_consolidated() {
        let s = fixtures::three_firms_residual_setup().restrict(c(&[1])).unwrap();
        let game = build_game(&s).unwrap();
        let report = consolidated_report(&game);
        assert_eq!(
            report.upsilon,
            ordering_periods(&game, c(&[1])).unwrap()
        );
        assert!(report.is_consolidated);
    }

    #[test]
    fn ordering_periods_examples() {
        let game = build_game(&fixtures::three_firms_consolidated()).unwrap();
        assert_eq!(ordering_periods(&game, c(&[1, 2])).unwrap(), [1, 2].into());
        let residual = build_game(&fixtures::three_firms_residual_setup()).unwrap();
        assert_eq!(ordering_periods(&residual, c(&[2])).unwrap(), [2].into());
    }

    #[test]
    fn zero_demand_coalition_has_no_orders() {
        let s = fixtures::situation_from_ints(
            &[&[0, 0], &[1, 2]],
            &[&[1, 1], &[1, 1]],
            &[&[1, 1], &[1, 1]],
            &[&[1, 1], &[1, 1]],
            &[&[1, 1], &[1, 1]],
        );
        let game = build_game(&s).unwrap();
        assert_eq!(ordering_periods(&game, c(&[1])).unwrap(), BTreeSet::new());
        assert_eq!(game.value(c(&[1])).unwrap(), int(0));
    }
}
