//! Domain types for setup-inventory situations, ordering plans, plan costing
//! and flow reconstruction.
//!
//! Conventions used across the crate:
//! * players are numbered `1..=n`, periods `1..=T`;
//! * an ordering plan entry `sigma[t] = r` means period `t`'s demand is
//!   served by the order placed in period `r`, and `sigma[t] = 0` if and
//!   only if period `t` has zero demand;
//! * demands are nonnegative integers, costs are nonnegative scalars.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::scalar::{from_count, Scalar};

/// A nonempty set of players, canonically a bitmask (player `i` is bit
/// `i - 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(usize);

impl Coalition {
    /// Builds a coalition from 1-based player indices.
    pub fn from_members(members: &[usize]) -> Result<Self, Error> {
        if members.is_empty() {
            return Err(Error::InvalidCoalition("empty member list".into()));
        }
        let mut mask = 0usize;
        for &i in members {
            if i == 0 || i > usize::BITS as usize {
                return Err(Error::InvalidCoalition(format!("player index {i}")));
            }
            mask |= 1 << (i - 1);
        }
        Ok(Coalition(mask))
    }

    /// The coalition of all players `1..=n`.
    pub fn grand(n: usize) -> Self {
        assert!(n >= 1 && n < usize::BITS as usize);
        Coalition((1 << n) - 1)
    }

    pub fn singleton(player: usize) -> Self {
        assert!(player >= 1);
        Coalition(1 << (player - 1))
    }

    /// Reconstructs a coalition from its bitmask form.
    pub fn from_mask(mask: usize) -> Result<Self, Error> {
        if mask == 0 {
            return Err(Error::InvalidCoalition("empty bitmask".into()));
        }
        Ok(Coalition(mask))
    }

    pub fn mask(&self) -> usize {
        self.0
    }

    pub fn contains(&self, player: usize) -> bool {
        player >= 1 && (self.0 >> (player - 1)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false // the type only represents nonempty coalitions
    }

    /// Members in ascending order, 1-based.
    pub fn members(&self) -> Vec<usize> {
        (1..=usize::BITS as usize)
            .filter(|&i| self.contains(i))
            .collect()
    }

    pub fn is_subset_of(&self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(&self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(&self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    /// All nonempty coalitions over `n` players in ascending bitmask order.
    pub fn all_nonempty(n: usize) -> impl Iterator<Item = Coalition> {
        (1..(1usize << n)).map(Coalition)
    }

    /// All nonempty subsets of this coalition in ascending bitmask order.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = Coalition> {
        let mask = self.0;
        (1..=mask).filter(move |s| s & !mask == 0).map(Coalition)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A setup-inventory situation: per-player demand plus the four cost
/// matrices (setup, holding, backlog, purchase), all `n x T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SISituation<R> {
    demand: Vec<Vec<u64>>,
    setup: Vec<Vec<R>>,
    holding: Vec<Vec<R>>,
    backlog: Vec<Vec<R>>,
    purchase: Vec<Vec<R>>,
}

impl<R: Scalar> SISituation<R> {
    /// Validates shapes (five identical `n x T` matrices, `n, T >= 1`) and
    /// nonnegativity of every cost entry.
    pub fn new(
        demand: Vec<Vec<u64>>,
        setup: Vec<Vec<R>>,
        holding: Vec<Vec<R>>,
        backlog: Vec<Vec<R>>,
        purchase: Vec<Vec<R>>,
    ) -> Result<Self, Error> {
        let n = demand.len();
        if n == 0 {
            return Err(Error::InvalidSituation("no players".into()));
        }
        if n >= usize::BITS as usize {
            return Err(Error::InvalidSituation(format!(
                "{n} players exceed the bitmask width"
            )));
        }
        let t = demand[0].len();
        if t == 0 {
            return Err(Error::InvalidSituation("no periods".into()));
        }
        for row in &demand {
            if row.len() != t {
                return Err(Error::InvalidSituation("ragged demand matrix".into()));
            }
        }
        for (name, matrix) in [
            ("setup", &setup),
            ("holding", &holding),
            ("backlog", &backlog),
            ("purchase", &purchase),
        ] {
            if matrix.len() != n {
                return Err(Error::InvalidSituation(format!(
                    "{name} matrix has {} rows, expected {n}",
                    matrix.len()
                )));
            }
            for (i, row) in matrix.iter().enumerate() {
                if row.len() != t {
                    return Err(Error::InvalidSituation(format!(
                        "{name} row {} has {} entries, expected {t}",
                        i + 1,
                        row.len()
                    )));
                }
                if let Some(j) = row.iter().position(|x| x.is_negative()) {
                    return Err(Error::InvalidSituation(format!(
                        "negative {name} cost for player {} period {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SISituation {
            demand,
            setup,
            holding,
            backlog,
            purchase,
        })
    }

    pub fn players(&self) -> usize {
        self.demand.len()
    }

    pub fn periods(&self) -> usize {
        self.demand[0].len()
    }

    pub fn demand(&self) -> &[Vec<u64>] {
        &self.demand
    }

    pub fn setup(&self) -> &[Vec<R>] {
        &self.setup
    }

    pub fn holding(&self) -> &[Vec<R>] {
        &self.holding
    }

    pub fn backlog(&self) -> &[Vec<R>] {
        &self.backlog
    }

    pub fn purchase(&self) -> &[Vec<R>] {
        &self.purchase
    }

    /// Demand row of one player (1-based).
    pub fn player_demand(&self, player: usize) -> &[u64] {
        &self.demand[player - 1]
    }

    /// Restricts the situation to the members of `coalition`, re-indexing
    /// players to `1..=|S|` in ascending order of the original indices.
    pub fn restrict(&self, coalition: Coalition) -> Result<SISituation<R>, Error> {
        self.check_coalition(coalition)?;
        let pick = |m: &[Vec<R>]| -> Vec<Vec<R>> {
            coalition.members().iter().map(|&i| m[i - 1].clone()).collect()
        };
        Ok(SISituation {
            demand: coalition
                .members()
                .iter()
                .map(|&i| self.demand[i - 1].clone())
                .collect(),
            setup: pick(&self.setup),
            holding: pick(&self.holding),
            backlog: pick(&self.backlog),
            purchase: pick(&self.purchase),
        })
    }

    pub(crate) fn check_coalition(&self, coalition: Coalition) -> Result<(), Error> {
        if coalition.mask() >> self.players() != 0 {
            return Err(Error::InvalidCoalition(format!(
                "{coalition} references players beyond {}",
                self.players()
            )));
        }
        Ok(())
    }
}

/// The pooled data a coalition solves its lot-sizing problem with: summed
/// demand and componentwise-minimum cost vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionCosts<R> {
    pub demand: Vec<u64>,
    pub purchase: Vec<R>,
    pub holding: Vec<R>,
    pub backlog: Vec<R>,
    pub setup: Vec<R>,
}

impl<R: Scalar> CoalitionCosts<R> {
    pub fn periods(&self) -> usize {
        self.demand.len()
    }

    pub fn total_demand(&self) -> u64 {
        self.demand.iter().sum()
    }
}

/// Summed demand and componentwise-minimum costs of a coalition.
///
/// Costs are antitone and demand additive under coalition growth: enlarging
/// the coalition can only lower each cost entry and adds demands up.
pub fn coalition_costs<R: Scalar>(
    situation: &SISituation<R>,
    coalition: Coalition,
) -> Result<CoalitionCosts<R>, Error> {
    situation.check_coalition(coalition)?;
    let t = situation.periods();
    let members = coalition.members();
    let min_row = |m: &[Vec<R>]| -> Vec<R> {
        (0..t)
            .map(|j| {
                members
                    .iter()
                    .map(|&i| m[i - 1][j].clone())
                    .min()
                    .expect("nonempty coalition")
            })
            .collect()
    };
    Ok(CoalitionCosts {
        demand: (0..t)
            .map(|j| members.iter().map(|&i| situation.demand()[i - 1][j]).sum())
            .collect(),
        purchase: min_row(situation.purchase()),
        holding: min_row(situation.holding()),
        backlog: min_row(situation.backlog()),
        setup: min_row(situation.setup()),
    })
}

/// An ordering plan: for each period, the period whose order serves its
/// demand (0 when the demand is zero).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderingPlan {
    sigma: Vec<usize>,
}

impl OrderingPlan {
    pub fn new(sigma: Vec<usize>) -> Self {
        OrderingPlan { sigma }
    }

    pub fn periods(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// Source period serving period `t` (1-based); 0 for zero demand.
    pub fn source(&self, t: usize) -> usize {
        self.sigma[t - 1]
    }

    /// The set of periods in which an order is placed.
    pub fn order_periods(&self) -> BTreeSet<usize> {
        self.sigma.iter().copied().filter(|&r| r > 0).collect()
    }

    /// Checks the zero-matching convention against a demand vector and that
    /// every source lies within the horizon.
    pub fn check_feasible(&self, demand: &[u64]) -> Result<(), Error> {
        let t_len = demand.len();
        if self.sigma.len() != t_len {
            return Err(Error::InfeasiblePlan {
                period: 0,
                detail: format!("plan has {} entries, expected {t_len}", self.sigma.len()),
            });
        }
        for (idx, (&r, &d)) in self.sigma.iter().zip(demand).enumerate() {
            let t = idx + 1;
            if r > t_len {
                return Err(Error::InfeasiblePlan {
                    period: t,
                    detail: format!("source {r} beyond horizon {t_len}"),
                });
            }
            if r == 0 && d > 0 {
                return Err(Error::InfeasiblePlan {
                    period: t,
                    detail: "positive demand left unserved".into(),
                });
            }
            if r > 0 && d == 0 {
                return Err(Error::InfeasiblePlan {
                    period: t,
                    detail: "order assigned to zero demand".into(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OrderingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma{:?}", self.sigma)
    }
}

/// Per-period unit cost of serving demand under a given plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostPlanVector<R> {
    pub values: Vec<R>,
}

impl<R: Scalar> CostPlanVector<R> {
    /// Unit cost at period `t` (1-based).
    pub fn at(&self, t: usize) -> &R {
        &self.values[t - 1]
    }

    /// Inner product with a demand vector.
    pub fn dot_demand(&self, demand: &[u64]) -> R {
        self.values
            .iter()
            .zip(demand)
            .fold(R::zero(), |acc, (p, &d)| acc + p.clone() * from_count::<R>(d))
    }
}

/// Unit cost of serving one unit of period `t` demand from an order placed
/// in period `r`: the purchase cost at `r` plus the holding chain
/// `h_r + .. + h_{t-1}` when `r < t`, or the backlog chain
/// `b_{t+1} + .. + b_r` when `r > t`.
pub fn unit_source_cost<R: Scalar>(costs: &CoalitionCosts<R>, r: usize, t: usize) -> R {
    let t_len = costs.periods();
    assert!(r >= 1 && r <= t_len, "source period out of range");
    assert!(t >= 1 && t <= t_len, "demand period out of range");
    let mut cost = costs.purchase[r - 1].clone();
    if r < t {
        for rho in r..t {
            cost = cost + costs.holding[rho - 1].clone();
        }
    } else {
        for rho in (t + 1)..=r {
            cost = cost + costs.backlog[rho - 1].clone();
        }
    }
    cost
}

/// The cost-plan vector of `plan`: zero where demand is zero, otherwise the
/// unit source cost of each period's assigned order.
pub fn plan_cost_vector<R: Scalar>(
    plan: &OrderingPlan,
    costs: &CoalitionCosts<R>,
) -> Result<CostPlanVector<R>, Error> {
    plan.check_feasible(&costs.demand)?;
    let values = (1..=costs.periods())
        .map(|t| {
            let r = plan.source(t);
            if r == 0 {
                R::zero()
            } else {
                unit_source_cost(costs, r, t)
            }
        })
        .collect();
    Ok(CostPlanVector { values })
}

/// Indicator vector of order periods: `delta[t] = 1` iff some period sources
/// its demand at `t + 1`.
pub fn delta_vector(plan: &OrderingPlan) -> Vec<bool> {
    let mut delta = vec![false; plan.periods()];
    for &r in plan.sigma() {
        if r > 0 {
            delta[r - 1] = true;
        }
    }
    delta
}

/// Total cost of a plan: cost-plan vector against demand, plus one setup
/// cost per order period.
pub fn plan_total_cost<R: Scalar>(
    plan: &OrderingPlan,
    costs: &CoalitionCosts<R>,
) -> Result<R, Error> {
    let p = plan_cost_vector(plan, costs)?;
    let mut total = p.dot_demand(&costs.demand);
    for r in plan.order_periods() {
        total = total + costs.setup[r - 1].clone();
    }
    Ok(total)
}

/// Order sizes, ending inventories and ending backlogs implied by a plan.
///
/// Boundary convention: `inventory[T-1]` and `backlog[T-1]` are always zero,
/// and at most one of inventory and backlog is positive after any period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowSchedule {
    pub orders: Vec<u64>,
    pub inventory: Vec<u64>,
    pub backlog: Vec<u64>,
}

impl FlowSchedule {
    /// Flow-side total cost. Inventory held across the boundary after
    /// period `t` is charged `h_t`; backlogged demand across that boundary
    /// is charged `b_{t+1}`, matching the per-unit chain costing of
    /// [`plan_cost_vector`]. Setup is paid in each period with a positive
    /// order.
    pub fn total_cost<R: Scalar>(&self, costs: &CoalitionCosts<R>) -> R {
        let t_len = self.orders.len();
        let mut total = R::zero();
        for t in 0..t_len {
            total = total + costs.purchase[t].clone() * from_count::<R>(self.orders[t]);
            if self.orders[t] > 0 {
                total = total + costs.setup[t].clone();
            }
            if t + 1 < t_len {
                total = total + costs.holding[t].clone() * from_count::<R>(self.inventory[t]);
                total = total + costs.backlog[t + 1].clone() * from_count::<R>(self.backlog[t]);
            }
        }
        total
    }
}

/// Rebuilds order sizes and net stock positions from a plan.
///
/// Rejects crossing plans: if some boundary is crossed forward by an
/// inventory chain and backward by a backlog chain, the two flows cancel in
/// the net position and the flow cost would undercount the plan cost.
pub fn reconstruct_flows(plan: &OrderingPlan, demand: &[u64]) -> Result<FlowSchedule, Error> {
    plan.check_feasible(demand)?;
    let t_len = demand.len();

    // boundary b sits between periods b and b+1 (1-based)
    let mut forward = vec![false; t_len + 1];
    let mut backward = vec![false; t_len + 1];
    for (idx, &r) in plan.sigma().iter().enumerate() {
        let t = idx + 1;
        if r == 0 {
            continue;
        }
        if r < t {
            for b in r..t {
                forward[b] = true;
            }
        } else {
            for b in t..r {
                backward[b] = true;
            }
        }
    }
    if let Some(b) = (1..t_len).find(|&b| forward[b] && backward[b]) {
        return Err(Error::CrossingPlan { boundary: b });
    }

    let mut orders = vec![0u64; t_len];
    for (idx, &r) in plan.sigma().iter().enumerate() {
        if r > 0 {
            orders[r - 1] += demand[idx];
        }
    }

    let mut inventory = vec![0u64; t_len];
    let mut backlog = vec![0u64; t_len];
    let mut net: i128 = 0;
    for t in 0..t_len {
        net += orders[t] as i128 - demand[t] as i128;
        if net >= 0 {
            inventory[t] = u64::try_from(net).expect("inventory exceeds u64");
        } else {
            backlog[t] = u64::try_from(-net).expect("backlog exceeds u64");
        }
    }
    debug_assert_eq!(net, 0, "plans serve all demand exactly");
    Ok(FlowSchedule {
        orders,
        inventory,
        backlog,
    })
}
