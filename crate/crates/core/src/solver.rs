//! Optimal ordering plans for a single coalition's data.
//!
//! The production solver is an interval dynamic program over regeneration
//! blocks: the horizon is partitioned into consecutive blocks, each served
//! by a single order placed inside the block. Two independent brute-force
//! oracles (order-set enumeration and full assignment enumeration) guard
//! that assumption in the test suites.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::model::{plan_total_cost, unit_source_cost, CoalitionCosts, OrderingPlan};
use crate::scalar::{from_count, Scalar};

/// How tied optimal plans are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanSelection {
    /// Prefer fewest order periods, then the lexicographically smallest
    /// order-period set, then the lexicographically smallest plan vector.
    ///
    /// This is the canonical rule for game building. It is load-bearing:
    /// consolidated-period analysis depends on which optimal plan each
    /// coalition is assigned.
    FewestOrders,
    /// Prefer the lexicographically smallest plan vector outright, favoring
    /// cheap early sources on ties. Used by the balanced-collection
    /// replication procedure.
    EarliestSource,
}

/// An optimal plan together with its exact cost and order periods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult<R> {
    pub plan: OrderingPlan,
    pub value: R,
    pub order_periods: BTreeSet<usize>,
}

fn count_and_set(sigma: &[usize]) -> (usize, Vec<usize>) {
    let set: BTreeSet<usize> = sigma.iter().copied().filter(|&r| r > 0).collect();
    (set.len(), set.into_iter().collect())
}

/// True when candidate `a` beats candidate `b` under `rule`.
fn beats<R: Scalar>(rule: PlanSelection, a: &(R, Vec<usize>), b: &(R, Vec<usize>)) -> bool {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => match rule {
            PlanSelection::EarliestSource => a.1 < b.1,
            PlanSelection::FewestOrders => {
                let ka = count_and_set(&a.1);
                let kb = count_and_set(&b.1);
                (ka.0, ka.1, &a.1) < (kb.0, kb.1, &b.1)
            }
        },
    }
}

fn consider<R: Scalar>(slot: &mut Option<(R, Vec<usize>)>, cand: (R, Vec<usize>), rule: PlanSelection) {
    match slot {
        None => *slot = Some(cand),
        Some(best) => {
            if beats(rule, &cand, best) {
                *slot = Some(cand);
            }
        }
    }
}

fn finish<R: Scalar>(cost: R, sigma: Vec<usize>) -> SolveResult<R> {
    let plan = OrderingPlan::new(sigma);
    let order_periods = plan.order_periods();
    SolveResult {
        plan,
        value: cost,
        order_periods,
    }
}

/// Unit-cost table `usc[r-1][t-1]` for all source/demand period pairs.
fn cost_table<R: Scalar>(costs: &CoalitionCosts<R>) -> Vec<Vec<R>> {
    let t_len = costs.periods();
    (1..=t_len)
        .map(|r| (1..=t_len).map(|t| unit_source_cost(costs, r, t)).collect())
        .collect()
}

/// Solves the lot-sizing problem with the canonical tie-break.
pub fn solve<R: Scalar>(costs: &CoalitionCosts<R>) -> SolveResult<R> {
    solve_with(costs, PlanSelection::FewestOrders)
}

/// Solves the lot-sizing problem with an explicit tie-break rule.
///
/// Dynamic program: `f(0) = 0`, `f(j) = min over i <= j` of
/// `f(i-1) + C(i, j)` where `C(i, j)` is zero for an all-zero-demand block
/// and otherwise the best single-order cost
/// `min over r in [i..j] of k_r + sum usc(r, t) d_t`.
pub fn solve_with<R: Scalar>(costs: &CoalitionCosts<R>, rule: PlanSelection) -> SolveResult<R> {
    let t_len = costs.periods();
    let d = &costs.demand;
    let usc = cost_table(costs);

    // weighted prefix sums: w[r-1][j] = sum over t <= j of usc(r, t) * d_t
    let mut w = vec![vec![R::zero(); t_len + 1]; t_len];
    for r in 0..t_len {
        for j in 1..=t_len {
            w[r][j] = w[r][j - 1].clone() + usc[r][j - 1].clone() * from_count::<R>(d[j - 1]);
        }
    }

    let mut f: Vec<Option<(R, Vec<usize>)>> = vec![None; t_len + 1];
    f[0] = Some((R::zero(), Vec::new()));
    for j in 1..=t_len {
        for i in 1..=j {
            let (base_cost, base_sigma) = f[i - 1].clone().expect("prefix always solvable");
            if (i..=j).all(|t| d[t - 1] == 0) {
                let mut sigma = base_sigma.clone();
                sigma.resize(j, 0);
                let mut best_j = f[j].take();
                consider(&mut best_j, (base_cost.clone(), sigma), rule);
                f[j] = best_j;
                continue;
            }
            for r in i..=j {
                let block = costs.setup[r - 1].clone() + w[r - 1][j].clone() - w[r - 1][i - 1].clone();
                let mut sigma = base_sigma.clone();
                for t in i..=j {
                    sigma.push(if d[t - 1] > 0 { r } else { 0 });
                }
                let cand = (base_cost.clone() + block, sigma);
                let mut best_j = f[j].take();
                consider(&mut best_j, cand, rule);
                f[j] = best_j;
            }
        }
    }
    let (value, sigma) = f[t_len].take().expect("horizon covered");
    finish(value, sigma)
}

/// Horizon cap for the order-set enumeration oracle.
pub const SUBSET_ORACLE_MAX_PERIODS: usize = 14;

/// Brute-force oracle: enumerates every candidate order-period set, serves
/// each positive-demand period from its cheapest source in the set, and
/// returns the best plan found. Independent of the dynamic program.
pub fn solve_oracle_subsets<R: Scalar>(costs: &CoalitionCosts<R>) -> Result<SolveResult<R>, Error> {
    let t_len = costs.periods();
    if t_len > SUBSET_ORACLE_MAX_PERIODS {
        return Err(Error::OracleLimit(format!(
            "{t_len} periods exceed the subset oracle cap of {SUBSET_ORACLE_MAX_PERIODS}"
        )));
    }
    if costs.total_demand() == 0 {
        return Ok(finish(R::zero(), vec![0; t_len]));
    }
    let usc = cost_table(costs);
    let mut best: Option<(R, Vec<usize>)> = None;
    for mask in 1u32..(1u32 << t_len) {
        let sources: Vec<usize> = (1..=t_len).filter(|&r| (mask >> (r - 1)) & 1 == 1).collect();
        let mut sigma = vec![0usize; t_len];
        for t in 1..=t_len {
            if costs.demand[t - 1] == 0 {
                continue;
            }
            let r = sources
                .iter()
                .copied()
                .min_by(|&a, &b| usc[a - 1][t - 1].cmp(&usc[b - 1][t - 1]).then(a.cmp(&b)))
                .expect("nonempty source set");
            sigma[t - 1] = r;
        }
        // price the induced plan itself; sources the assignment skipped do
        // not charge their setup
        let mut cost = R::zero();
        for t in 1..=t_len {
            if sigma[t - 1] > 0 {
                cost = cost
                    + usc[sigma[t - 1] - 1][t - 1].clone() * from_count::<R>(costs.demand[t - 1]);
            }
        }
        for r in sigma.iter().copied().collect::<BTreeSet<_>>() {
            if r > 0 {
                cost = cost + costs.setup[r - 1].clone();
            }
        }
        consider(&mut best, (cost, sigma), PlanSelection::FewestOrders);
    }
    let (value, sigma) = best.expect("at least one order set");
    Ok(finish(value, sigma))
}

/// Evaluation cap for the assignment enumeration oracle.
pub const ASSIGNMENT_ORACLE_MAX_PLANS: u64 = 1_000_000;

/// Brute-force oracle: exhaustive minimum over every feasible plan vector,
/// crossing plans included. Confirms empirically that non-crossing plans
/// suffice for optimality.
pub fn solve_oracle_assignments<R: Scalar>(
    costs: &CoalitionCosts<R>,
) -> Result<SolveResult<R>, Error> {
    let t_len = costs.periods();
    let positives: Vec<usize> = (1..=t_len).filter(|&t| costs.demand[t - 1] > 0).collect();
    if positives.is_empty() {
        return Ok(finish(R::zero(), vec![0; t_len]));
    }
    match (t_len as u64).checked_pow(positives.len() as u32) {
        Some(count) if count <= ASSIGNMENT_ORACLE_MAX_PLANS => {}
        _ => {
            return Err(Error::OracleLimit(format!(
                "{t_len}^{} plans exceed the assignment oracle cap of {ASSIGNMENT_ORACLE_MAX_PLANS}",
                positives.len()
            )))
        }
    }
    let usc = cost_table(costs);
    let mut digits = vec![1usize; positives.len()];
    let mut best: Option<(R, Vec<usize>)> = None;
    loop {
        let mut sigma = vec![0usize; t_len];
        for (slot, &t) in digits.iter().zip(&positives) {
            sigma[t - 1] = *slot;
        }
        let mut cost = R::zero();
        let mut used = vec![false; t_len];
        for (&r, &t) in digits.iter().zip(&positives) {
            cost = cost + usc[r - 1][t - 1].clone() * from_count::<R>(costs.demand[t - 1]);
            used[r - 1] = true;
        }
        for r in 1..=t_len {
            if used[r - 1] {
                cost = cost + costs.setup[r - 1].clone();
            }
        }
        consider(&mut best, (cost, sigma), PlanSelection::FewestOrders);

        // odometer step
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                let (value, sigma) = best.expect("at least one plan");
                return Ok(finish(value, sigma));
            }
            if digits[pos] < t_len {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 1;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{coalition_costs, Coalition};
    use crate::scalar::int;
    use crate::Rat;
    use num_traits::Zero;

    fn costs_of(situation: &crate::model::SISituation<Rat>, members: &[usize]) -> CoalitionCosts<Rat> {
        coalition_costs(situation, Coalition::from_members(members).unwrap()).unwrap()
    }

    #[test]
    fn unit_cost_same_period_is_purchase() {
        let s = fixtures::three_firms_consolidated();
        let c = costs_of(&s, &[1, 2, 3]);
        assert_eq!(unit_source_cost(&c, 2, 2), int(1));
    }

    #[test]
    fn unit_cost_holding_chain() {
        let s = fixtures::three_firms_shared_costs();
        let c = costs_of(&s, &[1, 2, 3]);
        // serving period 4 from period 3: purchase 2 plus holding 2
        assert_eq!(unit_source_cost(&c, 3, 4), int(4));
    }

    #[test]
    fn unit_cost_backlog_chain() {
        let s = fixtures::three_firms_consolidated();
        let c = costs_of(&s, &[1]);
        // serving period 1 from period 2: purchase 1 plus backlog 1
        assert_eq!(unit_source_cost(&c, 2, 1), int(2));
    }

    #[test]
    fn consolidated_singleton_prefers_single_order() {
        let s = fixtures::three_firms_consolidated();
        let res = solve(&costs_of(&s, &[1]));
        assert_eq!(res.value, int(8));
        // (1,2,2) ties at 8 but uses two orders
        assert_eq!(res.plan.sigma(), &[2, 2, 2]);
        assert_eq!(res.order_periods, [2].into());
    }

    #[test]
    fn consolidated_grand_coalition() {
        let s = fixtures::three_firms_consolidated();
        let res = solve(&costs_of(&s, &[1, 2, 3]));
        assert_eq!(res.value, int(22));
        assert_eq!(res.order_periods, [1, 2].into());
        assert_eq!(res.plan.sigma(), &[1, 2, 2]);
    }

    #[test]
    fn single_period_forced_plan() {
        let c = CoalitionCosts {
            demand: vec![5],
            purchase: vec![int(2)],
            holding: vec![int(0)],
            backlog: vec![int(0)],
            setup: vec![int(3)],
        };
        let res = solve(&c);
        assert_eq!(res.value, int(13));
        assert_eq!(res.plan.sigma(), &[1]);
    }

    #[test]
    fn subset_oracle_matches_known_value() {
        let s = fixtures::three_firms_consolidated();
        let res = solve_oracle_subsets(&costs_of(&s, &[3])).unwrap();
        assert_eq!(res.value, int(20));
    }

    #[test]
    fn subset_oracle_zero_demand() {
        let c = CoalitionCosts {
            demand: vec![0, 0, 0],
            purchase: vec![int(1); 3],
            holding: vec![int(1); 3],
            backlog: vec![int(1); 3],
            setup: vec![int(1); 3],
        };
        let res = solve_oracle_subsets(&c).unwrap();
        assert!(res.value.is_zero());
        assert!(res.order_periods.is_empty());
        assert_eq!(res.plan.sigma(), &[0, 0, 0]);
    }

    #[test]
    fn assignment_oracle_known_value() {
        let s = fixtures::three_firms_residual_setup();
        let res = solve_oracle_assignments(&costs_of(&s, &[1])).unwrap();
        assert_eq!(res.value, int(25));
    }

    #[test]
    fn assignment_oracle_single_period() {
        let c = CoalitionCosts {
            demand: vec![4],
            purchase: vec![int(1)],
            holding: vec![int(1)],
            backlog: vec![int(1)],
            setup: vec![int(2)],
        };
        let res = solve_oracle_assignments(&c).unwrap();
        assert_eq!(res.plan.sigma(), &[1]);
        assert_eq!(res.value, int(6));
    }

    #[test]
    fn oracle_limits_reported() {
        let c = CoalitionCosts {
            demand: vec![1; 15],
            purchase: vec![int(1); 15],
            holding: vec![int(1); 15],
            backlog: vec![int(1); 15],
            setup: vec![int(1); 15],
        };
        assert!(matches!(
            solve_oracle_subsets(&c),
            Err(Error::OracleLimit(_))
        ));
        assert!(matches!(
            solve_oracle_assignments(&c),
            Err(Error::OracleLimit(_))
        ));
    }

    #[test]
    fn value_always_matches_plan_cost() {
        let s = fixtures::three_firms_residual_setup();
        for members in [&[1][..], &[2], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]] {
            let c = costs_of(&s, members);
            let res = solve(&c);
            assert_eq!(res.value, plan_total_cost(&res.plan, &c).unwrap());
            assert_eq!(res.order_periods, res.plan.order_periods());
        }
    }

    #[test]
    fn zero_setup_degenerates_to_cheapest_sources() {
        let c = CoalitionCosts {
            demand: vec![3, 0, 2, 5],
            purchase: vec![int(4), int(1), int(6), int(2)],
            holding: vec![int(1), int(1), int(2), int(1)],
            backlog: vec![int(2), int(1), int(1), int(3)],
            setup: vec![Rat::zero(); 4],
        };
        let res = solve(&c);
        let mut expected = Rat::zero();
        for t in 1..=4 {
            if c.demand[t - 1] == 0 {
                continue;
            }
            let cheapest = (1..=4).map(|r| unit_source_cost(&c, r, t)).min().unwrap();
            expected += cheapest * int(c.demand[t - 1] as i64);
        }
        assert_eq!(res.value, expected);
    }
}
