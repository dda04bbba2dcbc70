//! Cost allocations: the parametric extended-Owen family, the consolidated
//! allocation psi, the sufficient stability conditions, and the population
//! monotonic allocation scheme built from subgame allocations.

use std::collections::{BTreeMap, BTreeSet};

use crate::coretools::lp::{self, LPOutcome, LPProblem, LPRow};
use crate::error::Error;
use crate::game::{consolidated_report, subgame, SIGame};
use crate::model::{plan_cost_vector, Coalition, CostPlanVector};
use crate::scalar::{from_count, Scalar};

/// A cost share per player; `shares[i - 1]` is what player `i` pays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation<R> {
    shares: Vec<R>,
}

impl<R: Scalar> Allocation<R> {
    pub fn new(shares: Vec<R>) -> Self {
        Allocation { shares }
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn shares(&self) -> &[R] {
        &self.shares
    }

    /// Share of player `i` (1-based).
    pub fn share(&self, i: usize) -> &R {
        &self.shares[i - 1]
    }

    /// `x(S)`: the total paid by a coalition.
    pub fn coalition_total(&self, coalition: Coalition) -> R {
        coalition
            .members()
            .iter()
            .fold(R::zero(), |acc, &i| acc + self.shares[i - 1].clone())
    }

    pub fn total(&self) -> R {
        self.shares.iter().fold(R::zero(), |acc, x| acc + x.clone())
    }
}

/// Nonnegative weights with positive total, parametrizing the extended-Owen
/// family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaWeights<R> {
    weights: Vec<R>,
}

impl<R: Scalar> AlphaWeights<R> {
    pub fn new(weights: Vec<R>) -> Result<Self, Error> {
        if weights.is_empty() {
            return Err(Error::InvalidAlpha("no weights".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidAlpha("negative weight".into()));
        }
        let total = weights.iter().fold(R::zero(), |acc, w| acc + w.clone());
        if total.is_zero() {
            return Err(Error::InvalidAlpha("weights sum to zero".into()));
        }
        Ok(AlphaWeights { weights })
    }

    pub fn uniform(n: usize) -> Self {
        AlphaWeights {
            weights: vec![R::one(); n],
        }
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn total(&self) -> R {
        self.weights.iter().fold(R::zero(), |acc, w| acc + w.clone())
    }

    /// `alpha(S)` for a coalition.
    pub fn coalition_total(&self, coalition: Coalition) -> R {
        coalition
            .members()
            .iter()
            .fold(R::zero(), |acc, &i| acc + self.weights[i - 1].clone())
    }
}

fn check_alpha_len<R: Scalar>(game: &SIGame<R>, alpha: &AlphaWeights<R>) -> Result<(), Error> {
    if alpha.weights().len() != game.players() {
        return Err(Error::InvalidAlpha(format!(
            "{} weights for {} players",
            alpha.weights().len(),
            game.players()
        )));
    }
    Ok(())
}

/// Grand-coalition cost-plan vector `P^N(sigma^N)`.
fn grand_cost_plan<R: Scalar>(game: &SIGame<R>) -> CostPlanVector<R> {
    let entry = game.entry(game.grand()).expect("grand coalition present");
    plan_cost_vector(&entry.plan, &entry.costs).expect("canonical plan is feasible")
}

/// Players whose singleton canonical plan orders in period `t`, for every t.
fn singleton_order_sets<R: Scalar>(game: &SIGame<R>) -> Vec<BTreeSet<usize>> {
    let mut j = vec![BTreeSet::new(); game.periods()];
    for i in 1..=game.players() {
        let entry = game.entry(Coalition::singleton(i)).expect("singleton present");
        for &t in &entry.order_periods {
            j[t - 1].insert(i);
        }
    }
    j
}

/// Variable-cost gap `N(S)`: the grand plan's unit costs minus the
/// coalition's own, both priced against the coalition's demand.
pub fn n_of<R: Scalar>(game: &SIGame<R>, coalition: Coalition) -> Result<R, Error> {
    let entry = game.entry(coalition)?;
    let grand_p = grand_cost_plan(game);
    let own_p = plan_cost_vector(&entry.plan, &entry.costs)?;
    Ok(grand_p.dot_demand(&entry.costs.demand) - own_p.dot_demand(&entry.costs.demand))
}

/// Non-consolidated setup gap `M(S)`: the grand coalition's setup mass
/// outside the consolidated periods minus the coalition's own.
pub fn m_of<R: Scalar>(game: &SIGame<R>, coalition: Coalition) -> Result<R, Error> {
    let entry = game.entry(coalition)?;
    let report = consolidated_report(game);
    let grand = game.entry(game.grand())?;
    let mut value = R::zero();
    for &t in &grand.order_periods {
        if !report.upsilon.contains(&t) {
            value = value + grand.costs.setup[t - 1].clone();
        }
    }
    for &t in &entry.order_periods {
        if !report.upsilon.contains(&t) {
            value = value - entry.costs.setup[t - 1].clone();
        }
    }
    Ok(value)
}

/// The alpha-independent part of the extended-Owen family together with the
/// residual setup mass split proportionally to alpha.
///
/// Base share of player `i`: grand unit costs against the player's own
/// demand, plus an equal split of each consolidated period's setup among the
/// players that order there on their own. The residual is the setup mass of
/// the remaining grand-plan order periods.
pub fn extended_owen_split<R: Scalar>(game: &SIGame<R>) -> (Allocation<R>, R) {
    let n = game.players();
    let report = consolidated_report(game);
    let grand = game.entry(game.grand()).expect("grand coalition present");
    let grand_p = grand_cost_plan(game);
    let j_sets = singleton_order_sets(game);

    let mut shares: Vec<R> = (1..=n)
        .map(|i| grand_p.dot_demand(game.situation().player_demand(i)))
        .collect();
    let mut residual = R::zero();
    for &t in &grand.order_periods {
        if !report.upsilon.contains(&t) {
            residual = residual + grand.costs.setup[t - 1].clone();
        }
    }
    for &t in &report.upsilon {
        let j_t = &j_sets[t - 1];
        if j_t.is_empty() {
            // no singleton orders here; route the setup into the
            // alpha-proportional term so the family stays efficient
            residual = residual + grand.costs.setup[t - 1].clone();
            continue;
        }
        let split = grand.costs.setup[t - 1].clone() / from_count::<R>(j_t.len() as u64);
        for &i in j_t {
            shares[i - 1] = shares[i - 1].clone() + split.clone();
        }
    }
    (Allocation::new(shares), residual)
}

/// The extended-Owen allocation for one choice of alpha. Always efficient:
/// the shares sum to `c(N)` exactly.
pub fn extended_owen<R: Scalar>(
    game: &SIGame<R>,
    alpha: &AlphaWeights<R>,
) -> Result<Allocation<R>, Error> {
    check_alpha_len(game, alpha)?;
    let (base, residual) = extended_owen_split(game);
    let total = alpha.total();
    let shares = base
        .shares()
        .iter()
        .zip(alpha.weights())
        .map(|(b, a)| b.clone() + a.clone() * residual.clone() / total.clone())
        .collect();
    Ok(Allocation::new(shares))
}

/// The single extended allocation of a consolidated game (the residual term
/// vanishes). Refuses non-consolidated games.
pub fn psi<R: Scalar>(game: &SIGame<R>) -> Result<Allocation<R>, Error> {
    let report = consolidated_report(game);
    if !report.is_consolidated {
        return Err(Error::NotConsolidated);
    }
    let (base, residual) = extended_owen_split(game);
    debug_assert!(residual.is_zero(), "consolidated games have no residual");
    Ok(base)
}

/// Outcome of the sufficient-condition scan `N(S) <= 0 and M(S) <= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropConditionReport<R> {
    pub holds: bool,
    pub n_violations: Vec<(Coalition, R)>,
    pub m_violations: Vec<(Coalition, R)>,
}

/// Evaluates `N(S) <= 0` and `M(S) <= 0` for every nonempty coalition.
pub fn check_prop_conditions<R: Scalar>(game: &SIGame<R>) -> PropConditionReport<R> {
    let report = consolidated_report(game);
    let grand = game.entry(game.grand()).expect("grand coalition present");
    let grand_p = grand_cost_plan(game);
    let mut residual = R::zero();
    for &t in &grand.order_periods {
        if !report.upsilon.contains(&t) {
            residual = residual + grand.costs.setup[t - 1].clone();
        }
    }

    let mut n_violations = Vec::new();
    let mut m_violations = Vec::new();
    for coalition in game.coalitions() {
        let entry = game.entry(coalition).expect("enumerated coalition");
        let own_p = plan_cost_vector(&entry.plan, &entry.costs).expect("canonical plan");
        let n_val = grand_p.dot_demand(&entry.costs.demand) - own_p.dot_demand(&entry.costs.demand);
        if n_val.is_positive() {
            n_violations.push((coalition, n_val));
        }
        let mut m_val = residual.clone();
        for &t in &entry.order_periods {
            if !report.upsilon.contains(&t) {
                m_val = m_val - entry.costs.setup[t - 1].clone();
            }
        }
        if m_val.is_positive() {
            m_violations.push((coalition, m_val));
        }
    }
    PropConditionReport {
        holds: n_violations.is_empty() && m_violations.is_empty(),
        n_violations,
        m_violations,
    }
}

/// Outcome of the combined condition `N(S) + (alpha(S)/alpha(N)) M(S) <= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryReport<R> {
    pub holds: bool,
    pub violations: Vec<(Coalition, R)>,
}

/// Evaluates the weighted sufficient condition for one alpha.
pub fn check_corollary_alpha<R: Scalar>(
    game: &SIGame<R>,
    alpha: &AlphaWeights<R>,
) -> Result<CorollaryReport<R>, Error> {
    check_alpha_len(game, alpha)?;
    let total = alpha.total();
    let mut violations = Vec::new();
    for coalition in game.coalitions() {
        let combined = n_of(game, coalition)?
            + alpha.coalition_total(coalition) * m_of(game, coalition)? / total.clone();
        if combined.is_positive() {
            violations.push((coalition, combined));
        }
    }
    Ok(CorollaryReport {
        holds: violations.is_empty(),
        violations,
    })
}

/// Searches for alpha weights satisfying the corollary condition by exact LP
/// feasibility, normalized to `alpha(N) = 1`. Returns a witness or `None`
/// when the system is infeasible.
pub fn find_alpha<R: Scalar>(game: &SIGame<R>) -> Option<AlphaWeights<R>> {
    let n = game.players();
    let mut rows = Vec::new();
    for coalition in game.coalitions() {
        let m_val = m_of(game, coalition).expect("enumerated coalition");
        let n_val = n_of(game, coalition).expect("enumerated coalition");
        // M(S) * alpha(S) <= -N(S)
        rows.push(LPRow {
            coeffs: coalition
                .members()
                .iter()
                .map(|&i| (i - 1, m_val.clone()))
                .collect(),
            relation: lp::Relation::Le,
            rhs: -n_val,
        });
    }
    rows.push(LPRow {
        coeffs: (0..n).map(|i| (i, R::one())).collect(),
        relation: lp::Relation::Eq,
        rhs: R::one(),
    });
    let problem = LPProblem {
        direction: lp::Direction::Minimize,
        objective: vec![R::zero(); n],
        rows,
        bounds: vec![lp::VarBound::NonNegative; n],
    };
    match lp::lp_solve(&problem).expect("alpha LP is well-formed") {
        LPOutcome::Optimal { point, .. } => {
            Some(AlphaWeights::new(point).expect("LP point is a valid alpha"))
        }
        LPOutcome::Infeasible => None,
        LPOutcome::Unbounded => unreachable!("feasibility LP with zero objective"),
    }
}

/// A per-coalition allocation scheme; `vectors[S]` lists shares for the
/// members of `S` in ascending player order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pmas<R> {
    vectors: BTreeMap<Coalition, Vec<R>>,
}

impl<R: Scalar> Pmas<R> {
    pub fn from_vectors(vectors: BTreeMap<Coalition, Vec<R>>) -> Self {
        Pmas { vectors }
    }

    pub fn vectors(&self) -> &BTreeMap<Coalition, Vec<R>> {
        &self.vectors
    }

    pub fn get(&self, coalition: Coalition) -> Option<&[R]> {
        self.vectors.get(&coalition).map(|v| v.as_slice())
    }

    /// Share of player `i` within coalition `S`, when present.
    pub fn share(&self, coalition: Coalition, i: usize) -> Option<&R> {
        if !coalition.contains(i) {
            return None;
        }
        let rank = (coalition.mask() & ((1 << (i - 1)) - 1)).count_ones() as usize;
        self.vectors.get(&coalition).map(|v| &v[rank])
    }
}

/// Which consolidated-period set a subgame allocation uses.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpsilonScope {
    /// Consolidated periods of the restricted sub-situation (quantifying
    /// over coalitions inside `S`). The default; reproduces the known
    /// worked examples.
    Restricted,
    /// Periods consolidated in the full game by a witness belonging to `S`.
    GlobalWitness,
}

/// Builds the allocation scheme of a consolidated game: each coalition gets
/// the extended allocation of its own subgame.
pub fn build_pmas<R: Scalar>(game: &SIGame<R>) -> Result<Pmas<R>, Error> {
    build_pmas_scoped(game, UpsilonScope::Restricted)
}

#[doc(hidden)]
pub fn build_pmas_scoped<R: Scalar>(
    game: &SIGame<R>,
    scope: UpsilonScope,
) -> Result<Pmas<R>, Error> {
    let report = consolidated_report(game);
    if !report.is_consolidated {
        return Err(Error::NotConsolidated);
    }
    let j_sets = singleton_order_sets(game);
    let mut vectors = BTreeMap::new();
    for coalition in game.coalitions() {
        let entry = game.entry(coalition)?;
        let upsilon_s: BTreeSet<usize> = match scope {
            UpsilonScope::Restricted => consolidated_report(&subgame(game, coalition)?).upsilon,
            UpsilonScope::GlobalWitness => report
                .witnesses
                .iter()
                .filter(|(_, w)| w.iter().any(|&i| coalition.contains(i)))
                .map(|(&t, _)| t)
                .collect(),
        };
        let own_p = plan_cost_vector(&entry.plan, &entry.costs)?;
        let members = coalition.members();
        let mut shares: Vec<R> = members
            .iter()
            .map(|&i| own_p.dot_demand(game.situation().player_demand(i)))
            .collect();
        for &t in &upsilon_s {
            let j_t: Vec<usize> = j_sets[t - 1]
                .iter()
                .copied()
                .filter(|&i| coalition.contains(i))
                .collect();
            if j_t.is_empty() {
                continue;
            }
            let split = entry.costs.setup[t - 1].clone() / from_count::<R>(j_t.len() as u64);
            for i in j_t {
                let rank = members.iter().position(|&m| m == i).expect("member of S");
                shares[rank] = shares[rank].clone() + split.clone();
            }
        }
        vectors.insert(coalition, shares);
    }
    Ok(Pmas { vectors })
}

/// Outcome of checking a pmas candidate: efficiency per coalition and
/// monotonicity across every nested coalition pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmasReport<R> {
    pub passes: bool,
    /// Coalitions whose shares do not sum to `c(S)`, with the gap.
    pub efficiency_violations: Vec<(Coalition, R)>,
    /// Triples `(S, R, i)` with `S subset of R` and `y_i^S < y_i^R`.
    pub monotonicity_violations: Vec<(Coalition, Coalition, usize)>,
}

/// Exact check of the pmas conditions over all nested pairs.
pub fn verify_pmas<R: Scalar>(game: &SIGame<R>, pmas: &Pmas<R>) -> Result<PmasReport<R>, Error> {
    for coalition in game.coalitions() {
        match pmas.get(coalition) {
            None => return Err(Error::IncompletePmas(coalition)),
            Some(v) if v.len() != coalition.len() => return Err(Error::IncompletePmas(coalition)),
            Some(_) => {}
        }
    }
    let mut efficiency_violations = Vec::new();
    for coalition in game.coalitions() {
        let total = pmas
            .get(coalition)
            .unwrap()
            .iter()
            .fold(R::zero(), |acc, x| acc + x.clone());
        let gap = total - game.value(coalition)?;
        if !gap.is_zero() {
            efficiency_violations.push((coalition, gap));
        }
    }
    let mut monotonicity_violations = Vec::new();
    let full = game.grand().mask();
    for r_mask in 1..=full {
        let r = Coalition::from_mask(r_mask).unwrap();
        let mut s_mask = r_mask;
        loop {
            s_mask = (s_mask - 1) & r_mask;
            if s_mask == 0 {
                break;
            }
            let s = Coalition::from_mask(s_mask).unwrap();
            for &i in &s.members() {
                if pmas.share(s, i).unwrap() < pmas.share(r, i).unwrap() {
                    monotonicity_violations.push((s, r, i));
                }
            }
        }
    }
    Ok(PmasReport {
        passes: efficiency_violations.is_empty() && monotonicity_violations.is_empty(),
        efficiency_violations,
        monotonicity_violations,
    })
}
