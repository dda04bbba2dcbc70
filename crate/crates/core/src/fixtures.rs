//! Small worked situations used throughout the test suites and docs.

use num_bigint::BigInt;

use crate::model::SISituation;
use crate::Rat;

fn rows(data: &[&[i64]]) -> Vec<Vec<Rat>> {
    data.iter()
        .map(|row| row.iter().map(|&v| Rat::from_integer(BigInt::from(v))).collect())
        .collect()
}

fn demand_rows(data: &[&[u64]]) -> Vec<Vec<u64>> {
    data.iter().map(|row| row.to_vec()).collect()
}

/// Builds a situation from integer tables given in the order
/// demand, purchase, holding, backlog, setup.
pub fn situation_from_ints(
    demand: &[&[u64]],
    purchase: &[&[i64]],
    holding: &[&[i64]],
    backlog: &[&[i64]],
    setup: &[&[i64]],
) -> SISituation<Rat> {
    SISituation::new(
        demand_rows(demand),
        rows(setup),
        rows(holding),
        rows(backlog),
        rows(purchase),
    )
    .expect("fixture tables are well-formed")
}

/// Three firms, four periods, identical cost rows, differing demands.
/// The classic input for replicating order plans along a balanced
/// collection of two-player coalitions.
pub fn three_firms_shared_costs() -> SISituation<Rat> {
    situation_from_ints(
        &[&[1, 1, 3, 2], &[2, 1, 8, 2], &[2, 1, 9, 2]],
        &[&[1, 1, 2, 2], &[1, 1, 2, 2], &[1, 1, 2, 2]],
        &[&[1, 2, 2, 1], &[1, 2, 2, 1], &[1, 2, 2, 1]],
        &[&[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]],
        &[&[3, 1, 1, 9], &[3, 1, 1, 9], &[3, 1, 1, 9]],
    )
}

/// Three firms, three periods, fully heterogeneous costs. Not consolidated;
/// its grand-coalition plan leaves no residual setup mass.
pub fn three_firms_heterogeneous() -> SISituation<Rat> {
    situation_from_ints(
        &[&[6, 5, 2], &[4, 1, 1], &[1, 4, 1]],
        &[&[3, 1, 1], &[5, 1, 4], &[2, 1, 3]],
        &[&[2, 3, 3], &[2, 1, 3], &[3, 1, 1]],
        &[&[1, 3, 1], &[1, 3, 1], &[1, 3, 1]],
        &[&[4, 3, 4], &[0, 2, 5], &[0, 0, 5]],
    )
}

/// Three firms, three periods, with one non-consolidated order period in the
/// grand-coalition plan, so the alpha-proportional residual term is active.
pub fn three_firms_residual_setup() -> SISituation<Rat> {
    situation_from_ints(
        &[&[5, 5, 2], &[4, 1, 1], &[1, 4, 5]],
        &[&[3, 1, 1], &[5, 1, 4], &[2, 1, 3]],
        &[&[2, 3, 3], &[2, 1, 3], &[3, 2, 1]],
        &[&[1, 2, 1], &[1, 2, 1], &[1, 2, 1]],
        &[&[3, 1, 2], &[3, 1, 2], &[2, 1, 2]],
    )
}

/// Three firms, three periods, consolidated: every coalition orders only in
/// consolidated periods, so the single extended allocation psi applies and a
/// pmas exists.
pub fn three_firms_consolidated() -> SISituation<Rat> {
    situation_from_ints(
        &[&[1, 3, 1], &[2, 1, 1], &[2, 1, 3]],
        &[&[1, 1, 1], &[2, 3, 4], &[2, 3, 5]],
        &[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]],
        &[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]],
        &[&[1, 1, 5], &[1, 1, 5], &[1, 1, 5]],
    )
}
