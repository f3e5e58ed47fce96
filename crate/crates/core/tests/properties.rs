mod common;

const CASES: u32 = 256;

#[test]
fn series_ring_laws() {
    common::series_ring_laws(CASES).unwrap();
}

#[test]
fn series_inverse_round_trip() {
    common::inverse_round_trip(CASES).unwrap();
}

#[test]
fn series_leibniz_rule() {
    common::leibniz(CASES).unwrap();
}

#[test]
fn vanishing_orders_add() {
    common::vanishing_order_additivity(CASES).unwrap();
}

#[test]
fn nullspace_vectors_are_annihilated() {
    common::nullspace_membership(CASES).unwrap();
}

#[test]
fn rank_ignores_row_permutation_and_scaling() {
    common::rank_permutation_scaling(CASES).unwrap();
}

#[test]
fn genus_and_dimensions_survive_hurwitz_moves() {
    common::hurwitz_invariance(CASES).unwrap();
}

#[test]
fn ranks_grow_with_precision() {
    common::rank_monotone_in_precision(128).unwrap();
}
