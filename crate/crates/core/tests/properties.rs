mod props;

macro_rules! property_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = props::$name(props::DEFAULT_CASES) {
                    panic!("{e}");
                }
            }
        )*
    };
}

property_tests!(
    eigen_reconstruction_small,
    eigen_reconstruction_tridiagonal,
    psd_projection_idempotent,
    simplex_projection_invariants,
    kmeans_wcss_non_increasing,
    sq_dist_metric,
    sampled_graphs_well_formed,
    reference_matrix_sign,
    trace_matches_brute_force,
    trace_permutation_invariant,
    clustering_matrix_equivariant,
    a2_entries_bounded,
    sdp_feasible_and_dominant,
    sdp_warm_start_path_independent,
    sdp_permutation_equivariant,
    mmsb_noiseless_recovery,
    mmsb_rows_on_simplex,
    mmsb_permutation_consistent,
    spa_greedy_invariant,
    matr_scale_invariant,
    matr_dominance,
    threshold_monotone_in_delta,
    cluster_test_noiseless_cliques,
    nmi_symmetry_and_relabeling,
    exact_recovery_implies_nmi_one,
    clustering_error_permutation_invariant,
    seeded_determinism,
);

#[test]
fn every_check_is_wired() {
    assert_eq!(props::ALL.len(), 27);
}
