mod common;

macro_rules! suite {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                common::$name().unwrap();
            }
        )*
    };
}

suite!(
    plane_invariance,
    remoteness_below_limit,
    aligned_beyond_limit,
    folded_identities,
    w_empty,
    fibre_invariance,
    graph_round_trip,
    plane_flow_vs_integrator,
    a_qstar_sign_agreement,
    d_curves_do_not_cross,
    threshold_order,
    jacobian_matches_differences,
    projection_lands_attracting,
);
