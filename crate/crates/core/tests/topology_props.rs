use nvchern::dynamics::{run_nv_sweep, InitPolicy, PropagationSettings};
use nvchern::models::{
    hz_to_rad, sweep_from_normalized, NVModel, NormalizedPoint, NuclearProjection, ProjectedPoint, ThreeQubitModel,
};
use nvchern::topology::{
    chern_dynamic, chern_fhs_nv, chern_fhs_three_qubit, curvature_from_trace, monopole_count_for_model,
    monopole_count_nv, monopole_count_three_qubit, three_qubit_axis_degeneracies, FhsGrid,
};
use proptest::prelude::*;

fn off_boundary(hr: f64, h0: f64, margin: f64) -> bool {
    [-1.0, 0.0, 1.0].iter().all(|m: &f64| ((h0 - m).abs() - hr).abs() > margin)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lattice_chern_equals_count(hr in 0.3..2.2f64, h0 in -2.0..2.0f64) {
        prop_assume!(off_boundary(hr, h0, 0.02));
        let model = NVModel::new(1.0).unwrap();
        let p = NormalizedPoint::new(hr, h0).unwrap();
        let fhs = chern_fhs_nv(&model, p, FhsGrid { n_theta: 30, n_phi: 60 }).unwrap();
        prop_assert_eq!(fhs.value, monopole_count_nv(p).value);
    }

    #[test]
    fn chain_lattice_chern_equals_count(g in 0.0..1.5f64, h0 in 0.0..2.5f64) {
        let model = ThreeQubitModel::from_normalized(ProjectedPoint { g_tilde_prime: g, h0_tilde_prime: h0 }, 1.0).unwrap();
        // Keep every axis degeneracy clear of the unit sphere.
        let (roots, _) = three_qubit_axis_degeneracies(&model).unwrap();
        prop_assume!(roots.iter().all(|r| (r.h_z.abs() - 1.0).abs() > 0.03));
        let fhs = chern_fhs_three_qubit(&model, FhsGrid { n_theta: 40, n_phi: 80 }).unwrap();
        prop_assert_eq!(fhs.value, monopole_count_three_qubit(&model).value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dynamic_estimate_converges_with_alpha(hr in 0.3..2.2f64, h0 in -1.5..1.5f64) {
        // Checked per sector: the summed error need not be monotone because
        // sectors can err with opposite signs at small alpha.
        prop_assume!(off_boundary(hr, h0, 0.1));
        let a = hz_to_rad(2.2e6);
        let p = NormalizedPoint::new(hr, h0).unwrap();
        let settings = PropagationSettings::default();
        for projection in NuclearProjection::ALL {
            let model = NVModel::single_sector(a, projection).unwrap();
            let target = monopole_count_for_model(&model, p).value;
            let errors: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
                .iter()
                .map(|&alpha| (chern_dynamic(p, alpha, &model, &settings).unwrap().value - target).abs())
                .collect();
            for w in errors.windows(2) {
                prop_assert!(w[1] <= w[0] + 0.02, "({}, {}) {:?}: {:?}", hr, h0, projection, errors);
            }
        }
    }

    #[test]
    fn curvature_vanishes_at_poles(hr in 0.2..2.2f64, h0 in -1.5..1.5f64, alpha in 1.0..8.0f64) {
        prop_assume!(off_boundary(hr, h0, 1e-3));
        let a = hz_to_rad(2.2e6);
        let model = NVModel::new(a).unwrap();
        let sweep = sweep_from_normalized(NormalizedPoint::new(hr, h0).unwrap(), alpha, a).unwrap();
        let settings = PropagationSettings::new(1e-9, 31).unwrap();
        let trace = run_nv_sweep(&model, &sweep, InitPolicy::GroundState, &settings).unwrap();
        let c = curvature_from_trace(&trace, &sweep).unwrap();
        prop_assert_eq!(c.f_phi[0], 0.0);
        prop_assert_eq!(*c.f_phi.last().unwrap(), 0.0);
        for (_, f) in &c.per_channel {
            prop_assert_eq!(f[0], 0.0);
            prop_assert_eq!(*f.last().unwrap(), 0.0);
        }
    }
}
