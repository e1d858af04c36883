use nvchern::linalg::eigh;
use nvchern::models::{
    hz_to_rad, nv_full_hamiltonian, nv_sector_hamiltonian, nv_sector_indices, project_to_three_qubit,
    three_qubit_hamiltonian, NVModel, NormalizedPoint, NuclearProjection, ThreeQubitModel,
};
use proptest::prelude::*;

fn a_par() -> f64 {
    hz_to_rad(2.2e6)
}

fn field() -> impl Strategy<Value = [f64; 3]> {
    let s = 3.0 * a_par();
    [-s..s, -s..s, -s..s]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn full_hamiltonian_blocks_are_sectors(h in field()) {
        let model = NVModel::new(a_par()).unwrap();
        let full = nv_full_hamiltonian(&model, h);
        for p in NuclearProjection::ALL {
            let block = full.block(&nv_sector_indices(p));
            let sector = nv_sector_hamiltonian(&model, p, h);
            prop_assert!(block.max_abs_diff(&sector) < 1e-12 * a_par());
        }
        // Nothing couples different sectors.
        for i in 0..6 {
            for j in 0..6 {
                if i % 3 != j % 3 {
                    prop_assert_eq!(full.get(i, j).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn projection_symmetric_about_one_half(k in -(1i64 << 19)..(3i64 << 19), hr in 0.05..3.0f64) {
        // Dyadic offsets make 1 - h0 exact, so the outputs must match bit for bit.
        let h0 = k as f64 / (1u64 << 20) as f64;
        let a = project_to_three_qubit(NormalizedPoint::new(hr, h0).unwrap()).unwrap();
        let b = project_to_three_qubit(NormalizedPoint::new(hr, 1.0 - h0).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn decoupled_chain_spectrum_is_minkowski_sum(h in field()) {
        let model = ThreeQubitModel::new(0.0, 0.0, a_par()).unwrap();
        let eig = eigh(&three_qubit_hamiltonian(&model, h)).unwrap();
        let half = 0.5 * (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
        let mut expected: Vec<f64> = (0..8)
            .map(|bits: u32| (0..3).map(|q| if bits >> q & 1 == 1 { half } else { -half }).sum())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (e, x) in eig.eigenvalues.iter().zip(&expected) {
            prop_assert!((e - x).abs() < 1e-10 * a_par().max(1.0), "{} vs {}", e, x);
        }
    }
}

#[test]
fn sector_degeneracy_sits_at_minus_m_a() {
    let a = a_par();
    let model = NVModel::new(a).unwrap();
    let n = 4001;
    for p in NuclearProjection::ALL {
        let gaps: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let z = a * (-2.0 + 4.0 * k as f64 / (n - 1) as f64);
                (z, eigh(&nv_sector_hamiltonian(&model, p, [0.0, 0.0, z])).unwrap().ground_gap())
            })
            .collect();
        let target = -f64::from(p.m()) * a;
        let closed: Vec<f64> = gaps.iter().filter(|(_, g)| *g < 1e-9 * a).map(|(z, _)| *z).collect();
        assert_eq!(closed.len(), 1, "sector {p:?}");
        assert!((closed[0] - target).abs() < 1e-9 * a);
        let (zmin, _) = gaps.iter().copied().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
        assert_eq!(zmin, closed[0]);
    }
}
