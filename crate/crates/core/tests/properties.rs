use bfgd_core::linalg::{matmul, matmul_nt, matmul_tn, qr_thin, svd_small, truncated_svd, DenseMatrix};
use bfgd_core::metrics::{procrustes_dist, GroundTruth};
use bfgd_core::objectives::{balance_residual, BalanceRegularizer, LeastSquaresSensing, Objective};
use bfgd_core::operators::{GaussianMap, LinearMap, MaskOperator, SensingMap, StructuredMap};
use bfgd_core::solver::{lifted_value, FactorPair};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::random_gaussian(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
    a.sub(b).unwrap().frobenius_norm() <= tol * (1.0 + a.frobenius_norm().max(b.frobenius_norm()))
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthogonal(r: usize, seed: u64) -> DenseMatrix {
    qr_thin(&gaussian(r, r, seed)).unwrap().0
}

fn map_of(kind: u8, m: usize, n: usize, p: usize, seed: u64) -> SensingMap {
    match kind % 3 {
        0 => GaussianMap::new(m, n, p, seed).unwrap().into(),
        1 => StructuredMap::new(m, n, p.min(m * n), seed).unwrap().into(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            MaskOperator::sample(m, n, p.min(m * n), &mut rng).unwrap().into()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matmul_is_associative(a in 1usize..8, b in 1usize..8, c in 1usize..8, d in 1usize..8, seed: u64) {
        let x = gaussian(a, b, seed);
        let y = gaussian(b, c, seed ^ 1);
        let z = gaussian(c, d, seed ^ 2);
        let left = matmul(&matmul(&x, &y).unwrap(), &z).unwrap();
        let right = matmul(&x, &matmul(&y, &z).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn transposed_products_agree(a in 1usize..8, b in 1usize..8, c in 1usize..8, seed: u64) {
        let x = gaussian(b, a, seed);
        let y = gaussian(b, c, seed ^ 3);
        prop_assert!(close(&matmul_tn(&x, &y).unwrap(), &matmul(&x.transpose(), &y).unwrap(), 1e-14));
        let w = gaussian(c, b, seed ^ 4);
        prop_assert!(close(&matmul_nt(&x.transpose(), &w).unwrap(), &matmul(&x.transpose(), &w.transpose()).unwrap(), 1e-14));
    }

    #[test]
    fn qr_reconstructs_with_orthonormal_q(cols in 1usize..6, extra in 0usize..6, seed: u64) {
        let a = gaussian(cols + extra, cols, seed);
        let (q, r) = qr_thin(&a).unwrap();
        prop_assert!(close(&matmul(&q, &r).unwrap(), &a, 1e-12));
        prop_assert!(close(&matmul_tn(&q, &q).unwrap(), &DenseMatrix::identity(cols), 1e-12));
        for i in 0..cols {
            for j in 0..i {
                prop_assert_eq!(r.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn svd_reconstructs_with_sorted_singulars(m in 1usize..10, n in 1usize..10, seed: u64) {
        let a = gaussian(m, n, seed);
        let svd = svd_small(&a).unwrap();
        prop_assert!(close(&svd.reconstruct(), &a, 1e-10));
        prop_assert!(svd.singulars.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(svd.singulars.iter().all(|&s| s >= 0.0));
        let k = svd.rank();
        prop_assert!(close(&matmul_tn(&svd.left, &svd.left).unwrap(), &DenseMatrix::identity(k), 1e-10));
    }

    #[test]
    fn truncated_svd_recovers_exact_low_rank(m in 8usize..30, n in 8usize..30, r in 1usize..4, seed: u64) {
        let x = matmul_nt(&gaussian(m, r, seed), &gaussian(n, r, seed ^ 5)).unwrap();
        let svd = truncated_svd(&x, r, Default::default()).unwrap();
        prop_assert!(close(&svd.reconstruct(), &x, 1e-9));
    }

    #[test]
    fn operators_are_linear_with_matching_adjoints(
        kind: u8, m in 1usize..7, n in 1usize..7, p in 1usize..30, a in -3.0f64..3.0, seed: u64,
    ) {
        let map = map_of(kind, m, n, p, seed);
        let x = gaussian(m, n, seed ^ 6);
        let z = gaussian(m, n, seed ^ 7);
        let combo = map.apply(&x.scale(a).add(&z).unwrap()).unwrap();
        let ax = map.apply(&x).unwrap();
        let az = map.apply(&z).unwrap();
        for k in 0..combo.len() {
            prop_assert!((combo[k] - (a * ax[k] + az[k])).abs() <= 1e-10 * (1.0 + combo[k].abs()));
        }
        let y: Vec<f64> = (0..map.num_measurements()).map(|k| ((k as f64) * 0.7 + a).sin()).collect();
        let lhs = inner(&ax, &y);
        let rhs = x.dot(&map.adjoint(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn procrustes_distance_ignores_rotations(m in 2usize..8, n in 2usize..8, r in 1usize..3, seed: u64) {
        let truth = GroundTruth::from_matrix(matmul_nt(&gaussian(m, r, seed), &gaussian(n, r, seed ^ 8)).unwrap(), r).unwrap();
        let pair = FactorPair::new(gaussian(m, r, seed ^ 9), gaussian(n, r, seed ^ 10)).unwrap();
        let rotated = pair.rotate(&orthogonal(r, seed ^ 11)).unwrap();
        let (d0, d1) = (procrustes_dist(&pair, &truth).unwrap(), procrustes_dist(&rotated, &truth).unwrap());
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
        let rotated_truth = truth.balanced().rotate(&orthogonal(r, seed ^ 12)).unwrap();
        prop_assert!(procrustes_dist(&rotated_truth, &truth).unwrap() <= 1e-9);
    }

    #[test]
    fn regularizer_is_even_and_rotation_invariant(m in 1usize..7, n in 1usize..7, r in 1usize..4, seed: u64) {
        let reg = BalanceRegularizer::new(1.0 / 16.0, 0.5).unwrap();
        let pair = FactorPair::new(gaussian(m, r, seed), gaussian(n, r, seed ^ 13)).unwrap();
        let swapped = FactorPair::new(pair.v().clone(), pair.u().clone()).unwrap();
        let res = balance_residual(&pair).unwrap();
        prop_assert_eq!(balance_residual(&swapped).unwrap(), res.scale(-1.0));
        prop_assert_eq!(reg.g(&res), reg.g(&res.scale(-1.0)));
        let v0 = reg.value(&pair).unwrap();
        prop_assert!((reg.value(&swapped).unwrap() - v0).abs() <= 1e-12 * (1.0 + v0));
        let rotated = pair.rotate(&orthogonal(r, seed ^ 14)).unwrap();
        prop_assert!((reg.value(&rotated).unwrap() - v0).abs() <= 1e-10 * (1.0 + v0));
        prop_assert!(v0 >= 0.0);
    }

    #[test]
    fn lifted_value_matches_factored_value(m in 1usize..6, n in 1usize..6, r in 1usize..3, seed: u64) {
        let map = map_of(0, m, n, 3 * m * n, seed);
        let y: Vec<f64> = (0..map.num_measurements()).map(|k| (k as f64).cos()).collect();
        let obj = LeastSquaresSensing::new(map, y).unwrap();
        let pair = FactorPair::new(gaussian(m, r, seed ^ 15), gaussian(n, r, seed ^ 16)).unwrap();
        let w = pair.stacked();
        let lifted = lifted_value(&obj, &matmul_nt(&w, &w).unwrap()).unwrap();
        let direct = obj.value(&pair.product()).unwrap();
        prop_assert!((lifted - direct).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn rotation_preserves_product(m in 1usize..7, n in 1usize..7, r in 1usize..4, seed: u64) {
        let pair = FactorPair::new(gaussian(m, r, seed), gaussian(n, r, seed ^ 17)).unwrap();
        let rotated = pair.rotate(&orthogonal(r, seed ^ 18)).unwrap();
        prop_assert!(close(&rotated.product(), &pair.product(), 1e-12));
    }
}
