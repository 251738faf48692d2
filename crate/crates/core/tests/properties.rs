use num_traits::{Signed, Zero};
use proptest::prelude::*;

use tropsa::classify::{is_indecomposable, is_irreducible, realizability_verdict, SearchConfig, Verdict, Witness};
use tropsa::examples::all_builtins;
use tropsa::io::{parse, serialize};
use tropsa::linalg::{
    kernel_basis, left_kernel_basis, rank, rank_gauss, rat, strictly_positive_kernel_point, to_rational_vec,
    RationalMatrix,
};
use tropsa::random::{random_affine, random_mixed, rng};
use tropsa::{analyze, apply_affine, project_onto_obstruction, TriState};

/// Product of an `n x k` and a `k x m` integer matrix, so rank is at most `k`.
fn low_rank() -> impl Strategy<Value = RationalMatrix> {
    (1usize..=30, 1usize..=30, 0usize..=30).prop_flat_map(|(n, m, k)| {
        let k = k.min(n).min(m);
        (
            proptest::collection::vec(-3i64..=3, n * k),
            proptest::collection::vec(-3i64..=3, k * m),
        )
            .prop_map(move |(a, b)| {
                let mut rows = vec![vec![0i64; m]; n];
                for (i, row) in rows.iter_mut().enumerate() {
                    for (j, x) in row.iter_mut().enumerate() {
                        *x = (0..k).map(|t| a[i * k + t] * b[t * m + j]).sum();
                    }
                }
                RationalMatrix::from_i64_rows(m, &rows)
            })
    })
}

fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(n, m)| {
        proptest::collection::vec(-4i64..=4, n * m).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(m).map(|r| r.to_vec()).collect();
            RationalMatrix::from_i64_rows(m, &rows)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_agrees_across_methods(m in low_rank()) {
        let r = rank(&m);
        prop_assert_eq!(r, rank(&m.transpose()));
        prop_assert_eq!(r, rank_gauss(&m));
        prop_assert!(r <= m.rows().min(m.cols()));
    }

    #[test]
    fn kernels_are_annihilated(m in small_matrix()) {
        let r = rank(&m);
        let ker = kernel_basis(&m);
        prop_assert_eq!(ker.len(), m.cols() - r);
        for v in &ker {
            prop_assert!(m.mul_vec(&to_rational_vec(v)).iter().all(Zero::is_zero));
        }
        let left = left_kernel_basis(&m);
        prop_assert_eq!(left.len(), m.rows() - r);
        for y in &left {
            prop_assert!(m.left_mul_vec(&to_rational_vec(y)).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn positive_kernel_point_found_when_rows_sum_to_zero(m in small_matrix()) {
        // Shift each row to sum to zero, so the all-ones vector is in the kernel.
        let c = m.cols();
        let rows: Vec<Vec<i64>> = (0..m.rows())
            .map(|i| {
                let mut row: Vec<i64> = m.row(i).iter().map(|x| x.to_integer().try_into().unwrap()).collect();
                let s: i64 = row.iter().sum();
                row[0] -= s;
                row
            })
            .collect();
        let shifted = RationalMatrix::from_i64_rows(c, &rows);
        let p = strictly_positive_kernel_point(&shifted);
        prop_assert!(p.is_some());
        let p = p.unwrap();
        prop_assert!(p.iter().all(|x| x.is_positive()));
        prop_assert!(shifted.mul_vec(&p).iter().all(Zero::is_zero));
    }

    #[test]
    fn positive_kernel_point_is_positive_and_in_kernel(m in small_matrix()) {
        if let Some(p) = strictly_positive_kernel_point(&m) {
            prop_assert!(p.iter().all(|x| x.is_positive()));
            prop_assert!(m.mul_vec(&p).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn affine_maps_compose(seed in any::<u64>()) {
        let mut g = rng(seed);
        let c = random_mixed(&mut g);
        let a = random_affine(&mut g, c.ambient_dim);
        let b = random_affine(&mut g, c.ambient_dim);
        let (ca, _) = apply_affine(&c, &a).unwrap();
        let (cab, _) = apply_affine(&ca, &b).unwrap();
        let (direct, _) = apply_affine(&c, &b.compose(&a)).unwrap();
        prop_assert_eq!(cab.positions(), direct.positions());
        for e in 0..c.edges.len() {
            prop_assert_eq!(cab.displacement(e), direct.displacement(e));
        }
        prop_assert_eq!(analyze(&cab).rank_k, analyze(&c).rank_k);
    }

    #[test]
    fn verdicts_are_internally_consistent(seed in any::<u64>()) {
        let c = random_mixed(&mut rng(seed));
        let v = realizability_verdict(&c).unwrap();
        if v.verdict == Verdict::GenericNonRealizable {
            prop_assert!(v.moduli_dim.unwrap() < v.def_dim);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn serialize_round_trips(seed in any::<u64>()) {
        let c = random_mixed(&mut rng(seed));
        let back = parse(&serialize(&c)).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn identity_rank_is_full() {
    for n in 1..=30 {
        assert_eq!(rank(&RationalMatrix::identity(n)), n);
    }
    assert_eq!(rank(&RationalMatrix::from_i64_rows(2, &[vec![1, 2], vec![2, 4]])), 1);
    assert_eq!(rat(3) * rat(2), rat(6));
}

#[test]
fn templates_round_trip() {
    for t in all_builtins() {
        assert_eq!(parse(&serialize(&t.curve)).unwrap(), t.curve, "{}", t.name);
    }
}

#[test]
fn projection_preserves_irreducibility() {
    let cfg = SearchConfig::default();
    for t in all_builtins() {
        if !analyze(&t.curve).superabundant || is_irreducible(&t.curve, &cfg).unwrap().0 != TriState::Yes {
            continue;
        }
        let Ok((p, _)) = project_onto_obstruction(&t.curve) else { continue };
        if analyze(&p).superabundant {
            assert_eq!(is_irreducible(&p, &cfg).unwrap().0, TriState::Yes, "{}", t.name);
        }
    }
}

#[test]
fn decomposing_witnesses_verify() {
    let cfg = SearchConfig::default();
    for t in all_builtins() {
        if !analyze(&t.curve).superabundant {
            continue;
        }
        let (answer, witness) = is_indecomposable(&t.curve, &cfg).unwrap();
        if answer == TriState::No {
            match witness {
                Some(Witness::Projection { verified, .. }) => assert!(verified, "{}", t.name),
                other => panic!("{}: expected projection witness, got {other:?}", t.name),
            }
        }
    }
}
