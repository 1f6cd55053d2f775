//! Acceptance criteria. Every check is exact integer arithmetic with zero
//! tolerance. Each test prints one `PASS`/`FAIL` line for its criterion;
//! run with `--nocapture` to see them.

mod common;

use std::collections::BTreeMap;
use std::panic;

use common::*;
use lapctl::cograph::{
    cotree_to_graph, eigen_decomposition, minimal_input_matrix, parse_cotree, Cotree,
};
use lapctl::graph::{degree_sequence, laplacian, Graph};
use lapctl::oracle::{
    as_i64, eigvec_test, kalman_controllable, min_controls_bruteforce, pbh_controllable,
    witness_holds, EigenGroup,
};
use lapctl::threshold::{
    all_selections, build_graph, c_vector, degree_cells, degrees_from_sequence, modal_matrix,
    select_controls, spectrum_conjugate, spectrum_distinct,
};
use lapctl::{ConstructionSequence, IntMatrix};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEQUENCE: &str = "0101001";
const COTREE: &str = "(J (U (J x x) (J x x)) (U x (J x x)))";

fn criterion(id: u32, title: &str, body: impl FnOnce() + panic::UnwindSafe) {
    let outcome = panic::catch_unwind(body);
    let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
    println!("[{status}] criterion {id}: {title}");
    if let Err(e) = outcome {
        panic::resume_unwind(e);
    }
}

fn sequence() -> ConstructionSequence {
    SEQUENCE.parse().unwrap()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Runs the three oracles on `(L, B)` and checks they agree; returns the verdict.
fn all_oracles(l: &IntMatrix, b: &IntMatrix, spectrum: &[usize], groups: &[EigenGroup]) -> bool {
    let pbh = pbh_controllable(l, b, &as_i64(spectrum)).unwrap();
    let eig = eigvec_test(l, groups, b).unwrap();
    let kalman = kalman_controllable(l, b);
    assert_eq!(
        pbh.controllable, eig.controllable,
        "PBH vs eigenvector test"
    );
    assert_eq!(pbh.controllable, kalman, "PBH vs Kalman");
    for v in [&pbh, &eig] {
        assert!(v.is_consistent(l, b), "inconsistent verdict {v:?}");
        if let Some(w) = &v.witness {
            assert!(witness_holds(l, b, w));
        }
    }
    pbh.controllable
}

#[test]
fn criterion_1_degrees_and_spectrum() {
    criterion(1, "threshold 0101001: degrees and spectrum", || {
        let t = sequence();
        assert_eq!(degrees_from_sequence(&t), vec![3, 3, 2, 4, 1, 1, 6]);
        let g = build_graph(&t);
        assert_eq!(degree_sequence(&g).degrees, vec![3, 3, 2, 4, 1, 1, 6]);
        assert_eq!(
            spectrum_conjugate(&degree_sequence(&g)),
            vec![0, 1, 1, 2, 4, 5, 7]
        );
        assert_eq!(modal_matrix(&t).eigenvalues, vec![0, 1, 1, 2, 4, 5, 7]);
    });
}

#[test]
fn criterion_2_modal_matrix() {
    criterion(
        2,
        "threshold 0101001: modal matrix columns and L·V = V·Λ",
        || {
            let t = sequence();
            let e = modal_matrix(&t);
            let mut expected = vec![vec![BigInt::from(1); 7]];
            for i in [5, 4, 2, 1, 3, 6] {
                expected.push(c_vector(i, 7));
            }
            assert_eq!(e.modal, IntMatrix::from_columns(7, &expected));
            assert_eq!(e.modal.column(5), ints(&[1, 1, 1, -3, 0, 0, 0]));

            let l = laplacian(&build_graph(&t));
            let lv = l.mul(&e.modal).unwrap();
            let mut diag = IntMatrix::zeros(7, 7);
            for (j, &lambda) in [0, 1, 1, 2, 4, 5, 7].iter().enumerate() {
                diag.set(j, j, lambda);
            }
            assert_eq!(lv, e.modal.mul(&diag).unwrap());
        },
    );
}

#[test]
fn criterion_3_control_selection() {
    criterion(
        3,
        "threshold 0101001: controls {1,5}, choices, singletons, brute-force minimum",
        || {
            let t = sequence();
            let l = laplacian(&build_graph(&t));
            let e = modal_matrix(&t);
            let groups = e.groups();

            let sel = select_controls(&t, None).unwrap();
            assert_eq!(sel.controls, vec![1, 5]);
            assert_eq!(sel.input, IntMatrix::standard_basis(7, &[1, 5]));
            assert!(all_oracles(&l, &sel.input, &e.eigenvalues, &groups));

            // cells {5,6} (cell 1) and {1,2} (cell 3) are the only ones with a choice
            let cells = degree_cells(&t);
            assert_eq!(cells.cells[0], vec![5, 6]);
            assert_eq!(cells.cells[2], vec![1, 2]);
            let mut seen = Vec::new();
            for a in [5, 6] {
                for b in [1, 2] {
                    let choice = BTreeMap::from([(1, a), (3, b)]);
                    let sel = select_controls(&t, Some(&choice)).unwrap();
                    assert!(
                        all_oracles(&l, &sel.input, &e.eigenvalues, &groups),
                        "{:?}",
                        sel.controls
                    );
                    seen.push(sel.controls);
                }
            }
            seen.sort();
            assert_eq!(seen, vec![vec![1, 5], vec![1, 6], vec![2, 5], vec![2, 6]]);
            assert_eq!(all_selections(&t).unwrap().len(), 4);

            for node in 1..=7 {
                let b = IntMatrix::standard_basis(7, &[node]);
                assert!(
                    !all_oracles(&l, &b, &e.eigenvalues, &groups),
                    "single node {node}"
                );
            }

            let min = min_controls_bruteforce(&build_graph(&t), 7)
                .unwrap()
                .unwrap();
            assert_eq!(min.size, 2);
            assert_eq!(min.size, 7 - cells.count());
        },
    );
}

#[test]
fn criterion_4_minimum_controls_sweep() {
    criterion(
        4,
        "all connected threshold graphs n <= 8: brute-force minimum = n - s",
        || {
            for n in 2..=8 {
                for t in ConstructionSequence::all(n).filter(ConstructionSequence::is_connected) {
                    let g = build_graph(&t);
                    let l = laplacian(&g);
                    let spectrum = as_i64(&modal_matrix(&t).eigenvalues);
                    let s = degree_cells(&t).count();
                    let min = min_controls_bruteforce(&g, n).unwrap().unwrap();
                    assert_eq!(min.size, n - s, "{t}");
                    for sel in all_selections(&t).unwrap() {
                        assert!(
                            pbh_controllable(&l, &sel.input, &spectrum)
                                .unwrap()
                                .controllable,
                            "{t}"
                        );
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_5_seven_leaf_cograph() {
    criterion(
        5,
        "seven-leaf cograph: spectrum, modal matrix, B, M = 2 lower bound",
        || {
            let t = parse_cotree(COTREE).unwrap();
            let g = cotree_to_graph(&t);
            let l = laplacian(&g);
            let e = eigen_decomposition(&t);
            assert_eq!(e.spectrum(), vec![0, 3, 4, 5, 5, 6, 7]);
            let printed = IntMatrix::from_rows(&[
                vec![1, 2, 0, 0, 1, 0, 3],
                vec![1, 2, 0, 0, -1, 0, 3],
                vec![1, -2, 0, 1, 0, 0, 3],
                vec![1, -2, 0, -1, 0, 0, 3],
                vec![1, 0, 2, 0, 0, 0, -4],
                vec![1, 0, -1, 0, 0, 1, -4],
                vec![1, 0, -1, 0, 0, -1, -4],
            ]);
            assert_eq!(e.modal(), printed);

            let input = minimal_input_matrix(&t).unwrap();
            let expected_bt =
                IntMatrix::from_rows(&[vec![6, 6, 3, 1, -1, -3, -5], vec![1, -1, 0, 0, 0, 0, 0]]);
            assert_eq!(input.matrix.transpose(), expected_bt);
            assert!(all_oracles(&l, &input.matrix, &e.spectrum(), &e.groups));

            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let spectrum = as_i64(&e.spectrum());
            for _ in 0..1000 {
                let b = random_int_matrix(&mut rng, 7, 1, 10);
                let v = pbh_controllable(&l, &b, &spectrum).unwrap();
                assert!(!v.controllable, "1-column B controlled the cograph: {b:?}");
                assert!(v.is_consistent(&l, &b));
            }
        },
    );
}

#[test]
fn criterion_6_property_suite() {
    criterion(
        6,
        "eigen-relation, orthogonality, trace, spectrum agreement",
        || {
            for n in 1..=9 {
                for t in ConstructionSequence::all(n) {
                    let g = build_graph(&t);
                    let l = laplacian(&g);
                    let e = modal_matrix(&t);
                    for grp in e.groups() {
                        assert!(is_eigenbasis(&l, grp.value, &grp.basis), "{t}");
                    }
                    assert!(columns_orthogonal(&e.modal), "{t}");
                    assert_eq!(
                        e.eigenvalues.iter().sum::<usize>(),
                        2 * g.edge_count(),
                        "{t}"
                    );

                    let conjugate = spectrum_conjugate(&degree_sequence(&g));
                    let cotree = eigen_decomposition(&Cotree::from_sequence(&t)).spectrum();
                    assert_eq!(conjugate, e.eigenvalues, "{t}");
                    assert_eq!(cotree, conjugate, "{t}");
                    if n >= 2 && t.is_connected() {
                        let mut split = vec![0];
                        for (v, q) in spectrum_distinct(&t).unwrap() {
                            split.extend(std::iter::repeat_n(v, q));
                        }
                        assert_eq!(split, conjugate, "{t}");
                    }
                }
            }

            let mut rng = ChaCha8Rng::seed_from_u64(6);
            for _ in 0..500 {
                let n = rng.gen_range(1..=10);
                let t = random_cotree(&mut rng, n);
                let g = cotree_to_graph(&t);
                let l = laplacian(&g);
                let e = eigen_decomposition(&t);
                for grp in &e.groups {
                    assert!(is_eigenbasis(&l, grp.value, &grp.basis), "{t}");
                }
                assert!(columns_orthogonal(&e.modal()), "{t}");
                assert_eq!(
                    e.spectrum().iter().sum::<usize>(),
                    2 * g.edge_count(),
                    "{t}"
                );
            }
        },
    );
}

#[test]
fn criterion_7_oracle_agreement() {
    criterion(
        7,
        "PBH, eigenvector and Kalman oracles agree on 500 random instances",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let (mut positive, mut negative) = (0, 0);
            for k in 0..500 {
                let n = rng.gen_range(1..=9);
                let (g, spectrum, groups): (Graph, Vec<usize>, Vec<EigenGroup>) = if k % 2 == 0 {
                    let bits = (0..n).map(|i| i > 0 && rng.gen_bool(0.5)).collect();
                    let t = ConstructionSequence::new(bits).unwrap();
                    let e = modal_matrix(&t);
                    (build_graph(&t), e.eigenvalues.clone(), e.groups())
                } else {
                    let t = random_cotree(&mut rng, n);
                    let e = eigen_decomposition(&t);
                    (cotree_to_graph(&t), e.spectrum(), e.groups)
                };
                let l = laplacian(&g);
                let cols = rng.gen_range(1..=n.min(4));
                let b = random_01_matrix(&mut rng, n, cols);
                if all_oracles(&l, &b, &spectrum, &groups) {
                    positive += 1;
                } else {
                    negative += 1;
                }
            }
            println!("    oracle agreement: {positive} controllable, {negative} not controllable");
            assert!(positive > 0 && negative > 0);
        },
    );
}
