//! Exact controllability oracles for Laplacian dynamics `x' = -L x + B u`.
//!
//! Three independent tests are provided:
//!
//! * [`pbh_controllable`]: rank of `[L - λI, B]` at every eigenvalue.
//! * [`eigvec_test`]: rank of `Vᵀ B` for an explicit eigenbasis `V` of each eigenvalue.
//! * [`kalman_controllable`]: rank of `[B, AB, ..., A^{n-1} B]` with `A = -L`.
//!
//! All arithmetic is over the integers or rationals. Failed checks return a
//! witness: an integer left eigenvector `v` with `vᵀL = λvᵀ` and `vᵀB = 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{laplacian, Graph};
use crate::matrix::{IntMatrix, IntRow};

/// Largest graph accepted by [`min_controls_bruteforce`].
pub const MAX_BRUTE_FORCE_NODES: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("supplied spectrum is incomplete: {0}")]
    SpectrumIncomplete(String),
    #[error("invalid eigenbasis for eigenvalue {lambda}: {reason}")]
    BasisInvalid { lambda: usize, reason: String },
    #[error("graph has {n} nodes; brute force is limited to {MAX_BRUTE_FORCE_NODES}")]
    TooLarge { n: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// One distinct eigenvalue together with a basis of its eigenspace (as columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenGroup {
    pub value: usize,
    pub basis: IntMatrix,
}

impl EigenGroup {
    pub fn multiplicity(&self) -> usize {
        self.basis.cols()
    }
}

/// Uncontrollable mode: `vᵀL = λvᵀ` and `vᵀB = 0` with `v != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub lambda: i64,
    pub vector: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub controllable: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn controllable() -> Verdict {
        Verdict {
            controllable: true,
            witness: None,
        }
    }

    fn refuted(lambda: i64, vector: Vec<BigInt>) -> Verdict {
        Verdict {
            controllable: false,
            witness: Some(Witness { lambda, vector }),
        }
    }

    /// Checks the verdict's internal consistency against `(L, B)`: a positive
    /// verdict carries no witness, a negative one carries a valid witness.
    pub fn is_consistent(&self, l: &IntMatrix, b: &IntMatrix) -> bool {
        match (&self.witness, self.controllable) {
            (None, true) => true,
            (Some(w), false) => witness_holds(l, b, w),
            _ => false,
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Verdict", 3)?;
        s.serialize_field("controllable", &self.controllable)?;
        s.serialize_field("witness_lambda", &self.witness.as_ref().map(|w| w.lambda))?;
        s.serialize_field(
            "witness_vector",
            &self.witness.as_ref().map(|w| IntRow(&w.vector)),
        )?;
        s.end()
    }
}

/// Exact check of `vᵀL = λvᵀ`, `vᵀB = 0`, `v != 0`.
pub fn witness_holds(l: &IntMatrix, b: &IntMatrix, w: &Witness) -> bool {
    if w.vector.len() != l.rows() || w.vector.iter().all(Zero::is_zero) {
        return false;
    }
    let lambda = BigInt::from(w.lambda);
    let vl = l.left_mul_vec(&w.vector);
    let eigen = vl.iter().zip(&w.vector).all(|(a, v)| *a == &lambda * v);
    eigen && b.left_mul_vec(&w.vector).iter().all(Zero::is_zero)
}

/// Rank over the rationals by fraction-free (Bareiss) elimination with row
/// pivoting. Every intermediate division is exact.
pub fn rank_exact(m: &IntMatrix) -> usize {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let num = pivot * &row[j] - &factor * &pivot_row[j];
                debug_assert!(num.is_multiple_of(&prev));
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = top[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Basis of the right null space `{x : M x = 0}` as primitive integer
/// vectors (content 1, first nonzero entry positive), one per free column of
/// the reduced row echelon form.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigRational>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in c..cols {
                    let delta = &factor * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.into_iter()
        .map(|f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -a[row][f].clone();
            }
            primitive(&x)
        })
        .collect()
}

/// Clears denominators and removes the common content of a nonzero rational vector.
fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let lcm = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut v: Vec<BigInt> = x.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, e| acc.gcd(e));
    if g.is_zero() {
        return;
    }
    let flip = v
        .iter()
        .find(|e| !e.is_zero())
        .is_some_and(Signed::is_negative);
    for e in v.iter_mut() {
        *e = &*e / &g;
        if flip {
            *e = -&*e;
        }
    }
}

fn check_pair(l: &IntMatrix, b: &IntMatrix) -> Result<(), OracleError> {
    if !l.is_square() {
        return Err(OracleError::Dimension(format!(
            "L is {}x{}, not square",
            l.rows(),
            l.cols()
        )));
    }
    if b.rows() != l.rows() {
        return Err(OracleError::Dimension(format!(
            "B has {} rows but L is {}x{}",
            b.rows(),
            l.rows(),
            l.cols()
        )));
    }
    Ok(())
}

/// PBH rank test: `(−L, B)` is controllable iff `[L − λI, B]` has rank `n`
/// at every eigenvalue `λ` of `L`.
///
/// The caller supplies the exact spectrum (repeats allowed). Each supplied
/// value must be an eigenvalue, and the eigenspace dimensions over the
/// distinct values must add up to `n`; otherwise `SpectrumIncomplete`.
pub fn pbh_controllable(
    l: &IntMatrix,
    b: &IntMatrix,
    eigenvalues: &[i64],
) -> Result<Verdict, OracleError> {
    check_pair(l, b)?;
    let n = l.rows();
    let mut distinct = eigenvalues.to_vec();
    distinct.sort_unstable();
    distinct.dedup();

    let mut shifted = Vec::with_capacity(distinct.len());
    let mut total = 0;
    for &lambda in &distinct {
        let m = l.shift_diagonal(&BigInt::from(lambda));
        let nullity = n - rank_exact(&m);
        if nullity == 0 {
            return Err(OracleError::SpectrumIncomplete(format!(
                "{lambda} is not an eigenvalue"
            )));
        }
        total += nullity;
        shifted.push((lambda, m));
    }
    if total != n {
        return Err(OracleError::SpectrumIncomplete(format!(
            "eigenspaces of {distinct:?} have total dimension {total}, expected {n}"
        )));
    }

    for (lambda, m) in shifted {
        let stacked = m.hstack(b).expect("row counts checked");
        if rank_exact(&stacked) < n {
            let v = integer_kernel(&stacked.transpose())
                .into_iter()
                .next()
                .expect("rank deficiency implies a left kernel vector");
            return Ok(Verdict::refuted(lambda, v));
        }
    }
    Ok(Verdict::controllable())
}

/// Eigenvector test: with `V_i` a basis of the `λ_i`-eigenspace, the pair is
/// controllable iff `rank(V_iᵀ B) = q_i` for every group.
///
/// Each basis is validated first: `L V_i = λ_i V_i` exactly, full column rank,
/// distinct eigenvalues, and multiplicities summing to `n`.
pub fn eigvec_test(
    l: &IntMatrix,
    groups: &[EigenGroup],
    b: &IntMatrix,
) -> Result<Verdict, OracleError> {
    check_pair(l, b)?;
    let n = l.rows();
    let invalid = |lambda, reason: String| OracleError::BasisInvalid { lambda, reason };
    for (i, g) in groups.iter().enumerate() {
        if g.basis.rows() != n {
            return Err(invalid(
                g.value,
                format!("basis has {} rows, expected {n}", g.basis.rows()),
            ));
        }
        if groups[..i].iter().any(|h| h.value == g.value) {
            return Err(invalid(g.value, "eigenvalue listed twice".into()));
        }
        let lhs = l.mul(&g.basis).expect("dimensions checked");
        let lambda = BigInt::from(g.value);
        let holds =
            (0..n).all(|r| (0..g.basis.cols()).all(|c| lhs[(r, c)] == &lambda * &g.basis[(r, c)]));
        if !holds {
            return Err(invalid(g.value, "L·v != λ·v".into()));
        }
        if rank_exact(&g.basis) != g.multiplicity() {
            return Err(invalid(g.value, "basis columns are dependent".into()));
        }
    }
    let total: usize = groups.iter().map(EigenGroup::multiplicity).sum();
    if total != n {
        let lambda = groups.last().map_or(0, |g| g.value);
        return Err(invalid(
            lambda,
            format!("multiplicities sum to {total}, expected {n}"),
        ));
    }

    for g in groups {
        let projected = g.basis.transpose().mul(b).expect("dimensions checked");
        if rank_exact(&projected) < g.multiplicity() {
            let c = integer_kernel(&projected.transpose())
                .into_iter()
                .next()
                .expect("rank deficiency implies a left kernel vector");
            let mut v = g.basis.mul_vec(&c);
            normalize(&mut v);
            let lambda = i64::try_from(g.value).expect("eigenvalue fits in i64");
            return Ok(Verdict::refuted(lambda, v));
        }
    }
    Ok(Verdict::controllable())
}

/// Kalman rank test on `[B, AB, ..., A^{n-1}B]` with `A = -L`.
pub fn kalman_controllable(l: &IntMatrix, b: &IntMatrix) -> bool {
    check_pair(l, b).expect("kalman_controllable: bad dimensions");
    let n = l.rows();
    if n == 0 {
        return true;
    }
    let a = l.negate();
    let mut block = b.clone();
    let mut krylov = b.clone();
    for _ in 1..n {
        block = a.mul(&block).expect("square");
        krylov = krylov.hstack(&block).expect("same row count");
    }
    rank_exact(&krylov) == n
}

/// Smallest set of control nodes found by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControlSet {
    pub size: usize,
    pub nodes: Vec<usize>,
}

/// Exhaustive search for the smallest `m <= limit` such that some `m`-subset
/// of nodes, used as `B = [e_j]`, makes `(−L(g), B)` controllable.
///
/// Subsets are tried by size, then lexicographically, so the witness is the
/// lexicographically first minimum set. Controllability is decided by the
/// Kalman rank test, which needs no spectral information about `g`.
pub fn min_controls_bruteforce(g: &Graph, limit: usize) -> Result<Option<ControlSet>, OracleError> {
    let n = g.node_count();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(OracleError::TooLarge { n });
    }
    let l = laplacian(g);
    for size in 0..=limit.min(n) {
        for subset in Combinations::new(n, size) {
            let b = IntMatrix::standard_basis(n, &subset);
            if kalman_controllable(&l, &b) {
                return Ok(Some(ControlSet {
                    size,
                    nodes: subset,
                }));
            }
        }
    }
    Ok(None)
}

/// `k`-subsets of `1..=n` in lexicographic order.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Combinations {
        let current = (k <= n).then(|| (1..=k).collect());
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        // rightmost position that can still be incremented
        if let Some(i) = (0..k).rev().find(|&i| next[i] < self.n - (k - 1 - i)) {
            next[i] += 1;
            for j in i + 1..k {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Converts a nonnegative eigenvalue list to the `i64` form the oracles take.
pub fn as_i64(values: &[usize]) -> Vec<i64> {
    values
        .iter()
        .map(|&v| i64::try_from(v).expect("eigenvalue fits in i64"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Rational Gaussian elimination rank, kept separate from both the
    /// Bareiss path and the kernel routine.
    fn rational_rank(m: &IntMatrix) -> usize {
        let mut a: Vec<Vec<BigRational>> = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..m.rows()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..m.rows() {
                let f = &a[i][c] / &a[rank][c];
                for j in c..m.cols() {
                    let d = &f * &a[rank][j];
                    a[i][j] -= d;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_exact(&IntMatrix::identity(4)), 4);
        assert_eq!(
            rank_exact(&IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]])),
            1
        );
        assert_eq!(rank_exact(&laplacian(&Graph::complete(3))), 2);
        assert_eq!(rank_exact(&IntMatrix::zeros(3, 0)), 0);
        assert_eq!(rank_exact(&IntMatrix::zeros(0, 3)), 0);
    }

    #[test]
    fn kernel_of_k3_laplacian_is_all_ones() {
        let k = integer_kernel(&laplacian(&Graph::complete(3)));
        assert_eq!(k, vec![ints(&[1, 1, 1])]);
    }

    #[test]
    fn pbh_k3_single_input_refuted() {
        let l = laplacian(&Graph::complete(3));
        let b = IntMatrix::standard_basis(3, &[1]);
        let v = pbh_controllable(&l, &b, &[0, 3, 3]).unwrap();
        assert!(!v.controllable);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(w.lambda, 3);
        assert_eq!(w.vector, ints(&[0, 1, -1]));
        assert!(v.is_consistent(&l, &b));
    }

    #[test]
    fn pbh_identity_input_always_controllable() {
        let l = laplacian(&Graph::complete(4));
        let v = pbh_controllable(&l, &IntMatrix::identity(4), &[0, 4, 4, 4]).unwrap();
        assert_eq!(v, Verdict::controllable());
    }

    #[test]
    fn pbh_rejects_incomplete_spectra() {
        let l = laplacian(&Graph::complete(3));
        let b = IntMatrix::identity(3);
        assert!(matches!(
            pbh_controllable(&l, &b, &[0, 1]),
            Err(OracleError::SpectrumIncomplete(_))
        ));
        assert!(matches!(
            pbh_controllable(&l, &b, &[0]),
            Err(OracleError::SpectrumIncomplete(_))
        ));
        assert!(matches!(
            pbh_controllable(&l, &IntMatrix::identity(2), &[0, 3]),
            Err(OracleError::Dimension(_))
        ));
    }

    #[test]
    fn eigvec_test_validates_bases() {
        let l = laplacian(&Graph::complete(2));
        let good = vec![
            EigenGroup {
                value: 0,
                basis: IntMatrix::from_rows(&[vec![1], vec![1]]),
            },
            EigenGroup {
                value: 2,
                basis: IntMatrix::from_rows(&[vec![1], vec![-1]]),
            },
        ];
        let b = IntMatrix::standard_basis(2, &[1]);
        assert!(eigvec_test(&l, &good, &b).unwrap().controllable);

        let mut bad = good.clone();
        bad[1].value = 3;
        assert!(matches!(
            eigvec_test(&l, &bad, &b),
            Err(OracleError::BasisInvalid { lambda: 3, .. })
        ));
        assert!(matches!(
            eigvec_test(&l, &good[..1], &b),
            Err(OracleError::BasisInvalid { .. })
        ));
    }

    #[test]
    fn eigvec_test_identity_input() {
        let l = laplacian(&Graph::empty(2));
        let groups = vec![EigenGroup {
            value: 0,
            basis: IntMatrix::identity(2),
        }];
        assert!(
            eigvec_test(&l, &groups, &IntMatrix::identity(2))
                .unwrap()
                .controllable
        );
        let v = eigvec_test(&l, &groups, &IntMatrix::standard_basis(2, &[1])).unwrap();
        assert!(!v.controllable);
        assert!(v.is_consistent(&l, &IntMatrix::standard_basis(2, &[1])));
    }

    #[test]
    fn kalman_examples() {
        let k2 = laplacian(&Graph::complete(2));
        assert!(kalman_controllable(
            &k2,
            &IntMatrix::standard_basis(2, &[1])
        ));
        let e2 = laplacian(&Graph::empty(2));
        assert!(!kalman_controllable(
            &e2,
            &IntMatrix::standard_basis(2, &[1])
        ));
    }

    #[test]
    fn brute_force_examples() {
        let k3 = min_controls_bruteforce(&Graph::complete(3), 3)
            .unwrap()
            .unwrap();
        assert_eq!(
            k3,
            ControlSet {
                size: 2,
                nodes: vec![1, 2]
            }
        );
        let k2 = min_controls_bruteforce(&Graph::complete(2), 2)
            .unwrap()
            .unwrap();
        assert_eq!(k2.size, 1);
        assert_eq!(
            min_controls_bruteforce(&Graph::complete(3), 1).unwrap(),
            None
        );
        assert_eq!(
            min_controls_bruteforce(&Graph::empty(13), 1),
            Err(OracleError::TooLarge { n: 13 })
        );
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        assert_eq!(
            Combinations::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(6, 3).count(), 20);
    }

    #[test]
    fn verdict_json_shape() {
        let v = Verdict::refuted(3, ints(&[0, 1, -1]));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"controllable":false,"witness_lambda":3,"witness_vector":[0,1,-1]}"#
        );
        assert_eq!(
            serde_json::to_string(&Verdict::controllable()).unwrap(),
            r#"{"controllable":true,"witness_lambda":null,"witness_vector":null}"#
        );
    }

    fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
        (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c.max(1)).take(r).map(<[i64]>::to_vec).collect();
                if c == 0 {
                    IntMatrix::zeros(r, 0)
                } else {
                    IntMatrix::from_rows(&rows)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_rational_rank(m in arb_matrix()) {
            prop_assert_eq!(rank_exact(&m), rational_rank(&m));
        }

        #[test]
        fn kernel_vectors_are_annihilated(m in arb_matrix()) {
            let k = integer_kernel(&m);
            prop_assert_eq!(k.len(), m.cols() - rank_exact(&m));
            for v in k {
                prop_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
                prop_assert!(v.iter().any(|e| !e.is_zero()));
            }
        }

        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            m in arb_matrix(), seed in any::<u64>(), scale in prop_oneof![-5i64..=-1, 1i64..=5]
        ) {
            let r = rank_exact(&m);
            let mut rows = m.to_rows();
            if !rows.is_empty() {
                let k = (seed as usize) % rows.len();
                rows.rotate_left(k);
                for x in rows[0].iter_mut() {
                    *x *= scale;
                }
            }
            let mut permuted = IntMatrix::zeros(m.rows(), m.cols());
            for (i, row) in rows.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    permuted[(i, (j + seed as usize) % m.cols())] = x.clone();
                }
            }
            prop_assert_eq!(rank_exact(&permuted), r);
        }
    }
}
