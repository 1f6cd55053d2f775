#![allow(dead_code)]

use lapctl::cograph::{CoOp, Cotree};
use lapctl::IntMatrix;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random cotree with exactly `n` leaves; internal nodes get 2..=4 children.
pub fn random_cotree<R: Rng>(rng: &mut R, n: usize) -> Cotree {
    if n == 1 {
        return Cotree::leaf();
    }
    let k = rng.gen_range(2..=n.min(4));
    // split n into k positive parts
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        sizes.push(c - prev);
        prev = c;
    }
    let op = if rng.gen_bool(0.5) {
        CoOp::Join
    } else {
        CoOp::Union
    };
    let children = sizes.into_iter().map(|s| random_cotree(rng, s)).collect();
    Cotree::node(op, children).unwrap()
}

/// Random connected cotree (join at the root) with `n >= 2` leaves.
pub fn random_connected_cotree<R: Rng>(rng: &mut R, n: usize) -> Cotree {
    loop {
        let t = random_cotree(rng, n);
        if t.is_connected() {
            return t;
        }
    }
}

/// Same cograph up to relabeling, with every child list reversed.
pub fn mirrored(t: &Cotree) -> Cotree {
    match t {
        Cotree::Leaf(_) => Cotree::leaf(),
        Cotree::Internal { op, children } => {
            Cotree::node(*op, children.iter().rev().map(mirrored).collect()).unwrap()
        }
    }
}

pub fn random_01_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..=1)).collect())
        .collect();
    if cols == 0 {
        IntMatrix::zeros(rows, 0)
    } else {
        IntMatrix::from_rows(&data)
    }
}

pub fn random_int_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    IntMatrix::from_rows(&data)
}

/// `L v = λ v` for every column of `basis`.
pub fn is_eigenbasis(l: &IntMatrix, lambda: usize, basis: &IntMatrix) -> bool {
    let lv = l.mul(basis).unwrap();
    (0..basis.rows())
        .all(|i| (0..basis.cols()).all(|j| lv[(i, j)] == &basis[(i, j)] * BigInt::from(lambda)))
}

/// Columns pairwise orthogonal.
pub fn columns_orthogonal(m: &IntMatrix) -> bool {
    let gram = m.transpose().mul(m).unwrap();
    (0..m.cols()).all(|a| (0..m.cols()).all(|b| a == b || gram[(a, b)] == BigInt::from(0)))
}
