//! Threshold graphs given by their binary construction sequence.
//!
//! Node `i` is the node added at step `i`: a `0` bit adds it as an isolated
//! node (union with `K1`), a `1` bit adds it as a dominating node (join with
//! `K1`). The first bit is always `0`.
//!
//! Everything here is computed from the sequence alone: closed-form degrees,
//! equal-degree cells, the integer Laplacian spectrum, an explicit integer
//! modal matrix built from the vectors `C(i) = (1, ..., 1, -i, 0, ..., 0)`,
//! and a minimum set of control nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::graph::{graph_join, graph_union, DegreeSequence, Graph};
use crate::matrix::IntMatrix;
use crate::oracle::EigenGroup;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("empty construction sequence")]
    EmptyInput,
    #[error("illegal character {ch:?} at column {position}")]
    IllegalCharacter { position: usize, ch: char },
    #[error("the first bit of a construction sequence must be 0")]
    FirstBitNotZero,
    #[error("threshold graph is not connected (last bit is 0)")]
    NotConnected,
    #[error("node {node} is not in degree cell {cell}")]
    InvalidChoice { cell: usize, node: usize },
    #[error("there is no degree cell {cell} (graph has {count} cells)")]
    UnknownCell { cell: usize, count: usize },
}

/// Binary construction sequence. `bit(i)` is 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstructionSequence {
    bits: Vec<bool>,
}

impl ConstructionSequence {
    pub fn new(bits: Vec<bool>) -> Result<Self, ThresholdError> {
        match bits.first() {
            None => Err(ThresholdError::EmptyInput),
            Some(true) => Err(ThresholdError::FirstBitNotZero),
            Some(false) => Ok(ConstructionSequence { bits }),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit added at step `i`, for `1 <= i <= n`.
    pub fn bit(&self, i: usize) -> bool {
        self.bits[i - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// A threshold graph is connected iff it is a single node or its last
    /// node was joined.
    pub fn is_connected(&self) -> bool {
        self.bits.len() == 1 || *self.bits.last().unwrap()
    }

    /// Every sequence of length `n`, in binary counting order.
    pub fn all(n: usize) -> impl Iterator<Item = ConstructionSequence> {
        assert!(n >= 1 && n < usize::BITS as usize);
        (0usize..1 << (n - 1)).map(move |mask| {
            let bits = (0..n)
                .map(|i| i > 0 && mask >> (n - 1 - i) & 1 == 1)
                .collect();
            ConstructionSequence { bits }
        })
    }
}

impl FromStr for ConstructionSequence {
    type Err = ThresholdError;

    /// Accepts `0`/`1` characters; whitespace is ignored.
    fn from_str(text: &str) -> Result<Self, ThresholdError> {
        let mut bits = Vec::new();
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => {
                    return Err(ThresholdError::IllegalCharacter {
                        position: i + 1,
                        ch: c,
                    })
                }
            }
        }
        ConstructionSequence::new(bits)
    }
}

pub fn parse_sequence(text: &str) -> Result<ConstructionSequence, ThresholdError> {
    text.parse()
}

impl fmt::Display for ConstructionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits
            .iter()
            .try_for_each(|&b| f.write_str(if b { "1" } else { "0" }))
    }
}

/// Builds the graph step by step with union/join against `K1`.
pub fn build_graph(seq: &ConstructionSequence) -> Graph {
    seq.bits[1..].iter().fold(Graph::k1(), |g, &joined| {
        if joined {
            graph_join(&g, &Graph::k1())
        } else {
            graph_union(&g, &Graph::k1())
        }
    })
}

/// Degrees in O(n): `d(i) = T(i)·(i−1) + |{j > i : T(j) = 1}|`.
pub fn degrees_from_sequence(seq: &ConstructionSequence) -> Vec<usize> {
    let n = seq.len();
    let mut degrees = vec![0; n];
    let mut later_joins = 0;
    for i in (1..=n).rev() {
        let own = if seq.bit(i) { i - 1 } else { 0 };
        degrees[i - 1] = own + later_joins;
        if seq.bit(i) {
            later_joins += 1;
        }
    }
    degrees
}

/// Nodes grouped by degree, cells ordered by increasing degree, nodes
/// ascending within a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCells {
    pub cells: Vec<Vec<usize>>,
    pub degrees: Vec<usize>,
}

impl DegreeCells {
    /// Number of distinct degrees.
    pub fn count(&self) -> usize {
        self.cells.len()
    }

    /// 1-indexed cell containing `node`.
    pub fn cell_of(&self, node: usize) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.contains(&node))
            .map(|i| i + 1)
    }
}

pub fn degree_cells(seq: &ConstructionSequence) -> DegreeCells {
    let degrees = degrees_from_sequence(seq);
    let mut by_degree: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &d) in degrees.iter().enumerate() {
        by_degree.entry(d).or_default().push(i + 1);
    }
    DegreeCells {
        degrees: by_degree.keys().copied().collect(),
        cells: by_degree.into_values().collect(),
    }
}

/// Laplacian spectrum of a threshold graph in nondecreasing order, from the
/// conjugate of its degree sequence: `λ_{n−i+1} = |{j : d(j) ≥ i}|`.
pub fn spectrum_conjugate(deg: &DegreeSequence) -> Vec<usize> {
    let n = deg.degrees.len();
    // count[k] = number of nodes with degree >= k
    let mut at_least = vec![0usize; n + 2];
    for &d in &deg.degrees {
        at_least[d.min(n + 1)] += 1;
    }
    for k in (0..=n).rev() {
        at_least[k] += at_least[k + 1];
    }
    let mut spectrum: Vec<usize> = (1..=n).rev().map(|i| at_least[i]).collect();
    if let Some(first) = spectrum.first_mut() {
        *first = 0;
    }
    spectrum
}

/// Distinct nonzero eigenvalues with multiplicities for a connected
/// threshold graph, from the distinct degrees `d̃_1 < ... < d̃_s` and their
/// multiplicities `p_i`. With `l = ⌊s/2⌋`, eigenvalue `i` is `d̃_i` for
/// `i <= l` and `d̃_i + 1` otherwise; its multiplicity is `p_i − 1` at
/// `i = l` (even `s`) or `i = l + 1` (odd `s`), and `p_i` elsewhere.
/// Entries with multiplicity zero are dropped.
pub fn spectrum_distinct(
    seq: &ConstructionSequence,
) -> Result<Vec<(usize, usize)>, ThresholdError> {
    if seq.len() < 2 || !seq.is_connected() {
        return Err(ThresholdError::NotConnected);
    }
    let distinct = DegreeSequence::from_degrees(degrees_from_sequence(seq)).distinct;
    let s = distinct.len();
    let l = s / 2;
    let reduced = if s.is_multiple_of(2) { l } else { l + 1 };
    let out = distinct
        .iter()
        .enumerate()
        .map(|(k, &(d, p))| {
            let i = k + 1;
            let value = if i <= l { d } else { d + 1 };
            let mult = if i == reduced { p - 1 } else { p };
            (value, mult)
        })
        .filter(|&(_, q)| q > 0)
        .collect();
    Ok(out)
}

/// `C(i)` in dimension `n`: `i` leading ones, then `-i`, then zeros.
pub fn c_vector(i: usize, n: usize) -> Vec<BigInt> {
    assert!(i >= 1 && i < n, "C({i}) undefined in dimension {n}");
    let mut v = vec![BigInt::from(0); n];
    for x in v.iter_mut().take(i) {
        *x = BigInt::from(1);
    }
    v[i] = -BigInt::from(i);
    v
}

/// Contiguous run of modal columns sharing one eigenvalue. `columns` is a
/// 0-based column range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenBlock {
    pub value: usize,
    pub columns: Range<usize>,
}

/// Sorted spectrum paired column-by-column with a modal matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenStructure {
    pub eigenvalues: Vec<usize>,
    pub modal: IntMatrix,
    pub blocks: Vec<EigenBlock>,
    /// `generators[j] = Some(i)` when column `j` is `C(i)`; `None` for the all-ones column.
    pub generators: Vec<Option<usize>>,
}

impl EigenStructure {
    /// One [`EigenGroup`] per block, for the eigenvector oracle.
    pub fn groups(&self) -> Vec<EigenGroup> {
        let n = self.modal.rows();
        self.blocks
            .iter()
            .map(|b| {
                let cols: Vec<Vec<BigInt>> =
                    b.columns.clone().map(|j| self.modal.column(j)).collect();
                EigenGroup {
                    value: b.value,
                    basis: IntMatrix::from_columns(n, &cols),
                }
            })
            .collect()
    }
}

fn blocks_of(eigenvalues: &[usize]) -> Vec<EigenBlock> {
    let mut blocks: Vec<EigenBlock> = Vec::new();
    for (j, &value) in eigenvalues.iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if b.value == value => b.columns.end = j + 1,
            _ => blocks.push(EigenBlock {
                value,
                columns: j..j + 1,
            }),
        }
    }
    blocks
}

/// Modal matrix of the Laplacian, column `j` paired with the `j`-th smallest
/// eigenvalue.
///
/// Column 1 is the all-ones vector. Scanning steps `i = n, ..., 2`, a union
/// step places `C(i−1)` in the next free column from the left and a join
/// step places it in the next free column from the right.
pub fn modal_matrix(seq: &ConstructionSequence) -> EigenStructure {
    let n = seq.len();
    let mut generators: Vec<Option<usize>> = vec![None; n];
    let mut left = 0;
    let mut right = n;
    for i in (2..=n).rev() {
        if seq.bit(i) {
            right -= 1;
            generators[right] = Some(i - 1);
        } else {
            left += 1;
            generators[left] = Some(i - 1);
        }
    }
    debug_assert_eq!(left + 1, right);

    let columns: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| match g {
            None => vec![BigInt::from(1); n],
            Some(i) => c_vector(*i, n),
        })
        .collect();
    let eigenvalues = spectrum_conjugate(&DegreeSequence::from_degrees(degrees_from_sequence(seq)));
    EigenStructure {
        blocks: blocks_of(&eigenvalues),
        modal: IntMatrix::from_columns(n, &columns),
        eigenvalues,
        generators,
    }
}

/// Control nodes: every node except one representative per degree cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlSelection {
    pub cells: DegreeCells,
    /// One excluded node per cell, in cell order.
    pub excluded: Vec<usize>,
    pub controls: Vec<usize>,
    /// `[e_{j_1}, ..., e_{j_m}]` over the control nodes in ascending order.
    pub input: IntMatrix,
}

/// Selects `n − s` control nodes for a connected threshold graph.
///
/// `choice` maps a 1-indexed cell to the node excluded from it; cells not
/// named exclude their highest-indexed node.
pub fn select_controls(
    seq: &ConstructionSequence,
    choice: Option<&BTreeMap<usize, usize>>,
) -> Result<ControlSelection, ThresholdError> {
    if !seq.is_connected() {
        return Err(ThresholdError::NotConnected);
    }
    let n = seq.len();
    let cells = degree_cells(seq);
    if let Some(choice) = choice {
        for (&cell, &node) in choice {
            let members =
                cells
                    .cells
                    .get(cell.wrapping_sub(1))
                    .ok_or(ThresholdError::UnknownCell {
                        cell,
                        count: cells.count(),
                    })?;
            if !members.contains(&node) {
                return Err(ThresholdError::InvalidChoice { cell, node });
            }
        }
    }
    let excluded: Vec<usize> = cells
        .cells
        .iter()
        .enumerate()
        .map(|(k, members)| {
            choice
                .and_then(|c| c.get(&(k + 1)).copied())
                .unwrap_or(*members.last().expect("cells are nonempty"))
        })
        .collect();
    let controls: Vec<usize> = (1..=n).filter(|v| !excluded.contains(v)).collect();
    if n == 1 {
        log::warn!("single-node graph is trivially controllable; no control nodes selected");
    }
    let input = IntMatrix::standard_basis(n, &controls);
    Ok(ControlSelection {
        cells,
        excluded,
        controls,
        input,
    })
}

/// Every selection admissible for `seq`: one per combination of per-cell
/// excluded nodes.
pub fn all_selections(seq: &ConstructionSequence) -> Result<Vec<ControlSelection>, ThresholdError> {
    let cells = degree_cells(seq);
    let mut choices: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new()];
    for (k, members) in cells.cells.iter().enumerate() {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                members.iter().map(move |&m| {
                    let mut c = c.clone();
                    c.insert(k + 1, m);
                    c
                })
            })
            .collect();
    }
    choices
        .iter()
        .map(|c| select_controls(seq, Some(c)))
        .collect()
}
