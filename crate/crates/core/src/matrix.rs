//! Dense matrices over arbitrary-precision integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("missing \"rows cols\" header line")]
    MissingHeader,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Row-major `rows x cols` matrix of exact integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row vectors. Panics if the rows are ragged.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            entries.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    /// Builds an `n x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "column {j} has wrong length");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    /// Input matrix `[e_{j_1}, ..., e_{j_m}]` for 1-indexed nodes.
    pub fn standard_basis(n: usize, nodes: &[usize]) -> Self {
        let mut m = Self::zeros(n, nodes.len());
        for (j, &node) in nodes.iter().enumerate() {
            assert!((1..=n).contains(&node), "node {node} outside 1..={n}");
            m.set(node - 1, j, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: impl Into<BigInt>) {
        self[(i, j)] = value.into();
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64` rows; `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v^T M` for a vector of length `rows`.
    pub fn left_mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * &self[(i, j)]).sum())
            .collect()
    }

    /// `[self, other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::Dimension(format!(
                "cannot place {} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(other.row(i));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols,
            entries,
        })
    }

    /// `self - value * I` for a square matrix.
    pub fn shift_diagonal(&self, value: &BigInt) -> IntMatrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] -= value;
        }
        out
    }

    pub fn negate(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Parses the text format: a `rows cols` header line followed by `rows`
    /// lines of whitespace-separated integers. Blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<IntMatrix, MatrixError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines.next().ok_or(MatrixError::MissingHeader)?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| MatrixError::Malformed {
                line: header_line,
                message: format!("{e}"),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(MatrixError::Malformed {
                line: header_line,
                message: "header must be \"rows cols\"".into(),
            });
        };
        let mut entries = Vec::with_capacity(rows * cols);
        let mut found = 0;
        for (line_no, line) in lines {
            if found == rows {
                return Err(MatrixError::RowCount {
                    expected: rows,
                    found: found + 1,
                });
            }
            let row: Vec<BigInt> = line
                .split_whitespace()
                .map(BigInt::from_str)
                .collect::<Result<_, _>>()
                .map_err(|e| MatrixError::Malformed {
                    line: line_no,
                    message: format!("{e}"),
                })?;
            if row.len() != cols {
                return Err(MatrixError::Malformed {
                    line: line_no,
                    message: format!("expected {cols} entries, found {}", row.len()),
                });
            }
            entries.extend(row);
            found += 1;
        }
        if found != rows {
            return Err(MatrixError::RowCount {
                expected: rows,
                found,
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Inverse of [`IntMatrix::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(BigInt::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.entries[i * self.cols + j]
    }
}

// Padded, right-aligned columns. Not a stable format; use `to_text` or JSON.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(BigInt::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            let line: Vec<String> = cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{}\n{}", self.rows, self.cols, self)
    }
}

/// Serializes as an array of rows. Entries that fit in `i64` become JSON
/// numbers; larger ones become decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&IntRow(self.row(i)))?;
        }
        seq.end()
    }
}

/// Serialization adapter for a slice of big integers (see [`IntMatrix`]).
pub struct IntRow<'a>(pub &'a [BigInt]);

impl Serialize for IntRow<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for v in self.0 {
            match v.to_i64() {
                Some(x) => seq.serialize_element(&x)?,
                None => seq.serialize_element(&v.to_string())?,
            }
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_round_trip() {
        let m = IntMatrix::from_rows(&[vec![1, -2, 3], vec![0, 5, -6]]);
        let text = m.to_text();
        assert_eq!(text, "2 3\n1 -2 3\n0 5 -6\n");
        assert_eq!(IntMatrix::parse_text(&text).unwrap(), m);
    }

    #[test]
    fn parse_rejects_bad_shapes() {
        assert_eq!(IntMatrix::parse_text(""), Err(MatrixError::MissingHeader));
        assert!(matches!(
            IntMatrix::parse_text("2 2\n1 2\n"),
            Err(MatrixError::RowCount {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            IntMatrix::parse_text("1 2\n1 2 3\n"),
            Err(MatrixError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            IntMatrix::parse_text("1 1\nx\n"),
            Err(MatrixError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn empty_dimensions_are_allowed() {
        let m = IntMatrix::parse_text("0 3\n").unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 3));
        let m = IntMatrix::parse_text("2 0\n\n").unwrap_err();
        assert_eq!(
            m,
            MatrixError::RowCount {
                expected: 2,
                found: 0
            }
        );
    }

    #[test]
    fn products_and_stacking() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::identity(2);
        assert_eq!(a.mul(&b).unwrap(), a);
        let ab = a.hstack(&b).unwrap();
        assert_eq!(
            ab,
            IntMatrix::from_rows(&[vec![1, 2, 1, 0], vec![3, 4, 0, 1]])
        );
        assert_eq!(
            a.transpose(),
            IntMatrix::from_rows(&[vec![1, 3], vec![2, 4]])
        );
        let v = vec![BigInt::from(1), BigInt::from(-1)];
        assert_eq!(a.mul_vec(&v), vec![BigInt::from(-1), BigInt::from(-1)]);
        assert_eq!(a.left_mul_vec(&v), vec![BigInt::from(-2), BigInt::from(-2)]);
        assert!(a.mul(&IntMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn standard_basis_columns() {
        let b = IntMatrix::standard_basis(3, &[1, 3]);
        assert_eq!(
            b,
            IntMatrix::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 1]])
        );
    }
}
