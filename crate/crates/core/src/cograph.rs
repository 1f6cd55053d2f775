//! Cographs described by cotree expressions.
//!
//! Expression grammar (tokens separated by whitespace or parentheses):
//!
//! ```text
//! EXPR := "x" | "(" OP EXPR EXPR+ ")"
//! OP   := "J" | "U"
//! ```
//!
//! `J` joins its children, `U` takes their disjoint union. Leaves are
//! numbered `1..=n` from left to right, and leaf `i` becomes graph node `i`.
//!
//! The eigen-decomposition works bottom-up. If `G1` (size `n1`) and `G2`
//! (size `n2`) have eigenpairs `(ψ, u)` and `(π, w)` besides their all-ones
//! vectors, then `G1 + G2` has the eigenpairs `(ψ, [u; 0])`, `(π, [0; w])`
//! and `(0, [n2·1; −n1·1])`, while `G1 * G2` has the same vectors with
//! eigenvalues `ψ + n2`, `π + n1` and `n1 + n2`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::graph::{graph_join, graph_union, Graph};
use crate::matrix::IntMatrix;
use crate::oracle::EigenGroup;
use crate::threshold::ConstructionSequence;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CographError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("node opened at column {position} has {children} child(ren); at least 2 are required")]
    Arity { position: usize, children: usize },
    #[error("cograph is not connected (root is a union)")]
    NotConnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoOp {
    /// Label 0.
    Union,
    /// Label 1.
    Join,
}

impl CoOp {
    pub fn label(self) -> u8 {
        match self {
            CoOp::Union => 0,
            CoOp::Join => 1,
        }
    }

    fn symbol(self) -> char {
        match self {
            CoOp::Union => 'U',
            CoOp::Join => 'J',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cotree {
    Leaf(usize),
    Internal { op: CoOp, children: Vec<Cotree> },
}

impl Cotree {
    /// A single-leaf cotree.
    pub fn leaf() -> Cotree {
        Cotree::Leaf(1)
    }

    /// Internal node over `children`; leaves are renumbered left to right.
    pub fn node(op: CoOp, children: Vec<Cotree>) -> Result<Cotree, CographError> {
        if children.len() < 2 {
            return Err(CographError::Arity {
                position: 0,
                children: children.len(),
            });
        }
        let mut t = Cotree::Internal { op, children };
        let mut next = 0;
        t.renumber(&mut next);
        Ok(t)
    }

    fn renumber(&mut self, next: &mut usize) {
        match self {
            Cotree::Leaf(i) => {
                *next += 1;
                *i = *next;
            }
            Cotree::Internal { children, .. } => children.iter_mut().for_each(|c| c.renumber(next)),
        }
    }

    /// Caterpillar cotree of a threshold graph: each step unions or joins
    /// the tree built so far with a new leaf.
    pub fn from_sequence(seq: &ConstructionSequence) -> Cotree {
        let mut t = Cotree::leaf();
        for &joined in &seq.bits()[1..] {
            let op = if joined { CoOp::Join } else { CoOp::Union };
            t = Cotree::node(op, vec![t, Cotree::leaf()]).expect("two children");
        }
        t
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Cotree::Leaf(_) => 1,
            Cotree::Internal { children, .. } => children.iter().map(Cotree::leaf_count).sum(),
        }
    }

    /// A cograph is connected iff its cotree root is not a union.
    pub fn is_connected(&self) -> bool {
        !matches!(
            self,
            Cotree::Internal {
                op: CoOp::Union,
                ..
            }
        )
    }

    /// Leaf labels in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Cotree::Leaf(i) => vec![*i],
            Cotree::Internal { children, .. } => children.iter().flat_map(Cotree::leaves).collect(),
        }
    }
}

impl fmt::Display for Cotree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cotree::Leaf(_) => f.write_str("x"),
            Cotree::Internal { op, children } => {
                write!(f, "({}", op.symbol())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl std::str::FromStr for Cotree {
    type Err = CographError;

    fn from_str(text: &str) -> Result<Cotree, CographError> {
        parse_cotree(text)
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

/// Tokens with their 1-based character column.
fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().enumerate().peekable();
    while let Some((col, (start, ch))) = chars.next() {
        match ch {
            '(' => tokens.push((col + 1, Token::Open)),
            ')' => tokens.push((col + 1, Token::Close)),
            c if c.is_whitespace() => {}
            _ => {
                let mut end = start + ch.len_utf8();
                while let Some(&(_, (i, c))) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    end = i + c.len_utf8();
                    chars.next();
                }
                tokens.push((col + 1, Token::Word(&text[start..end])));
            }
        }
    }
    tokens
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end_column: usize,
    leaves: usize,
}

impl<'a> Parser<'a> {
    fn syntax(position: usize, message: impl Into<String>) -> CographError {
        CographError::Syntax {
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&(usize, Token<'a>)> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Cotree, CographError> {
        let Some((col, tok)) = self.tokens.get(self.pos) else {
            return Err(Self::syntax(self.end_column, "unexpected end of input"));
        };
        let col = *col;
        self.pos += 1;
        match tok {
            Token::Word("x") => {
                self.leaves += 1;
                Ok(Cotree::Leaf(self.leaves))
            }
            Token::Word(w) => Err(Self::syntax(
                col,
                format!("unexpected {w:?}, expected \"x\" or \"(\""),
            )),
            Token::Close => Err(Self::syntax(col, "unexpected \")\"")),
            Token::Open => {
                let op = match self.tokens.get(self.pos) {
                    Some((_, Token::Word("J"))) => CoOp::Join,
                    Some((_, Token::Word("U"))) => CoOp::Union,
                    Some((c, t)) => {
                        return Err(Self::syntax(
                            *c,
                            format!("expected operator J or U, found {t:?}"),
                        ))
                    }
                    None => return Err(Self::syntax(self.end_column, "unexpected end of input")),
                };
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        Some((_, Token::Close)) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(Self::syntax(self.end_column, "missing \")\"")),
                        Some(_) => children.push(self.expr()?),
                    }
                }
                if children.len() < 2 {
                    return Err(CographError::Arity {
                        position: col,
                        children: children.len(),
                    });
                }
                Ok(Cotree::Internal { op, children })
            }
        }
    }
}

pub fn parse_cotree(text: &str) -> Result<Cotree, CographError> {
    let mut parser = Parser {
        tokens: tokenize(text),
        pos: 0,
        end_column: text.chars().count() + 1,
        leaves: 0,
    };
    let tree = parser.expr()?;
    if let Some((col, _)) = parser.peek() {
        return Err(Parser::syntax(*col, "trailing input after expression"));
    }
    Ok(tree)
}

/// Folds union/join over the children, left to right.
pub fn cotree_to_graph(t: &Cotree) -> Graph {
    match t {
        Cotree::Leaf(_) => Graph::k1(),
        Cotree::Internal { op, children } => {
            let combine = match op {
                CoOp::Union => graph_union,
                CoOp::Join => graph_join,
            };
            let mut it = children.iter().map(cotree_to_graph);
            let first = it.next().expect("internal nodes have children");
            it.fold(first, |acc, g| combine(&acc, &g))
        }
    }
}

/// Eigenvalues with integer eigenbases, grouped by distinct eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CographEigen {
    pub n: usize,
    /// Sorted by eigenvalue.
    pub groups: Vec<EigenGroup>,
}

impl CographEigen {
    pub fn max_multiplicity(&self) -> usize {
        self.groups
            .iter()
            .map(EigenGroup::multiplicity)
            .max()
            .unwrap_or(0)
    }

    /// Full spectrum with repeats, nondecreasing.
    pub fn spectrum(&self) -> Vec<usize> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.value, g.multiplicity()))
            .collect()
    }

    /// All basis columns side by side, in group order.
    pub fn modal(&self) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = self.groups.iter().flat_map(|g| g.basis.columns()).collect();
        IntMatrix::from_columns(self.n, &cols)
    }
}

pub fn max_multiplicity(e: &CographEigen) -> usize {
    e.max_multiplicity()
}

/// Eigenpairs of a subtree other than the all-ones kernel vector, in
/// creation order.
struct Partial {
    n: usize,
    pairs: Vec<(usize, Vec<BigInt>)>,
}

fn combine(op: CoOp, a: Partial, b: Partial) -> Partial {
    let (n1, n2) = (a.n, b.n);
    let n = n1 + n2;
    let (shift1, shift2, new_value) = match op {
        CoOp::Union => (0, 0, 0),
        CoOp::Join => (n2, n1, n),
    };
    let mut pairs = Vec::with_capacity(n - 1);
    for (lambda, mut u) in a.pairs {
        u.resize(n, BigInt::from(0));
        pairs.push((lambda + shift1, u));
    }
    for (lambda, w) in b.pairs {
        let mut v = vec![BigInt::from(0); n1];
        v.extend(w);
        pairs.push((lambda + shift2, v));
    }
    let mut bridge = vec![BigInt::from(n2); n1];
    bridge.extend(std::iter::repeat_n(-BigInt::from(n1), n2));
    pairs.push((new_value, bridge));
    Partial { n, pairs }
}

fn decompose(t: &Cotree) -> Partial {
    match t {
        Cotree::Leaf(_) => Partial {
            n: 1,
            pairs: Vec::new(),
        },
        Cotree::Internal { op, children } => {
            let mut it = children.iter().map(decompose);
            let first = it.next().expect("internal nodes have children");
            it.fold(first, |acc, p| combine(*op, acc, p))
        }
    }
}

/// Bottom-up eigen-decomposition of the cograph's Laplacian.
///
/// Within each eigenvalue group the all-ones vector (for eigenvalue 0) comes
/// first, followed by the remaining vectors from most to least recently
/// created in the left-to-right fold.
pub fn eigen_decomposition(t: &Cotree) -> CographEigen {
    let Partial { n, pairs } = decompose(t);
    let mut grouped: BTreeMap<usize, Vec<Vec<BigInt>>> = BTreeMap::new();
    grouped.insert(0, vec![vec![BigInt::from(1); n]]);
    for (lambda, v) in pairs.into_iter().rev() {
        grouped.entry(lambda).or_default().push(v);
    }
    let groups = grouped
        .into_iter()
        .map(|(value, cols)| EigenGroup {
            value,
            basis: IntMatrix::from_columns(n, &cols),
        })
        .collect();
    CographEigen { n, groups }
}

/// `n x M` input matrix whose column `j` is the sum of the `j`-th basis
/// vectors of all eigenvalue groups having at least `j` of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalInput {
    pub matrix: IntMatrix,
    /// For each column, the `(group index, basis column)` pairs summed into it.
    pub record: Vec<Vec<(usize, usize)>>,
    pub eigen: CographEigen,
}

pub fn minimal_input_matrix(t: &Cotree) -> Result<MinimalInput, CographError> {
    if !t.is_connected() {
        return Err(CographError::NotConnected);
    }
    let eigen = eigen_decomposition(t);
    let width = eigen.max_multiplicity();
    let mut matrix = IntMatrix::zeros(eigen.n, width);
    let mut record = vec![Vec::new(); width];
    for (gi, g) in eigen.groups.iter().enumerate() {
        for j in 0..g.multiplicity() {
            for i in 0..eigen.n {
                matrix[(i, j)] += &g.basis[(i, j)];
            }
            record[j].push((gi, j));
        }
    }
    Ok(MinimalInput {
        matrix,
        record,
        eigen,
    })
}
