use lapctl::oracle::{eigvec_test, kalman_controllable, pbh_controllable, EigenGroup, Verdict};
use lapctl::IntMatrix;
use serde::Serialize;

use crate::AppError;

/// Kalman matrices grow as n x (n·m); above this size the test is skipped.
pub const KALMAN_MAX_NODES: usize = 12;

#[derive(Debug, Serialize)]
pub struct OracleVerdicts {
    pub pbh: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvector: Option<Verdict>,
    /// `null` when skipped for size.
    pub kalman: Option<bool>,
}

impl OracleVerdicts {
    pub fn controllable(&self) -> bool {
        self.pbh.controllable
    }

    /// True when every oracle that ran reached the same verdict.
    pub fn agree(&self) -> bool {
        let c = self.pbh.controllable;
        self.eigenvector
            .as_ref()
            .is_none_or(|v| v.controllable == c)
            && self.kalman.is_none_or(|k| k == c)
    }

    pub fn describe(&self) -> String {
        let word = |c: bool| {
            if c {
                "controllable"
            } else {
                "NOT controllable"
            }
        };
        let mut parts = vec![format!("PBH: {}", word(self.pbh.controllable))];
        if let Some(v) = &self.eigenvector {
            parts.push(format!("eigenvector test: {}", word(v.controllable)));
        }
        match self.kalman {
            Some(k) => parts.push(format!("Kalman: {}", word(k))),
            None => parts.push(format!("Kalman: skipped (n > {KALMAN_MAX_NODES})")),
        }
        let mut out = parts.join("; ");
        if let Some(w) = &self.pbh.witness {
            let v: Vec<String> = w.vector.iter().map(ToString::to_string).collect();
            out.push_str(&format!(
                "\nwitness: lambda = {}, v = ({})",
                w.lambda,
                v.join(", ")
            ));
        }
        out
    }
}

/// Runs PBH, the eigenvector test when `groups` is given, and Kalman when
/// the graph is small enough.
pub fn run_oracles(
    l: &IntMatrix,
    b: &IntMatrix,
    spectrum: &[i64],
    groups: Option<&[EigenGroup]>,
) -> Result<OracleVerdicts, AppError> {
    let pbh = pbh_controllable(l, b, spectrum).map_err(|e| AppError::Input(e.to_string()))?;
    let eigenvector = groups
        .map(|g| eigvec_test(l, g, b))
        .transpose()
        .map_err(|e| AppError::Input(e.to_string()))?;
    let kalman = (l.rows() <= KALMAN_MAX_NODES).then(|| kalman_controllable(l, b));
    let verdicts = OracleVerdicts {
        pbh,
        eigenvector,
        kalman,
    };
    if !verdicts.agree() {
        return Err(AppError::Internal(format!(
            "oracles disagree: {}",
            verdicts.describe()
        )));
    }
    Ok(verdicts)
}

#[derive(Debug, Default, Serialize)]
pub struct ThresholdReport {
    pub command: String,
    pub input: String,
    pub view: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_distinct: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modal: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laplacian: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controls: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded: Option<Vec<usize>>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub input_matrix: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen_relation_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<OracleVerdicts>,
}

#[derive(Debug, Serialize)]
pub struct GroupReport {
    pub lambda: usize,
    pub multiplicity: usize,
    /// One entry per basis vector.
    pub basis: Vec<Vec<serde_json::Value>>,
}

#[derive(Debug, Default, Serialize)]
pub struct CographReport {
    pub command: String,
    pub input: String,
    pub view: String,
    pub n: usize,
    pub expr: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laplacian: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_multiplicity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<GroupReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modal: Option<IntMatrix>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub input_matrix: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<OracleVerdicts>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub command: String,
    pub laplacian_file: String,
    pub input_file: String,
    pub spectrum: Vec<i64>,
    pub n: usize,
    pub m: usize,
    pub verdicts: OracleVerdicts,
}

#[derive(Debug, Serialize)]
pub struct MinControlsReport {
    pub command: String,
    pub input: String,
    pub n: usize,
    pub limit: usize,
    /// `null` when no set of at most `limit` nodes works.
    pub size: Option<usize>,
    pub witness: Option<Vec<usize>>,
    pub oracle: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_degrees: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub procedure_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_multiplicity: Option<usize>,
}

/// Columns of `m` as JSON-ready integer rows.
pub fn columns_json(m: &IntMatrix) -> Vec<Vec<serde_json::Value>> {
    let t = m.transpose();
    (0..t.rows())
        .map(|i| serde_json::to_value(lapctl::matrix::IntRow(t.row(i))).expect("serializable"))
        .map(|v| match v {
            serde_json::Value::Array(a) => a,
            _ => unreachable!(),
        })
        .collect()
}

pub fn list<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
