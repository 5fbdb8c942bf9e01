use std::fmt::Write as _;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};

/// A table entry: integers print as integers, reals with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Num {
    Int(i64),
    Real(f64),
}

impl Num {
    pub fn as_f64(self) -> f64 {
        match self {
            Num::Int(i) => i as f64,
            Num::Real(x) => x,
        }
    }

    fn csv(self) -> String {
        match self {
            Num::Int(i) => i.to_string(),
            Num::Real(x) => format!("{x:.16e}"),
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Real(x)
    }
}

impl From<usize> for Num {
    fn from(i: usize) -> Self {
        Num::Int(i as i64)
    }
}

impl From<bool> for Num {
    fn from(b: bool) -> Self {
        Num::Int(b as i64)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Num::Int(i) => s.serialize_i64(i),
            Num::Real(x) if x.is_finite() => s.serialize_f64(x),
            Num::Real(_) => s.serialize_none(),
        }
    }
}

/// Effective parameters of a run, after defaults are filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// One named predicate of an experiment's acceptance rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn new(checks: Vec<Check>) -> Self {
        Verdict { pass: checks.iter().all(|c| c.pass), checks }
    }
}

/// Rows of an experiment, ordered by stage, with a fixed list of columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Num>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Num>) {
        assert_eq!(row.len(), self.columns.len(), "row width matches the header");
        self.rows.push(row);
    }

    /// The named column as reals.
    pub fn col(&self, name: &str) -> Vec<f64> {
        let i = self.columns.iter().position(|c| *c == name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }
}

struct Row<'a>(&'a [&'static str], &'a [Num]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// A finished experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub params: Params,
    pub table: Table,
    pub verdict: Verdict,
    pub version: String,
}

impl Serialize for ExperimentReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Row<'_>> = self.table.rows.iter().map(|r| Row(&self.table.columns, r)).collect();
        let mut st = s.serialize_struct("ExperimentReport", 5)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("rows", &rows)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("version", &self.version)?;
        st.end()
    }
}

impl ExperimentReport {
    /// Re-evaluates the acceptance rule on the stored rows.
    pub fn recompute_verdict(&self) -> Verdict {
        super::experiments::evaluate(&self.name, &self.params, &self.table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Header line of column names, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = self.table.columns.join(",");
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(|v| v.csv()).collect();
            writeln!(out, "{}", cells.join(",")).expect("write to string");
        }
        out
    }
}
