//! The output document and its emitters.
//!
//! Coefficients travel as decimal strings so that arbitrarily large
//! integers survive any JSON reader.

use std::fmt::Write as _;

use higgsmot_core::{HiggsBreakdown, Series};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// What was asked for, echoed verbatim into the document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Request {
    Higgs {
        genus: u32,
        rank: i64,
        degree: i64,
        precision: usize,
        stack: bool,
    },
    Chains {
        genus: u32,
        ranks: Vec<i64>,
        degrees: Vec<i64>,
        /// Entries as `p/q` strings.
        alpha: Vec<String>,
        precision: usize,
    },
    Bunss {
        genus: u32,
        rank: i64,
        degree: i64,
        precision: usize,
        coarse: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub variable: String,
    pub truncation: usize,
    pub coefficients: Vec<String>,
}

impl SeriesRecord {
    pub fn new(s: &Series) -> Self {
        Self {
            variable: "v".to_string(),
            truncation: s.order(),
            coefficients: s.coeffs().iter().map(BigInt::to_string).collect(),
        }
    }

    /// Parses the coefficients back into exact integers.
    pub fn to_series(&self) -> Result<Series, String> {
        let coeffs = self
            .coefficients
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(|_| format!("bad coefficient {c:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() != self.truncation + 1 {
            return Err(format!(
                "expected {} coefficients, got {}",
                self.truncation + 1,
                coeffs.len()
            ));
        }
        Ok(Series::from_coeffs(coeffs, self.truncation))
    }
}

/// One fixed component: chain type, dimension, twist and untwisted series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub length: usize,
    pub ranks: Vec<i64>,
    pub degrees: Vec<i64>,
    pub dim: i64,
    pub twist: i64,
    pub coefficients: Vec<String>,
}

impl BreakdownRow {
    pub fn new(row: &HiggsBreakdown) -> Self {
        let inv = &row.component.invariants;
        Self {
            length: inv.length(),
            ranks: inv.ranks().to_vec(),
            degrees: inv.degrees().to_vec(),
            dim: row.component.dim,
            twist: row.component.twist,
            coefficients: row.series.coeffs().iter().map(BigInt::to_string).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub enabled: bool,
    pub loaded: u64,
    pub stored: u64,
    pub hits: u64,
    pub misses: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub version: String,
    pub request: Request,
    pub series: SeriesRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<Vec<BreakdownRow>>,
    pub cache: CacheStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
    Text,
}

impl OutputDocument {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("document serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Latex => self.latex(),
            Format::Text => self.text(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::from("degree,coefficient\n");
        for (k, c) in self.series.coefficients.iter().enumerate() {
            let _ = writeln!(out, "{k},{c}");
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", polynomial(&self.series.coefficients, false));
        let _ = writeln!(out, "truncation: v^{}", self.series.truncation);
        if let Some(rows) = &self.breakdown {
            for r in rows {
                let _ = writeln!(
                    out,
                    "component r={} n=({}) d=({}) dim={} twist={}: {}",
                    r.length,
                    join(&r.ranks),
                    join(&r.degrees),
                    r.dim,
                    r.twist,
                    polynomial(&r.coefficients, false)
                );
            }
        }
        out
    }

    fn latex(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\[ {} + O(v^{{{}}}) \\]",
            polynomial(&self.series.coefficients, true),
            self.series.truncation + 1
        );
        if let Some(rows) = &self.breakdown {
            out.push_str("\\begin{tabular}{llrrl}\n");
            out.push_str("$\\bar n$ & $\\bar d$ & dim & twist & series \\\\\n\\hline\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "$({})$ & $({})$ & {} & {} & ${}$ \\\\",
                    join(&r.ranks),
                    join(&r.degrees),
                    r.dim,
                    r.twist,
                    polynomial(&r.coefficients, true)
                );
            }
            out.push_str("\\end{tabular}\n");
        }
        out
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// `1 + 4 v + 6 v^2`, dropping zero terms; `latex` braces exponents.
fn polynomial(coeffs: &[String], latex: bool) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c == "0" {
            continue;
        }
        let mono = match (k, latex) {
            (0, _) => String::new(),
            (1, _) => "v".to_string(),
            (_, true) => format!("v^{{{k}}}"),
            (_, false) => format!("v^{k}"),
        };
        terms.push(match (c.as_str(), k) {
            (_, 0) => c.clone(),
            ("1", _) => mono,
            ("-1", _) => format!("-{mono}"),
            _ if latex => format!("{c} {mono}"),
            _ => format!("{c}*{mono}"),
        });
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    terms.join(" + ").replace("+ -", "- ")
}
