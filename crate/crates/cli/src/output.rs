//! Rendering of result sets as JSON, CSV or LaTeX.
//!
//! All three formats are driven by the same [`Report`], so they always carry
//! the same content. Coefficients are decimal strings everywhere.

use std::fmt::Write as _;

use clap::ValueEnum;
use moduli_core::combinat::Partition;
use moduli_core::{BiLaurentPoly, LaurentPoly};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Latex => "tex",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PolyValue {
    Uni(LaurentPoly),
    Bi(BiLaurentPoly),
}

impl PolyValue {
    fn is_bivariate(&self) -> bool {
        matches!(self, PolyValue::Bi(_))
    }

    /// `(exponent columns, coefficient)` rows in ascending exponent order.
    fn rows(&self) -> Vec<(Vec<i64>, String)> {
        match self {
            PolyValue::Uni(p) => p.terms().map(|(e, c)| (vec![e], c.to_string())).collect(),
            PolyValue::Bi(p) => p.terms().map(|(e, c)| (e.to_vec(), c.to_string())).collect(),
        }
    }

    fn latex(&self) -> String {
        let rows = self.rows();
        if rows.is_empty() {
            return "0".to_string();
        }
        let vars: &[&str] = if self.is_bivariate() { &["u", "v"] } else { &["t"] };
        let mut out = String::new();
        for (i, (exps, c)) in rows.iter().enumerate() {
            let (neg, mag) = match c.strip_prefix('-') {
                Some(m) => (true, m),
                None => (false, c.as_str()),
            };
            out.push_str(match (i, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            });
            let constant = exps.iter().all(|&e| e == 0);
            if constant || mag != "1" {
                out.push_str(mag);
            }
            for (var, &e) in vars.iter().zip(exps) {
                match e {
                    0 => {}
                    1 => out.push_str(var),
                    _ => write!(out, "{var}^{{{e}}}").unwrap(),
                }
            }
        }
        out
    }
}

/// What a record is indexed by besides the genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Key {
    Rank(u32),
    Rho(Partition),
}

impl Key {
    fn column(&self) -> &'static str {
        match self {
            Key::Rank(_) => "rank",
            Key::Rho(_) => "rho",
        }
    }

    fn value(&self) -> String {
        match self {
            Key::Rank(r) => r.to_string(),
            Key::Rho(rho) => rho.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub genus: u32,
    pub key: Key,
    pub method: Option<String>,
    pub poly: PolyValue,
}

/// A homogeneous set of records of one kind, plus an optional agreement
/// verdict.
#[derive(Clone, Debug)]
pub struct Report {
    pub kind: String,
    pub records: Vec<Record>,
    pub verdict: Option<bool>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Report {
            kind: kind.to_string(),
            records: Vec::new(),
            verdict: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Latex => self.latex(),
        }
    }

    fn has_methods(&self) -> bool {
        self.records.iter().any(|r| r.method.is_some())
    }

    fn json(&self) -> String {
        let mut doc = serde_json::Map::new();
        doc.insert("kind".into(), self.kind.clone().into());
        let results: Vec<serde_json::Value> = self
            .records
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("genus".into(), r.genus.into());
                match &r.key {
                    Key::Rank(rank) => obj.insert("rank".into(), (*rank).into()),
                    Key::Rho(rho) => obj.insert("rho".into(), rho.to_string().into()),
                };
                if let Some(m) = &r.method {
                    obj.insert("method".into(), m.clone().into());
                }
                obj.insert("poly".into(), serde_json::to_value(&r.poly).expect("polynomials serialize"));
                obj.into()
            })
            .collect();
        doc.insert("results".into(), results.into());
        if let Some(v) = self.verdict {
            doc.insert("verdict".into(), if v { "agree" } else { "disagree" }.into());
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json");
        text.push('\n');
        text
    }

    fn csv(&self) -> String {
        let key_col = self.records.first().map_or("rank", |r| r.key.column());
        let bivariate = self.records.iter().any(|r| r.poly.is_bivariate());
        let mut header = vec!["genus", key_col];
        if self.has_methods() {
            header.push("method");
        }
        if bivariate {
            header.extend(["u_exponent", "v_exponent"]);
        } else {
            header.push("exponent");
        }
        header.push("coefficient");
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.records {
            for (exps, c) in r.poly.rows() {
                let mut fields = vec![r.genus.to_string(), csv_field(&r.key.value())];
                if self.has_methods() {
                    fields.push(r.method.clone().unwrap_or_default());
                }
                fields.extend(exps.iter().map(|e| e.to_string()));
                fields.push(c);
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
        out
    }

    fn latex(&self) -> String {
        let key_head = match self.records.first().map(|r| &r.key) {
            Some(Key::Rho(_)) => "$\\rho$",
            _ => "$r$",
        };
        let methods = self.has_methods();
        let mut out = String::new();
        let cols = if methods { "llll" } else { "lll" };
        writeln!(out, "\\begin{{tabular}}{{{cols}}}").unwrap();
        out.push_str("\\hline\n");
        if methods {
            writeln!(out, "$g$ & {key_head} & method & polynomial \\\\").unwrap();
        } else {
            writeln!(out, "$g$ & {key_head} & polynomial \\\\").unwrap();
        }
        out.push_str("\\hline\n");
        for r in &self.records {
            let key = match &r.key {
                Key::Rank(rank) => rank.to_string(),
                Key::Rho(rho) => format!("$({rho})$"),
            };
            if methods {
                let m = r.method.clone().unwrap_or_default();
                writeln!(out, "{} & {key} & {m} & ${}$ \\\\", r.genus, r.poly.latex()).unwrap();
            } else {
                writeln!(out, "{} & {key} & ${}$ \\\\", r.genus, r.poly.latex()).unwrap();
            }
        }
        out.push_str("\\hline\n\\end{tabular}\n");
        if let Some(v) = self.verdict {
            writeln!(out, "% verdict: {}", if v { "agree" } else { "disagree" }).unwrap();
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
