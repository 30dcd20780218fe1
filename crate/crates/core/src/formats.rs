//! JSON and text file formats for configurations, matrices and Betti tables.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Bidegree, PointGrid};
use crate::hilbert::{render_matrix, DeltaMatrix, HilbertMatrix};
use crate::resolution::{twist, BettiTable, RemovalPlan, RemovalStep, Shifts};

/// A line parameter: an integer or an exact rational written `"7/3"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Text(String),
}

impl Param {
    pub fn value(&self) -> Result<Rational64> {
        match self {
            Param::Int(v) => Ok(Rational64::from_integer(*v)),
            Param::Text(s) => parse_rational(s),
        }
    }

    fn from_value(t: Rational64) -> Param {
        if t.is_integer() {
            Param::Int(*t.numer())
        } else {
            Param::Text(t.to_string())
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rows: usize,
    pub cols: usize,
    pub points: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_params: Option<Vec<Param>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col_params: Option<Vec<Param>>,
}

impl ConfigurationFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Builds the grid, rejecting repeated points and invalid grids.
    pub fn to_grid(&self) -> Result<PointGrid> {
        let grid = self.build_grid()?;
        grid.ensure_valid()?;
        Ok(grid)
    }

    /// Builds the grid without the validity checks of
    /// [`PointGrid::validate`], so that they can be reported.
    pub fn build_grid(&self) -> Result<PointGrid> {
        let mut seen = BTreeSet::new();
        for &[i, j] in &self.points {
            if !seen.insert((i, j)) {
                return Err(Error::DuplicatePoint(i, j));
            }
        }
        let points: Vec<(usize, usize)> = self.points.iter().map(|&[i, j]| (i, j)).collect();
        let mut grid = PointGrid::from_points(self.rows, self.cols, &points)?;
        if self.row_params.is_some() || self.col_params.is_some() {
            let values = |given: &Option<Vec<Param>>, n: usize| -> Result<Vec<Rational64>> {
                match given {
                    Some(ps) => ps.iter().map(Param::value).collect(),
                    None => Ok((0..n as i64).map(Rational64::from_integer).collect()),
                }
            };
            grid = grid.with_params(values(&self.row_params, self.rows)?, values(&self.col_params, self.cols)?)?;
        }
        Ok(grid)
    }

    /// Inverse of [`ConfigurationFile::to_grid`]; default parameters are
    /// omitted.
    pub fn from_grid(grid: &PointGrid, name: Option<String>) -> Self {
        let default = |ps: &[Rational64]| ps.iter().enumerate().all(|(k, &t)| t == Rational64::from_integer(k as i64));
        let params = |ps: &[Rational64]| Some(ps.iter().copied().map(Param::from_value).collect());
        let custom = !default(grid.row_params()) || !default(grid.col_params());
        ConfigurationFile {
            name,
            rows: grid.rows(),
            cols: grid.cols(),
            points: grid.points().into_iter().map(|(i, j)| [i, j]).collect(),
            row_params: if custom { params(grid.row_params()) } else { None },
            col_params: if custom { params(grid.col_params()) } else { None },
        }
    }
}

/// Points to remove, as `[i, j]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub remove: Vec<[usize; 2]>,
}

impl PlanFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn plan(&self) -> RemovalPlan {
        RemovalPlan::new(self.remove.iter().map(|&[i, j]| (i, j)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Acm,
    Removal,
    Delta,
    Oracle,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Acm => "acm",
            Source::Removal => "removal",
            Source::Delta => "delta",
            Source::Oracle => "oracle",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "acm" => Ok(Source::Acm),
            "removal" => Ok(Source::Removal),
            "delta" => Ok(Source::Delta),
            "oracle" => Ok(Source::Oracle),
            other => Err(Error::Parse(format!("unknown source {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiEntry {
    pub degree: [usize; 2],
    pub multiplicity: usize,
}

/// Condition results of one removal step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedStep {
    pub point: [usize; 2],
    pub degree: [usize; 2],
    pub generators_ok: bool,
    pub syzygies_ok: bool,
}

impl From<&RemovalStep> for CertifiedStep {
    fn from(step: &RemovalStep) -> Self {
        CertifiedStep {
            point: [step.point.0, step.point.1],
            degree: [step.conditions.degree.i, step.conditions.degree.j],
            generators_ok: step.conditions.generators_ok,
            syzygies_ok: step.conditions.syzygies_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BettiFile {
    pub beta0: Vec<BettiEntry>,
    pub beta1: Vec<BettiEntry>,
    pub beta2: Vec<BettiEntry>,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_conditions: Option<Vec<CertifiedStep>>,
}

fn entries(s: &Shifts) -> Vec<BettiEntry> {
    s.entries()
        .into_iter()
        .map(|(d, m)| BettiEntry { degree: [d.i, d.j], multiplicity: m })
        .collect()
}

fn shifts(level: &str, es: &[BettiEntry]) -> Result<Shifts> {
    let mut out = Shifts::new();
    for e in es {
        if e.multiplicity == 0 {
            return Err(Error::Parse(format!("{level}: zero multiplicity at ({},{})", e.degree[0], e.degree[1])));
        }
        out.add(Bidegree::new(e.degree[0], e.degree[1]), e.multiplicity);
    }
    Ok(out)
}

impl BettiFile {
    pub fn new(table: &BettiTable, source: Source) -> Self {
        BettiFile {
            beta0: entries(&table.beta0),
            beta1: entries(&table.beta1),
            beta2: entries(&table.beta2),
            source,
            certified_conditions: None,
        }
    }

    pub fn with_conditions(mut self, steps: &[RemovalStep]) -> Self {
        self.certified_conditions = Some(steps.iter().map(CertifiedStep::from).collect());
        self
    }

    pub fn table(&self) -> Result<BettiTable> {
        Ok(BettiTable {
            beta0: shifts("beta0", &self.beta0)?,
            beta1: shifts("beta1", &self.beta1)?,
            beta2: shifts("beta2", &self.beta2)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: BettiFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.table()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("Betti file serializes")
    }

    /// Aligned text form:
    ///
    /// ```text
    /// source: acm
    /// beta2: 0
    /// beta1: O(-2,-2) ⊕ O(-1,-4)
    /// beta0: O(-2,0) ⊕ O(-1,-2) ⊕ O(0,-4)
    /// ```
    pub fn to_text(&self) -> Result<String> {
        Ok(format!("source: {}\n{}", self.source, self.table()?))
    }

    /// Parses [`BettiFile::to_text`] output. Condition records are not part
    /// of the text form.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut source = None;
        let mut levels: [Option<Shifts>; 3] = [None, None, None];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `key: value`, got {line:?}")))?;
            match key.trim() {
                "source" => source = Some(value.parse::<Source>()?),
                "beta0" => levels[0] = Some(parse_shifts(value)?),
                "beta1" => levels[1] = Some(parse_shifts(value)?),
                "beta2" => levels[2] = Some(parse_shifts(value)?),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let [b0, b1, b2] = levels;
        let missing = |what: &str| Error::Parse(format!("missing {what}"));
        let table = BettiTable {
            beta0: b0.ok_or_else(|| missing("beta0"))?,
            beta1: b1.ok_or_else(|| missing("beta1"))?,
            beta2: b2.ok_or_else(|| missing("beta2"))?,
        };
        Ok(BettiFile::new(&table, source.ok_or_else(|| missing("source"))?))
    }
}

/// Parses `O(-a,-b)^m ⊕ …` or `0`.
fn parse_shifts(text: &str) -> Result<Shifts> {
    let text = text.trim();
    let mut out = Shifts::new();
    if text == "0" {
        return Ok(out);
    }
    for term in text.split('⊕').map(str::trim) {
        let bad = || Error::Parse(format!("bad twist {term:?}"));
        let (twisted, mult) = match term.split_once('^') {
            Some((t, m)) => (t, m.trim().parse::<usize>().map_err(|_| bad())?),
            None => (term, 1),
        };
        let inner = twisted
            .trim()
            .strip_prefix("O(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let part = |s: &str| -> Result<usize> {
            let s = s.trim();
            if s == "0" {
                return Ok(0);
            }
            s.strip_prefix('-').and_then(|v| v.parse().ok()).ok_or_else(bad)
        };
        let d = Bidegree::new(part(a)?, part(b)?);
        if twist(d) != twisted.trim() || mult == 0 {
            return Err(bad());
        }
        out.add(d, mult);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Hilbert,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<i64>>,
}

impl MatrixFile {
    pub fn hilbert(m: &HilbertMatrix) -> Self {
        MatrixFile { kind: MatrixKind::Hilbert, rows: m.rows(), cols: m.cols(), entries: m.to_rows() }
    }

    pub fn delta(m: &DeltaMatrix) -> Self {
        MatrixFile { kind: MatrixKind::Delta, rows: m.rows(), cols: m.cols(), entries: m.to_rows() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    pub fn to_text(&self) -> String {
        render_matrix(&self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::acm_resolution;

    const E3: &str = r#"{"name": "E3 X", "rows": 2, "cols": 4,
        "points": [[0,0],[0,1],[0,2],[0,3],[1,0],[1,1]]}"#;

    #[test]
    fn configuration_round_trip() {
        let cfg = ConfigurationFile::parse(E3).unwrap();
        let grid = cfg.to_grid().unwrap();
        assert_eq!(grid, PointGrid::staircase(&[4, 2]).unwrap());
        let back = ConfigurationFile::from_grid(&grid, cfg.name.clone());
        assert_eq!(back, cfg);
        assert_eq!(ConfigurationFile::parse(&back.to_json()).unwrap(), cfg);
    }

    #[test]
    fn configuration_params() {
        let text = r#"{"rows": 2, "cols": 1, "points": [[0,0],[1,0]],
            "row_params": [3, "7/3"], "col_params": ["-1/2"]}"#;
        let cfg = ConfigurationFile::parse(text).unwrap();
        let grid = cfg.to_grid().unwrap();
        assert_eq!(grid.row_params(), &[Rational64::from_integer(3), Rational64::new(7, 3)]);
        assert_eq!(grid.col_params(), &[Rational64::new(-1, 2)]);
        let back = ConfigurationFile::from_grid(&grid, None);
        assert_eq!(back.to_grid().unwrap(), grid);
        assert_eq!(ConfigurationFile::parse(&back.to_json()).unwrap(), back);
    }

    #[test]
    fn configuration_errors() {
        let dup = r#"{"rows": 1, "cols": 1, "points": [[0,0],[0,0]]}"#;
        assert!(matches!(ConfigurationFile::parse(dup).unwrap().to_grid(), Err(Error::DuplicatePoint(0, 0))));
        let empty_col = r#"{"rows": 1, "cols": 2, "points": [[0,0]]}"#;
        assert!(matches!(ConfigurationFile::parse(empty_col).unwrap().to_grid(), Err(Error::InvalidGrid(_))));
        let same = r#"{"rows": 2, "cols": 1, "points": [[0,0],[1,0]], "row_params": ["2/2", 1]}"#;
        assert!(matches!(ConfigurationFile::parse(same).unwrap().to_grid(), Err(Error::InvalidGrid(_))));
        assert!(ConfigurationFile::parse(r#"{"rows": 1}"#).is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn betti_file_round_trips() {
        let table = acm_resolution(&PointGrid::staircase(&[4, 2]).unwrap()).unwrap();
        let file = BettiFile::new(&table, Source::Acm);
        assert_eq!(file.beta0[0], BettiEntry { degree: [2, 0], multiplicity: 1 });
        assert_eq!(BettiFile::parse(&file.to_json()).unwrap(), file);
        let text = file.to_text().unwrap();
        assert_eq!(text, "source: acm\nbeta2: 0\nbeta1: O(-2,-2) ⊕ O(-1,-4)\nbeta0: O(-2,0) ⊕ O(-1,-2) ⊕ O(0,-4)\n");
        assert_eq!(BettiFile::parse_text(&text).unwrap(), file);
    }

    #[test]
    fn betti_text_with_multiplicities() {
        let text = "source: oracle\nbeta2: O(-6,-3)\nbeta1: O(-3,-7)^3 ⊕ O(-6,-2)^2\nbeta0: O(-6,0)";
        let file = BettiFile::parse_text(text).unwrap();
        let table = file.table().unwrap();
        assert_eq!(table.beta1.multiplicity(Bidegree::new(3, 7)), 3);
        assert_eq!(BettiFile::parse_text(&file.to_text().unwrap()).unwrap(), file);
        assert!(BettiFile::parse_text("source: oracle\nbeta0: O(-1,-0)\nbeta1: 0\nbeta2: 0").is_err());
        assert!(BettiFile::parse_text("beta0: 0\nbeta1: 0\nbeta2: 0").is_err());
    }

    #[test]
    fn betti_file_rejects_zero_multiplicity() {
        let text = r#"{"beta0": [{"degree": [1,0], "multiplicity": 0}], "beta1": [], "beta2": [], "source": "oracle"}"#;
        assert!(BettiFile::parse(text).is_err());
    }

    #[test]
    fn matrix_file() {
        let m = DeltaMatrix::from_rows(vec![vec![1, 1, 1, 1], vec![1, 1, -1, -1]]).unwrap();
        let f = MatrixFile::delta(&m);
        let json = f.to_json();
        assert!(json.contains("\"kind\": \"delta\""));
        assert_eq!(serde_json::from_str::<MatrixFile>(&json).unwrap(), f);
        assert_eq!(f.to_text(), m.to_string());
    }
}
