//! Reduced point configurations on a grid of (1,0)- and (0,1)-lines.
//!
//! Row `R_i` is the (1,0)-line with affine parameter `t_i`, column `C_j` the
//! (0,1)-line with parameter `u_j`, and `P_ij = R_i ∩ C_j`. A configuration
//! is ACM exactly when its rows and columns can be permuted into a
//! left-justified, top-heavy staircase (a Ferrers diagram).

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bidegree `(i, j)`; `i` is the degree in the first factor.
///
/// The derived `Ord` is lexicographic and only serves as a map key. The
/// geometric order is the componentwise partial order, see [`Bidegree::dominates`]
/// and [`Bidegree::strictly_below`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Bidegree {
    pub i: usize,
    pub j: usize,
}

impl Bidegree {
    pub const fn new(i: usize, j: usize) -> Self {
        Bidegree { i, j }
    }

    /// `self ≥ other` componentwise.
    pub fn dominates(self, other: Bidegree) -> bool {
        self.i >= other.i && self.j >= other.j
    }

    /// `self < other` strictly in both components.
    pub fn strictly_below(self, other: Bidegree) -> bool {
        self.i < other.i && self.j < other.j
    }

    pub fn checked_sub(self, other: Bidegree) -> Option<Bidegree> {
        Some(Bidegree::new(self.i.checked_sub(other.i)?, self.j.checked_sub(other.j)?))
    }

    pub fn shift(self, di: usize, dj: usize) -> Bidegree {
        Bidegree::new(self.i + di, self.j + dj)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl From<Bidegree> for (usize, usize) {
    fn from(d: Bidegree) -> Self {
        (d.i, d.j)
    }
}

impl From<(usize, usize)> for Bidegree {
    fn from((i, j): (usize, usize)) -> Self {
        Bidegree::new(i, j)
    }
}

/// A line of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Line {
    Row(usize),
    Col(usize),
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row(i) => write!(f, "row R_{i}"),
            Line::Col(j) => write!(f, "column C_{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyGrid,
    EmptyRow(usize),
    EmptyCol(usize),
    DuplicateRowParams(usize, usize),
    DuplicateColParams(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGrid => write!(f, "grid has no lines"),
            Violation::EmptyRow(i) => write!(f, "empty line R_{i}"),
            Violation::EmptyCol(j) => write!(f, "empty line C_{j}"),
            Violation::DuplicateRowParams(a, b) => {
                write!(f, "duplicate line parameters: R_{a} and R_{b}")
            }
            Violation::DuplicateColParams(a, b) => {
                write!(f, "duplicate line parameters: C_{a} and C_{b}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Incidence matrix of a reduced scheme on `rows × cols` lines together with
/// the exact affine parameters of those lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointGrid {
    rows: usize,
    cols: usize,
    incidence: Vec<bool>,
    row_params: Vec<Rational64>,
    col_params: Vec<Rational64>,
}

impl PointGrid {
    /// Builds a grid from a point list with default parameters `t_i = i`,
    /// `u_j = j`.
    pub fn from_points(rows: usize, cols: usize, points: &[(usize, usize)]) -> Result<Self> {
        let mut incidence = vec![false; rows * cols];
        for &(i, j) in points {
            if i >= rows || j >= cols {
                return Err(Error::OutOfRange(i, j, rows, cols));
            }
            if incidence[i * cols + j] {
                return Err(Error::DuplicatePoint(i, j));
            }
            incidence[i * cols + j] = true;
        }
        Ok(PointGrid {
            rows,
            cols,
            incidence,
            row_params: (0..rows).map(|i| Rational64::from_integer(i as i64)).collect(),
            col_params: (0..cols).map(|j| Rational64::from_integer(j as i64)).collect(),
        })
    }

    /// Left-justified staircase with the given row lengths.
    pub fn staircase(row_lengths: &[usize]) -> Result<Self> {
        let cols = row_lengths.iter().copied().max().unwrap_or(0);
        let points: Vec<_> = row_lengths
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
            .collect();
        Self::from_points(row_lengths.len(), cols, &points)
    }

    pub fn with_params(mut self, row_params: Vec<Rational64>, col_params: Vec<Rational64>) -> Result<Self> {
        if row_params.len() != self.rows {
            return Err(Error::ParamCount { expected: self.rows, got: row_params.len() });
        }
        if col_params.len() != self.cols {
            return Err(Error::ParamCount { expected: self.cols, got: col_params.len() });
        }
        self.row_params = row_params;
        self.col_params = col_params;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_params(&self) -> &[Rational64] {
        &self.row_params
    }

    pub fn col_params(&self) -> &[Rational64] {
        &self.col_params
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.rows && j < self.cols && self.incidence[i * self.cols + j]
    }

    /// Incidence with the boundary sentinel: positions with a negative index
    /// count as occupied, positions past the grid as empty.
    pub(crate) fn occupied(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 {
            return true;
        }
        self.contains(i as usize, j as usize)
    }

    /// Points in row-major order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| self.contains(i, j))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.incidence.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row_count(&self, i: usize) -> usize {
        (0..self.cols).filter(|&j| self.contains(i, j)).count()
    }

    pub fn col_count(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.contains(i, j)).count()
    }

    /// The same lines with one point dropped. The result may have empty lines.
    pub fn without(&self, i: usize, j: usize) -> Result<PointGrid> {
        if !self.contains(i, j) {
            return Err(Error::PointNotInScheme(i, j));
        }
        let mut out = self.clone();
        out.incidence[i * self.cols + j] = false;
        Ok(out)
    }

    pub fn without_all(&self, points: &[(usize, usize)]) -> Result<PointGrid> {
        points.iter().try_fold(self.clone(), |g, &(i, j)| g.without(i, j))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.rows == 0 || self.cols == 0 {
            violations.push(Violation::EmptyGrid);
        }
        for i in 0..self.rows {
            if self.row_count(i) == 0 {
                violations.push(Violation::EmptyRow(i));
            }
        }
        for j in 0..self.cols {
            if self.col_count(j) == 0 {
                violations.push(Violation::EmptyCol(j));
            }
        }
        for (a, b) in duplicate_pairs(&self.row_params) {
            violations.push(Violation::DuplicateRowParams(a, b));
        }
        for (a, b) in duplicate_pairs(&self.col_params) {
            violations.push(Violation::DuplicateColParams(a, b));
        }
        ValidationReport { violations }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGrid(report))
        }
    }

    /// Lengths of the rows if the incidence is a left-justified staircase.
    /// Weaker check for schemes that may have lost whole lines: only the
    /// line parameters must stay distinct.
    pub(crate) fn ensure_scheme(&self) -> Result<()> {
        let violations: Vec<Violation> = self
            .validate()
            .violations
            .into_iter()
            .filter(|v| matches!(v, Violation::DuplicateRowParams(..) | Violation::DuplicateColParams(..)))
            .collect();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGrid(ValidationReport { violations }))
        }
    }

    pub(crate) fn staircase_lengths(&self) -> Option<Vec<usize>> {
        let mut lengths = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let len = self.row_count(i);
            if len == 0 || (0..len).any(|j| !self.contains(i, j)) {
                return None;
            }
            if lengths.last().is_some_and(|&prev| prev < len) {
                return None;
            }
            lengths.push(len);
        }
        Some(lengths)
    }

    pub fn is_staircase(&self) -> bool {
        self.staircase_lengths().is_some()
    }

    /// Sorts rows and columns by decreasing point count, ties by original
    /// index.
    pub fn normalize(&self) -> Normalized {
        let mut row_perm: Vec<usize> = (0..self.rows).collect();
        row_perm.sort_by_key(|&i| std::cmp::Reverse(self.row_count(i)));
        let mut col_perm: Vec<usize> = (0..self.cols).collect();
        col_perm.sort_by_key(|&j| std::cmp::Reverse(self.col_count(j)));

        let mut incidence = vec![false; self.rows * self.cols];
        for (ni, &oi) in row_perm.iter().enumerate() {
            for (nj, &oj) in col_perm.iter().enumerate() {
                incidence[ni * self.cols + nj] = self.contains(oi, oj);
            }
        }
        let grid = PointGrid {
            rows: self.rows,
            cols: self.cols,
            incidence,
            row_params: row_perm.iter().map(|&i| self.row_params[i]).collect(),
            col_params: col_perm.iter().map(|&j| self.col_params[j]).collect(),
        };
        Normalized { grid, row_perm, col_perm }
    }

    /// ACM test: the normalized configuration is a staircase. Lines without
    /// points are ignored.
    pub fn is_acm(&self) -> bool {
        let g = self.normalize().grid;
        let mut prev = usize::MAX;
        (0..g.rows).all(|i| {
            let len = g.row_count(i);
            let ok = len <= prev && (0..len).all(|j| g.contains(i, j));
            prev = len;
            ok
        })
    }

    /// Normalizes and checks validity and the staircase shape.
    pub(crate) fn acm_normal_form(&self) -> Result<Normalized> {
        self.ensure_valid()?;
        let normalized = self.normalize();
        if !normalized.grid.is_staircase() {
            return Err(Error::NotAcm);
        }
        Ok(normalized)
    }

    pub fn classify_points(&self) -> Result<Vec<PointClass>> {
        let normalized = self.acm_normal_form()?;
        let (corners, _) = staircase_corners_vertices(&normalized.grid);
        let mut classes: Vec<PointClass> = normalized
            .grid
            .points()
            .into_iter()
            .map(|(i, j)| {
                let interior = corners
                    .iter()
                    .any(|&c| Bidegree::new(i, j).strictly_below(c));
                let position = normalized.original(i, j);
                PointClass {
                    position,
                    kind: if interior { PointKind::Interior } else { PointKind::Boundary },
                    row_count: self.row_count(position.0),
                    col_count: self.col_count(position.1),
                }
            })
            .collect();
        classes.sort_by_key(|c| c.position);
        Ok(classes)
    }

    /// Corners and vertices of the staircase, each sorted lexicographically.
    pub fn corners_and_vertices(&self) -> Result<(Vec<Bidegree>, Vec<Bidegree>)> {
        let normalized = self.acm_normal_form()?;
        Ok(staircase_corners_vertices(&normalized.grid))
    }
}

fn duplicate_pairs(params: &[Rational64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..params.len() {
        for b in a + 1..params.len() {
            if params[a] == params[b] {
                out.push((a, b));
            }
        }
    }
    out
}

/// Corner/vertex scan of a grid already in staircase position.
pub(crate) fn staircase_corners_vertices(grid: &PointGrid) -> (Vec<Bidegree>, Vec<Bidegree>) {
    let mut corners = Vec::new();
    let mut vertices = Vec::new();
    for i in 0..=grid.rows() as isize {
        for j in 0..=grid.cols() as isize {
            // (0,0) has only sentinel neighbours and is never a corner.
            if (i, j) == (0, 0) {
                continue;
            }
            let up = grid.occupied(i - 1, j);
            let left = grid.occupied(i, j - 1);
            let here = grid.occupied(i, j);
            if up && left && !here {
                corners.push(Bidegree::new(i as usize, j as usize));
            }
            if !up && !left && grid.occupied(i - 1, j - 1) {
                vertices.push(Bidegree::new(i as usize, j as usize));
            }
        }
    }
    (corners, vertices)
}

/// A grid after [`PointGrid::normalize`]; `row_perm[new] = old`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub grid: PointGrid,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl Normalized {
    pub fn is_identity(&self) -> bool {
        self.row_perm.iter().enumerate().all(|(a, &b)| a == b)
            && self.col_perm.iter().enumerate().all(|(a, &b)| a == b)
    }

    pub fn original(&self, i: usize, j: usize) -> (usize, usize) {
        (self.row_perm[i], self.col_perm[j])
    }

    pub fn normalized(&self, i: usize, j: usize) -> (usize, usize) {
        let ni = self.row_perm.iter().position(|&r| r == i).expect("row index in range");
        let nj = self.col_perm.iter().position(|&c| c == j).expect("column index in range");
        (ni, nj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointKind {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub position: (usize, usize),
    pub kind: PointKind,
    /// `p + 1`, the number of points on the row through the point.
    pub row_count: usize,
    /// `q + 1`, the number of points on the column through the point.
    pub col_count: usize,
}

impl PointClass {
    /// `(q, p)`, the minimal separating degree of the point in an ACM scheme.
    pub fn separating_degree(&self) -> Bidegree {
        Bidegree::new(self.col_count - 1, self.row_count - 1)
    }
}
