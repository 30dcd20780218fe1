//! Bigraded Hilbert functions and their first differences.
//!
//! Both matrices are stored over a finite window starting at `(0,0)`.
//! A [`HilbertMatrix`] extends past its window by repeating its last row and
//! column (the function is stable there), a [`DeltaMatrix`] extends by zero.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{Bidegree, PointGrid};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

fn from_nested(rows: Vec<Vec<i64>>) -> Result<(usize, usize, Vec<i64>)> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(Error::Parse("matrix must be non-empty".into()));
    }
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok((n, m, rows.into_iter().flatten().collect()))
}

macro_rules! matrix_common {
    ($t:ty) => {
        impl $t {
            pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
                let (rows, cols, data) = from_nested(rows)?;
                Ok(Self { rows, cols, data })
            }

            pub(crate) fn zeros(rows: usize, cols: usize) -> Self {
                Self { rows, cols, data: vec![0; rows * cols] }
            }

            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn to_rows(&self) -> Vec<Vec<i64>> {
                self.data.chunks(self.cols).map(<[i64]>::to_vec).collect()
            }

            pub(crate) fn set(&mut self, i: usize, j: usize, v: i64) {
                self.data[i * self.cols + j] = v;
            }

            pub(crate) fn at(&self, i: usize, j: usize) -> i64 {
                self.data[i * self.cols + j]
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&render_matrix(&self.to_rows()))
            }
        }
    };
}

matrix_common!(HilbertMatrix);
matrix_common!(DeltaMatrix);

impl HilbertMatrix {
    /// `M(i,j)`, zero for negative indices and stable past the window.
    pub fn get(&self, i: isize, j: isize) -> i64 {
        if i < 0 || j < 0 {
            return 0;
        }
        let i = (i as usize).min(self.rows - 1);
        let j = (j as usize).min(self.cols - 1);
        self.at(i, j)
    }

    /// Stable value, `deg X` for a scheme.
    pub fn degree(&self) -> i64 {
        self.at(self.rows - 1, self.cols - 1)
    }

    /// `a_ij = m_ij − m_{i,j−1}`.
    pub fn row_difference(&self, i: isize, j: isize) -> i64 {
        self.get(i, j) - self.get(i, j - 1)
    }

    /// `b_ij = m_ij − m_{i−1,j}`.
    pub fn col_difference(&self, i: isize, j: isize) -> i64 {
        self.get(i, j) - self.get(i - 1, j)
    }

    pub fn delta(&self) -> DeltaMatrix {
        let mut d = DeltaMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (si, sj) = (i as isize, j as isize);
                let c = self.get(si, sj) - self.get(si - 1, sj) - self.get(si, sj - 1)
                    + self.get(si - 1, sj - 1);
                d.set(i, j, c);
            }
        }
        d
    }

    /// `i(j) = min{t : m_{t,j} = m_{t+1,j}}` and `j(i) = min{t : m_{i,t} = m_{i,t+1}}`
    /// for every column and row index of the window.
    pub fn boundary_functions(&self) -> BoundaryFunctions {
        let i_of_j = (0..self.cols)
            .map(|j| {
                (0..)
                    .find(|&t| self.get(t, j as isize) == self.get(t + 1, j as isize))
                    .expect("stable past window") as usize
            })
            .collect();
        let j_of_i = (0..self.rows)
            .map(|i| {
                (0..)
                    .find(|&t| self.get(i as isize, t) == self.get(i as isize, t + 1))
                    .expect("stable past window") as usize
            })
            .collect();
        BoundaryFunctions { i_of_j, j_of_i }
    }

    /// Hilbert function after removing a point whose unique minimal
    /// separating degree is `at`: every entry `≥ at` drops by one.
    pub fn puncture(&self, at: Bidegree) -> Result<HilbertMatrix> {
        if at.i >= self.rows || at.j >= self.cols {
            return Err(Error::OutsideWindow { at, rows: self.rows, cols: self.cols });
        }
        let mut out = self.clone();
        for i in at.i..self.rows {
            for j in at.j..self.cols {
                let v = self.at(i, j) - 1;
                if v < 0 {
                    return Err(Error::NonPositiveEntry { at, i, j });
                }
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Same function on a larger window.
    pub fn extended(&self, rows: usize, cols: usize) -> HilbertMatrix {
        let mut out = HilbertMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(i as isize, j as isize));
            }
        }
        out
    }
}

impl DeltaMatrix {
    /// `c_ij`, zero outside the window (including negative indices).
    pub fn get(&self, i: isize, j: isize) -> i64 {
        if i < 0 || j < 0 || i as usize >= self.rows || j as usize >= self.cols {
            return 0;
        }
        self.at(i as usize, j as usize)
    }

    /// `c_ij` with the sentinel `c_{−1,·} = c_{·,−1} = 1`.
    pub(crate) fn get_sentinel(&self, i: isize, j: isize) -> i64 {
        if i < 0 || j < 0 {
            1
        } else {
            self.get(i, j)
        }
    }

    pub fn accumulate(&self) -> HilbertMatrix {
        let mut m = HilbertMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (si, sj) = (i as isize, j as isize);
                let v = self.at(i, j) + m.get(si - 1, sj) + m.get(si, sj - 1) - m.get(si - 1, sj - 1);
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn total(&self) -> i64 {
        self.data.iter().sum()
    }

    /// The block `[0, r) × [0, c)` after dropping trailing all-zero rows and
    /// columns.
    pub fn support_block(&self) -> Vec<Vec<i64>> {
        let r = (0..self.rows)
            .rev()
            .find(|&i| (0..self.cols).any(|j| self.at(i, j) != 0))
            .map_or(0, |i| i + 1);
        let c = (0..self.cols)
            .rev()
            .find(|&j| (0..self.rows).any(|i| self.at(i, j) != 0))
            .map_or(0, |j| j + 1);
        (0..r).map(|i| (0..c).map(|j| self.at(i, j)).collect()).collect()
    }

    /// Corners and vertices of the difference matrix, sorted lexicographically.
    ///
    /// A corner has `c_ij ≤ 0` with `c_{i,j−1} = c_{i−1,j} = 1`; a vertex has
    /// `c_{i−1,j} ≤ 0`, `c_{i,j−1} ≤ 0` and `c_{i−1,j−1} = 1`. Indices `−1`
    /// read as 1; `(0,0)`, whose neighbours are both sentinels, is excluded.
    pub fn corners_and_vertices(&self) -> (Vec<Bidegree>, Vec<Bidegree>) {
        let mut corners = Vec::new();
        let mut vertices = Vec::new();
        for i in 0..=self.rows as isize {
            for j in 0..=self.cols as isize {
                if self.is_corner(i, j) {
                    corners.push(Bidegree::new(i as usize, j as usize));
                }
                if self.is_vertex(i, j) {
                    vertices.push(Bidegree::new(i as usize, j as usize));
                }
            }
        }
        (corners, vertices)
    }

    pub(crate) fn is_corner(&self, i: isize, j: isize) -> bool {
        (i, j) != (0, 0)
            && self.get(i, j) <= 0
            && self.get_sentinel(i, j - 1) == 1
            && self.get_sentinel(i - 1, j) == 1
    }

    pub(crate) fn is_vertex(&self, i: isize, j: isize) -> bool {
        self.get_sentinel(i - 1, j) <= 0
            && self.get_sentinel(i, j - 1) <= 0
            && self.get_sentinel(i - 1, j - 1) == 1
    }

    /// Checks the necessary conditions every first difference of a
    /// zero-dimensional scheme satisfies, reporting every failing cell.
    pub fn check_t0(&self) -> T0Report {
        let mut violations = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.at(i, j) > 1 {
                    violations.push(T0Violation::AboveOne { i, j, value: self.at(i, j) });
                }
            }
        }
        // A positive entry must have no non-positive entry weakly below-left of it.
        for r in 0..self.rows {
            for s in 0..self.cols {
                if self.at(r, s) <= 0 {
                    continue;
                }
                let witness = (0..=r)
                    .flat_map(|i| (0..=s).map(move |j| (i, j)))
                    .find(|&(i, j)| (i, j) != (r, s) && self.at(i, j) <= 0);
                if let Some(at) = witness {
                    violations.push(T0Violation::NotDownClosed { i: r, j: s, witness: at });
                }
            }
        }
        for i in 0..self.rows {
            let mut row = 0;
            let mut prev_row = 0;
            for j in 0..self.cols {
                row += self.at(i, j);
                if i > 0 {
                    prev_row += self.at(i - 1, j);
                }
                if row < 0 || (i > 0 && row > prev_row) {
                    violations.push(T0Violation::RowSums { i, j });
                }
            }
        }
        for j in 0..self.cols {
            let mut col = 0;
            let mut prev_col = 0;
            for i in 0..self.rows {
                col += self.at(i, j);
                if j > 0 {
                    prev_col += self.at(i, j - 1);
                }
                if col < 0 || (j > 0 && col > prev_col) {
                    violations.push(T0Violation::ColSums { i, j });
                }
            }
        }
        T0Report { violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFunctions {
    /// `i(j)` for each column index of the window.
    pub i_of_j: Vec<usize>,
    /// `j(i)` for each row index of the window.
    pub j_of_i: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T0Violation {
    /// Condition (1): `c_ij ≤ 1`.
    AboveOne { i: usize, j: usize, value: i64 },
    /// Condition (2): `c_ij > 0` although `witness ≤ (i,j)` has `c ≤ 0`.
    NotDownClosed { i: usize, j: usize, witness: (usize, usize) },
    /// Condition (3), rows: `0 ≤ Σ_{t≤j} c_it ≤ Σ_{t≤j} c_{i−1,t}` fails.
    RowSums { i: usize, j: usize },
    /// Condition (3), columns.
    ColSums { i: usize, j: usize },
}

impl T0Violation {
    pub fn condition(&self) -> u8 {
        match self {
            T0Violation::AboveOne { .. } => 1,
            T0Violation::NotDownClosed { .. } => 2,
            T0Violation::RowSums { .. } | T0Violation::ColSums { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct T0Report {
    pub violations: Vec<T0Violation>,
}

impl T0Report {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: u8) -> bool {
        self.violations.iter().any(|v| v.condition() == condition)
    }
}

/// Hilbert function of an ACM configuration, read off its staircase: the
/// first difference is the indicator of the normalized incidence.
pub fn hilbert_acm(grid: &PointGrid) -> Result<HilbertMatrix> {
    let normalized = grid.acm_normal_form()?;
    let g = &normalized.grid;
    let mut d = DeltaMatrix::zeros(g.rows() + 1, g.cols() + 1);
    for (i, j) in g.points() {
        d.set(i, j, 1);
    }
    Ok(d.accumulate())
}

/// Renders rows with a column header and row indices, entries right-aligned.
pub fn render_matrix(rows: &[Vec<i64>]) -> String {
    let cols = rows.first().map_or(0, Vec::len);
    let width = rows
        .iter()
        .flatten()
        .map(|v| v.to_string().len())
        .chain((0..cols).map(|j| j.to_string().len()))
        .max()
        .unwrap_or(1);
    let label = rows.len().saturating_sub(1).to_string().len();
    let mut out = format!("{:>label$} |", "");
    for j in 0..cols {
        out.push_str(&format!(" {j:>width$}"));
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!("{i:>label$} |"));
        for v in row {
            out.push_str(&format!(" {v:>width$}"));
        }
        out.push('\n');
    }
    out
}
