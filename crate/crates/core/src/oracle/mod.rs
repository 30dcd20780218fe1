//! Brute-force ground truth over an exact field.
//!
//! A point `P_ij` is evaluated at the homogeneous representative
//! `([den t_i : num t_i], [den u_j : num u_j])`. The degree-(u,v) part of the
//! coordinate ring is the column space of the evaluation matrix of
//! `S_(u,v)` inside `k^#X`, and multiplication by a variable is the diagonal
//! scaling by its values at the points. Everything else (Hilbert functions,
//! separating degrees, generator counts, Koszul homology) is ranks of such
//! matrices.

mod field;
mod koszul;

pub use field::{ExactField, DEFAULT_PRIME, RATIONAL_POINT_LIMIT};
pub use koszul::{betti_oracle, koszul_homology, KoszulReport, MAX_MARGIN};

use field::{Backend, Integers, ModP};

use crate::error::{Error, Result};
use crate::grid::{Bidegree, Line, PointGrid};
use crate::hilbert::HilbertMatrix;
use crate::linalg::Matrix;
use crate::resolution::Separator;

/// Runs `$body` with `$b` bound to the backend for `$field`.
macro_rules! with_backend {
    ($field:expr, $points:expr, |$b:ident| $body:expr) => {
        match $field {
            ExactField::Rationals => {
                let $b = &Integers;
                $body
            }
            ExactField::Prime(p) => {
                let $b = &ModP::checked(p, $points)?;
                $body
            }
        }
    };
}
pub(crate) use with_backend;

/// The points of a scheme with their representatives and the linear forms of
/// the grid lines, all over one backend.
pub(crate) struct EvaluationModel<'b, B: Backend> {
    pub(crate) backend: &'b B,
    rows: Vec<(B::E, B::E)>,
    cols: Vec<(B::E, B::E)>,
    pub(crate) points: Vec<(usize, usize)>,
}

impl<'b, B: Backend> EvaluationModel<'b, B> {
    /// Model of `grid`'s points. Lines may be empty; their parameters must
    /// stay distinct in the field.
    pub(crate) fn new(backend: &'b B, grid: &PointGrid) -> Result<Self> {
        let rows = grid
            .row_params()
            .iter()
            .map(|&t| backend.point(t))
            .collect::<Result<Vec<_>>>()?;
        let cols = grid
            .col_params()
            .iter()
            .map(|&t| backend.point(t))
            .collect::<Result<Vec<_>>>()?;
        for (name, reps) in [("R", &rows), ("C", &cols)] {
            for a in 0..reps.len() {
                for b in a + 1..reps.len() {
                    let det = backend.sub(backend.mul(reps[a].0, reps[b].1)?, backend.mul(reps[a].1, reps[b].0)?)?;
                    if backend.is_zero(det) {
                        return Err(Error::BadField(format!("lines {name}_{a} and {name}_{b} coincide")));
                    }
                }
            }
        }
        Ok(EvaluationModel { backend, rows, cols, points: grid.points() })
    }

    pub(crate) fn len(&self) -> usize {
        self.points.len()
    }

    fn pow(&self, base: B::E, exp: usize) -> Result<B::E> {
        let mut acc = self.backend.one();
        for _ in 0..exp {
            acc = self.backend.mul(acc, base)?;
        }
        Ok(acc)
    }

    /// Value of variable `var` (x0, x1, y0, y1) at point `idx`.
    pub(crate) fn variable(&self, var: usize, idx: usize) -> B::E {
        let (i, j) = self.points[idx];
        match var {
            0 => self.rows[i].0,
            1 => self.rows[i].1,
            2 => self.cols[j].0,
            _ => self.cols[j].1,
        }
    }

    /// Value at `(x0, x1)` of the form `den_l x1 − num_l x0` cutting out a
    /// line with representative `rep`.
    fn line_form(&self, rep: (B::E, B::E), at: (B::E, B::E)) -> Result<B::E> {
        let b = self.backend;
        b.sub(b.mul(rep.0, at.1)?, b.mul(rep.1, at.0)?)
    }

    pub(crate) fn line_value(&self, line: Line, (i, j): (usize, usize)) -> Result<B::E> {
        match line {
            Line::Row(l) => self.line_form(self.rows[l], self.rows[i]),
            Line::Col(l) => self.line_form(self.cols[l], self.cols[j]),
        }
    }

    /// Evaluation matrix of the monomials `x0^α x1^(u−α) y0^β y1^(v−β)`,
    /// column index `α (v+1) + β`.
    pub(crate) fn monomial_matrix(&self, u: usize, v: usize) -> Result<Matrix<B::E>> {
        let n = self.len();
        let mut columns = Vec::with_capacity((u + 1) * (v + 1));
        for alpha in 0..=u {
            for beta in 0..=v {
                let col = (0..n)
                    .map(|p| {
                        let (i, j) = self.points[p];
                        let (x0, x1) = self.rows[i];
                        let (y0, y1) = self.cols[j];
                        let b = self.backend;
                        let x = b.mul(self.pow(x0, alpha)?, self.pow(x1, u - alpha)?)?;
                        let y = b.mul(self.pow(y0, beta)?, self.pow(y1, v - beta)?)?;
                        b.mul(x, y)
                    })
                    .collect::<Result<Vec<_>>>()?;
                columns.push(col);
            }
        }
        Ok(Matrix::from_columns(n, &columns, self.backend.zero()))
    }

    /// Spanning set of the degree-(u,v) part of the coordinate ring: the
    /// products `x0^(u−α) ∏_{l<α} L_l · y0^(v−β) ∏_{l<β} M_l` of line forms
    /// taken in grid order. Zero vectors are dropped.
    pub(crate) fn newton_vectors(&self, u: usize, v: usize) -> Result<Vec<Vec<B::E>>> {
        let b = self.backend;
        let row_part = |i: usize, alpha: usize| -> Result<B::E> {
            let at = self.rows[i];
            let mut acc = self.pow(at.0, u - alpha)?;
            for l in 0..alpha {
                acc = b.mul(acc, self.line_form(self.rows[l], at)?)?;
            }
            Ok(acc)
        };
        let col_part = |j: usize, beta: usize| -> Result<B::E> {
            let at = self.cols[j];
            let mut acc = self.pow(at.0, v - beta)?;
            for l in 0..beta {
                acc = b.mul(acc, self.line_form(self.cols[l], at)?)?;
            }
            Ok(acc)
        };
        let mut out = Vec::new();
        for alpha in 0..=u.min(self.rows.len().saturating_sub(1)) {
            for beta in 0..=v.min(self.cols.len().saturating_sub(1)) {
                let vec = self
                    .points
                    .iter()
                    .map(|&(i, j)| b.mul(row_part(i, alpha)?, col_part(j, beta)?))
                    .collect::<Result<Vec<_>>>()?;
                if vec.iter().any(|&x| !b.is_zero(x)) {
                    out.push(vec);
                }
            }
        }
        Ok(out)
    }

    /// Hilbert function on `0..rows × 0..cols`. Ranks are monotone and
    /// capped by `#X`, so entries past a full-rank entry are not recomputed.
    pub(crate) fn hilbert(&self, rows: usize, cols: usize, newton: bool) -> Result<HilbertMatrix> {
        let n = self.len() as i64;
        let mut out = vec![vec![0i64; cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                let saturated = (i > 0 && out[i - 1][j] == n) || (j > 0 && out[i][j - 1] == n);
                out[i][j] = if saturated || n == 0 {
                    n
                } else if newton {
                    let vecs = self.newton_vectors(i, j)?;
                    self.backend
                        .rank(&Matrix::from_columns(self.len(), &vecs, self.backend.zero())) as i64
                } else {
                    self.backend.rank(&self.monomial_matrix(i, j)?) as i64
                };
            }
        }
        HilbertMatrix::from_rows(out)
    }
}

/// Hilbert function of the grid's points on the inclusive window
/// `0..=window.i × 0..=window.j`, by ranks of monomial evaluation matrices.
pub fn hilbert_oracle(grid: &PointGrid, field: ExactField, window: Bidegree) -> Result<HilbertMatrix> {
    grid.ensure_scheme()?;
    with_backend!(field, grid.len(), |b| {
        EvaluationModel::new(b, grid)?.hilbert(window.i + 1, window.j + 1, false)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatingDegree {
    Unique(Bidegree),
    /// The Hilbert-function drop set is not a single up-set; its minimal
    /// elements are listed.
    NotUnique(Vec<Bidegree>),
}

/// Minimal separating degree of `point` in `grid` read from where removing
/// the point lowers the Hilbert function.
pub fn separating_degree_oracle(grid: &PointGrid, point: (usize, usize), field: ExactField) -> Result<SeparatingDegree> {
    grid.ensure_scheme()?;
    let rest = grid.without(point.0, point.1)?;
    let (rows, cols) = (grid.rows() + 2, grid.cols() + 2);
    let (hy, hz) = with_backend!(field, grid.len(), |b| {
        (
            EvaluationModel::new(b, grid)?.hilbert(rows, cols, true)?,
            EvaluationModel::new(b, &rest)?.hilbert(rows, cols, true)?,
        )
    });
    let drops: Vec<Bidegree> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| Bidegree::new(i, j)))
        .filter(|d| hz.get(d.i as isize, d.j as isize) == hy.get(d.i as isize, d.j as isize) - 1)
        .collect();
    let minimal: Vec<Bidegree> = drops
        .iter()
        .copied()
        .filter(|&d| !drops.iter().any(|&e| e != d && d.dominates(e)))
        .collect();
    if let [single] = minimal[..] {
        let up_set = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| Bidegree::new(i, j)))
            .filter(|d| d.dominates(single))
            .count();
        if up_set == drops.len() {
            return Ok(SeparatingDegree::Unique(single));
        }
    }
    Ok(SeparatingDegree::NotUnique(minimal))
}

/// Number of minimal generators of the ideal in degree `d`:
/// `dim I_d − dim(S_(1,0) I_(d−(1,0)) + S_(0,1) I_(d−(0,1)))`.
pub fn generator_count_oracle(grid: &PointGrid, field: ExactField, d: Bidegree) -> Result<usize> {
    grid.ensure_scheme()?;
    with_backend!(field, grid.len(), |b| generator_count(&EvaluationModel::new(b, grid)?, d))
}

fn generator_count<B: Backend>(model: &EvaluationModel<'_, B>, d: Bidegree) -> Result<usize> {
    let b = model.backend;
    let width = d.j + 1;
    let dim_s = (d.i + 1) * width;
    let dim_i = dim_s - b.rank(&model.monomial_matrix(d.i, d.j)?);

    let mut products: Vec<Vec<B::E>> = Vec::new();
    if d.i > 0 {
        // In S_(d.i−1, d.j), x0 raises α and x1 keeps it.
        for g in b.kernel(&model.monomial_matrix(d.i - 1, d.j)?)? {
            for raise in [1, 0] {
                let mut v = vec![b.zero(); dim_s];
                for (idx, &c) in g.iter().enumerate() {
                    let (alpha, beta) = (idx / width, idx % width);
                    v[(alpha + raise) * width + beta] = c;
                }
                products.push(v);
            }
        }
    }
    if d.j > 0 {
        let old_width = d.j;
        for g in b.kernel(&model.monomial_matrix(d.i, d.j - 1)?)? {
            for raise in [1, 0] {
                let mut v = vec![b.zero(); dim_s];
                for (idx, &c) in g.iter().enumerate() {
                    let (alpha, beta) = (idx / old_width, idx % old_width);
                    v[alpha * width + beta + raise] = c;
                }
                products.push(v);
            }
        }
    }
    let generated = if products.is_empty() {
        0
    } else {
        b.rank(&Matrix::from_columns(dim_s, &products, b.zero()))
    };
    Ok(dim_i - generated)
}

/// Evaluates the product of the separator's line forms: it must vanish on
/// every point of `grid_z` and not at `removed`, and its degree must count
/// its rows and columns.
pub fn verify_separator(sep: &Separator, grid_z: &PointGrid, removed: (usize, usize), field: ExactField) -> Result<bool> {
    grid_z.ensure_scheme()?;
    let rows = sep.lines.iter().filter(|l| matches!(l, Line::Row(_))).count();
    if Bidegree::new(rows, sep.lines.len() - rows) != sep.degree {
        return Ok(false);
    }
    if removed.0 >= grid_z.rows() || removed.1 >= grid_z.cols() {
        return Err(Error::OutOfRange(removed.0, removed.1, grid_z.rows(), grid_z.cols()));
    }
    with_backend!(field, grid_z.len() + 1, |b| {
        let model = EvaluationModel::new(b, grid_z)?;
        let value = |at: (usize, usize)| -> Result<_> {
            let mut acc = b.one();
            for &line in &sep.lines {
                acc = b.mul(acc, model.line_value(line, at)?)?;
            }
            Ok(acc)
        };
        for &p in &model.points {
            if !b.is_zero(value(p)?) {
                return Ok(false);
            }
        }
        Ok(!b.is_zero(value(removed)?))
    })
}
