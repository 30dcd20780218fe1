use std::collections::BTreeMap;

use rayon::prelude::*;

use super::field::{Backend, Integers, ModP};
use super::{with_backend, EvaluationModel, ExactField};
use crate::error::{Error, Result};
use crate::grid::{Bidegree, PointGrid};
use crate::hilbert::HilbertMatrix;
use crate::linalg::Matrix;
use crate::resolution::{BettiTable, Shifts};

/// Largest window margin tried before giving up with
/// [`Error::WindowTooSmall`].
pub const MAX_MARGIN: usize = 8;

/// Koszul homology dimensions `H_0..H_4` of the coordinate ring on the
/// inclusive window `0..=window.i × 0..=window.j`. Degrees not listed have
/// zero homology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulReport {
    pub window: Bidegree,
    pub homology: BTreeMap<Bidegree, [usize; 5]>,
}

impl KoszulReport {
    /// `beta_{k-1}` of the ideal is `H_k` of the coordinate ring.
    pub fn betti_table(&self) -> BettiTable {
        let level = |k: usize| -> Shifts {
            self.homology
                .iter()
                .filter(|(_, h)| h[k] > 0)
                .map(|(&d, h)| (d, h[k]))
                .collect()
        };
        BettiTable { beta0: level(1), beta1: level(2), beta2: level(3) }
    }

    pub fn tor4_support(&self) -> Vec<Bidegree> {
        self.homology.iter().filter(|(_, h)| h[4] > 0).map(|(&d, _)| d).collect()
    }

    /// `H_0` is the residue field, sitting in degree (0,0) only.
    pub fn h0_is_residue_field(&self) -> bool {
        let at_origin = self.homology.get(&Bidegree::new(0, 0)).map_or(0, |h| h[0]);
        at_origin == 1 && self.homology.iter().all(|(&d, h)| h[0] == 0 || d == Bidegree::new(0, 0))
    }
}

/// True bigraded Betti numbers of the ideal of the grid's points.
pub fn betti_oracle(grid: &PointGrid, field: ExactField) -> Result<BettiTable> {
    Ok(koszul_homology(grid, field)?.betti_table())
}

/// Koszul homology on a window grown until no Betti number touches its
/// frontier.
pub fn koszul_homology(grid: &PointGrid, field: ExactField) -> Result<KoszulReport> {
    grid.ensure_scheme()?;
    if grid.is_empty() {
        return Err(Error::InvalidGrid(crate::grid::ValidationReport {
            violations: vec![crate::grid::Violation::EmptyGrid],
        }));
    }
    with_backend!(field, grid.len(), |b| {
        let model = EvaluationModel::new(b, grid)?;
        let mut margin = 2;
        loop {
            let window = Bidegree::new(grid.rows() - 1 + margin, grid.cols() - 1 + margin);
            let report = homology_on(&model, window)?;
            let frontier = report
                .homology
                .iter()
                .any(|(d, h)| (d.i == window.i || d.j == window.j) && h[1..].iter().any(|&x| x > 0));
            if !frontier {
                return Ok(report);
            }
            if margin >= MAX_MARGIN {
                return Err(Error::WindowTooSmall { margin });
            }
            margin *= 2;
        }
    })
}

/// Subsets of the four variables `x0, x1, y0, y1` as bit masks.
fn subsets(k: usize) -> impl Iterator<Item = u8> {
    (0u8..16).filter(move |m| m.count_ones() as usize == k)
}

fn subset_degree(mask: u8) -> (usize, usize) {
    ((mask & 0b0011).count_ones() as usize, (mask & 0b1100).count_ones() as usize)
}

struct Window<'m, 'b, B: Backend> {
    model: &'m EvaluationModel<'b, B>,
    hilbert: HilbertMatrix,
    spans: Vec<Vec<Vec<Vec<B::E>>>>,
}

impl<B: Backend> Window<'_, '_, B> {
    fn component(&self, d: (usize, usize), mask: u8) -> Option<(usize, usize)> {
        let (a, b) = subset_degree(mask);
        Some((d.0.checked_sub(a)?, d.1.checked_sub(b)?))
    }

    fn dim(&self, d: (usize, usize), k: usize) -> usize {
        subsets(k)
            .filter_map(|t| self.component(d, t))
            .map(|(u, v)| self.hilbert.get(u as isize, v as isize) as usize)
            .sum()
    }

    /// Differential `K_k → K_(k−1)` in degree `d`, columns indexed by the
    /// spanning vectors of each source component, rows by points within each
    /// target component.
    fn differential(&self, d: (usize, usize), k: usize) -> Option<Matrix<B::E>> {
        let b = self.model.backend;
        let n = self.model.len();
        let targets: Vec<u8> = subsets(k - 1).filter(|&t| self.component(d, t).is_some()).collect();
        let mut columns = Vec::new();
        for t in subsets(k) {
            let Some((u, v)) = self.component(d, t) else { continue };
            let vars: Vec<usize> = (0..4).filter(|&x| t & (1 << x) != 0).collect();
            for w in &self.spans[u][v] {
                let mut col = vec![b.zero(); targets.len() * n];
                for (l, &var) in vars.iter().enumerate() {
                    let block = targets.iter().position(|&s| s == t & !(1 << var)).expect("face of a source subset");
                    for p in 0..n {
                        let mut x = b.mul(self.model.variable(var, p), w[p]).expect("checked in homology_on");
                        if l % 2 == 1 {
                            x = b.neg(x);
                        }
                        col[block * n + p] = x;
                    }
                }
                columns.push(col);
            }
        }
        if columns.is_empty() || targets.is_empty() {
            None
        } else {
            Some(Matrix::from_columns(targets.len() * n, &columns, b.zero()))
        }
    }

    fn homology_at(&self, d: (usize, usize)) -> [usize; 5] {
        let b = self.model.backend;
        let dims: [usize; 5] = std::array::from_fn(|k| self.dim(d, k));
        let mats: Vec<Option<Matrix<B::E>>> =
            (0..=5).map(|k| if (1..=4).contains(&k) { self.differential(d, k) } else { None }).collect();
        let mut rank = [0usize; 6];
        let mut exact = [true; 6];
        for k in 1..=4 {
            if let Some(m) = &mats[k] {
                (rank[k], exact[k]) = b.quick_rank(m);
            }
        }
        // `im d_(k+1) ⊆ ker d_k` and `im d_k ⊆ ker d_(k−1)` bound each rank
        // from above; a lower bound that meets the upper bound is exact.
        loop {
            let mut progress = true;
            while progress {
                progress = false;
                for k in 1..=4 {
                    if exact[k] {
                        continue;
                    }
                    let upper = (dims[k] - rank[k + 1]).min(dims[k - 1] - rank[k - 1]);
                    if rank[k] == upper {
                        exact[k] = true;
                        progress = true;
                    }
                }
            }
            let Some(k) = (1..=4).find(|&k| !exact[k]) else { break };
            let m = mats[k].as_ref().expect("inexact rank of a present matrix");
            rank[k] = b.rank_from(m, rank[k]);
            exact[k] = true;
        }
        std::array::from_fn(|k| dims[k] - rank[k] - rank[k + 1])
    }
}

fn homology_on<B: Backend>(model: &EvaluationModel<'_, B>, window: Bidegree) -> Result<KoszulReport> {
    let hilbert = model.hilbert(window.i + 1, window.j + 1, true)?;
    let spans = (0..=window.i)
        .map(|u| (0..=window.j).map(|v| model.newton_vectors(u, v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    // overflow pre-check for differential entries
    for row in &spans {
        for vecs in row {
            for w in vecs {
                for (p, &x) in w.iter().enumerate().take(model.len()) {
                    for var in 0..4 {
                        model.backend.mul(model.variable(var, p), x)?;
                    }
                }
            }
        }
    }
    let win = Window { model, hilbert, spans };
    let degrees: Vec<(usize, usize)> =
        (0..=window.i).flat_map(|i| (0..=window.j).map(move |j| (i, j))).collect();
    let homology = degrees
        .par_iter()
        .map(|&d| (Bidegree::new(d.0, d.1), win.homology_at(d)))
        .filter(|(_, h)| h.iter().any(|&x| x > 0))
        .collect();
    Ok(KoszulReport { window, homology })
}
