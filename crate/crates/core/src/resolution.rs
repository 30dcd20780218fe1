//! Bigraded minimal free resolutions of ACM configurations and of the
//! schemes obtained from them by removing non-collinear interior points.
//!
//! A resolution of the ideal sheaf has the shape
//!
//! ```text
//! 0 → ⊕ O(−beta2) → ⊕ O(−beta1) → ⊕ O(−beta0) → I → 0
//! ```
//!
//! and is recorded by its three multisets of twists.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Bidegree, Line, PointGrid, PointKind};
use crate::hilbert::{DeltaMatrix, HilbertMatrix};

/// A multiset of bidegrees.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Shifts(BTreeMap<Bidegree, usize>);

impl Shifts {
    pub fn new() -> Self {
        Shifts::default()
    }

    pub fn add(&mut self, d: Bidegree, multiplicity: usize) {
        if multiplicity > 0 {
            *self.0.entry(d).or_default() += multiplicity;
        }
    }

    pub fn multiplicity(&self, d: Bidegree) -> usize {
        self.0.get(&d).copied().unwrap_or(0)
    }

    pub fn contains(&self, d: Bidegree) -> bool {
        self.0.contains_key(&d)
    }

    /// Total rank, counting multiplicity.
    pub fn rank(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries with multiplicity, first degree descending then second
    /// ascending.
    pub fn entries(&self) -> Vec<(Bidegree, usize)> {
        let mut v: Vec<_> = self.0.iter().map(|(&d, &m)| (d, m)).collect();
        v.sort_by(|(a, _), (b, _)| b.i.cmp(&a.i).then(a.j.cmp(&b.j)));
        v
    }

    pub fn degrees(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.0.keys().copied()
    }
}

impl FromIterator<Bidegree> for Shifts {
    fn from_iter<T: IntoIterator<Item = Bidegree>>(iter: T) -> Self {
        let mut s = Shifts::new();
        for d in iter {
            s.add(d, 1);
        }
        s
    }
}

impl FromIterator<(Bidegree, usize)> for Shifts {
    fn from_iter<T: IntoIterator<Item = (Bidegree, usize)>>(iter: T) -> Self {
        let mut s = Shifts::new();
        for (d, m) in iter {
            s.add(d, m);
        }
        s
    }
}

impl fmt::Display for Shifts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .entries()
            .into_iter()
            .map(|(d, m)| {
                if m == 1 {
                    twist(d)
                } else {
                    format!("{}^{m}", twist(d))
                }
            })
            .collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// `O(-p,-q)`, with zero written unsigned.
pub(crate) fn twist(d: Bidegree) -> String {
    let part = |v: usize| if v == 0 { "0".to_string() } else { format!("-{v}") };
    format!("O({},{})", part(d.i), part(d.j))
}

/// Twists of a minimal free resolution: generators, first syzygies and
/// second syzygies of the ideal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BettiTable {
    pub beta0: Shifts,
    pub beta1: Shifts,
    pub beta2: Shifts,
}

/// `dim S_(u,v) = (u+1)(v+1)`, zero for negative degrees.
fn form_count(i: isize, j: isize) -> i64 {
    if i < 0 || j < 0 {
        0
    } else {
        ((i + 1) * (j + 1)) as i64
    }
}

impl BettiTable {
    pub fn levels(&self) -> [&Shifts; 3] {
        [&self.beta0, &self.beta1, &self.beta2]
    }

    /// `|beta0| − |beta1| + |beta2|`; 1 for the ideal of a nonempty scheme.
    pub fn rank_alternation(&self) -> i64 {
        self.beta0.rank() as i64 - self.beta1.rank() as i64 + self.beta2.rank() as i64
    }

    /// The Hilbert function predicted by the resolution's Euler
    /// characteristic, over a `rows × cols` window.
    pub fn hilbert_function(&self, rows: usize, cols: usize) -> HilbertMatrix {
        let mut rows_out = Vec::with_capacity(rows);
        for i in 0..rows as isize {
            let mut row = Vec::with_capacity(cols);
            for j in 0..cols as isize {
                let mut v = form_count(i, j);
                for (sign, level) in [(-1, &self.beta0), (1, &self.beta1), (-1, &self.beta2)] {
                    for (d, m) in level.entries() {
                        v += sign * m as i64 * form_count(i - d.i as isize, j - d.j as isize);
                    }
                }
                row.push(v);
            }
            rows_out.push(row);
        }
        HilbertMatrix::from_rows(rows_out).expect("non-empty window")
    }

    /// Compares the Euler characteristic against `m` on `m`'s window.
    pub fn is_hilbert_consistent(&self, m: &HilbertMatrix) -> bool {
        self.hilbert_function(m.rows(), m.cols()) == *m
    }

    /// Degrees appearing in two consecutive levels; a minimal resolution
    /// built by the mapping cone never produces such a pair.
    pub fn cancellable_pairs(&self) -> Vec<(usize, Bidegree)> {
        let mut out = Vec::new();
        for (k, (lo, hi)) in [(&self.beta0, &self.beta1), (&self.beta1, &self.beta2)].into_iter().enumerate() {
            for d in lo.degrees() {
                if hi.contains(d) {
                    out.push((k, d));
                }
            }
        }
        out
    }

    /// Per-level multiset differences `self − other` and `other − self`.
    pub fn diff(&self, other: &BettiTable) -> Vec<BettiDifference> {
        let mut out = Vec::new();
        for (level, (a, b)) in self.levels().into_iter().zip(other.levels()).enumerate() {
            let degrees: std::collections::BTreeSet<_> = a.degrees().chain(b.degrees()).collect();
            for d in degrees {
                let (ma, mb) = (a.multiplicity(d), b.multiplicity(d));
                if ma != mb {
                    out.push(BettiDifference { level, degree: d, left: ma, right: mb });
                }
            }
        }
        out
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "beta2: {}", self.beta2)?;
        writeln!(f, "beta1: {}", self.beta1)?;
        writeln!(f, "beta0: {}", self.beta0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiDifference {
    pub level: usize,
    pub degree: Bidegree,
    pub left: usize,
    pub right: usize,
}

impl fmt::Display for BettiDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta{} at {}: {} vs {}", self.level, self.degree, self.left, self.right)
    }
}

/// A split curve separating `point` from the rest of a scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub point: (usize, usize),
    pub degree: Bidegree,
    pub lines: Vec<Line>,
}

impl Separator {
    /// Checks the combinatorial invariants against `scheme` (which must not
    /// contain the separated point): the degree counts the lines, no line
    /// passes through the point, every point of `scheme` is on some line.
    pub fn check(&self, scheme: &PointGrid) -> std::result::Result<(), String> {
        let rows = self.lines.iter().filter(|l| matches!(l, Line::Row(_))).count();
        let cols = self.lines.len() - rows;
        if Bidegree::new(rows, cols) != self.degree {
            return Err(format!("degree {} but {rows} rows and {cols} columns", self.degree));
        }
        let (h, k) = self.point;
        if let Some(line) = self.lines.iter().find(|l| **l == Line::Row(h) || **l == Line::Col(k)) {
            return Err(format!("{line} passes through the separated point"));
        }
        for (i, j) in scheme.points() {
            if (i, j) == self.point {
                return Err("scheme still contains the separated point".into());
            }
            if !self.lines.contains(&Line::Row(i)) && !self.lines.contains(&Line::Col(j)) {
                return Err(format!("P_{{{i},{j}}} is not covered"));
            }
        }
        Ok(())
    }
}

/// Rows through the other points of the column of `(h,k)` and columns
/// through the other points of its row.
fn split_separator(grid: &PointGrid, (h, k): (usize, usize)) -> Separator {
    let rows: Vec<Line> = (0..grid.rows())
        .filter(|&i| i != h && grid.contains(i, k))
        .map(Line::Row)
        .collect();
    let cols: Vec<Line> = (0..grid.cols())
        .filter(|&j| j != k && grid.contains(h, j))
        .map(Line::Col)
        .collect();
    Separator {
        point: (h, k),
        degree: Bidegree::new(rows.len(), cols.len()),
        lines: rows.into_iter().chain(cols).collect(),
    }
}

/// The split separator of a point: rows through the other points of its
/// column and columns through the other points of its row. On an ACM
/// configuration it has the minimal separating degree. Fails when these lines
/// miss some other point of the scheme.
pub fn separator_for(grid: &PointGrid, point: (usize, usize)) -> Result<Separator> {
    grid.ensure_scheme()?;
    if !grid.contains(point.0, point.1) {
        return Err(Error::PointNotInScheme(point.0, point.1));
    }
    let sep = split_separator(grid, point);
    let rest = grid.without(point.0, point.1)?;
    sep.check(&rest)
        .map_err(|reason| Error::SeparatorInvariant { point, reason })?;
    Ok(sep)
}

pub fn acm_resolution(grid: &PointGrid) -> Result<BettiTable> {
    let (corners, vertices) = grid.corners_and_vertices()?;
    Ok(BettiTable {
        beta0: corners.into_iter().collect(),
        beta1: vertices.into_iter().collect(),
        beta2: Shifts::new(),
    })
}

/// Outcome of the two degree conditions for removing a point with unique
/// minimal separating degree `degree` from a scheme resolved by a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub degree: Bidegree,
    /// No generator degree lies strictly above `degree` in both components.
    pub generators_ok: bool,
    /// `degree + (1,1)` is not a first-syzygy degree.
    pub syzygies_ok: bool,
    pub blocking_generators: Vec<Bidegree>,
    pub blocking_syzygies: Vec<Bidegree>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.generators_ok && self.syzygies_ok
    }
}

pub fn check_mapping_cone_conditions(current: &BettiTable, r: usize, s: usize) -> ConditionReport {
    let degree = Bidegree::new(r, s);
    let blocking_generators: Vec<_> = current
        .beta0
        .degrees()
        .filter(|&g| degree.strictly_below(g))
        .collect();
    let blocking_syzygies: Vec<_> = current
        .beta1
        .degrees()
        .filter(|&g| g == degree.shift(1, 1))
        .collect();
    ConditionReport {
        degree,
        generators_ok: blocking_generators.is_empty(),
        syzygies_ok: blocking_syzygies.is_empty(),
        blocking_generators,
        blocking_syzygies,
    }
}

/// Interior points to delete from an ACM configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalPlan {
    points: Vec<(usize, usize)>,
}

impl RemovalPlan {
    pub fn new(points: Vec<(usize, usize)>) -> Self {
        RemovalPlan { points }
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rejects plans reusing a row or a column.
    pub fn check_non_collinear(&self) -> Result<()> {
        for (a, &p) in self.points.iter().enumerate() {
            for &q in &self.points[a + 1..] {
                let line = if p.0 == q.0 {
                    Some(Line::Row(p.0))
                } else if p.1 == q.1 {
                    Some(Line::Col(p.1))
                } else {
                    None
                };
                if let Some(line) = line {
                    return Err(Error::CollinearRemoval { first: p, second: q, line });
                }
            }
        }
        Ok(())
    }

    /// `(q_l, p_l)` for each point, in plan order.
    pub fn degrees(&self, grid: &PointGrid) -> Vec<Bidegree> {
        self.points
            .iter()
            .map(|&(i, j)| Bidegree::new(grid.col_count(j) - 1, grid.row_count(i) - 1))
            .collect()
    }

    /// `r_ij`: how many plan points have separating degree `(i,j)`.
    pub fn multiplicities(&self, grid: &PointGrid) -> Shifts {
        self.degrees(grid).into_iter().collect()
    }
}

/// One removal step: the point, its split separator, and the certified
/// degree conditions against the table of the scheme before the step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalStep {
    pub point: (usize, usize),
    pub conditions: ConditionReport,
    pub separator: Separator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removal {
    pub scheme: PointGrid,
    pub table: BettiTable,
    pub steps: Vec<RemovalStep>,
    pub hilbert: HilbertMatrix,
}

impl Removal {
    pub fn separators(&self) -> Vec<Separator> {
        self.steps.iter().map(|s| s.separator.clone()).collect()
    }
}

/// Removes the plan's points one at a time, extending the resolution by the
/// mapping cone of each split separator. Every step re-checks the degree
/// conditions, the separator invariants and the Hilbert function drop.
pub fn remove_points(grid: &PointGrid, plan: &RemovalPlan) -> Result<Removal> {
    grid.acm_normal_form()?;
    for &(i, j) in plan.points() {
        if !grid.contains(i, j) {
            return Err(Error::PointNotInScheme(i, j));
        }
    }
    plan.check_non_collinear()?;
    let classes = grid.classify_points()?;
    for &p in plan.points() {
        let class = classes.iter().find(|c| c.position == p).expect("point of the grid");
        if class.kind != PointKind::Interior {
            return Err(Error::NotInterior(p.0, p.1));
        }
    }

    let mut ordered: Vec<((usize, usize), Bidegree)> =
        plan.points().iter().copied().zip(plan.degrees(grid)).collect();
    ordered.sort_by_key(|&(_, d)| d);

    let mut table = acm_resolution(grid)?;
    let mut hilbert = crate::hilbert::hilbert_acm(grid)?;
    let mut scheme = grid.clone();
    let mut steps = Vec::with_capacity(ordered.len());
    for (point, degree) in ordered {
        let conditions = check_mapping_cone_conditions(&table, degree.i, degree.j);
        if !conditions.holds() {
            return Err(Error::MappingCone { point, degree });
        }
        let separator = split_separator(&scheme, point);
        scheme = scheme.without(point.0, point.1)?;
        if separator.degree != degree {
            return Err(Error::SeparatorInvariant {
                point,
                reason: format!("degree {} differs from {}", separator.degree, degree),
            });
        }
        separator
            .check(&scheme)
            .map_err(|reason| Error::SeparatorInvariant { point, reason })?;
        hilbert = hilbert.puncture(degree)?;

        table.beta0.add(degree, 1);
        table.beta1.add(degree.shift(1, 0), 1);
        table.beta1.add(degree.shift(0, 1), 1);
        table.beta2.add(degree.shift(1, 1), 1);
        steps.push(RemovalStep { point, conditions, separator });
    }
    Ok(Removal { scheme, table, steps, hilbert })
}

fn neg(x: i64) -> usize {
    if x < 0 {
        (-x) as usize
    } else {
        0
    }
}

/// Betti table read off a first difference by the corner/vertex rules plus
/// the negative entries:
///
/// * generators at `(i,j)`: `[corner] + neg(c_ij)`
/// * first syzygies: `[vertex] + neg(c_{i,j−1}) + neg(c_{i−1,j})`
/// * second syzygies: `neg(c_{i−1,j−1})`
///
/// Valid for ACM schemes and for removals of non-collinear interior points.
/// Never fails; outside that class the prediction can be wrong.
pub fn betti_from_delta(d: &DeltaMatrix) -> BettiTable {
    let mut table = BettiTable::default();
    for i in 0..=d.rows() as isize + 1 {
        for j in 0..=d.cols() as isize + 1 {
            let at = Bidegree::new(i as usize, j as usize);
            let corner = usize::from(d.is_corner(i, j));
            let vertex = usize::from(d.is_vertex(i, j));
            table.beta0.add(at, corner + neg(d.get(i, j)));
            table.beta1.add(at, vertex + neg(d.get(i, j - 1)) + neg(d.get(i - 1, j)));
            table.beta2.add(at, neg(d.get(i - 1, j - 1)));
        }
    }
    table
}
