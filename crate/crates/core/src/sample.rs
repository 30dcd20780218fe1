//! Seeded random configurations for property tests and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::grid::{PointGrid, PointKind};
use crate::resolution::{remove_points, RemovalPlan};

/// A staircase with at most `max_a + 1` rows and `max_b + 1` columns,
/// row lengths non-increasing.
pub fn staircase<R: Rng>(rng: &mut R, max_a: usize, max_b: usize) -> PointGrid {
    let rows = rng.random_range(1..=max_a + 1);
    let cols = rng.random_range(1..=max_b + 1);
    let mut lengths = vec![cols];
    for _ in 1..rows {
        let prev = *lengths.last().expect("non-empty");
        lengths.push(rng.random_range(1..=prev));
    }
    PointGrid::staircase(&lengths).expect("lengths are positive and non-increasing")
}

/// The same configuration with rows and columns relabelled at random.
pub fn shuffled<R: Rng>(rng: &mut R, grid: &PointGrid) -> PointGrid {
    let mut rp: Vec<usize> = (0..grid.rows()).collect();
    let mut cp: Vec<usize> = (0..grid.cols()).collect();
    rp.shuffle(rng);
    cp.shuffle(rng);
    let points: Vec<(usize, usize)> = grid.points().into_iter().map(|(i, j)| (rp[i], cp[j])).collect();
    PointGrid::from_points(grid.rows(), grid.cols(), &points).expect("permuted points stay in range")
}

/// An arbitrary configuration without empty lines.
pub fn configuration<R: Rng>(rng: &mut R, max_rows: usize, max_cols: usize, density: f64) -> PointGrid {
    loop {
        let rows = rng.random_range(1..=max_rows);
        let cols = rng.random_range(1..=max_cols);
        let points: Vec<(usize, usize)> = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(density))
            .collect();
        let grid = PointGrid::from_points(rows, cols, &points).expect("points in range");
        if grid.validate().is_valid() {
            return grid;
        }
    }
}

/// A removal plan of at most `max_points` interior points accepted by
/// [`remove_points`], built greedily from a random order of the interior
/// points. Empty when the grid has no interior point.
pub fn removal_plan<R: Rng>(rng: &mut R, grid: &PointGrid, max_points: usize) -> RemovalPlan {
    let mut interior: Vec<(usize, usize)> = grid
        .classify_points()
        .expect("ACM grid")
        .into_iter()
        .filter(|c| c.kind == PointKind::Interior)
        .map(|c| c.position)
        .collect();
    interior.shuffle(rng);
    let target = rng.random_range(1..=max_points.max(1));
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for p in interior {
        if chosen.len() == target {
            break;
        }
        let mut candidate = chosen.clone();
        candidate.push(p);
        if remove_points(grid, &RemovalPlan::new(candidate.clone())).is_ok() {
            chosen = candidate;
        }
    }
    RemovalPlan::new(chosen)
}
