use biproj_core::formats::{BettiFile, ConfigurationFile, Source};
use biproj_core::oracle::{
    betti_oracle, generator_count_oracle, hilbert_oracle, koszul_homology, separating_degree_oracle, verify_separator,
    ExactField, DEFAULT_PRIME,
};
use biproj_core::{
    acm_resolution, betti_from_delta, check_mapping_cone_conditions, hilbert_acm, remove_points, sample, Bidegree,
    DeltaMatrix, HilbertMatrix, PointGrid, PointKind, RemovalPlan, SeparatingDegree,
};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn staircase_strategy() -> impl Strategy<Value = PointGrid> {
    any::<u64>().prop_map(|s| sample::staircase(&mut rng(s), 6, 6))
}

fn small_grid_strategy() -> impl Strategy<Value = PointGrid> {
    (any::<u64>(), 0.3f64..0.9).prop_map(|(s, density)| sample::configuration(&mut rng(s), 4, 4, density))
}

fn permuted(grid: &PointGrid, seed: u64) -> (PointGrid, Vec<usize>, Vec<usize>) {
    let mut r = rng(seed);
    let mut rp: Vec<usize> = (0..grid.rows()).collect();
    let mut cp: Vec<usize> = (0..grid.cols()).collect();
    rp.shuffle(&mut r);
    cp.shuffle(&mut r);
    let points: Vec<(usize, usize)> = grid.points().into_iter().map(|(i, j)| (rp[i], cp[j])).collect();
    (PointGrid::from_points(grid.rows(), grid.cols(), &points).unwrap(), rp, cp)
}

fn full_window(grid: &PointGrid) -> Bidegree {
    Bidegree::new(grid.rows(), grid.cols())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(g in staircase_strategy(), seed in any::<u64>()) {
        let (p, _, _) = permuted(&g, seed);
        let once = p.normalize();
        let twice = once.grid.normalize();
        prop_assert!(twice.is_identity());
        prop_assert!(once.grid.is_staircase());
    }

    #[test]
    fn classification_is_permutation_invariant(g in staircase_strategy(), seed in any::<u64>()) {
        let (p, rp, cp) = permuted(&g, seed);
        let base = g.classify_points().unwrap();
        let moved = p.classify_points().unwrap();
        for c in base {
            let image = (rp[c.position.0], cp[c.position.1]);
            let m = moved.iter().find(|m| m.position == image).unwrap();
            prop_assert_eq!(m.kind, c.kind);
        }
    }

    #[test]
    fn staircase_has_one_more_corner_than_vertices(g in staircase_strategy()) {
        let (corners, vertices) = g.corners_and_vertices().unwrap();
        prop_assert_eq!(corners.len(), vertices.len() + 1);
    }

    #[test]
    fn point_kind_matches_vertex_and_delta(g in staircase_strategy()) {
        let (_, vertices) = g.corners_and_vertices().unwrap();
        let d = hilbert_acm(&g).unwrap().delta();
        for c in g.classify_points().unwrap() {
            let (q, p) = (c.col_count - 1, c.row_count - 1);
            let is_vertex = vertices.contains(&Bidegree::new(q + 1, p + 1));
            let entry = d.get(q as isize, p as isize);
            match c.kind {
                PointKind::Interior => prop_assert!(!is_vertex && entry == 0),
                PointKind::Boundary => prop_assert!(is_vertex && entry == 1),
            }
            let rest = g.without(c.position.0, c.position.1).unwrap();
            prop_assert_eq!(rest.is_acm(), c.kind == PointKind::Boundary);
        }
    }

    #[test]
    fn delta_and_accumulate_are_inverse(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..6)) {
        let d = DeltaMatrix::from_rows(rows.clone()).unwrap();
        prop_assert_eq!(d.accumulate().delta(), d.clone());
        let m = HilbertMatrix::from_rows(rows).unwrap();
        prop_assert_eq!(m.delta().accumulate(), m);
    }

    #[test]
    fn delta_is_a_difference_of_differences(g in small_grid_strategy()) {
        let m = hilbert_oracle(&g, ExactField::Rationals, full_window(&g)).unwrap();
        let d = m.delta();
        for i in 0..m.rows() as isize {
            for j in 0..m.cols() as isize {
                let c = d.get(i, j);
                prop_assert_eq!(c, m.row_difference(i, j) - m.row_difference(i - 1, j));
                prop_assert_eq!(c, m.col_difference(i, j) - m.col_difference(i, j - 1));
            }
        }
    }

    #[test]
    fn acm_iff_delta_non_negative(g in small_grid_strategy()) {
        let m = hilbert_oracle(&g, ExactField::Rationals, full_window(&g)).unwrap();
        let non_negative = m.delta().to_rows().iter().flatten().all(|&c| c >= 0);
        prop_assert_eq!(non_negative, g.is_acm());
        prop_assert!(m.delta().check_t0().passes());
        if g.is_acm() {
            prop_assert_eq!(hilbert_acm(&g).unwrap(), m.clone().extended(g.rows() + 1, g.cols() + 1));
        }
    }

    #[test]
    fn hilbert_oracle_is_field_and_permutation_independent(g in small_grid_strategy(), seed in any::<u64>()) {
        let w = full_window(&g);
        let q = hilbert_oracle(&g, ExactField::Rationals, w).unwrap();
        prop_assert_eq!(&hilbert_oracle(&g, ExactField::Prime(DEFAULT_PRIME), w).unwrap(), &q);
        let (p, _, _) = permuted(&g, seed);
        prop_assert_eq!(&hilbert_oracle(&p, ExactField::Rationals, w).unwrap(), &q);

        let mut r = rng(seed);
        let params = |n: usize, r: &mut StdRng| -> Vec<Rational64> {
            let mut vals: Vec<Rational64> = Vec::new();
            while vals.len() < n {
                let t = Rational64::new(rand::Rng::random_range(r, -20..20), rand::Rng::random_range(r, 1..6));
                if !vals.contains(&t) {
                    vals.push(t);
                }
            }
            vals
        };
        let rows = params(g.rows(), &mut r);
        let cols = params(g.cols(), &mut r);
        let moved = g.clone().with_params(rows, cols).unwrap();
        prop_assert_eq!(&hilbert_oracle(&moved, ExactField::Rationals, w).unwrap(), &q);
    }

    #[test]
    fn removal_routes_agree(g in staircase_strategy(), seed in any::<u64>()) {
        let plan = sample::removal_plan(&mut rng(seed), &g, 4);
        let removal = remove_points(&g, &plan).unwrap();
        prop_assert_eq!(betti_from_delta(&removal.hilbert.delta()), removal.table.clone());
        prop_assert!(removal.table.is_hilbert_consistent(&removal.hilbert));
        prop_assert_eq!(removal.table.rank_alternation(), 1);
        prop_assert!(removal.hilbert.delta().check_t0().passes());

        let mut shuffled = plan.points().to_vec();
        shuffled.shuffle(&mut rng(seed ^ 1));
        let again = remove_points(&g, &RemovalPlan::new(shuffled)).unwrap();
        prop_assert_eq!(again.table, removal.table);
    }

    #[test]
    fn interior_points_satisfy_the_degree_conditions(g in staircase_strategy()) {
        let table = acm_resolution(&g).unwrap();
        for c in g.classify_points().unwrap() {
            if c.kind == PointKind::Interior {
                let (q, p) = (c.col_count - 1, c.row_count - 1);
                prop_assert!(check_mapping_cone_conditions(&table, q, p).holds());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_is_consistent_on_arbitrary_grids(g in small_grid_strategy()) {
        let report = koszul_homology(&g, ExactField::Rationals).unwrap();
        let table = report.betti_table();
        let m = hilbert_oracle(&g, ExactField::Rationals, report.window).unwrap();
        prop_assert!(table.is_hilbert_consistent(&m));
        prop_assert_eq!(table.rank_alternation(), 1);
        prop_assert!(report.tor4_support().is_empty());
        prop_assert!(report.h0_is_residue_field());
        prop_assert_eq!(&betti_oracle(&g, ExactField::Prime(DEFAULT_PRIME)).unwrap(), &table);
    }

    #[test]
    fn generator_counts_match_koszul(g in small_grid_strategy()) {
        let table = betti_oracle(&g, ExactField::Rationals).unwrap();
        for i in 0..=g.rows() + 1 {
            for j in 0..=g.cols() + 1 {
                let d = Bidegree::new(i, j);
                prop_assert_eq!(
                    generator_count_oracle(&g, ExactField::Rationals, d).unwrap(),
                    table.beta0.multiplicity(d),
                    "degree {}", d
                );
            }
        }
    }

    #[test]
    fn separators_vanish_where_they_should(g in staircase_strategy(), seed in any::<u64>()) {
        let plan = sample::removal_plan(&mut rng(seed), &g, 4);
        let removal = remove_points(&g, &plan).unwrap();
        let mut scheme = g.clone();
        for step in &removal.steps {
            let expected = separating_degree_oracle(&scheme, step.point, ExactField::Prime(DEFAULT_PRIME)).unwrap();
            prop_assert_eq!(expected, SeparatingDegree::Unique(step.separator.degree));
            scheme = scheme.without(step.point.0, step.point.1).unwrap();
            prop_assert!(verify_separator(&step.separator, &scheme, step.point, ExactField::Rationals).unwrap());
        }
    }

    #[test]
    fn file_formats_round_trip(g in staircase_strategy(), seed in any::<u64>()) {
        let cfg = ConfigurationFile::from_grid(&g, Some("random".into()));
        let parsed = ConfigurationFile::parse(&cfg.to_json()).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_grid().unwrap(), g.clone());

        let plan = sample::removal_plan(&mut rng(seed), &g, 4);
        let removal = remove_points(&g, &plan).unwrap();
        let file = BettiFile::new(&removal.table, Source::Removal).with_conditions(&removal.steps);
        prop_assert_eq!(&BettiFile::parse(&file.to_json()).unwrap(), &file);
        let text = BettiFile::parse_text(&file.to_text().unwrap()).unwrap();
        prop_assert_eq!(text.table().unwrap(), removal.table);
    }
}
