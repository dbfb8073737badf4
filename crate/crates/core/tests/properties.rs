use pfd_core::instances::{generate, read_points, write_points, DataFormat, FrontShape, ShapeTag};
use pfd_core::maxmin::{self, backtrack_greedy, index_bounds, Backtrack};
use pfd_core::oracle::{brute_force, dispersion_cost, dispersion_cost_all_pairs, Variant};
use pfd_core::refine::{polish, solve_hierarchic};
use pfd_core::{
    extreme_points, filter_dominated, msm, msn, sort_front, validate, DispersionParams,
    Parallelism, Point2, SortedFront,
};
use proptest::prelude::*;

const SEQ: Parallelism = Parallelism::sequential();

/// Staircase from positive steps; integer steps make distance ties common.
fn staircase(steps: &[(u8, u8)]) -> Vec<Point2> {
    let mut x = 0.0;
    let mut y: f64 = steps.iter().map(|&(_, dy)| f64::from(dy)).sum();
    let mut pts = vec![Point2::new(x, y)];
    for &(dx, dy) in steps {
        x += f64::from(dx);
        y -= f64::from(dy);
        pts.push(Point2::new(x, y));
    }
    pts
}

fn front_strategy(max_n: usize) -> impl Strategy<Value = SortedFront> {
    prop::collection::vec((1u8..6, 1u8..6), 1..max_n)
        .prop_map(|steps| sort_front(&staircase(&steps)).unwrap())
}

fn alpha_strategy() -> impl Strategy<Value = DispersionParams> {
    prop::sample::select(vec![0.5, 1.0, 2.0]).prop_map(|a| DispersionParams::new(a).unwrap())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn distance_grows_with_index_separation(f in front_strategy(30), params in alpha_strategy(), seed in any::<u64>()) {
        let n = f.len();
        prop_assume!(n >= 3);
        let i1 = (seed % n as u64) as usize % (n - 2);
        let i2 = i1 + 1 + (seed >> 20) as usize % (n - 2 - i1);
        let i3 = i2 + 1 + (seed >> 40) as usize % (n - 1 - i2);
        let d = |a, b| f.dist(a, b, params).unwrap();
        prop_assert!(d(i1, i2) < d(i1, i3));
        prop_assert!(d(i2, i3) < d(i1, i3));
        prop_assert_eq!(d(i1, i3), d(i3, i1));
        prop_assert_eq!(d(i2, i2), 0.0);
    }

    #[test]
    fn sorting_ignores_input_order(f in front_strategy(30), seed in any::<u64>()) {
        let mut shuffled = f.points().to_vec();
        let n = shuffled.len();
        let mut s = seed;
        for k in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(k, (s >> 33) as usize % (k + 1));
        }
        let again = sort_front(&shuffled).unwrap();
        prop_assert_eq!(again.points(), f.points());
        for (k, &orig) in again.original_indices().iter().enumerate() {
            prop_assert_eq!(shuffled[orig], f.point(k));
        }
        let (lo, hi) = extreme_points(&shuffled).unwrap();
        prop_assert_eq!(shuffled[lo], f.point(0));
        prop_assert_eq!(shuffled[hi], f.point(n - 1));
    }

    #[test]
    fn filtering_yields_a_valid_front(pts in prop::collection::vec((0u8..8, 0u8..8), 1..40)) {
        let pts: Vec<Point2> = pts.iter().map(|&(x, y)| Point2::new(f64::from(x), f64::from(y))).collect();
        let f = filter_dominated(&pts).unwrap();
        prop_assert!(validate(f.points()).unwrap().ok);
        for q in &pts {
            prop_assert!(f.points().iter().any(|k| k == q || k.dominates(q)));
        }
        let again = filter_dominated(f.points()).unwrap();
        prop_assert_eq!(again.points(), f.points());
        let report = validate(&pts).unwrap();
        prop_assert_eq!(report.ok, f.len() == pts.len());
    }

    #[test]
    fn dynamic_programs_match_enumeration(f in front_strategy(11), params in alpha_strategy(), p in 2usize..8) {
        prop_assume!(p <= f.len());
        let mm = maxmin::solve(&f, p, params, Backtrack::MinIndexes, SEQ).unwrap();
        let sn = msn::solve(&f, p, params, SEQ).unwrap();
        let sm = msm::solve(&f, p, params, SEQ).unwrap();
        for sel in [&mm, &sn, &sm] {
            let oracle = brute_force(&f, p, sel.variant, params, false).unwrap();
            prop_assert!(close(sel.cost, oracle.cost), "{}: {} vs {}", sel.variant, sel.cost, oracle.cost);
            prop_assert_eq!(dispersion_cost(&f, &sel.indices, sel.variant, params).unwrap(), sel.cost);
        }
    }

    #[test]
    fn consecutive_costs_equal_all_pairs_costs(f in front_strategy(12), params in alpha_strategy(), mask in any::<u16>()) {
        let n = f.len();
        let sel: Vec<usize> = (0..n).filter(|&i| i == 0 || i == n - 1 || mask >> (i % 16) & 1 == 1).collect();
        prop_assume!(sel.len() >= 2);
        for v in [Variant::MaxMin, Variant::MaxSumMin] {
            let a = dispersion_cost(&f, &sel, v, params).unwrap();
            let b = dispersion_cost_all_pairs(&f, &sel, v, params).unwrap();
            prop_assert!(close(a, b));
        }
    }

    #[test]
    fn greedy_walks_bracket_anchored_optima(f in front_strategy(12), p in 2usize..7) {
        let params = DispersionParams::default();
        prop_assume!(p <= f.len());
        let (opt, _) = maxmin::optimal_value(&f, p, params, SEQ).unwrap();
        let bounds = index_bounds(&f, p, opt, params).unwrap();
        for dir in [Backtrack::MinIndexes, Backtrack::MaxIndexes] {
            let s = backtrack_greedy(&f, p, opt, params, dir).unwrap();
            prop_assert_eq!(dispersion_cost(&f, &s, Variant::MaxMin, params).unwrap(), opt);
        }
        let (_, optima) = pfd_core::oracle::optimal_selections(&f, p, Variant::MaxMin, params, true, 0.0).unwrap();
        for s in optima {
            for ((lo, hi), x) in bounds.lower.iter().zip(&bounds.upper).zip(&s) {
                prop_assert!(lo <= x && x <= hi);
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_results(seed in any::<u64>(), p in 2usize..9) {
        let f = generate(FrontShape::new(ShapeTag::Staircase, 300, seed)).unwrap();
        let params = DispersionParams::default();
        let par = Parallelism::threads(3);
        prop_assert_eq!(
            maxmin::solve(&f, p, params, Backtrack::MinIndexes, SEQ).unwrap(),
            maxmin::solve(&f, p, params, Backtrack::MinIndexes, par).unwrap()
        );
        prop_assert_eq!(msn::solve(&f, p, params, SEQ).unwrap(), msn::solve(&f, p, params, par).unwrap());
        let g = generate(FrontShape::new(ShapeTag::Staircase, 40, seed)).unwrap();
        prop_assert_eq!(msm::solve_dp(&g, p, params, SEQ).unwrap(), msm::solve_dp(&g, p, params, par).unwrap());
    }

    #[test]
    fn hierarchic_and_polish_keep_the_maxmin_value(f in front_strategy(40), p in 2usize..8) {
        let params = DispersionParams::default();
        prop_assume!(p <= f.len());
        let dp = maxmin::solve(&f, p, params, Backtrack::MinIndexes, SEQ).unwrap();
        let h = solve_hierarchic(&f, p, params, SEQ).unwrap();
        prop_assert!(h.cost <= dp.cost && h.cost >= dp.cost * (1.0 - 1e-12));
        let greedy_msn = dispersion_cost(&f, &dp.indices, Variant::MaxSumNeighbor, params).unwrap();
        prop_assert!(h.secondary_cost.unwrap() >= greedy_msn * (1.0 - 1e-12));
        let out = polish(&f, &dp.indices, params).unwrap();
        prop_assert!(out.maxmin_after >= out.maxmin_before);
        prop_assert_eq!(polish(&f, &out.indices, params).unwrap().indices, out.indices);
    }

    #[test]
    fn points_survive_a_csv_round_trip(tag in prop::sample::select(ShapeTag::ALL.to_vec()), n in 1usize..200, seed in any::<u64>()) {
        let f = generate(FrontShape::new(tag, n, seed)).unwrap();
        prop_assert!(validate(f.points()).unwrap().ok);
        let back = read_points(write_points(f.points()).as_bytes(), DataFormat::Csv).unwrap();
        prop_assert_eq!(back, f.points());
    }
}

#[test]
fn generators_hold_at_a_million_points() {
    for tag in ShapeTag::ALL {
        let f = generate(FrontShape::new(tag, 1_000_000, 5)).unwrap();
        assert_eq!(f.len(), 1_000_000);
        assert!(validate(f.points()).unwrap().ok, "{tag}");
    }
}

#[test]
fn collinear_fronts_make_every_anchored_selection_msn_optimal() {
    let params = DispersionParams::default();
    for seed in 0..20 {
        let f = generate(FrontShape::new(ShapeTag::Affine, 9, seed)).unwrap();
        let best = msn::solve(&f, 4, params, SEQ).unwrap().cost;
        for a in 1..7 {
            for b in a + 1..8 {
                let c =
                    dispersion_cost(&f, &[0, a, b, 8], Variant::MaxSumNeighbor, params).unwrap();
                assert!(close(c, best));
            }
        }
    }
}
