mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ss2d_denoise::geometry::{
    dilate, intersect, minkowski_sum, sector_to_polygon, ConvexRegion, Point2, Sector,
};
use ss2d_denoise::noise::{distance_interval, quantize_distance, QuantizerParams, VelocityNoise};
use ss2d_denoise::simulator::{
    accuracy_benchmark, run_scenario, MotionModel, ObjectSpec, ScanPolicy, ScenarioConfig,
};
use ss2d_denoise::tracker::{
    build_max_move_table, init_belief, predict_ball, predict_player, update, BallParams, Belief,
    ObjectKind, PlayerTypeSpec,
};

fn convex_strategy() -> impl Strategy<Value = ConvexRegion> {
    (any::<u64>(), 3usize..12)
        .prop_map(|(seed, n)| common::random_convex(&mut ChaCha8Rng::seed_from_u64(seed), 2.0, n))
}

fn sector_strategy() -> impl Strategy<Value = Sector> {
    any::<u64>().prop_map(|seed| common::random_sector(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Random point of a polygon as a convex combination of its vertices.
fn sample_in<R: Rng>(r: &ConvexRegion, rng: &mut R) -> Point2 {
    let w: Vec<f64> = r.vertices().iter().map(|_| rng.gen::<f64>()).collect();
    let total: f64 = w.iter().sum();
    r.vertices()
        .iter()
        .zip(&w)
        .fold(Point2::ORIGIN, |acc, (&v, &wi)| acc + v * (wi / total))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intersection_never_exceeds_inputs(a in convex_strategy(), b in convex_strategy(), seed in any::<u64>()) {
        let c = intersect(&a, &b);
        prop_assert!(c.area() <= a.area().min(b.area()) + 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if !c.is_empty() {
            for _ in 0..50 {
                let p = sample_in(&c, &mut rng);
                prop_assert!(a.contains(p) && b.contains(p));
            }
        }
        let (lo, hi) = common::bbox(a.vertices());
        for _ in 0..200 {
            let p = Point2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
            if common::inside_ccw(a.vertices(), p) && common::inside_ccw(b.vertices(), p) {
                prop_assert!(c.contains(p));
            }
        }
    }

    #[test]
    fn sector_polygon_covers_wedge(s in sector_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in [1, 2, 4, 8] {
            let poly = sector_to_polygon(&s, k).unwrap();
            prop_assert!(poly.area() >= s.exact_area() * (1.0 - 1e-9));
            for _ in 0..100 {
                let p = common::sample_wedge(&s, &mut rng);
                prop_assert!(poly.contains(p), "k={} p={:?}", k, p);
            }
        }
    }

    #[test]
    fn finer_sector_polygons_are_tighter(s in sector_strategy()) {
        let areas: Vec<f64> = [1, 2, 4, 8]
            .iter()
            .map(|&k| sector_to_polygon(&s, k).unwrap().area())
            .collect();
        prop_assert!(areas.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{:?}", areas);
    }

    #[test]
    fn quantizer_is_monotone_and_invertible(d1 in 0.0f64..80.0, d2 in 0.0f64..80.0) {
        let q = QuantizerParams::default();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (qlo, qhi) = (quantize_distance(lo, &q).unwrap(), quantize_distance(hi, &q).unwrap());
        prop_assert!(qlo <= qhi);
        for (d, dq) in [(lo, qlo), (hi, qhi)] {
            let (a, b) = distance_interval(dq, &q).unwrap();
            prop_assert!(a <= d && d <= b, "{} not in [{}, {}]", d, a, b);
        }
    }

    #[test]
    fn dilation_grows_monotonically(a in convex_strategy(), r1 in 0.0f64..3.0, r2 in 0.0f64..3.0, seed in any::<u64>()) {
        let (small, large) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let ds = dilate(&a, small, 8).unwrap();
        let dl = dilate(&a, large, 8).unwrap();
        prop_assert!(a.area() <= ds.area() + 1e-9);
        prop_assert!(ds.area() <= dl.area() + 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let p = sample_in(&a, &mut rng);
            let q = p + Point2::polar(small * rng.gen::<f64>(), rng.gen_range(-3.2..3.2));
            prop_assert!(ds.contains(q) && dl.contains(q));
        }
    }

    #[test]
    fn minkowski_sum_contains_pairwise_sums(a in convex_strategy(), b in convex_strategy(), seed in any::<u64>()) {
        let m = minkowski_sum(&a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let p = sample_in(&a, &mut rng) + sample_in(&b, &mut rng);
            prop_assert!(m.contains(p));
        }
        prop_assert!(m.area() >= a.area().max(b.area()) - 1e-9);
    }
}

fn player_stress_suite() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default_suite();
    cfg.cycles = 400;
    cfg.observer.scan_policy = ScanPolicy::TrackObject { id: 1 };
    for obj in &mut cfg.objects {
        if let ObjectSpec::Player { motion, .. } = obj {
            *motion = MotionModel::RandomWalk { max_step: 1.05 };
        }
    }
    cfg
}

#[test]
fn tracker_is_sound_over_long_runs() {
    let base = player_stress_suite();
    let rows: usize = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = ScenarioConfig {
                seed: 1000 + seed,
                ..base.clone()
            };
            let report = run_scenario(&cfg).unwrap();
            for r in &report.rows {
                assert!(
                    r.sound,
                    "seed {} cycle {} object {}",
                    r.seed, r.cycle, r.object_id
                );
                assert!(
                    !r.was_reset,
                    "seed {} cycle {} object {}",
                    r.seed, r.cycle, r.object_id
                );
            }
            report.rows.len()
        })
        .sum();
    assert!(rows >= 100_000, "{rows}");
}

fn ball_belief(rng: &mut ChaCha8Rng) -> Belief {
    let s = common::random_sector(rng);
    let reading = ss2d_denoise::noise::VelocityReading {
        speed: rng.gen_range(0.0..3.0),
        direction: rng.gen_range(-3.0..3.0),
    };
    init_belief(
        ObjectKind::Ball,
        &s,
        Some(&reading),
        &VelocityNoise::default(),
    )
    .unwrap()
}

#[test]
fn predict_grows_and_update_refines() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let table = build_max_move_table(&PlayerTypeSpec::DEFAULT, 10).unwrap();
    let noise = VelocityNoise::default();
    for i in 0..500 {
        let prior = if i % 2 == 0 {
            ball_belief(&mut rng)
        } else {
            let s = common::random_sector(&mut rng);
            init_belief(ObjectKind::Player { type_id: 0 }, &s, None, &noise).unwrap()
        };
        let predicted = match prior.kind {
            ObjectKind::Ball => predict_ball(&prior, &BallParams::default()).unwrap(),
            ObjectKind::Player { .. } => predict_player(&prior, &table).unwrap(),
        };
        if prior.kind == (ObjectKind::Player { type_id: 0 }) {
            for _ in 0..20 {
                let p = sample_in(&prior.region, &mut rng);
                assert!(predicted.region.contains(p));
            }
            assert!(predicted.region.area() >= prior.region.area() - 1e-9);
        }
        assert_eq!(predicted.cycles_since_seen, prior.cycles_since_seen + 1);

        let s = common::random_sector(&mut rng);
        let updated = update(&predicted, &s, None, &noise).unwrap();
        let sector_poly = sector_to_polygon(&s, 4).unwrap();
        if updated.was_reset {
            assert_eq!(updated.region, sector_poly);
        } else {
            assert!(updated.region.area() <= predicted.region.area() + 1e-9);
            assert!(updated.region.area() <= sector_poly.area() + 1e-9);
        }
        assert_eq!(updated.cycles_since_seen, 0);
    }
}

#[test]
fn disjoint_observation_resets_belief() {
    let noise = VelocityNoise::default();
    let near = Sector::new(Point2::ORIGIN, 5.0, 5.5, 0.0, 0.1).unwrap();
    let far = Sector::new(Point2::ORIGIN, 30.0, 31.0, 2.0, 2.1).unwrap();
    let reading = ss2d_denoise::noise::VelocityReading {
        speed: 0.5,
        direction: 0.0,
    };
    let ball = init_belief(ObjectKind::Ball, &near, Some(&reading), &noise).unwrap();
    let predicted = predict_ball(&ball, &BallParams::default()).unwrap();
    let reset = update(&predicted, &far, None, &noise).unwrap();
    assert!(reset.was_reset);
    assert_eq!(reset.region, sector_to_polygon(&far, 4).unwrap());
    assert_eq!(reset.velocity, None);

    let with_reading = update(&predicted, &far, Some(&reading), &noise).unwrap();
    assert!(with_reading.was_reset);
    assert!(with_reading.velocity.is_some());

    let kept = update(&predicted, &near, None, &noise).unwrap();
    assert!(!kept.was_reset);
    assert_eq!(kept.velocity, predicted.velocity);
}

#[test]
fn denoised_beats_baseline_on_every_seed() {
    let bench = accuracy_benchmark(&ScenarioConfig::default_suite(), 100).unwrap();
    assert_eq!(bench.runs.len(), 100);
    for run in &bench.runs {
        let s = &run.summary;
        assert!(
            s.mean_denoised_err < s.mean_baseline_err,
            "seed {}: {} vs {}",
            s.seed,
            s.mean_denoised_err,
            s.mean_baseline_err
        );
    }
    assert!(bench.aggregate.mean_improvement_m > 0.0);
}
