use proptest::prelude::*;

use obde::crossover::{binomial_mask, multiple_exponential_mask, SegmentRates, DEFAULT_SEGMENT_LEN};
use obde::obl::beta::{beta_opposite, beta_opposite_with, BetaOppositeParams, BetaShape};
use obde::obl::jumping::JumpSchedule;
use obde::obl::phases::{mu_comma_lambda_phase, mu_plus_lambda_phase, PartialChange};
use obde::{
    random_point, BaseFunction, Bounds, CrossoverKind, EvaluationBudget, Evaluator, Individual, JumpingPolicy,
    Population, Problem, RngStream, TestFunction,
};

fn mutant_fraction(d: usize, draws: usize, mut fill: impl FnMut(&mut [bool])) -> f64 {
    let mut mask = vec![false; d];
    let mut count = 0usize;
    for _ in 0..draws {
        fill(&mut mask);
        count += mask.iter().filter(|&&m| m).count();
    }
    count as f64 / (d * draws) as f64
}

#[test]
fn binomial_partial_opposite_marginals() {
    let mut rng = RngStream::new(17);
    for cr in [0.1, 0.9] {
        let frac = mutant_fraction(100, 1000, |m| binomial_mask(cr, &mut rng, m));
        assert!((frac - cr).abs() <= 0.05, "cr {cr}: {frac}");
    }
}

#[test]
fn multiple_exponential_marginals_match_run_lengths() {
    let mut rng = RngStream::new(23);
    for cr in [0.1, 0.5, 0.9] {
        let r = SegmentRates::new(cr, DEFAULT_SEGMENT_LEN);
        let expected = (r.mutant_len + 1.0) / (r.mutant_len + r.target_len + 2.0);
        let frac = mutant_fraction(2000, 500, |m| multiple_exponential_mask(cr, DEFAULT_SEGMENT_LEN, &mut rng, m));
        assert!((frac - expected).abs() <= 0.01, "cr {cr}: {frac} vs {expected}");
    }
}

#[test]
fn concave_opposites_concentrate_near_mode() {
    // x near the upper bound: the concave mode sits near the lower one
    let b = Bounds::uniform(1, 0.0, 10.0).unwrap();
    let mut rng = RngStream::new(5);
    let n = 20_000;
    let mean: f64 = (0..n)
        .map(|_| beta_opposite_with(&[9.0], &b, BetaShape::Concave, 0.01, &mut rng).unwrap()[0])
        .sum::<f64>()
        / n as f64;
    assert!(mean < 2.5, "{mean}");
}

#[test]
fn convex_opposites_avoid_the_anti_mode() {
    let b = Bounds::uniform(1, 0.0, 1.0).unwrap();
    let mut rng = RngStream::new(6);
    let x = 0.3;
    let p = BetaOppositeParams::convex(x, 0.0, 1.0, 0.25);
    assert!(p.alpha < 1.0 && p.beta < 1.0);
    let n = 20_000;
    let near = (0..n)
        .filter(|_| {
            let y = beta_opposite_with(&[x], &b, BetaShape::Convex, 0.25, &mut rng).unwrap()[0];
            (y - x).abs() < 0.05
        })
        .count();
    // uniform would put about 10% of draws within 0.05 of x
    assert!((near as f64) / (n as f64) < 0.1, "{near}");
}

#[test]
fn linear_policy_is_non_increasing() {
    let s = JumpSchedule::new(JumpingPolicy::linear_default());
    let ps: Vec<f64> = (0..=100).map(|k| s.probability(k as f64 / 100.0)).collect();
    assert!(ps.windows(2).all(|w| w[1] <= w[0]));
    assert!((ps[0] - 0.3).abs() < 1e-12 && ps[100].abs() < 1e-12);
}

#[test]
fn protective_policy_stops_after_consecutive_drops() {
    let mut s = JumpSchedule::new(JumpingPolicy::protective_default());
    for r in [0.5, 0.4, 0.45, 0.3, 0.2] {
        s.record(r);
        assert!(!s.is_disabled());
    }
    s.record(0.1);
    assert!(s.is_disabled());
    assert_eq!(s.probability(0.0), 0.0);
    s.record(0.9);
    assert!(s.is_disabled());
    s.reset();
    assert_eq!(s.probability(0.5), 0.3);
}

fn evaluated_population(f: &TestFunction, np: usize, rng: &mut RngStream) -> Population {
    let b = f.bounds();
    Population::new(
        (0..np)
            .map(|_| {
                let x = random_point(b, rng);
                let v = f.value(&x);
                Individual::evaluated(x, v)
            })
            .collect(),
    )
}

fn sorted_fitness(pop: &Population) -> Vec<f64> {
    let mut v: Vec<f64> = pop.members.iter().map(|m| m.fitness().unwrap()).collect();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn beta_opposites_stay_inside_bounds(
        dim in 1usize..20,
        lo in -100.0f64..0.0,
        width in 1e-3f64..200.0,
        div in 1e-9f64..1.5,
        seed in any::<u64>(),
    ) {
        let b = Bounds::uniform(dim, lo, lo + width).unwrap();
        let mut rng = RngStream::new(seed);
        for _ in 0..10 {
            let x = random_point(&b, &mut rng);
            let y = beta_opposite(&x, &b, div, &mut rng).unwrap();
            prop_assert!(b.contains(&y), "{:?}", y);
        }
    }

    #[test]
    fn stationary_point_is_the_mode(mode in 0.0f64..=1.0, spread in 1.0001f64..1e6) {
        let p = BetaOppositeParams::from_mode_spread(mode, spread);
        prop_assert!(p.alpha > 0.0 && p.beta > 0.0);
        prop_assert!((p.stationary_point() - mode).abs() <= 1e-9 * (1.0 + spread));
        prop_assert_eq!(p.shape(), BetaShape::Concave);
    }

    #[test]
    fn convex_stationary_point_is_the_anti_mode(mode in 0.01f64..0.99, spread in 0.01f64..0.99) {
        let p = BetaOppositeParams::from_mode_spread(mode, spread);
        prop_assert!(p.alpha > 0.0 && p.alpha < 1.0 && p.beta > 0.0 && p.beta < 1.0);
        prop_assert!((p.stationary_point() - mode).abs() <= 1e-9);
        prop_assert_eq!(p.shape(), BetaShape::Convex);
    }

    #[test]
    fn plus_phase_never_worsens_any_rank(np in 4usize..30, dim in 1usize..8, seed in any::<u64>()) {
        let f = TestFunction::plain(BaseFunction::Rastrigin, dim).unwrap();
        let mut rng = RngStream::new(seed);
        let mut pop = evaluated_population(&f, np, &mut rng);
        let before = sorted_fitness(&pop);
        let mut eval = Evaluator::new(&f, EvaluationBudget::new(10 * np as u64).unwrap());
        let b = f.bounds().clone();
        let change = PartialChange::new(CrossoverKind::Binomial);
        let report = mu_plus_lambda_phase(&mut pop, &mut eval, &b, 0.3, &change, &mut rng).unwrap();
        let after = sorted_fitness(&pop);
        prop_assert_eq!(report.evaluations, 2 * np as u64);
        prop_assert_eq!(eval.budget().used(), 2 * np as u64);
        prop_assert!(before.iter().zip(&after).all(|(b, a)| a <= b));
    }

    #[test]
    fn comma_phase_keeps_the_better_half(np in 4usize..30, dim in 1usize..8, seed in any::<u64>()) {
        let f = TestFunction::plain(BaseFunction::Sphere, dim).unwrap();
        let mut rng = RngStream::new(seed);
        let mut pop = evaluated_population(&f, np, &mut rng);
        let before = sorted_fitness(&pop);
        let mut eval = Evaluator::new(&f, EvaluationBudget::new(10 * np as u64).unwrap());
        let b = f.bounds().clone();
        let change = PartialChange::new(CrossoverKind::multiple_exponential());
        mu_comma_lambda_phase(&mut pop, &mut eval, &b, 1e-3, &change, &mut rng).unwrap();
        let kept: Vec<f64> = pop.members[..np / 2].iter().map(|m| m.fitness().unwrap()).collect();
        prop_assert_eq!(&kept[..], &before[..np / 2]);
        for (i, m) in pop.members.iter().enumerate().skip(np / 2) {
            prop_assert!(m.fitness().unwrap() <= before[i]);
        }
    }

    #[test]
    fn jump_probability_stays_in_unit_interval(start in 0.0f64..=1.0, end in 0.0f64..=1.0, t in -1.0f64..2.0) {
        let s = JumpSchedule::new(JumpingPolicy::LinearDecreasing { start, end });
        let p = s.probability(t);
        prop_assert!((0.0..=1.0).contains(&p));
    }
}

