use lds_core::algebra::{
    khatri_rao, DenseMatrix, LogicalMatrix, ProbabilityVector, StochasticMatrix,
};
use lds_core::evolution::{
    monte_carlo_oracle, simulate_deterministic, step_conditional, step_independent, FactorState,
};
use lds_core::model::{state_decode, GlobalSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::*;

fn global_q(lifted: &[StochasticMatrix]) -> StochasticMatrix {
    let k = lifted[0].cols();
    let mut acc = DenseMatrix::ones_row(k).unwrap();
    for q in lifted {
        acc = khatri_rao(&acc, q.matrix()).unwrap();
    }
    StochasticMatrix::new(acc).unwrap()
}

fn point_factors(alphabets: &[usize], state: usize) -> FactorState {
    let values = state_decode(state, alphabets).unwrap();
    FactorState::new(
        values
            .iter()
            .zip(alphabets)
            .map(|(&v, &a)| ProbabilityVector::point_mass(a, v).unwrap())
            .collect(),
    )
    .unwrap()
}

fn mix(a: &[f64], b: &[f64], alpha: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| alpha * x + (1.0 - alpha) * y)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steppers_stay_on_the_simplex(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabets = random_alphabets(&mut rng, 4, 3);
        let lifted = random_lifted(&mut rng, &alphabets);
        let factors = random_factors(&mut rng, &alphabets);
        let next = step_independent(&lifted, &factors).unwrap();
        for f in next.factors() {
            prop_assert!((f.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(f.as_slice().iter().all(|&v| v >= 0.0));
        }
        let q = global_q(&lifted);
        let p = step_conditional(&q, &factors.joint().unwrap()).unwrap();
        prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.as_slice().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn conditional_step_is_linear(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabets = random_alphabets(&mut rng, 3, 3);
        let k = alphabets.iter().product();
        let q = global_q(&random_lifted(&mut rng, &alphabets));
        let (p, r) = (random_simplex(&mut rng, k), random_simplex(&mut rng, k));
        let mixed = ProbabilityVector::new(mix(p.as_slice(), r.as_slice(), alpha)).unwrap();
        let left = step_conditional(&q, &mixed).unwrap();
        let right = mix(
            step_conditional(&q, &p).unwrap().as_slice(),
            step_conditional(&q, &r).unwrap().as_slice(),
            alpha,
        );
        prop_assert!(max_diff(left.as_slice(), &right) <= 1e-12);
    }

    #[test]
    fn models_agree_one_step_from_vertices(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabets = random_alphabets(&mut rng, 4, 2);
        let lifted = random_lifted(&mut rng, &alphabets);
        let q = global_q(&lifted);
        let k = q.cols();
        for r in 1..=k {
            let independent = step_independent(&lifted, &point_factors(&alphabets, r)).unwrap();
            let conditional =
                step_conditional(&q, &ProbabilityVector::point_mass(k, r).unwrap()).unwrap();
            prop_assert!(
                max_diff(independent.joint().unwrap().as_slice(), conditional.as_slice()) <= 1e-12
            );
            prop_assert!(max_diff(conditional.as_slice(), &q.column(r - 1)) <= 1e-12);
        }
    }

    #[test]
    fn deterministic_runs_follow_truth_tables(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabets = random_alphabets(&mut rng, 4, 3);
        let (description, model) = random_network(&mut rng, &alphabets, true);
        let GlobalSystem::Deterministic { transition, .. } = model.assemble().unwrap() else {
            panic!("deterministic model assembled as stochastic");
        };
        for x0 in 1..=model.state_count() {
            let traj = simulate_deterministic(&transition, x0, 50).unwrap();
            let mut x = x0 - 1;
            for &s in &traj.states {
                prop_assert_eq!(s - 1, x);
                x = truth_table_step(&description, &alphabets, x);
            }
        }
    }
}

#[test]
fn independent_map_on_joints_is_not_linear() {
    // The independence model sees the joint only through its marginals, so
    // take two product distributions and their mixture.
    let lifted = example1();
    let p = FactorState::new(vec![pv(&[0.9, 0.1]), pv(&[0.2, 0.8])]).unwrap();
    let r = FactorState::new(vec![pv(&[0.1, 0.9]), pv(&[0.7, 0.3])]).unwrap();
    let joint = |f: &FactorState| f.joint().unwrap().into_vec();
    let map = |f: &FactorState| joint(&step_independent(&lifted, f).unwrap());

    let mixture = mix(&joint(&p), &joint(&r), 0.5);
    // marginals of the mixture
    let m1 = vec![mixture[0] + mixture[1], mixture[2] + mixture[3]];
    let m2 = vec![mixture[0] + mixture[2], mixture[1] + mixture[3]];
    let mixed_state = FactorState::new(vec![pv(&m1), pv(&m2)]).unwrap();

    let left = map(&mixed_state);
    let right = mix(&map(&p), &map(&r), 0.5);
    assert!(max_diff(&left, &right) > 1e-6, "{left:?} vs {right:?}");
}

#[test]
fn monte_carlo_of_deterministic_rules_is_a_point_mass_trajectory() {
    let m = LogicalMatrix::new(4, vec![3, 1, 4, 2]).unwrap();
    let lifted = vec![
        StochasticMatrix::new(LogicalMatrix::new(2, vec![2, 1, 2, 1]).unwrap().to_dense()).unwrap(),
        StochasticMatrix::new(LogicalMatrix::new(2, vec![1, 1, 2, 2]).unwrap().to_dense()).unwrap(),
    ];
    // sanity: those two lifted rules assemble to m
    let q = global_q(&lifted);
    assert_eq!(LogicalMatrix::from_dense(q.matrix()).unwrap(), m);

    let traj = simulate_deterministic(&m, 2, 8).unwrap();
    let mc = monte_carlo_oracle(
        &lifted,
        &ProbabilityVector::point_mass(4, 2).unwrap(),
        8,
        100,
        1,
    )
    .unwrap();
    for t in 0..=8 {
        let expected = ProbabilityVector::point_mass(4, traj.state_at(t).unwrap()).unwrap();
        assert_eq!(mc.joint[t], expected, "t={t}");
    }
}

#[test]
fn monte_carlo_at_time_zero_samples_the_initial() {
    let p0 = pv(&[0.2, 0.2, 0.3, 0.3]);
    let mc = monte_carlo_oracle(&example1(), &p0, 0, 200_000, 5).unwrap();
    assert_eq!(mc.joint.len(), 1);
    assert!(p0.linf_distance(&mc.joint[0]) <= 3e-3);
}
