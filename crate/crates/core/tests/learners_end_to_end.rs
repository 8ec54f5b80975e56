use rand::Rng;
use rirl_core::bounds::{cut_log_volume_drop, ellipsoid_mistake_bound, spread_accuracy_bound};
use rirl_core::learners::{omniscient_identify, LearnerState, Lexicographic, TrajectoryConfig, TrajectoryLearner};
use rirl_core::mdp::{solve_optimal, state_values};
use rirl_core::oracles::nature::{random_bandit_task, random_mdp_task};
use rirl_core::oracles::{AdversaryState, FixedEnvDesigner, HumanOracle, ProbeOutcome};
use rirl_core::reward_space::sample_theta;
use rirl_core::rng::{self, Stream};

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn identifier_recovers_canonical_rewards() {
    let eps = 1e-3;
    for seed in 0..20 {
        let theta = sample_theta(10, Some(0), &mut rng::stream(seed, Stream::Theta)).unwrap();
        let human = HumanOracle::new(theta.clone(), eps).unwrap();
        let res = omniscient_identify(&human, 10, 0.9, eps).unwrap();
        assert_eq!(res.tasks_used, 11);
        assert!(sup_dist(res.theta_hat.as_slice(), theta.as_slice()) <= eps);
    }
}

#[test]
fn ellipsoid_learner_against_adversary_keeps_hidden_reward_and_neighbors() {
    let (d, eps) = (3, 0.1);
    let bound = ellipsoid_mistake_bound(d, eps);
    for seed in 0..10 {
        let theta = sample_theta(d, None, &mut rng::stream(seed, Stream::Theta)).unwrap();
        let human = HumanOracle::new(theta.clone(), eps).unwrap();
        let mut learner = LearnerState::new(d, eps).unwrap();
        let mut adversary = AdversaryState::new(d, eps).unwrap();
        let mut misc = rng::stream(seed, Stream::Misc);
        let neighbors: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                theta
                    .values
                    .iter()
                    .map(|t| (t + misc.random_range(-eps / 2.0..=eps / 2.0)).clamp(-1.0, 1.0))
                    .collect()
            })
            .collect();
        while let Some((_, task)) = adversary.next_task().unwrap() {
            let out = learner.play(&task, &human, &Lexicographic).unwrap();
            adversary.observe(out.chosen, &out.verdict).unwrap();
            assert!(adversary.consistent_with(theta.as_slice()));
            assert!(learner.ellipsoid.contains(theta.as_slice()).unwrap());
            if let Some(up) = out.update {
                assert!(up.log_volume_drops.iter().all(|&v| v >= cut_log_volume_drop(d) - 1e-9));
                for p in &neighbors {
                    assert!(learner.ellipsoid.contains(p).unwrap());
                }
            }
        }
        assert!((learner.mistake_count as f64) <= bound);
    }
}

#[test]
fn random_streams_stay_within_the_mistake_bound() {
    let (d, eps) = (4, 0.1);
    let bound = ellipsoid_mistake_bound(d, eps);
    for seed in 0..5 {
        let theta = sample_theta(d, None, &mut rng::stream(seed, Stream::Theta)).unwrap();
        let human = HumanOracle::new(theta.clone(), eps).unwrap();
        let mut learner = LearnerState::new(d, eps).unwrap();
        let mut tasks = rng::stream(seed, Stream::Tasks);
        for _ in 0..2000 {
            let task = random_bandit_task(d, 5, &mut tasks).unwrap();
            learner.play(&task, &human, &Lexicographic).unwrap();
            assert!(learner.ellipsoid.contains(theta.as_slice()).unwrap());
        }
        assert!((learner.mistake_count as f64) <= bound);
    }
}

#[test]
fn designer_converges_within_the_spread_bound() {
    let (d, k, eps) = (3, 6, 0.05);
    let mut rng = rng::seeded(11);
    let designer = loop {
        let task = random_bandit_task(d, k, &mut rng).unwrap();
        if let Ok(des) = FixedEnvDesigner::new(task.features().clone()) {
            if des.spread() >= 0.1 {
                break des;
            }
        }
    };
    let accuracy = spread_accuracy_bound(eps, k, designer.spread());
    for seed in 0..5 {
        let theta = sample_theta(d, None, &mut rng::stream(seed, Stream::Theta)).unwrap();
        let human = HumanOracle::new(theta.clone(), eps).unwrap();
        let mut learner = LearnerState::new(d, eps).unwrap();
        loop {
            let task = designer.next_task(learner.center()).unwrap();
            let out = learner.play(&task, &human, &human.worst_case()).unwrap();
            if !out.verdict.mistake {
                break;
            }
        }
        assert!((learner.mistake_count as f64) <= ellipsoid_mistake_bound(d, eps));
        assert!(sup_dist(learner.center(), theta.as_slice()) <= accuracy);
    }
}

#[test]
fn probe_loop_ends_with_a_certificate() {
    let (d, eps) = (4, 0.05);
    for seed in 0..5 {
        let theta = sample_theta(d, None, &mut rng::stream(seed, Stream::Theta)).unwrap();
        let human = HumanOracle::new(theta.clone(), eps).unwrap();
        let mut learner = LearnerState::new(d, eps).unwrap();
        let mut rounds = 0;
        while let ProbeOutcome::Forcing { task, .. } = human.probe(learner.center()).unwrap() {
            let out = learner.play(&task, &human, &human.worst_case()).unwrap();
            assert!(out.verdict.mistake, "a forcing task must produce a mistake");
            rounds += 1;
            assert!(rounds as f64 <= ellipsoid_mistake_bound(d, eps));
        }
        assert!(sup_dist(learner.center(), theta.as_slice()) <= eps);
    }
}

#[test]
fn trajectory_flags_mark_suboptimal_policies() {
    let (n, eps, gamma) = (4, 0.1, 0.9);
    let config = TrajectoryConfig {
        horizon: 48,
        batch_size: 4,
        agent_horizon: 48,
    };
    let theta = sample_theta(n, Some(0), &mut rng::stream(3, Stream::Theta)).unwrap();
    let human = HumanOracle::new(theta.clone(), eps).unwrap();
    let mut learner = TrajectoryLearner::new(n, eps, config).unwrap();
    let mut tasks = rng::stream(3, Stream::Tasks);
    let mut agent = rng::stream(3, Stream::Agent);
    let mut demo = rng::stream(3, Stream::Human);
    let mut flags = 0;
    for _ in 0..200 {
        let (env, r) = random_mdp_task(n, 2, gamma, &mut tasks).unwrap();
        let log = learner.step(&env, &r, &human, &mut agent, &mut demo).unwrap();
        if let Some((s, a)) = log.flagged {
            flags += 1;
            let y: Vec<f64> = theta.values.iter().zip(r.as_slice()).map(|(t, r)| t + r).collect();
            let star = solve_optimal(&env, &y).unwrap();
            let v_pi = state_values(&env, &y, &log.policy).unwrap();
            assert_eq!(a, log.policy.action(s));
            assert!(v_pi[s] <= star.q[s][a] + 1e-9);
            assert!(star.q[s][a] < star.values[s] - eps);
        }
    }
    assert_eq!(flags, learner.mistakes());
}
