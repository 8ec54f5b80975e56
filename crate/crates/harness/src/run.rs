//! Per-kind experiment runners.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use rirl_core::bandit::{bandit_to_mdp, emulating_policies, mdp_to_bandit_for_policies, spread, BanditTask};
use rirl_core::bounds;
use rirl_core::ellipsoid::CutRecord;
use rirl_core::learners::{omniscient_identify, LearnerState, Lexicographic, TieBreak, TrajectoryConfig, TrajectoryLearner};
use rirl_core::mdp::{occupancy, solve_optimal, state_values};
use rirl_core::nalgebra::DMatrix;
use rirl_core::oracles::nature::{random_bandit_task, random_mdp_task, random_nonnegative_task};
use rirl_core::oracles::{AdversaryState, FixedEnvDesigner, HumanOracle};
use rirl_core::reward_space::sample_theta;
use rirl_core::rng::{self, Stream};

use crate::config::{ExperimentConfig, ExperimentKind, StreamSource, TieBreakStrategy};
use crate::error::{HarnessError, Result};
use crate::report::{RunRecord, RunReport};

/// Default number of rounds for random bandit streams.
pub const DEFAULT_RANDOM_ROUNDS: usize = 1000;
/// Default number of episodes for the trajectory learner.
pub const DEFAULT_EPISODES: usize = 2000;
/// Tolerance for the bandit -> MDP -> bandit round trip.
pub const CONVERT_TOL: f64 = 1e-9;
/// Minimum spread for generated fixed-environment feature matrices.
pub const MIN_GENERATED_SPREAD: f64 = 0.1;

/// One line of a per-round JSONL log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub task_id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_action: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
    pub mistake: bool,
    pub cut_applied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_volume: Option<f64>,
    pub center_error_inf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flagged_state: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demo_mass: Option<f64>,
}

/// Everything one seed produced.
#[derive(Debug, Clone)]
pub struct SeedOutput {
    pub record: RunRecord,
    pub rounds: Vec<RoundRecord>,
    pub cuts: Vec<CutRecord>,
    /// Tasks the adversary emitted, for replay.
    pub stream: Vec<BanditTask>,
}

/// Inputs shared by every seed.
struct Shared {
    designer: Option<FixedEnvDesigner>,
    replay: Option<Vec<BanditTask>>,
    trajectory: Option<TrajectoryConfig>,
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn matrix_from_columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let d = cols[0].len();
    DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i])
}

/// Feature matrix for the fixed-environment and spread kinds: the configured
/// one, or random tasks from `features_seed` until one has enough spread.
pub fn fixed_features(config: &ExperimentConfig) -> Result<DMatrix<f64>> {
    if let Some(cols) = &config.features {
        return Ok(matrix_from_columns(cols));
    }
    let k = config.num_actions_or(2 * config.d);
    let mut rng = rng::stream(config.features_seed, Stream::Misc);
    for _ in 0..10_000 {
        let task = random_bandit_task(config.d, k, &mut rng).map_err(HarnessError::at(config.features_seed, 0))?;
        if spread(task.features()) >= MIN_GENERATED_SPREAD {
            return Ok(task.features().clone());
        }
    }
    Err(HarnessError::Config(format!(
        "no random {}x{k} feature matrix with spread >= {MIN_GENERATED_SPREAD} found",
        config.d
    )))
}

pub fn load_task_stream(path: &Path) -> Result<Vec<BanditTask>> {
    let file = std::fs::File::open(path).map_err(HarnessError::io(path))?;
    let mut tasks = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(HarnessError::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        tasks.push(serde_json::from_str(&line)?);
    }
    Ok(tasks)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(HarnessError::io(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").map_err(HarnessError::io(path))?;
    }
    w.flush().map_err(HarnessError::io(path))
}

fn shared_inputs(config: &ExperimentConfig) -> Result<Shared> {
    let designer = match config.kind {
        ExperimentKind::Fixedenv => Some(
            FixedEnvDesigner::new(fixed_features(config)?).map_err(|e| HarnessError::Config(e.to_string()))?,
        ),
        _ => None,
    };
    let replay = match &config.stream {
        Some(StreamSource::Replay(path)) => {
            let tasks = load_task_stream(path)?;
            if tasks.iter().any(|t| t.dim() != config.d) {
                return Err(HarnessError::Config(format!(
                    "replayed tasks must have dimension d = {}",
                    config.d
                )));
            }
            Some(tasks)
        }
        _ => None,
    };
    let trajectory = match config.kind {
        ExperimentKind::Trajectory => {
            let mut t = TrajectoryConfig::from_theory(config.d, config.epsilon, config.gamma, config.delta);
            if let Some(h) = config.horizon {
                t.horizon = h;
                t.agent_horizon = h;
            }
            if let Some(n) = config.batch_size {
                t.batch_size = n;
            }
            Some(t)
        }
        _ => None,
    };
    Ok(Shared {
        designer,
        replay,
        trajectory,
    })
}

/// Name of the quantity in the `bound` column.
pub fn bound_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Identify => "identification_tasks",
        ExperimentKind::Mistakes => "ellipsoid_mistake_bound",
        ExperimentKind::Lowerbound => "adversary_lower_bound",
        ExperimentKind::Fixedenv => "spread_accuracy_bound",
        ExperimentKind::Trajectory => "trajectory_mistake_bound",
        ExperimentKind::Convert => "round_trip_tolerance",
        ExperimentKind::Spread => "spread",
    }
}

/// Size of the worker pool: `RIRL_THREADS` if set, otherwise rayon's default.
pub fn thread_count() -> Option<usize> {
    std::env::var("RIRL_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

/// Runs every seed, writes outputs when `out_dir` is set, and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let outputs = run_seeds(config)?;
    let report = RunReport::new(
        config.clone(),
        bound_name(config.kind),
        outputs.iter().map(|o| o.record.clone()).collect(),
    );
    if let Some(dir) = &config.out_dir {
        write_outputs(dir, &report, &outputs)?;
    }
    Ok(report)
}

/// Runs every seed on the worker pool; results come back in seed order.
pub fn run_seeds(config: &ExperimentConfig) -> Result<Vec<SeedOutput>> {
    let shared = shared_inputs(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        config
            .seeds
            .par_iter()
            .map(|&seed| run_seed(config, &shared, seed))
            .collect()
    })
}

pub fn write_outputs(dir: &Path, report: &RunReport, outputs: &[SeedOutput]) -> Result<()> {
    for sub in ["rounds", "cuts"] {
        let p = dir.join(sub);
        std::fs::create_dir_all(&p).map_err(HarnessError::io(&p))?;
    }
    let csv_path = dir.join("summary.csv");
    let file = std::fs::File::create(&csv_path).map_err(HarnessError::io(&csv_path))?;
    report.write_csv(file)?;
    report.write_json(&dir.join("report.json"))?;
    for o in outputs {
        let seed = o.record.seed;
        write_jsonl(&dir.join("rounds").join(format!("seed_{seed}.jsonl")), &o.rounds)?;
        if !o.cuts.is_empty() {
            write_jsonl(&dir.join("cuts").join(format!("seed_{seed}.jsonl")), &o.cuts)?;
        }
        if report.config.record_stream && !o.stream.is_empty() {
            let p = dir.join("streams");
            std::fs::create_dir_all(&p).map_err(HarnessError::io(&p))?;
            write_jsonl(&p.join(format!("seed_{seed}.jsonl")), &o.stream)?;
        }
    }
    Ok(())
}

fn run_seed(config: &ExperimentConfig, shared: &Shared, seed: u64) -> Result<SeedOutput> {
    let start = Instant::now();
    let mut out = match config.kind {
        ExperimentKind::Identify => run_identify(config, seed)?,
        ExperimentKind::Mistakes | ExperimentKind::Lowerbound => run_mistakes(config, shared, seed)?,
        ExperimentKind::Fixedenv => run_fixedenv(config, shared, seed)?,
        ExperimentKind::Trajectory => run_trajectory(config, shared, seed)?,
        ExperimentKind::Convert => run_convert(config, seed)?,
        ExperimentKind::Spread => run_spread(config, seed)?,
    };
    out.record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn record(config: &ExperimentConfig, seed: u64) -> RunRecord {
    RunRecord {
        seed,
        d: config.d,
        epsilon: config.epsilon,
        mistakes: 0,
        bound: 0.0,
        bound_satisfied: false,
        final_center_error: 0.0,
        rounds: 0,
        invariant_violations: 0,
        extra: None,
        wall_time_ms: 0.0,
    }
}

fn run_identify(config: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let at = |round| HarnessError::at(seed, round);
    let theta = sample_theta(config.d, Some(0), &mut rng::stream(seed, Stream::Theta)).map_err(at(0))?;
    let human = HumanOracle::new(theta.clone(), config.epsilon).map_err(at(0))?;
    let res = omniscient_identify(&human, config.d, config.gamma, config.epsilon).map_err(at(0))?;
    let rounds = res
        .history
        .iter()
        .enumerate()
        .map(|(i, intervals)| {
            let mid: Vec<f64> = intervals.iter().map(|(lo, hi)| (lo + hi) / 2.0).collect();
            RoundRecord {
                round: i + 1,
                task_id: i,
                chosen_action: None,
                loss: None,
                mistake: false,
                cut_applied: false,
                log_volume: None,
                center_error_inf: sup_dist(&mid, theta.as_slice()),
                flagged_state: None,
                demo_mass: None,
            }
        })
        .collect();
    let error = sup_dist(res.theta_hat.as_slice(), theta.as_slice());
    let bound = bounds::identification_tasks(config.epsilon);
    let violations = res
        .per_state_intervals
        .iter()
        .zip(theta.as_slice())
        .filter(|((lo, hi), t)| !(lo <= t && *t <= hi))
        .count();
    let mut r = record(config, seed);
    r.mistakes = res.tasks_used;
    r.bound = bound as f64;
    r.bound_satisfied = res.tasks_used == bound && error <= config.epsilon;
    r.final_center_error = error;
    r.rounds = res.tasks_used;
    r.invariant_violations = violations;
    Ok(SeedOutput {
        record: r,
        rounds,
        cuts: Vec::new(),
        stream: Vec::new(),
    })
}

/// Checks after one learner round: hidden reward still inside, every cut
/// shrinks the volume enough. Returns the number of violations.
fn ellipsoid_checks(learner: &LearnerState, theta: &[f64], drops: &[f64]) -> rirl_core::Result<usize> {
    let floor = bounds::cut_log_volume_drop(learner.dim()) - 1e-9;
    let mut bad = drops.iter().filter(|&&v| v < floor).count();
    if !learner.ellipsoid.contains(theta)? {
        bad += 1;
    }
    Ok(bad)
}

enum Source<'a> {
    Adversary(AdversaryState),
    Random { rng: Box<rng::Rng>, left: usize, k: usize },
    Replay(std::slice::Iter<'a, BanditTask>),
}

fn run_mistakes(config: &ExperimentConfig, shared: &Shared, seed: u64) -> Result<SeedOutput> {
    let (d, eps) = (config.d, config.epsilon);
    let at = |round| HarnessError::at(seed, round);
    let theta = sample_theta(d, None, &mut rng::stream(seed, Stream::Theta)).map_err(at(0))?;
    let human = HumanOracle::new(theta.clone(), eps).map_err(at(0))?;
    let worst = human.worst_case();
    let tie: &dyn TieBreak = match config.tie_break {
        TieBreakStrategy::Lexicographic => &Lexicographic,
        TieBreakStrategy::WorstCaseOracle => &worst,
    };
    let stream = match (&config.stream, config.kind) {
        (_, ExperimentKind::Lowerbound) | (None, _) | (Some(StreamSource::Adversary), _) => {
            Source::Adversary(AdversaryState::new(d, eps).map_err(at(0))?)
        }
        (Some(StreamSource::Random), _) => Source::Random {
            rng: Box::new(rng::stream(seed, Stream::Tasks)),
            left: config.rounds.unwrap_or(DEFAULT_RANDOM_ROUNDS),
            k: config.num_actions_or(5),
        },
        (Some(StreamSource::Replay(_)), _) => Source::Replay(shared.replay.as_deref().unwrap_or(&[]).iter()),
    };
    let mut source = stream;
    let mut learner = LearnerState::new(d, eps).map_err(at(0))?;
    let mut rounds = Vec::new();
    let mut cuts = Vec::new();
    let mut emitted = Vec::new();
    let mut violations = 0;
    loop {
        let round = learner.round + 1;
        let task = match &mut source {
            Source::Adversary(adv) => match adv.next_task().map_err(at(round))? {
                Some((_, t)) => t,
                None => break,
            },
            Source::Random { rng, left, k } => {
                if *left == 0 {
                    break;
                }
                *left -= 1;
                random_bandit_task(d, *k, rng.as_mut()).map_err(at(round))?
            }
            Source::Replay(it) => match it.next() {
                Some(t) => t.clone(),
                None => break,
            },
        };
        let center_before = learner.center().to_vec();
        let out = learner.play(&task, &human, tie).map_err(at(round))?;
        if let Source::Adversary(adv) = &mut source {
            adv.observe(out.chosen, &out.verdict).map_err(at(round))?;
            if !adv.consistent_with(theta.as_slice()) {
                violations += 1;
            }
            if config.record_stream {
                emitted.push(task.clone());
            }
        }
        let drops = out.update.as_ref().map(|u| u.log_volume_drops.as_slice()).unwrap_or(&[]);
        violations += ellipsoid_checks(&learner, theta.as_slice(), drops).map_err(at(round))?;
        let cut_applied = out.update.as_ref().is_some_and(|u| u.cut_applied);
        if let Some(u) = &out.update {
            cuts.push(CutRecord {
                round,
                cut_vector: u.cut_vector.clone(),
                center: center_before,
                log_volume: learner.ellipsoid.log_volume(),
            });
        }
        rounds.push(RoundRecord {
            round,
            task_id: round - 1,
            chosen_action: Some(out.chosen),
            loss: Some(out.verdict.loss),
            mistake: out.verdict.mistake,
            cut_applied,
            log_volume: Some(learner.ellipsoid.log_volume()),
            center_error_inf: sup_dist(learner.center(), theta.as_slice()),
            flagged_state: None,
            demo_mass: None,
        });
    }
    let mut r = record(config, seed);
    r.mistakes = learner.mistake_count;
    r.rounds = learner.round;
    r.final_center_error = sup_dist(learner.center(), theta.as_slice());
    r.invariant_violations = violations;
    if config.kind == ExperimentKind::Lowerbound {
        r.bound = bounds::adversary_lower_bound(d, eps);
        r.bound_satisfied = r.mistakes as f64 >= bounds::LOWER_BOUND_FACTOR * r.bound;
    } else {
        r.bound = bounds::ellipsoid_mistake_bound(d, eps);
        r.bound_satisfied = r.mistakes as f64 <= r.bound;
    }
    Ok(SeedOutput {
        record: r,
        rounds,
        cuts,
        stream: emitted,
    })
}

fn run_fixedenv(config: &ExperimentConfig, shared: &Shared, seed: u64) -> Result<SeedOutput> {
    let (d, eps) = (config.d, config.epsilon);
    let at = |round| HarnessError::at(seed, round);
    let designer = shared.designer.as_ref().expect("designer is built for fixedenv");
    let k = designer.features().ncols();
    let theta = sample_theta(d, None, &mut rng::stream(seed, Stream::Theta)).map_err(at(0))?;
    let human = HumanOracle::new(theta.clone(), eps).map_err(at(0))?;
    let worst = human.worst_case();
    let tie: &dyn TieBreak = match config.tie_break {
        TieBreakStrategy::Lexicographic => &Lexicographic,
        TieBreakStrategy::WorstCaseOracle => &worst,
    };
    let budget = bounds::ellipsoid_mistake_bound(d, eps);
    let cap = budget.ceil() as usize + 1;
    let mut learner = LearnerState::new(d, eps).map_err(at(0))?;
    let mut rounds = Vec::new();
    let mut cuts = Vec::new();
    let mut violations = 0;
    let mut settled = false;
    while learner.round < cap {
        let round = learner.round + 1;
        let task = designer.next_task(learner.center()).map_err(at(round))?;
        let center_before = learner.center().to_vec();
        let out = learner.play(&task, &human, tie).map_err(at(round))?;
        let drops = out.update.as_ref().map(|u| u.log_volume_drops.as_slice()).unwrap_or(&[]);
        violations += ellipsoid_checks(&learner, theta.as_slice(), drops).map_err(at(round))?;
        if let Some(u) = &out.update {
            cuts.push(CutRecord {
                round,
                cut_vector: u.cut_vector.clone(),
                center: center_before,
                log_volume: learner.ellipsoid.log_volume(),
            });
        }
        rounds.push(RoundRecord {
            round,
            task_id: round - 1,
            chosen_action: Some(out.chosen),
            loss: Some(out.verdict.loss),
            mistake: out.verdict.mistake,
            cut_applied: out.update.as_ref().is_some_and(|u| u.cut_applied),
            log_volume: Some(learner.ellipsoid.log_volume()),
            center_error_inf: sup_dist(learner.center(), theta.as_slice()),
            flagged_state: None,
            demo_mass: None,
        });
        if !out.verdict.mistake {
            // same center, same task: nothing more can happen
            settled = true;
            break;
        }
    }
    let accuracy = bounds::spread_accuracy_bound(eps, k, designer.spread());
    let mut r = record(config, seed);
    r.mistakes = learner.mistake_count;
    r.rounds = learner.round;
    r.bound = accuracy;
    r.final_center_error = sup_dist(learner.center(), theta.as_slice());
    r.bound_satisfied = settled && r.final_center_error <= accuracy && r.mistakes as f64 <= budget;
    r.invariant_violations = violations;
    r.extra = Some(serde_json::json!({
        "spread": designer.spread(),
        "num_actions": k,
        "mistake_budget": budget,
        "settled": settled,
    }));
    Ok(SeedOutput {
        record: r,
        rounds,
        cuts,
        stream: Vec::new(),
    })
}

fn run_trajectory(config: &ExperimentConfig, shared: &Shared, seed: u64) -> Result<SeedOutput> {
    let (n, eps, gamma) = (config.d, config.epsilon, config.gamma);
    let at = |round| HarnessError::at(seed, round);
    let tc = shared.trajectory.expect("trajectory config is built for trajectory");
    let num_actions = config.num_actions_or(2);
    let theta = sample_theta(n, Some(0), &mut rng::stream(seed, Stream::Theta)).map_err(at(0))?;
    let human = HumanOracle::new(theta.clone(), eps).map_err(at(0))?;
    let mut learner = TrajectoryLearner::new(n, eps, tc).map_err(at(0))?;
    let mut tasks = rng::stream(seed, Stream::Tasks);
    let mut agent = rng::stream(seed, Stream::Agent);
    let mut demo = rng::stream(seed, Stream::Human);
    let episodes = config.rounds.unwrap_or(DEFAULT_EPISODES);
    let expected_mass = 1.0 - gamma.powi(tc.horizon as i32);
    let mut rounds = Vec::new();
    let mut cuts = Vec::new();
    let mut violations = 0;
    let (mut margins_ok, mut min_margin) = (0usize, f64::INFINITY);
    let floor = bounds::cut_log_volume_drop(n) - 1e-9;
    for episode in 0..episodes {
        let round = episode + 1;
        let (env, r) = random_mdp_task(n, num_actions, gamma, &mut tasks).map_err(at(round))?;
        let log = learner
            .step(&env, &r, &human, &mut agent, &mut demo)
            .map_err(at(round))?;
        if let Some(mass) = log.demo_mass {
            if (mass - expected_mass).abs() > 1e-12 {
                violations += 1;
            }
        }
        if let Some((s, a)) = log.flagged {
            // recomputed here, independently of the oracle
            let y: Vec<f64> = theta.values.iter().zip(r.as_slice()).map(|(t, r)| t + r).collect();
            let star = solve_optimal(&env, &y).map_err(at(round))?;
            let v_pi = state_values(&env, &y, &log.policy).map_err(at(round))?;
            let ok = a == log.policy.action(s)
                && v_pi[s] <= star.q[s][a] + 1e-9
                && star.q[s][a] < star.values[s] - eps;
            if !ok {
                violations += 1;
            }
        }
        if let Some(cut) = &log.cut {
            let diff: Vec<f64> = theta.values.iter().zip(&cut.center_before).map(|(t, c)| t - c).collect();
            let margin = diff.iter().zip(&cut.cut_vector).map(|(a, b)| a * b).sum::<f64>() / tc.batch_size as f64;
            if margin > eps / 3.0 {
                margins_ok += 1;
            }
            min_margin = min_margin.min(margin);
            violations += cut.log_volume_drops.iter().filter(|&&v| v < floor).count();
            cuts.push(CutRecord {
                round,
                cut_vector: cut.cut_vector.clone(),
                center: cut.center_before.clone(),
                log_volume: learner.learner.ellipsoid.log_volume(),
            });
        }
        rounds.push(RoundRecord {
            round,
            task_id: episode,
            chosen_action: None,
            loss: None,
            mistake: log.flagged.is_some(),
            cut_applied: log.cut.as_ref().is_some_and(|c| c.applied),
            log_volume: Some(learner.learner.ellipsoid.log_volume()),
            center_error_inf: sup_dist(learner.learner.center(), theta.as_slice()),
            flagged_state: log.flagged.map(|(s, _)| s),
            demo_mass: log.demo_mass,
        });
    }
    let mut rec = record(config, seed);
    rec.mistakes = learner.mistakes();
    rec.rounds = episodes;
    rec.bound = bounds::trajectory_mistake_bound(n, eps, tc.batch_size);
    rec.bound_satisfied = rec.mistakes as f64 <= rec.bound;
    rec.final_center_error = sup_dist(learner.learner.center(), theta.as_slice());
    rec.invariant_violations = violations;
    rec.extra = Some(serde_json::json!({
        "horizon": tc.horizon,
        "batch_size": tc.batch_size,
        "updates": cuts.len(),
        "update_bound": bounds::trajectory_update_bound(n, eps),
        "cuts_with_margin": margins_ok,
        "all_cuts_with_margin": margins_ok == cuts.len(),
        "min_margin": if cuts.is_empty() { None } else { Some(min_margin) },
    }));
    Ok(SeedOutput {
        record: rec,
        rounds,
        cuts,
        stream: Vec::new(),
    })
}

fn run_convert(config: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let at = |round| HarnessError::at(seed, round);
    let k = config.num_actions_or(3);
    let count = config.rounds.unwrap_or(1);
    let mut rng = rng::stream(seed, Stream::Tasks);
    let mut worst = 0.0f64;
    for i in 0..count {
        let task = random_nonnegative_task(config.d, k, &mut rng).map_err(at(i + 1))?;
        worst = worst.max(round_trip_error(&task, config.gamma).map_err(at(i + 1))?);
    }
    let mut r = record(config, seed);
    r.rounds = count;
    r.bound = CONVERT_TOL;
    r.final_center_error = worst;
    r.bound_satisfied = worst <= CONVERT_TOL;
    Ok(SeedOutput {
        record: r,
        rounds: Vec::new(),
        cuts: Vec::new(),
        stream: Vec::new(),
    })
}

/// Largest deviation in the bandit -> MDP -> bandit round trip: features,
/// rewards, and the reference-state occupancy `1 - |x|_1`.
pub fn round_trip_error(task: &BanditTask, gamma: f64) -> rirl_core::Result<f64> {
    let (env, r, s_ref) = bandit_to_mdp(task, gamma)?;
    let policies = emulating_policies(&env, s_ref);
    let back = mdp_to_bandit_for_policies(&env, &r, s_ref, &policies)?;
    let mut worst = (back.features() - task.features()).amax();
    worst = worst.max(sup_dist(back.reward().as_slice(), task.reward().as_slice()));
    for (col, pi) in task.columns().iter().zip(&policies) {
        let eta = occupancy(&env, pi)?;
        let expected = 1.0 - col.iter().sum::<f64>();
        worst = worst.max((eta.as_slice()[s_ref] - expected).abs());
    }
    Ok(worst)
}

fn run_spread(config: &ExperimentConfig, seed: u64) -> Result<SeedOutput> {
    let x = fixed_features(config)?;
    let s = spread(&x);
    let mut r = record(config, seed);
    r.bound = s;
    r.bound_satisfied = s > 0.0;
    Ok(SeedOutput {
        record: r,
        rounds: Vec::new(),
        cuts: Vec::new(),
        stream: Vec::new(),
    })
}
