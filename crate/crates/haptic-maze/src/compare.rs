//! Three-profile comparison on a single maze and the batch-run helpers.
//! With the `parallel` feature the independent runs execute on a rayon pool;
//! results are identical either way because each run owns its state.

use serde::{Deserialize, Serialize};

use crate::impedance::ProfileMode;
use crate::maze::Maze;
use crate::sim::{run, Metrics, Outcome, SimConfig, SimError, TrajectoryLog};

pub const COMPARED_PROFILES: [ProfileMode; 3] = [
    ProfileMode::HighConstant,
    ProfileMode::LowConstant,
    ProfileMode::SelfTuning,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub maze: String,
    pub high: Metrics,
    pub low: Metrics,
    pub selftuning: Metrics,
    pub verdicts: Verdicts,
}

/// Ordering and completion checks across the three profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// max_force(selftuning) < max_force(high)
    pub force_ordering_selftuning_lt_high: bool,
    /// max_tracking_error(selftuning) < max_tracking_error(low)
    pub tracking_error_ordering_selftuning_lt_low: bool,
    /// Labels of the profiles that reached the goal.
    pub completed: Vec<String>,
}

/// Runs all compared profiles sequentially, in declaration order.
pub fn run_batch_sequential(
    jobs: &[(SimConfig, &Maze)],
) -> Vec<Result<(TrajectoryLog, Metrics), SimError>> {
    jobs.iter().map(|(cfg, maze)| run(cfg, maze)).collect()
}

/// Runs the jobs on the rayon pool when the `parallel` feature is enabled,
/// falling back to the sequential path otherwise.
pub fn run_batch(jobs: &[(SimConfig, &Maze)]) -> Vec<Result<(TrajectoryLog, Metrics), SimError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        jobs.par_iter().map(|(cfg, maze)| run(cfg, maze)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(jobs)
    }
}

/// Per-profile results in `COMPARED_PROFILES` order.
pub type ProfileRuns = Vec<(ProfileMode, TrajectoryLog, Metrics)>;

/// Runs the high, low, and self-tuning profiles with an otherwise identical
/// configuration and assembles the comparison report. Per-profile logs are
/// returned alongside in `COMPARED_PROFILES` order.
pub fn compare(
    maze_name: &str,
    maze: &Maze,
    base: &SimConfig,
) -> Result<(ComparisonReport, ProfileRuns), SimError> {
    let jobs: Vec<(SimConfig, &Maze)> = COMPARED_PROFILES
        .iter()
        .map(|&mode| {
            let mut cfg = base.clone();
            cfg.profile_mode = mode;
            (cfg, maze)
        })
        .collect();
    let outcomes = run_batch(&jobs);

    let mut results = Vec::with_capacity(3);
    for (&mode, outcome) in COMPARED_PROFILES.iter().zip(outcomes) {
        let (log, metrics) = outcome?;
        results.push((mode, log, metrics));
    }
    let metrics_of = |mode: ProfileMode| -> &Metrics {
        &results.iter().find(|(m, _, _)| *m == mode).unwrap().2
    };
    let high = metrics_of(ProfileMode::HighConstant).clone();
    let low = metrics_of(ProfileMode::LowConstant).clone();
    let selftuning = metrics_of(ProfileMode::SelfTuning).clone();
    let completed = COMPARED_PROFILES
        .iter()
        .filter(|&&m| metrics_of(m).outcome == Outcome::Goal)
        .map(|m| m.label().to_string())
        .collect();
    let verdicts = Verdicts {
        force_ordering_selftuning_lt_high: selftuning.max_force < high.max_force,
        tracking_error_ordering_selftuning_lt_low: selftuning.max_tracking_error
            < low.max_tracking_error,
        completed,
    };
    let report = ComparisonReport {
        maze: maze_name.to_string(),
        high,
        low,
        selftuning,
        verdicts,
    };
    Ok((report, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::parse_maze;

    fn straight_cfg() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.planner.seed_direction = [1.0, 0.0];
        cfg
    }

    fn free_maze() -> Maze {
        parse_maze(
            r#"
            peg_radius = 0.005
            start = [0.0, 0.0]
            goal = [0.05, 0.0]
            goal_radius = 0.002
            "#,
        )
        .unwrap()
    }

    #[test]
    fn compare_free_space_all_complete() {
        let maze = free_maze();
        let (report, results) = compare("free", &maze, &straight_cfg()).unwrap();
        assert_eq!(results.len(), 3);
        assert_eq!(report.verdicts.completed.len(), 3);
        assert!(report.high.completed && report.low.completed && report.selftuning.completed);
    }

    #[test]
    fn batch_paths_agree() {
        let maze = free_maze();
        let jobs: Vec<(SimConfig, &Maze)> = COMPARED_PROFILES
            .iter()
            .map(|&mode| {
                let cfg = SimConfig {
                    profile_mode: mode,
                    ..SimConfig::default()
                };
                (cfg, &maze)
            })
            .collect();
        let seq = run_batch_sequential(&jobs);
        let par = run_batch(&jobs);
        for (a, b) in seq.iter().zip(par.iter()) {
            let (la, ma) = a.as_ref().unwrap();
            let (lb, mb) = b.as_ref().unwrap();
            assert_eq!(la, lb);
            assert_eq!(ma, mb);
        }
    }

    #[test]
    fn report_json_round_trip() {
        let maze = free_maze();
        let (report, _) = compare("free", &maze, &straight_cfg()).unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
