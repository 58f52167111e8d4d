//! Scenario files: a named simulation configuration plus the maze it runs
//! in. Scenarios use the same structured-text dialect as maze files and all
//! numeric defaults are pre-filled, so a minimal scenario only names a maze
//! and a profile mode.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::maze::{self, Maze, MazeError};
use crate::sim::SimConfig;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Maze(#[from] MazeError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    /// Path to a maze file (relative to the scenario file) or a bundled
    /// maze name.
    maze: String,
    #[serde(default)]
    sim: SimConfig,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub maze: Maze,
    pub sim: SimConfig,
}

/// Parses a scenario document; `base_dir` anchors relative maze paths.
pub fn parse_scenario(text: &str, base_dir: Option<&Path>) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    file.sim
        .validate()
        .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let maze = if maze::builtin::by_name(&file.maze).is_some() {
        maze::load_maze(&file.maze)?
    } else {
        let path = match base_dir {
            Some(dir) => dir.join(&file.maze),
            None => Path::new(&file.maze).to_path_buf(),
        };
        maze::load_maze(&path.to_string_lossy())?
    };
    Ok(Scenario {
        name: file.name,
        maze,
        sim: file.sim,
    })
}

/// Loads a scenario from a file path or a bundled scenario name.
pub fn load_scenario(path: &str) -> Result<Scenario, ScenarioError> {
    if let Some(text) = builtin::by_name(path) {
        return parse_scenario(text, None);
    }
    let p = Path::new(path);
    let text = std::fs::read_to_string(p).map_err(|source| ScenarioError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_scenario(&text, p.parent())
}

/// Bundled scenario documents.
pub mod builtin {
    pub const MAZE1_SELFTUNING: &str =
        include_str!("../assets/scenarios/maze1-selftuning.scenario");
    pub const MAZE1_HIGH: &str = include_str!("../assets/scenarios/maze1-high.scenario");
    pub const MAZE1_LOW: &str = include_str!("../assets/scenarios/maze1-low.scenario");
    pub const MAZE1CLUTTER_SELFTUNING: &str =
        include_str!("../assets/scenarios/maze1clutter-selftuning.scenario");
    pub const MAZE1CLUTTER_HIGH: &str =
        include_str!("../assets/scenarios/maze1clutter-high.scenario");
    pub const MAZE1CLUTTER_LOW: &str =
        include_str!("../assets/scenarios/maze1clutter-low.scenario");
    pub const MAZE2_SELFTUNING: &str =
        include_str!("../assets/scenarios/maze2-selftuning.scenario");
    pub const MAZE3_SELFTUNING: &str =
        include_str!("../assets/scenarios/maze3-selftuning.scenario");

    pub const NAMES: [&str; 8] = [
        "maze1-selftuning",
        "maze1-high",
        "maze1-low",
        "maze1clutter-selftuning",
        "maze1clutter-high",
        "maze1clutter-low",
        "maze2-selftuning",
        "maze3-selftuning",
    ];

    pub fn by_name(name: &str) -> Option<&'static str> {
        let name = name.strip_suffix(".scenario").unwrap_or(name);
        match name {
            "maze1-selftuning" => Some(MAZE1_SELFTUNING),
            "maze1-high" => Some(MAZE1_HIGH),
            "maze1-low" => Some(MAZE1_LOW),
            "maze1clutter-selftuning" => Some(MAZE1CLUTTER_SELFTUNING),
            "maze1clutter-high" => Some(MAZE1CLUTTER_HIGH),
            "maze1clutter-low" => Some(MAZE1CLUTTER_LOW),
            "maze2-selftuning" => Some(MAZE2_SELFTUNING),
            "maze3-selftuning" => Some(MAZE3_SELFTUNING),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impedance::ProfileMode;

    #[test]
    fn minimal_scenario_uses_defaults() {
        let text = r#"
            name = "smoke"
            maze = "maze1"
        "#;
        let s = parse_scenario(text, None).unwrap();
        assert_eq!(s.name, "smoke");
        assert_eq!(s.sim.profile_mode, ProfileMode::SelfTuning);
        assert_eq!(s.sim.planner.f_th_low, 5.0);
        assert_eq!(s.sim.planner.f_th_high, 7.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"
            name = "smoke"
            maze = "maze1"
            extra = true
        "#;
        assert!(matches!(
            parse_scenario(text, None),
            Err(ScenarioError::Parse(_))
        ));
    }

    #[test]
    fn missing_maze_file_is_io_error() {
        let text = r#"
            name = "smoke"
            maze = "does-not-exist.toml"
        "#;
        assert!(matches!(
            parse_scenario(text, None),
            Err(ScenarioError::Maze(MazeError::Io { .. }))
        ));
    }

    #[test]
    fn builtin_scenarios_load() {
        for name in builtin::NAMES {
            let s = load_scenario(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!s.name.is_empty());
        }
    }
}
