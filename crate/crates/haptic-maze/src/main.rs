use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use haptic_maze::compare::{compare, COMPARED_PROFILES};
use haptic_maze::maze::load_maze;
use haptic_maze::output::{metrics_json, write_trajectory_csv};
use haptic_maze::scenario::load_scenario;
use haptic_maze::sim::{run, Outcome, SimConfig};

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_ABORTED: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "haptic-maze",
    about = "Haptic-only maze exploration with a self-tuning Cartesian impedance controller",
    after_help = "Maze and scenario arguments accept file paths or bundled names \
                  (mazes: maze1, maze1-cluttered, maze2, maze3; scenarios: e.g. maze1-selftuning). \
                  Set HAPTIC_MAZE_LOG=debug|info for verbose output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectory.csv and metrics.json
    Run {
        /// Scenario file path or bundled scenario name
        scenario: String,
        /// Output directory (created if missing)
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the high/low/self-tuning comparison on one maze
    Compare {
        /// Maze file path or bundled maze name
        maze: String,
        /// Output directory (created if missing)
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Load and validate a maze, printing a short summary
    Validate {
        /// Maze file path or bundled maze name
        maze: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("HAPTIC_MAZE_LOG")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { scenario, out } => cmd_run(&scenario, &out),
        Command::Compare { maze, out } => cmd_compare(&maze, &out),
        Command::Validate { maze } => cmd_validate(&maze),
    };
    ExitCode::from(code)
}

fn cmd_run(scenario_path: &str, out_dir: &Path) -> u8 {
    let scenario = match load_scenario(scenario_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (log, metrics) = match run(&scenario.sim, &scenario.maze) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_CONFIG;
    }
    let csv_path = out_dir.join("trajectory.csv");
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &log).expect("in-memory write");
    if let Err(e) = fs::write(&csv_path, csv) {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        return EXIT_CONFIG;
    }
    let json_path = out_dir.join("metrics.json");
    if let Err(e) = fs::write(&json_path, metrics_json(&metrics)) {
        eprintln!("error: cannot write {}: {e}", json_path.display());
        return EXIT_CONFIG;
    }
    println!(
        "{}: {:?} in {:.3} s (max force {:.2} N, max tracking error {:.4} m)",
        scenario.name, metrics.outcome, metrics.duration, metrics.max_force,
        metrics.max_tracking_error
    );
    match metrics.outcome {
        Outcome::Goal => EXIT_OK,
        Outcome::Error => EXIT_ABORTED,
        Outcome::Timeout => EXIT_TIMEOUT,
    }
}

fn cmd_compare(maze_path: &str, out_dir: &Path) -> u8 {
    let maze = match load_maze(maze_path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let base = SimConfig::default();
    let (report, results) = match compare(maze_path, &maze, &base) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_CONFIG;
    }
    for (mode, log, _) in &results {
        let path = out_dir.join(format!("trajectory-{}.csv", mode.label()));
        let mut csv = Vec::new();
        write_trajectory_csv(&mut csv, log).expect("in-memory write");
        if let Err(e) = fs::write(&path, csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    }
    let report_path = out_dir.join("report.json");
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    if let Err(e) = fs::write(&report_path, json) {
        eprintln!("error: cannot write {}: {e}", report_path.display());
        return EXIT_CONFIG;
    }
    for &mode in &COMPARED_PROFILES {
        let metrics = match mode.label() {
            "high" => &report.high,
            "low" => &report.low,
            _ => &report.selftuning,
        };
        println!(
            "{:<11} {:?} in {:.3} s (max force {:.2} N, max tracking error {:.4} m)",
            mode.label(),
            metrics.outcome,
            metrics.duration,
            metrics.max_force,
            metrics.max_tracking_error
        );
    }
    EXIT_OK
}

fn cmd_validate(maze_path: &str) -> u8 {
    match load_maze(maze_path) {
        Ok(maze) => {
            let lines = maze
                .walls
                .iter()
                .filter(|w| matches!(w, haptic_maze::maze::WallPrimitive::Linear { .. }))
                .count();
            let arcs = maze.walls.len() - lines;
            let (lo, hi) = maze.bounding_box();
            println!(
                "ok: {} segments, {} arcs, {} clutter; bounding box [{:.3}, {:.3}] x [{:.3}, {:.3}] m",
                lines,
                arcs,
                maze.clutter.len(),
                lo.x,
                hi.x,
                lo.y,
                hi.y
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
