//! Haptic-only interaction planner: the Exploration and Bouncing trajectory
//! strategies plus the finite state machine that switches between them and
//! aborts on excessive force.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{angle_between, normalize, Vec3, EPS_NORM};

/// Below this normalized force component no bounce is commanded along the
/// corresponding axis.
pub const EPS_COMP: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("threshold poses coincide, no direction update possible")]
    DegenerateDirection,
    #[error("vector norm below degeneracy threshold")]
    DegenerateVector,
    #[error("pose history holds fewer than two samples")]
    InsufficientHistory,
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exploration,
    Bouncing,
    Error,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Exploration => "exploration",
            Mode::Bouncing => "bouncing",
            Mode::Error => "error",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// First contact threshold (N); crossing it stores r_low.
    pub f_th_low: f64,
    /// Second contact threshold (N); crossing it stores r_high.
    pub f_th_high: f64,
    /// Force at which the task is aborted (N).
    pub f_abort: f64,
    /// Desired speed in the Exploration state (m/s).
    pub v_const_e: f64,
    /// Desired speed in the Bouncing state (m/s).
    pub v_const_b: f64,
    /// Displacement threshold for stuck detection (m).
    pub r_th: f64,
    /// Window over which the stuck displacement is measured (s).
    pub h: f64,
    /// Number of control steps spanned by the motion trend vector.
    pub m_steps: usize,
    /// Control period (s); filled in from the simulation configuration.
    #[serde(skip)]
    pub dt: f64,
    /// Initial motion direction before any contact.
    pub seed_direction: [f64; 2],
    /// Force level below which a bounce episode may end (N).
    pub bounce_exit_force: f64,
    /// Time the force must stay below `bounce_exit_force` to end a bounce (s).
    pub bounce_exit_dwell: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            f_th_low: 5.0,
            f_th_high: 7.0,
            f_abort: 60.0,
            v_const_e: 0.04,
            v_const_b: 0.05,
            r_th: 0.001,
            h: 0.5,
            m_steps: 2000,
            dt: 0.001,
            // slight tilt so a head-on jam still yields a lateral force cue
            seed_direction: [1.0, -0.1],
            bounce_exit_force: 5.0,
            bounce_exit_dwell: 0.2,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if !(0.0 < self.f_th_low && self.f_th_low < self.f_th_high && self.f_th_high < self.f_abort)
        {
            return Err(PlannerError::InvalidConfig(format!(
                "force thresholds must satisfy 0 < low < high < abort, got {} / {} / {}",
                self.f_th_low, self.f_th_high, self.f_abort
            )));
        }
        if self.v_const_e <= 0.0 || self.v_const_b <= 0.0 {
            return Err(PlannerError::InvalidConfig(
                "desired velocities must be positive".into(),
            ));
        }
        if self.r_th <= 0.0 || self.h <= 0.0 || self.dt <= 0.0 {
            return Err(PlannerError::InvalidConfig(
                "r_th, h and dt must be positive".into(),
            ));
        }
        if self.m_steps < 1 {
            return Err(PlannerError::InvalidConfig("m_steps must be >= 1".into()));
        }
        if self.seed_vec().norm() <= EPS_NORM {
            return Err(PlannerError::InvalidConfig("seed_direction is degenerate".into()));
        }
        if self.bounce_exit_force <= 0.0 || self.bounce_exit_dwell < 0.0 {
            return Err(PlannerError::InvalidConfig(
                "bounce exit parameters must be positive".into(),
            ));
        }
        Ok(())
    }

    fn seed_vec(&self) -> Vec3 {
        Vec3::planar(self.seed_direction[0], self.seed_direction[1])
    }

    /// Number of whole control steps covering the stuck-detection window.
    pub fn stuck_window_steps(&self) -> usize {
        (self.h / self.dt).ceil() as usize
    }
}

/// Fixed-capacity history of actual poses, newest last.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseHistory {
    buf: VecDeque<Vec3>,
    cap: usize,
}

impl PoseHistory {
    pub fn new(cap: usize) -> Self {
        PoseHistory {
            buf: VecDeque::with_capacity(cap + 1),
            cap,
        }
    }

    pub fn push(&mut self, pose: Vec3) {
        if self.buf.len() > self.cap {
            self.buf.pop_front();
        }
        self.buf.push_back(pose);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Sample `steps` entries behind the newest, clamped to the oldest.
    pub fn sample_back(&self, steps: usize) -> Option<Vec3> {
        if self.buf.is_empty() {
            return None;
        }
        let last = self.buf.len() - 1;
        let idx = last.saturating_sub(steps);
        self.buf.get(idx).copied()
    }

    pub fn newest(&self) -> Option<Vec3> {
        self.buf.back().copied()
    }
}

/// Displacement of the newest pose relative to the sample `m_steps` back
/// (clamped to the oldest retained sample).
pub fn motion_trend(history: &PoseHistory, m_steps: usize) -> Result<Vec3, PlannerError> {
    if history.len() < 2 {
        return Err(PlannerError::InsufficientHistory);
    }
    let newest = history.newest().unwrap();
    let past = history.sample_back(m_steps).unwrap();
    Ok(newest - past)
}

/// Per-step planner result: the desired-pose increment and the mode it was
/// produced in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerOutput {
    pub delta_r_d: Vec3,
    pub mode_after: Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerState {
    pub mode: Mode,
    low_detected: bool,
    high_detected: bool,
    r_low: Vec3,
    r_high: Vec3,
    current_direction: Vec3,
    pub alpha: f64,
    pub beta: f64,
    pub history: PoseHistory,
    force_below_since: Option<f64>,
    /// Count of successful Exploration direction recomputations.
    pub direction_updates: u32,
    /// Count of Exploration -> Bouncing transitions.
    pub bounce_entries: u32,
}

impl PlannerState {
    pub fn new(cfg: &PlannerConfig) -> Result<Self, PlannerError> {
        cfg.validate()?;
        let seed = normalize(cfg.seed_vec()).map_err(|_| {
            PlannerError::InvalidConfig("seed_direction is degenerate".into())
        })?;
        let cap = cfg.m_steps.max(cfg.stuck_window_steps()) + 1;
        Ok(PlannerState {
            mode: Mode::Exploration,
            low_detected: false,
            high_detected: false,
            r_low: Vec3::ZERO,
            r_high: Vec3::ZERO,
            current_direction: seed,
            alpha: 0.0,
            beta: 0.0,
            history: PoseHistory::new(cap),
            force_below_since: None,
            direction_updates: 0,
            bounce_entries: 0,
        })
    }

    pub fn current_direction(&self) -> Vec3 {
        self.current_direction
    }

    pub fn low_detected(&self) -> bool {
        self.low_detected
    }

    pub fn high_detected(&self) -> bool {
        self.high_detected
    }

    /// One Exploration control step: threshold capture, direction update on
    /// the second crossing, and the constant-speed increment along the
    /// current direction.
    pub fn exploration_step(&mut self, x_a: Vec3, f_ext: Vec3, cfg: &PlannerConfig) -> PlannerOutput {
        debug_assert_eq!(self.mode, Mode::Exploration);
        let force = f_ext.norm();
        if !self.low_detected && force >= cfg.f_th_low {
            self.r_low = x_a;
            self.low_detected = true;
        }
        if self.low_detected && !self.high_detected && force >= cfg.f_th_high {
            self.r_high = x_a;
            self.high_detected = true;
            match normalize(self.r_high - self.r_low) {
                Ok(dir) => {
                    if dir.dot(self.current_direction) < 1.0 - 1e-12 {
                        self.direction_updates += 1;
                    }
                    self.current_direction = dir;
                }
                Err(_) => {
                    // both poses coincide: keep the previous direction
                    log::debug!("degenerate direction update at {x_a:?}");
                }
            }
            // re-arm both detectors so the next contact pair can redirect
            self.low_detected = false;
            self.high_detected = false;
        }
        PlannerOutput {
            delta_r_d: self.current_direction * (cfg.v_const_e * cfg.dt),
            mode_after: Mode::Exploration,
        }
    }

    /// One Bouncing control step with the scaling factors frozen at episode
    /// entry.
    pub fn bouncing_step(&self, cfg: &PlannerConfig) -> PlannerOutput {
        debug_assert_eq!(self.mode, Mode::Bouncing);
        let s = cfg.v_const_b * cfg.dt;
        PlannerOutput {
            delta_r_d: Vec3::planar(self.alpha * s, self.beta * s),
            mode_after: Mode::Bouncing,
        }
    }

    /// Advances the FSM for the current sensor snapshot and returns the new
    /// mode. `x_a` is the current actual pose, not yet in the history.
    pub fn fsm_update(&mut self, x_a: Vec3, f_ext: Vec3, clock: f64, cfg: &PlannerConfig) -> Mode {
        if self.mode == Mode::Error {
            return Mode::Error;
        }
        if f_ext.norm() >= cfg.f_abort {
            log::info!("force {:.2} N >= abort threshold at t = {clock:.3} s", f_ext.norm());
            self.mode = Mode::Error;
            return Mode::Error;
        }
        match self.mode {
            Mode::Exploration => {
                let window = cfg.stuck_window_steps();
                if self.history.len() > window {
                    let past = self.history.sample_back(window - 1).unwrap();
                    let displacement = (x_a - past).norm();
                    if displacement < cfg.r_th {
                        match motion_trend(&self.history, cfg.m_steps)
                            .map_err(|_| PlannerError::InsufficientHistory)
                            .and_then(|trend| bouncing_init(trend, f_ext))
                        {
                            Ok((alpha, beta)) => {
                                self.alpha = alpha;
                                self.beta = beta;
                                self.mode = Mode::Bouncing;
                                self.bounce_entries += 1;
                                self.force_below_since = None;
                                log::info!(
                                    "stuck at t = {clock:.3} s, bouncing with alpha = {alpha:.3}, beta = {beta:.3}"
                                );
                            }
                            Err(_) => {
                                // degenerate trend or force: stay in Exploration
                            }
                        }
                    }
                }
            }
            Mode::Bouncing => {
                if f_ext.norm() < cfg.bounce_exit_force {
                    let since = *self.force_below_since.get_or_insert(clock);
                    if clock - since >= cfg.bounce_exit_dwell {
                        self.mode = Mode::Exploration;
                        self.low_detected = false;
                        self.high_detected = false;
                        self.force_below_since = None;
                        // continue exploring along the bounce direction
                        if let Ok(dir) = normalize(Vec3::planar(self.alpha, self.beta)) {
                            self.current_direction = dir;
                        }
                        log::info!("forces settled, back to exploration at t = {clock:.3} s");
                    }
                } else {
                    self.force_below_since = None;
                }
            }
            Mode::Error => unreachable!(),
        }
        self.mode
    }
}

/// Axis scaling factors for a bounce episode.
///
/// Each factor compares the motion trend with the corresponding axis
/// projection of the sensed force: it is zero when force and trend share the
/// axis and grows to one when they are perpendicular, signed by the force
/// component so the bounce pushes along the sensed force.
pub fn bouncing_init(r_trend: Vec3, f_ext: Vec3) -> Result<(f64, f64), PlannerError> {
    let f_hat = normalize(f_ext).map_err(|_| PlannerError::DegenerateVector)?;
    let r_hat = normalize(r_trend).map_err(|_| PlannerError::DegenerateVector)?;
    let alpha = axis_factor(f_hat.x, Vec3::new(f_hat.x, 0.0, 0.0), r_hat);
    let beta = axis_factor(f_hat.y, Vec3::new(0.0, f_hat.y, 0.0), r_hat);
    Ok((alpha, beta))
}

fn axis_factor(component: f64, projected: Vec3, r_hat: Vec3) -> f64 {
    if component.abs() <= EPS_COMP {
        return 0.0;
    }
    // angle between the axis-projected force and the motion trend
    let phi = angle_between(projected, r_hat).expect("non-degenerate by construction");
    let mut factor = 1.0 - phi.cos().abs();
    if component < 0.0 {
        factor = -factor;
    }
    factor
}
