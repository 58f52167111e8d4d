//! Rigid planar maze geometry and penalty-based contact synthesis. Walls are
//! thin curves (segments and arcs) at z = 0; the peg is a disc. Penetration
//! of the disc against the nearest curve point produces a spring-damper
//! reaction which is what the planner senses as the external force.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::math::Vec3;

#[derive(Debug, Error)]
pub enum MazeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("maze parse error: {0}")]
    Parse(String),
    #[error("maze validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallPrimitive {
    Linear {
        p1: Vec3,
        p2: Vec3,
    },
    Arc {
        center: Vec3,
        radius: f64,
        /// Radians, start < end, end - start <= 2*pi.
        start_angle: f64,
        end_angle: f64,
    },
}

impl WallPrimitive {
    /// Closest point of the primitive to `p`.
    pub fn closest_point(&self, p: Vec3) -> Vec3 {
        match *self {
            WallPrimitive::Linear { p1, p2 } => {
                let d = p2 - p1;
                let len_sq = d.norm_squared();
                let t = ((p - p1).dot(d) / len_sq).clamp(0.0, 1.0);
                p1 + d * t
            }
            WallPrimitive::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let rel = p - center;
                if rel.norm() < 1e-12 {
                    // center hit: any arc point is closest, take the start
                    return center + Vec3::planar(start_angle.cos(), start_angle.sin()) * radius;
                }
                let ang = rel.y.atan2(rel.x);
                // bring the angle into [start, start + 2*pi)
                let mut a = ang;
                while a < start_angle {
                    a += TAU;
                }
                while a >= start_angle + TAU {
                    a -= TAU;
                }
                if a <= end_angle {
                    center + rel * (radius / rel.norm())
                } else {
                    let pa = center + Vec3::planar(start_angle.cos(), start_angle.sin()) * radius;
                    let pb = center + Vec3::planar(end_angle.cos(), end_angle.sin()) * radius;
                    if (p - pa).norm_squared() <= (p - pb).norm_squared() {
                        pa
                    } else {
                        pb
                    }
                }
            }
        }
    }
}

/// Soft obstacle: a disc that scales the wall penalty stiffness down.
#[derive(Debug, Clone, PartialEq)]
pub struct Clutter {
    pub center: Vec3,
    pub radius: f64,
    pub stiffness_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactSource {
    Wall(usize),
    Clutter(usize),
}

impl fmt::Display for ContactSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContactSource::Wall(i) => write!(f, "wall {i}"),
            ContactSource::Clutter(i) => write!(f, "clutter {i}"),
        }
    }
}

/// One penetration record: unit normal from the surface into the peg and the
/// penetration depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub normal: Vec3,
    pub depth: f64,
    pub source: ContactSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Maze {
    pub walls: Vec<WallPrimitive>,
    pub clutter: Vec<Clutter>,
    pub start: Vec3,
    pub goal: Vec3,
    pub goal_radius: f64,
    pub peg_radius: f64,
}

impl Maze {
    pub fn validate(&self) -> Result<(), MazeError> {
        if self.peg_radius <= 0.0 {
            return Err(MazeError::Validation("peg_radius must be positive".into()));
        }
        if self.goal_radius <= 0.0 {
            return Err(MazeError::Validation("goal_radius must be positive".into()));
        }
        for (i, wall) in self.walls.iter().enumerate() {
            match *wall {
                WallPrimitive::Linear { p1, p2 } => {
                    if (p2 - p1).norm() < 1e-12 {
                        return Err(MazeError::Validation(format!(
                            "wall {i}: segment endpoints coincide"
                        )));
                    }
                }
                WallPrimitive::Arc {
                    radius,
                    start_angle,
                    end_angle,
                    ..
                } => {
                    if radius <= 0.0 {
                        return Err(MazeError::Validation(format!(
                            "wall {i}: arc radius must be positive"
                        )));
                    }
                    if end_angle <= start_angle {
                        return Err(MazeError::Validation(format!(
                            "wall {i}: arc angles must be ordered"
                        )));
                    }
                    if end_angle - start_angle > TAU + 1e-9 {
                        return Err(MazeError::Validation(format!(
                            "wall {i}: arc spans more than a full turn"
                        )));
                    }
                }
            }
        }
        for (i, c) in self.clutter.iter().enumerate() {
            if c.radius <= 0.0 {
                return Err(MazeError::Validation(format!(
                    "clutter {i}: radius must be positive"
                )));
            }
            if !(c.stiffness_scale > 0.0 && c.stiffness_scale <= 1.0) {
                return Err(MazeError::Validation(format!(
                    "clutter {i}: stiffness_scale must be in (0, 1]"
                )));
            }
        }
        if !contact_query(self.start, self).is_empty() {
            return Err(MazeError::Validation("start not collision-free".into()));
        }
        if !contact_query(self.goal, self).is_empty() {
            return Err(MazeError::Validation("goal not collision-free".into()));
        }
        Ok(())
    }

    /// Axis-aligned bounding box over wall primitives and clutter,
    /// `(min, max)`. Empty mazes return the start/goal extent.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, 0.0);
        let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0);
        let mut take = |p: Vec3| {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        };
        take(self.start);
        take(self.goal);
        for wall in &self.walls {
            match *wall {
                WallPrimitive::Linear { p1, p2 } => {
                    take(p1);
                    take(p2);
                }
                WallPrimitive::Arc { center, radius, .. } => {
                    take(center + Vec3::planar(radius, radius));
                    take(center - Vec3::planar(radius, radius));
                }
            }
        }
        for c in &self.clutter {
            take(c.center + Vec3::planar(c.radius, c.radius));
            take(c.center - Vec3::planar(c.radius, c.radius));
        }
        (lo, hi)
    }
}

/// All wall and clutter penetrations of the peg disc centered at
/// `peg_center`. An empty list means free space.
pub fn contact_query(peg_center: Vec3, maze: &Maze) -> Vec<Contact> {
    let mut contacts = Vec::new();
    for (i, wall) in maze.walls.iter().enumerate() {
        let cp = wall.closest_point(peg_center);
        let rel = peg_center - cp;
        let dist = rel.norm();
        if dist < maze.peg_radius {
            // peg center exactly on the curve leaves the side ambiguous;
            // fall back to a fixed perpendicular so the contact still exists
            let normal = if dist > 1e-12 {
                rel * (1.0 / dist)
            } else {
                degenerate_normal(wall, peg_center)
            };
            contacts.push(Contact {
                normal,
                depth: maze.peg_radius - dist,
                source: ContactSource::Wall(i),
            });
        }
    }
    for (i, c) in maze.clutter.iter().enumerate() {
        let rel = peg_center - c.center;
        let dist = rel.norm();
        // surface distance may go negative when the peg overlaps the disc
        // center region; deep penetration still produces a radial normal
        let surface_dist = dist - c.radius;
        if surface_dist < maze.peg_radius {
            let normal = if dist > 1e-12 { rel * (1.0 / dist) } else { Vec3::X };
            contacts.push(Contact {
                normal,
                depth: maze.peg_radius - surface_dist,
                source: ContactSource::Clutter(i),
            });
        }
    }
    contacts
}

fn degenerate_normal(wall: &WallPrimitive, peg_center: Vec3) -> Vec3 {
    match *wall {
        WallPrimitive::Linear { p1, p2 } => {
            let d = p2 - p1;
            crate::math::normalize(Vec3::planar(-d.y, d.x)).unwrap_or(Vec3::X)
        }
        WallPrimitive::Arc { center, .. } => {
            crate::math::normalize(peg_center - center).unwrap_or(Vec3::X)
        }
    }
}

/// Spring-damper penalty force summed over contacts. Damping acts only on
/// the normal component and only while approaching, so a departing peg is
/// never pulled back.
pub fn contact_force(
    contacts: &[Contact],
    peg_velocity: Vec3,
    k_wall: f64,
    d_wall: f64,
    maze: &Maze,
) -> Vec3 {
    let mut total = Vec3::ZERO;
    for contact in contacts {
        let scale = match contact.source {
            ContactSource::Wall(_) => 1.0,
            ContactSource::Clutter(i) => maze.clutter[i].stiffness_scale,
        };
        let mut f = contact.normal * (k_wall * scale * contact.depth);
        let v_n = peg_velocity.dot(contact.normal);
        if v_n < 0.0 {
            f += contact.normal * (-d_wall * scale * v_n);
        }
        total += f;
    }
    total
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MazeFile {
    peg_radius: f64,
    start: [f64; 2],
    goal: [f64; 2],
    goal_radius: f64,
    #[serde(default)]
    walls: Vec<WallEntry>,
    #[serde(default)]
    clutter: Vec<ClutterEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum WallEntry {
    #[serde(rename = "line")]
    Line { p1: [f64; 2], p2: [f64; 2] },
    #[serde(rename = "arc")]
    Arc {
        center: [f64; 2],
        radius: f64,
        start_deg: f64,
        end_deg: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClutterEntry {
    center: [f64; 2],
    radius: f64,
    #[serde(default = "default_stiffness_scale")]
    stiffness_scale: f64,
}

fn default_stiffness_scale() -> f64 {
    0.3
}

/// Parses and validates a maze document.
pub fn parse_maze(text: &str) -> Result<Maze, MazeError> {
    let file: MazeFile = toml::from_str(text).map_err(|e| MazeError::Parse(e.to_string()))?;
    let walls = file
        .walls
        .into_iter()
        .map(|w| match w {
            WallEntry::Line { p1, p2 } => WallPrimitive::Linear {
                p1: Vec3::planar(p1[0], p1[1]),
                p2: Vec3::planar(p2[0], p2[1]),
            },
            WallEntry::Arc {
                center,
                radius,
                start_deg,
                end_deg,
            } => WallPrimitive::Arc {
                center: Vec3::planar(center[0], center[1]),
                radius,
                start_angle: start_deg.to_radians(),
                end_angle: end_deg.to_radians(),
            },
        })
        .collect();
    let clutter = file
        .clutter
        .into_iter()
        .map(|c| Clutter {
            center: Vec3::planar(c.center[0], c.center[1]),
            radius: c.radius,
            stiffness_scale: c.stiffness_scale,
        })
        .collect();
    let maze = Maze {
        walls,
        clutter,
        start: Vec3::planar(file.start[0], file.start[1]),
        goal: Vec3::planar(file.goal[0], file.goal[1]),
        goal_radius: file.goal_radius,
        peg_radius: file.peg_radius,
    };
    maze.validate()?;
    Ok(maze)
}

/// Loads a maze from a file path or from a bundled maze name
/// (`maze1`, `maze1-cluttered`, `maze2`, `maze3`).
pub fn load_maze(path: &str) -> Result<Maze, MazeError> {
    if let Some(text) = builtin::by_name(path) {
        return parse_maze(text);
    }
    let text = std::fs::read_to_string(Path::new(path)).map_err(|source| MazeError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_maze(&text)
}

/// Bundled maze documents.
pub mod builtin {
    pub const MAZE1: &str = include_str!("../assets/mazes/maze1.toml");
    pub const MAZE1_CLUTTERED: &str = include_str!("../assets/mazes/maze1-cluttered.toml");
    pub const MAZE2: &str = include_str!("../assets/mazes/maze2.toml");
    pub const MAZE3: &str = include_str!("../assets/mazes/maze3.toml");

    pub const NAMES: [&str; 4] = ["maze1", "maze1-cluttered", "maze2", "maze3"];

    pub fn by_name(name: &str) -> Option<&'static str> {
        match name {
            "maze1" => Some(MAZE1),
            "maze1-cluttered" => Some(MAZE1_CLUTTERED),
            "maze2" => Some(MAZE2),
            "maze3" => Some(MAZE3),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wall_y0() -> WallPrimitive {
        WallPrimitive::Linear {
            p1: Vec3::planar(-1.0, 0.0),
            p2: Vec3::planar(1.0, 0.0),
        }
    }

    fn simple_maze(walls: Vec<WallPrimitive>) -> Maze {
        Maze {
            walls,
            clutter: vec![],
            start: Vec3::planar(0.0, 0.5),
            goal: Vec3::planar(0.5, 0.5),
            goal_radius: 0.01,
            peg_radius: 0.01,
        }
    }

    #[test]
    fn no_contact_when_separated() {
        let maze = simple_maze(vec![wall_y0()]);
        assert!(contact_query(Vec3::planar(0.0, 0.05), &maze).is_empty());
    }

    #[test]
    fn penetration_depth_and_normal() {
        let maze = simple_maze(vec![wall_y0()]);
        let contacts = contact_query(Vec3::planar(0.0, 0.005), &maze);
        assert_eq!(contacts.len(), 1);
        assert!((contacts[0].depth - 0.005).abs() < 1e-12);
        assert!((contacts[0].normal - Vec3::Y).norm() < 1e-12);
    }

    #[test]
    fn l_corner_two_contacts() {
        // peg in the inner corner of an L, equidistant 0.005 from both legs
        let maze = simple_maze(vec![
            WallPrimitive::Linear {
                p1: Vec3::planar(-1.0, 0.0),
                p2: Vec3::planar(0.0, 0.0),
            },
            WallPrimitive::Linear {
                p1: Vec3::planar(0.0, 0.0),
                p2: Vec3::planar(0.0, -1.0),
            },
        ]);
        let contacts = contact_query(Vec3::planar(-0.005, -0.005), &maze);
        assert_eq!(contacts.len(), 2);
        for c in &contacts {
            assert!((c.depth - 0.005).abs() < 1e-12);
        }
        assert!(contacts[0].normal.dot(contacts[1].normal).abs() < 1e-12);
    }

    #[test]
    fn arc_contact_radial_normal() {
        let maze = simple_maze(vec![WallPrimitive::Arc {
            center: Vec3::ZERO,
            radius: 0.1,
            start_angle: 0.0,
            end_angle: std::f64::consts::PI,
        }]);
        // just inside the arc at 90 degrees
        let contacts = contact_query(Vec3::planar(0.0, 0.095), &maze);
        assert_eq!(contacts.len(), 1);
        assert!((contacts[0].depth - 0.005).abs() < 1e-12);
        assert!((contacts[0].normal + Vec3::Y).norm() < 1e-12);
        // outside the angular range only the endpoint matters
        let probe = Vec3::planar(0.105, -0.004);
        let contacts = contact_query(probe, &maze);
        assert_eq!(contacts.len(), 1);
        let endpoint = Vec3::planar(0.1, 0.0);
        let expect = crate::math::normalize(probe - endpoint).unwrap();
        assert!((contacts[0].normal - expect).norm() < 1e-9);
    }

    #[test]
    fn force_spring_term() {
        let maze = simple_maze(vec![wall_y0()]);
        let contacts = vec![Contact {
            normal: Vec3::Y,
            depth: 0.001,
            source: ContactSource::Wall(0),
        }];
        let f = contact_force(&contacts, Vec3::ZERO, 50_000.0, 100.0, &maze);
        assert!((f - Vec3::new(0.0, 50.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn force_empty_contacts() {
        let maze = simple_maze(vec![]);
        assert_eq!(contact_force(&[], Vec3::X, 50_000.0, 100.0, &maze), Vec3::ZERO);
    }

    #[test]
    fn force_damping_only_while_approaching() {
        let maze = simple_maze(vec![wall_y0()]);
        let contacts = vec![Contact {
            normal: Vec3::Y,
            depth: 0.001,
            source: ContactSource::Wall(0),
        }];
        // receding: only the spring term remains
        let receding = contact_force(&contacts, Vec3::new(0.0, 1.0, 0.0), 50_000.0, 100.0, &maze);
        assert!((receding - Vec3::new(0.0, 50.0, 0.0)).norm() < 1e-9);
        // approaching: damping adds repulsion
        let approaching =
            contact_force(&contacts, Vec3::new(0.0, -0.1, 0.0), 50_000.0, 100.0, &maze);
        assert!((approaching - Vec3::new(0.0, 60.0, 0.0)).norm() < 1e-9);
        assert!(approaching.dot(Vec3::Y) >= 0.0);
    }

    #[test]
    fn clutter_scales_stiffness() {
        let mut maze = simple_maze(vec![]);
        maze.clutter.push(Clutter {
            center: Vec3::planar(0.0, 0.0),
            radius: 0.01,
            stiffness_scale: 0.3,
        });
        let contacts = contact_query(Vec3::planar(0.0, 0.015), &maze);
        assert_eq!(contacts.len(), 1);
        assert!((contacts[0].depth - 0.005).abs() < 1e-12);
        let f = contact_force(&contacts, Vec3::ZERO, 50_000.0, 0.0, &maze);
        assert!((f - Vec3::new(0.0, 0.3 * 50_000.0 * 0.005, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn parse_round_trip_minimal() {
        let text = r#"
            peg_radius = 0.005
            start = [0.0, 0.0]
            goal = [0.1, 0.0]
            goal_radius = 0.01
        "#;
        let maze = parse_maze(text).unwrap();
        assert!(maze.walls.is_empty());
        assert_eq!(maze.start, Vec3::ZERO);
    }

    #[test]
    fn parse_rejects_unknown_keys() {
        let text = r#"
            peg_radius = 0.005
            start = [0.0, 0.0]
            goal = [0.1, 0.0]
            goal_radius = 0.01
            bogus = 1
        "#;
        assert!(matches!(parse_maze(text), Err(MazeError::Parse(_))));
    }

    #[test]
    fn parse_rejects_zero_radius_arc() {
        let text = r#"
            peg_radius = 0.005
            start = [0.0, 0.0]
            goal = [0.1, 0.0]
            goal_radius = 0.01
            [[walls]]
            type = "arc"
            center = [0.0, 0.0]
            radius = 0.0
            start_deg = 0.0
            end_deg = 90.0
        "#;
        assert!(matches!(parse_maze(text), Err(MazeError::Validation(_))));
    }

    #[test]
    fn parse_rejects_start_inside_wall() {
        let text = r#"
            peg_radius = 0.005
            start = [0.0, 0.0]
            goal = [0.1, 0.02]
            goal_radius = 0.01
            [[walls]]
            type = "line"
            p1 = [-0.1, 0.0]
            p2 = [0.1, 0.0]
        "#;
        match parse_maze(text) {
            Err(MazeError::Validation(msg)) => assert!(msg.contains("start")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn builtin_mazes_validate() {
        for name in builtin::NAMES {
            let maze = load_maze(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(maze.validate().is_ok(), "{name}");
        }
    }
}
