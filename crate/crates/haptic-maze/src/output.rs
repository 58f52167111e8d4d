//! Trajectory CSV and metrics JSON writers. The CSV is RFC-4180 style,
//! UTF-8, `.` decimal separator, with every numeric field printed at nine
//! significant digits so repeated runs are byte-identical.

use std::io::{self, Write};

use crate::sim::{Metrics, TrajectoryLog};

pub const CSV_HEADER: &str = "t,x_a_x,x_a_y,x_d_x,x_d_y,f_ext_x,f_ext_y,force_norm,mode";

/// Nine significant digits in scientific notation.
fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_trajectory_csv<W: Write>(w: &mut W, log: &TrajectoryLog) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &log.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            sig9(r.t),
            sig9(r.x_a.x),
            sig9(r.x_a.y),
            sig9(r.x_d.x),
            sig9(r.x_d.y),
            sig9(r.f_ext.x),
            sig9(r.f_ext.y),
            sig9(r.force_norm),
            r.mode
        )?;
    }
    Ok(())
}

pub fn metrics_json(metrics: &Metrics) -> String {
    // struct field order is fixed, so the output is deterministic
    serde_json::to_string_pretty(metrics).expect("metrics serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec3;
    use crate::planner::Mode;
    use crate::sim::{Outcome, Record};

    #[test]
    fn csv_layout() {
        let log = TrajectoryLog {
            records: vec![Record {
                t: 0.001,
                x_a: Vec3::new(0.1, -0.2, 0.0),
                x_d: Vec3::new(0.1004, -0.2, 0.0),
                f_ext: Vec3::ZERO,
                force_norm: 0.0,
                mode: Mode::Exploration,
                stiff_dir: Vec3::X,
            }],
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &log).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(row.starts_with("1.00000000e-3,"));
        assert!(row.ends_with(",exploration"));
        assert_eq!(row.split(',').count(), 9);
    }

    #[test]
    fn metrics_json_round_trip_exact() {
        let m = Metrics {
            completed: true,
            outcome: Outcome::Goal,
            duration: 10.042,
            max_tracking_error: 0.027345678901234,
            max_force: 27.5,
            path_length: 0.41,
            bounce_entries: 1,
            direction_updates: 7,
        };
        let back: Metrics = serde_json::from_str(&metrics_json(&m)).unwrap();
        assert_eq!(m, back);
    }
}
