//! Text outputs: trajectory CSV, metrics summary, comparison and sweep
//! tables. Floats are written with 9 significant digits.

use std::fmt::Write as _;

use crate::sim::{ComparisonReport, EpisodeMetrics, SweepCell, TrajectoryLog};

/// Scientific notation with 9 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.8e}")
    }
}

pub fn trajectory_header(obstacle_count: usize) -> Vec<String> {
    let mut cols: Vec<String> = [
        "t", "x_p", "y_p", "z_p", "phi", "theta", "psi", "v_t", "u_des_a_t", "u_des_p",
        "u_des_q", "u_safe_a_t", "u_safe_p", "u_safe_q", "u_star_a_t", "u_star_p", "u_star_q",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 0..obstacle_count {
        cols.push(format!("h_{i}"));
        cols.push(format!("cbf_psi_{i}"));
    }
    cols.push("active_obstacle".to_string());
    for i in 0..obstacle_count {
        cols.push(format!("separation_{i}"));
    }
    cols.push("feasible".to_string());
    cols
}

pub fn trajectory_csv(log: &TrajectoryLog) -> String {
    let mut out = trajectory_header(log.obstacle_count).join(",");
    out.push('\n');
    for r in &log.records {
        let s = &r.state;
        let mut row: Vec<String> = [
            r.t, s.x_p, s.y_p, s.z_p, s.phi, s.theta, s.psi, s.v_t, r.u_des.a_t, r.u_des.p,
            r.u_des.q, r.u_safe.a_t, r.u_safe.p, r.u_safe.q, r.u_star.a_t, r.u_star.p, r.u_star.q,
        ]
        .iter()
        .map(|&x| fmt_f64(x))
        .collect();
        for (h, psi) in r.h.iter().zip(&r.psi) {
            row.push(fmt_f64(*h));
            row.push(fmt_f64(*psi));
        }
        row.push(r.active_obstacle.map_or("-1".to_string(), |i| i.to_string()));
        row.extend(r.separation.iter().map(|&x| fmt_f64(x)));
        row.push((r.feasible as u8).to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// TOML summary of one episode.
pub fn metrics_text(metrics: &EpisodeMetrics) -> String {
    toml::to_string(metrics).expect("metrics serialize")
}

const METRIC_ROWS: [&str; 7] = [
    "min_separation",
    "min_h",
    "collision",
    "filter_active_fraction",
    "control_effort",
    "max_path_deviation",
    "infeasible_steps",
];

fn metric_values(m: &EpisodeMetrics) -> [String; 7] {
    [
        fmt_f64(m.min_separation),
        fmt_f64(m.min_h),
        (m.collision as u8).to_string(),
        fmt_f64(m.filter_active_fraction),
        fmt_f64(m.control_effort),
        fmt_f64(m.max_path_deviation),
        m.infeasible_steps.to_string(),
    ]
}

/// One row per metric, one column per configuration. Delta rows are taken
/// against the first configuration.
pub fn comparison_csv(report: &ComparisonReport, labels: &[String]) -> String {
    let mut out = String::from("metric");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');

    let columns: Vec<[String; 7]> = report.entries.iter().map(|e| metric_values(&e.metrics)).collect();
    for (row, name) in METRIC_ROWS.iter().enumerate() {
        out.push_str(name);
        for c in &columns {
            out.push(',');
            out.push_str(&c[row]);
        }
        out.push('\n');
    }

    let n = report.entries.len();
    let mut push_row = |name: &str, f: &dyn Fn(usize) -> String| {
        out.push_str(name);
        for i in 0..n {
            out.push(',');
            out.push_str(&f(i));
        }
        out.push('\n');
    };
    push_row("first_activation_time", &|i| {
        report.entries[i]
            .first_activation
            .map_or("none".to_string(), fmt_f64)
    });
    push_row("max_position_delta_vs_first", &|i| fmt_f64(report.max_position_delta(i, 0)));
    push_row("control_effort_delta_vs_first", &|i| fmt_f64(report.effort_delta(i, 0)));
    push_row("max_path_deviation_delta_vs_first", &|i| fmt_f64(report.deviation_delta(i, 0)));
    push_row("activates_before_first", &|i| (report.activates_earlier(i, 0) as u8).to_string());
    out
}

pub fn sweep_csv(keys: &[String], cells: &[SweepCell]) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = keys.to_vec();
    header.extend(METRIC_ROWS.iter().map(|s| s.to_string()));
    header.push("status".to_string());
    let _ = writeln!(out, "{}", header.join(","));
    for cell in cells {
        let mut row: Vec<String> = cell.values.iter().map(|v| csv_quote(&v.to_string())).collect();
        match &cell.outcome {
            Ok(m) => {
                row.extend(metric_values(m));
                row.push("ok".to_string());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), METRIC_ROWS.len()));
                row.push(csv_quote(&format!("error: {e}")));
            }
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
