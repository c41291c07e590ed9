//! JSON and CSV rendering of run reports.
//!
//! Floating-point values are written with six significant digits so output
//! files diff cleanly across platforms. Every CSV table starts with a
//! `# schema:` line.

use std::fmt::Write as _;

use serde::Serializer;

use crate::engine::{Replicated, RunReport, Stat};

/// Fixed-decimal rendering with six significant digits.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    // exponent after rounding to six digits, so 9.9999996 counts as 1.00000e1
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn round_sig6(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig6(x).parse().unwrap_or(x)
    } else {
        x
    }
}

pub fn sig6<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round_sig6(*x))
    } else {
        s.serialize_none()
    }
}

pub fn sig6_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig6(v, s),
        None => s.serialize_none(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig6).unwrap_or_default()
}

pub fn report_json(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

pub fn replicated_json(rep: &Replicated) -> String {
    serde_json::to_string_pretty(rep).expect("report serializes") + "\n"
}

pub fn summary_csv(report: &RunReport) -> String {
    let mut s = String::from("# schema: squitter-sim/summary/v1\nmetric,value\n");
    let rows: Vec<(&str, String)> = vec![
        ("seed", report.seed.to_string()),
        ("generated", report.totals.generated.to_string()),
        ("received", report.totals.received.to_string()),
        ("lost_collision", report.totals.lost_collision.to_string()),
        ("lost_corrupted", report.totals.lost_corrupted.to_string()),
        (
            "lost_below_sensitivity",
            report.totals.lost_below_sensitivity.to_string(),
        ),
        ("received_ratio", fmt_sig6(report.received_ratio)),
        ("plane_received_ratio", opt(report.plane_received_ratio)),
        ("uav_received_ratio", opt(report.uav_received_ratio)),
        ("tracked_aircraft", report.tracked.aircraft.id.to_string()),
        ("tracked_distance_km", fmt_sig6(report.tracked.aircraft.distance_km)),
        ("tracked_pos_generated", report.tracked.pos.generated.to_string()),
        ("tracked_pos_received", report.tracked.pos.received.to_string()),
        (
            "update_probability",
            opt(report.tracked.update.map(|u| u.probability)),
        ),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

pub fn aircraft_csv(report: &RunReport) -> String {
    let mut s = String::from(
        "# schema: squitter-sim/aircraft/v1\n\
         id,class,address,distance_km,generated,received,lost_collision,lost_corrupted,lost_below_sensitivity,received_ratio\n",
    );
    for a in &report.aircraft {
        let t = &a.total;
        let _ = writeln!(
            s,
            "{},{},{:06X},{},{},{},{},{},{},{}",
            a.aircraft.id,
            a.aircraft.kind.label(),
            a.aircraft.address,
            fmt_sig6(a.aircraft.distance_km),
            t.generated,
            t.received,
            t.lost_collision,
            t.lost_corrupted,
            t.lost_below_sensitivity,
            opt(t.ratio().ok()),
        );
    }
    s
}

pub fn kinds_csv(report: &RunReport) -> String {
    let mut s = String::from(
        "# schema: squitter-sim/kinds/v1\nkind,generated,received,lost_collision,lost_corrupted,lost_below_sensitivity,received_ratio\n",
    );
    for k in &report.by_kind {
        let t = &k.tally;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            k.kind,
            t.generated,
            t.received,
            t.lost_collision,
            t.lost_corrupted,
            t.lost_below_sensitivity,
            opt(k.received_ratio)
        );
    }
    s
}

pub fn bins_csv(report: &RunReport) -> String {
    let mut s = String::from("# schema: squitter-sim/bins/v1\nbin_km,class,ratio,n_aircraft\n");
    for b in &report.bins {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_sig6(b.bin_center_km),
            b.class.label(),
            fmt_sig6(b.ratio),
            b.n_aircraft
        );
    }
    s
}

/// All tables of one report, separated by blank lines.
pub fn report_csv(report: &RunReport) -> String {
    [
        summary_csv(report),
        kinds_csv(report),
        report.tracked.histogram.to_csv(),
        bins_csv(report),
        aircraft_csv(report),
    ]
    .join("\n")
}

fn stat_cells(s: Option<Stat>) -> (String, String) {
    match s {
        Some(s) => (fmt_sig6(s.mean), fmt_sig6(s.std)),
        None => (String::new(), String::new()),
    }
}

pub fn replicated_csv(rep: &Replicated) -> String {
    let mut s = String::from(
        "# schema: squitter-sim/replications/v1\n\
         replication,seed,received_ratio,plane_received_ratio,uav_received_ratio,tracked_pos_received_ratio,update_probability\n",
    );
    for (k, r) in rep.reports.iter().enumerate() {
        let _ = writeln!(
            s,
            "{k},{},{},{},{},{},{}",
            r.seed,
            fmt_sig6(r.received_ratio),
            opt(r.plane_received_ratio),
            opt(r.uav_received_ratio),
            opt(r.tracked.pos_received_ratio),
            opt(r.tracked.update.map(|u| u.probability)),
        );
    }
    let sm = &rep.summary;
    let cols = [
        Some(sm.received_ratio),
        sm.plane_received_ratio,
        sm.uav_received_ratio,
        sm.tracked_pos_received_ratio,
        sm.update_probability,
    ];
    let (means, stds): (Vec<_>, Vec<_>) = cols.into_iter().map(stat_cells).unzip();
    let _ = writeln!(s, "mean,,{}", means.join(","));
    let _ = writeln!(s, "std,,{}", stds.join(","));
    s
}
