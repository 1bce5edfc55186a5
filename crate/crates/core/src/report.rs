//! Text and CSV serialization of cuts, metrics and comparison reports.
//!
//! Numeric cells carry six decimal places; identical inputs serialize to
//! identical bytes.

use crate::metrics::PlaneMetrics;
use crate::scenario::{ComparisonReport, ScenarioOutcome};
use crate::solver::PatternCut;

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Pattern cut as CSV: `# gain_dbi=`, `# frequency_ghz=`, `# phi_plane_deg=`
/// comment headers, then `theta_deg,co_db,cx_db` rows.
pub fn pattern_cut_csv(cut: &PatternCut) -> String {
    let mut out = String::new();
    out.push_str(&format!("# gain_dbi={:.6}\n", cut.peak_gain_dbi));
    out.push_str(&format!("# frequency_ghz={:.6}\n", cut.frequency_ghz));
    out.push_str(&format!("# phi_plane_deg={:.6}\n", cut.phi_plane_deg));
    out.push_str("theta_deg,co_db,cx_db\n");
    for i in 0..cut.theta_deg.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt(cut.theta_deg[i]),
            fmt(cut.co_db[i]),
            fmt(cut.cx_db[i])
        ));
    }
    out
}

pub const METRICS_CSV_HEADER: &str = "scenario,frequency_ghz,plane,gain_dbi,directivity_dbi,\
hpbw_deg,first_sll_db,xpol_peak_db,pointing_deg,spillover_db,taper_db,mask_db,film_db,\
blockage_fraction,ir_boresight_deg,ir_obscuration,ir_lost_rays";

fn optional(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// One CSV row per plane for a scenario outcome.
pub fn metrics_csv_rows(outcome: &ScenarioOutcome) -> Vec<String> {
    let plane_row = |plane: &PlaneMetrics, name: &str| -> String {
        let (ir_b, ir_o, ir_l) = match &outcome.ir {
            Some(ir) => (
                fmt(ir.boresight_error_deg),
                fmt(ir.obscuration_fraction),
                ir.lost_rays.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            outcome.scenario_id,
            fmt(outcome.frequency_ghz),
            name,
            fmt(plane.gain_dbi),
            fmt(outcome.directivity_dbi),
            fmt(plane.hpbw_deg),
            optional(plane.first_sll_db),
            optional(plane.xpol_peak_db),
            fmt(plane.pointing_deg),
            fmt(outcome.loss_budget.spillover_db),
            fmt(outcome.loss_budget.taper_db),
            fmt(outcome.loss_budget.mask_db),
            fmt(outcome.loss_budget.film_db),
            fmt(outcome.blockage_fraction),
            ir_b,
            ir_o,
            ir_l
        )
    };
    vec![
        plane_row(&outcome.metrics.e_plane, "E"),
        plane_row(&outcome.metrics.h_plane, "H"),
    ]
}

/// Human-readable aligned table of a comparison run.
pub fn comparison_table(report: &ComparisonReport) -> String {
    let mut rows: Vec<[String; 9]> = vec![[
        "scenario".into(),
        "f_GHz".into(),
        "plane".into(),
        "gain_dBi".into(),
        "HPBW_deg".into(),
        "SLL_dB".into(),
        "xpol_dB".into(),
        "IR_bore_deg".into(),
        "IR_obsc".into(),
    ]];
    for o in &report.outcomes {
        for (plane, name) in [(&o.metrics.e_plane, "E"), (&o.metrics.h_plane, "H")] {
            let xpol = plane
                .xpol_peak_db
                .filter(|v| *v >= -100.0)
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "<= floor".into());
            let sll = plane
                .first_sll_db
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "none".into());
            let (irb, iro) = match &o.ir {
                Some(ir) => (
                    format!("{:.4}", ir.boresight_error_deg),
                    format!("{:.4}", ir.obscuration_fraction),
                ),
                None => ("-".into(), "-".into()),
            };
            rows.push([
                o.scenario_id.clone(),
                format!("{:.3}", o.frequency_ghz),
                name.into(),
                format!("{:.2}", plane.gain_dbi),
                format!("{:.3}", plane.hpbw_deg),
                sll,
                xpol,
                irb,
                iro,
            ]);
        }
    }
    let mut widths = [0usize; 9];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}", w = w))
            .collect();
        out.push_str(&line.join("  "));
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            out.push('\n');
        }
    }
    out.push('\n');
    out.push_str(&format!(
        "ranking by gain: {}\n",
        report.ranking_by_gain.join(" > ")
    ));
    out.push_str(&format!(
        "ranking by sidelobe: {}\n",
        report.ranking_by_sll.join(" > ")
    ));
    if let Some(o) = report.outcomes.first() {
        out.push_str(&format!(
            "xpol window: +/-{:.1} x HPBW about the beam peak\n",
            o.metrics.xpol_window_multiplier
        ));
    }
    out
}

/// Comment line recording the cross-polar search window of a run.
pub fn xpol_window_note(window_multiplier: f64) -> String {
    format!("# xpol_window: +/-{window_multiplier:.1} x HPBW about the beam peak\n")
}

/// Comparison run as CSV (same columns as the metrics CSV).
pub fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for o in &report.outcomes {
        for row in metrics_csv_rows(o) {
            out.push_str(&row);
            out.push('\n');
        }
    }
    if let Some(o) = report.outcomes.first() {
        out.push_str(&xpol_window_note(o.metrics.xpol_window_multiplier));
    }
    out
}

/// Provenance trailer appended to every artifact: config hash, tool
/// version, assumed-parameter list.
pub fn provenance_footer(config_hash: u64, version: &str, assumed: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# provenance: config_hash={config_hash:016x} tool_version={version}\n"));
    for a in assumed {
        out.push_str(&format!("# assumed {a}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_csv_has_headers_and_six_decimals() {
        let cut = PatternCut {
            phi_plane_deg: 0.0,
            frequency_ghz: 94.0,
            theta_deg: vec![-0.1, 0.0, 0.1],
            co_db: vec![-3.0, 0.0, -3.0],
            cx_db: vec![f64::NEG_INFINITY, -60.0, -61.5],
            peak_gain_dbi: 51.5,
        };
        let csv = pattern_cut_csv(&cut);
        assert!(csv.starts_with("# gain_dbi=51.500000\n"));
        assert!(csv.contains("# frequency_ghz=94.000000\n"));
        assert!(csv.contains("# phi_plane_deg=0.000000\n"));
        assert!(csv.contains("theta_deg,co_db,cx_db\n"));
        assert!(csv.contains("0.000000,0.000000,-60.000000\n"));
        assert!(csv.contains("-inf"));
    }

    #[test]
    fn identical_cuts_serialize_identically() {
        let cut = PatternCut {
            phi_plane_deg: 90.0,
            frequency_ghz: 94.0,
            theta_deg: vec![0.0, 0.5],
            co_db: vec![0.0, -11.25],
            cx_db: vec![-70.0, -71.0],
            peak_gain_dbi: 48.0,
        };
        assert_eq!(pattern_cut_csv(&cut), pattern_cut_csv(&cut.clone()));
    }
}
