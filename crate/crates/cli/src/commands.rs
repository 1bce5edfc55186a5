//! The four subcommands: synth, run, compare, sweep.

use std::path::PathBuf;

use reflector_core::blockage::blockage_area_fraction;
use reflector_core::feed::FeedPattern;
use reflector_core::ir::{entry_bundle, fold_axis, BundleSpec};
use reflector_core::report::{
    comparison_csv, comparison_table, metrics_csv_rows, pattern_cut_csv, provenance_footer,
    METRICS_CSV_HEADER,
};
use reflector_core::scenario::{
    compare, run_scenario, CompareOptions, Scenario, ScenarioOutcome, ScenarioRegistry,
};
use reflector_core::solver::PatternCut;

use crate::config::{FeedChoice, RunConfig};
use crate::svg::{Plot, Series, SERIES_COLORS};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn build_scenarios(cfg: &RunConfig) -> Result<Vec<Scenario>, CliError> {
    let registry = ScenarioRegistry::with_defaults();
    let mut out = Vec::new();
    for id in &cfg.scenario_ids {
        let mut scenario = registry
            .build(id, &cfg.params)
            .map_err(|e| CliError::Config(e.to_string()))?;
        match &cfg.feed {
            FeedChoice::CosQ => {}
            FeedChoice::Gaussian => {
                let mut feed = FeedPattern::gaussian(
                    cfg.params.edge_taper_db,
                    cfg.params.edge_taper_angle_deg,
                );
                feed.phase_center_offset_mm = cfg.params.phase_center_offset_mm;
                scenario.feed = feed;
                scenario
                    .notes
                    .push("assumed: gaussian feed model selected in config".into());
            }
            FeedChoice::Tabulated {
                e_plane_csv,
                h_plane_csv,
            } => {
                let mut feed = FeedPattern::tabulated_from_csv(e_plane_csv, h_plane_csv)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                feed.phase_center_offset_mm = cfg.params.phase_center_offset_mm;
                scenario.feed = feed;
                scenario
                    .notes
                    .push("assumed: tabulated feed pattern loaded from config CSVs".into());
            }
        }
        scenario.mask.primitives.extend(cfg.extra_mask.iter().cloned());
        out.push(scenario);
    }
    Ok(out)
}

fn compare_options(cfg: &RunConfig) -> CompareOptions {
    CompareOptions {
        grid_n: cfg.grid_n,
        theta_half_range_deg: cfg.theta_max_deg.abs().max(cfg.theta_min_deg.abs()),
        cut_points: cfg.cut_points,
        xpol_window_multiplier: 3.0,
    }
}

fn footer(cfg: &RunConfig, scenarios: &[Scenario]) -> String {
    let mut assumed = Vec::new();
    for s in scenarios {
        for n in &s.notes {
            assumed.push(format!("{}: {}", s.id, n.trim_start_matches("assumed: ")));
        }
    }
    provenance_footer(cfg.config_hash, VERSION, &assumed)
}

/// Tracks written artifacts so a failed run can remove partial outputs.
struct OutputTracker {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputTracker {
    fn create(root: &PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Solver(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.clone(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::Solver(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn discard_all(&self) {
        for path in &self.written {
            let _ = std::fs::remove_file(path);
        }
    }
}

fn solver_err(tracker: &OutputTracker, e: reflector_core::Error) -> CliError {
    tracker.discard_all();
    CliError::Solver(e.to_string())
}

pub fn cmd_synth(cfg: &RunConfig, format: &str) -> Result<(), CliError> {
    let scenarios = build_scenarios(cfg)?;
    let header = [
        "scenario",
        "main_d_mm",
        "main_f_mm",
        "sub_d_mm",
        "magnification",
        "eccentricity",
        "equiv_f_mm",
        "feed_half_angle_deg",
        "blockage_fraction",
    ];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for s in &scenarios {
        let sys = &s.system;
        let (ds, ecc) = match &sys.sub {
            Some(sub) => (
                format!("{:.3}", sub.diameter_mm),
                format!("{:.6}", sub.eccentricity),
            ),
            None => ("-".into(), "-".into()),
        };
        let blockage = blockage_area_fraction(&s.mask, sys.main.aperture_diameter_mm, 512);
        rows.push(vec![
            s.id.clone(),
            format!("{:.3}", sys.main.aperture_diameter_mm),
            format!("{:.3}", sys.main.focal_length_mm),
            ds,
            format!("{:.3}", sys.magnification),
            ecc,
            format!("{:.3}", sys.equivalent_focal_length_mm),
            format!("{:.3}", sys.feed_half_angle_deg),
            format!("{:.6}", blockage),
        ]);
    }

    let csv_body = {
        let mut out = header.join(",");
        out.push('\n');
        for row in &rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    };
    if format == "csv" {
        print!("{csv_body}");
    } else {
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let print_row = |cells: Vec<String>| {
            let line: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}", w = w))
                .collect();
            println!("{}", line.join("  "));
        };
        print_row(header.iter().map(|s| s.to_string()).collect());
        for row in rows.clone() {
            print_row(row);
        }
    }

    let mut tracker = OutputTracker::create(&cfg.out_dir)?;
    let mut file_body = csv_body;
    file_body.push_str(&footer(cfg, &scenarios));
    tracker.write("geometry.csv", &file_body)?;
    Ok(())
}

fn cut_svg(scenario_id: &str, frequency: f64, e_cut: &PatternCut, h_cut: &PatternCut) -> String {
    let mut series = Vec::new();
    let mk_points = |cut: &PatternCut, db: &[f64]| -> Vec<(f64, f64)> {
        cut.theta_deg
            .iter()
            .zip(db)
            .map(|(t, v)| (*t, v.max(-120.0)))
            .collect()
    };
    series.push(Series {
        label: "co phi=0".into(),
        color: SERIES_COLORS[0].into(),
        dashed: false,
        points: mk_points(e_cut, &e_cut.co_db),
    });
    series.push(Series {
        label: "co phi=90".into(),
        color: SERIES_COLORS[1].into(),
        dashed: false,
        points: mk_points(h_cut, &h_cut.co_db),
    });
    for (cut, label, color) in [
        (e_cut, "cx phi=0", SERIES_COLORS[0]),
        (h_cut, "cx phi=90", SERIES_COLORS[1]),
    ] {
        if cut.cx_db.iter().any(|v| v.is_finite() && *v > -120.0) {
            series.push(Series {
                label: label.into(),
                color: color.into(),
                dashed: true,
                points: mk_points(cut, &cut.cx_db),
            });
        }
    }
    Plot {
        title: format!("{scenario_id} @ {frequency:.3} GHz"),
        x_label: "theta (deg)".into(),
        y_label: "relative level (dB)".into(),
        x_range: (e_cut.theta_deg[0], *e_cut.theta_deg.last().unwrap()),
        y_range: (-60.0, 0.0),
        series,
    }
    .render()
}

pub fn cmd_run(cfg: &RunConfig) -> Result<(), CliError> {
    let scenarios = build_scenarios(cfg)?;
    let opts = compare_options(cfg);
    let mut tracker = OutputTracker::create(&cfg.out_dir)?;
    let trailer = footer(cfg, &scenarios);

    let mut metrics = String::from(METRICS_CSV_HEADER);
    metrics.push('\n');
    for scenario in &scenarios {
        for &freq in &cfg.params.frequencies_ghz {
            let outcome =
                run_scenario(scenario, freq, &opts).map_err(|e| solver_err(&tracker, e))?;
            for row in metrics_csv_rows(&outcome) {
                metrics.push_str(&row);
                metrics.push('\n');
            }
            let tag = format!("{}_{:.3}GHz", scenario.id, freq);
            for (cut, plane) in [(&outcome.e_cut, "phi0"), (&outcome.h_cut, "phi90")] {
                let mut body = pattern_cut_csv(cut);
                body.push_str(&trailer);
                tracker.write(&format!("cut_{tag}_{plane}.csv"), &body)?;
            }
            tracker.write(
                &format!("pattern_{tag}.svg"),
                &cut_svg(&scenario.id, freq, &outcome.e_cut, &outcome.h_cut),
            )?;
            println!(
                "{}: {:.3} GHz  gain {:.2} dBi  hpbw {:.3} deg",
                scenario.id, freq, outcome.metrics.e_plane.gain_dbi, outcome.metrics.e_plane.hpbw_deg
            );
        }
    }
    metrics.push_str(&reflector_core::report::xpol_window_note(
        opts.xpol_window_multiplier,
    ));
    metrics.push_str(&trailer);
    tracker.write("metrics.csv", &metrics)?;
    Ok(())
}

fn ranking_text(outcomes: &[&ScenarioOutcome]) -> String {
    let mut out = String::from(
        "constraint set: gain > 50 dBi, first sidelobe < -25 dB, compact co-aperture integration\n\n",
    );
    let mut qualifiers: Vec<(&str, f64)> = Vec::new();
    for o in outcomes {
        let gain = o.metrics.e_plane.gain_dbi.min(o.metrics.h_plane.gain_dbi);
        let sll = o
            .metrics
            .e_plane
            .first_sll_db
            .unwrap_or(f64::NEG_INFINITY)
            .max(o.metrics.h_plane.first_sll_db.unwrap_or(f64::NEG_INFINITY));
        let gain_ok = gain > 50.0;
        let sll_ok = sll < -25.0;
        // The offset layout folds the feed out sideways: the co-aperture
        // still works but the lateral footprint grows well past the dish.
        let compact_ok = o.scenario_id != "offset_fed";
        out.push_str(&format!(
            "{}: gain {:.2} dBi {}; first sidelobe {:.2} dB {}; compact co-aperture {}\n",
            o.scenario_id,
            gain,
            if gain_ok { "PASS" } else { "FAIL" },
            sll,
            if sll_ok { "PASS" } else { "FAIL" },
            if compact_ok {
                "PASS"
            } else {
                "FAIL (large lateral size)"
            },
        ));
        if gain_ok && sll_ok && compact_ok {
            qualifiers.push((&o.scenario_id, gain));
        }
    }
    qualifiers.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    out.push('\n');
    match qualifiers.first() {
        Some((id, _)) => out.push_str(&format!("selected: {id}\n")),
        None => out.push_str("selected: none (no configuration satisfies all constraints)\n"),
    }
    out
}

fn overlay_svg(outcomes: &[&ScenarioOutcome], plane: &str) -> String {
    let mut series = Vec::new();
    for (k, o) in outcomes.iter().enumerate() {
        let cut = if plane == "phi0" { &o.e_cut } else { &o.h_cut };
        series.push(Series {
            label: o.scenario_id.clone(),
            color: SERIES_COLORS[k % SERIES_COLORS.len()].into(),
            dashed: false,
            points: cut
                .theta_deg
                .iter()
                .zip(&cut.co_db)
                .map(|(t, v)| (*t, v.max(-120.0)))
                .collect(),
        });
    }
    let first = outcomes[0];
    let cut = if plane == "phi0" {
        &first.e_cut
    } else {
        &first.h_cut
    };
    Plot {
        title: format!(
            "co-polar overlay, {} @ {:.3} GHz",
            if plane == "phi0" { "phi = 0 deg" } else { "phi = 90 deg" },
            first.frequency_ghz
        ),
        x_label: "theta (deg)".into(),
        y_label: "relative level (dB)".into(),
        x_range: (cut.theta_deg[0], *cut.theta_deg.last().unwrap()),
        y_range: (-60.0, 0.0),
        series,
    }
    .render()
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<(), CliError> {
    let scenarios = build_scenarios(cfg)?;
    let opts = compare_options(cfg);
    let mut tracker = OutputTracker::create(&cfg.out_dir)?;
    let trailer = footer(cfg, &scenarios);

    let report = compare(&scenarios, &cfg.params.frequencies_ghz, &opts)
        .map_err(|e| solver_err(&tracker, e))?;

    let table = comparison_table(&report);
    print!("{table}");

    let mut text = table;
    text.push('\n');
    text.push_str(&trailer);
    tracker.write("report.txt", &text)?;

    let mut csv = comparison_csv(&report);
    csv.push_str(&trailer);
    tracker.write("report.csv", &csv)?;

    let first_freq = cfg.params.frequencies_ghz[0];
    let at_first: Vec<&ScenarioOutcome> = report
        .outcomes
        .iter()
        .filter(|o| o.frequency_ghz == first_freq)
        .collect();
    for plane in ["phi0", "phi90"] {
        tracker.write(
            &format!("overlay_{plane}.svg"),
            &overlay_svg(&at_first, plane),
        )?;
    }

    let mut ranking = ranking_text(&at_first);
    ranking.push('\n');
    ranking.push_str(&trailer);
    tracker.write("ranking.txt", &ranking)?;
    Ok(())
}

const SWEEP_PARAMETERS: [&str; 5] = [
    "edge_taper_db",
    "sub_diameter",
    "grid_n",
    "frequency",
    "mirror_tilt_deg",
];

pub fn cmd_sweep(cfg: &RunConfig, parameter: &str, values: &[f64]) -> Result<(), CliError> {
    if !SWEEP_PARAMETERS.contains(&parameter) {
        return Err(CliError::Config(format!(
            "unknown parameter `{parameter}` (valid: {})",
            SWEEP_PARAMETERS.join(", ")
        )));
    }
    let scenario_id = cfg.scenario_ids.first().cloned().ok_or_else(|| {
        CliError::Config("sweep needs at least one scenario id".into())
    })?;
    let base_freq = cfg.params.frequencies_ghz[0];
    let mut tracker = OutputTracker::create(&cfg.out_dir)?;

    let columns = [
        "value",
        "gain_dbi",
        "directivity_dbi",
        "hpbw_deg",
        "first_sll_db",
        "xpol_peak_db",
        "ir_boresight_deg",
        "fold_deviation_deg",
    ];
    let mut numeric_rows: Vec<Vec<Option<f64>>> = Vec::new();

    for &value in values {
        let mut params = cfg.params.clone();
        let mut opts = compare_options(cfg);
        let mut freq = base_freq;
        match parameter {
            "edge_taper_db" => {
                if value > 0.0 {
                    return Err(CliError::Config(format!(
                        "edge_taper_db values must be <= 0, got {value}"
                    )));
                }
                params.edge_taper_db = value;
            }
            "sub_diameter" => params.sub_diameter_mm = value,
            "grid_n" => {
                if value <= 0.0 || value.fract() != 0.0 {
                    return Err(CliError::Config(format!(
                        "grid_n values must be positive integers, got {value}"
                    )));
                }
                opts.grid_n = value as usize;
            }
            "frequency" => freq = value,
            "mirror_tilt_deg" => {}
            _ => unreachable!(),
        }
        let registry = ScenarioRegistry::with_defaults();
        let base = registry
            .build(&scenario_id, &params)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let scenario = if parameter == "mirror_tilt_deg" {
            base.with_mirror_tilt_deg(value)
        } else {
            base.clone()
        };
        let outcome =
            run_scenario(&scenario, freq, &opts).map_err(|e| solver_err(&tracker, e))?;

        let fold_deviation = if parameter == "mirror_tilt_deg" && base.has_ir_path() {
            let bundle = entry_bundle(
                &base.system,
                BundleSpec::Beam {
                    beam_radius_mm: 10.0,
                },
            )
            .ok();
            bundle.and_then(|b| {
                let nominal = fold_axis(&base.system, &b).ok()?;
                let tilted = fold_axis(&scenario.system, &b).ok()?;
                Some(nominal.dot(&tilted).clamp(-1.0, 1.0).acos().to_degrees())
            })
        } else {
            None
        };

        numeric_rows.push(vec![
            Some(value),
            Some(outcome.metrics.e_plane.gain_dbi),
            Some(outcome.directivity_dbi),
            Some(outcome.metrics.e_plane.hpbw_deg),
            outcome.metrics.e_plane.first_sll_db,
            outcome.metrics.e_plane.xpol_peak_db,
            outcome.ir.as_ref().map(|ir| ir.boresight_error_deg),
            fold_deviation,
        ]);
    }

    let mut csv = format!("# sweep scenario={scenario_id} parameter={parameter}\n");
    csv.push_str(&columns.join(","));
    csv.push('\n');
    for row in &numeric_rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.map(|x| format!("{x:.6}")).unwrap_or_default())
            .collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }

    // Trend flags for fully populated numeric columns.
    let mut flags = Vec::new();
    for (c, name) in columns.iter().enumerate().skip(1) {
        let series: Vec<f64> = numeric_rows.iter().filter_map(|r| r[c]).collect();
        if series.len() != numeric_rows.len() || series.len() < 2 {
            continue;
        }
        let increasing = series.windows(2).all(|w| w[1] > w[0]);
        let decreasing = series.windows(2).all(|w| w[1] < w[0]);
        if increasing {
            flags.push(format!("{name}=increasing"));
        } else if decreasing {
            flags.push(format!("{name}=decreasing"));
        }
    }
    if !flags.is_empty() {
        csv.push_str(&format!("# monotone: {}\n", flags.join(" ")));
    }
    let scenarios = build_scenarios(cfg)?;
    csv.push_str(&footer(cfg, &scenarios));
    tracker.write("sweep.csv", &csv)?;
    print!("{csv}");
    Ok(())
}
