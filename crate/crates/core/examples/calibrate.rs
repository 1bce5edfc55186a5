//! Prints the headline metrics for the three baseline scenarios; used to
//! pick the default edge taper and effective mirror silhouette.

use reflector_core::scenario::{run_scenario, BaselineParams, CompareOptions, ScenarioRegistry};

fn main() {
    let mut args = std::env::args().skip(1);
    let taper: f64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(-16.0);
    let eff: f64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(210.0);
    let grid: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(512);

    let params = BaselineParams {
        edge_taper_db: taper,
        mirror_effective_diameter_mm: eff,
        ..BaselineParams::default()
    };
    let opts = CompareOptions {
        grid_n: grid,
        ..CompareOptions::default()
    };
    let registry = ScenarioRegistry::with_defaults();
    println!("taper={taper} dB  mirror_eff={eff} mm  grid={grid}");
    for id in registry.ids() {
        let s = registry.build(id, &params).unwrap();
        let o = run_scenario(&s, 94.0, &opts).unwrap();
        println!(
            "{:>10}: gain E/H = {:.2}/{:.2} dBi  D = {:.2} dBi  hpbw = {:.4}/{:.4} deg  sll = {:?}/{:?} dB  xpol = {:?}/{:?}  spill={:.3} taper={:.3} mask={:.3} film={:.3}",
            id,
            o.metrics.e_plane.gain_dbi,
            o.metrics.h_plane.gain_dbi,
            o.directivity_dbi,
            o.metrics.e_plane.hpbw_deg,
            o.metrics.h_plane.hpbw_deg,
            o.metrics.e_plane.first_sll_db.map(|v| (v * 100.0).round() / 100.0),
            o.metrics.h_plane.first_sll_db.map(|v| (v * 100.0).round() / 100.0),
            o.metrics.e_plane.xpol_peak_db.map(|v| (v * 10.0).round() / 10.0),
            o.metrics.h_plane.xpol_peak_db.map(|v| (v * 10.0).round() / 10.0),
            o.loss_budget.spillover_db,
            o.loss_budget.taper_db,
            o.loss_budget.mask_db,
            o.loss_budget.film_db,
        );
        if let Some(ir) = &o.ir {
            println!(
                "{:>10}  ir: boresight={:.5} deg  obscuration={:.5}  lost={}",
                "", ir.boresight_error_deg, ir.obscuration_fraction, ir.lost_rays
            );
        }
    }
}
