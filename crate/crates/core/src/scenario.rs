//! The three co-aperture configurations as ready-to-run scenarios, behind a
//! name-keyed registry, plus the multi-configuration comparison run.
//!
//! Every dimension that is not derivable from first principles is a
//! baseline assumption carried in [`BaselineParams`] and echoed in the
//! scenario's provenance notes with an `assumed:` marker.

use nalgebra::{Point3, Unit, Vector3};

use crate::blockage::{blockage_area_fraction, project_obstacle, BlockageMask};
use crate::error::{Error, Result};
use crate::feed::{q_from_edge_taper, FeedPattern};
use crate::geometry::{
    synth_cassegrain, synth_offset, Obstacle3D, PlanarMirrorSpec, ReflectorSystem,
};
use crate::ir::{coalignment_report, entry_bundle, trace_ir, BundleSpec};
use crate::metrics::{extract_report, MetricsReport};
use crate::solver::{
    aperture_field, directivity, far_field_cut, ApertureField, LossBudget, PatternCut,
    SolverOptions,
};

/// Shared baseline dimensions and model assumptions. The comparison keeps
/// these identical across configurations so differences isolate the
/// configuration effects.
#[derive(Debug, Clone)]
pub struct BaselineParams {
    pub main_diameter_mm: f64,
    pub main_focal_length_mm: f64,
    pub sub_diameter_mm: f64,
    pub magnification: f64,
    /// Feed edge taper at the design half-angle.
    pub edge_taper_db: f64,
    pub edge_taper_angle_deg: f64,
    pub offset_parent_focal_mm: f64,
    pub offset_clearance_mm: f64,
    /// Full-aperture film insertion loss for the config with the film above
    /// the sub-reflector.
    pub film_loss_db: f64,
    /// Glass support plate: diameter factor on the sub diameter, and loss.
    pub plate_diameter_factor: f64,
    pub plate_loss_db: f64,
    /// Physical diameter of the 45° fold mirror.
    pub mirror_diameter_mm: f64,
    /// Effective opaque silhouette diameter of the tilted mirror assembly in
    /// the outgoing beam (scattering cross-section, not the physical size).
    pub mirror_effective_diameter_mm: f64,
    pub frequencies_ghz: Vec<f64>,
    pub phase_center_offset_mm: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            main_diameter_mm: 500.0,
            main_focal_length_mm: 190.0,
            sub_diameter_mm: 60.0,
            magnification: 5.0,
            edge_taper_db: -17.0,
            edge_taper_angle_deg: 15.0,
            offset_parent_focal_mm: 900.0,
            offset_clearance_mm: 50.0,
            film_loss_db: 0.2,
            plate_diameter_factor: 1.5,
            plate_loss_db: 0.5,
            mirror_diameter_mm: 90.0,
            mirror_effective_diameter_mm: 210.0,
            frequencies_ghz: vec![94.0],
            phase_center_offset_mm: 0.0,
        }
    }
}

/// One ready-to-run configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub system: ReflectorSystem,
    pub feed: FeedPattern,
    pub mask: BlockageMask,
    /// Uniform full-aperture loss applied in the budget, not the samples.
    pub film_loss_db: f64,
    pub frequencies_ghz: Vec<f64>,
    /// Provenance for every assumed dimension.
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn has_ir_path(&self) -> bool {
        self.system
            .mirror
            .as_ref()
            .map(|m| m.ir_reflective)
            .unwrap_or(false)
    }

    /// Same scenario with the IR fold mirror tilted about the in-plane axis
    /// perpendicular to the fold's incidence plane.
    pub fn with_mirror_tilt_deg(&self, tilt_deg: f64) -> Scenario {
        let mut out = self.clone();
        if let Some(mirror) = &mut out.system.mirror {
            let rot = nalgebra::Rotation3::from_axis_angle(
                &Unit::new_normalize(Vector3::y()),
                tilt_deg.to_radians(),
            );
            mirror.normal = Unit::new_normalize(rot * mirror.normal.into_inner());
        }
        out
    }
}

/// A configuration recipe, registered by id and selected at runtime.
pub trait ScenarioBuilder: Send + Sync {
    fn id(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn build(&self, params: &BaselineParams) -> Result<Scenario>;
}

fn shared_feed(params: &BaselineParams) -> Result<(FeedPattern, Vec<String>)> {
    let q = q_from_edge_taper(params.edge_taper_db, params.edge_taper_angle_deg)?;
    let mut feed = FeedPattern::cos_q_balanced(q);
    feed.phase_center_offset_mm = params.phase_center_offset_mm;
    let notes = vec![format!(
        "assumed: feed edge taper {} dB at {} deg (cos-q exponent q = {:.2})",
        params.edge_taper_db, params.edge_taper_angle_deg, q
    )];
    Ok((feed, notes))
}

fn cassegrain_notes(params: &BaselineParams) -> Vec<String> {
    vec![
        format!(
            "assumed: main reflector D = {} mm, F = {} mm (reverse-engineered desk baseline)",
            params.main_diameter_mm, params.main_focal_length_mm
        ),
        format!(
            "assumed: sub-reflector Ds = {} mm, magnification M = {}",
            params.sub_diameter_mm, params.magnification
        ),
    ]
}

/// Axial position of the fold-mirror centre: midway between the feed point
/// and the sub-reflector vertex.
fn fold_mirror_center_z(system: &ReflectorSystem) -> f64 {
    let sub = system.sub.as_ref().expect("back-fed system has a sub");
    let vertex_z = sub.center_z_mm + sub.semi_transverse_mm();
    0.5 * (system.feed_location.z + vertex_z)
}

struct OffsetFed;

impl ScenarioBuilder for OffsetFed {
    fn id(&self) -> &'static str {
        "offset_fed"
    }

    fn description(&self) -> &'static str {
        "offset paraboloid section, feed clear of the aperture, no blockage"
    }

    fn build(&self, params: &BaselineParams) -> Result<Scenario> {
        let system = synth_offset(
            params.offset_parent_focal_mm,
            params.main_diameter_mm,
            params.offset_clearance_mm,
        )?;
        let (feed, mut notes) = shared_feed(params)?;
        notes.push(format!(
            "assumed: offset parent focal length {} mm, rim clearance {} mm",
            params.offset_parent_focal_mm, params.offset_clearance_mm
        ));
        notes.push("assumed: single-offset equivalent of the folded offset feed train".into());
        Ok(Scenario {
            id: self.id().into(),
            system,
            feed,
            mask: BlockageMask::empty(),
            film_loss_db: 0.0,
            frequencies_ghz: params.frequencies_ghz.clone(),
            notes,
        })
    }
}

struct BackfedA;

impl ScenarioBuilder for BackfedA {
    fn id(&self) -> &'static str {
        "backfed_a"
    }

    fn description(&self) -> &'static str {
        "back-fed Cassegrain with a 45-deg fold mirror and support plate inside the feed cone"
    }

    fn build(&self, params: &BaselineParams) -> Result<Scenario> {
        let mut system = synth_cassegrain(
            params.main_diameter_mm,
            params.main_focal_length_mm,
            params.sub_diameter_mm,
            params.magnification,
        )?;
        let (feed, mut notes) = shared_feed(params)?;
        notes.extend(cassegrain_notes(params));

        let z_m = fold_mirror_center_z(&system);
        let up = Unit::new_normalize(Vector3::z());
        let mirror = PlanarMirrorSpec {
            center: Point3::new(0.0, 0.0, z_m),
            normal: Unit::new_normalize(Vector3::new(1.0, 0.0, 1.0)),
            diameter_mm: params.mirror_diameter_mm,
            mmw_transmission_db: params.film_loss_db,
            ir_reflective: true,
        };
        let plate = Obstacle3D::Disc {
            center: Point3::new(0.0, 0.0, z_m),
            normal: up,
            radius_mm: params.plate_diameter_factor * params.sub_diameter_mm / 2.0,
            transmission: 10f64.powf(-params.plate_loss_db / 20.0),
        };
        let mirror_obstacle = Obstacle3D::Disc {
            center: mirror.center,
            normal: mirror.normal,
            radius_mm: mirror.diameter_mm / 2.0,
            transmission: 0.0,
        };
        // Effective shadow of the tilted mirror assembly in the outgoing
        // beam: obstacles near the feed shadow a magnified patch, and the
        // deflected part of the transit leaves the coherent beam entirely.
        let mirror_effective = Obstacle3D::Disc {
            center: mirror.center,
            normal: mirror.normal,
            radius_mm: params.mirror_effective_diameter_mm / 2.0,
            transmission: 0.0,
        };

        let sub_shadow = system.obstacles[0].clone();
        let mut mask = BlockageMask::empty();
        for obstacle in [&sub_shadow, &plate, &mirror_effective] {
            mask.primitives.push(project_obstacle(obstacle, &up)?);
        }
        system.obstacles.push(plate);
        system.obstacles.push(mirror_obstacle);
        system.mirror = Some(mirror);

        notes.push(format!(
            "assumed: glass support plate {} mm dia, {} dB transit loss",
            params.plate_diameter_factor * params.sub_diameter_mm,
            params.plate_loss_db
        ));
        notes.push(format!(
            "assumed: fold mirror {} mm dia at z = {:.1} mm; effective opaque silhouette {} mm dia in the outgoing beam",
            params.mirror_diameter_mm, z_m, params.mirror_effective_diameter_mm
        ));
        Ok(Scenario {
            id: self.id().into(),
            system,
            feed,
            mask,
            film_loss_db: 0.0,
            frequencies_ghz: params.frequencies_ghz.clone(),
            notes,
        })
    }
}

struct BackfedB;

impl ScenarioBuilder for BackfedB {
    fn id(&self) -> &'static str {
        "backfed_b"
    }

    fn description(&self) -> &'static str {
        "back-fed Cassegrain with an IR-reflective, MMW-transmissive film; sub blockage only"
    }

    fn build(&self, params: &BaselineParams) -> Result<Scenario> {
        let mut system = synth_cassegrain(
            params.main_diameter_mm,
            params.main_focal_length_mm,
            params.sub_diameter_mm,
            params.magnification,
        )?;
        let (feed, mut notes) = shared_feed(params)?;
        notes.extend(cassegrain_notes(params));

        let up = Unit::new_normalize(Vector3::z());
        let mut mask = BlockageMask::empty();
        mask.primitives
            .push(project_obstacle(&system.obstacles[0], &up)?);

        // The film is MMW-transparent, so it contributes no shadow; its IR
        // action is modeled as an equivalent fold placing the IR virtual
        // source at the feed point.
        let z_m = fold_mirror_center_z(&system);
        system.mirror = Some(PlanarMirrorSpec {
            center: Point3::new(0.0, 0.0, z_m),
            normal: Unit::new_normalize(Vector3::new(1.0, 0.0, 1.0)),
            diameter_mm: params.mirror_diameter_mm,
            mmw_transmission_db: 0.0,
            ir_reflective: true,
        });

        notes.push(format!(
            "assumed: film insertion loss {} dB, uniform over the aperture",
            params.film_loss_db
        ));
        notes.push("assumed: film IR optics reduced to an equivalent feed-point fold".into());
        Ok(Scenario {
            id: self.id().into(),
            system,
            feed,
            mask,
            film_loss_db: params.film_loss_db,
            frequencies_ghz: params.frequencies_ghz.clone(),
            notes,
        })
    }
}

/// Name-keyed registry of scenario builders.
pub struct ScenarioRegistry {
    builders: Vec<Box<dyn ScenarioBuilder>>,
}

impl ScenarioRegistry {
    /// Registry with the three standard configurations.
    pub fn with_defaults() -> Self {
        Self {
            builders: vec![Box::new(OffsetFed), Box::new(BackfedA), Box::new(BackfedB)],
        }
    }

    pub fn register(&mut self, builder: Box<dyn ScenarioBuilder>) {
        self.builders.push(builder);
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.builders.iter().map(|b| b.id()).collect()
    }

    pub fn get(&self, id: &str) -> Result<&dyn ScenarioBuilder> {
        self.builders
            .iter()
            .find(|b| b.id() == id)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownScenario(id.to_string()))
    }

    pub fn build(&self, id: &str, params: &BaselineParams) -> Result<Scenario> {
        self.get(id)?.build(params)
    }
}

/// Builds a baseline scenario by id with all default parameters.
pub fn build_scenario(id: &str) -> Result<Scenario> {
    ScenarioRegistry::with_defaults().build(id, &BaselineParams::default())
}

/// Knobs for a comparison run.
#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub grid_n: usize,
    pub theta_half_range_deg: f64,
    pub cut_points: usize,
    pub xpol_window_multiplier: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            grid_n: 1024,
            theta_half_range_deg: 3.0,
            cut_points: 1201,
            xpol_window_multiplier: 3.0,
        }
    }
}

/// IR channel summary attached to a scenario outcome.
#[derive(Debug, Clone)]
pub struct IrSummary {
    pub boresight_error_deg: f64,
    pub obscuration_fraction: f64,
    pub lost_rays: usize,
    pub coalignment_deg: f64,
}

/// Everything measured for one (scenario, frequency) pair.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub scenario_id: String,
    pub frequency_ghz: f64,
    pub metrics: MetricsReport,
    pub directivity_dbi: f64,
    pub loss_budget: LossBudget,
    pub blockage_fraction: f64,
    pub e_cut: PatternCut,
    pub h_cut: PatternCut,
    pub ir: Option<IrSummary>,
}

/// Three-way (or n-way) comparison output.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub outcomes: Vec<ScenarioOutcome>,
    /// Scenario ids best-first by realized gain at the first frequency.
    pub ranking_by_gain: Vec<String>,
    /// Scenario ids best-first by worst-plane first sidelobe level.
    pub ranking_by_sll: Vec<String>,
    pub assumed_notes: Vec<String>,
}

/// Solves one scenario at one frequency: aperture field, both principal
/// cuts, metrics and the IR summary when a path exists.
pub fn run_scenario(
    scenario: &Scenario,
    frequency_ghz: f64,
    opts: &CompareOptions,
) -> Result<ScenarioOutcome> {
    let attach = |e: Error| Error::Scenario {
        id: scenario.id.clone(),
        source: Box::new(e),
    };
    let solver_opts = SolverOptions {
        grid_n: opts.grid_n,
        film_loss_db: scenario.film_loss_db,
    };
    let field: ApertureField = aperture_field(
        &scenario.system,
        &scenario.feed,
        frequency_ghz,
        &scenario.mask,
        &solver_opts,
    )
    .map_err(attach)?;
    let range = opts.theta_half_range_deg;
    let e_cut = far_field_cut(&field, 0.0, -range, range, opts.cut_points).map_err(attach)?;
    let h_cut = far_field_cut(&field, 90.0, -range, range, opts.cut_points).map_err(attach)?;
    let metrics = extract_report(&scenario.id, &e_cut, &h_cut, opts.xpol_window_multiplier)
        .map_err(attach)?;
    let gain = directivity(&field).map_err(attach)?;

    let ir = if scenario.has_ir_path() {
        let bundle = entry_bundle(
            &scenario.system,
            BundleSpec::FilledAperture {
                rings: 512,
                spokes: 16,
            },
        )
        .map_err(attach)?;
        let trace = trace_ir(&scenario.system, &bundle).map_err(attach)?;
        let coalignment =
            coalignment_report(metrics.e_plane.pointing_deg, &trace).unwrap_or(f64::NAN);
        Some(IrSummary {
            boresight_error_deg: trace.boresight_error_deg,
            obscuration_fraction: trace.obscuration_fraction,
            lost_rays: trace.lost_rays,
            coalignment_deg: coalignment,
        })
    } else {
        None
    };

    Ok(ScenarioOutcome {
        scenario_id: scenario.id.clone(),
        frequency_ghz,
        metrics,
        directivity_dbi: gain.directivity_dbi,
        loss_budget: field.loss_budget,
        blockage_fraction: blockage_area_fraction(
            &scenario.mask,
            scenario.system.main.aperture_diameter_mm,
            1024,
        ),
        e_cut,
        h_cut,
        ir,
    })
}

/// Runs every (scenario, frequency) pair and assembles the ranked report.
pub fn compare(
    scenarios: &[Scenario],
    frequencies_ghz: &[f64],
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    if scenarios.is_empty() || frequencies_ghz.is_empty() {
        return Err(Error::Configuration(
            "comparison needs at least one scenario and one frequency".into(),
        ));
    }
    let mut outcomes = Vec::new();
    for scenario in scenarios {
        for &f in frequencies_ghz {
            outcomes.push(run_scenario(scenario, f, opts)?);
        }
    }

    let first_freq = frequencies_ghz[0];
    let mut by_gain: Vec<&ScenarioOutcome> = outcomes
        .iter()
        .filter(|o| o.frequency_ghz == first_freq)
        .collect();
    by_gain.sort_by(|a, b| {
        b.metrics
            .e_plane
            .gain_dbi
            .partial_cmp(&a.metrics.e_plane.gain_dbi)
            .unwrap()
    });
    let ranking_by_gain = by_gain.iter().map(|o| o.scenario_id.clone()).collect();

    let worst_sll = |o: &ScenarioOutcome| -> f64 {
        let e = o.metrics.e_plane.first_sll_db.unwrap_or(f64::NEG_INFINITY);
        let h = o.metrics.h_plane.first_sll_db.unwrap_or(f64::NEG_INFINITY);
        e.max(h)
    };
    let mut by_sll: Vec<&ScenarioOutcome> = outcomes
        .iter()
        .filter(|o| o.frequency_ghz == first_freq)
        .collect();
    by_sll.sort_by(|a, b| worst_sll(a).partial_cmp(&worst_sll(b)).unwrap());
    let ranking_by_sll = by_sll.iter().map(|o| o.scenario_id.clone()).collect();

    let mut assumed_notes = Vec::new();
    for s in scenarios {
        for n in &s.notes {
            assumed_notes.push(format!("{}: {}", s.id, n));
        }
    }

    Ok(ComparisonReport {
        outcomes,
        ranking_by_gain,
        ranking_by_sll,
        assumed_notes,
    })
}
