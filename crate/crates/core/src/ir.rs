//! Geometric ray tracing of the infrared channel and co-boresight checks.
//!
//! The IR path is purely specular: a fold element (the IR-reflective film or
//! a dedicated 45° mirror) redirects the side-mounted laser into the antenna
//! axis. Two topologies exist: a compact fold mirror inside the feed cone
//! feeding the Cassegrain expander (mirror → sub → main → exit), and a
//! full-aperture film folding an expanded side beam straight out. Exit rays
//! are screened against the axial silhouettes of the physical obstacles.

use nalgebra::{Point3, Unit, Vector3};

use crate::blockage::{project_obstacle, MaskPrimitive};
use crate::error::{Error, Result};
use crate::geometry::{
    reflect_direction, Hit, Obstacle3D, PlanarMirrorSpec, Ray, ReflectorSystem, Surface,
};

/// Tag for the traced band; no diffraction is modeled at IR wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavelengthClass {
    Ir,
}

/// Entry ray bundle for the IR channel.
#[derive(Debug, Clone)]
pub struct IrBundle {
    pub rays: Vec<Ray>,
    pub wavelength_class: WavelengthClass,
}

impl IrBundle {
    pub fn new(rays: Vec<Ray>) -> Result<Self> {
        if rays.len() < 7 {
            return Err(Error::Configuration(format!(
                "IR bundle needs at least 7 rays (chief + ring), got {}",
                rays.len()
            )));
        }
        Ok(Self {
            rays,
            wavelength_class: WavelengthClass::Ir,
        })
    }
}

/// Outcome of tracing a bundle through the IR chain.
#[derive(Debug, Clone)]
pub struct IrTraceResult {
    pub exit_rays: Vec<Ray>,
    /// Largest angle between any exit ray and the antenna axis.
    pub boresight_error_deg: f64,
    /// Area fraction of the exit bundle stopped by obstacle silhouettes
    /// (equal-area bundles make ray counting an area estimate).
    pub obscuration_fraction: f64,
    pub lost_rays: usize,
}

/// Which optical chain the system's IR-reflective element implies.
enum Topology<'a> {
    /// Full-aperture film: one fold, straight out.
    DirectFold(&'a PlanarMirrorSpec),
    /// Compact fold mirror into the Cassegrain expander.
    FoldedCassegrain(&'a PlanarMirrorSpec),
}

fn classify(system: &ReflectorSystem) -> Result<Topology<'_>> {
    let mirror = system
        .mirror
        .as_ref()
        .filter(|m| m.ir_reflective)
        .ok_or_else(|| {
            Error::Configuration("system has no IR-reflective mirror or film element".into())
        })?;
    if mirror.diameter_mm >= system.main.aperture_diameter_mm {
        Ok(Topology::DirectFold(mirror))
    } else if system.sub.is_some() {
        Ok(Topology::FoldedCassegrain(mirror))
    } else {
        Err(Error::Configuration(
            "compact fold mirror requires a sub-reflector in the chain".into(),
        ))
    }
}

/// How the default bundles are shaped.
#[derive(Debug, Clone, Copy)]
pub enum BundleSpec {
    /// Chief ray plus an 8-ray ring at 80% of the beam radius.
    Beam { beam_radius_mm: f64 },
    /// Chief plus `rings`×`spokes` equal-area samples of the exit aperture.
    FilledAperture { rings: usize, spokes: usize },
}

impl BundleSpec {
    /// Exit-plane target points (x, y) the bundle should cover, paired with
    /// the radius each represents.
    fn targets(&self, full_radius_mm: f64) -> Vec<(f64, f64)> {
        match *self {
            BundleSpec::Beam { beam_radius_mm } => {
                let r = 0.8 * beam_radius_mm.min(full_radius_mm);
                let mut t = vec![(0.0, 0.0)];
                for k in 0..8 {
                    let a = k as f64 / 8.0 * std::f64::consts::TAU;
                    t.push((r * a.cos(), r * a.sin()));
                }
                t
            }
            BundleSpec::FilledAperture { rings, spokes } => {
                let mut t = vec![(0.0, 0.0)];
                for m in 0..rings {
                    let r = full_radius_mm * ((m as f64 + 0.5) / rings as f64).sqrt();
                    for s in 0..spokes {
                        let a = (s as f64 + 0.5 * (m % 2) as f64) / spokes as f64
                            * std::f64::consts::TAU;
                        t.push((r * a.cos(), r * a.sin()));
                    }
                }
                t
            }
        }
    }
}

/// Builds the physical entry bundle (rays leaving the laser port) that maps
/// onto the requested exit coverage for the system's topology.
pub fn entry_bundle(system: &ReflectorSystem, spec: BundleSpec) -> Result<IrBundle> {
    let radius = system.aperture_radius_mm();
    match classify(system)? {
        Topology::DirectFold(film) => {
            // Side beam travelling +y folds up at z = c_z + (y − c_y).
            let c = film.center;
            let y0 = c.y - 2.0 * radius - film.diameter_mm;
            let rays = spec
                .targets(radius)
                .into_iter()
                .map(|(x, y_t)| {
                    Ray::new(
                        Point3::new(x, y0, c.z + (y_t - c.y)),
                        Vector3::new(0.0, 1.0, 0.0),
                    )
                })
                .collect();
            IrBundle::new(rays)
        }
        Topology::FoldedCassegrain(mirror) => {
            // The laser sits on +x so that its mirror image is the feed
            // point; every ray aimed at the mirror then folds into a ray
            // diverging from the feed, i.e. the millimetre-wave path.
            let feed = system.feed_location;
            let z_m = mirror.center.z;
            let arm = z_m - feed.z;
            if arm <= 0.0 {
                return Err(Error::Configuration(
                    "fold mirror must sit between the feed and the sub-reflector".into(),
                ));
            }
            let laser = Point3::new(arm, 0.0, z_m);
            let n = mirror.normal.into_inner();
            let fe = system.equivalent_focal_length_mm;
            let rays = spec
                .targets(radius)
                .into_iter()
                .map(|(x_t, y_t)| {
                    let r = (x_t * x_t + y_t * y_t).sqrt();
                    let theta = 2.0 * (r / (2.0 * fe)).atan();
                    let phi = y_t.atan2(x_t);
                    let d = Vector3::new(
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    );
                    // Crossing of the virtual ray (feed, d) with the mirror
                    // plane gives the aim point.
                    let t = (mirror.center - feed).dot(&n) / d.dot(&n);
                    let aim = feed + d * t;
                    Ray::new(laser, aim - laser)
                })
                .collect();
            IrBundle::new(rays)
        }
    }
}

fn obstacle_silhouettes(system: &ReflectorSystem) -> Vec<(f64, MaskPrimitive)> {
    let up = Unit::new_normalize(Vector3::z());
    system
        .obstacles
        .iter()
        .filter_map(|o| {
            let z = match o {
                Obstacle3D::Disc { center, .. } => center.z,
                Obstacle3D::Rectangle { center, .. } => center.z,
            };
            project_obstacle(o, &up).ok().map(|p| (z, p))
        })
        .collect()
}

fn trace_one(
    chain: &[&dyn Surface],
    ray: &Ray,
) -> Option<Ray> {
    let mut current = ray.clone();
    for surface in chain {
        let Hit { point, normal, t } = surface.intersect(&current)?;
        current = Ray {
            origin: point,
            direction: reflect_direction(&current.direction, &normal),
            path_length_mm: current.path_length_mm + t,
        };
    }
    Some(current)
}

/// Traces the bundle through the IR chain and screens the exit rays against
/// the obstacle silhouettes.
pub fn trace_ir(system: &ReflectorSystem, bundle: &IrBundle) -> Result<IrTraceResult> {
    let topology = classify(system)?;

    let mirror_surface;
    let sub_surface;
    let main_surface;
    let chain: Vec<&dyn Surface> = match &topology {
        Topology::DirectFold(film) => {
            mirror_surface = film.surface();
            vec![&mirror_surface as &dyn Surface]
        }
        Topology::FoldedCassegrain(mirror) => {
            mirror_surface = mirror.surface();
            sub_surface = system.sub.as_ref().unwrap().surface();
            main_surface = system.main_surface();
            vec![
                &mirror_surface as &dyn Surface,
                &sub_surface as &dyn Surface,
                &main_surface as &dyn Surface,
            ]
        }
    };

    let silhouettes = obstacle_silhouettes(system);
    let mut exit_rays = Vec::with_capacity(bundle.rays.len());
    let mut blocked = 0usize;
    let mut missed = 0usize;

    for ray in &bundle.rays {
        let Some(out) = trace_one(&chain, ray) else {
            missed += 1;
            continue;
        };
        // Upward screening of the exit leg.
        let d = out.direction.into_inner();
        let mut is_blocked = false;
        if d.z > 0.0 {
            for (z_obs, prim) in &silhouettes {
                let t = (z_obs - out.origin.z) / d.z;
                if t > 1e-9 {
                    let p = out.origin + d * t;
                    if prim.contains(p.x, p.y) {
                        is_blocked = true;
                        break;
                    }
                }
            }
        }
        if is_blocked {
            blocked += 1;
        } else {
            exit_rays.push(out);
        }
    }

    let boresight_error_deg = exit_rays
        .iter()
        .map(|r| r.direction.dot(&Vector3::z()).clamp(-1.0, 1.0).acos())
        .fold(0.0f64, f64::max)
        .to_degrees();
    let reached_exit = exit_rays.len() + blocked;
    let obscuration_fraction = if reached_exit == 0 {
        0.0
    } else {
        blocked as f64 / reached_exit as f64
    };

    Ok(IrTraceResult {
        exit_rays,
        boresight_error_deg,
        obscuration_fraction,
        lost_rays: blocked + missed,
    })
}

/// Mean beam direction immediately after the fold element; the observable
/// for alignment-perturbation studies (a fold tilt of δ moves this by 2δ).
pub fn fold_axis(system: &ReflectorSystem, bundle: &IrBundle) -> Result<Unit<Vector3<f64>>> {
    let mirror = match classify(system)? {
        Topology::DirectFold(m) | Topology::FoldedCassegrain(m) => m,
    };
    let surface = mirror.surface();
    let mut mean = Vector3::zeros();
    let mut count = 0usize;
    for ray in &bundle.rays {
        if let Some(hit) = surface.intersect(ray) {
            mean += reflect_direction(&ray.direction, &hit.normal).into_inner();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoPath);
    }
    Ok(Unit::new_normalize(mean))
}

/// Scalar angular separation between the MMW beam pointing and the IR exit
/// chief (mean) direction.
pub fn coalignment_report(mmw_pointing_deg: f64, ir: &IrTraceResult) -> Result<f64> {
    if ir.exit_rays.is_empty() {
        return Err(Error::NoPath);
    }
    let mut mean = Vector3::zeros();
    for r in &ir.exit_rays {
        mean += r.direction.into_inner();
    }
    let ir_angle = (mean.normalize().dot(&Vector3::z()))
        .clamp(-1.0, 1.0)
        .acos()
        .to_degrees();
    Ok((ir_angle - mmw_pointing_deg).abs())
}
