//! Reflector geometry: specs, synthesis and the assembled system.
//!
//! Lengths are millimetres, angles degrees unless a name says otherwise.
//! The main-reflector axis is +z; the dish opens toward +z and the exit
//! beam leaves along +z.

pub mod ray;
pub mod surface;

pub use ray::{reflect_direction, reflect_field, Ray};
pub use surface::{Hit, Hyperboloid, Paraboloid, PlanarMirror, Surface};

use nalgebra::{Point3, Unit, Vector3};

use crate::error::{Error, Result};

/// Main-reflector paraboloid parameters. `offset_height_mm` is the height of
/// the projected rim-circle centre above the parent axis (0 for symmetric).
#[derive(Debug, Clone, PartialEq)]
pub struct ParaboloidSpec {
    pub focal_length_mm: f64,
    pub aperture_diameter_mm: f64,
    pub offset_height_mm: f64,
    pub clearance_mm: f64,
}

/// Sub-reflector hyperboloid. Parameterized by eccentricity and interfocal
/// distance; the magnification is the user-facing knob on the system.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidSpec {
    pub eccentricity: f64,
    pub interfocal_distance_mm: f64,
    pub diameter_mm: f64,
    /// Axial position of the conic centre (midpoint between the foci).
    pub center_z_mm: f64,
}

impl HyperboloidSpec {
    pub fn semi_transverse_mm(&self) -> f64 {
        self.interfocal_distance_mm / 2.0 / self.eccentricity
    }

    pub fn semi_conjugate_mm(&self) -> f64 {
        let c = self.interfocal_distance_mm / 2.0;
        let a = self.semi_transverse_mm();
        (c * c - a * a).sqrt()
    }

    /// Focus on the main-reflector side (virtual focus of the reflected cone).
    pub fn upper_focus_z_mm(&self) -> f64 {
        self.center_z_mm + self.interfocal_distance_mm / 2.0
    }

    /// Feed-side focus.
    pub fn lower_focus_z_mm(&self) -> f64 {
        self.center_z_mm - self.interfocal_distance_mm / 2.0
    }

    pub fn surface(&self) -> Hyperboloid {
        Hyperboloid {
            semi_transverse_mm: self.semi_transverse_mm(),
            semi_conjugate_mm: self.semi_conjugate_mm(),
            center_z_mm: self.center_z_mm,
            rim_diameter_mm: self.diameter_mm,
        }
    }
}

/// Flat mirror / film element: reflective at infrared, transmissive at
/// millimetre waves with the stated insertion loss.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMirrorSpec {
    pub center: Point3<f64>,
    pub normal: Unit<Vector3<f64>>,
    pub diameter_mm: f64,
    pub mmw_transmission_db: f64,
    pub ir_reflective: bool,
}

impl PlanarMirrorSpec {
    pub fn surface(&self) -> PlanarMirror {
        PlanarMirror {
            center: self.center,
            normal: self.normal,
            radius_mm: self.diameter_mm / 2.0,
        }
    }
}

/// A physical obstruction that can shadow the aperture.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle3D {
    Disc {
        center: Point3<f64>,
        normal: Unit<Vector3<f64>>,
        radius_mm: f64,
        /// Amplitude transmission of the shadowed region, 0 = opaque.
        transmission: f64,
    },
    Rectangle {
        center: Point3<f64>,
        normal: Unit<Vector3<f64>>,
        x_axis: Unit<Vector3<f64>>,
        half_extents_mm: (f64, f64),
        transmission: f64,
    },
}

/// Complete geometry of one antenna configuration.
#[derive(Debug, Clone)]
pub struct ReflectorSystem {
    pub main: ParaboloidSpec,
    pub sub: Option<HyperboloidSpec>,
    pub mirror: Option<PlanarMirrorSpec>,
    pub feed_location: Point3<f64>,
    pub magnification: f64,
    pub equivalent_focal_length_mm: f64,
    pub feed_half_angle_deg: f64,
    pub obstacles: Vec<Obstacle3D>,
}

impl ReflectorSystem {
    pub fn aperture_center_xy(&self) -> (f64, f64) {
        (0.0, self.main.offset_height_mm)
    }

    pub fn aperture_radius_mm(&self) -> f64 {
        self.main.aperture_diameter_mm / 2.0
    }

    pub fn is_offset(&self) -> bool {
        self.main.offset_height_mm != 0.0
    }

    pub fn main_surface(&self) -> Paraboloid {
        Paraboloid {
            focal_length_mm: self.main.focal_length_mm,
            rim_center_xy: self.aperture_center_xy(),
            rim_radius_mm: self.aperture_radius_mm(),
        }
    }

    /// Primary focus of the main paraboloid.
    pub fn primary_focus(&self) -> Point3<f64> {
        Point3::new(0.0, 0.0, self.main.focal_length_mm)
    }

    /// Checks the construction invariants; synthesis always returns systems
    /// that pass.
    pub fn validate(&self) -> Result<()> {
        let fe = self.magnification * self.main.focal_length_mm;
        if (self.equivalent_focal_length_mm - fe).abs() > 1e-9 * fe.abs().max(1.0) {
            return Err(Error::DegenerateGeometry(format!(
                "equivalent focal length {} != magnification x focal length {}",
                self.equivalent_focal_length_mm, fe
            )));
        }
        if !(self.feed_half_angle_deg > 0.0 && self.feed_half_angle_deg < 90.0) {
            return Err(Error::DegenerateGeometry(format!(
                "feed half-angle {} deg outside (0, 90)",
                self.feed_half_angle_deg
            )));
        }
        Ok(())
    }
}

/// Synthesizes a symmetric Cassegrain from the main aperture, main focal
/// length, sub-reflector diameter and magnification.
///
/// Uses the classical relations e = (M+1)/(M−1), Fe = M·F and the rim
/// condition that the sub edge lies on both the main-rim cone from the
/// primary focus and the feed cone from the secondary focus.
pub fn synth_cassegrain(
    main_diameter_mm: f64,
    main_focal_length_mm: f64,
    sub_diameter_mm: f64,
    magnification: f64,
) -> Result<ReflectorSystem> {
    if magnification <= 1.0 {
        return Err(Error::DegenerateGeometry(format!(
            "magnification {magnification} <= 1 puts the secondary focus at infinity or behind the dish"
        )));
    }
    if sub_diameter_mm >= main_diameter_mm {
        return Err(Error::BlockageDominates {
            sub_mm: sub_diameter_mm,
            main_mm: main_diameter_mm,
        });
    }
    if main_diameter_mm <= 0.0 || main_focal_length_mm <= 0.0 || sub_diameter_mm <= 0.0 {
        return Err(Error::DegenerateGeometry(
            "diameters and focal length must be positive".into(),
        ));
    }

    let d = main_diameter_mm;
    let f = main_focal_length_mm;
    let m = magnification;
    let fe = m * f;
    let ecc = (m + 1.0) / (m - 1.0);
    let theta0 = 2.0 * (d / (4.0 * f)).atan();
    let theta_e = 2.0 * (d / (4.0 * fe)).atan();

    let rim_r = sub_diameter_mm / 2.0;
    let z_rim = f - rim_r / theta0.tan();
    let z_feed = z_rim - rim_r / theta_e.tan();
    let interfocal = f - z_feed;
    let center_z = (f + z_feed) / 2.0;

    let sub = HyperboloidSpec {
        eccentricity: ecc,
        interfocal_distance_mm: interfocal,
        diameter_mm: sub_diameter_mm,
        center_z_mm: center_z,
    };

    let z_axis = Unit::new_normalize(Vector3::z());
    let system = ReflectorSystem {
        main: ParaboloidSpec {
            focal_length_mm: f,
            aperture_diameter_mm: d,
            offset_height_mm: 0.0,
            clearance_mm: 0.0,
        },
        sub: Some(sub),
        mirror: None,
        feed_location: Point3::new(0.0, 0.0, z_feed),
        magnification: m,
        equivalent_focal_length_mm: fe,
        feed_half_angle_deg: theta_e.to_degrees(),
        obstacles: vec![Obstacle3D::Disc {
            center: Point3::new(0.0, 0.0, z_rim),
            normal: z_axis,
            radius_mm: rim_r,
            transmission: 0.0,
        }],
    };
    system.validate()?;
    Ok(system)
}

/// Synthesizes an unblocked offset paraboloid section fed from the parent
/// focus. The projected aperture is a circle of the given diameter whose
/// lower rim clears the feed axis by `clearance_mm`.
pub fn synth_offset(
    parent_focal_length_mm: f64,
    aperture_diameter_mm: f64,
    clearance_mm: f64,
) -> Result<ReflectorSystem> {
    if parent_focal_length_mm <= 0.0 || aperture_diameter_mm <= 0.0 || clearance_mm < 0.0 {
        return Err(Error::DegenerateGeometry(
            "focal length and diameter must be positive, clearance non-negative".into(),
        ));
    }
    let f = parent_focal_length_mm;
    let d = aperture_diameter_mm;
    let upper = clearance_mm + d;
    // Rim angle from the focus reaches 90 deg when y = 2F.
    if upper >= 2.0 * f {
        return Err(Error::DegenerateGeometry(format!(
            "upper rim at {upper} mm subtends >= 90 deg for focal length {f} mm"
        )));
    }
    let offset_height = clearance_mm + d / 2.0;

    // Widest angle between the feed boresight (aimed at the section centre)
    // and a rim direction, evaluated on a sampled rim.
    let boresight_theta = 2.0 * (offset_height / (2.0 * f)).atan();
    let section = Paraboloid {
        focal_length_mm: f,
        rim_center_xy: (0.0, offset_height),
        rim_radius_mm: d / 2.0,
    };
    let focus = Point3::new(0.0, 0.0, f);
    let boresight = Vector3::new(0.0, boresight_theta.sin(), -boresight_theta.cos());
    let mut max_angle: f64 = 0.0;
    for k in 0..64 {
        let (p, _) = section.surface_point(1.0, k as f64 / 64.0)?;
        let dir = (p - focus).normalize();
        max_angle = max_angle.max(dir.dot(&boresight).clamp(-1.0, 1.0).acos());
    }

    let system = ReflectorSystem {
        main: ParaboloidSpec {
            focal_length_mm: f,
            aperture_diameter_mm: d,
            offset_height_mm: offset_height,
            clearance_mm,
        },
        sub: None,
        mirror: None,
        feed_location: focus,
        magnification: 1.0,
        equivalent_focal_length_mm: f,
        feed_half_angle_deg: max_angle.to_degrees(),
        obstacles: Vec::new(),
    };
    system.validate()?;
    Ok(system)
}

/// Feed-frame basis for a system: boresight `z_f`, plus `x_f`/`y_f`
/// completing a right-handed frame. For symmetric systems the boresight is
/// the downward axis; for offset systems it points from the focus to the
/// section centre.
pub fn feed_frame(system: &ReflectorSystem) -> [Vector3<f64>; 3] {
    let x_f = Vector3::x();
    let z_f = if system.is_offset() {
        let h0 = system.main.offset_height_mm;
        let tilt = 2.0 * (h0 / (2.0 * system.main.focal_length_mm)).atan();
        Vector3::new(0.0, tilt.sin(), -tilt.cos())
    } else {
        -Vector3::z()
    };
    let y_f = z_f.cross(&x_f);
    [x_f, y_f, z_f]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cassegrain_closed_forms_baseline() {
        let sys = synth_cassegrain(500.0, 190.0, 60.0, 5.0).unwrap();
        let sub = sys.sub.as_ref().unwrap();
        assert!((sub.eccentricity - 1.5).abs() < 1e-12);
        assert!((sys.equivalent_focal_length_mm - 950.0).abs() < 1e-12);
        assert!((sys.feed_half_angle_deg - 15.0).abs() < 0.02);
    }

    #[test]
    fn cassegrain_closed_forms_m3() {
        let sys = synth_cassegrain(500.0, 190.0, 60.0, 3.0).unwrap();
        let sub = sys.sub.as_ref().unwrap();
        assert!((sub.eccentricity - 2.0).abs() < 1e-12);
        assert!((sys.equivalent_focal_length_mm - 570.0).abs() < 1e-12);
    }

    #[test]
    fn cassegrain_unit_magnification_degenerate() {
        assert!(matches!(
            synth_cassegrain(500.0, 190.0, 60.0, 1.0),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn cassegrain_oversized_sub_rejected() {
        assert!(matches!(
            synth_cassegrain(500.0, 190.0, 500.0, 5.0),
            Err(Error::BlockageDominates { .. })
        ));
    }

    #[test]
    fn cassegrain_sub_rim_lies_on_hyperboloid() {
        let sys = synth_cassegrain(500.0, 190.0, 60.0, 5.0).unwrap();
        let sub = sys.sub.as_ref().unwrap();
        let surf = sub.surface();
        let theta0 = 2.0 * (500.0f64 / (4.0 * 190.0)).atan();
        let z_rim_expected = 190.0 - 30.0 / theta0.tan();
        assert!((surf.z_at(30.0) - z_rim_expected).abs() < 1e-9);
        // Foci sit at the primary focus and the feed.
        assert!((sub.upper_focus_z_mm() - 190.0).abs() < 1e-9);
        assert!((sub.lower_focus_z_mm() - sys.feed_location.z).abs() < 1e-9);
    }

    #[test]
    fn offset_geometry_example() {
        let sys = synth_offset(400.0, 500.0, 50.0).unwrap();
        assert!((sys.main.offset_height_mm - 300.0).abs() < 1e-12);
        assert!(sys.obstacles.is_empty());
        assert!(sys.sub.is_none());
    }

    #[test]
    fn offset_zero_clearance_ok() {
        let sys = synth_offset(400.0, 500.0, 0.0).unwrap();
        assert!((sys.main.offset_height_mm - 250.0).abs() < 1e-12);
    }

    #[test]
    fn offset_rim_past_ninety_degrees_rejected() {
        assert!(matches!(
            synth_offset(400.0, 500.0, 300.0),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn offset_rim_projects_to_circle() {
        let sys = synth_offset(400.0, 500.0, 50.0).unwrap();
        let surf = sys.main_surface();
        for k in 0..97 {
            let (p, _) = surf.surface_point(1.0, k as f64 / 97.0).unwrap();
            let dx = p.x;
            let dy = p.y - 300.0;
            assert!((dx * dx + dy * dy).sqrt() - 250.0 < 1e-9);
        }
    }

    #[test]
    fn paraboloid_vertex_and_depth() {
        let surf = Paraboloid::symmetric(190.0, 500.0);
        let (p, n) = surf.surface_point(0.0, 0.0).unwrap();
        assert!(p.coords.norm() < 1e-12);
        assert!((n.into_inner() - Vector3::z()).norm() < 1e-12);
        let (p, _) = surf.surface_point(1.0, 0.0).unwrap();
        assert!((p.z - 250.0 * 250.0 / (4.0 * 190.0)).abs() < 1e-9);
        assert!((p.z - 82.2368421).abs() < 1e-6);
    }

    #[test]
    fn paraboloid_out_of_domain() {
        let surf = Paraboloid::symmetric(190.0, 500.0);
        assert!(matches!(
            surf.surface_point(1.5, 0.0),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn axial_ray_reflects_back_from_vertex() {
        let surf = Paraboloid::symmetric(190.0, 500.0);
        let ray = Ray::new(Point3::new(0.0, 0.0, 190.0), Vector3::new(0.0, 0.0, -1.0));
        let hit = surf.intersect(&ray).unwrap();
        assert!(hit.point.coords.norm() < 1e-9);
        let out = reflect_direction(&ray.direction, &hit.normal);
        assert!((out.into_inner() - Vector3::z()).norm() < 1e-12);
    }

    #[test]
    fn focus_rays_exit_parallel_to_axis() {
        let surf = Paraboloid::symmetric(190.0, 500.0);
        let focus = Point3::new(0.0, 0.0, 190.0);
        for k in 0..1000 {
            let frac = (k as f64 + 0.5) / 1000.0;
            let (p, _) = surf
                .surface_point(frac.sqrt(), (k as f64 * 0.618034) % 1.0)
                .unwrap();
            let ray = Ray::new(focus, p - focus);
            let hit = surf.intersect(&ray).unwrap();
            let out = reflect_direction(&ray.direction, &hit.normal);
            let angle = out.dot(&Vector3::z()).clamp(-1.0, 1.0).acos();
            assert!(angle < 1e-9, "direction error {angle} rad at u={frac}");
        }
    }

    #[test]
    fn secondary_focus_rays_pass_through_primary_focus() {
        let sys = synth_cassegrain(500.0, 190.0, 60.0, 5.0).unwrap();
        let sub = sys.sub.as_ref().unwrap().surface();
        let feed = sys.feed_location;
        let primary = sys.primary_focus();
        for k in 0..1000 {
            let frac = 0.999 * (k as f64 + 0.5) / 1000.0;
            let (p, _) = sub
                .surface_point(frac.sqrt(), (k as f64 * 0.618034) % 1.0)
                .unwrap();
            let ray = Ray::new(feed, p - feed);
            let hit = sub.intersect(&ray).unwrap();
            let out = reflect_direction(&ray.direction, &hit.normal);
            // Reflected ray extended backwards passes through the primary
            // focus: distance from the focus to the reflected line ~ 0.
            let to_focus = primary - hit.point;
            let cross = to_focus.cross(&out.into_inner());
            assert!(
                cross.norm() < 1e-9 * to_focus.norm().max(1.0),
                "miss distance {} mm",
                cross.norm()
            );
        }
    }

    #[test]
    fn cassegrain_equal_path_lengths() {
        let sys = synth_cassegrain(500.0, 190.0, 60.0, 5.0).unwrap();
        let sub = sys.sub.as_ref().unwrap().surface();
        let main = sys.main_surface();
        let z_plane = 200.0;
        let mut paths = Vec::new();
        for k in 0..512 {
            let frac = 0.02 + 0.96 * (k as f64 + 0.5) / 512.0;
            let (p, _) = sub
                .surface_point(frac.sqrt(), (k as f64 * 0.618034) % 1.0)
                .unwrap();
            let mut ray = Ray::new(sys.feed_location, p - sys.feed_location);
            let hit = sub.intersect(&ray).unwrap();
            ray = Ray {
                origin: hit.point,
                direction: reflect_direction(&ray.direction, &hit.normal),
                path_length_mm: ray.path_length_mm + hit.t,
            };
            let hit = main.intersect(&ray).unwrap();
            ray = Ray {
                origin: hit.point,
                direction: reflect_direction(&ray.direction, &hit.normal),
                path_length_mm: ray.path_length_mm + hit.t,
            };
            let t_plane = (z_plane - ray.origin.z) / ray.direction.z;
            paths.push(ray.path_length_mm + t_plane);
        }
        let min = paths.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = paths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(max - min < 1e-6, "path spread {} mm", max - min);
    }

    #[test]
    fn hyperboloid_on_axis_normal_along_axis() {
        let sys = synth_cassegrain(500.0, 190.0, 60.0, 5.0).unwrap();
        let sub = sys.sub.as_ref().unwrap().surface();
        let (_, n) = sub.surface_point(0.0, 0.0).unwrap();
        assert!((n.into_inner() + Vector3::z()).norm() < 1e-12);
    }

    #[test]
    fn reflection_preserves_unit_norm() {
        let surf = Paraboloid::symmetric(190.0, 500.0);
        let focus = Point3::new(0.0, 0.0, 190.0);
        for k in 0..100 {
            let (p, _) = surf
                .surface_point(((k as f64 + 0.5) / 100.0).sqrt(), (k as f64 * 0.37) % 1.0)
                .unwrap();
            let ray = Ray::new(focus, p - focus);
            let hit = surf.intersect(&ray).unwrap();
            let out = reflect_direction(&ray.direction, &hit.normal);
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }
}
