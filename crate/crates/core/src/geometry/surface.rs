//! Quadric mirror surfaces behind a common trait.
//!
//! Each surface answers two questions: where is the point for a normalized
//! rim parameter `(u, v)`, and where does a ray hit it. Normals are oriented
//! toward the illuminated side so `n·d < 0` for arriving rays.

use nalgebra::{Point3, Unit, Vector3};

use super::ray::Ray;
use crate::error::{Error, Result};

const T_EPS: f64 = 1e-9;

/// Roots of a·t² + b·t + c = 0, ascending, via the cancellation-free form.
fn stable_quadratic(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        Some((r1, r2))
    } else {
        Some((r2, r1))
    }
}

/// Ray-surface intersection record.
#[derive(Debug, Clone)]
pub struct Hit {
    pub point: Point3<f64>,
    pub normal: Unit<Vector3<f64>>,
    pub t: f64,
}

/// Common interface for reflective surfaces.
///
/// `u` is the radial rim fraction in [0, 1], `v` the azimuth in turns [0, 1).
pub trait Surface: Send + Sync {
    fn surface_point(&self, u: f64, v: f64) -> Result<(Point3<f64>, Unit<Vector3<f64>>)>;

    /// Nearest positive-parameter intersection within the rim, if any.
    fn intersect(&self, ray: &Ray) -> Option<Hit>;
}

/// Paraboloid of revolution z = r²/(4F) about the +z axis, restricted to a
/// circular projected rim (possibly offset from the axis).
#[derive(Debug, Clone)]
pub struct Paraboloid {
    pub focal_length_mm: f64,
    pub rim_center_xy: (f64, f64),
    pub rim_radius_mm: f64,
}

impl Paraboloid {
    pub fn symmetric(focal_length_mm: f64, aperture_diameter_mm: f64) -> Self {
        Self {
            focal_length_mm,
            rim_center_xy: (0.0, 0.0),
            rim_radius_mm: aperture_diameter_mm / 2.0,
        }
    }

    pub fn depth_at(&self, x: f64, y: f64) -> f64 {
        (x * x + y * y) / (4.0 * self.focal_length_mm)
    }

    fn within_rim(&self, x: f64, y: f64) -> bool {
        let dx = x - self.rim_center_xy.0;
        let dy = y - self.rim_center_xy.1;
        dx * dx + dy * dy <= self.rim_radius_mm * self.rim_radius_mm * (1.0 + 1e-12)
    }

    /// Illuminated-side (concave) unit normal.
    pub fn normal_at(&self, x: f64, y: f64) -> Unit<Vector3<f64>> {
        Unit::new_normalize(Vector3::new(-x, -y, 2.0 * self.focal_length_mm))
    }
}

impl Surface for Paraboloid {
    fn surface_point(&self, u: f64, v: f64) -> Result<(Point3<f64>, Unit<Vector3<f64>>)> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(format!(
                "paraboloid radial parameter u = {u} outside [0, 1]"
            )));
        }
        let phi = v * std::f64::consts::TAU;
        let x = self.rim_center_xy.0 + u * self.rim_radius_mm * phi.cos();
        let y = self.rim_center_xy.1 + u * self.rim_radius_mm * phi.sin();
        let z = self.depth_at(x, y);
        Ok((Point3::new(x, y, z), self.normal_at(x, y)))
    }

    fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let o = ray.origin;
        let d = ray.direction.into_inner();
        let four_f = 4.0 * self.focal_length_mm;
        let a = d.x * d.x + d.y * d.y;
        let b = 2.0 * (o.x * d.x + o.y * d.y) - four_f * d.z;
        let c = o.x * o.x + o.y * o.y - four_f * o.z;
        let mut candidates = Vec::with_capacity(2);
        if a.abs() < 1e-14 {
            if b.abs() > 1e-14 {
                candidates.push(-c / b);
            }
        } else if let Some((r1, r2)) = stable_quadratic(a, b, c) {
            candidates.push(r1);
            candidates.push(r2);
        } else {
            return None;
        }
        for t in candidates {
            if t <= T_EPS {
                continue;
            }
            let p = ray.at(t);
            if self.within_rim(p.x, p.y) {
                return Some(Hit {
                    point: p,
                    normal: self.normal_at(p.x, p.y),
                    t,
                });
            }
        }
        None
    }
}

/// Upper branch of a hyperboloid of two sheets about the +z axis:
/// ((z − z_c)/a)² − r²/b² = 1 with z ≥ z_c + a, clipped to a rim diameter.
///
/// The illuminated (convex) side faces −z, toward the feed.
#[derive(Debug, Clone)]
pub struct Hyperboloid {
    pub semi_transverse_mm: f64, // a
    pub semi_conjugate_mm: f64,  // b
    pub center_z_mm: f64,
    pub rim_diameter_mm: f64,
}

impl Hyperboloid {
    pub fn z_at(&self, r: f64) -> f64 {
        let a = self.semi_transverse_mm;
        let b = self.semi_conjugate_mm;
        self.center_z_mm + a * (1.0 + (r * r) / (b * b)).sqrt()
    }

    pub fn normal_at(&self, x: f64, y: f64, z: f64) -> Unit<Vector3<f64>> {
        let a2 = self.semi_transverse_mm * self.semi_transverse_mm;
        let b2 = self.semi_conjugate_mm * self.semi_conjugate_mm;
        Unit::new_normalize(Vector3::new(
            2.0 * x / b2,
            2.0 * y / b2,
            -2.0 * (z - self.center_z_mm) / a2,
        ))
    }
}

impl Surface for Hyperboloid {
    fn surface_point(&self, u: f64, v: f64) -> Result<(Point3<f64>, Unit<Vector3<f64>>)> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(format!(
                "hyperboloid radial parameter u = {u} outside [0, 1]"
            )));
        }
        let phi = v * std::f64::consts::TAU;
        let r = u * self.rim_diameter_mm / 2.0;
        let x = r * phi.cos();
        let y = r * phi.sin();
        let z = self.z_at(r);
        Ok((Point3::new(x, y, z), self.normal_at(x, y, z)))
    }

    fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let a2 = self.semi_transverse_mm * self.semi_transverse_mm;
        let b2 = self.semi_conjugate_mm * self.semi_conjugate_mm;
        let oz = ray.origin.z - self.center_z_mm;
        let d = ray.direction.into_inner();
        let qa = d.z * d.z / a2 - (d.x * d.x + d.y * d.y) / b2;
        let qb = 2.0 * (oz * d.z / a2 - (ray.origin.x * d.x + ray.origin.y * d.y) / b2);
        let qc = oz * oz / a2 - (ray.origin.x * ray.origin.x + ray.origin.y * ray.origin.y) / b2
            - 1.0;
        let mut candidates = Vec::with_capacity(2);
        if qa.abs() < 1e-16 {
            if qb.abs() > 1e-16 {
                candidates.push(-qc / qb);
            }
        } else if let Some((r1, r2)) = stable_quadratic(qa, qb, qc) {
            candidates.push(r1);
            candidates.push(r2);
        } else {
            return None;
        }
        let rim2 = self.rim_diameter_mm * self.rim_diameter_mm / 4.0;
        for t in candidates {
            if t <= T_EPS {
                continue;
            }
            let p = ray.at(t);
            // Upper branch only.
            if p.z - self.center_z_mm < self.semi_transverse_mm * (1.0 - 1e-12) {
                continue;
            }
            if p.x * p.x + p.y * p.y <= rim2 * (1.0 + 1e-12) {
                return Some(Hit {
                    point: p,
                    normal: self.normal_at(p.x, p.y, p.z),
                    t,
                });
            }
        }
        None
    }
}

/// Flat circular mirror.
#[derive(Debug, Clone)]
pub struct PlanarMirror {
    pub center: Point3<f64>,
    pub normal: Unit<Vector3<f64>>,
    pub radius_mm: f64,
}

impl PlanarMirror {
    fn in_plane_basis(&self) -> (Vector3<f64>, Vector3<f64>) {
        let n = self.normal.into_inner();
        let seed = if n.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let e1 = n.cross(&seed).normalize();
        let e2 = n.cross(&e1).normalize();
        (e1, e2)
    }
}

impl Surface for PlanarMirror {
    fn surface_point(&self, u: f64, v: f64) -> Result<(Point3<f64>, Unit<Vector3<f64>>)> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfDomain(format!(
                "mirror radial parameter u = {u} outside [0, 1]"
            )));
        }
        let (e1, e2) = self.in_plane_basis();
        let phi = v * std::f64::consts::TAU;
        let p = self.center + u * self.radius_mm * (phi.cos() * e1 + phi.sin() * e2);
        Ok((p, self.normal))
    }

    fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let n = self.normal.into_inner();
        let denom = ray.direction.dot(&n);
        if denom.abs() < 1e-14 {
            return None;
        }
        let t = (self.center - ray.origin).dot(&n) / denom;
        if t <= T_EPS {
            return None;
        }
        let p = ray.at(t);
        if (p - self.center).norm() > self.radius_mm * (1.0 + 1e-12) {
            return None;
        }
        // Face the arriving ray.
        let oriented = if denom < 0.0 {
            self.normal
        } else {
            Unit::new_normalize(-n)
        };
        Some(Hit {
            point: p,
            normal: oriented,
            t,
        })
    }
}
