//! Rays and specular reflection.

use nalgebra::{Point3, Unit, Vector3};

/// A ray with accumulated geometric path length.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub origin: Point3<f64>,
    pub direction: Unit<Vector3<f64>>,
    pub path_length_mm: f64,
}

impl Ray {
    pub fn new(origin: Point3<f64>, direction: Vector3<f64>) -> Self {
        Self {
            origin,
            direction: Unit::new_normalize(direction),
            path_length_mm: 0.0,
        }
    }

    pub fn at(&self, t: f64) -> Point3<f64> {
        self.origin + self.direction.into_inner() * t
    }
}

/// Specular reflection of a propagation direction: d' = d − 2(n·d)n.
pub fn reflect_direction(
    d: &Unit<Vector3<f64>>,
    n: &Unit<Vector3<f64>>,
) -> Unit<Vector3<f64>> {
    let d = d.into_inner();
    let n = n.into_inner();
    Unit::new_normalize(d - 2.0 * n.dot(&d) * n)
}

/// Reflection of a field (polarization) vector at a conducting surface:
/// ê' = 2(n·ê)n − ê. The normal component is kept, the tangential flipped.
pub fn reflect_field(e: &Vector3<f64>, n: &Unit<Vector3<f64>>) -> Vector3<f64> {
    let n = n.into_inner();
    2.0 * n.dot(e) * n - e
}
