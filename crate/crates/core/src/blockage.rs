//! Aperture-plane shadow masks built from projected 3D obstacles.
//!
//! A mask is an ordered list of primitives; overlapping primitives multiply
//! their amplitude transmissions, so composition is commutative.

use nalgebra::{Unit, Vector3};

use crate::error::{Error, Result};
use crate::geometry::Obstacle3D;
use crate::solver::ApertureField;

/// Shadow outline in aperture-plane coordinates (mm, about the parent axis).
#[derive(Debug, Clone, PartialEq)]
pub enum MaskShape {
    Disc {
        center_xy: (f64, f64),
        radius_mm: f64,
    },
    Ellipse {
        center_xy: (f64, f64),
        semi_axes_mm: (f64, f64),
        rotation_deg: f64,
    },
    Rectangle {
        center_xy: (f64, f64),
        half_extents_mm: (f64, f64),
        rotation_deg: f64,
    },
}

/// A shadow with its amplitude transmission (0 = opaque, 1 = no effect).
#[derive(Debug, Clone, PartialEq)]
pub struct MaskPrimitive {
    pub shape: MaskShape,
    pub transmission: f64,
}

impl MaskPrimitive {
    pub fn opaque_disc(center_xy: (f64, f64), radius_mm: f64) -> Self {
        Self {
            shape: MaskShape::Disc {
                center_xy,
                radius_mm,
            },
            transmission: 0.0,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match &self.shape {
            MaskShape::Disc {
                center_xy,
                radius_mm,
            } => {
                let dx = x - center_xy.0;
                let dy = y - center_xy.1;
                dx * dx + dy * dy <= radius_mm * radius_mm
            }
            MaskShape::Ellipse {
                center_xy,
                semi_axes_mm,
                rotation_deg,
            } => {
                let (s, c) = rotation_deg.to_radians().sin_cos();
                let dx = x - center_xy.0;
                let dy = y - center_xy.1;
                let u = c * dx + s * dy;
                let v = -s * dx + c * dy;
                let (a, b) = *semi_axes_mm;
                (u / a) * (u / a) + (v / b) * (v / b) <= 1.0
            }
            MaskShape::Rectangle {
                center_xy,
                half_extents_mm,
                rotation_deg,
            } => {
                let (s, c) = rotation_deg.to_radians().sin_cos();
                let dx = x - center_xy.0;
                let dy = y - center_xy.1;
                let u = c * dx + s * dy;
                let v = -s * dx + c * dy;
                u.abs() <= half_extents_mm.0 && v.abs() <= half_extents_mm.1
            }
        }
    }
}

/// Multiplicative composition of shadow primitives; empty = identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockageMask {
    pub primitives: Vec<MaskPrimitive>,
}

impl BlockageMask {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// Product of the transmissions of every primitive containing (x, y).
    pub fn transmission_at(&self, x: f64, y: f64) -> f64 {
        self.primitives
            .iter()
            .filter(|p| p.contains(x, y))
            .map(|p| p.transmission)
            .product()
    }
}

/// Parallel projection of a 3D obstacle outline onto the aperture plane
/// (z = 0) along `direction`.
///
/// A tilted disc projects to an ellipse: for tilt angle α against the
/// projection direction the semi-axes are (r, r·cos α).
pub fn project_obstacle(
    obstacle: &Obstacle3D,
    direction: &Unit<Vector3<f64>>,
) -> Result<MaskPrimitive> {
    let d = direction.into_inner();
    if d.z.abs() < 1e-12 {
        return Err(Error::DegenerateProjection);
    }
    // Linear part of the projection along d onto z = 0.
    let proj = |v: &Vector3<f64>| -> (f64, f64) { (v.x - d.x * v.z / d.z, v.y - d.y * v.z / d.z) };
    let center_of = |c: &nalgebra::Point3<f64>| -> (f64, f64) {
        (c.x - d.x * c.z / d.z, c.y - d.y * c.z / d.z)
    };

    match obstacle {
        Obstacle3D::Disc {
            center,
            normal,
            radius_mm,
            transmission,
        } => {
            let n = normal.into_inner();
            let seed = if n.x.abs() < 0.9 {
                Vector3::x()
            } else {
                Vector3::y()
            };
            let e1 = n.cross(&seed).normalize() * *radius_mm;
            let e2 = n.cross(&e1).normalize() * *radius_mm;
            let a1 = proj(&e1);
            let a2 = proj(&e2);
            // The outline maps to {A1 cos t + A2 sin t}; recover the ellipse
            // axes from the eigenvalues of M·Mᵀ.
            let p = a1.0 * a1.0 + a2.0 * a2.0;
            let q = a1.0 * a1.1 + a2.0 * a2.1;
            let r = a1.1 * a1.1 + a2.1 * a2.1;
            let tr = p + r;
            let det = p * r - q * q;
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            let l1 = (tr + disc) / 2.0;
            let l2 = (tr - disc) / 2.0;
            let major = l1.max(0.0).sqrt();
            let minor = l2.max(0.0).sqrt();
            if minor < 1e-9 * major.max(1.0) {
                return Err(Error::DegenerateProjection);
            }
            let rotation = 0.5 * (2.0 * q).atan2(p - r);
            let shape = if (major - minor).abs() < 1e-9 * major {
                MaskShape::Disc {
                    center_xy: center_of(center),
                    radius_mm: major,
                }
            } else {
                MaskShape::Ellipse {
                    center_xy: center_of(center),
                    semi_axes_mm: (major, minor),
                    rotation_deg: rotation.to_degrees(),
                }
            };
            Ok(MaskPrimitive {
                shape,
                transmission: *transmission,
            })
        }
        Obstacle3D::Rectangle {
            center,
            normal,
            x_axis,
            half_extents_mm,
            transmission,
        } => {
            let n = normal.into_inner();
            let ax = x_axis.into_inner() * half_extents_mm.0;
            let ay = n.cross(&x_axis.into_inner()).normalize() * half_extents_mm.1;
            let a1 = proj(&ax);
            let a2 = proj(&ay);
            let n1 = (a1.0 * a1.0 + a1.1 * a1.1).sqrt();
            let n2 = (a2.0 * a2.0 + a2.1 * a2.1).sqrt();
            if n1 < 1e-12 || n2 < 1e-12 {
                return Err(Error::DegenerateProjection);
            }
            // Exact for orthogonal mapped axes (any axial projection);
            // otherwise the tight bounding box aligned with the first axis.
            let u = (a1.0 / n1, a1.1 / n1);
            let along = n1 + (a2.0 * u.0 + a2.1 * u.1).abs();
            let across = (a2.1 * u.0 - a2.0 * u.1).abs();
            if across < 1e-9 {
                return Err(Error::DegenerateProjection);
            }
            Ok(MaskPrimitive {
                shape: MaskShape::Rectangle {
                    center_xy: center_of(center),
                    half_extents_mm: (along, across),
                    rotation_deg: u.1.atan2(u.0).to_degrees(),
                },
                transmission: *transmission,
            })
        }
    }
}

/// Multiplies every grid sample by the mask transmission at its location.
/// An empty mask returns the field bit-identically.
pub fn apply_mask(mask: &BlockageMask, field: &ApertureField) -> ApertureField {
    let mut out = field.clone();
    if mask.is_empty() {
        return out;
    }
    let n = field.grid_n;
    for j in 0..n {
        let y = field.center_xy.1 + field.coord(j);
        for i in 0..n {
            let x = field.center_xy.0 + field.coord(i);
            let t = mask.transmission_at(x, y);
            if t != 1.0 {
                let idx = j * n + i;
                out.co[idx] *= t;
                out.cx[idx] *= t;
            }
        }
    }
    out
}

/// Opaque-equivalent shadowed area as a fraction of the aperture area,
/// estimated on a `grid_n`-per-side sampling of the aperture disc.
/// Partial transmissions count by their blocked power 1 − t².
pub fn blockage_area_fraction(
    mask: &BlockageMask,
    aperture_diameter_mm: f64,
    grid_n: usize,
) -> f64 {
    let radius = aperture_diameter_mm / 2.0;
    let cell = aperture_diameter_mm / grid_n as f64;
    let mut inside = 0u64;
    let mut blocked = 0.0;
    for j in 0..grid_n {
        let y = (j as f64 + 0.5) * cell - radius;
        for i in 0..grid_n {
            let x = (i as f64 + 0.5) * cell - radius;
            if x * x + y * y > radius * radius {
                continue;
            }
            inside += 1;
            let t = mask.transmission_at(x, y);
            blocked += 1.0 - t * t;
        }
    }
    if inside == 0 {
        0.0
    } else {
        blocked / inside as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Point3;

    fn disc_obstacle(tilt_deg: f64, radius: f64, transmission: f64) -> Obstacle3D {
        let t = tilt_deg.to_radians();
        Obstacle3D::Disc {
            center: Point3::new(0.0, 0.0, 100.0),
            normal: Unit::new_normalize(Vector3::new(0.0, t.sin(), t.cos())),
            radius_mm: radius,
            transmission,
        }
    }

    #[test]
    fn axial_projection_of_flat_disc_is_identity() {
        let prim = project_obstacle(
            &disc_obstacle(0.0, 30.0, 0.0),
            &Unit::new_normalize(Vector3::z()),
        )
        .unwrap();
        match prim.shape {
            MaskShape::Disc { radius_mm, .. } => assert!((radius_mm - 30.0).abs() < 1e-9),
            other => panic!("expected disc, got {other:?}"),
        }
    }

    #[test]
    fn tilted_disc_projects_to_ellipse() {
        let prim = project_obstacle(
            &disc_obstacle(45.0, 30.0, 0.0),
            &Unit::new_normalize(Vector3::z()),
        )
        .unwrap();
        match prim.shape {
            MaskShape::Ellipse { semi_axes_mm, .. } => {
                assert!((semi_axes_mm.0 - 30.0).abs() < 1e-9);
                assert!((semi_axes_mm.1 - 21.21320344).abs() < 1e-6);
            }
            other => panic!("expected ellipse, got {other:?}"),
        }
    }

    #[test]
    fn edge_on_disc_is_degenerate() {
        assert!(matches!(
            project_obstacle(
                &disc_obstacle(90.0, 30.0, 0.0),
                &Unit::new_normalize(Vector3::z()),
            ),
            Err(Error::DegenerateProjection)
        ));
    }

    #[test]
    fn skew_projection_outline_lands_on_primitive_boundary() {
        let obstacle = disc_obstacle(30.0, 25.0, 0.0);
        let dir = Unit::new_normalize(Vector3::new(0.2, -0.1, -0.97));
        let prim = project_obstacle(&obstacle, &dir).unwrap();
        let d = dir.into_inner();
        let (center, normal, r) = match &obstacle {
            Obstacle3D::Disc {
                center,
                normal,
                radius_mm,
                ..
            } => (*center, normal.into_inner(), *radius_mm),
            _ => unreachable!(),
        };
        let e1 = normal.cross(&Vector3::x()).normalize() * r;
        let e2 = normal.cross(&e1).normalize() * r;
        let c = match &prim.shape {
            MaskShape::Ellipse { center_xy, .. } | MaskShape::Disc { center_xy, .. } => *center_xy,
            _ => unreachable!(),
        };
        for k in 0..256 {
            let t = k as f64 / 256.0 * std::f64::consts::TAU;
            let p = center + e1 * t.cos() + e2 * t.sin();
            let x = p.x - d.x * p.z / d.z;
            let y = p.y - d.y * p.z / d.z;
            // Nudging toward the centre lands inside, away lands outside.
            assert!(prim.contains(x + (c.0 - x) * 1e-6, y + (c.1 - y) * 1e-6));
            assert!(!prim.contains(x - (c.0 - x) * 1e-6, y - (c.1 - y) * 1e-6));
        }
    }

    #[test]
    fn rectangle_axial_projection_exact() {
        let obstacle = Obstacle3D::Rectangle {
            center: Point3::new(5.0, -3.0, 50.0),
            normal: Unit::new_normalize(Vector3::z()),
            x_axis: Unit::new_normalize(Vector3::new(1.0, 1.0, 0.0)),
            half_extents_mm: (10.0, 4.0),
            transmission: 0.0,
        };
        let prim = project_obstacle(&obstacle, &Unit::new_normalize(Vector3::z())).unwrap();
        match prim.shape {
            MaskShape::Rectangle {
                center_xy,
                half_extents_mm,
                rotation_deg,
            } => {
                assert!((center_xy.0 - 5.0).abs() < 1e-9);
                assert!((center_xy.1 + 3.0).abs() < 1e-9);
                assert!((half_extents_mm.0 - 10.0).abs() < 1e-9);
                assert!((half_extents_mm.1 - 4.0).abs() < 1e-9);
                assert!((rotation_deg - 45.0).abs() < 1e-9);
            }
            other => panic!("expected rectangle, got {other:?}"),
        }
    }

    #[test]
    fn area_fraction_of_central_sub_disc() {
        let mask = BlockageMask {
            primitives: vec![MaskPrimitive::opaque_disc((0.0, 0.0), 30.0)],
        };
        let f = blockage_area_fraction(&mask, 500.0, 1024);
        assert!((f - 0.0144).abs() < 0.001, "fraction = {f}");
    }

    #[test]
    fn area_fraction_empty_mask_zero() {
        assert_eq!(
            blockage_area_fraction(&BlockageMask::empty(), 500.0, 256),
            0.0
        );
    }

    #[test]
    fn area_fraction_disjoint_discs_additive() {
        let a = BlockageMask {
            primitives: vec![MaskPrimitive::opaque_disc((-100.0, 0.0), 25.0)],
        };
        let b = BlockageMask {
            primitives: vec![MaskPrimitive::opaque_disc((100.0, 60.0), 40.0)],
        };
        let both = BlockageMask {
            primitives: a
                .primitives
                .iter()
                .chain(b.primitives.iter())
                .cloned()
                .collect(),
        };
        let fa = blockage_area_fraction(&a, 500.0, 1024);
        let fb = blockage_area_fraction(&b, 500.0, 1024);
        let fab = blockage_area_fraction(&both, 500.0, 1024);
        assert!((fab - (fa + fb)).abs() < 5e-4);
    }

    #[test]
    fn transmission_composes_multiplicatively_any_order() {
        let p1 = MaskPrimitive {
            shape: MaskShape::Disc {
                center_xy: (0.0, 0.0),
                radius_mm: 50.0,
            },
            transmission: 0.8,
        };
        let p2 = MaskPrimitive {
            shape: MaskShape::Ellipse {
                center_xy: (10.0, 0.0),
                semi_axes_mm: (60.0, 20.0),
                rotation_deg: 30.0,
            },
            transmission: 0.5,
        };
        let fwd = BlockageMask {
            primitives: vec![p1.clone(), p2.clone()],
        };
        let rev = BlockageMask {
            primitives: vec![p2, p1],
        };
        for (x, y) in [(0.0, 0.0), (12.0, 3.0), (45.0, -10.0), (200.0, 200.0)] {
            assert_eq!(fwd.transmission_at(x, y), rev.transmission_at(x, y));
        }
        assert_eq!(fwd.transmission_at(0.0, 0.0), 0.8 * 0.5);
    }
}
