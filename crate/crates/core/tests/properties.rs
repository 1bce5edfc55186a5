//! Property tests over the closed-form geometry relations, mask composition
//! and metric invariances.

use nalgebra::{Unit, Vector3};
use proptest::prelude::*;
use reflector_core::blockage::{BlockageMask, MaskPrimitive, MaskShape};
use reflector_core::geometry::{reflect_direction, synth_cassegrain};
use reflector_core::metrics::{first_sll, hpbw};
use reflector_core::solver::PatternCut;

proptest! {
    #[test]
    fn cassegrain_closed_forms_hold_everywhere(
        d in 100.0f64..2000.0,
        f_over_d in 0.25f64..1.5,
        ds_frac in 0.02f64..0.4,
        m in 1.2f64..20.0,
    ) {
        let f = f_over_d * d;
        let ds = ds_frac * d;
        let sys = synth_cassegrain(d, f, ds, m).unwrap();
        let sub = sys.sub.as_ref().unwrap();
        let e = (m + 1.0) / (m - 1.0);
        prop_assert!((sub.eccentricity - e).abs() < 1e-12 * e);
        prop_assert!((sys.equivalent_focal_length_mm - m * f).abs() < 1e-9 * m * f);
        let theta_e = 2.0 * (d / (4.0 * m * f)).atan().to_degrees();
        prop_assert!((sys.feed_half_angle_deg - theta_e).abs() < 1e-9);
        // The sub rim point lies on the synthesized surface.
        let surf = sub.surface();
        let theta0 = 2.0 * (d / (4.0 * f)).atan();
        let z_rim = f - ds / 2.0 / theta0.tan();
        prop_assert!((surf.z_at(ds / 2.0) - z_rim).abs() < 1e-6);
    }

    #[test]
    fn reflection_always_preserves_norm(
        dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -1.0f64..-0.01,
        nx in -0.5f64..0.5, ny in -0.5f64..0.5,
    ) {
        let d = Unit::new_normalize(Vector3::new(dx, dy, dz));
        let n = Unit::new_normalize(Vector3::new(nx, ny, 1.0));
        let r = reflect_direction(&d, &n);
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mask_transmission_is_order_independent(
        seed in 0u64..1000,
        x in -250.0f64..250.0,
        y in -250.0f64..250.0,
    ) {
        // Three primitives shuffled by the seed.
        let prims = vec![
            MaskPrimitive {
                shape: MaskShape::Disc { center_xy: (0.0, 0.0), radius_mm: 80.0 },
                transmission: 0.7,
            },
            MaskPrimitive {
                shape: MaskShape::Ellipse {
                    center_xy: (20.0, -10.0),
                    semi_axes_mm: (120.0, 40.0),
                    rotation_deg: 25.0,
                },
                transmission: 0.5,
            },
            MaskPrimitive {
                shape: MaskShape::Rectangle {
                    center_xy: (-30.0, 40.0),
                    half_extents_mm: (90.0, 15.0),
                    rotation_deg: -40.0,
                },
                transmission: 0.0,
            },
        ];
        let mut shuffled = prims.clone();
        shuffled.rotate_left((seed % 3) as usize);
        if seed % 2 == 1 {
            shuffled.swap(0, 1);
        }
        let a = BlockageMask { primitives: prims };
        let b = BlockageMask { primitives: shuffled };
        prop_assert_eq!(a.transmission_at(x, y), b.transmission_at(x, y));
    }

    #[test]
    fn beam_metrics_invariant_under_db_offset(offset in -40.0f64..40.0) {
        let theta: Vec<f64> = (0..601).map(|i| -3.0 + i as f64 * 0.01).collect();
        let shape = |t: f64| {
            let main = -3.0 * (t / 0.45f64).powi(2);
            let lobe = -21.0 - 6.0 * ((t.abs() - 1.3) / 0.3f64).powi(2);
            main.max(lobe)
        };
        let co: Vec<f64> = theta.iter().map(|t| shape(*t)).collect();
        let base = PatternCut {
            phi_plane_deg: 0.0,
            frequency_ghz: 94.0,
            theta_deg: theta.clone(),
            co_db: co.clone(),
            cx_db: vec![f64::NEG_INFINITY; co.len()],
            peak_gain_dbi: 0.0,
        };
        let shifted = PatternCut {
            co_db: co.iter().map(|v| v + offset).collect(),
            ..base.clone()
        };
        prop_assert!((hpbw(&base).unwrap() - hpbw(&shifted).unwrap()).abs() < 1e-9);
        let a = first_sll(&base).unwrap().unwrap();
        let b = first_sll(&shifted).unwrap().unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }
}
