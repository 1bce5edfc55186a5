//! Behavioral feed-horn models: rotationally symmetric amplitude patterns
//! with a Ludwig-3 polarization decomposition.
//!
//! The pattern itself sits behind [`FeedModel`] so cos-q, Gaussian and
//! tabulated variants are interchangeable at runtime.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;

/// Linear polarization sense of the feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    LinearX,
    LinearY,
}

/// Complex co-/cross-polar field at one direction, peak-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedFieldSample {
    pub co: Complex64,
    pub cx: Complex64,
}

/// A normalized forward-hemisphere feed pattern.
pub trait FeedModel: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    /// Field at `theta` degrees off boresight, azimuth `phi` degrees.
    fn sample(&self, theta_deg: f64, phi_deg: f64) -> Result<PolarizedFieldSample>;

    /// True when the E- and H-plane patterns are identical, which makes the
    /// cross-polar component identically zero.
    fn is_balanced(&self) -> bool;

    /// Total radiated power over the forward hemisphere,
    /// ∫∫ (|co|² + |cx|²) sinθ dθ dφ in steradians.
    fn total_power(&self) -> f64 {
        hemisphere_power(self, 90.0)
    }

    /// Radiated power inside a cone of the given half-angle.
    fn power_within(&self, cone_half_angle_deg: f64) -> f64 {
        hemisphere_power(self, cone_half_angle_deg)
    }
}

fn check_theta(theta_deg: f64) -> Result<()> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::Domain(format!(
            "feed pattern defined on the forward hemisphere, theta = {theta_deg} deg"
        )));
    }
    Ok(())
}

/// cos^q(θ) pattern with independent E-plane (φ=0) and H-plane (φ=90)
/// exponents, blended by cos²φ / sin²φ.
#[derive(Debug, Clone)]
pub struct CosQ {
    pub q_e: f64,
    pub q_h: f64,
}

impl CosQ {
    pub fn balanced(q: f64) -> Self {
        Self { q_e: q, q_h: q }
    }
}

impl FeedModel for CosQ {
    fn name(&self) -> &'static str {
        "cos_q"
    }

    fn sample(&self, theta_deg: f64, phi_deg: f64) -> Result<PolarizedFieldSample> {
        check_theta(theta_deg)?;
        let ct = theta_deg.to_radians().cos().max(0.0);
        let ce = ct.powf(self.q_e);
        let ch = ct.powf(self.q_h);
        let (s, c) = phi_deg.to_radians().sin_cos();
        let co = ce * c * c + ch * s * s;
        let cx = (ce - ch) * s * c;
        Ok(PolarizedFieldSample {
            co: Complex64::new(co, 0.0),
            cx: Complex64::new(cx, 0.0),
        })
    }

    fn is_balanced(&self) -> bool {
        self.q_e == self.q_h
    }

    fn total_power(&self) -> f64 {
        if self.is_balanced() {
            // ∫ cos^{2q}θ sinθ dθ dφ over the hemisphere.
            2.0 * PI / (2.0 * self.q_e + 1.0)
        } else {
            hemisphere_power(self, 90.0)
        }
    }

    fn power_within(&self, cone_half_angle_deg: f64) -> f64 {
        if self.is_balanced() {
            let ct = cone_half_angle_deg.to_radians().cos();
            let n = 2.0 * self.q_e + 1.0;
            2.0 * PI / n * (1.0 - ct.powf(n))
        } else {
            hemisphere_power(self, cone_half_angle_deg)
        }
    }
}

/// Gaussian beam: amplitude in dB is quadratic in θ, pinned to `taper_db`
/// at `taper_angle_deg`.
#[derive(Debug, Clone)]
pub struct GaussianTaper {
    pub taper_db: f64,
    pub taper_angle_deg: f64,
}

impl FeedModel for GaussianTaper {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn sample(&self, theta_deg: f64, _phi_deg: f64) -> Result<PolarizedFieldSample> {
        check_theta(theta_deg)?;
        let ratio = theta_deg / self.taper_angle_deg;
        let amp_db = self.taper_db * ratio * ratio;
        Ok(PolarizedFieldSample {
            co: Complex64::new(10f64.powf(amp_db / 20.0), 0.0),
            cx: Complex64::new(0.0, 0.0),
        })
    }

    fn is_balanced(&self) -> bool {
        true
    }
}

/// One plane of a measured or published pattern cut.
#[derive(Debug, Clone)]
pub struct TabulatedPlane {
    pub theta_deg: Vec<f64>,
    pub amp_db: Vec<f64>,
    pub phase_deg: Vec<f64>,
}

impl TabulatedPlane {
    pub fn new(theta_deg: Vec<f64>, amp_db: Vec<f64>, phase_deg: Option<Vec<f64>>) -> Result<Self> {
        if theta_deg.len() < 2 || theta_deg.len() != amp_db.len() {
            return Err(Error::Parse(
                "tabulated plane needs >= 2 rows with matching columns".into(),
            ));
        }
        if theta_deg[0] != 0.0 {
            return Err(Error::Parse("tabulated pattern must start at 0 deg".into()));
        }
        if !theta_deg.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Parse(
                "tabulated angles must be strictly increasing".into(),
            ));
        }
        if amp_db[0].abs() > 1e-9 {
            return Err(Error::Parse(format!(
                "tabulated amplitude at 0 deg must be 0 dB, got {}",
                amp_db[0]
            )));
        }
        let phase_deg = match phase_deg {
            Some(p) if p.len() == theta_deg.len() => p,
            Some(_) => {
                return Err(Error::Parse("phase column length mismatch".into()));
            }
            None => vec![0.0; theta_deg.len()],
        };
        Ok(Self {
            theta_deg,
            amp_db,
            phase_deg,
        })
    }

    /// Linear interpolation of amplitude in dB and phase in degrees; holds
    /// the last row beyond the table.
    fn eval(&self, theta_deg: f64) -> Complex64 {
        let n = self.theta_deg.len();
        let (amp_db, phase) = if theta_deg >= self.theta_deg[n - 1] {
            (self.amp_db[n - 1], self.phase_deg[n - 1])
        } else {
            let i = self
                .theta_deg
                .partition_point(|&t| t <= theta_deg)
                .clamp(1, n - 1);
            let (t0, t1) = (self.theta_deg[i - 1], self.theta_deg[i]);
            let w = (theta_deg - t0) / (t1 - t0);
            (
                self.amp_db[i - 1] * (1.0 - w) + self.amp_db[i] * w,
                self.phase_deg[i - 1] * (1.0 - w) + self.phase_deg[i] * w,
            )
        };
        Complex64::from_polar(10f64.powf(amp_db / 20.0), phase.to_radians())
    }
}

/// Pattern defined by one cut per principal plane.
#[derive(Debug, Clone)]
pub struct Tabulated {
    pub e_plane: TabulatedPlane,
    pub h_plane: TabulatedPlane,
}

impl FeedModel for Tabulated {
    fn name(&self) -> &'static str {
        "tabulated"
    }

    fn sample(&self, theta_deg: f64, phi_deg: f64) -> Result<PolarizedFieldSample> {
        check_theta(theta_deg)?;
        let ce = self.e_plane.eval(theta_deg);
        let ch = self.h_plane.eval(theta_deg);
        let (s, c) = phi_deg.to_radians().sin_cos();
        Ok(PolarizedFieldSample {
            co: ce * c * c + ch * s * s,
            cx: (ce - ch) * s * c,
        })
    }

    fn is_balanced(&self) -> bool {
        self.e_plane.theta_deg == self.h_plane.theta_deg
            && self.e_plane.amp_db == self.h_plane.amp_db
            && self.e_plane.phase_deg == self.h_plane.phase_deg
    }
}

/// A feed: pattern model, polarization sense and phase-centre placement.
#[derive(Debug, Clone)]
pub struct FeedPattern {
    pub model: Arc<dyn FeedModel>,
    pub polarization: Polarization,
    /// Axial displacement of the phase centre from the focus; nonzero values
    /// inject a quadratic aperture phase error.
    pub phase_center_offset_mm: f64,
}

impl FeedPattern {
    pub fn cos_q_balanced(q: f64) -> Self {
        Self {
            model: Arc::new(CosQ::balanced(q)),
            polarization: Polarization::LinearY,
            phase_center_offset_mm: 0.0,
        }
    }

    pub fn gaussian(taper_db: f64, taper_angle_deg: f64) -> Self {
        Self {
            model: Arc::new(GaussianTaper {
                taper_db,
                taper_angle_deg,
            }),
            polarization: Polarization::LinearY,
            phase_center_offset_mm: 0.0,
        }
    }

    /// Loads a tabulated pattern from one CSV per plane, rows of
    /// `theta_deg,amp_db[,phase_deg]`, `#` comments and an optional header.
    pub fn tabulated_from_csv(e_plane: &Path, h_plane: &Path) -> Result<Self> {
        let e = load_plane_csv(e_plane)?;
        let h = load_plane_csv(h_plane)?;
        Ok(Self {
            model: Arc::new(Tabulated {
                e_plane: e,
                h_plane: h,
            }),
            polarization: Polarization::LinearY,
            phase_center_offset_mm: 0.0,
        })
    }
}

fn load_plane_csv(path: &Path) -> Result<TabulatedPlane> {
    let text = std::fs::read_to_string(path)?;
    let mut theta = Vec::new();
    let mut amp = Vec::new();
    let mut phase: Option<Vec<f64>> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.len() > 3 {
            return Err(Error::Parse(format!(
                "{}:{}: expected 2 or 3 columns",
                path.display(),
                lineno + 1
            )));
        }
        let parsed: Vec<std::result::Result<f64, _>> =
            cols.iter().map(|c| c.parse::<f64>()).collect();
        if parsed.iter().any(|p| p.is_err()) {
            if theta.is_empty() {
                continue; // header row
            }
            return Err(Error::Parse(format!(
                "{}:{}: non-numeric value",
                path.display(),
                lineno + 1
            )));
        }
        let vals: Vec<f64> = parsed.into_iter().map(|p| p.unwrap()).collect();
        theta.push(vals[0]);
        amp.push(vals[1]);
        if vals.len() == 3 {
            phase.get_or_insert_with(Vec::new).push(vals[2]);
        } else if phase.is_some() {
            return Err(Error::Parse(format!(
                "{}:{}: inconsistent phase column",
                path.display(),
                lineno + 1
            )));
        }
    }
    TabulatedPlane::new(theta, amp, phase)
}

/// Solves 20·q·log10(cos θe) = edge_taper_db for the cos-q exponent.
pub fn q_from_edge_taper(edge_taper_db: f64, half_angle_deg: f64) -> Result<f64> {
    if edge_taper_db > 0.0 {
        return Err(Error::Domain(format!(
            "edge taper must be <= 0 dB, got {edge_taper_db}"
        )));
    }
    if !(half_angle_deg > 0.0 && half_angle_deg < 90.0) {
        return Err(Error::Domain(format!(
            "half angle {half_angle_deg} deg outside (0, 90)"
        )));
    }
    if edge_taper_db == 0.0 {
        return Ok(0.0);
    }
    Ok(edge_taper_db / (20.0 * half_angle_deg.to_radians().cos().log10()))
}

/// Field of a feed pattern at (θ, φ) in degrees.
pub fn eval_feed(pattern: &FeedPattern, theta_deg: f64, phi_deg: f64) -> Result<PolarizedFieldSample> {
    pattern.model.sample(theta_deg, phi_deg)
}

fn hemisphere_power<M: FeedModel + ?Sized>(model: &M, up_to_deg: f64) -> f64 {
    // Azimuth handled by a uniform 128-point rule (spectrally accurate for
    // the periodic integrand), polar angle by adaptive Simpson.
    let n_phi = 128;
    let phi_weight = 360.0 / n_phi as f64;
    adaptive_simpson(
        |theta_deg| {
            let mut p = 0.0;
            for k in 0..n_phi {
                let phi = k as f64 * phi_weight;
                let s = model.sample(theta_deg, phi).expect("theta in range");
                p += s.co.norm_sqr() + s.cx.norm_sqr();
            }
            p / n_phi as f64 * theta_deg.to_radians().sin() * 2.0 * PI
        },
        0.0,
        up_to_deg,
        1e-10,
    ) * (PI / 180.0)
}

/// Fraction of the feed's radiated power inside a cone of the given
/// half-angle. Closed form for balanced cos-q, quadrature otherwise.
pub fn spillover_efficiency(pattern: &FeedPattern, cone_half_angle_deg: f64) -> Result<f64> {
    if !(cone_half_angle_deg > 0.0 && cone_half_angle_deg <= 90.0) {
        return Err(Error::Domain(format!(
            "cone half-angle {cone_half_angle_deg} deg outside (0, 90]"
        )));
    }
    let model = pattern.model.as_ref();
    Ok(model.power_within(cone_half_angle_deg) / model.total_power())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_matches_minus_twelve_db_at_fifteen_deg() {
        let q = q_from_edge_taper(-12.0, 15.0).unwrap();
        assert!((q - 39.86).abs() < 0.01, "q = {q}");
        // Round trip through the pattern.
        let feed = FeedPattern::cos_q_balanced(q);
        let s = eval_feed(&feed, 15.0, 0.0).unwrap();
        assert!((20.0 * s.co.norm().log10() + 12.0).abs() < 1e-9);
    }

    #[test]
    fn q_zero_taper_isotropic() {
        assert_eq!(q_from_edge_taper(0.0, 40.0).unwrap(), 0.0);
    }

    #[test]
    fn q_three_db_at_sixty_deg() {
        let q = q_from_edge_taper(-3.0, 60.0).unwrap();
        assert!((q - 0.498).abs() < 0.001, "q = {q}");
    }

    #[test]
    fn q_rejects_bad_domain() {
        assert!(q_from_edge_taper(-12.0, 90.0).is_err());
        assert!(q_from_edge_taper(3.0, 15.0).is_err());
    }

    #[test]
    fn boresight_normalized() {
        let feed = FeedPattern::cos_q_balanced(39.86);
        let s = eval_feed(&feed, 0.0, 33.0).unwrap();
        assert!((s.co.norm() - 1.0).abs() < 1e-12);
        assert_eq!(s.cx.norm(), 0.0);
    }

    #[test]
    fn balanced_feed_has_zero_cross_pol_everywhere() {
        let feed = FeedPattern::cos_q_balanced(11.3);
        for k in 0..200 {
            let theta = 90.0 * (k as f64 + 0.5) / 200.0;
            let phi = (k as f64 * 77.7) % 360.0;
            let s = eval_feed(&feed, theta, phi).unwrap();
            assert_eq!(s.cx.norm(), 0.0);
        }
    }

    #[test]
    fn balanced_feed_phi_independent() {
        let feed = FeedPattern::cos_q_balanced(24.0);
        let reference = eval_feed(&feed, 37.0, 0.0).unwrap().co.norm();
        for k in 0..64 {
            let phi = k as f64 * 360.0 / 64.0;
            let s = eval_feed(&feed, 37.0, phi).unwrap();
            assert!((s.co.norm() - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn unbalanced_feed_cross_pol_nonzero_off_planes() {
        let feed = FeedPattern {
            model: Arc::new(CosQ { q_e: 30.0, q_h: 40.0 }),
            polarization: Polarization::LinearY,
            phase_center_offset_mm: 0.0,
        };
        let s = eval_feed(&feed, 10.0, 45.0).unwrap();
        assert!(s.cx.norm() > 1e-6);
        // Normalization bound.
        assert!(s.co.norm_sqr() + s.cx.norm_sqr() <= 1.0 + 1e-9);
    }

    #[test]
    fn theta_beyond_hemisphere_rejected() {
        let feed = FeedPattern::cos_q_balanced(10.0);
        assert!(eval_feed(&feed, 90.5, 0.0).is_err());
    }

    #[test]
    fn cos_q_monotone_in_theta() {
        let feed = FeedPattern::cos_q_balanced(5.0);
        let mut last = f64::INFINITY;
        for k in 0..=90 {
            let s = eval_feed(&feed, k as f64, 0.0).unwrap();
            assert!(s.co.norm() <= last + 1e-15);
            last = s.co.norm();
        }
    }

    #[test]
    fn spillover_closed_form_baseline() {
        let feed = FeedPattern::cos_q_balanced(39.86);
        let eta = spillover_efficiency(&feed, 15.0).unwrap();
        assert!((eta - 0.939).abs() < 0.002, "eta = {eta}");
    }

    #[test]
    fn spillover_isotropic_hemisphere_is_unity() {
        let feed = FeedPattern::cos_q_balanced(0.0);
        let eta = spillover_efficiency(&feed, 90.0).unwrap();
        assert!((eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spillover_quadrature_matches_closed_form() {
        // Deterministic pseudo-random (q, θe) pairs.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let q = 1.0 + 60.0 * next();
            let theta_e = 5.0 + 80.0 * next();
            let closed = 1.0 - theta_e.to_radians().cos().powf(2.0 * q + 1.0);
            let model = CosQ::balanced(q);
            let quad = hemisphere_power(&model, theta_e) / (2.0 * PI / (2.0 * q + 1.0));
            assert!(
                (quad - closed).abs() < 1e-6,
                "q={q} theta={theta_e}: {quad} vs {closed}"
            );
        }
    }

    #[test]
    fn hemispheric_power_matches_analytic() {
        for q in [0.5, 3.0, 17.0, 39.86] {
            let model = CosQ::balanced(q);
            let analytic = 2.0 * PI / (2.0 * q + 1.0);
            let numeric = hemisphere_power(&model, 90.0);
            assert!(
                ((numeric - analytic) / analytic).abs() < 1e-6,
                "q={q}: {numeric} vs {analytic}"
            );
        }
    }

    #[test]
    fn gaussian_taper_hits_design_point() {
        let feed = FeedPattern::gaussian(-12.0, 15.0);
        let s = eval_feed(&feed, 15.0, 90.0).unwrap();
        assert!((20.0 * s.co.norm().log10() + 12.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_interpolates_in_db() {
        let plane = TabulatedPlane::new(
            vec![0.0, 10.0, 20.0],
            vec![0.0, -6.0, -20.0],
            None,
        )
        .unwrap();
        let feed = FeedPattern {
            model: Arc::new(Tabulated {
                e_plane: plane.clone(),
                h_plane: plane,
            }),
            polarization: Polarization::LinearY,
            phase_center_offset_mm: 0.0,
        };
        let s = eval_feed(&feed, 5.0, 0.0).unwrap();
        assert!((20.0 * s.co.norm().log10() + 3.0).abs() < 1e-9);
        // Beyond the table: hold the last value.
        let s = eval_feed(&feed, 40.0, 0.0).unwrap();
        assert!((20.0 * s.co.norm().log10() + 20.0).abs() < 1e-9);
    }

    #[test]
    fn tabulated_rejects_malformed_tables() {
        assert!(TabulatedPlane::new(vec![1.0, 2.0], vec![0.0, -1.0], None).is_err());
        assert!(TabulatedPlane::new(vec![0.0, 2.0, 1.5], vec![0.0, -1.0, -2.0], None).is_err());
        assert!(TabulatedPlane::new(vec![0.0, 2.0], vec![-0.5, -1.0], None).is_err());
    }
}
