//! Aperture-field construction and far-field evaluation.
//!
//! The aperture field is built by geometrical optics: each grid point inside
//! the projected rim maps back through the reflector system to a feed angle;
//! the sample gets the feed amplitude over the spherical spreading factor,
//! a uniform phase (equal-path property of a focused system), and the
//! polarization carried through the mirror reflections. Far-field cuts are
//! direct sums of the radiation integral — exact angles, no interpolation.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::blockage::{apply_mask, BlockageMask};
use crate::error::{Error, Result};
use crate::feed::{FeedPattern, Polarization, PolarizedFieldSample};
use crate::geometry::{feed_frame, reflect_field, ReflectorSystem};
use crate::numeric::power_to_db;
use crate::wavelength_mm;

/// Where the realized-gain dBs went. `spillover_db` and `film_db` are
/// applied on top of the aperture directivity; `taper_db` and `mask_db` are
/// informational, being already embedded in the sample amplitudes.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossBudget {
    pub spillover_db: f64,
    pub taper_db: f64,
    pub mask_db: f64,
    pub film_db: f64,
}

/// Complex co-/cross-polar samples on a regular aperture grid.
///
/// Grid coordinates are relative to the aperture centre, row-major with
/// index `j * grid_n + i`; `center_xy` places the grid in parent-axis
/// coordinates. Samples outside the projected rim are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureField {
    pub grid_n: usize,
    pub cell_size_mm: f64,
    pub frequency_ghz: f64,
    pub aperture_diameter_mm: f64,
    pub center_xy: (f64, f64),
    pub co: Vec<Complex64>,
    pub cx: Vec<Complex64>,
    pub loss_budget: LossBudget,
}

/// Solver knobs with the conventional defaults: 1024 grid cells per side and
/// a 1% guard band around the rim.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub grid_n: usize,
    /// Uniform full-aperture insertion loss (dB >= 0) of any transmissive
    /// film in the beam; kept out of the samples and charged to the budget.
    pub film_loss_db: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid_n: 1024,
            film_loss_db: 0.0,
        }
    }
}

const GUARD_BAND: f64 = 1.02;

impl ApertureField {
    /// Grid coordinate of a row/column index, relative to the centre.
    pub fn coord(&self, index: usize) -> f64 {
        (index as f64 - (self.grid_n as f64 - 1.0) / 2.0) * self.cell_size_mm
    }

    pub fn wavelength_mm(&self) -> f64 {
        wavelength_mm(self.frequency_ghz)
    }

    pub fn sample(&self, i: usize, j: usize) -> PolarizedFieldSample {
        let idx = j * self.grid_n + i;
        PolarizedFieldSample {
            co: self.co[idx],
            cx: self.cx[idx],
        }
    }

    /// Σ(|co|² + |cx|²)·ΔA over the grid.
    pub fn power_sum(&self) -> f64 {
        let da = self.cell_size_mm * self.cell_size_mm;
        self.co
            .iter()
            .zip(&self.cx)
            .map(|(c, x)| c.norm_sqr() + x.norm_sqr())
            .sum::<f64>()
            * da
    }

    /// Builds a synthetic co-polar field on the usual solver grid: `fill`
    /// is evaluated at every cell centre inside the rim, everything outside
    /// stays zero. Intended for closed-form test apertures.
    pub fn synthetic(
        aperture_diameter_mm: f64,
        frequency_ghz: f64,
        grid_n: usize,
        fill: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        check_grid(grid_n, aperture_diameter_mm, frequency_ghz)?;
        let cell = aperture_diameter_mm * GUARD_BAND / grid_n as f64;
        let radius = aperture_diameter_mm / 2.0;
        let half = (grid_n as f64 - 1.0) / 2.0;
        let mut co = vec![Complex64::default(); grid_n * grid_n];
        for j in 0..grid_n {
            let y = (j as f64 - half) * cell;
            for i in 0..grid_n {
                let x = (i as f64 - half) * cell;
                if x * x + y * y <= radius * radius {
                    co[j * grid_n + i] = fill(x, y);
                }
            }
        }
        Ok(Self {
            grid_n,
            cell_size_mm: cell,
            frequency_ghz,
            aperture_diameter_mm,
            center_xy: (0.0, 0.0),
            cx: vec![Complex64::default(); grid_n * grid_n],
            co,
            loss_budget: LossBudget::default(),
        })
    }

    /// Uniformly illuminated disc: the Airy reference aperture.
    pub fn uniform_disc(
        aperture_diameter_mm: f64,
        frequency_ghz: f64,
        grid_n: usize,
    ) -> Result<Self> {
        Self::synthetic(aperture_diameter_mm, frequency_ghz, grid_n, |_, _| {
            Complex64::new(1.0, 0.0)
        })
    }
}

fn check_grid(grid_n: usize, aperture_diameter_mm: f64, frequency_ghz: f64) -> Result<()> {
    if !(1.0..=300.0).contains(&frequency_ghz) {
        return Err(Error::OutOfBand { frequency_ghz });
    }
    if grid_n < 64 || !grid_n.is_multiple_of(2) {
        return Err(Error::Sampling(format!(
            "grid_n = {grid_n} must be even and >= 64"
        )));
    }
    let cell = aperture_diameter_mm * GUARD_BAND / grid_n as f64;
    let half_wave = wavelength_mm(frequency_ghz) / 2.0;
    if cell > half_wave {
        return Err(Error::Sampling(format!(
            "cell size {cell:.3} mm exceeds half-wavelength {half_wave:.3} mm; raise grid_n"
        )));
    }
    Ok(())
}

/// Ludwig-3 unit vectors (co, cx) for a feed direction, in the feed frame.
fn ludwig3_basis(
    theta_rad: f64,
    phi_rad: f64,
    polarization: Polarization,
) -> (nalgebra::Vector3<f64>, nalgebra::Vector3<f64>) {
    use nalgebra::Vector3;
    let (st, ct) = theta_rad.sin_cos();
    let (sp, cp) = phi_rad.sin_cos();
    let theta_hat = Vector3::new(ct * cp, ct * sp, -st);
    let phi_hat = Vector3::new(-sp, cp, 0.0);
    let co_y = theta_hat * sp + phi_hat * cp;
    let cx_y = theta_hat * cp - phi_hat * sp;
    match polarization {
        Polarization::LinearY => (co_y, cx_y),
        Polarization::LinearX => (cx_y, co_y),
    }
}

/// Constructs the aperture field for a system/feed/mask at one frequency.
///
/// Symmetric (back-fed) systems map through the Cassegrain equivalent
/// paraboloid; offset systems trace the real section point-by-point with
/// the polarization reflected at the surface.
pub fn aperture_field(
    system: &ReflectorSystem,
    feed: &FeedPattern,
    frequency_ghz: f64,
    mask: &BlockageMask,
    opts: &SolverOptions,
) -> Result<ApertureField> {
    system.validate()?;
    let d_ap = system.main.aperture_diameter_mm;
    check_grid(opts.grid_n, d_ap, frequency_ghz)?;

    let n = opts.grid_n;
    let cell = d_ap * GUARD_BAND / n as f64;
    let radius = d_ap / 2.0;
    let half = (n as f64 - 1.0) / 2.0;
    let k = TAU / wavelength_mm(frequency_ghz);
    let pc_offset = feed.phase_center_offset_mm;

    // Unnormalized rows: amplitude = feed / spreading, so |A|²·dA equals the
    // feed power in the corresponding solid-angle tube (GO conservation).
    let rows: Vec<Vec<(Complex64, Complex64)>> = if system.is_offset() {
        offset_rows(system, feed, n, cell, radius, half, k, pc_offset)
    } else {
        equivalent_paraboloid_rows(system, feed, n, cell, radius, half, k, pc_offset)
    };

    let da = cell * cell;
    let mut intercepted_power = 0.0;
    let mut peak_amp: f64 = 0.0;
    for row in &rows {
        for (co, cx) in row {
            intercepted_power += (co.norm_sqr() + cx.norm_sqr()) * da;
            peak_amp = peak_amp.max(co.norm());
        }
    }
    if peak_amp == 0.0 {
        return Err(Error::NoPower);
    }
    let spillover_eff = (intercepted_power / feed.model.total_power()).min(1.0);

    let scale = 1.0 / peak_amp;
    let mut co = Vec::with_capacity(n * n);
    let mut cx = Vec::with_capacity(n * n);
    for row in rows {
        for (c, x) in row {
            co.push(c * scale);
            cx.push(x * scale);
        }
    }

    let mut field = ApertureField {
        grid_n: n,
        cell_size_mm: cell,
        frequency_ghz,
        aperture_diameter_mm: d_ap,
        center_xy: system.aperture_center_xy(),
        co,
        cx,
        loss_budget: LossBudget::default(),
    };

    // Illumination (taper) efficiency of the unmasked field over the rim.
    let mut field_sum = Complex64::default();
    let mut power_sum = 0.0;
    let mut cells_inside = 0u64;
    for j in 0..n {
        let y = field.coord(j);
        for i in 0..n {
            let x = field.coord(i);
            if x * x + y * y <= radius * radius {
                cells_inside += 1;
                let idx = j * n + i;
                field_sum += field.co[idx];
                power_sum += field.co[idx].norm_sqr() + field.cx[idx].norm_sqr();
            }
        }
    }
    let taper_eff = if power_sum > 0.0 {
        field_sum.norm_sqr() / (power_sum * cells_inside as f64)
    } else {
        0.0
    };

    let unmasked_power = field.power_sum();
    let masked = apply_mask(mask, &field);
    let masked_power = masked.power_sum();
    field = masked;
    field.loss_budget = LossBudget {
        // `+ 0.0` normalizes the -0.0 that a lossless budget line produces.
        spillover_db: -power_to_db(spillover_eff) + 0.0,
        taper_db: -power_to_db(taper_eff.min(1.0)) + 0.0,
        mask_db: if masked_power > 0.0 {
            -power_to_db(masked_power / unmasked_power) + 0.0
        } else {
            f64::INFINITY
        },
        film_db: opts.film_loss_db,
    };
    Ok(field)
}

#[allow(clippy::too_many_arguments)]
fn equivalent_paraboloid_rows(
    system: &ReflectorSystem,
    feed: &FeedPattern,
    n: usize,
    cell: f64,
    radius: f64,
    half: f64,
    k: f64,
    pc_offset: f64,
) -> Vec<Vec<(Complex64, Complex64)>> {
    let fe = system.equivalent_focal_length_mm;
    (0..n)
        .into_par_iter()
        .map(|j| {
            let y = (j as f64 - half) * cell;
            let mut row = vec![(Complex64::default(), Complex64::default()); n];
            for (i, out) in row.iter_mut().enumerate() {
                let x = (i as f64 - half) * cell;
                let r2 = x * x + y * y;
                if r2 > radius * radius {
                    continue;
                }
                let r = r2.sqrt();
                let theta = 2.0 * (r / (2.0 * fe)).atan();
                let phi_deg = y.atan2(x).to_degrees();
                let s = feed
                    .model
                    .sample(theta.to_degrees(), phi_deg)
                    .expect("aperture maps inside the forward hemisphere");
                // 1/ρ spreading with ρ = Fe·(1 + (r/2Fe)²), kept in 1/mm so
                // |A|²·dA equals the feed power in the matching solid angle.
                let spreading = 1.0 / (fe * (1.0 + r2 / (4.0 * fe * fe)));
                let phase = Complex64::from_polar(1.0, -k * pc_offset * (1.0 - theta.cos()));
                *out = (s.co * spreading * phase, s.cx * spreading * phase);
            }
            row
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn offset_rows(
    system: &ReflectorSystem,
    feed: &FeedPattern,
    n: usize,
    cell: f64,
    radius: f64,
    half: f64,
    k: f64,
    pc_offset: f64,
) -> Vec<Vec<(Complex64, Complex64)>> {
    use nalgebra::{Point3, Vector3};
    let focus = system.primary_focus();
    let (cx0, cy0) = system.aperture_center_xy();
    let surface = system.main_surface();
    let frame = feed_frame(system);

    // Aperture co/cx axes from the centre-ray polarization image.
    let boresight_pol = match feed.polarization {
        Polarization::LinearY => frame[1],
        Polarization::LinearX => frame[0],
    };
    let center_normal = surface.normal_at(cx0, cy0);
    let reflected_center = reflect_field(&boresight_pol, &center_normal);
    let co_axis = Vector3::new(reflected_center.x, reflected_center.y, 0.0).normalize();
    let cx_axis = co_axis.cross(&Vector3::z());

    (0..n)
        .into_par_iter()
        .map(|j| {
            let y_rel = (j as f64 - half) * cell;
            let mut row = vec![(Complex64::default(), Complex64::default()); n];
            for (i, out) in row.iter_mut().enumerate() {
                let x_rel = (i as f64 - half) * cell;
                if x_rel * x_rel + y_rel * y_rel > radius * radius {
                    continue;
                }
                let x = cx0 + x_rel;
                let y = cy0 + y_rel;
                let p = Point3::new(x, y, surface.depth_at(x, y));
                let ray = p - focus;
                let rho = ray.norm();
                let dir = ray / rho;
                // Direction in the feed frame.
                let df = Vector3::new(dir.dot(&frame[0]), dir.dot(&frame[1]), dir.dot(&frame[2]));
                let theta = df.z.clamp(-1.0, 1.0).acos();
                let phi = df.y.atan2(df.x);
                let s = feed
                    .model
                    .sample(theta.to_degrees(), phi.to_degrees())
                    .expect("aperture maps inside the forward hemisphere");
                let (e_co_f, e_cx_f) = ludwig3_basis(theta, phi, feed.polarization);
                // Feed-frame vector to global.
                let to_global = |v: Vector3<f64>| frame[0] * v.x + frame[1] * v.y + frame[2] * v.z;
                let normal = surface.normal_at(x, y);
                let a_co = reflect_field(&to_global(e_co_f), &normal);
                let a_cx = reflect_field(&to_global(e_cx_f), &normal);
                let spreading = 1.0 / rho;
                let phase = Complex64::from_polar(1.0, -k * pc_offset * (1.0 - theta.cos()));
                // Decompose the reflected field onto the aperture axes.
                let co_amp = s.co * a_co.dot(&co_axis) + s.cx * a_cx.dot(&co_axis);
                let cx_amp = s.co * a_co.dot(&cx_axis) + s.cx * a_cx.dot(&cx_axis);
                *out = (co_amp * spreading * phase, cx_amp * spreading * phase);
            }
            row
        })
        .collect()
}

/// One far-field cut at constant φ.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCut {
    pub phi_plane_deg: f64,
    pub frequency_ghz: f64,
    pub theta_deg: Vec<f64>,
    /// Peak-normalized co-polar level; max(co_db) is exactly 0.
    pub co_db: Vec<f64>,
    /// Cross-polar level relative to the co-polar peak.
    pub cx_db: Vec<f64>,
    pub peak_gain_dbi: f64,
}

/// Radiation-integral sums at a list of direction cosines (ux, uy).
///
/// Each direction is an independent direct sum over the grid (phasor
/// recurrence along rows); parallelism is per-direction so the result is
/// bit-identical for any worker count.
fn radiate(field: &ApertureField, dirs: &[(f64, f64)], k: f64) -> Vec<(Complex64, Complex64)> {
    let n = field.grid_n;
    let cell = field.cell_size_mm;
    let da = cell * cell;
    let half = (n as f64 - 1.0) / 2.0;
    let radius = field.aperture_diameter_mm / 2.0;
    // Non-zero column span per row (the rim is centred in grid coords).
    let spans: Vec<(usize, usize)> = (0..n)
        .map(|j| {
            let y = (j as f64 - half) * cell;
            let s2 = radius * radius - y * y;
            if s2 <= 0.0 {
                return (0, 0);
            }
            let hw = s2.sqrt();
            let i0 = ((half - hw / cell).floor().max(0.0)) as usize;
            let i1 = ((half + hw / cell).ceil() as usize + 1).min(n);
            (i0, i1)
        })
        .collect();

    dirs.par_iter()
        .map(|&(ux, uy)| {
            let mut sum_co = Complex64::default();
            let mut sum_cx = Complex64::default();
            for (j, &(i0, i1)) in spans.iter().enumerate() {
                if i0 >= i1 {
                    continue;
                }
                let y = (j as f64 - half) * cell;
                let x0 = (i0 as f64 - half) * cell;
                let mut rot = Complex64::from_polar(1.0, k * (x0 * ux + y * uy));
                let step = Complex64::from_polar(1.0, k * cell * ux);
                let row_co = &field.co[j * n + i0..j * n + i1];
                let row_cx = &field.cx[j * n + i0..j * n + i1];
                for (c, x) in row_co.iter().zip(row_cx) {
                    sum_co += c * rot;
                    sum_cx += x * rot;
                    rot *= step;
                }
            }
            (sum_co * da, sum_cx * da)
        })
        .collect()
}

/// Evaluates the scalar radiation integral along a φ-plane cut and returns
/// the peak-normalized pattern with the realized gain attached.
pub fn far_field_cut(
    field: &ApertureField,
    phi_plane_deg: f64,
    theta_min_deg: f64,
    theta_max_deg: f64,
    n_points: usize,
) -> Result<PatternCut> {
    if n_points < 3 {
        return Err(Error::Sampling(format!(
            "cut needs at least 3 points, got {n_points}"
        )));
    }
    if theta_min_deg >= theta_max_deg
        || theta_min_deg < -90.0
        || theta_max_deg > 90.0
    {
        return Err(Error::Range(format!(
            "theta range [{theta_min_deg}, {theta_max_deg}] invalid"
        )));
    }
    let gain = directivity(field)?; // also rejects the all-zero field

    let k = TAU / field.wavelength_mm();
    let (sp, cp) = phi_plane_deg.to_radians().sin_cos();
    let theta: Vec<f64> = (0..n_points)
        .map(|i| {
            theta_min_deg + (theta_max_deg - theta_min_deg) * i as f64 / (n_points - 1) as f64
        })
        .collect();
    let dirs: Vec<(f64, f64)> = theta
        .iter()
        .map(|t| {
            let s = t.to_radians().sin();
            (s * cp, s * sp)
        })
        .collect();
    let sums = radiate(field, &dirs, k);

    let peak = sums
        .iter()
        .map(|(co, _)| co.norm())
        .fold(0.0f64, f64::max);
    if peak == 0.0 {
        return Err(Error::NoPower);
    }
    let mut co_db: Vec<f64> = sums
        .iter()
        .map(|(co, _)| 20.0 * (co.norm() / peak).log10())
        .collect();
    let max_db = co_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for v in &mut co_db {
        *v -= max_db;
    }
    let cx_db: Vec<f64> = sums
        .iter()
        .map(|(_, cx)| 20.0 * (cx.norm() / peak).log10() - max_db)
        .collect();

    Ok(PatternCut {
        phi_plane_deg,
        frequency_ghz: field.frequency_ghz,
        theta_deg: theta,
        co_db,
        cx_db,
        peak_gain_dbi: gain.realized_gain_dbi,
    })
}

/// Aperture directivity and realized gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub directivity_dbi: f64,
    pub realized_gain_dbi: f64,
}

/// Aperture-field directivity D = 4π·|ΣA·ΔA|² / (λ²·Σ|A|²·ΔA), with the
/// realized gain = D − spillover − film losses (mask losses are already in
/// the samples).
pub fn directivity(field: &ApertureField) -> Result<GainReport> {
    let da = field.cell_size_mm * field.cell_size_mm;
    let mut sum_co = Complex64::default();
    let mut sum_cx = Complex64::default();
    let mut power = 0.0;
    for (c, x) in field.co.iter().zip(&field.cx) {
        sum_co += c;
        sum_cx += x;
        power += c.norm_sqr() + x.norm_sqr();
    }
    let power = power * da;
    if power <= 0.0 {
        return Err(Error::NoPower);
    }
    let coherent = (sum_co.norm_sqr() + sum_cx.norm_sqr()) * da * da;
    let lambda = field.wavelength_mm();
    let d_lin = 4.0 * PI * coherent / (lambda * lambda * power);
    let d_dbi = power_to_db(d_lin);
    Ok(GainReport {
        directivity_dbi: d_dbi,
        realized_gain_dbi: d_dbi
            - field.loss_budget.spillover_db
            - field.loss_budget.film_db,
    })
}

/// Dense power samples P(θ, φ) on an angular grid, θ-major.
#[derive(Debug, Clone)]
pub struct SpherePattern {
    pub theta_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    /// Linear power, indexed `it * phi_deg.len() + ip`.
    pub power: Vec<f64>,
}

/// Evaluates |E|² on the given angular grid for integration cross-checks.
pub fn evaluate_sphere_pattern(
    field: &ApertureField,
    theta_deg: &[f64],
    phi_deg: &[f64],
) -> SpherePattern {
    let k = TAU / field.wavelength_mm();
    let mut dirs = Vec::with_capacity(theta_deg.len() * phi_deg.len());
    for t in theta_deg {
        let s = t.to_radians().sin();
        for p in phi_deg {
            let (sp, cp) = p.to_radians().sin_cos();
            dirs.push((s * cp, s * sp));
        }
    }
    let sums = radiate(field, &dirs, k);
    SpherePattern {
        theta_deg: theta_deg.to_vec(),
        phi_deg: phi_deg.to_vec(),
        power: sums
            .iter()
            .map(|(co, cx)| co.norm_sqr() + cx.norm_sqr())
            .collect(),
    }
}

/// Directivity from a dense pattern map: 4π·P_peak / ∫∫ P sinθ dθ dφ.
///
/// The main beam must carry at least 20 samples across its half-power
/// width, otherwise a sampling error is returned.
pub fn pattern_integrate_directivity(map: &SpherePattern) -> Result<f64> {
    let nt = map.theta_deg.len();
    let np = map.phi_deg.len();
    if nt < 3 || np < 1 || map.power.len() != nt * np {
        return Err(Error::Sampling(
            "pattern map needs >= 3 theta rows and matching power length".into(),
        ));
    }
    let peak = map.power.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Err(Error::NoPower);
    }

    // Under-sampling guard: walk θ away from the peak at its φ column and
    // count samples above half power.
    let peak_idx = map
        .power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let (pt, pp) = (peak_idx / np, peak_idx % np);
    let mut above = 1usize;
    let mut crossed_half = false;
    for it in (0..pt).rev() {
        if map.power[it * np + pp] >= peak / 2.0 {
            above += 1;
        } else {
            crossed_half = true;
            break;
        }
    }
    for it in pt + 1..nt {
        if map.power[it * np + pp] >= peak / 2.0 {
            above += 1;
        } else {
            crossed_half = true;
            break;
        }
    }
    // A beam wider than the whole map (e.g. isotropic) cannot be
    // under-sampled in a meaningful sense.
    if crossed_half && above < 20 {
        return Err(Error::Sampling(format!(
            "main beam spans only {above} samples across the half-power width"
        )));
    }

    // Trapezoid in θ (supports non-uniform spacing), midpoint-style weights
    // in φ with periodic wrap when the grid covers the full circle.
    let phi_weights: Vec<f64> = if np == 1 {
        vec![TAU]
    } else {
        let full_circle = (map.phi_deg[np - 1] - map.phi_deg[0]) > 360.0 - 1.5 * 360.0 / np as f64;
        (0..np)
            .map(|ip| {
                if full_circle {
                    let prev = if ip == 0 { np - 1 } else { ip - 1 };
                    let next = (ip + 1) % np;
                    let mut dp = map.phi_deg[next] - map.phi_deg[prev];
                    if dp <= 0.0 {
                        dp += 360.0;
                    }
                    dp.to_radians() / 2.0
                } else {
                    let lo = if ip == 0 { 0 } else { ip - 1 };
                    let hi = if ip == np - 1 { np - 1 } else { ip + 1 };
                    (map.phi_deg[hi] - map.phi_deg[lo]).to_radians() / 2.0
                }
            })
            .collect()
    };

    let mut total = 0.0;
    for it in 0..nt - 1 {
        let t0 = map.theta_deg[it].to_radians();
        let t1 = map.theta_deg[it + 1].to_radians();
        let dt = t1 - t0;
        for (ip, w) in phi_weights.iter().enumerate() {
            let f0 = map.power[it * np + ip] * t0.sin();
            let f1 = map.power[(it + 1) * np + ip] * t1.sin();
            total += 0.5 * (f0 + f1) * dt * w;
        }
    }
    if total <= 0.0 {
        return Err(Error::NoPower);
    }
    Ok(power_to_db(4.0 * PI * peak / total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_checks_reject_bad_input() {
        assert!(matches!(
            ApertureField::uniform_disc(500.0, 94.0, 63),
            Err(Error::Sampling(_))
        ));
        assert!(matches!(
            ApertureField::uniform_disc(500.0, 94.0, 127),
            Err(Error::Sampling(_))
        ));
        // 128 cells over 510 mm is ~4 mm per cell, coarser than λ/2.
        assert!(matches!(
            ApertureField::uniform_disc(500.0, 94.0, 128),
            Err(Error::Sampling(_))
        ));
        assert!(matches!(
            ApertureField::uniform_disc(500.0, 500.0, 1024),
            Err(Error::OutOfBand { .. })
        ));
    }

    #[test]
    fn uniform_disc_directivity_closed_form() {
        let field = ApertureField::uniform_disc(500.0, 94.0, 512).unwrap();
        let d = directivity(&field).unwrap();
        let expected = power_to_db((PI * 500.0 / field.wavelength_mm()).powi(2));
        assert!(
            (d.directivity_dbi - expected).abs() < 0.01,
            "{} vs {}",
            d.directivity_dbi,
            expected
        );
        assert!((expected - 53.85).abs() < 0.01);
    }

    #[test]
    fn all_zero_field_is_no_power() {
        let field =
            ApertureField::synthetic(500.0, 94.0, 384, |_, _| Complex64::default()).unwrap();
        assert!(matches!(directivity(&field), Err(Error::NoPower)));
        assert!(matches!(
            far_field_cut(&field, 0.0, -1.0, 1.0, 11),
            Err(Error::NoPower)
        ));
    }

    #[test]
    fn cut_peak_is_exactly_zero_and_symmetric() {
        let field = ApertureField::uniform_disc(500.0, 94.0, 384).unwrap();
        let cut = far_field_cut(&field, 0.0, -1.0, 1.0, 401).unwrap();
        let max = cut.co_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, 0.0);
        // Symmetric aperture: mirror samples agree.
        for i in 0..cut.theta_deg.len() {
            let j = cut.theta_deg.len() - 1 - i;
            assert!((cut.co_db[i] - cut.co_db[j]).abs() < 1e-9);
        }
        assert_eq!(cut.co_db[200], 0.0); // boresight sample
    }

    #[test]
    fn isotropic_map_integrates_to_zero_dbi() {
        let nt = 181;
        let np = 72;
        let theta: Vec<f64> = (0..nt).map(|i| i as f64).collect();
        let phi: Vec<f64> = (0..np).map(|i| i as f64 * 5.0).collect();
        let map = SpherePattern {
            theta_deg: theta,
            phi_deg: phi,
            power: vec![1.0; nt * np],
        };
        let d = pattern_integrate_directivity(&map).unwrap();
        assert!(d.abs() < 0.01, "isotropic directivity {d} dBi");
    }

    #[test]
    fn undersampled_beam_rejected() {
        // Narrow Gaussian beam sampled on a 1-degree grid.
        let nt = 91;
        let theta: Vec<f64> = (0..nt).map(|i| i as f64).collect();
        let power: Vec<f64> = theta.iter().map(|t| (-t * t / 0.1).exp()).collect();
        let map = SpherePattern {
            theta_deg: theta,
            phi_deg: vec![0.0],
            power,
        };
        assert!(matches!(
            pattern_integrate_directivity(&map),
            Err(Error::Sampling(_))
        ));
    }
}
