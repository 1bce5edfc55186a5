//! Small numerical utilities: quadrature, dB conversion, peak interpolation.

/// Amplitude ratio -> dB (20·log10), with a floor for zero amplitude.
pub fn amp_to_db(a: f64) -> f64 {
    if a <= 0.0 {
        f64::NEG_INFINITY
    } else {
        20.0 * a.log10()
    }
}

/// Power ratio -> dB (10·log10).
pub fn power_to_db(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * p.log10()
    }
}

/// dB -> amplitude ratio.
pub fn db_to_amp(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Adaptive Simpson quadrature of `f` on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Bessel function J1 evaluated from its integral representation
/// J1(x) = (1/π)·∫₀^π cos(τ − x·sinτ) dτ.
///
/// Slow but dependency-free; used as an independent reference for the
/// circular-aperture pattern, never on the solver path.
pub fn bessel_j1(x: f64) -> f64 {
    use std::f64::consts::PI;
    adaptive_simpson(|t| (t - x * t.sin()).cos(), 0.0, PI, 1e-12) / PI
}

/// Jinc-style circular-aperture pattern 2·J1(x)/x, continuous at 0.
pub fn airy_amplitude(x: f64) -> f64 {
    if x.abs() < 1e-9 {
        1.0 - x * x / 8.0
    } else {
        2.0 * bessel_j1(x) / x
    }
}

/// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2).
///
/// Returns `(x_peak, y_peak)`; falls back to the middle sample when the
/// three points are collinear.
pub fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return (x1, y1);
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a == 0.0 {
        return (x1, y1);
    }
    let xp = -b / (2.0 * a);
    let c = y0 - a * x0 * x0 - b * x0;
    (xp, a * xp * xp + b * xp + c)
}

/// Solve p(x) = level for the parabola through three samples, returning the
/// root inside [x[0], x[2]] when one exists.
pub fn parabolic_crossing(x: [f64; 3], y: [f64; 3], level: f64) -> Option<f64> {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return None;
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    let c = y0 - a * x0 * x0 - b * x0 - level;
    let roots: Vec<f64> = if a.abs() < 1e-300 {
        if b == 0.0 {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            vec![]
        } else {
            let s = disc.sqrt();
            vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
        }
    };
    let lo = x0.min(x2) - 1e-12;
    let hi = x0.max(x2) + 1e-12;
    roots
        .into_iter()
        .filter(|r| *r >= lo && *r <= hi)
        .min_by(|p, q| {
            let dp = (p - x1).abs();
            let dq = (q - x1).abs();
            dp.partial_cmp(&dq).unwrap()
        })
}

/// FNV-1a hash of a byte slice; used for provenance footers.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
