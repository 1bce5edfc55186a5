//! Scalar figures of merit extracted from pattern cuts.
//!
//! All extraction is deterministic interpolation over the cut samples:
//! −3 dB crossings and peaks by local parabolic fits (exact for Gaussian
//! beams), nulls by the rise-after-deep-fall rule.

use crate::error::{Error, Result};
use crate::numeric::{parabolic_crossing, parabolic_vertex};
use crate::solver::PatternCut;

/// Depth below the peak a cut must fall before a rise counts as the first
/// null; guards against shoulder artifacts.
const NULL_SEARCH_FLOOR_DB: f64 = -15.0;

/// Per-plane metrics row.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneMetrics {
    pub gain_dbi: f64,
    pub hpbw_deg: f64,
    pub first_sll_db: Option<f64>,
    pub xpol_peak_db: Option<f64>,
    pub pointing_deg: f64,
}

/// Metrics for both principal planes of one scenario at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub scenario_id: String,
    pub frequency_ghz: f64,
    pub e_plane: PlaneMetrics,
    pub h_plane: PlaneMetrics,
    /// Cross-pol search window half-width in units of HPBW.
    pub xpol_window_multiplier: f64,
}

fn peak_index(cut: &PatternCut) -> Result<usize> {
    let idx = cut
        .co_db
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Range("empty cut".into()))?;
    if idx == 0 || idx == cut.co_db.len() - 1 {
        return Err(Error::Range(
            "main-beam peak sits on the cut boundary".into(),
        ));
    }
    Ok(idx)
}

/// Crossing of `level` dB on one side of the peak, by parabolic
/// interpolation over the three samples bracketing the crossing.
fn crossing(cut: &PatternCut, peak: usize, level: f64, rightward: bool) -> Result<f64> {
    let n = cut.co_db.len();
    let mut prev = peak;
    loop {
        let next = if rightward {
            if prev + 1 >= n {
                return Err(Error::Range("-3 dB crossing outside cut range".into()));
            }
            prev + 1
        } else {
            if prev == 0 {
                return Err(Error::Range("-3 dB crossing outside cut range".into()));
            }
            prev - 1
        };
        if cut.co_db[next] < level {
            // Crossing between prev and next; fit around it.
            let tri: [usize; 3] = if rightward {
                if next + 1 < n {
                    [prev, next, next + 1]
                } else {
                    [prev - 1, prev, next]
                }
            } else if next >= 1 {
                [next - 1, next, prev]
            } else {
                [next, prev, prev + 1]
            };
            let xs = [
                cut.theta_deg[tri[0]],
                cut.theta_deg[tri[1]],
                cut.theta_deg[tri[2]],
            ];
            let ys = [cut.co_db[tri[0]], cut.co_db[tri[1]], cut.co_db[tri[2]]];
            return parabolic_crossing(xs, ys, level)
                .ok_or_else(|| Error::Range("no -3 dB crossing in bracket".into()));
        }
        prev = next;
    }
}

/// Half-power beamwidth: width between the −3 dB crossings either side of
/// the main-beam peak.
pub fn hpbw(cut: &PatternCut) -> Result<f64> {
    let peak = peak_index(cut)?;
    let level = cut.co_db[peak] - 3.0;
    let right = crossing(cut, peak, level, true)?;
    let left = crossing(cut, peak, level, false)?;
    Ok(right - left)
}

fn first_null(cut: &PatternCut, peak: usize, rightward: bool) -> Option<usize> {
    let n = cut.co_db.len();
    let floor = cut.co_db[peak] + NULL_SEARCH_FLOOR_DB;
    let mut i = peak;
    let mut deep_enough = false;
    loop {
        let next = if rightward {
            if i + 1 >= n {
                return None;
            }
            i + 1
        } else {
            if i == 0 {
                return None;
            }
            i - 1
        };
        if cut.co_db[i] <= floor {
            deep_enough = true;
        }
        if deep_enough && cut.co_db[next] > cut.co_db[i] {
            return Some(i);
        }
        i = next;
    }
}

fn lobe_after(cut: &PatternCut, null: usize, rightward: bool) -> Option<f64> {
    let n = cut.co_db.len();
    let mut i = null;
    loop {
        let next = if rightward {
            if i + 1 >= n {
                // Cut ends while still rising: no complete lobe.
                return None;
            }
            i + 1
        } else {
            if i == 0 {
                return None;
            }
            i - 1
        };
        if cut.co_db[next] < cut.co_db[i] && i != null {
            // i is the lobe crest; refine with the neighbours.
            let (lo, hi) = if rightward { (i - 1, i + 1) } else { (i + 1, i - 1) };
            let (_, y) = parabolic_vertex(
                [cut.theta_deg[lo], cut.theta_deg[i], cut.theta_deg[hi]],
                [cut.co_db[lo], cut.co_db[i], cut.co_db[hi]],
            );
            return Some(y.max(cut.co_db[i]));
        }
        i = next;
    }
}

/// First sidelobe level relative to the peak: the first local maximum past
/// the first null, worst (highest) of the two sides. `None` when the cut is
/// monotone within range.
pub fn first_sll(cut: &PatternCut) -> Result<Option<f64>> {
    let peak = peak_index(cut)?;
    let mut best: Option<f64> = None;
    for rightward in [true, false] {
        if let Some(null) = first_null(cut, peak, rightward) {
            if let Some(lobe) = lobe_after(cut, null, rightward) {
                let rel = lobe - cut.co_db[peak];
                best = Some(best.map_or(rel, |b: f64| b.max(rel)));
            }
        }
    }
    Ok(best)
}

/// Peak cross-polar level relative to the co-polar peak inside a window of
/// ±`window_multiplier`×HPBW about the beam pointing. `None` for a
/// degenerate window or an identically floor-level cx cut.
pub fn xpol_peak(cut: &PatternCut, window_multiplier: f64) -> Result<Option<f64>> {
    if window_multiplier <= 0.0 {
        return Ok(None);
    }
    if cut.cx_db.iter().all(|v| !v.is_finite()) {
        return Ok(None);
    }
    let width = hpbw(cut)?;
    let center = pointing(cut)?;
    let peak_db = cut
        .co_db
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let best = cut
        .theta_deg
        .iter()
        .zip(&cut.cx_db)
        .filter(|(t, _)| (**t - center).abs() <= window_multiplier * width)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_finite() {
        Ok(Some(best - peak_db))
    } else {
        Ok(None)
    }
}

/// Parabolic-interpolated location of the main-beam peak.
pub fn pointing(cut: &PatternCut) -> Result<f64> {
    let peak = peak_index(cut)?;
    let (x, _) = parabolic_vertex(
        [
            cut.theta_deg[peak - 1],
            cut.theta_deg[peak],
            cut.theta_deg[peak + 1],
        ],
        [
            cut.co_db[peak - 1],
            cut.co_db[peak],
            cut.co_db[peak + 1],
        ],
    );
    Ok(x)
}

/// Bundles the per-plane extraction for a (E-plane, H-plane) pair of cuts.
pub fn extract_report(
    scenario_id: &str,
    e_cut: &PatternCut,
    h_cut: &PatternCut,
    xpol_window_multiplier: f64,
) -> Result<MetricsReport> {
    let plane = |cut: &PatternCut| -> Result<PlaneMetrics> {
        Ok(PlaneMetrics {
            gain_dbi: cut.peak_gain_dbi,
            hpbw_deg: hpbw(cut)?,
            first_sll_db: first_sll(cut)?,
            xpol_peak_db: xpol_peak(cut, xpol_window_multiplier)?,
            pointing_deg: pointing(cut)?,
        })
    };
    Ok(MetricsReport {
        scenario_id: scenario_id.to_string(),
        frequency_ghz: e_cut.frequency_ghz,
        e_plane: plane(e_cut)?,
        h_plane: plane(h_cut)?,
        xpol_window_multiplier,
    })
}
