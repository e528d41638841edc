//! Two-segment linear fit of the average link count against K.
//!
//! The first segment covers `1 <= K <= M`, the second `M + 1 <= K <= 15`.
//! Segments are fitted independently by ordinary least squares; no
//! continuity is imposed at the breakpoint.

use serde::Serialize;

use crate::error::{param, Result};

/// Largest K covered by the second segment.
pub const SEGMENT2_MAX_K: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Residual sum of squares.
    pub rss: f64,
    pub points: usize,
}

/// Ordinary least squares `y = a + b x`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len();
    if n < 2 {
        return Err(param(format!("line fit needs at least 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(param("line fit needs at least two distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(LineFit {
        intercept,
        slope,
        rss,
        points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitParams {
    pub antennas: usize,
    /// `a1 + b1 K` for `1 <= K <= M`.
    pub diversity: LineFit,
    /// `a2 + b2 K` for `M + 1 <= K <= 15`.
    pub multiuser: LineFit,
}

impl FitParams {
    pub fn predict(&self, k: usize) -> f64 {
        let seg = if k <= self.antennas {
            &self.diversity
        } else {
            &self.multiuser
        };
        seg.intercept + seg.slope * k as f64
    }
}

/// Fits both segments to `(K, C)` points for `M` receive antennas.
///
/// With `M = 1` the first segment holds only `K = 1`; it is pinned to
/// `a1 = 0, b1 = C(1)`.
pub fn fit_two_stage(points: &[(usize, f64)], antennas: usize) -> Result<FitParams> {
    if antennas == 0 {
        return Err(param("antenna count must be at least 1"));
    }
    let first: Vec<(f64, f64)> = points
        .iter()
        .filter(|(k, _)| (1..=antennas).contains(k))
        .map(|&(k, c)| (k as f64, c))
        .collect();
    let second: Vec<(f64, f64)> = points
        .iter()
        .filter(|(k, _)| (antennas + 1..=SEGMENT2_MAX_K).contains(k))
        .map(|&(k, c)| (k as f64, c))
        .collect();

    let diversity = if antennas == 1 {
        match first.as_slice() {
            [(_, c)] => LineFit {
                intercept: 0.0,
                slope: *c,
                rss: 0.0,
                points: 1,
            },
            _ => return Err(param("segment 1 with M = 1 needs exactly the K = 1 point")),
        }
    } else {
        fit_line(&first).map_err(|e| param(format!("segment 1 (K = 1..{antennas}): {e}")))?
    };
    let multiuser = fit_line(&second).map_err(|e| {
        param(format!(
            "segment 2 (K = {}..{SEGMENT2_MAX_K}): {e}",
            antennas + 1
        ))
    })?;
    Ok(FitParams {
        antennas,
        diversity,
        multiuser,
    })
}
