//! Post-processing of trajectories: Sobolev growth rates, energy cascade,
//! spatial concentration, boundedness and Wiener-norm tracking.

use std::f64::consts::PI;

use crate::dynamics::{RecordState, TrajectoryRecord};
use crate::error::{Result, SzegoError};
use crate::hardy::{self, HardyCoeffs};
use crate::reduced;

/// Minimum number of samples a growth fit accepts.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Which Sobolev quantity a diagnostic reads from the records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolevWeight {
    /// `‖u‖_{H^s}` with weight `(1+k)^{2s}`
    Inhomogeneous,
    /// `(Σ_{k≥1} k^{2s}|û(k)|²)^{1/2}`
    Homogeneous,
}

impl SobolevWeight {
    fn read(self, rec: &TrajectoryRecord, s: f64) -> Result<f64> {
        let sample = rec.sobolev_at(s).ok_or(SzegoError::MissingIndex(s))?;
        Ok(match self {
            SobolevWeight::Inhomogeneous => sample.norm,
            SobolevWeight::Homogeneous => sample.seminorm,
        })
    }
}

/// Exponential rate `(2s−1)√α` of `‖u(t)‖_{H^s}` for the datum `z + √α`.
pub fn predicted_growth_rate(s: f64, alpha: f64) -> f64 {
    (2.0 * s - 1.0) * alpha.sqrt()
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    LineFit {
        slope,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub s: f64,
    pub window: (f64, f64),
    /// Fitted `d/dt log‖u‖`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
    /// `(2s−1)√α` when the fit is attached to a blow-up run.
    pub predicted: Option<f64>,
}

impl GrowthFit {
    pub fn with_prediction(mut self, alpha: f64) -> Self {
        self.predicted = Some(predicted_growth_rate(self.s, alpha));
        self
    }

    /// `None` without a prediction or when the predicted rate is zero.
    pub fn relative_error(&self) -> Option<f64> {
        self.predicted
            .filter(|p| *p != 0.0)
            .map(|p| (self.slope - p).abs() / p.abs())
    }
}

/// Least-squares fit of `log‖u(t)‖` against `t` over `window`.
pub fn fit_growth(
    records: &[TrajectoryRecord],
    s: f64,
    window: (f64, f64),
    weight: SobolevWeight,
) -> Result<GrowthFit> {
    if !(window.0 < window.1) {
        return Err(SzegoError::InvalidConfig(format!(
            "empty fit window [{}, {}]",
            window.0, window.1
        )));
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for rec in records.iter().filter(|r| r.t >= window.0 && r.t <= window.1) {
        let value = weight.read(rec, s)?;
        if !(value > 0.0) {
            return Err(SzegoError::NonPositiveNorm { t: rec.t, value });
        }
        ts.push(rec.t);
        logs.push(value.ln());
    }
    if ts.len() < MIN_FIT_SAMPLES {
        return Err(SzegoError::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: ts.len(),
        });
    }
    let line = fit_line(&ts, &logs);
    Ok(GrowthFit {
        s,
        window,
        slope: line.slope,
        intercept: line.intercept,
        r_squared: line.r_squared,
        samples: ts.len(),
        predicted: None,
    })
}

/// `argmax_k k|û(k)|²`: the mode carrying most of the momentum density.
pub fn dominant_mode(u: &HardyCoeffs) -> usize {
    u.as_slice()
        .iter()
        .enumerate()
        .map(|(k, z)| (k, k as f64 * z.norm_sqr()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// `(t, dominant mode)` for every record; reduced states are expanded on
/// `n` modes first.
pub fn dominant_mode_series(records: &[TrajectoryRecord], n: usize) -> Result<Vec<(f64, usize)>> {
    records
        .iter()
        .map(|rec| {
            let mode = match &rec.state {
                RecordState::Full(u) => dominant_mode(u),
                RecordState::Reduced(s) => dominant_mode(&reduced::to_fourier(s, n)?),
            };
            Ok((rec.t, mode))
        })
        .collect()
}

/// `|u(θ)|` on `grid_size` equispaced points of `[0, 2π)`.
pub fn concentration_profile(u: &HardyCoeffs, grid_size: usize) -> Vec<(f64, f64)> {
    (0..grid_size)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / grid_size as f64;
            (theta, hardy::evaluate(u, theta).norm())
        })
        .collect()
}

/// Location of the maximum of a profile.
pub fn profile_peak(profile: &[(f64, f64)]) -> Option<(f64, f64)> {
    profile
        .iter()
        .copied()
        .fold(None, |best: Option<(f64, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessCertificate {
    pub sup_norm: f64,
    /// sup over the last 10% of the time window divided by the sup over
    /// the first 10%.
    pub ratio_late_to_early: f64,
}

/// Boundedness check on `‖u‖_{H^s}` (weight `(1+k)^{2s}`).
pub fn boundedness_certificate(records: &[TrajectoryRecord], s: f64) -> Result<BoundednessCertificate> {
    let first = records.first().ok_or(SzegoError::TooFewSamples { needed: 2, found: 0 })?;
    let last = records.last().unwrap();
    let (t0, t1) = (first.t, last.t);
    let span = t1 - t0;
    let tenth = 0.1 * span;
    let mut sup = f64::NEG_INFINITY;
    let mut early = f64::NEG_INFINITY;
    let mut late = f64::NEG_INFINITY;
    for rec in records {
        let v = SobolevWeight::Inhomogeneous.read(rec, s)?;
        sup = sup.max(v);
        if rec.t <= t0 + tenth {
            early = early.max(v);
        }
        if rec.t >= t1 - tenth {
            late = late.max(v);
        }
    }
    Ok(BoundednessCertificate {
        sup_norm: sup,
        ratio_late_to_early: late / early,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerTrack {
    pub sup_wiener: f64,
    /// Per-sample `Tr|K_u|` when recorded.
    pub trace_k: Vec<f64>,
    /// `max_t |Tr|K_{u(t)}| − Tr|K_{u(0)}||`.
    pub max_trace_deviation: Option<f64>,
}

pub fn wiener_track(records: &[TrajectoryRecord]) -> WienerTrack {
    let sup_wiener = records.iter().map(|r| r.wiener).fold(f64::NEG_INFINITY, f64::max);
    let trace_k: Vec<f64> = records.iter().filter_map(|r| r.trace_abs_k).collect();
    let max_trace_deviation = trace_k
        .first()
        .map(|&t0| trace_k.iter().map(|t| (t - t0).abs()).fold(0.0, f64::max));
    WienerTrack {
        sup_wiener,
        trace_k,
        max_trace_deviation,
    }
}

/// Largest absolute drift of the leading `K_u²` eigenvalues from the first
/// record.
pub fn spectral_drift(records: &[TrajectoryRecord]) -> Option<f64> {
    let first = records.first()?.ku2_top_eigs.as_ref()?;
    records
        .iter()
        .map(|r| {
            r.ku2_top_eigs.as_ref().map(|eigs| {
                eigs.iter()
                    .zip(first)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
        })
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

/// Largest relative drift of `(Q, M, E_α)` from the first record.
pub fn conservation_drift(records: &[TrajectoryRecord]) -> (f64, f64, f64) {
    let Some(first) = records.first() else {
        return (0.0, 0.0, 0.0);
    };
    let c0 = first.conserved;
    let rel = |x: f64, r: f64| (x - r).abs() / r.abs().max(f64::MIN_POSITIVE);
    records.iter().fold((0.0, 0.0, 0.0), |acc, r| {
        (
            acc.0.max(rel(r.conserved.q, c0.q)),
            acc.1.max(rel(r.conserved.m, c0.m)),
            acc.2.max(rel(r.conserved.e_alpha, c0.e_alpha)),
        )
    })
}
