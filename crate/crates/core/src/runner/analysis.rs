use std::collections::BTreeMap;

use crate::channels::ChannelKind;
use crate::closed_form::t_sep_noisy_w;
use crate::error::{Error, Result};

use super::{sort_points, CurvePoint, Method, RateFit, StateKind};

/// Points with `E_gl` at or below this are left out of rate fits.
pub const RATE_FIT_FLOOR: f64 = 1e-6;
/// A curve counts as separable once `E_gl` is at or below this.
pub const T_SEP_THRESHOLD: f64 = 1e-12;

pub type CurveKey = (StateKind, ChannelKind, usize, Method);

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
}

/// `None` with fewer than two points or no spread in `xs`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
        rms_residual: (ss_res / nf).sqrt(),
    })
}

/// Fits `ln E_gl = c - α γt` to one curve, skipping points at or below
/// [`RATE_FIT_FLOOR`].
pub fn fit_decay_rate(points: &[CurvePoint]) -> Result<RateFit> {
    let first = points.first().ok_or(Error::TooFewPoints(0))?;
    if points.iter().any(|p| p.curve_key() != first.curve_key()) {
        return Err(Error::Config("rate fit needs points from a single curve".into()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.e_gl > RATE_FIT_FLOOR)
        .map(|p| (p.gamma_t, p.e_gl.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let fit = linear_regression(&xs, &ys).ok_or(Error::TooFewPoints(xs.len()))?;
    Ok(RateFit {
        state: first.state,
        channel: first.channel,
        n: first.n,
        method: first.method,
        alpha: -fit.slope,
        residual: fit.rms_residual,
        points_used: xs.len(),
    })
}

fn group(points: &[CurvePoint]) -> BTreeMap<CurveKey, Vec<CurvePoint>> {
    let mut sorted = points.to_vec();
    sort_points(&mut sorted);
    let mut groups: BTreeMap<CurveKey, Vec<CurvePoint>> = BTreeMap::new();
    for p in sorted {
        groups.entry(p.curve_key()).or_default().push(p);
    }
    groups
}

/// Rate fit of every curve in `points`, in curve order.
pub fn fit_all(points: &[CurvePoint]) -> Vec<(CurveKey, Result<RateFit>)> {
    group(points)
        .into_iter()
        .map(|(key, pts)| (key, fit_decay_rate(&pts)))
        .collect()
}

/// First `γt` at which one curve reaches [`T_SEP_THRESHOLD`]. Closed-form
/// noisy W curves are refined to the exact root; other curves report the
/// grid point.
pub fn detect_t_sep(points: &[CurvePoint]) -> Option<f64> {
    let hit = points.iter().find(|p| p.e_gl <= T_SEP_THRESHOLD)?;
    if (hit.state, hit.channel, hit.method) == (StateKind::W, ChannelKind::Noisy, Method::Closed) {
        if let Ok(t) = t_sep_noisy_w(hit.n, 1.0) {
            return Some(t);
        }
    }
    Some(hit.gamma_t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TSepRecord {
    pub state: StateKind,
    pub channel: ChannelKind,
    pub n: usize,
    pub method: Method,
    pub t_sep: Option<f64>,
}

/// Separation time of every curve in `points`, in curve order.
pub fn detect_all(points: &[CurvePoint]) -> Vec<TSepRecord> {
    group(points)
        .into_iter()
        .map(|((state, channel, n, method), pts)| TSepRecord {
            state,
            channel,
            n,
            method,
            t_sep: detect_t_sep(&pts),
        })
        .collect()
}

/// Largest pointwise disagreement between two methods on the same curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub state: StateKind,
    pub channel: ChannelKind,
    pub n: usize,
    pub first: Method,
    pub second: Method,
    pub max_abs: f64,
    pub compared: usize,
}

impl Discrepancy {
    /// Agreement required between the two methods.
    pub fn tolerance(&self) -> f64 {
        match (self.first, self.second) {
            (Method::Closed, Method::Kraus) => 1e-9,
            _ => 1e-7,
        }
    }
}

/// Compares every pair of methods present for the same (state, channel, n)
/// at matching `γt` values.
pub fn method_discrepancies(points: &[CurvePoint]) -> Vec<Discrepancy> {
    let groups = group(points);
    let mut out = Vec::new();
    for (&(state, channel, n, first), a) in &groups {
        for (&(s2, c2, n2, second), b) in groups.range((state, channel, n, first)..) {
            if (s2, c2, n2) != (state, channel, n) || second == first {
                continue;
            }
            let mut max_abs = 0.0_f64;
            let mut compared = 0;
            for p in a {
                if let Some(q) = b.iter().find(|q| q.gamma_t == p.gamma_t) {
                    max_abs = max_abs.max((p.e_gl - q.e_gl).abs());
                    compared += 1;
                }
            }
            out.push(Discrepancy {
                state,
                channel,
                n,
                first,
                second,
                max_abs,
                compared,
            });
        }
    }
    out
}
