//! Parameter sweeps over `γt`, decay-rate fits, separation-time detection and
//! CSV output.

mod analysis;
mod output;
pub mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::{apply_uniform_channel, kraus_for, lindblad_generator, ChannelKind, DecoherenceParameter};
use crate::closed_form::{ghz_ge_dephasing_closed, w_ge_closed};
use crate::error::{Error, Result};
use crate::integrator::{integrate, normalize_evolved, IntegrationConfig};
use crate::measures::{ge_ghz_tangle_route, ge_w_tangle_route, GEValue, GE_SLACK};
use crate::qmatrix::{DensityMatrix, MAX_QUBITS};
use crate::states::{density_from_pure, ghz_state, w_state};

pub use analysis::{
    detect_all, detect_t_sep, fit_all, fit_decay_rate, linear_regression, method_discrepancies, CurveKey,
    Discrepancy, LinearFit, TSepRecord, RATE_FIT_FLOOR, T_SEP_THRESHOLD,
};
pub use output::{
    emit_curve_csv, emit_rates_csv, emit_tsep_csv, format_float, read_curve_csv, CURVE_HEADER, RATES_HEADER,
    TSEP_HEADER,
};

/// Largest `n` accepted by closed-form-only sweeps.
pub const MAX_CLOSED_QUBITS: usize = 64;
pub const DEFAULT_GAMMA_T_MAX: f64 = 3.0;
pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateKind {
    Ghz,
    W,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Ghz => "ghz",
            StateKind::W => "w",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(StateKind::Ghz),
            "w" => Ok(StateKind::W),
            other => Err(Error::Config(format!("unknown state '{other}' (expected ghz or w)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Closed,
    Kraus,
    Ode,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Kraus => "kraus",
            Method::Ode => "ode",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Method::Closed),
            "kraus" => Ok(Method::Kraus),
            "ode" => Ok(Method::Ode),
            other => Err(Error::Config(format!("unknown method '{other}' (expected closed, kraus or ode)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub state: StateKind,
    pub channel: ChannelKind,
    pub n_list: Vec<usize>,
    pub gamma_t_max: f64,
    pub grid_points: usize,
    pub methods: Vec<Method>,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    /// Default grid (101 points on `[0, 3]`), no output path.
    pub fn new(state: StateKind, channel: ChannelKind, n_list: Vec<usize>, methods: Vec<Method>) -> Self {
        Self {
            state,
            channel,
            n_list,
            gamma_t_max: DEFAULT_GAMMA_T_MAX,
            grid_points: DEFAULT_GRID_POINTS,
            methods,
            output: None,
        }
    }

    pub fn with_grid(mut self, gamma_t_max: f64, grid_points: usize) -> Self {
        self.gamma_t_max = gamma_t_max;
        self.grid_points = grid_points;
        self
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = (self.grid_points - 1) as f64;
        (0..self.grid_points)
            .map(|k| self.gamma_t_max * k as f64 / last)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::Config("no qubit counts given".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods given".into()));
        }
        if !(self.gamma_t_max > 0.0) || !self.gamma_t_max.is_finite() {
            return Err(Error::Config(format!("gamma_t_max must be positive, got {}", self.gamma_t_max)));
        }
        if self.grid_points < 2 {
            return Err(Error::Config(format!("need at least 2 grid points, got {}", self.grid_points)));
        }
        for &method in &self.methods {
            if !valid_methods(self.state, self.channel).contains(&method) {
                return Err(Error::Config(format!(
                    "method {method} is not available for {}/{}; valid methods: {}",
                    self.state,
                    self.channel,
                    join(&valid_methods(self.state, self.channel))
                )));
            }
            for &n in &self.n_list {
                check_size(self.state, method, n)?;
            }
        }
        Ok(())
    }
}

fn join(methods: &[Method]) -> String {
    methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
}

/// Methods that can produce a curve for `state` under `channel`.
pub fn valid_methods(state: StateKind, channel: ChannelKind) -> Vec<Method> {
    match (state, channel) {
        (StateKind::Ghz, ChannelKind::Dissipative | ChannelKind::Noisy) => vec![Method::Kraus, Method::Ode],
        _ => vec![Method::Closed, Method::Kraus, Method::Ode],
    }
}

fn check_size(state: StateKind, method: Method, n: usize) -> Result<()> {
    let max = if method == Method::Closed { MAX_CLOSED_QUBITS } else { MAX_QUBITS };
    if n < 2 || n > max {
        return Err(Error::Config(format!("n = {n} outside 2..={max} for method {method}")));
    }
    if state == StateKind::Ghz && method != Method::Closed && n % 2 == 1 {
        return Err(Error::Config(format!(
            "GHZ with method {method} uses the N-concurrence and needs even n, got {n}"
        )));
    }
    Ok(())
}

/// One sample of a global-entanglement curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub state: StateKind,
    pub channel: ChannelKind,
    pub n: usize,
    pub gamma_t: f64,
    pub e_gl: f64,
    pub method: Method,
}

impl CurvePoint {
    /// Identifies the curve this point belongs to.
    pub fn curve_key(&self) -> (StateKind, ChannelKind, usize, Method) {
        (self.state, self.channel, self.n, self.method)
    }
}

/// Sorts by state, channel, n, method, then `γt`.
pub fn sort_points(points: &mut [CurvePoint]) {
    points.sort_by(|a, b| a.curve_key().cmp(&b.curve_key()).then(a.gamma_t.total_cmp(&b.gamma_t)));
}

/// Fitted exponential decay `E ∝ exp(-α γt)` of one curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub state: StateKind,
    pub channel: ChannelKind,
    pub n: usize,
    pub method: Method,
    pub alpha: f64,
    /// RMS of the log residuals.
    pub residual: f64,
    pub points_used: usize,
}

fn initial_state(state: StateKind, n: usize) -> Result<DensityMatrix> {
    Ok(density_from_pure(&match state {
        StateKind::Ghz => ghz_state(n)?,
        StateKind::W => w_state(n)?,
    }))
}

/// Global entanglement of an evolved register through the tangle route that
/// matches its entanglement structure.
fn tangle_route(state: StateKind, rho: &DensityMatrix) -> Result<GEValue> {
    match state {
        StateKind::Ghz => ge_ghz_tangle_route(rho),
        StateKind::W => ge_w_tangle_route(&rho.partial_trace(&[0, 1])?, rho.num_qubits()),
    }
}

/// Kraus route at a single `γt`.
pub fn kraus_point(state: StateKind, channel: ChannelKind, n: usize, gamma_t: f64) -> Result<f64> {
    let rho0 = initial_state(state, n)?;
    kraus_point_from(&rho0, state, channel, gamma_t)
}

fn kraus_point_from(rho0: &DensityMatrix, state: StateKind, channel: ChannelKind, gamma_t: f64) -> Result<f64> {
    let k = kraus_for(channel, DecoherenceParameter::from_gamma_t(gamma_t)?);
    Ok(tangle_route(state, &apply_uniform_channel(rho0, &k))?.value())
}

fn closed_point(state: StateKind, channel: ChannelKind, n: usize, gamma_t: f64) -> Result<f64> {
    Ok(match state {
        StateKind::W => w_ge_closed(channel, n, gamma_t)?,
        StateKind::Ghz => ghz_ge_dephasing_closed(n, gamma_t)?,
    }
    .value())
}

/// RK4 trajectory sampled on an ascending grid, with `γ = 1`.
fn ode_curve(state: StateKind, channel: ChannelKind, n: usize, grid: &[f64]) -> Result<Vec<f64>> {
    let spec = lindblad_generator(channel, 1.0)?;
    let mut raw = initial_state(state, n)?.into_matrix();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid {
        let dt = target - t;
        if dt > 0.0 {
            let cfg = IntegrationConfig::with_default_steps(dt, 1.0, &spec, n)?;
            raw = integrate(raw, n, &spec, &cfg);
            t = target;
        }
        let rho = normalize_evolved(raw.clone())?;
        out.push(tangle_route(state, &rho)?.value());
    }
    Ok(out)
}

fn curve(config: &SweepConfig, n: usize, method: Method, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    let (state, channel) = (config.state, config.channel);
    let values: Vec<f64> = match method {
        Method::Closed => grid
            .iter()
            .map(|&gt| closed_point(state, channel, n, gt))
            .collect::<Result<_>>()?,
        Method::Kraus => {
            let rho0 = initial_state(state, n)?;
            grid.par_iter()
                .map(|&gt| kraus_point_from(&rho0, state, channel, gt))
                .collect::<Result<_>>()?
        }
        Method::Ode => ode_curve(state, channel, n, grid)?,
    };
    values
        .into_iter()
        .zip(grid)
        .map(|(e_gl, &gamma_t)| {
            if !(-GE_SLACK..=1.0 + GE_SLACK).contains(&e_gl) {
                return Err(Error::Invariant(format!("E_gl = {e_gl} at γt = {gamma_t}")));
            }
            Ok(CurvePoint {
                state,
                channel,
                n,
                gamma_t,
                e_gl,
                method,
            })
        })
        .collect()
}

/// Evaluates every requested method for every `n` on the configured grid.
/// Output is in deterministic curve order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    let grid = config.grid();
    let jobs: Vec<(usize, Method)> = config
        .n_list
        .iter()
        .flat_map(|&n| config.methods.iter().map(move |&m| (n, m)))
        .collect();
    let curves: Vec<Vec<CurvePoint>> = jobs
        .par_iter()
        .map(|&(n, m)| curve(config, n, m, &grid))
        .collect::<Result<_>>()?;
    let mut points: Vec<CurvePoint> = curves.into_iter().flatten().collect();
    sort_points(&mut points);
    points.dedup_by(|a, b| a.curve_key() == b.curve_key() && a.gamma_t == b.gamma_t);
    Ok(points)
}

/// Largest pointwise increase along any curve; non-increasing curves give 0.
pub fn max_increase(points: &[CurvePoint]) -> f64 {
    let mut sorted = points.to_vec();
    sort_points(&mut sorted);
    sorted
        .windows(2)
        .filter(|w| w[0].curve_key() == w[1].curve_key())
        .map(|w| w[1].e_gl - w[0].e_gl)
        .fold(0.0, f64::max)
}
