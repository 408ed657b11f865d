//! Time integration of the truncated Galerkin flow and of the reduced flow
//! on `L(1)`, with diagnostics sampled on a fixed time grid.
//!
//! Both flows are advanced by classical RK4, either with a fixed step or
//! with step doubling (one step of `h` against two of `h/2`, local error
//! estimated as their difference over 15).

use num_complex::Complex64;

use crate::error::{Result, SzegoError};
use crate::hankel;
use crate::hardy::{self, ConservedTriple, CubicConvolver, HardyCoeffs};
use crate::reduced::{self, L1Derivative, L1State};

/// Smallest step the adaptive scheme may take before giving up.
pub const MIN_ADAPTIVE_STEP: f64 = 1e-12;
/// `|c|` below which a reduced run stops.
pub const C_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rk4Fixed,
    Rk4Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Fixed step, or the initial step for the adaptive scheme.
    pub dt: f64,
    /// Final time; negative values integrate backwards.
    pub t_end: f64,
    pub sample_every: f64,
    pub scheme: Scheme,
    /// Local error target per step, relative to `1 + max|state|`.
    pub adapt_tol: f64,
    /// Largest `|p|` a reduced run may reach.
    pub pole_guard: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            sample_every: 0.05,
            scheme: Scheme::Rk4Fixed,
            adapt_tol: 1e-10,
            pole_guard: 1.0 - 1e-10,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(dt: f64, t_end: f64, sample_every: f64) -> Self {
        Self {
            dt,
            t_end,
            sample_every,
            ..Self::default()
        }
    }

    pub fn adaptive(dt: f64, t_end: f64, sample_every: f64, adapt_tol: f64) -> Self {
        Self {
            dt,
            t_end,
            sample_every,
            scheme: Scheme::Rk4Adaptive,
            adapt_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(SzegoError::InvalidConfig(msg.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.sample_every > 0.0 && self.sample_every.is_finite()) {
            return bad("sample_every must be positive");
        }
        if self.dt > self.sample_every {
            return bad("dt must not exceed sample_every");
        }
        if !self.t_end.is_finite() {
            return bad("t_end must be finite");
        }
        if !(self.adapt_tol > 0.0) {
            return bad("adapt_tol must be positive");
        }
        if !(self.pole_guard > 0.0 && self.pole_guard < 1.0) {
            return bad("pole_guard must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Which diagnostics to attach to each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordOptions {
    /// Sobolev indices to record.
    pub s_list: Vec<f64>,
    /// Section size `M` for the `K_u²` spectrum (full runs only).
    pub spectral_section: Option<usize>,
    /// Number of leading eigenvalues kept.
    pub spectral_top: usize,
}

impl Default for RecordOptions {
    fn default() -> Self {
        Self {
            s_list: vec![1.0, 2.0],
            spectral_section: None,
            spectral_top: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecordState {
    Full(HardyCoeffs),
    Reduced(L1State),
}

impl RecordState {
    pub fn as_full(&self) -> Option<&HardyCoeffs> {
        match self {
            RecordState::Full(u) => Some(u),
            RecordState::Reduced(_) => None,
        }
    }

    pub fn as_reduced(&self) -> Option<&L1State> {
        match self {
            RecordState::Reduced(s) => Some(s),
            RecordState::Full(_) => None,
        }
    }
}

/// `‖u‖_{H^s}` (weight `(1+k)^{2s}`) and the homogeneous seminorm at one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSample {
    pub s: f64,
    pub norm: f64,
    pub seminorm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub state: RecordState,
    pub conserved: ConservedTriple,
    pub sobolev: Vec<SobolevSample>,
    pub wiener: f64,
    /// Reduced runs only.
    pub discriminant: Option<f64>,
    /// Leading eigenvalues of the `K_u²` section, descending (full runs).
    pub ku2_top_eigs: Option<Vec<f64>>,
    /// `Tr|K_u|` of the same section.
    pub trace_abs_k: Option<f64>,
}

impl TrajectoryRecord {
    pub fn sobolev_at(&self, s: f64) -> Option<&SobolevSample> {
        self.sobolev.iter().find(|x| x.s == s)
    }
}

/// Why a trajectory ended before `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    PoleGuard { t: f64, modulus: f64 },
    Underflow { t: f64 },
    NonFinite { t: f64 },
    Stiff { t: f64, dt: f64 },
}

impl StopReason {
    pub fn label(&self) -> &'static str {
        match self {
            StopReason::PoleGuard { .. } => "pole_guard",
            StopReason::Underflow { .. } => "underflow",
            StopReason::NonFinite { .. } => "non_finite",
            StopReason::Stiff { .. } => "stiff",
        }
    }

    pub fn time(&self) -> f64 {
        match *self {
            StopReason::PoleGuard { t, .. }
            | StopReason::Underflow { t }
            | StopReason::NonFinite { t }
            | StopReason::Stiff { t, .. } => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub stop: Option<StopReason>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryRecord {
        self.records.last().expect("trajectory always holds the initial record")
    }

    pub fn completed(&self) -> bool {
        self.stop.is_none()
    }
}

/// `−i (Π(|u|²u) + α û(0) e₀)`
pub fn full_rhs(u: &HardyCoeffs, alpha: f64) -> HardyCoeffs {
    let mut flow = FullFlow::new(u.n(), alpha);
    let rate = flow.rate_of(u.as_slice());
    HardyCoeffs::new(rate).expect("rhs of a finite state is finite")
}

enum Halt {
    Pole(f64),
}

trait Flow {
    type State: Clone;
    type Rate;

    fn rate(&mut self, y: &Self::State) -> std::result::Result<Self::Rate, Halt>;
    fn advance(y: &Self::State, k: &Self::Rate, h: f64) -> Self::State;
    /// `a + w·b`
    fn axpy(a: &Self::Rate, b: &Self::Rate, w: f64) -> Self::Rate;
    fn distance(a: &Self::State, b: &Self::State) -> f64;
    fn scale(y: &Self::State) -> f64;
    /// Post-step admissibility check.
    fn check(&self, y: &Self::State, t: f64) -> Option<StopReason>;
}

struct FullFlow {
    alpha: f64,
    conv: CubicConvolver,
}

impl FullFlow {
    fn new(n: usize, alpha: f64) -> Self {
        Self {
            alpha,
            conv: CubicConvolver::new(n),
        }
    }

    fn rate_of(&mut self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        self.conv.apply(u, &mut out);
        out[0] += u[0] * self.alpha;
        let minus_i = Complex64::new(0.0, -1.0);
        out.iter_mut().for_each(|z| *z *= minus_i);
        out
    }
}

impl Flow for FullFlow {
    type State = Vec<Complex64>;
    type Rate = Vec<Complex64>;

    fn rate(&mut self, y: &Self::State) -> std::result::Result<Self::Rate, Halt> {
        Ok(self.rate_of(y))
    }

    fn advance(y: &Self::State, k: &Self::Rate, h: f64) -> Self::State {
        y.iter().zip(k).map(|(a, b)| a + b * h).collect()
    }

    fn axpy(a: &Self::Rate, b: &Self::Rate, w: f64) -> Self::Rate {
        Self::advance(a, b, w)
    }

    fn distance(a: &Self::State, b: &Self::State) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn scale(y: &Self::State) -> f64 {
        y.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check(&self, y: &Self::State, t: f64) -> Option<StopReason> {
        (!y.iter().all(|z| z.is_finite())).then_some(StopReason::NonFinite { t })
    }
}

struct ReducedFlow {
    alpha: f64,
    pole_guard: f64,
}

impl Flow for ReducedFlow {
    type State = L1State;
    type Rate = L1Derivative;

    fn rate(&mut self, y: &L1State) -> std::result::Result<L1Derivative, Halt> {
        reduced::reduced_rhs(y, self.alpha).map_err(|_| Halt::Pole(y.p.norm()))
    }

    fn advance(y: &L1State, k: &L1Derivative, h: f64) -> L1State {
        y.add_scaled(k, h)
    }

    fn axpy(a: &L1Derivative, b: &L1Derivative, w: f64) -> L1Derivative {
        a.combine(b, w)
    }

    fn distance(a: &L1State, b: &L1State) -> f64 {
        a.max_abs_diff(b)
    }

    fn scale(y: &L1State) -> f64 {
        y.b.norm().max(y.c.norm()).max(y.p.norm())
    }

    fn check(&self, y: &L1State, t: f64) -> Option<StopReason> {
        if !y.is_finite() {
            return Some(StopReason::NonFinite { t });
        }
        let modulus = y.p.norm();
        if modulus >= self.pole_guard {
            return Some(StopReason::PoleGuard { t, modulus });
        }
        (y.c.norm() < C_UNDERFLOW).then_some(StopReason::Underflow { t })
    }
}

fn rk4_step<F: Flow>(flow: &mut F, y: &F::State, h: f64) -> std::result::Result<F::State, Halt> {
    let k1 = flow.rate(y)?;
    let k2 = flow.rate(&F::advance(y, &k1, 0.5 * h))?;
    let k3 = flow.rate(&F::advance(y, &k2, 0.5 * h))?;
    let k4 = flow.rate(&F::advance(y, &k3, h))?;
    let incr = F::axpy(&F::axpy(&F::axpy(&k1, &k2, 2.0), &k3, 2.0), &k4, 1.0);
    Ok(F::advance(y, &incr, h / 6.0))
}

struct Stepper<'a, F: Flow> {
    flow: F,
    cfg: &'a IntegratorConfig,
    h: f64,
    accepted: usize,
    rejected: usize,
}

impl<F: Flow> Stepper<'_, F> {
    /// Advances `y` from `t` to `target` (same sign convention as `t_end`).
    fn advance_to(&mut self, y: &mut F::State, t: &mut f64, target: f64) -> Option<StopReason> {
        let dir = (target - *t).signum();
        match self.cfg.scheme {
            Scheme::Rk4Fixed => {
                let span = (target - *t).abs();
                let steps = ((span / self.cfg.dt) - 1e-9).ceil().max(1.0) as usize;
                let h = dir * span / steps as f64;
                for i in 0..steps {
                    let next = match rk4_step(&mut self.flow, y, h) {
                        Ok(next) => next,
                        Err(Halt::Pole(modulus)) => return Some(StopReason::PoleGuard { t: *t, modulus }),
                    };
                    let t_next = if i + 1 == steps { target } else { *t + h };
                    if let Some(stop) = self.flow.check(&next, t_next) {
                        return Some(stop);
                    }
                    *y = next;
                    *t = t_next;
                    self.accepted += 1;
                }
                None
            }
            Scheme::Rk4Adaptive => {
                while (target - *t) * dir > 1e-14 * (1.0 + t.abs()) {
                    let remaining = (target - *t).abs();
                    let h = self.h.min(remaining);
                    if h < MIN_ADAPTIVE_STEP {
                        return Some(StopReason::Stiff { t: *t, dt: h });
                    }
                    let attempt = rk4_step(&mut self.flow, y, dir * h).and_then(|coarse| {
                        let mid = rk4_step(&mut self.flow, y, 0.5 * dir * h)?;
                        let fine = rk4_step(&mut self.flow, &mid, 0.5 * dir * h)?;
                        Ok((coarse, fine))
                    });
                    let (coarse, fine) = match attempt {
                        Ok(pair) => pair,
                        Err(Halt::Pole(_)) => {
                            // Step overshot towards the circle; retry smaller.
                            self.h = 0.25 * h;
                            self.rejected += 1;
                            continue;
                        }
                    };
                    let err = F::distance(&coarse, &fine) / 15.0;
                    let allowed = self.cfg.adapt_tol * (1.0 + F::scale(&fine));
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 5.0)
                    };
                    if err.is_finite() && err <= allowed {
                        let t_next = if h == remaining { target } else { *t + dir * h };
                        if let Some(stop) = self.flow.check(&fine, t_next) {
                            return Some(stop);
                        }
                        *y = fine;
                        *t = t_next;
                        self.accepted += 1;
                        self.h = (h * factor).min(self.cfg.sample_every);
                    } else {
                        self.rejected += 1;
                        self.h = h * if err.is_finite() { factor.min(0.9) } else { 0.2 };
                    }
                }
                None
            }
        }
    }
}

fn drive<F: Flow>(
    flow: F,
    y0: F::State,
    cfg: &IntegratorConfig,
    mut record: impl FnMut(f64, &F::State) -> TrajectoryRecord,
) -> Trajectory {
    let mut stepper = Stepper {
        flow,
        cfg,
        h: cfg.dt.min(cfg.sample_every),
        accepted: 0,
        rejected: 0,
    };
    let mut records = vec![record(0.0, &y0)];
    let mut y = y0;
    let mut t = 0.0;
    let dir = if cfg.t_end < 0.0 { -1.0 } else { 1.0 };
    let span = cfg.t_end.abs();
    let full_samples = (span / cfg.sample_every + 1e-9).floor() as usize;
    let mut targets: Vec<f64> = (1..=full_samples)
        .map(|i| dir * (i as f64 * cfg.sample_every).min(span))
        .collect();
    if targets.last().map_or(span > 0.0, |&last| (last - cfg.t_end).abs() > 1e-12 * span.max(1.0)) {
        targets.push(cfg.t_end);
    }
    let mut stop = None;
    for target in targets {
        if let Some(reason) = stepper.advance_to(&mut y, &mut t, target) {
            stop = Some(reason);
            break;
        }
        records.push(record(target, &y));
    }
    Trajectory {
        records,
        stop,
        accepted_steps: stepper.accepted,
        rejected_steps: stepper.rejected,
    }
}

/// Diagnostics for a state of the truncated flow.
pub fn record_full(t: f64, u: &HardyCoeffs, alpha: f64, opts: &RecordOptions) -> TrajectoryRecord {
    let sobolev = opts
        .s_list
        .iter()
        .map(|&s| SobolevSample {
            s,
            norm: hardy::norm_hs(u, s),
            seminorm: hardy::seminorm_hs(u, s),
        })
        .collect();
    let (ku2_top_eigs, trace_abs_k) = match opts.spectral_section {
        Some(m) => match hankel::ku2_spectrum(u, m.min(u.n())) {
            Ok(spec) => (Some(spec.top(opts.spectral_top).to_vec()), Some(spec.trace_abs)),
            Err(_) => (None, None),
        },
        None => (None, None),
    };
    TrajectoryRecord {
        t,
        state: RecordState::Full(u.clone()),
        conserved: hardy::conserved(u, alpha),
        sobolev,
        wiener: hardy::norm_wiener(u),
        discriminant: None,
        ku2_top_eigs,
        trace_abs_k,
    }
}

/// Diagnostics for a state on `L(1)`, from closed forms and exact series.
pub fn record_reduced(t: f64, s: &L1State, alpha: f64, opts: &RecordOptions) -> TrajectoryRecord {
    let sobolev = opts
        .s_list
        .iter()
        .map(|&idx| SobolevSample {
            s: idx,
            norm: reduced::norm_hs(s, idx),
            seminorm: reduced::seminorm_hs(s, idx),
        })
        .collect();
    TrajectoryRecord {
        t,
        state: RecordState::Reduced(*s),
        conserved: reduced::conserved(s, alpha),
        sobolev,
        wiener: reduced::norm_wiener(s),
        discriminant: Some(reduced::blowup_discriminant(s)),
        ku2_top_eigs: None,
        trace_abs_k: None,
    }
}

/// Integrates the Galerkin-truncated equation on `u₀.n()` modes.
///
/// A non-finite state or an adaptive step below [`MIN_ADAPTIVE_STEP`] ends
/// the run early; the records up to the last good sample are kept and the
/// reason is returned in [`Trajectory::stop`].
pub fn integrate_full(
    u0: &HardyCoeffs,
    alpha: f64,
    cfg: &IntegratorConfig,
    opts: &RecordOptions,
) -> Result<Trajectory> {
    cfg.validate()?;
    let n = u0.n();
    let flow = FullFlow::new(n, alpha);
    Ok(drive(flow, u0.as_slice().to_vec(), cfg, |t, y| {
        let u = HardyCoeffs::new(y.clone()).expect("states are checked finite before recording");
        record_full(t, &u, alpha, opts)
    }))
}

/// Integrates the reduced system on `L(1)`; stops cleanly once
/// `|p| ≥ pole_guard` or `|c|` underflows.
pub fn integrate_reduced(
    s0: &L1State,
    alpha: f64,
    cfg: &IntegratorConfig,
    opts: &RecordOptions,
) -> Result<Trajectory> {
    cfg.validate()?;
    if s0.p.norm() >= cfg.pole_guard {
        return Err(SzegoError::PoleNearBoundary {
            modulus: s0.p.norm(),
        });
    }
    let flow = ReducedFlow {
        alpha,
        pole_guard: cfg.pole_guard,
    };
    Ok(drive(flow, *s0, cfg, |t, y| record_reduced(t, y, alpha, opts)))
}

/// Samples the closed-form solution on the same grid an integrator would use,
/// stopping like [`integrate_reduced`] once `|p| ≥ pole_guard`.
pub fn sample_exact(
    params: &reduced::ExactSolutionParams,
    cfg: &IntegratorConfig,
    opts: &RecordOptions,
) -> Result<Trajectory> {
    cfg.validate()?;
    let alpha = params.alpha();
    let count = (cfg.t_end.abs() / cfg.sample_every + 1e-9).floor() as usize;
    let dir = cfg.t_end.signum();
    let mut times: Vec<f64> = (0..=count).map(|i| dir * i as f64 * cfg.sample_every).collect();
    if (times[count] - cfg.t_end).abs() > 1e-12 * cfg.t_end.abs().max(1.0) {
        times.push(cfg.t_end);
    }
    let mut records = Vec::with_capacity(times.len());
    let mut stop = None;
    for t in times {
        let s = reduced::exact_solution(params, t);
        if s.p.norm() >= cfg.pole_guard {
            stop = Some(StopReason::PoleGuard {
                t,
                modulus: s.p.norm(),
            });
            break;
        }
        records.push(record_reduced(t, &s, alpha, opts));
    }
    Ok(Trajectory {
        records,
        stop,
        accepted_steps: 0,
        rejected_steps: 0,
    })
}
