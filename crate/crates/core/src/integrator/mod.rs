//! Adaptive explicit Runge–Kutta integration with dense output and events.
//!
//! The stepper is the Dormand–Prince 8(5,3) pair: eighth order in the
//! propagated solution, with the error estimated from a blend of its fifth
//! and third order embedded solutions. Every accepted step stores the
//! coefficients of its seventh-order continuous extension, so a finished run
//! can be evaluated anywhere on `[start_s, final_s]`.

mod dense;
mod events;
mod tableau;

pub use dense::{Segment, ShotResult, ShotStats};
pub use events::{Direction, EventRecord, EventSpec};

use crate::error::{Error, Result};
use tableau::{A, C, D, DENSE_ORDER, E3_CORRECTION, E5, EXTENDED_STAGES, STAGES};

/// A first-order system `y' = f(s, y)` of fixed dimension `N`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, s: f64, y: &[f64; N], dy: &mut [f64; N]);

    /// Upper bound for the first step, for systems with a known length scale.
    fn step_hint(&self) -> Option<f64> {
        None
    }
}

/// Adapts a closure to [`OdeSystem`].
pub struct FnSystem<F>(pub F);

impl<F, const N: usize> OdeSystem<N> for FnSystem<F>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    fn rhs(&self, s: f64, y: &[f64; N], dy: &mut [f64; N]) {
        (self.0)(s, y, dy)
    }
}

impl<T: OdeSystem<N> + ?Sized, const N: usize> OdeSystem<N> for &T {
    fn rhs(&self, s: f64, y: &[f64; N], dy: &mut [f64; N]) {
        (**self).rhs(s, y, dy)
    }

    fn step_hint(&self) -> Option<f64> {
        (**self).step_hint()
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Event(&'static str),
    ArcLengthExhausted,
    StepFailure { reason: String },
}

/// Step control settings.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration stops at this value of the independent variable.
    pub max_arc_length: f64,
    /// `None` selects the step automatically.
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
    /// Events are localized to this width in `s`.
    pub event_tol: f64,
    /// Take constant steps of this size with no error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_arc_length: 6.0,
            initial_step: None,
            max_step: None,
            event_tol: 1e-12,
            fixed_step: None,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_max_arc_length(mut self, l_max: f64) -> Self {
        self.max_arc_length = l_max;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let checks = [
            (self.rel_tol, "rel_tol"),
            (self.abs_tol, "abs_tol"),
            (self.event_tol, "event_tol"),
            (self.max_arc_length, "max_arc_length"),
        ];
        for (value, name) in checks {
            if !positive(value) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and positive, got {value}")));
            }
        }
        for (value, name) in [
            (self.initial_step, "initial_step"),
            (self.max_step, "max_step"),
            (self.fixed_step, "fixed_step"),
        ] {
            if let Some(v) = value {
                if !positive(v) {
                    return Err(Error::InvalidConfig(format!("{name} must be finite and positive, got {v}")));
                }
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 1.0 / 8.0 - 0.75 * BETA;

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrate from `s = 0`.
pub fn integrate<S: OdeSystem<N>, const N: usize>(
    system: &S,
    y0: [f64; N],
    config: &IntegratorConfig,
    events: &[EventSpec<'_, N>],
) -> Result<ShotResult<N>> {
    integrate_from(system, 0.0, y0, config, events)
}

/// Integrate from `s0` up to `config.max_arc_length`, watching `events`.
///
/// Numerical trouble (a non-finite derivative that step reduction cannot
/// avoid, step underflow, or the step budget) ends the run with
/// [`Termination::StepFailure`] and keeps everything integrated so far. Only
/// bad inputs produce `Err`.
pub fn integrate_from<S: OdeSystem<N>, const N: usize>(
    system: &S,
    s0: f64,
    y0: [f64; N],
    config: &IntegratorConfig,
    events: &[EventSpec<'_, N>],
) -> Result<ShotResult<N>> {
    config.validate()?;
    if !s0.is_finite() || !all_finite(&y0) {
        return Err(Error::InvalidConfig("initial point must be finite".into()));
    }
    let s_end = config.max_arc_length;
    if s0 >= s_end {
        return Err(Error::InvalidConfig(format!(
            "start {s0} is not below max_arc_length {s_end}"
        )));
    }

    let mut out = ShotResult::new(s0, y0);
    let mut k = [[0.0; N]; EXTENDED_STAGES];
    system.rhs(s0, &y0, &mut k[0]);
    out.stats.rhs_evals += 1;
    if !all_finite(&k[0]) {
        out.termination = Termination::StepFailure {
            reason: format!("non-finite derivative at s = {s0}"),
        };
        return Ok(out);
    }

    let max_step = config.max_step.unwrap_or(f64::INFINITY);
    let mut h = match config.fixed_step {
        Some(h) => h,
        None => {
            let guess = config
                .initial_step
                .unwrap_or_else(|| initial_step(system, s0, &y0, &k[0], config, &mut out.stats));
            let hinted = system.step_hint().map_or(guess, |hint| guess.min(hint));
            hinted.min(max_step).min(s_end - s0)
        }
    };

    let mut s = s0;
    let mut y = y0;
    let mut guards: Vec<f64> = events.iter().map(|e| e.eval(s, &y)).collect();
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if s >= s_end {
            out.termination = Termination::ArcLengthExhausted;
            return Ok(out);
        }
        if out.stats.accepted + out.stats.rejected >= config.max_steps {
            out.termination = Termination::StepFailure {
                reason: format!("step budget of {} exhausted at s = {s}", config.max_steps),
            };
            return Ok(out);
        }
        let min_step = (10.0 * f64::EPSILON * s.abs()).max(f64::MIN_POSITIVE);
        if h < min_step {
            out.termination = Termination::StepFailure {
                reason: format!("step size underflow at s = {s} (h = {h:e})"),
            };
            return Ok(out);
        }
        if config.fixed_step.is_none() {
            h = h.min(max_step);
        }
        // land exactly on the end of the span
        let last = s + h >= s_end || s_end - (s + h) < min_step;
        if last {
            h = s_end - s;
        }
        let s_new = if last { s_end } else { s + h };

        let y_new = stages(system, s, &y, h, &mut k);
        out.stats.rhs_evals += STAGES;
        let finite = all_finite(&y_new) && all_finite(&k[STAGES]);

        let err = if !finite {
            f64::INFINITY
        } else if config.fixed_step.is_some() {
            0.0
        } else {
            error_norm(&y, &y_new, &k, h, config)
        };

        let mut accept = err <= 1.0;
        let mut coeffs = [[0.0; N]; DENSE_ORDER];
        if accept {
            coeffs = dense_coefficients(system, s, &y, &y_new, h, &mut k);
            out.stats.rhs_evals += EXTENDED_STAGES - STAGES - 1;
            if !coeffs.iter().all(all_finite) {
                accept = false;
            }
        }

        if !accept {
            out.stats.rejected += 1;
            if config.fixed_step.is_some() {
                out.termination = Termination::StepFailure {
                    reason: format!("non-finite state at s = {s_new}"),
                };
                return Ok(out);
            }
            let factor = if err.is_finite() {
                (SAFETY * err.powf(-1.0 / 8.0)).max(MIN_FACTOR)
            } else {
                MIN_FACTOR
            };
            h *= factor;
            last_rejected = true;
            continue;
        }

        out.stats.accepted += 1;
        let mut segment = Segment { s0: s, h, end: s_new, y0: y, coeffs };

        let new_guards: Vec<f64> = events.iter().map(|e| e.eval(s_new, &y_new)).collect();
        let mut hits: Vec<(f64, usize, [f64; N])> = Vec::new();
        for (i, event) in events.iter().enumerate() {
            if s_new <= event.active_after {
                continue;
            }
            let (left_s, left_g) = if event.active_after > s {
                let at = event.active_after;
                (at, event.eval(at, &segment.eval(at)))
            } else {
                (s, guards[i])
            };
            let right_g = new_guards[i];
            if !event.direction.crosses(left_g, right_g) {
                continue;
            }
            let g = |t: f64| event.eval(t, &segment.eval(t));
            let root = events::brent(g, left_s, s_new, left_g, right_g, config.event_tol);
            let state = if root == s_new { y_new } else { segment.eval(root) };
            hits.push((root, i, state));
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (root, i, state) in hits {
            let event = &events[i];
            out.events.push(EventRecord { id: event.id, s: root, state });
            if event.terminal {
                segment.end = root;
                out.segments.push(segment);
                out.final_s = root;
                out.final_state = state;
                out.termination = Termination::Event(event.id);
                return Ok(out);
            }
        }

        out.segments.push(segment);
        out.final_s = s_new;
        out.final_state = y_new;
        s = s_new;
        y = y_new;
        guards = new_guards;
        k[0] = k[STAGES];

        if config.fixed_step.is_none() {
            let mut factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if last_rejected {
                factor = factor.min(1.0);
            }
            err_prev = err.max(1e-4);
            h *= factor;
        }
        last_rejected = false;
    }
}

/// Fills `k[1..=STAGES]` given `k[0] = f(s, y)` and returns the propagated
/// solution. `k[STAGES]` ends up holding `f(s + h, y_new)`.
fn stages<S: OdeSystem<N>, const N: usize>(
    system: &S,
    s: f64,
    y: &[f64; N],
    h: f64,
    k: &mut [[f64; N]; EXTENDED_STAGES],
) -> [f64; N] {
    for i in 1..STAGES {
        let yi = combine(y, h, &A[i][..i], k);
        system.rhs(s + C[i] * h, &yi, &mut k[i]);
    }
    let y_new = combine(y, h, &A[STAGES][..STAGES], k);
    system.rhs(s + h, &y_new, &mut k[STAGES]);
    y_new
}

fn combine<const N: usize>(y: &[f64; N], h: f64, weights: &[f64], k: &[[f64; N]; EXTENDED_STAGES]) -> [f64; N] {
    let mut out = *y;
    for (j, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            for d in 0..N {
                out[d] += h * w * k[j][d];
            }
        }
    }
    out
}

fn error_norm<const N: usize>(
    y: &[f64; N],
    y_new: &[f64; N],
    k: &[[f64; N]; EXTENDED_STAGES],
    h: f64,
    config: &IntegratorConfig,
) -> f64 {
    let mut norm5 = 0.0;
    let mut norm3 = 0.0;
    for d in 0..N {
        let scale = config.abs_tol + config.rel_tol * y[d].abs().max(y_new[d].abs());
        let mut e5 = 0.0;
        let mut e3 = 0.0;
        for j in 0..=STAGES {
            e5 += E5[j] * k[j][d];
            if j < STAGES {
                e3 += A[STAGES][j] * k[j][d];
            }
        }
        for &(j, c) in E3_CORRECTION.iter() {
            e3 -= c * k[j][d];
        }
        norm5 += (e5 / scale).powi(2);
        norm3 += (e3 / scale).powi(2);
    }
    if norm5 == 0.0 && norm3 == 0.0 {
        return 0.0;
    }
    let denom = norm5 + 0.01 * norm3;
    h.abs() * norm5 / (denom * N as f64).sqrt()
}

/// Evaluates the three extra stages and returns the interpolant coefficients.
fn dense_coefficients<S: OdeSystem<N>, const N: usize>(
    system: &S,
    s: f64,
    y: &[f64; N],
    y_new: &[f64; N],
    h: f64,
    k: &mut [[f64; N]; EXTENDED_STAGES],
) -> [[f64; N]; DENSE_ORDER] {
    for i in STAGES + 1..EXTENDED_STAGES {
        let yi = combine(y, h, &A[i][..i], k);
        system.rhs(s + C[i] * h, &yi, &mut k[i]);
    }
    let f_old = k[0];
    let f_new = k[STAGES];
    let mut f = [[0.0; N]; DENSE_ORDER];
    for d in 0..N {
        let dy = y_new[d] - y[d];
        f[0][d] = dy;
        f[1][d] = h * f_old[d] - dy;
        f[2][d] = 2.0 * dy - h * (f_new[d] + f_old[d]);
    }
    for (row, weights) in D.iter().enumerate() {
        for d in 0..N {
            let mut acc = 0.0;
            for (j, &w) in weights.iter().enumerate() {
                acc += w * k[j][d];
            }
            f[3 + row][d] = h * acc;
        }
    }
    f
}

/// Starting step from the scales of the solution and its first two derivatives.
fn initial_step<S: OdeSystem<N>, const N: usize>(
    system: &S,
    s0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    config: &IntegratorConfig,
    stats: &mut ShotStats,
) -> f64 {
    let scale = |d: usize| config.abs_tol + config.rel_tol * y0[d].abs();
    let rms = |v: &dyn Fn(usize) -> f64| ((0..N).map(|d| v(d).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = rms(&|d| y0[d] / scale(d));
    let d1 = rms(&|d| f0[d] / scale(d));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let mut y1 = *y0;
    for d in 0..N {
        y1[d] += h0 * f0[d];
    }
    let mut f1 = [0.0; N];
    system.rhs(s0 + h0, &y1, &mut f1);
    stats.rhs_evals += 1;
    let d2 = rms(&|d| (f1[d] - f0[d]) / scale(d)) / h0;
    if !d2.is_finite() {
        return h0;
    }
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 8.0)
    };
    (100.0 * h0).min(h1)
}
