//! Bisection shooting for closed shrinker profiles.
//!
//! Every driver integrates the profile ODE from a point on a symmetry line
//! and adjusts the starting data until the curve closes. Closure is detected
//! by events on the integrator's dense output:
//!
//! * Angenent tori start on the axis-normal line `x = 0` with `θ = 0`; a
//!   closed profile returns to the start through `x = 0` going right.
//! * McGrath profiles start on the diagonal `x = r` heading at `7π/4`; a
//!   closed profile returns through the diagonal from the `r > x` side.
//! * Cheng–Wei profiles start on `x = 0` at an angle `a0 ∈ [-π/3, 0]`; the
//!   radius is tuned so the first return to `x = 0` lands on the start point,
//!   and the angle is tuned so the second return matches `a0` modulo `π`.

use crate::error::{Error, Result};
use crate::integrator::{integrate, integrate_from, EventSpec, IntegratorConfig, ShotResult, Termination};
use crate::models::{FamilyKind, ShrinkerFamily};
use log::{debug, info, warn};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Lower end of the radius bracket for the tori and McGrath shrinkers.
pub const R0_MIN: f64 = 1e-5;
/// Arc length after which closure and dip events become active.
pub const EVENT_GATE: f64 = 0.1;
/// Differences below this count as a match in the Cheng–Wei comparisons.
pub const DEADBAND: f64 = 1e-10;
/// Inner radius tolerance for the Cheng–Wei driver.
pub const CHENG_WEI_INNER_TOL: f64 = 1e-10;
/// Outer angle tolerance for the Cheng–Wei driver.
pub const CHENG_WEI_OUTER_TOL: f64 = 1e-12;
/// Offset from the axis for the sphere shot.
pub const SPHERE_EPSILON: f64 = 1e-8;

/// Longest step in the default configurations. The interpolant of a longer
/// step is still accurate in position but too coarse in its second
/// derivative for curvature diagnostics.
pub const DEFAULT_MAX_STEP: f64 = 0.05;

/// Default step control for a family: an arc-length budget of 6, or 10 for
/// Cheng–Wei profiles, which are almost twice as long.
pub fn default_config(kind: FamilyKind) -> IntegratorConfig {
    let l_max = match kind {
        FamilyKind::ChengWei(_) => 10.0,
        _ => 6.0,
    };
    IntegratorConfig {
        max_step: Some(DEFAULT_MAX_STEP),
        ..IntegratorConfig::default().with_max_arc_length(l_max)
    }
}

/// Reduce an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let t = a.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Remainder after floored division by `-π`, which takes the divisor's sign:
/// the result lies in `(-π, 0]`.
pub fn mod_neg_pi(a: f64) -> f64 {
    let b = -PI;
    a - (a / b).floor() * b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl BisectionBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidConfig(format!("bracket [{lo}, {hi}] is empty")));
        }
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidConfig(format!("bracket tolerance must be positive, got {tol}")));
        }
        Ok(Self { lo, hi, tol })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Number of halvings that bring the width to `tol` or below.
    pub fn iterations(&self) -> u32 {
        let ratio = self.width() / self.tol;
        if ratio <= 1.0 {
            0
        } else {
            ratio.log2().ceil() as u32
        }
    }
}

/// Converged shooting parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootParams {
    pub r0: f64,
    /// Starting angle, Cheng–Wei only.
    pub a0: Option<f64>,
}

/// Distance between the end of a profile and its closure target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureResidual {
    pub dx: f64,
    pub dr: f64,
    /// Angle difference reduced into `[0, π]`.
    pub dtheta: f64,
}

impl ClosureResidual {
    fn between(end: &[f64; 4], x: f64, r: f64, theta: f64) -> Self {
        Self {
            dx: (end[0] - x).abs(),
            dr: (end[1] - r).abs(),
            dtheta: wrap_angle(end[2] - theta).abs(),
        }
    }

    pub fn max(&self) -> f64 {
        self.dx.max(self.dr).max(self.dtheta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iterations {
    /// Halvings of the radius bracket, or of the angle bracket for Cheng–Wei.
    pub outer: u32,
    /// Radius halvings inside each angle step (Cheng–Wei only).
    pub inner: Vec<u32>,
}

impl Iterations {
    pub fn total_shots(&self) -> u32 {
        self.outer + self.inner.iter().sum::<u32>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub family: ShrinkerFamily,
    pub params: ShootParams,
    /// Length of the closed profile.
    pub perimeter: f64,
    pub entropy: f64,
    pub iterations: Iterations,
    pub closure: ClosureResidual,
    /// The integrated profile. For the sphere this is the half from the axis
    /// to the top of the circle.
    pub trajectory: ShotResult<4>,
    /// How many copies of `trajectory` make up the whole profile.
    pub copies: f64,
}

impl SolveReport {
    pub fn closure_residual(&self) -> f64 {
        self.closure.max()
    }

    /// Smallest radius among the stored nodes and recorded events.
    pub fn min_radius(&self) -> f64 {
        self.trajectory
            .nodes()
            .map(|(_, y)| y[1])
            .chain(self.trajectory.events.iter().map(|e| e.state[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn summary(label: &str, value: f64, shot: &ShotResult<4>) -> String {
    format!(
        "{label} = {value}: {:?} at s = {:.6}, state = {:?}",
        shot.termination, shot.final_s, shot.final_state
    )
}

/// Runs a plain bisection. `dips(mid)` returning true moves `hi` down to
/// `mid`, false moves `lo` up.
struct Bisection {
    lo: f64,
    hi: f64,
    last: f64,
    iterations: u32,
    moved_lo: bool,
    moved_hi: bool,
    first: Option<String>,
    latest: Option<String>,
}

impl Bisection {
    fn run(bracket: BisectionBracket, mut dips: impl FnMut(f64) -> Result<(bool, String)>) -> Result<Self> {
        let mut state = Self {
            lo: bracket.lo,
            hi: bracket.hi,
            last: 0.5 * (bracket.lo + bracket.hi),
            iterations: 0,
            moved_lo: false,
            moved_hi: false,
            first: None,
            latest: None,
        };
        for _ in 0..bracket.iterations() {
            let mid = 0.5 * (state.lo + state.hi);
            let (dip, text) = dips(mid)?;
            debug!("bisection {}: {text}, dip = {dip}", state.iterations);
            if dip {
                state.hi = mid;
                state.moved_hi = true;
            } else {
                state.lo = mid;
                state.moved_lo = true;
            }
            state.last = mid;
            state.iterations += 1;
            state.first.get_or_insert_with(|| text.clone());
            state.latest = Some(text);
        }
        if bracket.iterations() > 0 && !(state.moved_lo && state.moved_hi) {
            return Err(Error::NoTorus {
                lo: bracket.lo,
                hi: bracket.hi,
                lo_shot: state.first.unwrap_or_default(),
                hi_shot: state.latest.unwrap_or_default(),
            });
        }
        Ok(state)
    }
}

fn require_event(shot: &ShotResult<4>, id: &'static str, context: &str) -> Result<()> {
    match &shot.termination {
        Termination::Event(got) if *got == id => Ok(()),
        Termination::StepFailure { reason } => Err(Error::Integration { s: shot.final_s, reason: reason.clone() }),
        other => Err(Error::NoSolution(format!(
            "{context}: expected the {id} event, run ended with {other:?} at s = {}",
            shot.final_s
        ))),
    }
}

/// Angenent torus in `R^(n+1)`.
///
/// Bisects the starting radius over `[1e-5, √(n-1)]`. A shot from
/// `(0, r0, 0)` that dips below `r0` before returning to `x = 0` starts too
/// high. The report comes from one more shot at the final radius.
pub fn solve_angenent(n: u64, config: &IntegratorConfig, bracket_tol: f64) -> Result<SolveReport> {
    let family = ShrinkerFamily::rotational(n)?;
    let bracket = BisectionBracket::new(R0_MIN, family.cylinder_radius(), bracket_tol)?;

    let bisection = Bisection::run(bracket, |r0| {
        let events = [
            EventSpec::new("dip", move |_s, y: &[f64; 4]| y[1] - r0)
                .falling()
                .terminal()
                .active_after(EVENT_GATE),
            // local minima of r
            EventSpec::new("r_min", |_s, y: &[f64; 4]| y[2].sin()).rising().active_after(EVENT_GATE),
            EventSpec::new("closure", |_s, y: &[f64; 4]| y[0])
                .rising()
                .terminal()
                .active_after(EVENT_GATE),
        ];
        let shot = integrate(&family, [0.0, r0, 0.0, 0.0], config, &events)?;
        let dip = shot.termination == Termination::Event("dip")
            || shot.final_state[1] < r0
            || shot.events.iter().any(|e| e.id == "r_min" && e.state[1] < r0);
        Ok((dip, summary("r0", r0, &shot)))
    })?;

    let r0 = bisection.last;
    let events = [
        EventSpec::new("closure", |_s, y: &[f64; 4]| y[0])
            .rising()
            .terminal()
            .active_after(EVENT_GATE),
        EventSpec::new("collapse", move |_s, y: &[f64; 4]| y[1] - 0.9 * r0)
            .falling()
            .terminal(),
        EventSpec::new("dip", move |_s, y: &[f64; 4]| y[1] - r0)
            .falling()
            .active_after(EVENT_GATE),
        EventSpec::new("axis", |_s, y: &[f64; 4]| y[0]),
    ];
    let shot = integrate(&family, [0.0, r0, 0.0, 0.0], config, &events)?;
    require_event(&shot, "closure", &format!("Angenent n = {n}, r0 = {r0}"))?;
    let closure = ClosureResidual::between(&shot.final_state, 0.0, r0, 0.0);
    info!("angenent n = {n}: r0 = {r0}, L = {}, λ = {}", shot.final_s, shot.final_state[3]);
    Ok(SolveReport {
        family,
        params: ShootParams { r0, a0: None },
        perimeter: shot.final_s,
        entropy: shot.final_state[3],
        iterations: Iterations { outer: bisection.iterations, inner: Vec::new() },
        closure,
        trajectory: shot,
        copies: 1.0,
    })
}

/// McGrath's doubly rotational shrinker in `R^(2m)`.
///
/// Same scheme as [`solve_angenent`] with the diagonal as the symmetry line:
/// a shot from `(r0, r0, 7π/4)` whose `x + r` drops below `2 r0` before it
/// comes back to the diagonal starts too far out.
pub fn solve_mcgrath(m: u64, config: &IntegratorConfig, bracket_tol: f64) -> Result<SolveReport> {
    let family = ShrinkerFamily::doubly_rotational(m)?;
    let bracket = BisectionBracket::new(R0_MIN, family.cylinder_radius(), bracket_tol)?;
    let theta0 = 7.0 * PI / 4.0;

    let bisection = Bisection::run(bracket, |r0| {
        let events = [
            EventSpec::new("dip", move |_s, y: &[f64; 4]| y[0] + y[1] - 2.0 * r0)
                .falling()
                .terminal()
                .active_after(EVENT_GATE),
            // local minima of x + r
            EventSpec::new("sum_min", |_s, y: &[f64; 4]| y[2].cos() + y[2].sin())
                .rising()
                .active_after(EVENT_GATE),
            EventSpec::new("closure", |_s, y: &[f64; 4]| y[0] - y[1])
                .rising()
                .terminal()
                .active_after(EVENT_GATE),
        ];
        let shot = integrate(&family, [r0, r0, theta0, 0.0], config, &events)?;
        let below = |y: &[f64; 4]| y[0] + y[1] < 2.0 * r0;
        let dip = shot.termination == Termination::Event("dip")
            || below(&shot.final_state)
            || shot.events.iter().any(|e| e.id == "sum_min" && below(&e.state));
        Ok((dip, summary("r0", r0, &shot)))
    })?;

    let r0 = bisection.last;
    let events = [
        EventSpec::new("closure", |_s, y: &[f64; 4]| y[0] - y[1])
            .rising()
            .terminal()
            .active_after(EVENT_GATE),
        EventSpec::new("collapse", move |_s, y: &[f64; 4]| y[0] + y[1] - 1.8 * r0)
            .falling()
            .terminal(),
        EventSpec::new("far_diagonal", |_s, y: &[f64; 4]| y[0] - y[1])
            .falling()
            .active_after(EVENT_GATE),
    ];
    let shot = integrate(&family, [r0, r0, theta0, 0.0], config, &events)?;
    require_event(&shot, "closure", &format!("McGrath m = {m}, r0 = {r0}"))?;
    let closure = ClosureResidual::between(&shot.final_state, r0, r0, theta0);
    info!("mcgrath m = {m}: r0 = {r0}, L = {}, λ = {}", shot.final_s, shot.final_state[3]);
    Ok(SolveReport {
        family,
        params: ShootParams { r0, a0: None },
        perimeter: shot.final_s,
        entropy: shot.final_state[3],
        iterations: Iterations { outer: bisection.iterations, inner: Vec::new() },
        closure,
        trajectory: shot,
        copies: 1.0,
    })
}

/// Outcome of the radius search at one starting angle.
struct FirstLeg {
    r0: f64,
    shot: ShotResult<4>,
    iterations: u32,
}

fn cheng_wei_first_leg(
    family: &ShrinkerFamily,
    a0: f64,
    config: &IntegratorConfig,
    inner_tol: f64,
) -> Result<FirstLeg> {
    let n = family.kind().parameter();
    let q = family.cylinder_radius();
    let mut lo = q + 1e-8;
    let mut hi = q + (n as f64).min(5.0);
    let mut iterations = 0;
    let mut last = None;
    while (hi - lo).abs() > inner_tol {
        let r0 = 0.5 * (lo + hi);
        iterations += 1;
        let events = [
            EventSpec::new("axis", |_s, y: &[f64; 4]| y[0]).falling().terminal(),
            // local maxima of r
            EventSpec::new("r_max", |_s, y: &[f64; 4]| y[2].sin()).falling(),
        ];
        let shot = integrate(family, [0.0, r0, a0, 0.0], config, &events)?;
        let peak = shot
            .nodes()
            .map(|(_, y)| y[1])
            .chain(shot.events.iter().map(|e| e.state[1]))
            .fold(f64::NEG_INFINITY, f64::max);
        let returned = shot.termination == Termination::Event("axis");
        let mut done = false;
        if peak - r0 < 0.2 || !returned {
            // hugs the cylinder, or never comes back to the axis plane
            hi = r0;
        } else {
            let landed = shot.final_state[1];
            if landed - r0 > DEADBAND {
                lo = r0;
            } else if r0 - landed > DEADBAND {
                hi = r0;
            } else {
                done = true;
            }
        }
        last = Some((r0, shot));
        if done {
            break;
        }
    }
    let (r0, shot) = last.ok_or_else(|| Error::InvalidConfig("inner tolerance exceeds the radius bracket".into()))?;
    Ok(FirstLeg { r0, shot, iterations })
}

/// The non-perpendicular shrinkers of Cheng and Wei, shot with the rotational
/// equation from `(0, r0, a0)`.
///
/// For each bisection step on `a0 ∈ [-π/3, 0]` an inner bisection finds the
/// `r0` whose first return to `x = 0` lands at radius `r0`. The run then
/// continues to the next crossing of `x = 0`, and the angle there reduced
/// modulo `-π` is compared with `a0`.
pub fn solve_cheng_wei(n: u64, config: &IntegratorConfig, outer_tol: f64, inner_tol: f64) -> Result<SolveReport> {
    let family = ShrinkerFamily::cheng_wei(n)?;
    BisectionBracket::new(-PI / 3.0, 0.0, outer_tol)?;
    if !(inner_tol > 0.0) {
        return Err(Error::InvalidConfig(format!("inner tolerance must be positive, got {inner_tol}")));
    }
    let mut lo = -PI / 3.0;
    let mut hi = 0.0;
    let mut inner = Vec::new();
    let mut outer = 0;
    let mut converged = None;
    while (lo - hi).abs() > outer_tol {
        let a0 = 0.5 * (lo + hi);
        outer += 1;
        let leg1 = cheng_wei_first_leg(&family, a0, config, inner_tol)?;
        inner.push(leg1.iterations);
        if leg1.shot.termination != Termination::Event("axis") {
            return Err(Error::NoSolution(format!(
                "Cheng–Wei n = {n}: {}",
                summary("no return to the axis plane for r0", leg1.r0, &leg1.shot)
            )));
        }
        let s1 = leg1.shot.final_s;
        let events = [EventSpec::new("axis", |_s, y: &[f64; 4]| y[0])
            .rising()
            .terminal()
            .active_after(s1 + EVENT_GATE)];
        let leg2 = integrate_from(&family, s1, leg1.shot.final_state, config, &events)?;
        if leg2.termination != Termination::Event("axis") {
            // Second legs that overrun the budget belong to angles below the
            // solution: their arrival angle sits above a0.
            warn!(
                "cheng-wei n = {n}: second leg at a0 = {a0}, r0 = {} ended with {:?} at s = {}",
                leg1.r0, leg2.termination, leg2.final_s
            );
            lo = a0;
            continue;
        }
        let arrival = mod_neg_pi(leg2.final_state[2]);
        debug!("cheng-wei n = {n}: a0 = {a0}, r0 = {}, arrival {arrival}", leg1.r0);
        let mut done = false;
        if a0 - arrival > DEADBAND {
            hi = a0;
        } else if arrival - a0 > DEADBAND {
            lo = a0;
        } else {
            done = true;
        }
        converged = Some((a0, leg1, leg2));
        if done {
            break;
        }
    }
    let (a0, leg1, leg2) = converged.ok_or_else(|| {
        Error::NoSolution(format!("Cheng–Wei n = {n}: no starting angle produced a closed second leg"))
    })?;
    let r0 = leg1.r0;
    let mut trajectory = leg1.shot;
    trajectory.append(leg2)?;
    let closure = ClosureResidual::between(&trajectory.final_state, 0.0, r0, a0);
    info!("cheng-wei n = {n}: a0 = {a0}, r0 = {r0}, L = {}", trajectory.final_s);
    Ok(SolveReport {
        family,
        params: ShootParams { r0, a0: Some(a0) },
        perimeter: trajectory.final_s,
        entropy: trajectory.final_state[3],
        iterations: Iterations { outer, inner },
        closure,
        trajectory,
        copies: 1.0,
    })
}

/// The round sphere `S^n(√n)`, integrated from just off the axis to the top
/// of the circle and doubled.
///
/// The start sits at `r = ε` on the circle with the angle of the regular
/// solution through the axis, `θ = π/2 + x0 ε / n`.
pub fn solve_sphere(n: u64, config: &IntegratorConfig) -> Result<SolveReport> {
    let family = ShrinkerFamily::rotational(n)?;
    let nf = n as f64;
    let eps = SPHERE_EPSILON;
    let x0 = -(nf - eps * eps).sqrt();
    let theta0 = FRAC_PI_2 + x0 * eps / nf;
    let events = [EventSpec::new("top", |_s, y: &[f64; 4]| y[0]).rising().terminal()];
    let shot = integrate(&family, [x0, eps, theta0, 0.0], config, &events)?;
    require_event(&shot, "top", &format!("sphere n = {n}"))?;
    let closure = ClosureResidual::between(&shot.final_state, 0.0, nf.sqrt(), 0.0);
    Ok(SolveReport {
        family,
        params: ShootParams { r0: eps, a0: None },
        perimeter: 2.0 * (shot.final_s + eps),
        entropy: 2.0 * shot.final_state[3],
        iterations: Iterations { outer: 0, inner: Vec::new() },
        closure,
        trajectory: shot,
        copies: 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_reductions() {
        assert_eq!(mod_neg_pi(0.0), 0.0);
        assert!((mod_neg_pi(-0.5) + 0.5).abs() < 1e-15);
        assert!((mod_neg_pi(0.5) - (0.5 - PI)).abs() < 1e-15);
        assert!((mod_neg_pi(-0.5 - 2.0 * PI) + 0.5).abs() < 1e-14);
        assert!((wrap_angle(TAU + 0.25) - 0.25).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
    }

    #[test]
    fn bracket_iteration_count() {
        let b = BisectionBracket::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(b.iterations(), 2);
        let b = BisectionBracket::new(1e-5, 1.0, 1e-10).unwrap();
        assert_eq!(b.iterations(), 34);
        assert!(BisectionBracket::new(1.0, 1.0, 0.1).is_err());
        assert!(BisectionBracket::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sphere_entropy_n2() {
        let report = solve_sphere(2, &IntegratorConfig::default()).unwrap();
        assert!((report.entropy - 4.0 / std::f64::consts::E).abs() < 1e-8, "{}", report.entropy);
        assert!(report.closure_residual() < 1e-6);
    }

    #[test]
    fn angenent_n2_table_value() {
        let report = solve_angenent(2, &IntegratorConfig::default(), 1e-10).unwrap();
        assert!((report.perimeter - 5.309_257_57).abs() < 1e-6, "{}", report.perimeter);
        assert!((report.entropy - 1.851_216_67).abs() < 1e-6, "{}", report.entropy);
        assert_eq!(report.iterations.outer, 34);
    }
}
