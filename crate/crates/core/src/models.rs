//! Profile-curve ODEs of rotationally symmetric self-shrinkers.
//!
//! A profile is parametrized by arc length in the half-plane `{r > 0}` with
//! tangent angle `θ`, so `x' = cos θ` and `r' = sin θ`. The shrinker equation
//! `H + ⟨X, N⟩ = 0` then fixes `θ'`. A fourth component accumulates the
//! Gaussian-weighted area, normalized so that its value over a closed
//! profile is the entropy of the hypersurface it generates.

use crate::error::{Error, Result};
use crate::integrator::{OdeSystem, ShotResult};
use crate::specfun::{log_gamma, stirling_remainder};
use std::f64::consts::{LN_2, PI};

/// Dimension parameter at and above which densities use the centered form.
pub const CENTERED_SWITCH: u64 = 1000;

/// `(x, r, θ, Λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileState {
    pub x: f64,
    pub r: f64,
    pub theta: f64,
    pub entropy_acc: f64,
}

impl ProfileState {
    pub fn new(x: f64, r: f64, theta: f64, entropy_acc: f64) -> Self {
        Self { x, r, theta, entropy_acc }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.r, self.theta, self.entropy_acc]
    }
}

impl From<[f64; 4]> for ProfileState {
    fn from(y: [f64; 4]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }
}

impl From<ProfileState> for [f64; 4] {
    fn from(p: ProfileState) -> Self {
        p.to_array()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `S^1 × S^(n-1)` tori in `R^(n+1)`.
    Rotational(u64),
    /// `SO(m) × SO(m)`-invariant shrinkers in `R^(2m)`.
    DoublyRotational(u64),
    /// Rotational equation, shot at a non-perpendicular angle.
    ChengWei(u64),
}

impl FamilyKind {
    /// `n` for the rotational families, `m` for the doubly rotational one.
    pub fn parameter(self) -> u64 {
        match self {
            FamilyKind::Rotational(n) | FamilyKind::ChengWei(n) => n,
            FamilyKind::DoublyRotational(m) => m,
        }
    }

    /// Dimension of the hypersurface.
    pub fn dimension(self) -> u64 {
        match self {
            FamilyKind::Rotational(n) | FamilyKind::ChengWei(n) => n,
            FamilyKind::DoublyRotational(m) => 2 * m - 1,
        }
    }
}

/// Constants for densities evaluated around the cylinder radius `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Centered {
    q: f64,
    c: f64,
}

/// One shrinker family with its prefactor computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkerFamily {
    kind: FamilyKind,
    log_prefactor: f64,
    k: f64,
    q: f64,
    centered: Centered,
    use_centered: bool,
}

impl ShrinkerFamily {
    pub fn new(kind: FamilyKind) -> Result<Self> {
        let p = kind.parameter();
        if p < 2 {
            return Err(Error::Domain(format!("family parameter must be at least 2, got {p}")));
        }
        let pf = p as f64;
        let k = pf - 1.0;
        let q = k.sqrt();
        let (log_prefactor, c) = match kind {
            FamilyKind::Rotational(_) | FamilyKind::ChengWei(_) => {
                let lp = (1.0 - pf / 2.0) * LN_2 - log_gamma(pf / 2.0)?;
                let c = 0.5 - 0.5 * PI.ln() + 0.5 * k * (-1.0 / pf).ln_1p() - stirling_remainder(pf / 2.0)?;
                (lp, c)
            }
            FamilyKind::DoublyRotational(_) => {
                let lp = 4f64.ln() + pf * PI.ln() - (2.0 * pf - 1.0) / 2.0 * (2.0 * PI).ln()
                    - 2.0 * log_gamma(pf / 2.0)?;
                let c = -0.5 * PI.ln() + 0.5 * LN_2 + 1.0 + k * (-1.0 / pf).ln_1p()
                    - 2.0 * stirling_remainder(pf / 2.0)?;
                (lp, c)
            }
        };
        Ok(Self {
            kind,
            log_prefactor,
            k,
            q,
            centered: Centered { q, c },
            use_centered: p >= CENTERED_SWITCH,
        })
    }

    pub fn rotational(n: u64) -> Result<Self> {
        Self::new(FamilyKind::Rotational(n))
    }

    pub fn doubly_rotational(m: u64) -> Result<Self> {
        Self::new(FamilyKind::DoublyRotational(m))
    }

    pub fn cheng_wei(n: u64) -> Result<Self> {
        Self::new(FamilyKind::ChengWei(n))
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn log_prefactor(&self) -> f64 {
        self.log_prefactor
    }

    /// `√(p - 1)`: the cylinder radius, and the axial offset of the doubly
    /// rotational fixed point.
    pub fn cylinder_radius(&self) -> f64 {
        self.q
    }

    fn is_doubly(&self) -> bool {
        matches!(self.kind, FamilyKind::DoublyRotational(_))
    }

    fn check(&self, x: f64, r: f64) -> Result<()> {
        if !(r > 0.0) {
            return Err(Error::Singularity(format!("r = {r} is not positive")));
        }
        if self.is_doubly() && !(x > 0.0) {
            return Err(Error::Singularity(format!("x = {x} is not positive")));
        }
        Ok(())
    }

    /// `θ'` at a point of the half-plane, without domain checks.
    pub fn theta_prime_unchecked(&self, x: f64, r: f64, theta: f64) -> f64 {
        let (sin, cos) = theta.sin_cos();
        // (k/r - r) written to keep accuracy near r = √k
        let radial = (self.q - r) * (self.q + r) / r;
        if self.is_doubly() {
            let axial = (x - self.q) * (x + self.q) / x;
            axial * sin + radial * cos
        } else {
            x * sin + radial * cos
        }
    }

    /// Natural log of the entropy density at `(x, r)`.
    pub fn log_entropy_density(&self, state: &ProfileState) -> Result<f64> {
        self.check(state.x, state.r)?;
        Ok(self.log_density_unchecked(state.x, state.r))
    }

    fn log_density_unchecked(&self, x: f64, r: f64) -> f64 {
        if self.use_centered {
            self.centered_unchecked(x, r)
        } else {
            self.direct_unchecked(x, r)
        }
    }

    /// The density as written, `ln prefactor + (k) ln r - (x² + r²)/2` (with
    /// `ln x` added for the doubly rotational family).
    pub fn log_entropy_density_direct(&self, state: &ProfileState) -> Result<f64> {
        self.check(state.x, state.r)?;
        Ok(self.direct_unchecked(state.x, state.r))
    }

    /// The same density expanded around `r = √k`, free of `O(k)` cancellation.
    pub fn log_entropy_density_centered(&self, state: &ProfileState) -> Result<f64> {
        self.check(state.x, state.r)?;
        Ok(self.centered_unchecked(state.x, state.r))
    }

    fn direct_unchecked(&self, x: f64, r: f64) -> f64 {
        let gauss = -(x * x + r * r) / 2.0;
        if self.is_doubly() {
            self.log_prefactor + self.k * (x.ln() + r.ln()) + gauss
        } else {
            self.log_prefactor + self.k * r.ln() + gauss
        }
    }

    fn centered_unchecked(&self, x: f64, r: f64) -> f64 {
        let Centered { q, c } = self.centered;
        // k ln(w/q) - (w² - q²)/2 with w = q + u
        let shifted = |w: f64| {
            let u = w - q;
            self.k * (u / q).ln_1p() - u * (2.0 * q + u) / 2.0
        };
        if self.is_doubly() {
            c + shifted(x) + shifted(r)
        } else {
            c + shifted(r) - x * x / 2.0
        }
    }

    /// Derivative of `(x, r, θ, Λ)`.
    pub fn rhs(&self, _s: f64, state: &ProfileState) -> Result<[f64; 4]> {
        self.check(state.x, state.r)?;
        let (sin, cos) = state.theta.sin_cos();
        Ok([
            cos,
            sin,
            self.theta_prime_unchecked(state.x, state.r, state.theta),
            self.log_density_unchecked(state.x, state.r).exp(),
        ])
    }

    /// Signed curvature of the profile, which is `θ'` in this parametrization.
    pub fn signed_curvature(&self, state: &ProfileState) -> Result<f64> {
        self.check(state.x, state.r)?;
        Ok(self.theta_prime_unchecked(state.x, state.r, state.theta))
    }
}

/// Singular states produce NaN so that the integrator shrinks the step or
/// stops with a step failure.
impl OdeSystem<4> for ShrinkerFamily {
    fn rhs(&self, _s: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let (x, r, theta) = (y[0], y[1], y[2]);
        if !(r > 0.0) || (self.is_doubly() && !(x > 0.0)) {
            *dy = [f64::NAN; 4];
            return;
        }
        let (sin, cos) = theta.sin_cos();
        dy[0] = cos;
        dy[1] = sin;
        dy[2] = self.theta_prime_unchecked(x, r, theta);
        dy[3] = self.log_density_unchecked(x, r).exp();
    }

    fn step_hint(&self) -> Option<f64> {
        Some(1.0 / (10.0 * (self.kind.parameter() as f64).sqrt()))
    }
}

pub fn rhs(family: &ShrinkerFamily, s: f64, state: &ProfileState) -> Result<[f64; 4]> {
    family.rhs(s, state)
}

pub fn log_entropy_density(family: &ShrinkerFamily, state: &ProfileState) -> Result<f64> {
    family.log_entropy_density(state)
}

pub fn signed_curvature(state: &ProfileState, family: &ShrinkerFamily) -> Result<f64> {
    family.signed_curvature(state)
}

/// Maximum over `samples` uniformly spaced points of
/// `|(-x'' r' + x' r'') - θ'(x, r, atan2(r', x'))|`.
///
/// All derivatives are fourth-order central differences of the interpolated
/// positions, so the result measures how well the stored curve satisfies the
/// shrinker equation independently of the integrated angle. Each stencil
/// stays inside one step of the integrator, where the interpolant is smooth.
pub fn shrinker_residual(trajectory: &ShotResult<4>, family: &ShrinkerFamily, samples: usize) -> Result<f64> {
    if trajectory.segments.is_empty() || samples == 0 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for (s, _) in trajectory.resample(samples) {
        let idx = trajectory
            .segments
            .partition_point(|seg| seg.s0 <= s)
            .saturating_sub(1);
        let seg = &trajectory.segments[idx];
        let len = seg.end - seg.s0;
        if len <= 0.0 {
            continue;
        }
        let h = (1e-3f64).min(len / 5.0);
        // move the stencil centre inward so s ± 2h stays in the segment
        let centre = s.clamp(seg.s0 + 2.0 * h, seg.end - 2.0 * h);
        let p = |t: f64| {
            let y = seg.eval(t);
            (y[0], y[1])
        };
        let (xm2, rm2) = p(centre - 2.0 * h);
        let (xm1, rm1) = p(centre - h);
        let (x0, r0) = p(centre);
        let (xp1, rp1) = p(centre + h);
        let (xp2, rp2) = p(centre + 2.0 * h);
        let d1 = |m2: f64, m1: f64, p1: f64, p2: f64| (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = |m2: f64, m1: f64, c: f64, p1: f64, p2: f64| {
            (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h)
        };
        let dx = d1(xm2, xm1, xp1, xp2);
        let dr = d1(rm2, rm1, rp1, rp2);
        let ddx = d2(xm2, xm1, x0, xp1, xp2);
        let ddr = d2(rm2, rm1, r0, rp1, rp2);
        family.check(x0, r0)?;
        let kappa = -ddx * dr + dx * ddr;
        let model = family.theta_prime_unchecked(x0, r0, dr.atan2(dx));
        worst = worst.max((kappa - model).abs());
    }
    Ok(worst)
}
