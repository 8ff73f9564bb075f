//! Closed-form entropies and an independent quadrature of computed ones.

use crate::error::{Error, Result};
use crate::integrator::ShotResult;
use crate::models::ShrinkerFamily;
use crate::shooting::SolveReport;
use crate::specfun::log_sphere_area;
use std::f64::consts::PI;

/// Literature values used as comparison points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConstants {
    /// Lower bound for the entropy threshold `E_n` below which closed
    /// shrinkers must be spheres.
    pub e_n_lower: f64,
    pub e_n_upper: f64,
    /// Limit of the discrete Euler–Lagrange torus entropies.
    pub bk_torus_entropy: f64,
}

pub const REFERENCE: ReferenceConstants = ReferenceConstants {
    e_n_lower: 2.02780,
    e_n_upper: 2.24759,
    bk_torus_entropy: 1.8512167,
};

/// Entropy of the round sphere `S^n(√n)`:
/// `(2π)^(-n/2) e^(-n/2) n^(n/2) σ_n`.
pub fn entropy_sphere_closed_form(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sphere dimension must be at least 1".into()));
    }
    let half = n as f64 / 2.0;
    let log = -half * (2.0 * PI).ln() - half + half * (n as f64).ln() + log_sphere_area(n as i64)?;
    Ok(log.exp())
}

/// Entropy of `S^m(√m) × R^(n-m)`. Flat factors contribute exactly 1.
pub fn entropy_cylinder_closed_form(m: u64, n: u64) -> Result<f64> {
    if m == 0 || m >= n {
        return Err(Error::Domain(format!("cylinder needs 1 ≤ m < n, got m = {m}, n = {n}")));
    }
    entropy_sphere_closed_form(m)
}

/// Eight-point Gauss–Legendre rule on `[-1, 1]`, as (node, weight) pairs for
/// the positive nodes.
const GAUSS_LEGENDRE_8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_804_94, 0.362_683_783_378_361_982_97),
    (0.525_532_409_916_328_985_82, 0.313_706_645_877_887_287_34),
    (0.796_666_477_413_626_739_59, 0.222_381_034_453_374_470_54),
    (0.960_289_856_497_536_231_68, 0.101_228_536_290_376_259_15),
];

fn gauss_legendre(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let sum: f64 = GAUSS_LEGENDRE_8
        .iter()
        .map(|&(x, w)| w * (f(mid - half * x) + f(mid + half * x)))
        .sum();
    half * sum
}

/// `∫ ρ ds` over a trajectory, where `ρ` is the family's entropy density,
/// with `panels` Gauss–Legendre panels per integrator step.
pub fn gaussian_area_quadrature(trajectory: &ShotResult<4>, family: &ShrinkerFamily, panels: usize) -> Result<f64> {
    let panels = panels.max(1);
    let mut total = 0.0;
    for seg in &trajectory.segments {
        let end = seg.end.min(trajectory.final_s);
        if end <= seg.s0 {
            continue;
        }
        let width = (end - seg.s0) / panels as f64;
        for p in 0..panels {
            let a = seg.s0 + width * p as f64;
            let b = if p + 1 == panels { end } else { a + width };
            let mut failure = None;
            let value = gauss_legendre(
                |s| {
                    let y = seg.eval(s);
                    match family.log_entropy_density(&y.into()) {
                        Ok(ld) => ld.exp(),
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                a,
                b,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            total += value;
        }
    }
    Ok(total)
}

/// Entropy of a solved profile recomputed by quadrature, for comparison with
/// `report.entropy`.
pub fn entropy_quadrature_check(report: &SolveReport, panels: usize) -> Result<f64> {
    Ok(report.copies * gaussian_area_quadrature(&report.trajectory, &report.family, panels)?)
}
