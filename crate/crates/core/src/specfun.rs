//! Log-domain special functions.
//!
//! Every density in the shrinker models is a ratio of quantities like
//! `r^(n-1)` and `Γ(n/2)` that overflow `f64` for the dimensions of interest
//! (`n/2` reaches `2.5e7`). Everything here therefore returns logarithms.
//!
//! `log_gamma` uses three regimes:
//!
//! * `a ≥ 10`: Stirling's series with eight Bernoulli terms. The truncation
//!   error at the switch point is below `2e-18`.
//! * `0.5 ≤ a < 2.5`: the Taylor series of `lnΓ(1 + t)` whose coefficients are
//!   `(-1)^k (ζ(k) - 1) / k`. This keeps full *relative* accuracy next to the
//!   two zeros of `lnΓ` at 1 and 2.
//! * otherwise: the recurrence `Γ(a + 1) = aΓ(a)` moves the argument into one
//!   of the two ranges above.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `ln √(2π)`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Arguments at or above this use the asymptotic series.
pub const STIRLING_SWITCH: f64 = 10.0;

/// `ζ(k) - 1` for `k = 2, 3, …, 33`.
const ZETA_MINUS_ONE: [f64; 32] = [
    0.644_934_066_848_226_436_47,
    0.202_056_903_159_594_285_4,
    0.082_323_233_711_138_191_516,
    0.036_927_755_143_369_926_331,
    0.017_343_061_984_449_139_715,
    0.008_349_277_381_922_826_839_8,
    0.004_077_356_197_944_339_378_7,
    0.002_008_392_826_082_214_417_9,
    0.000_994_575_127_818_085_337_15,
    0.000_494_188_604_119_464_558_7,
    0.000_246_086_553_308_048_298_64,
    0.000_122_713_347_578_489_146_75,
    6.124_813_505_870_482_925_9e-5,
    3.058_823_630_702_049_355_2e-5,
    1.528_225_940_865_187_173_3e-5,
    7.637_197_637_899_762_273_6e-6,
    3.817_293_264_999_839_856_5e-6,
    1.908_212_716_553_938_925_7e-6,
    9.539_620_338_727_961_131_5e-7,
    4.769_329_867_878_064_631_2e-7,
    2.384_505_027_277_329_9e-7,
    1.192_199_259_653_110_730_7e-7,
    5.960_818_905_125_947_961_2e-8,
    2.980_350_351_465_228_018_6e-8,
    1.490_155_482_836_504_123_5e-8,
    7.450_711_789_835_429_492e-9,
    3.725_334_024_788_457_054_8e-9,
    1.862_659_723_513_049_006_4e-9,
    9.313_274_324_196_681_828_7e-10,
    4.656_629_065_033_784_073e-10,
    2.328_311_833_676_505_492e-10,
    1.164_155_017_270_051_977_6e-10,
];

/// `B_{2k} / (2k (2k - 1))` for `k = 1..=8`.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn check_argument(a: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain(format!(
            "log_gamma requires a finite positive argument, got {a}"
        )));
    }
    Ok(())
}

/// Natural log of Γ(a) for finite `a > 0`.
pub fn log_gamma(a: f64) -> Result<f64> {
    check_argument(a)?;
    Ok(log_gamma_unchecked(a))
}

fn log_gamma_unchecked(a: f64) -> f64 {
    if a < 0.5 {
        // a + 1 lands in [1, 1.5)
        log_gamma_one_plus(a) - a.ln()
    } else if a < 1.5 {
        log_gamma_one_plus(a - 1.0)
    } else if a < 2.5 {
        log_gamma_two_plus(a - 2.0)
    } else if a < STIRLING_SWITCH {
        let mut z = a;
        let mut product = 1.0;
        while z >= 2.5 {
            z -= 1.0;
            product *= z;
        }
        log_gamma_two_plus(z - 2.0) + product.ln()
    } else {
        stirling_base(a) + stirling_series(a)
    }
}

/// `Σ_{k≥2} (-1)^k (ζ(k) - 1) t^k / k`, valid for `|t| ≤ 0.5`.
fn zeta_tail(t: f64) -> f64 {
    let mut sum = 0.0;
    for (i, &z) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum = sum * t + sign * z / k;
    }
    sum * t * t
}

/// `lnΓ(1 + t)` for `t ∈ [-0.5, 0.5]`.
fn log_gamma_one_plus(t: f64) -> f64 {
    -t.ln_1p() + t * (1.0 - EULER_GAMMA) + zeta_tail(t)
}

/// `lnΓ(2 + t) = ln(1 + t) + lnΓ(1 + t)`; the logarithms cancel exactly.
fn log_gamma_two_plus(t: f64) -> f64 {
    t * (1.0 - EULER_GAMMA) + zeta_tail(t)
}

fn stirling_base(z: f64) -> f64 {
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI
}

fn stirling_series(z: f64) -> f64 {
    let w = 1.0 / (z * z);
    let mut sum = 0.0;
    for &c in STIRLING_COEFFS.iter().rev() {
        sum = sum * w + c;
    }
    sum / z
}

/// Remainder of Stirling's formula:
/// `lnΓ(z) - [(z - ½) ln z - z + ln √(2π)]`.
///
/// Computed from the asymptotic series for `z ≥ 10`, so it stays accurate when
/// the two large terms it separates would cancel.
pub fn stirling_remainder(z: f64) -> Result<f64> {
    check_argument(z)?;
    if z >= STIRLING_SWITCH {
        Ok(stirling_series(z))
    } else {
        Ok(log_gamma_unchecked(z) - stirling_base(z))
    }
}

/// `ln σ_k`, the log of the area of the unit `k`-sphere in `R^(k+1)`:
/// `σ_k = 2 π^((k+1)/2) / Γ((k+1)/2)`.
pub fn log_sphere_area(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain(format!(
            "sphere dimension must be non-negative, got {k}"
        )));
    }
    let half = (k as f64 + 1.0) / 2.0;
    Ok(std::f64::consts::LN_2 + half * PI.ln() - log_gamma_unchecked(half))
}
