//! Closed-form security bounds: hashed-string distance bounds for the
//! perfect and practical protocols, the error-rate threshold below which
//! the practical bound decays, the storage-noise/error-rate trade-off
//! surface, and minimum string lengths for a target distance. All
//! logarithms are base 2, which makes (1/2)^(log2(4/3) n) = (3/4)^n exact.

use serde::Serialize;

use crate::attack_opt::Regime;
use crate::error::{Error, Result};

/// log2(4/3), the per-qubit exponent coefficient.
pub const LOG2_4_3: f64 = 0.41503749927884376;

/// The intermediate-basis uncertainty value 1/2 + 1/(2 sqrt 2).
pub const BREIDBART_DELTA: f64 = crate::distinguish::BREIDBART_DELTA;

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Distance bound for the perfect protocol:
/// 2^(ell/2 - 1) * delta_max^(log2(4/3)/2 * n).
pub fn delta_sec_perfect(ell: u32, n: u64, delta_max: f64) -> Result<f64> {
    if !(delta_max > 0.0 && delta_max <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "uncertainty value {delta_max} outside (0, 1]"
        )));
    }
    let exponent = f64::from(ell) / 2.0 - 1.0 + n as f64 * delta_max.log2() * LOG2_4_3 / 2.0;
    Ok(exponent.exp2())
}

/// How syndrome leakage enters the practical bound: the asymptotic
/// h(p_error) m / 4 term, or the actual syndrome length for the code in
/// use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Accounting {
    Asymptotic,
    Concrete { k_bits: u64 },
}

/// Distance bound for the practical protocol over m retained qubits.
pub fn delta_sec_practical(
    ell: u32,
    m: u64,
    p_error: f64,
    delta_max: f64,
    mode: Accounting,
) -> Result<f64> {
    if !(0.0..0.5).contains(&p_error) {
        return Err(Error::InvalidParam(format!(
            "error rate {p_error} outside [0, 1/2)"
        )));
    }
    let leak = match mode {
        Accounting::Asymptotic => binary_entropy(p_error) * m as f64 / 4.0,
        Accounting::Concrete { k_bits } => k_bits as f64 / 2.0,
    };
    Ok(delta_sec_perfect(ell, m, delta_max)? * leak.exp2())
}

/// Both sides of the product bound
/// (1/2^n) prod (1 + p_i) <= p_cap^(log2(4/3) n), for 1/2 <= p_i <= 1 and
/// prod p_i <= p_cap^n.
pub fn lemma5_check(p_list: &[f64], p_cap: f64) -> Result<(bool, f64, f64)> {
    if p_list.iter().any(|&p| !(0.5..=1.0).contains(&p)) {
        return Err(Error::InvalidParam("probabilities must lie in [1/2, 1]".into()));
    }
    let n = p_list.len() as f64;
    let product: f64 = p_list.iter().product();
    if product > p_cap.powf(n) * (1.0 + 1e-12) {
        return Err(Error::InvalidParam(format!(
            "product {product} exceeds cap {}",
            p_cap.powf(n)
        )));
    }
    let lhs = p_list.iter().map(|&p| 1.0 + p).product::<f64>() / n.exp2();
    let rhs = p_cap.powf(LOG2_4_3 * n);
    Ok((lhs <= rhs * (1.0 + 1e-12), lhs, rhs))
}

/// Exponent-rate of the practical bound at storage rate r when the honest
/// error rate is a fraction 1/a of the storage-attack advantage:
/// h((1 - a r)/2)/4 + log2((1+r)/2) * log2(4/3)/2. Negative means the
/// bound decays with n.
pub fn tradeoff_value(r: f64, a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || r == 0.0 {
        return Err(Error::InvalidParam(format!("storage rate {r} outside (0, 1]")));
    }
    if a < 1.0 || a * r > 1.0 + 1e-12 {
        return Err(Error::InvalidParam(format!(
            "ratio {a} outside [1, 1/r] at r = {r}"
        )));
    }
    let p = ((1.0 - a * r) / 2.0).max(0.0);
    Ok(binary_entropy(p) / 4.0 + ((1.0 + r) / 2.0).log2() * LOG2_4_3 / 2.0)
}

/// Largest storage rate at which the trade-off exponent is still
/// nonnegative for a given ratio a: the boundary of the secure region.
/// At a = 1 the exponent stays positive on the whole interior and only
/// touches zero at r = 1.
pub fn tradeoff_boundary_root(a: f64) -> Result<f64> {
    if a < 1.0 {
        return Err(Error::InvalidParam(format!("ratio {a} below 1")));
    }
    let hi = (1.0 / a).min(1.0);
    if tradeoff_value(hi, a)? >= 0.0 {
        return Ok(hi);
    }
    let mut lo = 1e-9;
    let mut hi = hi;
    if tradeoff_value(lo, a)? < 0.0 {
        return Err(Error::InvalidParam(format!(
            "no sign change on (0, {hi}] for a = {a}"
        )));
    }
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if tradeoff_value(mid, a)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / 2.0)
}

/// Error rate below which the practical bound decays against the
/// intermediate-basis measurement: the root of
/// h(p) = 2 log2(1/(1/2 + 1/(2 sqrt 2))) log2(4/3).
pub fn breidbart_perror_threshold() -> f64 {
    let target = 2.0 * (1.0 / BREIDBART_DELTA).log2() * LOG2_4_3;
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    while hi - lo > 1e-12 {
        let mid = (lo + hi) / 2.0;
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Uncertainty value of the erase-or-keep storage model: perfect recall
/// with probability 1 - p, pure guessing with probability p.
pub fn erasure_delta(p_erase: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_erase) {
        return Err(Error::InvalidParam(format!(
            "erasure probability {p_erase} outside [0, 1]"
        )));
    }
    Ok(1.0 - p_erase / 2.0)
}

/// Which bound a report or search refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    Perfect,
    Practical { p_error: f64, accounting: Accounting },
}

/// Smallest n (or m) making the applicable bound <= epsilon; None when the
/// exponent coefficient is nonnegative and no finite length works.
pub fn min_n_for_security(
    epsilon: f64,
    ell: u32,
    delta_max: f64,
    mode: BoundMode,
) -> Result<Option<u64>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParam(format!("target {epsilon} not positive")));
    }
    if !(delta_max > 0.0 && delta_max <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "uncertainty value {delta_max} outside (0, 1]"
        )));
    }
    let mut base = f64::from(ell) / 2.0 - 1.0;
    let mut rate = delta_max.log2() * LOG2_4_3 / 2.0;
    match mode {
        BoundMode::Perfect => {}
        BoundMode::Practical { p_error, accounting } => match accounting {
            Accounting::Asymptotic => rate += binary_entropy(p_error) / 4.0,
            Accounting::Concrete { k_bits } => base += k_bits as f64 / 2.0,
        },
    }
    let target = epsilon.log2();
    if rate >= 0.0 {
        return Ok(if base <= target { Some(0) } else { None });
    }
    let n = ((target - base) / rate).ceil().max(0.0) as u64;
    // Guard the float arithmetic: step to the exact boundary.
    let bound = |n: u64| (base + rate * n as f64).exp2();
    let mut n = n;
    while n > 0 && bound(n - 1) <= epsilon {
        n -= 1;
    }
    while bound(n) > epsilon {
        n += 1;
    }
    Ok(Some(n))
}

/// Inputs and outcome of one bound evaluation, as printed by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct SecurityReport {
    pub delta_sec_bound: f64,
    pub regime: Regime,
    pub ell: u32,
    pub n: u64,
    pub r: f64,
    pub delta_max: f64,
    pub mode: BoundMode,
    /// True when the bound shrinks as n grows; false means no security.
    pub negative_exponent: bool,
}

pub fn security_report(ell: u32, n: u64, r: f64, mode: BoundMode) -> Result<SecurityReport> {
    let opt = crate::attack_opt::optimize_delta(r, 0.02, 1e-7)?;
    let delta_max = crate::attack_opt::theorem2_delta(r);
    let (bound, rate) = match mode {
        BoundMode::Perfect => (
            delta_sec_perfect(ell, n, delta_max)?,
            delta_max.log2() * LOG2_4_3 / 2.0,
        ),
        BoundMode::Practical { p_error, accounting } => (
            delta_sec_practical(ell, n, p_error, delta_max, accounting)?,
            delta_max.log2() * LOG2_4_3 / 2.0
                + match accounting {
                    Accounting::Asymptotic => binary_entropy(p_error) / 4.0,
                    Accounting::Concrete { k_bits } => {
                        // Concrete leakage is a constant, not a rate; the
                        // decay direction is set by the storage term alone,
                        // scaled at the evaluated n.
                        if n > 0 { k_bits as f64 / (2.0 * n as f64) } else { 0.0 }
                    }
                },
        ),
    };
    Ok(SecurityReport {
        delta_sec_bound: bound,
        regime: opt.regime,
        ell,
        n,
        r,
        delta_max,
        mode,
        negative_exponent: rate < 0.0,
    })
}
