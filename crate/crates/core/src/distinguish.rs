//! State discrimination: optimal two-state guessing values with dual
//! certificates, product guessing across registers, the non-uniformity of a
//! classical string against quantum side information, and the per-channel
//! uncertainty quantity that drives every bound in the crate.

use crate::channels::{KrausChannel, MeasurementFamily};
use crate::error::{Error, Result};
use crate::mat::CMat;
use crate::qstate::{bb84_state, coding_difference, Basis, DensityMatrix};
use crate::real::{r, Real};

/// Labeled mixture of states: a classical register X together with the
/// side-information state held for each value of X.
#[derive(Clone, Debug)]
pub struct CqEnsemble<T: Real> {
    entries: Vec<(u64, T, DensityMatrix<T>)>,
    label_bits: u32,
}

/// Hard cap keeping the exact block computation desk-sized.
const MAX_LABEL_BITS: u32 = 4;
const MAX_SIDE_DIM: usize = 1024;

impl<T: Real> CqEnsemble<T> {
    pub fn new(entries: Vec<(u64, T, DensityMatrix<T>)>, label_bits: u32) -> Result<Self> {
        if label_bits > MAX_LABEL_BITS {
            return Err(Error::Dimension(format!("label register of {label_bits} bits exceeds cap")));
        }
        let total: T = entries.iter().map(|(_, p, _)| *p).sum();
        if (total - T::one()).abs() > T::channel_tol() {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        if entries.iter().any(|(_, _, s)| s.dim() > MAX_SIDE_DIM) {
            return Err(Error::Dimension("side-information register too large".into()));
        }
        Ok(CqEnsemble { entries, label_bits })
    }

    /// Uniform binary ensemble over two states.
    pub fn uniform_pair(rho0: DensityMatrix<T>, rho1: DensityMatrix<T>) -> Self {
        let half = r::<T>(0.5);
        CqEnsemble {
            entries: vec![(0, half, rho0), (1, half, rho1)],
            label_bits: 1,
        }
    }

    pub fn entries(&self) -> &[(u64, T, DensityMatrix<T>)] {
        &self.entries
    }

    pub fn label_count(&self) -> usize {
        1usize << self.label_bits
    }
}

/// Optimal probability of telling rho0 from rho1 at equal priors:
/// 1/2 + ||rho0 - rho1||_tr / 4.
pub fn helstrom<T: Real>(rho0: &DensityMatrix<T>, rho1: &DensityMatrix<T>) -> T {
    let quarter = r::<T>(0.25);
    r::<T>(0.5) + quarter * rho0.matrix().sub(rho1.matrix()).trace_norm()
}

/// Optimal guessing with unequal priors q0, q1: 1/2 (1 + ||q0 rho0 - q1 rho1||_tr).
pub fn helstrom_weighted<T: Real>(
    q0: T,
    rho0: &CMat<T>,
    q1: T,
    rho1: &CMat<T>,
) -> T {
    let half = r::<T>(0.5);
    half * (T::one() + rho0.scale_re(q0).sub(&rho1.scale_re(q1)).trace_norm())
}

/// Two-outcome optimal measurement for priors q0, q1: the projector onto the
/// nonnegative part of q0 rho0 - q1 rho1 and its complement. Ties (null
/// space) go to outcome 0.
pub fn helstrom_povm<T: Real>(q0: T, rho0: &CMat<T>, q1: T, rho1: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let diff = rho0.scale_re(q0).sub(&rho1.scale_re(q1));
    let m0 = diff.nonneg_eigenprojector();
    let m1 = CMat::identity(diff.dim()).sub(&m0);
    (m0, m1)
}

/// Feasible dual solution certifying a discrimination value from above.
#[derive(Clone, Debug)]
pub struct DualCertificate<T: Real> {
    pub q: CMat<T>,
    pub value: T,
}

/// Analytic dual optimum for two equiprobable states:
/// Q = (rho0 + rho1)/2 + |rho0 - rho1|/2, with Tr(Q)/2 the guessing value.
/// The feasibility margins are re-checked numerically; a failure there means
/// a numerical bug, not an unlucky input.
pub fn dual_certificate<T: Real>(
    rho0: &DensityMatrix<T>,
    rho1: &DensityMatrix<T>,
) -> Result<DualCertificate<T>> {
    let half = r::<T>(0.5);
    let q = rho0
        .matrix()
        .add(rho1.matrix())
        .scale_re(half)
        .add(&rho0.matrix().sub(rho1.matrix()).abs_herm().scale_re(half));
    let value = q.trace().re * half;
    for rho in [rho0, rho1] {
        let margin = q.sub(rho.matrix()).min_eigenvalue();
        if margin < -T::composed_tol() {
            return Err(Error::Certificate(format!("Q - rho has eigenvalue {margin}")));
        }
    }
    let direct = helstrom(rho0, rho1);
    if (value - direct).abs() > T::composed_tol() {
        return Err(Error::Certificate(format!(
            "dual value {value} disagrees with direct value {direct}"
        )));
    }
    Ok(DualCertificate { q, value })
}

/// Optimal probability of guessing an n-bit string whose bits are encoded in
/// independent registers: the product of the per-register values.
pub fn product_guess<T: Real>(pairs: &[(DensityMatrix<T>, DensityMatrix<T>)]) -> T {
    pairs
        .iter()
        .map(|(a, b)| helstrom(a, b))
        .fold(T::one(), |acc, p| acc * p)
}

/// Distance of X from uniform given the side information:
/// half the trace norm of I/|X| (x) rho_E  -  sum_x P(x) |x><x| (x) rho_E^x.
/// The matrix is block diagonal over the classical register, so the norm is
/// computed block by block.
pub fn nonuniformity<T: Real>(ens: &CqEnsemble<T>) -> T {
    let dim = ens.entries().first().map(|(_, _, s)| s.dim()).unwrap_or(1);
    let inv_count = T::one() / r::<T>(ens.label_count() as f64);
    let mut rho_e = CMat::zeros(dim);
    for (_, p, s) in ens.entries() {
        rho_e = rho_e.add(&s.matrix().scale_re(*p));
    }
    let mut total = T::zero();
    let mut listed = T::zero();
    for (_, p, s) in ens.entries() {
        let block = rho_e.scale_re(inv_count).sub(&s.matrix().scale_re(*p));
        total += block.trace_norm();
        listed += inv_count;
    }
    // Labels with probability zero contribute a block rho_E/|X|.
    let missing = T::one() - listed;
    if missing > T::exact_tol() {
        total += missing * rho_e.trace_norm();
    }
    total * r(0.5)
}

/// Privacy-amplification bound on the hashed-string distance:
/// 2^{(ell + k)/2 - 1} sqrt(pg), with k bits of extra classical leakage.
pub fn pa_bound<T: Real>(ell: u32, k: u32, pg: T) -> T {
    let exponent = r::<T>(f64::from(ell + k)) / r(2.0) - T::one();
    exponent.exp2() * pg.sqrt()
}

/// A storage attack on one qubit: measure first, then suffer storage noise.
#[derive(Clone, Debug)]
pub struct StorageAttack<T: Real> {
    pub meas: MeasurementFamily<T>,
    pub noise: KrausChannel<T>,
}

impl<T: Real> StorageAttack<T> {
    pub fn plain(noise: KrausChannel<T>) -> Self {
        StorageAttack {
            meas: MeasurementFamily::trivial(),
            noise,
        }
    }

    /// Full measurement: outcomes kept, post-measurement states discarded
    /// (modeled as completely depolarizing storage).
    pub fn full_measurement(meas: MeasurementFamily<T>) -> Self {
        StorageAttack {
            meas,
            noise: KrausChannel::depolarize(T::zero()).expect("rate 0 valid"),
        }
    }
}

/// Success probability of decoding the encoded bit after the basis is
/// revealed: averaged over outcomes k, the optimal-guess value on the pair
/// of unnormalized branch states (1/2) noise(F_k sigma_{x,b} F_k^dagger).
pub fn pg_given_basis<T: Real>(attack: &StorageAttack<T>, basis: Basis) -> T {
    let half = r::<T>(0.5);
    let s0 = bb84_state::<T>(0, basis).expect("coding basis");
    let s1 = bb84_state::<T>(1, basis).expect("coding basis");
    let mut total = T::zero();
    for f in attack.meas.operators() {
        let b0 = attack.noise.apply_raw(&f.sandwich(s0.matrix())).scale_re(half);
        let b1 = attack.noise.apply_raw(&f.sandwich(s1.matrix())).scale_re(half);
        total += b0.sub(&b1).trace_norm();
    }
    half + half * total
}

/// Uncertainty quantity of a storage attack:
/// sqrt(P_g over computational x P_g over Hadamard).
pub fn delta_of_channel<T: Real>(attack: &StorageAttack<T>) -> T {
    (pg_given_basis(attack, Basis::Computational) * pg_given_basis(attack, Basis::Hadamard)).sqrt()
}

/// Convenience: uncertainty quantity of a bare storage channel.
pub fn delta_of_plain_channel<T: Real>(noise: &KrausChannel<T>) -> T {
    delta_of_channel(&StorageAttack::plain(noise.clone()))
}

/// Per-coding-basis difference operator; exposed for the optimizer.
pub fn coding_difference_for<T: Real>(basis: Basis) -> CMat<T> {
    coding_difference(basis).expect("coding basis")
}

pub const BREIDBART_DELTA: f64 = 0.8535533905932737;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::KrausChannel;
    use crate::qstate::Basis;

    fn depol_pair(rate: f64) -> (DensityMatrix<f64>, DensityMatrix<f64>) {
        let n = KrausChannel::depolarize(rate).unwrap();
        (
            n.apply(&bb84_state(0, Basis::Computational).unwrap()),
            n.apply(&bb84_state(1, Basis::Computational).unwrap()),
        )
    }

    #[test]
    fn helstrom_endpoints() {
        let rho = DensityMatrix::<f64>::maximally_mixed();
        assert!((helstrom(&rho, &rho) - 0.5).abs() < 1e-12);
        let s0 = bb84_state::<f64>(0, Basis::Computational).unwrap();
        let s1 = bb84_state::<f64>(1, Basis::Computational).unwrap();
        assert!((helstrom(&s0, &s1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn helstrom_depolarized() {
        for rate in [0.0, 0.3, 0.7071067811865476, 0.9] {
            let (a, b) = depol_pair(rate);
            assert!((helstrom(&a, &b) - (1.0 + rate) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_certificate_matches() {
        let rho = DensityMatrix::<f64>::maximally_mixed();
        let cert = dual_certificate(&rho, &rho).unwrap();
        assert!((cert.value - 0.5).abs() < 1e-12);
        assert!(cert.q.max_abs_diff(rho.matrix()) < 1e-12);

        let s0 = bb84_state::<f64>(0, Basis::Hadamard).unwrap();
        let s1 = bb84_state::<f64>(1, Basis::Hadamard).unwrap();
        assert!((dual_certificate(&s0, &s1).unwrap().value - 1.0).abs() < 1e-12);

        let mut rng = crate::sample::test_rng(41);
        for _ in 0..50 {
            let a = crate::sample::random_density::<f64, _>(2, &mut rng);
            let b = crate::sample::random_density::<f64, _>(2, &mut rng);
            let cert = dual_certificate(&a, &b).unwrap();
            assert!((cert.value - helstrom(&a, &b)).abs() < 1e-9);
        }
    }

    #[test]
    fn product_guess_examples() {
        let s0 = bb84_state::<f64>(0, Basis::Computational).unwrap();
        let s1 = bb84_state::<f64>(1, Basis::Computational).unwrap();
        assert!((product_guess(&[(s0.clone(), s1.clone()), (s0, s1)]) - 1.0).abs() < 1e-12);

        let rate = 0.6;
        let (a, b) = depol_pair(rate);
        let got = product_guess(&[(a.clone(), b.clone()), (a, b)]);
        let want = ((1.0 + rate) / 2.0).powi(2);
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn nonuniformity_examples() {
        // Identical side states: no information, distance zero.
        let rho = DensityMatrix::<f64>::maximally_mixed();
        let ens = CqEnsemble::uniform_pair(rho.clone(), rho);
        assert!(nonuniformity(&ens) < 1e-12);

        // One bit in orthogonal pure states: full half-distance.
        let s0 = bb84_state::<f64>(0, Basis::Computational).unwrap();
        let s1 = bb84_state::<f64>(1, Basis::Computational).unwrap();
        let ens = CqEnsemble::uniform_pair(s0, s1);
        assert!((nonuniformity(&ens) - 0.5).abs() < 1e-12);

        // One bit through depolarizing storage: distance r/2, consistent with
        // the guessing value (1+r)/2 = 1/2 + d.
        for rate in [0.2, 0.5, 0.8] {
            let (a, b) = depol_pair(rate);
            let d = nonuniformity(&CqEnsemble::uniform_pair(a.clone(), b.clone()));
            assert!((d - rate / 2.0).abs() < 1e-12);
            assert!((helstrom(&a, &b) - (0.5 + d)).abs() < 1e-12);
        }
    }

    #[test]
    fn nonuniformity_ignores_independent_side_register() {
        let mut rng = crate::sample::test_rng(43);
        for _ in 0..20 {
            let a = crate::sample::random_density::<f64, _>(2, &mut rng);
            let b = crate::sample::random_density::<f64, _>(2, &mut rng);
            let extra = crate::sample::random_density::<f64, _>(2, &mut rng);
            let base = CqEnsemble::uniform_pair(a.clone(), b.clone());
            let padded = CqEnsemble::uniform_pair(a.tensor(&extra), b.tensor(&extra));
            assert!((nonuniformity(&base) - nonuniformity(&padded)).abs() < 1e-10);
        }
    }

    #[test]
    fn pa_bound_arithmetic() {
        assert!((pa_bound::<f64>(1, 0, 0.25) - 0.5 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((pa_bound::<f64>(2, 0, 0.5) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn delta_known_channels() {
        let id = StorageAttack::plain(KrausChannel::<f64>::identity());
        assert!((delta_of_channel(&id) - 1.0).abs() < 1e-12);

        let breidbart = StorageAttack::full_measurement(
            MeasurementFamily::<f64>::projective(Basis::Breidbart),
        );
        assert!((delta_of_channel(&breidbart) - BREIDBART_DELTA).abs() < 1e-12);

        let depol = StorageAttack::plain(KrausChannel::<f64>::depolarize(0.8).unwrap());
        assert!((delta_of_channel(&depol) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn noisy_channels_lose_reversibility() {
        // A strict Bloch contraction forces delta < 1; unitaries keep it at 1.
        let mut rng = crate::sample::test_rng(47);
        for _ in 0..50 {
            let rate = crate::sample::uniform(&mut rng, 0.0, 0.999);
            let d = delta_of_plain_channel(&KrausChannel::depolarize(rate).unwrap());
            assert!(d < 1.0 - 1e-6, "depolarize({rate}) gave delta {d}");

            let u = crate::sample::random_unitary::<f64, _>(2, &mut rng);
            let ch = KrausChannel::new(vec![u]).unwrap();
            assert!((delta_of_plain_channel(&ch) - 1.0).abs() < 1e-9);
        }
    }
}
