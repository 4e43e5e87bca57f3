//! Random states, unitaries and measurement families for property tests and
//! the verification suite. Everything takes an explicit generator so callers
//! own their streams.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::channels::MeasurementFamily;
use crate::mat::CMat;
use crate::qstate::DensityMatrix;
use crate::real::{r, Real};

pub fn test_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn gaussian_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    // Box-Muller; good enough for sampling test instances.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let m = (-2.0 * u1.ln()).sqrt();
    (m * (std::f64::consts::TAU * u2).cos(), m * (std::f64::consts::TAU * u2).sin())
}

pub fn random_complex<T: Real, R: Rng>(rng: &mut R) -> Complex<T> {
    let (a, b) = gaussian_pair(rng);
    Complex::new(r(a), r(b))
}

/// Ginibre matrix with i.i.d. complex Gaussian entries.
pub fn random_ginibre<T: Real, R: Rng>(dim: usize, rng: &mut R) -> CMat<T> {
    let mut m = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = random_complex(rng);
        }
    }
    m
}

pub fn random_hermitian<T: Real, R: Rng>(dim: usize, rng: &mut R) -> CMat<T> {
    let g = random_ginibre(dim, rng);
    g.add(&g.adjoint()).scale_re(r(0.5))
}

/// Haar-ish unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng>(dim: usize, rng: &mut R) -> CMat<T> {
    let g = random_ginibre::<T, R>(dim, rng);
    let mut cols: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex<T> = (0..dim)
                .map(|i| cols[k][i].conj() * cols[j][i])
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
            for i in 0..dim {
                let s = cols[k][i] * proj;
                cols[j][i] = cols[j][i] - s;
            }
        }
        let norm: T = cols[j]
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        for i in 0..dim {
            cols[j][i] = cols[j][i] / Complex::new(norm, T::zero());
        }
    }
    let mut u = CMat::zeros(dim);
    for j in 0..dim {
        for i in 0..dim {
            u[(i, j)] = cols[j][i];
        }
    }
    u
}

/// Full-rank random density matrix, G G^dagger normalized.
pub fn random_density<T: Real, R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix<T> {
    let g = random_ginibre::<T, R>(dim, rng);
    let m = g.mul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(T::one() / tr)).expect("normalized Gram matrix is a state")
}

pub fn random_pure_density<T: Real, R: Rng>(rng: &mut R) -> DensityMatrix<T> {
    let a = random_complex::<T, R>(rng);
    let b = random_complex::<T, R>(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / Complex::new(n, T::zero()), b / Complex::new(n, T::zero()));
    let mut m = CMat::zeros(2);
    m[(0, 0)] = a * a.conj();
    m[(0, 1)] = a * b.conj();
    m[(1, 0)] = b * a.conj();
    m[(1, 1)] = b * b.conj();
    DensityMatrix::new(m).expect("unit vector projector is a state")
}

/// Random complete measurement family on a qubit: 2-4 rank-1 directions,
/// completed by Pauli symmetrization so extremal (projective-like) families
/// are well represented.
pub fn random_measurement_family<T: Real, R: Rng>(rng: &mut R) -> MeasurementFamily<T> {
    let k = rng.gen_range(1..=2usize);
    let mut ops: Vec<CMat<T>> = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..k {
        weights.push(rng.gen_range(0.1..1.0f64));
    }
    let total: f64 = weights.iter().sum();
    for w in &weights {
        // Rank-1 operator sqrt(w/2) |phi><phi|; symmetrization over the Pauli
        // group restores completeness regardless of direction.
        let phi = random_pure_density::<T, R>(rng);
        let op = phi.matrix().scale_re(r((w / total / 2.0).sqrt()));
        for g in crate::attack_opt::pauli_group::<T>() {
            ops.push(g.mul(&op).mul(&g.adjoint()));
        }
    }
    MeasurementFamily::new(ops).expect("symmetrized family is complete")
}
