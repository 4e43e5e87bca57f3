//! Single-qubit states, bases and Bloch coordinates, plus the tensor
//! products the exact small-scale oracles need.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{pauli_x, pauli_y, pauli_z, CMat, Cpx};
use crate::real::{r, Real};

/// Encoding/measurement basis. Computational is `+`, Hadamard is `x`; the
/// intermediate basis bisecting them is the optimal single-measurement
/// attack basis and is not a valid encoding basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "+")]
    Computational,
    #[serde(rename = "x")]
    Hadamard,
    #[serde(rename = "breidbart")]
    Breidbart,
}

/// Normalized two-component state vector.
#[derive(Clone, Debug)]
pub struct PureState<T: Real> {
    amp: [Cpx<T>; 2],
}

impl<T: Real> PureState<T> {
    pub fn new(a0: Cpx<T>, a1: Cpx<T>) -> Result<Self> {
        let norm_sq = a0.norm_sqr() + a1.norm_sqr();
        if (norm_sq - T::one()).abs() > T::exact_tol() {
            return Err(Error::InvalidState(format!(
                "state vector not normalized: |psi|^2 = {norm_sq}"
            )));
        }
        Ok(PureState { amp: [a0, a1] })
    }

    pub fn from_real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(
            Cpx::new(r(a0), T::zero()),
            Cpx::new(r(a1), T::zero()),
        )
    }

    pub fn amplitudes(&self) -> &[Cpx<T>; 2] {
        &self.amp
    }

    pub fn inner(&self, other: &Self) -> Cpx<T> {
        self.amp[0].conj() * other.amp[0] + self.amp[1].conj() * other.amp[1]
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        let mut m = CMat::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.amp[i] * self.amp[j].conj();
            }
        }
        DensityMatrix::new_unchecked(m)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on 2^k dimensions.
/// Single qubits are the common case; tensor products appear only inside
/// the exhaustive oracles.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real> {
    mat: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(mat: CMat<T>) -> Result<Self> {
        if !mat.is_hermitian(T::exact_tol()) {
            return Err(Error::InvalidState("matrix not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > r::<T>(1e-10) || tr.im.abs() > r::<T>(1e-10) {
            return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
        }
        if mat.min_eigenvalue() < -r::<T>(1e-10) {
            return Err(Error::InvalidState("matrix not positive semidefinite".into()));
        }
        Ok(DensityMatrix { mat })
    }

    pub(crate) fn new_unchecked(mat: CMat<T>) -> Self {
        DensityMatrix { mat }
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            mat: CMat::identity(2).scale_re(r(0.5)),
        }
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        DensityMatrix {
            mat: self.mat.kron(&other.mat),
        }
    }

    pub fn to_bloch(&self) -> Result<BlochVector<T>> {
        if self.dim() != 2 {
            return Err(Error::Dimension("Bloch coordinates need a single qubit".into()));
        }
        let comp = |p: CMat<T>| self.mat.mul(&p).trace().re;
        BlochVector::new(comp(pauli_x()), comp(pauli_y()), comp(pauli_z()))
    }
}

/// Real 3-vector inside the unit ball; unit length for pure states.
#[derive(Clone, Copy, Debug)]
pub struct BlochVector<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if n2 > T::one() + T::exact_tol() {
            return Err(Error::InvalidState(format!("Bloch vector outside unit ball: |v|^2 = {n2}")));
        }
        Ok(BlochVector { x, y, z })
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// rho = (I + x X + y Y + z Z) / 2.
    pub fn to_density(&self) -> DensityMatrix<T> {
        let half = r::<T>(0.5);
        let m = CMat::identity(2)
            .add(&pauli_x().scale_re(self.x))
            .add(&pauli_y().scale_re(self.y))
            .add(&pauli_z().scale_re(self.z))
            .scale_re(half);
        DensityMatrix::new_unchecked(m)
    }
}

pub fn from_bloch<T: Real>(v: &BlochVector<T>) -> DensityMatrix<T> {
    v.to_density()
}

pub fn to_bloch<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    rho.to_bloch()
}

/// The four conjugate-coding states sigma_{bit, basis} as rank-1 projectors.
pub fn bb84_state<T: Real>(bit: u8, basis: Basis) -> Result<DensityMatrix<T>> {
    if bit > 1 {
        return Err(Error::InvalidParam(format!("bit must be 0 or 1, got {bit}")));
    }
    let (v0, v1) = basis_vectors::<T>(basis)?;
    Ok(if bit == 0 { v0.projector() } else { v1.projector() })
}

/// Uniform mixture over the two encodings of a basis; I/2 for both bases.
pub fn basis_average<T: Real>() -> DensityMatrix<T> {
    DensityMatrix::maximally_mixed()
}

fn basis_vectors<T: Real>(basis: Basis) -> Result<(PureState<T>, PureState<T>)> {
    match basis {
        Basis::Computational => Ok((
            PureState::from_real(1.0, 0.0)?,
            PureState::from_real(0.0, 1.0)?,
        )),
        Basis::Hadamard => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Ok((PureState::from_real(s, s)?, PureState::from_real(s, -s)?))
        }
        Basis::Breidbart => Err(Error::InvalidParam(
            "the intermediate basis is not a conjugate-coding basis".into(),
        )),
    }
}

/// The basis bisecting computational and Hadamard:
/// |0> -> cos(pi/8)|0> + sin(pi/8)|1>, |1> -> sin(pi/8)|0> - cos(pi/8)|1>.
pub fn breidbart_vectors<T: Real>() -> (PureState<T>, PureState<T>) {
    let c = (std::f64::consts::PI / 8.0).cos();
    let s = (std::f64::consts::PI / 8.0).sin();
    (
        PureState::from_real(c, s).expect("unit vector"),
        PureState::from_real(s, -c).expect("unit vector"),
    )
}

/// Measurement vectors for any of the three bases.
pub fn measurement_vectors<T: Real>(basis: Basis) -> (PureState<T>, PureState<T>) {
    match basis {
        Basis::Breidbart => breidbart_vectors(),
        other => basis_vectors(other).expect("coding basis"),
    }
}

/// Trace norm of an arbitrary square complex matrix.
pub fn trace_norm<T: Real>(m: &CMat<T>) -> T {
    m.trace_norm()
}

/// Difference sigma_{0,b} - sigma_{1,b}: Z for computational, X for Hadamard.
pub fn coding_difference<T: Real>(basis: Basis) -> Result<CMat<T>> {
    match basis {
        Basis::Computational => Ok(pauli_z()),
        Basis::Hadamard => Ok(pauli_x()),
        Basis::Breidbart => Err(Error::InvalidParam("not a coding basis".into())),
    }
}

impl Basis {
    pub fn coding_bases() -> [Basis; 2] {
        [Basis::Computational, Basis::Hadamard]
    }
}
