//! Qubit CPTP maps and measurement super-operators: the attacker's storage
//! step is a partial measurement followed by a fixed noise channel.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mat::CMat;
use crate::qstate::DensityMatrix;
use crate::real::{r, Real};

/// Channel in Kraus form: rho -> sum_k K_k rho K_k^dagger.
#[derive(Clone, Debug)]
pub struct KrausChannel<T: Real> {
    ops: Vec<CMat<T>>,
}

impl<T: Real> KrausChannel<T> {
    pub fn new(ops: Vec<CMat<T>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParam("channel needs at least one operator".into()));
        }
        let dim = ops[0].dim();
        let mut sum = CMat::zeros(dim);
        for k in &ops {
            sum = sum.add(&k.adjoint().mul(k));
        }
        if sum.max_abs_diff(&CMat::identity(dim)) > T::channel_tol() {
            return Err(Error::InvalidState("Kraus operators do not sum to identity".into()));
        }
        let ch = KrausChannel { ops };
        if ch.choi().min_eigenvalue() < -T::channel_tol() {
            return Err(Error::InvalidState("Choi matrix not positive semidefinite".into()));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        KrausChannel {
            ops: vec![CMat::identity(2)],
        }
    }

    /// rho -> r rho + (1 - r) I/2, with r the survival probability.
    pub fn depolarize(rate: T) -> Result<Self> {
        if rate < T::zero() || rate > T::one() {
            return Err(Error::InvalidParam(format!("depolarizing rate {rate} outside [0, 1]")));
        }
        // Pauli twirl weights: (1+3r)/4 on I, (1-r)/4 on X, Y, Z.
        let wi = ((T::one() + r::<T>(3.0) * rate) / r(4.0)).sqrt();
        let wp = ((T::one() - rate) / r(4.0)).sqrt();
        KrausChannel::new(vec![
            CMat::identity(2).scale_re(wi),
            crate::mat::pauli_x().scale_re(wp),
            crate::mat::pauli_y().scale_re(wp),
            crate::mat::pauli_z().scale_re(wp),
        ])
    }

    pub fn operators(&self) -> &[CMat<T>] {
        &self.ops
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
        DensityMatrix::new(self.apply_raw(rho.matrix())).expect("CPTP map preserves state invariants")
    }

    /// Action on an arbitrary (not necessarily unit-trace) Hermitian matrix.
    pub fn apply_raw(&self, m: &CMat<T>) -> CMat<T> {
        let mut out = CMat::zeros(m.dim());
        for k in &self.ops {
            out = out.add(&k.sandwich(m));
        }
        out
    }

    fn choi(&self) -> CMat<T> {
        let d = self.ops[0].dim();
        let mut choi = CMat::zeros(d * d);
        for k in &self.ops {
            // |K>> <<K| with |K>> the column-stacked operator.
            let mut vec = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    vec.push(k[(i, j)]);
                }
            }
            for a in 0..d * d {
                for b in 0..d * d {
                    choi[(a, b)] = choi[(a, b)] + vec[a] * vec[b].conj();
                }
            }
        }
        choi
    }
}

/// Generalized measurement {F_k} with sum_k F_k^dagger F_k = I.
#[derive(Clone, Debug)]
pub struct MeasurementFamily<T: Real> {
    ops: Vec<CMat<T>>,
}

impl<T: Real> MeasurementFamily<T> {
    pub fn new(ops: Vec<CMat<T>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParam("measurement needs at least one operator".into()));
        }
        let dim = ops[0].dim();
        let mut sum = CMat::zeros(dim);
        for f in &ops {
            sum = sum.add(&f.adjoint().mul(f));
        }
        if sum.max_abs_diff(&CMat::identity(dim)) > T::channel_tol() {
            return Err(Error::InvalidState(
                "measurement operators do not satisfy completeness".into(),
            ));
        }
        Ok(MeasurementFamily { ops })
    }

    /// Trivial measurement: single identity operator, no information gained.
    pub fn trivial() -> Self {
        MeasurementFamily {
            ops: vec![CMat::identity(2)],
        }
    }

    /// Projective measurement in the given basis.
    pub fn projective(basis: crate::qstate::Basis) -> Self {
        let (v0, v1) = crate::qstate::measurement_vectors::<T>(basis);
        MeasurementFamily {
            ops: vec![v0.projector().matrix().clone(), v1.projector().matrix().clone()],
        }
    }

    pub fn operators(&self) -> &[CMat<T>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// One branch of a measure-then-store step: the classical outcome (absent
/// for the trivial measurement), the stored state (absent once fully
/// measured) and the branch probability.
#[derive(Clone, Debug)]
pub struct StoredRecord<T: Real> {
    pub outcome: Option<usize>,
    pub state: Option<DensityMatrix<T>>,
    pub weight: T,
}

/// Outcome of sending a state through an erasure step.
#[derive(Clone, Debug)]
pub struct ErasureFlag<T: Real> {
    pub erased: bool,
    pub state: Option<DensityMatrix<T>>,
}

/// With probability `p` the state is lost; otherwise it passes untouched.
pub fn erase<T: Real, R: Rng>(p: T, rho: &DensityMatrix<T>, rng: &mut R) -> Result<ErasureFlag<T>> {
    if p < T::zero() || p > T::one() {
        return Err(Error::InvalidParam(format!("erasure probability {p} outside [0, 1]")));
    }
    let draw: f64 = rng.gen();
    if r::<T>(draw) < p {
        Ok(ErasureFlag { erased: true, state: None })
    } else {
        Ok(ErasureFlag {
            erased: false,
            state: Some(rho.clone()),
        })
    }
}

const PRUNE_WEIGHT: f64 = 1e-14;

/// Apply a measurement and then storage noise: branch k occurs with weight
/// Tr(F_k rho F_k^dagger) and stores noise(F_k rho F_k^dagger / weight).
/// Branches below weight 1e-14 are dropped to avoid 0/0 normalization.
pub fn measure_and_store<T: Real>(
    fam: &MeasurementFamily<T>,
    noise: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
) -> Vec<StoredRecord<T>> {
    let mut records = Vec::new();
    for (k, f) in fam.operators().iter().enumerate() {
        let raw = f.sandwich(rho.matrix());
        let weight = raw.trace().re;
        if weight < r(PRUNE_WEIGHT) {
            continue;
        }
        let normalized = raw.scale_re(T::one() / weight);
        let stored = DensityMatrix::new(noise.apply_raw(&normalized))
            .expect("normalized branch through CPTP noise is a state");
        let outcome = (fam.len() > 1).then_some(k);
        records.push(StoredRecord {
            outcome,
            state: Some(stored),
            weight,
        });
    }
    records
}
