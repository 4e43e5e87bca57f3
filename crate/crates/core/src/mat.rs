//! Dense complex matrices with the small amount of linear algebra the rest
//! of the crate needs: products, tensor products, Hermitian eigensolves and
//! trace norms. Dimensions stay tiny (2 up to ~1024), so a closed-form 2x2
//! solver plus cyclic Jacobi sweeps is both exact enough and fast enough.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::real::{r, Real};

pub type Cpx<T> = Complex<T>;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T: Real> {
    dim: usize,
    data: Vec<Cpx<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![Cpx::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cpx::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Cpx<T>>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|row| row.len() == dim), "matrix not square");
        CMat {
            dim,
            data: rows.iter().flat_map(|row| row.iter().cloned()).collect(),
        }
    }

    /// 2x2 matrix from real entries.
    pub fn from_real_2x2(a: f64, b: f64, c: f64, d: f64) -> Self {
        let re = |x: f64| Cpx::new(r::<T>(x), T::zero());
        Self::from_rows(&[vec![re(a), re(b)], vec![re(c), re(d)]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, s: Cpx<T>) -> Self {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|v| *v * s).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Cpx::new(s, T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Cpx<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Cpx::zero(), |a, b| a + b)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// K rho K^dagger.
    pub fn sandwich(&self, rho: &Self) -> Self {
        self.mul(rho).mul(&self.adjoint())
    }

    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn herm_eigenvalues(&self) -> Vec<T> {
        self.herm_eig(false).0
    }

    /// Full Hermitian eigendecomposition; columns of the returned matrix are
    /// the eigenvectors matching the (ascending) eigenvalues.
    pub fn herm_eigendecomposition(&self) -> (Vec<T>, CMat<T>) {
        let (vals, vecs) = self.herm_eig(true);
        (vals, vecs.expect("vectors requested"))
    }

    fn herm_eig(&self, want_vectors: bool) -> (Vec<T>, Option<CMat<T>>) {
        let n = self.dim;
        if n == 1 {
            return (vec![self[(0, 0)].re], want_vectors.then(|| Self::identity(1)));
        }
        if n == 2 && !want_vectors {
            let (hi, lo) = herm2_eigenvalues(self[(0, 0)].re, self[(0, 1)], self[(1, 1)].re);
            return (vec![lo, hi], None);
        }
        let mut a = self.clone();
        let mut v = want_vectors.then(|| Self::identity(n));
        let scale = T::one() + self.frobenius();
        let tol = r::<T>(1e-14) * scale;
        // Cyclic Jacobi: exactly diagonalize each 2x2 principal block in turn.
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm();
                }
            }
            if off < tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let b = a[(p, q)];
                    if b.norm() < tol * r(1e-2) {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    // Rotate onto the eigenvalue l1 of the 2x2 block that is
                    // closer to a_pp, keeping the angle below pi/4 so the
                    // cyclic sweep converges instead of oscillating. The
                    // eigenvector component d = l1 - a_pp is computed as
                    // |b|^2 / (l1 - a_qq): the direct difference cancels
                    // catastrophically for small |b| and the roundoff,
                    // divided by |b|, becomes a spurious mixing angle.
                    let half_gap = (app - aqq) * r(0.5);
                    let s = (half_gap * half_gap + b.norm_sqr()).sqrt();
                    let signed = if half_gap >= T::zero() { s } else { -s };
                    // l1 - a_qq = half_gap + signed, bounded below by s > 0.
                    let d = b.norm_sqr() / (half_gap + signed);
                    // Unit eigenvectors of the block: u1 = (b, d),
                    // u2 = (-d, conj(b)).
                    let norm = (b.norm_sqr() + d * d).sqrt();
                    let v11 = b / norm;
                    let v21 = Cpx::new(d / norm, T::zero());
                    let v12 = Cpx::new(-d / norm, T::zero());
                    let v22 = b.conj() / norm;
                    // Columns p, q of A <- A * V.
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * v11 + aiq * v21;
                        a[(i, q)] = aip * v12 + aiq * v22;
                    }
                    // Rows p, q of A <- V^dagger * A.
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = v11.conj() * apj + v21.conj() * aqj;
                        a[(q, j)] = v12.conj() * apj + v22.conj() * aqj;
                    }
                    if let Some(vm) = v.as_mut() {
                        for i in 0..n {
                            let vip = vm[(i, p)];
                            let viq = vm[(i, q)];
                            vm[(i, p)] = vip * v11 + viq * v21;
                            vm[(i, q)] = vip * v12 + viq * v22;
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
        let vals: Vec<T> = order.iter().map(|&i| diag[i]).collect();
        let vecs = v.map(|vm| {
            let mut out = Self::zeros(n);
            for (new_col, &old_col) in order.iter().enumerate() {
                for i in 0..n {
                    out[(i, new_col)] = vm[(i, old_col)];
                }
            }
            out
        });
        (vals, vecs)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.herm_eigenvalues()
            .into_iter()
            .fold(T::infinity(), T::min)
    }

    /// Trace norm (sum of singular values). Hermitian inputs take the
    /// eigenvalue route; general inputs go through A^dagger A.
    pub fn trace_norm(&self) -> T {
        if self.is_hermitian(r(1e-11)) {
            self.herm_eigenvalues().into_iter().map(T::abs).sum()
        } else {
            self.adjoint()
                .mul(self)
                .herm_eigenvalues()
                .into_iter()
                .map(|l| l.max(T::zero()).sqrt())
                .sum()
        }
    }

    /// |A| = sum |lambda_i| v_i v_i^dagger for Hermitian A.
    pub fn abs_herm(&self) -> Self {
        let (vals, vecs) = self.herm_eigendecomposition();
        reassemble(&vals.iter().map(|l| l.abs()).collect::<Vec<_>>(), &vecs)
    }

    /// Projector onto the nonnegative eigenspace of a Hermitian matrix
    /// (zero eigenvalues included).
    pub fn nonneg_eigenprojector(&self) -> Self {
        let (vals, vecs) = self.herm_eigendecomposition();
        let weights: Vec<T> = vals
            .iter()
            .map(|&l| if l >= T::zero() { T::one() } else { T::zero() })
            .collect();
        reassemble(&weights, &vecs)
    }
}

fn reassemble<T: Real>(vals: &[T], vecs: &CMat<T>) -> CMat<T> {
    let n = vecs.dim();
    let mut out = CMat::zeros(n);
    for (k, &l) in vals.iter().enumerate() {
        if l == T::zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + vecs[(i, k)] * vecs[(j, k)].conj() * Cpx::new(l, T::zero());
            }
        }
    }
    out
}

/// Closed-form eigenvalues of [[a, b], [conj(b), d]], returned (larger, smaller).
fn herm2_eigenvalues<T: Real>(a: T, b: Cpx<T>, d: T) -> (T, T) {
    let two = r::<T>(2.0);
    let mean = (a + d) / two;
    let diff = (a - d) / two;
    let s = (diff * diff + b.norm_sqr()).sqrt();
    (mean + s, mean - s)
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMat<T> {
    type Output = Cpx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cpx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cpx<T> {
        &mut self.data[i * self.dim + j]
    }
}

pub fn pauli_x<T: Real>() -> CMat<T> {
    CMat::from_real_2x2(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_y<T: Real>() -> CMat<T> {
    let i = Cpx::new(T::zero(), T::one());
    CMat::from_rows(&[vec![Cpx::zero(), -i], vec![i, Cpx::zero()]])
}

pub fn pauli_z<T: Real>() -> CMat<T> {
    CMat::from_real_2x2(1.0, 0.0, 0.0, -1.0)
}
