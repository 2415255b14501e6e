//! Dense Hermitian helpers shared by the rest of the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest entry of `|M - M^H|`.
pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Eigenvectors of a Hermitian matrix, kept real when the input is real.
#[derive(Clone, Debug)]
pub enum EigenVectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

impl EigenVectors {
    pub fn dim(&self) -> usize {
        match self {
            EigenVectors::Real(v) => v.nrows(),
            EigenVectors::Complex(v) => v.nrows(),
        }
    }

    pub fn column(&self, k: usize) -> DVector<C64> {
        match self {
            EigenVectors::Real(v) => v.column(k).map(|x| C64::new(x, 0.0)),
            EigenVectors::Complex(v) => v.column(k).into_owned(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        match self {
            EigenVectors::Real(v) => v.map(|x| C64::new(x, 0.0)),
            EigenVectors::Complex(v) => v.clone(),
        }
    }

    /// `V^H x`
    pub fn adjoint_mul(&self, x: &DVector<C64>) -> DVector<C64> {
        match self {
            EigenVectors::Real(v) => {
                let re = v.tr_mul(&x.map(|z| z.re));
                let im = v.tr_mul(&x.map(|z| z.im));
                DVector::from_iterator(re.len(), re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)))
            }
            EigenVectors::Complex(v) => v.ad_mul(x),
        }
    }

    /// `V x`
    pub fn mul(&self, x: &DVector<C64>) -> DVector<C64> {
        match self {
            EigenVectors::Real(v) => {
                let re = v * x.map(|z| z.re);
                let im = v * x.map(|z| z.im);
                DVector::from_iterator(re.len(), re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)))
            }
            EigenVectors::Complex(v) => v * x,
        }
    }
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: EigenVectors,
}

impl Spectrum {
    /// Decomposes `m`, which must be Hermitian to `tol` (entrywise).
    pub fn hermitian(m: &DMatrix<C64>, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        let dev = hermitian_deviation(m);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        let n = m.nrows();
        if n == 0 {
            return Ok(Spectrum { values: vec![], vectors: EigenVectors::Real(DMatrix::zeros(0, 0)) });
        }
        // nalgebra's symmetric_eigen can stall well short of working precision
        // (reconstruction errors near 1e-5 on some 64x64 inputs), so the solve goes
        // through faer.
        let is_real = m.iter().all(|z| z.im == 0.0);
        let (values, vectors) = if is_real {
            let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
            let eig = a.self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
            let s = eig.S();
            let u = eig.U();
            ((0..n).map(|k| s[k]).collect::<Vec<_>>(), EigenVectors::Real(DMatrix::from_fn(n, n, |i, j| u[(i, j)])))
        } else {
            let a = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| faer::c64::new(m[(i, j)].re, m[(i, j)].im));
            let eig = a.self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
            let s = eig.S();
            let u = eig.U();
            let vecs = DMatrix::from_fn(n, n, |i, j| {
                let z = u[(i, j)];
                C64::new(z.re, z.im)
            });
            ((0..n).map(|k| s[k].re).collect::<Vec<_>>(), EigenVectors::Complex(vecs))
        };

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&k| values[k]).collect();
        let sorted_vectors = match vectors {
            EigenVectors::Real(v) => EigenVectors::Real(DMatrix::from_fn(n, n, |i, j| v[(i, order[j])])),
            EigenVectors::Complex(v) => EigenVectors::Complex(DMatrix::from_fn(n, n, |i, j| v[(i, order[j])])),
        };
        Ok(Spectrum { values: sorted_values, vectors: sorted_vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(E)) V^H`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let v = self.vectors.to_complex();
        let mut scaled = v.clone();
        for (k, &e) in self.values.iter().enumerate() {
            let w = f(e);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * v.adjoint()
    }
}

/// Multiplies the phase of `v` so its largest-magnitude entry (first on ties)
/// is real and positive.
pub fn fix_phase(v: &mut DVector<C64>) {
    let mut best = 0usize;
    let mut best_abs = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        // Tolerate round-off when picking among equal-magnitude entries.
        if z.norm() > best_abs * (1.0 + 1e-9) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best] / v[best].norm();
        let rot = phase.conj();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}
