use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::space::{BasisState, HilbertSpace};
use super::STRUCTURAL_TOL;
use crate::linalg::{hermitian_deviation, C64, ONE, ZERO};
use crate::{Error, Result};

fn check_same(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{a} vs {b}")))
    }
}

/// Complex amplitudes over the ordered basis of a space.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(space: Arc<HilbertSpace>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(StateVector { space, amplitudes })
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        StateVector { space, amplitudes: DVector::zeros(n) }
    }

    pub fn basis_ket(space: Arc<HilbertSpace>, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::Dimension(format!("basis index {index} >= dimension {}", space.dim())));
        }
        let mut v = StateVector::zeros(space);
        v.amplitudes[index] = ONE;
        Ok(v)
    }

    pub fn from_basis_state(space: Arc<HilbertSpace>, state: &BasisState) -> Result<Self> {
        let index = space.index_of(state).ok_or_else(|| Error::NotInSpace(space.label(state)))?;
        StateVector::basis_ket(space, index)
    }

    /// Sum of `coefficient * |state>` terms (not normalized).
    pub fn from_terms(space: Arc<HilbertSpace>, terms: &[(BasisState, C64)]) -> Result<Self> {
        let mut v = StateVector::zeros(space);
        for (state, c) in terms {
            let i = v.space.index_of(state).ok_or_else(|| Error::NotInSpace(v.space.label(state)))?;
            v.amplitudes[i] += *c;
        }
        Ok(v)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude_of(&self, state: &BasisState) -> C64 {
        self.space.index_of(state).map_or(ZERO, |i| self.amplitudes[i])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        Ok(StateVector { space: self.space.clone(), amplitudes: self.amplitudes.unscale(n) })
    }

    pub fn scaled(&self, c: C64) -> Self {
        StateVector { space: self.space.clone(), amplitudes: &self.amplitudes * c }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        check_same(&self.space, &other.space)?;
        Ok(StateVector { space: self.space.clone(), amplitudes: &self.amplitudes + &other.amplitudes })
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_same(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Re-expresses the vector in `target`, which must contain every basis
    /// state carrying a nonzero amplitude.
    pub fn embed_into(&self, target: &Arc<HilbertSpace>) -> Result<StateVector> {
        if self.space.subsystems() != target.subsystems() {
            return Err(Error::Dimension(format!("{} vs {}", self.space, target)));
        }
        let mut out = StateVector::zeros(target.clone());
        for (i, z) in self.amplitudes.iter().enumerate() {
            if *z == ZERO {
                continue;
            }
            let state = self.space.state(i);
            let j = target.index_of(state).ok_or_else(|| Error::NotInSpace(self.space.label(state)))?;
            out.amplitudes[j] = *z;
        }
        Ok(out)
    }

    /// Squared norm of the part of `self` supported outside `sub`.
    pub fn weight_outside(&self, sub: &HilbertSpace) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| sub.index_of(self.space.state(*i)).is_none())
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// `<a|b>`
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.inner(b)
}

/// Dense complex operator over the basis of a space.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    space: Arc<HilbertSpace>,
    entries: DMatrix<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps `entries`; the Hermitian flag is set when `|M - M^H|` is within
    /// the structural tolerance.
    pub fn new(space: Arc<HilbertSpace>, entries: DMatrix<C64>) -> Result<Self> {
        let n = space.dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for a space of dimension {n}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let hermitian = hermitian_deviation(&entries) <= STRUCTURAL_TOL;
        Ok(OperatorMatrix { space, entries, hermitian })
    }

    /// Like [`OperatorMatrix::new`] but fails unless the matrix is Hermitian.
    pub fn hermitian(space: Arc<HilbertSpace>, entries: DMatrix<C64>) -> Result<Self> {
        let op = OperatorMatrix::new(space, entries)?;
        op.require_hermitian()?;
        Ok(op)
    }

    pub fn zeros(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        OperatorMatrix { space, entries: DMatrix::zeros(n, n), hermitian: true }
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        OperatorMatrix { space, entries: DMatrix::identity(n, n), hermitian: true }
    }

    /// `sum_k |v_k><v_k|`
    pub fn projector(space: Arc<HilbertSpace>, vectors: &[DVector<C64>]) -> Result<Self> {
        let n = space.dim();
        let mut m = DMatrix::zeros(n, n);
        for v in vectors {
            if v.len() != n {
                return Err(Error::Dimension(format!("vector of length {} for dimension {n}", v.len())));
            }
            m += v * v.adjoint();
        }
        OperatorMatrix::new(space, m)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian(hermitian_deviation(&self.entries)))
        }
    }

    pub fn same_space(&self, other: &OperatorMatrix) -> Result<()> {
        check_same(&self.space, &other.space)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_same(&self.space, psi.space())?;
        Ok(StateVector { space: self.space.clone(), amplitudes: &self.entries * psi.amplitudes() })
    }

    /// `<psi|M|psi>`
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        check_same(&self.space, psi.space())?;
        Ok(psi.amplitudes().dotc(&(&self.entries * psi.amplitudes())))
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_space(other)?;
        OperatorMatrix::new(self.space.clone(), &self.entries + &other.entries)
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_space(other)?;
        OperatorMatrix::new(self.space.clone(), &self.entries - &other.entries)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        OperatorMatrix { space: self.space.clone(), entries: &self.entries * C64::new(factor, 0.0), hermitian: self.hermitian }
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_space(other)?;
        OperatorMatrix::new(self.space.clone(), &self.entries * &other.entries)
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_space(other)?;
        OperatorMatrix::new(self.space.clone(), &self.entries * &other.entries - &other.entries * &self.entries)
    }

    /// `<a|M|b>`
    pub fn element(&self, a: &StateVector, b: &StateVector) -> Result<C64> {
        check_same(&self.space, a.space())?;
        check_same(&self.space, b.space())?;
        Ok(a.amplitudes().dotc(&(&self.entries * b.amplitudes())))
    }

    /// Largest entry of `|self - other|`.
    pub fn max_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.same_space(other)?;
        Ok(crate::linalg::max_abs_diff(&self.entries, &other.entries))
    }
}
