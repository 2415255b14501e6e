use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::space::{build_space, HilbertSpace};
use super::vector::StateVector;
use super::STRUCTURAL_TOL;
use crate::linalg::{hermitian_deviation, Spectrum, C64, ZERO};
use crate::{Error, Result};

/// Largest reduced dimension accepted by [`negativity`].
pub const NEGATIVITY_MAX_DIM: usize = 64;

const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    space: Arc<HilbertSpace>,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(space: Arc<HilbertSpace>, entries: DMatrix<C64>) -> Result<Self> {
        let n = space.dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Dimension(format!("{}x{} matrix for dimension {n}", entries.nrows(), entries.ncols())));
        }
        let dev = hermitian_deviation(&entries);
        if dev > STRUCTURAL_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let spectrum = Spectrum::hermitian(&entries, STRUCTURAL_TOL)?;
        if let Some(&min) = spectrum.values.first() {
            if min < -POSITIVITY_TOL {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(DensityMatrix { space, entries })
    }

    pub(crate) fn from_trusted(space: Arc<HilbertSpace>, entries: DMatrix<C64>) -> Self {
        DensityMatrix { space, entries }
    }

    /// `|psi><psi| / <psi|psi>`
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let psi = psi.normalized()?;
        let a = psi.amplitudes();
        Ok(DensityMatrix { space: psi.space().clone(), entries: a * a.adjoint() })
    }

    pub fn maximally_mixed(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        let entries = DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0));
        DensityMatrix { space, entries }
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

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(Spectrum::hermitian(&self.entries, STRUCTURAL_TOL)?.values)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let plan = TracePlan::new(&self.space, keep)?;
        let mut out = DMatrix::from_element(plan.reduced.dim(), plan.reduced.dim(), ZERO);
        for group in plan.groups.values() {
            for &(i, ki) in group {
                for &(j, kj) in group {
                    out[(ki, kj)] += self.entries[(i, j)];
                }
            }
        }
        Ok(DensityMatrix { space: plan.reduced, entries: out })
    }

    /// `<target|rho|target>` for a normalized target.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        if !self.space.same_as(target.space()) {
            return Err(Error::Dimension(format!("{} vs {}", self.space, target.space())));
        }
        let t = target.normalized()?;
        let a = t.amplitudes();
        Ok(a.dotc(&(&self.entries * a)).re)
    }

    /// Partial transpose over the subsystems listed in `side`.
    pub fn partial_transpose(&self, side: &[usize]) -> Result<DMatrix<C64>> {
        if !self.space.is_full_product() {
            return Err(Error::Unsupported("partial transpose needs a full tensor-product space".into()));
        }
        validate_bipartition(&self.space, side)?;
        let n = self.dim();
        let mut out = DMatrix::from_element(n, n, ZERO);
        for i in 0..n {
            let si = self.space.state(i);
            for j in 0..n {
                let sj = self.space.state(j);
                let mut ti = si.clone();
                let mut tj = sj.clone();
                for &s in side {
                    ti.set(s, sj.get(s));
                    tj.set(s, si.get(s));
                }
                let a = self.space.index_of(&ti).expect("full product space");
                let b = self.space.index_of(&tj).expect("full product space");
                out[(a, b)] = self.entries[(i, j)];
            }
        }
        Ok(out)
    }

    /// Sum of `|negative eigenvalues|` of the partial transpose.
    pub fn negativity(&self, bipartition: &[usize]) -> Result<f64> {
        if self.dim() > NEGATIVITY_MAX_DIM {
            return Err(Error::Unsupported(format!(
                "negativity on dimension {} (limit {NEGATIVITY_MAX_DIM})",
                self.dim()
            )));
        }
        let pt = self.partial_transpose(bipartition)?;
        let spectrum = Spectrum::hermitian(&pt, 1e-10)?;
        Ok(spectrum.values.iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
    }
}

impl StateVector {
    /// Reduced density matrix of a pure state on the `keep` subsystems.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let psi = self.normalized()?;
        let plan = TracePlan::new(psi.space(), keep)?;
        let a = psi.amplitudes();
        let mut out = DMatrix::from_element(plan.reduced.dim(), plan.reduced.dim(), ZERO);
        for group in plan.groups.values() {
            for &(i, ki) in group {
                if a[i] == ZERO {
                    continue;
                }
                for &(j, kj) in group {
                    out[(ki, kj)] += a[i] * a[j].conj();
                }
            }
        }
        Ok(DensityMatrix::from_trusted(plan.reduced, out))
    }
}

/// Basis states grouped by the configuration of the traced-out subsystems.
struct TracePlan {
    reduced: Arc<HilbertSpace>,
    groups: BTreeMap<Vec<u8>, Vec<(usize, usize)>>,
}

impl TracePlan {
    fn new(space: &Arc<HilbertSpace>, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("partial trace must keep at least one subsystem".into()));
        }
        for &k in keep {
            space.check_subsystem(k)?;
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() != keep.len() {
            return Err(Error::InvalidParameter("repeated subsystem in keep set".into()));
        }
        let specs: Vec<_> = kept.iter().map(|&k| space.subsystems()[k]).collect();
        let reduced = build_space(&specs)?;
        let traced: Vec<usize> = (0..space.subsystems().len()).filter(|s| !kept.contains(s)).collect();

        let mut groups: BTreeMap<Vec<u8>, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, state) in space.basis().iter().enumerate() {
            let rest: Vec<u8> = traced.iter().map(|&s| state.get(s)).collect();
            let local = super::space::BasisState::new(kept.iter().map(|&s| state.get(s)).collect());
            let ki = reduced.index_of(&local).expect("reduced space is a full product");
            groups.entry(rest).or_default().push((i, ki));
        }
        Ok(TracePlan { reduced, groups })
    }
}

fn validate_bipartition(space: &HilbertSpace, side: &[usize]) -> Result<()> {
    let count = space.subsystems().len();
    for &s in side {
        space.check_subsystem(s)?;
    }
    let mut sorted = side.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() != side.len() || sorted.len() >= count {
        return Err(Error::InvalidParameter(format!(
            "bipartition {side:?} must be a non-empty proper subset of {count} subsystems"
        )));
    }
    Ok(())
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    rho.fidelity(target)
}

pub fn negativity(rho: &DensityMatrix, bipartition: &[usize]) -> Result<f64> {
    rho.negativity(bipartition)
}
