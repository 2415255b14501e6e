use nalgebra::{DMatrix, DVector};

use crate::linalg::{Spectrum, C64};
use crate::statespace::{OperatorMatrix, STRUCTURAL_TOL};
use crate::{Error, Result};

/// One eigenvalue cluster of the strong Hamiltonian.
#[derive(Clone, Debug)]
pub struct Cluster {
    /// Mean of the clustered eigenvalues.
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub projector: OperatorMatrix,
    /// Orthonormal eigenvectors spanning the cluster.
    pub vectors: Vec<DVector<C64>>,
}

#[derive(Clone, Debug)]
pub struct ZenoDecomposition {
    pub strong: OperatorMatrix,
    /// Ascending in eigenvalue.
    pub clusters: Vec<Cluster>,
    /// Multiplier `K` of the strong Hamiltonian.
    pub coupling: f64,
    pub width: f64,
}

impl ZenoDecomposition {
    /// The cluster containing eigenvalue zero, if any.
    pub fn zero_cluster(&self) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.eigenvalue.abs() <= self.width)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.eigenvalue).collect()
    }

    /// `sum_n E_n P_n`
    pub fn reconstruct(&self) -> OperatorMatrix {
        let n = self.strong.dim();
        let mut m = DMatrix::zeros(n, n);
        for c in &self.clusters {
            m += c.projector.entries() * C64::new(c.eigenvalue, 0.0);
        }
        OperatorMatrix::new(self.strong.space().clone(), m).expect("same dimension as the input")
    }
}

/// `1e-6` times the spectral radius, with a floor for the zero matrix.
pub fn default_cluster_width(spectral_radius: f64) -> f64 {
    if spectral_radius > 0.0 {
        1e-6 * spectral_radius
    } else {
        1e-12
    }
}

/// Groups the eigenvalues of `strong` into clusters no wider than
/// `cluster_width` between neighbours; `None` picks [`default_cluster_width`].
///
/// A gap between `width` and `2 width` is neither clearly inside nor clearly
/// between clusters and is reported as ambiguous.
pub fn decompose(strong: &OperatorMatrix, cluster_width: Option<f64>) -> Result<ZenoDecomposition> {
    strong.require_hermitian()?;
    let spectrum = Spectrum::hermitian(strong.entries(), STRUCTURAL_TOL)?;
    let radius = spectrum.values.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    let width = cluster_width.unwrap_or_else(|| default_cluster_width(radius));
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("cluster width {width} must be positive")));
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &e) in spectrum.values.iter().enumerate() {
        match groups.last_mut() {
            Some(group) => {
                let gap = e - spectrum.values[*group.last().unwrap()];
                if gap <= width {
                    group.push(k);
                } else if gap < 2.0 * width {
                    return Err(Error::AmbiguousClustering { gap, width });
                } else {
                    groups.push(vec![k]);
                }
            }
            None => groups.push(vec![k]),
        }
    }

    let space = strong.space().clone();
    let clusters = groups
        .into_iter()
        .map(|group| {
            let vectors: Vec<DVector<C64>> = group.iter().map(|&k| spectrum.vectors.column(k)).collect();
            let eigenvalue = group.iter().map(|&k| spectrum.values[k]).sum::<f64>() / group.len() as f64;
            Ok(Cluster {
                eigenvalue,
                multiplicity: group.len(),
                projector: OperatorMatrix::projector(space.clone(), &vectors)?,
                vectors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZenoDecomposition { strong: strong.clone(), clusters, coupling: 1.0, width })
}

/// `sum_n P_n H_S P_n`
pub fn zeno_hamiltonian(dec: &ZenoDecomposition, weak: &OperatorMatrix) -> Result<OperatorMatrix> {
    limiting_generator(dec, weak, 0.0)
}

/// `sum_n (K E_n P_n + P_n H_S P_n)`, the time-independent generator of the
/// limiting evolution `exp(-i H_eff t)`.
pub fn limiting_generator(dec: &ZenoDecomposition, weak: &OperatorMatrix, coupling: f64) -> Result<OperatorMatrix> {
    dec.strong.same_space(weak)?;
    let n = weak.dim();
    let mut m = DMatrix::zeros(n, n);
    for c in &dec.clusters {
        let p = c.projector.entries();
        m += p * weak.entries() * p;
        if coupling != 0.0 && c.eigenvalue != 0.0 {
            m += p * C64::new(coupling * c.eigenvalue, 0.0);
        }
    }
    OperatorMatrix::new(weak.space().clone(), m)
}
