//! Eigenvalues from the real Schur form, clustered by distance, with right
//! and left eigenvector bases per cluster taken from singular vectors of
//! `A - λI` and `Aᵀ - λI`.

use nalgebra::{linalg::Schur, linalg::SVD, Complex, ComplexField, DMatrix, DVector};

use super::C64;
use crate::error::{Error, Result};
use crate::matrix::GeneratorMatrix;
use crate::tol;

/// A group of eigenvalues that are numerically indistinguishable.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// Indices into [`EigenData::eigenvalues`].
    pub members: Vec<usize>,
    pub center: C64,
    pub algebraic: usize,
    pub geometric: usize,
    pub defective: bool,
    /// Unit-length basis of `ker(A - center)`; real when the center is real.
    pub right_vectors: Vec<DVector<C64>>,
    /// Unit-length basis of `ker(Aᵀ - center)`.
    pub left_vectors: Vec<DVector<C64>>,
    /// `‖A v - center v‖₂` for each right vector.
    pub residuals: Vec<f64>,
}

impl Cluster {
    pub fn is_real(&self) -> bool {
        self.center.im == 0.0
    }

    pub fn is_simple(&self) -> bool {
        self.algebraic == 1
    }
}

#[derive(Debug, Clone)]
pub struct EigenData {
    /// All `d` eigenvalues, sorted by decreasing real part.
    pub eigenvalues: Vec<C64>,
    pub clusters: Vec<Cluster>,
    pub cluster_tol: f64,
    /// `‖A‖∞`.
    pub norm: f64,
}

impl EigenData {
    /// `spb(A) = max Re λ`.
    pub fn spectral_bound(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn cluster_of(&self, eigen_index: usize) -> usize {
        self.clusters
            .iter()
            .position(|c| c.members.contains(&eigen_index))
            .expect("every eigenvalue belongs to a cluster")
    }

    /// The real cluster at the spectral bound, if `spb(A)` is an eigenvalue.
    pub fn spectral_bound_cluster(&self, peri_tol: f64) -> Option<usize> {
        let spb = self.spectral_bound();
        self.clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_real() && c.center.re >= spb - peri_tol)
            .max_by(|(_, a), (_, b)| a.center.re.total_cmp(&b.center.re))
            .map(|(i, _)| i)
    }

    /// Largest real part among eigenvalues outside the given cluster.
    pub fn max_re_outside(&self, cluster: usize) -> Option<f64> {
        let members = &self.clusters[cluster].members;
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| !members.contains(i))
            .map(|(_, z)| z.re)
            .reduce(f64::max)
    }

    /// Smallest distance from a cluster member to an eigenvalue outside it.
    pub fn separation(&self, cluster: usize) -> Option<f64> {
        let members = &self.clusters[cluster].members;
        let mut best: Option<f64> = None;
        for &i in members {
            for (j, z) in self.eigenvalues.iter().enumerate() {
                if !members.contains(&j) {
                    let d = (z - self.eigenvalues[i]).norm();
                    best = Some(best.map_or(d, |b| b.min(d)));
                }
            }
        }
        best
    }

    /// Distance from a point to the spectrum.
    pub fn distance_to_spectrum(&self, z: C64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| (l - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Singular values and null-space candidates of `m`, smallest first.
///
/// Returns the `max_count` right singular vectors belonging to the smallest
/// singular values and how many singular values are `<= tol`.
pub fn null_space<T>(m: DMatrix<T>, max_count: usize, tol: f64) -> Result<(Vec<DVector<T>>, usize)>
where
    T: ComplexField<RealField = f64>,
{
    let n = m.ncols();
    let svd = SVD::try_new(m, false, true, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence { iterations: 0 })?;
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    // a wide matrix has fewer singular values than columns; the missing ones are zero
    let rank_deficit = n.saturating_sub(order.len());
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nullity = rank_deficit + order.iter().filter(|(s, _)| *s <= tol).count();
    let vectors = order
        .iter()
        .take(max_count)
        .map(|&(_, i)| v_t.row(i).adjoint())
        .collect();
    Ok((vectors, nullity))
}

fn normalize(v: DVector<C64>) -> DVector<C64> {
    let n = v.norm();
    if n > 0.0 {
        v / Complex::new(n, 0.0)
    } else {
        v
    }
}

fn eigvecs(
    a: &DMatrix<f64>,
    center: C64,
    max_count: usize,
    tol: f64,
) -> Result<(Vec<DVector<C64>>, usize)> {
    let d = a.nrows();
    if center.im == 0.0 {
        let m = a - DMatrix::identity(d, d) * center.re;
        let (vs, nullity) = null_space(m, max_count, tol)?;
        Ok((
            vs.into_iter()
                .map(|v| normalize(v.map(|x| Complex::new(x, 0.0))))
                .collect(),
            nullity,
        ))
    } else {
        let m = a.map(|x| Complex::new(x, 0.0)) - DMatrix::identity(d, d) * center;
        let (vs, nullity) = null_space(m, max_count, tol)?;
        Ok((vs.into_iter().map(normalize).collect(), nullity))
    }
}

fn cmp_eigen(a: &C64, b: &C64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Eigendecomposition with the default clustering tolerance `1e-8 ‖A‖∞`.
pub fn eig_default(a: &GeneratorMatrix) -> Result<EigenData> {
    eig(a, tol::cluster_tol(a.norm_inf()))
}

/// All eigenvalues of `A`, clustered within `cluster_tol`, with eigenvector
/// bases and defectiveness per cluster.
pub fn eig(a: &GeneratorMatrix, cluster_tol: f64) -> Result<EigenData> {
    let d = a.dim();
    let m = a.matrix();
    let norm = a.norm_inf();
    let max_iter = 200 * d.max(10);
    let upper = (0..d).all(|j| (j + 1..d).all(|i| m[(i, j)] == 0.0));
    let mut eigenvalues: Vec<C64> = if upper {
        m.diagonal().iter().map(|&x| Complex::new(x, 0.0)).collect()
    } else {
        let schur =
            Schur::try_new(m.clone(), f64::EPSILON, max_iter).ok_or(Error::NoConvergence {
                iterations: max_iter,
            })?;
        schur.complex_eigenvalues().iter().copied().collect()
    };
    eigenvalues.sort_by(cmp_eigen);

    // single-linkage clustering
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..d {
        for j in i + 1..d {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= cluster_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        match root_slot[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_slot[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let null_tol = tol::NULL_REL * norm.max(1.0);
    let mt = m.transpose();
    let mut clusters = Vec::with_capacity(groups.len());
    for members in groups {
        let k = members.len() as f64;
        let mut center = members
            .iter()
            .fold(Complex::new(0.0, 0.0), |acc, &i| acc + eigenvalues[i])
            / Complex::new(k, 0.0);
        if center.im.abs() <= cluster_tol.max(f64::EPSILON * norm) {
            center.im = 0.0;
        }
        let algebraic = members.len();
        let (right_vectors, nullity) = eigvecs(m, center, algebraic, null_tol)?;
        let geometric = nullity.clamp(1, algebraic);
        let right_vectors: Vec<_> = right_vectors.into_iter().take(geometric).collect();
        let (left_vectors, _) = eigvecs(&mt, center, geometric, null_tol)?;
        let mc = m.map(|x| Complex::new(x, 0.0));
        let residuals = right_vectors
            .iter()
            .map(|v| (&mc * v - v * center).norm())
            .collect();
        clusters.push(Cluster {
            members,
            center,
            algebraic,
            geometric,
            defective: geometric < algebraic,
            right_vectors,
            left_vectors,
            residuals,
        });
    }
    Ok(EigenData {
        eigenvalues,
        clusters,
        cluster_tol,
        norm,
    })
}
