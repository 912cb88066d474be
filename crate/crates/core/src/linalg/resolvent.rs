//! Resolvent `(λ - A)^{-1}` and spectral projections.
//!
//! Semisimple clusters use the biorthogonal formula `P = V (YᵀV)^{-1} Yᵀ`
//! from right and left eigenvector bases. Defective clusters fall back to
//! the contour integral `(2πi)^{-1} ∮ (z - A)^{-1} dz` over a circle around
//! the cluster, discretised by the trapezoidal rule.

use nalgebra::{Complex, DMatrix, DVector};

use super::{eig_default, to_complex, EigenData, C64};
use crate::error::{Error, Result};
use crate::matrix::GeneratorMatrix;
use crate::tol;

const CONTOUR_NODES: usize = 128;

fn resolvent_raw(a: &DMatrix<f64>, lambda: C64) -> Result<DMatrix<C64>> {
    let d = a.nrows();
    let m = DMatrix::identity(d, d) * lambda - to_complex(a);
    m.lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("λ - A at λ = {lambda}")))
}

/// `(λ - A)^{-1}` using precomputed eigenvalues for the distance check.
pub fn resolvent_with(
    a: &GeneratorMatrix,
    eig: &EigenData,
    lambda: C64,
    resolvent_tol: f64,
) -> Result<DMatrix<C64>> {
    let distance = eig.distance_to_spectrum(lambda);
    if distance <= resolvent_tol {
        return Err(Error::NearSpectrum {
            point: lambda,
            distance,
        });
    }
    resolvent_raw(a.matrix(), lambda)
}

/// `(λ - A)^{-1}`; fails when `λ` is within `1e-10 max(‖A‖∞, 1)` of the spectrum.
pub fn resolvent(a: &GeneratorMatrix, lambda: C64) -> Result<DMatrix<C64>> {
    let eig = eig_default(a)?;
    resolvent_with(a, &eig, lambda, tol::RESOLVENT_REL * a.norm_inf().max(1.0))
}

fn biorthogonal_projection(v: &[DVector<C64>], y: &[DVector<C64>]) -> Result<DMatrix<C64>> {
    let vm = DMatrix::from_columns(v);
    let ym = DMatrix::from_columns(y);
    let gram = ym.transpose() * &vm;
    let inv = gram
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("left/right eigenvector pairing".into()))?;
    Ok(&vm * inv * ym.transpose())
}

fn contour_projection(a: &DMatrix<f64>, center: C64, radius: f64) -> Result<DMatrix<C64>> {
    let d = a.nrows();
    let mut sum = DMatrix::<C64>::zeros(d, d);
    for k in 0..CONTOUR_NODES {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CONTOUR_NODES as f64;
        let w = Complex::from_polar(radius, theta);
        let r = resolvent_raw(a, center + w)?;
        sum += r * w;
    }
    Ok(sum / Complex::new(CONTOUR_NODES as f64, 0.0))
}

/// Spectral projection onto the generalized eigenspace of one cluster.
pub fn spectral_projection(
    a: &GeneratorMatrix,
    eig: &EigenData,
    cluster: usize,
) -> Result<DMatrix<C64>> {
    let c = &eig.clusters[cluster];
    let d = a.dim();
    let Some(sep) = eig.separation(cluster) else {
        return Ok(DMatrix::identity(d, d));
    };
    if sep <= eig.cluster_tol {
        return Err(Error::NotSeparated {
            eigenvalue: c.center,
            gap: sep,
        });
    }
    if !c.defective {
        return biorthogonal_projection(&c.right_vectors, &c.left_vectors);
    }
    let spread = c
        .members
        .iter()
        .map(|&i| (eig.eigenvalues[i] - c.center).norm())
        .fold(0.0, f64::max);
    let to_rest = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| !c.members.contains(i))
        .map(|(_, z)| (z - c.center).norm())
        .fold(f64::INFINITY, f64::min);
    let radius = 0.5 * (spread + to_rest);
    contour_projection(a.matrix(), c.center, radius)
}

/// Rank-one projection `P = u φᵀ` at a simple real eigenvalue, with `u`
/// scaled to `‖u‖∞ = 1` (largest-magnitude entry positive) and `⟨φ, u⟩ = 1`.
#[derive(Debug, Clone)]
pub struct RankOneProjection {
    pub eigenvalue: f64,
    pub u: DVector<f64>,
    pub phi: DVector<f64>,
}

impl RankOneProjection {
    pub fn matrix(&self) -> DMatrix<f64> {
        &self.u * self.phi.transpose()
    }
}

fn real_unit_vector(v: &DVector<C64>) -> DVector<f64> {
    // rotate the phase so the largest entry is real and positive
    let k = v.icamax();
    let phase = if v[k].norm() > 0.0 {
        v[k].conj() / v[k].norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let r = v.map(|z| (z * phase).re);
    let n = r.amax();
    r / n
}

pub fn rank_one_projection(
    a: &GeneratorMatrix,
    eig: &EigenData,
    cluster: usize,
) -> Result<RankOneProjection> {
    let c = &eig.clusters[cluster];
    if c.defective {
        return Err(Error::Defective {
            eigenvalue: c.center,
            algebraic: c.algebraic,
            geometric: c.geometric,
        });
    }
    if !c.is_simple() {
        return Err(Error::NotSimple {
            eigenvalue: c.center,
            multiplicity: c.algebraic,
        });
    }
    if !c.is_real() {
        return Err(Error::Domain(format!(
            "rank-one real projection requested at non-real eigenvalue {}",
            c.center
        )));
    }
    if let Some(sep) = eig.separation(cluster) {
        if sep <= eig.cluster_tol {
            return Err(Error::NotSeparated {
                eigenvalue: c.center,
                gap: sep,
            });
        }
    }
    let _ = a;
    let u = real_unit_vector(&c.right_vectors[0]);
    let y = real_unit_vector(&c.left_vectors[0]);
    let pairing = y.dot(&u);
    if pairing.abs() <= f64::EPSILON * y.norm() * u.norm() {
        return Err(Error::Singular("left/right eigenvector pairing".into()));
    }
    Ok(RankOneProjection {
        eigenvalue: c.center.re,
        u,
        phi: y / pairing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::casestudies;
    use crate::linalg::real_part;
    use crate::matrix::norm_inf;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).iter().all(|x| x.abs() <= tol)
    }

    #[test]
    fn resolvent_of_zero_and_diagonal() {
        let r = resolvent(&GeneratorMatrix::zeros(2), Complex::new(2.0, 0.0)).unwrap();
        assert!(close(
            &real_part(&r).0,
            &(DMatrix::identity(2, 2) * 0.5),
            1e-15
        ));
        let a = GeneratorMatrix::diagonal(&[1.0, 3.0]).unwrap();
        let r = resolvent(&a, Complex::new(0.0, 0.0)).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0 / 3.0]);
        assert!(close(&real_part(&r).0, &want, 1e-15));
    }

    #[test]
    fn resolvent_of_a1_at_ten() {
        // spectral mapping: 1/(10 - {9, 8, 0})
        let a = casestudies::a1();
        let r = resolvent(&a, Complex::new(10.0, 0.0)).unwrap();
        let rr = GeneratorMatrix::from_matrix(real_part(&r).0, None).unwrap();
        let e = crate::linalg::eig_default(&rr).unwrap();
        let mut got: Vec<f64> = e.eigenvalues.iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip([0.1, 0.5, 1.0]) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn resolvent_near_spectrum_fails() {
        let a = GeneratorMatrix::diagonal(&[1.0, 3.0]).unwrap();
        match resolvent(&a, Complex::new(1.0, 1e-13)) {
            Err(Error::NearSpectrum { distance, .. }) => assert!(distance < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projection_diagonal() {
        let a = GeneratorMatrix::diagonal(&[5.0, 1.0]).unwrap();
        let e = eig_default(&a).unwrap();
        let p = real_part(&spectral_projection(&a, &e, 0).unwrap()).0;
        assert!(close(
            &p,
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            1e-14
        ));
    }

    #[test]
    fn projection_a1_perron() {
        let a = casestudies::a1();
        let e = eig_default(&a).unwrap();
        let (p, im) = real_part(&spectral_projection(&a, &e, 0).unwrap());
        assert!(im < 1e-14);
        assert!(close(&p, &DMatrix::from_element(3, 3, 1.0 / 3.0), 1e-12));
    }

    #[test]
    fn projection_metzler_zero_mode() {
        let a = casestudies::metzler_pair();
        let e = eig_default(&a).unwrap();
        let k = e.spectral_bound_cluster(1e-8).unwrap();
        let p = real_part(&spectral_projection(&a, &e, k).unwrap()).0;
        assert!(close(&p, &DMatrix::from_element(2, 2, 0.5), 1e-14));
        let r1 = rank_one_projection(&a, &e, k).unwrap();
        assert!(close(&r1.matrix(), &p, 1e-14));
        assert!((r1.u[0] - 1.0).abs() < 1e-14 && (r1.phi[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn defective_cluster_via_contour() {
        // Jordan block at 1 plus a simple eigenvalue at -1
        let a =
            GeneratorMatrix::from_rows(&[&[1.0, 1.0, 0.5], &[0.0, 1.0, 2.0], &[0.0, 0.0, -1.0]])
                .unwrap();
        let e = eig_default(&a).unwrap();
        let k = e.clusters.iter().position(|c| c.defective).unwrap();
        let p = real_part(&spectral_projection(&a, &e, k).unwrap()).0;
        assert!(norm_inf(&(&p * &p - &p)) < 1e-12);
        assert!(norm_inf(&(a.matrix() * &p - &p * a.matrix())) < 1e-12);
        assert!((p.trace() - 2.0).abs() < 1e-12);
        assert!(matches!(
            rank_one_projection(&a, &e, k),
            Err(Error::Defective { .. })
        ));
    }
}
