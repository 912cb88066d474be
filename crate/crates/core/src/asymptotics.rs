//! Long-term behaviour of `e^{tA}` and of the rescaled `e^{t(A - spb(A))}`.
//!
//! In finite dimensions bounded orbits mean `spb(A) <= 0` with a
//! semisimple boundary spectrum, and strong and uniform convergence
//! coincide.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_default, expm, spectral_projection, EigenData};
use crate::matrix::{norm_inf, GeneratorMatrix};
use crate::spectral::pole_data_with;
use crate::tol;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualPoint {
    pub t: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankOneLimit {
    pub spb: f64,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    pub gap: f64,
    /// `(t, ‖e^{t(A - spb)} - u φᵀ‖∞)`.
    pub residual_trace: Vec<ResidualPoint>,
    /// Negative least-squares slope of `ln residual` against `t` over the
    /// second half of the samples above the rounding floor.
    pub fitted_rate: f64,
}

impl RankOneLimit {
    pub fn projection(&self) -> DMatrix<f64> {
        DVector::from_row_slice(&self.u) * DVector::from_row_slice(&self.phi).transpose()
    }
}

/// Least-squares slope of `(x, y)`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Residuals at or below this, relative to `max(‖P‖∞, 1)`, are rounding.
const RATE_FLOOR_REL: f64 = 1e-10;

/// Rounding level of a computed `‖e^{tB} - P‖∞` for `‖B‖∞ = norm`.
pub fn rounding_floor(norm: f64, p_norm: f64, t: f64) -> f64 {
    (RATE_FLOOR_REL).max(100.0 * f64::EPSILON * norm * t) * p_norm.max(1.0)
}

/// Fit over the second half of the samples still above `floor(t)`.
pub fn fitted_rate(trace: &[ResidualPoint], floor: impl Fn(f64) -> f64) -> f64 {
    let live: Vec<(f64, f64)> = trace
        .iter()
        .filter(|p| p.residual > floor(p.t))
        .map(|p| (p.t, p.residual.ln()))
        .collect();
    let tail = &live[live.len() / 2..];
    if tail.len() < 2 {
        return f64::NAN;
    }
    -slope(tail)
}

pub fn rank_one_limit(a: &GeneratorMatrix, times: &[f64]) -> Result<RankOneLimit> {
    rank_one_limit_with(a, &eig_default(a)?, times)
}

/// `e^{t(A - spb)} → u φᵀ` with the residual trace at `times`.
pub fn rank_one_limit_with(
    a: &GeneratorMatrix,
    e: &EigenData,
    times: &[f64],
) -> Result<RankOneLimit> {
    if times.is_empty() {
        return Err(Error::Domain("need at least one sample time".into()));
    }
    let pole = pole_data_with(a, e).map_err(|err| match err {
        Error::SpectralBoundNotEigenvalue { .. } => Error::NoRankOneLimit(err.to_string()),
        other => other,
    })?;
    if pole.projection_rank != 1 {
        return Err(Error::NoRankOneLimit(format!(
            "spectral projection at spb has rank {} (pole order {})",
            pole.projection_rank, pole.pole_order
        )));
    }
    let spb = pole.spb;
    let k = e
        .spectral_bound_cluster(tol::peri_tol(spb))
        .expect("pole data found the cluster");
    let gap = match e.max_re_outside(k) {
        None => f64::INFINITY,
        Some(r) => spb - r,
    };
    if gap <= tol::peri_tol(spb) {
        return Err(Error::NoRankOneLimit(format!(
            "no spectral gap: other eigenvalues within {gap:e} of the spectral bound"
        )));
    }
    let u = pole.u.expect("rank one");
    let phi = pole.phi.expect("rank one");
    let p = DVector::from_row_slice(&u) * DVector::from_row_slice(&phi).transpose();
    let residual_trace = convergence_trace_at(a, spb, &p, times)?;
    let (norm, p_norm) = (a.shifted(-spb).norm_inf(), norm_inf(&p));
    let fitted_rate = fitted_rate(&residual_trace, |t| rounding_floor(norm, p_norm, t));
    Ok(RankOneLimit {
        spb,
        u,
        phi,
        gap,
        residual_trace,
        fitted_rate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AsymptoticKind {
    ConvergesToZero,
    ConvergesRankOne,
    ConvergesProjection { rank: usize },
    Oscillates,
    Diverges,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticClass {
    /// Behaviour of `e^{tA}` itself.
    pub kind: AsymptoticKind,
    /// Behaviour of `e^{t(A - spb(A))}`.
    pub rescaled_kind: AsymptoticKind,
    pub spb: f64,
    /// Eigenvalues with `Re λ >= spb - peri_tol`, as `[re, im]`.
    pub boundary: Vec<[f64; 2]>,
    pub boundary_semisimple: bool,
    /// Total algebraic multiplicity of the boundary spectrum.
    pub boundary_rank: usize,
}

fn classify_shifted(e: &EigenData, shift: f64) -> AsymptoticKind {
    let spb = e.spectral_bound() - shift;
    let band = tol::peri_tol(e.spectral_bound());
    if spb < -band {
        return AsymptoticKind::ConvergesToZero;
    }
    if spb > band {
        return AsymptoticKind::Diverges;
    }
    let boundary: Vec<_> = e
        .clusters
        .iter()
        .filter(|c| c.center.re - shift >= -band)
        .collect();
    if boundary.iter().any(|c| c.defective) {
        return AsymptoticKind::Diverges;
    }
    if boundary.iter().any(|c| !c.is_real()) {
        return AsymptoticKind::Oscillates;
    }
    match boundary.iter().map(|c| c.algebraic).sum() {
        1 => AsymptoticKind::ConvergesRankOne,
        rank => AsymptoticKind::ConvergesProjection { rank },
    }
}

pub fn classify_longterm(a: &GeneratorMatrix) -> Result<AsymptoticClass> {
    Ok(classify_longterm_with(&eig_default(a)?))
}

pub fn classify_longterm_with(e: &EigenData) -> AsymptoticClass {
    let spb = e.spectral_bound();
    let band = tol::peri_tol(spb);
    let boundary_clusters: Vec<_> = e
        .clusters
        .iter()
        .filter(|c| c.center.re >= spb - band)
        .collect();
    AsymptoticClass {
        kind: classify_shifted(e, 0.0),
        rescaled_kind: classify_shifted(e, spb),
        spb,
        boundary: e
            .eigenvalues
            .iter()
            .filter(|z| z.re >= spb - band)
            .map(|z| [z.re, z.im])
            .collect(),
        boundary_semisimple: boundary_clusters.iter().all(|c| !c.defective),
        boundary_rank: boundary_clusters.iter().map(|c| c.algebraic).sum(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryDecomposition {
    /// Projection onto the span of eigenvectors for `Re λ >= -peri_tol`.
    #[serde(serialize_with = "rows")]
    pub reversible_projection: DMatrix<f64>,
    #[serde(serialize_with = "rows")]
    pub stable_projection: DMatrix<f64>,
}

fn rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in m.row_iter() {
        seq.serialize_element(&r.iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

/// Splits `ℝ^d` into the span of boundary eigenvectors and the stable
/// part on which `e^{tA}` decays. Requires bounded orbits.
pub fn boundary_decomposition(a: &GeneratorMatrix) -> Result<BoundaryDecomposition> {
    let e = eig_default(a)?;
    let spb = e.spectral_bound();
    let band = tol::peri_tol(0.0);
    if spb > band {
        return Err(Error::Domain(format!(
            "spectral bound {spb} > 0; rescale the generator first"
        )));
    }
    let d = a.dim();
    let mut sum = DMatrix::<nalgebra::Complex<f64>>::zeros(d, d);
    for (k, c) in e.clusters.iter().enumerate() {
        if c.center.re < -band {
            continue;
        }
        if c.defective {
            return Err(Error::Defective {
                eigenvalue: c.center,
                algebraic: c.algebraic,
                geometric: c.geometric,
            });
        }
        sum += spectral_projection(a, &e, k)?;
    }
    let reversible = sum.map(|z| z.re);
    let stable = DMatrix::identity(d, d) - &reversible;
    Ok(BoundaryDecomposition {
        reversible_projection: reversible,
        stable_projection: stable,
    })
}

fn check_idempotent(p: &DMatrix<f64>) -> Result<()> {
    let err = norm_inf(&(p * p - p));
    if err > 1e-10 * norm_inf(p).max(1.0) {
        return Err(Error::Domain(format!(
            "P is not idempotent: ‖P² - P‖∞ = {err:e}"
        )));
    }
    Ok(())
}

fn convergence_trace_at(
    a: &GeneratorMatrix,
    spb: f64,
    p: &DMatrix<f64>,
    times: &[f64],
) -> Result<Vec<ResidualPoint>> {
    let shifted = a.shifted(-spb);
    times
        .iter()
        .map(|&t| {
            Ok(ResidualPoint {
                t,
                residual: norm_inf(&(expm(&shifted, t)? - p)),
            })
        })
        .collect()
}

/// `‖e^{t(A - spb)} - P‖∞` at each time.
pub fn convergence_trace(
    a: &GeneratorMatrix,
    p: &DMatrix<f64>,
    times: &[f64],
) -> Result<Vec<ResidualPoint>> {
    if p.nrows() != a.dim() || p.ncols() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: p.nrows(),
        });
    }
    check_idempotent(p)?;
    let spb = eig_default(a)?.spectral_bound();
    convergence_trace_at(a, spb, p, times)
}

pub fn trace_csv(trace: &[ResidualPoint]) -> String {
    let mut s = String::from("t,residual\n");
    for p in trace {
        s.push_str(&format!("{},{:e}\n", p.t, p.residual));
    }
    s
}

/// `n + 1` evenly spaced times on `[0, t_end]`.
pub fn linspace(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
}
