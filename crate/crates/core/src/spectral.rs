//! Peripheral spectrum, dominance, pole order at the spectral bound and a
//! growth-bound estimate from `‖e^{TA}‖∞`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_default, expm_log_scaled, null_space, rank_one_projection, EigenData, C64,
};
use crate::matrix::GeneratorMatrix;
use crate::positivity::{classify_signs, SignPattern};
use crate::tol;

#[derive(Debug, Clone, Serialize)]
pub struct PeripheralReport {
    pub spb: f64,
    #[serde(with = "crate::serde_complex::vec")]
    pub peripheral: Vec<C64>,
    pub is_dominant: bool,
    /// Step of the progression `spb + iαℤ` fitted to the peripheral
    /// imaginary parts; `0` when all peripheral members are real.
    pub alpha: Option<f64>,
    /// Largest distance of a peripheral imaginary part to `αℤ`.
    pub alpha_residual: f64,
    /// `spb - max Re` outside the peripheral set; infinite if none.
    pub gap: f64,
}

const ALPHA_DIVISORS: usize = 12;

/// Largest `α` such that every value lies within `tol` of `αℤ`. Candidate
/// steps are consecutive gaps of the sorted values and the absolute values
/// themselves, each divided by `1..=12`. If no candidate fits, returns the
/// one with the smallest residual. `(0, 0)` for all-zero input.
pub fn fit_alpha(values: &[f64], tol: f64) -> (f64, f64) {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let nonzero: Vec<f64> = sorted.iter().copied().filter(|x| x.abs() > tol).collect();
    if nonzero.is_empty() {
        return (0.0, sorted.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }
    let mut bases: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    bases.extend(nonzero.iter().map(|x| x.abs()));
    let mut candidates: Vec<f64> = bases
        .iter()
        .filter(|&&b| b > tol)
        .flat_map(|&b| (1..=ALPHA_DIVISORS).map(move |k| b / k as f64))
        .collect();
    candidates.sort_by(|a, b| b.total_cmp(a));
    let residual = |alpha: f64| {
        values
            .iter()
            .map(|&x| (x - alpha * (x / alpha).round()).abs())
            .fold(0.0, f64::max)
    };
    let mut best = (candidates[0], residual(candidates[0]));
    for &c in &candidates {
        let r = residual(c);
        if r <= tol {
            return (c, r);
        }
        if r < best.1 {
            best = (c, r);
        }
    }
    best
}

pub fn peripheral_report(e: &EigenData, peri_tol: f64) -> PeripheralReport {
    let spb = e.spectral_bound();
    let idx: Vec<usize> = (0..e.eigenvalues.len())
        .filter(|&i| e.eigenvalues[i].re >= spb - peri_tol)
        .collect();
    let peripheral: Vec<C64> = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let clusters: std::collections::BTreeSet<usize> =
        idx.iter().map(|&i| e.cluster_of(i)).collect();
    let is_dominant =
        clusters.len() == 1 && e.clusters[*clusters.iter().next().expect("nonempty")].is_real();
    let gap = e
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| !idx.contains(i))
        .map(|(_, z)| spb - z.re)
        .reduce(f64::min)
        .unwrap_or(f64::INFINITY);
    let imag: Vec<f64> = peripheral.iter().map(|z| z.im).collect();
    let fit_tol = 1e-6 * (1.0 + imag.iter().map(|x| x.abs()).fold(0.0, f64::max));
    let (alpha, alpha_residual) = fit_alpha(&imag, fit_tol.max(e.cluster_tol));
    PeripheralReport {
        spb,
        peripheral,
        is_dominant,
        alpha: Some(alpha),
        alpha_residual,
        gap,
    }
}

pub fn peripheral_report_default(e: &EigenData) -> PeripheralReport {
    peripheral_report(e, tol::peri_tol(e.spectral_bound()))
}

/// `spb(A)` is a dominant spectral value: the peripheral spectrum is the
/// single real cluster at `spb(A)`.
pub fn dominance_check(e: &EigenData) -> bool {
    peripheral_report_default(e).is_dominant
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleData {
    pub spb: f64,
    /// Size of the largest Jordan block at `spb(A)`.
    pub pole_order: usize,
    /// Algebraic multiplicity of `spb(A)`.
    pub projection_rank: usize,
    pub u: Option<Vec<f64>>,
    pub phi: Option<Vec<f64>>,
    pub u_positivity: Option<SignPattern>,
    pub phi_positivity: Option<SignPattern>,
}

/// Smallest `k` with `dim ker (A - λ)^k = m`.
fn jordan_index(a: &DMatrix<f64>, lambda: f64, m: usize, scale: f64) -> Result<usize> {
    let d = a.nrows();
    let shifted = a - DMatrix::identity(d, d) * lambda;
    let base = (scale + lambda.abs()).max(1.0);
    let mut power = DMatrix::identity(d, d);
    for k in 1..=m {
        power = &power * &shifted;
        let tol = tol::NULL_REL * base.powi(k as i32);
        let (_, nullity) = null_space(power.clone(), 0, tol)?;
        if nullity >= m {
            return Ok(k);
        }
    }
    Ok(m)
}

pub fn pole_data(a: &GeneratorMatrix) -> Result<PoleData> {
    pole_data_with(a, &eig_default(a)?)
}

/// Pole order and spectral-projection data of the resolvent at `spb(A)`.
pub fn pole_data_with(a: &GeneratorMatrix, e: &EigenData) -> Result<PoleData> {
    let spb = e.spectral_bound();
    let k = e
        .spectral_bound_cluster(tol::peri_tol(spb))
        .ok_or(Error::SpectralBoundNotEigenvalue { spb })?;
    let c = &e.clusters[k];
    if let Some(sep) = e.separation(k) {
        if sep <= e.cluster_tol {
            return Err(Error::NotSeparated {
                eigenvalue: c.center,
                gap: sep,
            });
        }
    }
    let pole_order = if c.defective {
        jordan_index(a.matrix(), c.center.re, c.algebraic, e.norm)?
    } else {
        1
    };
    let mut data = PoleData {
        spb,
        pole_order,
        projection_rank: c.algebraic,
        u: None,
        phi: None,
        u_positivity: None,
        phi_positivity: None,
    };
    if c.algebraic == 1 {
        let p = rank_one_projection(a, e, k)?;
        data.u_positivity = Some(classify_signs(&p.u));
        data.phi_positivity = Some(classify_signs(&p.phi));
        data.u = Some(p.u.iter().copied().collect());
        data.phi = Some(p.phi.iter().copied().collect());
    }
    Ok(data)
}

/// `ln ‖e^{TA}‖∞ / T`.
pub fn growth_bound_estimate(a: &GeneratorMatrix, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("T must be positive, got {t}")));
    }
    let ls = expm_log_scaled(a, t)?;
    let v = ls.log_scale / t;
    if !v.is_finite() {
        return Err(Error::Overflow { t });
    }
    Ok(v)
}

/// Block-diagonal matrix with the given rotation frequencies and real
/// eigenvalues.
pub fn block_spectrum(frequencies: &[f64], reals: &[f64]) -> GeneratorMatrix {
    let d = 2 * frequencies.len() + reals.len();
    let mut m = DMatrix::zeros(d, d);
    for (k, &w) in frequencies.iter().enumerate() {
        m[(2 * k, 2 * k + 1)] = -w;
        m[(2 * k + 1, 2 * k)] = w;
    }
    for (k, &r) in reals.iter().enumerate() {
        let i = 2 * frequencies.len() + k;
        m[(i, i)] = r;
    }
    GeneratorMatrix::from_matrix(m, None).expect("finite entries")
}
