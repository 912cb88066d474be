//! Uniform asymptotic domination of `e^{tA}` by `e^{tB}` after rescaling
//! both by `spb(B)`, with the spectral consequences it forces.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_default, expm, EigenData};
use crate::matrix::{norm_inf, GeneratorMatrix};
use crate::positivity::time_grid;
use crate::tol;

fn same_dim(a: &GeneratorMatrix, b: &GeneratorMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `e^{t(B - s)} - e^{t(A - s)}`.
fn difference(
    a: &GeneratorMatrix,
    b: &GeneratorMatrix,
    s: f64,
    t: f64,
) -> Result<(DMatrix<f64>, f64)> {
    let eb = expm(&b.shifted(-s), t)?;
    let ea = expm(&a.shifted(-s), t)?;
    let scale = norm_inf(&eb).max(norm_inf(&ea)).max(1.0);
    Ok((eb - ea, scale))
}

fn column_deficit(d: &DMatrix<f64>) -> f64 {
    d.column_iter()
        .map(|c| c.iter().map(|&x| (-x).max(0.0)).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest ℓ1 norm of the negative part of `(e^{t(B-s)} - e^{t(A-s)}) f`
/// over positive `f` with `‖f‖₁ = 1`, where `s = spb(B)`. The sup is
/// attained at a unit vector, i.e. a column.
pub fn domination_deficit(a: &GeneratorMatrix, b: &GeneratorMatrix, t: f64) -> Result<f64> {
    same_dim(a, b)?;
    let s = eig_default(b)?.spectral_bound();
    Ok(column_deficit(&difference(a, b, s, t)?.0))
}

/// Deficit for a single positive `f`, relative to `‖f‖₁`.
pub fn domination_deficit_for(
    a: &GeneratorMatrix,
    b: &GeneratorMatrix,
    f: &[f64],
    t: f64,
) -> Result<f64> {
    same_dim(a, b)?;
    if f.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: f.len(),
        });
    }
    if f.iter().any(|&x| x < 0.0) || f.iter().all(|&x| x == 0.0) {
        return Err(Error::Domain("f must be positive and non-zero".into()));
    }
    let s = eig_default(b)?.spectral_bound();
    let fv = DVector::from_row_slice(f);
    let g = difference(a, b, s, t)?.0 * &fv;
    Ok(g.iter().map(|&x| (-x).max(0.0)).sum::<f64>() / fv.lp_norm(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominated {
    CertifiedZero,
    Decaying,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeficitPoint {
    pub t: f64,
    pub deficit: f64,
    /// `max(‖e^{t(A-s)}‖∞, ‖e^{t(B-s)}‖∞, 1)`.
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryMatch {
    pub eigenvalue: [f64; 2],
    pub nearest: Option<[f64; 2]>,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub deficit_trace: Vec<DeficitPoint>,
    pub dominated: Dominated,
    #[serde(rename = "sb_A")]
    pub sb_a: f64,
    #[serde(rename = "sb_B")]
    pub sb_b: f64,
    pub sb_inequality_holds: bool,
    pub boundary_inclusion_holds: bool,
    pub boundary_details: Vec<BoundaryMatch>,
    /// Sampled window `[first, last]`; shorter than requested when the
    /// exponential overflowed.
    pub window: [f64; 2],
    pub f: Option<Vec<f64>>,
}

impl DominationReport {
    pub fn deficit_csv(&self) -> String {
        let mut s = String::from("t,deficit\n");
        for p in &self.deficit_trace {
            s.push_str(&format!("{},{:e}\n", p.t, p.deficit));
        }
        s
    }
}

/// Eigenvalues of `A` on `spb(B) + iℝ`, each paired with the nearest
/// peripheral eigenvalue of `B`.
pub fn boundary_inclusion(ea: &EigenData, eb: &EigenData) -> (bool, Vec<BoundaryMatch>) {
    let sb = eb.spectral_bound();
    let band = tol::peri_tol(sb);
    let per_b: Vec<_> = eb
        .eigenvalues
        .iter()
        .filter(|z| z.re >= sb - band)
        .collect();
    let mut ok = true;
    let details = ea
        .eigenvalues
        .iter()
        .filter(|z| (z.re - sb).abs() <= band)
        .map(|z| {
            let nearest = per_b
                .iter()
                .map(|w| (**w, (*z - **w).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            let distance = nearest.map_or(f64::INFINITY, |n| n.1);
            ok &= distance <= band;
            BoundaryMatch {
                eigenvalue: [z.re, z.im],
                nearest: nearest.map(|n| [n.0.re, n.0.im]),
                distance,
            }
        })
        .collect();
    (ok, details)
}

pub fn asymptotic_domination_check(
    a: &GeneratorMatrix,
    b: &GeneratorMatrix,
    t_max: f64,
    grid_step: f64,
) -> Result<DominationReport> {
    domination_check(a, b, None, t_max, grid_step)
}

/// As [`asymptotic_domination_check`] with the uniform deficit replaced by
/// the per-`f` deficit when `f` is given.
pub fn domination_check(
    a: &GeneratorMatrix,
    b: &GeneratorMatrix,
    f: Option<&[f64]>,
    t_max: f64,
    grid_step: f64,
) -> Result<DominationReport> {
    same_dim(a, b)?;
    if !(t_max > 0.0 && grid_step > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!(
            "need t_max > 0 and grid_step > 0, got {t_max} and {grid_step}"
        )));
    }
    let ea = eig_default(a)?;
    let eb = eig_default(b)?;
    let (sb_a, sb_b) = (ea.spectral_bound(), eb.spectral_bound());
    let fv = match f {
        Some(f) => {
            if f.len() != a.dim() {
                return Err(Error::DimensionMismatch {
                    left: a.dim(),
                    right: f.len(),
                });
            }
            if f.iter().any(|&x| x < 0.0) || f.iter().all(|&x| x == 0.0) {
                return Err(Error::Domain("f must be positive and non-zero".into()));
            }
            Some(DVector::from_row_slice(f))
        }
        None => None,
    };

    let mut trace = Vec::new();
    for t in time_grid(t_max, grid_step) {
        let (d, scale) = match difference(a, b, sb_b, t) {
            Ok(x) => x,
            Err(Error::Overflow { .. }) => break,
            Err(e) => return Err(e),
        };
        let deficit = match &fv {
            None => column_deficit(&d),
            Some(f) => (d * f).iter().map(|&x| (-x).max(0.0)).sum::<f64>() / f.lp_norm(1),
        };
        trace.push(DeficitPoint { t, deficit, scale });
    }
    if trace.is_empty() {
        return Err(Error::Overflow { t: 0.0 });
    }

    let sb_inequality_holds = sb_a <= sb_b + 1e-10;
    let (boundary_inclusion_holds, boundary_details) = boundary_inclusion(&ea, &eb);
    let dominated = verdict(&trace, sb_inequality_holds);
    Ok(DominationReport {
        window: [trace[0].t, trace[trace.len() - 1].t],
        deficit_trace: trace,
        dominated,
        sb_a,
        sb_b,
        sb_inequality_holds,
        boundary_inclusion_holds,
        boundary_details,
        f: f.map(|f| f.to_vec()),
    })
}

fn verdict(trace: &[DeficitPoint], sb_inequality_holds: bool) -> Dominated {
    if trace
        .iter()
        .all(|p| p.deficit <= tol::CERTIFIED_ZERO_REL * p.scale)
    {
        return Dominated::CertifiedZero;
    }
    let n = trace.len();
    let tail = &trace[n - (n / 3).max(1)..];
    let deficit_tol = |p: &DeficitPoint| tol::DEFICIT_REL * p.scale;
    let monotone = tail.windows(2).all(|w| w[1].deficit <= w[0].deficit);
    let last = &tail[tail.len() - 1];
    if monotone && last.deficit <= deficit_tol(last) {
        return Dominated::Decaying;
    }
    let bounded_away = tail.iter().all(|p| p.deficit > 10.0 * deficit_tol(p));
    let not_decaying = tail[tail.len() - 1].deficit >= 0.5 * tail[0].deficit;
    if bounded_away && (!sb_inequality_holds || not_decaying) {
        return Dominated::Refuted;
    }
    Dominated::Inconclusive
}
