//! Eventual positivity of `e^{tA}`: Perron–Frobenius certificates, grid
//! scans with an analytic tail bound, strong positivity relative to a
//! vector, asymptotic-positivity deficits and the pairing condition
//! `⟨φ, e^{tA} f⟩ ≢ 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_default, expm, expm_matrix, null_space, rank_one_projection, spectral_projection, EigenData,
};
use crate::matrix::{max_column_negative_part, max_entry, min_entry, norm_inf, GeneratorMatrix};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    StrictlyPositive,
    NonnegativeWithZeros,
    SignMixed,
}

/// Sign pattern after flipping the vector so its largest-magnitude entry is
/// positive; entries within `STRICT_REL * max|x|` of zero count as zero.
pub fn classify_signs(v: &DVector<f64>) -> SignPattern {
    let k = v.iamax();
    let scale = v[k].abs();
    if scale == 0.0 {
        return SignPattern::NonnegativeWithZeros;
    }
    let s = v[k].signum();
    let tol = tol::STRICT_REL * scale;
    let mut zeros = false;
    for &x in v.iter() {
        let x = x * s;
        if x < -tol {
            return SignPattern::SignMixed;
        }
        if x <= tol {
            zeros = true;
        }
    }
    if zeros {
        SignPattern::NonnegativeWithZeros
    } else {
        SignPattern::StrictlyPositive
    }
}

fn classify_projection(p: &DMatrix<f64>) -> SignPattern {
    let scale = p.amax();
    let tol = tol::STRICT_REL * scale;
    if p.iter().any(|&x| x < -tol) {
        SignPattern::SignMixed
    } else if p.iter().any(|&x| x <= tol) {
        SignPattern::NonnegativeWithZeros
    } else {
        SignPattern::StrictlyPositive
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PfCertificate {
    pub spectral_bound: f64,
    /// `spb(A)` is a real eigenvalue and every other eigenvalue has
    /// strictly smaller real part.
    pub is_real_dominant: bool,
    pub is_simple: bool,
    pub right_vector_positive: SignPattern,
    pub left_vector_positive: SignPattern,
    /// `spb(A) - max Re` over the rest of the spectrum; infinite when the
    /// dominant cluster is the whole spectrum (serialised as `null`).
    pub gap: f64,
    /// Right Perron vector (`‖u‖∞ = 1`), present for a simple real `spb(A)`.
    pub u: Option<Vec<f64>>,
    /// Left Perron vector with `⟨φ, u⟩ = 1`.
    pub phi: Option<Vec<f64>>,
}

impl PfCertificate {
    pub fn has_positive_perron_pair(&self) -> bool {
        self.is_real_dominant
            && self.is_simple
            && self.gap > 0.0
            && self.right_vector_positive == SignPattern::StrictlyPositive
            && self.left_vector_positive == SignPattern::StrictlyPositive
    }
}

/// `spb(A) = max Re λ`.
pub fn spectral_bound(e: &EigenData) -> f64 {
    e.spectral_bound()
}

pub fn pf_certificate(a: &GeneratorMatrix) -> Result<PfCertificate> {
    pf_certificate_with(a, &eig_default(a)?)
}

/// Perron–Frobenius data at `spb(A)`.
///
/// For a multiple (semisimple) dominant eigenvalue the sign patterns
/// describe the spectral projection instead of a single eigenvector.
pub fn pf_certificate_with(a: &GeneratorMatrix, e: &EigenData) -> Result<PfCertificate> {
    let spb = e.spectral_bound();
    let peri = tol::peri_tol(spb);
    let Some(k) = e.spectral_bound_cluster(peri) else {
        // only a non-real pair sits on the peripheral line
        let top = e.cluster_of(0);
        return Ok(PfCertificate {
            spectral_bound: spb,
            is_real_dominant: false,
            is_simple: e.clusters[top].is_simple(),
            right_vector_positive: SignPattern::SignMixed,
            left_vector_positive: SignPattern::SignMixed,
            gap: 0.0,
            u: None,
            phi: None,
        });
    };
    let c = &e.clusters[k];
    if c.defective {
        return Err(Error::Defective {
            eigenvalue: c.center,
            algebraic: c.algebraic,
            geometric: c.geometric,
        });
    }
    let rest = e.max_re_outside(k);
    let gap = match rest {
        None => f64::INFINITY,
        Some(r) if r >= spb - peri => 0.0,
        Some(r) => spb - r,
    };
    let is_real_dominant = gap > 0.0;
    if c.is_simple() {
        let p = rank_one_projection(a, e, k)?;
        Ok(PfCertificate {
            spectral_bound: spb,
            is_real_dominant,
            is_simple: true,
            right_vector_positive: classify_signs(&p.u),
            left_vector_positive: classify_signs(&p.phi),
            gap,
            u: Some(p.u.iter().copied().collect()),
            phi: Some(p.phi.iter().copied().collect()),
        })
    } else {
        let p = spectral_projection(a, e, k)?.map(|z| z.re);
        let pattern = classify_projection(&p);
        Ok(PfCertificate {
            spectral_bound: spb,
            is_real_dominant,
            is_simple: false,
            right_vector_positive: pattern,
            left_vector_positive: pattern,
            gap,
            u: None,
            phi: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityKind {
    EventuallyPositive,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationRoute {
    /// Off-diagonal entries are nonnegative, so `e^{tA} >= 0` for all `t >= 0`.
    Metzler,
    /// Grid samples on `[t0, t_max]` plus the spectral tail bound beyond `T_cert`.
    SpectralTail,
}

/// `‖e^{t(A - spb)} - P‖∞ <= C e^{-g t} + floor` for all `t >= T_cert`, which
/// keeps every entry of `e^{tA}` positive there because
/// `min P > C e^{-g T_cert} + floor`.
#[derive(Debug, Clone, Serialize)]
pub struct TailBound {
    pub t_cert: f64,
    pub c: f64,
    pub g: f64,
    pub min_projection_entry: f64,
    /// Additive allowance for rounding in the computed residual.
    pub floor: f64,
    /// Times at which the bound was re-checked.
    pub verified_at: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// The eigenvector at `spb(A)` has entries of both signs, so no positive
    /// eigenvector exists for the spectral bound.
    SignMixedEigenvector { side: String, vector: Vec<f64> },
    /// `spb(A)` is not an eigenvalue.
    SpectralBoundNotEigenvalue { spectral_bound: f64 },
    /// Negative entry at the end of the window while the dominant projection
    /// has a negative entry of the same sign.
    NegativeEntry {
        t: f64,
        row: usize,
        col: usize,
        value: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub min_entry: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityCertificate {
    pub kind: PositivityKind,
    pub certified_by: Option<CertificationRoute>,
    /// First grid time after which every sample of `e^{tA}` is `>= -entry_tol`.
    pub t0: Option<f64>,
    /// First grid time after which every sample is entrywise `> strict_tol`.
    pub t_strict: Option<f64>,
    pub tail_bound: Option<TailBound>,
    pub trace: Vec<TracePoint>,
    pub refutation_witness: Option<Refutation>,
    pub t_max: f64,
    pub grid_step: f64,
    pub note: Option<String>,
}

impl PositivityCertificate {
    /// `t,min_entry` rows with a header.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("t,min_entry\n");
        for p in &self.trace {
            s.push_str(&format!("{},{:e}\n", p.t, p.min_entry));
        }
        s
    }
}

fn check_grid(t_max: f64, grid_step: f64) -> Result<()> {
    if !(t_max.is_finite() && t_max > 0.0 && grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::Domain(format!(
            "need t_max > 0 and grid_step > 0, got {t_max} and {grid_step}"
        )));
    }
    Ok(())
}

/// `0, h, 2h, ...` up to `t_max`, with `t_max` appended if off-grid.
pub fn time_grid(t_max: f64, grid_step: f64) -> Vec<f64> {
    let n = (t_max / grid_step + 1e-9).floor() as usize;
    let mut g: Vec<f64> = (0..=n).map(|k| k as f64 * grid_step).collect();
    if t_max - g[n] > 1e-9 * grid_step {
        g.push(t_max);
    }
    g
}

/// Index from which `ok` holds through the end.
fn first_persistent(ok: &[bool]) -> Option<usize> {
    let mut start = None;
    for (i, &b) in ok.iter().enumerate().rev() {
        if b {
            start = Some(i);
        } else {
            break;
        }
    }
    start
}

/// `m` log-spaced points in `[lo, hi]`.
fn log_spaced(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..m)
        .map(|k| (a + (b - a) * k as f64 / (m - 1) as f64).exp())
        .collect()
}

fn spectral_tail(
    a: &GeneratorMatrix,
    spb: f64,
    gap: f64,
    p: &DMatrix<f64>,
    samples: &[(f64, DMatrix<f64>)],
    grid_step: f64,
) -> Result<std::result::Result<TailBound, String>> {
    let min_p = min_entry(p);
    if min_p <= 0.0 {
        return Ok(Err("dominant projection is not strictly positive".into()));
    }
    // rounding floor of the computed residual
    let floor = tol::TAIL_FLOOR_REL * norm_inf(p).max(1.0);
    if min_p <= 2.0 * floor {
        return Ok(Err(
            "dominant projection too close to zero for a tail bound".into(),
        ));
    }
    let mut c_est: f64 = 0.0;
    for (t, e) in samples {
        let scaled = e * (-spb * t).exp();
        let r = norm_inf(&(scaled - p));
        if r > floor {
            c_est = c_est.max(r * (gap * t).exp());
        }
    }
    let c = 2.0 * c_est;
    let t_cert = ((c / (min_p - floor)).ln() / gap).max(0.0);
    let lo = t_cert.max(grid_step);
    let shifted = a.shifted(-spb);
    let verified_at = log_spaced(lo, 2.0 * lo, 10);
    for &t in &verified_at {
        let r = norm_inf(&(expm(&shifted, t)? - p));
        // scaling-and-squaring error grows with ‖A‖ t
        let rounding = 1e3 * f64::EPSILON * shifted.norm_inf() * t * norm_inf(p).max(1.0);
        let bound = c * (-gap * t).exp() + floor.max(rounding);
        if r > bound {
            return Ok(Err(format!(
                "tail bound fails at t = {t}: residual {r:e} > {bound:e}"
            )));
        }
    }
    Ok(Ok(TailBound {
        t_cert,
        c,
        g: gap,
        min_projection_entry: min_p,
        floor,
        verified_at,
    }))
}

/// Samples `m(t) = min entry of e^{tA}` on `0, h, 2h, ..., t_max` and
/// certifies or refutes eventual positivity.
///
/// Metzler generators are certified outright with `t0 = 0`. Otherwise
/// `t = 0` never counts as a valid start, since `e^{tA}` has a negative
/// entry for all small `t > 0`.
pub fn eventual_positivity_scan(
    a: &GeneratorMatrix,
    t_max: f64,
    grid_step: f64,
) -> Result<PositivityCertificate> {
    check_grid(t_max, grid_step)?;
    let e = eig_default(a)?;
    let pf = match pf_certificate_with(a, &e) {
        Ok(pf) => Some(pf),
        Err(Error::Defective { .. }) => None,
        Err(err) => return Err(err),
    };
    eventual_positivity_scan_with(a, &e, pf.as_ref(), t_max, grid_step)
}

pub fn eventual_positivity_scan_with(
    a: &GeneratorMatrix,
    e: &EigenData,
    pf: Option<&PfCertificate>,
    t_max: f64,
    grid_step: f64,
) -> Result<PositivityCertificate> {
    check_grid(t_max, grid_step)?;
    let metzler = a.is_metzler(tol::zero_tol(a.norm_inf()));
    let grid = time_grid(t_max, grid_step);
    let mut samples = Vec::with_capacity(grid.len());
    let mut trace = Vec::with_capacity(grid.len());
    let mut ok = Vec::with_capacity(grid.len());
    let mut strict = Vec::with_capacity(grid.len());
    for &t in &grid {
        let et = expm(a, t)?;
        let m = min_entry(&et);
        let entry_tol = tol::ENTRY_REL * norm_inf(&et);
        let at_zero_ok = t > 0.0 || metzler;
        ok.push(at_zero_ok && m >= -entry_tol);
        strict.push(at_zero_ok && m > tol::STRICT_REL * max_entry(&et));
        trace.push(TracePoint { t, min_entry: m });
        samples.push((t, et));
    }
    let t0 = first_persistent(&ok).map(|i| grid[i]);
    let t_strict = first_persistent(&strict).map(|i| grid[i]);
    let mut cert = PositivityCertificate {
        kind: PositivityKind::Inconclusive,
        certified_by: None,
        t0,
        t_strict,
        tail_bound: None,
        trace,
        refutation_witness: None,
        t_max,
        grid_step,
        note: None,
    };

    if metzler {
        cert.kind = PositivityKind::EventuallyPositive;
        cert.certified_by = Some(CertificationRoute::Metzler);
        cert.t0 = Some(0.0);
        return Ok(cert);
    }

    let spb = e.spectral_bound();
    let Some(pf) = pf else {
        cert.note = Some("dominant eigenvalue cluster is defective".into());
        return Ok(cert);
    };
    if e.spectral_bound_cluster(tol::peri_tol(spb)).is_none() {
        cert.kind = PositivityKind::Refuted;
        cert.refutation_witness = Some(Refutation::SpectralBoundNotEigenvalue {
            spectral_bound: spb,
        });
        return Ok(cert);
    }
    if pf.is_simple {
        for (side, pattern, v) in [
            ("right", pf.right_vector_positive, &pf.u),
            ("left", pf.left_vector_positive, &pf.phi),
        ] {
            if pattern == SignPattern::SignMixed {
                cert.kind = PositivityKind::Refuted;
                cert.refutation_witness = Some(Refutation::SignMixedEigenvector {
                    side: side.into(),
                    vector: v.clone().unwrap_or_default(),
                });
                return Ok(cert);
            }
        }
    }

    if pf.has_positive_perron_pair() && pf.gap.is_finite() {
        let u = DVector::from_vec(pf.u.clone().expect("simple"));
        let phi = DVector::from_vec(pf.phi.clone().expect("simple"));
        let p = &u * phi.transpose();
        match spectral_tail(a, spb, pf.gap, &p, &samples, grid_step)? {
            Ok(tail) => {
                if tail.t_cert > t_max {
                    cert.note = Some(format!(
                        "tail bound starts at T_cert = {} beyond t_max = {t_max}",
                        tail.t_cert
                    ));
                    cert.tail_bound = Some(tail);
                } else if cert.t0.is_none() {
                    cert.note =
                        Some("negative sample after T_cert contradicts the tail bound".into());
                    cert.tail_bound = Some(tail);
                } else {
                    cert.kind = PositivityKind::EventuallyPositive;
                    cert.certified_by = Some(CertificationRoute::SpectralTail);
                    cert.tail_bound = Some(tail);
                }
            }
            Err(why) => cert.note = Some(why),
        }
        return Ok(cert);
    }

    // negative entry at t_max with a gap-certified sign
    let last = samples.last().expect("nonempty grid");
    let m_last = min_entry(&last.1);
    if pf.is_simple
        && pf.is_real_dominant
        && pf.gap.is_finite()
        && m_last < -tol::ENTRY_REL * norm_inf(&last.1)
    {
        let u = DVector::from_vec(pf.u.clone().expect("simple"));
        let phi = DVector::from_vec(pf.phi.clone().expect("simple"));
        let p = &u * phi.transpose();
        let (mut row, mut col) = (0, 0);
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                if last.1[(i, j)] < last.1[(row, col)] {
                    row = i;
                    col = j;
                }
            }
        }
        if p[(row, col)] < -tol::STRICT_REL * p.amax() {
            cert.kind = PositivityKind::Refuted;
            cert.refutation_witness = Some(Refutation::NegativeEntry {
                t: last.0,
                row,
                col,
                value: last.1[(row, col)],
            });
            return Ok(cert);
        }
    }
    cert.note = Some(
        "no strictly positive Perron pair with a spectral gap; eventual positivity undecided"
            .into(),
    );
    Ok(cert)
}

/// Smallest sampled `t₁` such that for every sampled `t ∈ [t₁, t_max]` each
/// column of `e^{tA}` dominates `c u` for some `c` with
/// `c ‖u‖∞ >= STRICT_REL * max entry of e^{tA}`.
pub fn strong_positivity_scan(
    a: &GeneratorMatrix,
    u: &DVector<f64>,
    t_max: f64,
    grid_step: f64,
) -> Result<Option<f64>> {
    check_grid(t_max, grid_step)?;
    if u.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: u.len(),
        });
    }
    if u.iter().any(|&x| x < 0.0) || u.iter().all(|&x| x == 0.0) {
        return Err(Error::Domain("u must be nonnegative and nonzero".into()));
    }
    let u_max = u.amax();
    let metzler = a.is_metzler(tol::zero_tol(a.norm_inf()));
    let grid = time_grid(t_max, grid_step);
    let mut ok = Vec::with_capacity(grid.len());
    for &t in &grid {
        let et = expm(a, t)?;
        let entry_tol = tol::ENTRY_REL * norm_inf(&et);
        let need = tol::STRICT_REL * max_entry(&et);
        let good = (t > 0.0 || metzler)
            && et.column_iter().all(|col| {
                let mut c = f64::INFINITY;
                for (x, &ui) in col.iter().zip(u.iter()) {
                    if ui > 0.0 {
                        c = c.min(x / ui);
                    } else if *x < -entry_tol {
                        return false;
                    }
                }
                c * u_max >= need
            });
        ok.push(good);
    }
    Ok(first_persistent(&ok).map(|i| grid[i]))
}

/// `sup { dist₁(e^{t(A - spb)} f, E₊) : f >= 0, ‖f‖₁ = 1 }`, attained at a
/// basis vector: the largest `ℓ1` norm of a column's negative part.
pub fn asymptotic_positivity_deficit(a: &GeneratorMatrix, t: f64) -> Result<f64> {
    let spb = eig_default(a)?.spectral_bound();
    asymptotic_positivity_deficit_at(a, spb, t)
}

pub fn asymptotic_positivity_deficit_at(a: &GeneratorMatrix, spb: f64, t: f64) -> Result<f64> {
    let e = expm(&a.shifted(-spb), t)?;
    Ok(max_column_negative_part(&e))
}

fn check_positive_vector(v: &DVector<f64>, name: &str, d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Domain(format!(
            "{name} must be entrywise nonnegative"
        )));
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::Domain(format!("{name} must be nonzero")));
    }
    Ok(())
}

/// `true` iff `t ↦ ⟨φ, e^{tA} f⟩` is not identically zero, i.e. some Krylov
/// pairing `φᵀ A^k f`, `k < d`, is nonzero.
pub fn weak_condition_check(
    a: &GeneratorMatrix,
    f: &DVector<f64>,
    phi: &DVector<f64>,
) -> Result<bool> {
    let d = a.dim();
    check_positive_vector(f, "f", d)?;
    check_positive_vector(phi, "phi", d)?;
    Ok(krylov_pairing_nonzero(a.matrix(), f, phi))
}

fn krylov_pairing_nonzero(a: &DMatrix<f64>, f: &DVector<f64>, phi: &DVector<f64>) -> bool {
    let scale = norm_inf(a);
    let phi_n = phi / phi.lp_norm(1);
    let mut v = f / f.amax();
    for k in 0..a.nrows() {
        if phi_n.dot(&v).abs() > tol::PAIRING_REL {
            return true;
        }
        if k + 1 < a.nrows() {
            if scale == 0.0 {
                break;
            }
            v = a * v / scale;
        }
    }
    false
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakViolation {
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
    /// Which candidate family produced it.
    pub route: String,
}

/// Extreme rays of `{x >= 0 : M x = 0}`: for each support `S` (increasing
/// size, at most `max_support`), a one-dimensional `ker M[:, S]` spanned by
/// a vector with one strict sign on `S`.
fn nonnegative_null_vectors(
    m: &DMatrix<f64>,
    max_support: usize,
    limit: usize,
) -> Result<Vec<DVector<f64>>> {
    let d = m.ncols();
    let null_tol = tol::NULL_REL * norm_inf(m).max(1.0);
    let mut out: Vec<DVector<f64>> = Vec::new();
    let mut masks: Vec<u32> = (1..(1u32 << d)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        if mask.count_ones() as usize > max_support || out.len() >= limit {
            break;
        }
        // skip supersets of a found support: not extreme
        if out.iter().any(|v| {
            let s: u32 = (0..d).filter(|&i| v[i] != 0.0).map(|i| 1u32 << i).sum();
            s & mask == s
        }) {
            continue;
        }
        let cols: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        let sub = DMatrix::from_fn(m.nrows().max(1), cols.len(), |i, j| {
            if m.nrows() == 0 {
                0.0
            } else {
                m[(i, cols[j])]
            }
        });
        let (vs, nullity) = null_space(sub, 1, null_tol)?;
        if nullity != 1 {
            continue;
        }
        let w = &vs[0];
        let s = w[w.iamax()].signum();
        let w = w * s;
        let tiny = tol::STRICT_REL * w.amax();
        if w.iter().all(|&x| x > tiny) {
            let mut v = DVector::zeros(d);
            for (k, &c) in cols.iter().enumerate() {
                v[c] = w[k];
            }
            out.push(v / w.amax());
        }
    }
    Ok(out)
}

/// Krylov matrix `[f, Af, ..., A^{d-1} f]` with columns normalised.
fn krylov_matrix(a: &DMatrix<f64>, f: &DVector<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let mut cols = Vec::with_capacity(d);
    let mut v = f.clone();
    for _ in 0..d {
        let n = v.amax();
        if n == 0.0 {
            break;
        }
        v /= n;
        cols.push(v.clone());
        v = a * &v;
    }
    DMatrix::from_columns(&cols)
}

/// Searches for `0 ⪇ f`, `0 ⪇ φ` with `⟨φ, e^{tA} f⟩ = 0` for all `t`.
///
/// Candidates, in order: nonnegative kernel vectors of `A` paired with
/// nonnegative kernel vectors of `Aᵀ`; pairs of basis vectors; basis and
/// kernel vectors `f` paired with nonnegative vectors orthogonal to their
/// Krylov space. Every hit is re-checked with [`weak_condition_check`].
/// `None` means no violation was found, not that none exists.
pub fn weak_condition_search(a: &GeneratorMatrix, cap: usize) -> Result<Option<WeakViolation>> {
    let d = a.dim();
    if d > cap || d > 31 {
        return Err(Error::Capacity { dim: d, cap });
    }
    let m = a.matrix();
    let verified =
        |f: &DVector<f64>, phi: &DVector<f64>, route: &str| -> Result<Option<WeakViolation>> {
            if !weak_condition_check(a, f, phi)? {
                Ok(Some(WeakViolation {
                    f: f.iter().copied().collect(),
                    phi: phi.iter().copied().collect(),
                    route: route.into(),
                }))
            } else {
                Ok(None)
            }
        };

    let ker_a = nonnegative_null_vectors(m, d, 4 * d)?;
    let ker_at = nonnegative_null_vectors(&m.transpose(), d, 4 * d)?;
    for f in &ker_a {
        for phi in &ker_at {
            if let Some(v) = verified(f, phi, "kernel pair")? {
                return Ok(Some(v));
            }
        }
    }

    for j in 0..d {
        for i in 0..d {
            let f = DVector::from_fn(d, |k, _| if k == j { 1.0 } else { 0.0 });
            let phi = DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
            if let Some(v) = verified(&f, &phi, "basis pair")? {
                return Ok(Some(v));
            }
        }
    }

    let basis = (0..d).map(|j| DVector::from_fn(d, |k, _| if k == j { 1.0 } else { 0.0 }));
    let candidates: Vec<DVector<f64>> = ker_a.iter().cloned().chain(basis).collect();
    for f in &candidates {
        let k = krylov_matrix(m, f);
        for phi in nonnegative_null_vectors(&k.transpose(), d, 2 * d)? {
            if let Some(v) = verified(f, &phi, "krylov complement")? {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Entrywise `e^{tA} >= -ENTRY_REL ‖e^{tA}‖∞` at one time.
pub fn is_positive_at(a: &DMatrix<f64>, t: f64) -> Result<bool> {
    let e = expm_matrix(a, t)?;
    Ok(min_entry(&e) >= -tol::ENTRY_REL * norm_inf(&e))
}
