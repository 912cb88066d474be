//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 and 13 (Higham 2005). Degree and
//! scaling are selected from the 1-norm of `tA`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{norm_inf, GeneratorMatrix};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(V - U)^{-1} (V + U)`.
fn pade_solve(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Singular("Padé denominator".into()))
}

fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let a2 = a * a;
    let mut power = DMatrix::identity(d, d);
    let mut u_even = DMatrix::zeros(d, d);
    let mut v = DMatrix::zeros(d, d);
    for k in 0..b.len() / 2 {
        v += &power * b[2 * k];
        u_even += &power * b[2 * k + 1];
        power = &power * &a2;
    }
    pade_solve(a * u_even, v)
}

fn pade_13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + id * b[0];
    pade_solve(u, v)
}

/// Padé approximant of `e^{a / 2^s}` together with `s`.
fn scaled_pade(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, u32)> {
    let n1 = norm_1(a);
    for (m, theta) in THETA {
        if n1 <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return Ok((pade_low(a, b)?, 0));
        }
    }
    let s = (n1 / THETA_13).log2().ceil().max(0.0) as u32;
    let scaled = a * 2f64.powi(-(s as i32));
    Ok((pade_13(&scaled)?, s))
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// `e^{tA}` for a raw matrix.
pub fn expm_matrix(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    check_time(t)?;
    let ta = a * t;
    let (mut r, s) = scaled_pade(&ta).map_err(|_| Error::Overflow { t })?;
    for _ in 0..s {
        r = &r * &r;
        if !r.iter().all(|x| x.is_finite()) {
            return Err(Error::Overflow { t });
        }
    }
    if !r.iter().all(|x| x.is_finite()) {
        return Err(Error::Overflow { t });
    }
    Ok(r)
}

/// `e^{tA}` to roughly unit-roundoff relative accuracy for well-conditioned `A`.
///
/// Returns [`Error::Overflow`] instead of infinite entries.
pub fn expm(a: &GeneratorMatrix, t: f64) -> Result<DMatrix<f64>> {
    expm_matrix(a.matrix(), t)
}

/// `e^{tA} = e^{log_scale} · normalized` with `‖normalized‖∞ = 1`.
#[derive(Debug, Clone)]
pub struct LogScaled {
    pub normalized: DMatrix<f64>,
    pub log_scale: f64,
}

/// Same as [`expm`], but renormalises after every squaring so the result
/// never overflows; `ln ‖e^{tA}‖∞` is `log_scale`.
pub fn expm_log_scaled(a: &GeneratorMatrix, t: f64) -> Result<LogScaled> {
    check_time(t)?;
    let ta = a.matrix() * t;
    let (mut r, s) = scaled_pade(&ta).map_err(|_| Error::Overflow { t })?;
    let mut log_scale = 0.0;
    let c = norm_inf(&r);
    r /= c;
    log_scale += c.ln();
    for _ in 0..s {
        r = &r * &r;
        let c = norm_inf(&r);
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Overflow { t });
        }
        r /= c;
        log_scale = 2.0 * log_scale + c.ln();
    }
    Ok(LogScaled {
        normalized: r,
        log_scale,
    })
}
