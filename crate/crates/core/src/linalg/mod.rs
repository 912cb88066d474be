//! Dense kernel: matrix exponential, eigendecomposition, resolvent and
//! spectral projections.

mod eigen;
mod expm;
mod resolvent;

pub use eigen::{eig, eig_default, null_space, Cluster, EigenData};
pub use expm::{expm, expm_log_scaled, expm_matrix, LogScaled};
pub use resolvent::{
    rank_one_projection, resolvent, resolvent_with, spectral_projection, RankOneProjection,
};

use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;

pub(crate) fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| Complex::new(x, 0.0))
}

/// Real part, checking that the imaginary part is negligible.
pub fn real_part(m: &DMatrix<C64>) -> (DMatrix<f64>, f64) {
    let max_im = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (m.map(|z| z.re), max_im)
}
