//! Default numerical thresholds.
//!
//! Relative thresholds are multiplied by a scale (usually `‖A‖∞`) at the
//! point of use. All matrix norms are max-row-sum norms.

/// Eigenvalues closer than `CLUSTER_REL * ‖A‖∞` are treated as equal.
pub const CLUSTER_REL: f64 = 1e-8;
/// Entries with `|a_ij| <= ZERO_REL * ‖A‖∞` are structural zeros.
pub const ZERO_REL: f64 = 1e-12;
/// An entry of `e^{tA}` counts as nonnegative above `-ENTRY_REL * ‖e^{tA}‖∞`.
pub const ENTRY_REL: f64 = 1e-10;
/// An entry counts as strictly positive above `STRICT_REL * max entry`.
pub const STRICT_REL: f64 = 1e-8;
/// Peripheral band: `Re λ >= spb - PERI_REL * (1 + |spb|)`.
pub const PERI_REL: f64 = 1e-8;
/// Eigenpair residual bound relative to `‖A‖∞`.
pub const RESIDUAL_REL: f64 = 1e-8;
/// Minimal distance of a resolvent point to the spectrum, relative to `max(‖A‖∞, 1)`.
pub const RESOLVENT_REL: f64 = 1e-10;
/// Singular values below `NULL_REL * max(‖A‖∞, 1)` span a null space.
pub const NULL_REL: f64 = 1e-7;
/// Ideal invariance under sampled `e^{tA}`: entries below `IDEAL_REL * ‖e^{tA}‖∞` vanish.
pub const IDEAL_REL: f64 = 1e-11;
/// Krylov pairings below `PAIRING_REL` (after normalisation) vanish.
pub const PAIRING_REL: f64 = 1e-12;
/// Domination deficits at or below `CERTIFIED_ZERO_REL * scale` count as zero.
pub const CERTIFIED_ZERO_REL: f64 = 1e-12;
/// Deficit tolerance for the decaying/refuted split.
pub const DEFICIT_REL: f64 = 1e-8;
/// Rounding allowance, relative to `‖P‖∞`, in spectral tail bounds.
pub const TAIL_FLOOR_REL: f64 = 1e-10;
/// Brute-force enumeration cap on the dimension.
pub const BRUTE_FORCE_CAP: usize = 16;

pub fn cluster_tol(norm: f64) -> f64 {
    CLUSTER_REL * norm
}

pub fn zero_tol(norm: f64) -> f64 {
    ZERO_REL * norm
}

pub fn peri_tol(spb: f64) -> f64 {
    PERI_REL * (1.0 + spb.abs())
}

/// Brute-force cap, overridable through `SGSPEC_BRUTE_CAP`.
pub fn brute_force_cap() -> usize {
    std::env::var("SGSPEC_BRUTE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(BRUTE_FORCE_CAP)
}
