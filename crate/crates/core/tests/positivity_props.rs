use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgspec::casestudies::{
    random_dense, random_eventually_positive, random_metzler, random_sparse, random_symmetric,
};
use sgspec::linalg::expm;
use sgspec::matrix::norm_inf;
use sgspec::positivity::{
    asymptotic_positivity_deficit_at, eventual_positivity_scan, pf_certificate,
    weak_condition_check, PositivityKind, SignPattern,
};
use sgspec::{tol, GeneratorMatrix};

const T_MAX: f64 = 20.0;
const STEP: f64 = 0.1;

#[test]
fn metzler_iff_t0_zero() {
    for seed in 0..200u64 {
        let d = 2 + (seed as usize % 5);
        let a = match seed % 4 {
            0 | 1 => random_metzler(d, 0.5, seed).unwrap(),
            2 => random_dense(d, 2.0, seed),
            _ => random_eventually_positive(d, seed).unwrap(),
        };
        let metzler = a.is_metzler(tol::zero_tol(a.norm_inf()));
        let cert = eventual_positivity_scan(&a, T_MAX, STEP).unwrap();
        assert_eq!(
            metzler,
            cert.t0 == Some(0.0),
            "seed {seed}: t0 = {:?}",
            cert.t0
        );
    }
}

fn nonnegative(p: SignPattern) -> bool {
    p != SignPattern::SignMixed
}

#[test]
fn pf_consistency_on_symmetric_matrices() {
    let (mut positive, mut refuted) = (0, 0);
    for seed in 0..200u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let d = r.gen_range(2..=6);
        let s = random_symmetric(d, 1.0, seed);
        let c = r.gen_range(0.0..1.5);
        let a = GeneratorMatrix::from_matrix(s.matrix() + DMatrix::from_element(d, d, c), None)
            .unwrap();
        let pf = pf_certificate(&a).unwrap();
        let cert = eventual_positivity_scan(&a, T_MAX, STEP).unwrap();
        if cert.kind == PositivityKind::EventuallyPositive {
            positive += 1;
            assert!(pf.is_real_dominant && pf.is_simple, "seed {seed}");
            assert!(
                nonnegative(pf.right_vector_positive) && nonnegative(pf.left_vector_positive),
                "seed {seed}"
            );
        }
        if pf.is_simple && pf.right_vector_positive == SignPattern::SignMixed {
            refuted += 1;
            assert_eq!(cert.kind, PositivityKind::Refuted, "seed {seed}");
        }
    }
    assert!(
        positive >= 20 && refuted >= 20,
        "{positive} certified, {refuted} refuted"
    );
}

#[test]
fn certified_semigroups_have_vanishing_deficit() {
    let mut certified = 0;
    for seed in 0..60u64 {
        let d = 2 + (seed as usize % 5);
        let a = if seed % 2 == 0 {
            random_eventually_positive(d, seed).unwrap()
        } else {
            random_metzler(d, 0.7, seed).unwrap()
        };
        let cert = eventual_positivity_scan(&a, T_MAX, STEP).unwrap();
        if cert.kind != PositivityKind::EventuallyPositive {
            continue;
        }
        certified += 1;
        let t0 = cert.t0.unwrap();
        let spb = sgspec::positivity::spectral_bound(&sgspec::linalg::eig_default(&a).unwrap());
        for p in cert.trace.iter().filter(|p| p.t >= t0) {
            let scaled = expm(&a.shifted(-spb), p.t).unwrap();
            let entry_tol = tol::ENTRY_REL * norm_inf(&scaled);
            let deficit = asymptotic_positivity_deficit_at(&a, spb, p.t).unwrap();
            // a column has at most d entries, each above -entry_tol
            assert!(
                deficit <= d as f64 * entry_tol,
                "seed {seed} t {}: {deficit}",
                p.t
            );
        }
    }
    assert!(certified >= 40);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weak_condition_shift_invariant(d in 2usize..=6, seed in any::<u64>()) {
        let a = random_sparse(d, 2.0, 0.7, seed);
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut sparse_vec = || {
            let mut v = DVector::from_fn(d, |_, _| if r.gen::<f64>() < 0.4 { r.gen_range(0.1..1.0) } else { 0.0 });
            let k = r.gen_range(0..d);
            v[k] = 1.0;
            v
        };
        let (f, phi) = (sparse_vec(), sparse_vec());
        let base = weak_condition_check(&a, &f, &phi).unwrap();
        for c in [-1.0, 1.0, 10.0] {
            prop_assert_eq!(weak_condition_check(&a.shifted(c), &f, &phi).unwrap(), base, "c = {}", c);
        }
    }
}

#[test]
fn weak_condition_both_outcomes_occur() {
    let (mut holds, mut fails) = (0, 0);
    for seed in 0..200u64 {
        let d = 2 + (seed as usize % 5);
        let a = random_sparse(d, 2.0, 0.7, seed);
        let e = |k: usize| DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 });
        let (f, phi) = (e(seed as usize % d), e((seed as usize / 7) % d));
        if weak_condition_check(&a, &f, &phi).unwrap() {
            holds += 1;
        } else {
            fails += 1;
        }
    }
    assert!(holds > 20 && fails > 20, "{holds} {fails}");
}
