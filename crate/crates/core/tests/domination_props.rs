use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgspec::casestudies::{a1, counterexample_s2, random_dense, random_metzler};
use sgspec::domination::{asymptotic_domination_check, domination_deficit, Dominated};
use sgspec::structure::{irreducibility_report, IrreducibilityOptions};
use sgspec::GeneratorMatrix;

fn perturbation(d: usize, seed: u64) -> GeneratorMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let density = r.gen_range(0.1..1.0);
    let n = nalgebra::DMatrix::from_fn(d, d, |_, _| {
        if r.gen::<f64>() < density {
            r.gen_range(0.0..1.0)
        } else {
            0.0
        }
    });
    GeneratorMatrix::from_matrix(n, None).unwrap()
}

/// Irreducible random Metzler `A` and `B = A + N` with `N >= 0`.
fn dominated_pair(seed: u64) -> (GeneratorMatrix, GeneratorMatrix) {
    let mut s = seed;
    loop {
        let d = 2 + (s as usize % 7);
        let a = random_metzler(d, 0.6, s).unwrap();
        if irreducibility_report(&a, &IrreducibilityOptions::default())
            .unwrap()
            .verdict
        {
            let n = perturbation(d, s.wrapping_mul(31).wrapping_add(7));
            let b = GeneratorMatrix::from_matrix(a.matrix() + n.matrix(), None).unwrap();
            return (a, b);
        }
        s += 1_000_003;
    }
}

#[test]
fn metzler_perturbations_are_dominated() {
    for seed in 0..200u64 {
        let (a, b) = dominated_pair(seed);
        let r = asymptotic_domination_check(&a, &b, 20.0, 0.25).unwrap();
        assert_eq!(r.dominated, Dominated::CertifiedZero, "seed {seed}");
        assert!(
            r.sb_inequality_holds,
            "seed {seed}: {} > {}",
            r.sb_a, r.sb_b
        );
        assert!(
            r.boundary_inclusion_holds,
            "seed {seed}: {:?}",
            r.boundary_details
        );
        assert!(r.deficit_trace.iter().all(|p| p.deficit >= 0.0));
    }
}

#[test]
fn reflexive() {
    let mut cases = vec![a1(), counterexample_s2().generator];
    cases.extend((0..30).map(|s| random_dense(2 + s as usize % 6, 2.0, s)));
    for a in &cases {
        let r = asymptotic_domination_check(a, a, 10.0, 0.25).unwrap();
        assert_eq!(r.dominated, Dominated::CertifiedZero);
        assert!(r.sb_inequality_holds && r.boundary_inclusion_holds);
    }
}

#[test]
fn zero_on_grid_is_zero_off_grid() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let (a, b) = dominated_pair(seed);
        let r = asymptotic_domination_check(&a, &b, 10.0, 0.5).unwrap();
        if !r.deficit_trace.iter().all(|p| p.deficit == 0.0) {
            continue;
        }
        checked += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let t = rng.gen_range(0.0..10.0);
            assert_eq!(
                domination_deficit(&a, &b, t).unwrap(),
                0.0,
                "seed {seed} t {t}"
            );
        }
    }
    assert!(checked >= 20, "{checked}");
}
