//! Acceptance criteria 1-8. Prints one line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgspec::asymptotics::{linspace, rank_one_limit};
use sgspec::casestudies::{self, random_dense, random_metzler, random_sparse};
use sgspec::domination::{asymptotic_domination_check, Dominated};
use sgspec::linalg::{eig_default, expm, resolvent_with, spectral_projection};
use sgspec::matrix::{norm_inf, norm_inf_c};
use sgspec::positivity::{
    eventual_positivity_scan, pf_certificate, weak_condition_check, CertificationRoute,
    PositivityKind, SignPattern,
};
use sgspec::spectral::{
    dominance_check, growth_bound_estimate, peripheral_report_default, pole_data,
};
use sgspec::structure::{
    abs_matrix_irreducible, digraph_of, ideal_invariance_bruteforce, irreducibility_report,
    strongly_connected, InvarianceMode, IrreducibilityOptions,
};
use sgspec::{tol, GeneratorMatrix};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)*));
        }
    };
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn sorted_real_eigenvalues(a: &GeneratorMatrix) -> Result<Vec<f64>, String> {
    let e = eig_default(a).map_err(|e| e.to_string())?;
    let mut v = Vec::new();
    for z in &e.eigenvalues {
        ensure!(z.im.abs() <= 1e-10, "complex eigenvalue {z}");
        v.push(z.re);
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let m = casestudies::counterexample_s2();
    let a = &m.generator;
    let ev = sorted_real_eigenvalues(a)?;
    for (g, w) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
        ensure!((g - w).abs() <= 1e-10, "eigenvalues {ev:?}");
    }
    let r = irreducibility_report(a, &IrreducibilityOptions::default()).map_err(err)?;
    let empty = |s: &Option<Vec<Vec<usize>>>| s.as_ref().is_some_and(|v| v.is_empty());
    ensure!(
        r.verdict
            && r.consistent
            && r.scc_connected
            && r.block_triangular_witness.is_none()
            && r.abs_matrix_irreducible
            && empty(&r.ideal_invariant_sets)
            && empty(&r.semigroup_invariant_sets)
            && empty(&r.persistent_invariant_sets),
        "irreducibility criteria disagree: {r:?}"
    );
    let pf = pf_certificate(a).map_err(err)?;
    ensure!(
        pf.right_vector_positive == SignPattern::SignMixed,
        "dominant eigenvector {:?}",
        pf.u
    );
    let scan = eventual_positivity_scan(a, 50.0, 0.05).map_err(err)?;
    ensure!(scan.kind == PositivityKind::Refuted, "scan {:?}", scan.kind);
    let weak =
        weak_condition_check(a, &m.vector("f").unwrap(), &m.vector("phi").unwrap()).map_err(err)?;
    ensure!(!weak, "weak condition holds for f, phi");
    within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "spectrum {ev:?}, scan refuted, weak condition fails ({:.2?})",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let a = casestudies::a1();
    let ev = sorted_real_eigenvalues(&a)?;
    for (g, w) in ev.iter().zip([0.0, 8.0, 9.0]) {
        ensure!((g - w).abs() <= 1e-10, "eigenvalues {ev:?}");
    }
    let e = eig_default(&a).map_err(err)?;
    let per = peripheral_report_default(&e);
    ensure!(dominance_check(&e), "not dominant");
    ensure!((per.gap - 1.0).abs() <= 1e-10, "gap {}", per.gap);
    let p = pole_data(&a).map_err(err)?;
    ensure!(
        p.pole_order == 1 && p.projection_rank == 1,
        "pole {} rank {}",
        p.pole_order,
        p.projection_rank
    );
    let (u, phi) = (p.u.unwrap(), p.phi.unwrap());
    ensure!(
        u.iter().chain(&phi).all(|&x| x > 0.0),
        "u {u:?} phi {phi:?}"
    );
    let pair: f64 = u.iter().zip(&phi).map(|(x, y)| x * y).sum();
    ensure!((pair - 1.0).abs() <= 1e-12, "<phi, u> = {pair}");
    let scan = eventual_positivity_scan(&a, 50.0, 0.05).map_err(err)?;
    ensure!(
        scan.kind == PositivityKind::EventuallyPositive,
        "scan {:?}: {:?}",
        scan.kind,
        scan.note
    );
    ensure!(scan.t0.is_some_and(|t| t <= 1.0), "t0 = {:?}", scan.t0);
    ensure!(
        scan.certified_by == Some(CertificationRoute::SpectralTail) && scan.tail_bound.is_some(),
        "no verified tail bound"
    );
    within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "t0 = {}, gap = {} ({:.2?})",
        scan.t0.unwrap(),
        per.gap,
        start.elapsed()
    ))
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for n in [8, 32] {
        let start = Instant::now();
        let a = casestudies::coupled_system(n).map_err(err)?.generator;
        ensure!(
            strongly_connected(&digraph_of(&a, tol::zero_tol(a.norm_inf()))),
            "n = {n}: digraph not strongly connected"
        );
        let scan = eventual_positivity_scan(&a, 50.0, 0.05).map_err(err)?;
        ensure!(
            scan.kind == PositivityKind::EventuallyPositive,
            "n = {n}: scan {:?}: {:?}",
            scan.kind,
            scan.note
        );
        let pf = pf_certificate(&a).map_err(err)?;
        let t_end = 40.0 / pf.gap;
        let l = rank_one_limit(&a, &linspace(t_end, 100)).map_err(err)?;
        let last = l.residual_trace.last().unwrap();
        ensure!(
            last.residual <= 1e-8,
            "n = {n}: residual {} at t = {}",
            last.residual,
            last.t
        );
        ensure!(
            l.u.iter().chain(&l.phi).all(|&x| x > 0.0),
            "n = {n}: u, phi not positive"
        );
        ensure!(
            (l.fitted_rate - l.gap).abs() <= 0.1 * l.gap,
            "n = {n}: rate {} vs gap {}",
            l.fitted_rate,
            l.gap
        );
        if n == 32 {
            within_time(start, Duration::from_secs(10))?;
        }
        notes.push(format!(
            "n={n}: t0={}, rate {:.4} vs gap {:.4}, {:.2?}",
            scan.t0.unwrap(),
            l.fitted_rate,
            l.gap,
            start.elapsed()
        ));
    }
    Ok(notes.join("; "))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let times = [0.1, 0.5, 1.0, 2.0];
    let mut irreducible = 0;
    for seed in 0..500u64 {
        let d = 1 + (seed as usize % 7);
        let a = random_sparse(d, 2.0, 0.5, seed);
        let zt = tol::zero_tol(a.norm_inf());
        let scc = strongly_connected(&digraph_of(&a, zt));
        let abs = abs_matrix_irreducible(&a, zt);
        let gen =
            ideal_invariance_bruteforce(&a, InvarianceMode::Generator, &[], zt, 16).map_err(err)?;
        let sem = ideal_invariance_bruteforce(&a, InvarianceMode::SemigroupSampled, &times, zt, 16)
            .map_err(err)?;
        ensure!(
            scc == abs && scc == gen.is_empty() && scc == sem.is_empty(),
            "seed {seed}: scc {scc}, |A| {abs}, generator {gen:?}, semigroup {sem:?}"
        );
        irreducible += scc as usize;
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "500 matrices, {irreducible} irreducible, 0 disagreements ({:.2?})",
        start.elapsed()
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut irreducible = 0;
    for seed in 0..200u64 {
        let d = 1 + (seed as usize % 8);
        let density = [0.15, 0.4, 0.7, 1.0][seed as usize % 4];
        let a = random_metzler(d, density, seed).map_err(err)?;
        let e = eig_default(&a).map_err(err)?;
        let per = peripheral_report_default(&e);
        let spb = e.spectral_bound();
        ensure!(
            per.is_dominant
                && per
                    .peripheral
                    .iter()
                    .all(|z| (z - Complex::new(spb, 0.0)).norm() <= e.cluster_tol),
            "seed {seed}: peripheral {:?}",
            per.peripheral
        );
        let zt = tol::zero_tol(a.norm_inf());
        if strongly_connected(&digraph_of(&a, zt)) {
            irreducible += 1;
            let pf = pf_certificate(&a).map_err(err)?;
            ensure!(
                pf.is_simple && pf.is_real_dominant,
                "seed {seed}: spb not simple"
            );
            ensure!(
                pf.right_vector_positive == SignPattern::StrictlyPositive
                    && pf.left_vector_positive == SignPattern::StrictlyPositive,
                "seed {seed}: eigenvectors {:?} {:?}",
                pf.u,
                pf.phi
            );
        }
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "200 matrices, {irreducible} irreducible ({:.2?})",
        start.elapsed()
    ))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut seed = 0u64;
    while checked < 100 {
        seed += 1;
        let d = 2 + (seed as usize % 7);
        let a = random_dense(d, 2.0, seed);
        let e = eig_default(&a).map_err(err)?;
        let per = peripheral_report_default(&e);
        if !(per.gap > 0.1 && per.gap.is_finite()) {
            continue;
        }
        checked += 1;
        let g = growth_bound_estimate(&a, 50.0 / per.gap).map_err(err)?;
        let dev = (g - per.spb).abs();
        if dev > 1e-2 {
            failures.push((seed, per.gap, dev));
        }
    }
    if failures.is_empty() {
        Ok("100 matrices within 1e-2".into())
    } else {
        let worst = failures.iter().map(|f| f.2).fold(0.0, f64::max);
        let (s, gap, dev) = failures[0];
        Err(format!(
            "{} of 100 exceed 1e-2 (worst {worst:.3}); first: seed {s}, gap {gap:.3}, deviation {dev:.3}",
            failures.len()
        ))
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    for seed in 0..200u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 + (seed as usize % 8);
        let a = random_metzler(d, 0.5, seed).map_err(err)?;
        let density = r.gen_range(0.1..1.0);
        let n = DMatrix::from_fn(d, d, |_, _| {
            if r.gen::<f64>() < density {
                r.gen_range(0.0..1.0)
            } else {
                0.0
            }
        });
        let b = GeneratorMatrix::from_matrix(a.matrix() + n, None).map_err(err)?;
        let rep = asymptotic_domination_check(&a, &b, 50.0, 0.5).map_err(err)?;
        ensure!(
            rep.dominated == Dominated::CertifiedZero,
            "seed {seed}: {:?}",
            rep.dominated
        );
        ensure!(
            rep.sb_a <= rep.sb_b + 1e-10,
            "seed {seed}: spb {} > {}",
            rep.sb_a,
            rep.sb_b
        );
        ensure!(
            rep.boundary_inclusion_holds,
            "seed {seed}: {:?}",
            rep.boundary_details
        );
    }
    Ok(format!("200 pairs, 0 violations ({:.2?})", start.elapsed()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..200u64 {
        let d = 1 + (seed as usize % 8);
        let a = random_dense(d, 2.0, seed);
        let m = a.matrix();
        let id = DMatrix::<f64>::identity(d, d);

        let (s, t) = (r.gen_range(0.0..5.0), r.gen_range(0.0..5.0));
        let lhs = expm(&a, s + t).map_err(err)?;
        let rhs = expm(&a, s).map_err(err)? * expm(&a, t).map_err(err)?;
        ensure!(
            norm_inf(&(&lhs - rhs)) <= 1e-10 * norm_inf(&lhs),
            "seed {seed}: semigroup law"
        );

        let rec = |h: f64| -> Result<f64, String> {
            Ok(norm_inf(&((expm(&a, h).map_err(err)? - &id) / h - m)))
        };
        let (e3, e4, e5) = (rec(1e-3)?, rec(1e-4)?, rec(1e-5)?);
        ensure!(
            e4 <= 0.2 * e3 + 1e-9 && e5 <= 0.2 * e4 + 1e-9,
            "seed {seed}: generator recovery {e3:e} {e4:e} {e5:e}"
        );

        let e = eig_default(&a).map_err(err)?;
        let scale = a.norm_inf().max(1.0);
        let mut pairs = 0;
        while pairs < 20 {
            let mut z = || {
                Complex::new(
                    r.gen_range(-2.0..2.0) * scale,
                    r.gen_range(-2.0..2.0) * scale,
                )
            };
            let (l, mu) = (z(), z());
            if e.distance_to_spectrum(l) < 0.1 || e.distance_to_spectrum(mu) < 0.1 {
                continue;
            }
            let rl = resolvent_with(&a, &e, l, 0.0).map_err(err)?;
            let rm = resolvent_with(&a, &e, mu, 0.0).map_err(err)?;
            let lhs = &rl - &rm;
            let rhs = &rl * &rm * (mu - l);
            let rel = norm_inf_c(&(&lhs - &rhs)) / norm_inf_c(&lhs).max(norm_inf_c(&rhs));
            ensure!(rel <= 1e-8, "seed {seed}: resolvent identity {rel:e}");
            pairs += 1;
        }

        let ac = m.map(|x| Complex::new(x, 0.0));
        for k in 0..e.clusters.len() {
            let p = spectral_projection(&a, &e, k).map_err(err)?;
            let pn = norm_inf_c(&p).max(1.0);
            ensure!(
                norm_inf_c(&(&p * &p - &p)) <= 1e-9 * pn * pn,
                "seed {seed}: P^2 != P"
            );
            ensure!(
                norm_inf_c(&(&ac * &p - &p * &ac)) <= 1e-9 * a.norm_inf() * pn,
                "seed {seed}: AP != PA"
            );
        }
    }
    within_time(start, Duration::from_secs(120))?;
    Ok(format!("200 matrices ({:.2?})", start.elapsed()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 counterexample end-to-end", criterion_1),
        ("2 A1 regression", criterion_2),
        ("3 coupled system n = 8, 32", criterion_3),
        ("4 irreducibility equivalence", criterion_4),
        ("5 Metzler dominance", criterion_5),
        ("6 growth-bound law", criterion_6),
        ("7 domination", criterion_7),
        ("8 numerical kernel", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
