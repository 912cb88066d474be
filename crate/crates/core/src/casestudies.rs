//! Built-in models and seeded random ensembles.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::eig_default;
use crate::matrix::{GeneratorMatrix, MatrixFile};

/// Outcomes a model is known to have.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Expected {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eventually_positive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_condition_violated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_one_limit: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub generator: GeneratorMatrix,
    pub designated_vectors: BTreeMap<String, Vec<f64>>,
    pub provenance: String,
    pub expected: Option<Expected>,
}

impl Model {
    fn new(generator: GeneratorMatrix, provenance: &str) -> Self {
        Self {
            generator,
            designated_vectors: BTreeMap::new(),
            provenance: provenance.to_string(),
            expected: None,
        }
    }

    fn with_vector(mut self, name: &str, v: Vec<f64>) -> Self {
        assert_eq!(v.len(), self.generator.dim(), "designated vector `{name}`");
        self.designated_vectors.insert(name.to_string(), v);
        self
    }

    pub fn vector(&self, name: &str) -> Option<DVector<f64>> {
        self.designated_vectors
            .get(name)
            .map(|v| DVector::from_row_slice(v))
    }

    /// Matrix JSON record with the designated vectors embedded.
    pub fn to_file(&self) -> MatrixFile {
        let mut file = self.generator.to_file();
        file.vectors = self.designated_vectors.clone();
        file
    }
}

/// The symmetric 4×4 generator of an irreducible, non-eventually-positive
/// semigroup whose kernel contains the disjointly supported positive
/// vectors `f = (1,1,0,0)` and `φ = (0,0,1,1)`.
pub fn counterexample_s2() -> Model {
    let a = GeneratorMatrix::from_rows(&[
        &[0.0, 0.0, -1.0, 1.0],
        &[0.0, 0.0, 1.0, -1.0],
        &[-1.0, 1.0, 0.0, 0.0],
        &[1.0, -1.0, 0.0, 0.0],
    ])
    .expect("static matrix")
    .with_label("s2");
    let mut m = Model::new(
        a,
        "irreducible symmetric 4x4 generator without a positive Perron vector",
    )
    .with_vector("f", vec![1.0, 1.0, 0.0, 0.0])
    .with_vector("phi", vec![0.0, 0.0, 1.0, 1.0]);
    m.expected = Some(Expected {
        irreducible: Some(true),
        eventually_positive: Some(false),
        weak_condition_violated: Some(true),
        rank_one_limit: None,
    });
    m
}

/// `[[7,-1,3],[-1,7,3],[3,3,3]]`, spectrum `{9, 8, 0}`.
pub fn a1() -> GeneratorMatrix {
    GeneratorMatrix::from_rows(&[&[7.0, -1.0, 3.0], &[-1.0, 7.0, 3.0], &[3.0, 3.0, 3.0]])
        .expect("static matrix")
        .with_label("a1")
}

pub fn a1_model() -> Model {
    let mut m = Model::new(a1(), "eventually positive 3x3 block of the coupled system")
        .with_vector("u", vec![1.0, 1.0, 1.0]);
    m.expected = Some(Expected {
        irreducible: Some(true),
        eventually_positive: Some(true),
        weak_condition_violated: Some(false),
        rank_one_limit: Some(true),
    });
    m
}

/// `[[-1,1],[1,-1]]`, spectrum `{0, -2}`.
pub fn metzler_pair() -> GeneratorMatrix {
    GeneratorMatrix::from_rows(&[&[-1.0, 1.0], &[1.0, -1.0]])
        .expect("static matrix")
        .with_label("metzler-2")
}

/// `[[0,-1],[1,0]]`, spectrum `{±i}`.
pub fn rotation() -> GeneratorMatrix {
    GeneratorMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]])
        .expect("static matrix")
        .with_label("rotation")
}

/// Second-order finite-difference Dirichlet Laplacian on `n` interior
/// points of `(0, 1)`: `(n+1)² tridiag(1, -2, 1)`.
pub fn dirichlet_laplacian(n: usize) -> Result<GeneratorMatrix> {
    if n == 0 {
        return Err(Error::Domain(
            "need at least one interior grid point".into(),
        ));
    }
    let inv_h2 = ((n + 1) * (n + 1)) as f64;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = -2.0 * inv_h2;
        if i + 1 < n {
            m[(i, i + 1)] = inv_h2;
            m[(i + 1, i)] = inv_h2;
        }
    }
    GeneratorMatrix::from_matrix(m, Some(format!("laplacian-{n}")))
}

/// Closed-form eigenvalues `-4 (n+1)² sin²(kπ / (2(n+1)))`, `k = 1..n`.
pub fn dirichlet_laplacian_eigenvalues(n: usize) -> Vec<f64> {
    let m = (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let s = (k as f64 * std::f64::consts::PI / (2.0 * m)).sin();
            -4.0 * m * m * s * s
        })
        .collect()
}

/// Discretised coupling of the 3×3 block `a1` with the Dirichlet Laplacian.
///
/// The `(3 + n)`-dimensional generator is
/// `[[A₁, B₁₂], [B₂₁, A₂]]` where `B₁₂` maps a grid function to its
/// trapezoidal integral (weight `h` per interior node, boundary values
/// zero) placed in the third coordinate, and `B₂₁` maps `z` to `z₃` times
/// the all-ones grid vector.
pub fn coupled_system(n: usize) -> Result<Model> {
    let lap = dirichlet_laplacian(n)?;
    let d = 3 + n;
    let h = 1.0 / (n + 1) as f64;
    let mut c = DMatrix::zeros(d, d);
    c.view_mut((0, 0), (3, 3)).copy_from(a1().matrix());
    c.view_mut((3, 3), (n, n)).copy_from(lap.matrix());
    for j in 0..n {
        c[(2, 3 + j)] = h;
        c[(3 + j, 2)] = 1.0;
    }
    let g = GeneratorMatrix::from_matrix(c, Some(format!("coupled-{n}")))?;
    let mut m = Model::new(
        g,
        "finite-difference discretisation of the coupled block/Laplacian system",
    )
    .with_vector("u", vec![1.0; d]);
    m.expected = Some(Expected {
        irreducible: Some(true),
        eventually_positive: Some(true),
        weak_condition_violated: None,
        rank_one_limit: Some(true),
    });
    Ok(m)
}

/// Resolves built-in model names: `s2`, `a1`, `metzler-2`, `rotation`,
/// `coupled-<n>`, `laplacian-<n>`.
pub fn by_name(name: &str) -> Result<Model> {
    let parse_n = |rest: &str| {
        rest.parse::<usize>()
            .map_err(|_| Error::Domain(format!("bad size in case study `{name}`")))
    };
    match name {
        "s2" => Ok(counterexample_s2()),
        "a1" => Ok(a1_model()),
        "metzler-2" => Ok(Model::new(
            metzler_pair(),
            "symmetric 2x2 Metzler generator",
        )),
        "rotation" => Ok(Model::new(rotation(), "planar rotation generator")),
        _ => {
            if let Some(rest) = name.strip_prefix("coupled-") {
                coupled_system(parse_n(rest)?)
            } else if let Some(rest) = name.strip_prefix("laplacian-") {
                Ok(Model::new(
                    dirichlet_laplacian(parse_n(rest)?)?,
                    "finite-difference Dirichlet Laplacian",
                ))
            } else {
                Err(Error::Domain(format!("unknown case study `{name}`")))
            }
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Off-diagonal entries nonzero with probability `density`, magnitudes
/// uniform on `[0, 1]`; diagonal uniform on `[-2, 0]`.
pub fn random_metzler(d: usize, density: f64, seed: u64) -> Result<GeneratorMatrix> {
    if d == 0 || !(0.0..=1.0).contains(&density) {
        return Err(Error::Domain(format!(
            "random_metzler needs d >= 1 and density in [0, 1], got d = {d}, density = {density}"
        )));
    }
    let mut r = rng(seed);
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                m[(i, j)] = -2.0 * r.gen::<f64>();
            } else {
                let keep = r.gen::<f64>() < density;
                let mag = r.gen::<f64>();
                if keep {
                    m[(i, j)] = mag;
                }
            }
        }
    }
    GeneratorMatrix::from_matrix(m, Some(format!("metzler-{d}-{seed}")))
}

/// Entries uniform on `[-scale, scale]`.
pub fn random_dense(d: usize, scale: f64, seed: u64) -> GeneratorMatrix {
    let mut r = rng(seed);
    let m = DMatrix::from_fn(d, d, |_, _| r.gen_range(-scale..=scale));
    GeneratorMatrix::from_matrix(m, None).expect("finite entries")
}

/// Entries uniform on `[-scale, scale]`, each zeroed with probability `p_zero`.
pub fn random_sparse(d: usize, scale: f64, p_zero: f64, seed: u64) -> GeneratorMatrix {
    let mut r = rng(seed);
    let m = DMatrix::from_fn(d, d, |_, _| {
        let x = r.gen_range(-scale..=scale);
        if r.gen::<f64>() < p_zero {
            0.0
        } else {
            x
        }
    });
    GeneratorMatrix::from_matrix(m, None).expect("finite entries")
}

/// Symmetric matrix with entries uniform on `[-scale, scale]`.
pub fn random_symmetric(d: usize, scale: f64, seed: u64) -> GeneratorMatrix {
    let mut r = rng(seed);
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let x = r.gen_range(-scale..=scale);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    GeneratorMatrix::from_matrix(m, None).expect("finite entries")
}

/// `A = σ u φᵀ / ⟨φ, u⟩ + Π S Π` with `Π = I - u φᵀ / ⟨φ, u⟩`, `S` random
/// symmetric, `u, φ` uniform on `[0.5, 1.5]` and
/// `σ = spb(Π S Π) + 1 + U[0, 1]`. Then `σ` is a simple dominant eigenvalue
/// with eigenvectors `u`, `φ` and spectral gap at least 1. Resampled until
/// some off-diagonal entry is negative, so `A` is not Metzler; for `d = 2`
/// that cannot happen and a negative diagonal entry is accepted instead.
pub fn random_eventually_positive(d: usize, seed: u64) -> Result<GeneratorMatrix> {
    if d < 2 {
        return Err(Error::Domain(
            "random_eventually_positive needs d >= 2".into(),
        ));
    }
    let mut r = rng(seed);
    loop {
        let u = DVector::from_fn(d, |_, _| r.gen_range(0.5..1.5));
        let phi = DVector::from_fn(d, |_, _| r.gen_range(0.5..1.5));
        let p = &u * phi.transpose() / phi.dot(&u);
        let pi = DMatrix::identity(d, d) - &p;
        let mut s = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let x = r.gen_range(-2.0..2.0);
                s[(i, j)] = x;
                s[(j, i)] = x;
            }
        }
        let q = &pi * s * &pi;
        let spb_q = eig_default(&GeneratorMatrix::from_matrix(q.clone(), None)?)?.spectral_bound();
        let sigma = spb_q + 1.0 + r.gen::<f64>();
        let a = p * sigma + q;
        // a 2x2 generator with an eventually positive semigroup is Metzler
        let negative = (0..d).any(|i| (0..d).any(|j| (i != j || d == 2) && a[(i, j)] < 0.0));
        if negative {
            return GeneratorMatrix::from_matrix(a, Some(format!("evpos-{d}-{seed}")));
        }
    }
}
