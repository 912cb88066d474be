//! Irreducibility of a real generator through six independent routes:
//!
//! 1. no proper coordinate ideal `J_S` is invariant under `A`,
//! 2. no permutation brings `A` to block upper-triangular form,
//! 3. the associated digraph is strongly connected,
//! 4. `(I + |A|)^{d-1}` is entrywise positive,
//! 5. no `J_S` is invariant under `e^{tA}` at the sampled times,
//! 6. no `J_S` is eventually invariant (invariant at the late samples).
//!
//! For matrices these are all equivalent, so the report cross-checks them.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::matrix::{norm_inf, GeneratorMatrix};
use crate::tol;

/// Weighted digraph with an edge `i -> j` whenever `|a_ij| > zero_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Digraph {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
        }
        adj
    }
}

pub fn digraph_of(a: &GeneratorMatrix, zero_tol: f64) -> Digraph {
    let d = a.dim();
    let mut edges = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let w = a.get(i, j);
            if w.abs() > zero_tol {
                edges.push((i, j, w));
            }
        }
    }
    Digraph {
        vertex_count: d,
        edges,
    }
}

/// Strongly connected components (Tarjan, iterative), in the order Tarjan
/// completes them: every edge between components points from a later
/// component to an earlier one.
pub fn strongly_connected_components(g: &Digraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count;
    let adj = g.adjacency();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, position in its adjacency list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

pub fn strongly_connected(g: &Digraph) -> bool {
    strongly_connected_components(g).len() == 1
}

/// Vertex order that puts `A` in block upper-triangular form: components
/// listed in a topological order of the condensation (sources first), ties
/// broken by smallest vertex. `None` when the digraph is strongly connected.
pub fn block_triangular_witness(g: &Digraph) -> Option<Vec<usize>> {
    let comps = strongly_connected_components(g);
    if comps.len() <= 1 {
        return None;
    }
    let k = comps.len();
    let mut comp_of = vec![0; g.vertex_count];
    for (c, vs) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = c;
        }
    }
    let mut succ = vec![std::collections::BTreeSet::new(); k];
    let mut indeg = vec![0usize; k];
    for &(i, j, _) in &g.edges {
        let (ci, cj) = (comp_of[i], comp_of[j]);
        if ci != cj && succ[ci].insert(cj) {
            indeg[cj] += 1;
        }
    }
    // Kahn with a min-heap keyed by smallest vertex of the component
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> = (0..k)
        .filter(|&c| indeg[c] == 0)
        .map(|c| std::cmp::Reverse((comps[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(g.vertex_count);
    while let Some(std::cmp::Reverse((_, c))) = ready.pop() {
        order.extend_from_slice(&comps[c]);
        for &s in &succ[c] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(std::cmp::Reverse((comps[s][0], s)));
            }
        }
    }
    Some(order)
}

/// `P A P⁻¹` for the vertex order `perm` (new index `k` is old `perm[k]`).
pub fn permute(a: &GeneratorMatrix, perm: &[usize]) -> DMatrix<f64> {
    let d = a.dim();
    DMatrix::from_fn(d, d, |i, j| a.get(perm[i], perm[j]))
}

/// Size of the leading diagonal block of the witness, i.e. the first
/// strongly connected component in witness order.
pub fn leading_block_size(g: &Digraph, perm: &[usize]) -> usize {
    let comps = strongly_connected_components(g);
    comps
        .iter()
        .find(|c| c.contains(&perm[0]))
        .map_or(perm.len(), |c| c.len())
}

/// `(I + |A|)^{d-1} > 0` entrywise, evaluated on the zero pattern by
/// repeated Boolean squaring.
pub fn abs_matrix_irreducible(a: &GeneratorMatrix, zero_tol: f64) -> bool {
    let d = a.dim();
    let mut reach: Vec<Vec<bool>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| i == j || a.get(i, j).abs() > zero_tol)
                .collect()
        })
        .collect();
    // (I + |A|)^{2^k} for 2^k >= d - 1
    let mut power = 1;
    while power < d.saturating_sub(1) {
        let mut next = vec![vec![false; d]; d];
        for (i, row) in reach.iter().enumerate() {
            for (k, _) in row.iter().enumerate().filter(|(_, &r)| r) {
                for j in 0..d {
                    next[i][j] |= reach[k][j];
                }
            }
        }
        reach = next;
        power *= 2;
    }
    reach.iter().all(|row| row.iter().all(|&x| x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvarianceMode {
    Generator,
    SemigroupSampled,
    PersistentSampled,
}

fn subsets_invariant_under(matrices: &[(DMatrix<f64>, f64)], d: usize) -> Vec<Vec<usize>> {
    let full: u32 = if d == 32 { u32::MAX } else { (1u32 << d) - 1 };
    let mut out = Vec::new();
    for mask in 1..full {
        let ok = matrices.iter().all(|(m, tol)| {
            (0..d).filter(|&j| mask >> j & 1 == 1).all(|j| {
                (0..d)
                    .filter(|&i| mask >> i & 1 == 0)
                    .all(|i| m[(i, j)].abs() <= *tol)
            })
        });
        if ok {
            out.push((0..d).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Proper nonempty coordinate sets `S` whose ideal
/// `J_S = {x : x_i = 0 for i ∉ S}` is invariant, enumerated over all
/// `2^d - 2` subsets (0-based indices, ordered by bitmask).
///
/// * `Generator`: `a_ij = 0` for all `i ∉ S`, `j ∈ S` (up to `zero_tol`).
/// * `SemigroupSampled`: the same for `e^{tA}` at every `t` in `times`.
/// * `PersistentSampled`: the same for every `t` in `times` with
///   `t >= max(times) / 2`.
pub fn ideal_invariance_bruteforce(
    a: &GeneratorMatrix,
    mode: InvarianceMode,
    times: &[f64],
    zero_tol: f64,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let d = a.dim();
    if d > cap || d > 31 {
        return Err(Error::Capacity { dim: d, cap });
    }
    let matrices = match mode {
        InvarianceMode::Generator => vec![(a.matrix().clone(), zero_tol)],
        InvarianceMode::SemigroupSampled | InvarianceMode::PersistentSampled => {
            if times.is_empty() {
                return Err(Error::Domain(
                    "sampled invariance needs at least one time".into(),
                ));
            }
            let t_max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cutoff = if mode == InvarianceMode::PersistentSampled {
                t_max / 2.0
            } else {
                f64::NEG_INFINITY
            };
            times
                .iter()
                .filter(|&&t| t >= cutoff)
                .map(|&t| {
                    let e = expm(a, t)?;
                    let tol = tol::IDEAL_REL * norm_inf(&e);
                    Ok((e, tol))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(subsets_invariant_under(&matrices, d))
}

#[derive(Debug, Clone)]
pub struct IrreducibilityOptions {
    pub zero_tol: Option<f64>,
    /// Sample times for the semigroup modes; default `k / ((d+1) max(‖A‖∞, 1))`, `k = 1..=d+1`.
    pub times: Option<Vec<f64>>,
    pub brute_force_cap: usize,
}

impl Default for IrreducibilityOptions {
    fn default() -> Self {
        Self {
            zero_tol: None,
            times: None,
            brute_force_cap: tol::brute_force_cap(),
        }
    }
}

/// Default sample grid: `d + 1` distinct times with `t ‖A‖∞ <= 1`.
pub fn default_times(a: &GeneratorMatrix) -> Vec<f64> {
    let d = a.dim();
    let scale = a.norm_inf().max(1.0);
    (1..=d + 1)
        .map(|k| k as f64 / ((d + 1) as f64 * scale))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityReport {
    pub scc_connected: bool,
    pub component_count: usize,
    /// Vertex order putting `A` in block upper-triangular form (0-based).
    pub block_triangular_witness: Option<Vec<usize>>,
    pub abs_matrix_irreducible: bool,
    /// `None` when the brute-force stages were skipped.
    pub ideal_invariant_sets: Option<Vec<Vec<usize>>>,
    pub semigroup_invariant_sets: Option<Vec<Vec<usize>>>,
    pub persistent_invariant_sets: Option<Vec<Vec<usize>>>,
    pub sample_times: Vec<f64>,
    pub skipped: Option<String>,
    pub verdict: bool,
    pub consistent: bool,
}

pub fn irreducibility_report(
    a: &GeneratorMatrix,
    opts: &IrreducibilityOptions,
) -> Result<IrreducibilityReport> {
    let zero_tol = opts.zero_tol.unwrap_or_else(|| tol::zero_tol(a.norm_inf()));
    let g = digraph_of(a, zero_tol);
    let comps = strongly_connected_components(&g);
    let scc_connected = comps.len() == 1;
    let witness = block_triangular_witness(&g);
    let abs_irr = abs_matrix_irreducible(a, zero_tol);
    let times = opts.times.clone().unwrap_or_else(|| default_times(a));

    let (ideal, semigroup, persistent, skipped) = if a.dim() > opts.brute_force_cap {
        (
            None,
            None,
            None,
            Some(format!(
                "dimension {} exceeds brute-force cap {}",
                a.dim(),
                opts.brute_force_cap
            )),
        )
    } else {
        let cap = opts.brute_force_cap;
        (
            Some(ideal_invariance_bruteforce(
                a,
                InvarianceMode::Generator,
                &times,
                zero_tol,
                cap,
            )?),
            Some(ideal_invariance_bruteforce(
                a,
                InvarianceMode::SemigroupSampled,
                &times,
                zero_tol,
                cap,
            )?),
            Some(ideal_invariance_bruteforce(
                a,
                InvarianceMode::PersistentSampled,
                &times,
                zero_tol,
                cap,
            )?),
            None,
        )
    };

    let verdict = scc_connected;
    let mut votes = vec![witness.is_none(), abs_irr];
    for sets in [&ideal, &semigroup, &persistent].into_iter().flatten() {
        votes.push(sets.is_empty());
    }
    let consistent = votes.iter().all(|&v| v == verdict);
    Ok(IrreducibilityReport {
        scc_connected,
        component_count: comps.len(),
        block_triangular_witness: witness,
        abs_matrix_irreducible: abs_irr,
        ideal_invariant_sets: ideal,
        semigroup_invariant_sets: semigroup,
        persistent_invariant_sets: persistent,
        sample_times: times,
        skipped,
        verdict,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::casestudies;

    fn upper() -> GeneratorMatrix {
        GeneratorMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap()
    }

    #[test]
    fn counterexample_digraph() {
        let a = casestudies::counterexample_s2().generator;
        let g = digraph_of(&a, 0.0);
        assert_eq!(g.edges.len(), 8);
        assert!(g.edges.contains(&(0, 2, -1.0)));
        assert!(g.edges.contains(&(0, 3, 1.0)));
        assert!(strongly_connected(&g));
    }

    #[test]
    fn trivial_digraphs() {
        assert!(digraph_of(&GeneratorMatrix::zeros(3), 0.0).edges.is_empty());
        let g = digraph_of(&casestudies::a1(), 0.0);
        assert_eq!(g.edges.len(), 9);
        assert!(!strongly_connected(&digraph_of(&upper(), 0.0)));
        assert!(strongly_connected(&digraph_of(
            &GeneratorMatrix::zeros(1),
            0.0
        )));
    }

    #[test]
    fn zero_tol_hides_small_entries() {
        let a = GeneratorMatrix::from_rows(&[&[0.0, 1.0], &[1e-14, 0.0]]).unwrap();
        assert!(strongly_connected(&digraph_of(&a, 0.0)));
        assert!(!strongly_connected(&digraph_of(&a, 1e-12)));
    }

    #[test]
    fn bruteforce_examples() {
        let d = GeneratorMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let t = [0.5, 1.0];
        for mode in [
            InvarianceMode::Generator,
            InvarianceMode::SemigroupSampled,
            InvarianceMode::PersistentSampled,
        ] {
            assert_eq!(
                ideal_invariance_bruteforce(&d, mode, &t, 0.0, 16).unwrap(),
                vec![vec![0], vec![1]]
            );
        }
        let s2 = casestudies::counterexample_s2().generator;
        assert!(
            ideal_invariance_bruteforce(&s2, InvarianceMode::Generator, &t, 0.0, 16)
                .unwrap()
                .is_empty()
        );
        assert_eq!(
            ideal_invariance_bruteforce(&upper(), InvarianceMode::Generator, &t, 0.0, 16).unwrap(),
            vec![vec![0]]
        );
    }

    #[test]
    fn bruteforce_capacity_and_times() {
        let a = GeneratorMatrix::zeros(5);
        assert!(matches!(
            ideal_invariance_bruteforce(&a, InvarianceMode::Generator, &[], 0.0, 4),
            Err(Error::Capacity { dim: 5, cap: 4 })
        ));
        assert!(matches!(
            ideal_invariance_bruteforce(&a, InvarianceMode::SemigroupSampled, &[], 0.0, 16),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn abs_power_test() {
        assert!(abs_matrix_irreducible(&casestudies::a1(), 0.0));
        assert!(!abs_matrix_irreducible(&upper(), 0.0));
        assert!(abs_matrix_irreducible(&GeneratorMatrix::zeros(1), 0.0));
        // a directed 5-cycle needs the full power d - 1
        let mut m = DMatrix::zeros(5, 5);
        for i in 0..5 {
            m[(i, (i + 1) % 5)] = 1.0;
        }
        assert!(abs_matrix_irreducible(
            &GeneratorMatrix::from_matrix(m, None).unwrap(),
            0.0
        ));
    }

    #[test]
    fn reports() {
        let s2 = irreducibility_report(
            &casestudies::counterexample_s2().generator,
            &IrreducibilityOptions::default(),
        )
        .unwrap();
        assert!(s2.verdict && s2.consistent);
        assert_eq!(s2.ideal_invariant_sets.as_deref(), Some(&[][..]));

        let d = irreducibility_report(
            &GeneratorMatrix::diagonal(&[1.0, 2.0]).unwrap(),
            &IrreducibilityOptions::default(),
        )
        .unwrap();
        assert!(!d.verdict && d.consistent);
        assert_eq!(d.block_triangular_witness, Some(vec![0, 1]));

        let c = casestudies::coupled_system(8).unwrap().generator;
        let r = irreducibility_report(&c, &IrreducibilityOptions::default()).unwrap();
        assert!(r.verdict && r.consistent);
    }

    #[test]
    fn skipped_above_cap() {
        let opts = IrreducibilityOptions {
            brute_force_cap: 2,
            ..Default::default()
        };
        let r = irreducibility_report(&casestudies::a1(), &opts).unwrap();
        assert!(r.skipped.is_some() && r.ideal_invariant_sets.is_none());
        assert!(r.verdict && r.consistent);
    }

    #[test]
    fn witness_triangularizes() {
        // 0 -> 1 only, plus a separate 2-cycle {2, 3} feeding 0
        let a = GeneratorMatrix::from_rows(&[
            &[1.0, 1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 2.0],
            &[0.0, 0.0, 3.0, 0.0],
        ])
        .unwrap();
        let g = digraph_of(&a, 0.0);
        let w = block_triangular_witness(&g).unwrap();
        let k = leading_block_size(&g, &w);
        let p = permute(&a, &w);
        for i in k..4 {
            for j in 0..k {
                assert_eq!(p[(i, j)], 0.0);
            }
        }
        // full block structure: every edge goes forward in the order
        let pos: Vec<usize> = (0..4)
            .map(|v| w.iter().position(|&x| x == v).unwrap())
            .collect();
        let comps = strongly_connected_components(&g);
        let comp_of = |v: usize| comps.iter().position(|c| c.contains(&v)).unwrap();
        for &(i, j, _) in &g.edges {
            if comp_of(i) != comp_of(j) {
                assert!(pos[i] < pos[j]);
            }
        }
    }
}
