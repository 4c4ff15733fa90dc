//! Perron-Frobenius utilities for entrywise-nonnegative matrices:
//! strongly connected components of the support digraph, cyclicity index,
//! and Perron value/vectors by power iteration.

use crate::multilinear::FMat;
use crate::{Error, Result};

const RAYLEIGH_TOL: f64 = 1e-13;
const MAX_ITERS: usize = 200_000;

/// Support digraph of a nonnegative matrix: edge i -> j iff m[i][j] > 0.
pub(crate) fn support_adjacency(m: &FMat) -> Vec<Vec<usize>> {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).filter(|&j| m[(i, j)] != 0.0).collect())
        .collect()
}

/// Strongly connected components by Tarjan's algorithm (iterative).
/// Components come out in a deterministic order and are then sorted by
/// smallest member so the output is stable across runs.
pub(crate) fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // explicit DFS stack: (node, child iterator position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        call.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
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
    components.sort_by_key(|c| c[0]);
    components
}

/// Cyclicity index (gcd of cycle lengths) of one strongly connected
/// component; 1 means primitive/aperiodic.
pub(crate) fn cyclicity(nodes: &[usize], adj: &[Vec<usize>]) -> usize {
    if nodes.len() == 1 {
        let v = nodes[0];
        return if adj[v].contains(&v) { 1 } else { 0 };
    }
    let in_comp: std::collections::BTreeMap<usize, usize> =
        nodes.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut level = vec![i64::MIN; nodes.len()];
    let mut g: u64 = 0;
    let root = 0usize;
    level[root] = 0;
    let mut queue = std::collections::VecDeque::from(vec![root]);
    while let Some(v) = queue.pop_front() {
        for &w_global in &adj[nodes[v]] {
            let Some(&w) = in_comp.get(&w_global) else {
                continue;
            };
            if level[w] == i64::MIN {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                let diff = (level[v] + 1 - level[w]).unsigned_abs();
                g = gcd(g, diff);
            }
        }
    }
    g.max(1) as usize
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Perron value and strictly positive left/right vectors of an irreducible
/// nonnegative matrix. Power iteration runs on `M + I`, which is primitive
/// for irreducible `M`, so the iteration converges even when the support
/// digraph is periodic; the shift is removed at the end. Vectors are
/// normalized to `u^T v = 1` with `max v = 1`.
pub(crate) fn perron_data(m: &FMat) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let right = shifted_power_iteration(m)?;
    let left = shifted_power_iteration(&m.transpose())?;
    // Rayleigh value from the converged right vector.
    let image = m.apply(&right);
    let num: f64 = image.iter().zip(&right).map(|(a, b)| a * b).sum();
    let den: f64 = right.iter().map(|x| x * x).sum();
    let rho = num / den;
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!("Perron value {rho} is not positive")));
    }
    // residual check
    let resid = image
        .iter()
        .zip(&right)
        .map(|(a, b)| (a - rho * b).abs())
        .fold(0.0_f64, f64::max);
    if resid > 1e-9 * rho {
        return Err(Error::Numeric(format!(
            "power iteration residual {resid:.3e} too large for Perron value {rho:.6e}"
        )));
    }
    // normalize: max v = 1, then u^T v = 1
    let vmax = right.iter().fold(0.0_f64, |a, &b| a.max(b));
    let v: Vec<f64> = right.iter().map(|x| x / vmax).collect();
    let dot: f64 = left.iter().zip(&v).map(|(a, b)| a * b).sum();
    let u: Vec<f64> = left.iter().map(|x| x / dot).collect();
    Ok((rho, u, v))
}

fn shifted_power_iteration(m: &FMat) -> Result<Vec<f64>> {
    let d = m.dim();
    let mut v = vec![1.0 / d as f64; d];
    let mut prev_rayleigh = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let mut next = m.apply(&v);
        for i in 0..d {
            next[i] += v[i]; // the +I shift
        }
        let norm: f64 = next.iter().map(|x| x.abs()).sum();
        if norm == 0.0 {
            return Err(Error::Domain(
                "matrix is nilpotent; no positive Perron vector".into(),
            ));
        }
        for x in &mut next {
            *x /= norm;
        }
        let image = m.apply(&next);
        let num: f64 = image.iter().zip(&next).map(|(a, b)| a * b).sum();
        let den: f64 = next.iter().map(|x| x * x).sum();
        let rayleigh = num / den;
        let scale = rayleigh.abs().max(1.0);
        if (rayleigh - prev_rayleigh).abs() <= RAYLEIGH_TOL * scale {
            let delta: f64 = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            if delta <= 1e-12 {
                return Ok(next);
            }
        }
        prev_rayleigh = rayleigh;
        v = next;
    }
    Err(Error::Numeric("power iteration did not converge".into()))
}

/// Spectral radius of a general nonnegative matrix: the maximum of the
/// Perron values over strongly connected components of the support.
pub(crate) fn perron_root(m: &FMat) -> Result<f64> {
    let d = m.dim();
    for i in 0..d {
        for j in 0..d {
            if m[(i, j)] < 0.0 {
                return Err(Error::Input("matrix has a negative entry".into()));
            }
        }
    }
    let adj = support_adjacency(m);
    let comps = sccs(&adj);
    let mut best: f64 = 0.0;
    for comp in &comps {
        if comp.len() == 1 && m[(comp[0], comp[0])] == 0.0 {
            continue; // nilpotent singleton
        }
        let sub = restrict(m, comp);
        let (rho, _, _) = perron_data(&sub)?;
        best = best.max(rho);
    }
    if best <= 0.0 {
        return Err(Error::Domain(
            "matrix is nilpotent (zero spectral radius)".into(),
        ));
    }
    Ok(best)
}

/// Principal submatrix on the given (sorted) index set.
pub(crate) fn restrict(m: &FMat, nodes: &[usize]) -> FMat {
    FMat::from_fn(nodes.len(), |i, j| m[(nodes[i], nodes[j])])
}
