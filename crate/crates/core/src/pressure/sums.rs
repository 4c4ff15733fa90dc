use crate::multilinear::{eigen_moduli, singular_values, FMat};
use crate::symbolic::word_count;
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use rayon::prelude::*;

/// Fixed block depth for the deterministic parallel reduction: words are
/// grouped by their first `min(n, BLOCK_DEPTH)` symbols, blocks are
/// evaluated independently (possibly in parallel) and combined in
/// lexicographic order, so the result is bit-identical for any worker
/// count.
const BLOCK_DEPTH: usize = 4;

/// Visit every length-`n` word product in lexicographic order within a
/// block, calling `leaf` with the product. The prefix stack keeps the
/// association order fixed: each product is `parent * generator`.
fn dfs_block<F: FnMut(&FMat)>(mats: &[FMat], prefix: &FMat, depth: usize, leaf: &mut F) {
    if depth == 0 {
        leaf(prefix);
        return;
    }
    for m in mats {
        let next = prefix.mul(m);
        dfs_block(mats, &next, depth - 1, leaf);
    }
}

fn block_prefixes(mats: &[FMat], q: usize) -> Vec<FMat> {
    let mut out = vec![FMat::identity(mats[0].dim())];
    for _ in 0..q {
        let mut next = Vec::with_capacity(out.len() * mats.len());
        for p in &out {
            for m in mats {
                next.push(p.mul(m));
            }
        }
        out = next;
    }
    out
}

/// Map every length-`n` word product through `value` and log-sum-exp the
/// results with the fixed block reduction. `value` returns the log of the
/// summand.
pub(crate) fn log_sum_over_words(
    tuple: &MatrixTuple,
    n: usize,
    budget: u64,
    value: impl Fn(&FMat) -> Result<f64> + Sync,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let alphabet = tuple.count();
    match word_count(alphabet, n) {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::Budget(format!(
                "partition sum over {alphabet}^{n} words exceeds the budget of {budget}"
            )))
        }
    }
    let mats = tuple.float_mats();
    let q = n.min(BLOCK_DEPTH);
    let prefixes = block_prefixes(mats, q);
    let block_logs: Result<Vec<f64>> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut vals: Vec<f64> = Vec::new();
            let mut err = None;
            dfs_block(mats, prefix, n - q, &mut |product| {
                if err.is_some() {
                    return;
                }
                match value(product) {
                    Ok(v) => vals.push(v),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok(log_sum_exp(&vals))
        })
        .collect();
    let block_logs = block_logs?;
    Ok(log_sum_exp(&block_logs))
}

/// Sequential log-sum-exp in slice order.
pub(crate) fn log_sum_exp(vals: &[f64]) -> f64 {
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = vals.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Per-word spectra for all lengths up to `n_max`, stored in lexicographic
/// word order. Built once, evaluated for many values of `s` during
/// bisection and curve sweeps.
pub(crate) struct SpectrumCache {
    /// `levels[n-1]` holds, for each word of length n in lex order, the
    /// sorted log singular values (dim consecutive floats).
    pub levels: Vec<Vec<f64>>,
    /// Same layout with log eigenvalue moduli; built lazily.
    pub eigen_levels: Vec<Option<Vec<f64>>>,
    mats: Vec<FMat>,
}

impl SpectrumCache {
    pub fn build(tuple: &MatrixTuple, n_max: usize, budget: u64) -> Result<Self> {
        let alphabet = tuple.count();
        let mut total: u64 = 0;
        for n in 1..=n_max {
            total = total.saturating_add(word_count(alphabet, n).unwrap_or(u64::MAX));
        }
        if total > budget {
            return Err(Error::Budget(format!(
                "caching spectra for all words up to length {n_max} exceeds the budget of {budget}"
            )));
        }
        let mats = tuple.float_mats().to_vec();
        let mut levels = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let q = n.min(BLOCK_DEPTH);
            let prefixes = block_prefixes(&mats, q);
            let blocks: Result<Vec<Vec<f64>>> = prefixes
                .par_iter()
                .map(|prefix| {
                    let mut out: Vec<f64> = Vec::new();
                    let mut err = None;
                    dfs_block(&mats, prefix, n - q, &mut |product| {
                        if err.is_some() {
                            return;
                        }
                        match singular_values(product) {
                            Ok(spec) => out.extend(spec.values.iter().map(|v| v.ln())),
                            Err(e) => err = Some(e),
                        }
                    });
                    err.map_or(Ok(out), Err)
                })
                .collect();
            let mut level = Vec::new();
            for b in blocks? {
                level.extend(b);
            }
            levels.push(level);
        }
        let eigen_levels = vec![None; n_max];
        Ok(SpectrumCache {
            levels,
            eigen_levels,
            mats,
        })
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    /// log singular values of all words of length n, `dim` floats per word.
    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n - 1]
    }

    /// Ensure eigenvalue moduli are cached for words of length n.
    pub fn eigen_level(&mut self, n: usize) -> Result<&[f64]> {
        if self.eigen_levels[n - 1].is_none() {
            let q = n.min(BLOCK_DEPTH);
            let prefixes = block_prefixes(&self.mats, q);
            let mats = &self.mats;
            let blocks: Result<Vec<Vec<f64>>> = prefixes
                .par_iter()
                .map(|prefix| {
                    let mut out: Vec<f64> = Vec::new();
                    let mut err = None;
                    dfs_block(mats, prefix, n - q, &mut |product| {
                        if err.is_some() {
                            return;
                        }
                        match eigen_moduli(product) {
                            Ok(spec) => out.extend(spec.values.iter().map(|v| v.ln())),
                            Err(e) => err = Some(e),
                        }
                    });
                    err.map_or(Ok(out), Err)
                })
                .collect();
            let mut level = Vec::new();
            for b in blocks? {
                level.extend(b);
            }
            self.eigen_levels[n - 1] = Some(level);
        }
        Ok(self.eigen_levels[n - 1].as_deref().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_handles_empty_and_spread() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        let got = log_sum_exp(&[0.0, (2.0_f64).ln()]);
        assert!((got - (3.0_f64).ln()).abs() < 1e-14);
    }
}
