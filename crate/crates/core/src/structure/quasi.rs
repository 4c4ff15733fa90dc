use crate::multilinear::{eigen_moduli, log_svf, FMat};
use crate::symbolic::{enumerate_words, word_count, word_product, Word};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Empirical quasimultiplicativity certificate: for every tested pair of
/// words some bridging word of length at most `k_used` recovers
/// `phi^s(A_i) phi^s(A_j) <= c phi^s(A_{ikj})`.
#[derive(Debug, Clone, Serialize)]
pub struct QuasimultReport {
    pub s: f64,
    pub found: bool,
    /// The empirical constant: 1 / (worst best-bridged ratio).
    pub c: f64,
    /// Smallest bridge-length budget that attains the reported constant.
    pub k_used: usize,
    pub n_max: usize,
    pub k_max: usize,
    /// Worst pair of words and its best bridged ratio.
    pub worst_pair: (String, String),
    pub worst_ratio: f64,
    /// Per word-length floor of the best-bridged ratio; decay across
    /// lengths is evidence against quasimultiplicativity.
    pub worst_by_length: Vec<(usize, f64)>,
}

/// Exhaustive scan over pairs of words up to `n_max`, bridged by words up
/// to `k_max`, maximizing `phi^s(A_{ikj}) / (phi^s(A_i) phi^s(A_j))` per
/// pair and reporting the worst pair.
pub fn quasimult_search(
    tuple: &MatrixTuple,
    s: f64,
    k_max: usize,
    n_max: usize,
    budget: u64,
) -> Result<QuasimultReport> {
    let alphabet = tuple.count();
    let mut words: Vec<Word> = Vec::new();
    for n in 1..=n_max {
        if word_count(alphabet, n).is_none_or(|c| c > budget) {
            return Err(Error::Budget(format!(
                "quasimultiplicativity scan needs {alphabet}^{n} words, over budget {budget}"
            )));
        }
        words.extend(enumerate_words(alphabet, n, budget)?);
    }
    let mut bridges: Vec<Word> = vec![Word::empty()];
    for k in 1..=k_max {
        bridges.extend(enumerate_words(alphabet, k, budget)?);
    }
    let products: Vec<FMat> = words
        .iter()
        .map(|w| word_product(tuple, w))
        .collect::<Result<_>>()?;
    let bridge_products: Vec<FMat> = bridges
        .iter()
        .map(|w| word_product(tuple, w))
        .collect::<Result<_>>()?;
    let log_phis: Vec<f64> = products
        .iter()
        .map(|m| log_svf(m, s))
        .collect::<Result<_>>()?;

    struct PairResult {
        log_ratio: f64,
        bridge_len: usize,
        i: usize,
        j: usize,
    }

    let pair_results: Result<Vec<PairResult>> = (0..words.len())
        .into_par_iter()
        .map(|i| {
            let mut worst: Option<PairResult> = None;
            for j in 0..words.len() {
                let mut best = f64::NEG_INFINITY;
                let mut best_len = 0usize;
                for (b, bp) in bridge_products.iter().enumerate() {
                    let m = products[i].mul(bp).mul(&products[j]);
                    let lr = log_svf(&m, s)? - log_phis[i] - log_phis[j];
                    if lr > best + 1e-12 {
                        best = lr;
                        best_len = bridges[b].len();
                    }
                }
                if worst.as_ref().is_none_or(|w| best < w.log_ratio) {
                    worst = Some(PairResult {
                        log_ratio: best,
                        bridge_len: best_len,
                        i,
                        j,
                    });
                }
            }
            Ok(worst.expect("nonempty word list"))
        })
        .collect();
    let pair_results = pair_results?;

    let mut worst: Option<&PairResult> = None;
    let mut k_used = 0usize;
    let mut worst_by_length: Vec<(usize, f64)> = (1..=n_max).map(|n| (n, f64::INFINITY)).collect();
    for r in &pair_results {
        if worst.is_none_or(|w| r.log_ratio < w.log_ratio) {
            worst = Some(r);
        }
        k_used = k_used.max(r.bridge_len);
        let len = words[r.i].len().max(words[r.j].len());
        let slot = &mut worst_by_length[len - 1];
        slot.1 = slot.1.min(r.log_ratio.exp());
    }
    let worst = worst.expect("nonempty scan");
    let worst_ratio = worst.log_ratio.exp();
    Ok(QuasimultReport {
        s,
        found: worst_ratio > 0.0 && worst_ratio.is_finite(),
        c: 1.0 / worst_ratio,
        k_used,
        n_max,
        k_max,
        worst_pair: (words[worst.i].to_string(), words[worst.j].to_string()),
        worst_ratio,
        worst_by_length,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualModulusReport {
    pub n: usize,
    pub all_equal: bool,
    /// Largest relative spread `|lambda_1|/|lambda_d| - 1` observed.
    pub max_spread: f64,
    pub first_failure: Option<String>,
}

/// Sampled witness for the equal-eigenvalue-moduli hypothesis: over all
/// words up to length `n`, do the eigenvalues of each product share one
/// modulus? (Scale-invariant, so determinant normalization is implicit.)
pub fn equal_modulus_probe(
    tuple: &MatrixTuple,
    n: usize,
    budget: u64,
) -> Result<EqualModulusReport> {
    const TOL: f64 = 1e-8;
    let alphabet = tuple.count();
    let mut max_spread = 0.0_f64;
    let mut first_failure = None;
    for len in 1..=n {
        if word_count(alphabet, len).is_none_or(|c| c > budget) {
            return Err(Error::Budget(format!(
                "equal-modulus probe over budget at length {len}"
            )));
        }
        for w in enumerate_words(alphabet, len, budget)? {
            let m = word_product(tuple, &w)?;
            let moduli = eigen_moduli(&m)?;
            let top = moduli.values[0];
            let bottom = *moduli.values.last().unwrap();
            if bottom <= 0.0 {
                return Err(Error::Domain(format!(
                    "word {w} has a zero eigenvalue modulus"
                )));
            }
            let spread = top / bottom - 1.0;
            if spread > max_spread {
                max_spread = spread;
            }
            if spread > TOL && first_failure.is_none() {
                first_failure = Some(w.to_string());
            }
        }
    }
    Ok(EqualModulusReport {
        n,
        all_equal: first_failure.is_none(),
        max_spread,
        first_failure,
    })
}
