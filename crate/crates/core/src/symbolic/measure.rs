use super::word::{enumerate_words, word_count, Word};
use crate::multilinear::FMat;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

const SPEC_TOL: f64 = 1e-12;

/// Bernoulli (i.i.d.) measure on the word space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliSpec {
    pub probs: Vec<f64>,
}

impl BernoulliSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Input(
                "Bernoulli spec needs at least 2 symbols".into(),
            ));
        }
        if probs.iter().any(|&p| !(0.0..=1.0 + SPEC_TOL).contains(&p)) {
            return Err(Error::Input(
                "Bernoulli probabilities must lie in [0,1]".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SPEC_TOL {
            return Err(Error::Input(format!(
                "Bernoulli probabilities sum to {sum}, not 1"
            )));
        }
        Ok(BernoulliSpec { probs })
    }

    pub fn uniform(n: usize) -> Self {
        BernoulliSpec {
            probs: vec![1.0 / n as f64; n],
        }
    }
}

/// Stationary Markov measure with visible states: the state space is the
/// symbol alphabet itself and a word's mass is
/// `stationary[i_1] * prod transition[i_t][i_{t+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovSpec {
    pub transition: Vec<Vec<f64>>,
    pub stationary: Vec<f64>,
}

impl MarkovSpec {
    pub fn new(transition: Vec<Vec<f64>>, stationary: Vec<f64>) -> Result<Self> {
        let spec = Self::with_stationary_unchecked(transition, stationary)?;
        let defect = spec.stationarity_defect();
        if defect > SPEC_TOL {
            return Err(Error::Input(format!(
                "stationary vector is not transition-invariant (defect {defect:.3e})"
            )));
        }
        Ok(spec)
    }

    /// Skips the stationarity check; used to exercise the invariance
    /// checker on deliberately broken specs.
    pub fn with_stationary_unchecked(
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let n = transition.len();
        if n < 2 || stationary.len() != n {
            return Err(Error::Input("Markov spec dimension mismatch".into()));
        }
        for row in &transition {
            if row.len() != n {
                return Err(Error::Input(
                    "Markov transition matrix must be square".into(),
                ));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SPEC_TOL || row.iter().any(|&p| p < -SPEC_TOL) {
                return Err(Error::Input(
                    "Markov rows must be probability vectors".into(),
                ));
            }
        }
        let ssum: f64 = stationary.iter().sum();
        if (ssum - 1.0).abs() > SPEC_TOL {
            return Err(Error::Input("stationary vector must sum to 1".into()));
        }
        Ok(MarkovSpec {
            transition,
            stationary,
        })
    }

    pub fn stationarity_defect(&self) -> f64 {
        let n = self.stationary.len();
        (0..n)
            .map(|j| {
                let image: f64 = (0..n)
                    .map(|i| self.stationary[i] * self.transition[i][j])
                    .sum();
                (image - self.stationary[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Measure defined by left/right Perron data of a nonnegative lifted tuple:
/// `mu([i]) = u^T M_i v / rho^{|i|}` with the normalization `u^T v = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronGibbsSpec {
    pub mats: Vec<FMat>,
    pub perron_value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Cyclicity index of the support digraph; 1 means aperiodic.
    pub period: usize,
}

impl PerronGibbsSpec {
    pub fn new(
        mats: Vec<FMat>,
        perron_value: f64,
        left: Vec<f64>,
        right: Vec<f64>,
        period: usize,
    ) -> Result<Self> {
        if mats.len() < 2 {
            return Err(Error::Input(
                "Perron-Gibbs spec needs at least 2 matrices".into(),
            ));
        }
        let m = mats[0].dim();
        if mats.iter().any(|x| x.dim() != m) || left.len() != m || right.len() != m {
            return Err(Error::Input("Perron-Gibbs spec dimension mismatch".into()));
        }
        for mat in &mats {
            for i in 0..m {
                for j in 0..m {
                    if mat[(i, j)] < 0.0 {
                        return Err(Error::Input(
                            "Perron-Gibbs matrices must be entrywise nonnegative".into(),
                        ));
                    }
                }
            }
        }
        if perron_value <= 0.0 {
            return Err(Error::Input("Perron value must be positive".into()));
        }
        let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
        if (dot - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "Perron vectors must be normalized to u^T v = 1 (got {dot})"
            )));
        }
        Ok(PerronGibbsSpec {
            mats,
            perron_value,
            left,
            right,
            period,
        })
    }

    fn mass(&self, word: &Word) -> Result<f64> {
        let m = self.mats[0].dim();
        let mut row = self.left.clone();
        let mut log_scale = 0.0_f64;
        for &s in word.symbols() {
            let idx = s as usize - 1;
            if idx >= self.mats.len() {
                return Err(Error::Input(format!("symbol {s} outside the lifted tuple")));
            }
            let mat = &self.mats[idx];
            let mut next = vec![0.0; m];
            for i in 0..m {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    next[j] += row[i] * mat[(i, j)];
                }
            }
            // keep the running row vector at unit scale
            let norm: f64 = next.iter().map(|x| x.abs()).sum();
            if norm > 0.0 {
                for x in &mut next {
                    *x /= norm;
                }
                log_scale += norm.ln();
            } else {
                return Ok(0.0);
            }
            row = next;
        }
        let dot: f64 = row.iter().zip(&self.right).map(|(a, b)| a * b).sum();
        let log_mass = log_scale + dot.ln() - word.len() as f64 * self.perron_value.ln();
        Ok(log_mass.exp())
    }
}

/// One of the three measure carriers every explicit equilibrium state
/// in this crate is made of.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Bernoulli(BernoulliSpec),
    Markov(MarkovSpec),
    PerronGibbs(PerronGibbsSpec),
}

impl MeasureSpec {
    pub fn alphabet(&self) -> usize {
        match self {
            MeasureSpec::Bernoulli(b) => b.probs.len(),
            MeasureSpec::Markov(m) => m.stationary.len(),
            MeasureSpec::PerronGibbs(p) => p.mats.len(),
        }
    }
}

/// Exact cylinder mass of a finite word.
pub fn cylinder_measure(spec: &MeasureSpec, word: &Word) -> Result<f64> {
    let n = spec.alphabet();
    for &s in word.symbols() {
        if s == 0 || s as usize > n {
            return Err(Error::Input(format!(
                "symbol {s} outside the alphabet 1..={n}"
            )));
        }
    }
    match spec {
        MeasureSpec::Bernoulli(b) => Ok(word
            .symbols()
            .iter()
            .map(|&s| b.probs[s as usize - 1])
            .product()),
        MeasureSpec::Markov(m) => {
            let syms = word.symbols();
            if syms.is_empty() {
                return Ok(1.0);
            }
            let mut mass = m.stationary[syms[0] as usize - 1];
            for pair in syms.windows(2) {
                mass *= m.transition[pair[0] as usize - 1][pair[1] as usize - 1];
            }
            Ok(mass)
        }
        MeasureSpec::PerronGibbs(p) => p.mass(word),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    ClosedForm,
    FiniteWord,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: EntropyMethod,
    /// Finite-n evaluations are infimum sequences, hence upper bounds on
    /// the entropy rate.
    pub is_upper_bound: bool,
    pub n: usize,
}

fn xlogx(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// Entropy rate of the measure. Bernoulli and Markov have closed forms; the
/// Perron-Gibbs carrier is evaluated at word length `n`, a nonincreasing
/// upper bound on the rate. Beyond the word budget the evaluation switches
/// to seeded sampling and says so in the method tag.
pub fn entropy_rate(
    spec: &MeasureSpec,
    n: usize,
    budget: u64,
    seed: u64,
) -> Result<EntropyEstimate> {
    match spec {
        MeasureSpec::Bernoulli(b) => Ok(EntropyEstimate {
            value: -b.probs.iter().map(|&p| xlogx(p)).sum::<f64>(),
            method: EntropyMethod::ClosedForm,
            is_upper_bound: false,
            n: 0,
        }),
        MeasureSpec::Markov(m) => {
            let value = -m
                .stationary
                .iter()
                .zip(&m.transition)
                .map(|(&pi, row)| pi * row.iter().map(|&p| xlogx(p)).sum::<f64>())
                .sum::<f64>();
            Ok(EntropyEstimate {
                value,
                method: EntropyMethod::ClosedForm,
                is_upper_bound: false,
                n: 0,
            })
        }
        MeasureSpec::PerronGibbs(_) => {
            if n == 0 {
                return Err(Error::Input("entropy evaluation needs n >= 1".into()));
            }
            let alphabet = spec.alphabet();
            match word_count(alphabet, n) {
                Some(c) if c <= budget => {
                    let mut acc = 0.0;
                    for word in enumerate_words(alphabet, n, budget)? {
                        let mass = cylinder_measure(spec, &word)?;
                        acc -= xlogx(mass);
                    }
                    Ok(EntropyEstimate {
                        value: acc / n as f64,
                        method: EntropyMethod::FiniteWord,
                        is_upper_bound: true,
                        n,
                    })
                }
                _ => {
                    // E_mu[-log mu([x|n])] = sum_i -mu log mu, estimated
                    // from mu-distributed samples.
                    let samples = 20_000usize;
                    let mut rng = ChaCha12Rng::seed_from_u64(seed);
                    let mut acc = 0.0;
                    for _ in 0..samples {
                        let word = sample_word(spec, n, &mut rng)?;
                        let mass = cylinder_measure(spec, &word)?;
                        if mass > 0.0 {
                            acc -= mass.ln();
                        }
                    }
                    Ok(EntropyEstimate {
                        value: acc / (samples as f64 * n as f64),
                        method: EntropyMethod::Sampled,
                        is_upper_bound: true,
                        n,
                    })
                }
            }
        }
    }
}

/// Draw a length-`n` word from the measure, symbol by symbol via the
/// conditional cylinder ratios.
pub fn sample_word(spec: &MeasureSpec, n: usize, rng: &mut impl Rng) -> Result<Word> {
    let alphabet = spec.alphabet();
    let mut symbols = Vec::with_capacity(n);
    match spec {
        MeasureSpec::Bernoulli(b) => {
            for _ in 0..n {
                symbols.push(draw(&b.probs, rng));
            }
        }
        MeasureSpec::Markov(m) => {
            if n > 0 {
                symbols.push(draw(&m.stationary, rng));
                for _ in 1..n {
                    let prev = *symbols.last().unwrap() as usize - 1;
                    symbols.push(draw(&m.transition[prev], rng));
                }
            }
        }
        MeasureSpec::PerronGibbs(p) => {
            let m = p.mats[0].dim();
            let mut row = p.left.clone();
            for _ in 0..n {
                let mut probs = Vec::with_capacity(alphabet);
                for mat in &p.mats {
                    let mut dot = 0.0;
                    for i in 0..m {
                        if row[i] == 0.0 {
                            continue;
                        }
                        for j in 0..m {
                            dot += row[i] * mat[(i, j)] * p.right[j];
                        }
                    }
                    probs.push(dot);
                }
                let total: f64 = probs.iter().sum();
                if total <= 0.0 {
                    return Err(Error::Numeric("Perron-Gibbs sampler hit zero mass".into()));
                }
                for q in &mut probs {
                    *q /= total;
                }
                let sym = draw(&probs, rng);
                symbols.push(sym);
                let mat = &p.mats[sym as usize - 1];
                let mut next = vec![0.0; m];
                for i in 0..m {
                    if row[i] == 0.0 {
                        continue;
                    }
                    for j in 0..m {
                        next[j] += row[i] * mat[(i, j)];
                    }
                }
                let norm: f64 = next.iter().sum();
                for x in &mut next {
                    *x /= norm;
                }
                row = next;
            }
        }
    }
    Word::new(symbols, alphabet)
}

fn draw(probs: &[f64], rng: &mut impl Rng) -> u8 {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return i as u8 + 1;
        }
    }
    probs.len() as u8
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub max_defect: f64,
    pub words_checked: u64,
    pub exhaustive: bool,
    pub n: usize,
}

/// Maximum shift-invariance defect `|sum_i mu([i w]) - mu([w])|` over
/// words of length `n` (or a seeded sample of them past the budget).
pub fn invariance_check(
    spec: &MeasureSpec,
    n: usize,
    budget: u64,
    seed: u64,
) -> Result<InvarianceReport> {
    let alphabet = spec.alphabet();
    let defect_of = |word: &Word| -> Result<f64> {
        let base = cylinder_measure(spec, word)?;
        let mut lifted = 0.0;
        for i in 1..=alphabet as u8 {
            lifted += cylinder_measure(spec, &word.prepend(i))?;
        }
        Ok((lifted - base).abs())
    };
    match word_count(alphabet, n) {
        Some(c) if c <= budget => {
            let mut max_defect = 0.0_f64;
            for word in enumerate_words(alphabet, n, budget)? {
                max_defect = max_defect.max(defect_of(&word)?);
            }
            Ok(InvarianceReport {
                max_defect,
                words_checked: c,
                exhaustive: true,
                n,
            })
        }
        _ => {
            let samples = 10_000u64;
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut max_defect = 0.0_f64;
            for _ in 0..samples {
                let symbols: Vec<u8> = (0..n)
                    .map(|_| rng.random_range(1..=alphabet as u8))
                    .collect();
                let word = Word::new(symbols, alphabet)?;
                max_defect = max_defect.max(defect_of(&word)?);
            }
            Ok(InvarianceReport {
                max_defect,
                words_checked: samples,
                exhaustive: false,
                n,
            })
        }
    }
}
