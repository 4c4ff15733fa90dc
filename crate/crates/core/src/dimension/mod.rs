//! Lyapunov exponents and Lyapunov dimension of shift-invariant measures,
//! and the dimension-drop verdict at the pressure level.

use crate::equilibrium::affinity_dimension_auto;
use crate::multilinear::{exterior_power, singular_values, FMat};
use crate::pressure::{pressure_estimate, sig17, AffinityDimension, Potential, PressureOpts};
use crate::structure::PermDetectOpts;
use crate::symbolic::{
    cylinder_measure, enumerate_words, sample_word, word_count, word_product, MeasureSpec,
};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LyapunovMethod {
    /// Exact per-axis averages; only for Bernoulli measures on diagonal
    /// tuples.
    ClosedForm,
    /// Finite-n cylinder average `(1/n) sum mu([w]) log alpha_i(A_w)`.
    /// The partial sums over the top k exponents are infimum sequences,
    /// so these are upper bounds for the aggregates.
    DeterministicWords { n: usize },
    /// Seeded sampling of mu-random words with exterior-power norm growth.
    MonteCarlo {
        samples: usize,
        length: usize,
        seed: u64,
    },
}

/// Lyapunov exponents, sorted nonincreasing, with per-exponent confidence
/// half-widths (zero for the deterministic methods).
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSpectrum {
    pub exponents: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub method: LyapunovMethod,
}

impl LyapunovSpectrum {
    /// `lambda(phi^s) = lambda_1 + .. + lambda_k + (s-k) lambda_{k+1}`,
    /// piecewise affine in s.
    pub fn svf_exponent(&self, s: f64) -> f64 {
        let d = self.exponents.len();
        if s >= d as f64 {
            let total: f64 = self.exponents.iter().sum();
            return s / d as f64 * total;
        }
        let k = s.floor() as usize;
        let mut acc: f64 = self.exponents[..k].iter().sum();
        if s > k as f64 {
            acc += (s - k as f64) * self.exponents[k];
        }
        acc
    }

    fn envelope(&self, sign: f64) -> LyapunovSpectrum {
        LyapunovSpectrum {
            exponents: self
                .exponents
                .iter()
                .zip(&self.half_widths)
                .map(|(e, h)| e + sign * h)
                .collect(),
            half_widths: vec![0.0; self.exponents.len()],
            method: self.method,
        }
    }
}

fn diagonal_closed_form(tuple: &MatrixTuple, probs: &[f64]) -> Result<LyapunovSpectrum> {
    let d = tuple.dim();
    let mut exps: Vec<f64> = (0..d)
        .map(|axis| {
            tuple
                .float_mats()
                .iter()
                .zip(probs)
                .map(|(m, &p)| p * m[(axis, axis)].abs().ln())
                .sum()
        })
        .collect();
    exps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(LyapunovSpectrum {
        exponents: exps,
        half_widths: vec![0.0; d],
        method: LyapunovMethod::ClosedForm,
    })
}

fn deterministic_words(
    tuple: &MatrixTuple,
    measure: &MeasureSpec,
    n: usize,
    budget: u64,
) -> Result<LyapunovSpectrum> {
    if n == 0 {
        return Err(Error::Input("word length must be at least 1".into()));
    }
    let d = tuple.dim();
    let alphabet = tuple.count();
    if word_count(alphabet, n).is_none_or(|c| c > budget) {
        return Err(Error::Budget(format!(
            "deterministic Lyapunov evaluation over {alphabet}^{n} words exceeds the budget"
        )));
    }
    let mut aggregates = vec![0.0_f64; d];
    for w in enumerate_words(alphabet, n, budget)? {
        let mass = cylinder_measure(measure, &w)?;
        if mass == 0.0 {
            continue;
        }
        let product = word_product(tuple, &w)?;
        let spec = singular_values(&product)?;
        let mut acc = 0.0;
        for (k, v) in spec.values.iter().enumerate() {
            acc += v.ln();
            aggregates[k] += mass * acc;
        }
    }
    let mut exps = Vec::with_capacity(d);
    let mut prev = 0.0;
    for agg in aggregates {
        exps.push((agg - prev) / n as f64);
        prev = agg;
    }
    Ok(LyapunovSpectrum {
        exponents: exps,
        half_widths: vec![0.0; d],
        method: LyapunovMethod::DeterministicWords { n },
    })
}

fn monte_carlo(
    tuple: &MatrixTuple,
    measure: &MeasureSpec,
    samples: usize,
    length: usize,
    seed: u64,
) -> Result<LyapunovSpectrum> {
    if samples == 0 || length == 0 {
        return Err(Error::Input(
            "Monte Carlo needs positive sample count and length".into(),
        ));
    }
    let d = tuple.dim();
    // exterior powers of the generators, reused across trajectories
    let wedge: Vec<Vec<FMat>> = (1..=d)
        .map(|k| {
            tuple
                .float_mats()
                .iter()
                .map(|m| exterior_power(m, k))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    // per-trajectory aggregates (lambda_1 + .. + lambda_k), reduced in
    // index order for reproducibility
    let traj: Result<Vec<Vec<f64>>> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let word = sample_word(measure, length, &mut rng)?;
            let mut rates = Vec::with_capacity(d);
            for mats_k in &wedge {
                let dim_k = mats_k[0].dim();
                let mut v: Vec<f64> = (0..dim_k)
                    .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
                    .collect();
                let norm0: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in &mut v {
                    *x /= norm0;
                }
                let mut acc = 0.0_f64;
                for &sym in word.symbols() {
                    v = mats_k[sym as usize - 1].apply(&v);
                    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if !(norm.is_finite() && norm > 0.0) {
                        return Err(Error::Numeric(
                            "wedge vector collapsed during Monte Carlo".into(),
                        ));
                    }
                    acc += norm.ln();
                    for x in &mut v {
                        *x /= norm;
                    }
                }
                rates.push(acc / length as f64);
            }
            Ok(rates)
        })
        .collect();
    let traj = traj?;
    let mut exps = Vec::with_capacity(d);
    let mut half_widths = Vec::with_capacity(d);
    let mut prev_mean = 0.0_f64;
    let mut prev_se = 0.0_f64;
    for k in 0..d {
        let vals: Vec<f64> = traj.iter().map(|r| r[k]).collect();
        let mean: f64 = vals.iter().sum::<f64>() / samples as f64;
        let var: f64 =
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / samples.max(2) as f64;
        let se = (var / samples as f64).sqrt();
        exps.push(mean - prev_mean);
        half_widths.push(se + prev_se);
        prev_mean = mean;
        prev_se = se;
    }
    Ok(LyapunovSpectrum {
        exponents: exps,
        half_widths,
        method: LyapunovMethod::MonteCarlo {
            samples,
            length,
            seed,
        },
    })
}

/// Lyapunov exponents of a measure under the tuple.
pub fn lyapunov_exponents(
    tuple: &MatrixTuple,
    measure: &MeasureSpec,
    method: &LyapunovMethod,
    budget: u64,
) -> Result<LyapunovSpectrum> {
    if measure.alphabet() != tuple.count() {
        return Err(Error::Input(format!(
            "measure alphabet {} does not match the tuple of {} matrices",
            measure.alphabet(),
            tuple.count()
        )));
    }
    match method {
        LyapunovMethod::ClosedForm => match measure {
            MeasureSpec::Bernoulli(b) if tuple.is_diagonal() => {
                diagonal_closed_form(tuple, &b.probs)
            }
            _ => Err(Error::Input(
                "closed form needs a Bernoulli measure on a diagonal tuple".into(),
            )),
        },
        LyapunovMethod::DeterministicWords { n } => deterministic_words(tuple, measure, *n, budget),
        LyapunovMethod::MonteCarlo {
            samples,
            length,
            seed,
        } => monte_carlo(tuple, measure, *samples, *length, *seed),
    }
}

/// Lyapunov dimension: the root of `s -> h + lambda(phi^s)`, capped at d.
/// The function is piecewise affine in s, so the root is solved segment by
/// segment; spectrum half-widths widen the result into an interval.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovDimension {
    pub lo: f64,
    pub hi: f64,
    pub entropy: f64,
    pub spectrum: LyapunovSpectrum,
    /// True when `h + lambda(phi^s)` stayed nonnegative on [0, d] and the
    /// dimension was capped.
    pub capped: bool,
}

fn piecewise_root(entropy: f64, spectrum: &LyapunovSpectrum, d: usize) -> (f64, bool) {
    let g = |s: f64| entropy + spectrum.svf_exponent(s);
    if g(0.0) <= 0.0 {
        return (0.0, false);
    }
    for k in 0..d {
        let (a, b) = (k as f64, (k + 1) as f64);
        let (ga, gb) = (g(a), g(b));
        if gb > 0.0 {
            continue;
        }
        if (ga - gb).abs() < 1e-300 {
            return (b, false);
        }
        return (a + (b - a) * ga / (ga - gb), false);
    }
    (d as f64, true)
}

pub fn lyapunov_dimension(
    entropy: f64,
    spectrum: &LyapunovSpectrum,
    dim: usize,
) -> LyapunovDimension {
    // negative envelope of the exponents gives the smaller root
    let (lo, capped_lo) = piecewise_root(entropy, &spectrum.envelope(-1.0), dim);
    let (hi, capped_hi) = piecewise_root(entropy, &spectrum.envelope(1.0), dim);
    LyapunovDimension {
        lo: lo.min(hi),
        hi: hi.max(lo),
        entropy,
        spectrum: spectrum.clone(),
        capped: capped_lo || capped_hi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropVerdict {
    StrictDrop,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub s: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
}

/// Verdict on the affinity-dimension drop when one matrix is removed.
#[derive(Debug, Clone, Serialize)]
pub struct DropReport {
    pub full: AffinityDimension,
    pub reduced: AffinityDimension,
    pub verdict: DropVerdict,
    /// `full.lo - reduced.hi`; positive exactly for StrictDrop.
    pub gap: f64,
    pub grid: Vec<GapRow>,
}

#[derive(Debug, Clone, Default)]
pub struct DropOpts {
    pub pressure: PressureOpts,
    pub detect: PermDetectOpts,
    pub grid: Option<Vec<f64>>,
}

/// Affinity-dimension drop test: remove matrix `remove` (0-based) and
/// compare the affinity-dimension intervals. StrictDrop is only declared
/// when the intervals separate; overlapping intervals are Inconclusive,
/// never a claimed drop.
pub fn dimension_drop(tuple: &MatrixTuple, remove: usize, opts: &DropOpts) -> Result<DropReport> {
    let reduced_tuple = tuple.without(remove)?;
    let full = affinity_dimension_auto(tuple, &opts.pressure, &opts.detect)?;
    let reduced = affinity_dimension_auto(&reduced_tuple, &opts.pressure, &opts.detect)?;
    let gap = full.lo - reduced.hi;
    let verdict = if gap > 0.0 {
        DropVerdict::StrictDrop
    } else {
        DropVerdict::Inconclusive
    };
    let d = tuple.dim() as f64;
    let grid_points: Vec<f64> = match &opts.grid {
        Some(g) => g.clone(),
        None => (0..=12).map(|i| d * i as f64 / 12.0).collect(),
    };
    let mut grid = Vec::with_capacity(grid_points.len());
    for s in grid_points {
        let pf = pressure_estimate(tuple, &Potential::svf(s), &opts.pressure)?;
        let pr = pressure_estimate(&reduced_tuple, &Potential::svf(s), &opts.pressure)?;
        grid.push(GapRow {
            s,
            gap_lower: pf.lower - pr.upper,
            gap_upper: pf.upper - pr.lower,
        });
    }
    Ok(DropReport {
        full,
        reduced,
        verdict,
        gap,
        grid,
    })
}

/// CSV sidecar for the per-s pressure gaps: `s,gap_lower,gap_upper`.
pub fn drop_grid_to_csv(rows: &[GapRow]) -> String {
    let mut out = String::from("s,gap_lower,gap_upper\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            sig17(row.s),
            sig17(row.gap_lower),
            sig17(row.gap_upper)
        ));
    }
    out
}
