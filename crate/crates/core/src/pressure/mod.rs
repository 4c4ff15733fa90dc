//! Partition sums and certified bounds for the singular value pressure
//! `P(phi^s) = lim (1/n) log sum_{|i|=n} phi^s(A_i)` and the norm pressure,
//! exact pressure for entrywise-nonnegative tuples, and affinity-dimension
//! root finding.

mod sums;

pub(crate) use sums::{log_sum_exp, SpectrumCache};

use crate::multilinear::{log_chi, log_svf_from_logs, singular_values, FMat};
use crate::perron;
use crate::symbolic::DEFAULT_WORD_BUDGET;
use crate::tuple::MatrixTuple;
use crate::{Error, Result};
use serde::Serialize;

/// The two potentials the pressure machinery understands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Potential {
    /// Singular value function `phi^s`.
    Svf { s: f64 },
    /// `||.||^t`.
    NormPow { t: f64 },
}

impl Potential {
    pub fn svf(s: f64) -> Self {
        Potential::Svf { s }
    }

    pub fn norm_pow(t: f64) -> Self {
        Potential::NormPow { t }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            Potential::Svf { s } => {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Error::Input(format!("svf parameter s={s} must be >= 0")));
                }
                let _ = dim;
                Ok(())
            }
            Potential::NormPow { t } => {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::Input(format!("norm power t={t} must be >= 0")));
                }
                Ok(())
            }
        }
    }

    /// log potential from sorted log singular values.
    fn eval_logs(&self, logs: &[f64], dim: usize) -> f64 {
        match *self {
            Potential::Svf { s } => log_svf_from_logs(logs, s, dim),
            Potential::NormPow { t } => t * logs[0],
        }
    }

    fn eval_mat(&self, m: &FMat) -> Result<f64> {
        let spec = singular_values(m)?;
        let smallest = spec.min();
        if smallest <= 0.0 {
            return Err(Error::Domain("word product is numerically singular".into()));
        }
        let logs: Vec<f64> = spec.values.iter().map(|v| v.ln()).collect();
        Ok(self.eval_logs(&logs, m.dim()))
    }
}

/// Options shared by the bound computations.
#[derive(Debug, Clone, Copy)]
pub struct PressureOpts {
    pub n_max: usize,
    /// Word-length ceiling for the eigenvalue-based spectral minorant,
    /// which pays an eigensolve per word; deeper words sharpen the lower
    /// bound slowly, so this is capped separately from `n_max`.
    pub spectral_n_max: usize,
    pub budget: u64,
    pub tol: f64,
}

impl Default for PressureOpts {
    fn default() -> Self {
        PressureOpts {
            n_max: 8,
            spectral_n_max: 6,
            budget: DEFAULT_WORD_BUDGET,
            tol: 1e-9,
        }
    }
}

/// Certified interval for a pressure value, with the provenance of each
/// bound.
#[derive(Debug, Clone, Serialize)]
pub struct PressureEstimate {
    pub lower: f64,
    pub upper: f64,
    pub n_used: usize,
    pub methods: Vec<String>,
    pub exact: bool,
}

impl PressureEstimate {
    pub fn exact_value(value: f64, method: &str) -> Self {
        PressureEstimate {
            lower: value,
            upper: value,
            n_used: 0,
            methods: vec![format!("exact:{method}")],
            exact: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn overlaps(&self, other: &PressureEstimate) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// `log sum_{|i|=n} pot(A_i)`, accumulated in the log domain with the
/// deterministic fixed-block reduction.
pub fn partition_sum(tuple: &MatrixTuple, pot: &Potential, n: usize, budget: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Input("partition sums need n >= 1".into()));
    }
    pot.validate(tuple.dim())?;
    sums::log_sum_over_words(tuple, n, budget, |product| pot.eval_mat(product))
}

/// Certified upper bound: by subadditivity every finite-n average
/// `(1/n) log sum` dominates the pressure, so the minimum over
/// `1 <= n <= n_max` is an upper bound (Fekete).
pub fn pressure_upper(
    tuple: &MatrixTuple,
    pot: &Potential,
    opts: &PressureOpts,
) -> Result<(f64, usize)> {
    let mut best = f64::INFINITY;
    let mut best_n = 0;
    for n in 1..=opts.n_max.max(1) {
        let avg = partition_sum(tuple, pot, n, opts.budget)? / n as f64;
        if avg < best {
            best = avg;
            best_n = n;
        }
    }
    Ok((best, best_n))
}

/// Certified lower bound: the larger of
///
/// * the determinant minorant `log sum_i |det A_i|^{s/d}` (the potential of
///   every product dominates `|det|^{s/d}`, which is multiplicative), and
/// * the spectral minorant `max_{|i| <= n_max} (1/|i|) log chi^s(A_i)`,
///   valid because `||(A^{wedge k})^m|| >= rho(A^{wedge k})^m`.
///
/// Returns the bound and which minorant was active.
pub fn pressure_lower(
    tuple: &MatrixTuple,
    pot: &Potential,
    opts: &PressureOpts,
) -> Result<(f64, String)> {
    pot.validate(tuple.dim())?;
    let det_bound = det_minorant(tuple, pot)?;
    let mut best = det_bound;
    let mut method = "determinant".to_string();
    let spectral = spectral_minorant(tuple, pot, opts)?;
    if let Some((value, word_len)) = spectral {
        if value > best {
            best = value;
            method = format!("spectral(word_len={word_len})");
        }
    }
    Ok((best, method))
}

fn det_minorant(tuple: &MatrixTuple, pot: &Potential) -> Result<f64> {
    let d = tuple.dim() as f64;
    let exponent = match *pot {
        Potential::Svf { s } => s / d,
        Potential::NormPow { t } => t / d,
    };
    let logs: Vec<f64> = tuple
        .float_mats()
        .iter()
        .map(|m| exponent * m.det().abs().ln())
        .collect();
    Ok(log_sum_exp(&logs))
}

fn spectral_minorant(
    tuple: &MatrixTuple,
    pot: &Potential,
    opts: &PressureOpts,
) -> Result<Option<(f64, usize)>> {
    let d = tuple.dim();
    // chi is defined for s < d; at s >= d the svf is multiplicative and the
    // determinant minorant is already exact.
    if let Potential::Svf { s } = *pot {
        if s >= d as f64 {
            return Ok(None);
        }
    }
    let log_pot_spectral = |m: &FMat| -> Result<f64> {
        match *pot {
            Potential::Svf { s } => log_chi(m, s),
            Potential::NormPow { t } => {
                let moduli = crate::multilinear::eigen_moduli(m)?;
                Ok(t * moduli.spectral_radius().ln())
            }
        }
    };
    let mut best: Option<(f64, usize)> = None;
    for n in 1..=opts.n_max.min(opts.spectral_n_max) {
        // A max over words needs no reduction tree; evaluate sequentially.
        let alphabet = tuple.count();
        if crate::symbolic::word_count(alphabet, n).is_none_or(|c| c > opts.budget) {
            break;
        }
        for word in crate::symbolic::enumerate_words(alphabet, n, opts.budget)? {
            let product = crate::symbolic::word_product(tuple, &word)?;
            let value = log_pot_spectral(&product)? / n as f64;
            if best.is_none_or(|(b, _)| value > b) {
                best = Some((value, n));
            }
        }
    }
    Ok(best)
}

/// Tuples of scalar multiples of isometries have a multiplicative
/// potential, hence exact pressure. Returns the per-matrix scale factors
/// when that applies.
pub(crate) fn similitude_factors(tuple: &MatrixTuple) -> Option<Vec<f64>> {
    let mut factors = Vec::with_capacity(tuple.count());
    for m in tuple.float_mats() {
        let spec = singular_values(m).ok()?;
        let top = spec.values[0];
        let bottom = spec.min();
        if top <= 0.0 || (top - bottom).abs() > 1e-12 * top {
            return None;
        }
        factors.push(top);
    }
    Some(factors)
}

fn exact_pressure_shortcut(tuple: &MatrixTuple, pot: &Potential) -> Result<Option<(f64, String)>> {
    // similitude: pot(A_i) = r_i^s (or r_i^t), multiplicative
    if let Some(factors) = similitude_factors(tuple) {
        let exponent = match *pot {
            Potential::Svf { s } => s,
            Potential::NormPow { t } => t,
        };
        let logs: Vec<f64> = factors.iter().map(|r| exponent * r.ln()).collect();
        return Ok(Some((log_sum_exp(&logs), "similitude".into())));
    }
    // s >= d: phi^s = |det|^{s/d} is multiplicative
    if let Potential::Svf { s } = *pot {
        if s >= tuple.dim() as f64 {
            return Ok(Some((
                det_minorant(tuple, pot)?,
                "determinant-branch".into(),
            )));
        }
    }
    Ok(None)
}

/// Two-sided pressure estimate at one potential.
pub fn pressure_estimate(
    tuple: &MatrixTuple,
    pot: &Potential,
    opts: &PressureOpts,
) -> Result<PressureEstimate> {
    pot.validate(tuple.dim())?;
    if let Some((value, method)) = exact_pressure_shortcut(tuple, pot)? {
        return Ok(PressureEstimate::exact_value(value, &method));
    }
    let (upper, n_used) = pressure_upper(tuple, pot, opts)?;
    let (lower, lower_method) = pressure_lower(tuple, pot, opts)?;
    Ok(PressureEstimate {
        lower: lower.min(upper),
        upper,
        n_used,
        methods: vec![
            format!("upper:fekete(n={n_used})"),
            format!("lower:{lower_method}"),
        ],
        exact: false,
    })
}

/// Exact norm pressure of an entrywise-nonnegative tuple:
/// `P(||.||) = log rho(sum_i M_i)`. All matrix norms are comparable to the
/// entry sum, and the entry sum of products telescopes through
/// `(sum_i M_i)^n`, so the limit is the Perron root of the sum matrix.
pub fn pressure_exact_nonneg(tuple: &MatrixTuple) -> Result<f64> {
    let d = tuple.dim();
    let mut sum = FMat::zero(d);
    for m in tuple.float_mats() {
        for i in 0..d {
            for j in 0..d {
                let e = m[(i, j)];
                if e < 0.0 {
                    return Err(Error::Input(
                        "exact nonnegative pressure needs entrywise-nonnegative matrices".into(),
                    ));
                }
                sum[(i, j)] += e;
            }
        }
    }
    Ok(perron::perron_root(&sum)?.ln())
}

/// One row of a pressure curve.
#[derive(Debug, Clone, Serialize)]
pub struct PressureRow {
    pub s: f64,
    pub estimate: PressureEstimate,
}

/// Pressure estimates over a grid of `s` values.
pub fn pressure_curve(
    tuple: &MatrixTuple,
    s_grid: &[f64],
    opts: &PressureOpts,
) -> Result<Vec<PressureRow>> {
    let d = tuple.dim() as f64;
    for &s in s_grid {
        if !(0.0..=d).contains(&s) {
            return Err(Error::Input(format!("grid point s={s} outside [0, {d}]")));
        }
    }
    s_grid
        .iter()
        .map(|&s| {
            Ok(PressureRow {
                s,
                estimate: pressure_estimate(tuple, &Potential::svf(s), opts)?,
            })
        })
        .collect()
}

/// CSV emission for a pressure curve: `s,lower,upper,exact,n_used`, one row
/// per grid point, 17 significant digits.
pub fn curve_to_csv(rows: &[PressureRow]) -> String {
    let mut out = String::from("s,lower,upper,exact,n_used\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig17(row.s),
            sig17(row.estimate.lower),
            sig17(row.estimate.upper),
            row.estimate.exact,
            row.estimate.n_used
        ));
    }
    out
}

/// 17-significant-digit decimal rendering used by every CSV and JSON
/// surface, so identical runs produce identical bytes.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of affinity-dimension root finding.
#[derive(Debug, Clone, Serialize)]
pub struct AffinityDimension {
    pub lo: f64,
    pub hi: f64,
    /// Strict-decrease of the pressure in `s` is only guaranteed for
    /// contractive tuples; otherwise the result is flagged non-certified.
    pub certified: bool,
    pub exact: bool,
    pub method: String,
}

impl AffinityDimension {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Root of a continuous strictly-decreasing function on [0, d] by
/// bisection; `f(0)` is assumed positive. Returns `d` when f stays
/// positive on the whole interval (the affinity dimension is capped at d).
fn bisect_root(f: &mut dyn FnMut(f64) -> Result<f64>, d: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0_f64;
    let mut hi = d;
    let f_hi = f(hi)?;
    if f_hi > 0.0 {
        return Ok(d);
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        // ties toward the smaller s
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Affinity dimension: exact similitude shortcut, otherwise the certified
/// bound curves of [`affinity_dimension_bounds`].
pub fn affinity_dimension(tuple: &MatrixTuple, opts: &PressureOpts) -> Result<AffinityDimension> {
    let d = tuple.dim() as f64;
    let contractive = tuple.is_contractive()?;
    if let Some(factors) = similitude_factors(tuple) {
        // exact root of log sum r_i^s = 0
        let logs: Vec<f64> = factors.iter().map(|r| r.ln()).collect();
        let mut f = |s: f64| -> Result<f64> {
            Ok(log_sum_exp(&logs.iter().map(|l| s * l).collect::<Vec<_>>()))
        };
        let root = bisect_root(&mut f, d, opts.tol)?;
        return Ok(AffinityDimension {
            lo: root,
            hi: root,
            certified: contractive,
            exact: true,
            method: "similitude".into(),
        });
    }
    affinity_dimension_bounds(tuple, opts)
}

/// Affinity dimension from the certified bound curves alone: the lower
/// bound curve sits under the pressure and both are decreasing, so its
/// root brackets the dimension from below; the upper-bound curve's root
/// brackets it from above. Both are clamped to [0, d].
pub fn affinity_dimension_bounds(
    tuple: &MatrixTuple,
    opts: &PressureOpts,
) -> Result<AffinityDimension> {
    let d = tuple.dim() as f64;
    let contractive = tuple.is_contractive()?;
    // Cache the word spectra once; the bisection then reuses them at every s.
    let mut cache = SpectrumCache::build(tuple, opts.n_max, opts.budget)?;
    let dim = tuple.dim();
    let upper_at = |cache: &SpectrumCache, s: f64| -> f64 {
        let mut best = f64::INFINITY;
        for n in 1..=cache.n_max() {
            let level = cache.level(n);
            let logs: Vec<f64> = level
                .chunks(dim)
                .map(|w| log_svf_from_logs(w, s, dim))
                .collect();
            best = best.min(log_sum_exp(&logs) / n as f64);
        }
        best
    };
    let log_abs_dets: Vec<f64> = tuple
        .float_mats()
        .iter()
        .map(|m| m.det().abs().ln())
        .collect();
    // Make sure eigen data exists before taking closures.
    for n in 1..=cache.n_max().min(opts.spectral_n_max) {
        cache.eigen_level(n)?;
    }
    let cache = cache; // freeze
    let lower_at = |s: f64| -> f64 {
        let det: f64 = log_sum_exp(&log_abs_dets.iter().map(|l| s / d * l).collect::<Vec<_>>());
        let mut best = det;
        if s < d {
            for n in 1..=cache.n_max() {
                if let Some(level) = cache.eigen_levels[n - 1].as_deref() {
                    for w in level.chunks(dim) {
                        best = best.max(log_svf_from_logs(w, s, dim) / n as f64);
                    }
                }
            }
        }
        best
    };

    let mut fu = |s: f64| -> Result<f64> { Ok(upper_at(&cache, s)) };
    let hi = bisect_root(&mut fu, d, opts.tol)?;
    let mut fl = |s: f64| -> Result<f64> { Ok(lower_at(s)) };
    let lo = bisect_root(&mut fl, d, opts.tol)?;
    let lo = lo.min(hi);
    Ok(AffinityDimension {
        lo,
        hi,
        certified: contractive,
        exact: false,
        method: format!("bounds(n_max={})", opts.n_max),
    })
}

/// Affinity dimension when an exact pressure function is available
/// (diagonal and generalized-permutation routes supply one): a single
/// bisection of `s -> P(s)` to width `tol`.
pub fn affinity_dimension_exact(
    pressure_of: &mut dyn FnMut(f64) -> Result<f64>,
    dim: usize,
    contractive: bool,
    tol: f64,
    method: &str,
) -> Result<AffinityDimension> {
    let root = bisect_root(pressure_of, dim as f64, tol)?;
    Ok(AffinityDimension {
        lo: root,
        hi: root,
        certified: contractive,
        exact: true,
        method: method.to_string(),
    })
}
