use crate::multilinear::{combinations, combo_rank, FMat};
use crate::structure::PermutationForm;
use crate::{Error, Result};

/// The nonnegative lift of a generalized-permutation tuple: a tuple of
/// `(d-k) * C(d,k)`-dimensional generalized permutation matrices with
/// entries `(prod_{j in S} |a_j|) |a_i|^{s-k}`, indexed by pairs `(S, i)`
/// with `S` a k-combination and `i` outside `S`. The map is a semigroup
/// homomorphism and the operator norm of a lifted product equals the
/// singular value function of the original product.
#[derive(Debug, Clone)]
pub struct LiftedTuple {
    pub mats: Vec<FMat>,
    /// (combination, extra index) label per lift coordinate, 0-based.
    pub labels: Vec<(Vec<usize>, usize)>,
    pub k: usize,
    pub s: f64,
}

impl LiftedTuple {
    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    /// Verify the one-nonzero-per-row-and-column shape.
    pub fn is_generalized_permutation(&self) -> bool {
        for m in &self.mats {
            let d = m.dim();
            for col in 0..d {
                let hits = (0..d).filter(|&r| m[(r, col)] != 0.0).count();
                if hits != 1 {
                    return false;
                }
            }
            for row in 0..d {
                let hits = (0..d).filter(|&c| m[(row, c)] != 0.0).count();
                if hits != 1 {
                    return false;
                }
            }
        }
        true
    }
}

fn pair_rank(combo: &[usize], extra: usize, d: usize, k: usize) -> usize {
    let others: Vec<usize> = (0..d).filter(|x| !combo.contains(x)).collect();
    let pos = others
        .iter()
        .position(|&x| x == extra)
        .expect("extra outside combo");
    combo_rank(combo, d) * (d - k) + pos
}

/// Build the lift of one generalized permutation matrix given its
/// permutation and scalar data.
fn lift_matrix(perm: &[usize], scalars: &[f64], s: f64, k: usize) -> FMat {
    let d = perm.len();
    let combos = combinations(d, k);
    let dim = combos.len() * (d - k);
    let mut out = FMat::zero(dim);
    for combo in &combos {
        let others: Vec<usize> = (0..d).filter(|x| !combo.contains(x)).collect();
        for &i in &others {
            let col = pair_rank(combo, i, d, k);
            let mut weight = scalars[i].abs().powf(s - k as f64);
            for &j in combo {
                weight *= scalars[j].abs();
            }
            let mut image: Vec<usize> = combo.iter().map(|&j| perm[j]).collect();
            image.sort_unstable();
            let row = pair_rank(&image, perm[i], d, k);
            out[(row, col)] = weight;
        }
    }
    out
}

/// Lift a generalized-permutation tuple at parameter `s` with `k < s < k+1`.
pub fn permutation_lift(form: &PermutationForm, s: f64, k: usize) -> Result<LiftedTuple> {
    let d = form.perms[0].len();
    if k >= d {
        return Err(Error::Input(format!(
            "k={k} out of range for dimension {d}"
        )));
    }
    if !(s > k as f64 && s < (k + 1) as f64) {
        return Err(Error::Input(format!(
            "lift parameter s={s} must satisfy {k} < s < {}",
            k + 1
        )));
    }
    let mats = form
        .perms
        .iter()
        .zip(&form.scalars_f)
        .map(|(perm, scalars)| lift_matrix(perm, scalars, s, k))
        .collect();
    let combos = combinations(d, k);
    let mut labels = Vec::new();
    for combo in &combos {
        for i in (0..d).filter(|x| !combo.contains(x)) {
            labels.push((combo.clone(), i));
        }
    }
    Ok(LiftedTuple { mats, labels, k, s })
}

/// Lift at an integer parameter `s = k`: the singular value function
/// collapses to the norm of the k-th exterior power, whose absolute value
/// is again a generalized permutation matrix indexed by k-combinations
/// with weights `prod_{j in S} |a_j|`.
pub fn wedge_abs_lift(form: &PermutationForm, k: usize) -> Result<LiftedTuple> {
    let d = form.perms[0].len();
    if k == 0 || k > d {
        return Err(Error::Input(format!(
            "integer lift needs 1 <= k <= {d}, got {k}"
        )));
    }
    let combos = combinations(d, k);
    let dim = combos.len();
    let mats = form
        .perms
        .iter()
        .zip(&form.scalars_f)
        .map(|(perm, scalars)| {
            let mut out = FMat::zero(dim);
            for combo in &combos {
                let col = combo_rank(combo, d);
                let weight: f64 = combo.iter().map(|&j| scalars[j].abs()).product();
                let mut image: Vec<usize> = combo.iter().map(|&j| perm[j]).collect();
                image.sort_unstable();
                let row = combo_rank(&image, d);
                out[(row, col)] = weight;
            }
            out
        })
        .collect();
    let labels = combos.into_iter().map(|c| (c, usize::MAX)).collect();
    Ok(LiftedTuple {
        mats,
        labels,
        k,
        s: k as f64,
    })
}
