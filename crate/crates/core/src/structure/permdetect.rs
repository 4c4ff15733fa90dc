use super::irreducible::StructureEntry;
use super::rank::RowSpace;
use crate::multilinear::{Entry, FMat, Mat, QMat};
use crate::scalar::{rational_to_f64, Rational};
use crate::symbolic::{enumerate_words, word_product, word_product_exact};
use crate::tuple::MatrixTuple;
use crate::Result;
use num_traits::{Signed, Zero};

/// A tuple conjugated into generalized permutation form:
/// `X^{-1} A_i X e_j = a_{i,j} e_{perm_i(j)}`.
#[derive(Debug, Clone)]
pub struct PermutationForm {
    pub basis_f: FMat,
    pub basis_q: Option<QMat>,
    /// `perm[i][j]` = image of axis j under matrix i (0-based).
    pub perms: Vec<Vec<usize>>,
    /// `scalars[i][j]` = the nonzero coefficient a_{i,j}.
    pub scalars_f: Vec<Vec<f64>>,
    pub scalars_q: Option<Vec<Vec<Rational>>>,
}

impl PermutationForm {
    /// Largest relative magnitude found off the permutation pattern when
    /// conjugating the tuple back; exactly zero on exact detections.
    pub fn residual(&self, tuple: &MatrixTuple) -> Result<f64> {
        if let (Some(x), Some(scalars), Some(mats)) =
            (&self.basis_q, &self.scalars_q, tuple.exact_mats())
        {
            let xi = x.inverse()?;
            for (i, a) in mats.iter().enumerate() {
                let m = xi.mul(a).mul(x);
                for col in 0..m.dim() {
                    for row in 0..m.dim() {
                        let expected = if self.perms[i][col] == row {
                            scalars[i][col].clone()
                        } else {
                            Rational::zero()
                        };
                        if m[(row, col)] != expected {
                            return Ok(f64::INFINITY);
                        }
                    }
                }
            }
            return Ok(0.0);
        }
        let x = &self.basis_f;
        let xi = x.inverse()?;
        let mut worst = 0.0_f64;
        for (i, a) in tuple.float_mats().iter().enumerate() {
            let m = xi.mul(a).mul(x);
            let scale = m.max_abs().max(1e-300);
            for col in 0..m.dim() {
                for row in 0..m.dim() {
                    let expected = if self.perms[i][col] == row {
                        self.scalars_f[i][col]
                    } else {
                        0.0
                    };
                    worst = worst.max((m[(row, col)] - expected).abs() / scale);
                }
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PermDetectOpts {
    /// Candidate eigenlines come from word products up to this length.
    pub max_word_len: usize,
    /// Orbit-closure budget: give up when the line orbit exceeds this.
    pub orbit_budget: usize,
}

impl Default for PermDetectOpts {
    fn default() -> Self {
        PermDetectOpts {
            max_word_len: 4,
            orbit_budget: 64,
        }
    }
}

const LINE_ANGLE_TOL: f64 = 1e-8;

/// Canonical representative of the line spanned by `v` on the float
/// backend: unit vector whose first significant coordinate is positive.
fn canonical_line_f(v: &[f64]) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return None;
    }
    let mut out: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let lead = out.iter().find(|x| x.abs() > LINE_ANGLE_TOL)?;
    if *lead < 0.0 {
        for x in &mut out {
            *x = -*x;
        }
    }
    Some(out)
}

/// Canonical representative on the exact backend: clear denominators,
/// divide by the gcd, make the first nonzero entry positive.
fn canonical_line_q(v: &[Rational]) -> Option<Vec<Rational>> {
    use num_bigint::BigInt;
    if v.iter().all(|x| x.is_zero()) {
        return None;
    }
    let mut denom_lcm = BigInt::from(1);
    for x in v {
        denom_lcm = num_integer::lcm(denom_lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let mut g = BigInt::from(0);
    for i in &ints {
        g = num_integer::gcd(g, i.clone());
    }
    let mut out: Vec<Rational> = ints
        .iter()
        .map(|i| Rational::from_integer(i / &g))
        .collect();
    let lead_negative = out.iter().find(|x| !x.is_zero()).map(|x| x.is_negative())?;
    if lead_negative {
        for x in &mut out {
            *x = -x.clone();
        }
    }
    Some(out)
}

trait LineOps: StructureEntry {
    fn canonical(v: &[Self]) -> Option<Vec<Self>>;
    fn lines_equal(a: &[Self], b: &[Self]) -> bool;
}

impl LineOps for f64 {
    fn canonical(v: &[f64]) -> Option<Vec<f64>> {
        canonical_line_f(v)
    }
    fn lines_equal(a: &[f64], b: &[f64]) -> bool {
        // both canonical unit vectors: principal angle below tolerance
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (1.0 - dot.abs()) < LINE_ANGLE_TOL
    }
}

impl LineOps for Rational {
    fn canonical(v: &[Rational]) -> Option<Vec<Rational>> {
        canonical_line_q(v)
    }
    fn lines_equal(a: &[Rational], b: &[Rational]) -> bool {
        a == b
    }
}

/// True when `m` has exactly one nonzero entry in every row and column.
fn is_generalized_permutation<T: Entry>(m: &Mat<T>, scale: &T) -> Option<(Vec<usize>, Vec<T>)> {
    let d = m.dim();
    let mut perm = vec![usize::MAX; d];
    let mut scalars = Vec::with_capacity(d);
    let mut rows_used = vec![false; d];
    for col in 0..d {
        let mut hit = None;
        for row in 0..d {
            if !m[(row, col)].is_negligible(scale) {
                if hit.is_some() {
                    return None;
                }
                hit = Some(row);
            }
        }
        let row = hit?;
        if rows_used[row] {
            return None;
        }
        rows_used[row] = true;
        perm[col] = row;
        scalars.push(m[(row, col)].clone());
    }
    Some((perm, scalars))
}

/// basis change, permutations, and scalars of a successful detection
type DetectedForm<T> = (Mat<T>, Vec<Vec<usize>>, Vec<Vec<T>>);

fn detect_generic<T: LineOps>(
    mats: &[Mat<T>],
    candidates: Vec<Vec<T>>,
    opts: &PermDetectOpts,
) -> Option<DetectedForm<T>> {
    let d = mats[0].dim();
    let scale = {
        let mut s = T::zero();
        for m in mats {
            for i in 0..d {
                for x in m.row(i) {
                    if x.abs_cmp(&s) == std::cmp::Ordering::Greater {
                        s = x.clone();
                    }
                }
            }
        }
        s
    };
    // fast path: already a generalized permutation tuple in this basis
    if mats
        .iter()
        .all(|m| is_generalized_permutation(m, &scale).is_some())
    {
        let x = Mat::identity(d);
        let mut perms = Vec::new();
        let mut scalars = Vec::new();
        for m in mats {
            let (p, s) = is_generalized_permutation(m, &scale).unwrap();
            perms.push(p);
            scalars.push(s);
        }
        return Some((x, perms, scalars));
    }
    // orbit closure over candidate lines
    let mut seen_starts: Vec<Vec<T>> = Vec::new();
    'cand: for start in candidates {
        let Some(start) = T::canonical(&start) else {
            continue;
        };
        if seen_starts.iter().any(|s| T::lines_equal(s, &start)) {
            continue;
        }
        seen_starts.push(start.clone());
        let mut orbit: Vec<Vec<T>> = vec![start];
        let mut frontier = vec![0usize];
        while let Some(idx) = frontier.pop() {
            if orbit.len() > opts.orbit_budget {
                continue 'cand;
            }
            let v = orbit[idx].clone();
            for m in mats {
                let image = m.apply(&v);
                let Some(image) = T::canonical(&image) else {
                    continue 'cand;
                };
                if !orbit.iter().any(|l| T::lines_equal(l, &image)) {
                    orbit.push(image);
                    frontier.push(orbit.len() - 1);
                }
            }
        }
        if orbit.len() != d {
            continue;
        }
        // independence
        let mut space: RowSpace<T> = RowSpace::new(d);
        for line in &orbit {
            space.insert(line.clone());
        }
        if space.rank() != d {
            continue;
        }
        let x = Mat::from_fn(d, |i, j| orbit[j][i].clone());
        let Ok(xi) = x.inverse() else { continue };
        let mut perms = Vec::new();
        let mut scalars = Vec::new();
        for m in mats {
            let conj = xi.mul(m).mul(&x);
            let conj_scale = {
                let mut s = T::zero();
                for i in 0..d {
                    for e in conj.row(i) {
                        if e.abs_cmp(&s) == std::cmp::Ordering::Greater {
                            s = e.clone();
                        }
                    }
                }
                s
            };
            match is_generalized_permutation(&conj, &conj_scale) {
                Some((p, sc)) => {
                    perms.push(p);
                    scalars.push(sc);
                }
                None => continue 'cand,
            }
        }
        return Some((x, perms, scalars));
    }
    None
}

/// Eigenline candidates from word products up to the configured length:
/// one-dimensional kernels of `A_w - lambda I` for representable real
/// eigenvalues `lambda`.
fn candidate_lines<T: LineOps>(products: &[Mat<T>]) -> Vec<Vec<T>> {
    let d = products[0].dim();
    let mut out = Vec::new();
    // coordinate axes first: they are the permuted lines whenever the
    // tuple is an axis-aligned conjugate of a permutation tuple
    for i in 0..d {
        let mut e = vec![T::zero(); d];
        e[i] = num_traits::One::one();
        out.push(e);
    }
    for m in products {
        let eig = T::eigen_spaces(m);
        for space in eig.spaces {
            if space.len() == 1 {
                out.push(space.into_iter().next().unwrap());
            }
        }
    }
    out
}

/// Search for a basis in which every matrix of the tuple is a generalized
/// permutation matrix. Candidate lines are eigenlines of short words; the
/// line set is closed under the tuple action within the orbit budget. A
/// `None` is not a certificate of strong irreducibility.
pub fn detect_generalized_permutation(
    tuple: &MatrixTuple,
    opts: &PermDetectOpts,
) -> Result<Option<PermutationForm>> {
    let n = tuple.count();
    let budget = 4096u64;
    match tuple.exact_mats() {
        Some(mats) => {
            let mut products: Vec<QMat> = Vec::new();
            for len in 1..=opts.max_word_len {
                if crate::symbolic::word_count(n, len).is_none_or(|c| c > budget) {
                    break;
                }
                for w in enumerate_words(n, len, budget)? {
                    products.push(word_product_exact(tuple, &w)?);
                }
            }
            let candidates = candidate_lines(&products);
            match detect_generic(mats, candidates, opts) {
                Some((x, perms, scalars_q)) => {
                    let basis_f = x.to_float();
                    let scalars_f = scalars_q
                        .iter()
                        .map(|row| row.iter().map(rational_to_f64).collect())
                        .collect();
                    Ok(Some(PermutationForm {
                        basis_f,
                        basis_q: Some(x),
                        perms,
                        scalars_f,
                        scalars_q: Some(scalars_q),
                    }))
                }
                None => Ok(None),
            }
        }
        None => {
            let mut products: Vec<FMat> = Vec::new();
            for len in 1..=opts.max_word_len {
                if crate::symbolic::word_count(n, len).is_none_or(|c| c > budget) {
                    break;
                }
                for w in enumerate_words(n, len, budget)? {
                    products.push(word_product(tuple, &w)?);
                }
            }
            let candidates = candidate_lines(&products);
            match detect_generic(tuple.float_mats(), candidates, opts) {
                Some((x, perms, scalars_f)) => Ok(Some(PermutationForm {
                    basis_f: x,
                    basis_q: None,
                    perms,
                    scalars_f,
                    scalars_q: None,
                })),
                None => Ok(None),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_rational;

    fn qm(rows: &[&[&str]]) -> QMat {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn already_permutation_tuple_detects_with_identity_basis() {
        let a1 = qm(&[&["0", "0", "2"], &["1", "0", "0"], &["0", "2", "0"]]);
        let a2 = qm(&[&["0", "1", "0"], &["0", "0", "2"], &["2", "0", "0"]]);
        let t = MatrixTuple::from_rational(vec![a1, a2], None).unwrap();
        let form = detect_generalized_permutation(&t, &PermDetectOpts::default())
            .unwrap()
            .unwrap();
        assert_eq!(form.residual(&t).unwrap(), 0.0);
        // column 1 of A_1 maps e1 -> e2
        assert_eq!(form.perms[0][0], 1);
    }

    #[test]
    fn conjugated_permutation_tuple_is_recovered() {
        let a1 = qm(&[&["0", "0", "2"], &["1", "0", "0"], &["0", "2", "0"]]);
        let a2 = qm(&[&["0", "1", "0"], &["0", "0", "2"], &["2", "0", "0"]]);
        let x = qm(&[&["1", "1", "0"], &["0", "1", "2"], &["1", "0", "1"]]);
        let xi = x.inverse().unwrap();
        let b1 = x.mul(&a1).mul(&xi);
        let b2 = x.mul(&a2).mul(&xi);
        let t = MatrixTuple::from_rational(vec![b1, b2], None).unwrap();
        let form = detect_generalized_permutation(&t, &PermDetectOpts::default())
            .unwrap()
            .expect("round trip detection");
        assert_eq!(form.residual(&t).unwrap(), 0.0);
    }

    #[test]
    fn generic_rotations_are_not_permutation_form() {
        let rot = |t: f64| {
            FMat::from_rows(vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap()
        };
        let t = MatrixTuple::from_float(vec![rot(1.0), rot(0.3)], None).unwrap();
        assert!(
            detect_generalized_permutation(&t, &PermDetectOpts::default())
                .unwrap()
                .is_none()
        );
    }
}
